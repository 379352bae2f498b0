//! Paired-execution noninterference checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::gen::{generate_with, GenConfig};
use crate::lang::{eval, low_project, pretty, Expr, Observation, RunConfig, Value, ValueView};
use crate::lattice::{Label, LatticeMismatch};
use crate::runtime::{MonitorError, Mutation};

/// Minimum share of pairs whose observation is not entirely hidden. Below
/// this the observer is too high to see anything and a clean campaign proves
/// little.
pub const VACUITY_THRESHOLD: f64 = 0.30;

#[derive(Debug, Error)]
pub enum PairError {
    #[error("secret label {secret} flows to observer {observe}; the comparison would be vacuous")]
    VacuousObserver { secret: Label, observe: Label },
    #[error("secret values {0} and {1} are of different kinds")]
    KindMismatch(ValueView, ValueView),
    #[error("no secret hole is configured")]
    NoHole,
    #[error(transparent)]
    Config(#[from] MonitorError),
    #[error(transparent)]
    Lattice(#[from] LatticeMismatch),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Pass,
    Fail,
    BothTimeout,
    /// Exactly one run timed out; excluded under termination-insensitive NI.
    Skipped,
}

/// The varied input of a pair.
#[derive(Debug, Clone)]
pub struct SecretPair {
    pub hole: String,
    pub label: Label,
    pub v1: Value,
    pub v2: Value,
}

#[derive(Debug, Clone)]
pub struct NiVerdict {
    pub source: String,
    pub v1: ValueView,
    pub v2: ValueView,
    pub observe: Label,
    pub o1: Observation,
    pub o2: Observation,
    pub status: Status,
}

fn same_kind(a: &Value, b: &Value) -> bool {
    std::mem::discriminant(a) == std::mem::discriminant(b)
}

/// Runs `program` once per secret value, identical otherwise, and compares
/// what `observe` sees of each run.
pub fn run_pair(program: &Expr, base: &RunConfig, pair: &SecretPair, observe: &Label) -> Result<NiVerdict, PairError> {
    if pair.label.can_flow_to(observe)? {
        return Err(PairError::VacuousObserver { secret: pair.label.clone(), observe: observe.clone() });
    }
    if !same_kind(&pair.v1, &pair.v2) {
        return Err(PairError::KindMismatch(pair.v1.view(), pair.v2.view()));
    }
    let run = |v: &Value| {
        let cfg = base.clone().secret(&pair.hole, pair.label.clone(), v.clone());
        eval(program, &cfg)
    };
    let (r1, r2) = (run(&pair.v1)?, run(&pair.v2)?);
    let o1 = low_project(&r1, observe)?;
    let o2 = low_project(&r2, observe)?;
    let status = match (r1.timed_out(), r2.timed_out()) {
        (true, true) => Status::BothTimeout,
        (true, false) | (false, true) => Status::Skipped,
        (false, false) if o1 == o2 => Status::Pass,
        (false, false) => Status::Fail,
    };
    Ok(NiVerdict {
        source: pretty(program),
        v1: pair.v1.view(),
        v2: pair.v2.view(),
        observe: observe.clone(),
        o1,
        o2,
        status,
    })
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    /// Pair `i` is generated from seed `gen.seed + i`.
    pub gen: GenConfig,
    pub pairs: u64,
    pub observe: Label,
    pub mutation: Mutation,
    pub step_budget: u64,
}

impl CampaignConfig {
    pub fn new(gen: GenConfig, pairs: u64, observe: Label) -> Self {
        CampaignConfig { gen, pairs, observe, mutation: Mutation::None, step_budget: crate::lang::DEFAULT_STEP_BUDGET }
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = mutation;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureRecord {
    pub seed: u64,
    pub source: String,
    pub v1: String,
    pub v2: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CampaignSummary {
    pub pairs: u64,
    pub pass: u64,
    pub fail: u64,
    pub both_timeout: u64,
    pub skipped: u64,
    /// Pairs where at least one run showed the observer something.
    #[serde(skip)]
    pub informative: u64,
    /// Sorted by seed.
    pub failures: Vec<FailureRecord>,
}

impl CampaignSummary {
    pub fn skipped_rate(&self) -> f64 {
        self.skipped as f64 / self.pairs.max(1) as f64
    }

    pub fn informative_rate(&self) -> f64 {
        self.informative as f64 / self.pairs.max(1) as f64
    }

    pub fn is_vacuous(&self) -> bool {
        self.informative_rate() < VACUITY_THRESHOLD
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serialization cannot fail")
    }
}

/// Draws two distinct values of the same kind.
fn secret_values<R: Rng>(rng: &mut R) -> (Value, Value) {
    if rng.random_bool(0.8) {
        let a = rng.random_range(0..=3);
        let b = (a + rng.random_range(1..=3)) % 4;
        (Value::Int(a), Value::Int(b))
    } else {
        let a = rng.random_bool(0.5);
        (Value::Bool(a), Value::Bool(!a))
    }
}

/// The program, base configuration and varied secret for pair `seed`.
pub fn pair_case(cfg: &CampaignConfig, seed: u64) -> Result<(Expr, RunConfig, SecretPair), PairError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let program = generate_with(&cfg.gen, &mut rng);
    let (hole, label) = cfg.gen.secrets.first().cloned().ok_or(PairError::NoHole)?;
    let (v1, v2) = secret_values(&mut rng);
    let mut base = RunConfig::new(cfg.gen.lattice);
    base.mutation = cfg.mutation;
    base.step_budget = cfg.step_budget;
    for (name, l) in &cfg.gen.secrets[1..] {
        base = base.secret(name, l.clone(), Value::Int(rng.random_range(0..=3)));
    }
    Ok((program, base, SecretPair { hole, label, v1, v2 }))
}

pub fn run_case(cfg: &CampaignConfig, seed: u64) -> Result<NiVerdict, PairError> {
    let (program, base, pair) = pair_case(cfg, seed)?;
    run_pair(&program, &base, &pair, &cfg.observe)
}

pub fn campaign(cfg: &CampaignConfig) -> Result<CampaignSummary, PairError> {
    // Reject a vacuous observer once up front rather than per pair.
    if let Some((_, l)) = cfg.gen.secrets.first() {
        if l.can_flow_to(&cfg.observe)? {
            return Err(PairError::VacuousObserver { secret: l.clone(), observe: cfg.observe.clone() });
        }
    }
    let verdicts: Vec<(u64, NiVerdict)> = (0..cfg.pairs)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.gen.seed.wrapping_add(i);
            run_case(cfg, seed).map(|v| (seed, v))
        })
        .collect::<Result<_, _>>()?;
    let mut summary = CampaignSummary { pairs: cfg.pairs, ..Default::default() };
    for (seed, v) in verdicts {
        if v.o1.is_informative() || v.o2.is_informative() {
            summary.informative += 1;
        }
        match v.status {
            Status::Pass => summary.pass += 1,
            Status::BothTimeout => summary.both_timeout += 1,
            Status::Skipped => summary.skipped += 1,
            Status::Fail => {
                summary.fail += 1;
                summary.failures.push(FailureRecord {
                    seed,
                    source: v.source,
                    v1: v.v1.to_string(),
                    v2: v.v2.to_string(),
                });
            }
        }
    }
    summary.failures.sort_by_key(|f| f.seed);
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;
    use crate::lattice::LatticeKind;

    fn pair(v1: i64, v2: i64) -> SecretPair {
        SecretPair { hole: "s".into(), label: Label::HIGH, v1: Value::Int(v1), v2: Value::Int(v2) }
    }

    fn verdict(src: &str, mutation: Mutation) -> NiVerdict {
        let mut base = RunConfig::new(LatticeKind::TwoPoint);
        base.mutation = mutation;
        run_pair(&parse_program(src).unwrap(), &base, &pair(1, 2), &Label::LOW).unwrap()
    }

    #[test]
    fn unused_secret_passes() {
        let v = verdict("1+1", Mutation::None);
        assert_eq!(v.status, Status::Pass);
        assert_eq!(v.o1.to_string(), "outcome: 2\n");
    }

    #[test]
    fn unlabel_hides_the_outcome() {
        let v = verdict("unlabel(secret s)", Mutation::None);
        assert_eq!(v.status, Status::Pass);
        assert!(!v.o1.is_informative());
    }

    #[test]
    fn missing_taint_is_caught() {
        let v = verdict("unlabel(secret s)", Mutation::UnlabelNoTaint);
        assert_eq!(v.status, Status::Fail);
    }

    #[test]
    fn one_sided_timeout_is_skipped() {
        let v = verdict("if unlabel(secret s) == 1 then (let w = fn x => x x in w w) else 0", Mutation::None);
        assert_eq!(v.status, Status::Skipped);
        let v = verdict("let w = fn x => x x in w w", Mutation::None);
        assert_eq!(v.status, Status::BothTimeout);
    }

    #[test]
    fn vacuous_observer_is_rejected() {
        let base = RunConfig::new(LatticeKind::TwoPoint);
        let e = parse_program("1").unwrap();
        assert!(matches!(
            run_pair(&e, &base, &pair(1, 2), &Label::HIGH),
            Err(PairError::VacuousObserver { .. })
        ));
    }

    #[test]
    fn small_campaign_is_clean_and_reproducible() {
        let cfg = CampaignConfig::new(GenConfig::new(LatticeKind::TwoPoint, 9, 6), 300, Label::LOW);
        let a = campaign(&cfg).unwrap();
        assert_eq!(a.fail, 0, "{:#?}", a.failures);
        assert_eq!(a.pass + a.both_timeout + a.skipped, 300);
        assert_eq!(campaign(&cfg).unwrap(), a);
    }

    #[test]
    fn summary_json_shape() {
        let s = CampaignSummary { pairs: 1, pass: 1, ..Default::default() };
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys.len(), 6);
        for k in ["pairs", "pass", "fail", "both_timeout", "skipped", "failures"] {
            assert!(v.get(k).is_some(), "{k}");
        }
    }
}

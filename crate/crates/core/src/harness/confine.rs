//! Clearance confinement: after `lowerClearance c`, nothing the run observes
//! or creates may sit above `c`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::gen::{generate_with, GenConfig};
use crate::lang::{eval, pretty, Expr, ExprKind, Outcome, RunConfig, Value};
use crate::lattice::Label;
use crate::runtime::{MonitorError, StopKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfinementViolation {
    pub seed: u64,
    pub source: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfinementReport {
    pub runs: u64,
    /// Runs ending in a top-level ClearanceViolation stop.
    pub clearance_stops: u64,
    pub violations: Vec<ConfinementViolation>,
}

/// `lowerClearance c; body`.
pub fn confined(body: Expr, c: &Label) -> Expr {
    let lower = Expr::synth(ExprKind::LowerClearance(c.clone()));
    Expr::synth(ExprKind::Seq(Box::new(lower), Box::new(body)))
}

/// Runs `body` under clearance `c` and explains the first breach, if any.
/// Returns whether the run ended in a clearance stop, plus the breach.
pub fn check_body(body: &Expr, config: &RunConfig, c: &Label) -> Result<(bool, Option<String>), MonitorError> {
    let report = eval(&confined(body.clone(), c), config)?;
    let stopped = matches!(&report.outcome, Outcome::Stopped(s) if s.kind == StopKind::ClearanceViolation);
    if !report.final_label.flows(c) {
        return Ok((stopped, Some(format!("final label {} not below {c}", report.final_label))));
    }
    let breach = report
        .trace
        .iter()
        .find(|e| !e.label.flows(c))
        .map(|e| format!("{:?} event at {} carries {}", e.kind, e.pos, e.label));
    Ok((stopped, breach))
}

/// Checks `trials` generated bodies (seeds `gen.seed..`) under `c`.
pub fn check_confinement(gen: &GenConfig, c: &Label, trials: u64) -> Result<ConfinementReport, MonitorError> {
    let results: Vec<(u64, Expr, bool, Option<String>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = gen.seed.wrapping_add(i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let body = generate_with(gen, &mut rng);
            let mut config = RunConfig::new(gen.lattice);
            for (name, l) in &gen.secrets {
                config = config.secret(name, l.clone(), Value::Int(rng.random_range(0..=3)));
            }
            let (stopped, breach) = check_body(&body, &config, c)?;
            Ok((seed, body, stopped, breach))
        })
        .collect::<Result<_, MonitorError>>()?;
    let mut report = ConfinementReport { runs: trials, ..Default::default() };
    for (seed, body, stopped, breach) in results {
        report.clearance_stops += u64::from(stopped);
        if let Some(reason) = breach {
            report.violations.push(ConfinementViolation { seed, source: pretty(&body), reason });
        }
    }
    report.violations.sort_by_key(|v| v.seed);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;
    use crate::lattice::LatticeKind;

    fn two() -> RunConfig {
        RunConfig::new(LatticeKind::TwoPoint).secret("s", Label::HIGH, Value::Int(3))
    }

    #[test]
    fn reading_a_secret_below_clearance_stops() {
        let body = parse_program("unlabel(secret s)").unwrap();
        assert_eq!(check_body(&body, &two(), &Label::LOW).unwrap(), (true, None));
    }

    #[test]
    fn no_op_lowering_behaves_as_before() {
        let body = parse_program("unlabel(secret s) + 1").unwrap();
        let plain = eval(&body, &two()).unwrap();
        let lowered = eval(&confined(body.clone(), &Label::HIGH), &two()).unwrap();
        assert_eq!(plain.outcome, lowered.outcome);
        assert_eq!(plain.final_label, lowered.final_label);
        assert_eq!(check_body(&body, &two(), &Label::HIGH).unwrap(), (false, None));
    }

    #[test]
    fn generated_bodies_stay_confined() {
        let gen = GenConfig::new(LatticeKind::TwoPoint, 500, 6);
        let report = check_confinement(&gen, &Label::LOW, 200).unwrap();
        assert!(report.violations.is_empty(), "{:#?}", report.violations);
        assert!(report.clearance_stops > 0);
    }
}

//! Straight-line programs over the principal lattice and a fold-join model
//! of their final label.
//!
//! The model works on raw name sets and shares no code with the lattice
//! module, so agreement is evidence rather than tautology.

use std::collections::BTreeSet;

use rand::Rng;

use crate::lang::{Expr, ExprKind, RunConfig, Value};
use crate::lattice::{Label, LatticeKind, PrincipalLabel};

const UNIVERSE: [&str; 3] = ["A", "B", "C"];

type Names = BTreeSet<String>;

/// A finite principal label as plain sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetLabel {
    pub secrecy: Names,
    pub integrity: Names,
}

impl SetLabel {
    fn below(&self, other: &SetLabel) -> bool {
        self.secrecy.iter().all(|s| other.secrecy.contains(s))
            && other.integrity.iter().all(|i| self.integrity.contains(i))
    }

    fn join(&self, other: &SetLabel) -> SetLabel {
        SetLabel {
            secrecy: self.secrecy.iter().chain(&other.secrecy).cloned().collect(),
            integrity: self.integrity.iter().filter(|i| other.integrity.contains(*i)).cloned().collect(),
        }
    }

    pub fn to_label(&self) -> Label {
        Label::Principal(PrincipalLabel::new(self.secrecy.clone(), self.integrity.clone()))
    }

    fn random<R: Rng>(rng: &mut R) -> SetLabel {
        let mut pick = || UNIVERSE.iter().filter(|_| rng.random_bool(0.4)).map(|s| s.to_string()).collect();
        let secrecy = pick();
        let integrity = pick();
        SetLabel { secrecy, integrity }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// `unlabel(secret sN)`
    UnlabelSecret(usize),
    /// `unlabel(label l 0)`
    UnlabelFresh(SetLabel),
    /// `readRef(newRef l 0)`
    ReadFreshRef(SetLabel),
    /// `toLabeled l { unlabel(secret sN) }`
    Scoped(SetLabel, usize),
    /// `unlabel(toLabeled l { unlabel(secret sN) })`
    UnlabelScoped(SetLabel, usize),
    /// `labelOf(secret sN)`
    LabelOf(usize),
}

#[derive(Debug, Clone)]
pub struct StraightLine {
    pub initial: SetLabel,
    pub secrets: Vec<SetLabel>,
    pub steps: Vec<Step>,
}

impl StraightLine {
    pub fn random<R: Rng>(rng: &mut R, max_steps: usize) -> StraightLine {
        let all: Names = UNIVERSE.iter().map(|s| s.to_string()).collect();
        let initial = SetLabel { secrecy: Names::new(), integrity: all };
        let secrets: Vec<SetLabel> = (0..4).map(|_| SetLabel::random(rng)).collect();
        let n = rng.random_range(1..=max_steps.max(1));
        let steps = (0..n)
            .map(|_| {
                let s = rng.random_range(0..secrets.len());
                match rng.random_range(0..6) {
                    0 => Step::UnlabelSecret(s),
                    1 => Step::UnlabelFresh(SetLabel::random(rng)),
                    2 => Step::ReadFreshRef(SetLabel::random(rng)),
                    3 => Step::Scoped(SetLabel::random(rng), s),
                    4 => Step::UnlabelScoped(SetLabel::random(rng), s),
                    _ => Step::LabelOf(s),
                }
            })
            .collect();
        StraightLine { initial, secrets, steps }
    }

    fn secret_name(i: usize) -> String {
        format!("s{i}")
    }

    fn step_expr(step: &Step) -> Expr {
        fn e(kind: ExprKind) -> Expr {
            Expr::synth(kind)
        }
        fn b(x: Expr) -> Box<Expr> {
            Box::new(x)
        }
        let zero = || b(e(ExprKind::IntLit(0)));
        let read = |i: usize| e(ExprKind::Unlabel(b(e(ExprKind::SecretHole(Self::secret_name(i))))));
        match step {
            Step::UnlabelSecret(i) => read(*i),
            Step::UnlabelFresh(l) => e(ExprKind::Unlabel(b(e(ExprKind::LabelE(l.to_label(), zero()))))),
            Step::ReadFreshRef(l) => e(ExprKind::ReadRef(b(e(ExprKind::NewRef(l.to_label(), zero()))))),
            Step::Scoped(l, i) => e(ExprKind::ToLabeled(l.to_label(), b(read(*i)))),
            Step::UnlabelScoped(l, i) => {
                e(ExprKind::Unlabel(b(e(ExprKind::ToLabeled(l.to_label(), b(read(*i)))))))
            }
            Step::LabelOf(i) => e(ExprKind::LabelOf(b(e(ExprKind::SecretHole(Self::secret_name(*i)))))),
        }
    }

    /// `let x0 = step0 in ... in ()`
    pub fn to_expr(&self) -> Expr {
        self.steps.iter().enumerate().rev().fold(Expr::synth(ExprKind::UnitLit), |body, (i, step)| {
            Expr::synth(ExprKind::Let(format!("x{i}"), Box::new(Self::step_expr(step)), Box::new(body)))
        })
    }

    pub fn config(&self) -> RunConfig {
        let mut cfg = RunConfig::new(LatticeKind::Principal);
        cfg.initial_label = self.initial.to_label();
        for (i, l) in self.secrets.iter().enumerate() {
            cfg = cfg.secret(&Self::secret_name(i), l.to_label(), Value::Int(i as i64));
        }
        cfg
    }
}

/// Final current label predicted by folding joins over the observed labels.
/// Clearance is unbounded, so the only way to stop early is a write below
/// the current label (`label`, `newRef`, `toLabeled`), or re-raising a
/// packaged scope overflow.
pub fn oracle_final_label(p: &StraightLine) -> SetLabel {
    let mut cur = p.initial.clone();
    for step in &p.steps {
        match step {
            Step::UnlabelSecret(i) => cur = cur.join(&p.secrets[*i]),
            Step::UnlabelFresh(l) | Step::ReadFreshRef(l) => {
                if !cur.below(l) {
                    return cur;
                }
                cur = cur.join(l);
            }
            Step::Scoped(l, _) => {
                if !cur.below(l) {
                    return cur;
                }
            }
            Step::UnlabelScoped(l, i) => {
                if !cur.below(l) {
                    return cur;
                }
                let reached = cur.join(&p.secrets[*i]);
                cur = cur.join(l);
                if !reached.below(l) {
                    return cur;
                }
            }
            Step::LabelOf(_) => {}
        }
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::eval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn evaluator_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let p = StraightLine::random(&mut rng, 12);
            let report = eval(&p.to_expr(), &p.config()).unwrap();
            assert_eq!(report.final_label, oracle_final_label(&p).to_label(), "{:?}", p.steps);
        }
    }

    #[test]
    fn scoped_reads_leave_the_label_alone() {
        let mut cfg = StraightLine::random(&mut ChaCha8Rng::seed_from_u64(1), 1);
        let top: SetLabel = SetLabel { secrecy: UNIVERSE.iter().map(|s| s.to_string()).collect(), integrity: Names::new() };
        cfg.steps = vec![Step::Scoped(top, 0)];
        assert_eq!(oracle_final_label(&cfg), cfg.initial);
        let report = eval(&cfg.to_expr(), &cfg.config()).unwrap();
        assert_eq!(report.final_label, cfg.initial.to_label());
    }
}

//! Randomized scenario driver for the conflict-exclusion and integrity
//! properties.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::script::{apply, Op};
use super::{ChairError, ChairState};
use crate::lang::ValueView;
use crate::lattice::{Label, Secrecy};

const USERS: [&str; 6] = ["alice", "bob", "carol", "dave", "erin", "frank"];
const PAPERS: [&str; 3] = ["p1", "p2", "p3"];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DriverReport {
    pub sequences: u64,
    pub ops: u64,
    /// Successful reads of reviews, a guard against a driver that never
    /// reaches an interesting state.
    pub review_reads: u64,
    pub conflicted_checks: u64,
    /// Reviews checked against a conflicted principal.
    pub hidden_review_checks: u64,
    pub leaks: Vec<String>,
    pub integrity_violations: Vec<String>,
}

fn random_op<R: Rng>(rng: &mut R) -> Op {
    let user = |rng: &mut R| USERS.choose(rng).expect("non-empty").to_string();
    // Biased toward the first paper and the always-chair first user so that
    // assignments and reviews actually happen.
    let paper = |rng: &mut R| if rng.random_bool(0.6) { PAPERS[0] } else { PAPERS.choose(rng).expect("non-empty") }.to_string();
    let chair = |rng: &mut R| if rng.random_bool(0.7) { USERS[0].to_string() } else { user(rng) };
    let reviewer = |rng: &mut R| if rng.random_bool(0.7) { USERS[2 + rng.random_range(0..2)].to_string() } else { user(rng) };
    match rng.random_range(0..10) {
        0 => Op::AddUser { name: user(rng), chair: rng.random_bool(0.3) },
        1 => Op::SubmitPaper { author: user(rng), title: "t".into(), body: "b".into() },
        2 | 3 => Op::AssignReviewer { chair: chair(rng), paper: paper(rng), reviewer: reviewer(rng) },
        4 => Op::DeclareConflict { chair: chair(rng), paper: paper(rng), principal: user(rng) },
        5 | 6 => Op::SubmitReview { reviewer: reviewer(rng), paper: paper(rng), text: format!("r{}", rng.random_range(0..100)) },
        7 => Op::ReadPaper { user: user(rng), paper: paper(rng) },
        8 => Op::ReadReview { user: if rng.random_bool(0.5) { chair(rng) } else { user(rng) }, paper: paper(rng), reviewer: reviewer(rng) },
        _ => Op::ObserveReviews { user: user(rng), paper: paper(rng) },
    }
}

/// A sequence of at most `max_len` ops. Most start by registering a few
/// users, at least one a chair, so later ops have someone to act.
pub fn random_sequence<R: Rng>(rng: &mut R, max_len: usize) -> Vec<Op> {
    let len = rng.random_range(1..=max_len.max(1));
    let mut ops = Vec::with_capacity(len);
    let setup = rng.random_range(2..=USERS.len()).min(len);
    for (i, name) in USERS.iter().take(setup).enumerate() {
        ops.push(Op::AddUser { name: name.to_string(), chair: i == 0 || rng.random_bool(0.2) });
    }
    if ops.len() < len {
        ops.push(Op::SubmitPaper { author: USERS[1].to_string(), title: "t".into(), body: "b".into() });
    }
    while ops.len() < len {
        ops.push(random_op(rng));
    }
    ops
}

fn tags_of(l: &Label) -> Option<&Secrecy> {
    match l {
        Label::Principal(p) => Some(&p.secrecy),
        Label::Two(_) => None,
    }
}

/// Checks every conflicted (principal, paper) pair and every review in the
/// current state.
fn check_state(state: &ChairState, context: &str, report: &mut DriverReport) {
    for review in state.reviews() {
        let Label::Principal(l) = review.content.label() else {
            report.integrity_violations.push(format!("{context}: non-principal review label"));
            continue;
        };
        if l.integrity.len() != 1 || !l.integrity.contains(&review.reviewer) {
            report.integrity_violations.push(format!(
                "{context}: review of {} by {} labeled {}",
                review.paper,
                review.reviewer,
                review.content.label()
            ));
        }
    }
    let papers: Vec<String> = state.papers().map(|p| p.id.clone()).collect();
    for paper in &papers {
        for user in state.principals().iter().filter(|u| state.is_conflicted(u, paper)) {
            report.conflicted_checks += 1;
            if tags_of(&state.clearance(user)).is_some_and(|s| s.contains(paper)) {
                report.leaks.push(format!("{context}: {user} cleared for conflicted {paper}"));
            }
            for (reviewer, seen) in state.observe_reviews(user, paper).unwrap_or_default() {
                report.hidden_review_checks += 1;
                if !matches!(&seen, ValueView::Labeled(_, inner) if **inner == ValueView::Hidden) {
                    report.leaks.push(format!("{context}: {user} sees {reviewer}'s review of {paper}: {seen}"));
                }
                match state.read_review(user, paper, &reviewer) {
                    Err(ChairError::ClearanceViolation(_)) => {}
                    other => report.leaks.push(format!("{context}: {user} read_review {paper} {reviewer}: {other:?}")),
                }
            }
            if let Ok(read) = state.read_paper(user, paper) {
                report.leaks.push(format!("{context}: {user} read conflicted {paper}: {read:?}"));
            }
        }
    }
}

pub fn drive(seed: u64, sequences: u64, max_len: usize) -> DriverReport {
    let mut report = DriverReport { sequences, ..Default::default() };
    for s in 0..sequences {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(s));
        let ops = random_sequence(&mut rng, max_len);
        let mut state = ChairState::new();
        for (i, op) in ops.iter().enumerate() {
            report.ops += 1;
            let result = apply(&mut state, op);
            if matches!(op, Op::ReadReview { .. }) && result.is_ok() {
                report.review_reads += 1;
            }
            check_state(&state, &format!("seq {} op {}", seed.wrapping_add(s), i + 1), &mut report);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences_are_bounded_and_deterministic() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = random_sequence(&mut a, 40);
            assert!(!s.is_empty() && s.len() <= 40);
            assert_eq!(s, random_sequence(&mut b, 40));
        }
    }

    #[test]
    fn short_drive_is_clean() {
        let r = drive(11, 60, 40);
        assert!(r.leaks.is_empty(), "{:#?}", r.leaks);
        assert!(r.integrity_violations.is_empty());
        assert!(r.hidden_review_checks > 0 && r.review_reads > 0);
    }
}

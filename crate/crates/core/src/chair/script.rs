//! JSON scenario scripts and their transcripts.

use std::fmt::Write;

use serde::Deserialize;

use super::{ChairError, ChairState};
use crate::lang::pretty::escape_str;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Op {
    AddUser {
        name: String,
        #[serde(default)]
        chair: bool,
    },
    SubmitPaper {
        author: String,
        title: String,
        body: String,
    },
    AssignReviewer {
        chair: String,
        paper: String,
        reviewer: String,
    },
    DeclareConflict {
        chair: String,
        paper: String,
        principal: String,
    },
    SubmitReview {
        reviewer: String,
        paper: String,
        text: String,
    },
    ReadPaper {
        user: String,
        paper: String,
    },
    ReadReview {
        user: String,
        paper: String,
        reviewer: String,
    },
    /// Shows each review of `paper` as `user`'s clearance lets them see it.
    ObserveReviews {
        user: String,
        paper: String,
    },
}

impl Op {
    fn describe(&self) -> String {
        match self {
            Op::AddUser { name, chair } => format!("add_user {name}{}", if *chair { " (chair)" } else { "" }),
            Op::SubmitPaper { author, title, .. } => format!("submit_paper {author} {}", escape_str(title)),
            Op::AssignReviewer { chair, paper, reviewer } => format!("assign_reviewer {chair} {paper} {reviewer}"),
            Op::DeclareConflict { chair, paper, principal } => {
                format!("declare_conflict {chair} {paper} {principal}")
            }
            Op::SubmitReview { reviewer, paper, .. } => format!("submit_review {reviewer} {paper}"),
            Op::ReadPaper { user, paper } => format!("read_paper {user} {paper}"),
            Op::ReadReview { user, paper, reviewer } => format!("read_review {user} {paper} {reviewer}"),
            Op::ObserveReviews { user, paper } => format!("observe_reviews {user} {paper}"),
        }
    }
}

pub fn parse_script(json: &str) -> Result<Vec<Op>, serde_json::Error> {
    serde_json::from_str(json)
}

/// Applies `op` and renders its result lines (without the leading command).
pub fn apply(state: &mut ChairState, op: &Op) -> Result<Vec<String>, ChairError> {
    let lines = match op {
        Op::AddUser { name, chair } => {
            state.add_user(name, *chair)?;
            vec![format!("ok: clearance {}", state.clearance(name))]
        }
        Op::SubmitPaper { author, title, body } => {
            let p = state.submit_paper(author, title, body)?;
            vec![format!("ok: paper {} body label {}", p.id, p.body.label())]
        }
        Op::AssignReviewer { chair, paper, reviewer } => {
            state.assign_reviewer(chair, paper, reviewer)?;
            vec![format!("ok: readers of {paper} = {}", readers(state, paper))]
        }
        Op::DeclareConflict { chair, paper, principal } => {
            state.declare_conflict(chair, paper, principal)?;
            vec![format!("ok: readers of {paper} = {}", readers(state, paper))]
        }
        Op::SubmitReview { reviewer, paper, text } => {
            let r = state.submit_review(reviewer, paper, text)?;
            vec![format!("ok: review label {}", r.content.label())]
        }
        Op::ReadPaper { user, paper } => {
            let read = state.read_paper(user, paper)?;
            vec![format!("ok: {} session label {}", escape_str(&read.text), read.session_label)]
        }
        Op::ReadReview { user, paper, reviewer } => {
            let read = state.read_review(user, paper, reviewer)?;
            vec![format!("ok: {} session label {}", escape_str(&read.text), read.session_label)]
        }
        Op::ObserveReviews { user, paper } => {
            let seen = state.observe_reviews(user, paper)?;
            if seen.is_empty() {
                vec!["ok: no reviews".to_string()]
            } else {
                seen.into_iter().map(|(reviewer, v)| format!("ok: {reviewer}: {v}")).collect()
            }
        }
    };
    Ok(lines)
}

fn readers(state: &ChairState, paper: &str) -> String {
    let names: Vec<String> = state.readers(paper).into_iter().collect();
    format!("{{{}}}", names.join(","))
}

/// Runs every op in order. Errors are part of the transcript and do not stop
/// the script.
pub fn run_script(ops: &[Op]) -> String {
    let mut state = ChairState::new();
    let mut out = String::new();
    for (i, op) in ops.iter().enumerate() {
        writeln!(out, "[{}] {}", i + 1, op.describe()).unwrap();
        match apply(&mut state, op) {
            Ok(lines) => {
                for line in lines {
                    writeln!(out, "    {line}").unwrap();
                }
            }
            Err(e) => writeln!(out, "    error: {e}").unwrap(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_ops() {
        let ops = parse_script(
            r#"[{"op":"add_user","name":"alice"},
                {"op":"add_user","name":"cathy","chair":true},
                {"op":"read_review","user":"a","paper":"p1","reviewer":"b"}]"#,
        )
        .unwrap();
        assert_eq!(ops[0], Op::AddUser { name: "alice".into(), chair: false });
        assert_eq!(ops[1], Op::AddUser { name: "cathy".into(), chair: true });
        assert!(parse_script(r#"[{"op":"add_user","name":"a","extra":1}]"#).is_err());
        assert!(parse_script(r#"[{"op":"launch"}]"#).is_err());
    }

    #[test]
    fn errors_do_not_abort() {
        let ops = vec![
            Op::AddUser { name: "alice".into(), chair: false },
            Op::AddUser { name: "alice".into(), chair: false },
            Op::ReadPaper { user: "alice".into(), paper: "p9".into() },
        ];
        let t = run_script(&ops);
        assert_eq!(
            t,
            "[1] add_user alice\n    ok: clearance <{alice}|{}>\n\
             [2] add_user alice\n    error: DuplicatePrincipal: alice is already registered\n\
             [3] read_paper alice p9\n    error: UnknownPaper: p9\n"
        );
    }
}

//! A conference-reviewing scenario on the principal lattice.
//!
//! Each paper gets its own secrecy tag (its id). Paper bodies are labeled
//! `<{p}|{author}>` and reviews `<{p}|{reviewer}>`. Who may read paper `p` is
//! decided by clearances: a user's session clearance carries tag `p` exactly
//! when they are a chair or assigned reviewer of `p` and not conflicted with
//! it. Authors are conflicted with their own papers.
//!
//! Every read runs `unlabel` inside a fresh session context for the acting
//! user, so the monitor, not this module, decides what is readable.

pub mod driver;
pub mod script;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::lang::report::project_value;
use crate::lang::{Value, ValueView};
use crate::lattice::{Label, PrincipalLabel};
use crate::pos::Pos;
use crate::runtime::{Abort, Labeled, LioContext, MonitorError};

pub use script::{run_script, Op};

/// Secrecy tag held by every chair.
pub const CHAIR_TAG: &str = "chair";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChairError {
    #[error("DuplicatePrincipal: {0} is already registered")]
    DuplicatePrincipal(String),
    #[error("InvalidName: {0:?} is reserved or not a valid principal name")]
    InvalidName(String),
    #[error("UnknownPrincipal: {0}")]
    UnknownPrincipal(String),
    #[error("UnknownPaper: {0}")]
    UnknownPaper(String),
    #[error("NotChair: {0} is not a chair")]
    NotChair(String),
    #[error("ConflictExists: {principal} is conflicted with {paper}")]
    ConflictExists { principal: String, paper: String },
    #[error("NotAssigned: {reviewer} is not assigned to {paper}")]
    NotAssigned { reviewer: String, paper: String },
    #[error("NoReview: {reviewer} has not reviewed {paper}")]
    NoReview { reviewer: String, paper: String },
    #[error("ClearanceViolation: {0}")]
    ClearanceViolation(String),
    #[error("MonitorStop: {0}")]
    Monitor(String),
}

impl From<Abort<Value>> for ChairError {
    fn from(a: Abort<Value>) -> Self {
        match a {
            Abort::Stop(s) if s.kind == crate::runtime::StopKind::ClearanceViolation => {
                ChairError::ClearanceViolation(s.message)
            }
            Abort::Stop(s) => ChairError::Monitor(format!("{}: {}", s.kind, s.message)),
            Abort::Throw(e) => ChairError::Monitor(format!("exception at {}", e.label)),
        }
    }
}

impl From<MonitorError> for ChairError {
    fn from(e: MonitorError) -> Self {
        ChairError::Monitor(e.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct Paper {
    pub id: String,
    pub title: String,
    pub author: String,
    pub body: Labeled<Value>,
}

#[derive(Debug, Clone)]
pub struct Review {
    pub paper: String,
    pub reviewer: String,
    pub content: Labeled<Value>,
}

/// Result of a successful read: the text and the session label it left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Read {
    pub text: String,
    pub session_label: Label,
}

#[derive(Debug, Default)]
pub struct ChairState {
    principals: BTreeSet<String>,
    chairs: BTreeSet<String>,
    papers: BTreeMap<String, Paper>,
    /// Keyed by (paper, reviewer).
    reviews: BTreeMap<(String, String), Review>,
    assignments: BTreeMap<String, BTreeSet<String>>,
    conflicts: BTreeMap<String, BTreeSet<String>>,
    next_paper: u32,
}

fn label(secrecy: &[&str], integrity: &[&str]) -> Label {
    Label::Principal(PrincipalLabel::new(secrecy.iter().copied(), integrity.iter().copied()))
}

fn is_paper_id(name: &str) -> bool {
    name.len() > 1 && name.starts_with('p') && name[1..].bytes().all(|b| b.is_ascii_digit())
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != CHAIR_TAG
        && !is_paper_id(name)
}

impl ChairState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn principals(&self) -> &BTreeSet<String> {
        &self.principals
    }

    pub fn papers(&self) -> impl Iterator<Item = &Paper> {
        self.papers.values()
    }

    pub fn reviews(&self) -> impl Iterator<Item = &Review> {
        self.reviews.values()
    }

    pub fn is_chair(&self, name: &str) -> bool {
        self.chairs.contains(name)
    }

    pub fn is_conflicted(&self, principal: &str, paper: &str) -> bool {
        self.conflicts.get(paper).is_some_and(|c| c.contains(principal))
    }

    pub fn is_assigned(&self, reviewer: &str, paper: &str) -> bool {
        self.assignments.get(paper).is_some_and(|a| a.contains(reviewer))
    }

    fn known(&self, name: &str) -> Result<(), ChairError> {
        if self.principals.contains(name) {
            Ok(())
        } else {
            Err(ChairError::UnknownPrincipal(name.to_string()))
        }
    }

    fn paper(&self, id: &str) -> Result<&Paper, ChairError> {
        self.papers.get(id).ok_or_else(|| ChairError::UnknownPaper(id.to_string()))
    }

    fn require_chair(&self, actor: &str) -> Result<(), ChairError> {
        self.known(actor)?;
        if self.is_chair(actor) {
            Ok(())
        } else {
            Err(ChairError::NotChair(actor.to_string()))
        }
    }

    /// Chairs and assigned reviewers, minus conflicted principals.
    pub fn readers(&self, paper: &str) -> BTreeSet<String> {
        let assigned = self.assignments.get(paper).into_iter().flatten();
        self.chairs
            .iter()
            .chain(assigned)
            .filter(|p| !self.is_conflicted(p, paper))
            .cloned()
            .collect()
    }

    /// Secrecy tags `user` may read, with no integrity requirement.
    pub fn clearance(&self, user: &str) -> Label {
        let mut tags = vec![user.to_string()];
        if self.is_chair(user) {
            tags.push(CHAIR_TAG.to_string());
        }
        tags.extend(self.papers.keys().filter(|p| self.readers(p).contains(user)).cloned());
        Label::Principal(PrincipalLabel::new(tags, Vec::<String>::new()))
    }

    /// A fresh context acting as `user`: nothing observed yet, vouched for by
    /// `user`, bounded by their clearance.
    pub fn session(&self, user: &str) -> Result<LioContext<Value>, ChairError> {
        self.known(user)?;
        Ok(LioContext::new(label(&[], &[user]), self.clearance(user))?)
    }

    /// A trusted context vouching for `principal`, used to mint data on their
    /// behalf where their own clearance would not reach the label.
    fn system(principal: &str) -> Result<LioContext<Value>, ChairError> {
        Ok(LioContext::new(label(&[], &[principal]), Label::Principal(PrincipalLabel::top()))?)
    }

    pub fn add_user(&mut self, name: &str, chair: bool) -> Result<(), ChairError> {
        if !valid_name(name) {
            return Err(ChairError::InvalidName(name.to_string()));
        }
        if !self.principals.insert(name.to_string()) {
            return Err(ChairError::DuplicatePrincipal(name.to_string()));
        }
        if chair {
            self.chairs.insert(name.to_string());
        }
        Ok(())
    }

    pub fn submit_paper(&mut self, author: &str, title: &str, body: &str) -> Result<&Paper, ChairError> {
        self.known(author)?;
        self.next_paper += 1;
        let id = format!("p{}", self.next_paper);
        let body = Self::system(author)?.label(&label(&[&id], &[author]), Value::str(body), Pos::NONE)?;
        self.conflicts.entry(id.clone()).or_default().insert(author.to_string());
        let paper = Paper { id: id.clone(), title: title.to_string(), author: author.to_string(), body };
        Ok(self.papers.entry(id).or_insert(paper))
    }

    /// Replaces `lv` with a freshly minted value at the same label, vouched
    /// for by `principal`. The old value is dropped.
    fn remint(lv: &Labeled<Value>, principal: &str) -> Result<Labeled<Value>, ChairError> {
        let mut ctx = Self::system(principal)?;
        let text = ctx.unlabel(lv, Pos::NONE)?;
        Ok(ctx.label(lv.label(), text, Pos::NONE)?)
    }

    fn remint_paper(&mut self, paper: &str) -> Result<(), ChairError> {
        let p = self.papers.get(paper).ok_or_else(|| ChairError::UnknownPaper(paper.to_string()))?;
        let body = Self::remint(&p.body, &p.author)?;
        let affected: Vec<(String, String)> = self.reviews.keys().filter(|(p, _)| p == paper).cloned().collect();
        let mut reviews = Vec::with_capacity(affected.len());
        for key in affected {
            let r = &self.reviews[&key];
            reviews.push((key.clone(), Self::remint(&r.content, &r.reviewer)?));
        }
        if let Some(p) = self.papers.get_mut(paper) {
            p.body = body;
        }
        for (key, content) in reviews {
            if let Some(r) = self.reviews.get_mut(&key) {
                r.content = content;
            }
        }
        Ok(())
    }

    pub fn assign_reviewer(&mut self, chair: &str, paper: &str, reviewer: &str) -> Result<(), ChairError> {
        self.require_chair(chair)?;
        self.paper(paper)?;
        self.known(reviewer)?;
        if self.is_conflicted(reviewer, paper) {
            return Err(ChairError::ConflictExists { principal: reviewer.to_string(), paper: paper.to_string() });
        }
        self.remint_paper(paper)?;
        self.assignments.entry(paper.to_string()).or_default().insert(reviewer.to_string());
        Ok(())
    }

    /// Removes `principal` from the paper's readers now and for the future.
    /// Existing body and reviews are re-minted.
    pub fn declare_conflict(&mut self, chair: &str, paper: &str, principal: &str) -> Result<(), ChairError> {
        self.require_chair(chair)?;
        self.paper(paper)?;
        self.known(principal)?;
        self.remint_paper(paper)?;
        self.conflicts.entry(paper.to_string()).or_default().insert(principal.to_string());
        if let Some(a) = self.assignments.get_mut(paper) {
            a.remove(principal);
        }
        Ok(())
    }

    /// Mints the review inside the reviewer's own session, so it carries
    /// exactly the reviewer's integrity.
    pub fn submit_review(&mut self, reviewer: &str, paper: &str, text: &str) -> Result<&Review, ChairError> {
        self.known(reviewer)?;
        self.paper(paper)?;
        if !self.is_assigned(reviewer, paper) || self.is_conflicted(reviewer, paper) {
            return Err(ChairError::NotAssigned { reviewer: reviewer.to_string(), paper: paper.to_string() });
        }
        let mut ctx = self.session(reviewer)?;
        let content = ctx.label(&label(&[paper], &[reviewer]), Value::str(text), Pos::NONE)?;
        let review = Review { paper: paper.to_string(), reviewer: reviewer.to_string(), content };
        let key = (paper.to_string(), reviewer.to_string());
        self.reviews.insert(key.clone(), review);
        Ok(&self.reviews[&key])
    }

    fn read(&self, user: &str, lv: &Labeled<Value>) -> Result<Read, ChairError> {
        let mut ctx = self.session(user)?;
        let v = ctx.unlabel(lv, Pos::NONE)?;
        let text = match v {
            Value::Str(s) => s.to_string(),
            other => other.to_string(),
        };
        Ok(Read { text, session_label: ctx.get_label().clone() })
    }

    pub fn read_paper(&self, user: &str, paper: &str) -> Result<Read, ChairError> {
        let body = self.paper(paper)?.body.clone();
        self.read(user, &body)
    }

    pub fn read_review(&self, user: &str, paper: &str, reviewer: &str) -> Result<Read, ChairError> {
        self.known(user)?;
        self.paper(paper)?;
        let review = self
            .reviews
            .get(&(paper.to_string(), reviewer.to_string()))
            .ok_or_else(|| ChairError::NoReview { reviewer: reviewer.to_string(), paper: paper.to_string() })?;
        self.read(user, &review.content)
    }

    /// What `user` can see of the paper's reviews without reading them: each
    /// review projected at the user's clearance.
    pub fn observe_reviews(&self, user: &str, paper: &str) -> Result<Vec<(String, ValueView)>, ChairError> {
        self.known(user)?;
        self.paper(paper)?;
        let clearance = self.clearance(user);
        Ok(self
            .reviews
            .values()
            .filter(|r| r.paper == paper)
            .map(|r| (r.reviewer.clone(), project_value(&Value::Labeled(r.content.clone()).view(), &clearance)))
            .collect())
    }
}

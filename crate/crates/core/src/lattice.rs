//! Security labels.
//!
//! Two concrete lattices ship with the runtime: a two-point `L ⊑ H` lattice
//! and a principal lattice carrying a secrecy set and an integrity set. The
//! [`Lattice`] trait captures the algebra shared by both, and [`Label`] is the
//! dynamically-tagged sum the interpreter works with, since the lattice of a
//! run is chosen at startup.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Partial order with least upper and greatest lower bounds.
pub trait Lattice: Clone + Eq + fmt::Debug {
    fn flows_to(&self, other: &Self) -> bool;
    fn join(&self, other: &Self) -> Self;
    fn meet(&self, other: &Self) -> Self;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TwoPoint {
    Low,
    High,
}

impl Lattice for TwoPoint {
    fn flows_to(&self, other: &Self) -> bool {
        !matches!((self, other), (TwoPoint::High, TwoPoint::Low))
    }

    fn join(&self, other: &Self) -> Self {
        if *self == TwoPoint::High || *other == TwoPoint::High {
            TwoPoint::High
        } else {
            TwoPoint::Low
        }
    }

    fn meet(&self, other: &Self) -> Self {
        if *self == TwoPoint::Low || *other == TwoPoint::Low {
            TwoPoint::Low
        } else {
            TwoPoint::High
        }
    }
}

/// Secrecy component of a [`PrincipalLabel`].
///
/// `All` stands above every finite set. It exists so a clearance can be
/// unbounded while new principals keep being registered.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Secrecy {
    All,
    Set(BTreeSet<String>),
}

impl Secrecy {
    pub fn empty() -> Self {
        Secrecy::Set(BTreeSet::new())
    }

    pub fn is_subset(&self, other: &Secrecy) -> bool {
        match (self, other) {
            (_, Secrecy::All) => true,
            (Secrecy::All, Secrecy::Set(_)) => false,
            (Secrecy::Set(a), Secrecy::Set(b)) => a.is_subset(b),
        }
    }

    pub fn contains(&self, principal: &str) -> bool {
        match self {
            Secrecy::All => true,
            Secrecy::Set(s) => s.contains(principal),
        }
    }

    fn union(&self, other: &Secrecy) -> Secrecy {
        match (self, other) {
            (Secrecy::All, _) | (_, Secrecy::All) => Secrecy::All,
            (Secrecy::Set(a), Secrecy::Set(b)) => Secrecy::Set(a.union(b).cloned().collect()),
        }
    }

    fn intersection(&self, other: &Secrecy) -> Secrecy {
        match (self, other) {
            (Secrecy::All, x) | (x, Secrecy::All) => x.clone(),
            (Secrecy::Set(a), Secrecy::Set(b)) => {
                Secrecy::Set(a.intersection(b).cloned().collect())
            }
        }
    }
}

/// A (secrecy, integrity) pair over principal names.
///
/// Secrecy is covariant (more tags = more secret), integrity contravariant
/// (more vouching principals = more trusted, hence lower in the order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrincipalLabel {
    pub secrecy: Secrecy,
    pub integrity: BTreeSet<String>,
}

impl PrincipalLabel {
    pub fn new<S, I>(secrecy: S, integrity: I) -> Self
    where
        S: IntoIterator,
        S::Item: Into<String>,
        I: IntoIterator,
        I::Item: Into<String>,
    {
        PrincipalLabel {
            secrecy: Secrecy::Set(secrecy.into_iter().map(Into::into).collect()),
            integrity: integrity.into_iter().map(Into::into).collect(),
        }
    }

    /// `<{}|{}>`: public, unvouched.
    pub fn public() -> Self {
        PrincipalLabel { secrecy: Secrecy::empty(), integrity: BTreeSet::new() }
    }

    /// `<*|{}>`: the top of the lattice.
    pub fn top() -> Self {
        PrincipalLabel { secrecy: Secrecy::All, integrity: BTreeSet::new() }
    }
}

impl Lattice for PrincipalLabel {
    fn flows_to(&self, other: &Self) -> bool {
        self.secrecy.is_subset(&other.secrecy) && other.integrity.is_subset(&self.integrity)
    }

    fn join(&self, other: &Self) -> Self {
        PrincipalLabel {
            secrecy: self.secrecy.union(&other.secrecy),
            integrity: self.integrity.intersection(&other.integrity).cloned().collect(),
        }
    }

    fn meet(&self, other: &Self) -> Self {
        PrincipalLabel {
            secrecy: self.secrecy.intersection(&other.secrecy),
            integrity: self.integrity.union(&other.integrity).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    TwoPoint,
    Principal,
}

impl LatticeKind {
    /// Starting current label of a fresh computation.
    pub fn default_label(self) -> Label {
        match self {
            LatticeKind::TwoPoint => Label::Two(TwoPoint::Low),
            LatticeKind::Principal => Label::Principal(PrincipalLabel::public()),
        }
    }

    /// Starting clearance of a fresh computation.
    pub fn default_clearance(self) -> Label {
        match self {
            LatticeKind::TwoPoint => Label::Two(TwoPoint::High),
            LatticeKind::Principal => Label::Principal(PrincipalLabel::top()),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::TwoPoint => "two-point",
            LatticeKind::Principal => "principal",
        }
    }
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LatticeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two-point" => Ok(LatticeKind::TwoPoint),
            "principal" => Ok(LatticeKind::Principal),
            other => Err(format!("unknown lattice `{other}` (expected two-point or principal)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("labels from different lattices: {left} vs {right}")]
pub struct LatticeMismatch {
    pub left: Label,
    pub right: Label,
}

/// A label from one of the shipped lattices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Two(TwoPoint),
    Principal(PrincipalLabel),
}

impl Label {
    pub const LOW: Label = Label::Two(TwoPoint::Low);
    pub const HIGH: Label = Label::Two(TwoPoint::High);

    pub fn kind(&self) -> LatticeKind {
        match self {
            Label::Two(_) => LatticeKind::TwoPoint,
            Label::Principal(_) => LatticeKind::Principal,
        }
    }

    fn mismatch(&self, other: &Label) -> LatticeMismatch {
        LatticeMismatch { left: self.clone(), right: other.clone() }
    }

    pub fn can_flow_to(&self, other: &Label) -> Result<bool, LatticeMismatch> {
        match (self, other) {
            (Label::Two(a), Label::Two(b)) => Ok(a.flows_to(b)),
            (Label::Principal(a), Label::Principal(b)) => Ok(a.flows_to(b)),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn join(&self, other: &Label) -> Result<Label, LatticeMismatch> {
        match (self, other) {
            (Label::Two(a), Label::Two(b)) => Ok(Label::Two(a.join(b))),
            (Label::Principal(a), Label::Principal(b)) => Ok(Label::Principal(a.join(b))),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn meet(&self, other: &Label) -> Result<Label, LatticeMismatch> {
        match (self, other) {
            (Label::Two(a), Label::Two(b)) => Ok(Label::Two(a.meet(b))),
            (Label::Principal(a), Label::Principal(b)) => Ok(Label::Principal(a.meet(b))),
            _ => Err(self.mismatch(other)),
        }
    }

    /// `can_flow_to` that treats a lattice mismatch as "does not flow".
    pub fn flows(&self, other: &Label) -> bool {
        self.can_flow_to(other).unwrap_or(false)
    }
}

impl From<TwoPoint> for Label {
    fn from(l: TwoPoint) -> Self {
        Label::Two(l)
    }
}

impl From<PrincipalLabel> for Label {
    fn from(l: PrincipalLabel) -> Self {
        Label::Principal(l)
    }
}

fn write_set<'a>(f: &mut fmt::Formatter<'_>, names: impl Iterator<Item = &'a String>) -> fmt::Result {
    f.write_str("{")?;
    for (i, n) in names.enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(n)?;
    }
    f.write_str("}")
}

impl fmt::Display for PrincipalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        match &self.secrecy {
            Secrecy::All => f.write_str("*")?,
            Secrecy::Set(s) => write_set(f, s.iter())?,
        }
        f.write_str("|")?;
        write_set(f, self.integrity.iter())?;
        f.write_str(">")
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Two(TwoPoint::Low) => f.write_str("L"),
            Label::Two(TwoPoint::High) => f.write_str("H"),
            Label::Principal(p) => p.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed label `{text}`: {reason}")]
pub struct LabelParseError {
    pub text: String,
    pub reason: &'static str,
}

fn parse_name_set(body: &str) -> Result<BTreeSet<String>, &'static str> {
    let inner = body
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or("expected a `{...}` principal set")?;
    let mut names = BTreeSet::new();
    if inner.trim().is_empty() {
        return Ok(names);
    }
    for part in inner.split(',') {
        let name = part.trim();
        if name.is_empty() {
            return Err("empty principal name");
        }
        if !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err("principal names are alphanumeric");
        }
        names.insert(name.to_string());
    }
    Ok(names)
}

impl FromStr for PrincipalLabel {
    type Err = LabelParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = |reason| LabelParseError { text: text.to_string(), reason };
        let inner = text
            .trim()
            .strip_prefix('<')
            .and_then(|s| s.strip_suffix('>'))
            .ok_or_else(|| err("expected `<secrecy|integrity>`"))?;
        let (secrecy, integrity) = inner.split_once('|').ok_or_else(|| err("missing `|`"))?;
        let secrecy = if secrecy.trim() == "*" {
            Secrecy::All
        } else {
            Secrecy::Set(parse_name_set(secrecy).map_err(err)?)
        };
        let integrity = parse_name_set(integrity).map_err(err)?;
        Ok(PrincipalLabel { secrecy, integrity })
    }
}

impl FromStr for Label {
    type Err = LabelParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        match text.trim() {
            "L" => Ok(Label::LOW),
            "H" => Ok(Label::HIGH),
            _ => text.parse().map(Label::Principal),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Label {
        s.parse().unwrap()
    }

    #[test]
    fn two_point_order() {
        assert!(Label::LOW.can_flow_to(&Label::HIGH).unwrap());
        assert!(!Label::HIGH.can_flow_to(&Label::LOW).unwrap());
        assert_eq!(Label::LOW.join(&Label::HIGH).unwrap(), Label::HIGH);
        assert_eq!(Label::LOW.meet(&Label::HIGH).unwrap(), Label::LOW);
    }

    #[test]
    fn principal_flow_examples() {
        assert!(p("<{A}|{}>").can_flow_to(&p("<{A,B}|{}>")).unwrap());
        // integrity is contravariant
        assert!(!p("<{}|{A}>").can_flow_to(&p("<{}|{A,B}>")).unwrap());
        assert!(p("<{}|{A,B}>").can_flow_to(&p("<{}|{A}>")).unwrap());
    }

    #[test]
    fn principal_join_meet_examples() {
        assert_eq!(p("<{A}|{}>").join(&p("<{B}|{}>")).unwrap(), p("<{A,B}|{}>"));
        assert_eq!(p("<{}|{A,B}>").join(&p("<{}|{B,C}>")).unwrap(), p("<{}|{B}>"));
        assert_eq!(p("<{A,B}|{}>").meet(&p("<{B,C}|{}>")).unwrap(), p("<{B}|{}>"));
        assert_eq!(p("<*|{}>").meet(&p("<{A}|{}>")).unwrap(), p("<{A}|{}>"));
        assert_eq!(p("<*|{}>").join(&p("<{A}|{}>")).unwrap(), p("<*|{}>"));
    }

    #[test]
    fn mixed_lattices_are_rejected() {
        let e = Label::LOW.can_flow_to(&p("<{}|{}>")).unwrap_err();
        assert_eq!(e.left, Label::LOW);
        assert!(Label::HIGH.join(&p("<*|{}>")).is_err());
        assert!(p("<{A}|{}>").meet(&Label::LOW).is_err());
    }

    #[test]
    fn label_syntax() {
        assert_eq!(p(" < { B , A } | { C } > ").to_string(), "<{A,B}|{C}>");
        assert_eq!(p("<*|{}>").to_string(), "<*|{}>");
        assert_eq!(p("<*|{X}>").to_string(), "<*|{X}>");
        assert_eq!(p("L"), Label::LOW);
        assert_eq!(p("H").to_string(), "H");
        for bad in ["", "<{A}>", "<{A}|{}", "<{A,,B}|{}>", "<{a b}|{}>", "M", "<*|*>"] {
            assert!(bad.parse::<Label>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn names_are_case_sensitive() {
        assert_ne!(p("<{a}|{}>"), p("<{A}|{}>"));
        assert!(!p("<{a}|{}>").flows(&p("<{A}|{}>")));
    }

    #[test]
    fn defaults() {
        assert_eq!(LatticeKind::TwoPoint.default_label(), Label::LOW);
        assert_eq!(LatticeKind::TwoPoint.default_clearance(), Label::HIGH);
        assert_eq!(LatticeKind::Principal.default_label().to_string(), "<{}|{}>");
        assert_eq!(LatticeKind::Principal.default_clearance().to_string(), "<*|{}>");
    }
}

//! The floating-label monitor.
//!
//! A [`LioContext`] holds the current label, the clearance, the reference
//! store and an observation trace. Everything the computation touches is
//! protected by the current label; reading labeled data raises it by join.
//! The clearance bounds how far it may rise and what may be created.
//!
//! Transition rules, in terms of current label `cur` and clearance `clr`:
//!
//! | operation            | requires                       | effect                          |
//! |----------------------|--------------------------------|---------------------------------|
//! | `taint(l)`           | `cur ⊔ l ⊑ clr`                | `cur := cur ⊔ l`                |
//! | `label(l, v)`        | `cur ⊑ l ⊑ clr`                | returns `Labeled(l, v)`         |
//! | `unlabel(lv)`        | `cur ⊔ lv.label ⊑ clr`         | `cur := cur ⊔ lv.label`         |
//! | `to_labeled(l, e)`   | `cur ⊑ l ⊑ clr`                | runs `e`, restores `cur`/`clr`  |
//! | `lower_clearance(c)` | `cur ⊑ c ⊑ clr`                | `clr := c`                      |
//! | `throw(v)`           | -                              | raises `Exception(cur, v)`      |
//! | `catch`              | `cur ⊔ e.label ⊑ clr`          | `cur := cur ⊔ e.label`          |
//!
//! `to_labeled` packages the body's outcome at `l`. If the label reached by
//! the body does not flow to `l` the result is a `ScopeOverflow` exception
//! value at `l`; otherwise a normal return is wrapped as is and any abort
//! (thrown exception or monitor stop, except `Timeout`) is wrapped as an
//! exception value that `unlabel` re-raises.
//!
//! A failing operation leaves the context untouched.

use std::fmt;
use std::sync::Arc;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;
use thiserror::Error;

use crate::lattice::{Label, LatticeMismatch};
use crate::pos::Pos;
use crate::refs::RefStore;

/// Runtime payloads must be able to carry a captured abort, so that
/// `to_labeled` can package a failing body.
pub trait Payload: Clone {
    fn from_abort(abort: Abort<Self>) -> Self;
    fn as_abort(&self) -> Option<&Abort<Self>>;
}

/// Deliberate monitor defects, used to check that the noninterference
/// harness notices a broken monitor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Mutation {
    #[default]
    None,
    /// `unlabel` returns the payload without raising the current label.
    UnlabelNoTaint,
    /// `label` skips its `cur ⊑ l ⊑ clr` precondition.
    LabelNoCheck,
    /// `to_labeled` leaves the body's label and clearance in place.
    ToLabeledNoRestore,
}

impl Mutation {
    pub const ALL: [Mutation; 3] =
        [Mutation::UnlabelNoTaint, Mutation::LabelNoCheck, Mutation::ToLabeledNoRestore];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::None => "none",
            Mutation::UnlabelNoTaint => "unlabel-no-taint",
            Mutation::LabelNoCheck => "label-no-check",
            Mutation::ToLabeledNoRestore => "tolabeled-no-restore",
        }
    }
}

impl std::str::FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Mutation::None]
            .into_iter()
            .chain(Mutation::ALL)
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mutation `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EventKind {
    Taint,
    Label,
    Unlabel,
    ToLabeledEnter,
    ToLabeledExit,
    Throw,
    Catch,
    RefNew,
    RefRead,
    RefWrite,
}

/// One observation. `label` is always at or above the current label at the
/// moment the event happened, which is what makes projecting the trace by
/// `label` sound: `Unlabel`, `RefRead`, `Taint` and `Catch` record the
/// raised current label, `Throw` the current label, and the others the
/// target label their precondition checked against the current label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TraceEvent {
    pub kind: EventKind,
    #[serde(serialize_with = "serialize_display")]
    pub label: Label,
    pub pos: Pos,
}

pub(crate) fn serialize_display<T: fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error("current label {current} cannot flow to {target}")]
    Ifc { current: Label, target: Label },
    #[error("label {label} exceeds clearance {clearance}")]
    Clearance { label: Label, clearance: Label },
    #[error("scope reached {reached}, above its bound {bound}")]
    ScopeOverflow { reached: Label, bound: Label },
    #[error(transparent)]
    Lattice(#[from] LatticeMismatch),
    #[error("reference does not belong to this context")]
    ForeignRef,
}

impl MonitorError {
    pub fn kind(&self) -> StopKind {
        match self {
            MonitorError::Ifc { .. } => StopKind::IfcViolation,
            MonitorError::Clearance { .. } => StopKind::ClearanceViolation,
            MonitorError::ScopeOverflow { .. } => StopKind::ScopeOverflow,
            MonitorError::Lattice(_) => StopKind::LatticeMismatch,
            MonitorError::ForeignRef => StopKind::InvalidReference,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StopKind {
    #[serde(rename = "IFCViolation")]
    IfcViolation,
    ClearanceViolation,
    ScopeOverflow,
    LatticeMismatch,
    InvalidReference,
    TypeErrorDynamic,
    UnboundVariable,
    Timeout,
}

impl StopKind {
    /// Whether a `to_labeled` boundary packages this stop as a value.
    /// Running out of budget ends the whole run.
    pub fn capturable(self) -> bool {
        self != StopKind::Timeout
    }
}

impl fmt::Display for StopKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StopKind::IfcViolation => "IFCViolation",
            StopKind::ClearanceViolation => "ClearanceViolation",
            StopKind::ScopeOverflow => "ScopeOverflow",
            StopKind::LatticeMismatch => "LatticeMismatch",
            StopKind::InvalidReference => "InvalidReference",
            StopKind::TypeErrorDynamic => "TypeErrorDynamic",
            StopKind::UnboundVariable => "UnboundVariable",
            StopKind::Timeout => "Timeout",
        };
        f.write_str(s)
    }
}

/// A monitor stop: the run (or the enclosing `to_labeled` body) is aborted.
/// `label` is the current label at the stop. Not catchable by `catch`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stop {
    pub kind: StopKind,
    pub label: Label,
    pub pos: Pos,
    pub message: String,
}

/// A program-level exception; its label is the current label at the throw.
#[derive(Debug, Clone)]
pub struct LabeledException<V> {
    pub label: Label,
    pub payload: V,
}

#[derive(Debug, Clone)]
pub enum Abort<V> {
    Throw(LabeledException<V>),
    Stop(Stop),
}

impl<V> Abort<V> {
    pub fn stop_kind(&self) -> Option<StopKind> {
        match self {
            Abort::Stop(s) => Some(s.kind),
            Abort::Throw(_) => None,
        }
    }
}

pub type Lio<T, V> = Result<T, Abort<V>>;

/// An immutable `(label, payload)` pair. The payload can only be reached
/// through [`LioContext::unlabel`], which taints.
#[derive(Debug, Clone)]
pub struct Labeled<V> {
    label: Label,
    payload: Arc<V>,
}

impl<V> Labeled<V> {
    /// Labels are public; reading one does not taint.
    pub fn label(&self) -> &Label {
        &self.label
    }

    /// Reporting path used to render final outcomes; projection decides
    /// afterwards what an observer may see.
    pub(crate) fn payload(&self) -> &V {
        &self.payload
    }
}

pub fn label_of<V>(lv: &Labeled<V>) -> &Label {
    lv.label()
}

/// Saved state for a `to_labeled` scope. Obtained from
/// [`LioContext::enter_to_labeled`] and consumed by
/// [`LioContext::exit_to_labeled`].
#[must_use]
#[derive(Debug)]
pub struct Scope {
    bound: Label,
    saved_label: Label,
    saved_clearance: Label,
    at: Pos,
}

static NEXT_CONTEXT: AtomicU64 = AtomicU64::new(1);

/// Equality-comparable view of a context's state, for atomicity checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub label: Label,
    pub clearance: Label,
    pub cells: Vec<String>,
}

#[derive(Debug)]
pub struct LioContext<V> {
    current: Label,
    clearance: Label,
    pub(crate) store: RefStore<V>,
    trace: Vec<TraceEvent>,
    mutation: Mutation,
}

impl<V: Payload> LioContext<V> {
    pub fn new(initial_label: Label, clearance: Label) -> Result<Self, MonitorError> {
        if !initial_label.can_flow_to(&clearance)? {
            return Err(MonitorError::Clearance { label: initial_label, clearance });
        }
        Ok(LioContext {
            current: initial_label,
            clearance,
            store: RefStore::new(NEXT_CONTEXT.fetch_add(1, Ordering::Relaxed)),
            trace: Vec::new(),
            mutation: Mutation::None,
        })
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn mutation(&self) -> Mutation {
        self.mutation
    }

    pub fn get_label(&self) -> &Label {
        &self.current
    }

    pub fn get_clearance(&self) -> &Label {
        &self.clearance
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn take_trace(&mut self) -> Vec<TraceEvent> {
        std::mem::take(&mut self.trace)
    }

    pub(crate) fn record(&mut self, kind: EventKind, label: Label, pos: Pos) {
        self.trace.push(TraceEvent { kind, label, pos });
    }

    pub(crate) fn check_invariant(&self) {
        debug_assert!(
            self.current.flows(&self.clearance),
            "context invariant broken: {} not below clearance {}",
            self.current,
            self.clearance
        );
    }

    /// Converts a monitor error into a stop at the current label.
    pub fn stop(&self, err: MonitorError, at: Pos) -> Abort<V> {
        Abort::Stop(Stop { kind: err.kind(), label: self.current.clone(), pos: at, message: err.to_string() })
    }

    /// Fails unless `cur ⊑ target` (no write-down) and `target ⊑ clr`.
    pub(crate) fn check_bounds(&self, target: &Label) -> Result<(), MonitorError> {
        if !self.current.can_flow_to(target)? {
            return Err(MonitorError::Ifc { current: self.current.clone(), target: target.clone() });
        }
        self.check_clearance(target)
    }

    pub(crate) fn check_clearance(&self, target: &Label) -> Result<(), MonitorError> {
        if !target.can_flow_to(&self.clearance)? {
            return Err(MonitorError::Clearance { label: target.clone(), clearance: self.clearance.clone() });
        }
        Ok(())
    }

    /// `cur ⊔ l`, provided it stays within clearance.
    pub(crate) fn raised(&self, l: &Label) -> Result<Label, MonitorError> {
        let raised = self.current.join(l)?;
        self.check_clearance(&raised)?;
        Ok(raised)
    }

    pub(crate) fn raise_to(&mut self, raised: Label) {
        self.current = raised;
        self.check_invariant();
    }

    pub fn taint(&mut self, l: &Label, at: Pos) -> Lio<(), V> {
        let raised = self.raised(l).map_err(|e| self.stop(e, at))?;
        self.raise_to(raised.clone());
        self.record(EventKind::Taint, raised, at);
        Ok(())
    }

    pub fn label(&mut self, l: &Label, value: V, at: Pos) -> Lio<Labeled<V>, V> {
        if self.mutation != Mutation::LabelNoCheck {
            self.check_bounds(l).map_err(|e| self.stop(e, at))?;
        }
        self.record(EventKind::Label, l.clone(), at);
        Ok(Labeled { label: l.clone(), payload: Arc::new(value) })
    }

    /// Trusted entry point for program inputs: wraps `value` at `l` without
    /// consulting the current label. Only the lattice is checked.
    pub fn input(&self, l: &Label, value: V) -> Result<Labeled<V>, MonitorError> {
        self.current.join(l)?;
        Ok(Labeled { label: l.clone(), payload: Arc::new(value) })
    }

    /// Raises the current label to cover `lv` and returns its payload. An
    /// exception value packaged by `to_labeled` is re-raised instead.
    pub fn unlabel(&mut self, lv: &Labeled<V>, at: Pos) -> Lio<V, V> {
        if self.mutation == Mutation::UnlabelNoTaint {
            self.current.join(&lv.label).map_err(|e| self.stop(e.into(), at))?;
        } else {
            let raised = self.raised(&lv.label).map_err(|e| self.stop(e, at))?;
            self.raise_to(raised);
        }
        self.record(EventKind::Unlabel, self.current.clone(), at);
        match lv.payload.as_abort() {
            None => Ok((*lv.payload).clone()),
            Some(Abort::Throw(e)) => {
                let label = e.label.join(&self.current).map_err(|err| self.stop(err.into(), at))?;
                Err(Abort::Throw(LabeledException { label, payload: e.payload.clone() }))
            }
            Some(Abort::Stop(s)) => {
                let label = s.label.join(&self.current).map_err(|err| self.stop(err.into(), at))?;
                Err(Abort::Stop(Stop { label, ..s.clone() }))
            }
        }
    }

    pub fn enter_to_labeled(&mut self, l: &Label, at: Pos) -> Lio<Scope, V> {
        self.check_bounds(l).map_err(|e| self.stop(e, at))?;
        self.record(EventKind::ToLabeledEnter, l.clone(), at);
        Ok(Scope {
            bound: l.clone(),
            saved_label: self.current.clone(),
            saved_clearance: self.clearance.clone(),
            at,
        })
    }

    pub fn exit_to_labeled(&mut self, scope: Scope, body: Lio<V, V>) -> Lio<Labeled<V>, V> {
        let reached = self.current.clone();
        if self.mutation != Mutation::ToLabeledNoRestore {
            self.current = scope.saved_label;
            self.clearance = scope.saved_clearance;
        }
        self.check_invariant();
        let payload = match body {
            Err(Abort::Stop(s)) if !s.kind.capturable() => return Err(Abort::Stop(s)),
            _ if !reached.flows(&scope.bound) => {
                let err = MonitorError::ScopeOverflow { reached, bound: scope.bound.clone() };
                V::from_abort(Abort::Stop(Stop {
                    kind: err.kind(),
                    label: scope.bound.clone(),
                    pos: scope.at,
                    message: err.to_string(),
                }))
            }
            Ok(v) => v,
            Err(abort) => V::from_abort(abort),
        };
        self.record(EventKind::ToLabeledExit, scope.bound.clone(), scope.at);
        Ok(Labeled { label: scope.bound, payload: Arc::new(payload) })
    }

    /// Runs `body` in a scope whose taint is discarded on exit and returns its
    /// outcome labeled at `l`.
    pub fn to_labeled<F>(&mut self, l: &Label, at: Pos, body: F) -> Lio<Labeled<V>, V>
    where
        F: FnOnce(&mut Self) -> Lio<V, V>,
    {
        let scope = self.enter_to_labeled(l, at)?;
        let result = body(self);
        self.exit_to_labeled(scope, result)
    }

    pub fn lower_clearance(&mut self, c: &Label, at: Pos) -> Lio<(), V> {
        let check = || -> Result<(), MonitorError> {
            if !self.current.can_flow_to(c)? {
                return Err(MonitorError::Ifc { current: self.current.clone(), target: c.clone() });
            }
            if !c.can_flow_to(&self.clearance)? {
                return Err(MonitorError::Clearance { label: c.clone(), clearance: self.clearance.clone() });
            }
            Ok(())
        };
        check().map_err(|e| self.stop(e, at))?;
        self.clearance = c.clone();
        self.check_invariant();
        Ok(())
    }

    /// Builds the exception for a program-level throw at the current label.
    pub fn throw_labeled(&mut self, value: V, at: Pos) -> Abort<V> {
        self.record(EventKind::Throw, self.current.clone(), at);
        Abort::Throw(LabeledException { label: self.current.clone(), payload: value })
    }

    /// Taints by the exception's label and hands back its payload for the
    /// handler.
    pub fn recover(&mut self, exc: LabeledException<V>, at: Pos) -> Lio<V, V> {
        let raised = self.raised(&exc.label).map_err(|e| self.stop(e, at))?;
        self.raise_to(raised.clone());
        self.record(EventKind::Catch, raised, at);
        Ok(exc.payload)
    }

    /// Runs `body`; if it throws, taints by the exception label and runs
    /// `handler` on the payload. Monitor stops pass through.
    pub fn catch_labeled<B, H>(&mut self, at: Pos, body: B, handler: H) -> Lio<V, V>
    where
        B: FnOnce(&mut Self) -> Lio<V, V>,
        H: FnOnce(&mut Self, V) -> Lio<V, V>,
    {
        match body(self) {
            Err(Abort::Throw(exc)) => {
                let payload = self.recover(exc, at)?;
                handler(self, payload)
            }
            other => other,
        }
    }
}

impl<V: Payload + fmt::Debug> LioContext<V> {
    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            label: self.current.clone(),
            clearance: self.clearance.clone(),
            cells: self.store.cells().iter().map(|v| format!("{v:?}")).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Minimal payload for exercising the monitor without the interpreter.
    #[derive(Debug, Clone, PartialEq)]
    enum P {
        Int(i64),
        Str(&'static str),
        Exn(Box<Abort<P>>),
    }

    impl Payload for P {
        fn from_abort(abort: Abort<Self>) -> Self {
            P::Exn(Box::new(abort))
        }
        fn as_abort(&self) -> Option<&Abort<Self>> {
            match self {
                P::Exn(a) => Some(a),
                _ => None,
            }
        }
    }

    impl PartialEq for Abort<P> {
        fn eq(&self, other: &Self) -> bool {
            format!("{self:?}") == format!("{other:?}")
        }
    }

    const L: Label = Label::LOW;
    const H: Label = Label::HIGH;
    const AT: Pos = Pos::NONE;

    fn ctx(cur: Label, clr: Label) -> LioContext<P> {
        LioContext::new(cur, clr).unwrap()
    }

    fn pl(s: &str) -> Label {
        s.parse().unwrap()
    }

    fn kind<T: fmt::Debug>(r: Lio<T, P>) -> StopKind {
        r.unwrap_err().stop_kind().expect("expected a monitor stop")
    }

    #[test]
    fn new_context() {
        let c = ctx(L, H);
        assert_eq!(c.get_label(), &L);
        assert_eq!(c.get_clearance(), &H);
        assert!(matches!(LioContext::<P>::new(H, L), Err(MonitorError::Clearance { .. })));
        let c = ctx(pl("<{A}|{}>"), pl("<*|{}>"));
        assert_eq!(c.get_label().to_string(), "<{A}|{}>");
        assert!(matches!(LioContext::<P>::new(L, pl("<*|{}>")), Err(MonitorError::Lattice(_))));
    }

    #[test]
    fn taint_examples() {
        let mut c = ctx(L, H);
        c.taint(&H, AT).unwrap();
        assert_eq!(c.get_label(), &H);

        let mut c = ctx(L, L);
        assert_eq!(kind(c.taint(&H, AT)), StopKind::ClearanceViolation);
        assert_eq!(c.get_label(), &L);

        let mut c = ctx(pl("<{A}|{}>"), pl("<*|{}>"));
        c.taint(&pl("<{B}|{}>"), AT).unwrap();
        assert_eq!(c.get_label(), &pl("<{A,B}|{}>"));
    }

    #[test]
    fn label_examples() {
        let mut c = ctx(L, H);
        let lv = c.label(&H, P::Int(42), AT).unwrap();
        assert_eq!(lv.label(), &H);
        assert_eq!(c.get_label(), &L);

        let mut c = ctx(H, H);
        assert_eq!(kind(c.label(&L, P::Int(42), AT)), StopKind::IfcViolation);
        let mut c = ctx(L, L);
        assert_eq!(kind(c.label(&H, P::Int(42), AT)), StopKind::ClearanceViolation);
    }

    #[test]
    fn unlabel_examples() {
        let mut c = ctx(L, H);
        let hi = c.label(&H, P::Int(7), AT).unwrap();
        let lo = c.label(&L, P::Int(7), AT).unwrap();
        assert_eq!(c.unlabel(&lo, AT).unwrap(), P::Int(7));
        assert_eq!(c.get_label(), &L);
        assert_eq!(c.unlabel(&hi, AT).unwrap(), P::Int(7));
        assert_eq!(c.get_label(), &H);

        let mut low = ctx(L, L);
        assert_eq!(kind(low.unlabel(&hi, AT)), StopKind::ClearanceViolation);
        assert_eq!(low.get_label(), &L);
    }

    #[test]
    fn label_of_does_not_taint() {
        let mut c = ctx(L, H);
        let lv = c.label(&H, P::Str("x"), AT).unwrap();
        assert_eq!(label_of(&lv), &H);
        assert_eq!(c.get_label(), &L);
        let mut c = ctx(pl("<{}|{B}>"), pl("<*|{}>"));
        let lv = c.label(&pl("<{A}|{B}>"), P::Int(1), AT).unwrap();
        assert_eq!(label_of(&lv).to_string(), "<{A}|{B}>");
    }

    #[test]
    fn to_labeled_restores_and_wraps() {
        let mut c = ctx(L, H);
        let secret = c.label(&H, P::Int(5), AT).unwrap();
        let out = c
            .to_labeled(&H, AT, |c| match c.unlabel(&secret, AT)? {
                P::Int(n) => Ok(P::Int(n + 1)),
                other => Ok(other),
            })
            .unwrap();
        assert_eq!(c.get_label(), &L);
        assert_eq!(out.label(), &H);
        assert_eq!(c.unlabel(&out, AT).unwrap(), P::Int(6));
        assert_eq!(c.get_label(), &H);
    }

    #[test]
    fn to_labeled_overflow_is_packaged() {
        let mut c = ctx(L, H);
        let secret = c.label(&H, P::Int(5), AT).unwrap();
        let out = c.to_labeled(&L, AT, |c| c.unlabel(&secret, AT)).unwrap();
        assert_eq!(c.get_label(), &L);
        assert_eq!(out.label(), &L);
        match out.payload() {
            P::Exn(a) => assert_eq!(a.stop_kind(), Some(StopKind::ScopeOverflow)),
            other => panic!("expected packaged overflow, got {other:?}"),
        }
        assert_eq!(kind(c.unlabel(&out, AT)), StopKind::ScopeOverflow);
    }

    #[test]
    fn to_labeled_packages_throw() {
        // cur=L; toLabeled H { taint H; throw "boom" }
        // enter: L ⊑ H ⊑ H; body: cur := H, raise Exception(H, "boom");
        // exit: reached H ⊑ H, restore cur := L; result Labeled(H, Exn(H, "boom")).
        let mut c = ctx(L, H);
        let out = c
            .to_labeled(&H, AT, |c| {
                c.taint(&H, AT)?;
                Err(c.throw_labeled(P::Str("boom"), AT))
            })
            .unwrap();
        assert_eq!(c.get_label(), &L);
        assert_eq!(out.label(), &H);
        match out.payload() {
            P::Exn(a) => match &**a {
                Abort::Throw(e) => {
                    assert_eq!(e.label, H);
                    assert_eq!(e.payload, P::Str("boom"));
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn to_labeled_preconditions() {
        let mut c = ctx(H, H);
        assert_eq!(kind(c.to_labeled(&L, AT, |_| Ok(P::Int(0)))), StopKind::IfcViolation);
        let mut c = ctx(L, L);
        assert_eq!(kind(c.to_labeled(&H, AT, |_| Ok(P::Int(0)))), StopKind::ClearanceViolation);
        assert!(c.trace().is_empty());
    }

    #[test]
    fn to_labeled_restores_clearance() {
        let mut c = ctx(L, H);
        c.to_labeled(&H, AT, |c| c.lower_clearance(&L, AT).map(|_| P::Int(0))).unwrap();
        assert_eq!(c.get_clearance(), &H);
    }

    #[test]
    fn lower_clearance_examples() {
        let mut c = ctx(L, H);
        c.lower_clearance(&L, AT).unwrap();
        assert_eq!(c.get_clearance(), &L);
        assert_eq!(kind(c.taint(&H, AT)), StopKind::ClearanceViolation);

        let mut c = ctx(L, L);
        assert_eq!(kind(c.lower_clearance(&H, AT)), StopKind::ClearanceViolation);
        let mut c = ctx(H, H);
        assert_eq!(kind(c.lower_clearance(&L, AT)), StopKind::IfcViolation);
    }

    #[test]
    fn throw_uses_current_label() {
        let mut c = ctx(H, H);
        match c.throw_labeled(P::Str("x"), AT) {
            Abort::Throw(e) => assert_eq!(e.label, H),
            other => panic!("{other:?}"),
        }
        let mut c = ctx(L, H);
        match c.throw_labeled(P::Int(3), AT) {
            Abort::Throw(e) => assert_eq!((e.label, e.payload), (L, P::Int(3))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn catch_examples() {
        let mut c = ctx(L, H);
        let v = c.catch_labeled(AT, |_| Ok(P::Int(42)), |_, _| panic!("handler must not run")).unwrap();
        assert_eq!((v, c.get_label().clone()), (P::Int(42), L));

        // cur=L; try { taint H; throw "s" } catch _ => 0
        // body: cur := H, Exception(H, "s"); catch: cur := L ⊔ H = H; handler 0.
        let mut c = ctx(L, H);
        let v = c
            .catch_labeled(
                AT,
                |c| {
                    c.taint(&H, AT)?;
                    Err(c.throw_labeled(P::Str("s"), AT))
                },
                |_, _| Ok(P::Int(0)),
            )
            .unwrap();
        assert_eq!((v, c.get_label().clone()), (P::Int(0), H));

        // body: unlabel(Labeled(H, Exn(H, "boom"))): cur := H, re-raise
        // Exception(H, "boom"); handler runs at H.
        let mut c = ctx(L, H);
        let packaged = c
            .to_labeled(&H, AT, |c| {
                c.taint(&H, AT)?;
                Err(c.throw_labeled(P::Str("boom"), AT))
            })
            .unwrap();
        let v = c
            .catch_labeled(
                AT,
                |c| c.unlabel(&packaged, AT),
                |c, payload| {
                    assert_eq!(c.get_label(), &H);
                    Ok(payload)
                },
            )
            .unwrap();
        assert_eq!(v, P::Str("boom"));
    }

    #[test]
    fn stops_are_not_catchable() {
        let mut c = ctx(L, L);
        let hi = c.input(&H, P::Int(1)).unwrap();
        let r = c.catch_labeled(AT, |c| c.unlabel(&hi, AT), |_, _| Ok(P::Int(0)));
        assert_eq!(kind(r), StopKind::ClearanceViolation);
    }

    #[test]
    fn mutations_change_behaviour() {
        let mut c = ctx(L, H).with_mutation(Mutation::UnlabelNoTaint);
        let hi = c.input(&H, P::Int(1)).unwrap();
        c.unlabel(&hi, AT).unwrap();
        assert_eq!(c.get_label(), &L);

        let mut c = ctx(H, H).with_mutation(Mutation::LabelNoCheck);
        assert!(c.label(&L, P::Int(1), AT).is_ok());

        let mut c = ctx(L, H).with_mutation(Mutation::ToLabeledNoRestore);
        c.to_labeled(&H, AT, |c| c.taint(&H, AT).map(|_| P::Int(0))).unwrap();
        assert_eq!(c.get_label(), &H);

        assert_eq!("label-no-check".parse::<Mutation>().unwrap(), Mutation::LabelNoCheck);
        assert!("bogus".parse::<Mutation>().is_err());
    }

    #[test]
    fn event_labels_cover_current_label() {
        let mut c = ctx(L, H);
        let lo = c.label(&L, P::Int(0), AT).unwrap();
        c.taint(&H, AT).unwrap();
        c.unlabel(&lo, AT).unwrap();
        let kinds: Vec<_> = c.trace().iter().map(|e| (e.kind, e.label.clone())).collect();
        assert_eq!(kinds, vec![(EventKind::Label, L), (EventKind::Taint, H), (EventKind::Unlabel, H)]);
    }
}

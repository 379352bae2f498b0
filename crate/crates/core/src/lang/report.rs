use std::fmt;

use serde::Serialize;

use super::value::ValueView;
use crate::lattice::{Label, LatticeKind, LatticeMismatch};
use crate::runtime::{serialize_display, Stop, StopKind, TraceEvent};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Value(ValueView),
    Uncaught { label: Label, payload: ValueView },
    Stopped(Stop),
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub lattice: LatticeKind,
    pub outcome: Outcome,
    pub final_label: Label,
    pub final_clearance: Label,
    /// Observation events in evaluation order.
    pub trace: Vec<TraceEvent>,
    pub steps: u64,
}

impl RunReport {
    pub fn monitor_stop(&self) -> Option<&Stop> {
        match &self.outcome {
            Outcome::Stopped(s) => Some(s),
            _ => None,
        }
    }

    pub fn timed_out(&self) -> bool {
        self.monitor_stop().is_some_and(|s| s.kind == StopKind::Timeout)
    }

    /// CLI exit status: 0 normal, 2 monitor stop, 3 uncaught exception.
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::Value(_) => 0,
            Outcome::Stopped(_) => 2,
            Outcome::Uncaught { .. } => 3,
        }
    }

    pub fn to_json(&self) -> String {
        let file = TraceFile {
            version: 1,
            lattice: self.lattice.name(),
            events: &self.trace,
            final_label: &self.final_label,
            outcome: OutcomeJson::from(&self.outcome),
        };
        serde_json::to_string_pretty(&file).expect("trace serialization cannot fail")
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(v) => write!(f, "{v}"),
            Outcome::Uncaught { label, payload } => write!(f, "uncaught exception<{label}>({payload})"),
            Outcome::Stopped(s) => write!(f, "monitor stop {} at {}: {}", s.kind, s.pos, s.message),
        }
    }
}

#[derive(Serialize)]
struct TraceFile<'a> {
    version: u32,
    lattice: &'static str,
    events: &'a [TraceEvent],
    #[serde(serialize_with = "serialize_display")]
    final_label: &'a Label,
    outcome: OutcomeJson,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum OutcomeJson {
    Value { value: String },
    Uncaught { label: String, payload: String },
    Stop { stop: StopKind, label: String, pos: crate::pos::Pos, message: String },
}

impl From<&Outcome> for OutcomeJson {
    fn from(o: &Outcome) -> Self {
        match o {
            Outcome::Value(v) => OutcomeJson::Value { value: v.to_string() },
            Outcome::Uncaught { label, payload } => {
                OutcomeJson::Uncaught { label: label.to_string(), payload: payload.to_string() }
            }
            Outcome::Stopped(s) => OutcomeJson::Stop {
                stop: s.kind,
                label: s.label.to_string(),
                pos: s.pos,
                message: s.message.clone(),
            },
        }
    }
}

/// What an observer bounded at some label sees of a run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Observation {
    pub outcome: ObservedOutcome,
    pub events: Vec<TraceEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ObservedOutcome {
    /// The run ended above the observer.
    Hidden,
    Value(ValueView),
    Uncaught { label: Label, payload: ValueView },
    /// A monitor stop at or below the observer; deliberately generic.
    Stopped,
}

impl Observation {
    /// Whether anything at all is visible.
    pub fn is_informative(&self) -> bool {
        self.outcome != ObservedOutcome::Hidden || !self.events.is_empty()
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            ObservedOutcome::Hidden => writeln!(f, "outcome: hidden")?,
            ObservedOutcome::Value(v) => writeln!(f, "outcome: {v}")?,
            ObservedOutcome::Uncaught { label, payload } => {
                writeln!(f, "outcome: uncaught exception<{label}>({payload})")?
            }
            ObservedOutcome::Stopped => writeln!(f, "outcome: stopped")?,
        }
        for e in &self.events {
            writeln!(f, "  {:?} {} at {}", e.kind, e.label, e.pos)?;
        }
        Ok(())
    }
}

/// Hides every labeled payload whose label does not flow to `observe`.
pub fn project_value(v: &ValueView, observe: &Label) -> ValueView {
    match v {
        ValueView::Labeled(l, inner) => {
            let inner = if l.flows(observe) { project_value(inner, observe) } else { ValueView::Hidden };
            ValueView::Labeled(l.clone(), Box::new(inner))
        }
        ValueView::Exception(a) => {
            use super::value::AbortView;
            let a = match &**a {
                AbortView::Throw { label, payload } => AbortView::Throw {
                    label: label.clone(),
                    payload: if label.flows(observe) { project_value(payload, observe) } else { ValueView::Hidden },
                },
                stop @ AbortView::Stop { .. } => stop.clone(),
            };
            ValueView::Exception(Box::new(a))
        }
        other => other.clone(),
    }
}

/// The view of `report` available to an observer at `observe`.
///
/// The outcome is visible only if the final label flows to `observe`; trace
/// events are kept only if their label does, and elided ones leave no
/// placeholder. A monitor stop shows up as a bare marker when its label flows
/// to `observe` and is otherwise indistinguishable from a hidden outcome.
pub fn low_project(report: &RunReport, observe: &Label) -> Result<Observation, LatticeMismatch> {
    report.final_label.can_flow_to(observe)?;
    let outcome = match &report.outcome {
        Outcome::Stopped(s) if s.label.flows(observe) => ObservedOutcome::Stopped,
        Outcome::Stopped(_) => ObservedOutcome::Hidden,
        _ if !report.final_label.flows(observe) => ObservedOutcome::Hidden,
        Outcome::Value(v) => ObservedOutcome::Value(project_value(v, observe)),
        Outcome::Uncaught { label, payload } => {
            ObservedOutcome::Uncaught { label: label.clone(), payload: project_value(payload, observe) }
        }
    };
    let events = report.trace.iter().filter(|e| e.label.flows(observe)).cloned().collect();
    Ok(Observation { outcome, events })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pos::Pos;
    use crate::runtime::EventKind;

    fn report(outcome: Outcome, final_label: Label) -> RunReport {
        RunReport {
            lattice: LatticeKind::TwoPoint,
            outcome,
            final_label,
            final_clearance: Label::HIGH,
            trace: vec![],
            steps: 1,
        }
    }

    #[test]
    fn outcome_visibility() {
        let hi = report(Outcome::Value(ValueView::Int(42)), Label::HIGH);
        assert_eq!(low_project(&hi, &Label::LOW).unwrap().outcome, ObservedOutcome::Hidden);
        let lo = report(Outcome::Value(ValueView::Int(42)), Label::LOW);
        assert_eq!(low_project(&lo, &Label::LOW).unwrap().outcome, ObservedOutcome::Value(ValueView::Int(42)));
    }

    #[test]
    fn labeled_payloads_hidden_labels_visible() {
        let v = ValueView::Labeled(Label::HIGH, Box::new(ValueView::Int(7)));
        let r = report(Outcome::Value(v), Label::LOW);
        let ObservedOutcome::Value(seen) = low_project(&r, &Label::LOW).unwrap().outcome else { panic!() };
        assert_eq!(seen.to_string(), "Labeled<H>(•)");
        let ObservedOutcome::Value(seen) = low_project(&r, &Label::HIGH).unwrap().outcome else { panic!() };
        assert_eq!(seen.to_string(), "Labeled<H>(7)");
    }

    #[test]
    fn events_are_elided_without_trace() {
        let mut r = report(Outcome::Value(ValueView::Unit), Label::HIGH);
        r.trace = vec![
            TraceEvent { kind: EventKind::Label, label: Label::LOW, pos: Pos::new(1, 1) },
            TraceEvent { kind: EventKind::Unlabel, label: Label::HIGH, pos: Pos::new(1, 5) },
            TraceEvent { kind: EventKind::Unlabel, label: Label::HIGH, pos: Pos::new(1, 9) },
        ];
        let obs = low_project(&r, &Label::LOW).unwrap();
        assert_eq!(obs.events.len(), 1);
        assert_eq!(obs.outcome, ObservedOutcome::Hidden);
    }

    #[test]
    fn stops() {
        let stop = |label| {
            Outcome::Stopped(Stop { kind: StopKind::IfcViolation, label, pos: Pos::NONE, message: String::new() })
        };
        let r = report(stop(Label::LOW), Label::LOW);
        assert_eq!(low_project(&r, &Label::LOW).unwrap().outcome, ObservedOutcome::Stopped);
        let r = report(stop(Label::HIGH), Label::HIGH);
        assert_eq!(low_project(&r, &Label::LOW).unwrap().outcome, ObservedOutcome::Hidden);
    }

    #[test]
    fn mismatched_observer() {
        let r = report(Outcome::Value(ValueView::Unit), Label::LOW);
        assert!(low_project(&r, &"<{}|{}>".parse().unwrap()).is_err());
    }
}

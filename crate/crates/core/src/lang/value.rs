use std::fmt;
use std::sync::Arc;

use super::ast::Expr;
use super::pretty::escape_str;
use crate::lattice::Label;
use crate::refs::RefHandle;
use crate::runtime::{Abort, Labeled, Payload, StopKind};

/// Persistent environment. Closures capture it by sharing.
#[derive(Clone, Default)]
pub struct Env(Option<Arc<Binding>>);

struct Binding {
    name: String,
    value: Value,
    next: Env,
}

impl Env {
    pub fn bind(&self, name: &str, value: Value) -> Env {
        Env(Some(Arc::new(Binding { name: name.to_string(), value, next: self.clone() })))
    }

    pub fn lookup(&self, name: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(b) = cur {
            if b.name == name {
                return Some(&b.value);
            }
            cur = &b.next.0;
        }
        None
    }
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<env>")
    }
}

#[derive(Debug)]
pub struct Closure {
    pub param: String,
    pub body: Arc<Expr>,
    pub env: Env,
}

#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(Arc<str>),
    Unit,
    Label(Label),
    Closure(Arc<Closure>),
    Labeled(Labeled<Value>),
    Ref(RefHandle),
    /// An abort packaged by `toLabeled`; only ever found inside a labeled
    /// value.
    Exception(Arc<Abort<Value>>),
}

impl Payload for Value {
    fn from_abort(abort: Abort<Self>) -> Self {
        Value::Exception(Arc::new(abort))
    }

    fn as_abort(&self) -> Option<&Abort<Self>> {
        match self {
            Value::Exception(a) => Some(a),
            _ => None,
        }
    }
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Bool(_) => "bool",
            Value::Str(_) => "string",
            Value::Unit => "unit",
            Value::Label(_) => "label",
            Value::Closure(_) => "function",
            Value::Labeled(_) => "labeled",
            Value::Ref(_) => "ref",
            Value::Exception(_) => "exception",
        }
    }

    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    /// Renders the value for a report. Labeled payloads are included; what an
    /// observer may see is decided later by projection.
    pub fn view(&self) -> ValueView {
        match self {
            Value::Int(n) => ValueView::Int(*n),
            Value::Bool(b) => ValueView::Bool(*b),
            Value::Str(s) => ValueView::Str(s.to_string()),
            Value::Unit => ValueView::Unit,
            Value::Label(l) => ValueView::Label(l.clone()),
            Value::Closure(c) => ValueView::Closure(c.param.clone()),
            Value::Labeled(lv) => {
                ValueView::Labeled(lv.label().clone(), Box::new(lv.payload().view()))
            }
            Value::Ref(r) => ValueView::Ref(r.label().clone()),
            Value::Exception(a) => ValueView::Exception(Box::new(AbortView::of(a))),
        }
    }
}

/// Plain-data rendering of a value, safe to move across threads and to
/// compare structurally. Reference identities are deliberately absent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueView {
    Int(i64),
    Bool(bool),
    Str(String),
    Unit,
    Label(Label),
    Closure(String),
    Ref(Label),
    Labeled(Label, Box<ValueView>),
    Exception(Box<AbortView>),
    /// A payload withheld from an observer.
    Hidden,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AbortView {
    Throw { label: Label, payload: ValueView },
    Stop { kind: StopKind, label: Label },
}

impl AbortView {
    pub fn of(a: &Abort<Value>) -> AbortView {
        match a {
            Abort::Throw(e) => AbortView::Throw { label: e.label.clone(), payload: e.payload.view() },
            Abort::Stop(s) => AbortView::Stop { kind: s.kind, label: s.label.clone() },
        }
    }
}

impl fmt::Display for ValueView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueView::Int(n) => write!(f, "{n}"),
            ValueView::Bool(b) => write!(f, "{b}"),
            ValueView::Str(s) => f.write_str(&escape_str(s)),
            ValueView::Unit => f.write_str("()"),
            ValueView::Label(l) => write!(f, "{l}"),
            ValueView::Closure(param) => write!(f, "<fn {param}>"),
            ValueView::Ref(l) => write!(f, "ref<{l}>"),
            ValueView::Labeled(l, inner) => write!(f, "Labeled<{l}>({inner})"),
            ValueView::Exception(a) => match &**a {
                AbortView::Throw { label, payload } => write!(f, "exception<{label}>({payload})"),
                AbortView::Stop { kind, label } => write!(f, "stop<{label}>({kind})"),
            },
            ValueView::Hidden => f.write_str("•"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.view().fmt(f)
    }
}

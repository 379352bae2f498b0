use std::sync::Arc;

use crate::lattice::Label;
use crate::pos::Pos;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Lt,
    And,
    Or,
}

impl BinOp {
    pub const ALL: [BinOp; 8] =
        [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Eq, BinOp::Lt, BinOp::And, BinOp::Or];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "==",
            BinOp::Lt => "<",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

/// A node of the `.lio` syntax tree. Equality ignores positions.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    IntLit(i64),
    BoolLit(bool),
    StrLit(String),
    UnitLit,
    Var(String),
    /// Closures share the body with the tree.
    Lambda(String, Arc<Expr>),
    Apply(Box<Expr>, Box<Expr>),
    Let(String, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    BinOp(BinOp, Box<Expr>, Box<Expr>),
    LabelE(Label, Box<Expr>),
    Unlabel(Box<Expr>),
    LabelOf(Box<Expr>),
    ToLabeled(Label, Box<Expr>),
    GetLabel,
    GetClearance,
    LowerClearance(Label),
    NewRef(Label, Box<Expr>),
    ReadRef(Box<Expr>),
    WriteRef(Box<Expr>, Box<Expr>),
    Throw(Box<Expr>),
    TryCatch(Box<Expr>, String, Box<Expr>),
    Seq(Box<Expr>, Box<Expr>),
    SecretHole(String),
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    /// A node without a source position, for generated programs.
    pub fn synth(kind: ExprKind) -> Self {
        Expr { kind, pos: Pos::NONE }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        use ExprKind::*;
        match &self.kind {
            IntLit(_) | BoolLit(_) | StrLit(_) | UnitLit | Var(_) | GetLabel | GetClearance
            | LowerClearance(_) | SecretHole(_) => {}
            Lambda(_, b) => b.walk(f),
            Unlabel(a) | LabelOf(a) | ReadRef(a) | Throw(a) | LabelE(_, a) | ToLabeled(_, a)
            | NewRef(_, a) => a.walk(f),
            Apply(a, b) | Let(_, a, b) | BinOp(_, a, b) | WriteRef(a, b) | TryCatch(a, _, b)
            | Seq(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            If(a, b, c) => {
                a.walk(f);
                b.walk(f);
                c.walk(f);
            }
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    /// Whether the tree uses any construct that talks to the monitor.
    pub fn has_ifc(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= e.kind.is_ifc());
        found
    }
}

impl ExprKind {
    pub fn is_ifc(&self) -> bool {
        use ExprKind::*;
        matches!(
            self,
            LabelE(..)
                | Unlabel(_)
                | LabelOf(_)
                | ToLabeled(..)
                | GetLabel
                | GetClearance
                | LowerClearance(_)
                | NewRef(..)
                | ReadRef(_)
                | WriteRef(..)
                | Throw(_)
                | TryCatch(..)
                | SecretHole(_)
        )
    }
}

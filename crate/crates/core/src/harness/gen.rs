//! Environment-directed program generation.
//!
//! Variables are only ever drawn from the enclosing binders, so every
//! generated program is well scoped by construction. Generation is otherwise
//! type-blind: each node carries a loose shape hint that steers children
//! toward plausible operands, but nothing is checked and dynamic type errors
//! are ordinary outcomes.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::ast::{BinOp, Expr, ExprKind};
use crate::lattice::{Label, LatticeKind};

/// One generator choice per AST variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Construct {
    IntLit,
    BoolLit,
    StrLit,
    UnitLit,
    Var,
    Lambda,
    Apply,
    Let,
    If,
    BinOp,
    Label,
    Unlabel,
    LabelOf,
    ToLabeled,
    GetLabel,
    GetClearance,
    LowerClearance,
    NewRef,
    ReadRef,
    WriteRef,
    Throw,
    TryCatch,
    Seq,
    Secret,
}

impl Construct {
    pub const ALL: [Construct; 24] = [
        Construct::IntLit,
        Construct::BoolLit,
        Construct::StrLit,
        Construct::UnitLit,
        Construct::Var,
        Construct::Lambda,
        Construct::Apply,
        Construct::Let,
        Construct::If,
        Construct::BinOp,
        Construct::Label,
        Construct::Unlabel,
        Construct::LabelOf,
        Construct::ToLabeled,
        Construct::GetLabel,
        Construct::GetClearance,
        Construct::LowerClearance,
        Construct::NewRef,
        Construct::ReadRef,
        Construct::WriteRef,
        Construct::Throw,
        Construct::TryCatch,
        Construct::Seq,
        Construct::Secret,
    ];

    pub fn is_leaf(self) -> bool {
        use Construct::*;
        matches!(
            self,
            IntLit | BoolLit | StrLit | UnitLit | Var | GetLabel | GetClearance | LowerClearance | Secret
        )
    }

    pub fn of(kind: &ExprKind) -> Construct {
        use Construct as C;
        match kind {
            ExprKind::IntLit(_) => C::IntLit,
            ExprKind::BoolLit(_) => C::BoolLit,
            ExprKind::StrLit(_) => C::StrLit,
            ExprKind::UnitLit => C::UnitLit,
            ExprKind::Var(_) => C::Var,
            ExprKind::Lambda(..) => C::Lambda,
            ExprKind::Apply(..) => C::Apply,
            ExprKind::Let(..) => C::Let,
            ExprKind::If(..) => C::If,
            ExprKind::BinOp(..) => C::BinOp,
            ExprKind::LabelE(..) => C::Label,
            ExprKind::Unlabel(_) => C::Unlabel,
            ExprKind::LabelOf(_) => C::LabelOf,
            ExprKind::ToLabeled(..) => C::ToLabeled,
            ExprKind::GetLabel => C::GetLabel,
            ExprKind::GetClearance => C::GetClearance,
            ExprKind::LowerClearance(_) => C::LowerClearance,
            ExprKind::NewRef(..) => C::NewRef,
            ExprKind::ReadRef(_) => C::ReadRef,
            ExprKind::WriteRef(..) => C::WriteRef,
            ExprKind::Throw(_) => C::Throw,
            ExprKind::TryCatch(..) => C::TryCatch,
            ExprKind::Seq(..) => C::Seq,
            ExprKind::SecretHole(_) => C::Secret,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Relative selection weight per construct. Zero disables a construct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weights([u32; 24]);

impl Weights {
    pub fn none() -> Self {
        Weights([0; 24])
    }

    pub fn uniform(w: u32) -> Self {
        Weights([w; 24])
    }

    /// Every construct disabled except `c`.
    pub fn only(c: Construct) -> Self {
        Weights::none().with(c, 1)
    }

    /// The default weights with every monitor-facing construct disabled.
    pub fn pure() -> Self {
        let mut w = Weights::default();
        for c in Construct::ALL {
            if !matches!(
                c,
                Construct::IntLit
                    | Construct::BoolLit
                    | Construct::StrLit
                    | Construct::UnitLit
                    | Construct::Var
                    | Construct::Lambda
                    | Construct::Apply
                    | Construct::Let
                    | Construct::If
                    | Construct::BinOp
                    | Construct::Seq
            ) {
                w.0[c.index()] = 0;
            }
        }
        w
    }

    pub fn get(&self, c: Construct) -> u32 {
        self.0[c.index()]
    }

    pub fn with(mut self, c: Construct, w: u32) -> Self {
        self.0[c.index()] = w;
        self
    }
}

impl Default for Weights {
    fn default() -> Self {
        use Construct::*;
        let table = [
            (IntLit, 6),
            (BoolLit, 2),
            (StrLit, 1),
            (UnitLit, 1),
            (Var, 6),
            (Lambda, 2),
            (Apply, 3),
            (Let, 5),
            (If, 5),
            (BinOp, 6),
            (Label, 4),
            (Unlabel, 5),
            (LabelOf, 1),
            (ToLabeled, 4),
            (GetLabel, 1),
            (GetClearance, 1),
            (LowerClearance, 1),
            (NewRef, 3),
            (ReadRef, 3),
            (WriteRef, 3),
            (Throw, 2),
            (TryCatch, 3),
            (Seq, 4),
            (Secret, 4),
        ];
        let mut w = Weights::none();
        for (c, n) in table {
            w = w.with(c, n);
        }
        w
    }
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    /// Maximum tree height; 1 forces a single leaf.
    pub max_depth: u32,
    pub lattice: LatticeKind,
    /// Secret holes a program may mention. Campaigns vary the first one.
    pub secrets: Vec<(String, Label)>,
    pub weights: Weights,
    /// Labels drawn for `label`, `toLabeled`, `newRef` and `lowerClearance`.
    pub labels: Vec<Label>,
}

impl GenConfig {
    /// Defaults per lattice: a varied secret `s` above the usual observer and
    /// a fixed public-side input `p` below it.
    pub fn new(lattice: LatticeKind, seed: u64, max_depth: u32) -> Self {
        let parse = |s: &str| s.parse::<Label>().expect("built-in label");
        let (secrets, labels) = match lattice {
            LatticeKind::TwoPoint => {
                (vec![("s".to_string(), Label::HIGH), ("p".to_string(), Label::LOW)], vec![Label::LOW, Label::HIGH])
            }
            LatticeKind::Principal => (
                vec![("s".to_string(), parse("<{B}|{}>")), ("p".to_string(), parse("<{A}|{}>"))],
                ["<{}|{}>", "<{A}|{}>", "<{B}|{}>", "<{A,B}|{}>", "<{A}|{A}>", "<*|{}>"]
                    .into_iter()
                    .map(parse)
                    .collect(),
            ),
        };
        GenConfig { seed, max_depth, lattice, secrets, weights: Weights::default(), labels }
    }

    pub fn with_weights(mut self, weights: Weights) -> Self {
        self.weights = weights;
        self
    }
}

/// Same `cfg` always yields the same program.
pub fn generate_program(cfg: &GenConfig) -> Expr {
    generate_with(cfg, &mut ChaCha8Rng::seed_from_u64(cfg.seed))
}

/// Generates from a caller-provided random stream; `cfg.seed` is ignored.
pub fn generate_with<R: Rng>(cfg: &GenConfig, rng: &mut R) -> Expr {
    let mut g = Gen { cfg, rng, scope: Vec::new(), fresh: 0 };
    g.expr(cfg.max_depth.max(1), Hint::Any)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Hint {
    Any,
    Int,
    Bool,
    Labeled,
    Ref,
    Fun,
}

const STRINGS: [&str; 7] = ["", "a", "hi", "x\"y", "tab\t", "nl\n", "back\\"];

struct Gen<'a, R> {
    cfg: &'a GenConfig,
    rng: &'a mut R,
    scope: Vec<(String, Hint)>,
    fresh: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn weight(&self, c: Construct) -> u32 {
        self.cfg.weights.get(c)
    }

    fn available(&self, c: Construct) -> bool {
        match c {
            Construct::Var => !self.scope.is_empty(),
            Construct::Secret => !self.cfg.secrets.is_empty(),
            Construct::Label | Construct::ToLabeled | Construct::NewRef | Construct::LowerClearance => {
                !self.cfg.labels.is_empty()
            }
            _ => true,
        }
    }

    fn fits(&self, c: Construct, hint: Hint) -> bool {
        use Construct::*;
        match hint {
            Hint::Any => true,
            Hint::Int | Hint::Bool => match c {
                Var => self.scope.iter().any(|(_, h)| *h == hint || *h == Hint::Any),
                IntLit => hint == Hint::Int,
                BoolLit => hint == Hint::Bool,
                Apply | Let | If | BinOp | Unlabel | ReadRef | TryCatch | Seq | Throw => true,
                _ => false,
            },
            Hint::Labeled => match c {
                Var => self.scope.iter().any(|(_, h)| *h == Hint::Labeled),
                Label | ToLabeled | Secret | Let | If | Seq => true,
                _ => false,
            },
            Hint::Ref => match c {
                Var => self.scope.iter().any(|(_, h)| *h == Hint::Ref),
                NewRef | Let | Seq => true,
                _ => false,
            },
            Hint::Fun => match c {
                Var => self.scope.iter().any(|(_, h)| *h == Hint::Fun),
                Lambda | Let => true,
                _ => false,
            },
        }
    }

    fn pick(&mut self, hint: Hint, leaves_only: bool) -> Construct {
        let usable: Vec<Construct> = Construct::ALL
            .into_iter()
            .filter(|c| self.weight(*c) > 0 && self.available(*c) && (!leaves_only || c.is_leaf()))
            .collect();
        let fitting: Vec<Construct> = usable.iter().copied().filter(|c| self.fits(*c, hint)).collect();
        let pool = if fitting.is_empty() { &usable } else { &fitting };
        let weights = &self.cfg.weights;
        pool.choose_weighted(self.rng, |c| weights.get(*c)).copied().unwrap_or(Construct::IntLit)
    }

    fn fresh_name(&mut self) -> String {
        let name = format!("x{}", self.fresh);
        self.fresh += 1;
        name
    }

    fn label(&mut self) -> Label {
        self.cfg.labels.choose(self.rng).cloned().expect("label pool checked by `available`")
    }

    fn small_int(&mut self) -> i64 {
        match self.rng.random_range(0..10) {
            0..=7 => self.rng.random_range(0..=3),
            8 => self.rng.random_range(0..=1000),
            _ => self.rng.random_range(0..=i64::MAX),
        }
    }

    fn can_read_secret(&self) -> bool {
        !self.cfg.secrets.is_empty()
            && self.weight(Construct::Secret) > 0
            && self.weight(Construct::Unlabel) > 0
    }

    fn read_first_secret(&self) -> Expr {
        let hole = Expr::synth(ExprKind::SecretHole(self.cfg.secrets[0].0.clone()));
        Expr::synth(ExprKind::Unlabel(Box::new(hole)))
    }

    fn expr(&mut self, depth: u32, hint: Hint) -> Expr {
        if depth <= 1 {
            let c = self.pick(hint, true);
            return self.build(c, 1, hint);
        }
        // Comparisons of the secret against small constants make branches
        // secret-dependent often enough for leaks to be reachable.
        if self.can_read_secret() {
            if hint == Hint::Bool && depth >= 3 && self.weight(Construct::BinOp) > 0 && self.rng.random_bool(0.3) {
                let op = if self.rng.random_bool(0.7) { BinOp::Eq } else { BinOp::Lt };
                let k = Expr::synth(ExprKind::IntLit(self.rng.random_range(0..=3)));
                return Expr::synth(ExprKind::BinOp(op, Box::new(self.read_first_secret()), Box::new(k)));
            }
            if hint == Hint::Int && self.rng.random_bool(0.15) {
                return self.read_first_secret();
            }
        }
        let c = self.pick(hint, false);
        self.build(c, depth, hint)
    }

    fn bound_hint(&mut self) -> Hint {
        *[Hint::Int, Hint::Int, Hint::Bool, Hint::Labeled, Hint::Labeled, Hint::Ref, Hint::Fun, Hint::Any]
            .choose(self.rng)
            .expect("non-empty")
    }

    fn var(&mut self, hint: Hint) -> Expr {
        let matching: Vec<&String> = self
            .scope
            .iter()
            .filter(|(_, h)| hint == Hint::Any || *h == hint || (*h == Hint::Any && matches!(hint, Hint::Int | Hint::Bool)))
            .map(|(n, _)| n)
            .collect();
        let name = match matching.choose(self.rng) {
            Some(n) => (*n).clone(),
            None => self.scope.choose(self.rng).expect("Var only chosen with a non-empty scope").0.clone(),
        };
        Expr::synth(ExprKind::Var(name))
    }

    fn binop(&mut self, hint: Hint) -> BinOp {
        let ops: &[BinOp] = match hint {
            Hint::Int => &[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div],
            Hint::Bool => &[BinOp::Eq, BinOp::Lt, BinOp::And, BinOp::Or],
            _ => &BinOp::ALL,
        };
        *ops.choose(self.rng).expect("non-empty")
    }

    fn build(&mut self, c: Construct, depth: u32, hint: Hint) -> Expr {
        let d = depth.saturating_sub(1).max(1);
        let kind = match c {
            Construct::IntLit => ExprKind::IntLit(self.small_int()),
            Construct::BoolLit => ExprKind::BoolLit(self.rng.random_bool(0.5)),
            Construct::StrLit => ExprKind::StrLit(STRINGS.choose(self.rng).expect("non-empty").to_string()),
            Construct::UnitLit => ExprKind::UnitLit,
            Construct::Var => return self.var(hint),
            Construct::Lambda => {
                let param = self.fresh_name();
                self.scope.push((param.clone(), Hint::Any));
                let body = self.expr(d, Hint::Any);
                self.scope.pop();
                ExprKind::Lambda(param, body.into())
            }
            Construct::Apply => {
                let f = self.expr(d, Hint::Fun);
                let a = self.expr(d, Hint::Any);
                ExprKind::Apply(Box::new(f), Box::new(a))
            }
            Construct::Let => {
                let name = self.fresh_name();
                let h = self.bound_hint();
                let bound = self.expr(d, h);
                self.scope.push((name.clone(), h));
                let body = self.expr(d, hint);
                self.scope.pop();
                ExprKind::Let(name, Box::new(bound), Box::new(body))
            }
            Construct::If => {
                let cond = self.expr(d, Hint::Bool);
                let t = self.expr(d, hint);
                let e = self.expr(d, hint);
                ExprKind::If(Box::new(cond), Box::new(t), Box::new(e))
            }
            Construct::BinOp => {
                let op = self.binop(hint);
                let operand = match op {
                    BinOp::And | BinOp::Or => Hint::Bool,
                    _ => Hint::Int,
                };
                let l = self.expr(d, operand);
                let r = self.expr(d, operand);
                ExprKind::BinOp(op, Box::new(l), Box::new(r))
            }
            Construct::Label => {
                let l = self.label();
                ExprKind::LabelE(l, Box::new(self.expr(d, Hint::Int)))
            }
            Construct::Unlabel => ExprKind::Unlabel(Box::new(self.expr(d, Hint::Labeled))),
            Construct::LabelOf => ExprKind::LabelOf(Box::new(self.expr(d, Hint::Labeled))),
            Construct::ToLabeled => {
                let l = self.label();
                ExprKind::ToLabeled(l, Box::new(self.expr(d, Hint::Any)))
            }
            Construct::GetLabel => ExprKind::GetLabel,
            Construct::GetClearance => ExprKind::GetClearance,
            Construct::LowerClearance => ExprKind::LowerClearance(self.label()),
            Construct::NewRef => {
                let l = self.label();
                ExprKind::NewRef(l, Box::new(self.expr(d, Hint::Int)))
            }
            Construct::ReadRef => ExprKind::ReadRef(Box::new(self.expr(d, Hint::Ref))),
            Construct::WriteRef => {
                let r = self.expr(d, Hint::Ref);
                let v = self.expr(d, Hint::Int);
                ExprKind::WriteRef(Box::new(r), Box::new(v))
            }
            Construct::Throw => ExprKind::Throw(Box::new(self.expr(d, Hint::Int))),
            Construct::TryCatch => {
                let body = self.expr(d, hint);
                let var = self.fresh_name();
                self.scope.push((var.clone(), Hint::Any));
                let handler = self.expr(d, hint);
                self.scope.pop();
                ExprKind::TryCatch(Box::new(body), var, Box::new(handler))
            }
            Construct::Seq => {
                let a = self.expr(d, Hint::Any);
                let b = self.expr(d, hint);
                ExprKind::Seq(Box::new(a), Box::new(b))
            }
            Construct::Secret => {
                ExprKind::SecretHole(self.cfg.secrets.choose(self.rng).expect("checked by `available`").0.clone())
            }
        };
        Expr::synth(kind)
    }
}

/// Tree height: a leaf has height 1.
pub fn height(e: &Expr) -> u32 {
    use ExprKind::*;
    let children: Vec<&Expr> = match &e.kind {
        IntLit(_) | BoolLit(_) | StrLit(_) | UnitLit | Var(_) | GetLabel | GetClearance | LowerClearance(_)
        | SecretHole(_) => vec![],
        Lambda(_, b) => vec![&**b],
        Unlabel(a) | LabelOf(a) | ReadRef(a) | Throw(a) | LabelE(_, a) | ToLabeled(_, a) | NewRef(_, a) => vec![&**a],
        Apply(a, b) | Let(_, a, b) | BinOp(_, a, b) | WriteRef(a, b) | TryCatch(a, _, b) | Seq(a, b) => {
            vec![&**a, &**b]
        }
        If(a, b, c) => vec![&**a, &**b, &**c],
    };
    1 + children.into_iter().map(height).max().unwrap_or(0)
}

//! Big-step evaluator. Pure constructs never touch the context; every
//! construct that observes, creates or packages labeled data goes through the
//! runtime.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::ast::{BinOp, Expr, ExprKind};
use super::report::{Outcome, RunReport};
use super::value::{Closure, Env, Value};
use crate::lattice::{Label, LatticeKind};
use crate::pos::Pos;
use crate::runtime::{Abort, LabeledException, Lio, LioContext, MonitorError, Mutation, Stop, StopKind};

pub const DEFAULT_STEP_BUDGET: u64 = 100_000;

#[derive(Debug, Clone)]
pub struct Secret {
    pub label: Label,
    pub value: Value,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub lattice: LatticeKind,
    pub initial_label: Label,
    pub clearance: Label,
    pub secrets: BTreeMap<String, Secret>,
    pub step_budget: u64,
    pub mutation: Mutation,
}

impl RunConfig {
    pub fn new(lattice: LatticeKind) -> Self {
        RunConfig {
            lattice,
            initial_label: lattice.default_label(),
            clearance: lattice.default_clearance(),
            secrets: BTreeMap::new(),
            step_budget: DEFAULT_STEP_BUDGET,
            mutation: Mutation::None,
        }
    }

    pub fn secret(mut self, name: &str, label: Label, value: Value) -> Self {
        self.secrets.insert(name.to_string(), Secret { label, value });
        self
    }
}

struct Interpreter<'c> {
    ctx: LioContext<Value>,
    config: &'c RunConfig,
    steps: u64,
}

type Eval = Lio<Value, Value>;

impl Interpreter<'_> {
    fn stop(&self, kind: StopKind, pos: Pos, message: String) -> Abort<Value> {
        Abort::Stop(Stop { kind, label: self.ctx.get_label().clone(), pos, message })
    }

    fn type_error(&self, pos: Pos, message: String) -> Abort<Value> {
        self.stop(StopKind::TypeErrorDynamic, pos, message)
    }

    fn expect_labeled<'v>(&self, v: &'v Value, pos: Pos, what: &str) -> Lio<&'v crate::runtime::Labeled<Value>, Value> {
        match v {
            Value::Labeled(lv) => Ok(lv),
            other => Err(self.type_error(pos, format!("{what} expects a labeled value, got {}", other.type_name()))),
        }
    }

    fn eval(&mut self, e: &Expr, env: &Env) -> Eval {
        self.steps += 1;
        if self.steps > self.config.step_budget {
            return Err(self.stop(StopKind::Timeout, e.pos, format!("step budget of {} exhausted", self.config.step_budget)));
        }
        stacker::maybe_grow(64 * 1024, 2 * 1024 * 1024, || self.eval_node(e, env))
    }

    fn eval_node(&mut self, e: &Expr, env: &Env) -> Eval {
        let pos = e.pos;
        match &e.kind {
            ExprKind::IntLit(n) => Ok(Value::Int(*n)),
            ExprKind::BoolLit(b) => Ok(Value::Bool(*b)),
            ExprKind::StrLit(s) => Ok(Value::str(s)),
            ExprKind::UnitLit => Ok(Value::Unit),
            ExprKind::Var(name) => env
                .lookup(name)
                .cloned()
                .ok_or_else(|| self.stop(StopKind::UnboundVariable, pos, format!("unbound variable `{name}`"))),
            ExprKind::Lambda(param, body) => Ok(Value::Closure(Arc::new(Closure {
                param: param.clone(),
                body: body.clone(),
                env: env.clone(),
            }))),
            ExprKind::Apply(f, a) => {
                let f = self.eval(f, env)?;
                let a = self.eval(a, env)?;
                match f {
                    Value::Closure(c) => self.eval(&c.body, &c.env.bind(&c.param, a)),
                    other => Err(self.type_error(pos, format!("cannot apply a {}", other.type_name()))),
                }
            }
            ExprKind::Let(name, bound, body) => {
                let v = self.eval(bound, env)?;
                self.eval(body, &env.bind(name, v))
            }
            ExprKind::If(c, t, f) => match self.eval(c, env)? {
                Value::Bool(true) => self.eval(t, env),
                Value::Bool(false) => self.eval(f, env),
                other => Err(self.type_error(pos, format!("condition must be bool, got {}", other.type_name()))),
            },
            ExprKind::BinOp(op, l, r) => {
                let l = self.eval(l, env)?;
                let r = self.eval(r, env)?;
                self.binop(*op, l, r, pos)
            }
            ExprKind::Seq(a, b) => {
                self.eval(a, env)?;
                self.eval(b, env)
            }
            ExprKind::LabelE(l, a) => {
                let v = self.eval(a, env)?;
                Ok(Value::Labeled(self.ctx.label(l, v, pos)?))
            }
            ExprKind::Unlabel(a) => {
                let v = self.eval(a, env)?;
                let lv = self.expect_labeled(&v, pos, "unlabel")?;
                self.ctx.unlabel(lv, pos)
            }
            ExprKind::LabelOf(a) => match self.eval(a, env)? {
                Value::Labeled(lv) => Ok(Value::Label(lv.label().clone())),
                Value::Ref(r) => Ok(Value::Label(r.label().clone())),
                other => Err(self.type_error(pos, format!("labelOf expects a labeled value or ref, got {}", other.type_name()))),
            },
            ExprKind::ToLabeled(l, body) => {
                let scope = self.ctx.enter_to_labeled(l, pos)?;
                let result = self.eval(body, env);
                Ok(Value::Labeled(self.ctx.exit_to_labeled(scope, result)?))
            }
            ExprKind::GetLabel => Ok(Value::Label(self.ctx.get_label().clone())),
            ExprKind::GetClearance => Ok(Value::Label(self.ctx.get_clearance().clone())),
            ExprKind::LowerClearance(c) => {
                self.ctx.lower_clearance(c, pos)?;
                Ok(Value::Unit)
            }
            ExprKind::NewRef(l, a) => {
                let v = self.eval(a, env)?;
                Ok(Value::Ref(self.ctx.new_ref(l, v, pos)?))
            }
            ExprKind::ReadRef(a) => match self.eval(a, env)? {
                Value::Ref(r) => self.ctx.read_ref(&r, pos),
                other => Err(self.type_error(pos, format!("readRef expects a ref, got {}", other.type_name()))),
            },
            ExprKind::WriteRef(r, a) => {
                let r = self.eval(r, env)?;
                let v = self.eval(a, env)?;
                match r {
                    Value::Ref(r) => {
                        self.ctx.write_ref(&r, v, pos)?;
                        Ok(Value::Unit)
                    }
                    other => Err(self.type_error(pos, format!("writeRef expects a ref, got {}", other.type_name()))),
                }
            }
            ExprKind::Throw(a) => {
                let v = self.eval(a, env)?;
                Err(self.ctx.throw_labeled(v, pos))
            }
            ExprKind::TryCatch(body, var, handler) => match self.eval(body, env) {
                Err(Abort::Throw(exc)) => {
                    let payload = self.ctx.recover(exc, pos)?;
                    self.eval(handler, &env.bind(var, payload))
                }
                other => other,
            },
            ExprKind::SecretHole(name) => {
                let secret = self.config.secrets.get(name).ok_or_else(|| {
                    self.stop(StopKind::UnboundVariable, pos, format!("no binding for secret `{name}`"))
                })?;
                let lv = self.ctx.input(&secret.label, secret.value.clone()).map_err(|e| self.ctx.stop(e, pos))?;
                Ok(Value::Labeled(lv))
            }
        }
    }

    fn binop(&mut self, op: BinOp, l: Value, r: Value, pos: Pos) -> Eval {
        use Value::*;
        let v = match (op, &l, &r) {
            (BinOp::Add, Int(a), Int(b)) => Int(a.wrapping_add(*b)),
            (BinOp::Add, Str(a), Str(b)) => Value::str(&format!("{a}{b}")),
            (BinOp::Sub, Int(a), Int(b)) => Int(a.wrapping_sub(*b)),
            (BinOp::Mul, Int(a), Int(b)) => Int(a.wrapping_mul(*b)),
            (BinOp::Div, Int(_), Int(0)) => {
                // An implicit throw: labeled like `throw`, but not a Throw event.
                return Err(Abort::Throw(LabeledException {
                    label: self.ctx.get_label().clone(),
                    payload: Value::str("division by zero"),
                }));
            }
            (BinOp::Div, Int(a), Int(b)) => Int(a.wrapping_div(*b)),
            (BinOp::Eq, Int(a), Int(b)) => Bool(a == b),
            (BinOp::Eq, Bool(a), Bool(b)) => Bool(a == b),
            (BinOp::Eq, Str(a), Str(b)) => Bool(a == b),
            (BinOp::Eq, Unit, Unit) => Bool(true),
            (BinOp::Eq, Label(a), Label(b)) => Bool(a == b),
            (BinOp::Lt, Int(a), Int(b)) => Bool(a < b),
            (BinOp::And, Bool(a), Bool(b)) => Bool(*a && *b),
            (BinOp::Or, Bool(a), Bool(b)) => Bool(*a || *b),
            _ => {
                return Err(self.type_error(
                    pos,
                    format!("`{}` is not defined on {} and {}", op.symbol(), l.type_name(), r.type_name()),
                ))
            }
        };
        Ok(v)
    }
}

/// Evaluates `program` under `config`. Fails only if the configuration
/// itself is inconsistent (initial label above clearance, or labels from a
/// lattice other than `config.lattice`).
pub fn eval(program: &Expr, config: &RunConfig) -> Result<RunReport, MonitorError> {
    for l in [&config.initial_label, &config.clearance].into_iter().chain(config.secrets.values().map(|s| &s.label)) {
        config.lattice.default_label().join(l)?;
    }
    let ctx = LioContext::new(config.initial_label.clone(), config.clearance.clone())?.with_mutation(config.mutation);
    let mut interp = Interpreter { ctx, config, steps: 0 };
    let result = interp.eval(program, &Env::default());
    let outcome = match result {
        Ok(v) => Outcome::Value(v.view()),
        Err(Abort::Throw(e)) => Outcome::Uncaught { label: e.label, payload: e.payload.view() },
        Err(Abort::Stop(s)) => Outcome::Stopped(s),
    };
    let mut ctx = interp.ctx;
    Ok(RunReport {
        lattice: config.lattice,
        outcome,
        final_label: ctx.get_label().clone(),
        final_clearance: ctx.get_clearance().clone(),
        trace: ctx.take_trace(),
        steps: interp.steps,
    })
}

//! Source printer. Output re-parses to the same tree; parentheses are added
//! only where the grammar needs them.

use std::fmt::Write;

use super::ast::{Expr, ExprKind};

// Binding strength of the grammar levels, loosest first.
const EXPR: u8 = 0;
const INFIX: u8 = 1;
const APP: u8 = 2;
const PRIM: u8 = 3;

fn level(kind: &ExprKind) -> u8 {
    use ExprKind::*;
    match kind {
        Let(..) | Lambda(..) | If(..) | TryCatch(..) | Seq(..) => EXPR,
        BinOp(..) => INFIX,
        Apply(..) => APP,
        _ => PRIM,
    }
}

pub fn escape_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn pretty(e: &Expr) -> String {
    let mut out = String::new();
    write_at(&mut out, e, EXPR);
    out
}

fn write_at(out: &mut String, e: &Expr, min: u8) {
    if level(&e.kind) < min {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    use ExprKind::*;
    match &e.kind {
        IntLit(n) => write!(out, "{n}").unwrap(),
        BoolLit(b) => write!(out, "{b}").unwrap(),
        StrLit(s) => out.push_str(&escape_str(s)),
        UnitLit => out.push_str("()"),
        Var(name) => out.push_str(name),
        Lambda(param, body) => {
            write!(out, "fn {param} => ").unwrap();
            write_at(out, body, EXPR);
        }
        Apply(f, a) => {
            write_at(out, f, APP);
            out.push(' ');
            write_at(out, a, PRIM);
        }
        Let(name, bound, body) => {
            write!(out, "let {name} = ").unwrap();
            write_at(out, bound, EXPR);
            out.push_str(" in ");
            write_at(out, body, EXPR);
        }
        If(c, t, f) => {
            out.push_str("if ");
            write_at(out, c, EXPR);
            out.push_str(" then ");
            write_at(out, t, EXPR);
            out.push_str(" else ");
            write_at(out, f, EXPR);
        }
        BinOp(op, l, r) => {
            write_at(out, l, INFIX);
            write!(out, " {} ", op.symbol()).unwrap();
            write_at(out, r, APP);
        }
        LabelE(l, a) => {
            write!(out, "label {l} ").unwrap();
            write_at(out, a, PRIM);
        }
        Unlabel(a) => {
            out.push_str("unlabel(");
            write_at(out, a, EXPR);
            out.push(')');
        }
        LabelOf(a) => {
            out.push_str("labelOf(");
            write_at(out, a, EXPR);
            out.push(')');
        }
        ToLabeled(l, a) => {
            write!(out, "toLabeled {l} {{ ").unwrap();
            write_at(out, a, EXPR);
            out.push_str(" }");
        }
        GetLabel => out.push_str("getLabel"),
        GetClearance => out.push_str("getClearance"),
        LowerClearance(l) => write!(out, "lowerClearance {l}").unwrap(),
        NewRef(l, a) => {
            write!(out, "newRef {l} ").unwrap();
            write_at(out, a, PRIM);
        }
        ReadRef(a) => {
            out.push_str("readRef(");
            write_at(out, a, EXPR);
            out.push(')');
        }
        WriteRef(r, v) => {
            out.push_str("writeRef ");
            write_at(out, r, PRIM);
            out.push(' ');
            write_at(out, v, PRIM);
        }
        Throw(a) => {
            out.push_str("throw ");
            write_at(out, a, PRIM);
        }
        TryCatch(body, var, handler) => {
            out.push_str("try ");
            write_at(out, body, EXPR);
            write!(out, " catch {var} => ").unwrap();
            write_at(out, handler, EXPR);
        }
        Seq(a, b) => {
            write_at(out, a, INFIX);
            out.push_str("; ");
            write_at(out, b, EXPR);
        }
        SecretHole(name) => write!(out, "secret {name}").unwrap(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_program;

    fn roundtrip(src: &str) -> String {
        pretty(&parse_program(src).unwrap())
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(roundtrip("f  a   b"), "f a b");
        assert_eq!(roundtrip("f (a b)"), "f (a b)");
        assert_eq!(roundtrip("1 + (2 * 3)"), "1 + (2 * 3)");
        assert_eq!(roundtrip("(1 + 2) * 3"), "1 + 2 * 3");
        assert_eq!(roundtrip("(let x = 1 in x); 2"), "(let x = 1 in x); 2");
        assert_eq!(roundtrip("toLabeled <{ B,A }|{}> {unlabel(s)}"), "toLabeled <{A,B}|{}> { unlabel(s) }");
        assert_eq!(roundtrip("label H (f x)"), "label H (f x)");
        assert_eq!(roundtrip("\"a\\\"b\""), "\"a\\\"b\"");
        assert_eq!(roundtrip("(fn x => x) 1"), "(fn x => x) 1");
        assert_eq!(roundtrip("throw (1; 2)"), "throw (1; 2)");
    }

    #[test]
    fn reparses_to_same_tree() {
        let src = "let r = newRef L 0 in try (if readRef(r) < 1 then writeRef r (label H 2) else throw \"x\") catch e => e; getLabel";
        let e = parse_program(src).unwrap();
        assert_eq!(parse_program(&pretty(&e)).unwrap(), e);
    }
}

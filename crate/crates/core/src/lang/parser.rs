//! Recursive-descent parser for `.lio`.
//!
//! ```text
//! program   := expr EOF
//! expr      := "let" IDENT "=" expr "in" expr
//!            | "fn" IDENT "=>" expr
//!            | "if" expr "then" expr "else" expr
//!            | "try" expr "catch" IDENT "=>" expr
//!            | seq
//! seq       := infix (";" expr)?
//! infix     := app (("+"|"-"|"*"|"/"|"=="|"<"|"&&"|"||") app)*
//! app       := prim prim*
//! prim      := INT | STRING | "true" | "false" | "()" | IDENT | "(" expr ")"
//!            | "label" LABELLIT prim | "unlabel" "(" expr ")"
//!            | "labelOf" "(" expr ")" | "toLabeled" LABELLIT "{" expr "}"
//!            | "getLabel" | "getClearance" | "lowerClearance" LABELLIT
//!            | "newRef" LABELLIT prim | "readRef" "(" expr ")"
//!            | "writeRef" prim prim | "throw" prim | "secret" IDENT
//! ```
//!
//! All infix operators share one precedence level and associate to the left.

use std::sync::Arc;

use thiserror::Error;

use super::ast::{BinOp, Expr, ExprKind};
use super::lexer::{tokenize, Keyword, LexError, Punct, Token, TokenKind};
use crate::lattice::Label;
use crate::pos::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: expected {expected}, found {found}")]
pub struct ParseError {
    pub pos: Pos,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("lex error at {0}")]
    Lex(#[from] LexError),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
}

impl SyntaxError {
    pub fn pos(&self) -> Pos {
        match self {
            SyntaxError::Lex(e) => e.pos,
            SyntaxError::Parse(e) => e.pos,
        }
    }
}

struct Parser<'t> {
    tokens: &'t [Token],
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.tokens[self.at]
    }

    fn advance(&mut self) -> &'t Token {
        let tok = &self.tokens[self.at];
        if tok.kind != TokenKind::Eof {
            self.at += 1;
        }
        tok
    }

    fn error(&self, expected: impl Into<String>) -> ParseError {
        let tok = self.peek();
        ParseError { pos: tok.pos, expected: expected.into(), found: tok.kind.describe() }
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.peek().kind == TokenKind::Punct(p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("`{}`", p.as_str())))
        }
    }

    fn expect_keyword(&mut self, k: Keyword) -> PResult<()> {
        if self.peek().kind == TokenKind::Keyword(k) {
            self.advance();
            Ok(())
        } else {
            Err(self.error(format!("`{}`", k.as_str())))
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                self.advance();
                Ok(name.clone())
            }
            _ => Err(self.error("identifier")),
        }
    }

    fn expect_label(&mut self) -> PResult<Label> {
        match &self.peek().kind {
            TokenKind::Label(l) => {
                self.advance();
                Ok(l.clone())
            }
            _ => Err(self.error("label literal")),
        }
    }

    fn program(&mut self) -> PResult<Expr> {
        let e = self.expr()?;
        if self.peek().kind != TokenKind::Eof {
            return Err(self.error("end of input"));
        }
        Ok(e)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let tok = self.peek();
        let pos = tok.pos;
        let kind = match tok.kind {
            TokenKind::Keyword(Keyword::Let) => {
                self.advance();
                let name = self.expect_ident()?;
                self.expect_punct(Punct::Eq)?;
                let bound = self.expr()?;
                self.expect_keyword(Keyword::In)?;
                let body = self.expr()?;
                ExprKind::Let(name, Box::new(bound), Box::new(body))
            }
            TokenKind::Keyword(Keyword::Fn) => {
                self.advance();
                let param = self.expect_ident()?;
                self.expect_punct(Punct::Arrow)?;
                ExprKind::Lambda(param, Arc::new(self.expr()?))
            }
            TokenKind::Keyword(Keyword::If) => {
                self.advance();
                let c = self.expr()?;
                self.expect_keyword(Keyword::Then)?;
                let t = self.expr()?;
                self.expect_keyword(Keyword::Else)?;
                let e = self.expr()?;
                ExprKind::If(Box::new(c), Box::new(t), Box::new(e))
            }
            TokenKind::Keyword(Keyword::Try) => {
                self.advance();
                let body = self.expr()?;
                self.expect_keyword(Keyword::Catch)?;
                let var = self.expect_ident()?;
                self.expect_punct(Punct::Arrow)?;
                let handler = self.expr()?;
                ExprKind::TryCatch(Box::new(body), var, Box::new(handler))
            }
            _ => return self.seq(),
        };
        Ok(Expr::new(kind, pos))
    }

    fn seq(&mut self) -> PResult<Expr> {
        let first = self.infix()?;
        if self.eat_punct(Punct::Semi) {
            let pos = first.pos;
            let rest = self.expr()?;
            return Ok(Expr::new(ExprKind::Seq(Box::new(first), Box::new(rest)), pos));
        }
        Ok(first)
    }

    fn binop(&self) -> Option<BinOp> {
        let TokenKind::Punct(p) = self.peek().kind else { return None };
        Some(match p {
            Punct::Plus => BinOp::Add,
            Punct::Minus => BinOp::Sub,
            Punct::Star => BinOp::Mul,
            Punct::Slash => BinOp::Div,
            Punct::EqEq => BinOp::Eq,
            Punct::Lt => BinOp::Lt,
            Punct::AndAnd => BinOp::And,
            Punct::OrOr => BinOp::Or,
            _ => return None,
        })
    }

    fn infix(&mut self) -> PResult<Expr> {
        let mut lhs = self.app()?;
        while let Some(op) = self.binop() {
            let op_pos = self.advance().pos;
            let rhs = self.app()?;
            lhs = Expr::new(ExprKind::BinOp(op, Box::new(lhs), Box::new(rhs)), op_pos);
        }
        Ok(lhs)
    }

    fn starts_prim(&self) -> bool {
        match &self.peek().kind {
            TokenKind::Int(_) | TokenKind::Str(_) | TokenKind::Ident(_) => true,
            TokenKind::Punct(Punct::LParen) => true,
            TokenKind::Keyword(k) => matches!(
                k,
                Keyword::True
                    | Keyword::False
                    | Keyword::Label
                    | Keyword::Unlabel
                    | Keyword::LabelOf
                    | Keyword::ToLabeled
                    | Keyword::GetLabel
                    | Keyword::GetClearance
                    | Keyword::LowerClearance
                    | Keyword::NewRef
                    | Keyword::ReadRef
                    | Keyword::WriteRef
                    | Keyword::Throw
                    | Keyword::Secret
            ),
            _ => false,
        }
    }

    fn app(&mut self) -> PResult<Expr> {
        let mut f = self.prim()?;
        while self.starts_prim() {
            let pos = f.pos;
            let arg = self.prim()?;
            f = Expr::new(ExprKind::Apply(Box::new(f), Box::new(arg)), pos);
        }
        Ok(f)
    }

    fn parenthesized(&mut self) -> PResult<Expr> {
        self.expect_punct(Punct::LParen)?;
        let e = self.expr()?;
        self.expect_punct(Punct::RParen)?;
        Ok(e)
    }

    fn prim(&mut self) -> PResult<Expr> {
        let tok = self.peek();
        let pos = tok.pos;
        let kind = match &tok.kind {
            TokenKind::Int(n) => {
                self.advance();
                ExprKind::IntLit(*n)
            }
            TokenKind::Str(s) => {
                self.advance();
                ExprKind::StrLit(s.clone())
            }
            TokenKind::Ident(name) => {
                self.advance();
                ExprKind::Var(name.clone())
            }
            TokenKind::Punct(Punct::LParen) => {
                self.advance();
                if self.eat_punct(Punct::RParen) {
                    ExprKind::UnitLit
                } else {
                    let inner = self.expr()?;
                    self.expect_punct(Punct::RParen)?;
                    return Ok(inner);
                }
            }
            TokenKind::Keyword(k) => {
                let k = *k;
                self.advance();
                match k {
                    Keyword::True => ExprKind::BoolLit(true),
                    Keyword::False => ExprKind::BoolLit(false),
                    Keyword::Label => {
                        let l = self.expect_label()?;
                        ExprKind::LabelE(l, Box::new(self.prim()?))
                    }
                    Keyword::Unlabel => ExprKind::Unlabel(Box::new(self.parenthesized()?)),
                    Keyword::LabelOf => ExprKind::LabelOf(Box::new(self.parenthesized()?)),
                    Keyword::ToLabeled => {
                        let l = self.expect_label()?;
                        self.expect_punct(Punct::LBrace)?;
                        let body = self.expr()?;
                        self.expect_punct(Punct::RBrace)?;
                        ExprKind::ToLabeled(l, Box::new(body))
                    }
                    Keyword::GetLabel => ExprKind::GetLabel,
                    Keyword::GetClearance => ExprKind::GetClearance,
                    Keyword::LowerClearance => ExprKind::LowerClearance(self.expect_label()?),
                    Keyword::NewRef => {
                        let l = self.expect_label()?;
                        ExprKind::NewRef(l, Box::new(self.prim()?))
                    }
                    Keyword::ReadRef => ExprKind::ReadRef(Box::new(self.parenthesized()?)),
                    Keyword::WriteRef => {
                        let r = self.prim()?;
                        let v = self.prim()?;
                        ExprKind::WriteRef(Box::new(r), Box::new(v))
                    }
                    Keyword::Throw => ExprKind::Throw(Box::new(self.prim()?)),
                    Keyword::Secret => ExprKind::SecretHole(self.expect_ident()?),
                    _ => {
                        self.at -= 1;
                        return Err(self.error("expression"));
                    }
                }
            }
            _ => return Err(self.error("expression")),
        };
        Ok(Expr::new(kind, pos))
    }
}

pub fn parse(tokens: &[Token]) -> Result<Expr, ParseError> {
    assert!(
        tokens.last().is_some_and(|t| t.kind == TokenKind::Eof),
        "token stream must end with Eof"
    );
    Parser { tokens, at: 0 }.program()
}

/// Tokenizes and parses a whole program.
pub fn parse_program(source: &str) -> Result<Expr, SyntaxError> {
    let tokens = tokenize(source)?;
    Ok(parse(&tokens)?)
}

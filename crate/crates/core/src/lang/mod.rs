//! The `.lio` expression language: lexer, parser, printer and evaluator.

pub mod ast;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod report;
pub mod value;

pub use ast::{BinOp, Expr, ExprKind};
pub use eval::{eval, RunConfig, Secret, DEFAULT_STEP_BUDGET};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse, parse_program, ParseError, SyntaxError};
pub use pretty::pretty;
pub use report::{low_project, Observation, ObservedOutcome, Outcome, RunReport};
pub use value::{Value, ValueView};

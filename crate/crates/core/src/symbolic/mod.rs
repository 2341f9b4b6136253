//! Symbolic expressions over the mechanics alphabet: parsing, printing,
//! differentiation, substitution, evaluation and zero testing.

mod calculus;
mod eval;
mod expr;
pub mod linalg;
mod parse;
mod print;
mod symbol;
mod zero;

pub use eval::{Assignment, CompiledExpr, EvalError};
pub use expr::{Expr, Func, Node, Rational};
pub use parse::{parse, ParseContext, ParseError};
pub use symbol::Symbol;
pub use zero::{is_zero, ZeroTest, ZeroVerdict};

pub(crate) use parse::{Parser, Token};

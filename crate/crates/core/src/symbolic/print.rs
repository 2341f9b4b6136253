//! Canonical text form. The output is accepted by the parser and parses back
//! to the same normalized tree.

use std::fmt::{self, Write};

use num_traits::{One, Signed, Zero};

use super::expr::{Expr, Node, Rational};
use super::symbol::Symbol;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_sum(f, self)
    }
}

fn write_sum(out: &mut impl Write, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Add(c, ts) => {
            for (i, t) in ts.iter().enumerate() {
                write_signed_term(out, t, i == 0)?;
            }
            if !c.is_zero() {
                write_signed_term(out, &Expr::num(c.clone()), false)?;
            }
            Ok(())
        }
        _ => write_signed_term(out, e, true),
    }
}

fn write_signed_term(out: &mut impl Write, t: &Expr, first: bool) -> fmt::Result {
    let negative = t.leading_coefficient().is_negative();
    match (first, negative) {
        (true, true) => out.write_char('-')?,
        (true, false) => {}
        (false, true) => out.write_str(" - ")?,
        (false, false) => out.write_str(" + ")?,
    }
    match t.node() {
        Node::Num(r) => write_rational(out, &r.abs()),
        Node::Mul(c, fs) => write_product(out, &c.abs(), fs),
        _ => write_factor(out, t),
    }
}

fn write_rational(out: &mut impl Write, r: &Rational) -> fmt::Result {
    if r.denom().is_one() {
        write!(out, "{}", r.numer())
    } else {
        write!(out, "{}/{}", r.numer(), r.denom())
    }
}

/// Display rank: parameters, then functions, then everything else.
fn display_rank(f: &Expr) -> u8 {
    let base = match f.node() {
        Node::Pow(b, _) => b,
        _ => f,
    };
    match base.node() {
        Node::Sym(Symbol::Parameter(_)) => 0,
        Node::Func(..) => 1,
        Node::Sym(_) => 2,
        _ => 3,
    }
}

fn write_product(out: &mut impl Write, c: &Rational, fs: &[Expr]) -> fmt::Result {
    let mut ordered: Vec<&Expr> = fs.iter().collect();
    ordered.sort_by_key(|f| display_rank(f));
    let mut first = true;
    if !c.is_one() {
        write_rational(out, c)?;
        first = false;
    }
    for f in ordered {
        if !first {
            out.write_char('*')?;
        }
        write_factor(out, f)?;
        first = false;
    }
    Ok(())
}

fn write_factor(out: &mut impl Write, e: &Expr) -> fmt::Result {
    match e.node() {
        Node::Sym(s) => write!(out, "{s}"),
        Node::Func(func, arg) => {
            write!(out, "{}(", func.name())?;
            write_sum(out, arg)?;
            out.write_char(')')
        }
        Node::Pow(b, n) => {
            match b.node() {
                Node::Sym(_) | Node::Func(..) => write_factor(out, b)?,
                _ => {
                    out.write_char('(')?;
                    write_sum(out, b)?;
                    out.write_char(')')?;
                }
            }
            write!(out, "^{n}")
        }
        Node::Num(r) if !r.is_negative() => write_rational(out, r),
        _ => {
            out.write_char('(')?;
            write_sum(out, e)?;
            out.write_char(')')
        }
    }
}

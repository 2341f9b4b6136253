//! Text form of vector fields and one-forms: `c0 dt + e1 dq1 + e2 dq2`.
//!
//! Each term is a product-level expression followed by a basis label; a bare
//! label stands for coefficient 1. Coefficients with top-level sums need
//! parentheses: `(1 + q1) dq2`.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;

use super::{OneForm, ProjectableVectorField};
use crate::error::{Error, Result};
use crate::symbolic::{Expr, ParseContext, ParseError, Parser, Token};

#[derive(Clone, Copy, PartialEq)]
enum Basis {
    Dt,
    Dq(usize),
}

fn basis_label(name: &str) -> Option<Basis> {
    if name == "dt" {
        return Some(Basis::Dt);
    }
    let digits = name.strip_prefix("dq")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    usize::from_str(digits).ok().map(Basis::Dq)
}

/// Coefficients `(dt, dq1..dqn)` from the text form.
fn parse_coefficients(ctx: &ParseContext, text: &str) -> Result<(Expr, Vec<Expr>)> {
    let n = ctx.dimension();
    let mut dt = Vec::new();
    let mut dq: Vec<Vec<Expr>> = vec![Vec::new(); n];
    let mut parser = Parser::new(ctx, text)?;
    if text.trim() == "0" {
        return Ok((Expr::zero(), vec![Expr::zero(); n]));
    }
    let mut negate = false;
    loop {
        while matches!(parser.peek(), Token::Minus) {
            parser.bump();
            negate = !negate;
        }
        let at = parser.position();
        let label = match parser.peek() {
            Token::Ident(name) => basis_label(name),
            _ => None,
        };
        let (coeff, label) = match label {
            Some(b) => {
                parser.bump();
                (Expr::one(), b)
            }
            None => {
                let coeff = parser.term()?;
                let at = parser.position();
                let label = match parser.bump() {
                    Token::Ident(name) => basis_label(&name),
                    _ => None,
                };
                let label = label.ok_or_else(|| ParseError::syntax(at, "expected basis label `dt` or `dqN`"))?;
                (coeff, label)
            }
        };
        let coeff = if negate { -coeff } else { coeff };
        match label {
            Basis::Dt => dt.push(coeff),
            Basis::Dq(i) if (1..=n).contains(&i) => dq[i - 1].push(coeff),
            Basis::Dq(_) => {
                return Err(ParseError::IndexOutOfRange { name: "dq".into(), position: at, dimension: n }.into())
            }
        }
        match parser.peek() {
            Token::Plus => negate = false,
            Token::Minus => negate = true,
            _ => break,
        }
        parser.bump();
    }
    parser.expect_end()?;
    Ok((Expr::add(dt), dq.into_iter().map(Expr::add).collect()))
}

impl ProjectableVectorField {
    pub fn parse(ctx: &ParseContext, text: &str) -> Result<Self> {
        let (dt, u) = parse_coefficients(ctx, text)?;
        let u_t = if dt.is_zero() {
            0
        } else if dt.is_one() {
            1
        } else {
            return Err(Error::InvalidField(format!("dt coefficient must be 0 or 1, got {dt}")));
        };
        ProjectableVectorField::new(u_t, u)
    }
}

impl OneForm {
    pub fn parse(ctx: &ParseContext, text: &str) -> Result<Self> {
        let (phi_t, phi) = parse_coefficients(ctx, text)?;
        OneForm::new(phi_t, phi)
    }
}

fn write_terms<'a>(f: &mut fmt::Formatter<'_>, terms: impl Iterator<Item = (&'a Expr, String)>) -> fmt::Result {
    let mut first = true;
    for (c, label) in terms {
        if c.is_zero() {
            continue;
        }
        let negative = c.terms().len() == 1 && c.leading_coefficient().is_negative();
        let shown = if negative { -c } else { c.clone() };
        match (first, negative) {
            (true, true) => f.write_str("-")?,
            (false, true) => f.write_str(" - ")?,
            (false, false) => f.write_str(" + ")?,
            (true, false) => {}
        }
        first = false;
        if shown.is_one() {
            f.write_str(&label)?;
        } else if shown.terms().len() > 1 {
            write!(f, "({shown}) {label}")?;
        } else {
            write!(f, "{shown} {label}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for ProjectableVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dt = self.dt_contraction();
        let terms = std::iter::once((&dt, "dt".to_string()))
            .chain(self.components().iter().enumerate().map(|(i, c)| (c, format!("dq{}", i + 1))));
        write_terms(f, terms)
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = std::iter::once((&self.phi_t, "dt".to_string()))
            .chain(self.phi.iter().enumerate().map(|(i, c)| (c, format!("dq{}", i + 1))));
        write_terms(f, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ParseContext {
        ParseContext::new(2, &["k", "v"]).unwrap()
    }

    fn field(text: &str) -> ProjectableVectorField {
        ProjectableVectorField::parse(&ctx(), text).unwrap()
    }

    #[test]
    fn parses_connections_and_vertical_fields() {
        let g = field("dt - k/2*q1 dq1");
        assert!(g.is_connection());
        assert_eq!(g.components()[0], ctx().parse("-k/2*q1").unwrap());
        assert!(g.components()[1].is_zero());

        let r = field("-q2 dq1 + q1 dq2");
        assert_eq!(r.u_t(), 0);
        assert_eq!(r.components()[0], ctx().parse("-q2").unwrap());

        let b = field("v*t dq1 + (1 + q2) dq2");
        assert_eq!(b.components()[1], ctx().parse("1 + q2").unwrap());
        assert_eq!(field("0"), ProjectableVectorField::zero(2));
    }

    #[test]
    fn repeated_labels_accumulate() {
        assert_eq!(field("q1 dq1 + 2 dq1"), field("(q1 + 2) dq1"));
    }

    #[test]
    fn rejects_bad_fields() {
        let ctx = ctx();
        assert!(ProjectableVectorField::parse(&ctx, "2 dt").is_err());
        assert!(ProjectableVectorField::parse(&ctx, "q1_t dq1").is_err());
        assert!(ProjectableVectorField::parse(&ctx, "q1 dq3").is_err());
        assert!(ProjectableVectorField::parse(&ctx, "q1 + dq1").is_err());
        assert!(ProjectableVectorField::parse(&ctx, "q1").is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        for text in ["dt - 1/2*k*q1 dq1", "-q2 dq1 + q1 dq2", "v*t dq1", "(q1 + 1) dq2", "0", "dt"] {
            let f = field(text);
            assert_eq!(f.to_string(), text);
            assert_eq!(field(&f.to_string()), f);
        }
    }

    #[test]
    fn one_forms_share_the_syntax() {
        let phi = OneForm::parse(&ctx(), "q1 dt + t dq1").unwrap();
        assert_eq!(phi.to_string(), "q1 dt + t dq1");
        assert_eq!(OneForm::parse(&ctx(), "3 dt").unwrap().phi_t, Expr::int(3));
    }
}

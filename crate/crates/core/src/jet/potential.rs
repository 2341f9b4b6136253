//! Potentials of closed one-forms via the Poincare-lemma line integral
//! `sigma(x) = int_0^1 (x - b) . phi(b + s (x - b)) ds`.

use std::collections::BTreeMap;
use std::fmt;

use super::{is_closed, OneForm};
use crate::error::{Error, Result};
use crate::symbolic::{is_zero, Assignment, Expr, Func, Node, Symbol, ZeroVerdict};

/// A potential `sigma` with `d sigma = phi`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Symbolic(Expr),
    /// Closed form outside the symbolically integrable class; evaluated by
    /// quadrature on demand.
    Numeric(NumericPotential),
}

impl Potential {
    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            Potential::Symbolic(e) => Some(e),
            Potential::Numeric(_) => None,
        }
    }

    pub fn eval(&self, a: &Assignment) -> Result<f64> {
        match self {
            Potential::Symbolic(e) => Ok(e.eval(a)?),
            Potential::Numeric(n) => n.eval(a),
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Symbolic(e) => write!(f, "{e}"),
            Potential::Numeric(n) => write!(f, "numeric line integral of {}", n.integrand),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericPotential {
    /// Integrand in the internal path parameter.
    integrand: Expr,
    intervals: usize,
}

impl NumericPotential {
    /// Composite Simpson quadrature over the path parameter.
    pub fn eval(&self, a: &Assignment) -> Result<f64> {
        let s = path_symbol();
        let n = self.intervals;
        let h = 1.0 / n as f64;
        let mut point = a.clone();
        let mut total = 0.0;
        for k in 0..=n {
            point.set(s.clone(), k as f64 * h);
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            total += w * self.integrand.eval(&point)?;
        }
        Ok(total * h / 3.0)
    }
}

fn path_symbol() -> Symbol {
    Symbol::internal("s")
}

/// Potential based at the origin of the chart.
pub fn exact_potential(phi: &OneForm) -> Result<Potential> {
    let origin = vec![Expr::zero(); phi.dimension() + 1];
    exact_potential_from(phi, &origin)
}

/// Potential based at `base = (t, q1, .., qn)`.
pub fn exact_potential_from(phi: &OneForm, base: &[Expr]) -> Result<Potential> {
    let n = phi.dimension();
    if base.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: base.len() });
    }
    let closed = is_closed(phi);
    if !closed.is_zero_class() {
        return Err(Error::NotClosed(closed.to_string()));
    }
    let s = Expr::sym(path_symbol());
    let vars: Vec<Symbol> = std::iter::once(Symbol::Time).chain((1..=n).map(Symbol::Coord)).collect();
    let path: BTreeMap<Symbol, Expr> =
        vars.iter().zip(base).map(|(v, b)| (v.clone(), b + &s * (Expr::sym(v.clone()) - b))).collect();
    let integrand = Expr::add(
        vars.iter()
            .zip(base)
            .zip(phi.coefficients())
            .map(|((v, b), c)| (Expr::sym(v.clone()) - b) * c.substitute(&path)),
    );
    match integrate_unit(&integrand, &path_symbol())? {
        Some(sigma) => {
            let check = OneForm::exact(&sigma, n);
            let verdict = ZeroVerdict::all(check.coefficients().zip(phi.coefficients()).map(|(a, b)| is_zero(&(a - b))));
            if !verdict.is_zero_class() {
                return Err(Error::NotClosed(format!("potential check returned {verdict}")));
            }
            Ok(Potential::Symbolic(sigma))
        }
        None => Ok(Potential::Numeric(NumericPotential { integrand, intervals: 256 })),
    }
}

/// `int_0^1 e ds` for sums of `C * s^m * exp(alpha*s + beta)` terms;
/// `None` outside that class.
fn integrate_unit(e: &Expr, s: &Symbol) -> Result<Option<Expr>> {
    let mut groups: BTreeMap<(i64, Expr, Expr), Vec<Expr>> = BTreeMap::new();
    for term in e.terms() {
        let (coeff, factors) = term.split_coefficient();
        let mut constant = vec![Expr::num(coeff)];
        let mut m = 0i64;
        let mut alpha = Expr::zero();
        let mut beta = Expr::zero();
        for f in factors {
            if !f.contains(s) {
                constant.push(f);
                continue;
            }
            match f.node() {
                Node::Sym(x) if x == s => m += 1,
                Node::Pow(b, k) if b.as_symbol() == Some(s) => m += k,
                Node::Func(Func::Exp, arg) if arg.polynomial_degree(s) == Some(1) => {
                    alpha = arg.diff(s);
                    beta = arg.subs(s, &Expr::zero());
                }
                _ => return Ok(None),
            }
        }
        if m < 0 {
            return Err(Error::SingularAtBase(format!("integrand term {term}")));
        }
        groups.entry((m, alpha, beta)).or_default().push(Expr::mul(constant));
    }
    let parts = groups
        .into_iter()
        .map(|((m, alpha, beta), cs)| Expr::add(cs) * beta.exp() * moment(m, &alpha));
    Ok(Some(Expr::add(parts)))
}

/// `int_0^1 s^m exp(alpha s) ds`.
fn moment(m: i64, alpha: &Expr) -> Expr {
    if alpha.is_zero() {
        return Expr::frac(1, m + 1);
    }
    let inv = alpha.pow(-1);
    let e = alpha.exp();
    let mut acc = (&e - Expr::one()) * &inv;
    for k in 1..=m {
        acc = &e * &inv - Expr::int(k) * &inv * acc;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::ParseContext;

    fn p(text: &str) -> Expr {
        ParseContext::new(2, &["k", "v"]).unwrap().parse(text).unwrap()
    }

    fn form(phi_t: &str, phi: &[&str]) -> OneForm {
        OneForm::new(p(phi_t), phi.iter().map(|c| p(c)).collect()).unwrap()
    }

    fn symbolic(phi: &OneForm) -> Expr {
        match exact_potential(phi).unwrap() {
            Potential::Symbolic(e) => e,
            other => panic!("expected symbolic potential, got {other}"),
        }
    }

    #[test]
    fn potential_examples() {
        assert_eq!(symbolic(&form("0", &["v"])), p("v*q1"));
        assert_eq!(symbolic(&form("q1", &["t"])), p("t*q1"));
        assert_eq!(symbolic(&form("0", &["0"])), Expr::zero());
    }

    #[test]
    fn exponential_potentials() {
        assert_eq!(symbolic(&form("k*exp(k*t)*q1", &["exp(k*t)"])), p("exp(k*t)*q1"));
        assert_eq!(symbolic(&form("exp(k*t)", &["0"])), p("(exp(k*t) - 1)/k"));
        let sigma = symbolic(&form("t*exp(t)", &["0"]));
        assert_eq!(sigma, p("t*exp(t) - exp(t) + 1"));
    }

    #[test]
    fn polynomial_potential_in_two_dimensions() {
        let f = p("t^2*q1 + q1*q2^3 - 4*t*q2 + 7");
        let sigma = symbolic(&OneForm::exact(&f, 2));
        assert_eq!(sigma, f - Expr::int(7));
    }

    #[test]
    fn non_closed_forms_are_rejected() {
        assert!(matches!(exact_potential(&form("q1", &["0"])), Err(Error::NotClosed(_))));
    }

    #[test]
    fn singular_base_point() {
        let phi = form("0", &["q1^-1"]);
        assert!(matches!(exact_potential(&phi), Err(Error::SingularAtBase(_))));
        let base = [Expr::zero(), Expr::one()];
        let sigma = exact_potential_from(&phi, &base).unwrap();
        assert!(matches!(sigma, Potential::Numeric(_)));
        let a = Assignment::new().with(Symbol::Time, 0.3).with(Symbol::Coord(1), 2.0).with(Symbol::Coord(2), 0.0);
        assert!((sigma.eval(&a).unwrap() - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn numeric_fallback_for_trigonometric_forms() {
        let phi = OneForm::exact(&p("sin(t*q1)"), 2);
        let sigma = exact_potential(&phi).unwrap();
        assert!(matches!(sigma, Potential::Numeric(_)));
        let a = Assignment::new().with(Symbol::Time, 1.2).with(Symbol::Coord(1), 0.7).with(Symbol::Coord(2), 0.1);
        assert!((sigma.eval(&a).unwrap() - (1.2f64 * 0.7).sin()).abs() < 1e-9);
    }
}

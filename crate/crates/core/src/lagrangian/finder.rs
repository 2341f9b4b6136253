//! Strict symmetries by polynomial ansatz: the Lie derivative of the
//! Lagrangian along an unknown generator is expanded in a basis of
//! monomial-times-exponential functions and every coefficient is set to zero.

use std::collections::BTreeMap;

use super::{lie_derivative_lagrangian, Lagrangian};
use crate::error::{Error, Result};
use crate::jet::ProjectableVectorField;
use crate::symbolic::linalg::nullspace;
use crate::symbolic::{Expr, Func, Node, Symbol};

const MAX_DEGREE: u32 = 3;
const MAX_UNKNOWNS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ansatz {
    /// Search connections (`dt` coefficient 1) rather than vertical fields.
    pub connection: bool,
    /// Total degree of the component polynomials in `(t, q)`.
    pub degree: u32,
}

/// Basis of generators with vanishing Lie derivative within the ansatz.
///
/// In connection mode the first element (if any) is a connection and the
/// rest are vertical symmetries that may be added to it.
pub fn find_symmetries(l: &Lagrangian, ansatz: Ansatz) -> Result<Vec<ProjectableVectorField>> {
    if ansatz.degree > MAX_DEGREE {
        return Err(Error::ResourceGuard(format!("degree {} exceeds {MAX_DEGREE}", ansatz.degree)));
    }
    check_supported(l.density())?;
    let n = l.dimension();
    let monomials = monomials(n + 1, ansatz.degree);
    let unknowns = n * monomials.len() + usize::from(ansatz.connection);
    if unknowns > MAX_UNKNOWNS {
        return Err(Error::ResourceGuard(format!("{unknowns} unknowns exceed {MAX_UNKNOWNS}")));
    }
    let vars: Vec<Expr> = std::iter::once(Expr::time()).chain((1..=n).map(Expr::coord)).collect();
    let basis: Vec<Expr> =
        monomials.iter().map(|m| Expr::mul(m.iter().zip(&vars).map(|(&k, v)| v.pow(i64::from(k))))).collect();
    let c: Vec<Symbol> = (0..unknowns).map(|j| Symbol::internal(&format!("c{j}"))).collect();
    let components: Vec<Expr> = (0..n)
        .map(|i| Expr::add(basis.iter().enumerate().map(|(a, m)| Expr::sym(c[i * basis.len() + a].clone()) * m)))
        .collect();

    let mut lie = lie_derivative_lagrangian(l, &ProjectableVectorField::vertical(components)?)?;
    if ansatz.connection {
        lie = lie + Expr::sym(c[unknowns - 1].clone()) * l.density().diff(&Symbol::Time);
    }
    let index: BTreeMap<&Symbol, usize> = c.iter().enumerate().map(|(j, s)| (s, j)).collect();
    let mut rows: BTreeMap<Vec<Expr>, Vec<Expr>> = BTreeMap::new();
    for term in lie.terms() {
        let (coeff, factors) = term.split_coefficient();
        let mut unknown = None;
        let mut scalar = vec![Expr::num(coeff)];
        let mut key = Vec::new();
        for f in factors {
            match f.as_symbol().and_then(|s| index.get(s)) {
                Some(&j) => unknown = Some(j),
                None if is_parameter_factor(&f) => scalar.push(f),
                None => key.push(f),
            }
        }
        let j = unknown.expect("Lie derivative is linear in the ansatz coefficients");
        let row = rows.entry(key).or_insert_with(|| vec![Expr::zero(); unknowns]);
        row[j] = &row[j] + Expr::mul(scalar);
    }
    let basis_vectors = nullspace(rows.into_values().collect(), unknowns);

    let mut connections = Vec::new();
    let mut vertical = Vec::new();
    for v in basis_vectors {
        let comps: Vec<Expr> = (0..n)
            .map(|i| Expr::add(basis.iter().enumerate().map(|(a, m)| &v[i * basis.len() + a] * m)))
            .collect();
        if ansatz.connection && v[unknowns - 1].is_one() {
            connections.push(ProjectableVectorField::connection(comps)?);
        } else {
            vertical.push(ProjectableVectorField::vertical(comps)?);
        }
    }
    connections.extend(vertical);
    Ok(connections)
}

/// Exponent vectors of total degree at most `d` in `vars` variables, in
/// increasing degree.
fn monomials(vars: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=d {
        let mut current = vec![0; vars];
        fill(&mut current, 0, total, &mut out);
    }
    out
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k;
        fill(current, pos + 1, remaining - k, out);
    }
}

fn is_parameter_factor(f: &Expr) -> bool {
    match f.node() {
        Node::Sym(s) => s.is_parameter(),
        Node::Pow(b, _) => b.as_symbol().is_some_and(Symbol::is_parameter),
        _ => false,
    }
}

/// Sums of (Laurent) monomials in `(t, q, q_t)` and parameters, each
/// optionally times `exp` of a polynomial.
fn check_supported(e: &Expr) -> Result<()> {
    for term in e.terms() {
        let (_, factors) = term.split_coefficient();
        for f in factors {
            let ok = match f.node() {
                Node::Sym(_) => true,
                Node::Pow(b, _) => b.as_symbol().is_some(),
                Node::Func(Func::Exp, arg) => is_polynomial(arg),
                _ => false,
            };
            if !ok {
                return Err(Error::UnsupportedClass(format!("factor `{f}` in the Lagrangian")));
            }
        }
    }
    Ok(())
}

fn is_polynomial(e: &Expr) -> bool {
    e.terms().iter().all(|t| {
        t.split_coefficient().1.iter().all(|f| match f.node() {
            Node::Sym(_) => true,
            Node::Pow(b, n) => *n > 0 && b.as_symbol().is_some(),
            _ => false,
        })
    })
}

//! Hamiltonian mechanics on the momentum phase space `(t, q, p)`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::jet::variational::ConfigSpace;
use crate::jet::{canonical_lift, exact_potential_from, total_derivative, JetMode, OneForm, ProjectableVectorField};
use crate::symbolic::{is_zero, Expr, ParseContext, Symbol, ZeroVerdict};
use crate::symmetry::{charge_from, ConservedQuantity, Space, SymmetryClass, SymmetryReport};

/// The function `H(t, q, p)` of the Hamiltonian form `p_i dq^i - H dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    density: Expr,
    dimension: usize,
}

impl Hamiltonian {
    pub fn new(density: Expr, dimension: usize) -> Result<Self> {
        for s in density.free_symbols() {
            match s {
                Symbol::Parameter(_) | Symbol::Time => {}
                Symbol::Coord(i) | Symbol::Momentum(i) if i <= dimension => {}
                other => return Err(Error::Invalid(format!("Hamiltonian may not depend on `{other}`"))),
            }
        }
        Ok(Hamiltonian { density, dimension })
    }

    pub fn parse(ctx: &ParseContext, text: &str) -> Result<Self> {
        Self::new(ctx.parse(text)?, ctx.dimension())
    }

    pub fn density(&self) -> &Expr {
        &self.density
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    fn check_field(&self, u: &ProjectableVectorField) -> Result<()> {
        if u.dimension() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: u.dimension() });
        }
        Ok(())
    }
}

/// `gamma_H = d_t + (d^i H) d_i - (d_i H) d^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonVectorField {
    pub q_dot: Vec<Expr>,
    pub p_dot: Vec<Expr>,
}

impl HamiltonVectorField {
    /// Action on a function of `(t, q, p)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut terms = vec![f.diff(&Symbol::Time)];
        for (i, (qd, pd)) in self.q_dot.iter().zip(&self.p_dot).enumerate() {
            terms.push(qd * f.diff(&Symbol::Coord(i + 1)));
            terms.push(pd * f.diff(&Symbol::Momentum(i + 1)));
        }
        Expr::add(terms)
    }
}

pub fn hamilton_vector_field(h: &Hamiltonian) -> HamiltonVectorField {
    let n = h.dimension;
    HamiltonVectorField {
        q_dot: (1..=n).map(|i| h.density.diff(&Symbol::Momentum(i))).collect(),
        p_dot: (1..=n).map(|i| -h.density.diff(&Symbol::Coord(i))).collect(),
    }
}

/// Residuals `q_t^i - d^i H` followed by `p_ti + d_i H`.
pub fn hamilton_equations(h: &Hamiltonian) -> Vec<Expr> {
    let g = hamilton_vector_field(h);
    let n = h.dimension;
    let first = (1..=n).map(|i| Expr::velocity(i) - &g.q_dot[i - 1]);
    let second = (1..=n).map(|i| Expr::sym(Symbol::MomentumRate(i)) - &g.p_dot[i - 1]);
    first.chain(second).collect()
}

/// Substitutes `q_t` and `p_t` from the Hamilton equations.
pub fn hamiltonian_on_shell(e: &Expr, h: &Hamiltonian) -> Expr {
    let g = hamilton_vector_field(h);
    let mut map = BTreeMap::new();
    for i in 1..=h.dimension {
        map.insert(Symbol::Velocity(i), g.q_dot[i - 1].clone());
        map.insert(Symbol::MomentumRate(i), g.p_dot[i - 1].clone());
    }
    e.substitute(&map)
}

/// The Lagrangian `L_H = p_i q_t^i - H` over the extended coordinates `(q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseLagrangian {
    pub density: Expr,
    pub dimension: usize,
}

impl PhaseLagrangian {
    /// Euler-Lagrange expressions in `q1..qn` then `p1..pn`.
    pub fn euler_lagrange(&self) -> Vec<Expr> {
        ConfigSpace::extended_phase(self.dimension).euler_lagrange(&self.density).expect("phase-jet density")
    }

    /// Lie derivative along the first prolongation of the canonical lift of `u`.
    pub fn lie_derivative(&self, u: &ProjectableVectorField) -> Result<Expr> {
        let lift = canonical_lift(u);
        let comps: Vec<Expr> = lift.u.iter().chain(&lift.w).cloned().collect();
        ConfigSpace::extended_phase(self.dimension).lie_derivative(&self.density, lift.u_t, &comps)
    }
}

pub fn lagrangian_of_h(h: &Hamiltonian) -> PhaseLagrangian {
    let n = h.dimension;
    let density = Expr::add((1..=n).map(|i| Expr::momentum(i) * Expr::velocity(i))) - &h.density;
    let lh = PhaseLagrangian { density, dimension: n };
    debug_assert!({
        let el = lh.euler_lagrange();
        let res = hamilton_equations(h);
        (0..n).all(|i| (&el[i] + &res[n + i]).is_zero() && (&el[n + i] - &res[i]).is_zero())
    });
    lh
}

/// `d_t(p_i u^i - u^t H) - u^i d_i H + (d_i u^j) p_j d^i H`, the density of
/// the Lie derivative of the Hamiltonian form along the canonical lift.
pub fn lie_derivative_hamiltonian(h: &Hamiltonian, u: &ProjectableVectorField) -> Result<Expr> {
    h.check_field(u)?;
    let n = h.dimension;
    let ut = u.dt_contraction();
    let c = u.components();
    let gen = Expr::add((1..=n).map(|i| Expr::momentum(i) * &c[i - 1])) - &ut * &h.density;
    let mut terms = vec![gen.diff(&Symbol::Time)];
    for i in 1..=n {
        terms.push(-&c[i - 1] * h.density.diff(&Symbol::Coord(i)));
        let dh = h.density.diff(&Symbol::Momentum(i));
        for j in 1..=n {
            terms.push(c[j - 1].diff(&Symbol::Coord(i)) * Expr::momentum(j) * &dh);
        }
    }
    Ok(Expr::add(terms))
}

/// Symmetry function `u^t H - u^i p_i`.
pub fn symmetry_function_hamiltonian(h: &Hamiltonian, u: &ProjectableVectorField) -> Result<Expr> {
    h.check_field(u)?;
    let p_u = Expr::add(u.components().iter().enumerate().map(|(i, c)| c * Expr::momentum(i + 1)));
    Ok(u.dt_contraction() * &h.density - p_u)
}

/// Strict when the Lie derivative vanishes, Quasi when it is a function of
/// time alone (integrated from `t0`), Broken otherwise.
pub fn symmetry_classify_hamiltonian(h: &Hamiltonian, u: &ProjectableVectorField) -> Result<SymmetryReport> {
    symmetry_classify_hamiltonian_from(h, u, &Expr::zero())
}

pub fn symmetry_classify_hamiltonian_from(
    h: &Hamiltonian,
    u: &ProjectableVectorField,
    t0: &Expr,
) -> Result<SymmetryReport> {
    let lie = lie_derivative_hamiltonian(h, u)?;
    let direct = is_zero(&lie);
    let mut report = SymmetryReport {
        class: SymmetryClass::Broken,
        lie_derivative: lie.clone(),
        phi: None,
        sigma: None,
        charge: None,
        verdict_confidence: direct,
    };
    let n = h.dimension;
    if direct.is_zero_class() {
        report.class = SymmetryClass::Strict;
    } else {
        let phase: Vec<Symbol> = (1..=n).map(Symbol::Coord).chain((1..=n).map(Symbol::Momentum)).collect();
        let time_only = ZeroVerdict::all(phase.iter().map(|s| is_zero(&lie.diff(s))));
        if time_only.is_zero_class() {
            let at_origin: BTreeMap<Symbol, Expr> = phase.iter().map(|s| (s.clone(), Expr::zero())).collect();
            let rate = OneForm::new(lie.substitute(&at_origin), vec![Expr::zero(); n])?;
            let mut base = vec![Expr::zero(); n + 1];
            base[0] = t0.clone();
            report.sigma = Some(exact_potential_from(&rate, &base)?);
            report.phi = Some(rate);
            report.class = SymmetryClass::Quasi;
            report.verdict_confidence = time_only;
        } else if time_only == ZeroVerdict::Unknown {
            report.verdict_confidence = ZeroVerdict::Unknown;
        }
    }
    if report.class != SymmetryClass::Broken {
        let t = symmetry_function_hamiltonian(h, u)?;
        report.charge =
            Some(charge_from(&t, report.sigma.as_ref(), u.u_t(), Space::Momentum, u.to_string(), Some(report.class)));
    }
    Ok(report)
}

/// `H_Gamma = H - p_i Gamma^i`.
pub fn energy_function_hamiltonian(h: &Hamiltonian, gamma: &ProjectableVectorField) -> Result<ConservedQuantity> {
    if !gamma.is_connection() {
        return Err(Error::ExpectedConnection);
    }
    let t = symmetry_function_hamiltonian(h, gamma)?;
    Ok(charge_from(&t, None, 1, Space::Momentum, gamma.to_string(), None).named("energy"))
}

/// `p + H` on the homogeneous phase space `T*Q`, with `p` conjugate to time.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousContext {
    pub bold_h: Expr,
}

pub fn homogeneous_hamiltonian(h: &Hamiltonian) -> HomogeneousContext {
    HomogeneousContext { bold_h: Expr::sym(Symbol::HomogeneousMomentum) + &h.density }
}

/// Bracket on `T*Q`: `{f,g} = d^p f d_t g + d^i f d_i g - d_t f d^p g - d_i f d^i g`.
pub fn poisson_bracket_t(f: &Expr, g: &Expr) -> Expr {
    let mut indices = BTreeSet::new();
    for s in f.free_symbols().into_iter().chain(g.free_symbols()) {
        if let Symbol::Coord(i) | Symbol::Momentum(i) = s {
            indices.insert(i);
        }
    }
    let ph = Symbol::HomogeneousMomentum;
    let t = Symbol::Time;
    let mut terms = vec![f.diff(&ph) * g.diff(&t), -f.diff(&t) * g.diff(&ph)];
    for i in indices {
        let (q, p) = (Symbol::Coord(i), Symbol::Momentum(i));
        terms.push(f.diff(&p) * g.diff(&q));
        terms.push(-f.diff(&q) * g.diff(&p));
    }
    Expr::add(terms)
}

/// Zero test of `gamma_H(f) - {p + H, f}`.
pub fn verify_gamma_bracket(h: &Hamiltonian, f: &Expr) -> ZeroVerdict {
    let lhs = hamilton_vector_field(h).apply(f);
    is_zero(&(lhs - poisson_bracket_t(&homogeneous_hamiltonian(h).bold_h, f)))
}

/// Zero test of the Lie derivative of `H` against that of `L_H` along the
/// prolonged canonical lift.
pub fn verify_pullback_relation(h: &Hamiltonian, u: &ProjectableVectorField) -> Result<ZeroVerdict> {
    let lhs = lie_derivative_hamiltonian(h, u)?;
    let rhs = lagrangian_of_h(h).lie_derivative(u)?;
    Ok(is_zero(&(lhs - rhs)))
}

/// Residual of the first variational formula for `L_H`:
/// `L_{J^1 u~} L_H + (u^i - u^t q_t^i)(p_ti + d_i H)
///  + (p_j d_i u^j + u^t p_ti)(q_t^i - d^i H) + d_t(u^t H - u^i p_i)`.
pub fn first_variation_residual(h: &Hamiltonian, u: &ProjectableVectorField) -> Result<Expr> {
    h.check_field(u)?;
    let n = h.dimension;
    let ut = u.dt_contraction();
    let c = u.components();
    let res = hamilton_equations(h);
    let mut terms = vec![lagrangian_of_h(h).lie_derivative(u)?];
    for i in 1..=n {
        terms.push((&c[i - 1] - &ut * Expr::velocity(i)) * &res[n + i - 1]);
        let pj = Expr::add((1..=n).map(|j| Expr::momentum(j) * c[j - 1].diff(&Symbol::Coord(i))));
        terms.push((pj + &ut * Expr::sym(Symbol::MomentumRate(i))) * &res[i - 1]);
    }
    terms.push(total_derivative(&symmetry_function_hamiltonian(h, u)?, JetMode::Phase)?);
    Ok(Expr::add(terms))
}

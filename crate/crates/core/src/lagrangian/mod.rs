//! Lagrangian mechanics on the velocity phase space `(t, q, q_t)`.

mod classify;
mod finder;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::jet::variational::ConfigSpace;
use crate::jet::{h0, is_closed, OneForm, ProjectableVectorField};
use crate::symbolic::linalg::{self, Matrix};
use crate::symbolic::{is_zero, Expr, ParseContext, Symbol, ZeroVerdict};
use crate::symmetry::{charge_from, ConservedQuantity, Space};

pub use classify::{noether_charge, symmetry_classify, symmetry_classify_with, ClassifyOptions};
pub use finder::{find_symmetries, Ansatz};

/// Density `L(t, q, q_t)` of the Lagrangian `L dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lagrangian {
    density: Expr,
    dimension: usize,
}

impl Lagrangian {
    pub fn new(density: Expr, dimension: usize) -> Result<Self> {
        for s in density.free_symbols() {
            match s {
                Symbol::Parameter(_) | Symbol::Time => {}
                Symbol::Coord(i) | Symbol::Velocity(i) if i <= dimension => {}
                other => {
                    return Err(Error::Invalid(format!("Lagrangian may not depend on `{other}`")));
                }
            }
        }
        Ok(Lagrangian { density, dimension })
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

    /// `d L / d q_t^i`, index 0 holding `i = 1`.
    pub fn momenta(&self) -> Vec<Expr> {
        (1..=self.dimension).map(|i| self.density.diff(&Symbol::Velocity(i))).collect()
    }

    fn space(&self) -> ConfigSpace {
        ConfigSpace::velocity(self.dimension)
    }

    fn check_field(&self, u: &ProjectableVectorField) -> Result<()> {
        if u.dimension() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: u.dimension() });
        }
        Ok(())
    }
}

/// `E_i = d_i L - d_t d^t_i L`, of second order.
pub fn euler_lagrange(l: &Lagrangian) -> Vec<Expr> {
    l.space().euler_lagrange(&l.density).expect("first-order density")
}

/// Components of `H_L = L dt + (d^t_i L) theta^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareCartanForm {
    pub lagrangian_part: Expr,
    pub momenta_part: Vec<Expr>,
}

impl PoincareCartanForm {
    /// `u _| H_L = u^t L + (u^i - u^t q_t^i) d^t_i L`.
    pub fn contract(&self, u: &ProjectableVectorField) -> Expr {
        let ut = u.dt_contraction();
        let mut terms = vec![&ut * &self.lagrangian_part];
        for (i, (c, m)) in u.components().iter().zip(&self.momenta_part).enumerate() {
            terms.push((c - &ut * Expr::velocity(i + 1)) * m);
        }
        Expr::add(terms)
    }
}

pub fn poincare_cartan(l: &Lagrangian) -> PoincareCartanForm {
    PoincareCartanForm { lagrangian_part: l.density.clone(), momenta_part: l.momenta() }
}

/// Density of the Lie derivative of `L dt` along `J^1 u`.
pub fn lie_derivative_lagrangian(l: &Lagrangian, u: &ProjectableVectorField) -> Result<Expr> {
    l.check_field(u)?;
    l.space().lie_derivative(&l.density, u.u_t(), u.components())
}

/// Symmetry function `T_u = -u _| H_L`.
pub fn symmetry_function(l: &Lagrangian, u: &ProjectableVectorField) -> Result<Expr> {
    l.check_field(u)?;
    Ok(-poincare_cartan(l).contract(u))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstVariation {
    /// `(u^i - u^t q_t^i) E_i`
    pub euler_term: Expr,
    /// `d_t(u _| H_L)`
    pub boundary_term: Expr,
    pub residual_verdict: ZeroVerdict,
}

pub fn first_variational_check(l: &Lagrangian, u: &ProjectableVectorField) -> Result<FirstVariation> {
    let lie = lie_derivative_lagrangian(l, u)?;
    let ut = u.dt_contraction();
    let euler_term = Expr::add(
        u.components()
            .iter()
            .zip(euler_lagrange(l))
            .enumerate()
            .map(|(i, (c, e))| (c - &ut * Expr::velocity(i + 1)) * e),
    );
    let boundary_term = l.space().total_derivative(&poincare_cartan(l).contract(u))?;
    let residual_verdict = is_zero(&(lie - &euler_term - &boundary_term));
    Ok(FirstVariation { euler_term, boundary_term, residual_verdict })
}

/// Energy function of a connection: `(q_t^i - G^i) d^t_i L - L`.
pub fn energy_function(l: &Lagrangian, gamma: &ProjectableVectorField) -> Result<ConservedQuantity> {
    if !gamma.is_connection() {
        return Err(Error::ExpectedConnection);
    }
    let t = symmetry_function(l, gamma)?;
    Ok(charge_from(&t, None, 1, Space::Velocity, gamma.to_string(), None).named("energy"))
}

/// Momentum along a vertical field: `v^i d^t_i L`.
pub fn momentum_function(l: &Lagrangian, v: &ProjectableVectorField) -> Result<ConservedQuantity> {
    if v.is_connection() {
        return Err(Error::ExpectedVertical);
    }
    let t = symmetry_function(l, v)?;
    Ok(charge_from(&t, None, 0, Space::Velocity, v.to_string(), None).named("momentum"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triviality {
    pub verdict: ZeroVerdict,
    /// Reconstructed form with `L = h0(phi)` when `L` is affine in velocities.
    pub phi: Option<OneForm>,
    pub phi_closed: Option<ZeroVerdict>,
}

pub fn is_variationally_trivial(l: &Lagrangian) -> Triviality {
    let verdict = ZeroVerdict::all(euler_lagrange(l).iter().map(is_zero));
    if !verdict.is_zero_class() {
        return Triviality { verdict, phi: None, phi_closed: None };
    }
    let phi = affine_form(&l.density, l.dimension);
    let phi_closed = phi.as_ref().map(is_closed);
    Triviality { verdict, phi, phi_closed }
}

/// `a dt + b_i dq^i` for `e = a + b_i q_t^i`, when `e` is structurally affine
/// in velocities with velocity-free coefficients.
pub(crate) fn affine_form(e: &Expr, n: usize) -> Option<OneForm> {
    let vels: Vec<Symbol> = (1..=n).map(Symbol::Velocity).collect();
    let b: Vec<Expr> = vels.iter().map(|v| e.diff(v)).collect();
    if b.iter().any(|bi| vels.iter().any(|v| !bi.diff(v).is_zero())) {
        return None;
    }
    let zero: BTreeMap<Symbol, Expr> = vels.iter().map(|v| (v.clone(), Expr::zero())).collect();
    let a = e.substitute(&zero);
    let phi = OneForm::new(a, b).ok()?;
    debug_assert!((h0(&phi) - e).is_zero());
    Some(phi)
}

/// `sum v^i d^t_i L` tested for zero.
pub fn annihilator_check(l: &Lagrangian, v: &ProjectableVectorField) -> Result<ZeroVerdict> {
    if v.is_connection() {
        return Err(Error::ExpectedVertical);
    }
    l.check_field(v)?;
    let e = Expr::add(v.components().iter().zip(l.momenta()).map(|(c, m)| c * m));
    Ok(is_zero(&e))
}

/// Velocity Hessian `d^t_i d^t_j L`.
pub fn velocity_hessian(l: &Lagrangian) -> Matrix {
    let m = l.momenta();
    m.iter().map(|mi| (1..=l.dimension).map(|j| mi.diff(&Symbol::Velocity(j))).collect()).collect()
}

/// Accelerations solved from the Euler-Lagrange equations:
/// `q_tt = W^-1 (d_i L - d_t d^t_i L - q_t^j d_j d^t_i L)`.
pub fn solve_accelerations(l: &Lagrangian) -> Result<Vec<Expr>> {
    let (inv, det, verdict) = linalg::inverse(&velocity_hessian(l));
    let inv = inv.ok_or_else(|| Error::Degenerate(format!("Hessian determinant {det} is {verdict}")))?;
    let n = l.dimension;
    let rhs: Vec<Expr> = l
        .momenta()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut terms = vec![l.density.diff(&Symbol::Coord(i + 1)), -m.diff(&Symbol::Time)];
            for j in 1..=n {
                terms.push(-Expr::velocity(j) * m.diff(&Symbol::Coord(j)));
            }
            Expr::add(terms)
        })
        .collect();
    Ok(linalg::mat_vec(&inv, &rhs))
}

/// Eliminates accelerations from `e` using the equations of motion.
pub fn on_shell_reduce(e: &Expr, l: &Lagrangian) -> Result<Expr> {
    if !e.any_symbol(&|s| matches!(s, Symbol::Acceleration(_))) {
        return Ok(e.clone());
    }
    let acc = solve_accelerations(l)?;
    let map: BTreeMap<Symbol, Expr> =
        acc.into_iter().enumerate().map(|(i, a)| (Symbol::Acceleration(i + 1), a)).collect();
    Ok(e.substitute(&map))
}

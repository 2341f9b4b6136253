//! Euler-Lagrange operator and Lie derivatives over an arbitrary list of
//! fibre coordinates. The velocity phase space uses `q`; the Lagrangian
//! `L_H` of a Hamiltonian uses the extended coordinates `(q, p)`.

use super::{total_derivative, JetMode};
use crate::error::Result;
use crate::symbolic::{Expr, Symbol};

pub(crate) struct ConfigSpace {
    coords: Vec<Symbol>,
    mode: JetMode,
}

impl ConfigSpace {
    pub(crate) fn velocity(n: usize) -> Self {
        ConfigSpace { coords: (1..=n).map(Symbol::Coord).collect(), mode: JetMode::Velocity }
    }

    /// Coordinates `(q1..qn, p1..pn)` with rates `(q_t, p_t)`.
    pub(crate) fn extended_phase(n: usize) -> Self {
        let coords = (1..=n).map(Symbol::Coord).chain((1..=n).map(Symbol::Momentum)).collect();
        ConfigSpace { coords, mode: JetMode::PhaseJet }
    }

    fn rate(s: &Symbol) -> Symbol {
        match s {
            Symbol::Coord(i) => Symbol::Velocity(*i),
            Symbol::Momentum(i) => Symbol::MomentumRate(*i),
            other => unreachable!("{other} is not a fibre coordinate"),
        }
    }

    pub(crate) fn total_derivative(&self, e: &Expr) -> Result<Expr> {
        total_derivative(e, self.mode)
    }

    pub(crate) fn euler_lagrange(&self, l: &Expr) -> Result<Vec<Expr>> {
        self.coords
            .iter()
            .map(|x| Ok(l.diff(x) - self.total_derivative(&l.diff(&Self::rate(x)))?))
            .collect()
    }

    /// Density of the Lie derivative of `l dt` along the first prolongation
    /// of `u_t d_t + comps^a d_a`.
    pub(crate) fn lie_derivative(&self, l: &Expr, u_t: u8, comps: &[Expr]) -> Result<Expr> {
        let mut terms = vec![Expr::int(i64::from(u_t)) * l.diff(&Symbol::Time)];
        for (x, c) in self.coords.iter().zip(comps) {
            if c.is_zero() {
                continue;
            }
            terms.push(c * l.diff(x));
            terms.push(self.total_derivative(c)? * l.diff(&Self::rate(x)));
        }
        Ok(Expr::add(terms))
    }
}

//! Legendre and momentum maps between `(t, q, q_t)` and `(t, q, p)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{Formalism, Trajectory};
use crate::error::{Error, Result};
use crate::hamiltonian::{symmetry_function_hamiltonian, Hamiltonian};
use crate::jet::ProjectableVectorField;
use crate::lagrangian::{symmetry_function, velocity_hessian, Lagrangian};
use crate::symbolic::linalg::{self, determinant, Matrix};
use crate::symbolic::{is_zero, Assignment, Expr, Symbol, ZeroTest, ZeroVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    Hyperregular,
    Degenerate,
    UnknownNumeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegendreMap {
    pub dimension: usize,
    /// `p_i = d^t_i L`.
    pub components: Vec<Expr>,
    pub hessian: Matrix,
    pub determinant: Expr,
    pub regularity: Regularity,
    /// Set when regularity was upgraded from a probe-only check.
    pub numeric_upgrade: bool,
}

/// `q_t^i` as functions of `(t, q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumMap {
    pub components: Vec<Expr>,
}

/// The momentum map of a Hamiltonian, `q_t^i = d^i H`.
pub fn momentum_map(h: &Hamiltonian) -> MomentumMap {
    MomentumMap { components: (1..=h.dimension()).map(|i| h.density().diff(&Symbol::Momentum(i))).collect() }
}

pub fn legendre_map(l: &Lagrangian) -> LegendreMap {
    let hessian = velocity_hessian(l);
    let det = determinant(&hessian);
    let (regularity, numeric_upgrade) = match is_zero(&det) {
        ZeroVerdict::ProvenNonzero => (Regularity::Hyperregular, false),
        v if v.is_zero_class() => (Regularity::Degenerate, false),
        _ => {
            let values = ZeroTest::active().probe_values(&det);
            if !values.is_empty() && values.iter().all(|v| *v != 0.0) {
                (Regularity::Hyperregular, true)
            } else {
                (Regularity::UnknownNumeric, false)
            }
        }
    };
    LegendreMap {
        dimension: l.dimension(),
        components: l.momenta(),
        hessian,
        determinant: det,
        regularity,
        numeric_upgrade,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LegendreInverse {
    Symbolic(MomentumMap),
    Numeric(NewtonInverse),
}

impl LegendreInverse {
    /// Velocities at a point `(t, q, p)` given in `point` (parameters too).
    pub fn velocities(&self, point: &Assignment) -> Result<Vec<f64>> {
        match self {
            LegendreInverse::Symbolic(m) => {
                m.components.iter().map(|c| c.eval(point).map_err(Error::from)).collect()
            }
            LegendreInverse::Numeric(newton) => newton.solve(point),
        }
    }
}

/// Damped Newton solve of `d^t_i L(t, q, q_t) = p_i` for `q_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonInverse {
    pub components: Vec<Expr>,
    pub hessian: Matrix,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl NewtonInverse {
    pub fn solve(&self, point: &Assignment) -> Result<Vec<f64>> {
        let n = self.components.len();
        let target: Vec<f64> = (1..=n)
            .map(|i| point.get(&Symbol::Momentum(i)).ok_or_else(|| Error::Invalid(format!("missing p{i}"))))
            .collect::<Result<_>>()?;
        let mut at = point.clone();
        let residual = |at: &Assignment| -> Result<DVector<f64>> {
            let mut r = DVector::zeros(n);
            for i in 0..n {
                r[i] = self.components[i].eval(at)? - target[i];
            }
            Ok(r)
        };
        let set = |at: &mut Assignment, x: &DVector<f64>| {
            for i in 0..n {
                at.set(Symbol::Velocity(i + 1), x[i]);
            }
        };
        let mut x = DVector::zeros(n);
        set(&mut at, &x);
        let mut r = residual(&at)?;
        for _ in 0..self.max_iterations {
            if r.norm() < self.tolerance {
                return Ok(x.iter().copied().collect());
            }
            let mut jac = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    jac[(i, j)] = self.hessian[i][j].eval(&at)?;
                }
            }
            let Some(step) = jac.lu().solve(&r) else {
                return Err(Error::NewtonFailed { residual: r.norm() });
            };
            let mut lambda = 1.0;
            loop {
                let trial = &x - &step * lambda;
                set(&mut at, &trial);
                let rt = residual(&at)?;
                if rt.norm() < r.norm() || lambda < 1e-4 {
                    x = trial;
                    r = rt;
                    break;
                }
                lambda *= 0.5;
            }
        }
        if r.norm() < self.tolerance {
            Ok(x.iter().copied().collect())
        } else {
            Err(Error::NewtonFailed { residual: r.norm() })
        }
    }
}

/// Inverts `p_i = d^t_i L`. The solve is symbolic when the Hessian does not
/// depend on velocities: `q_t = W^-1 (p - b)` with `b = d^t L |_{q_t = 0}`.
pub fn invert_legendre(lm: &LegendreMap) -> Result<LegendreInverse> {
    if lm.regularity != Regularity::Hyperregular {
        return Err(Error::Degenerate(format!("Legendre map is not hyperregular, Hessian determinant {}", lm.determinant)));
    }
    let velocity_free =
        lm.hessian.iter().flatten().all(|e| !e.any_symbol(&|s| matches!(s, Symbol::Velocity(_))));
    if velocity_free {
        let (inv, det, verdict) = linalg::inverse(&lm.hessian);
        let inv = inv.ok_or_else(|| Error::Degenerate(format!("Hessian determinant {det} is {verdict}")))?;
        let at_rest = zero_velocities(lm.dimension);
        let shifted: Vec<Expr> =
            lm.components.iter().enumerate().map(|(i, c)| Expr::momentum(i + 1) - c.substitute(&at_rest)).collect();
        return Ok(LegendreInverse::Symbolic(MomentumMap { components: linalg::mat_vec(&inv, &shifted) }));
    }
    Ok(LegendreInverse::Numeric(NewtonInverse {
        components: lm.components.clone(),
        hessian: lm.hessian.clone(),
        tolerance: 1e-12,
        max_iterations: 50,
    }))
}

fn zero_velocities(n: usize) -> BTreeMap<Symbol, Expr> {
    (1..=n).map(|i| (Symbol::Velocity(i), Expr::zero())).collect()
}

fn velocities_to(values: &[Expr]) -> BTreeMap<Symbol, Expr> {
    values.iter().enumerate().map(|(i, v)| (Symbol::Velocity(i + 1), v.clone())).collect()
}

fn momenta_to(values: &[Expr]) -> BTreeMap<Symbol, Expr> {
    values.iter().enumerate().map(|(i, v)| (Symbol::Momentum(i + 1), v.clone())).collect()
}

/// `H = p_i q_t^i(t, q, p) - L(t, q, q_t(t, q, p))`.
pub fn associated_hamiltonian(l: &Lagrangian) -> Result<Hamiltonian> {
    let lm = legendre_map(l);
    let LegendreInverse::Symbolic(inverse) = invert_legendre(&lm)? else {
        return Err(Error::UnsupportedClass(
            "the associated Hamiltonian needs a symbolic Legendre inverse (Hessian depends on velocities)".into(),
        ));
    };
    let map = velocities_to(&inverse.components);
    let mut terms: Vec<Expr> =
        inverse.components.iter().enumerate().map(|(i, v)| Expr::momentum(i + 1) * v).collect();
    terms.push(-l.density().substitute(&map));
    Hamiltonian::new(Expr::add(terms), l.dimension())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Association {
    /// `p o L o H o L = p o L`.
    pub round_trip: ZeroVerdict,
    /// `p_i = d^t_i L(t, q, d H)`.
    pub momenta: ZeroVerdict,
    /// `q_t^i = d^i H(t, q, d^t L)`.
    pub velocities: ZeroVerdict,
    /// `q_t^i d^t_i L - L = H(t, q, d^t L)`.
    pub energy: ZeroVerdict,
}

impl Association {
    pub fn all(&self) -> ZeroVerdict {
        ZeroVerdict::all([self.round_trip, self.momenta, self.velocities, self.energy])
    }
}

/// Checks whether `(L, H)` is a Legendre-associated pair.
pub fn verify_association(l: &Lagrangian, h: &Hamiltonian) -> Result<Association> {
    if l.dimension() != h.dimension() {
        return Err(Error::DimensionMismatch { expected: l.dimension(), found: h.dimension() });
    }
    let lm = l.momenta();
    let hm = momentum_map(h).components;
    let p_of_v = momenta_to(&lm);
    let v_of_p = velocities_to(&hm);

    let h_of_l: Vec<Expr> = hm.iter().map(|v| v.substitute(&p_of_v)).collect();
    let back = velocities_to(&h_of_l);
    let round_trip = ZeroVerdict::all(lm.iter().map(|m| is_zero(&(m.substitute(&back) - m))));
    let momenta = ZeroVerdict::all(
        lm.iter().enumerate().map(|(i, m)| is_zero(&(m.substitute(&v_of_p) - Expr::momentum(i + 1)))),
    );
    let velocities =
        ZeroVerdict::all(h_of_l.iter().enumerate().map(|(i, v)| is_zero(&(v - Expr::velocity(i + 1)))));
    let lhs: Vec<Expr> = lm.iter().enumerate().map(|(i, m)| Expr::velocity(i + 1) * m).collect();
    let energy = is_zero(&(Expr::add(lhs) - l.density() - h.density().substitute(&p_of_v)));
    Ok(Association { round_trip, momenta, velocities, energy })
}

/// Compares the pull-back of the Lagrangian symmetry function along the
/// momentum map with `u^t H - u^i p_i`.
pub fn transfer_symmetry(l: &Lagrangian, h: &Hamiltonian, u: &ProjectableVectorField) -> Result<ZeroVerdict> {
    let lagrangian_side = symmetry_function(l, u)?.substitute(&velocities_to(&momentum_map(h).components));
    let hamiltonian_side = symmetry_function_hamiltonian(h, u)?;
    Ok(is_zero(&(lagrangian_side - hamiltonian_side)))
}

/// Maps a Lagrange trajectory `(q, q_t)` to `(q, p)` with `p_i = d^t_i L`.
pub fn map_solution(l: &Lagrangian, traj: &Trajectory) -> Result<Trajectory> {
    expect_source(traj, Formalism::Lagrange)?;
    let n = l.dimension();
    let momenta = l.momenta();
    let mut states = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let at = traj.assignment(k);
        let mut row = traj.states[k][..n].to_vec();
        for m in &momenta {
            row.push(m.eval(&at)?);
        }
        states.push(row);
    }
    Ok(Trajectory {
        state_names: (1..=n).map(Symbol::Coord).chain((1..=n).map(Symbol::Momentum)).collect(),
        states,
        source: Formalism::Hamilton,
        ..traj.clone()
    })
}

/// Maps a Hamilton trajectory `(q, p)` to `(q, q_t)` with `q_t^i = d^i H`.
pub fn map_solution_inverse(h: &Hamiltonian, traj: &Trajectory) -> Result<Trajectory> {
    expect_source(traj, Formalism::Hamilton)?;
    let n = h.dimension();
    let velocities = momentum_map(h).components;
    let mut states = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let at = traj.assignment(k);
        let mut row = traj.states[k][..n].to_vec();
        for v in &velocities {
            row.push(v.eval(&at)?);
        }
        states.push(row);
    }
    Ok(Trajectory {
        state_names: (1..=n).map(Symbol::Coord).chain((1..=n).map(Symbol::Velocity)).collect(),
        states,
        source: Formalism::Lagrange,
        ..traj.clone()
    })
}

fn expect_source(traj: &Trajectory, f: Formalism) -> Result<()> {
    if traj.source != f {
        return Err(Error::Invalid(format!("expected a {f:?} trajectory, got {:?}", traj.source)));
    }
    Ok(())
}

//! First-order reduction, fixed-step RK4 integration and conservation drift.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::{hamilton_vector_field, Hamiltonian};
use crate::jet::{prolong1, ProjectableVectorField};
use crate::lagrangian::{lie_derivative_lagrangian, solve_accelerations, Lagrangian};
use crate::symbolic::{Assignment, CompiledExpr, Expr, Symbol};
use crate::symmetry::ConservedQuantity;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formalism {
    /// State `(q, q_t)`.
    Lagrange,
    /// State `(q, p)`.
    Hamilton,
}

pub enum Source<'a> {
    Lagrangian(&'a Lagrangian),
    Hamiltonian(&'a Hamiltonian),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSystem {
    pub state: Vec<Symbol>,
    pub rhs: Vec<Expr>,
    pub source: Formalism,
}

impl OdeSystem {
    pub fn dimension(&self) -> usize {
        self.state.len() / 2
    }
}

pub fn to_first_order(source: Source<'_>) -> Result<OdeSystem> {
    match source {
        Source::Lagrangian(l) => {
            let n = l.dimension();
            let acc = solve_accelerations(l)?;
            let state = (1..=n).map(Symbol::Coord).chain((1..=n).map(Symbol::Velocity)).collect();
            let rhs = (1..=n).map(Expr::velocity).chain(acc).collect();
            Ok(OdeSystem { state, rhs, source: Formalism::Lagrange })
        }
        Source::Hamiltonian(h) => {
            let n = h.dimension();
            let g = hamilton_vector_field(h);
            let state = (1..=n).map(Symbol::Coord).chain((1..=n).map(Symbol::Momentum)).collect();
            let rhs = g.q_dot.into_iter().chain(g.p_dot).collect();
            Ok(OdeSystem { state, rhs, source: Formalism::Hamilton })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub state_names: Vec<Symbol>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Values of the non-state symbols (parameters) used during integration.
    pub constants: Assignment,
    pub step: f64,
    pub source: Formalism,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Column of a state symbol.
    pub fn column(&self, s: &Symbol) -> Option<Vec<f64>> {
        let j = self.state_names.iter().position(|x| x == s)?;
        Some(self.states.iter().map(|row| row[j]).collect())
    }

    /// Time, state and constants at sample `k`.
    pub fn assignment(&self, k: usize) -> Assignment {
        let mut a = self.constants.clone();
        a.set(Symbol::Time, self.times[k]);
        for (s, v) in self.state_names.iter().zip(&self.states[k]) {
            a.set(s.clone(), *v);
        }
        a
    }

    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }
}

/// Number of samples on the grid `t0, t0 + h, ..` not exceeding `t1`.
pub fn grid_len(t0: f64, t1: f64, h: f64) -> usize {
    ((t1 - t0) / h * (1.0 + 1e-12)).floor() as usize + 1
}

/// Classic fixed-step fourth-order Runge-Kutta with compensated state updates.
///
/// `ic` must hold every state symbol; its other entries are treated as
/// constants (parameters).
pub fn integrate(sys: &OdeSystem, ic: &Assignment, t0: f64, t1: f64, h: f64) -> Result<Trajectory> {
    if !(h > 0.0 && t1 > t0 && h.is_finite() && t0.is_finite() && t1.is_finite()) {
        return Err(Error::Invalid(format!("need h > 0 and t1 > t0, got h = {h}, [{t0}, {t1}]")));
    }
    let mut constants = Assignment::new();
    for (s, v) in ic.iter() {
        if !sys.state.contains(s) && *s != Symbol::Time {
            constants.set(s.clone(), v);
        }
    }
    let mut y = sys
        .state
        .iter()
        .map(|s| ic.get(s).ok_or_else(|| Error::Invalid(format!("missing initial condition for `{s}`"))))
        .collect::<Result<Vec<f64>>>()?;
    let slots: Vec<Symbol> = std::iter::once(Symbol::Time).chain(sys.state.iter().cloned()).collect();
    let plan =
        sys.rhs.iter().map(|e| CompiledExpr::compile(e, &slots, &constants)).collect::<Result<Vec<_>, _>>()?;
    let m = y.len();
    let mut stack = Vec::new();
    let mut buf = vec![0.0; m + 1];
    let mut eval = |t: f64, y: &[f64], out: &mut [f64]| {
        buf[0] = t;
        buf[1..].copy_from_slice(y);
        for (o, p) in out.iter_mut().zip(&plan) {
            *o = p.eval(&buf, &mut stack);
        }
    };

    let steps = grid_len(t0, t1, h);
    let mut times = Vec::with_capacity(steps);
    let mut states = Vec::with_capacity(steps);
    times.push(t0);
    states.push(y.clone());
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    // Compensated summation of the increments keeps rounding in the state
    // from accumulating over long runs.
    let mut carry = vec![0.0; m];
    for step in 1..steps {
        let t = t0 + (step - 1) as f64 * h;
        eval(t, &y, &mut k1);
        for j in 0..m {
            tmp[j] = y[j] + 0.5 * h * k1[j];
        }
        eval(t + 0.5 * h, &tmp, &mut k2);
        for j in 0..m {
            tmp[j] = y[j] + 0.5 * h * k2[j];
        }
        eval(t + 0.5 * h, &tmp, &mut k3);
        for j in 0..m {
            tmp[j] = y[j] + h * k3[j];
        }
        eval(t + h, &tmp, &mut k4);
        for j in 0..m {
            let increment = h * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]) / 6.0 - carry[j];
            let sum = y[j] + increment;
            carry[j] = (sum - y[j]) - increment;
            y[j] = sum;
        }
        let t_next = t0 + step as f64 * h;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { time: t_next });
        }
        times.push(t_next);
        states.push(y.clone());
    }
    Ok(Trajectory { state_names: sys.state.clone(), times, states, constants, step: h, source: sys.source })
}

/// Values of a charge along a trajectory.
pub fn charge_values(traj: &Trajectory, charge: &ConservedQuantity) -> Result<Vec<f64>> {
    for s in charge.expression.free_symbols() {
        let known = s == Symbol::Time || traj.state_names.contains(&s) || traj.constants.contains(&s);
        if !known {
            return Err(Error::Invalid(format!(
                "charge `{}` uses `{s}`, which is not part of the trajectory",
                charge.name
            )));
        }
    }
    if charge.is_numeric_only() {
        return (0..traj.len()).map(|k| charge.eval(&traj.assignment(k))).collect();
    }
    let slots: Vec<Symbol> = std::iter::once(Symbol::Time).chain(traj.state_names.iter().cloned()).collect();
    let plan = CompiledExpr::compile(&charge.expression, &slots, &traj.constants)?;
    let mut stack = Vec::new();
    let mut buf = vec![0.0; slots.len()];
    Ok((0..traj.len())
        .map(|k| {
            buf[0] = traj.times[k];
            buf[1..].copy_from_slice(&traj.states[k]);
            plan.eval(&buf, &mut stack)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeDrift {
    pub name: String,
    pub initial: f64,
    pub max_abs: f64,
    /// Relative to `max(|initial|, 1e-12)`.
    pub max_rel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftStats {
    pub charges: Vec<ChargeDrift>,
}

impl DriftStats {
    pub fn get(&self, name: &str) -> Option<&ChargeDrift> {
        self.charges.iter().find(|c| c.name == name)
    }
}

pub fn drift_of(name: &str, values: &[f64]) -> ChargeDrift {
    let initial = values.first().copied().unwrap_or(0.0);
    let max_abs = values.iter().map(|v| (v - initial).abs()).fold(0.0, f64::max);
    ChargeDrift { name: name.to_string(), initial, max_abs, max_rel: max_abs / initial.abs().max(1e-12) }
}

pub fn drift_report(traj: &Trajectory, charges: &[ConservedQuantity]) -> Result<DriftStats> {
    let charges = charges
        .iter()
        .map(|c| Ok(drift_of(&c.name, &charge_values(traj, c)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(DriftStats { charges })
}

/// Writes `t, state.., charges..` with 17 significant digits and LF endings.
pub fn write_csv<W: Write>(out: &mut W, traj: &Trajectory, charges: &[(String, Vec<f64>)]) -> io::Result<()> {
    let mut header = vec!["t".to_string()];
    header.extend(traj.state_names.iter().map(ToString::to_string));
    header.extend(charges.iter().map(|(name, _)| name.clone()));
    writeln!(out, "{}", header.join(","))?;
    for k in 0..traj.len() {
        let mut row = vec![format!("{:.16e}", traj.times[k])];
        row.extend(traj.states[k].iter().map(|v| format!("{v:.16e}")));
        row.extend(charges.iter().map(|(_, vals)| format!("{:.16e}", vals[k])));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Compares the finite-parameter change of the Lagrangian along the flow of
/// `J^1 u` with the symbolic Lie derivative, at 20 seeded sample points of
/// `[-1, 1]^(2n+1)`. Returns the largest absolute deviation, `O(eps)`.
pub fn flow_check(l: &Lagrangian, u: &ProjectableVectorField, eps: f64, constants: &Assignment) -> Result<f64> {
    const POINTS: usize = 20;
    const SUBSTEPS: usize = 16;
    let n = l.dimension();
    let j1 = prolong1(u);
    let lie = lie_derivative_lagrangian(l, u)?;
    let slots: Vec<Symbol> = std::iter::once(Symbol::Time)
        .chain((1..=n).map(Symbol::Coord))
        .chain((1..=n).map(Symbol::Velocity))
        .collect();
    let field: Vec<Expr> = std::iter::once(u.dt_contraction())
        .chain(u.components().iter().cloned())
        .chain(j1.vel_components.iter().cloned())
        .collect();
    let compile = |e: &Expr| CompiledExpr::compile(e, &slots, constants);
    let field = field.iter().map(compile).collect::<Result<Vec<_>, _>>()?;
    let density = compile(l.density())?;
    let lie = compile(&lie)?;

    let mut stack = Vec::new();
    let mut rhs = |x: &[f64], out: &mut [f64]| {
        for (o, f) in out.iter_mut().zip(&field) {
            *o = f.eval(x, &mut stack);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x666c_6f77);
    let m = slots.len();
    let mut worst = 0.0f64;
    for _ in 0..POINTS {
        let x0: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let mut x = x0.clone();
        let h = eps / SUBSTEPS as f64;
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for _ in 0..SUBSTEPS {
            rhs(&x, &mut k1);
            (0..m).for_each(|j| tmp[j] = x[j] + 0.5 * h * k1[j]);
            rhs(&tmp, &mut k2);
            (0..m).for_each(|j| tmp[j] = x[j] + 0.5 * h * k2[j]);
            rhs(&tmp, &mut k3);
            (0..m).for_each(|j| tmp[j] = x[j] + h * k3[j]);
            rhs(&tmp, &mut k4);
            (0..m).for_each(|j| x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { time: eps });
        }
        let mut s = Vec::new();
        let finite_difference = (density.eval(&x, &mut s) - density.eval(&x0, &mut s)) / eps;
        let deviation = (finite_difference - lie.eval(&x0, &mut s)).abs();
        if !deviation.is_finite() {
            return Err(Error::Invalid("Lagrangian is not finite along the flow".into()));
        }
        worst = worst.max(deviation);
    }
    Ok(worst)
}

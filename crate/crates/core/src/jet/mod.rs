//! Bundle-geometric operators on the configuration bundle `Q -> R` and its
//! jets: total derivatives, prolongations, canonical lifts and one-forms.

mod potential;
mod syntax;
pub(crate) mod variational;

use std::fmt;

use crate::error::{Error, Result};
use crate::symbolic::{Expr, Symbol, ZeroVerdict};

pub use potential::{exact_potential, exact_potential_from, NumericPotential, Potential};

/// Which jet alphabet a total derivative acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetMode {
    /// `(t, q, q_t)`: `q -> q_t -> q_tt`.
    Velocity,
    /// `(t, q, p)`: `q -> q_t`, `p -> p_t`.
    Phase,
    /// `(t, q, p, q_t)`, the alphabet of Lagrangians on the momentum phase
    /// space: `q -> q_t -> q_tt`, `p -> p_t`.
    PhaseJet,
}

impl fmt::Display for JetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JetMode::Velocity => "velocity",
            JetMode::Phase => "phase",
            JetMode::PhaseJet => "phase-jet",
        })
    }
}

impl JetMode {
    /// Image of a symbol under `d_t`, `None` for symbols with no rate
    /// (time and parameters).
    fn rate(self, s: &Symbol) -> Result<Option<Symbol>> {
        use Symbol::*;
        let next = match (self, s) {
            (_, Parameter(_) | Time) => return Ok(None),
            (_, Coord(i)) => Velocity(*i),
            (JetMode::Velocity | JetMode::PhaseJet, Velocity(i)) => Acceleration(*i),
            (JetMode::Phase | JetMode::PhaseJet, Momentum(i)) => MomentumRate(*i),
            _ => return Err(Error::ModeMismatch { symbol: s.clone(), mode: self }),
        };
        Ok(Some(next))
    }
}

/// Total derivative `d_t` in the given mode.
pub fn total_derivative(e: &Expr, mode: JetMode) -> Result<Expr> {
    let mut terms = vec![e.diff(&Symbol::Time)];
    for s in e.free_symbols() {
        if let Some(next) = mode.rate(&s)? {
            terms.push(Expr::sym(next) * e.diff(&s));
        }
    }
    Ok(Expr::add(terms))
}

/// Rejects anything that is not a function of `(t, q1..qn)` and parameters.
pub(crate) fn check_base_function(e: &Expr, n: usize, what: &str) -> Result<()> {
    for s in e.free_symbols() {
        match s {
            Symbol::Parameter(_) | Symbol::Time => {}
            Symbol::Coord(i) if i <= n => {}
            other => return Err(Error::InvalidField(format!("{what} depends on `{other}`"))),
        }
    }
    Ok(())
}

/// Projectable field `u^t d_t + u^i(t,q) d_i` with `u^t` in `{0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectableVectorField {
    u_t: u8,
    u: Vec<Expr>,
}

impl ProjectableVectorField {
    pub fn new(u_t: u8, u: Vec<Expr>) -> Result<Self> {
        if u_t > 1 {
            return Err(Error::InvalidField(format!("dt coefficient must be 0 or 1, got {u_t}")));
        }
        let n = u.len();
        for c in &u {
            check_base_function(c, n, "component")?;
        }
        Ok(ProjectableVectorField { u_t, u })
    }

    pub fn vertical(u: Vec<Expr>) -> Result<Self> {
        Self::new(0, u)
    }

    /// The connection `d_t + gamma^i d_i`.
    pub fn connection(gamma: Vec<Expr>) -> Result<Self> {
        Self::new(1, gamma)
    }

    pub fn zero(n: usize) -> Self {
        ProjectableVectorField { u_t: 0, u: vec![Expr::zero(); n] }
    }

    /// `d/dq_i` (1-based) in dimension `n`.
    pub fn translation(i: usize, n: usize) -> Self {
        let mut u = vec![Expr::zero(); n];
        u[i - 1] = Expr::one();
        ProjectableVectorField { u_t: 0, u }
    }

    pub fn u_t(&self) -> u8 {
        self.u_t
    }

    pub fn is_connection(&self) -> bool {
        self.u_t == 1
    }

    pub fn dimension(&self) -> usize {
        self.u.len()
    }

    /// Coordinate components `u^1..u^n` (index 0 holds `u^1`).
    pub fn components(&self) -> &[Expr] {
        &self.u
    }

    /// `dt` contracted with the field.
    pub fn dt_contraction(&self) -> Expr {
        Expr::int(i64::from(self.u_t))
    }

    pub fn checked_add(&self, other: &ProjectableVectorField) -> Result<Self> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), found: other.dimension() });
        }
        let u = self.u.iter().zip(&other.u).map(|(a, b)| a + b).collect();
        Self::new(self.u_t + other.u_t, u)
    }

    /// Action on a function of `(t, q)`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut terms = vec![self.dt_contraction() * f.diff(&Symbol::Time)];
        for (i, c) in self.u.iter().enumerate() {
            terms.push(c * f.diff(&Symbol::Coord(i + 1)));
        }
        Expr::add(terms)
    }
}

/// A projectable field together with its jet prolongation components.
#[derive(Debug, Clone, PartialEq)]
pub struct ProlongedField {
    pub base: ProjectableVectorField,
    /// Coefficients of `d/dq_t^i`.
    pub vel_components: Vec<Expr>,
    /// Coefficients of `d/dq_tt^i` for the second prolongation.
    pub acc_components: Option<Vec<Expr>>,
}

impl ProlongedField {
    /// Action on a function of `(t, q, q_t[, q_tt])`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut terms = vec![self.base.apply(f)];
        for (i, c) in self.vel_components.iter().enumerate() {
            terms.push(c * f.diff(&Symbol::Velocity(i + 1)));
        }
        if let Some(acc) = &self.acc_components {
            for (i, c) in acc.iter().enumerate() {
                terms.push(c * f.diff(&Symbol::Acceleration(i + 1)));
            }
        }
        Expr::add(terms)
    }
}

pub fn prolong1(u: &ProjectableVectorField) -> ProlongedField {
    let vel = u.u.iter().map(|c| velocity_rate(c)).collect();
    ProlongedField { base: u.clone(), vel_components: vel, acc_components: None }
}

pub fn prolong2(u: &ProjectableVectorField) -> ProlongedField {
    let mut field = prolong1(u);
    field.acc_components = Some(field.vel_components.iter().map(velocity_rate).collect());
    field
}

fn velocity_rate(e: &Expr) -> Expr {
    total_derivative(e, JetMode::Velocity).expect("components are functions of (t, q, q_t)")
}

/// Field on the momentum phase space `(t, q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVectorField {
    pub u_t: u8,
    pub u: Vec<Expr>,
    /// Coefficients of `d/dp_i`.
    pub w: Vec<Expr>,
}

impl PhaseVectorField {
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut terms = vec![Expr::int(i64::from(self.u_t)) * f.diff(&Symbol::Time)];
        for (i, c) in self.u.iter().enumerate() {
            terms.push(c * f.diff(&Symbol::Coord(i + 1)));
        }
        for (i, c) in self.w.iter().enumerate() {
            terms.push(c * f.diff(&Symbol::Momentum(i + 1)));
        }
        Expr::add(terms)
    }
}

/// Lift to the momentum phase space with `w_i = -p_j d_i u^j`.
pub fn canonical_lift(u: &ProjectableVectorField) -> PhaseVectorField {
    let n = u.dimension();
    let w = (1..=n)
        .map(|i| {
            -Expr::add(
                u.u.iter().enumerate().map(|(j, uj)| Expr::momentum(j + 1) * uj.diff(&Symbol::Coord(i))),
            )
        })
        .collect();
    PhaseVectorField { u_t: u.u_t, u: u.u.clone(), w }
}

/// One-form `phi_t dt + phi_i dq^i` on `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    pub phi_t: Expr,
    pub phi: Vec<Expr>,
}

impl OneForm {
    pub fn new(phi_t: Expr, phi: Vec<Expr>) -> Result<Self> {
        let n = phi.len();
        check_base_function(&phi_t, n, "dt coefficient")?;
        for c in &phi {
            check_base_function(c, n, "dq coefficient")?;
        }
        Ok(OneForm { phi_t, phi })
    }

    pub fn zero(n: usize) -> Self {
        OneForm { phi_t: Expr::zero(), phi: vec![Expr::zero(); n] }
    }

    /// Exterior derivative of a function of `(t, q)`.
    pub fn exact(f: &Expr, n: usize) -> Self {
        OneForm { phi_t: f.diff(&Symbol::Time), phi: (1..=n).map(|i| f.diff(&Symbol::Coord(i))).collect() }
    }

    pub fn dimension(&self) -> usize {
        self.phi.len()
    }

    pub fn is_zero(&self) -> bool {
        self.phi_t.is_zero() && self.phi.iter().all(Expr::is_zero)
    }

    /// `(dt, dq1, .., dqn)` coefficients in order.
    pub fn coefficients(&self) -> impl Iterator<Item = &Expr> {
        std::iter::once(&self.phi_t).chain(&self.phi)
    }
}

/// Density coefficient of the horizontal part `h0(phi)`.
pub fn h0(phi: &OneForm) -> Expr {
    let mut terms = vec![phi.phi_t.clone()];
    for (i, c) in phi.phi.iter().enumerate() {
        terms.push(Expr::velocity(i + 1) * c);
    }
    Expr::add(terms)
}

/// Weakest verdict over the components of `d phi`.
pub fn is_closed(phi: &OneForm) -> ZeroVerdict {
    let n = phi.dimension();
    let mut verdicts = Vec::new();
    for i in 1..=n {
        let c = &phi.phi[i - 1];
        verdicts.push(crate::symbolic::is_zero(&(phi.phi_t.diff(&Symbol::Coord(i)) - c.diff(&Symbol::Time))));
        for j in i + 1..=n {
            let d = c.diff(&Symbol::Coord(j)) - phi.phi[j - 1].diff(&Symbol::Coord(i));
            verdicts.push(crate::symbolic::is_zero(&d));
        }
    }
    ZeroVerdict::all(verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::ParseContext;

    fn p(text: &str) -> Expr {
        ParseContext::new(2, &["k", "v"]).unwrap().parse(text).unwrap()
    }

    fn gamma() -> ProjectableVectorField {
        ProjectableVectorField::connection(vec![p("-k/2*q1")]).unwrap()
    }

    fn boost() -> ProjectableVectorField {
        ProjectableVectorField::vertical(vec![p("v*t")]).unwrap()
    }

    #[test]
    fn total_derivative_examples() {
        assert_eq!(total_derivative(&p("q1"), JetMode::Velocity).unwrap(), p("q1_t"));
        assert_eq!(
            total_derivative(&p("exp(k*t)*q1_t"), JetMode::Velocity).unwrap(),
            p("k*exp(k*t)*q1_t + exp(k*t)*q1_tt")
        );
        assert_eq!(total_derivative(&p("v*q1"), JetMode::Velocity).unwrap(), p("v*q1_t"));
        assert_eq!(total_derivative(&p("p1*q1"), JetMode::Phase).unwrap(), p("p1_t*q1 + p1*q1_t"));
    }

    #[test]
    fn total_derivative_rejects_mode_mismatch() {
        assert!(matches!(total_derivative(&p("p1"), JetMode::Velocity), Err(Error::ModeMismatch { .. })));
        assert!(total_derivative(&p("q1_t"), JetMode::Phase).is_err());
        assert!(total_derivative(&p("q1_tt"), JetMode::Velocity).is_err());
        assert!(total_derivative(&p("p1*q1_t"), JetMode::PhaseJet).is_ok());
    }

    #[test]
    fn prolongation_examples() {
        let j = prolong1(&gamma());
        assert_eq!(j.vel_components, vec![p("-k/2*q1_t")]);
        assert_eq!(prolong1(&boost()).vel_components, vec![p("v")]);
        let t = ProjectableVectorField::translation(1, 1);
        assert_eq!(prolong1(&t).vel_components, vec![Expr::zero()]);

        assert_eq!(prolong2(&boost()).acc_components, Some(vec![Expr::zero()]));
        assert_eq!(prolong2(&gamma()).acc_components, Some(vec![p("-k/2*q1_tt")]));
        assert_eq!(prolong2(&t).acc_components, Some(vec![Expr::zero()]));
    }

    #[test]
    fn field_invariants() {
        assert!(ProjectableVectorField::new(2, vec![]).is_err());
        assert!(ProjectableVectorField::vertical(vec![p("q1_t")]).is_err());
        assert!(ProjectableVectorField::vertical(vec![p("q2")]).is_err());
        assert_eq!(gamma().dt_contraction(), Expr::one());
        assert!(gamma().checked_add(&gamma()).is_err());
    }

    #[test]
    fn canonical_lift_examples() {
        let t = canonical_lift(&ProjectableVectorField::translation(1, 1));
        assert_eq!(t.w, vec![Expr::zero()]);
        let g = canonical_lift(&gamma());
        assert_eq!(g.u_t, 1);
        assert_eq!(g.u, vec![p("-k/2*q1")]);
        assert_eq!(g.w, vec![p("k/2*p1")]);
        assert_eq!(canonical_lift(&boost()).w, vec![Expr::zero()]);
    }

    #[test]
    fn h0_examples() {
        let v = OneForm::new(Expr::zero(), vec![p("v")]).unwrap();
        assert_eq!(h0(&v), p("v*q1_t"));
        assert_eq!(h0(&OneForm::new(Expr::one(), vec![Expr::zero()]).unwrap()), Expr::one());
        assert_eq!(h0(&OneForm::new(p("q1"), vec![p("t")]).unwrap()), p("q1 + t*q1_t"));
    }

    #[test]
    fn closedness_examples() {
        let closed = |phi_t: &str, phi1: &str| is_closed(&OneForm::new(p(phi_t), vec![p(phi1)]).unwrap());
        assert_eq!(closed("0", "v"), ZeroVerdict::ProvenZero);
        assert_eq!(closed("q1", "0"), ZeroVerdict::ProvenNonzero);
        assert_eq!(closed("q1", "t"), ZeroVerdict::ProvenZero);
        let rot = OneForm::new(Expr::zero(), vec![p("-q2"), p("q1")]).unwrap();
        assert_eq!(is_closed(&rot), ZeroVerdict::ProvenNonzero);
    }

    #[test]
    fn total_derivative_commutes_with_h0() {
        let f = p("t^2*q1*q2 + exp(k*t)*q1 + sin(q2)");
        let lhs = total_derivative(&f, JetMode::Velocity).unwrap();
        assert_eq!(lhs, h0(&OneForm::exact(&f, 2)));
    }
}

//! Symmetry reports and conserved quantities shared by both formalisms.

use std::fmt;

use crate::error::Result;
use crate::jet::{NumericPotential, OneForm, Potential};
use crate::symbolic::{Assignment, Expr, ZeroVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryClass {
    /// The Lie derivative vanishes identically.
    Strict,
    /// The Lie derivative is `h0` of a closed one-form.
    Quasi,
    /// The Lie derivative vanishes modulo the equations of motion only.
    OnShellOnly,
    Broken,
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryClass::Strict => "Strict",
            SymmetryClass::Quasi => "Quasi",
            SymmetryClass::OnShellOnly => "OnShellOnly",
            SymmetryClass::Broken => "Broken",
        })
    }
}

/// Which phase space an expression lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// `(t, q, q_t)`
    Velocity,
    /// `(t, q, p)`
    Momentum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    /// Generator in vector-field syntax.
    pub generator: String,
    /// `None` when the quantity was built without classifying the generator.
    pub class: Option<SymmetryClass>,
    /// The charge equals `sign * (T_u + sigma)` where `T_u` is the symmetry
    /// function of the generator. Vertical generators carry `-1` (momenta),
    /// connections `+1` (energies).
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConservedQuantity {
    pub name: String,
    pub expression: Expr,
    pub space: Space,
    pub provenance: Option<Provenance>,
    /// Potential added with the given sign at evaluation time when it has no
    /// symbolic form.
    pub numeric_correction: Option<(f64, NumericPotential)>,
}

impl ConservedQuantity {
    pub fn new(name: impl Into<String>, expression: Expr, space: Space) -> Self {
        ConservedQuantity { name: name.into(), expression, space, provenance: None, numeric_correction: None }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn is_numeric_only(&self) -> bool {
        self.numeric_correction.is_some()
    }

    pub fn eval(&self, a: &Assignment) -> Result<f64> {
        let mut v = self.expression.eval(a)?;
        if let Some((sign, sigma)) = &self.numeric_correction {
            v += sign * sigma.eval(a)?;
        }
        Ok(v)
    }
}

impl fmt::Display for ConservedQuantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expression)?;
        if let Some((sign, _)) = &self.numeric_correction {
            write!(f, " {} sigma", if *sign < 0.0 { "-" } else { "+" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport {
    pub class: SymmetryClass,
    pub lie_derivative: Expr,
    pub phi: Option<OneForm>,
    /// Potential of `phi` (Lagrangian side) or the time antiderivative `f`
    /// (Hamiltonian side).
    pub sigma: Option<Potential>,
    pub charge: Option<ConservedQuantity>,
    /// Weakest zero verdict the classification relied on.
    pub verdict_confidence: ZeroVerdict,
}

/// Builds the charge `sign * (symmetry_function + sigma)` for a generator
/// with the given `dt` coefficient.
pub(crate) fn charge_from(
    symmetry_function: &Expr,
    sigma: Option<&Potential>,
    u_t: u8,
    space: Space,
    generator: String,
    class: Option<SymmetryClass>,
) -> ConservedQuantity {
    let sign: i8 = if u_t == 1 { 1 } else { -1 };
    let s = Expr::int(i64::from(sign));
    let (expression, numeric_correction) = match sigma {
        None => (&s * symmetry_function, None),
        Some(Potential::Symbolic(e)) => (&s * (symmetry_function + e), None),
        Some(Potential::Numeric(n)) => (&s * symmetry_function, Some((f64::from(sign), n.clone()))),
    };
    ConservedQuantity {
        name: "charge".into(),
        expression,
        space,
        provenance: Some(Provenance { generator, class, sign }),
        numeric_correction,
    }
}

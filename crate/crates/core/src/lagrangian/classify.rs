use super::{
    affine_form, euler_lagrange, lie_derivative_lagrangian, symmetry_function, Lagrangian,
};
use crate::error::{Error, Result};
use crate::jet::{exact_potential_from, is_closed, ProjectableVectorField};
use crate::symbolic::{is_zero, Expr, ZeroVerdict};
use crate::symmetry::{charge_from, ConservedQuantity, Space, SymmetryClass, SymmetryReport};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassifyOptions {
    /// Base point `(t, q1..qn)` for potentials; the origin when absent.
    pub base_point: Option<Vec<Expr>>,
}

pub fn symmetry_classify(l: &Lagrangian, u: &ProjectableVectorField) -> Result<SymmetryReport> {
    symmetry_classify_with(l, u, &ClassifyOptions::default())
}

pub fn symmetry_classify_with(
    l: &Lagrangian,
    u: &ProjectableVectorField,
    options: &ClassifyOptions,
) -> Result<SymmetryReport> {
    let lie = lie_derivative_lagrangian(l, u)?;
    let direct = is_zero(&lie);
    let mut report = SymmetryReport {
        class: SymmetryClass::Broken,
        lie_derivative: lie.clone(),
        phi: None,
        sigma: None,
        charge: None,
        verdict_confidence: direct,
    };
    if direct.is_zero_class() {
        report.class = SymmetryClass::Strict;
    } else if let Some(phi) = affine_form(&lie, l.dimension()) {
        let closed = is_closed(&phi);
        if closed.is_zero_class() {
            let base = options.base_point.clone().unwrap_or_else(|| vec![Expr::zero(); l.dimension() + 1]);
            report.sigma = Some(exact_potential_from(&phi, &base)?);
            report.class = SymmetryClass::Quasi;
            report.verdict_confidence = closed;
        } else {
            report.verdict_confidence = direct.and(closed);
        }
        report.phi = Some(phi);
    }
    if report.class == SymmetryClass::Broken {
        if let Some(verdict) = on_shell_residual(l, u, &lie) {
            if verdict.is_zero_class() {
                report.class = SymmetryClass::OnShellOnly;
                report.verdict_confidence = verdict;
            } else if verdict == ZeroVerdict::Unknown {
                report.verdict_confidence = ZeroVerdict::Unknown;
            }
        }
    }
    if report.class != SymmetryClass::Broken {
        report.charge = Some(noether_charge(l, u, &report)?);
    }
    Ok(report)
}

/// For Lagrangians whose momenta vanish in some directions, the Euler-Lagrange
/// expressions in those directions are first-order constraints. Returns the
/// zero verdict of the Lie derivative with those constraints removed, or
/// `None` when no momentum vanishes.
fn on_shell_residual(l: &Lagrangian, u: &ProjectableVectorField, lie: &Expr) -> Option<ZeroVerdict> {
    let momenta = l.momenta();
    let constrained: Vec<usize> = (0..l.dimension()).filter(|&i| is_zero(&momenta[i]) == ZeroVerdict::ProvenZero).collect();
    if constrained.is_empty() {
        return None;
    }
    let el = euler_lagrange(l);
    let ut = u.dt_contraction();
    let removed = Expr::add(
        constrained.iter().map(|&i| (&u.components()[i] - &ut * Expr::velocity(i + 1)) * &el[i]),
    );
    Some(is_zero(&(lie - removed)))
}

/// Conserved quantity attached to a classified generator. Vertical
/// generators yield `u _| H_L - sigma`, connections `T_u + sigma`.
pub fn noether_charge(
    l: &Lagrangian,
    u: &ProjectableVectorField,
    report: &SymmetryReport,
) -> Result<ConservedQuantity> {
    let sigma = match report.class {
        SymmetryClass::Broken => return Err(Error::Invalid("broken symmetry has no charge".into())),
        SymmetryClass::Quasi => Some(
            report.sigma.as_ref().ok_or_else(|| Error::Invalid("quasi-symmetry report without potential".into()))?,
        ),
        _ => None,
    };
    let t = symmetry_function(l, u)?;
    Ok(charge_from(&t, sigma, u.u_t(), Space::Velocity, u.to_string(), Some(report.class)))
}

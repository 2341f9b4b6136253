//! Galilei boost of a free particle. The Lagrangian changes by a total
//! derivative, so the charge picks up the potential sigma.

use noether::jet::{h0, ProjectableVectorField};
use noether::lagrangian::{lie_derivative_lagrangian, symmetry_classify, Lagrangian};
use noether::symbolic::ParseContext;

fn main() -> noether::Result<()> {
    let ctx = ParseContext::new(1, &["v"])?;
    let l = Lagrangian::parse(&ctx, "1/2*q1_t^2")?;
    let boost = ProjectableVectorField::parse(&ctx, "v*t dq1")?;

    let report = symmetry_classify(&l, &boost)?;
    println!("class: {}", report.class);
    println!("Lie derivative: {}", lie_derivative_lagrangian(&l, &boost)?);
    if let Some(phi) = &report.phi {
        println!("phi = {phi}, h0(phi) = {}", h0(phi));
    }
    if let Some(sigma) = &report.sigma {
        println!("sigma = {sigma}");
    }
    if let Some(charge) = &report.charge {
        println!("charge = {}", charge.expression);
    }

    let dilation = ProjectableVectorField::parse(&ctx, "q1 dq1")?;
    println!("dilation: {}", symmetry_classify(&l, &dilation)?.class);
    Ok(())
}

//! Damped particle: the time-dependent Lagrangian exp(kt) q_t^2 / 2 has a
//! strict symmetry mixing time translation with a scaling of q.

use noether::jet::ProjectableVectorField;
use noether::lagrangian::{euler_lagrange, solve_accelerations, symmetry_classify, Lagrangian};
use noether::legendre::associated_hamiltonian;
use noether::symbolic::ParseContext;

fn main() -> noether::Result<()> {
    let ctx = ParseContext::new(1, &["k"])?;
    let l = Lagrangian::parse(&ctx, "1/2*exp(k*t)*q1_t^2")?;
    println!("L = {}", l.density());
    println!("EL = {}", euler_lagrange(&l)[0]);
    println!("q1_tt = {}", solve_accelerations(&l)?[0]);
    println!("H = {}", associated_hamiltonian(&l)?.density());

    for text in ["dt - k/2*q1 dq1", "dq1", "dt"] {
        let u = ProjectableVectorField::parse(&ctx, text)?;
        let report = symmetry_classify(&l, &u)?;
        print!("{u}: {}", report.class);
        if let Some(charge) = report.charge {
            print!(", charge {}", charge.expression);
        }
        println!();
    }
    Ok(())
}

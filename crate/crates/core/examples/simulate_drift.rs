//! Integrates the damped oscillator in both formalisms and reports how far the
//! Noether charges drift along the numerical solution.

use noether::dynamics::{drift_report, integrate, to_first_order, write_csv, Source};
use noether::jet::ProjectableVectorField;
use noether::lagrangian::{symmetry_classify, Lagrangian};
use noether::legendre::associated_hamiltonian;
use noether::symbolic::{Assignment, ParseContext, Symbol};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = ParseContext::new(1, &["k"])?;
    let l = Lagrangian::parse(&ctx, "1/2*exp(k*t)*q1_t^2")?;
    let gamma = ProjectableVectorField::parse(&ctx, "dt - k/2*q1 dq1")?;
    let charge = symmetry_classify(&l, &gamma)?.charge.expect("gamma is a symmetry");

    let ic: Assignment = [(Symbol::Coord(1), 1.0), (Symbol::Velocity(1), 1.0), (Symbol::param("k"), 0.5)].into_iter().collect();
    for h in [1e-2, 5e-3, 2.5e-3] {
        let traj = integrate(&to_first_order(Source::Lagrangian(&l))?, &ic, 0.0, 10.0, h)?;
        let drift = &drift_report(&traj, std::slice::from_ref(&charge))?.charges[0];
        println!("h = {h:<7} drift {:.3e} (relative {:.3e})", drift.max_abs, drift.max_rel);
    }

    // In the Hamiltonian picture p1 itself is conserved.
    let h = associated_hamiltonian(&l)?;
    let hic: Assignment = [(Symbol::Coord(1), 1.0), (Symbol::Momentum(1), 1.0), (Symbol::param("k"), 0.5)].into_iter().collect();
    let traj = integrate(&to_first_order(Source::Hamiltonian(&h))?, &hic, 0.0, 1.0, 0.25)?;
    let mut out = std::io::stdout().lock();
    write_csv(&mut out, &traj, &[])?;
    Ok(())
}

//! Moves between the Lagrangian and Hamiltonian pictures: the Legendre map,
//! its inverse, the association checks and symmetry transfer.

use noether::dynamics::{integrate, to_first_order, Source};
use noether::jet::ProjectableVectorField;
use noether::lagrangian::Lagrangian;
use noether::legendre::{
    associated_hamiltonian, invert_legendre, legendre_map, map_solution, transfer_symmetry, verify_association,
    LegendreInverse,
};
use noether::symbolic::{Assignment, ParseContext, Symbol};

fn main() -> noether::Result<()> {
    let ctx = ParseContext::new(2, &["k"])?;
    let l = Lagrangian::parse(&ctx, "q1_t^2 + q1_t*q2_t + q2_t^2 - 1/2*(q1^2 + q2^2)")?;
    let lm = legendre_map(&l);
    println!("regularity: {:?}, det {}", lm.regularity, lm.determinant);
    if let LegendreInverse::Symbolic(inverse) = invert_legendre(&lm)? {
        for (i, v) in inverse.components.iter().enumerate() {
            println!("q{}_t = {v}", i + 1);
        }
    }
    let h = associated_hamiltonian(&l)?;
    println!("H = {}", h.density());
    println!("association: {}", verify_association(&l, &h)?.all());

    let rotation = ProjectableVectorField::parse(&ctx, "-q2 dq1 + q1 dq2")?;
    println!("rotation transfers: {}", transfer_symmetry(&l, &h, &rotation)?);

    // A nonquadratic kinetic term needs the Newton inverse.
    let relativistic = Lagrangian::parse(&ctx, "-sqrt(1 - q1_t^2 - q2_t^2)")?;
    if let LegendreInverse::Numeric(newton) = invert_legendre(&legendre_map(&relativistic))? {
        let point: Assignment =
            [(Symbol::Time, 0.0), (Symbol::Coord(1), 0.0), (Symbol::Coord(2), 0.0), (Symbol::Momentum(1), 0.75), (Symbol::Momentum(2), 0.0)]
                .into_iter()
                .collect();
        println!("p = (0.75, 0) gives velocities {:?}", newton.solve(&point)?);
    }

    let ic: Assignment =
        [(Symbol::Coord(1), 1.0), (Symbol::Coord(2), 0.0), (Symbol::Velocity(1), 0.0), (Symbol::Velocity(2), 0.5)]
            .into_iter()
            .collect();
    let traj = integrate(&to_first_order(Source::Lagrangian(&l))?, &ic, 0.0, 1.0, 0.01)?;
    let phase = map_solution(&l, &traj)?;
    println!("mapped final state {:?}", phase.last().unwrap());
    Ok(())
}

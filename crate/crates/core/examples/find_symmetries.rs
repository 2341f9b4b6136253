//! Solves the symmetry condition over polynomial generators of degree one.

use noether::lagrangian::{find_symmetries, symmetry_classify, Ansatz, Lagrangian};
use noether::symbolic::ParseContext;

fn main() -> noether::Result<()> {
    let systems = [
        (2, "1/2*(q1_t^2 + q2_t^2)"),
        (2, "1/2*(q1_t^2 + q2_t^2) - 1/2*(q1^2 + q2^2)"),
        (1, "1/2*exp(k*t)*q1_t^2"),
    ];
    for (n, text) in systems {
        let ctx = ParseContext::new(n, &["k"])?;
        let l = Lagrangian::parse(&ctx, text)?;
        println!("L = {}", l.density());
        for connection in [false, true] {
            println!("  {} ansatz", if connection { "connection" } else { "vertical" });
            for u in find_symmetries(&l, Ansatz { connection, degree: 1 })? {
                let report = symmetry_classify(&l, &u)?;
                let charge = report.charge.map(|c| c.expression.to_string()).unwrap_or_default();
                println!("    {u}  [{}]  {charge}", report.class);
            }
        }
    }
    Ok(())
}

//! Runs the identity suite of the command line tool on a scenario file, or on
//! a built-in damped particle when no path is given.

use noether::cli::cmd_check_lines;
use noether::scenario::Scenario;

const DEFAULT: &str = "\
[system]
dimension = 1
params = k=0.5
lagrangian = 1/2*exp(k*t)*q1_t^2
hamiltonian = 1/2*exp(-k*t)*p1^2

[generators]
gamma = dt - k/2*q1 dq1
translation = dq1
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let scenario: Scenario = text.parse()?;
    let (lines, failures) = scenario.options.zero_test.scoped(|| cmd_check_lines(&scenario))?;
    for line in lines {
        println!("{line}");
    }
    if !failures.is_empty() {
        println!("{} identity check(s) failed", failures.len());
    }
    Ok(())
}

//! Command-line front end over scenario files. [`run`] returns the text and
//! exit code so the binary stays a thin wrapper.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::dynamics::{
    charge_values, drift_of, integrate, to_first_order, write_csv, Formalism, OdeSystem, Source, Trajectory,
};
use crate::error::Error;
use crate::hamiltonian::{
    hamilton_equations, hamilton_vector_field, lagrangian_of_h, symmetry_classify_hamiltonian_from,
    symmetry_function_hamiltonian, verify_gamma_bracket, verify_pullback_relation, first_variation_residual,
    Hamiltonian,
};
use crate::jet::{total_derivative, JetMode, ProjectableVectorField};
use crate::lagrangian::{
    euler_lagrange, find_symmetries, first_variational_check, lie_derivative_lagrangian, on_shell_reduce,
    solve_accelerations, symmetry_classify_with, Ansatz, Lagrangian,
};
use crate::legendre::{
    associated_hamiltonian, invert_legendre, legendre_map, transfer_symmetry, verify_association, LegendreInverse,
    Regularity,
};
use crate::scenario::{parse_ic, Scenario};
use crate::symbolic::{is_zero, Assignment, Expr, Symbol, ZeroVerdict};
use crate::symmetry::{ConservedQuantity, Space, SymmetryClass, SymmetryReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_MATH: i32 = 3;
pub const EXIT_IDENTITY: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "noether", version, about = "Equations of motion, symmetries and conserved charges from scenario files")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equations of motion, momenta, Legendre map and associated Hamiltonian.
    Derive { file: PathBuf },
    /// Classify one declared generator and report its charge.
    Symmetry {
        file: PathBuf,
        #[arg(long)]
        generator: String,
    },
    /// Search strict symmetries with a polynomial ansatz.
    FindSymmetries {
        file: PathBuf,
        #[arg(long)]
        degree: u32,
        #[arg(long, conflicts_with = "connection")]
        vertical: bool,
        #[arg(long)]
        connection: bool,
    },
    /// Integrate the equations of motion and write a CSV trajectory.
    Simulate {
        file: PathBuf,
        #[arg(long, value_enum)]
        formalism: FormalismArg,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Initial conditions, e.g. `q1=1,q1_t=0`; override the scenario.
        #[arg(long)]
        ic: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the identity suite.
    Check { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormalismArg {
    #[value(name = "L", alias = "lagrange")]
    Lagrange,
    #[value(name = "H", alias = "hamilton")]
    Hamilton,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Parse(String),
    Math(String),
    Identity(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Scenario { .. } => Failure::Parse(e.to_string()),
            other => Failure::Math(other.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    execute(&cli.command)
}

pub fn execute(command: &Command) -> Outcome {
    let result = match command {
        Command::Derive { file } => with_scenario(file, cmd_derive),
        Command::Symmetry { file, generator } => with_scenario(file, |s| cmd_symmetry(s, generator)),
        Command::FindSymmetries { file, degree, connection, .. } => {
            with_scenario(file, |s| cmd_find_symmetries(s, Ansatz { connection: *connection, degree: *degree }))
        }
        Command::Simulate { file, formalism, t0, t1, dt, ic, out } => with_scenario(file, |s| {
            let request = SimulateRequest { formalism: *formalism, t0: *t0, t1: *t1, dt: *dt, ic: ic.as_deref() };
            cmd_simulate(s, &request, out)
        }),
        Command::Check { file } => with_scenario(file, cmd_check),
    };
    match result {
        Ok(stdout) => Outcome { code: EXIT_OK, stdout, stderr: String::new() },
        Err(Failure::Identity(report)) => {
            Outcome { code: EXIT_IDENTITY, stdout: report, stderr: "identity check failed\n".into() }
        }
        Err(Failure::Usage(m)) => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {m}\n") },
        Err(Failure::Parse(m)) => Outcome { code: EXIT_PARSE, stdout: String::new(), stderr: format!("error: {m}\n") },
        Err(Failure::Math(m)) => Outcome { code: EXIT_MATH, stdout: String::new(), stderr: format!("error: {m}\n") },
    }
}

fn with_scenario(path: &Path, f: impl FnOnce(&Scenario) -> Result<String, Failure>) -> Result<String, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let scenario = Scenario::parse(&text)?;
    scenario.options.zero_test.clone().scoped(|| f(&scenario))
}

pub fn cmd_derive_text(s: &Scenario) -> Result<String, Error> {
    let mut out = String::new();
    if let Some(l) = &s.lagrangian {
        writeln!(out, "Euler-Lagrange expressions:").unwrap();
        for (i, e) in euler_lagrange(l).iter().enumerate() {
            writeln!(out, "  E{} = {e}", i + 1).unwrap();
        }
        let acc = solve_accelerations(l)?;
        writeln!(out, "Equations of motion:").unwrap();
        for (i, a) in acc.iter().enumerate() {
            writeln!(out, "  q{}_tt = {a}", i + 1).unwrap();
        }
        let lm = legendre_map(l);
        writeln!(out, "Momenta (Legendre map, {}):", regularity_name(lm.regularity, lm.numeric_upgrade)).unwrap();
        for (i, p) in lm.components.iter().enumerate() {
            writeln!(out, "  p{} = {p}", i + 1).unwrap();
        }
        match associated_hamiltonian(l) {
            Ok(h) => writeln!(out, "Associated Hamiltonian:\n  H = {}", h.density()).unwrap(),
            Err(e) => writeln!(out, "Associated Hamiltonian: not available ({e})").unwrap(),
        }
    }
    if let Some(h) = &s.hamiltonian {
        let g = hamilton_vector_field(h);
        writeln!(out, "Hamilton equations:").unwrap();
        for (i, q) in g.q_dot.iter().enumerate() {
            writeln!(out, "  q{}_t = {q}", i + 1).unwrap();
        }
        for (i, p) in g.p_dot.iter().enumerate() {
            writeln!(out, "  p{}_t = {p}", i + 1).unwrap();
        }
    }
    if let (Some(l), Some(h)) = (&s.lagrangian, &s.hamiltonian) {
        let a = verify_association(l, h)?;
        writeln!(out, "Association: {}", a.all()).unwrap();
    }
    Ok(out)
}

fn cmd_derive(s: &Scenario) -> Result<String, Failure> {
    Ok(cmd_derive_text(s)?)
}

fn regularity_name(r: Regularity, upgraded: bool) -> &'static str {
    match (r, upgraded) {
        (Regularity::Hyperregular, false) => "hyperregular",
        (Regularity::Hyperregular, true) => "hyperregular at all probe points",
        (Regularity::Degenerate, _) => "degenerate",
        (Regularity::UnknownNumeric, _) => "regularity unknown",
    }
}

fn classify(s: &Scenario, u: &ProjectableVectorField, formalism: Formalism) -> Result<SymmetryReport, Error> {
    match formalism {
        Formalism::Lagrange => {
            let l = s.lagrangian.as_ref().ok_or_else(|| Error::Invalid("no Lagrangian in the scenario".into()))?;
            symmetry_classify_with(l, u, &s.classify_options())
        }
        Formalism::Hamilton => {
            let h = hamiltonian_of(s)?;
            let t0 = s.options.base_point.as_ref().map_or_else(Expr::zero, |b| b[0].clone());
            symmetry_classify_hamiltonian_from(&h, u, &t0)
        }
    }
}

fn hamiltonian_of(s: &Scenario) -> Result<Hamiltonian, Error> {
    match (&s.hamiltonian, &s.lagrangian) {
        (Some(h), _) => Ok(h.clone()),
        (None, Some(l)) => associated_hamiltonian(l),
        (None, None) => Err(Error::Invalid("scenario has neither Lagrangian nor Hamiltonian".into())),
    }
}

/// Symbolic on-shell verdict for `d_t charge`.
fn on_shell_conservation(s: &Scenario, charge: &ConservedQuantity) -> Result<Option<ZeroVerdict>, Error> {
    if charge.is_numeric_only() {
        return Ok(None);
    }
    match charge.space {
        Space::Velocity => {
            let l = s.lagrangian.as_ref().expect("velocity charges come from a Lagrangian");
            let rate = total_derivative(&charge.expression, JetMode::Velocity)?;
            Ok(Some(is_zero(&on_shell_reduce(&rate, l)?)))
        }
        Space::Momentum => Ok(Some(is_zero(&hamilton_vector_field(&hamiltonian_of(s)?).apply(&charge.expression)))),
    }
}

fn cmd_symmetry(s: &Scenario, name: &str) -> Result<String, Failure> {
    let u = s.generator(name).ok_or_else(|| Failure::Usage(format!("unknown generator `{name}`")))?;
    let formalism = if s.lagrangian.is_some() { Formalism::Lagrange } else { Formalism::Hamilton };
    let report = classify(s, u, formalism)?;
    let mut out = String::new();
    writeln!(out, "{name} = {u}").unwrap();
    writeln!(out, "class: {}", report.class).unwrap();
    writeln!(out, "lie derivative = {}", report.lie_derivative).unwrap();
    if let Some(phi) = &report.phi {
        writeln!(out, "phi = {phi}").unwrap();
    }
    if let Some(sigma) = &report.sigma {
        let label = if formalism == Formalism::Lagrange { "sigma" } else { "f" };
        writeln!(out, "{label} = {sigma}").unwrap();
    }
    let Some(charge) = report.charge.clone().map(|c| c.named(name)) else {
        writeln!(out, "no conserved charge").unwrap();
        return Ok(out);
    };
    writeln!(out, "charge = {charge}").unwrap();
    match on_shell_conservation(s, &charge)? {
        Some(v) => writeln!(out, "conserved on shell: {v}").unwrap(),
        None => writeln!(out, "conserved on shell: not checked symbolically (numeric potential)").unwrap(),
    }
    if let Some(sim) = &s.simulation {
        let traj = simulate(s, formalism, sim.t0, sim.t1, sim.dt, &sim.ic)?;
        let d = drift_of(name, &charge_values(&traj, &charge)?);
        writeln!(out, "drift: max abs {:.3e}, max rel {:.3e} (h = {})", d.max_abs, d.max_rel, sim.dt).unwrap();
    }
    Ok(out)
}

fn cmd_find_symmetries(s: &Scenario, ansatz: Ansatz) -> Result<String, Failure> {
    let l = s.lagrangian.as_ref().ok_or_else(|| Failure::Math("find-symmetries needs a Lagrangian".into()))?;
    let found = find_symmetries(l, ansatz)?;
    let mut out = String::new();
    let kind = if ansatz.connection { "connection" } else { "vertical" };
    writeln!(out, "{} generator(s) from the {kind} ansatz of degree {}", found.len(), ansatz.degree).unwrap();
    for (i, u) in found.iter().enumerate() {
        let report = symmetry_classify_with(l, u, &s.classify_options())?;
        writeln!(out, "u{} = {u}", i + 1).unwrap();
        writeln!(out, "  class: {}", report.class).unwrap();
        if let Some(c) = report.charge {
            writeln!(out, "  charge = {c}").unwrap();
        }
    }
    Ok(out)
}

struct SimulateRequest<'a> {
    formalism: FormalismArg,
    t0: Option<f64>,
    t1: Option<f64>,
    dt: Option<f64>,
    ic: Option<&'a str>,
}

/// Initial state for `formalism` from a mix of `q`, `q_t` and `p` values,
/// converting through the Legendre or momentum map where needed.
pub fn initial_state(s: &Scenario, formalism: Formalism, t0: f64, ic: &[(Symbol, f64)]) -> Result<Assignment, Error> {
    let mut a = s.param_values();
    a.set(Symbol::Time, t0);
    for (sym, v) in ic {
        a.set(sym.clone(), *v);
    }
    let n = s.dimension;
    let has_all = |a: &Assignment, make: fn(usize) -> Symbol| (1..=n).all(|i| a.contains(&make(i)));
    match formalism {
        Formalism::Hamilton if !has_all(&a, Symbol::Momentum) && has_all(&a, Symbol::Velocity) => {
            let l = s.lagrangian.as_ref().ok_or_else(|| {
                Error::Invalid("velocity initial conditions need a Lagrangian for the Legendre map".into())
            })?;
            for (i, p) in l.momenta().iter().enumerate() {
                let value = p.eval(&a)?;
                a.set(Symbol::Momentum(i + 1), value);
            }
        }
        Formalism::Lagrange if !has_all(&a, Symbol::Velocity) && has_all(&a, Symbol::Momentum) => {
            let l = s.lagrangian.as_ref().ok_or_else(|| Error::Invalid("no Lagrangian in the scenario".into()))?;
            let mut inverse = invert_legendre(&legendre_map(l))?;
            if let LegendreInverse::Numeric(newton) = &mut inverse {
                newton.tolerance = s.options.newton_tolerance;
                newton.max_iterations = s.options.newton_max_iterations;
            }
            for (i, v) in inverse.velocities(&a)?.into_iter().enumerate() {
                a.set(Symbol::Velocity(i + 1), v);
            }
        }
        _ => {}
    }
    let keep: Vec<Symbol> = match formalism {
        Formalism::Lagrange => (1..=n).map(Symbol::Momentum).collect(),
        Formalism::Hamilton => (1..=n).map(Symbol::Velocity).collect(),
    };
    Ok(a.iter().filter(|(s, _)| !keep.contains(s) && **s != Symbol::Time).map(|(s, v)| (s.clone(), v)).collect())
}

pub fn first_order_system(s: &Scenario, formalism: Formalism) -> Result<OdeSystem, Error> {
    match formalism {
        Formalism::Lagrange => {
            let l = s.lagrangian.as_ref().ok_or_else(|| Error::Invalid("formalism L needs a Lagrangian".into()))?;
            to_first_order(Source::Lagrangian(l))
        }
        Formalism::Hamilton => to_first_order(Source::Hamiltonian(&hamiltonian_of(s)?)),
    }
}

pub fn simulate(
    s: &Scenario,
    formalism: Formalism,
    t0: f64,
    t1: f64,
    dt: f64,
    ic: &[(Symbol, f64)],
) -> Result<Trajectory, Error> {
    let sys = first_order_system(s, formalism)?;
    integrate(&sys, &initial_state(s, formalism, t0, ic)?, t0, t1, dt)
}

fn cmd_simulate(s: &Scenario, req: &SimulateRequest<'_>, out_path: &Path) -> Result<String, Failure> {
    let formalism = match req.formalism {
        FormalismArg::Lagrange => Formalism::Lagrange,
        FormalismArg::Hamilton => Formalism::Hamilton,
    };
    let block = s.simulation.as_ref();
    let t0 = req.t0.or(block.map(|b| b.t0)).unwrap_or(0.0);
    let t1 = req.t1.or(block.map(|b| b.t1)).ok_or_else(|| Failure::Usage("no end time (`t1`) given".into()))?;
    let dt = req.dt.or(block.map(|b| b.dt)).ok_or_else(|| Failure::Usage("no step (`dt`) given".into()))?;
    let mut ic = block.map(|b| b.ic.clone()).unwrap_or_default();
    if let Some(text) = req.ic {
        let extra = parse_ic(&s.context(), text).map_err(|e| Failure::Usage(format!("--ic: {e}")))?;
        for (sym, v) in extra {
            ic.retain(|(x, _)| *x != sym);
            ic.push((sym, v));
        }
    }
    let traj = simulate(s, formalism, t0, t1, dt, &ic)?;

    let mut columns = Vec::new();
    for (name, u) in &s.generators {
        let Ok(report) = classify(s, u, formalism) else { continue };
        if let Some(charge) = report.charge {
            columns.push((name.clone(), charge_values(&traj, &charge)?));
        }
    }
    let file = fs::File::create(out_path)
        .map_err(|e| Failure::Math(format!("cannot create {}: {e}", out_path.display())))?;
    let mut writer = BufWriter::new(file);
    write_csv(&mut writer, &traj, &columns)
        .and_then(|()| std::io::Write::flush(&mut writer))
        .map_err(|e| Failure::Math(format!("cannot write {}: {e}", out_path.display())))?;

    let mut out = String::new();
    writeln!(out, "wrote {} rows to {}", traj.len(), out_path.display()).unwrap();
    for (name, values) in &columns {
        let d = drift_of(name, values);
        writeln!(
            out,
            "{name}: initial {:.16e}, max abs drift {:.3e}, max rel drift {:.3e}",
            d.initial, d.max_abs, d.max_rel
        )
        .unwrap();
    }
    Ok(out)
}

struct CheckLine {
    name: String,
    verdict: Option<ZeroVerdict>,
    note: String,
}

impl CheckLine {
    fn verdict(name: impl Into<String>, v: ZeroVerdict) -> Self {
        CheckLine { name: name.into(), verdict: Some(v), note: String::new() }
    }

    fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        CheckLine { name: name.into(), verdict: None, note: why.into() }
    }

    fn failed(&self) -> bool {
        self.verdict == Some(ZeroVerdict::ProvenNonzero)
    }
}

fn lagrangian_checks(s: &Scenario, l: &Lagrangian, lines: &mut Vec<CheckLine>) -> Result<(), Error> {
    for (name, u) in &s.generators {
        lines.push(CheckLine::verdict(format!("first variational formula [{name}]"), first_variational_check(l, u)?.residual_verdict));
        let report = symmetry_classify_with(l, u, &s.classify_options())?;
        let label = format!("Euler-Lagrange of the Lie derivative [{name}]");
        if matches!(report.class, SymmetryClass::Strict | SymmetryClass::Quasi) {
            let lie = Lagrangian::new(lie_derivative_lagrangian(l, u)?, l.dimension())?;
            lines.push(CheckLine::verdict(label, ZeroVerdict::all(euler_lagrange(&lie).iter().map(is_zero))));
        } else {
            lines.push(CheckLine::skipped(label, format!("generator is {}", report.class)));
        }
    }
    Ok(())
}

fn hamiltonian_checks(s: &Scenario, h: &Hamiltonian, lines: &mut Vec<CheckLine>) -> Result<(), Error> {
    let n = h.dimension();
    let el = lagrangian_of_h(h).euler_lagrange();
    let res = hamilton_equations(h);
    let verdict = ZeroVerdict::all(
        (0..n).flat_map(|i| [is_zero(&(&el[i] + &res[n + i])), is_zero(&(&el[n + i] - &res[i]))]),
    );
    lines.push(CheckLine::verdict("Euler-Lagrange of L_H equals Hamilton residuals", verdict));
    let mut bracket_targets: Vec<Expr> = vec![h.density().clone()];
    bracket_targets.extend((1..=n).flat_map(|i| [Expr::coord(i), Expr::momentum(i)]));
    for (name, u) in &s.generators {
        lines.push(CheckLine::verdict(format!("pull-back relation [{name}]"), verify_pullback_relation(h, u)?));
        let residual = first_variation_residual(h, u)?;
        lines.push(CheckLine::verdict(format!("first variation of L_H [{name}]"), is_zero(&residual)));
        bracket_targets.push(symmetry_function_hamiltonian(h, u)?);
    }
    let verdict = ZeroVerdict::all(bracket_targets.iter().map(|f| verify_gamma_bracket(h, f)));
    lines.push(CheckLine::verdict("Hamilton field as bracket with p + H", verdict));
    Ok(())
}

pub fn cmd_check_lines(s: &Scenario) -> Result<(Vec<String>, Vec<String>), Error> {
    let mut lines = Vec::new();
    match &s.lagrangian {
        Some(l) => lagrangian_checks(s, l, &mut lines)?,
        None => lines.push(CheckLine::skipped("Lagrangian-side identities", "no Lagrangian")),
    }
    let h = match (&s.hamiltonian, &s.lagrangian) {
        (Some(h), _) => Some(h.clone()),
        (None, Some(l)) => associated_hamiltonian(l).ok(),
        _ => None,
    };
    match &h {
        Some(h) => hamiltonian_checks(s, h, &mut lines)?,
        None => lines.push(CheckLine::skipped("Hamiltonian-side identities", "no Hamiltonian available")),
    }
    match (&s.lagrangian, &h) {
        (Some(l), Some(h)) => {
            let a = verify_association(l, h)?;
            lines.push(CheckLine::verdict("Legendre round trip", a.round_trip));
            lines.push(CheckLine::verdict("momenta through the momentum map", a.momenta));
            lines.push(CheckLine::verdict("velocities through the Legendre map", a.velocities));
            lines.push(CheckLine::verdict("energy equals Hamiltonian", a.energy));
            for (name, u) in &s.generators {
                lines.push(CheckLine::verdict(format!("symmetry function transfer [{name}]"), transfer_symmetry(l, h, u)?));
            }
        }
        _ => lines.push(CheckLine::skipped("Legendre association", "needs both formalisms")),
    }
    let failures = lines.iter().filter(|l| l.failed()).map(|l| l.name.clone()).collect();
    let text = lines
        .iter()
        .map(|l| match l.verdict {
            Some(v) => format!("{}: {v}", l.name),
            None => format!("{}: skipped ({})", l.name, l.note),
        })
        .collect();
    Ok((text, failures))
}

fn cmd_check(s: &Scenario) -> Result<String, Failure> {
    let (lines, failures) = cmd_check_lines(s)?;
    let mut out = lines.join("\n");
    out.push('\n');
    if failures.is_empty() {
        out.push_str("all identities hold\n");
        Ok(out)
    } else {
        writeln!(out, "FAILED: {}", failures.join("; ")).unwrap();
        Err(Failure::Identity(out))
    }
}

//! Sectioned key-value scenario files.
//!
//! ```text
//! # damped particle
//! [system]
//! dimension = 1
//! params = k=0.5
//! lagrangian = 1/2*exp(k*t)*q1_t^2
//!
//! [generators]
//! gamma = dt - k/2*q1 dq1
//!
//! [simulate]
//! t0 = 0
//! t1 = 10
//! dt = 1e-3
//! ic = q1=1, q1_t=1
//!
//! [options]
//! seed = 7
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::jet::ProjectableVectorField;
use crate::lagrangian::{ClassifyOptions, Lagrangian};
use crate::symbolic::{Assignment, Expr, ParseContext, Symbol, ZeroTest};

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
    pub ic: Vec<(Symbol, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub zero_test: ZeroTest,
    /// Base point `(t, q1..qn)` for symmetry potentials.
    pub base_point: Option<Vec<Expr>>,
    pub newton_tolerance: f64,
    pub newton_max_iterations: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { zero_test: ZeroTest::default(), base_point: None, newton_tolerance: 1e-12, newton_max_iterations: 50 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub dimension: usize,
    pub params: Vec<(String, f64)>,
    pub lagrangian: Option<Lagrangian>,
    pub hamiltonian: Option<Hamiltonian>,
    pub generators: Vec<(String, ProjectableVectorField)>,
    pub simulation: Option<Simulation>,
    pub options: Options,
}

impl Scenario {
    pub fn context(&self) -> ParseContext {
        ParseContext::new(self.dimension, &self.params.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>())
            .expect("parameter names are validated on construction")
    }

    pub fn param_values(&self) -> Assignment {
        self.params.iter().map(|(n, v)| (Symbol::param(n), *v)).collect()
    }

    pub fn generator(&self, name: &str) -> Option<&ProjectableVectorField> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, u)| u)
    }

    pub fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions { base_point: self.options.base_point.clone() }
    }

    pub fn parse(text: &str) -> Result<Scenario> {
        let sections = split_sections(text)?;
        let get = |section: &str| sections.get(section).cloned().unwrap_or_default();

        let system = get("system");
        let mut system_keys = keyed(&system, &["dimension", "params", "lagrangian", "hamiltonian"])?;
        let (dim_line, dim_text) =
            system_keys.remove("dimension").ok_or(Error::Scenario { line: 0, message: "missing `dimension`".into() })?;
        let dimension: usize = dim_text
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| scenario_err(dim_line, format!("dimension must be a positive integer, got `{dim_text}`")))?;
        let params = match system_keys.remove("params") {
            Some((line, text)) => parse_bindings(&text)
                .and_then(|pairs| {
                    pairs.into_iter().map(|(name, value)| Ok((name.to_string(), constant(value)?))).collect()
                })
                .map_err(|e| located(line, e))?,
            None => Vec::new(),
        };
        let names: Vec<&str> = params.iter().map(|(n, _): &(String, f64)| n.as_str()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(scenario_err(dim_line, format!("parameter `{n}` declared twice")));
            }
        }
        let ctx = ParseContext::new(dimension, &names).map_err(|e| located(dim_line, e.into()))?;
        let lagrangian = system_keys
            .remove("lagrangian")
            .map(|(line, text)| Lagrangian::parse(&ctx, &text).map_err(|e| located(line, e)))
            .transpose()?;
        let hamiltonian = system_keys
            .remove("hamiltonian")
            .map(|(line, text)| Hamiltonian::parse(&ctx, &text).map_err(|e| located(line, e)))
            .transpose()?;
        if lagrangian.is_none() && hamiltonian.is_none() {
            return Err(scenario_err(0, "need a `lagrangian` or a `hamiltonian`"));
        }

        let mut generators = Vec::new();
        for (line, key, value) in get("generators") {
            if !is_identifier(&key) {
                return Err(scenario_err(line, format!("invalid generator name `{key}`")));
            }
            if generators.iter().any(|(n, _): &(String, _)| *n == key) {
                return Err(scenario_err(line, format!("generator `{key}` declared twice")));
            }
            let u = ProjectableVectorField::parse(&ctx, &value).map_err(|e| located(line, e))?;
            generators.push((key, u));
        }

        let simulation = match sections.get("simulate") {
            None => None,
            Some(entries) => {
                let mut keys = keyed(entries, &["t0", "t1", "dt", "ic"])?;
                let mut number = |key: &str, default: Option<f64>| -> Result<f64> {
                    match keys.remove(key) {
                        Some((line, text)) => constant(&text).map_err(|e| located(line, e)),
                        None => default.ok_or_else(|| scenario_err(0, format!("[simulate] needs `{key}`"))),
                    }
                };
                let t0 = number("t0", Some(0.0))?;
                let t1 = number("t1", None)?;
                let dt = number("dt", None)?;
                let ic = match keys.remove("ic") {
                    Some((line, text)) => parse_ic(&ctx, &text).map_err(|e| located(line, e))?,
                    None => Vec::new(),
                };
                Some(Simulation { t0, t1, dt, ic })
            }
        };

        let mut options = Options::default();
        for (line, key, value) in get("options") {
            let wrap = |e| located(line, e);
            match key.as_str() {
                "seed" => options.zero_test.seed = number_of(&value).map_err(wrap)?,
                "probes" => options.zero_test.points = number_of(&value).map_err(wrap)?,
                "radius" => options.zero_test.radius = number_of(&value).map_err(wrap)?,
                "zero_tol" => options.zero_test.zero_tol = number_of(&value).map_err(wrap)?,
                "nonzero_tol" => options.zero_test.nonzero_tol = number_of(&value).map_err(wrap)?,
                "max_attempts" => options.zero_test.max_attempts = number_of(&value).map_err(wrap)?,
                "newton_tol" => options.newton_tolerance = number_of(&value).map_err(wrap)?,
                "newton_max_iter" => options.newton_max_iterations = number_of(&value).map_err(wrap)?,
                "base_point" => {
                    let point = value
                        .split(',')
                        .map(|v| ctx.parse(v.trim()).map_err(Error::from))
                        .collect::<Result<Vec<_>>>()
                        .map_err(wrap)?;
                    if point.len() != dimension + 1 {
                        return Err(scenario_err(line, format!("base_point needs {} entries", dimension + 1)));
                    }
                    options.base_point = Some(point);
                }
                other => return Err(scenario_err(line, format!("unknown option `{other}`"))),
            }
        }

        Ok(Scenario { dimension, params, lagrangian, hamiltonian, generators, simulation, options })
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::parse(s)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[system]")?;
        writeln!(f, "dimension = {}", self.dimension)?;
        if !self.params.is_empty() {
            let list: Vec<String> = self.params.iter().map(|(n, v)| format!("{n}={v}")).collect();
            writeln!(f, "params = {}", list.join(", "))?;
        }
        if let Some(l) = &self.lagrangian {
            writeln!(f, "lagrangian = {}", l.density())?;
        }
        if let Some(h) = &self.hamiltonian {
            writeln!(f, "hamiltonian = {}", h.density())?;
        }
        if !self.generators.is_empty() {
            writeln!(f, "\n[generators]")?;
            for (name, u) in &self.generators {
                writeln!(f, "{name} = {u}")?;
            }
        }
        if let Some(sim) = &self.simulation {
            writeln!(f, "\n[simulate]")?;
            writeln!(f, "t0 = {}\nt1 = {}\ndt = {}", sim.t0, sim.t1, sim.dt)?;
            if !sim.ic.is_empty() {
                let list: Vec<String> = sim.ic.iter().map(|(s, v)| format!("{s}={v}")).collect();
                writeln!(f, "ic = {}", list.join(", "))?;
            }
        }
        let d = Options::default();
        let o = &self.options;
        let mut lines = Vec::new();
        if o.zero_test.seed != d.zero_test.seed {
            lines.push(format!("seed = {}", o.zero_test.seed));
        }
        if o.zero_test.points != d.zero_test.points {
            lines.push(format!("probes = {}", o.zero_test.points));
        }
        if o.zero_test.radius != d.zero_test.radius {
            lines.push(format!("radius = {}", o.zero_test.radius));
        }
        if o.zero_test.zero_tol != d.zero_test.zero_tol {
            lines.push(format!("zero_tol = {}", o.zero_test.zero_tol));
        }
        if o.zero_test.nonzero_tol != d.zero_test.nonzero_tol {
            lines.push(format!("nonzero_tol = {}", o.zero_test.nonzero_tol));
        }
        if o.zero_test.max_attempts != d.zero_test.max_attempts {
            lines.push(format!("max_attempts = {}", o.zero_test.max_attempts));
        }
        if o.newton_tolerance != d.newton_tolerance {
            lines.push(format!("newton_tol = {}", o.newton_tolerance));
        }
        if o.newton_max_iterations != d.newton_max_iterations {
            lines.push(format!("newton_max_iter = {}", o.newton_max_iterations));
        }
        if let Some(point) = &o.base_point {
            let list: Vec<String> = point.iter().map(ToString::to_string).collect();
            lines.push(format!("base_point = {}", list.join(", ")));
        }
        if !lines.is_empty() {
            writeln!(f, "\n[options]")?;
            for line in lines {
                writeln!(f, "{line}")?;
            }
        }
        Ok(())
    }
}

type Entries = Vec<(usize, String, String)>;

fn scenario_err(line: usize, message: impl Into<String>) -> Error {
    Error::Scenario { line, message: message.into() }
}

fn located(line: usize, e: Error) -> Error {
    match e {
        Error::Scenario { .. } => e,
        other => scenario_err(line, other.to_string()),
    }
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Entries>> {
    let mut sections: BTreeMap<String, Entries> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim();
            if !matches!(name, "system" | "generators" | "simulate" | "options") {
                return Err(scenario_err(line_no, format!("unknown section `[{name}]`")));
            }
            if sections.contains_key(name) {
                return Err(scenario_err(line_no, format!("section `[{name}]` appears twice")));
            }
            sections.insert(name.to_string(), Vec::new());
            current = Some(name.to_string());
            continue;
        }
        let Some(section) = &current else {
            return Err(scenario_err(line_no, "entry outside of a section"));
        };
        let Some((key, value)) = line.split_once('=') else {
            return Err(scenario_err(line_no, "expected `key = value`"));
        };
        let entry = (line_no, key.trim().to_string(), value.trim().to_string());
        sections.get_mut(section).expect("section was inserted").push(entry);
    }
    Ok(sections)
}

fn keyed(entries: &Entries, allowed: &[&str]) -> Result<BTreeMap<String, (usize, String)>> {
    let mut map = BTreeMap::new();
    for (line, key, value) in entries {
        if !allowed.contains(&key.as_str()) {
            return Err(scenario_err(*line, format!("unknown key `{key}`")));
        }
        if map.insert(key.clone(), (*line, value.clone())).is_some() {
            return Err(scenario_err(*line, format!("key `{key}` given twice")));
        }
    }
    Ok(map)
}

fn is_identifier(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `a=1, b=2` into pairs.
pub fn parse_bindings(text: &str) -> Result<Vec<(&str, &str)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|item| {
            let (name, value) =
                item.split_once('=').ok_or_else(|| Error::Invalid(format!("expected `name=value`, got `{}`", item.trim())))?;
            Ok((name.trim(), value.trim()))
        })
        .collect()
}

/// A constant expression such as `1/3`, `0.5` or `-2e-3`.
pub fn constant(text: &str) -> Result<f64> {
    let e = ParseContext::new::<&str>(0, &[])?.parse(text)?;
    Ok(e.eval(&Assignment::new())?)
}

fn number_of<T: FromStr>(text: &str) -> Result<T> {
    text.parse().map_err(|_| Error::Invalid(format!("cannot read `{text}` as a number")))
}

/// Initial conditions over `q`, `q_t` and `p` symbols.
pub fn parse_ic(ctx: &ParseContext, text: &str) -> Result<Vec<(Symbol, f64)>> {
    let mut out: Vec<(Symbol, f64)> = Vec::new();
    for (name, value) in parse_bindings(text)? {
        let s = ctx.resolve(name, 0)?;
        if !matches!(s, Symbol::Coord(_) | Symbol::Velocity(_) | Symbol::Momentum(_)) {
            return Err(Error::Invalid(format!("`{name}` is not a state variable")));
        }
        let v = constant(value)?;
        match out.iter_mut().find(|(x, _)| *x == s) {
            Some(slot) => slot.1 = v,
            None => out.push((s, v)),
        }
    }
    Ok(out)
}

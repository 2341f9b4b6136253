#![allow(dead_code)]

use noether::jet::ProjectableVectorField;
use noether::symbolic::{Assignment, Expr, ParseContext, Symbol};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn ctx(n: usize) -> ParseContext {
    ParseContext::new(n, &["k", "v", "w"]).unwrap()
}

pub fn expr(n: usize, text: &str) -> Expr {
    ctx(n).parse(text).unwrap()
}

/// Random polynomial of total degree at most `degree` with small integer
/// coefficients.
pub fn random_poly(rng: &mut ChaCha8Rng, vars: &[Expr], degree: u32, terms: usize) -> Expr {
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let mut c: i64 = rng.gen_range(-3..=3);
        if c == 0 {
            c = 1;
        }
        let mut budget = rng.gen_range(0..=degree);
        let mut factors = vec![Expr::int(c)];
        while budget > 0 {
            let v = &vars[rng.gen_range(0..vars.len())];
            factors.push(v.clone());
            budget -= 1;
        }
        out.push(Expr::mul(factors));
    }
    Expr::add(out)
}

pub fn time_and_coords(n: usize) -> Vec<Expr> {
    std::iter::once(Expr::time()).chain((1..=n).map(Expr::coord)).collect()
}

pub fn jet_vars(n: usize) -> Vec<Expr> {
    time_and_coords(n).into_iter().chain((1..=n).map(Expr::velocity)).collect()
}

pub fn phase_vars(n: usize) -> Vec<Expr> {
    time_and_coords(n).into_iter().chain((1..=n).map(Expr::momentum)).collect()
}

/// Random projectable field with polynomial components of degree <= `degree`.
pub fn random_field(rng: &mut ChaCha8Rng, n: usize, degree: u32) -> ProjectableVectorField {
    let vars = time_and_coords(n);
    let comps: Vec<Expr> = (0..n).map(|_| random_poly(rng, &vars, degree, 3)).collect();
    if rng.gen_bool(0.5) {
        ProjectableVectorField::connection(comps).unwrap()
    } else {
        ProjectableVectorField::vertical(comps).unwrap()
    }
}

/// Random point for every free symbol in `exprs`, uniform in `[-1, 1]`.
pub fn random_point(rng: &mut ChaCha8Rng, exprs: &[&Expr]) -> Assignment {
    let mut a = Assignment::new();
    for e in exprs {
        for s in e.free_symbols() {
            if !a.contains(&s) {
                a.set(s, rng.gen_range(-1.0..=1.0));
            }
        }
    }
    a
}

pub fn param(name: &str, value: f64) -> (Symbol, f64) {
    (Symbol::param(name), value)
}

mod common;

use std::collections::BTreeMap;

use common::{ctx, expr, jet_vars, phase_vars, random_field, random_poly, time_and_coords};
use noether::hamiltonian::{
    hamilton_vector_field, homogeneous_hamiltonian, poisson_bracket_t, symmetry_classify_hamiltonian,
    symmetry_function_hamiltonian, Hamiltonian,
};
use noether::jet::{
    canonical_lift, exact_potential, h0, is_closed, prolong1, total_derivative, JetMode, OneForm,
    ProjectableVectorField,
};
use noether::lagrangian::{
    euler_lagrange, find_symmetries, lie_derivative_lagrangian, on_shell_reduce, symmetry_classify,
    symmetry_function, Ansatz, Lagrangian,
};
use noether::legendre::{invert_legendre, legendre_map, LegendreInverse};
use noether::symbolic::{is_zero, Expr, Symbol, ZeroVerdict};
use noether::symmetry::SymmetryClass;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lag(n: usize, text: &str) -> Lagrangian {
    Lagrangian::parse(&ctx(n), text).unwrap()
}

fn ham(n: usize, text: &str) -> Hamiltonian {
    Hamiltonian::parse(&ctx(n), text).unwrap()
}

fn field(n: usize, text: &str) -> ProjectableVectorField {
    ProjectableVectorField::parse(&ctx(n), text).unwrap()
}

fn all_zero(es: &[Expr]) -> bool {
    ZeroVerdict::all(es.iter().map(is_zero)).is_zero_class()
}

/// Regular Lagrangians with known symmetries, used as a zoo.
fn zoo() -> Vec<(usize, &'static str)> {
    vec![
        (1, "1/2*q1_t^2"),
        (1, "1/2*exp(k*t)*q1_t^2"),
        (1, "1/2*q1_t^2 - 1/2*q1^2"),
        (2, "1/2*(q1_t^2 + q2_t^2)"),
        (2, "1/2*(q1_t^2 + q2_t^2) - 1/2*(q1^2 + q2^2)"),
        (2, "q1_t^2 + q1_t*q2_t + q2_t^2"),
    ]
}

fn zoo_generators(l: &Lagrangian) -> Vec<ProjectableVectorField> {
    let n = l.dimension();
    let mut out = Vec::new();
    for connection in [false, true] {
        out.extend(find_symmetries(l, Ansatz { connection, degree: 1 }).unwrap());
    }
    out.push(ProjectableVectorField::vertical((1..=n).map(|i| Expr::param("v") * Expr::time() * Expr::int(i as i64)).collect()).unwrap());
    out
}

fn seeds() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn total_derivative_commutes_with_h0(seed in seeds(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_poly(&mut rng, &time_and_coords(n), 3, 4) * Expr::coord(1).exp();
        prop_assert_eq!(total_derivative(&f, JetMode::Velocity).unwrap(), h0(&OneForm::exact(&f, n)));
    }

    #[test]
    fn prolongation_keeps_the_time_component(seed in seeds(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_field(&mut rng, n, 2);
        let j1 = prolong1(&u);
        prop_assert_eq!(j1.base.dt_contraction(), u.dt_contraction());
        prop_assert_eq!(j1.vel_components.len(), n);
    }

    #[test]
    fn potentials_reproduce_exact_forms(seed in seeds(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars = time_and_coords(n);
        let sigma = random_poly(&mut rng, &vars, 3, 4) + random_poly(&mut rng, &vars, 1, 2) * (Expr::param("k") * Expr::time()).exp();
        let phi = OneForm::exact(&sigma, n);
        prop_assert!(is_closed(&phi).is_zero_class());
        let potential = exact_potential(&phi).unwrap();
        let s = potential.as_expr().expect("symbolic class").clone();
        let back = OneForm::exact(&s, n);
        let diffs: Vec<Expr> = back.coefficients().zip(phi.coefficients()).map(|(a, b)| a - b).collect();
        prop_assert!(all_zero(&diffs));
    }

    #[test]
    fn canonical_lift_is_linear_in_momenta(seed in seeds(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_field(&mut rng, n, 2);
        let lift = canonical_lift(&u);
        prop_assert_eq!(lift.u_t, u.u_t());
        prop_assert_eq!(&lift.u[..], u.components());
        let scale: BTreeMap<Symbol, Expr> = (1..=n).map(|i| (Symbol::Momentum(i), Expr::int(2) * Expr::momentum(i))).collect();
        let zero: BTreeMap<Symbol, Expr> = (1..=n).map(|i| (Symbol::Momentum(i), Expr::zero())).collect();
        for w in &lift.w {
            prop_assert!((w.substitute(&scale) - Expr::int(2) * w).is_zero());
            prop_assert!(w.substitute(&zero).is_zero());
        }
    }

    #[test]
    fn lie_derivative_is_trivial_exactly_for_symmetries(seed in seeds(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = Lagrangian::new(random_poly(&mut rng, &jet_vars(n), 3, 4), n).unwrap();
        let u = random_field(&mut rng, n, 1);
        let report = symmetry_classify(&l, &u).unwrap();
        let lie = Lagrangian::new(lie_derivative_lagrangian(&l, &u).unwrap(), n).unwrap();
        let trivial = all_zero(&euler_lagrange(&lie));
        let symmetric = matches!(report.class, SymmetryClass::Strict | SymmetryClass::Quasi);
        prop_assert_eq!(trivial, symmetric, "{} along {}: {:?}", l.density(), u, report.class);
    }

    #[test]
    fn hamilton_field_preserves_energy_up_to_explicit_time(seed in seeds(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = Hamiltonian::new(random_poly(&mut rng, &phase_vars(n), 3, 5), n).unwrap();
        let g = hamilton_vector_field(&h);
        prop_assert!((g.apply(h.density()) - h.density().diff(&Symbol::Time)).is_zero());
        prop_assert!(g.apply(&Expr::time()).is_one());
    }

    #[test]
    fn bracket_is_antisymmetric_and_leibniz(seed in seeds(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars: Vec<Expr> = phase_vars(n).into_iter().chain([Expr::sym(Symbol::HomogeneousMomentum)]).collect();
        let f = random_poly(&mut rng, &vars, 3, 4);
        let g = random_poly(&mut rng, &vars, 3, 4);
        let k = random_poly(&mut rng, &vars, 2, 3);
        prop_assert!(is_zero(&(poisson_bracket_t(&f, &g) + poisson_bracket_t(&g, &f))).is_zero_class());
        let leibniz = poisson_bracket_t(&f, &(&g * &k)) - poisson_bracket_t(&f, &g) * &k - &g * poisson_bracket_t(&f, &k);
        prop_assert!(is_zero(&leibniz).is_zero_class());
    }
}

#[test]
fn quasi_forms_reconstruct_the_lie_derivative() {
    let cases = [
        (1, "1/2*q1_t^2", "v*t dq1"),
        (1, "1/2*q1_t^2 - k*q1", "dq1"),
        (2, "1/2*(q1_t^2 + q2_t^2)", "t dq1 + 2*t dq2"),
        (1, "1/2*q1_t^2 + t*q1", "dq1"),
    ];
    for (n, l, u) in cases {
        let (l, u) = (lag(n, l), field(n, u));
        let report = symmetry_classify(&l, &u).unwrap();
        assert_eq!(report.class, SymmetryClass::Quasi, "{}", l.density());
        let phi = report.phi.unwrap();
        assert_eq!(h0(&phi), lie_derivative_lagrangian(&l, &u).unwrap());
    }
}

#[test]
fn emitted_charges_are_conserved_on_shell() {
    let mut checked = 0;
    for (n, text) in zoo() {
        let l = lag(n, text);
        for u in zoo_generators(&l) {
            let report = symmetry_classify(&l, &u).unwrap();
            if !matches!(report.class, SymmetryClass::Strict | SymmetryClass::Quasi) {
                continue;
            }
            let charge = report.charge.unwrap();
            let rate = total_derivative(&charge.expression, JetMode::Velocity).unwrap();
            assert!(is_zero(&on_shell_reduce(&rate, &l).unwrap()).is_zero_class(), "{text} / {u}");
            checked += 1;
        }
    }
    assert!(checked >= 10, "{checked}");
}

#[test]
fn energy_shift_by_a_vertical_symmetry() {
    let l = lag(1, "1/2*exp(k*t)*q1_t^2");
    let gamma = field(1, "dt - k/2*q1 dq1");
    let v = field(1, "dq1");
    let shifted = gamma.checked_add(&v).unwrap();
    let t = |u: &ProjectableVectorField| symmetry_function(&l, u).unwrap();
    assert_eq!(t(&shifted), t(&gamma) + t(&v));
    let charge = |u: &ProjectableVectorField| symmetry_classify(&l, u).unwrap().charge.unwrap().expression;
    assert_eq!(symmetry_classify(&l, &shifted).unwrap().class, SymmetryClass::Strict);
    assert_eq!(charge(&shifted), charge(&gamma) - charge(&v));
}

#[test]
fn conserved_symmetry_functions_are_first_integrals() {
    let cases = [
        (1, "1/2*exp(-k*t)*p1^2", "dt - k/2*q1 dq1"),
        (1, "1/2*p1^2", "dq1"),
        (2, "1/2*(p1^2 + p2^2) + 1/2*(q1^2 + q2^2)", "-q2 dq1 + q1 dq2"),
        (2, "1/2*(p1^2 + p2^2) + 1/2*(q1^2 + q2^2)", "dt"),
    ];
    for (n, h, u) in cases {
        let (h, u) = (ham(n, h), field(n, u));
        let report = symmetry_classify_hamiltonian(&h, &u).unwrap();
        assert_eq!(report.class, SymmetryClass::Strict);
        let t = symmetry_function_hamiltonian(&h, &u).unwrap();
        let bracket = poisson_bracket_t(&homogeneous_hamiltonian(&h).bold_h, &t);
        assert!(is_zero(&bracket).is_zero_class(), "{}", h.density());
    }
}

#[test]
fn symbolic_legendre_inverse_round_trips() {
    for (n, text) in zoo() {
        let lm = legendre_map(&lag(n, text));
        let LegendreInverse::Symbolic(inverse) = invert_legendre(&lm).unwrap() else { panic!("{text}") };
        let map: BTreeMap<Symbol, Expr> =
            inverse.components.iter().enumerate().map(|(i, v)| (Symbol::Velocity(i + 1), v.clone())).collect();
        for (i, c) in lm.components.iter().enumerate() {
            assert_eq!(c.substitute(&map), Expr::momentum(i + 1), "{text}");
        }
    }
}

#[test]
fn randomized_time_dependent_generators_on_the_zoo() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, text) in zoo() {
        let l = lag(n, text);
        for _ in 0..5 {
            let u = random_field(&mut rng, n, 2);
            let report = symmetry_classify(&l, &u).unwrap();
            if report.class == SymmetryClass::Broken {
                assert!(report.charge.is_none());
            } else {
                assert!(report.charge.is_some());
            }
        }
    }
    assert_eq!(expr(1, "q1"), Expr::coord(1));
}

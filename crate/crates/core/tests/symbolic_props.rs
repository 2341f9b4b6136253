mod common;

use common::ctx;
use noether::symbolic::{is_zero, Assignment, Expr, Func, Symbol};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        (1i64..=4, 2i64..=5).prop_map(|(a, b)| Expr::frac(a, b)),
        Just(Expr::time()),
        Just(Expr::coord(1)),
        Just(Expr::coord(2)),
        Just(Expr::velocity(1)),
        Just(Expr::param("k")),
    ]
}

/// Smooth expressions: no negative powers, logs or roots.
fn smooth() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::add),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::mul),
            (inner.clone(), 0i64..=3).prop_map(|(e, n)| e.pow(n)),
            inner.clone().prop_map(|e| e.sin()),
            inner.clone().prop_map(|e| e.cos()),
            inner.prop_map(|e| Expr::func(Func::Exp, e * Expr::frac(1, 4))),
        ]
    })
}

/// Adds rational functions of nonvanishing denominators.
fn general() -> impl Strategy<Value = Expr> {
    (smooth(), smooth(), -2i64..=2).prop_map(|(a, b, n)| a + (Expr::int(2) + b.pow(2)).pow(n))
}

fn point(values: &[f64]) -> Assignment {
    let symbols =
        [Symbol::Time, Symbol::Coord(1), Symbol::Coord(2), Symbol::Velocity(1), Symbol::param("k")];
    symbols.into_iter().zip(values.iter().copied()).collect()
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalization_is_idempotent(e in general()) {
        let once = e.normalize();
        prop_assert_eq!(once.normalize(), once);
    }

    #[test]
    fn print_parse_round_trip(e in general()) {
        let parsed = ctx(2).parse(&e.to_string()).unwrap();
        prop_assert_eq!(parsed, e);
    }

    #[test]
    fn diff_is_linear(a in smooth(), b in smooth(), x in -3i64..=3, y in -3i64..=3) {
        for s in [Symbol::Time, Symbol::Coord(1), Symbol::Velocity(1)] {
            let lhs = (Expr::int(x) * &a + Expr::int(y) * &b).diff(&s);
            let rhs = Expr::int(x) * a.diff(&s) + Expr::int(y) * b.diff(&s);
            prop_assert!(is_zero(&(lhs - rhs)).is_zero_class());
        }
    }

    #[test]
    fn product_rule(a in smooth(), b in smooth()) {
        let s = Symbol::Coord(1);
        let lhs = (&a * &b).diff(&s);
        let rhs = a.diff(&s) * &b + &a * b.diff(&s);
        prop_assert!(is_zero(&(lhs - rhs)).is_zero_class());
    }

    #[test]
    fn derivatives_match_central_differences(e in general(), pts in prop::collection::vec(values(), 20)) {
        let step = 1e-5;
        for s in [Symbol::Time, Symbol::Coord(1), Symbol::Velocity(1)] {
            let d = e.diff(&s);
            for v in &pts {
                let at = point(v);
                let x = at.get(&s).unwrap();
                let (Ok(f), Ok(exact)) = (e.eval(&at), d.eval(&at)) else { continue };
                let mut plus = at.clone();
                plus.set(s.clone(), x + step);
                let mut minus = at.clone();
                minus.set(s.clone(), x - step);
                let (Ok(fp), Ok(fm)) = (e.eval(&plus), e.eval(&minus)) else { continue };
                let fd = (fp - fm) / (2.0 * step);
                let scale = 1f64.max(exact.abs()).max(f.abs());
                prop_assert!((fd - exact).abs() <= 1e-6 * scale, "{} at {:?}: fd {} vs {}", e, v, fd, exact);
            }
        }
    }

    #[test]
    fn substitution_agrees_with_evaluation(e in general(), r in smooth(), v in values()) {
        let s = Symbol::Coord(1);
        let substituted = e.subs(&s, &r);
        let at = point(&v);
        if let (Ok(inner), Ok(direct)) = (r.eval(&at), substituted.eval(&at)) {
            let mut moved = at.clone();
            moved.set(s, inner);
            if let Ok(composed) = e.eval(&moved) {
                prop_assert!((composed - direct).abs() <= 1e-9 * 1f64.max(direct.abs()));
            }
        }
    }

    #[test]
    fn sums_cancel_exactly(e in general()) {
        prop_assert!((&e - &e).is_zero());
        prop_assert!((Expr::int(2) * &e - &e - &e).is_zero());
    }
}

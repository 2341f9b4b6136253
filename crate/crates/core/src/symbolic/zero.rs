//! Two-tier zero testing: structural normalization first, then evaluation
//! at seeded pseudo-random probe points.

use std::cell::RefCell;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::Assignment;
use super::expr::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZeroVerdict {
    ProvenZero,
    NumericallyZero,
    Unknown,
    ProvenNonzero,
}

impl ZeroVerdict {
    /// `ProvenZero` or `NumericallyZero`.
    pub fn is_zero_class(self) -> bool {
        matches!(self, ZeroVerdict::ProvenZero | ZeroVerdict::NumericallyZero)
    }

    fn rank(self) -> u8 {
        match self {
            ZeroVerdict::ProvenZero => 0,
            ZeroVerdict::NumericallyZero => 1,
            ZeroVerdict::Unknown => 2,
            ZeroVerdict::ProvenNonzero => 3,
        }
    }

    /// Weakest of the two verdicts, for "all components vanish" questions.
    pub fn and(self, other: ZeroVerdict) -> ZeroVerdict {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }

    pub fn all<I: IntoIterator<Item = ZeroVerdict>>(verdicts: I) -> ZeroVerdict {
        verdicts.into_iter().fold(ZeroVerdict::ProvenZero, ZeroVerdict::and)
    }
}

impl fmt::Display for ZeroVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroVerdict::ProvenZero => "ProvenZero",
            ZeroVerdict::NumericallyZero => "NumericallyZero",
            ZeroVerdict::Unknown => "Unknown",
            ZeroVerdict::ProvenNonzero => "ProvenNonzero",
        })
    }
}

/// Probe configuration for the numeric tier.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTest {
    pub seed: u64,
    pub points: usize,
    /// Box half-width: probes are drawn from `[-radius, radius]^dim`.
    pub radius: f64,
    pub zero_tol: f64,
    pub nonzero_tol: f64,
    /// Draw budget when probes land on singular points.
    pub max_attempts: usize,
}

impl Default for ZeroTest {
    fn default() -> Self {
        ZeroTest {
            seed: 0x6e6f_6574_6865_72,
            points: 20,
            radius: 2.0,
            zero_tol: 1e-9,
            nonzero_tol: 1e-6,
            max_attempts: 200,
        }
    }
}

thread_local! {
    static ACTIVE: RefCell<ZeroTest> = RefCell::new(ZeroTest::default());
}

impl ZeroTest {
    /// The configuration used by [`is_zero`] on this thread.
    pub fn active() -> ZeroTest {
        ACTIVE.with(|a| a.borrow().clone())
    }

    /// Runs `f` with `self` as the active configuration on this thread.
    pub fn scoped<R>(&self, f: impl FnOnce() -> R) -> R {
        let previous = ACTIVE.with(|a| std::mem::replace(&mut *a.borrow_mut(), self.clone()));
        struct Restore(Option<ZeroTest>);
        impl Drop for Restore {
            fn drop(&mut self) {
                if let Some(prev) = self.0.take() {
                    ACTIVE.with(|a| *a.borrow_mut() = prev);
                }
            }
        }
        let _restore = Restore(Some(previous));
        f()
    }

    /// Values of `e` at the probe points, skipping singular ones.
    pub fn probe_values(&self, e: &Expr) -> Vec<f64> {
        let symbols: Vec<_> = e.free_symbols().into_iter().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut values = Vec::with_capacity(self.points);
        for _ in 0..self.max_attempts {
            if values.len() == self.points {
                break;
            }
            let point: Assignment =
                symbols.iter().map(|s| (s.clone(), rng.gen_range(-self.radius..=self.radius))).collect();
            if let Ok(v) = e.eval(&point) {
                values.push(v);
            }
        }
        values
    }

    pub fn check(&self, e: &Expr) -> ZeroVerdict {
        if e.is_zero() {
            return ZeroVerdict::ProvenZero;
        }
        if e.is_constant() {
            return ZeroVerdict::ProvenNonzero;
        }
        let values = self.probe_values(e);
        if values.is_empty() {
            return ZeroVerdict::Unknown;
        }
        if values.iter().any(|v| v.abs() > self.nonzero_tol) {
            ZeroVerdict::ProvenNonzero
        } else if values.iter().all(|v| v.abs() < self.zero_tol) {
            ZeroVerdict::NumericallyZero
        } else {
            ZeroVerdict::Unknown
        }
    }
}

/// Zero test under the active [`ZeroTest`] configuration.
pub fn is_zero(e: &Expr) -> ZeroVerdict {
    ACTIVE.with(|a| a.borrow().check(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::parse::ParseContext;

    fn p(text: &str) -> Expr {
        ParseContext::new(2, &["k"]).unwrap().parse(text).unwrap()
    }

    #[test]
    fn verdict_examples() {
        assert_eq!(is_zero(&p("sin(t)^2 + cos(t)^2 - 1")), ZeroVerdict::NumericallyZero);
        assert_eq!(is_zero(&p("0*q1")), ZeroVerdict::ProvenZero);
        assert_eq!(is_zero(&p("q1_t")), ZeroVerdict::ProvenNonzero);
    }

    #[test]
    fn singular_everywhere_is_unknown() {
        assert_eq!(is_zero(&p("log(-1 - q1^2)")), ZeroVerdict::Unknown);
    }

    #[test]
    fn tiny_values_are_unknown() {
        assert_eq!(is_zero(&p("1/10000000*q1")), ZeroVerdict::Unknown);
    }

    #[test]
    fn weakest_verdict_wins() {
        use ZeroVerdict::*;
        assert_eq!(ProvenZero.and(NumericallyZero), NumericallyZero);
        assert_eq!(NumericallyZero.and(Unknown), Unknown);
        assert_eq!(Unknown.and(ProvenNonzero), ProvenNonzero);
        assert_eq!(ZeroVerdict::all([]), ProvenZero);
    }

    #[test]
    fn scoped_configuration_is_restored() {
        let strict = ZeroTest { nonzero_tol: 1e-12, ..ZeroTest::default() };
        let e = p("1/10000000*q1");
        assert_eq!(strict.scoped(|| is_zero(&e)), ZeroVerdict::ProvenNonzero);
        assert_eq!(is_zero(&e), ZeroVerdict::Unknown);
    }
}

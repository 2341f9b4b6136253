//! Immutable expression trees kept in a canonical normal form.
//!
//! Every constructor returns a normalized tree:
//! - sums are flattened, like monomials merged, numeric constant split off;
//! - products are flattened, powers of equal bases merged, a single exact
//!   rational coefficient split off, and products over sums expanded;
//! - `exp` factors inside a product merge into one `exp` of the summed
//!   arguments;
//! - a sum raised to a negative power is scaled so its leading term has
//!   coefficient one.
//!
//! Polynomials and exponential-polynomials therefore have a unique form,
//! which is what the structural zero test relies on.

use std::collections::BTreeMap;
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::symbol::Symbol;

pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Shared handle to a normalized node.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

/// Node of a normalized tree.
///
/// `Mul(c, factors)`: `c != 0`, at least one factor, and never `c == 1`
/// with a single factor. `Add(c, terms)`: at least one non-constant term,
/// never a lone term with `c == 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Num(Rational),
    Sym(Symbol),
    Func(Func, Expr),
    Pow(Expr, i64),
    Mul(Rational, Vec<Expr>),
    Add(Rational, Vec<Expr>),
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl Expr {
    pub(crate) fn raw(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(r: Rational) -> Expr {
        Expr::raw(Node::Num(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(rat(n))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::num(Rational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn sym(s: Symbol) -> Expr {
        Expr::raw(Node::Sym(s))
    }

    pub fn time() -> Expr {
        Expr::sym(Symbol::Time)
    }

    pub fn coord(i: usize) -> Expr {
        Expr::sym(Symbol::Coord(i))
    }

    pub fn velocity(i: usize) -> Expr {
        Expr::sym(Symbol::Velocity(i))
    }

    pub fn acceleration(i: usize) -> Expr {
        Expr::sym(Symbol::Acceleration(i))
    }

    pub fn momentum(i: usize) -> Expr {
        Expr::sym(Symbol::Momentum(i))
    }

    pub fn param(name: &str) -> Expr {
        Expr::sym(Symbol::param(name))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self.node() {
            Node::Num(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.node() {
            Node::Sym(s) => Some(s),
            _ => None,
        }
    }

    /// Structural zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Node::Num(r) if r.is_one())
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.node(), Node::Num(_))
    }

    /// Summands of the expression (constant first, if nonzero).
    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            Node::Add(c, ts) => {
                let mut out = Vec::with_capacity(ts.len() + 1);
                if !c.is_zero() {
                    out.push(Expr::num(c.clone()));
                }
                out.extend(ts.iter().cloned());
                out
            }
            Node::Num(r) if r.is_zero() => Vec::new(),
            _ => vec![self.clone()],
        }
    }

    /// Splits a monomial into its rational coefficient and its factors.
    pub fn split_coefficient(&self) -> (Rational, Vec<Expr>) {
        match self.node() {
            Node::Num(r) => (r.clone(), Vec::new()),
            Node::Mul(c, fs) => (c.clone(), fs.clone()),
            _ => (Rational::one(), vec![self.clone()]),
        }
    }

    /// Coefficient of the leading term; used for sign conventions.
    pub(crate) fn leading_coefficient(&self) -> Rational {
        match self.node() {
            Node::Num(r) => r.clone(),
            Node::Mul(c, _) => c.clone(),
            Node::Add(c, ts) => ts.first().map(|t| t.leading_coefficient()).unwrap_or_else(|| c.clone()),
            _ => Rational::one(),
        }
    }

    pub fn add<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut constant = Rational::zero();
        let mut terms: BTreeMap<Vec<Expr>, Rational> = BTreeMap::new();
        let accumulate = |t: &Expr, terms: &mut BTreeMap<Vec<Expr>, Rational>| {
            let (c, fs) = t.split_coefficient();
            *terms.entry(fs).or_insert_with(Rational::zero) += c;
        };
        for item in items {
            match item.node() {
                Node::Num(r) => constant += r,
                Node::Add(c, ts) => {
                    constant += c;
                    for t in ts {
                        accumulate(t, &mut terms);
                    }
                }
                _ => accumulate(&item, &mut terms),
            }
        }
        let out: Vec<Expr> = terms
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(fs, c)| make_term(c, fs))
            .collect();
        if out.is_empty() {
            Expr::num(constant)
        } else if constant.is_zero() && out.len() == 1 {
            out.into_iter().next().unwrap()
        } else {
            Expr::raw(Node::Add(constant, out))
        }
    }

    pub fn mul<I: IntoIterator<Item = Expr>>(items: I) -> Expr {
        let mut collector = Collector::new();
        for item in items {
            collector.absorb(&item);
        }
        collector.finish()
    }

    pub fn pow(&self, n: i64) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return self.clone();
        }
        match self.node() {
            Node::Num(r) => {
                if r.is_zero() {
                    if n < 0 {
                        Expr::raw(Node::Pow(self.clone(), n))
                    } else {
                        Expr::zero()
                    }
                } else {
                    Expr::num(rational_pow(r, n))
                }
            }
            Node::Pow(b, m) => b.pow(m.checked_mul(n).expect("exponent overflow")),
            Node::Mul(c, fs) => Expr::mul(
                std::iter::once(Expr::num(rational_pow(c, n))).chain(fs.iter().map(|f| f.pow(n))),
            ),
            Node::Func(Func::Exp, a) => Expr::func(Func::Exp, Expr::mul([Expr::int(n), a.clone()])),
            _ => Expr::mul([Expr::raw(Node::Pow(self.clone(), n))]),
        }
    }

    pub fn func(f: Func, arg: Expr) -> Expr {
        match f {
            Func::Exp if arg.is_zero() => Expr::one(),
            Func::Log if arg.is_one() => Expr::zero(),
            Func::Log => match arg.node() {
                Node::Func(Func::Exp, inner) => inner.clone(),
                _ => Expr::raw(Node::Func(f, arg)),
            },
            Func::Sin if arg.is_zero() => Expr::zero(),
            Func::Sin if arg.leading_coefficient().is_negative() => {
                -Expr::raw(Node::Func(Func::Sin, -arg))
            }
            Func::Cos if arg.is_zero() => Expr::one(),
            Func::Cos if arg.leading_coefficient().is_negative() => Expr::raw(Node::Func(Func::Cos, -arg)),
            Func::Sqrt => match arg.as_rational().and_then(exact_sqrt) {
                Some(r) => Expr::num(r),
                None => Expr::raw(Node::Func(f, arg)),
            },
            _ => Expr::raw(Node::Func(f, arg)),
        }
    }

    pub fn sin(&self) -> Expr {
        Expr::func(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::func(Func::Cos, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Expr::func(Func::Exp, self.clone())
    }

    pub fn log(&self) -> Expr {
        Expr::func(Func::Log, self.clone())
    }

    pub fn sqrt(&self) -> Expr {
        Expr::func(Func::Sqrt, self.clone())
    }

    /// Rebuilds the tree through the constructors. Idempotent on trees that
    /// were built by the constructors in the first place.
    pub fn normalize(&self) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Sym(_) => self.clone(),
            Node::Func(f, a) => Expr::func(*f, a.normalize()),
            Node::Pow(b, n) => b.normalize().pow(*n),
            Node::Mul(c, fs) => {
                Expr::mul(std::iter::once(Expr::num(c.clone())).chain(fs.iter().map(Expr::normalize)))
            }
            Node::Add(c, ts) => {
                Expr::add(std::iter::once(Expr::num(c.clone())).chain(ts.iter().map(Expr::normalize)))
            }
        }
    }
}

fn make_term(c: Rational, mut factors: Vec<Expr>) -> Expr {
    if c.is_zero() {
        Expr::zero()
    } else if factors.is_empty() {
        Expr::num(c)
    } else if c.is_one() && factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::raw(Node::Mul(c, factors))
    }
}

pub(crate) fn rational_pow(r: &Rational, n: i64) -> Rational {
    let e = i32::try_from(n).expect("exponent out of range");
    num_traits::Pow::pow(r, e)
}

fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// Scales a sum so that its leading term has coefficient one.
fn split_content(sum: &Expr) -> (Rational, Expr) {
    let Node::Add(c, ts) = sum.node() else {
        return (Rational::one(), sum.clone());
    };
    let lead = ts[0].leading_coefficient();
    if lead.is_one() {
        return (lead, sum.clone());
    }
    let scaled = ts
        .iter()
        .map(|t| {
            let (tc, fs) = t.split_coefficient();
            make_term(tc / &lead, fs)
        })
        .collect();
    (lead.clone(), Expr::raw(Node::Add(c / &lead, scaled)))
}

struct Collector {
    coeff: Rational,
    powers: BTreeMap<Expr, i64>,
    exp_args: Vec<Expr>,
}

impl Collector {
    fn new() -> Self {
        Collector { coeff: Rational::one(), powers: BTreeMap::new(), exp_args: Vec::new() }
    }

    fn absorb(&mut self, e: &Expr) {
        match e.node() {
            Node::Num(r) => self.coeff *= r,
            Node::Mul(c, fs) => {
                self.coeff *= c;
                for f in fs {
                    self.absorb_factor(f);
                }
            }
            _ => self.absorb_factor(e),
        }
    }

    fn absorb_factor(&mut self, f: &Expr) {
        let (base, n) = match f.node() {
            Node::Pow(b, n) => (b.clone(), *n),
            _ => (f.clone(), 1),
        };
        match base.node() {
            Node::Func(Func::Exp, a) => self.exp_args.push(Expr::mul([Expr::int(n), a.clone()])),
            Node::Add(..) => {
                let (content, unit) = split_content(&base);
                self.coeff *= rational_pow(&content, n);
                *self.powers.entry(unit).or_insert(0) += n;
            }
            _ => *self.powers.entry(base).or_insert(0) += n,
        }
    }

    fn finish(mut self) -> Expr {
        if self.coeff.is_zero() {
            return Expr::zero();
        }
        let mut pending = Vec::new();
        if !self.exp_args.is_empty() {
            let e = Expr::func(Func::Exp, Expr::add(std::mem::take(&mut self.exp_args)));
            match e.node() {
                Node::Num(r) => self.coeff *= r,
                Node::Func(Func::Exp, _) => *self.powers.entry(e).or_insert(0) += 1,
                _ => pending.push(e),
            }
        }
        let mut sums = Vec::new();
        let mut factors = Vec::new();
        for (base, n) in std::mem::take(&mut self.powers) {
            if n == 0 {
                continue;
            }
            match base.node() {
                Node::Func(Func::Sqrt, inner) if n.abs() >= 2 => {
                    pending.push(inner.pow(n.div_euclid(2)));
                    if n.rem_euclid(2) == 1 {
                        factors.push(base);
                    }
                }
                Node::Add(..) if n > 0 => sums.push((base, n)),
                Node::Num(_) if n > 0 => return Expr::zero(),
                _ if n == 1 => factors.push(base),
                _ => factors.push(Expr::raw(Node::Pow(base, n))),
            }
        }
        if pending.is_empty() && sums.is_empty() {
            return make_term(self.coeff, factors);
        }
        let mut result = Expr::mul(
            std::iter::once(Expr::num(self.coeff)).chain(factors).chain(pending),
        );
        for (sum, n) in sums {
            for _ in 0..n {
                result = distribute(&result, &sum);
            }
        }
        result
    }
}

fn distribute(x: &Expr, sum: &Expr) -> Expr {
    let xs = x.terms();
    let ss = sum.terms();
    Expr::add(xs.iter().flat_map(|a| ss.iter().map(move |b| Expr::mul([a.clone(), b.clone()]))))
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::sym(s)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::num(r)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
    };
}

binop!(Add, add, |a, b| Expr::add([a, b]));
binop!(Sub, sub, |a, b| Expr::add([a, Expr::mul([Expr::int(-1), b])]));
binop!(Mul, mul, |a, b| Expr::mul([a, b]));
binop!(Div, div, |a, b| Expr::mul([a, b.pow(-1)]));

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul([Expr::int(-1), self])
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::mul([Expr::int(-1), self.clone()])
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::add(iter)
    }
}

impl std::iter::Product for Expr {
    fn product<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::mul(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(i: usize) -> Expr {
        Expr::coord(i)
    }

    #[test]
    fn like_terms_cancel() {
        let v = Expr::velocity(1);
        assert!((v.pow(2) - &v * &v).is_zero());
    }

    #[test]
    fn products_expand_over_sums() {
        let a = (q(1) + q(2)) * (q(1) - q(2));
        assert_eq!(a, q(1).pow(2) - q(2).pow(2));
    }

    #[test]
    fn exponentials_merge() {
        let k = Expr::param("k");
        let t = Expr::time();
        let e = (&k * &t).exp() * (-(&k * &t)).exp().pow(2);
        assert_eq!(e, (-(&k * &t)).exp());
        assert_eq!((&k * &t).exp() * (-(&k * &t)).exp(), Expr::one());
    }

    #[test]
    fn reciprocal_of_scaled_sum_cancels() {
        let s = Expr::int(2) * q(1) + Expr::int(4);
        let r = &s / (q(1) + Expr::int(2));
        assert_eq!(r, Expr::int(2));
    }

    #[test]
    fn sqrt_squares_collapse() {
        let s = q(1).sqrt();
        assert_eq!(&s * &s, q(1));
        assert_eq!(Expr::frac(9, 4).sqrt(), Expr::frac(3, 2));
    }

    #[test]
    fn sign_normalization_of_trig() {
        let x = q(1);
        assert_eq!((-&x).sin(), -x.sin());
        assert_eq!((-&x).cos(), x.cos());
        assert_eq!(x.exp().log(), x);
    }

    #[test]
    fn zero_times_anything_is_zero() {
        assert!((Expr::zero() * q(1)).is_zero());
    }
}

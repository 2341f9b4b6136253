use std::collections::{BTreeMap, BTreeSet};

use super::expr::{Expr, Func, Node};
use super::symbol::Symbol;

impl Expr {
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self.node() {
            Node::Num(_) => {}
            Node::Sym(s) => {
                out.insert(s.clone());
            }
            Node::Func(_, a) | Node::Pow(a, _) => a.collect_symbols(out),
            Node::Mul(_, xs) | Node::Add(_, xs) => xs.iter().for_each(|x| x.collect_symbols(out)),
        }
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.any_symbol(&|x| x == s)
    }

    pub fn any_symbol(&self, pred: &dyn Fn(&Symbol) -> bool) -> bool {
        match self.node() {
            Node::Num(_) => false,
            Node::Sym(x) => pred(x),
            Node::Func(_, a) | Node::Pow(a, _) => a.any_symbol(pred),
            Node::Mul(_, xs) | Node::Add(_, xs) => xs.iter().any(|x| x.any_symbol(pred)),
        }
    }

    /// Exact partial derivative, all other symbols held fixed.
    pub fn diff(&self, s: &Symbol) -> Expr {
        match self.node() {
            Node::Num(_) => Expr::zero(),
            Node::Sym(x) => {
                if x == s {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(_, ts) => Expr::add(ts.iter().map(|t| t.diff(s))),
            Node::Mul(c, fs) => {
                let mut parts = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    let d = f.diff(s);
                    if d.is_zero() {
                        continue;
                    }
                    let others = fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone());
                    parts.push(Expr::mul(
                        std::iter::once(Expr::num(c.clone())).chain(others).chain(std::iter::once(d)),
                    ));
                }
                Expr::add(parts)
            }
            Node::Pow(b, n) => {
                let db = b.diff(s);
                if db.is_zero() {
                    return Expr::zero();
                }
                Expr::mul([Expr::int(*n), b.pow(n - 1), db])
            }
            Node::Func(f, a) => {
                let da = a.diff(s);
                if da.is_zero() {
                    return Expr::zero();
                }
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => -a.sin(),
                    Func::Exp => self.clone(),
                    Func::Log => a.pow(-1),
                    Func::Sqrt => Expr::frac(1, 2) * self.pow(-1),
                };
                outer * da
            }
        }
    }

    /// Simultaneous substitution followed by normalization.
    pub fn substitute(&self, map: &BTreeMap<Symbol, Expr>) -> Expr {
        if map.is_empty() {
            return self.clone();
        }
        self.subst_inner(map).unwrap_or_else(|| self.clone())
    }

    /// Substitutes a single symbol.
    pub fn subs(&self, s: &Symbol, value: &Expr) -> Expr {
        let mut map = BTreeMap::new();
        map.insert(s.clone(), value.clone());
        self.substitute(&map)
    }

    fn subst_inner(&self, map: &BTreeMap<Symbol, Expr>) -> Option<Expr> {
        match self.node() {
            Node::Num(_) => None,
            Node::Sym(s) => map.get(s).cloned(),
            Node::Func(f, a) => a.subst_inner(map).map(|a| Expr::func(*f, a)),
            Node::Pow(b, n) => b.subst_inner(map).map(|b| b.pow(*n)),
            Node::Mul(c, xs) | Node::Add(c, xs) => {
                let replaced: Vec<Option<Expr>> = xs.iter().map(|x| x.subst_inner(map)).collect();
                if replaced.iter().all(Option::is_none) {
                    return None;
                }
                let items = std::iter::once(Expr::num(c.clone())).chain(
                    replaced.into_iter().zip(xs).map(|(r, x)| r.unwrap_or_else(|| x.clone())),
                );
                Some(if matches!(self.node(), Node::Mul(..)) { Expr::mul(items) } else { Expr::add(items) })
            }
        }
    }

    /// Highest power of `s` across the summands, treating `s` inside
    /// function arguments or negative powers as non-polynomial (`None`).
    pub fn polynomial_degree(&self, s: &Symbol) -> Option<u32> {
        let mut best = 0u32;
        for t in self.terms() {
            let (_, fs) = t.split_coefficient();
            let mut deg = 0u32;
            for f in &fs {
                match f.node() {
                    Node::Sym(x) if x == s => deg += 1,
                    Node::Pow(b, n) if b.as_symbol() == Some(s) => {
                        deg += u32::try_from(*n).ok()?;
                    }
                    _ if f.contains(s) => return None,
                    _ => {}
                }
            }
            best = best.max(deg);
        }
        Some(best)
    }
}

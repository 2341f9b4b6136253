//! Real evaluation, both by tree walk and through a compiled postfix plan.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use thiserror::Error;

use super::expr::{Expr, Func, Node, Rational};
use super::symbol::Symbol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no value assigned to `{0}`")]
    Missing(Symbol),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Numeric values for symbols.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assignment(HashMap<Symbol, f64>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(HashMap::new())
    }

    pub fn with(mut self, s: Symbol, value: f64) -> Self {
        self.0.insert(s, value);
        self
    }

    pub fn set(&mut self, s: Symbol, value: f64) {
        self.0.insert(s, value);
    }

    pub fn get(&self, s: &Symbol) -> Option<f64> {
        self.0.get(s).copied()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.0.contains_key(s)
    }

    pub fn extend(&mut self, other: &Assignment) {
        self.0.extend(other.0.iter().map(|(k, v)| (k.clone(), *v)));
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, f64)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }
}

impl FromIterator<(Symbol, f64)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (Symbol, f64)>>(iter: I) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn apply(f: Func, x: f64) -> Result<f64, EvalError> {
    match f {
        Func::Sin => Ok(x.sin()),
        Func::Cos => Ok(x.cos()),
        Func::Exp => Ok(x.exp()),
        Func::Log if x <= 0.0 => Err(EvalError::Domain(format!("log of non-positive value {x}"))),
        Func::Log => Ok(x.ln()),
        Func::Sqrt if x < 0.0 => Err(EvalError::Domain(format!("sqrt of negative value {x}"))),
        Func::Sqrt => Ok(x.sqrt()),
    }
}

fn finite(x: f64) -> Result<f64, EvalError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(EvalError::Domain("non-finite intermediate value".into()))
    }
}

impl Expr {
    pub fn eval(&self, a: &Assignment) -> Result<f64, EvalError> {
        let v = match self.node() {
            Node::Num(r) => rational_to_f64(r),
            Node::Sym(s) => a.get(s).ok_or_else(|| EvalError::Missing(s.clone()))?,
            Node::Func(f, x) => apply(*f, x.eval(a)?)?,
            Node::Pow(b, n) => {
                let x = b.eval(a)?;
                if x == 0.0 && *n < 0 {
                    return Err(EvalError::Domain("division by zero".into()));
                }
                x.powi(i32::try_from(*n).unwrap_or(i32::MAX))
            }
            Node::Mul(c, fs) => {
                let mut acc = rational_to_f64(c);
                for f in fs {
                    acc *= f.eval(a)?;
                }
                acc
            }
            Node::Add(c, ts) => {
                let mut acc = rational_to_f64(c);
                for t in ts {
                    acc += t.eval(a)?;
                }
                acc
            }
        };
        finite(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Const(f64),
    Load(usize),
    Sum(usize),
    Product(usize),
    Powi(i32),
    Apply(Func),
}

/// Expression flattened into a postfix program over numbered slots.
///
/// Symbols not bound to a slot are folded in as constants at compile time.
/// Evaluation never fails; domain violations surface as NaN or infinity.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    ops: Vec<Op>,
    depth: usize,
}

impl CompiledExpr {
    pub fn compile(e: &Expr, slots: &[Symbol], constants: &Assignment) -> Result<Self, EvalError> {
        let mut ops = Vec::new();
        emit(e, slots, constants, &mut ops)?;
        let mut depth = 0usize;
        let mut max_depth = 0usize;
        for op in &ops {
            match op {
                Op::Const(_) | Op::Load(_) => depth += 1,
                Op::Sum(n) | Op::Product(n) => depth -= n - 1,
                Op::Powi(_) | Op::Apply(_) => {}
            }
            max_depth = max_depth.max(depth);
        }
        Ok(CompiledExpr { ops, depth: max_depth })
    }

    pub fn eval(&self, slots: &[f64], stack: &mut Vec<f64>) -> f64 {
        stack.clear();
        stack.reserve(self.depth);
        for op in &self.ops {
            match *op {
                Op::Const(c) => stack.push(c),
                Op::Load(i) => stack.push(slots[i]),
                Op::Sum(n) => {
                    let start = stack.len() - n;
                    let s: f64 = stack[start..].iter().sum();
                    stack.truncate(start);
                    stack.push(s);
                }
                Op::Product(n) => {
                    let start = stack.len() - n;
                    let s: f64 = stack[start..].iter().product();
                    stack.truncate(start);
                    stack.push(s);
                }
                Op::Powi(n) => {
                    let x = stack.pop().unwrap();
                    stack.push(x.powi(n));
                }
                Op::Apply(f) => {
                    let x = stack.pop().unwrap();
                    stack.push(apply(f, x).unwrap_or(f64::NAN));
                }
            }
        }
        stack.pop().unwrap_or(f64::NAN)
    }
}

fn emit(e: &Expr, slots: &[Symbol], constants: &Assignment, ops: &mut Vec<Op>) -> Result<(), EvalError> {
    match e.node() {
        Node::Num(r) => ops.push(Op::Const(rational_to_f64(r))),
        Node::Sym(s) => match slots.iter().position(|x| x == s) {
            Some(i) => ops.push(Op::Load(i)),
            None => ops.push(Op::Const(constants.get(s).ok_or_else(|| EvalError::Missing(s.clone()))?)),
        },
        Node::Func(f, a) => {
            emit(a, slots, constants, ops)?;
            ops.push(Op::Apply(*f));
        }
        Node::Pow(b, n) => {
            emit(b, slots, constants, ops)?;
            ops.push(Op::Powi(i32::try_from(*n).unwrap_or(i32::MAX)));
        }
        Node::Mul(c, xs) | Node::Add(c, xs) => {
            let is_mul = matches!(e.node(), Node::Mul(..));
            let c = rational_to_f64(c);
            let with_const = if is_mul { c != 1.0 } else { c != 0.0 };
            if with_const {
                ops.push(Op::Const(c));
            }
            for x in xs {
                emit(x, slots, constants, ops)?;
            }
            let n = xs.len() + usize::from(with_const);
            if n > 1 {
                ops.push(if is_mul { Op::Product(n) } else { Op::Sum(n) });
            }
        }
    }
    Ok(())
}

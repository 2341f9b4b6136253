use std::fmt;
use std::sync::Arc;

/// A variable of the mechanics alphabet.
///
/// Coordinate-like kinds carry a 1-based index. The derived ordering puts
/// parameters first so printed products read `k*q1_t` rather than `q1_t*k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Parameter(Arc<str>),
    Time,
    Coord(usize),
    Velocity(usize),
    Acceleration(usize),
    Momentum(usize),
    /// Formal jet coordinate `p_ti` on the first jet of momentum phase space.
    MomentumRate(usize),
    /// The extra momentum `p` conjugate to time on the homogeneous phase space.
    HomogeneousMomentum,
}

impl Symbol {
    pub fn param(name: &str) -> Symbol {
        Symbol::Parameter(Arc::from(name))
    }

    /// Coordinate index for indexed kinds.
    pub fn index(&self) -> Option<usize> {
        match self {
            Symbol::Coord(i)
            | Symbol::Velocity(i)
            | Symbol::Acceleration(i)
            | Symbol::Momentum(i)
            | Symbol::MomentumRate(i) => Some(*i),
            _ => None,
        }
    }

    pub fn is_parameter(&self) -> bool {
        matches!(self, Symbol::Parameter(_))
    }

    /// Internal symbols use names that the parser can never produce.
    pub(crate) fn internal(name: &str) -> Symbol {
        Symbol::Parameter(Arc::from(format!("#{name}")))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Parameter(name) => f.write_str(name),
            Symbol::Time => f.write_str("t"),
            Symbol::Coord(i) => write!(f, "q{i}"),
            Symbol::Velocity(i) => write!(f, "q{i}_t"),
            Symbol::Acceleration(i) => write!(f, "q{i}_tt"),
            Symbol::Momentum(i) => write!(f, "p{i}"),
            Symbol::MomentumRate(i) => write!(f, "p{i}_t"),
            Symbol::HomogeneousMomentum => f.write_str("p"),
        }
    }
}

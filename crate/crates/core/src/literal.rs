//! Boolean variables and literals.

use std::fmt;
use std::ops::Not;

/// A Boolean variable, identified by a positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// Creates a variable from its 1-based identifier.
    ///
    /// Panics if `id` is zero.
    pub fn new(id: u32) -> Self {
        assert!(id >= 1, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    /// The id as an index into per-variable tables (slot 0 is unused).
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn positive(self) -> Literal {
        Literal::new(self, true)
    }

    pub fn negative(self) -> Literal {
        Literal::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: Var,
    positive: bool,
}

impl Literal {
    pub fn new(var: Var, positive: bool) -> Self {
        Literal { var, positive }
    }

    /// Builds a literal from a DIMACS-style signed id.
    pub fn from_signed(id: i64) -> Self {
        assert!(id != 0, "literal id must be non-zero");
        Literal::new(Var::new(id.unsigned_abs() as u32), id > 0)
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    /// Dense code used to index per-literal tables: `2 * var + (negated as usize)`.
    pub fn code(self) -> usize {
        2 * self.var.index() + usize::from(!self.positive)
    }

    /// The truth value of this literal when its variable takes `value`.
    pub fn eval(self, value: bool) -> bool {
        value == self.positive
    }

    pub fn to_signed(self) -> i64 {
        let id = i64::from(self.var.id());
        if self.positive {
            id
        } else {
            -id
        }
    }
}

impl Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        Literal::new(self.var, !self.positive)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "~{}", self.var)
        }
    }
}

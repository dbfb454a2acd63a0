//! Pseudo-Boolean constraints in normalized form `Σ αᵢ·ℓᵢ ≥ δ`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::SolverError;
use crate::literal::{Literal, Var};
use crate::trail::TrailView;

/// Index of a constraint stored in the engine's database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstraintRef(pub(crate) u32);

impl ConstraintRef {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One `coefficient · literal` term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: BigInt,
    pub lit: Literal,
}

impl Term {
    pub fn new(coef: impl Into<BigInt>, lit: Literal) -> Self {
        Term {
            coef: coef.into(),
            lit,
        }
    }
}

/// A normalized pseudo-Boolean constraint.
///
/// Coefficients are positive, the degree is positive, each variable occurs at most once, and terms
/// are kept sorted by variable id so that structurally equal constraints compare equal.
/// A constraint with no terms is the contradiction `0 ≥ δ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PBConstraint {
    terms: Vec<Term>,
    degree: BigInt,
}

impl PBConstraint {
    /// Builds a constraint, sorting terms by variable.
    ///
    /// Panics when the normalized-form invariants do not hold; use [`PBConstraint::try_new`] for
    /// untrusted input.
    pub fn new(terms: Vec<Term>, degree: impl Into<BigInt>) -> Self {
        Self::try_new(terms, degree).expect("constraint must be normalized")
    }

    pub fn try_new(mut terms: Vec<Term>, degree: impl Into<BigInt>) -> Result<Self, SolverError> {
        let degree = degree.into();
        if !degree.is_positive() {
            return Err(SolverError::InvalidProblem(format!(
                "degree must be positive, got {degree}"
            )));
        }
        terms.sort_by_key(|t| t.lit.var());
        for w in terms.windows(2) {
            if w[0].lit.var() == w[1].lit.var() {
                return Err(SolverError::InvalidProblem(format!(
                    "variable {} occurs twice",
                    w[0].lit.var()
                )));
            }
        }
        if let Some(t) = terms.iter().find(|t| !t.coef.is_positive()) {
            return Err(SolverError::InvalidProblem(format!(
                "coefficient of {} must be positive, got {}",
                t.lit, t.coef
            )));
        }
        Ok(PBConstraint { terms, degree })
    }

    /// Shorthand for small constraints: `from_ints(&[(5, a), (5, b)], 6)`.
    pub fn from_ints(terms: &[(i64, Literal)], degree: i64) -> Self {
        Self::new(
            terms.iter().map(|&(c, l)| Term::new(c, l)).collect(),
            degree,
        )
    }

    /// The clause `ℓ₁ + … + ℓₖ ≥ 1`.
    pub fn clause(lits: &[Literal]) -> Self {
        Self::new(lits.iter().map(|&l| Term::new(1, l)).collect(), 1)
    }

    pub(crate) fn from_sorted_unchecked(terms: Vec<Term>, degree: BigInt) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].lit.var() < w[1].lit.var()));
        debug_assert!(terms.iter().all(|t| t.coef.is_positive()));
        debug_assert!(degree.is_positive());
        PBConstraint { terms, degree }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> &BigInt {
        &self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.terms.iter().map(|t| t.lit)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.iter().map(|t| t.lit.var())
    }

    /// The term mentioning `var`, in either polarity.
    pub fn term_of(&self, var: Var) -> Option<&Term> {
        self.terms
            .binary_search_by_key(&var, |t| t.lit.var())
            .ok()
            .map(|i| &self.terms[i])
    }

    /// Coefficient of exactly `lit` (not its negation).
    pub fn coefficient(&self, lit: Literal) -> Option<&BigInt> {
        self.term_of(lit.var())
            .filter(|t| t.lit == lit)
            .map(|t| &t.coef)
    }

    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.iter().map(|t| &t.coef).sum()
    }

    pub fn max_coefficient(&self) -> Option<&BigInt> {
        self.terms.iter().map(|t| &t.coef).max()
    }

    /// All coefficients and the degree equal one.
    pub fn is_clause(&self) -> bool {
        self.degree.is_one() && self.terms.iter().all(|t| t.coef.is_one())
    }

    pub fn is_cardinality(&self) -> bool {
        self.terms.iter().all(|t| t.coef.is_one())
    }

    /// No assignment satisfies the constraint.
    pub fn is_contradiction(&self) -> bool {
        self.coefficient_sum() < self.degree
    }

    pub fn is_saturated(&self) -> bool {
        self.terms.iter().all(|t| t.coef <= self.degree)
    }

    /// Evaluates the constraint under a total assignment given as a predicate on variables.
    pub fn is_satisfied_by(&self, value: impl Fn(Var) -> bool) -> bool {
        let lhs: BigInt = self
            .terms
            .iter()
            .filter(|t| t.lit.eval(value(t.lit.var())))
            .map(|t| &t.coef)
            .sum();
        lhs >= self.degree
    }

    /// Sum of the coefficients of non-falsified literals, minus the degree.
    ///
    /// Negative slack means the constraint is conflicting; an unassigned literal whose
    /// coefficient exceeds a non-negative slack is propagated.
    pub fn slack(&self, trail: &impl TrailView) -> BigInt {
        let mut s = -self.degree.clone();
        for t in &self.terms {
            if !trail.is_false(t.lit) {
                s += &t.coef;
            }
        }
        s
    }

    pub fn is_conflicting(&self, trail: &impl TrailView) -> bool {
        self.slack(trail).is_negative()
    }

    /// Unassigned literals forced true under `trail`; empty when the constraint is conflicting.
    pub fn propagated_literals(&self, trail: &impl TrailView) -> Vec<Literal> {
        let slack = self.slack(trail);
        if slack.is_negative() {
            return Vec::new();
        }
        self.terms
            .iter()
            .filter(|t| !trail.is_assigned(t.lit.var()) && t.coef > slack)
            .map(|t| t.lit)
            .collect()
    }
}

impl fmt::Display for PBConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 >= {}", self.degree);
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.coef.is_one() {
                write!(f, "{}", t.lit)?;
            } else {
                write!(f, "{} {}", t.coef, t.lit)?;
            }
        }
        write!(f, " >= {}", self.degree)
    }
}

/// Result of a derivation rule: either a proper constraint or a tautology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derived {
    Constraint(PBConstraint),
    TriviallyTrue,
}

impl Derived {
    pub fn constraint(&self) -> Option<&PBConstraint> {
        match self {
            Derived::Constraint(c) => Some(c),
            Derived::TriviallyTrue => None,
        }
    }

    pub fn into_constraint(self) -> Option<PBConstraint> {
        match self {
            Derived::Constraint(c) => Some(c),
            Derived::TriviallyTrue => None,
        }
    }

    pub fn is_trivially_true(&self) -> bool {
        matches!(self, Derived::TriviallyTrue)
    }

    /// Wraps `terms ≥ degree`, mapping a non-positive degree to the tautology marker.
    pub(crate) fn from_parts(terms: Vec<Term>, degree: BigInt) -> Self {
        if degree.is_positive() {
            Derived::Constraint(PBConstraint::from_sorted_unchecked(terms, degree))
        } else {
            Derived::TriviallyTrue
        }
    }
}

impl From<PBConstraint> for Derived {
    fn from(c: PBConstraint) -> Self {
        Derived::Constraint(c)
    }
}

/// Comparison operator of a constraint as written in the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Less,
    LessEq,
    Eq,
    GreaterEq,
    Greater,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::LessEq => "<=",
            Relation::Eq => "=",
            Relation::GreaterEq => ">=",
            Relation::Greater => ">",
        }
    }

    pub fn holds(self, lhs: &BigInt, rhs: &BigInt) -> bool {
        match self {
            Relation::Less => lhs < rhs,
            Relation::LessEq => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::GreaterEq => lhs >= rhs,
            Relation::Greater => lhs > rhs,
        }
    }
}

/// A linear constraint as parsed: signed coefficients, repeated variables and any relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawConstraint {
    pub terms: Vec<(BigInt, Literal)>,
    pub relation: Relation,
    pub bound: BigInt,
}

impl RawConstraint {
    pub fn new(terms: Vec<(BigInt, Literal)>, relation: Relation, bound: impl Into<BigInt>) -> Self {
        RawConstraint {
            terms,
            relation,
            bound: bound.into(),
        }
    }

    pub fn from_ints(terms: &[(i64, Literal)], relation: Relation, bound: i64) -> Self {
        Self::new(
            terms.iter().map(|&(c, l)| (BigInt::from(c), l)).collect(),
            relation,
            bound,
        )
    }

    pub fn lhs_value(&self, value: impl Fn(Var) -> bool) -> BigInt {
        self.terms
            .iter()
            .filter(|(_, l)| l.eval(value(l.var())))
            .map(|(c, _)| c)
            .sum()
    }

    pub fn is_satisfied_by(&self, value: impl Fn(Var) -> bool) -> bool {
        self.relation.holds(&self.lhs_value(value), &self.bound)
    }

    pub fn max_var(&self) -> u32 {
        self.terms.iter().map(|(_, l)| l.var().id()).max().unwrap_or(0)
    }
}

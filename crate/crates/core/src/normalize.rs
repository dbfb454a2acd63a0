//! Rewriting of arbitrary linear (in)equations into normalized constraints.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::constraint::{PBConstraint, RawConstraint, Relation, Term};
use crate::literal::{Literal, Var};

/// Outcome of normalizing one input constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized {
    /// Equivalent conjunction; empty when the input holds under every assignment.
    Constraints(Vec<PBConstraint>),
    /// The input holds under no assignment.
    Contradiction,
}

impl Normalized {
    pub fn is_contradiction(&self) -> bool {
        matches!(self, Normalized::Contradiction)
    }
}

/// One `Σ aᵢ·ℓᵢ ≥ b` half, with signed coefficients.
enum Half {
    Constraint(PBConstraint),
    Trivial,
    Contradiction,
}

fn normalize_geq<'a>(terms: impl Iterator<Item = (BigInt, Literal)> + 'a, bound: BigInt) -> Half {
    // Collect coefficients on positive literals: a·¬x = a − a·x.
    let mut per_var: BTreeMap<Var, BigInt> = BTreeMap::new();
    let mut bound = bound;
    for (coef, lit) in terms {
        let slot = per_var.entry(lit.var()).or_insert_with(BigInt::zero);
        if lit.is_positive() {
            *slot += coef;
        } else {
            bound -= &coef;
            *slot -= coef;
        }
    }
    let mut out = Vec::with_capacity(per_var.len());
    for (var, coef) in per_var {
        if coef.is_zero() {
            continue;
        }
        if coef.is_negative() {
            // c·x with c < 0 equals |c|·¬x − |c|.
            let abs = -coef;
            bound += &abs;
            out.push(Term::new(abs, var.negative()));
        } else {
            out.push(Term::new(coef, var.positive()));
        }
    }
    if !bound.is_positive() {
        return Half::Trivial;
    }
    let sum: BigInt = out.iter().map(|t| &t.coef).sum();
    if sum < bound {
        return Half::Contradiction;
    }
    Half::Constraint(PBConstraint::from_sorted_unchecked(out, bound))
}

/// Normalizes `raw` into an equivalent conjunction of constraints `Σ αᵢ·ℓᵢ ≥ δ`.
pub fn normalize(raw: &RawConstraint) -> Normalized {
    let pos = || raw.terms.iter().cloned();
    let neg = || raw.terms.iter().map(|(c, l)| (-c, *l));
    let halves = match raw.relation {
        Relation::GreaterEq => vec![normalize_geq(pos(), raw.bound.clone())],
        Relation::Greater => vec![normalize_geq(pos(), &raw.bound + 1)],
        Relation::LessEq => vec![normalize_geq(neg(), -&raw.bound)],
        Relation::Less => vec![normalize_geq(neg(), 1 - &raw.bound)],
        Relation::Eq => vec![
            normalize_geq(pos(), raw.bound.clone()),
            normalize_geq(neg(), -&raw.bound),
        ],
    };
    let mut out = Vec::with_capacity(2);
    for h in halves {
        match h {
            Half::Constraint(c) => out.push(c),
            Half::Trivial => {}
            Half::Contradiction => return Normalized::Contradiction,
        }
    }
    Normalized::Constraints(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(id: i64) -> Literal {
        Literal::from_signed(id)
    }

    fn raw(terms: &[(i64, i64)], rel: Relation, bound: i64) -> RawConstraint {
        let t: Vec<_> = terms.iter().map(|&(c, id)| (c, l(id))).collect();
        RawConstraint::from_ints(&t, rel, bound)
    }

    fn pb(terms: &[(i64, i64)], degree: i64) -> PBConstraint {
        let t: Vec<_> = terms.iter().map(|&(c, id)| (c, l(id))).collect();
        PBConstraint::from_ints(&t, degree)
    }

    #[test]
    fn negative_coefficient_becomes_negated_literal() {
        assert_eq!(
            normalize(&raw(&[(3, 1), (-2, 2)], Relation::GreaterEq, 1)),
            Normalized::Constraints(vec![pb(&[(3, 1), (2, -2)], 3)])
        );
    }

    #[test]
    fn equality_splits_in_two() {
        assert_eq!(
            normalize(&raw(&[(1, 1), (1, 2)], Relation::Eq, 1)),
            Normalized::Constraints(vec![pb(&[(1, 1), (1, 2)], 1), pb(&[(1, -1), (1, -2)], 1)])
        );
    }

    #[test]
    fn at_most_flips_signs() {
        assert_eq!(
            normalize(&raw(&[(2, 1), (1, 2)], Relation::LessEq, 2)),
            Normalized::Constraints(vec![pb(&[(2, -1), (1, -2)], 1)])
        );
    }

    #[test]
    fn strict_relations_shift_the_bound() {
        assert_eq!(
            normalize(&raw(&[(1, 1), (1, 2)], Relation::Greater, 0)),
            Normalized::Constraints(vec![pb(&[(1, 1), (1, 2)], 1)])
        );
        assert_eq!(
            normalize(&raw(&[(1, 1), (1, 2)], Relation::Less, 1)),
            Normalized::Constraints(vec![pb(&[(1, -1), (1, -2)], 2)])
        );
    }

    #[test]
    fn duplicates_are_merged_before_sign_rewriting() {
        // x1 + 2 ~x1 + x2 >= 2  ==  2 - x1 + x2 >= 2  ==  ~x1 + x2 >= 1
        assert_eq!(
            normalize(&raw(&[(1, 1), (2, -1), (1, 2)], Relation::GreaterEq, 2)),
            Normalized::Constraints(vec![pb(&[(1, -1), (1, 2)], 1)])
        );
        // x1 - x1 >= 0 is trivially true
        assert_eq!(
            normalize(&raw(&[(1, 1), (-1, 1)], Relation::GreaterEq, 0)),
            Normalized::Constraints(vec![])
        );
    }

    #[test]
    fn trivial_and_contradictory_inputs() {
        assert_eq!(
            normalize(&raw(&[(1, 1)], Relation::GreaterEq, -3)),
            Normalized::Constraints(vec![])
        );
        assert_eq!(
            normalize(&raw(&[(1, 1), (1, 2)], Relation::GreaterEq, 3)),
            Normalized::Contradiction
        );
        assert_eq!(normalize(&raw(&[], Relation::Eq, 1)), Normalized::Contradiction);
    }
}

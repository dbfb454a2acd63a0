//! Cutting-planes derivation rules on normalized constraints.
//!
//! Every rule returns a constraint implied by its inputs. Rules that can drop the degree to zero
//! or below return [`Derived::TriviallyTrue`] instead.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::constraint::{Derived, PBConstraint, Term};
use crate::error::SolverError;
use crate::literal::{Literal, Var};

/// Caps every coefficient at the degree.
pub fn saturate(c: &PBConstraint) -> PBConstraint {
    if c.is_saturated() {
        return c.clone();
    }
    let degree = c.degree();
    let terms = c
        .terms()
        .iter()
        .map(|t| Term {
            coef: if &t.coef > degree {
                degree.clone()
            } else {
                t.coef.clone()
            },
            lit: t.lit,
        })
        .collect();
    PBConstraint::from_sorted_unchecked(terms, degree.clone())
}

fn saturated(terms: Vec<Term>, degree: BigInt) -> Derived {
    match Derived::from_parts(terms, degree) {
        Derived::Constraint(c) => Derived::Constraint(saturate(&c)),
        t => t,
    }
}

/// Removes the term of `lit`, lowering the degree by its coefficient.
pub fn weaken(c: &PBConstraint, lit: Literal) -> Result<Derived, SolverError> {
    let alpha = c.coefficient(lit).ok_or(SolverError::LiteralAbsent(lit))?;
    let degree = c.degree() - alpha;
    let terms = c.terms().iter().filter(|t| t.lit != lit).cloned().collect();
    Ok(saturated(terms, degree))
}

/// Lowers the coefficient of `lit` and the degree by `amount`, with `1 ≤ amount < α`.
pub fn partial_weaken(
    c: &PBConstraint,
    lit: Literal,
    amount: &BigInt,
) -> Result<Derived, SolverError> {
    let alpha = c.coefficient(lit).ok_or(SolverError::LiteralAbsent(lit))?;
    if !amount.is_positive() || amount >= alpha {
        return Err(SolverError::AmountOutOfRange {
            amount: amount.to_string(),
            max: alpha.to_string(),
        });
    }
    let degree = c.degree() - amount;
    let terms = c
        .terms()
        .iter()
        .map(|t| {
            if t.lit == lit {
                Term {
                    coef: &t.coef - amount,
                    lit,
                }
            } else {
                t.clone()
            }
        })
        .collect();
    Ok(saturated(terms, degree))
}

/// Divides every coefficient and the degree by `d`, rounding up.
pub fn divide_ceil(c: &PBConstraint, d: &BigInt) -> Result<PBConstraint, SolverError> {
    if !d.is_positive() {
        return Err(SolverError::DivisionByZero);
    }
    if d.is_one() {
        return Ok(c.clone());
    }
    let terms = c
        .terms()
        .iter()
        .map(|t| Term {
            coef: Integer::div_ceil(&t.coef, d),
            lit: t.lit,
        })
        .collect();
    let degree = Integer::div_ceil(c.degree(), d);
    Ok(saturate(&PBConstraint::from_sorted_unchecked(terms, degree)))
}

/// Multipliers `(λ, μ)` that make `var` cancel in `λ·c1 + μ·c2`.
pub fn cancel_multipliers(
    c1: &PBConstraint,
    c2: &PBConstraint,
    var: Var,
) -> Result<(BigInt, BigInt), SolverError> {
    let (t1, t2) = clashing_terms(c1, c2, var)?;
    let l = t1.coef.lcm(&t2.coef);
    Ok((&l / &t1.coef, &l / &t2.coef))
}

fn clashing_terms<'a>(
    c1: &'a PBConstraint,
    c2: &'a PBConstraint,
    var: Var,
) -> Result<(&'a Term, &'a Term), SolverError> {
    match (c1.term_of(var), c2.term_of(var)) {
        (Some(t1), Some(t2)) if t1.lit == !t2.lit => Ok((t1, t2)),
        _ => Err(SolverError::NoClash(var.id())),
    }
}

/// Generalized resolution: `saturate(λ·c1 + μ·c2)` with `λ, μ` from the lcm of the coefficients
/// of `var`. Any other pair of opposite literals is merged as well.
pub fn cancel(c1: &PBConstraint, c2: &PBConstraint, var: Var) -> Result<Derived, SolverError> {
    let (lambda, mu) = cancel_multipliers(c1, c2, var)?;
    Ok(linear_combination(c1, &lambda, c2, &mu))
}

/// `saturate(λ·c1 + μ·c2)`, cancelling opposite literals pairwise.
pub fn linear_combination(c1: &PBConstraint, lambda: &BigInt, c2: &PBConstraint, mu: &BigInt) -> Derived {
    let mut degree = c1.degree() * lambda + c2.degree() * mu;
    let mut terms = Vec::with_capacity(c1.len() + c2.len());
    let (mut i, mut j) = (0, 0);
    let (a, b) = (c1.terms(), c2.terms());
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.lit.var().cmp(&y.lit.var()),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, _) => std::cmp::Ordering::Greater,
        };
        match ord {
            std::cmp::Ordering::Less => {
                terms.push(Term {
                    coef: &a[i].coef * lambda,
                    lit: a[i].lit,
                });
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                terms.push(Term {
                    coef: &b[j].coef * mu,
                    lit: b[j].lit,
                });
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let x = &a[i].coef * lambda;
                let y = &b[j].coef * mu;
                if a[i].lit == b[j].lit {
                    terms.push(Term {
                        coef: x + y,
                        lit: a[i].lit,
                    });
                } else {
                    // x·ℓ + y·¬ℓ = min(x, y) + |x − y|·(dominant literal)
                    let (small, diff, lit) = if x >= y {
                        (y.clone(), x - y, a[i].lit)
                    } else {
                        (x.clone(), y - x, b[j].lit)
                    };
                    degree -= small;
                    if !diff.is_zero() {
                        terms.push(Term { coef: diff, lit });
                    }
                }
                i += 1;
                j += 1;
            }
        }
    }
    saturated(terms, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn l(id: i64) -> Literal {
        Literal::from_signed(id)
    }

    fn pb(terms: &[(i64, i64)], degree: i64) -> PBConstraint {
        let t: Vec<_> = terms.iter().map(|&(c, id)| (c, l(id))).collect();
        PBConstraint::from_ints(&t, degree)
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn implied(inputs: &[&PBConstraint], out: &Derived) {
        let f: Vec<PBConstraint> = inputs.iter().map(|c| (*c).clone()).collect();
        assert!(oracle::implies(&f, out).unwrap(), "{out:?} not implied");
    }

    // a..g = x1..x7
    fn running() -> PBConstraint {
        pb(&[(5, 1), (5, 2), (1, 3), (1, 4), (1, 5), (1, 6)], 6)
    }

    #[test]
    fn saturate_examples() {
        assert_eq!(saturate(&pb(&[(6, 1), (2, 2)], 3)), pb(&[(3, 1), (2, 2)], 3));
        assert_eq!(saturate(&running()), running());
        assert_eq!(saturate(&pb(&[(1, 1), (1, 2)], 1)), pb(&[(1, 1), (1, 2)], 1));
    }

    #[test]
    fn saturate_is_idempotent() {
        let c = pb(&[(9, 1), (4, 2), (2, 3)], 4);
        let once = saturate(&c);
        assert_eq!(saturate(&once), once);
    }

    #[test]
    fn weaken_examples() {
        let out = weaken(&running(), l(3)).unwrap();
        assert_eq!(out, pb(&[(5, 1), (5, 2), (1, 4), (1, 5), (1, 6)], 5).into());
        implied(&[&running()], &out);

        assert_eq!(weaken(&pb(&[(1, 1), (1, 2)], 1), l(1)).unwrap(), Derived::TriviallyTrue);

        let c = pb(&[(6, 1), (2, 2)], 3);
        let out = weaken(&c, l(2)).unwrap();
        assert_eq!(out, pb(&[(1, 1)], 1).into());
        implied(&[&c], &out);
    }

    #[test]
    fn weaken_absent_literal_is_an_error() {
        assert_eq!(
            weaken(&running(), l(-1)),
            Err(SolverError::LiteralAbsent(l(-1)))
        );
        assert!(weaken(&running(), l(7)).is_err());
    }

    #[test]
    fn partial_weaken_examples() {
        assert!(partial_weaken(&pb(&[(5, 1), (5, 2), (1, 5)], 3), l(7), &big(1)).is_err());

        let c = pb(&[(5, 1), (3, 2)], 4);
        let out = partial_weaken(&c, l(2), &big(2)).unwrap();
        assert_eq!(out, pb(&[(2, 1), (1, 2)], 2).into());
        implied(&[&c], &out);

        let c = pb(&[(3, 1), (2, 2)], 3);
        let out = partial_weaken(&c, l(1), &big(1)).unwrap();
        assert_eq!(out, pb(&[(2, 1), (2, 2)], 2).into());
        implied(&[&c], &out);
    }

    #[test]
    fn partial_weaken_rejects_amounts_out_of_range() {
        let c = pb(&[(3, 1), (2, 2)], 3);
        assert!(partial_weaken(&c, l(1), &big(0)).is_err());
        assert!(partial_weaken(&c, l(1), &big(3)).is_err());
    }

    #[test]
    fn divide_ceil_examples() {
        let c = pb(&[(5, 1), (5, 2), (1, 5)], 3);
        let out = divide_ceil(&c, &big(5)).unwrap();
        assert_eq!(out, pb(&[(1, 1), (1, 2), (1, 5)], 1));
        implied(&[&c], &out.clone().into());

        assert_eq!(
            divide_ceil(&pb(&[(2, 1), (2, 2)], 2), &big(2)).unwrap(),
            pb(&[(1, 1), (1, 2)], 1)
        );
        assert_eq!(divide_ceil(&running(), &big(1)).unwrap(), running());
        assert_eq!(divide_ceil(&running(), &big(0)), Err(SolverError::DivisionByZero));
    }

    #[test]
    fn cancel_examples() {
        let a = Var::new(1);
        assert_eq!(
            cancel(&pb(&[(1, 1), (1, 2)], 1), &pb(&[(1, -1), (1, 3)], 1), a).unwrap(),
            pb(&[(1, 2), (1, 3)], 1).into()
        );

        let c1 = pb(&[(2, 1), (1, 2)], 2);
        let c2 = pb(&[(1, -1), (1, 3)], 1);
        assert_eq!(cancel_multipliers(&c1, &c2, a).unwrap(), (big(1), big(2)));
        let out = cancel(&c1, &c2, a).unwrap();
        assert_eq!(out, pb(&[(1, 2), (2, 3)], 2).into());
        implied(&[&c1, &c2], &out);

        let c2 = pb(&[(5, -1), (1, 7)], 5);
        let out = cancel(&running(), &c2, a).unwrap();
        assert_eq!(out, pb(&[(5, 2), (1, 3), (1, 4), (1, 5), (1, 6), (1, 7)], 6).into());
        implied(&[&running(), &c2], &out);
    }

    #[test]
    fn cancel_requires_opposite_polarities() {
        let a = Var::new(1);
        assert_eq!(
            cancel(&pb(&[(1, 1)], 1), &pb(&[(1, 1), (1, 2)], 1), a),
            Err(SolverError::NoClash(1))
        );
        assert!(cancel(&pb(&[(1, 2)], 1), &pb(&[(1, -1)], 1), a).is_err());
    }

    #[test]
    fn cancel_of_opposite_units_is_the_empty_contradiction() {
        let out = cancel(&pb(&[(1, 1)], 1), &pb(&[(1, -1)], 1), Var::new(1)).unwrap();
        let c = out.constraint().unwrap();
        assert!(c.is_empty());
        assert!(c.is_contradiction());
    }

    #[test]
    fn cancel_merges_other_opposite_literals() {
        // a + b + c ≥ 2 and ¬a + ¬b + d ≥ 2: b cancels too, degree 4 − 1 − 1 = 2
        let out = cancel(&pb(&[(1, 1), (1, 2), (1, 3)], 2), &pb(&[(1, -1), (1, -2), (1, 4)], 2), Var::new(1))
            .unwrap();
        assert_eq!(out, pb(&[(1, 3), (1, 4)], 2).into());
    }
}

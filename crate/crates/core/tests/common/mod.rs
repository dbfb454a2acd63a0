#![allow(dead_code)]

use num_bigint::BigInt;
use pbcdcl::{Literal, PBConstraint, Problem, RawConstraint, Relation, Term, Var};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_literal(rng: &mut impl Rng, n: usize) -> Literal {
    Literal::new(Var::new(rng.gen_range(1..=n as u32)), rng.gen_bool(0.5))
}

/// A raw constraint over distinct variables with coefficients in [-10, 10] \ {0}.
pub fn random_raw(rng: &mut impl Rng, n: usize) -> RawConstraint {
    let len = rng.gen_range(2..=n.min(7));
    let mut vars: Vec<u32> = (1..=n as u32).collect();
    let mut terms = Vec::new();
    for _ in 0..len {
        let v = vars.swap_remove(rng.gen_range(0..vars.len()));
        let mag: i64 = rng.gen_range(1..=10);
        let coef = if rng.gen_bool(0.25) { -mag } else { mag };
        terms.push((BigInt::from(coef), Literal::new(Var::new(v), rng.gen_bool(0.7))));
    }
    let pos: i64 = terms.iter().map(|(c, _)| i64::try_from(c.clone()).unwrap().max(0)).sum();
    let relation = match rng.gen_range(0..20) {
        0 => Relation::Eq,
        1..=3 => Relation::LessEq,
        4 => Relation::Greater,
        5 => Relation::Less,
        _ => Relation::GreaterEq,
    };
    // Bounds loosely around the middle of the positive range keep a mix of SAT and UNSAT.
    let bound = match relation {
        Relation::LessEq | Relation::Less => rng.gen_range(pos / 3..=pos.max(1)),
        Relation::Eq => rng.gen_range(0..=pos),
        _ => rng.gen_range(1..=(pos / 3).max(1)),
    };
    RawConstraint::new(terms, relation, bound)
}

/// A random instance with at most 12 variables and 30 constraints.
pub fn random_problem(rng: &mut impl Rng) -> Problem {
    let n = rng.gen_range(3..=12);
    let m = rng.gen_range(1..=(3 * n).min(30));
    let raw: Vec<RawConstraint> = (0..m).map(|_| random_raw(rng, n)).collect();
    Problem::from_raw(n, &raw)
}

pub fn random_objective(rng: &mut impl Rng, n: usize) -> Vec<(BigInt, Literal)> {
    (0..rng.gen_range(1..=n))
        .map(|_| (BigInt::from(rng.gen_range(-10i64..=10)), random_literal(rng, n)))
        .collect()
}

pub fn random_optimization(rng: &mut impl Rng) -> Problem {
    let n = rng.gen_range(3..=12);
    let m = rng.gen_range(1..=20);
    let raw: Vec<RawConstraint> = (0..m).map(|_| random_raw(rng, n)).collect();
    let obj = random_objective(rng, n);
    Problem::from_raw(n, &raw).with_objective(obj)
}

/// A normalized constraint with distinct variables from `1..=n`.
pub fn random_pb(rng: &mut impl Rng, n: usize, max_coef: i64) -> PBConstraint {
    let len = rng.gen_range(1..=n);
    let mut vars: Vec<u32> = (1..=n as u32).collect();
    let mut terms = Vec::new();
    for _ in 0..len {
        let v = vars.swap_remove(rng.gen_range(0..vars.len()));
        terms.push(Term::new(rng.gen_range(1..=max_coef), Literal::new(Var::new(v), rng.gen_bool(0.5))));
    }
    let sum: i64 = terms.iter().map(|t| i64::try_from(t.coef.clone()).unwrap()).sum();
    let degree = rng.gen_range(1..=sum);
    PBConstraint::new(terms, degree)
}

/// Random 3-CNF with `n` variables and about 4.26·n clauses.
pub fn random_3cnf(rng: &mut impl Rng, n: usize) -> Problem {
    let m = (n as f64 * 4.26).round() as usize;
    let clauses = (0..m)
        .map(|_| {
            let mut vars: Vec<u32> = (1..=n as u32).collect();
            let lits: Vec<Literal> = (0..3)
                .map(|_| {
                    let v = vars.swap_remove(rng.gen_range(0..vars.len()));
                    Literal::new(Var::new(v), rng.gen_bool(0.5))
                })
                .collect();
            PBConstraint::clause(&lits)
        })
        .collect();
    Problem::from_constraints(n, clauses)
}

/// Positive-coefficient `>=` constraints with bounds between a quarter and half of the
/// coefficient sum, about 1.6 per variable. Needs more search than `random_problem`.
pub fn random_tight(rng: &mut impl Rng) -> Problem {
    let n = rng.gen_range(8..=12);
    let m = (1.6 * n as f64) as usize;
    let raw: Vec<RawConstraint> = (0..m)
        .map(|_| {
            let mut vars: Vec<u32> = (1..=n as u32).collect();
            let terms: Vec<(BigInt, Literal)> = (0..rng.gen_range(3..=5))
                .map(|_| {
                    let v = vars.swap_remove(rng.gen_range(0..vars.len()));
                    (BigInt::from(rng.gen_range(1..=10)), Literal::new(Var::new(v), rng.gen_bool(0.5)))
                })
                .collect();
            let sum: i64 = terms.iter().map(|(c, _)| i64::try_from(c.clone()).unwrap()).sum();
            RawConstraint::new(terms, Relation::GreaterEq, rng.gen_range(sum / 4..=sum / 2).max(1))
        })
        .collect();
    Problem::from_raw(n, &raw)
}

//! Brute-force reference answers by exhaustive enumeration.
//!
//! Nothing here is used by the solver itself. Assignments are enumerated lexicographically over
//! variable ids (`x1` most significant, all-false first), so witnesses are deterministic.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::constraint::{Derived, PBConstraint};
use crate::error::SolverError;
use crate::literal::{Literal, Var};
use crate::problem::Problem;
use crate::trail::{Assignment, TrailView};

/// Largest number of variables the oracle accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimit {
    pub max_variables: usize,
}

impl Default for OracleLimit {
    fn default() -> Self {
        OracleLimit { max_variables: 20 }
    }
}

impl OracleLimit {
    fn check(self, vars: usize) -> Result<(), SolverError> {
        if vars > self.max_variables {
            Err(SolverError::OracleLimit {
                vars,
                limit: self.max_variables,
            })
        } else {
            Ok(())
        }
    }
}

/// A constraint with machine-word coefficients when they fit.
enum Compiled {
    Small {
        terms: Vec<(i128, u32, bool)>,
        degree: i128,
    },
    Big(PBConstraint),
}

impl Compiled {
    fn new(c: &PBConstraint) -> Self {
        let small: Option<Vec<_>> = c
            .terms()
            .iter()
            .map(|t| {
                t.coef
                    .to_i64()
                    .map(|v| (i128::from(v), t.lit.var().id() - 1, t.lit.is_positive()))
            })
            .collect();
        match (small, c.degree().to_i64()) {
            (Some(terms), Some(d)) if c.len() < 1 << 20 => Compiled::Small {
                terms,
                degree: i128::from(d),
            },
            _ => Compiled::Big(c.clone()),
        }
    }

    fn holds(&self, mask: u64) -> bool {
        match self {
            Compiled::Small { terms, degree } => {
                let mut sum = 0i128;
                for &(c, bit, pos) in terms {
                    if ((mask >> bit) & 1 == 1) == pos {
                        sum += c;
                    }
                }
                sum >= *degree
            }
            Compiled::Big(c) => c.is_satisfied_by(|v| (mask >> (v.id() - 1)) & 1 == 1),
        }
    }
}

fn max_var<'a>(cs: impl IntoIterator<Item = &'a PBConstraint>) -> usize {
    cs.into_iter()
        .flat_map(|c| c.vars())
        .map(|v| v.index())
        .max()
        .unwrap_or(0)
}

/// Converts an enumeration index into a variable bitmask (bit `i - 1` holds `x_i`).
fn mask_of(index: u64, n: usize) -> u64 {
    // Lexicographic: x1 is the most significant position of `index`.
    let mut mask = 0u64;
    for i in 0..n {
        if (index >> (n - 1 - i)) & 1 == 1 {
            mask |= 1 << i;
        }
    }
    mask
}

/// Every satisfying assignment of a formula over variables `1..=num_vars`.
#[derive(Debug, Clone)]
pub struct ModelSet {
    num_vars: usize,
    masks: Vec<u64>,
}

impl ModelSet {
    pub fn enumerate(num_vars: usize, formula: &[PBConstraint]) -> Result<Self, SolverError> {
        Self::enumerate_with(num_vars, formula, OracleLimit::default())
    }

    pub fn enumerate_with(
        num_vars: usize,
        formula: &[PBConstraint],
        limit: OracleLimit,
    ) -> Result<Self, SolverError> {
        let n = num_vars.max(max_var(formula));
        limit.check(n)?;
        let compiled: Vec<Compiled> = formula.iter().map(Compiled::new).collect();
        let masks = (0..1u64 << n)
            .map(|i| mask_of(i, n))
            .filter(|&m| compiled.iter().all(|c| c.holds(m)))
            .collect();
        Ok(ModelSet { num_vars: n, masks })
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    /// Models as per-variable value vectors (index 0 unused).
    pub fn models(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        self.masks.iter().map(move |&m| {
            let mut v = vec![false; self.num_vars + 1];
            for (i, slot) in v.iter_mut().enumerate().skip(1) {
                *slot = (m >> (i - 1)) & 1 == 1;
            }
            v
        })
    }

    /// True iff every model satisfies `c`. Variables of `c` beyond the enumerated range are
    /// unconstrained, so the check enumerates them too.
    pub fn implies(&self, c: &Derived) -> bool {
        let Some(c) = c.constraint() else {
            return true;
        };
        let extra = max_var([c]).saturating_sub(self.num_vars);
        let compiled = Compiled::new(c);
        self.masks.iter().all(|&m| {
            (0..1u64 << extra).all(|e| compiled.holds(m | (e << self.num_vars)))
        })
    }
}

/// Answer of [`brute_force_status`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleStatus {
    /// First satisfying assignment in enumeration order (index 0 unused).
    Sat(Vec<bool>),
    Unsat,
}

impl OracleStatus {
    pub fn is_sat(&self) -> bool {
        matches!(self, OracleStatus::Sat(_))
    }
}

pub fn brute_force_status(problem: &Problem) -> Result<OracleStatus, SolverError> {
    brute_force_status_with(problem, OracleLimit::default())
}

pub fn brute_force_status_with(
    problem: &Problem,
    limit: OracleLimit,
) -> Result<OracleStatus, SolverError> {
    limit.check(problem.num_vars())?;
    if problem.is_trivially_unsat() {
        return Ok(OracleStatus::Unsat);
    }
    let n = problem.num_vars();
    let compiled: Vec<Compiled> = problem.constraints().iter().map(Compiled::new).collect();
    for i in 0..1u64 << n {
        let m = mask_of(i, n);
        if compiled.iter().all(|c| c.holds(m)) {
            let model = (0..=n).map(|v| v > 0 && (m >> (v - 1)) & 1 == 1).collect();
            return Ok(OracleStatus::Sat(model));
        }
    }
    Ok(OracleStatus::Unsat)
}

/// Minimum objective value over all models, `None` when infeasible. A problem without objective
/// is treated as minimizing the constant 0.
pub fn brute_force_optimum(problem: &Problem) -> Result<Option<BigInt>, SolverError> {
    OracleLimit::default().check(problem.num_vars())?;
    if problem.is_trivially_unsat() {
        return Ok(None);
    }
    let models = ModelSet::enumerate(problem.num_vars(), problem.constraints())?;
    Ok(models
        .models()
        .map(|m| problem.objective_value(&m))
        .min())
}

/// True iff every assignment satisfying all of `formula` satisfies `c`.
pub fn implies(formula: &[PBConstraint], c: &Derived) -> Result<bool, SolverError> {
    if c.is_trivially_true() {
        return Ok(true);
    }
    let n = max_var(formula.iter().chain(c.constraint()));
    Ok(ModelSet::enumerate(n, formula)?.implies(c))
}

/// Literals forced by naive fixpoint propagation, and whether a conflict was reached.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Closure {
    pub propagated: BTreeSet<Literal>,
    pub conflict: bool,
}

/// Repeats the slack propagation rule over all constraints until nothing changes.
pub fn propagation_closure(
    constraints: &[PBConstraint],
    partial: &Assignment,
) -> Result<Closure, SolverError> {
    let n = max_var(constraints);
    OracleLimit::default().check(n)?;
    let mut a = partial.clone();
    let level = a.max_level();
    let mut out = Closure::default();
    loop {
        let mut changed = false;
        for c in constraints {
            let slack = c.slack(&a);
            if slack.is_negative() {
                out.conflict = true;
                return Ok(out);
            }
            for t in c.terms() {
                if !a.is_assigned(t.lit.var()) && t.coef > slack {
                    a.set(t.lit.var(), t.lit.is_positive(), level);
                    out.propagated.insert(t.lit);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(out);
        }
    }
}

/// Evaluates a model (index 0 unused) as a variable predicate.
pub fn model_fn(model: &[bool]) -> impl Fn(Var) -> bool + '_ {
    move |v| model.get(v.index()).copied().unwrap_or(false)
}

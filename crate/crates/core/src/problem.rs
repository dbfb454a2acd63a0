//! A normalized problem instance: constraints plus an optional objective to minimize.

use num_bigint::BigInt;

use crate::constraint::{PBConstraint, RawConstraint, Relation, Term};
use crate::error::SolverError;
use crate::literal::{Literal, Var};
use crate::normalize::{normalize, Normalized};
use crate::opb::OpbProblem;

/// Linear objective `Σ cᵢ·ℓᵢ` to minimize; coefficients may be negative.
pub type Objective = Vec<(BigInt, Literal)>;

#[derive(Debug, Clone, Default)]
pub struct Problem {
    num_vars: usize,
    constraints: Vec<PBConstraint>,
    original: Vec<RawConstraint>,
    objective: Option<Objective>,
    trivially_unsat: bool,
}

impl Problem {
    pub fn from_constraints(num_vars: usize, constraints: Vec<PBConstraint>) -> Self {
        let max = constraints
            .iter()
            .flat_map(|c| c.vars())
            .map(Var::index)
            .max()
            .unwrap_or(0);
        let trivially_unsat = constraints.iter().any(|c| c.is_contradiction());
        Problem {
            num_vars: num_vars.max(max),
            constraints,
            original: Vec::new(),
            objective: None,
            trivially_unsat,
        }
    }

    /// Normalizes each raw constraint; the raw forms are kept for model verification.
    pub fn from_raw(num_vars: usize, raw: &[RawConstraint]) -> Self {
        let mut constraints = Vec::new();
        let mut trivially_unsat = false;
        for r in raw {
            match normalize(r) {
                Normalized::Constraints(cs) => constraints.extend(cs),
                Normalized::Contradiction => trivially_unsat = true,
            }
        }
        let max = raw.iter().map(|r| r.max_var() as usize).max().unwrap_or(0);
        let mut p = Problem::from_constraints(num_vars.max(max), constraints);
        p.original = raw.to_vec();
        p.trivially_unsat |= trivially_unsat;
        p
    }

    pub fn from_opb(opb: &OpbProblem) -> Self {
        let mut p = Problem::from_raw(opb.variable_count(), &opb.constraints);
        if let Some(obj) = &opb.objective {
            p = p.with_objective(obj.clone());
        }
        p
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        let max = objective
            .iter()
            .map(|(_, l)| l.var().index())
            .max()
            .unwrap_or(0);
        self.num_vars = self.num_vars.max(max);
        self.objective = Some(objective);
        self
    }

    /// `m` pigeons into `n` holes: every pigeon sits somewhere, every hole holds at most one.
    /// Variable `x(i·n + j + 1)` places pigeon `i` in hole `j`.
    pub fn pigeonhole(pigeons: usize, holes: usize) -> Self {
        let var = |i: usize, j: usize| Var::new((i * holes + j + 1) as u32);
        let mut raw = Vec::with_capacity(pigeons + holes);
        for i in 0..pigeons {
            raw.push(RawConstraint::new(
                (0..holes).map(|j| (BigInt::from(1), var(i, j).positive())).collect(),
                Relation::GreaterEq,
                1,
            ));
        }
        for j in 0..holes {
            raw.push(RawConstraint::new(
                (0..pigeons).map(|i| (BigInt::from(1), var(i, j).positive())).collect(),
                Relation::LessEq,
                1,
            ));
        }
        Problem::from_raw(pigeons * holes, &raw)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[PBConstraint] {
        &self.constraints
    }

    pub fn original(&self) -> &[RawConstraint] {
        &self.original
    }

    pub fn objective(&self) -> Option<&Objective> {
        self.objective.as_ref()
    }

    /// Normalization found a constraint no assignment satisfies.
    pub fn is_trivially_unsat(&self) -> bool {
        self.trivially_unsat
    }

    /// Objective value of a model (index 0 unused); zero without an objective.
    pub fn objective_value(&self, model: &[bool]) -> BigInt {
        self.objective
            .iter()
            .flatten()
            .filter(|(_, l)| l.eval(model[l.var().index()]))
            .map(|(c, _)| c)
            .sum()
    }

    /// Normalized form of `objective ≤ bound`.
    pub fn objective_bound(&self, bound: &BigInt) -> Normalized {
        let terms = self.objective.clone().unwrap_or_default();
        normalize(&RawConstraint::new(terms, Relation::LessEq, bound.clone()))
    }

    /// Checks a total model (index 0 unused) against every input constraint, before learning.
    pub fn verify_model(&self, model: &[Option<bool>]) -> Result<bool, SolverError> {
        let values = std::iter::once(Ok(false))
            .chain((1..=self.num_vars).map(|id| {
                model
                    .get(id)
                    .copied()
                    .flatten()
                    .ok_or(SolverError::PartialModel(id as u32))
            }))
            .collect::<Result<Vec<bool>, _>>()?;
        if self.trivially_unsat {
            return Ok(false);
        }
        let value = |v: Var| values[v.index()];
        let raw_ok = self.original.iter().all(|r| r.is_satisfied_by(value));
        Ok(raw_ok && self.constraints.iter().all(|c| c.is_satisfied_by(value)))
    }

    /// Rejects instances the solver cannot take as-is.
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.num_vars > u32::MAX as usize / 2 {
            return Err(SolverError::InvalidProblem("too many variables".into()));
        }
        for c in &self.constraints {
            if let Some(Term { lit, .. }) = c.terms().iter().find(|t| t.lit.var().index() > self.num_vars) {
                return Err(SolverError::InvalidProblem(format!(
                    "literal {lit} beyond declared variable count {}",
                    self.num_vars
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pigeonhole_shape() {
        let p = Problem::pigeonhole(3, 2);
        assert_eq!(p.num_vars(), 6);
        assert_eq!(p.constraints().len(), 5);
        // hole constraint: ~x1 + ~x3 + ~x5 >= 2
        let hole = &p.constraints()[3];
        assert!(hole.literals().all(|l| !l.is_positive()));
        assert_eq!(hole.degree(), &BigInt::from(2));
    }

    #[test]
    fn verify_model_rejects_violations_and_partial_models() {
        let p = Problem::from_raw(
            2,
            &[RawConstraint::from_ints(
                &[(1, Literal::from_signed(1)), (1, Literal::from_signed(2))],
                Relation::GreaterEq,
                1,
            )],
        );
        assert_eq!(p.verify_model(&[None, Some(false), Some(false)]), Ok(false));
        assert_eq!(p.verify_model(&[None, Some(true), Some(true)]), Ok(true));
        assert_eq!(
            p.verify_model(&[None, Some(true)]),
            Err(SolverError::PartialModel(2))
        );
    }

    #[test]
    fn objective_value_counts_true_literals() {
        let p = Problem::from_constraints(2, vec![]).with_objective(vec![
            (BigInt::from(2), Literal::from_signed(1)),
            (BigInt::from(-3), Literal::from_signed(-2)),
        ]);
        assert_eq!(p.objective_value(&[false, true, false]), BigInt::from(-1));
    }
}

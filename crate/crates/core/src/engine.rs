//! Counter-based unit propagation over pseudo-Boolean constraints.
//!
//! Each stored constraint keeps its current slack (coefficient sum of non-falsified literals
//! minus the degree). Assigning a literal subtracts the coefficient of its negation from every
//! constraint containing that negation; unassigning adds it back. The counters therefore always
//! match the trail, and propagation only has to inspect constraints whose slack just dropped.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::constraint::{ConstraintRef, PBConstraint};
use crate::error::SolverError;
use crate::literal::{Literal, Var};
use crate::trail::{Trail, TrailView};

#[derive(Debug, Clone, Copy)]
struct Occurrence {
    cref: ConstraintRef,
    term: u32,
}

#[derive(Debug, Clone)]
struct Stored {
    constraint: PBConstraint,
    slack: BigInt,
    /// Term indices by decreasing coefficient, for early exit when scanning for propagations.
    by_coef: Vec<u32>,
    learned: bool,
}

impl Stored {
    fn max_coef(&self) -> Option<&BigInt> {
        self.by_coef
            .first()
            .map(|&i| &self.constraint.terms()[i as usize].coef)
    }
}

/// Trail plus constraint database with maintained slacks.
#[derive(Debug, Clone)]
pub struct Engine {
    trail: Trail,
    db: Vec<Option<Stored>>,
    occurrences: Vec<Vec<Occurrence>>,
    qhead: usize,
    unassigned_log: Vec<Var>,
    propagations: u64,
    diagnostics: bool,
}

impl Engine {
    pub fn new(num_vars: usize) -> Self {
        Engine {
            trail: Trail::new(num_vars),
            db: Vec::new(),
            occurrences: vec![Vec::new(); 2 * (num_vars + 1)],
            qhead: 0,
            unassigned_log: Vec::new(),
            propagations: 0,
            diagnostics: false,
        }
    }

    /// Recomputes every slack after each propagation and backjump and panics on mismatch.
    pub fn set_diagnostics(&mut self, on: bool) {
        self.diagnostics = on;
    }

    pub fn num_vars(&self) -> usize {
        self.trail.num_vars()
    }

    pub fn trail(&self) -> &Trail {
        &self.trail
    }

    pub fn current_level(&self) -> u32 {
        self.trail.current_level()
    }

    pub fn propagations(&self) -> u64 {
        self.propagations
    }

    pub fn constraint(&self, cref: ConstraintRef) -> &PBConstraint {
        &self.stored(cref).constraint
    }

    pub fn is_learned(&self, cref: ConstraintRef) -> bool {
        self.stored(cref).learned
    }

    /// Maintained slack of a stored constraint.
    pub fn slack(&self, cref: ConstraintRef) -> &BigInt {
        &self.stored(cref).slack
    }

    pub fn is_live(&self, cref: ConstraintRef) -> bool {
        self.db.get(cref.index()).is_some_and(Option::is_some)
    }

    fn stored(&self, cref: ConstraintRef) -> &Stored {
        self.db[cref.index()]
            .as_ref()
            .expect("reference to a deleted constraint")
    }

    /// Live constraints in insertion order.
    pub fn constraints(&self) -> impl Iterator<Item = (ConstraintRef, &PBConstraint)> {
        self.db.iter().enumerate().filter_map(|(i, s)| {
            s.as_ref()
                .map(|s| (ConstraintRef(i as u32), &s.constraint))
        })
    }

    /// Stores `c`, computing its slack against the current trail. Does not propagate; call
    /// [`Engine::propagate_constraint`] for that.
    pub fn add_constraint(&mut self, c: PBConstraint, learned: bool) -> ConstraintRef {
        let cref = ConstraintRef(self.db.len() as u32);
        for (i, t) in c.terms().iter().enumerate() {
            self.occurrences[t.lit.code()].push(Occurrence {
                cref,
                term: i as u32,
            });
        }
        let mut by_coef: Vec<u32> = (0..c.len() as u32).collect();
        by_coef.sort_by(|&a, &b| {
            let (ta, tb) = (&c.terms()[a as usize], &c.terms()[b as usize]);
            tb.coef.cmp(&ta.coef).then(ta.lit.var().cmp(&tb.lit.var()))
        });
        let slack = c.slack(&self.trail);
        self.db.push(Some(Stored {
            constraint: c,
            slack,
            by_coef,
            learned,
        }));
        cref
    }

    /// Deletes a constraint. The caller guarantees it is not the reason of any trail literal.
    pub fn remove_constraint(&mut self, cref: ConstraintRef) {
        self.remove_constraints(&[cref]);
    }

    /// Deletes several constraints with one pass over the affected occurrence lists.
    pub fn remove_constraints(&mut self, crefs: &[ConstraintRef]) {
        let mut touched = Vec::new();
        for &cref in crefs {
            if let Some(s) = self.db[cref.index()].take() {
                touched.extend(s.constraint.literals().map(Literal::code));
            }
        }
        touched.sort_unstable();
        touched.dedup();
        for code in touched {
            let db = &self.db;
            self.occurrences[code].retain(|o| db[o.cref.index()].is_some());
        }
    }

    /// Whether `cref` is currently the reason of an assigned literal.
    pub fn is_locked(&self, cref: ConstraintRef) -> bool {
        let s = self.stored(cref);
        s.constraint.literals().any(|l| {
            self.trail.is_true(l) && self.trail.reason(l.var()) == Some(cref)
        })
    }

    fn assign(&mut self, lit: Literal, reason: Option<ConstraintRef>, decision: bool) {
        if decision {
            self.trail.decide(lit).expect("decision on an assigned variable");
        } else {
            self.trail
                .enqueue(lit, reason)
                .expect("propagation of an assigned variable");
        }
        for o in &self.occurrences[(!lit).code()] {
            let s = self.db[o.cref.index()].as_mut().expect("live occurrence");
            s.slack -= &s.constraint.terms()[o.term as usize].coef;
        }
    }

    fn unassign_top(&mut self) -> Option<Literal> {
        let lit = self.trail.pop()?;
        for o in &self.occurrences[(!lit).code()] {
            let s = self.db[o.cref.index()].as_mut().expect("live occurrence");
            s.slack += &s.constraint.terms()[o.term as usize].coef;
        }
        self.unassigned_log.push(lit.var());
        self.qhead = self.qhead.min(self.trail.len());
        Some(lit)
    }

    /// Opens a new decision level with `lit` true.
    pub fn decide(&mut self, lit: Literal) -> Result<(), SolverError> {
        if self.trail.is_assigned(lit.var()) {
            return Err(SolverError::AlreadyAssigned(lit.var().id()));
        }
        self.assign(lit, None, true);
        Ok(())
    }

    /// Makes `lit` true at the current level with `reason` as its justification.
    pub fn enqueue(&mut self, lit: Literal, reason: Option<ConstraintRef>) -> Result<(), SolverError> {
        if self.trail.is_assigned(lit.var()) {
            return Err(SolverError::AlreadyAssigned(lit.var().id()));
        }
        self.assign(lit, reason, false);
        Ok(())
    }

    /// Checks one constraint: reports it when conflicting, otherwise enqueues every unassigned
    /// literal whose coefficient exceeds the slack.
    pub fn propagate_constraint(&mut self, cref: ConstraintRef) -> Option<ConstraintRef> {
        let s = self.stored(cref);
        if s.slack.is_negative() {
            return Some(cref);
        }
        if s.max_coef().is_none_or(|m| m <= &s.slack) {
            return None;
        }
        let mut forced = Vec::new();
        for &i in &s.by_coef {
            let t = &s.constraint.terms()[i as usize];
            if t.coef <= s.slack {
                break;
            }
            if !self.trail.is_assigned(t.lit.var()) {
                forced.push(t.lit);
            }
        }
        for lit in forced {
            self.assign(lit, Some(cref), false);
            self.propagations += 1;
        }
        None
    }

    /// Propagates to fixpoint. Returns the first conflicting constraint found, if any.
    pub fn propagate(&mut self) -> Option<ConstraintRef> {
        let conflict = self.propagate_inner();
        if self.diagnostics {
            self.check_counters().unwrap();
        }
        conflict
    }

    fn propagate_inner(&mut self) -> Option<ConstraintRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail.literals()[self.qhead];
            self.qhead += 1;
            let code = (!p).code();
            let mut k = 0;
            while k < self.occurrences[code].len() {
                let cref = self.occurrences[code][k].cref;
                k += 1;
                if let Some(conflict) = self.propagate_constraint(cref) {
                    return Some(conflict);
                }
            }
        }
        None
    }

    /// Undoes the most recent assignment.
    pub fn pop(&mut self) -> Option<Literal> {
        self.unassign_top()
    }

    /// Undoes every assignment above `level`.
    pub fn backjump_to(&mut self, level: u32) {
        let end = self.trail.level_end(level);
        while self.trail.len() > end {
            self.unassign_top();
        }
        if self.diagnostics {
            self.check_counters().unwrap();
        }
    }

    /// Variables unassigned since the last call, oldest first.
    pub fn drain_unassigned(&mut self) -> Vec<Var> {
        std::mem::take(&mut self.unassigned_log)
    }

    /// Compares every maintained slack with a from-scratch recomputation.
    pub fn check_counters(&self) -> Result<(), String> {
        for (i, s) in self.db.iter().enumerate() {
            if let Some(s) = s {
                let fresh = s.constraint.slack(&self.trail);
                if fresh != s.slack {
                    return Err(format!(
                        "constraint #{i} ({}) has slack {} but recomputation gives {fresh}",
                        s.constraint, s.slack
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(id: i64) -> Literal {
        Literal::from_signed(id)
    }

    fn v(id: u32) -> Var {
        Var::new(id)
    }

    fn running() -> PBConstraint {
        PBConstraint::from_ints(
            &[(5, l(1)), (5, l(2)), (1, l(3)), (1, l(4)), (1, l(5)), (1, l(6))],
            6,
        )
    }

    /// Reaches e(0@1), f(1@2), a(0@3).
    fn example_engine() -> (Engine, ConstraintRef) {
        let mut e = Engine::new(6);
        e.set_diagnostics(true);
        let c = e.add_constraint(running(), false);
        e.decide(l(-5)).unwrap();
        assert_eq!(e.propagate(), None);
        e.decide(l(6)).unwrap();
        assert_eq!(e.propagate(), None);
        e.decide(l(-1)).unwrap();
        (e, c)
    }

    #[test]
    fn decide_examples() {
        let mut e = Engine::new(2);
        e.decide(l(1)).unwrap();
        assert_eq!(e.trail().var_value(v(1)), Some(true));
        assert_eq!(e.trail().var_level(v(1)), Some(1));
        e.decide(l(-2)).unwrap();
        assert_eq!(e.trail().var_value(v(2)), Some(false));
        assert_eq!(e.trail().var_level(v(2)), Some(2));
        assert_eq!(e.decide(l(1)), Err(SolverError::AlreadyAssigned(1)));
    }

    #[test]
    fn running_example_propagates_b() {
        let (mut e, c) = example_engine();
        assert_eq!(e.propagate(), None);
        assert_eq!(e.trail().var_value(v(2)), Some(true));
        assert_eq!(e.trail().var_level(v(2)), Some(3));
        assert_eq!(e.trail().reason(v(2)), Some(c));
        assert_eq!(e.slack(c), &BigInt::from(2));
    }

    #[test]
    fn running_example_conflicts_when_b_is_false() {
        let (mut e, c) = example_engine();
        // Assign b false at level 3 before propagation gets a chance.
        e.enqueue(l(-2), None).unwrap();
        assert_eq!(e.propagate(), Some(c));
        assert_eq!(e.slack(c), &BigInt::from(-3));
    }

    #[test]
    fn clause_propagation() {
        let mut e = Engine::new(2);
        let c = e.add_constraint(PBConstraint::clause(&[l(1), l(2)]), false);
        e.decide(l(-1)).unwrap();
        assert_eq!(e.propagate(), None);
        assert!(e.trail().is_true(l(2)));
        assert_eq!(e.trail().var_level(v(2)), Some(1));
        assert_eq!(e.trail().reason(v(2)), Some(c));
        assert!(e.is_locked(c));
    }

    #[test]
    fn backjump_examples() {
        let mut e = Engine::new(3);
        e.set_diagnostics(true);
        e.add_constraint(PBConstraint::clause(&[l(1), l(2), l(3)]), false);
        e.decide(l(1)).unwrap();
        e.decide(l(-2)).unwrap();
        e.propagate();
        let before = e.trail().literals().to_vec();
        e.backjump_to(2);
        assert_eq!(e.trail().literals(), &before[..]);
        e.backjump_to(1);
        assert!(e.trail().is_true(l(1)));
        assert!(!e.trail().is_assigned(v(2)));
        assert_eq!(e.current_level(), 1);
        e.backjump_to(0);
        assert!(e.trail().is_empty());
        assert_eq!(e.drain_unassigned(), vec![v(2), v(1)]);
    }

    #[test]
    fn added_constraint_slack_reflects_current_trail() {
        let mut e = Engine::new(3);
        e.decide(l(-1)).unwrap();
        let c = e.add_constraint(PBConstraint::from_ints(&[(2, l(1)), (1, l(2)), (1, l(3))], 2), true);
        assert_eq!(e.slack(c), &BigInt::from(0));
        assert_eq!(e.propagate_constraint(c), None);
        assert!(e.trail().is_true(l(2)) && e.trail().is_true(l(3)));
        e.check_counters().unwrap();
    }

    #[test]
    fn removed_constraints_stop_propagating() {
        let mut e = Engine::new(2);
        let c = e.add_constraint(PBConstraint::clause(&[l(1), l(2)]), true);
        e.remove_constraint(c);
        assert!(!e.is_live(c));
        e.decide(l(-1)).unwrap();
        assert_eq!(e.propagate(), None);
        assert!(!e.trail().is_assigned(v(2)));
    }
}

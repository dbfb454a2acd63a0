//! Assignments: the solver trail and read-only snapshots of it.
//!
//! A literal assigned value `V` at decision level `D` is written `ℓ(V@D)`; an unassigned literal
//! is `ℓ(?@?)`. Everything that only needs to *read* an assignment (slack, effective literals,
//! LBD, bump eligibility) goes through [`TrailView`] so it works on the live trail as well as on
//! a frozen [`Assignment`].

use crate::constraint::ConstraintRef;
use crate::error::SolverError;
use crate::literal::{Literal, Var};

/// Read access to a (partial) assignment with decision levels.
pub trait TrailView {
    /// Value of the variable, `None` when unassigned.
    fn var_value(&self, var: Var) -> Option<bool>;

    /// Decision level of an assigned variable.
    fn var_level(&self, var: Var) -> Option<u32>;

    fn lit_value(&self, lit: Literal) -> Option<bool> {
        self.var_value(lit.var()).map(|v| lit.eval(v))
    }

    fn is_true(&self, lit: Literal) -> bool {
        self.lit_value(lit) == Some(true)
    }

    fn is_false(&self, lit: Literal) -> bool {
        self.lit_value(lit) == Some(false)
    }

    fn is_assigned(&self, var: Var) -> bool {
        self.var_value(var).is_some()
    }
}

/// A standalone partial assignment, indexed by variable id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<Option<(bool, u32)>>,
}

impl Assignment {
    pub fn new(num_vars: usize) -> Self {
        Assignment {
            values: vec![None; num_vars + 1],
        }
    }

    /// Assigns `var` to `value` at decision `level`, growing the table as needed.
    pub fn set(&mut self, var: Var, value: bool, level: u32) -> &mut Self {
        if var.index() >= self.values.len() {
            self.values.resize(var.index() + 1, None);
        }
        self.values[var.index()] = Some((value, level));
        self
    }

    pub fn unset(&mut self, var: Var) -> &mut Self {
        if let Some(slot) = self.values.get_mut(var.index()) {
            *slot = None;
        }
        self
    }

    /// Builder form of [`Assignment::set`].
    pub fn with(mut self, var: Var, value: bool, level: u32) -> Self {
        self.set(var, value, level);
        self
    }

    /// Copies the state of any view for variables `1..=num_vars`.
    pub fn snapshot(view: &impl TrailView, num_vars: usize) -> Self {
        let mut a = Assignment::new(num_vars);
        for id in 1..=num_vars {
            let var = Var::new(id as u32);
            if let (Some(v), Some(l)) = (view.var_value(var), view.var_level(var)) {
                a.values[id] = Some((v, l));
            }
        }
        a
    }

    /// Restricts the assignment to decisions made at or below `level`.
    pub fn truncated(&self, level: u32) -> Self {
        Assignment {
            values: self
                .values
                .iter()
                .map(|slot| slot.filter(|&(_, l)| l <= level))
                .collect(),
        }
    }

    pub fn max_level(&self) -> u32 {
        self.values.iter().flatten().map(|&(_, l)| l).max().unwrap_or(0)
    }
}

impl TrailView for Assignment {
    fn var_value(&self, var: Var) -> Option<bool> {
        self.values.get(var.index()).copied().flatten().map(|(v, _)| v)
    }

    fn var_level(&self, var: Var) -> Option<u32> {
        self.values.get(var.index()).copied().flatten().map(|(_, l)| l)
    }
}

#[derive(Debug, Clone, Copy)]
struct VarState {
    value: Option<bool>,
    level: u32,
    reason: Option<ConstraintRef>,
    position: usize,
}

const UNASSIGNED: VarState = VarState {
    value: None,
    level: 0,
    reason: None,
    position: usize::MAX,
};

/// The assignment stack. Each decision opens a new level; propagated literals carry the
/// constraint that propagated them.
#[derive(Debug, Clone)]
pub struct Trail {
    vars: Vec<VarState>,
    stack: Vec<Literal>,
    /// Last value each variable took; decisions reuse it.
    phase: Vec<bool>,
    /// `level_starts[d - 1]` is the stack position of the decision opening level `d`.
    level_starts: Vec<usize>,
}

impl Trail {
    pub fn new(num_vars: usize) -> Self {
        Trail {
            vars: vec![UNASSIGNED; num_vars + 1],
            stack: Vec::with_capacity(num_vars),
            phase: vec![false; num_vars + 1],
            level_starts: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len() - 1
    }

    pub fn current_level(&self) -> u32 {
        self.level_starts.len() as u32
    }

    /// Assigned literals in assignment order.
    pub fn literals(&self) -> &[Literal] {
        &self.stack
    }

    pub fn len(&self) -> usize {
        self.stack.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stack.is_empty()
    }

    pub fn reason(&self, var: Var) -> Option<ConstraintRef> {
        self.vars[var.index()].reason
    }

    /// Position of an assigned variable on the stack.
    pub fn position(&self, var: Var) -> Option<usize> {
        let s = &self.vars[var.index()];
        s.value.map(|_| s.position)
    }

    /// Value last assigned to `var`, `false` if it was never assigned.
    pub fn saved_phase(&self, var: Var) -> bool {
        self.phase[var.index()]
    }

    pub fn last(&self) -> Option<Literal> {
        self.stack.last().copied()
    }

    /// Opens a new decision level and makes `lit` true.
    pub fn decide(&mut self, lit: Literal) -> Result<(), SolverError> {
        if self.is_assigned(lit.var()) {
            return Err(SolverError::AlreadyAssigned(lit.var().id()));
        }
        self.level_starts.push(self.stack.len());
        self.push(lit, None);
        Ok(())
    }

    /// Makes `lit` true at the current level.
    pub fn enqueue(&mut self, lit: Literal, reason: Option<ConstraintRef>) -> Result<(), SolverError> {
        if self.is_assigned(lit.var()) {
            return Err(SolverError::AlreadyAssigned(lit.var().id()));
        }
        self.push(lit, reason);
        Ok(())
    }

    fn push(&mut self, lit: Literal, reason: Option<ConstraintRef>) {
        self.vars[lit.var().index()] = VarState {
            value: Some(lit.is_positive()),
            level: self.current_level(),
            reason,
            position: self.stack.len(),
        };
        self.phase[lit.var().index()] = lit.is_positive();
        self.stack.push(lit);
    }

    /// Removes the most recent assignment, closing its level if it was a decision.
    pub fn pop(&mut self) -> Option<Literal> {
        let lit = self.stack.pop()?;
        self.vars[lit.var().index()] = UNASSIGNED;
        if self.level_starts.last() == Some(&self.stack.len()) {
            self.level_starts.pop();
        }
        Some(lit)
    }

    /// Stack length once all levels above `level` are undone.
    pub fn level_end(&self, level: u32) -> usize {
        self.level_starts
            .get(level as usize)
            .copied()
            .unwrap_or(self.stack.len())
    }
}

impl TrailView for Trail {
    fn var_value(&self, var: Var) -> Option<bool> {
        self.vars.get(var.index()).and_then(|s| s.value)
    }

    fn var_level(&self, var: Var) -> Option<u32> {
        self.vars
            .get(var.index())
            .and_then(|s| s.value.map(|_| s.level))
    }
}

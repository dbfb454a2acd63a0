//! The CDCL loop: decision solving and linear solution-improving optimization.

use std::fmt;

use num_bigint::BigInt;

use crate::analysis::{analyze, AnalysisResult};
use crate::config::SolverConfig;
use crate::constraint::{ConstraintRef, PBConstraint};
use crate::deletion::LearnedDb;
use crate::engine::Engine;
use crate::error::SolverError;
use crate::heuristics::Evsids;
use crate::normalize::Normalized;
use crate::problem::Problem;
use crate::quality::{quality_value, QualityMeasure};
use crate::restarts::RestartScheduler;
use crate::literal::Var;
use crate::trail::{Trail, TrailView};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Sat,
    Unsat,
    Optimum,
    Unknown,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Optimum => "OPTIMUM",
            Status::Unknown => "UNKNOWN",
        }
    }

    pub fn is_solved(self) -> bool {
        self != Status::Unknown
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Limits on a solver run. Both default to unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Budget {
    pub max_conflicts: Option<u64>,
    /// Wall-clock limit in seconds (ignored where no clock is available).
    pub time_limit: Option<f64>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn conflicts(n: u64) -> Self {
        Budget {
            max_conflicts: Some(n),
            time_limit: None,
        }
    }

    pub fn seconds(s: f64) -> Self {
        Budget {
            max_conflicts: None,
            time_limit: Some(s),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub reductions: u64,
    pub learned: u64,
    /// Seconds; zero where no clock is available.
    pub wall_time: f64,
}

impl Stats {
    /// Everything except the wall time, which is the only non-deterministic field.
    pub fn counters(&self) -> [u64; 6] {
        [
            self.conflicts,
            self.decisions,
            self.propagations,
            self.restarts,
            self.reductions,
            self.learned,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    /// Total model, indexed by variable id (index 0 unused).
    pub model: Option<Vec<bool>>,
    pub objective: Option<BigInt>,
    /// Objective values of successive improving models.
    pub bounds: Vec<BigInt>,
    pub stats: Stats,
}

/// Callbacks into a running search.
pub trait SearchObserver {
    /// A constraint was learned; `trail` is the assignment it was derived under, on which it is
    /// conflicting.
    fn on_learned(&mut self, _learned: &PBConstraint, _trail: &Trail) {}

    /// An improving model of objective `value` was found.
    fn on_bound(&mut self, _value: &BigInt) {}

    fn on_restart(&mut self, _conflicts: u64) {}
}

/// Observer that ignores everything.
pub struct NoObserver;

impl SearchObserver for NoObserver {}

#[cfg(not(target_arch = "wasm32"))]
struct Clock(std::time::Instant);

#[cfg(not(target_arch = "wasm32"))]
impl Clock {
    fn start() -> Self {
        Clock(std::time::Instant::now())
    }

    fn elapsed(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[cfg(target_arch = "wasm32")]
struct Clock;

#[cfg(target_arch = "wasm32")]
impl Clock {
    fn start() -> Self {
        Clock
    }

    fn elapsed(&self) -> f64 {
        0.0
    }
}

enum Outcome {
    Model(Vec<bool>),
    Unsat,
    Unknown,
}

pub struct Solver {
    problem: Problem,
    config: SolverConfig,
    engine: Engine,
    evsids: Evsids,
    learned: LearnedDb,
    restarts: RestartScheduler,
    stats: Stats,
    pending_conflict: Option<ConstraintRef>,
    root_unsat: bool,
    diagnostics: bool,
}

impl Solver {
    pub fn new(problem: &Problem, config: SolverConfig) -> Result<Self, SolverError> {
        config.validate().map_err(SolverError::InvalidConfig)?;
        problem.validate()?;
        let n = problem.num_vars();
        let mut engine = Engine::new(n);
        let mut pending_conflict = None;
        for c in problem.constraints() {
            let cref = engine.add_constraint(c.clone(), false);
            if pending_conflict.is_none() {
                pending_conflict = engine.propagate_constraint(cref);
            }
        }
        Ok(Solver {
            problem: problem.clone(),
            evsids: Evsids::new(n, config.g),
            learned: LearnedDb::new(config.deletion),
            restarts: RestartScheduler::new(config.restart),
            config,
            engine,
            stats: Stats::default(),
            pending_conflict,
            root_unsat: problem.is_trivially_unsat(),
            diagnostics: false,
        })
    }

    /// Turns on expensive invariant checks after every propagation and reduction.
    pub fn set_diagnostics(&mut self, on: bool) {
        self.diagnostics = on;
        self.engine.set_diagnostics(on);
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn evsids(&self) -> &Evsids {
        &self.evsids
    }

    pub fn learned_db(&self) -> &LearnedDb {
        &self.learned
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    /// Solves the decision problem, or minimizes the objective when there is one.
    pub fn solve(
        &mut self,
        budget: &Budget,
        observer: &mut dyn SearchObserver,
    ) -> Result<SolveResult, SolverError> {
        if self.problem.objective().is_some() {
            self.solve_optimization(budget, observer)
        } else {
            self.solve_decision(budget, observer)
        }
    }

    pub fn solve_decision(
        &mut self,
        budget: &Budget,
        observer: &mut dyn SearchObserver,
    ) -> Result<SolveResult, SolverError> {
        let clock = Clock::start();
        let outcome = self.search(budget, &clock, observer)?;
        let (status, model) = match outcome {
            Outcome::Model(m) => {
                self.check_model(&m)?;
                (Status::Sat, Some(m))
            }
            Outcome::Unsat => (Status::Unsat, None),
            Outcome::Unknown => (Status::Unknown, None),
        };
        Ok(self.result(status, model, None, Vec::new(), &clock))
    }

    pub fn solve_optimization(
        &mut self,
        budget: &Budget,
        observer: &mut dyn SearchObserver,
    ) -> Result<SolveResult, SolverError> {
        let clock = Clock::start();
        let mut best: Option<(Vec<bool>, BigInt)> = None;
        let mut bounds = Vec::new();
        let status = loop {
            match self.search(budget, &clock, observer)? {
                Outcome::Model(m) => {
                    self.check_model(&m)?;
                    let value = self.problem.objective_value(&m);
                    if best.as_ref().is_some_and(|(_, b)| &value >= b) {
                        return Err(SolverError::ModelRejected(format!(
                            "objective {value} does not improve the previous bound"
                        )));
                    }
                    observer.on_bound(&value);
                    bounds.push(value.clone());
                    best = Some((m, value.clone()));
                    if !self.add_bound(&(value - 1)) {
                        break Status::Optimum;
                    }
                }
                Outcome::Unsat if best.is_some() => break Status::Optimum,
                Outcome::Unsat => break Status::Unsat,
                Outcome::Unknown => break Status::Unknown,
            }
        };
        let (model, objective) = match best {
            Some((m, v)) => (Some(m), Some(v)),
            None => (None, None),
        };
        Ok(self.result(status, model, objective, bounds, &clock))
    }

    fn result(
        &mut self,
        status: Status,
        model: Option<Vec<bool>>,
        objective: Option<BigInt>,
        bounds: Vec<BigInt>,
        clock: &Clock,
    ) -> SolveResult {
        self.stats.propagations = self.engine.propagations();
        self.stats.wall_time = clock.elapsed();
        SolveResult {
            status,
            model,
            objective,
            bounds,
            stats: self.stats.clone(),
        }
    }

    fn check_model(&self, model: &[bool]) -> Result<(), SolverError> {
        let total: Vec<Option<bool>> = model.iter().map(|&b| Some(b)).collect();
        if self.problem.verify_model(&total)? {
            Ok(())
        } else {
            Err(SolverError::ModelRejected(
                "an input constraint is violated".into(),
            ))
        }
    }

    /// Adds `objective ≤ bound` at level 0. Returns false when this makes the problem
    /// infeasible outright.
    fn add_bound(&mut self, bound: &BigInt) -> bool {
        self.engine.backjump_to(0);
        match self.problem.objective_bound(bound) {
            Normalized::Contradiction => false,
            Normalized::Constraints(cs) => {
                for c in cs {
                    let cref = self.engine.add_constraint(c, false);
                    if let Some(conflict) = self.engine.propagate_constraint(cref) {
                        self.pending_conflict.get_or_insert(conflict);
                    }
                }
                true
            }
        }
    }

    fn out_of_budget(&self, budget: &Budget, clock: &Clock) -> bool {
        budget.max_conflicts.is_some_and(|m| self.stats.conflicts >= m)
            || budget.time_limit.is_some_and(|t| clock.elapsed() >= t)
    }

    fn search(
        &mut self,
        budget: &Budget,
        clock: &Clock,
        observer: &mut dyn SearchObserver,
    ) -> Result<Outcome, SolverError> {
        if self.root_unsat {
            return Ok(Outcome::Unsat);
        }
        loop {
            let conflict = self
                .pending_conflict
                .take()
                .or_else(|| self.engine.propagate());
            if let Some(conflict) = conflict {
                self.stats.conflicts += 1;
                if self.engine.current_level() == 0 {
                    self.root_unsat = true;
                    return Ok(Outcome::Unsat);
                }
                match analyze(&mut self.engine, conflict, self.config.proof_system) {
                    Ok(res) => self.learn(res, observer),
                    Err(SolverError::ConflictAtRoot) => {
                        self.root_unsat = true;
                        return Ok(Outcome::Unsat);
                    }
                    Err(e) => return Err(e),
                }
                if self.out_of_budget(budget, clock) {
                    return Ok(Outcome::Unknown);
                }
                continue;
            }

            if self.restarts.should_restart() {
                self.engine.backjump_to(0);
                self.restarts.on_restart();
                self.stats.restarts += 1;
                observer.on_restart(self.stats.conflicts);
            }
            if self.learned.should_reduce() {
                self.reduce()?;
            }
            for v in self.engine.drain_unassigned() {
                self.evsids.reinsert(v);
            }
            let trail = self.engine.trail();
            let Some(lit) = self
                .evsids
                .pick_branch_literal(trail, |v| trail.saved_phase(v))
            else {
                let model = (0..=self.engine.num_vars())
                    .map(|i| i > 0 && trail.var_value(Var::new(i as u32)) == Some(true))
                    .collect();
                return Ok(Outcome::Model(model));
            };
            self.engine.decide(lit)?;
            self.stats.decisions += 1;
            if self.stats.decisions.is_multiple_of(256) && self.out_of_budget(budget, clock) {
                return Ok(Outcome::Unknown);
            }
        }
    }

    fn learn(&mut self, res: AnalysisResult, observer: &mut dyn SearchObserver) {
        let cfg = &self.config;
        for c in &res.encountered {
            self.evsids
                .bump_constraint(c, &res.conflict_trail, cfg.bump, cfg.bump_mode);
        }
        for &v in &res.eliminated {
            self.evsids.bump_eliminated(v, cfg.bump_mode);
        }
        self.evsids.on_conflict_processed();

        for (i, &cref) in res.used.iter().enumerate() {
            if self.engine.is_learned(cref) {
                self.learned.bump_activity(cref);
                if i > 0 {
                    self.learned
                        .update_on_reason(cref, self.engine.constraint(cref), &res.conflict_trail);
                }
            }
        }

        // Quality values are taken on the trail the constraint was derived under.
        let trail = self.engine.trail();
        let deletion_measure = self.config.deletion.measure().unwrap_or(QualityMeasure::Activity);
        let deletion_quality = quality_value(deletion_measure, &res.learned, trail).unwrap_or_default();
        let restart_quality = self
            .restarts
            .measure()
            .map(|m| quality_value(m, &res.learned, trail).unwrap_or_default());
        observer.on_learned(&res.learned, trail);

        self.engine.backjump_to(res.assertion_level);
        let cref = self.engine.add_constraint(res.learned, true);
        self.learned.record_with_quality(cref, deletion_quality);
        self.learned.on_conflict();
        self.restarts.on_conflict(restart_quality);
        self.stats.learned += 1;
        if let Some(conflict) = self.engine.propagate_constraint(cref) {
            self.pending_conflict = Some(conflict);
        }
    }

    fn reduce(&mut self) -> Result<(), SolverError> {
        let engine = &self.engine;
        let removed = self.learned.reduce(|c| engine.is_locked(c));
        self.engine.remove_constraints(&removed);
        self.stats.reductions += 1;
        if self.diagnostics {
            let trail = self.engine.trail();
            for &lit in trail.literals() {
                if let Some(r) = trail.reason(lit.var()) {
                    if !self.engine.is_live(r) {
                        return Err(SolverError::InvalidProblem(format!(
                            "reason of {lit} was deleted"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Runs a fresh solver on `problem`.
pub fn solve(problem: &Problem, config: SolverConfig, budget: &Budget) -> Result<SolveResult, SolverError> {
    Solver::new(problem, config)?.solve(budget, &mut NoObserver)
}

pub fn solve_with_observer(
    problem: &Problem,
    config: SolverConfig,
    budget: &Budget,
    observer: &mut dyn SearchObserver,
) -> Result<SolveResult, SolverError> {
    Solver::new(problem, config)?.solve(budget, observer)
}

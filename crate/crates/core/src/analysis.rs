//! Conflict analysis under three cutting-planes regimes.
//!
//! The analysis walks the trail backwards from the conflict, popping assignments as it goes.
//! Whenever the popped literal is falsified in the running constraint, the reason of that literal
//! is first reduced (according to the proof system) and then cancelled against the running
//! constraint. The running constraint stays conflicting on the shrinking trail; the walk stops as
//! soon as it would propagate after backjumping below the current level.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::constraint::{ConstraintRef, Derived, PBConstraint, Term};
use crate::engine::Engine;
use crate::error::SolverError;
use crate::literal::{Literal, Var};
use crate::rules::{cancel, cancel_multipliers, divide_ceil, saturate, weaken};
use crate::trail::{Assignment, TrailView};

/// Which cutting-planes rules conflict analysis relies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProofSystem {
    /// Cancellation with lcm multipliers, weakening the reason only when needed.
    GeneralizedResolution,
    /// Weaken non-divisible unfalsified literals of the reason, then divide.
    RoundingSat,
    /// Like `RoundingSat`, but partially weakens to the next multiple instead of removing.
    PartialRoundingSat,
}

impl ProofSystem {
    pub const ALL: [ProofSystem; 3] = [
        ProofSystem::GeneralizedResolution,
        ProofSystem::RoundingSat,
        ProofSystem::PartialRoundingSat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProofSystem::GeneralizedResolution => "gr",
            ProofSystem::RoundingSat => "rs",
            ProofSystem::PartialRoundingSat => "prs",
        }
    }
}

impl fmt::Display for ProofSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProofSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gr" | "generalized-resolution" => Ok(ProofSystem::GeneralizedResolution),
            "rs" | "roundingsat" => Ok(ProofSystem::RoundingSat),
            "prs" | "partial-roundingsat" => Ok(ProofSystem::PartialRoundingSat),
            _ => Err(format!("unknown proof system '{s}' (expected gr, rs or prs)")),
        }
    }
}

/// Learned constraint plus everything the heuristics need to know about how it was derived.
#[derive(Debug, Clone)]
pub struct AnalysisResult {
    pub learned: PBConstraint,
    pub assertion_level: u32,
    /// The conflict and every reason met, before reduction, in the order encountered.
    pub encountered: Vec<PBConstraint>,
    /// Database references of the reasons met (the conflict itself comes first).
    pub used: Vec<ConstraintRef>,
    /// Variables eliminated by cancellation.
    pub eliminated: Vec<Var>,
    /// The assignment as it stood when the conflict was detected.
    pub conflict_trail: Assignment,
}

/// Assigned terms of a constraint grouped by decision level, to evaluate the constraint as if
/// the trail were truncated at an arbitrary level.
struct LevelProfile<'a> {
    /// Slack under the full trail.
    slack: BigInt,
    /// `(level, coef, falsified)` of assigned terms, sorted by level.
    assigned: Vec<(u32, &'a BigInt, bool)>,
    max_unassigned: Option<&'a BigInt>,
}

impl<'a> LevelProfile<'a> {
    fn new(c: &'a PBConstraint, trail: &impl TrailView) -> Self {
        let mut slack = -c.degree().clone();
        let mut assigned = Vec::new();
        let mut max_unassigned: Option<&BigInt> = None;
        for t in c.terms() {
            match (trail.lit_value(t.lit), trail.var_level(t.lit.var())) {
                (Some(value), Some(l)) => {
                    if value {
                        slack += &t.coef;
                    }
                    assigned.push((l, &t.coef, !value));
                }
                _ => {
                    slack += &t.coef;
                    if max_unassigned.is_none_or(|m| &t.coef > m) {
                        max_unassigned = Some(&t.coef);
                    }
                }
            }
        }
        assigned.sort_by_key(|&(l, _, _)| l);
        LevelProfile {
            slack,
            assigned,
            max_unassigned,
        }
    }

    /// `(level, slack, largest unassigned coefficient)` once every assignment above `level` is
    /// undone, for level 0 and every level with an assigned term, in increasing order.
    fn sweep(&self) -> Vec<(u32, BigInt, Option<&'a BigInt>)> {
        // Group boundaries: assigned[starts[i]..] all have level >= levels[i].
        let mut levels = vec![0u32];
        let mut starts = vec![0usize];
        for (i, &(l, _, _)) in self.assigned.iter().enumerate() {
            if l > *levels.last().unwrap() {
                levels.push(l);
                starts.push(i);
            }
        }
        // Suffix maxima of coefficients assigned strictly above each level.
        let mut above_max: Vec<Option<&'a BigInt>> = vec![None; levels.len()];
        let mut acc: Option<&'a BigInt> = None;
        let mut k = self.assigned.len();
        for g in (0..levels.len()).rev() {
            above_max[g] = acc;
            while k > starts[g] {
                k -= 1;
                let c = self.assigned[k].1;
                if acc.is_none_or(|m| c > m) {
                    acc = Some(c);
                }
            }
        }
        let mut slack = self.slack.clone();
        for &(l, c, falsified) in &self.assigned {
            if falsified && l > 0 {
                slack += c;
            }
        }
        let mut out = Vec::with_capacity(levels.len());
        let mut i = self.assigned.iter().take_while(|&&(l, _, _)| l == 0).count();
        for (g, &level) in levels.iter().enumerate() {
            if g > 0 {
                while i < self.assigned.len() && self.assigned[i].0 == level {
                    let (_, c, falsified) = self.assigned[i];
                    if falsified {
                        slack -= c;
                    }
                    i += 1;
                }
            }
            let max = match (above_max[g], self.max_unassigned) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            };
            out.push((level, slack.clone(), max));
        }
        out
    }

    /// Lowest level at which the constraint is already conflicting.
    fn conflict_level(&self) -> Option<u32> {
        if !self.slack.is_negative() {
            return None;
        }
        self.sweep()
            .into_iter()
            .find(|(_, s, _)| s.is_negative())
            .map(|(l, _, _)| l)
    }

    /// Lowest level at which the constraint propagates some literal.
    fn propagation_level(&self) -> Option<u32> {
        self.sweep()
            .into_iter()
            .find(|(_, s, m)| !s.is_negative() && m.is_some_and(|m| m > s))
            .map(|(l, _, _)| l)
    }

    fn slack_at_root(&self) -> BigInt {
        self.sweep().swap_remove(0).1
    }
}

/// Smallest level at which `c` propagates at least one literal once the trail is truncated there.
///
/// Fails with [`SolverError::ConflictAtRoot`] when `c` is already conflicting at level 0, and with
/// [`SolverError::NotConflictingOrAssertive`] when no level makes it propagate.
pub fn assertion_level(c: &PBConstraint, trail: &impl TrailView) -> Result<u32, SolverError> {
    let p = LevelProfile::new(c, trail);
    if p.slack_at_root().is_negative() {
        return Err(SolverError::ConflictAtRoot);
    }
    p.propagation_level()
        .ok_or(SolverError::NotConflictingOrAssertive)
}

/// Falsified literals that matter to the conflict (or to the propagation).
///
/// Falsified literals are scanned in term order; each one is implicitly weakened away when that
/// keeps the constraint conflicting (resp. keeps every propagated literal propagated). The
/// literals that survive form a clause implied by `c` that is conflicting (resp. propagating).
pub fn effective_literals(
    c: &PBConstraint,
    trail: &impl TrailView,
) -> Result<Vec<Literal>, SolverError> {
    let mut slack = c.slack(trail);
    // Threshold the slack must stay below.
    let limit = if slack.is_negative() {
        BigInt::zero()
    } else {
        c.terms()
            .iter()
            .filter(|t| !trail.is_false(t.lit) && t.coef > slack)
            .map(|t| t.coef.clone())
            .min()
            .ok_or(SolverError::NotConflictingOrAssertive)?
    };
    let mut effective = Vec::new();
    for t in c.terms() {
        if !trail.is_false(t.lit) {
            continue;
        }
        let weakened = &slack + &t.coef;
        if weakened < limit {
            slack = weakened;
        } else {
            effective.push(t.lit);
        }
    }
    Ok(effective)
}

fn pivot_coefficient(reason: &PBConstraint, pivot: Literal) -> &BigInt {
    reason
        .coefficient(pivot)
        .expect("reason must contain the propagated literal")
}

/// Generalized-resolution reduction: weaken unfalsified non-pivot literals of the reason, smallest
/// coefficient first, until cancelling it with `conflict` is guaranteed to stay conflicting.
pub fn reduce_reason_gr(
    reason: &PBConstraint,
    pivot: Literal,
    conflict: &PBConstraint,
    trail: &impl TrailView,
) -> PBConstraint {
    let conflict_slack = conflict.slack(trail);
    let mut r = saturate(reason);
    loop {
        let (lambda, mu) = cancel_multipliers(conflict, &r, pivot.var())
            .expect("pivot must clash between conflict and reason");
        let resolvent_slack = &lambda * &conflict_slack + &mu * r.slack(trail);
        if resolvent_slack.is_negative() {
            return r;
        }
        let candidate = r
            .terms()
            .iter()
            .filter(|t| t.lit != pivot && !trail.is_false(t.lit))
            .min_by(|a, b| a.coef.cmp(&b.coef).then(a.lit.var().cmp(&b.lit.var())))
            .map(|t| t.lit);
        let Some(lit) = candidate else {
            return r;
        };
        r = match weaken(&r, lit).expect("literal taken from the reason") {
            Derived::Constraint(c) => c,
            Derived::TriviallyTrue => unreachable!("weakening a propagating reason keeps a positive degree"),
        };
    }
}

fn reduce_by_division(
    reason: &PBConstraint,
    pivot: Literal,
    trail: &impl TrailView,
    partial: bool,
) -> PBConstraint {
    let r = saturate(reason);
    let alpha = pivot_coefficient(&r, pivot).clone();
    let mut degree = r.degree().clone();
    let mut terms = Vec::with_capacity(r.len());
    for t in r.terms() {
        let rem = t.coef.mod_floor(&alpha);
        if t.lit == pivot || rem.is_zero() || trail.is_false(t.lit) {
            terms.push(t.clone());
        } else if partial {
            degree -= &rem;
            let coef = &t.coef - &rem;
            if !coef.is_zero() {
                terms.push(Term { coef, lit: t.lit });
            }
        } else {
            degree -= &t.coef;
        }
    }
    let weakened = match Derived::from_parts(terms, degree) {
        Derived::Constraint(c) => c,
        Derived::TriviallyTrue => unreachable!("weakening a propagating reason keeps a positive degree"),
    };
    divide_ceil(&weakened, &alpha).expect("pivot coefficient is positive")
}

/// RoundingSat-style reduction: drop every unfalsified non-pivot literal whose coefficient the
/// pivot coefficient does not divide, then divide by the pivot coefficient.
pub fn reduce_reason_rs(reason: &PBConstraint, pivot: Literal, trail: &impl TrailView) -> PBConstraint {
    reduce_by_division(reason, pivot, trail, false)
}

/// Partial-weakening variant of [`reduce_reason_rs`]: lower non-divisible unfalsified
/// coefficients to the next multiple of the pivot coefficient instead of dropping them.
pub fn reduce_reason_prs(reason: &PBConstraint, pivot: Literal, trail: &impl TrailView) -> PBConstraint {
    reduce_by_division(reason, pivot, trail, true)
}

/// Reduces `reason` for cancellation on `pivot` according to `system`.
pub fn reduce_reason(
    system: ProofSystem,
    reason: &PBConstraint,
    pivot: Literal,
    conflict: &PBConstraint,
    trail: &impl TrailView,
) -> PBConstraint {
    match system {
        ProofSystem::GeneralizedResolution => reduce_reason_gr(reason, pivot, conflict, trail),
        ProofSystem::RoundingSat => reduce_reason_rs(reason, pivot, trail),
        ProofSystem::PartialRoundingSat => reduce_reason_prs(reason, pivot, trail),
    }
}

/// Derives an assertive constraint from the conflicting constraint `conflict`.
///
/// On return the engine's trail may have been partially unwound (never below the assertion
/// level); the caller backjumps to `assertion_level` and adds `learned`. Fails with
/// [`SolverError::ConflictAtRoot`] when the conflict cannot be resolved above level 0.
pub fn analyze(
    engine: &mut Engine,
    conflict: ConstraintRef,
    system: ProofSystem,
) -> Result<AnalysisResult, SolverError> {
    let conflict_trail = Assignment::snapshot(engine.trail(), engine.num_vars());
    let original = engine.constraint(conflict).clone();
    let mut running = saturate(&original);
    let mut encountered = vec![original];
    let mut used = vec![conflict];
    let mut eliminated = Vec::new();

    loop {
        let profile = LevelProfile::new(&running, engine.trail());
        let conflict_level = profile
            .conflict_level()
            .expect("running constraint must stay conflicting");
        if conflict_level == 0 {
            return Err(SolverError::ConflictAtRoot);
        }
        if conflict_level < engine.current_level() {
            engine.backjump_to(conflict_level);
            continue;
        }
        if let Some(level) = profile.propagation_level() {
            debug_assert!(level < engine.current_level());
            return Ok(AnalysisResult {
                learned: running,
                assertion_level: level,
                encountered,
                used,
                eliminated,
                conflict_trail,
            });
        }
        drop(profile);

        // Literals the running constraint does not mention change nothing; skip them.
        let top = loop {
            let top = engine.trail().last().expect("a conflict above level 0 has a trail");
            if running.coefficient(!top).is_some() {
                break top;
            }
            engine.pop();
        };
        let reason_ref = engine
            .trail()
            .reason(top.var())
            .expect("decision literal reached before the constraint became assertive");
        let reason = engine.constraint(reason_ref).clone();
        let reduced = reduce_reason(system, &reason, top, &running, engine.trail());
        let resolvent = cancel(&running, &reduced, top.var()).expect("pivot clashes");
        running = match resolvent {
            Derived::Constraint(c) => c,
            Derived::TriviallyTrue => unreachable!("resolvent of a conflict stays conflicting"),
        };
        debug_assert!(running.is_conflicting(engine.trail()));
        encountered.push(reason);
        used.push(reason_ref);
        eliminated.push(top.var());
        engine.pop();
    }
}

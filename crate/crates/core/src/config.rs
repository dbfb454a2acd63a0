//! Solver configuration and named presets.

use std::fmt;

use crate::analysis::ProofSystem;
use crate::deletion::DeletionPolicy;
use crate::heuristics::{BumpMode, BumpStrategy, DEFAULT_GROWTH};
use crate::quality::{LbdVariant, QualityMeasure};
use crate::restarts::RestartPolicy;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub proof_system: ProofSystem,
    pub bump: BumpStrategy,
    pub bump_mode: BumpMode,
    pub deletion: DeletionPolicy,
    pub restart: RestartPolicy,
    /// EVSIDS growth base.
    pub g: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        preset("sat4j-gr-default").expect("built-in preset")
    }
}

pub const PRESETS: [&str; 6] = [
    "sat4j-gr-default",
    "sat4j-gr-best",
    "sat4j-rs-best",
    "sat4j-prs-best",
    "roundingsat-default",
    "roundingsat-best",
];

/// Expands a preset name.
pub fn preset(name: &str) -> Option<SolverConfig> {
    use BumpStrategy::*;
    let cfg = |proof_system, bump, bump_mode, deletion, restart| SolverConfig {
        proof_system,
        bump,
        bump_mode,
        deletion,
        restart,
        g: DEFAULT_GROWTH,
    };
    let delete = |m| DeletionPolicy::Measure(m);
    Some(match name {
        "sat4j-gr-default" => cfg(
            ProofSystem::GeneralizedResolution,
            Default,
            BumpMode::EachTime,
            delete(QualityMeasure::Activity),
            RestartPolicy::PicoSat,
        ),
        "sat4j-gr-best" => cfg(
            ProofSystem::GeneralizedResolution,
            BumpEffective,
            BumpMode::EachTime,
            delete(QualityMeasure::Lbd(LbdVariant::S)),
            RestartPolicy::quality(QualityMeasure::Degree),
        ),
        "sat4j-rs-best" | "sat4j-prs-best" => cfg(
            if name == "sat4j-rs-best" {
                ProofSystem::RoundingSat
            } else {
                ProofSystem::PartialRoundingSat
            },
            BumpAssigned,
            BumpMode::EachTime,
            delete(QualityMeasure::DegreeBits),
            RestartPolicy::PicoSat,
        ),
        "roundingsat-default" => cfg(
            ProofSystem::RoundingSat,
            Default,
            BumpMode::OnceWithEliminatedTwice,
            delete(QualityMeasure::Lbd(LbdVariant::F)),
            RestartPolicy::luby(),
        ),
        "roundingsat-best" => cfg(
            ProofSystem::RoundingSat,
            BumpAssigned,
            BumpMode::EachTime,
            delete(QualityMeasure::Lbd(LbdVariant::E)),
            RestartPolicy::quality(QualityMeasure::Lbd(LbdVariant::E)),
        ),
        _ => return None,
    })
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.g.is_finite() && self.g > 1.0) {
            return Err(format!("growth base g must be a finite number above 1, got {}", self.g));
        }
        self.restart.validate()
    }

    pub fn with_proof_system(mut self, p: ProofSystem) -> Self {
        self.proof_system = p;
        self
    }
}

impl fmt::Display for SolverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.proof_system, self.bump, self.bump_mode, self.deletion, self.restart
        )?;
        if let RestartPolicy::QualityDriven { k, .. } = self.restart {
            write!(f, " k={k}")?;
        }
        write!(f, " g={}", self.g)
    }
}

//! Quality measures for learned constraints. Smaller is better for every measure.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::analysis::effective_literals;
use crate::constraint::PBConstraint;
use crate::error::SolverError;
use crate::literal::Literal;
use crate::trail::TrailView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LbdVariant {
    A,
    S,
    D,
    F,
    E,
}

impl LbdVariant {
    pub const ALL: [LbdVariant; 5] = [LbdVariant::A, LbdVariant::S, LbdVariant::D, LbdVariant::F, LbdVariant::E];

    pub fn suffix(self) -> &'static str {
        match self {
            LbdVariant::A => "a",
            LbdVariant::S => "s",
            LbdVariant::D => "d",
            LbdVariant::F => "f",
            LbdVariant::E => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QualityMeasure {
    Degree,
    DegreeBits,
    Lbd(LbdVariant),
    /// Stored activity; higher activity is better, handled by the deletion module.
    Activity,
}

impl QualityMeasure {
    pub const ALL: [QualityMeasure; 8] = [
        QualityMeasure::Degree,
        QualityMeasure::DegreeBits,
        QualityMeasure::Lbd(LbdVariant::A),
        QualityMeasure::Lbd(LbdVariant::S),
        QualityMeasure::Lbd(LbdVariant::D),
        QualityMeasure::Lbd(LbdVariant::F),
        QualityMeasure::Lbd(LbdVariant::E),
        QualityMeasure::Activity,
    ];

    /// Short name used in strategy flags: `degree`, `degree-bits`, `lbd-a`, ..., `activity`.
    pub fn name(self) -> String {
        match self {
            QualityMeasure::Degree => "degree".into(),
            QualityMeasure::DegreeBits => "degree-bits".into(),
            QualityMeasure::Lbd(v) => format!("lbd-{}", v.suffix()),
            QualityMeasure::Activity => "activity".into(),
        }
    }

    /// Whether the value depends on the assignment.
    pub fn is_trail_dependent(self) -> bool {
        matches!(self, QualityMeasure::Lbd(_))
    }
}

impl fmt::Display for QualityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for QualityMeasure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        QualityMeasure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown quality measure '{s}'"))
    }
}

pub fn degree(c: &PBConstraint) -> BigInt {
    c.degree().clone()
}

pub fn degree_bits(c: &PBConstraint) -> u64 {
    c.degree().bits()
}

fn level_classes(lits: impl Iterator<Item = Literal>, trail: &impl TrailView) -> u64 {
    lits.filter_map(|l| trail.var_level(l.var()))
        .collect::<BTreeSet<u32>>()
        .len() as u64
}

/// Number of distinct decision levels among the literals selected by `variant`.
pub fn lbd(c: &PBConstraint, trail: &impl TrailView, variant: LbdVariant) -> Result<u64, SolverError> {
    let assigned = || c.literals().filter(|l| trail.is_assigned(l.var()));
    Ok(match variant {
        LbdVariant::A => level_classes(assigned(), trail),
        LbdVariant::S => {
            let n = level_classes(assigned(), trail);
            n + u64::from(c.literals().any(|l| !trail.is_assigned(l.var())))
        }
        LbdVariant::D => {
            let n = level_classes(assigned(), trail);
            n + c.literals().filter(|l| !trail.is_assigned(l.var())).count() as u64
        }
        LbdVariant::F => level_classes(c.literals().filter(|&l| trail.is_false(l)), trail),
        LbdVariant::E => level_classes(effective_literals(c, trail)?.into_iter(), trail),
    })
}

/// Value of `measure` on `c`. `Activity` has no intrinsic value and yields zero.
pub fn quality_value(
    measure: QualityMeasure,
    c: &PBConstraint,
    trail: &impl TrailView,
) -> Result<BigInt, SolverError> {
    Ok(match measure {
        QualityMeasure::Degree => degree(c),
        QualityMeasure::DegreeBits => BigInt::from(degree_bits(c)),
        QualityMeasure::Lbd(v) => BigInt::from(lbd(c, trail, v)?),
        QualityMeasure::Activity => BigInt::from(0),
    })
}

//! Learned-constraint database and its periodic reduction.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::constraint::{ConstraintRef, PBConstraint};
use crate::quality::{quality_value, QualityMeasure};
use crate::trail::TrailView;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeletionPolicy {
    NoDeletion,
    Measure(QualityMeasure),
}

impl DeletionPolicy {
    pub fn all() -> Vec<DeletionPolicy> {
        std::iter::once(DeletionPolicy::NoDeletion)
            .chain(QualityMeasure::ALL.into_iter().map(DeletionPolicy::Measure))
            .collect()
    }

    pub fn name(self) -> String {
        match self {
            DeletionPolicy::NoDeletion => "no-deletion".into(),
            DeletionPolicy::Measure(m) => format!("delete-{}", m.name()),
        }
    }

    pub fn measure(self) -> Option<QualityMeasure> {
        match self {
            DeletionPolicy::NoDeletion => None,
            DeletionPolicy::Measure(m) => Some(m),
        }
    }
}

impl fmt::Display for DeletionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for DeletionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "no-deletion" || s == "none" {
            return Ok(DeletionPolicy::NoDeletion);
        }
        s.strip_prefix("delete-")
            .and_then(|m| m.parse().ok())
            .map(DeletionPolicy::Measure)
            .ok_or_else(|| format!("unknown deletion strategy '{s}'"))
    }
}

pub const FIRST_REDUCTION: u64 = 2000;
pub const REDUCTION_STEP: u64 = 300;
const ACTIVITY_GROWTH: f64 = 1.001;
const ACTIVITY_RESCALE: f64 = 1e20;

#[derive(Debug, Clone)]
pub struct LearnedEntry {
    pub cref: ConstraintRef,
    pub activity: f64,
    pub quality: BigInt,
}

#[derive(Debug, Clone)]
pub struct LearnedDb {
    policy: DeletionPolicy,
    /// Entries indexed by constraint reference.
    slots: Vec<Option<LearnedEntry>>,
    len: usize,
    reductions: u64,
    conflicts_since_reduction: u64,
    activity_increment: f64,
    fraction: f64,
}

impl LearnedDb {
    pub fn new(policy: DeletionPolicy) -> Self {
        LearnedDb {
            policy,
            slots: Vec::new(),
            len: 0,
            reductions: 0,
            conflicts_since_reduction: 0,
            activity_increment: 1.0,
            fraction: 0.5,
        }
    }

    /// Changes the deleted share of unlocked entries (default one half).
    pub fn with_fraction(mut self, fraction: f64) -> Self {
        self.fraction = fraction.clamp(0.0, 1.0);
        self
    }

    pub fn policy(&self) -> DeletionPolicy {
        self.policy
    }

    /// Live entries in order of constraint reference.
    pub fn entries(&self) -> impl Iterator<Item = &LearnedEntry> {
        self.slots.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn reductions(&self) -> u64 {
        self.reductions
    }

    pub fn conflicts_since_reduction(&self) -> u64 {
        self.conflicts_since_reduction
    }

    fn measure(&self) -> QualityMeasure {
        self.policy.measure().unwrap_or(QualityMeasure::Activity)
    }

    /// Adds a freshly learned constraint. The quality is computed on `trail`; trail-dependent
    /// measures that are undefined there start at zero.
    pub fn record_learned(&mut self, cref: ConstraintRef, c: &PBConstraint, trail: &impl TrailView) {
        let quality = quality_value(self.measure(), c, trail).unwrap_or_default();
        self.record_with_quality(cref, quality);
    }

    pub fn record_with_quality(&mut self, cref: ConstraintRef, quality: BigInt) {
        let i = cref.index();
        if i >= self.slots.len() {
            self.slots.resize(i + 1, None);
        }
        if self.slots[i].is_none() {
            self.len += 1;
        }
        self.slots[i] = Some(LearnedEntry {
            cref,
            activity: self.activity_increment,
            quality,
        });
    }

    /// Counts a conflict towards the reduction schedule and grows the activity increment.
    pub fn on_conflict(&mut self) {
        self.conflicts_since_reduction += 1;
        self.activity_increment *= ACTIVITY_GROWTH;
        if self.activity_increment > ACTIVITY_RESCALE {
            self.rescale();
        }
    }

    fn rescale(&mut self) {
        for e in self.slots.iter_mut().flatten() {
            e.activity /= ACTIVITY_RESCALE;
        }
        self.activity_increment /= ACTIVITY_RESCALE;
    }

    fn entry_mut(&mut self, cref: ConstraintRef) -> Option<&mut LearnedEntry> {
        self.slots.get_mut(cref.index()).and_then(Option::as_mut)
    }

    pub fn entry(&self, cref: ConstraintRef) -> Option<&LearnedEntry> {
        self.slots.get(cref.index()).and_then(Option::as_ref)
    }

    /// Bumps the activity of a learned constraint taking part in a conflict.
    pub fn bump_activity(&mut self, cref: ConstraintRef) {
        let inc = self.activity_increment;
        if let Some(e) = self.entry_mut(cref) {
            e.activity += inc;
            if e.activity > ACTIVITY_RESCALE {
                self.rescale();
            }
        }
    }

    /// Refreshes an LBD value when the constraint is used as a reason, keeping the minimum.
    pub fn update_on_reason(&mut self, cref: ConstraintRef, c: &PBConstraint, trail: &impl TrailView) {
        let measure = self.measure();
        if !measure.is_trail_dependent() {
            return;
        }
        if let Some(e) = self.entry_mut(cref) {
            if let Ok(q) = quality_value(measure, c, trail) {
                if q < e.quality {
                    e.quality = q;
                }
            }
        }
    }

    pub fn reduction_threshold(&self) -> u64 {
        FIRST_REDUCTION + REDUCTION_STEP * self.reductions
    }

    pub fn should_reduce(&self) -> bool {
        self.policy != DeletionPolicy::NoDeletion
            && self.conflicts_since_reduction >= self.reduction_threshold()
    }

    fn worst_first(&self, a: &LearnedEntry, b: &LearnedEntry) -> Ordering {
        let primary = match self.measure() {
            QualityMeasure::Activity => Ordering::Equal,
            _ => b.quality.cmp(&a.quality),
        };
        primary
            .then(a.activity.total_cmp(&b.activity))
            .then(a.cref.index().cmp(&b.cref.index()))
    }

    /// Removes the worst share of unlocked entries and returns them; the caller deletes them
    /// from the engine.
    pub fn reduce(&mut self, is_locked: impl Fn(ConstraintRef) -> bool) -> Vec<ConstraintRef> {
        let mut unlocked: Vec<&LearnedEntry> =
            self.entries().filter(|e| !is_locked(e.cref)).collect();
        unlocked.sort_by(|a, b| self.worst_first(a, b));
        let count = (unlocked.len() as f64 * self.fraction).floor() as usize;
        let removed: Vec<ConstraintRef> = unlocked[..count].iter().map(|e| e.cref).collect();
        for cref in &removed {
            self.slots[cref.index()] = None;
        }
        self.len -= removed.len();
        self.reductions += 1;
        self.conflicts_since_reduction = 0;
        removed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::literal::Literal;
    use crate::trail::Assignment;

    fn db_with(policy: DeletionPolicy, values: &[(i64, f64)]) -> LearnedDb {
        let mut db = LearnedDb::new(policy);
        for (i, &(q, a)) in values.iter().enumerate() {
            db.record_with_quality(ConstraintRef(i as u32), BigInt::from(q));
            db.slots[i].as_mut().unwrap().activity = a;
        }
        db
    }

    fn crefs(ids: &[u32]) -> Vec<ConstraintRef> {
        ids.iter().map(|&i| ConstraintRef(i)).collect()
    }

    #[test]
    fn schedule() {
        let mut db = LearnedDb::new(DeletionPolicy::Measure(QualityMeasure::Degree));
        for _ in 0..1999 {
            db.on_conflict();
        }
        assert!(!db.should_reduce());
        db.on_conflict();
        assert!(db.should_reduce());
        db.reduce(|_| false);
        db.reduce(|_| false);
        for _ in 0..2599 {
            db.on_conflict();
        }
        assert!(!db.should_reduce());
        db.on_conflict();
        assert!(db.should_reduce());
        assert!(!LearnedDb::new(DeletionPolicy::NoDeletion).should_reduce());
    }

    #[test]
    fn deletes_the_highest_degrees() {
        let mut db = db_with(
            DeletionPolicy::Measure(QualityMeasure::Degree),
            &[(1, 1.0), (6, 1.0), (3, 1.0), (9, 1.0)],
        );
        let mut removed = db.reduce(|_| false);
        removed.sort();
        assert_eq!(removed, crefs(&[1, 3]));
        assert_eq!(db.len(), 2);
    }

    #[test]
    fn locked_entries_survive() {
        let mut db = db_with(DeletionPolicy::Measure(QualityMeasure::Degree), &[(5, 1.0), (7, 1.0)]);
        assert!(db.reduce(|_| true).is_empty());
        assert_eq!(db.len(), 2);
    }

    #[test]
    fn activity_breaks_ties() {
        let mut db = db_with(DeletionPolicy::Measure(QualityMeasure::Lbd(crate::quality::LbdVariant::S)), &[(2, 0.9), (2, 0.1)]);
        assert_eq!(db.reduce(|_| false), crefs(&[1]));
        let mut db = db_with(DeletionPolicy::Measure(QualityMeasure::Activity), &[(0, 5.0), (0, 0.5), (0, 2.0)]);
        assert_eq!(db.reduce(|_| false), crefs(&[1]));
    }

    #[test]
    fn recorded_quality_uses_the_measure() {
        let c = PBConstraint::from_ints(
            &[(5, Literal::from_signed(1)), (5, Literal::from_signed(2)), (1, Literal::from_signed(3))],
            6,
        );
        let t = Assignment::new(3);
        for (m, want) in [(QualityMeasure::Degree, 6), (QualityMeasure::DegreeBits, 3)] {
            let mut db = LearnedDb::new(DeletionPolicy::Measure(m));
            db.record_learned(ConstraintRef(0), &c, &t);
            assert_eq!(db.entries().next().unwrap().quality, BigInt::from(want));
        }
    }

    #[test]
    fn names_round_trip() {
        for p in DeletionPolicy::all() {
            assert_eq!(p.name().parse::<DeletionPolicy>().unwrap(), p);
        }
    }
}

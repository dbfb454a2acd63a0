//! Restart policies: Luby, PicoSAT's inner/outer scheme, and quality-driven restarts.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::quality::QualityMeasure;

pub const LUBY_FACTOR: u64 = 100;
pub const DEFAULT_WINDOW: usize = 100;
pub const DEFAULT_K: f64 = 0.7;
/// Conflicts that must separate two quality-driven restarts.
pub const MIN_QUALITY_RESTART_GAP: u64 = 50;

/// The reluctant-doubling sequence 1, 1, 2, 1, 1, 2, 4, ... (1-based).
pub fn luby(k: u64) -> u64 {
    assert!(k >= 1, "luby is 1-based");
    let mut k = k;
    loop {
        // smallest m with 2^m - 1 >= k
        let m = 64 - k.leading_zeros() as u64;
        if k == (1u64 << m) - 1 {
            return 1u64 << (m - 1);
        }
        k -= (1u64 << (m - 1)) - 1;
    }
}

pub fn luby_limit(k: u64, factor: u64) -> u64 {
    factor * luby(k)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RestartPolicy {
    Luby { factor: u64 },
    PicoSat,
    QualityDriven { measure: QualityMeasure, window: usize, k: f64 },
}

impl RestartPolicy {
    pub fn luby() -> Self {
        RestartPolicy::Luby { factor: LUBY_FACTOR }
    }

    pub fn quality(measure: QualityMeasure) -> Self {
        RestartPolicy::QualityDriven {
            measure,
            window: DEFAULT_WINDOW,
            k: DEFAULT_K,
        }
    }

    /// The nine named policies: Luby, PicoSAT and one per quality measure except activity.
    pub fn all() -> Vec<RestartPolicy> {
        let mut v = vec![RestartPolicy::luby(), RestartPolicy::PicoSat];
        v.extend(
            QualityMeasure::ALL
                .into_iter()
                .filter(|m| *m != QualityMeasure::Activity)
                .map(RestartPolicy::quality),
        );
        v
    }

    pub fn name(&self) -> String {
        match self {
            RestartPolicy::Luby { .. } => "restart-luby".into(),
            RestartPolicy::PicoSat => "restart-picosat".into(),
            RestartPolicy::QualityDriven { measure, .. } => format!("restart-{}", measure.name()),
        }
    }

    /// Replaces K of a quality-driven policy; other policies are unchanged.
    pub fn with_k(self, new_k: f64) -> Self {
        match self {
            RestartPolicy::QualityDriven { measure, window, .. } => RestartPolicy::QualityDriven {
                measure,
                window,
                k: new_k,
            },
            other => other,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            RestartPolicy::Luby { factor } if factor < 1 => Err("Luby factor must be at least 1".into()),
            RestartPolicy::QualityDriven { window, k, .. } => {
                if window < 1 {
                    Err("restart window must be at least 1".into())
                } else if !(k > 0.0 && k < 1.0) {
                    Err(format!("restart K must lie strictly between 0 and 1, got {k}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for RestartPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for RestartPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "restart-luby" | "luby" => Ok(RestartPolicy::luby()),
            "restart-picosat" | "picosat" => Ok(RestartPolicy::PicoSat),
            _ => s
                .strip_prefix("restart-")
                .and_then(|m| m.parse::<QualityMeasure>().ok())
                .filter(|m| *m != QualityMeasure::Activity)
                .map(RestartPolicy::quality)
                .ok_or_else(|| format!("unknown restart policy '{s}'")),
        }
    }
}

/// PicoSAT inner/outer limits.
#[derive(Debug, Clone)]
pub struct PicoSat {
    inner: f64,
    outer: f64,
}

impl Default for PicoSat {
    fn default() -> Self {
        PicoSat {
            inner: 100.0,
            outer: 100.0,
        }
    }
}

impl PicoSat {
    /// Conflict limit until the next restart, advancing the scheme.
    pub fn next_limit(&mut self) -> u64 {
        let limit = self.inner.floor() as u64;
        if self.inner > self.outer {
            self.outer *= 1.1;
            self.inner = 100.0;
        } else {
            self.inner *= 1.1;
        }
        limit
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }
}

/// Averages of recent and all learned-constraint quality values.
#[derive(Debug, Clone)]
pub struct QualityRestartState {
    window: usize,
    k: BigRational,
    recent: VecDeque<BigInt>,
    recent_sum: BigInt,
    global_sum: BigInt,
    global_count: u64,
}

impl QualityRestartState {
    pub fn new(window: usize, k: f64) -> Self {
        QualityRestartState {
            window,
            k: BigRational::from_float(k).expect("finite K"),
            recent: VecDeque::with_capacity(window),
            recent_sum: BigInt::from(0),
            global_sum: BigInt::from(0),
            global_count: 0,
        }
    }

    pub fn on_learn(&mut self, value: BigInt) {
        if self.recent.len() == self.window {
            let old = self.recent.pop_front().expect("full window");
            self.recent_sum -= old;
        }
        self.recent_sum += &value;
        self.global_sum += &value;
        self.global_count += 1;
        self.recent.push_back(value);
    }

    pub fn recent_len(&self) -> usize {
        self.recent.len()
    }

    pub fn global_count(&self) -> u64 {
        self.global_count
    }

    pub fn recent_average(&self) -> Option<BigRational> {
        (!self.recent.is_empty()).then(|| {
            BigRational::new(self.recent_sum.clone(), BigInt::from(self.recent.len()))
        })
    }

    pub fn global_average(&self) -> Option<BigRational> {
        (self.global_count > 0)
            .then(|| BigRational::new(self.global_sum.clone(), BigInt::from(self.global_count)))
    }

    /// Full window and recent average × K above the global average.
    pub fn should_restart(&self) -> bool {
        if self.recent.len() < self.window {
            return false;
        }
        match (self.recent_average(), self.global_average()) {
            (Some(r), Some(g)) => r * &self.k > g,
            _ => false,
        }
    }

    pub fn on_restart(&mut self) {
        self.recent.clear();
        self.recent_sum = BigInt::from(0);
    }
}

#[derive(Debug, Clone)]
enum SchedulerState {
    Luby { factor: u64, index: u64, limit: u64 },
    PicoSat { scheme: PicoSat, limit: u64 },
    Quality(QualityRestartState),
}

/// Decides when the search restarts, counting conflicts since the last restart.
#[derive(Debug, Clone)]
pub struct RestartScheduler {
    policy: RestartPolicy,
    state: SchedulerState,
    conflicts: u64,
}

impl RestartScheduler {
    pub fn new(policy: RestartPolicy) -> Self {
        let state = match policy {
            RestartPolicy::Luby { factor } => SchedulerState::Luby {
                factor,
                index: 1,
                limit: luby_limit(1, factor),
            },
            RestartPolicy::PicoSat => {
                let mut scheme = PicoSat::default();
                let limit = scheme.next_limit();
                SchedulerState::PicoSat { scheme, limit }
            }
            RestartPolicy::QualityDriven { window, k, .. } => {
                SchedulerState::Quality(QualityRestartState::new(window, k))
            }
        };
        RestartScheduler {
            policy,
            state,
            conflicts: 0,
        }
    }

    pub fn policy(&self) -> RestartPolicy {
        self.policy
    }

    /// The measure whose values feed [`RestartScheduler::on_conflict`], if any.
    pub fn measure(&self) -> Option<QualityMeasure> {
        match self.policy {
            RestartPolicy::QualityDriven { measure, .. } => Some(measure),
            _ => None,
        }
    }

    pub fn conflicts_since_restart(&self) -> u64 {
        self.conflicts
    }

    /// Current conflict limit for the static policies.
    pub fn limit(&self) -> Option<u64> {
        match &self.state {
            SchedulerState::Luby { limit, .. } | SchedulerState::PicoSat { limit, .. } => Some(*limit),
            SchedulerState::Quality(_) => None,
        }
    }

    pub fn quality_state(&self) -> Option<&QualityRestartState> {
        match &self.state {
            SchedulerState::Quality(q) => Some(q),
            _ => None,
        }
    }

    /// Records a conflict; `quality` is the learned constraint's value under the policy measure.
    pub fn on_conflict(&mut self, quality: Option<BigInt>) {
        self.conflicts += 1;
        if let (SchedulerState::Quality(q), Some(v)) = (&mut self.state, quality) {
            q.on_learn(v);
        }
    }

    pub fn should_restart(&self) -> bool {
        match &self.state {
            SchedulerState::Luby { limit, .. } | SchedulerState::PicoSat { limit, .. } => {
                self.conflicts >= *limit
            }
            SchedulerState::Quality(q) => {
                self.conflicts >= MIN_QUALITY_RESTART_GAP && q.should_restart()
            }
        }
    }

    pub fn on_restart(&mut self) {
        self.conflicts = 0;
        match &mut self.state {
            SchedulerState::Luby { factor, index, limit } => {
                *index += 1;
                *limit = luby_limit(*index, *factor);
            }
            SchedulerState::PicoSat { scheme, limit } => *limit = scheme.next_limit(),
            SchedulerState::Quality(q) => q.on_restart(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luby_examples() {
        let got: Vec<u64> = (1..=7).map(|k| luby_limit(k, 100)).collect();
        assert_eq!(got, vec![100, 100, 200, 100, 100, 200, 400]);
        assert_eq!(luby_limit(7, 1), 4);
        assert_eq!(luby_limit(15, 1), 8);
    }

    #[test]
    fn picosat_limits() {
        let mut p = PicoSat::default();
        let got: Vec<u64> = (0..6).map(|_| p.next_limit()).collect();
        assert_eq!(got, vec![100, 110, 100, 110, 121, 100]);
        let mut outer = p.outer();
        for _ in 0..500 {
            assert!(p.next_limit() >= 100);
            assert!(p.outer() >= outer);
            outer = p.outer();
        }
    }

    fn filled(recent: i64, global_extra: &[i64]) -> QualityRestartState {
        let mut q = QualityRestartState::new(100, 0.7);
        for &v in global_extra {
            q.on_learn(BigInt::from(v));
        }
        for _ in 0..100 {
            q.on_learn(BigInt::from(recent));
        }
        q
    }

    #[test]
    fn quality_trigger() {
        // recent average 10, global average 6: 7 > 6
        let q = filled(10, &[2; 100]);
        assert_eq!(q.global_average(), Some(BigRational::from_integer(6.into())));
        assert!(q.should_restart());
        // recent average 8, global average 6: 5.6 > 6 fails
        let q = filled(8, &[4; 100]);
        assert!(!q.should_restart());
        let mut q = QualityRestartState::new(100, 0.7);
        for _ in 0..99 {
            q.on_learn(BigInt::from(1000));
        }
        q.on_learn(BigInt::from(0));
        q.on_learn(BigInt::from(1000));
        assert_eq!(q.recent_len(), 100);
        assert_eq!(q.global_count(), 101);
        q.on_restart();
        assert_eq!(q.recent_len(), 0);
        assert_eq!(q.global_count(), 101);
        assert!(!q.should_restart());
    }

    #[test]
    fn scheduler_follows_luby() {
        let mut s = RestartScheduler::new(RestartPolicy::luby());
        let mut restarts_at = Vec::new();
        for c in 1..=500 {
            s.on_conflict(None);
            if s.should_restart() {
                restarts_at.push(c);
                s.on_restart();
            }
        }
        assert_eq!(restarts_at, vec![100, 200, 400, 500]);
    }

    #[test]
    fn quality_restarts_keep_a_gap() {
        let mut s = RestartScheduler::new(RestartPolicy::quality(QualityMeasure::Degree));
        for _ in 0..100 {
            s.on_conflict(Some(BigInt::from(1)));
        }
        for _ in 0..100 {
            s.on_conflict(Some(BigInt::from(100)));
        }
        assert!(s.should_restart());
        s.on_restart();
        for _ in 0..49 {
            s.on_conflict(Some(BigInt::from(100)));
        }
        assert!(!s.should_restart());
    }

    #[test]
    fn names_round_trip() {
        for p in RestartPolicy::all() {
            assert_eq!(p.name().parse::<RestartPolicy>().unwrap(), p);
        }
        assert!("restart-activity".parse::<RestartPolicy>().is_err());
    }
}

//! EVSIDS branching with pseudo-Boolean aware bumping strategies.
//!
//! Each conflict `i` bumps variables by `g^i` (times a strategy-dependent multiplier); the
//! unassigned variable with the highest score is branched on next. Scores only grow, so instead
//! of decaying old scores the increment is grown by `g` after every conflict, and everything is
//! rescaled once a score gets too large.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::analysis::effective_literals;
use crate::constraint::PBConstraint;
use crate::literal::{Literal, Var};
use crate::trail::TrailView;

/// Which variables of an encountered constraint get bumped, and by how much.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BumpStrategy {
    Default,
    BumpDegree,
    BumpCoefficient,
    BumpRatioCoefficientDegree,
    BumpRatioDegreeCoefficient,
    BumpAssigned,
    BumpFalsified,
    BumpEffective,
}

impl BumpStrategy {
    pub const ALL: [BumpStrategy; 8] = [
        BumpStrategy::Default,
        BumpStrategy::BumpDegree,
        BumpStrategy::BumpCoefficient,
        BumpStrategy::BumpRatioCoefficientDegree,
        BumpStrategy::BumpRatioDegreeCoefficient,
        BumpStrategy::BumpAssigned,
        BumpStrategy::BumpFalsified,
        BumpStrategy::BumpEffective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BumpStrategy::Default => "default",
            BumpStrategy::BumpDegree => "bump-degree",
            BumpStrategy::BumpCoefficient => "bump-coefficient",
            BumpStrategy::BumpRatioCoefficientDegree => "bump-ratio-coefficient-degree",
            BumpStrategy::BumpRatioDegreeCoefficient => "bump-ratio-degree-coefficient",
            BumpStrategy::BumpAssigned => "bump-assigned",
            BumpStrategy::BumpFalsified => "bump-falsified",
            BumpStrategy::BumpEffective => "bump-effective",
        }
    }
}

impl fmt::Display for BumpStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BumpStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        BumpStrategy::ALL
            .into_iter()
            .find(|b| b.name() == s || (s == "bump-default" && *b == BumpStrategy::Default))
            .ok_or_else(|| format!("unknown bumping strategy '{s}'"))
    }
}

/// How often a variable may be bumped within one conflict analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BumpMode {
    /// Every time it appears in an encountered constraint.
    EachTime,
    /// Once per conflict, plus once more if it is eliminated by cancellation.
    OnceWithEliminatedTwice,
}

impl BumpMode {
    pub fn name(self) -> &'static str {
        match self {
            BumpMode::EachTime => "each-time",
            BumpMode::OnceWithEliminatedTwice => "once-eliminated-twice",
        }
    }
}

impl fmt::Display for BumpMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BumpMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "each-time" => Ok(BumpMode::EachTime),
            "once-eliminated-twice" | "once" => Ok(BumpMode::OnceWithEliminatedTwice),
            _ => Err(format!(
                "unknown bump mode '{s}' (expected each-time or once-eliminated-twice)"
            )),
        }
    }
}

/// Variables of `c` that `strategy` bumps under `trail`, in term order.
pub fn eligible_vars(strategy: BumpStrategy, c: &PBConstraint, trail: &impl TrailView) -> Vec<Var> {
    match strategy {
        BumpStrategy::BumpAssigned => c.vars().filter(|&v| trail.is_assigned(v)).collect(),
        BumpStrategy::BumpFalsified => c
            .literals()
            .filter(|&l| trail.is_false(l))
            .map(Literal::var)
            .collect(),
        BumpStrategy::BumpEffective => effective_literals(c, trail)
            .map(|ls| ls.into_iter().map(Literal::var).collect())
            .unwrap_or_default(),
        _ => c.vars().collect(),
    }
}

/// Factor applied to the increment when bumping a literal with coefficient `coef` in a
/// constraint of degree `degree`.
pub fn multiplier(strategy: BumpStrategy, coef: &BigInt, degree: &BigInt) -> BigRational {
    match strategy {
        BumpStrategy::BumpDegree => BigRational::from_integer(degree.clone()),
        BumpStrategy::BumpCoefficient => BigRational::from_integer(coef.clone()),
        BumpStrategy::BumpRatioCoefficientDegree => BigRational::new(coef.clone(), degree.clone()),
        BumpStrategy::BumpRatioDegreeCoefficient => BigRational::new(degree.clone(), coef.clone()),
        _ => BigRational::one(),
    }
}

/// Default growth base of the increment.
pub const DEFAULT_GROWTH: f64 = 1.05;
const RESCALE_THRESHOLD: f64 = 1e100;
const RESCALE_FACTOR: f64 = 1e-100;

/// EVSIDS scores with a max-heap over variables.
#[derive(Debug, Clone)]
pub struct Evsids {
    scores: Vec<f64>,
    growth: f64,
    increment: f64,
    conflict_index: u64,
    insertion: Vec<u32>,
    heap: Vec<Var>,
    /// Heap position per variable, `usize::MAX` when absent.
    position: Vec<usize>,
    /// Per-conflict bump counters for [`BumpMode::OnceWithEliminatedTwice`].
    bumped: Vec<bool>,
    bumped_list: Vec<Var>,
    rescales: u64,
}

impl Evsids {
    /// Scores for variables `1..=num_vars`, all zero, with increment growth base `growth`.
    pub fn new(num_vars: usize, growth: f64) -> Self {
        let mut e = Evsids {
            scores: vec![0.0; num_vars + 1],
            growth,
            increment: 1.0,
            conflict_index: 0,
            insertion: (0..=num_vars as u32).collect(),
            heap: Vec::with_capacity(num_vars),
            position: vec![usize::MAX; num_vars + 1],
            bumped: vec![false; num_vars + 1],
            bumped_list: Vec::new(),
            rescales: 0,
        };
        for id in 1..=num_vars {
            e.insert(Var::new(id as u32));
        }
        e
    }

    pub fn score(&self, var: Var) -> f64 {
        self.scores[var.index()]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores[1..]
    }

    pub fn increment(&self) -> f64 {
        self.increment
    }

    pub fn conflict_index(&self) -> u64 {
        self.conflict_index
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }

    pub fn rescales(&self) -> u64 {
        self.rescales
    }

    /// Overrides a score, e.g. to set up a test scenario.
    pub fn set_score(&mut self, var: Var, score: f64) {
        self.scores[var.index()] = score;
        self.rebuild_heap();
    }

    /// Multiplies every score and the increment by `factor`.
    pub fn scale(&mut self, factor: f64) {
        for s in &mut self.scores {
            *s *= factor;
        }
        self.increment *= factor;
    }

    /// Bumps the eligible variables of an encountered constraint.
    pub fn bump_constraint(
        &mut self,
        c: &PBConstraint,
        trail: &impl TrailView,
        strategy: BumpStrategy,
        mode: BumpMode,
    ) {
        for var in eligible_vars(strategy, c, trail) {
            if mode == BumpMode::OnceWithEliminatedTwice {
                if self.bumped[var.index()] {
                    continue;
                }
                self.bumped[var.index()] = true;
                self.bumped_list.push(var);
            }
            let term = c.term_of(var).expect("eligible variables occur in the constraint");
            let amount = self.amount(strategy, &term.coef, c.degree());
            self.bump_var(var, amount);
        }
    }

    /// Extra bump for a variable eliminated by cancellation (once-eliminated-twice mode only).
    pub fn bump_eliminated(&mut self, var: Var, mode: BumpMode) {
        if mode == BumpMode::OnceWithEliminatedTwice {
            self.bump_var(var, self.increment);
        }
    }

    fn amount(&self, strategy: BumpStrategy, coef: &BigInt, degree: &BigInt) -> f64 {
        match strategy {
            BumpStrategy::BumpDegree => self.increment * degree.to_f64().unwrap_or(f64::MAX),
            BumpStrategy::BumpCoefficient => self.increment * coef.to_f64().unwrap_or(f64::MAX),
            BumpStrategy::BumpRatioCoefficientDegree | BumpStrategy::BumpRatioDegreeCoefficient => {
                let inc = BigRational::from_float(self.increment).expect("finite increment");
                (inc * multiplier(strategy, coef, degree))
                    .to_f64()
                    .unwrap_or(f64::MAX)
            }
            _ => self.increment,
        }
    }

    fn bump_var(&mut self, var: Var, amount: f64) {
        let i = var.index();
        self.scores[i] += amount;
        if self.position[i] != usize::MAX {
            self.sift_up(self.position[i]);
        }
        if self.scores[i] > RESCALE_THRESHOLD {
            self.rescale();
        }
    }

    fn rescale(&mut self) {
        self.scale(RESCALE_FACTOR);
        self.rescales += 1;
    }

    /// Closes a conflict: the increment becomes `g^(i+1)`.
    pub fn on_conflict_processed(&mut self) {
        self.conflict_index += 1;
        self.increment *= self.growth;
        if self.increment > RESCALE_THRESHOLD {
            self.rescale();
        }
        for v in self.bumped_list.drain(..) {
            self.bumped[v.index()] = false;
        }
    }

    /// Makes an unassigned variable selectable again.
    pub fn reinsert(&mut self, var: Var) {
        if self.position[var.index()] == usize::MAX {
            self.insert(var);
        }
    }

    /// Highest-scored unassigned variable (ties: insertion order, then id), with its saved phase.
    pub fn pick_branch_literal<T: TrailView>(
        &mut self,
        trail: &T,
        phase: impl Fn(Var) -> bool,
    ) -> Option<Literal> {
        while let Some(&top) = self.heap.first() {
            if !trail.is_assigned(top) {
                return Some(Literal::new(top, phase(top)));
            }
            self.pop_top();
        }
        None
    }

    // --- indexed binary heap ---

    fn better(&self, a: Var, b: Var) -> bool {
        let (sa, sb) = (self.scores[a.index()], self.scores[b.index()]);
        if sa != sb {
            return sa > sb;
        }
        let (ia, ib) = (self.insertion[a.index()], self.insertion[b.index()]);
        if ia != ib {
            return ia < ib;
        }
        a < b
    }

    fn insert(&mut self, var: Var) {
        self.position[var.index()] = self.heap.len();
        self.heap.push(var);
        self.sift_up(self.heap.len() - 1);
    }

    fn pop_top(&mut self) {
        let last = self.heap.len() - 1;
        self.heap.swap(0, last);
        let removed = self.heap.pop().expect("non-empty heap");
        self.position[removed.index()] = usize::MAX;
        if !self.heap.is_empty() {
            self.position[self.heap[0].index()] = 0;
            self.sift_down(0);
        }
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.better(self.heap[i], self.heap[parent]) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && self.better(self.heap[l], self.heap[best]) {
                best = l;
            }
            if r < self.heap.len() && self.better(self.heap[r], self.heap[best]) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.position[self.heap[i].index()] = i;
        self.position[self.heap[j].index()] = j;
    }

    fn rebuild_heap(&mut self) {
        let vars: Vec<Var> = self.heap.drain(..).collect();
        for v in &vars {
            self.position[v.index()] = usize::MAX;
        }
        for v in vars {
            self.insert(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trail::Assignment;

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

    fn bump_trail() -> Assignment {
        Assignment::new(6)
            .with(v(1), false, 3)
            .with(v(2), true, 3)
            .with(v(5), false, 1)
            .with(v(6), true, 2)
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(big(n), big(d))
    }

    #[test]
    fn eligible_sets_of_the_bump_example() {
        let (c, t) = (running(), bump_trail());
        assert_eq!(
            eligible_vars(BumpStrategy::BumpAssigned, &c, &t),
            vec![v(1), v(2), v(5), v(6)]
        );
        assert_eq!(eligible_vars(BumpStrategy::BumpFalsified, &c, &t), vec![v(1), v(5)]);
        assert_eq!(eligible_vars(BumpStrategy::BumpEffective, &c, &t), vec![v(1)]);
        assert_eq!(eligible_vars(BumpStrategy::Default, &c, &t).len(), 6);
    }

    #[test]
    fn multipliers_of_the_bump_example() {
        let (five, six) = (big(5), big(6));
        assert_eq!(multiplier(BumpStrategy::BumpDegree, &five, &six), ratio(6, 1));
        assert_eq!(multiplier(BumpStrategy::BumpCoefficient, &five, &six), ratio(5, 1));
        assert_eq!(multiplier(BumpStrategy::BumpRatioCoefficientDegree, &five, &six), ratio(5, 6));
        assert_eq!(multiplier(BumpStrategy::BumpRatioDegreeCoefficient, &five, &six), ratio(6, 5));
        for s in BumpStrategy::ALL {
            assert_eq!(multiplier(s, &big(1), &big(1)), ratio(1, 1));
        }
    }

    #[test]
    fn clause_bump_matches_textbook_evsids() {
        let mut e = Evsids::new(3, 1.05);
        let clause = PBConstraint::clause(&[l(1), l(-2)]);
        e.bump_constraint(&clause, &Assignment::new(3), BumpStrategy::Default, BumpMode::EachTime);
        assert_eq!((e.score(v(1)), e.score(v(2)), e.score(v(3))), (1.0, 1.0, 0.0));
    }

    #[test]
    fn bump_effective_only_touches_a() {
        let mut e = Evsids::new(6, 1.05);
        e.bump_constraint(&running(), &bump_trail(), BumpStrategy::BumpEffective, BumpMode::EachTime);
        assert_eq!(e.score(v(1)), 1.0);
        assert!((2..=6).all(|i| e.score(v(i)) == 0.0));
    }

    #[test]
    fn once_mode_bumps_once_unless_eliminated() {
        let mut e = Evsids::new(3, 1.05);
        let c = PBConstraint::clause(&[l(1), l(2)]);
        let t = Assignment::new(3);
        let mode = BumpMode::OnceWithEliminatedTwice;
        e.bump_constraint(&c, &t, BumpStrategy::Default, mode);
        e.bump_constraint(&c, &t, BumpStrategy::Default, mode);
        assert_eq!(e.score(v(1)), 1.0);
        e.bump_eliminated(v(2), mode);
        assert_eq!(e.score(v(2)), 2.0);
        // the seen-set resets with the next conflict
        e.on_conflict_processed();
        e.bump_constraint(&c, &t, BumpStrategy::Default, mode);
        assert!((e.score(v(1)) - 2.05).abs() < 1e-12);
    }

    #[test]
    fn increment_is_geometric() {
        let mut e = Evsids::new(1, 1.05);
        let mut seen = vec![e.increment()];
        for _ in 0..2 {
            e.on_conflict_processed();
            seen.push(e.increment());
        }
        assert_eq!(seen[0], 1.0);
        assert!((seen[1] - 1.05).abs() < 1e-12);
        assert!((seen[2] - 1.1025).abs() < 1e-12);
        assert_eq!(e.conflict_index(), 2);
    }

    #[test]
    fn rescaling_keeps_the_order_and_bounds_scores() {
        let mut e = Evsids::new(3, 1.2);
        e.set_score(v(1), 3e99);
        e.set_score(v(2), 8e99);
        e.bump_var(v(2), 5e99);
        assert_eq!(e.rescales(), 1);
        assert!(e.scores().iter().all(|&s| s < RESCALE_THRESHOLD));
        let t = Assignment::new(3);
        assert_eq!(e.pick_branch_literal(&t, |_| false).map(Literal::var), Some(v(2)));
        assert!(e.score(v(1)) < e.score(v(2)));
    }

    #[test]
    fn pick_examples() {
        let t = Assignment::new(2);
        let mut e = Evsids::new(2, 1.05);
        e.set_score(v(1), 3.0);
        e.set_score(v(2), 5.0);
        assert_eq!(e.pick_branch_literal(&t, |_| false), Some(l(-2)));

        let mut e = Evsids::new(2, 1.05);
        assert_eq!(e.pick_branch_literal(&t, |_| true), Some(l(1)));

        let full = Assignment::new(2).with(v(1), true, 1).with(v(2), true, 1);
        assert_eq!(e.pick_branch_literal(&full, |_| false), None);
    }

    #[test]
    fn reinserted_variables_become_selectable() {
        let mut e = Evsids::new(2, 1.05);
        let t = Assignment::new(2).with(v(1), true, 1);
        assert_eq!(e.pick_branch_literal(&t, |_| false).map(Literal::var), Some(v(2)));
        e.reinsert(v(1));
        assert_eq!(e.pick_branch_literal(&Assignment::new(2), |_| false).map(Literal::var), Some(v(1)));
    }
}

//! State spaces and closed subsets made of finitely many intervals.

use serde::{Deserialize, Serialize};

use crate::EPS_DOM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceKind {
    /// `[0, 1]` with `|x − y|`.
    UnitInterval,
    /// `ℝ/ℤ`, points stored as representatives in `[0, 1)`.
    Circle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateSpace {
    pub kind: SpaceKind,
}

impl StateSpace {
    pub const UNIT_INTERVAL: StateSpace = StateSpace {
        kind: SpaceKind::UnitInterval,
    };
    pub const CIRCLE: StateSpace = StateSpace {
        kind: SpaceKind::Circle,
    };

    /// Brings a point to its canonical representative.
    pub fn normalize(&self, x: f64) -> f64 {
        match self.kind {
            SpaceKind::UnitInterval => x,
            SpaceKind::Circle => {
                let r = x.rem_euclid(1.0);
                // rem_euclid can round up to exactly 1.0 for tiny negative inputs
                if r >= 1.0 {
                    0.0
                } else {
                    r
                }
            }
        }
    }

    pub fn metric(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            SpaceKind::UnitInterval => (x - y).abs(),
            SpaceKind::Circle => {
                // |x − y| first keeps the result bitwise symmetric
                let d = (x - y).abs().rem_euclid(1.0);
                d.min(1.0 - d)
            }
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match self.kind {
            SpaceKind::UnitInterval => (-EPS_DOM..=1.0 + EPS_DOM).contains(&x),
            SpaceKind::Circle => x.is_finite(),
        }
    }

    /// The whole space as an interval set.
    pub fn whole(&self) -> IntervalSet {
        IntervalSet::new(*self, vec![Interval::new(0.0, 1.0)])
    }

    /// Evenly spaced sample of the whole space.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        self.whole().grid(count)
    }
}

/// A closed interval `[lo, hi]`.
///
/// On the circle this is the arc starting at `lo` and running
/// counter-clockwise for length `hi − lo ∈ [0, 1]`, so `hi` may exceed 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, space: &StateSpace, x: f64, eps: f64) -> bool {
        match space.kind {
            SpaceKind::UnitInterval => x >= self.lo - eps && x <= self.hi + eps,
            SpaceKind::Circle => {
                if self.length() >= 1.0 - eps {
                    return true;
                }
                let offset = (x - self.lo).rem_euclid(1.0);
                offset <= self.length() + eps
                    || space.metric(x, self.lo) <= eps
                    || space.metric(x, self.hi) <= eps
            }
        }
    }
}

/// A finite union of closed intervals in a state space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    pub space: StateSpace,
    pub intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new(space: StateSpace, intervals: Vec<Interval>) -> Self {
        IntervalSet { space, intervals }
    }

    pub fn empty(space: StateSpace) -> Self {
        IntervalSet {
            space,
            intervals: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.contains_within(x, EPS_DOM)
    }

    pub fn contains_within(&self, x: f64, eps: f64) -> bool {
        self.intervals
            .iter()
            .any(|iv| iv.contains(&self.space, x, eps))
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    /// Merges overlapping intervals; on the unit interval the result is sorted.
    pub fn normalized(&self) -> IntervalSet {
        let mut ivs = self.intervals.clone();
        if self.space.kind == SpaceKind::Circle {
            ivs.dedup_by(|a, b| a == b);
            return IntervalSet::new(self.space, ivs);
        }
        ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(ivs.len());
        for iv in ivs {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi + EPS_DOM => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        IntervalSet::new(self.space, merged)
    }

    /// `count` points spread evenly along the set, including interval
    /// endpoints. A set of total length zero yields each distinct point once.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        let set = self.normalized();
        if set.is_empty() || count == 0 {
            return Vec::new();
        }
        let total = set.total_length();
        let mut out = Vec::with_capacity(count);
        if total <= 0.0 {
            for iv in &set.intervals {
                out.push(self.space.normalize(iv.lo));
            }
        } else if count == 1 {
            out.push(self.space.normalize(set.intervals[0].lo));
        } else {
            let step = total / (count - 1) as f64;
            for i in 0..count {
                let mut s = (i as f64 * step).min(total);
                let mut placed = None;
                for iv in &set.intervals {
                    if s <= iv.length() {
                        placed = Some(iv.lo + s);
                        break;
                    }
                    s -= iv.length();
                }
                let x = placed.unwrap_or(set.intervals[set.intervals.len() - 1].hi);
                out.push(self.space.normalize(x));
            }
        }
        dedup_points(&self.space, out)
    }
}

fn dedup_points(space: &StateSpace, points: Vec<f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|&q| space.metric(p, q) <= EPS_DOM) {
            out.push(p);
        }
    }
    out
}

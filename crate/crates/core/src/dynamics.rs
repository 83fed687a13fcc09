//! Partial maps with enumerable preimage branches.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::space::{Interval, IntervalSet, StateSpace};
use crate::{Error, Result, EPS_CHAIN, EPS_DOM};

pub type MapFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BranchLabel {
    Left,
    Right,
    /// The double preimage at a critical value.
    Critical,
    /// The unique branch of an invertible map.
    Only,
    Other(u16),
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchLabel::Left => f.write_str("L"),
            BranchLabel::Right => f.write_str("R"),
            BranchLabel::Critical => f.write_str("C"),
            BranchLabel::Only => f.write_str("only"),
            BranchLabel::Other(i) => write!(f, "b{i}"),
        }
    }
}

/// One monotone piece of the map together with its inverse.
#[derive(Clone)]
pub struct Branch {
    pub label: BranchLabel,
    pub domain: Interval,
    /// Values `y` for which `inverse(y)` is a genuine preimage.
    pub range: Interval,
    pub inverse: MapFn,
}

impl fmt::Debug for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Branch")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("range", &self.range)
            .finish_non_exhaustive()
    }
}

/// A continuous map `α: Δ → M` with its preimage branches.
///
/// Branches labelled [`BranchLabel::Critical`] take precedence: when one of
/// them covers `y`, only critical preimages are returned, so a double root
/// shows up once.
#[derive(Clone)]
pub struct PartialMapSystem {
    pub name: String,
    pub space: StateSpace,
    pub domain: IntervalSet,
    pub forward: MapFn,
    pub branches: Vec<Branch>,
}

impl fmt::Debug for PartialMapSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PartialMapSystem")
            .field("name", &self.name)
            .field("space", &self.space)
            .field("domain", &self.domain)
            .field("branches", &self.branches)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub points: Vec<f64>,
    pub escaped: bool,
}

impl PartialMapSystem {
    pub fn new(
        name: impl Into<String>,
        space: StateSpace,
        domain: IntervalSet,
        forward: MapFn,
        branches: Vec<Branch>,
    ) -> Self {
        PartialMapSystem {
            name: name.into(),
            space,
            domain,
            forward,
            branches,
        }
    }

    /// Rigid rotation `x ↦ x + τ` of the circle.
    pub fn rotation(tau: f64) -> Self {
        let space = StateSpace::CIRCLE;
        PartialMapSystem::new(
            format!("rotation({tau})"),
            space,
            space.whole(),
            Arc::new(move |x| x + tau),
            vec![Branch {
                label: BranchLabel::Only,
                domain: Interval::new(0.0, 1.0),
                range: Interval::new(0.0, 1.0),
                inverse: Arc::new(move |y| y - tau),
            }],
        )
    }

    /// The constant map of `[0, 1]` onto `p`.
    ///
    /// Every point is a preimage of `p`; the single branch reports `p`
    /// itself, which is the only preimage that continues backward.
    pub fn constant(p: f64) -> Self {
        let space = StateSpace::UNIT_INTERVAL;
        PartialMapSystem::new(
            format!("constant({p})"),
            space,
            space.whole(),
            Arc::new(move |_| p),
            vec![Branch {
                label: BranchLabel::Critical,
                domain: Interval::new(0.0, 1.0),
                range: Interval::point(p),
                inverse: Arc::new(move |_| p),
            }],
        )
    }

    pub fn in_domain(&self, x: f64) -> bool {
        self.domain.contains(x)
    }

    /// `α(x)`, normalized into the state space.
    pub fn apply(&self, x: f64) -> Result<f64> {
        if !self.in_domain(x) {
            return Err(Error::OutsideDomain { x });
        }
        Ok(self.space.normalize((self.forward)(x)))
    }

    /// Every preimage of `y`, one per branch whose range contains `y`.
    pub fn preimages(&self, y: f64) -> Vec<(BranchLabel, f64)> {
        let covering = |b: &&Branch| b.range.contains(&self.space, y, EPS_DOM);
        let critical: Vec<&Branch> = self
            .branches
            .iter()
            .filter(covering)
            .filter(|b| b.label == BranchLabel::Critical)
            .collect();
        let chosen: Vec<&Branch> = if critical.is_empty() {
            self.branches.iter().filter(covering).collect()
        } else {
            critical
        };
        let mut out: Vec<(BranchLabel, f64)> = Vec::with_capacity(chosen.len());
        for b in chosen {
            let x = self.space.normalize((b.inverse)(y));
            if !out.iter().any(|&(_, q)| self.space.metric(q, x) <= EPS_CHAIN) {
                out.push((b.label, x));
            }
        }
        out
    }

    /// Union of the branch ranges, i.e. the image `α(Δ)`.
    pub fn image(&self) -> IntervalSet {
        IntervalSet::new(self.space, self.branches.iter().map(|b| b.range).collect()).normalized()
    }

    /// Forward orbit of length at most `n + 1`; stops early if it leaves `Δ`.
    pub fn orbit(&self, x: f64, n: usize) -> OrbitRecord {
        let mut points = Vec::with_capacity(n + 1);
        let mut cur = self.space.normalize(x);
        points.push(cur);
        for _ in 0..n {
            match self.apply(cur) {
                Ok(next) => {
                    cur = next;
                    points.push(cur);
                }
                Err(_) => {
                    return OrbitRecord {
                        points,
                        escaped: true,
                    }
                }
            }
        }
        OrbitRecord {
            points,
            escaped: false,
        }
    }

    /// Cluster representatives of the orbit tail after `transient` steps.
    pub fn omega_limit(
        &self,
        x: f64,
        transient: usize,
        iters: usize,
        cluster_eps: f64,
    ) -> Result<Vec<f64>> {
        let mut cur = self.space.normalize(x);
        for step in 0..transient {
            cur = self
                .apply(cur)
                .map_err(|_| Error::OrbitEscaped { step })?;
        }
        let mut reps: Vec<f64> = Vec::new();
        for step in 0..iters {
            if !reps.iter().any(|&r| self.space.metric(r, cur) < cluster_eps) {
                reps.push(cur);
            }
            cur = self.apply(cur).map_err(|_| Error::OrbitEscaped {
                step: transient + step,
            })?;
        }
        reps.sort_by(f64::total_cmp);
        Ok(reps)
    }
}

/// Anything that can serve as the upstairs system of a semiconjugacy.
pub trait PartialDynamics {
    type Point: Clone;

    fn contains(&self, p: &Self::Point) -> bool;
    fn step(&self, p: &Self::Point) -> Result<Self::Point>;
    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;
}

impl PartialDynamics for PartialMapSystem {
    type Point = f64;

    fn contains(&self, p: &f64) -> bool {
        self.in_domain(*p)
    }

    fn step(&self, p: &f64) -> Result<f64> {
        self.apply(*p)
    }

    fn distance(&self, a: &f64, b: &f64) -> f64 {
        self.space.metric(*a, *b)
    }
}

/// A sampled map `Ψ` from an upstairs system to a base system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorMapSample<P> {
    pub pairs: Vec<(P, f64)>,
    pub tolerance: f64,
}

impl<P: Clone> FactorMapSample<P> {
    /// Tabulates `psi` on `points` and on their images under the upstairs
    /// map, so that `Ψ(β(x))` can be looked up for every sampled `x`.
    pub fn tabulate<D, F>(upstairs: &D, points: &[P], psi: F, tolerance: f64) -> Self
    where
        D: PartialDynamics<Point = P>,
        F: Fn(&P) -> f64,
    {
        let mut pairs: Vec<(P, f64)> = points.iter().map(|p| (p.clone(), psi(p))).collect();
        for p in points {
            if upstairs.contains(p) {
                if let Ok(q) = upstairs.step(p) {
                    let v = psi(&q);
                    pairs.push((q, v));
                }
            }
        }
        FactorMapSample { pairs, tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemiconjugacyReport {
    /// Largest `d(α(Ψ(x)), Ψ(β(x)))` over sampled `x ∈ Δ_β`.
    pub max_residual: f64,
    pub checked: usize,
    /// Pairs whose image `β(x)` had no tabulated source.
    pub unmatched: usize,
    pub in_domain: usize,
    pub out_of_domain: usize,
    /// Pairs breaking `x ∈ Δ_β ⇔ Ψ(x) ∈ Δ_α`.
    pub domain_violations: Vec<usize>,
    /// Pairs whose residual exceeds the sample tolerance.
    pub residual_violations: Vec<usize>,
}

impl SemiconjugacyReport {
    pub fn ok(&self) -> bool {
        self.domain_violations.is_empty() && self.residual_violations.is_empty()
    }
}

/// Checks `α∘Ψ = Ψ∘β` and `Ψ⁻¹(Δ_α) = Δ_β` on a sample of `Ψ`.
pub fn check_semiconjugacy<D: PartialDynamics>(
    psi: &FactorMapSample<D::Point>,
    upstairs: &D,
    downstairs: &PartialMapSystem,
) -> SemiconjugacyReport {
    let mut report = SemiconjugacyReport {
        max_residual: 0.0,
        checked: 0,
        unmatched: 0,
        in_domain: 0,
        out_of_domain: 0,
        domain_violations: Vec::new(),
        residual_violations: Vec::new(),
    };
    let lookup = |q: &D::Point| -> Option<f64> {
        psi.pairs
            .iter()
            .map(|(s, v)| (upstairs.distance(s, q), *v))
            .filter(|(d, _)| *d <= psi.tolerance)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, v)| v)
    };
    for (i, (x, y)) in psi.pairs.iter().enumerate() {
        let up = upstairs.contains(x);
        if up != downstairs.in_domain(*y) {
            report.domain_violations.push(i);
        }
        if !up {
            report.out_of_domain += 1;
            continue;
        }
        report.in_domain += 1;
        let (Ok(bx), Ok(ay)) = (upstairs.step(x), downstairs.apply(*y)) else {
            continue;
        };
        match lookup(&bx) {
            Some(psi_bx) => {
                let r = downstairs.space.metric(ay, psi_bx);
                report.checked += 1;
                report.max_residual = report.max_residual.max(r);
                if r > psi.tolerance {
                    report.residual_violations.push(i);
                }
            }
            None => report.unmatched += 1,
        }
    }
    report
}

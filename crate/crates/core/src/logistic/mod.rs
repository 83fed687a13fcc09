//! The logistic family `α_λ(x) = 4λx(1 − x)` on `[0, 1]`.
//!
//! For `λ < 1` the image is `[0, λ]`, so the extension is built with
//! `Y = [λ, 1]`; for `λ = 1` the map is onto and `Y = ∅`.

mod bjk;
mod cascade;
mod continuum;
mod regime;

pub use bjk::{bjk_embedding, BjkArc, BjkEmbedding};
pub use cascade::{
    feigenbaum_limit_estimate, mu_parameter, mu_residual, period_doubling_parameter, stable_orbit,
    superstable_parameter, window_boundaries, window_cascade, CascadeTable, StableOrbit,
    WindowCascade, WindowEdges,
};
pub use continuum::{continuum_graph, ContinuumGraph, Intersection, Node, NodeKind, OrbitDatum};
pub use regime::{classify_regime, classify_regime_with, Regime, RegimeTag};

use std::sync::Arc;

use crate::dynamics::{Branch, BranchLabel, PartialMapSystem};
use crate::extension::ExtensionSpec;
use crate::space::{Interval, IntervalSet, StateSpace};
use crate::{Error, Result, EPS_DOM};

/// `4λx(1 − x)`.
pub fn eval(lambda: f64, x: f64) -> Result<f64> {
    if !(-EPS_DOM..=1.0 + EPS_DOM).contains(&x) {
        return Err(Error::OutsideDomain { x });
    }
    Ok(map(lambda, x))
}

#[inline]
pub(crate) fn map(lambda: f64, x: f64) -> f64 {
    4.0 * lambda * x * (1.0 - x)
}

/// `α_λⁿ(x)` without domain checks.
#[inline]
pub(crate) fn iterate(lambda: f64, mut x: f64, n: usize) -> f64 {
    for _ in 0..n {
        x = map(lambda, x);
    }
    x
}

fn left_inverse(lambda: f64, y: f64) -> f64 {
    0.5 * (1.0 - (1.0 - y / lambda).max(0.0).sqrt())
}

fn right_inverse(lambda: f64, y: f64) -> f64 {
    0.5 * (1.0 + (1.0 - y / lambda).max(0.0).sqrt())
}

/// Preimages of `y`: both roots below the critical value, the double root
/// `½` at it, nothing above.
pub fn preimage_branches(lambda: f64, y: f64) -> Vec<(BranchLabel, f64)> {
    if (y - lambda).abs() <= EPS_DOM {
        vec![(BranchLabel::Critical, 0.5)]
    } else if y < lambda && y >= -EPS_DOM {
        vec![
            (BranchLabel::Left, left_inverse(lambda, y)),
            (BranchLabel::Right, right_inverse(lambda, y)),
        ]
    } else {
        Vec::new()
    }
}

/// `α_λ` as a partial system with branches L, R and the critical branch C.
pub fn system(lambda: f64) -> PartialMapSystem {
    let space = StateSpace::UNIT_INTERVAL;
    let below = Interval::new(0.0, lambda);
    PartialMapSystem::new(
        format!("logistic({lambda})"),
        space,
        space.whole(),
        Arc::new(move |x| map(lambda, x)),
        vec![
            Branch {
                label: BranchLabel::Left,
                domain: Interval::new(0.0, 0.5),
                range: below,
                inverse: Arc::new(move |y| left_inverse(lambda, y)),
            },
            Branch {
                label: BranchLabel::Right,
                domain: Interval::new(0.5, 1.0),
                range: below,
                inverse: Arc::new(move |y| right_inverse(lambda, y)),
            },
            Branch {
                label: BranchLabel::Critical,
                domain: Interval::point(0.5),
                range: Interval::point(lambda),
                inverse: Arc::new(|_| 0.5),
            },
        ],
    )
}

/// `Y = [λ, 1]`, empty for `λ = 1`.
pub fn cosurjectivity_set(lambda: f64) -> IntervalSet {
    let space = StateSpace::UNIT_INTERVAL;
    if lambda >= 1.0 {
        IntervalSet::empty(space)
    } else {
        IntervalSet::new(space, vec![Interval::new(lambda, 1.0)])
    }
}

pub fn extension_spec(lambda: f64) -> Result<ExtensionSpec> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidInput(format!("lambda = {lambda} is not in (0, 1]")));
    }
    ExtensionSpec::new(system(lambda), cosurjectivity_set(lambda))
}

/// The injective lift `γ_λ: ℝ → ℝ` obtained by spreading the two halves of
/// the parabola over consecutive unit intervals.
pub fn lift_gamma(lambda: f64, t: f64) -> f64 {
    let k = t.floor();
    let s = t - k;
    if s <= 0.5 {
        map(lambda, s) + 2.0 * k
    } else {
        map(lambda, s) + 2.0 * k + 1.0
    }
}

/// Induced homeomorphism of the full tent-map extension in the composant
/// parametrization: `t ↦ 2t`.
pub fn tal_tent_parametrized(t: f64) -> f64 {
    2.0 * t
}

/// Induced homeomorphism of the `λ = 1` extension in the same
/// parametrization.
pub fn tal1_parametrized(t: f64) -> f64 {
    let k = t.floor();
    let s = t - k;
    if s < 0.5 {
        2.0 * k + map(1.0, s)
    } else {
        2.0 * (k + 1.0) - map(1.0, s)
    }
}

/// `q₁ = λ, q₂, …, q_n`, the orbit of the critical value.
pub fn critical_orbit(lambda: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut q = 0.5;
    for _ in 0..n {
        q = map(lambda, q);
        out.push(q);
    }
    out
}

/// Period of the attracting cycle seen by the critical orbit, if any.
///
/// After `burn_in` steps, returns the smallest `p ≤ max_period` with
/// `|q_{j+p} − q_j| < tol` along `iters` further points.
pub fn attracting_period(
    lambda: f64,
    max_period: usize,
    burn_in: usize,
    iters: usize,
    tol: f64,
) -> Option<usize> {
    let q = iterate(lambda, 0.5, burn_in);
    let len = iters.max(max_period + 1);
    let mut tail = Vec::with_capacity(len + max_period);
    let mut x = q;
    for _ in 0..len + max_period {
        tail.push(x);
        x = map(lambda, x);
    }
    (1..=max_period).find(|&p| (0..len).all(|j| (tail[j + p] - tail[j]).abs() < tol))
}

/// [`attracting_period`] with the settings used throughout the crate.
pub fn attracting_period_default(lambda: f64, max_period: usize) -> Option<usize> {
    attracting_period(lambda, max_period, 20_000, 4 * max_period.max(16), 1e-7)
}

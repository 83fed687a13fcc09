//! Orientation-preserving circle homeomorphisms given by their lifts.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Branch, BranchLabel, PartialMapSystem};
use crate::extension::ExtensionSpec;
use crate::roots::bisect;
use crate::space::{Interval, IntervalSet, StateSpace};
use crate::{Error, Result};

/// Knots used when a lift is stored as a grid interpolant.
pub const GRID_KNOTS: usize = 1 << 12;

/// Allowed drift of `γ(t+1) − γ(t) − 1`.
pub const PERIODICITY_TOL: f64 = 1e-12;

#[derive(Clone)]
enum Lift {
    /// `t + τ`
    Rigid { tau: f64 },
    /// `t + τ + a·sin(2πt)/(2π)`, `|a| < 1`
    Perturbed { tau: f64, a: f64 },
    /// Piecewise-linear through `(j/K, values[j])`, `j = 0..=K`.
    Grid { values: Arc<Vec<f64>> },
    /// `φ ∘ inner ∘ φ⁻¹`
    Conjugate {
        inner: Box<CircleHomeo>,
        phi: Box<CircleHomeo>,
    },
}

/// A circle homeomorphism, represented by a lift `γ: ℝ → ℝ` with
/// `γ(t+1) = γ(t) + 1`. The lift is only fixed up to an integer, and that
/// integer matters here: it selects the compression case.
#[derive(Clone)]
pub struct CircleHomeo {
    lift: Lift,
}

impl fmt::Debug for CircleHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.lift {
            Lift::Rigid { tau } => write!(f, "Rigid({tau})"),
            Lift::Perturbed { tau, a } => write!(f, "Perturbed(tau={tau}, a={a})"),
            Lift::Grid { values } => write!(f, "Grid({} knots)", values.len() - 1),
            Lift::Conjugate { inner, phi } => write!(f, "Conjugate({inner:?} by {phi:?})"),
        }
    }
}

impl CircleHomeo {
    pub fn rigid(tau: f64) -> Self {
        CircleHomeo {
            lift: Lift::Rigid { tau },
        }
    }

    pub fn perturbed(tau: f64, a: f64) -> Result<Self> {
        if !(a.abs() < 1.0) || !tau.is_finite() {
            return Err(Error::InvalidInput(format!(
                "perturbed lift needs |a| < 1 and finite tau, got a={a}, tau={tau}"
            )));
        }
        Ok(CircleHomeo {
            lift: Lift::Perturbed { tau, a },
        })
    }

    /// Monotone interpolant through `values[j] = γ(j/K)`, `j = 0..=K`.
    pub fn from_grid(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::InvalidInput("grid lift needs at least two cells".into()));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("grid lift is not strictly increasing".into()));
        }
        let span = values[values.len() - 1] - values[0];
        if (span - 1.0).abs() > PERIODICITY_TOL {
            return Err(Error::InvalidInput(format!(
                "grid lift gains {span} over one period instead of 1"
            )));
        }
        Ok(CircleHomeo {
            lift: Lift::Grid {
                values: Arc::new(values),
            },
        })
    }

    /// Samples `h` on `knots` cells and stores the interpolant.
    pub fn sampled(h: &CircleHomeo, knots: usize) -> Result<Self> {
        let k = knots.max(2);
        let mut values: Vec<f64> = (0..k).map(|j| h.lift(j as f64 / k as f64)).collect();
        values.push(values[0] + 1.0);
        Self::from_grid(values)
    }

    /// `φ ∘ h ∘ φ⁻¹`.
    pub fn conjugate(h: &CircleHomeo, phi: &CircleHomeo) -> Self {
        CircleHomeo {
            lift: Lift::Conjugate {
                inner: Box::new(h.clone()),
                phi: Box::new(phi.clone()),
            },
        }
    }

    /// The same homeomorphism with the lift moved by the integer `k`.
    pub fn translated(&self, k: i64) -> Self {
        let k = k as f64;
        let lift = match &self.lift {
            Lift::Rigid { tau } => Lift::Rigid { tau: tau + k },
            Lift::Perturbed { tau, a } => Lift::Perturbed { tau: tau + k, a: *a },
            Lift::Grid { values } => Lift::Grid {
                values: Arc::new(values.iter().map(|v| v + k).collect()),
            },
            // φ commutes with integer translation
            Lift::Conjugate { inner, phi } => Lift::Conjugate {
                inner: Box::new(inner.translated(k as i64)),
                phi: phi.clone(),
            },
        };
        CircleHomeo { lift }
    }

    pub fn lift(&self, t: f64) -> f64 {
        match &self.lift {
            Lift::Rigid { tau } => t + tau,
            Lift::Perturbed { tau, a } => t + tau + a * (TAU * t).sin() / TAU,
            Lift::Grid { values } => {
                let cells = (values.len() - 1) as f64;
                let k = t.floor();
                let s = (t - k) * cells;
                let j = (s.floor() as usize).min(values.len() - 2);
                let w = s - j as f64;
                k + values[j] + w * (values[j + 1] - values[j])
            }
            Lift::Conjugate { inner, phi } => phi.lift(inner.lift(phi.lift_inv(t))),
        }
    }

    /// `γ⁻¹(y)`, by bisection except for rigid lifts.
    pub fn lift_inv(&self, y: f64) -> f64 {
        if let Lift::Rigid { tau } = self.lift {
            return y - tau;
        }
        // γ(t) − t is 1-periodic, so a bracket one unit wide around the
        // rigid guess always exists.
        let guess = y - self.lift(0.0);
        let (mut lo, mut hi) = (guess - 1.0, guess + 1.0);
        while self.lift(lo) > y {
            lo -= 1.0;
        }
        while self.lift(hi) < y {
            hi += 1.0;
        }
        bisect(|t| self.lift(t) - y, lo, hi, 0.0, "inverse lift").unwrap_or(0.5 * (lo + hi))
    }

    /// `γⁿ(t)`.
    pub fn iterate_lift(&self, t: f64, n: usize) -> f64 {
        if let Lift::Rigid { tau } = self.lift {
            return t + n as f64 * tau;
        }
        (0..n).fold(t, |s, _| self.lift(s))
    }

    /// The circle map `α(x) = γ(x) mod 1`.
    pub fn map(&self, x: f64) -> f64 {
        StateSpace::CIRCLE.normalize(self.lift(x))
    }

    pub fn gamma0(&self) -> f64 {
        self.lift(0.0)
    }

    /// Checks monotonicity and periodicity of the lift on a fine grid.
    pub fn validate(&self, samples: usize) -> Result<()> {
        let n = samples.max(2);
        let mut prev = f64::NEG_INFINITY;
        for j in 0..=n {
            let t = j as f64 / n as f64;
            let v = self.lift(t);
            if !(v > prev) {
                return Err(Error::InvalidInput(format!("lift not increasing near t={t}")));
            }
            prev = v;
            let drift = (self.lift(t + 1.0) - v - 1.0).abs();
            if drift > PERIODICITY_TOL {
                return Err(Error::InvalidInput(format!(
                    "lift fails periodicity by {drift} at t={t}"
                )));
            }
        }
        Ok(())
    }

    /// The homeomorphism as an everywhere-defined system on the circle.
    pub fn system(&self) -> PartialMapSystem {
        let fwd = Arc::new(self.clone());
        let inv = Arc::clone(&fwd);
        let space = StateSpace::CIRCLE;
        PartialMapSystem::new(
            format!("{self:?}"),
            space,
            space.whole(),
            Arc::new(move |x| fwd.lift(x)),
            vec![Branch {
                label: BranchLabel::Only,
                domain: Interval::new(0.0, 1.0),
                range: Interval::new(0.0, 1.0),
                inverse: Arc::new(move |y| inv.lift_inv(y)),
            }],
        )
    }
}

/// `frac(γⁿ(0)/n)`, within `1/n` of the rotation number.
///
/// Rigid rotations return their shift directly since the lift is linear.
pub fn rotation_number(h: &CircleHomeo, n_iter: usize) -> f64 {
    StateSpace::CIRCLE.normalize(mean_displacement(h, n_iter))
}

/// `γⁿ(0)/n` before reduction mod 1; keeps the integer part of the lift.
fn mean_displacement(h: &CircleHomeo, n_iter: usize) -> f64 {
    if let Lift::Rigid { tau } = h.lift {
        return tau;
    }
    let n = n_iter.max(1);
    h.iterate_lift(0.0, n) / n as f64
}

/// Debug variant: the mean displacement over five seeds in `[0, 1)`.
pub fn rotation_number_averaged(h: &CircleHomeo, n_iter: usize) -> f64 {
    let n = n_iter.max(1);
    let mean = (0..5)
        .map(|i| {
            let t = i as f64 / 5.0;
            (h.iterate_lift(t, n) - t) / n as f64
        })
        .sum::<f64>()
        / 5.0;
    StateSpace::CIRCLE.normalize(mean)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Compression {
    Coisometry,
    Unitary,
    Isometry,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompressionCase {
    pub case: Compression,
    pub gamma0: f64,
    /// `[0, γ(0)]`, `[0, γ⁻¹(0)]`, or `None` in the unitary case.
    pub cosurjectivity_arc: Option<(f64, f64)>,
}

pub fn compression_case(h: &CircleHomeo) -> CompressionCase {
    let g0 = h.gamma0();
    let (case, arc) = if g0 > 0.0 {
        (Compression::Coisometry, Some((0.0, g0)))
    } else if g0 == 0.0 {
        (Compression::Unitary, None)
    } else {
        (Compression::Isometry, Some((0.0, h.lift_inv(0.0))))
    };
    CompressionCase {
        case,
        gamma0: g0,
        cosurjectivity_arc: arc,
    }
}

/// Extension spec with `Y` the arc `[0, γ(0)]`, for `0 < γ(0)`.
pub fn circle_extension_spec(h: &CircleHomeo) -> Result<ExtensionSpec> {
    let g0 = h.gamma0();
    if g0 <= 0.0 {
        return Err(Error::NotCoisometry { gamma0: g0 });
    }
    let space = StateSpace::CIRCLE;
    let y = IntervalSet::new(space, vec![Interval::new(0.0, g0.min(1.0))]);
    ExtensionSpec::new(h.system(), y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeKind {
    FullCylinder,
    ArcLadder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderArc {
    #[serde(rename = "N")]
    pub n: usize,
    /// `αᴺ(1)` as a point of `[0, 1)`.
    pub origin: f64,
    /// `α^{N+1}(1)`, written as `origin` plus the arc length so it may exceed 1.
    pub end: f64,
    /// The same endpoints in lift coordinates, `γᴺ(0)` and `γ^{N+1}(0)`.
    pub lift_origin: f64,
    pub lift_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleExtensionShape {
    pub space: String,
    pub kind: ShapeKind,
    pub gamma0: f64,
    pub arcs: Vec<LadderArc>,
    /// Cluster representatives of the tail of the orbit of `1 ∈ S¹`.
    pub limit_set: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitSetParams {
    pub transient: usize,
    pub samples: usize,
    pub cluster_eps: f64,
}

impl Default for LimitSetParams {
    fn default() -> Self {
        LimitSetParams {
            transient: 1000,
            samples: 2000,
            cluster_eps: 1e-6,
        }
    }
}

pub fn extension_shape(h: &CircleHomeo, n_max: usize) -> Result<CircleExtensionShape> {
    extension_shape_with(h, n_max, &LimitSetParams::default())
}

pub fn extension_shape_with(
    h: &CircleHomeo,
    n_max: usize,
    params: &LimitSetParams,
) -> Result<CircleExtensionShape> {
    let g0 = h.gamma0();
    if g0 <= 0.0 {
        return Err(Error::NotCoisometry { gamma0: g0 });
    }
    let limit_set = h
        .system()
        .omega_limit(0.0, params.transient, params.samples, params.cluster_eps)?;
    let mut arcs = Vec::new();
    let kind = if g0 >= 1.0 {
        ShapeKind::FullCylinder
    } else {
        let mut t = 0.0;
        for n in 0..=n_max {
            let next = h.lift(t);
            let origin = StateSpace::CIRCLE.normalize(t);
            arcs.push(LadderArc {
                n,
                origin,
                end: origin + (next - t),
                lift_origin: t,
                lift_end: next,
            });
            t = next;
        }
        ShapeKind::ArcLadder
    };
    Ok(CircleExtensionShape {
        space: "circle".into(),
        kind,
        gamma0: g0,
        arcs,
        limit_set,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationKind {
    RationalPeriodic { m: u64, n: u64 },
    IrrationalTransitive,
    IrrationalNonTransitive,
}

impl fmt::Display for RotationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RotationKind::RationalPeriodic { m, n } => write!(f, "RationalPeriodic({m},{n})"),
            RotationKind::IrrationalTransitive => f.write_str("IrrationalTransitive"),
            RotationKind::IrrationalNonTransitive => f.write_str("IrrationalNonTransitive"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub n_iter: usize,
    pub max_denominator: u64,
    /// Accepted `|γⁿ(x) − x − m|` at a located periodic point.
    pub periodic_tol: f64,
    /// Grid cells scanned for a sign change of `γⁿ(x) − x − m`.
    pub scan_cells: usize,
    /// Orbit points used for the gap statistic.
    pub gap_samples: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            n_iter: 100_000,
            max_denominator: 1000,
            periodic_tol: 1e-9,
            scan_cells: 2000,
            gap_samples: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationEvidence {
    pub n_iter: usize,
    /// Convergents tried, in order.
    pub candidates: Vec<(u64, u64)>,
    pub periodic_point: Option<f64>,
    pub periodic_residual: Option<f64>,
    pub max_gap: Option<f64>,
    pub gap_threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationClassification {
    pub tau: f64,
    pub kind: RotationKind,
    pub evidence: ClassificationEvidence,
}

/// Continued-fraction convergents `p/q` of `x ∈ [0, 1)` with `q ≤ max_q`.
pub fn convergents(x: f64, max_q: u64) -> Vec<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    let mut out = Vec::new();
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e12 {
            break;
        }
        let a = a as u64;
        let (p, q) = (a * p1 + p0, a * q1 + q0);
        if q > max_q {
            break;
        }
        out.push((p, q));
        (p0, q0, p1, q1) = (p1, q1, p, q);
        let frac = r - r.floor();
        if frac < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// A point with `γⁿ(x) = x + m`, if the scan finds one.
fn periodic_point(h: &CircleHomeo, m: f64, n: u64, params: &ClassifyParams) -> Option<(f64, f64)> {
    let f = |x: f64| h.iterate_lift(x, n as usize) - x - m;
    let cells = params.scan_cells.max(1);
    let mut prev = (0.0, f(0.0));
    if prev.1.abs() < params.periodic_tol {
        return Some((0.0, prev.1.abs()));
    }
    for j in 1..=cells {
        let x = j as f64 / cells as f64;
        let v = f(x);
        if v.abs() < params.periodic_tol {
            return Some((x, v.abs()));
        }
        if v.signum() != prev.1.signum() {
            let root = bisect(f, prev.0, x, 0.0, "periodic point").ok()?;
            let r = f(root).abs();
            return (r < params.periodic_tol).then_some((root, r));
        }
        prev = (x, v);
    }
    None
}

/// Largest gap between circularly adjacent points.
fn max_circular_gap(points: &mut [f64]) -> f64 {
    if points.is_empty() {
        return 1.0;
    }
    points.sort_by(f64::total_cmp);
    let inner = points
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    inner.max(points[0] + 1.0 - points[points.len() - 1])
}

pub fn classify(h: &CircleHomeo, params: &ClassifyParams) -> RotationClassification {
    let raw = mean_displacement(h, params.n_iter);
    let tau = StateSpace::CIRCLE.normalize(raw);
    let bound = 1.0 / params.n_iter.max(1) as f64;
    let mut evidence = ClassificationEvidence {
        n_iter: params.n_iter,
        candidates: Vec::new(),
        periodic_point: None,
        periodic_residual: None,
        max_gap: None,
        gap_threshold: None,
    };
    let mut near: Vec<(u64, u64)> = convergents(tau, params.max_denominator)
        .into_iter()
        .filter(|&(p, q)| (tau - p as f64 / q as f64).abs() <= bound + 1e-15)
        .collect();
    // τ̂ just below 1 approximates 0/1 from the other side
    if 1.0 - tau <= bound {
        near.insert(0, (0, 1));
    }
    for (p, q) in near {
        let m = p % q;
        evidence.candidates.push((m, q));
        // the lift displaces by q·raw over q steps, integer part included
        let shift = (q as f64 * raw).round();
        if let Some((x, r)) = periodic_point(h, shift, q, params) {
            evidence.periodic_point = Some(x);
            evidence.periodic_residual = Some(r);
            return RotationClassification {
                tau,
                kind: RotationKind::RationalPeriodic { m, n: q },
                evidence,
            };
        }
    }
    let mut pts: Vec<f64> = h
        .system()
        .orbit(0.0, params.gap_samples.saturating_sub(1))
        .points;
    let gap = max_circular_gap(&mut pts);
    let threshold = 10.0 / (pts.len() as f64).sqrt();
    evidence.max_gap = Some(gap);
    evidence.gap_threshold = Some(threshold);
    let kind = if gap < threshold {
        RotationKind::IrrationalTransitive
    } else {
        RotationKind::IrrationalNonTransitive
    };
    RotationClassification {
        tau,
        kind,
        evidence,
    }
}

/// A conjugacy `φ` checked on a grid before it is trusted.
#[derive(Debug, Clone)]
pub struct SampledConjugacy {
    pub phi: CircleHomeo,
    pub samples: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub tau1: f64,
    pub tau2: f64,
    /// Circular distance between the two estimates.
    pub difference: f64,
    /// `2/n_iter`: both estimates carry an error below `1/n_iter`.
    pub bound: f64,
    pub conjugacy_residual: Option<f64>,
    pub within_bound: bool,
}

/// Compares rotation numbers; with a conjugacy, first checks `φ∘α = β∘φ`.
pub fn check_rotation_invariant(
    h1: &CircleHomeo,
    h2: &CircleHomeo,
    conj: Option<&SampledConjugacy>,
    n_iter: usize,
) -> Result<InvarianceReport> {
    let conjugacy_residual = match conj {
        Some(c) => {
            let n = c.samples.max(1);
            let r = (0..n)
                .map(|j| {
                    let t = j as f64 / n as f64;
                    StateSpace::CIRCLE.metric(c.phi.map(h1.map(t)), h2.map(c.phi.map(t)))
                })
                .fold(0.0f64, f64::max);
            if r > c.tol {
                return Err(Error::InvalidConjugacy {
                    residual: r,
                    tol: c.tol,
                });
            }
            Some(r)
        }
        None => None,
    };
    let tau1 = rotation_number(h1, n_iter);
    let tau2 = rotation_number(h2, n_iter);
    let difference = StateSpace::CIRCLE.metric(tau1, tau2);
    let bound = 2.0 / n_iter.max(1) as f64;
    Ok(InvarianceReport {
        tau1,
        tau2,
        difference,
        bound,
        conjugacy_residual,
        within_bound: difference < bound,
    })
}

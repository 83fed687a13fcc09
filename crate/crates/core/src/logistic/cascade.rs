//! Parameter sequences of the logistic family.
//!
//! All solvers bracket and bisect. Periodic orbits are located as roots of
//! `α^p(x) − x` nearest to the critical point and their stability is read
//! off the multiplier `∏ 4λ(1 − 2xᵢ)`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{iterate, map};
use crate::roots::{bisect, bisect_predicate, nearby_roots, scan_sign_change};
use crate::{Error, Result};

/// Bisection tolerance in `λ` for stability boundaries.
const EDGE_TOL: f64 = 1e-13;

/// Scan step used to locate odd-period windows.
const WINDOW_SCAN_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableOrbit {
    /// The orbit point nearest `½`.
    pub point: f64,
    pub multiplier: f64,
}

fn multiplier(lambda: f64, x: f64, period: usize) -> f64 {
    let mut m = 1.0;
    let mut y = x;
    for _ in 0..period {
        m *= 4.0 * lambda * (1.0 - 2.0 * y);
        y = map(lambda, y);
    }
    m
}

/// Roots of `α^p(x) − x` nearest `½` on either side, with their multipliers.
fn orbits_near_critical(lambda: f64, period: usize) -> Vec<StableOrbit> {
    nearby_roots(
        |x| iterate(lambda, x, period) - x,
        0.5,
        1e-10,
        0.5,
        0.0,
        1.0,
    )
    .into_iter()
    .map(|x| StableOrbit {
        point: x,
        multiplier: multiplier(lambda, x, period),
    })
    .collect()
}

/// The attracting orbit of period dividing `period` near the critical point.
pub fn stable_orbit(lambda: f64, period: usize) -> Option<StableOrbit> {
    orbits_near_critical(lambda, period)
        .into_iter()
        .find(|o| o.multiplier.abs() < 1.0)
}

fn is_stable(lambda: f64, period: usize) -> bool {
    stable_orbit(lambda, period).is_some()
}

/// `min |m + 1|` over the orbits found near the critical point.
fn doubling_residual(lambda: f64, period: usize) -> f64 {
    orbits_near_critical(lambda, period)
        .iter()
        .map(|o| (o.multiplier + 1.0).abs())
        .fold(f64::INFINITY, f64::min)
}

/// First root above `prev` of `α_λ^period(½) − ½`, scanning a range of
/// width `gap`.
fn next_superstable(prev: f64, gap: f64, period: usize) -> Result<f64> {
    let g = |l: f64| iterate(l, 0.5, period) - 0.5;
    let start = prev + 0.02 * gap;
    let stop = (prev + gap).min(1.0);
    let step = (0.01 * gap).min(1e-4);
    let what = format!("superstable parameter of period {period}");
    let (a, b) = scan_sign_change(g, start, stop, step).ok_or_else(|| Error::BracketFailure {
        what: what.clone(),
        lo: start,
        hi: stop,
    })?;
    bisect(g, a, b, 0.0, &what)
}

/// Superstable parameters `s₀ = ½, s₁, …, s_n` of the main cascade.
fn superstable_sequence(n: usize) -> Result<Vec<f64>> {
    let mut s = vec![0.5];
    let mut gap = 0.5;
    for k in 1..=n {
        let next = next_superstable(s[k - 1], gap, 1 << k)?;
        gap = next - s[k - 1];
        s.push(next);
    }
    Ok(s)
}

/// Parameter at which `½` has least period `2ⁿ` in the main cascade.
pub fn superstable_parameter(n: usize) -> Result<f64> {
    Ok(superstable_sequence(n)?[n])
}

/// Parameters where the orbit of period `2^{k−1}` loses stability, for
/// `k = 1..=n`, given the superstable parameters bracketing them.
fn doubling_sequence(s: &[f64], base_period: usize) -> Vec<f64> {
    (1..s.len())
        .map(|k| {
            let p = base_period << (k - 1);
            bisect_predicate(|l| is_stable(l, p), s[k], s[k - 1], EDGE_TOL)
        })
        .collect()
}

/// `λ_n`, the `n`-th period-doubling parameter; `λ₁ = ¾`.
pub fn period_doubling_parameter(n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(0.25);
    }
    let s = superstable_sequence(n)?;
    Ok(doubling_sequence(&s, 1)[n - 1])
}

fn aitken(a: f64, b: f64, c: f64) -> f64 {
    let d1 = b - a;
    let d2 = c - b;
    let denom = d2 - d1;
    if denom == 0.0 {
        c
    } else {
        c - d2 * d2 / denom
    }
}

/// Aitken extrapolation of `λ_{k−2}, λ_{k−1}, λ_k`.
pub fn feigenbaum_limit_estimate(k: usize) -> Result<f64> {
    if k < 3 {
        return Err(Error::InvalidInput("extrapolation needs k >= 3".into()));
    }
    let s = superstable_sequence(k)?;
    let l = doubling_sequence(&s, 1);
    Ok(aitken(l[k - 3], l[k - 2], l[k - 1]))
}

/// Largest root of `α_λ^q(x) − x`.
fn largest_fixed_point(lambda: f64, q: usize) -> Result<f64> {
    let f = |x: f64| iterate(lambda, x, q) - x;
    let what = format!("largest fixed point of the {q}-th iterate");
    let (a, b) = scan_sign_change(f, 1.0, 0.0, 1e-4).ok_or_else(|| Error::BracketFailure {
        what: what.clone(),
        lo: 0.0,
        hi: 1.0,
    })?;
    bisect(f, a.min(b), a.max(b), 0.0, &what)
}

fn mu_equation(lambda: f64, n: usize) -> Result<f64> {
    let p = largest_fixed_point(lambda, 1 << (n - 1))?;
    Ok(iterate(lambda, lambda, 1 << n) - p)
}

fn mu_sequence(n: usize, lambda_inf: f64) -> Result<Vec<(f64, f64)>> {
    let mut out = vec![(1.0, 0.0)];
    for k in 1..=n {
        let prev = out[k - 1].0;
        let step = (1e-4f64).min((prev - lambda_inf) / 50.0);
        let what = format!("mu_{k}");
        // the fixed-point search can fail only through a missing bracket,
        // which a NaN keeps from registering as a sign change
        let f = |l: f64| mu_equation(l, k).unwrap_or(f64::NAN);
        let (a, b) = scan_sign_change(f, prev - step, lambda_inf, step).ok_or_else(|| {
            Error::BracketFailure {
                what: what.clone(),
                lo: lambda_inf,
                hi: prev,
            }
        })?;
        let root = bisect(f, a.min(b), a.max(b), 0.0, &what)?;
        out.push((root, mu_equation(root, k)?.abs()));
    }
    Ok(out)
}

/// `|F(λ)|` for the equation defining `μ_n`, `n ≥ 1`.
pub fn mu_residual(lambda: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput("mu_0 is not defined by an equation".into()));
    }
    Ok(mu_equation(lambda, n)?.abs())
}

/// `μ_n`: `μ₀ = 1`, and for `n ≥ 1` the root of
/// `α_λ^{2ⁿ}(λ) = (largest fixed point of α_λ^{2^{n−1}})` next below `μ_{n−1}`.
pub fn mu_parameter(n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let lambda_inf = feigenbaum_limit_estimate(6)?;
    Ok(mu_sequence(n, lambda_inf)?[n].0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowEdges {
    pub n: usize,
    pub eta: f64,
    pub nu: f64,
    /// Parameter inside the window where `½` is periodic.
    pub superstable: f64,
}

fn locate_window(n: usize, upper: f64, step: f64) -> Result<WindowEdges> {
    let period = 2 * n + 1;
    let not_found = || Error::WindowNotFound {
        period,
        upper,
        step,
    };
    let count = ((upper - 0.75) / step) as usize;
    let hit = (1..=count)
        .map(|i| upper - step * i as f64)
        .find(|&l| super::attracting_period_default(l, period) == Some(period))
        .ok_or_else(not_found)?;
    let inside = |l: f64| is_stable(l, period);
    if !inside(hit) {
        return Err(not_found());
    }
    let mut hi = hit;
    while inside(hi + step) {
        hi += step;
    }
    let mut lo = hit;
    while inside(lo - step) {
        lo -= step;
    }
    let nu = bisect_predicate(inside, hi + step, hi, EDGE_TOL);
    let eta = bisect_predicate(inside, lo - step, lo, EDGE_TOL);
    let g = |l: f64| iterate(l, 0.5, period) - 0.5;
    let what = format!("superstable parameter in window {n}");
    let (a, b) = scan_sign_change(g, eta, nu, (nu - eta) / 400.0).ok_or_else(|| {
        Error::BracketFailure {
            what: what.clone(),
            lo: eta,
            hi: nu,
        }
    })?;
    let superstable = bisect(g, a, b, 0.0, &what)?;
    Ok(WindowEdges {
        n,
        eta,
        nu,
        superstable,
    })
}

fn window_sequence(n: usize, step: f64) -> Result<Vec<WindowEdges>> {
    let mut out: Vec<WindowEdges> = Vec::with_capacity(n);
    for k in 1..=n {
        let upper = out.last().map_or(1.0, |w| w.nu);
        out.push(locate_window(k, upper, step)?);
    }
    Ok(out)
}

/// `(η_n, ν_n]`, the first window of a stable orbit of period `2n + 1`
/// below `ν_{n−1}` (with `ν₀ = 1`).
pub fn window_boundaries(n: usize) -> Result<WindowEdges> {
    if n == 0 {
        return Err(Error::InvalidInput("windows are indexed from 1".into()));
    }
    Ok(window_sequence(n, WINDOW_SCAN_STEP)?[n - 1])
}

/// The cascade `λ_0^{(n)} = η_n, λ_1^{(n)} = ν_n, λ_2^{(n)}, …` following a
/// window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowCascade {
    pub edges: WindowEdges,
    pub lambda: Vec<f64>,
    pub superstable: Vec<f64>,
}

/// Window cascade up to `λ_{m_max}^{(n)}`.
pub fn window_cascade(edges: WindowEdges, m_max: usize) -> Result<WindowCascade> {
    let period = 2 * edges.n + 1;
    let mut s = vec![edges.superstable];
    let mut gap = 2.0 * (edges.nu - edges.superstable);
    for m in 1..m_max {
        let next = next_superstable(s[m - 1], gap, period << m)?;
        gap = next - s[m - 1];
        s.push(next);
    }
    let mut lambda = vec![edges.eta];
    if m_max >= 1 {
        lambda.push(edges.nu);
    }
    if m_max >= 2 {
        lambda.extend(doubling_sequence(&s, period).into_iter().skip(1));
    }
    Ok(WindowCascade {
        edges,
        lambda,
        superstable: s,
    })
}

/// Precomputed parameter sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeTable {
    /// `λ_0 = ¼, λ_1, …, λ_{n_max}`.
    pub lambda: Vec<f64>,
    /// `|m + 1|` at each `λ_n` (zero for `λ_0`).
    pub lambda_residual: Vec<f64>,
    /// `s_0 = ½, …, s_{n_max}`.
    pub superstable: Vec<f64>,
    pub lambda_inf: f64,
    /// `μ_0 = 1, μ_1, …`.
    pub mu: Vec<f64>,
    pub mu_residual: Vec<f64>,
    pub windows: Vec<WindowCascade>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub name: String,
    pub n: i64,
    pub value: f64,
    pub residual: f64,
}

impl CascadeTable {
    pub const DEFAULT_N_MAX: usize = 8;
    pub const DEFAULT_MU_MAX: usize = 4;
    pub const DEFAULT_WINDOWS: usize = 3;
    pub const DEFAULT_WINDOW_M_MAX: usize = 3;

    pub fn compute(n_max: usize, mu_max: usize, windows: usize, window_m_max: usize) -> Result<Self> {
        if n_max < 3 {
            return Err(Error::InvalidInput("n_max must be at least 3".into()));
        }
        let superstable = superstable_sequence(n_max)?;
        let doublings = doubling_sequence(&superstable, 1);
        let mut lambda = vec![0.25];
        let mut lambda_residual = vec![0.0];
        for (k, &l) in doublings.iter().enumerate() {
            lambda.push(l);
            lambda_residual.push(doubling_residual(l, 1 << k));
        }
        let lambda_inf = aitken(doublings[n_max - 3], doublings[n_max - 2], doublings[n_max - 1]);
        let mus = mu_sequence(mu_max, lambda_inf)?;
        let windows = window_sequence(windows, WINDOW_SCAN_STEP)?
            .into_iter()
            .map(|w| window_cascade(w, window_m_max))
            .collect::<Result<Vec<_>>>()?;
        Ok(CascadeTable {
            lambda,
            lambda_residual,
            superstable,
            lambda_inf,
            mu: mus.iter().map(|m| m.0).collect(),
            mu_residual: mus.iter().map(|m| m.1).collect(),
            windows,
        })
    }

    /// The table with default sizes, computed once per process.
    pub fn default_table() -> Result<&'static CascadeTable> {
        static TABLE: OnceLock<Result<CascadeTable>> = OnceLock::new();
        TABLE
            .get_or_init(|| {
                CascadeTable::compute(
                    Self::DEFAULT_N_MAX,
                    Self::DEFAULT_MU_MAX,
                    Self::DEFAULT_WINDOWS,
                    Self::DEFAULT_WINDOW_M_MAX,
                )
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn n_max(&self) -> usize {
        self.lambda.len() - 1
    }

    /// `λ_n` for `n ≥ −1`, with `λ_{−1} = 0`.
    pub fn lambda_at(&self, n: i64) -> Option<f64> {
        match n {
            -1 => Some(0.0),
            n if n >= 0 => self.lambda.get(n as usize).copied(),
            _ => None,
        }
    }

    pub fn rows(&self) -> Vec<TableRow> {
        let row = |name: &str, n: i64, value: f64, residual: f64| TableRow {
            name: name.to_string(),
            n,
            value,
            residual,
        };
        let mut out = Vec::new();
        for (n, (&v, &r)) in self.lambda.iter().zip(&self.lambda_residual).enumerate() {
            out.push(row("lambda", n as i64, v, r));
        }
        for (n, &v) in self.superstable.iter().enumerate() {
            let r = if n == 0 {
                0.0
            } else {
                (iterate(v, 0.5, 1 << n) - 0.5).abs()
            };
            out.push(row("superstable", n as i64, v, r));
        }
        out.push(row("lambda_inf", self.n_max() as i64, self.lambda_inf, f64::NAN));
        for (n, (&v, &r)) in self.mu.iter().zip(&self.mu_residual).enumerate() {
            out.push(row("mu", n as i64, v, r));
        }
        for w in &self.windows {
            let n = w.edges.n as i64;
            out.push(row("eta", n, w.edges.eta, f64::NAN));
            out.push(row("nu", n, w.edges.nu, f64::NAN));
            for (m, &v) in w.lambda.iter().enumerate() {
                out.push(row(&format!("lambda^({n})"), m as i64, v, f64::NAN));
            }
        }
        out
    }
}

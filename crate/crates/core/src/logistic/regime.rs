use std::fmt;

use serde::{Deserialize, Serialize};

use super::cascade::CascadeTable;

/// Half-width of the band around the `λ_∞` estimate reported as the limit.
pub const FEIGENBAUM_BAND: f64 = 1e-3;

/// Distance within which `λ` is taken to be `μ_n`.
pub const MU_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeTag {
    /// `λ ∈ (λ_n, λ_{n+1}]`; `n = −1` is `(0, ¼]`.
    CascadeStage(i32),
    FeigenbaumLimit,
    MuPoint(usize),
    /// `λ ∈ (η_n, ν_n]`.
    Window(usize),
    /// `λ ∈ (λ_m^{(n)}, λ_{m+1}^{(n)}]`, `m ≥ 1`.
    WindowCascadeStage(usize, usize),
    Full,
    ChaoticUnclassified,
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeTag::CascadeStage(n) => write!(f, "CascadeStage({n})"),
            RegimeTag::FeigenbaumLimit => f.write_str("FeigenbaumLimit"),
            RegimeTag::MuPoint(n) => write!(f, "MuPoint({n})"),
            RegimeTag::Window(n) => write!(f, "Window({n})"),
            RegimeTag::WindowCascadeStage(n, m) => write!(f, "WindowCascadeStage({n},{m})"),
            RegimeTag::Full => f.write_str("Full"),
            RegimeTag::ChaoticUnclassified => f.write_str("ChaoticUnclassified"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: RegimeTag,
    pub lambda: f64,
    /// The bracketing parameters, `(lo, hi]` or a point interval.
    pub bracket: (f64, f64),
    /// Set iff `λ` exceeds the `λ_∞` estimate.
    pub irreducible_continuum: bool,
}

pub fn classify_regime(lambda: f64) -> crate::Result<Regime> {
    Ok(classify_regime_with(lambda, CascadeTable::default_table()?))
}

pub fn classify_regime_with(lambda: f64, table: &CascadeTable) -> Regime {
    let irreducible = lambda > table.lambda_inf;
    let make = |tag, bracket| Regime {
        tag,
        lambda,
        bracket,
        irreducible_continuum: irreducible,
    };
    if lambda >= 1.0 {
        return make(RegimeTag::Full, (1.0, 1.0));
    }
    for (n, &mu) in table.mu.iter().enumerate().skip(1) {
        if (lambda - mu).abs() < MU_TOL {
            return make(RegimeTag::MuPoint(n), (mu, mu));
        }
    }
    for w in &table.windows {
        for m in 0..w.lambda.len().saturating_sub(1) {
            let (lo, hi) = (w.lambda[m], w.lambda[m + 1]);
            if lambda > lo && lambda <= hi {
                let tag = if m == 0 {
                    RegimeTag::Window(w.edges.n)
                } else {
                    RegimeTag::WindowCascadeStage(w.edges.n, m)
                };
                return make(tag, (lo, hi));
            }
        }
    }
    for n in -1..table.n_max() as i64 {
        let lo = table.lambda_at(n).unwrap_or(0.0);
        let hi = table.lambda_at(n + 1).unwrap_or(lo);
        if lambda > lo && lambda <= hi {
            return make(RegimeTag::CascadeStage(n as i32), (lo, hi));
        }
    }
    if (lambda - table.lambda_inf).abs() <= FEIGENBAUM_BAND {
        return make(
            RegimeTag::FeigenbaumLimit,
            (table.lambda_inf - FEIGENBAUM_BAND, table.lambda_inf + FEIGENBAUM_BAND),
        );
    }
    make(RegimeTag::ChaoticUnclassified, (table.lambda_inf, 1.0))
}

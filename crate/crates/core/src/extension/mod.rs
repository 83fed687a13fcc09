//! The reversible extension `(M̃, α̃)` of a partial system associated with `Y`.
//!
//! Points of `M̃` are [`Chain`]s. A terminal chain `(x₀, …, x_N)` belongs to
//! the stratum `M_N` and ends in `Y`; a non-terminal chain is a finite
//! truncation of a backward orbit in `M_∞`.

mod lift;
mod metric;
mod stratum;

pub use lift::{extension_record, lift_semiconjugacy, InverseOrbitRecord};
pub use metric::{chain_distance, hausdorff, ChainMetricParams};
pub use stratum::{sample_stratum, sample_stratum_with, SamplingParams, StratumIndex, StratumSample};

use serde::{Deserialize, Serialize};

use crate::dynamics::{PartialDynamics, PartialMapSystem};
use crate::space::IntervalSet;
use crate::{Error, Result, EPS_CHAIN};

/// Number of grid points used to check that `Y` covers `M ∖ α(Δ)`.
const Y_CHECK_POINTS: usize = 2001;

#[derive(Debug, Clone)]
pub struct ExtensionSpec {
    pub system: PartialMapSystem,
    pub y: IntervalSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub coords: Vec<f64>,
    pub terminal: bool,
}

impl Chain {
    pub fn new(coords: Vec<f64>, terminal: bool) -> Self {
        Chain { coords, terminal }
    }

    pub fn terminal(coords: Vec<f64>) -> Self {
        Chain::new(coords, true)
    }

    pub fn truncated(coords: Vec<f64>) -> Self {
        Chain::new(coords, false)
    }

    /// Index `d` of the last coordinate.
    pub fn depth(&self) -> usize {
        self.coords.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

impl ExtensionSpec {
    /// Builds a spec after checking on a grid that every point without a
    /// preimage lies in `Y`.
    pub fn new(system: PartialMapSystem, y: IntervalSet) -> Result<Self> {
        let whole = system.space.whole();
        Self::with_support(system, y, &whole)
    }

    /// As [`ExtensionSpec::new`] for a system whose state set `M` is the
    /// closed subset `support` rather than the whole space.
    pub fn with_support(system: PartialMapSystem, y: IntervalSet, support: &IntervalSet) -> Result<Self> {
        for x in support.grid(Y_CHECK_POINTS) {
            if system.preimages(x).is_empty() && !y.contains_within(x, EPS_CHAIN) {
                return Err(Error::InvalidCosurjectivitySet { x });
            }
        }
        Ok(ExtensionSpec { system, y })
    }

    pub fn space(&self) -> crate::space::StateSpace {
        self.system.space
    }

    pub fn validate_chain(&self, c: &Chain) -> bool {
        self.chain_defect(c).is_none()
    }

    /// Describes the first broken chain invariant, if any.
    pub fn chain_defect(&self, c: &Chain) -> Option<String> {
        let space = self.system.space;
        if c.coords.is_empty() {
            return Some("empty chain".into());
        }
        if let Some(x) = c.coords.iter().find(|x| !space.contains(**x)) {
            return Some(format!("coordinate {x} is outside the state space"));
        }
        for n in 0..c.depth() {
            let next = c.coords[n + 1];
            let Ok(img) = self.system.apply(next) else {
                return Some(format!("x_{} = {next} is outside the domain", n + 1));
            };
            let r = space.metric(img, c.coords[n]);
            if r > EPS_CHAIN {
                return Some(format!("alpha(x_{}) misses x_{n} by {r:e}", n + 1));
            }
        }
        if c.terminal {
            let last = c.coords[c.depth()];
            if !self.y.contains(last) {
                return Some(format!("terminal coordinate {last} is not in Y"));
            }
        }
        None
    }

    /// `α̃(x₀, x₁, …) = (α(x₀), x₀, x₁, …)`.
    pub fn alpha_tilde(&self, c: &Chain) -> Result<Chain> {
        let x0 = factor_map(c);
        let head = self.system.apply(x0)?;
        let mut coords = Vec::with_capacity(c.len() + 1);
        coords.push(head);
        coords.extend_from_slice(&c.coords);
        Ok(Chain::new(coords, c.terminal))
    }

    /// The shift `(x₀, x₁, …) ↦ (x₁, …)`.
    pub fn alpha_tilde_inv(&self, c: &Chain) -> Result<Chain> {
        if c.len() < 2 {
            return Err(Error::NotInImage);
        }
        Ok(Chain::new(c.coords[1..].to_vec(), c.terminal))
    }
}

/// `Φ(x₀, x₁, …) = x₀`.
pub fn factor_map(c: &Chain) -> f64 {
    c.coords[0]
}

impl PartialDynamics for ExtensionSpec {
    type Point = Chain;

    fn contains(&self, p: &Chain) -> bool {
        self.system.in_domain(factor_map(p))
    }

    fn step(&self, p: &Chain) -> Result<Chain> {
        self.alpha_tilde(p)
    }

    fn distance(&self, a: &Chain, b: &Chain) -> f64 {
        chain_distance(&self.system.space, a, b, &ChainMetricParams::default())
    }
}

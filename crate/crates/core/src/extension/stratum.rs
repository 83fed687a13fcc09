use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use super::{Chain, ExtensionSpec};
use crate::{Error, Result};

/// Index of a stratum: `M_N` for finite `N`, or `M_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StratumIndex {
    Finite(usize),
    Infinite,
}

impl fmt::Display for StratumIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumIndex::Finite(n) => write!(f, "{n}"),
            StratumIndex::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for StratumIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            StratumIndex::Finite(n) => s.serialize_u64(*n as u64),
            StratumIndex::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for StratumIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = StratumIndex;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a non-negative integer or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<StratumIndex, E> {
                Ok(StratumIndex::Finite(v as usize))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<StratumIndex, E> {
                match v {
                    "inf" => Ok(StratumIndex::Infinite),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumSample {
    #[serde(rename = "N")]
    pub n: StratumIndex,
    pub depth: usize,
    pub chains: Vec<Chain>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingParams {
    /// Grid size used for `Y` and for the `x₀` seeds.
    pub density: usize,
    /// Truncation depth for `M_∞`.
    pub depth: usize,
    /// Largest backward tree kept per seed; wider levels are thinned evenly.
    pub frontier_cap: usize,
}

impl SamplingParams {
    pub const DEFAULT_DEPTH: usize = 25;
    pub const DEFAULT_FRONTIER_CAP: usize = 256;

    pub fn new(density: usize, depth: usize) -> Self {
        SamplingParams {
            density,
            depth,
            frontier_cap: Self::DEFAULT_FRONTIER_CAP,
        }
    }
}

pub fn sample_stratum(
    spec: &ExtensionSpec,
    n: StratumIndex,
    density: usize,
    depth: usize,
) -> Result<StratumSample> {
    sample_stratum_with(spec, n, &SamplingParams::new(density, depth))
}

/// Samples a stratum of the extension.
///
/// Chains come from two sources. Forward: each point `y` of a `Y` grid is
/// pushed through `α` to give `(α^N y, …, α y, y)`. Backward: every branch
/// path of the preimage tree is enumerated breadth-first from a set of `x₀`
/// seeds, keeping the paths whose last point lies in `Y` (finite `N`) or
/// that survive to full depth (`M_∞`). The seeds are a grid over `α(Δ)`
/// together with the forward images `αᵏ(y)`, `1 ≤ k ≤ N` (or the depth), so
/// that strata sampled at different `N` share their prefixes.
pub fn sample_stratum_with(
    spec: &ExtensionSpec,
    n: StratumIndex,
    params: &SamplingParams,
) -> Result<StratumSample> {
    if params.density == 0 {
        return Err(Error::InvalidInput("density must be at least 1".into()));
    }
    if n == StratumIndex::Infinite && params.depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let empty = || Error::EmptyStratum {
        stratum: n.to_string(),
    };
    let system = &spec.system;
    let ygrid = spec.y.grid(params.density);

    if n == StratumIndex::Finite(0) {
        if ygrid.is_empty() {
            return Err(empty());
        }
        let chains = ygrid.into_iter().map(|y| Chain::terminal(vec![y])).collect();
        return Ok(StratumSample {
            n,
            depth: 0,
            chains,
        });
    }

    let levels = match n {
        StratumIndex::Finite(k) => k,
        StratumIndex::Infinite => params.depth,
    };

    let mut forward_chains = Vec::new();
    let mut seeds = system.image().grid(params.density);
    for &y in &ygrid {
        let orbit = system.orbit(y, levels);
        seeds.extend_from_slice(&orbit.points[1..]);
        if let StratumIndex::Finite(k) = n {
            if orbit.points.len() == k + 1 {
                let coords: Vec<f64> = orbit.points.iter().rev().copied().collect();
                forward_chains.push(Chain::terminal(coords));
            }
        }
    }
    let mut seen = HashSet::new();
    seeds.retain(|&x| seen.insert(quantize(x)));

    let terminal = matches!(n, StratumIndex::Finite(_));
    let backward: Vec<Vec<Vec<f64>>> = seeds
        .par_iter()
        .map(|&x0| backward_paths(spec, x0, levels, terminal, params.frontier_cap))
        .collect();

    let mut seen = HashSet::new();
    let mut chains = Vec::new();
    let all = forward_chains
        .into_iter()
        .chain(backward.into_iter().flatten().map(|c| Chain::new(c, terminal)));
    for c in all {
        let key: Vec<i64> = c.coords.iter().map(|&x| quantize(x)).collect();
        if seen.insert(key) {
            chains.push(c);
        }
    }
    if chains.is_empty() {
        return Err(empty());
    }
    Ok(StratumSample {
        n,
        depth: levels,
        chains,
    })
}

/// Breadth-first enumeration of branch paths of length `levels` below `x0`.
fn backward_paths(
    spec: &ExtensionSpec,
    x0: f64,
    levels: usize,
    terminal: bool,
    cap: usize,
) -> Vec<Vec<f64>> {
    let system = &spec.system;
    let mut frontier = vec![vec![x0]];
    for level in 1..=levels {
        let mut next = Vec::new();
        for path in &frontier {
            let last = path[path.len() - 1];
            for (_, x) in system.preimages(last) {
                if !system.in_domain(x) {
                    continue;
                }
                if terminal && level == levels && !spec.y.contains(x) {
                    continue;
                }
                let mut p = Vec::with_capacity(levels + 1);
                p.extend_from_slice(path);
                p.push(x);
                next.push(p);
            }
        }
        frontier = thin(next, cap);
        if frontier.is_empty() {
            break;
        }
    }
    frontier
}

fn thin<T>(items: Vec<T>, cap: usize) -> Vec<T> {
    let len = items.len();
    if len <= cap {
        return items;
    }
    items
        .into_iter()
        .enumerate()
        .filter(|(i, _)| (i * cap) % len < cap)
        .map(|(_, t)| t)
        .take(cap)
        .collect()
}

fn quantize(x: f64) -> i64 {
    (x * 1e9).round() as i64
}

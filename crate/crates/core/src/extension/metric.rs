use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Chain, StratumSample};
use crate::space::{SpaceKind, StateSpace};
use crate::{Error, Result};

/// Weighted product metric on chains.
///
/// Coordinate `n` contributes `weight_ratio^n · dₙ`. A chain that has
/// terminated sits at the isolated point `0` of `M ∪ {0}`, at distance
/// `terminal_gap` from every point of `M`. Coordinates past the end of a
/// truncated chain are unknown and contribute nothing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainMetricParams {
    pub weight_ratio: f64,
    pub terminal_gap: f64,
}

impl Default for ChainMetricParams {
    fn default() -> Self {
        ChainMetricParams {
            weight_ratio: 0.5,
            terminal_gap: 1.0,
        }
    }
}

pub fn chain_distance(space: &StateSpace, a: &Chain, b: &Chain, p: &ChainMetricParams) -> f64 {
    let len = a.len().max(b.len());
    let mut w = 1.0;
    let mut total = 0.0;
    for n in 0..len {
        let d = match (a.coords.get(n), b.coords.get(n)) {
            (Some(x), Some(y)) => space.metric(*x, *y),
            (Some(_), None) if b.terminal => p.terminal_gap,
            (None, Some(_)) if a.terminal => p.terminal_gap,
            _ => 0.0,
        };
        total += w * d;
        w *= p.weight_ratio;
    }
    total
}

/// Hausdorff distance between two samples under [`chain_distance`].
pub fn hausdorff(
    space: &StateSpace,
    a: &StratumSample,
    b: &StratumSample,
    p: &ChainMetricParams,
) -> Result<f64> {
    for s in [a, b] {
        if s.chains.is_empty() {
            return Err(Error::EmptyStratum {
                stratum: s.n.to_string(),
            });
        }
    }
    let ab = directed(space, &a.chains, &b.chains, p);
    let ba = directed(space, &b.chains, &a.chains, p);
    Ok(ab.max(ba))
}

fn directed(space: &StateSpace, from: &[Chain], to: &[Chain], p: &ChainMetricParams) -> f64 {
    // The zeroth coordinate has weight one, so |Δx₀| bounds the distance
    // from below; scanning `to` outward in x₀ order lets us stop early.
    let mut order: Vec<usize> = (0..to.len()).collect();
    order.sort_by(|&i, &j| to[i].coords[0].total_cmp(&to[j].coords[0]));
    let keys: Vec<f64> = order.iter().map(|&i| to[i].coords[0]).collect();
    let circle = space.kind == SpaceKind::Circle;
    from.par_iter()
        .map(|c| {
            let x = c.coords[0];
            let start = keys.partition_point(|&k| k < x);
            let n = keys.len();
            let mut best = f64::INFINITY;
            // walk right
            for step in 0..n {
                let idx = start + step;
                let idx = if circle { idx % n } else if idx < n { idx } else { break };
                let gap = if circle {
                    (keys[idx] - x).rem_euclid(1.0)
                } else {
                    keys[idx] - x
                };
                if gap >= best || (circle && gap > 0.5) {
                    break;
                }
                best = best.min(chain_distance(space, c, &to[order[idx]], p));
            }
            // walk left
            for step in 1..=n {
                let idx = if circle {
                    (start + n * 2 - step) % n
                } else if step <= start {
                    start - step
                } else {
                    break;
                };
                let gap = if circle {
                    (x - keys[idx]).rem_euclid(1.0)
                } else {
                    x - keys[idx]
                };
                if gap >= best || (circle && gap > 0.5) {
                    break;
                }
                best = best.min(chain_distance(space, c, &to[order[idx]], p));
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::StratumIndex;

    fn sample(chains: Vec<Chain>) -> StratumSample {
        StratumSample {
            n: StratumIndex::Infinite,
            depth: 0,
            chains,
        }
    }

    #[test]
    fn terminated_versus_continuing() {
        let s = StateSpace::UNIT_INTERVAL;
        let p = ChainMetricParams::default();
        let a = Chain::terminal(vec![0.8]);
        let b = Chain::truncated(vec![0.8, 0.3]);
        assert_eq!(chain_distance(&s, &a, &b, &p), 0.5);
        let c = Chain::truncated(vec![0.8, 0.3, 0.2, 0.1]);
        assert_eq!(chain_distance(&s, &a, &c, &p), 0.5 + 0.25 + 0.125);
        // two truncations agree on what is known
        assert_eq!(chain_distance(&s, &b, &c, &p), 0.0);
    }

    #[test]
    fn brute_force_agrees_on_circle() {
        let s = StateSpace::CIRCLE;
        let p = ChainMetricParams::default();
        let a: Vec<Chain> = (0..37)
            .map(|i| Chain::truncated(vec![(i as f64 * 0.137).fract(), 0.5]))
            .collect();
        let b: Vec<Chain> = (0..23)
            .map(|i| Chain::terminal(vec![(i as f64 * 0.291 + 0.05).fract()]))
            .collect();
        let brute = |x: &[Chain], y: &[Chain]| {
            x.iter()
                .map(|c| {
                    y.iter()
                        .map(|d| chain_distance(&s, c, d, &p))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        let want = brute(&a, &b).max(brute(&b, &a));
        let got = hausdorff(&s, &sample(a), &sample(b), &p).unwrap();
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn empty_sample_is_an_error() {
        let s = StateSpace::UNIT_INTERVAL;
        let p = ChainMetricParams::default();
        let one = sample(vec![Chain::terminal(vec![0.1])]);
        assert!(hausdorff(&s, &one, &sample(vec![]), &p).is_err());
    }
}

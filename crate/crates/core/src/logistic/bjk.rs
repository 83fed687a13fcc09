use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Points sampled along each semicircle.
const ARC_SAMPLES: usize = 33;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BjkArc {
    pub center: f64,
    pub radius: f64,
    /// Upper arcs lie in `y ≥ 0`, lower arcs in `y ≤ 0`.
    pub upper: bool,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BjkEmbedding {
    pub resolution: usize,
    /// Endpoints of the Cantor construction at level `resolution − 1`.
    pub cantor_points: Vec<f64>,
    pub arcs: Vec<BjkArc>,
}

/// Endpoints of the `2^level` intervals of the middle-thirds construction.
fn cantor_endpoints(level: usize) -> Vec<f64> {
    let mut intervals = vec![(0.0f64, 1.0f64)];
    for _ in 0..level {
        intervals = intervals
            .into_iter()
            .flat_map(|(a, b)| {
                let t = (b - a) / 3.0;
                [(a, a + t), (b - t, b)]
            })
            .collect();
    }
    intervals.into_iter().flat_map(|(a, b)| [a, b]).collect()
}

fn semicircle(a: f64, b: f64, upper: bool) -> BjkArc {
    let center = 0.5 * (a + b);
    let radius = 0.5 * (b - a).abs();
    let sign = if upper { 1.0 } else { -1.0 };
    let points = (0..ARC_SAMPLES)
        .map(|i| {
            let th = PI * i as f64 / (ARC_SAMPLES - 1) as f64;
            (center - radius * th.cos(), sign * radius * th.sin())
        })
        .collect();
    BjkArc {
        center,
        radius,
        upper,
        points,
    }
}

/// The bucket-handle picture: Cantor points joined by semicircles.
///
/// Upper semicircles are centred at `½` and join `x` to `1 − x`. For
/// `k = 1, …, resolution − 1` lower semicircles are centred at `5/(2·3ᵏ)`
/// and join the points of `[2/3ᵏ, 1/3^{k−1}]` symmetrically.
pub fn bjk_embedding(resolution: usize) -> BjkEmbedding {
    let resolution = resolution.max(1);
    let pts = cantor_endpoints(resolution - 1);
    let mut arcs = Vec::new();
    for &x in pts.iter().filter(|&&x| x < 0.5) {
        arcs.push(semicircle(x, 1.0 - x, true));
    }
    for k in 1..resolution {
        let scale = 3f64.powi(k as i32);
        let lo = 2.0 / scale;
        let hi = 3.0 / scale;
        let c = 0.5 * (lo + hi);
        for &x in pts.iter().filter(|&&x| x >= lo - 1e-15 && x < c) {
            arcs.push(semicircle(x, 2.0 * c - x, false));
        }
    }
    BjkEmbedding {
        resolution,
        cantor_points: pts,
        arcs,
    }
}

//! Symbolic decompositions of `M_∞` into rays, arcs and bucket-handle pieces.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use serde::{Serialize, Serializer};

use super::regime::RegimeTag;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    RayR,
    Ray { k: usize, i: usize },
    Arc(usize),
    Bjk(usize),
    /// The irreducible continuum with the given number of endpoints.
    C(usize),
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKind::RayR => f.write_str("RayR"),
            NodeKind::Ray { k, i } => write!(f, "Ray({k},{i})"),
            NodeKind::Arc(i) => write!(f, "Arc({i})"),
            NodeKind::Bjk(i) => write!(f, "BJK({i})"),
            NodeKind::C(q) => write!(f, "C({q})"),
        }
    }
}

impl Serialize for NodeKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl NodeKind {
    pub fn id(&self) -> String {
        match self {
            NodeKind::RayR => "R".into(),
            NodeKind::Ray { k, i } => format!("R[{k},{i}]"),
            NodeKind::Arc(i) => format!("I[{i}]"),
            NodeKind::Bjk(i) => format!("B[{i}]"),
            NodeKind::C(q) => format!("C[{q}]"),
        }
    }

    pub fn is_ray(&self) -> bool {
        matches!(self, NodeKind::RayR | NodeKind::Ray { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
}

/// Two pieces meeting in a single point of a periodic orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Intersection {
    pub a: String,
    pub b: String,
    /// `omega[p,i]` for the named periodic points, `end[p,i]` for the points
    /// where the rays of level 0 meet the central continuum.
    pub label: String,
    pub period: usize,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitDatum {
    pub name: String,
    pub period: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuumGraph {
    pub regime: String,
    pub nodes: Vec<Node>,
    pub closure: BTreeMap<String, Vec<String>>,
    pub intersections: Vec<Intersection>,
    pub permutation: BTreeMap<String, String>,
    pub fixed_data: Vec<OrbitDatum>,
}

struct Builder {
    regime: String,
    nodes: Vec<Node>,
    closure: BTreeMap<String, Vec<String>>,
    intersections: Vec<Intersection>,
    permutation: BTreeMap<String, String>,
    fixed_data: Vec<OrbitDatum>,
}

impl Builder {
    fn new(regime: String) -> Self {
        Builder {
            regime,
            nodes: vec![Node {
                id: "R".into(),
                kind: NodeKind::RayR,
            }],
            closure: BTreeMap::new(),
            intersections: Vec::new(),
            permutation: BTreeMap::from([("R".to_string(), "R".to_string())]),
            fixed_data: vec![OrbitDatum {
                name: "endpoint of R".into(),
                period: 1,
            }],
        }
    }

    fn add(&mut self, kind: NodeKind) {
        self.nodes.push(Node { id: kind.id(), kind });
    }

    /// Adds a family `f(1), …, f(len)` cycled by the extension map.
    fn cycle(&mut self, len: usize, f: impl Fn(usize) -> NodeKind) {
        for i in 1..=len {
            self.add(f(i));
            self.permutation.insert(f(i).id(), f(i % len + 1).id());
        }
    }

    fn meet(&mut self, a: NodeKind, b: NodeKind, tag: &str, period: usize, index: usize) {
        self.intersections.push(Intersection {
            a: a.id(),
            b: b.id(),
            label: format!("{tag}[{period},{index}]"),
            period,
            index,
        });
    }

    fn orbit(&mut self, name: impl Into<String>, period: usize) {
        self.fixed_data.push(OrbitDatum {
            name: name.into(),
            period,
        });
    }

    fn finish(mut self) -> ContinuumGraph {
        let all: Vec<String> = self.nodes.iter().map(|n| n.id.clone()).collect();
        self.closure.insert("R".into(), all);
        for n in &self.nodes {
            self.closure
                .entry(n.id.clone())
                .or_insert_with(|| vec![n.id.clone()]);
        }
        ContinuumGraph {
            regime: self.regime,
            nodes: self.nodes,
            closure: self.closure,
            intersections: self.intersections,
            permutation: self.permutation,
            fixed_data: self.fixed_data,
        }
    }
}

/// Rays `R_{k,i}`, `k = 1..n−1`, `i ≤ 2ᵏ`, ending in `leaves` pieces,
/// shared by the cascade stages and the `μ_n` points.
fn doubling_graph(regime: String, n: usize, leaves: usize, leaf: fn(usize) -> NodeKind) -> Builder {
    let mut b = Builder::new(regime);
    for k in 1..n {
        b.cycle(1 << k, |i| NodeKind::Ray { k, i });
    }
    b.cycle(leaves, leaf);
    for k in 1..n {
        let step = 1usize << k;
        for i in 1..=step {
            let mut cl = Vec::new();
            for j in 0..n - k {
                for l in 0..(1usize << j) {
                    cl.push(NodeKind::Ray { k: k + j, i: i + l * step }.id());
                }
            }
            for l in 0..leaves / step {
                cl.push(leaf(i + l * step).id());
            }
            b.closure.insert(NodeKind::Ray { k, i }.id(), cl);
        }
        for i in 1..=step / 2 {
            b.meet(
                NodeKind::Ray { k, i },
                NodeKind::Ray { k, i: step / 2 + i },
                "omega",
                step / 2,
                i,
            );
        }
        b.orbit(format!("omega, level {k}"), step / 2);
    }
    b
}

fn cascade_graph(n: usize) -> ContinuumGraph {
    let mut b = doubling_graph(format!("CascadeStage({n})"), n, 1 << (n - 1), NodeKind::Arc);
    b.orbit("midpoints of arcs", 1 << (n - 1));
    b.orbit("endpoints of arcs", 1 << n);
    b.finish()
}

fn mu_graph(n: usize) -> ContinuumGraph {
    let leaves = 1usize << n;
    let mut b = doubling_graph(format!("MuPoint({n})"), n, leaves, NodeKind::Bjk);
    for i in 1..=leaves / 2 {
        b.meet(NodeKind::Bjk(i), NodeKind::Bjk(leaves / 2 + i), "omega", leaves / 2, i);
    }
    b.orbit("omega, bucket-handle level", leaves / 2);
    b.finish()
}

fn window_graph(n: usize, m: usize) -> ContinuumGraph {
    let q = 2 * n + 1;
    let regime = if m == 0 {
        format!("Window({n})")
    } else {
        format!("WindowCascadeStage({n},{m})")
    };
    let mut b = Builder::new(regime);
    for k in 0..m {
        b.cycle(q << k, |i| NodeKind::Ray { k, i });
    }
    let arcs = if m == 0 { 0 } else { q << (m - 1) };
    if arcs > 0 {
        b.cycle(arcs, NodeKind::Arc);
    }
    let c = NodeKind::C(q);
    b.add(c);
    b.permutation.insert(c.id(), c.id());

    for k in 0..m {
        let step = q << k;
        for i in 1..=step {
            let mut cl = Vec::new();
            for j in 0..m - k {
                for l in 0..(1usize << j) {
                    cl.push(NodeKind::Ray { k: k + j, i: i + l * step }.id());
                }
            }
            for l in 0..(1usize << (m - k - 1)) {
                cl.push(NodeKind::Arc(i + l * step).id());
            }
            b.closure.insert(NodeKind::Ray { k, i }.id(), cl);
        }
    }
    let c_closure: Vec<String> = b
        .nodes
        .iter()
        .filter(|nd| nd.kind != NodeKind::RayR)
        .map(|nd| nd.id.clone())
        .collect();
    b.closure.insert(c.id(), c_closure);

    if m >= 1 {
        for i in 1..=q {
            b.meet(c, NodeKind::Ray { k: 0, i }, "end", q, i);
        }
    }
    for k in 1..m {
        let half = q << (k - 1);
        for i in 1..=half {
            b.meet(NodeKind::Ray { k, i }, NodeKind::Ray { k, i: i + half }, "omega", half, i);
        }
    }
    for k in 0..m.saturating_sub(1) {
        b.orbit(format!("omega, level {k}"), q << k);
    }
    if m == 0 {
        b.orbit("endpoints of C", q);
    } else {
        b.orbit("midpoints of arcs", q << (m - 1));
        b.orbit("endpoints of C", q << m);
    }
    b.finish()
}

/// The decomposition of `M_∞` for a regime covered by the structure
/// theorems: cascade stages `n ≥ 1`, the points `μ_n`, and the odd windows
/// with their cascades.
pub fn continuum_graph(tag: RegimeTag) -> Result<ContinuumGraph> {
    match tag {
        RegimeTag::CascadeStage(n) if n >= 1 => Ok(cascade_graph(n as usize)),
        RegimeTag::MuPoint(n) if n >= 1 => Ok(mu_graph(n)),
        RegimeTag::Window(n) if n >= 1 => Ok(window_graph(n, 0)),
        RegimeTag::WindowCascadeStage(n, m) if n >= 1 => Ok(window_graph(n, m)),
        other => Err(Error::UnsupportedRegime(other.to_string())),
    }
}

impl ContinuumGraph {
    pub fn count(&self, pred: impl Fn(&NodeKind) -> bool) -> usize {
        self.nodes.iter().filter(|n| pred(&n.kind)).count()
    }

    pub fn rays(&self) -> usize {
        self.count(NodeKind::is_ray)
    }

    pub fn arcs(&self) -> usize {
        self.count(|k| matches!(k, NodeKind::Arc(_)))
    }

    pub fn bjk(&self) -> usize {
        self.count(|k| matches!(k, NodeKind::Bjk(_)))
    }

    /// Cycle lengths of the node permutation, sorted.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for n in &self.nodes {
            if seen.contains(&n.id) {
                continue;
            }
            let mut len = 0;
            let mut cur = n.id.clone();
            while seen.insert(cur.clone()) {
                len += 1;
                cur = self.permutation[&cur].clone();
            }
            out.push(len);
        }
        out.sort_unstable();
        out
    }

    /// Largest period among the recorded orbits; the endpoint orbit.
    pub fn endpoint_period(&self) -> usize {
        self.fixed_data.iter().map(|o| o.period).max().unwrap_or(1)
    }

    /// Structural consistency: the permutation is a bijection, `R` is dense,
    /// and every intersection label generates an orbit of its period under
    /// the induced action on pairs of nodes.
    pub fn check(&self) -> std::result::Result<(), String> {
        let ids: BTreeSet<&String> = self.nodes.iter().map(|n| &n.id).collect();
        let images: BTreeSet<&String> = self.permutation.values().collect();
        if images != ids || self.permutation.len() != ids.len() {
            return Err("permutation is not a bijection of the nodes".into());
        }
        if self.closure["R"].len() != self.nodes.len() {
            return Err("closure of R is not everything".into());
        }
        for (k, v) in &self.closure {
            if !v.contains(k) {
                return Err(format!("closure of {k} misses {k}"));
            }
        }
        let pair = |a: &str, b: &str| {
            if a <= b {
                (a.to_string(), b.to_string())
            } else {
                (b.to_string(), a.to_string())
            }
        };
        let present: HashMap<(String, String), &Intersection> = self
            .intersections
            .iter()
            .map(|x| (pair(&x.a, &x.b), x))
            .collect();
        for x in &self.intersections {
            let start = pair(&x.a, &x.b);
            let mut cur = start.clone();
            let mut len = 0;
            loop {
                cur = pair(&self.permutation[&cur.0], &self.permutation[&cur.1]);
                len += 1;
                match present.get(&cur) {
                    Some(y) if y.period == x.period => {}
                    _ => return Err(format!("intersection {} is not carried to a peer", x.label)),
                }
                if cur == start {
                    break;
                }
            }
            if len != x.period {
                return Err(format!("{} has orbit length {len}, expected {}", x.label, x.period));
            }
        }
        Ok(())
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph continuum {{");
        let _ = writeln!(s, "  label=\"{}\";", self.regime);
        for n in &self.nodes {
            let shape = match n.kind {
                NodeKind::RayR | NodeKind::Ray { .. } => "ellipse",
                NodeKind::Arc(_) => "box",
                NodeKind::Bjk(_) => "doubleoctagon",
                NodeKind::C(_) => "diamond",
            };
            let _ = writeln!(s, "  \"{}\" [label=\"{}\", shape={shape}];", n.id, n.kind);
        }
        for (a, b) in &self.permutation {
            let _ = writeln!(s, "  \"{a}\" -> \"{b}\";");
        }
        for x in &self.intersections {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [dir=none, style=dashed, label=\"{}\"];",
                x.a, x.b, x.label
            );
        }
        s.push_str("}\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_cascade_stage() {
        let g = continuum_graph(RegimeTag::CascadeStage(2)).unwrap();
        assert_eq!(g.rays(), 3);
        assert_eq!(g.arcs(), 2);
        assert_eq!(g.permutation["I[1]"], "I[2]");
        assert_eq!(g.permutation["I[2]"], "I[1]");
        assert_eq!(g.endpoint_period(), 4);
        assert_eq!(g.check(), Ok(()));
    }

    #[test]
    fn first_mu_point() {
        let g = continuum_graph(RegimeTag::MuPoint(1)).unwrap();
        assert_eq!(g.rays(), 1);
        assert_eq!(g.bjk(), 2);
        assert_eq!(g.intersections.len(), 1);
        assert_eq!(g.intersections[0].period, 1);
        assert_eq!(g.check(), Ok(()));
    }

    #[test]
    fn period_three_window() {
        let g = continuum_graph(RegimeTag::Window(1)).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert!(g.intersections.is_empty());
        assert_eq!(g.closure["R"].len(), 2);
        assert_eq!(g.endpoint_period(), 3);
    }

    #[test]
    fn ray_closure_follows_the_doubling_tree() {
        let g = continuum_graph(RegimeTag::CascadeStage(3)).unwrap();
        let cl = &g.closure["R[1,1]"];
        for id in ["R[1,1]", "R[2,1]", "R[2,3]", "I[1]", "I[3]"] {
            assert!(cl.contains(&id.to_string()), "{id}");
        }
        assert_eq!(cl.len(), 5);
    }

    #[test]
    fn unsupported_regimes() {
        assert!(continuum_graph(RegimeTag::CascadeStage(0)).is_err());
        assert!(continuum_graph(RegimeTag::Full).is_err());
        assert!(continuum_graph(RegimeTag::ChaoticUnclassified).is_err());
    }
}

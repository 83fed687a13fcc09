//! Finite operator models: the partial isometry `U` on `ℓ²` of a finite
//! chain set, the diagonal coefficient algebra `A`, the algebra `B` it
//! generates with `U*ⁿ A Uⁿ`, and residuals of the algebraic identities.
//!
//! The basis vector `e_c` of a chain `c` is sent by `U` to `e_{α̃⁻¹(c)}`,
//! which is `(Uf)(x̃) = f(α̃ x̃)` read on point masses. `U` is therefore a
//! partial permutation matrix and every identity below holds up to rounding.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::dynamics::{Branch, BranchLabel, PartialMapSystem};
use crate::extension::{Chain, ExtensionSpec};
use crate::logistic;
use crate::space::{Interval, IntervalSet, StateSpace};
use crate::{Error, Result, EPS_CHAIN};

/// Largest basis the builder will produce.
pub const BASIS_CAP: usize = 5000;

/// Residual below which a check passes.
pub const CHECK_TOL: f64 = 1e-12;

const POWER_TOL: f64 = 1e-14;
const POWER_MAX_ITERS: usize = 2000;

pub type CoefficientFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A named function of the zeroth coordinate.
#[derive(Clone)]
pub struct Coefficient {
    pub name: String,
    pub f: CoefficientFn,
}

impl std::fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.name)
    }
}

impl Coefficient {
    pub fn new(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient {
            name: name.into(),
            f: Arc::new(f),
        }
    }
}

/// `1`, `x`, `x²` and a hat bump at each grid point.
pub fn default_generators(space: StateSpace, grid: &[f64]) -> Vec<Coefficient> {
    let mut gens = vec![
        Coefficient::new("1", |_| 1.0),
        Coefficient::new("x", |x| x),
        Coefficient::new("x^2", |x| x * x),
    ];
    let mut pts: Vec<f64> = grid.iter().map(|&g| space.normalize(g)).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| space.metric(*a, *b) <= EPS_CHAIN);
    let gap = pts
        .iter()
        .enumerate()
        .flat_map(|(i, a)| pts[i + 1..].iter().map(move |b| space.metric(*a, *b)))
        .fold(1.0f64, f64::min);
    let width = (0.5 * gap).max(1e-3);
    for g in pts {
        gens.push(Coefficient::new(format!("bump({g})"), move |x| {
            (1.0 - space.metric(x, g) / width).max(0.0)
        }));
    }
    gens
}

#[derive(Debug, Clone)]
pub struct FiniteModel {
    pub name: String,
    pub spec: ExtensionSpec,
    pub chains: Vec<Chain>,
    pub u: DMatrix<f64>,
    /// Diagonal matrices `a(c) = f(x₀(c))`.
    pub a_gens: Vec<(String, DMatrix<f64>)>,
}

impl FiniteModel {
    pub fn dim(&self) -> usize {
        self.chains.len()
    }

    pub fn index_of(&self, c: &Chain) -> Option<usize> {
        find_chain(&self.spec.system.space, &self.chains, c)
    }
}

fn same_chain(space: &StateSpace, a: &Chain, b: &Chain) -> bool {
    a.terminal == b.terminal
        && a.len() == b.len()
        && a.coords
            .iter()
            .zip(&b.coords)
            .all(|(x, y)| space.metric(*x, *y) <= EPS_CHAIN)
}

fn find_chain(space: &StateSpace, basis: &[Chain], c: &Chain) -> Option<usize> {
    basis.iter().position(|b| same_chain(space, b, c))
}

/// `α̃⁻¹` on the model basis.
///
/// A non-terminal chain stands for an infinite backward orbit, so its length
/// is kept fixed: the shift drops `x₀` and appends the next backward point.
/// That point must be unique for `U` to be a partial permutation.
fn model_shift(spec: &ExtensionSpec, c: &Chain) -> Result<Option<Chain>> {
    if c.terminal {
        return Ok((c.len() >= 2).then(|| Chain::terminal(c.coords[1..].to_vec())));
    }
    let last = c.coords[c.depth()];
    let pre = spec.system.preimages(last);
    match pre.as_slice() {
        [] => Err(Error::InvalidInput(format!(
            "truncated chain ends at {last}, which has no preimage"
        ))),
        [(_, x)] => {
            let mut coords = c.coords[1..].to_vec();
            coords.push(*x);
            Ok(Some(Chain::truncated(coords)))
        }
        _ => Err(Error::InvalidInput(format!(
            "truncated chain ending at {last} has {} continuations; finite models need one",
            pre.len()
        ))),
    }
}

/// `α̃` on the model basis; non-terminal chains keep their length.
fn model_lift(spec: &ExtensionSpec, c: &Chain, closure_depth: usize) -> Option<Chain> {
    let head = spec.system.apply(c.coords[0]).ok()?;
    let mut coords = Vec::with_capacity(c.len() + 1);
    coords.push(head);
    if c.terminal {
        if c.len() > closure_depth {
            return None;
        }
        coords.extend_from_slice(&c.coords);
    } else {
        coords.extend_from_slice(&c.coords[..c.depth()]);
    }
    Some(Chain::new(coords, c.terminal))
}

/// Closes `seeds` under `α̃⁻¹`, and under `α̃` while terminal chains have
/// at most `closure_depth + 1` coordinates, then builds `U` and `A`.
pub fn build_model(
    name: impl Into<String>,
    spec: &ExtensionSpec,
    seeds: &[Chain],
    closure_depth: usize,
    gens: &[Coefficient],
) -> Result<FiniteModel> {
    let space = spec.system.space;
    let mut basis: Vec<Chain> = Vec::new();
    let mut queue: Vec<Chain> = Vec::new();
    for s in seeds {
        if let Some(why) = spec.chain_defect(s) {
            return Err(Error::InvalidInput(format!("seed chain invalid: {why}")));
        }
        if find_chain(&space, &basis, s).is_none() {
            basis.push(s.clone());
            queue.push(s.clone());
        }
    }
    while let Some(c) = queue.pop() {
        let next = [model_shift(spec, &c)?, model_lift(spec, &c, closure_depth)];
        for d in next.into_iter().flatten() {
            if find_chain(&space, &basis, &d).is_none() {
                if basis.len() >= BASIS_CAP {
                    return Err(Error::ClosureOverflow { cap: BASIS_CAP });
                }
                basis.push(d.clone());
                queue.push(d);
            }
        }
    }
    // deterministic order: terminal by length then coordinates, truncated last
    basis.sort_by(|a, b| {
        a.terminal
            .cmp(&b.terminal)
            .reverse()
            .then(a.len().cmp(&b.len()))
            .then_with(|| {
                a.coords
                    .iter()
                    .zip(&b.coords)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    let n = basis.len();
    let mut u = DMatrix::zeros(n, n);
    for (j, c) in basis.iter().enumerate() {
        if let Some(s) = model_shift(spec, c)? {
            let i = find_chain(&space, &basis, &s).ok_or_else(|| {
                Error::InvalidInput("basis is not closed under the shift".into())
            })?;
            u[(i, j)] = 1.0;
        }
    }
    let a_gens = gens
        .iter()
        .map(|g| {
            let d = DVector::from_iterator(n, basis.iter().map(|c| (g.f)(c.coords[0])));
            (g.name.clone(), DMatrix::from_diagonal(&d))
        })
        .collect();
    Ok(FiniteModel {
        name: name.into(),
        spec: spec.clone(),
        chains: basis,
        u,
        a_gens,
    })
}

/// Constant map onto `p` with `Y = [0, 1]` sampled at `y_points` points:
/// `y_points` chains in each of `M_0, …, M_depth` and the single chain
/// `(p, p, …)` of `M_∞`.
pub fn constant_model(p: f64, y_points: usize, depth: usize) -> Result<FiniteModel> {
    let system = PartialMapSystem::constant(p);
    let space = system.space;
    let spec = ExtensionSpec::new(system, space.whole())?;
    let grid = space.grid(y_points);
    let mut seeds: Vec<Chain> = grid.iter().map(|&y| Chain::terminal(vec![y])).collect();
    seeds.push(Chain::truncated(vec![p; depth + 1]));
    let gens = default_generators(space, &grid);
    build_model(format!("constant(p={p})"), &spec, &seeds, depth, &gens)
}

/// Rotation by `m/n` with `Y` the arc `[0, m/n]` sampled at its endpoints,
/// strata up to `depth`, and the `n` periodic backward orbits.
pub fn rotation_model(m: u32, n: u32, depth: usize) -> Result<FiniteModel> {
    let tau = m as f64 / n as f64;
    let system = PartialMapSystem::rotation(tau);
    let space = system.space;
    let spec = ExtensionSpec::new(system, IntervalSet::new(space, vec![Interval::new(0.0, tau)]))?;
    let mut seeds = vec![Chain::terminal(vec![0.0]), Chain::terminal(vec![tau])];
    seeds.extend(periodic_chains(&spec, n as usize, depth));
    let grid: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
    let gens = default_generators(space, &grid);
    build_model(format!("rotation({m}/{n})"), &spec, &seeds, depth, &gens)
}

/// Rotation by `m/n` with `Y = ∅`: only the periodic backward orbits, so
/// `U` is unitary.
pub fn rotation_unitary_model(m: u32, n: u32, depth: usize) -> Result<FiniteModel> {
    let tau = m as f64 / n as f64;
    let system = PartialMapSystem::rotation(tau);
    let space = system.space;
    let spec = ExtensionSpec::new(system, IntervalSet::empty(space))?;
    let seeds = periodic_chains(&spec, n as usize, depth);
    let grid: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
    let gens = default_generators(space, &grid);
    build_model(format!("rotation-unitary({m}/{n})"), &spec, &seeds, depth, &gens)
}

/// Backward orbits of `k/n`, `k < n`, truncated to `depth + 1` points.
fn periodic_chains(spec: &ExtensionSpec, n: usize, depth: usize) -> Vec<Chain> {
    (0..n)
        .map(|k| {
            let mut coords = vec![k as f64 / n as f64];
            for _ in 0..depth {
                let last = coords[coords.len() - 1];
                coords.push(spec.system.preimages(last)[0].1);
            }
            Chain::truncated(coords)
        })
        .collect()
}

/// The logistic map restricted to a finite invariant set `orbit`, listed in
/// orbit order. `forward` snaps to the next listed point so that the
/// restriction is exact; `residual` reports how far the true map misses.
pub fn finite_orbit_system(lambda: f64, orbit: &[f64]) -> (PartialMapSystem, f64) {
    let space = StateSpace::UNIT_INTERVAL;
    let pts: Arc<Vec<f64>> = Arc::new(orbit.to_vec());
    let k = pts.len();
    let residual = (0..k)
        .map(|i| (logistic::map(lambda, pts[i]) - pts[(i + 1) % k]).abs())
        .fold(0.0f64, f64::max);
    let nearest = {
        let pts = Arc::clone(&pts);
        move |x: f64| {
            (0..pts.len())
                .min_by(|&a, &b| (pts[a] - x).abs().total_cmp(&(pts[b] - x).abs()))
                .unwrap_or(0)
        }
    };
    let fwd = {
        let pts = Arc::clone(&pts);
        let nearest = nearest.clone();
        move |x: f64| pts[(nearest(x) + 1) % pts.len()]
    };
    let branches = (0..k)
        .map(|i| {
            let x = pts[i];
            Branch {
                label: BranchLabel::Other(i as u16),
                domain: Interval::point(x),
                range: Interval::point(pts[(i + 1) % k]),
                inverse: Arc::new(move |_| x),
            }
        })
        .collect();
    let domain = IntervalSet::new(space, pts.iter().map(|&x| Interval::point(x)).collect());
    let system = PartialMapSystem::new(
        format!("logistic({lambda}) on a {k}-point orbit"),
        space,
        domain,
        Arc::new(fwd),
        branches,
    );
    (system, residual)
}

/// The superstable period-3 orbit `{½, λ, α_λ(λ)}` in the period-3 window,
/// as a state space of its own. Its extension is `M_∞` alone: three chains
/// permuted cyclically by `U`.
pub fn logistic_period3_model(depth: usize) -> Result<FiniteModel> {
    let edges = logistic::window_boundaries(1)?;
    let lambda = edges.superstable;
    let orbit = [0.5, lambda, logistic::map(lambda, lambda)];
    let (system, _) = finite_orbit_system(lambda, &orbit);
    let space = system.space;
    let support = system.domain.clone();
    let spec = ExtensionSpec::with_support(system, IntervalSet::empty(space), &support)?;
    let seeds: Vec<Chain> = (0..3)
        .map(|i| {
            let coords = (0..=depth).map(|j| orbit[(i + 3 * depth - j) % 3]).collect();
            Chain::truncated(coords)
        })
        .collect();
    let gens = default_generators(space, &orbit);
    build_model(format!("logistic-period3({lambda})"), &spec, &seeds, depth, &gens)
}

/// Largest singular value by power iteration on `MᵀM`.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    let mtm = m.transpose() * m;
    let n = mtm.ncols();
    // fixed, non-symmetric start so no eigenvector is missed by symmetry
    let mut v = DVector::from_iterator(n, (0..n).map(|i| 1.0 + 0.37 * ((i * 7919) % 101) as f64 / 101.0));
    v /= v.norm();
    let mut est = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let w = &mtm * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        let done = (nw - est).abs() <= POWER_TOL * nw;
        est = nw;
        v = w / nw;
        if done {
            break;
        }
    }
    est.sqrt()
}

fn off_diagonal(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut o = m.clone();
    o.fill_diagonal(0.0);
    o
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub residual: f64,
    pub pass: bool,
}

/// Named residuals; serializes as `{check: {residual, pass}}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperatorCheckReport {
    pub checks: BTreeMap<String, CheckEntry>,
}

impl OperatorCheckReport {
    pub fn record(&mut self, name: &str, residual: f64) {
        self.checks.insert(
            name.to_string(),
            CheckEntry {
                residual,
                pass: residual < CHECK_TOL,
            },
        );
    }

    pub fn merge(&mut self, other: OperatorCheckReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.values().map(|c| c.residual).fold(0.0, f64::max)
    }
}

/// Partial-permutation defect: entries off `{0, 1}` plus extra ones in any
/// row or column.
pub fn partial_permutation_defect(m: &DMatrix<f64>) -> f64 {
    let bad_entries = m.iter().filter(|&&x| x != 0.0 && x != 1.0).count();
    let extra = |lines: Vec<usize>| lines.into_iter().map(|k| k.saturating_sub(1)).sum::<usize>();
    let rows = extra(m.row_iter().map(|r| r.iter().filter(|&&x| x != 0.0).count()).collect());
    let cols = extra(m.column_iter().map(|c| c.iter().filter(|&&x| x != 0.0).count()).collect());
    (bad_entries + rows + cols) as f64
}

/// Residuals of `UaU* ∈ A`, `U*aU ∈ A`, `Ua = δ(a)U`, `δ(1) = UU*` and
/// `U*U ∈ A′`, plus the partial-isometry identity.
pub fn verify_coefficient_relations(m: &FiniteModel) -> OperatorCheckReport {
    let u = &m.u;
    let ut = u.transpose();
    let mut r = OperatorCheckReport::default();
    r.record("partial_isometry", operator_norm(&(u * &ut * u - u)));
    r.record("partial_permutation", partial_permutation_defect(u));
    let mut diag = 0.0f64;
    let mut adj_diag = 0.0f64;
    let mut cov = 0.0f64;
    let mut comm = 0.0f64;
    let sup = &ut * u;
    for (_, a) in &m.a_gens {
        let delta = u * a * &ut;
        diag = diag.max(operator_norm(&off_diagonal(&delta)));
        adj_diag = adj_diag.max(operator_norm(&off_diagonal(&(&ut * a * u))));
        cov = cov.max(operator_norm(&(u * a - &delta * u)));
        comm = comm.max(operator_norm(&(&sup * a - a * &sup)));
    }
    r.record("coefficient_diag", diag);
    r.record("coefficient_adjoint_diag", adj_diag);
    r.record("covariance", cov);
    let one = DMatrix::identity(m.dim(), m.dim());
    r.record("unit_image", operator_norm(&(u * &one * &ut - u * &ut)));
    r.record("support_commutant", comm);
    r
}

/// A commutative algebra of diagonal matrices, kept as generators plus its
/// minimal projections.
#[derive(Debug, Clone)]
pub struct DiagonalAlgebra {
    pub generators: Vec<(String, DMatrix<f64>)>,
    /// Index sets of the minimal projections.
    pub atoms: Vec<Vec<usize>>,
    /// `atom_of[i]` is the atom containing basis index `i`.
    pub atom_of: Vec<usize>,
    pub commutativity_defect: f64,
}

impl DiagonalAlgebra {
    fn from_generators(dim: usize, generators: Vec<(String, DMatrix<f64>)>) -> Self {
        // joint values, clustered within ε_chain per generator
        let mut keys: Vec<Vec<i64>> = vec![Vec::with_capacity(generators.len()); dim];
        for (_, g) in &generators {
            let mut vals: Vec<(f64, usize)> = (0..dim).map(|i| (g[(i, i)], i)).collect();
            vals.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cluster = 0i64;
            for k in 0..vals.len() {
                if k > 0 && vals[k].0 - vals[k - 1].0 > EPS_CHAIN {
                    cluster += 1;
                }
                keys[vals[k].1].push(cluster);
            }
        }
        let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for (i, k) in keys.into_iter().enumerate() {
            groups.entry(k).or_default().push(i);
        }
        let mut atoms: Vec<Vec<usize>> = groups.into_values().collect();
        atoms.sort();
        let mut atom_of = vec![0; dim];
        for (a, idx) in atoms.iter().enumerate() {
            for &i in idx {
                atom_of[i] = a;
            }
        }
        let mut commutativity_defect = 0.0f64;
        for (i, (_, x)) in generators.iter().enumerate() {
            for (_, y) in &generators[i + 1..] {
                commutativity_defect = commutativity_defect.max(operator_norm(&(x * y - y * x)));
            }
        }
        DiagonalAlgebra {
            generators,
            atoms,
            atom_of,
            commutativity_defect,
        }
    }

    pub fn projection(&self, atom: usize, dim: usize) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(dim, dim);
        for &i in &self.atoms[atom] {
            p[(i, i)] = 1.0;
        }
        p
    }

    /// Distance from `x` to the algebra: off-diagonal part plus the spread
    /// of the diagonal within each atom.
    pub fn membership_defect(&self, x: &DMatrix<f64>) -> f64 {
        let off = operator_norm(&off_diagonal(x));
        let spread = self
            .atoms
            .iter()
            .map(|idx| {
                let vals = idx.iter().map(|&i| x[(i, i)]);
                let hi = vals.clone().fold(f64::NEG_INFINITY, f64::max);
                let lo = vals.fold(f64::INFINITY, f64::min);
                hi - lo
            })
            .fold(0.0f64, f64::max);
        off + spread
    }
}

/// The coefficient algebra `A` of the model.
pub fn algebra_a(m: &FiniteModel) -> DiagonalAlgebra {
    DiagonalAlgebra::from_generators(m.dim(), m.a_gens.clone())
}

/// `B`, generated by `U*ⁿ a Uⁿ` for `a` in the generators of `A`, `n ≤ n_max`.
pub fn build_b(m: &FiniteModel, n_max: usize) -> DiagonalAlgebra {
    let mut gens = Vec::with_capacity(m.a_gens.len() * (n_max + 1));
    let mut un = DMatrix::identity(m.dim(), m.dim());
    for n in 0..=n_max {
        let unt = un.transpose();
        for (name, a) in &m.a_gens {
            gens.push((format!("U*^{n} {name} U^{n}"), &unt * a * &un));
        }
        un = &m.u * un;
    }
    DiagonalAlgebra::from_generators(m.dim(), gens)
}

/// `δδ*δ = δ`, `δ*δδ* = δ*`, `U*BU ⊆ B`, `UBU* ⊆ B`, `δ(B) = UU*B` and
/// commutativity of `B`, on the generators of `B`.
pub fn verify_reversibility(m: &FiniteModel, b: &DiagonalAlgebra) -> OperatorCheckReport {
    let u = &m.u;
    let ut = u.transpose();
    let delta = |x: &DMatrix<f64>| u * x * &ut;
    let delta_star = |x: &DMatrix<f64>| &ut * x * u;
    let uus = u * &ut;
    let (mut gi, mut gi_adj, mut inv_adj, mut inv, mut ideal) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (_, x) in &b.generators {
        let dx = delta(x);
        let dsx = delta_star(x);
        gi = gi.max(operator_norm(&(delta(&delta_star(&dx)) - &dx)));
        gi_adj = gi_adj.max(operator_norm(&(delta_star(&delta(&dsx)) - &dsx)));
        inv_adj = inv_adj.max(b.membership_defect(&dsx));
        inv = inv.max(b.membership_defect(&dx));
        ideal = ideal
            .max(operator_norm(&(&dx - &uus * &dx)))
            .max(operator_norm(&(&uus * x - delta(&dsx))));
    }
    let mut r = OperatorCheckReport::default();
    r.record("generalized_inverse", gi);
    r.record("generalized_inverse_adjoint", gi_adj);
    r.record("b_invariant_adjoint", inv_adj);
    r.record("b_invariant", inv);
    r.record("image_ideal", ideal);
    r.record("b_commutative", b.commutativity_defect);
    r
}

#[derive(Debug, Clone)]
pub struct IdealData {
    pub u_star_u: DMatrix<f64>,
    pub u_u_star: DMatrix<f64>,
    /// Carrier of `(1 − U*U)A ∩ A`.
    pub q: DMatrix<f64>,
    pub p: DMatrix<f64>,
    /// Atoms of `A` spanning `ker δ`.
    pub kernel_atoms: Vec<usize>,
    /// Atoms of `A` spanning `(1 − U*U)A ∩ A`.
    pub ideal_atoms: Vec<usize>,
}

/// `ker δ = (1 − U*U)A ∩ A` as sets of atoms, and `U*U ≤ P = 1 − Q`.
pub fn kernel_annihilator_check(m: &FiniteModel) -> (IdealData, OperatorCheckReport) {
    let a = algebra_a(m);
    let n = m.dim();
    let u = &m.u;
    let ut = u.transpose();
    let sup = &ut * u;
    let mut kernel_atoms = Vec::new();
    let mut ideal_atoms = Vec::new();
    for k in 0..a.atoms.len() {
        let p = a.projection(k, n);
        if operator_norm(&(u * &p * &ut)) == 0.0 {
            kernel_atoms.push(k);
        }
        if operator_norm(&(&sup * &p)) == 0.0 {
            ideal_atoms.push(k);
        }
    }
    let mut q = DMatrix::zeros(n, n);
    for &k in &ideal_atoms {
        q += a.projection(k, n);
    }
    let p = DMatrix::identity(n, n) - &q;
    let sym_diff = kernel_atoms
        .iter()
        .filter(|k| !ideal_atoms.contains(k))
        .chain(ideal_atoms.iter().filter(|k| !kernel_atoms.contains(k)))
        .count();
    let gap = &p - &sup;
    let min_eig = if n == 0 {
        0.0
    } else {
        SymmetricEigen::new(gap).eigenvalues.min()
    };
    let mut r = OperatorCheckReport::default();
    r.record("kernel_equals_annihilator", sym_diff as f64);
    r.record("carrier_bound", (-min_eig).max(0.0));
    let data = IdealData {
        u_star_u: sup,
        u_u_star: u * &ut,
        q,
        p,
        kernel_atoms,
        ideal_atoms,
    };
    (data, r)
}

/// Every registered check on one model, with `B` built to `n_max`.
pub fn full_report(m: &FiniteModel, n_max: usize) -> OperatorCheckReport {
    let b = build_b(m, n_max);
    let mut r = verify_coefficient_relations(m);
    r.merge(verify_reversibility(m, &b));
    r.merge(kernel_annihilator_check(m).1);
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub dim: usize,
    /// Distinct joint eigenvalue tuples of `B`.
    pub b_points: usize,
    /// Distinct joint eigenvalue tuples of `A`.
    pub a_points: usize,
    /// Basis chains whose `α̃` image disagrees with `U`.
    pub shift_mismatches: usize,
    /// Generator values that do not move one step under `U`.
    pub tuple_mismatches: usize,
}

impl SpectrumReport {
    pub fn ok(&self) -> bool {
        self.b_points == self.dim && self.shift_mismatches == 0 && self.tuple_mismatches == 0
    }
}

/// The finite shadow of `M(B) ≅ M̃`: joint eigenvalues of `B` separate the
/// chains, and `U` moves them as `α̃` does.
pub fn spectrum_matches_extension(m: &FiniteModel, b: &DiagonalAlgebra) -> SpectrumReport {
    let space = m.spec.system.space;
    let n = m.dim();
    let a = algebra_a(m);
    let mut shift_mismatches = 0;
    let mut tuple_mismatches = 0;
    let per_level = m.a_gens.len();
    for (j, c) in m.chains.iter().enumerate() {
        let Ok(up) = m.spec.alpha_tilde(c) else {
            continue;
        };
        // a truncated chain keeps its length in the basis
        let target = if c.terminal {
            up
        } else {
            Chain::truncated(up.coords[..c.len()].to_vec())
        };
        let Some(k) = find_chain(&space, &m.chains, &target) else {
            continue;
        };
        if m.u[(j, k)] != 1.0 {
            shift_mismatches += 1;
        }
        // the level-(l+1) generator at α̃(c) equals the level-l one at c
        for g in 0..b.generators.len().saturating_sub(per_level) {
            let here = b.generators[g].1[(j, j)];
            let there = b.generators[g + per_level].1[(k, k)];
            if (here - there).abs() > EPS_CHAIN {
                tuple_mismatches += 1;
            }
        }
    }
    SpectrumReport {
        dim: n,
        b_points: b.atoms.len(),
        a_points: a.atoms.len(),
        shift_mismatches,
        tuple_mismatches,
    }
}

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use revext::circle::{
    self, circle_extension_spec, compression_case, extension_shape, rotation_number,
    rotation_number_averaged, CircleExtensionShape, CircleHomeo, ClassifyParams,
};
use revext::dynamics::PartialMapSystem;
use revext::extension::{sample_stratum, ExtensionSpec, StratumIndex, StratumSample};
use revext::logistic::{self, classify_regime, continuum_graph, CascadeTable, RegimeTag};
use revext::operator::{self, build_b, full_report, spectrum_matches_extension};
use revext::Error;
use serde::Serialize;
use serde_json::json;

use crate::config::{check_count, check_lambda, FileConfig};
use crate::svg::Canvas;
use crate::{
    BifurcateArgs, ClassifyArgs, CliResult, Command, ExtendArgs, GraphArgs, GraphFormat, ModelKind,
    OperatorArgs, RegimeKind, RotationArgs, SystemKind,
};

/// Runs one command; `Ok(false)` means a check failed.
pub fn run(cmd: &Command, cfg: &FileConfig, out: &Path) -> CliResult<bool> {
    match cmd {
        Command::Extend(a) => extend(a, cfg, out),
        Command::Bifurcate(a) => bifurcate(a, cfg, out),
        Command::Classify(a) => classify(a, cfg, out),
        Command::ContinuumGraph(a) => graph(a, cfg, out),
        Command::Rotation(a) => rotation(a, cfg, out),
        Command::OperatorCheck(a) => operator_check(a, cfg, out),
    }
}

fn write(out: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    let path = out.join(name);
    std::fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> CliResult<PathBuf> {
    write(out, name, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn read_grid(path: &Path) -> CliResult<CircleHomeo> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read grid {}: {e}", path.display()))?;
    let values = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<f64>().map_err(|e| format!("grid value {l}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CircleHomeo::from_grid(values)?)
}

fn circle_homeo(
    cfg: &FileConfig,
    tau: Option<f64>,
    a: Option<f64>,
    grid: Option<&PathBuf>,
) -> CliResult<CircleHomeo> {
    let grid: Option<PathBuf> = cfg.pick_opt(grid.cloned(), "grid")?;
    if let Some(g) = grid {
        return read_grid(&g);
    }
    let tau = cfg.pick(tau, "tau", 0.2)?;
    let a = cfg.pick(a, "a", 0.0)?;
    if a == 0.0 {
        Ok(CircleHomeo::rigid(tau))
    } else {
        Ok(CircleHomeo::perturbed(tau, a)?)
    }
}

// ---- extend ----

#[derive(Serialize)]
struct ExtendOutput {
    system: String,
    y: Vec<(f64, f64)>,
    strata: Vec<StratumSample>,
    empty_strata: Vec<usize>,
    shape: Option<CircleExtensionShape>,
}

fn extend(a: &ExtendArgs, cfg: &FileConfig, out: &Path) -> CliResult<bool> {
    let system = cfg.pick(a.system.map(|s| s.name()), "system", "logistic".to_string())?;
    let kind = SystemKind::from_name(&system)?;
    let n_max = cfg.pick(a.n_max, "N", 10)?;
    let depth = check_count("depth", cfg.pick(a.depth, "depth", 20)?)?;
    let density = check_count("density", cfg.pick(a.density, "density", 33)?)?;

    let mut circle_map = None;
    let (spec, label) = match kind {
        SystemKind::Logistic => {
            let lambda = check_lambda(cfg.pick(a.lambda, "lambda", 0.6)?)?;
            (logistic::extension_spec(lambda)?, format!("logistic(lambda={lambda})"))
        }
        SystemKind::Constant => {
            let p = cfg.pick(a.p, "p", 0.5)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("p must lie in [0, 1], got {p}").into());
            }
            let sys = PartialMapSystem::constant(p);
            let whole = sys.space.whole();
            (ExtensionSpec::new(sys, whole)?, format!("constant(p={p})"))
        }
        SystemKind::Rotation => {
            let tau = cfg.pick(a.tau, "tau", 0.25)?;
            let g0 = cfg.pick(a.gamma0, "gamma0", tau)?;
            let k = g0 - tau;
            if (k - k.round()).abs() > 1e-12 {
                return Err(format!("gamma0 = {g0} is not tau = {tau} plus an integer").into());
            }
            let h = CircleHomeo::rigid(g0);
            let spec = circle_extension_spec(&h)?;
            circle_map = Some(h);
            (spec, format!("rotation(tau={tau}, gamma0={g0})"))
        }
        SystemKind::Custom => {
            let h = circle_homeo(cfg, a.tau, a.a, a.grid.as_ref())?;
            let spec = circle_extension_spec(&h)?;
            let label = format!("circle({h:?})");
            circle_map = Some(h);
            (spec, label)
        }
    };

    let mut strata = Vec::new();
    let mut empty_strata = Vec::new();
    for n in 0..=n_max {
        match sample_stratum(&spec, StratumIndex::Finite(n), density, depth) {
            Ok(s) => strata.push(s),
            Err(Error::EmptyStratum { .. }) => empty_strata.push(n),
            Err(e) => return Err(e.into()),
        }
    }
    match sample_stratum(&spec, StratumIndex::Infinite, density, depth) {
        Ok(s) => strata.push(s),
        Err(Error::EmptyStratum { .. }) => {}
        Err(e) => return Err(e.into()),
    }
    let shape = circle_map.as_ref().map(|h| extension_shape(h, n_max)).transpose()?;

    let svg = ladder_svg(&label, &strata, shape.as_ref(), n_max, density);
    let output = ExtendOutput {
        system: label,
        y: spec.y.intervals.iter().map(|i| (i.lo, i.hi)).collect(),
        strata,
        empty_strata,
        shape,
    };
    write_json(out, "extend.json", &output)?;
    write(out, "extend.svg", &svg)?;
    for s in &output.strata {
        println!("M_{}: {} chains", s.n, s.chains.len());
    }
    Ok(true)
}

impl SystemKind {
    fn name(self) -> String {
        match self {
            SystemKind::Logistic => "logistic",
            SystemKind::Rotation => "rotation",
            SystemKind::Constant => "constant",
            SystemKind::Custom => "custom",
        }
        .to_string()
    }

    fn from_name(s: &str) -> CliResult<Self> {
        Ok(match s {
            "logistic" => SystemKind::Logistic,
            "rotation" => SystemKind::Rotation,
            "constant" => SystemKind::Constant,
            "custom" => SystemKind::Custom,
            other => return Err(format!("unknown system {other}").into()),
        })
    }
}

/// Strata as rows: each `M_N` is drawn at height `N` through its factor-map
/// coordinates, joining neighbours closer than a few grid steps; `M_∞` sits
/// on top.
fn ladder_svg(
    title: &str,
    strata: &[StratumSample],
    shape: Option<&CircleExtensionShape>,
    n_max: usize,
    density: usize,
) -> String {
    let top = n_max as f64 + 2.0;
    let mut c = Canvas::new(720.0, 60.0 + 28.0 * top, (-0.08, 1.0), (-0.5, top + 0.5));
    let join = 3.0 / density as f64;
    for s in strata {
        let row = match s.n {
            StratumIndex::Finite(n) => n as f64,
            StratumIndex::Infinite => top,
        };
        let mut heads: Vec<f64> = s.chains.iter().map(|ch| ch.coords[0]).collect();
        heads.sort_by(f64::total_cmp);
        heads.dedup();
        let mut run: Vec<(f64, f64)> = Vec::new();
        for &x in &heads {
            if run.last().is_some_and(|&(p, _)| x - p > join) {
                c.polyline(&run, "black", 1.5);
                run.clear();
            }
            run.push((x, row));
        }
        c.polyline(&run, "black", 1.5);
        for &x in &heads {
            c.dot(x, row, 1.2, "black");
        }
        c.label(-0.075, row - 0.1, &format!("M_{}", s.n));
    }
    if let Some(shape) = shape {
        for arc in &shape.arcs {
            let row = arc.n as f64 + 0.3;
            // split arcs that run past 1 at the seam of the circle
            let mut lo = arc.origin;
            while lo < arc.end {
                let base = lo.floor();
                let stop = arc.end.min(base + 1.0);
                c.polyline(&[(lo - base, row), (stop - base, row)], "crimson", 2.5);
                lo = stop;
            }
        }
    }
    c.finish(title)
}

// ---- bifurcate ----

fn bifurcate(a: &BifurcateArgs, cfg: &FileConfig, out: &Path) -> CliResult<bool> {
    let n_max = cfg.pick(a.n_max, "n_max", CascadeTable::DEFAULT_N_MAX)?;
    let mu_max = cfg.pick(a.mu_max, "mu_max", CascadeTable::DEFAULT_MU_MAX)?;
    let windows = cfg.pick(a.windows, "windows", CascadeTable::DEFAULT_WINDOWS)?;
    let lo = check_lambda(cfg.pick(a.lambda_min, "lambda_min", 0.74)?)?;
    let hi = check_lambda(cfg.pick(a.lambda_max, "lambda_max", 1.0)?)?;
    if lo >= hi {
        return Err("lambda_min must be below lambda_max".into());
    }
    let steps = check_count("steps", cfg.pick(a.steps, "steps", 2000)?)?.max(2);
    let transient = cfg.pick(a.transient, "transient", 1000)?;
    let keep = check_count("keep", cfg.pick(a.keep, "keep", 200)?)?;

    let table = CascadeTable::compute(n_max, mu_max, windows, CascadeTable::DEFAULT_WINDOW_M_MAX)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in table.rows() {
        w.serialize(row)?;
    }
    write(out, "cascade.csv", &String::from_utf8(w.into_inner()?)?)?;

    let cloud: Vec<(f64, Vec<f64>)> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let lambda = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
            let orbit = logistic::critical_orbit(lambda, transient + keep);
            (lambda, orbit[transient..].to_vec())
        })
        .collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["lambda", "x"])?;
    for (lambda, xs) in &cloud {
        for x in xs {
            w.write_record([lambda.to_string(), x.to_string()])?;
        }
    }
    write(out, "diagram.csv", &String::from_utf8(w.into_inner()?)?)?;

    let mut c = Canvas::new(1000.0, 640.0, (lo, hi), (0.0, 1.0));
    for (name, v) in [("lambda_inf", table.lambda_inf), ("mu_1", table.mu.get(1).copied().unwrap_or(1.0))] {
        if v > lo && v < hi {
            c.polyline(&[(v, 0.0), (v, 1.0)], "#9ab", 0.8);
            c.label(v, 1.0, name);
        }
    }
    let cells: BTreeSet<(i64, i64)> = cloud
        .iter()
        .flat_map(|(l, xs)| xs.iter().map(|&x| c.cell(*l, x)).collect::<Vec<_>>())
        .collect();
    for cell in cells {
        c.pixel(cell, "black");
    }
    write(out, "diagram.svg", &c.finish("logistic bifurcation diagram"))?;

    for (n, l) in table.lambda.iter().enumerate().skip(1).take(2) {
        println!("lambda_{n} = {l:.12}");
    }
    println!("lambda_inf ~ {:.8}", table.lambda_inf);
    Ok(true)
}

// ---- classify / continuum-graph ----

fn classify(a: &ClassifyArgs, cfg: &FileConfig, out: &Path) -> CliResult<bool> {
    let lambda = cfg
        .pick_opt(a.lambda, "lambda")?
        .ok_or("classify needs --lambda")?;
    let r = classify_regime(check_lambda(lambda)?)?;
    let v = json!({
        "lambda": r.lambda,
        "regime": r.tag.to_string(),
        "bracket": r.bracket,
        "irreducible_continuum": r.irreducible_continuum,
    });
    println!("{}", r.tag);
    write_json(out, "classify.json", &v)?;
    Ok(true)
}

fn graph(a: &GraphArgs, cfg: &FileConfig, out: &Path) -> CliResult<bool> {
    let tag = match cfg.pick_opt(a.lambda, "lambda")? {
        Some(l) if a.regime.is_none() => classify_regime(check_lambda(l)?)?.tag,
        _ => {
            let kind = match a.regime {
                Some(k) => k,
                None => match cfg.pick_opt::<String>(None, "regime")?.as_deref() {
                    None | Some("cascade") => RegimeKind::Cascade,
                    Some("mu") => RegimeKind::Mu,
                    Some("window") => RegimeKind::Window,
                    Some("window-cascade") => RegimeKind::WindowCascade,
                    Some(other) => return Err(format!("unknown regime {other}").into()),
                },
            };
            let n = check_count("n", cfg.pick(a.n, "n", 1)?)?;
            let m = cfg.pick(a.m, "m", 0)?;
            match kind {
                RegimeKind::Cascade => RegimeTag::CascadeStage(n as i32),
                RegimeKind::Mu => RegimeTag::MuPoint(n),
                RegimeKind::Window => RegimeTag::Window(n),
                RegimeKind::WindowCascade => RegimeTag::WindowCascadeStage(n, m),
            }
        }
    };
    let format = match a.format {
        Some(f) => f,
        None => match cfg.pick_opt::<String>(None, "format")?.as_deref() {
            None | Some("dot") => GraphFormat::Dot,
            Some("json") => GraphFormat::Json,
            Some(other) => return Err(format!("unknown graph format {other}").into()),
        },
    };
    let g = continuum_graph(tag)?;
    match format {
        GraphFormat::Dot => write(out, "continuum.dot", &g.to_dot())?,
        GraphFormat::Json => write_json(out, "continuum.json", &g)?,
    };
    println!(
        "{tag}: {} rays, {} arcs, {} B-J-K, endpoint period {}",
        g.rays(),
        g.arcs(),
        g.bjk(),
        g.endpoint_period()
    );
    match g.check() {
        Ok(()) => Ok(true),
        Err(why) => {
            eprintln!("graph check failed: {why}");
            Ok(false)
        }
    }
}

// ---- rotation ----

fn rotation(a: &RotationArgs, cfg: &FileConfig, out: &Path) -> CliResult<bool> {
    let h = circle_homeo(cfg, a.tau, a.a, a.grid.as_ref())?;
    let defaults = ClassifyParams::default();
    let params = ClassifyParams {
        n_iter: check_count("n_iter", cfg.pick(a.n_iter, "n_iter", defaults.n_iter)?)?,
        max_denominator: cfg.pick(a.max_denominator, "max_denominator", defaults.max_denominator)?,
        periodic_tol: cfg.pick(a.periodic_tol, "periodic_tol", defaults.periodic_tol)?,
        ..defaults
    };
    let n_max = cfg.pick(a.n_max, "N", 20)?;
    let tau = rotation_number(&h, params.n_iter);
    let case = compression_case(&h);
    let class = circle::classify(&h, &params);
    let shape = if case.gamma0 > 0.0 {
        Some(extension_shape(&h, n_max)?)
    } else {
        None
    };
    let v = json!({
        "lift": format!("{h:?}"),
        "rotation_number": tau,
        "rotation_number_averaged": rotation_number_averaged(&h, params.n_iter),
        "compression": case,
        "classification": class,
        "shape": shape,
    });
    println!("rotation number {tau:.10}: {}", class.kind);
    write_json(out, "rotation.json", &v)?;
    Ok(true)
}

// ---- operator-check ----

fn operator_check(a: &OperatorArgs, cfg: &FileConfig, out: &Path) -> CliResult<bool> {
    let kind = match a.system {
        Some(k) => k,
        None => match cfg.pick_opt::<String>(None, "system")?.as_deref() {
            None | Some("constant") => ModelKind::Constant,
            Some("rotation") => ModelKind::Rotation,
            Some("rotation-unitary") => ModelKind::RotationUnitary,
            Some("logistic-period3") => ModelKind::LogisticPeriod3,
            Some(other) => return Err(format!("unknown operator model {other}").into()),
        },
    };
    let depth = check_count("depth", cfg.pick(a.depth, "depth", 3)?)?;
    let (m, n) = (cfg.pick(a.m, "m", 1)?, cfg.pick(a.n, "n", 3)?);
    if kind == ModelKind::Rotation || kind == ModelKind::RotationUnitary {
        if n == 0 || m >= n {
            return Err(format!("rotation needs 0 <= m < n, got {m}/{n}").into());
        }
    }
    let model = match kind {
        ModelKind::Constant => {
            let p = cfg.pick(a.p, "p", 0.5)?;
            let y = check_count("y_points", cfg.pick(a.y_points, "y_points", 3)?)?;
            operator::constant_model(p, y, depth)?
        }
        ModelKind::Rotation => operator::rotation_model(m, n, depth)?,
        ModelKind::RotationUnitary => operator::rotation_unitary_model(m, n, depth)?,
        ModelKind::LogisticPeriod3 => operator::logistic_period3_model(depth)?,
    };
    let n_max = cfg.pick(a.n_max, "n_max", model.dim())?;
    let report = full_report(&model, n_max);
    let spectrum = spectrum_matches_extension(&model, &build_b(&model, n_max));
    let pass = report.all_pass() && spectrum.ok();
    let v = json!({
        "model": model.name,
        "dim": model.dim(),
        "n_max": n_max,
        "checks": report,
        "spectrum": spectrum,
        "pass": pass,
    });
    write_json(out, "operator_report.json", &v)?;
    for (name, c) in &report.checks {
        println!("{} {name}: {:.1e}", if c.pass { "PASS" } else { "FAIL" }, c.residual);
    }
    println!(
        "{} spectrum: {} points for {} chains",
        if spectrum.ok() { "PASS" } else { "FAIL" },
        spectrum.b_points,
        spectrum.dim
    );
    Ok(pass)
}

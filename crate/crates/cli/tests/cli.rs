use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("revext-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn revext(out: &PathBuf, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revext"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn extend_logistic_writes_json_and_svg() {
    let out = scratch("extend-logistic");
    let o = revext(&out, &["extend", "--system", "logistic", "--lambda", "0.6", "--N", "10", "--depth", "20"]);
    assert!(o.status.success(), "{o:?}");
    let v = json(out.join("extend.json"));
    let strata = v["strata"].as_array().unwrap();
    assert_eq!(strata.len(), 12);
    assert_eq!(strata[0]["N"], 0);
    assert_eq!(strata[11]["N"], "inf");
    assert_eq!(v["y"][0][0], 0.6);
    let svg = std::fs::read_to_string(out.join("extend.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn extend_constant_has_singleton_inverse_limit() {
    let out = scratch("extend-constant");
    let o = revext(&out, &["extend", "--system", "constant", "--N", "3", "--depth", "6"]);
    assert!(o.status.success(), "{o:?}");
    let v = json(out.join("extend.json"));
    let strata = v["strata"].as_array().unwrap();
    let inf = strata.iter().find(|s| s["N"] == "inf").unwrap();
    assert_eq!(inf["chains"].as_array().unwrap().len(), 1);
}

#[test]
fn extend_rotation_draws_quarter_arcs() {
    let out = scratch("extend-rotation");
    let o = revext(&out, &["extend", "--system", "rotation", "--tau", "0.25", "--gamma0", "0.25", "--N", "3"]);
    assert!(o.status.success(), "{o:?}");
    let v = json(out.join("extend.json"));
    let arcs = v["shape"]["arcs"].as_array().unwrap();
    assert_eq!(arcs.len(), 4);
    for (k, arc) in arcs.iter().enumerate() {
        let o = arc["origin"].as_f64().unwrap();
        assert!((o - 0.25 * k as f64).abs() < 1e-12);
    }
    assert_eq!(v["shape"]["kind"], "ArcLadder");

    let bad = revext(&out, &["extend", "--system", "rotation", "--tau", "0.25", "--gamma0", "0.3"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn extend_is_deterministic() {
    let a = scratch("det-a");
    let b = scratch("det-b");
    let args = ["extend", "--system", "custom", "--tau", "0.3", "--a", "0.5", "--N", "4", "--depth", "8"];
    assert!(revext(&a, &args).status.success());
    assert!(revext(&b, &args).status.success());
    for f in ["extend.json", "extend.svg"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn bifurcate_table_and_diagram() {
    let out = scratch("bifurcate");
    let o = Command::new(env!("CARGO_BIN_EXE_revext"))
        .env("REVEXT_THREADS", "2")
        .arg("--out")
        .arg(&out)
        .args(["bifurcate", "--steps", "50", "--keep", "20", "--transient", "200"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{o:?}");
    let mut rdr = csv::Reader::from_path(out.join("cascade.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["name", "n", "value", "residual"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let value = |name: &str, n: &str| -> f64 {
        rows.iter().find(|r| &r[0] == name && &r[1] == n).unwrap()[2].parse().unwrap()
    };
    assert!((value("lambda", "1") - 0.75).abs() < 1e-8);
    assert!((value("lambda", "2") - (1.0 + 6f64.sqrt()) / 4.0).abs() < 1e-6);
    let diagram = std::fs::read_to_string(out.join("diagram.csv")).unwrap();
    assert_eq!(diagram.lines().count(), 1 + 50 * 20);
    assert!(out.join("diagram.svg").exists());
}

#[test]
fn classify_and_config_precedence() {
    let out = scratch("classify");
    let o = revext(&out, &["classify", "--lambda", "0.8"]);
    assert!(stdout(&o).starts_with("CascadeStage(1)"));
    assert_eq!(json(out.join("classify.json"))["regime"], "CascadeStage(1)");

    let cfg = out.join("run.cfg");
    std::fs::write(&cfg, "# parameters\nlambda = 0.8\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let o = revext(&out, &["--config", cfg, "classify"]);
    assert!(stdout(&o).starts_with("CascadeStage(1)"));
    let o = revext(&out, &["--config", cfg, "classify", "--lambda", "0.6"]);
    assert!(stdout(&o).starts_with("CascadeStage(0)"));

    let o = revext(&out, &["classify", "--lambda", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn continuum_graph_dot_and_json() {
    let out = scratch("graph");
    let o = revext(&out, &["continuum-graph", "--regime", "mu", "--n", "1"]);
    assert!(o.status.success(), "{o:?}");
    let dot = std::fs::read_to_string(out.join("continuum.dot")).unwrap();
    assert_eq!(dot.matches("BJK(").count(), 2);
    assert!(dot.contains("RayR"));

    let o = revext(&out, &["continuum-graph", "--regime", "window-cascade", "--n", "1", "--m", "2", "--format", "json"]);
    assert!(o.status.success(), "{o:?}");
    let v = json(out.join("continuum.json"));
    assert_eq!(v["nodes"].as_array().unwrap().len(), 10 + 6 + 1);

    let o = revext(&out, &["continuum-graph", "--lambda", "0.6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rotation_report() {
    let out = scratch("rotation");
    let o = revext(&out, &["rotation", "--tau", "0.4", "--n-iter", "20000"]);
    assert!(o.status.success(), "{o:?}");
    let v = json(out.join("rotation.json"));
    assert_eq!(v["rotation_number"], 0.4);
    assert_eq!(v["classification"]["kind"]["RationalPeriodic"]["n"], 5);
    assert_eq!(v["compression"]["case"], "Coisometry");
}

#[test]
fn operator_check_exit_codes() {
    let out = scratch("operator");
    let o = revext(&out, &["operator-check", "--system", "constant", "--depth", "3"]);
    assert!(o.status.success(), "{o:?}");
    let v = json(out.join("operator_report.json"));
    assert_eq!(v["pass"], true);
    assert_eq!(v["dim"], 13);

    // B generated by too few shifts is not invariant, and the run says so
    let o = revext(&out, &["operator-check", "--system", "rotation", "--depth", "3", "--n-max", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL b_invariant"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = scratch("threads");
    let o = Command::new(env!("CARGO_BIN_EXE_revext"))
        .env("REVEXT_THREADS", "0")
        .arg("--out")
        .arg(&out)
        .args(["classify", "--lambda", "0.5"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lnt_core::classical::section_momentum;
use lnt_core::cli::read_csv;
use lnt_core::{ClassicalSystem, MoleculeParams};

fn lnt(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lnt"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) {
    let o = lnt(args, out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .map(|r| r.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect())
        .unwrap_or_default();
    v.sort();
    v
}

#[test]
fn diagram_lists_builtins_and_catalog() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["diagram"], dir.path());
    let (head, rows) = read_csv(&dir.path().join("zeta_gamma.csv")).unwrap();
    assert_eq!(head, ["name", "x_f", "x_g", "gamma", "zeta"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "H2O");
    assert!(num(&rows[0][3]) < 1e-3);
    assert!(num(&rows[1][3]) > 0.01);

    let cat = dir.path().join("cat.txt");
    fs::write(&cat, "# molecules\nso2 x_f=0.02 x_g=-0.3 nu1=1151 nu3=1362\nh2s x_f=-0.02 x_g=-0.01\n").unwrap();
    ok(&["diagram", "--catalog", cat.to_str().unwrap()], dir.path());
    let (_, rows) = read_csv(&dir.path().join("zeta_gamma.csv")).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[3][4], "");
    let z = lnt_core::zeta(1151.0 - 1362.0, 0.5 * (1151.0 + 1362.0)).unwrap();
    assert!((num(&rows[2][4]) - z).abs() < 1e-10 * z.abs());
    assert!(z < 0.0);

    fs::write(&cat, "").unwrap();
    ok(&["diagram", "--catalog", cat.to_str().unwrap(), "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("zeta_gamma.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn bad_catalog_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat.txt");
    fs::write(&cat, "ok x_f=0 x_g=0\nbad x_f=0 x_g=0 colour=red\n").unwrap();
    let out = dir.path().join("out");
    let o = lnt(&["diagram", "--catalog", cat.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error:") && err.contains(":2"), "{err}");
    assert!(listing(&out).is_empty());
}

#[test]
fn invalid_arguments_exit_nonzero_without_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["scan", "--t-min", "-0.01", "--t-max", "-0.02"][..],
        &["scan", "--t-min", "-0.03", "--t-max", "-0.02", "--states", "0"],
        &["density", "--grid", "1,0,5"],
        &["poincare", "--states", "26,27"],
        &["lyapunov", "--horizon", "10"],
    ] {
        let o = lnt(args, dir.path());
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
    assert!(listing(dir.path()).is_empty());
}

#[test]
fn scan_writes_three_tables_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["scan", "--t-min", "-0.03", "--t-max", "-0.015", "--n-single", "9"];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(&args, &a);
    ok(&args, &b);
    let names = ["avoided_crossings.csv", "observables.csv", "spectrum.csv"];
    assert_eq!(listing(&a), names);
    for n in names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n}");
    }
    let (head, rows) = read_csv(&a.join("spectrum.csv")).unwrap();
    assert_eq!(head, ["t", "state_index", "energy_cm1"]);
    assert_eq!(rows.len(), 31 * 45);
    // grid starts at the water end
    assert_eq!(num(&rows[0][0]), -0.015);
    let (head, rows) = read_csv(&a.join("observables.csv")).unwrap();
    assert_eq!(head.len(), 11);
    assert_eq!(head[10], "complete_polyad_flag");
    assert_eq!(rows.len(), 31 * 3);
    for r in &rows {
        let f = num(&r[2]);
        let s = num(&r[3]);
        assert!((0.0..=1.0).contains(&f));
        assert!(s >= 0.0 && s <= 9f64.ln() + 1e-12);
    }
    let (head, _) = read_csv(&a.join("avoided_crossings.csv")).unwrap();
    assert_eq!(head, ["state_index", "t_star", "gap_cm1"]);
}

#[test]
fn density_grid_and_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["density", "--states", "27", "--t-values", "-0.1", "--grid", "-2,6,21", "--n-single", "9"], dir.path());
    let (head, rows) = read_csv(&dir.path().join("density_27_-0.100000.csv")).unwrap();
    assert_eq!(head, ["q1", "q2", "rho"]);
    assert_eq!(rows.len(), 21 * 21);
    for i in 0..21 {
        for j in 0..21 {
            let a = num(&rows[i * 21 + j][2]);
            let b = num(&rows[j * 21 + i][2]);
            assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-300));
        }
    }
}

#[test]
fn poincare_points_reconstruct_on_the_shell() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "poincare",
        "--t-values",
        "-0.1",
        "--ic-grid",
        "3",
        "--max-crossings",
        "20",
        "--n-single",
        "9",
    ];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    ok(&args, &a);
    ok(&args, &b);
    assert_eq!(listing(&a), ["poincare_-0.100000.csv", "poincare_-0.100000_meta.json"]);
    for n in listing(&a) {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n}");
    }
    let meta: serde_json::Value =
        serde_json::from_slice(&fs::read(a.join("poincare_-0.100000_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["state_index"], 27);
    let energy = meta["energy"].as_f64().unwrap();
    let p: MoleculeParams = serde_json::from_value(meta["params"].clone()).unwrap();
    let sys = ClassicalSystem::from_params(&p).unwrap();
    let (head, rows) = read_csv(&a.join("poincare_-0.100000.csv")).unwrap();
    assert_eq!(head, ["trajectory_id", "q1", "p1"]);
    assert_eq!(rows.len() as u64, meta["points"].as_u64().unwrap());
    for r in &rows {
        let (q1, p1) = (num(&r[1]), num(&r[2]));
        // slightly inside the shell so the root exists despite printed rounding
        let p2 = section_momentum(&sys, energy * (1.0 + 1e-7), 0.0, q1, p1).expect("point inside the shell");
        let e = sys.energy(&lnt_core::PhaseState::new(q1, 0.0, p1, p2));
        assert!((e - energy).abs() < 1e-5 * energy);
    }
}

#[test]
fn lyapunov_table() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["lyapunov", "--t-values", "-0.015", "--ic-grid", "2", "--horizon", "100", "--n-single", "9"],
        dir.path(),
    );
    let (head, rows) = read_csv(&dir.path().join("lyapunov.csv")).unwrap();
    assert_eq!(head[5], "max_exponent");
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], "27");
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ftscale(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftscale")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = ftscale(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn csv_lines(args: &[&str]) -> Vec<String> {
    stdout(args).lines().map(str::to_string).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn optimize_reports_optimum() {
    let v = json(&["optimize", "--scheme", "aliferis2006", "--model", "affine", "--eta0", "5e-6", "--c", "1"]);
    assert_eq!(v["command"], "optimize");
    assert_eq!(v["result"]["k_max"], 17);
    assert_eq!(v["result"]["status"], "optimum-found");
    let v = json(&["optimize", "--model", "affine", "--eta0", "5e-6", "--c", "0"]);
    assert_eq!(v["result"]["status"], "unbounded-improvement");
}

#[test]
fn exit_codes() {
    assert_eq!(ftscale(&["optimize", "--model", "affine", "--eta0", "bogus", "--c", "1"]).status.code(), Some(2));
    assert_eq!(ftscale(&["optimize", "--model", "affine", "--eta0", "5e-6"]).status.code(), Some(2));
    assert_eq!(ftscale(&["optimize", "--model", "affine", "--eta0", "1.5", "--c", "1"]).status.code(), Some(2));
    assert_eq!(ftscale(&["--scheme", "nope", "optimize", "--model", "affine", "--eta0", "1e-5", "--c", "1"]).status.code(), Some(2));
    assert_eq!(ftscale(&["--config", "missing.json", "gatesim"]).status.code(), Some(2));
    assert_eq!(ftscale(&[]).status.code(), Some(2));
    assert_eq!(ftscale(&["sweep", "--model", "affine", "--eta0", "1e-5", "--axis", "beta:0:1:3"]).status.code(), Some(2));
    assert_eq!(ftscale(&["--help"]).status.code(), Some(0));

    // concatenation cannot rescue a scheme whose gate count explodes
    let out = ftscale(&["--scheme", "1000000000000000,291,10000,291,3", "shor", "--R", "1e16"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["meets_target"], false);
    assert!(v["result"]["n_L"].is_null());
}

#[test]
fn gatesim_matches_photon_asymptotics() {
    let v = json(&["gatesim", "--theta", "pi", "--gamma", "1", "--ng", "1000"]);
    let p_x = v["result"]["p_x"].as_f64().unwrap();
    assert!((p_x / 6.1685e-4 - 1.0).abs() < 0.02, "{p_x}");
    assert_eq!(v["result"]["channel"]["converged"], true);
}

#[test]
fn shor_row_has_table_scale() {
    let v = json(&["shor", "--R", "1e3", "--gamma", "10", "--omega0", "1e10"]);
    let e = v["result"]["bill"]["E_tot"].as_f64().unwrap();
    assert!(e > 1e-13 && e < 1e-11, "{e}");
    assert_eq!(v["result"]["k"], 0);
    let lines = csv_lines(&["shor", "--R", "1e3", "--n-L", "1e6", "--format", "csv"]);
    assert_eq!(lines[0], "R,n_L,k,E_tot_J,P_W,T_tot_s,tau_g_s");
    assert!(lines[1].starts_with("1000,1000000,0,"));
}

#[test]
fn longrange_compare_row() {
    let lines = csv_lines(&["longrange", "--lattice", "chain", "--z", "0.5", "--N0", "10001", "--compare", "--format", "csv"]);
    assert_eq!(lines[0], "N0,oracle,asymptotic,rel_err");
    let fields: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields[0], 10001.0);
    assert!((fields[3] - 0.011).abs() < 0.002, "{}", lines[1]);
}

#[test]
fn csv_headers_are_stable() {
    let opt = csv_lines(&["optimize", "--model", "exp", "--eta0", "1e-12", "--beta", "1", "--format", "csv"]);
    assert_eq!(opt[0], "k,log10_p");
    let gate = csv_lines(&["gatesim", "--theta", "pi/2", "--gamma", "1", "--ng", "100", "--format", "csv"]);
    assert_eq!(gate[0], "theta,gamma,n_g,tau,chi_00,p_x,p_y,p_z,converged");
    let fit = csv_lines(&["fit", "--variant", "exp", "--points", "0:1e-6,1:2.91e-4,2:0.0846810", "--format", "csv"]);
    assert_eq!(fit[0], "variant,eta0,slope,residual,n_points");
    assert!(fit[1].starts_with("exp,"));
    let sweep = csv_lines(&["sweep", "--model", "exp", "--eta0", "1e-12", "--axis", "beta:0.5:1.5:3", "--format", "csv"]);
    assert_eq!(sweep[0], "beta,k_max,log10_p_min,status,p_min");
}

#[test]
fn sweep_grid_is_row_major() {
    let lines = csv_lines(&[
        "sweep", "--model", "affine", "--axis", "c:0:10:101:lin", "--axis", "b_eta0:0.01:0.99:99:lin", "--format", "csv",
    ]);
    assert_eq!(lines.len(), 1 + 101 * 99);
    assert_eq!(lines[0], "c,b_eta0,k_max,log10_p_min,status,p_min");
    let first: Vec<&str> = lines[1].split(',').collect();
    let second: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(first[0], second[0]);
    assert_ne!(first[1], second[1]);
}

#[test]
fn single_point_sweep_matches_optimize() {
    let opt = json(&["optimize", "--model", "affine", "--eta0", "5e-6", "--c", "1"]);
    let sweep = json(&["sweep", "--model", "affine", "--eta0", "5e-6", "--axis", "c:1:1:1"]);
    let row = &sweep["result"]["rows"][0];
    for key in ["k_max", "log10_p_min", "status"] {
        assert_eq!(row[key], opt["result"][key], "{key}");
    }
}

#[test]
fn photon_sweep_steps_up() {
    let v = json(&["sweep", "--model", "shor", "--L", "1e6", "--axis", "n_L:1e3:1e16:53:log"]);
    let ks: Vec<u64> = v["result"]["rows"].as_array().unwrap().iter().map(|r| r["k_max"].as_u64().unwrap()).collect();
    assert!(ks.windows(2).all(|w| w[0] <= w[1]), "{ks:?}");
    assert!(ks.last().unwrap() > &0);
}

#[test]
fn fit_reads_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("samples.csv");
    fs::write(&data, "k,eta\n0,1e-5\n1,2e-5\n2,3e-5\n").unwrap();
    let v = json(&["fit", "--variant", "affine", "--data", path_str(&data)]);
    let c = v["result"]["model"]["c"].as_f64().unwrap();
    assert!((c - 1.0).abs() < 1e-9);
    assert_eq!(ftscale(&["fit", "--variant", "affine", "--points", "0:1e-5"]).status.code(), Some(2));
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["sweep", "--model", "exp", "--eta0", "1e-9", "--axis", "beta:0:2:41", "--axis", "D:2:500:5", "--format", "csv"],
        &["gatesim", "--theta", "pi", "--gamma", "3", "--ng", "50"],
        &["shor", "--R", "1e5"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = dir.path().join(format!("a{i}"));
        let b = dir.path().join(format!("b{i}"));
        for p in [&a, &b] {
            let mut full = args.to_vec();
            full.extend(["--out", path_str(p)]);
            stdout(&full);
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{args:?}");
    }
}

#[test]
fn reports_reproduce_themselves() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 7] = [
        &["optimize", "--model", "table", "--eta0", "1e-5", "--f", "1,2,4,8,16"],
        &["--scheme", "575,291,10000,575,3", "optimize", "--model", "exp", "--eta0", "1e-12", "--beta", "1"],
        &["sweep", "--model", "affine", "--eta0", "1e-5", "--axis", "c:0:2:5"],
        &["gatesim", "--theta", "pi/2", "--gamma", "1", "--ng", "200", "--omega0", "1e9"],
        &["longrange", "--lattice", "square", "--z", "1", "--N0", "10000", "--compare", "--t0-delta", "1e-12"],
        &["shor", "--R", "2048", "--p-target", "0.9"],
        &["fit", "--variant", "exp", "--points", "0:1e-6,1:3e-5,3:2.7e-2"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let first = dir.path().join(format!("r{i}.json"));
        let again = dir.path().join(format!("s{i}.json"));
        let mut full = args.to_vec();
        full.extend(["--out", path_str(&first)]);
        stdout(&full);
        stdout(&["--config", path_str(&first), "--out", path_str(&again)]);
        assert_eq!(fs::read_to_string(&first).unwrap(), fs::read_to_string(&again).unwrap(), "{args:?}");
    }
}

#[test]
fn bare_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"scheme": {"A": 575, "A_prime": 291, "B": 10000, "D": 291, "M": 3},
            "command": {"optimize": {"model": {"model": "affine", "eta0": 5e-6, "c": 1.0}, "k_cap": 64}}}"#,
    )
    .unwrap();
    let v = json(&["--config", path_str(&cfg)]);
    assert_eq!(v["result"]["k_max"], 17);
    fs::write(&cfg, r#"{"scheme": "aliferis2006", "command": {"optimize": {"model": {"model": "affine", "eta0": 5e-6}, "k_cap": 64}}}"#)
        .unwrap();
    assert_eq!(ftscale(&["--config", path_str(&cfg)]).status.code(), Some(2));
}

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn dsw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsw"))
        .args(args)
        .env_remove("DSW_TOL")
        .output()
        .expect("run dsw")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Header and numeric rows of a CSV table.
fn table(o: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    let header = lines
        .next()
        .expect("header")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn potential_is_barrierless() {
    let o = dsw(&["potential", "--m", "5", "--j", "0", "--grid", "1000"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (h, rows) = table(&o);
    assert_eq!(h, ["r", "r_star", "U", "F"]);
    assert_eq!(rows.len(), 1000);
    assert!(rows.iter().all(|r| r[3] > 0.0));
    assert!(rows[999][2] < rows[0][2]);
}

#[test]
fn empty_grid_is_a_config_error() {
    let o = dsw(&["potential", "--m", "5", "--grid", "0"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("grid"));
    assert!(o.stdout.is_empty());
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "wave",
        "--epsilon",
        "10",
        "--m",
        "5",
        "--j",
        "1",
        "--kind",
        "f,out",
        "--grid",
        "50",
    ];
    let a = dsw(&args);
    let b = dsw(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn regular_wave_vanishes_like_r_to_the_j() {
    for j in ["1", "2"] {
        let o = dsw(&[
            "wave",
            "--epsilon",
            "10",
            "--m",
            "5",
            "--j",
            j,
            "--r-min",
            "1e-4",
            "--r-max",
            "1e-3",
            "--spacing",
            "log",
            "--grid",
            "5",
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let (h, rows) = table(&o);
        let (ir, ire) = (column(&h, "r"), column(&h, "f_re"));
        let first = &rows[0];
        let last = &rows[rows.len() - 1];
        let slope = (last[ire] / first[ire]).abs().ln() / (last[ir] / first[ir]).ln();
        let want: f64 = j.parse().unwrap();
        assert!((slope - want).abs() < 1e-3, "j={j}: {slope}");
    }
}

#[test]
fn incoming_wave_is_conjugate_of_outgoing() {
    let o = dsw(&[
        "wave",
        "--epsilon",
        "10",
        "--m",
        "5",
        "--j",
        "1",
        "--kind",
        "out,in",
    ]);
    assert_eq!(code(&o), 0);
    let (h, rows) = table(&o);
    let (or, oi) = (column(&h, "out_re"), column(&h, "out_im"));
    let (ir, ii) = (column(&h, "in_re"), column(&h, "in_im"));
    for row in rows {
        let size = row[or].hypot(row[oi]);
        assert!((row[ir] - row[or]).hypot(row[ii] + row[oi]) <= 1e-12 * size);
    }
}

#[test]
fn connection_residual_column() {
    let o = dsw(&[
        "wave",
        "--epsilon",
        "10",
        "--m",
        "5",
        "--j",
        "1",
        "--kind",
        "f,g",
        "--residual",
    ]);
    assert_eq!(code(&o), 0);
    let (h, rows) = table(&o);
    for name in ["residual_f", "residual_g"] {
        let c = column(&h, name);
        assert!(rows.iter().all(|r| r[c] < 1e-10), "{name}");
    }
}

#[test]
fn reflection_vanishes_in_regime() {
    let o = dsw(&["reflect", "--epsilon", "20", "--m", "10", "--j", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["inputs"]["command"], "reflect");
    let row = &v["rows"][0];
    for key in ["c1", "c2", "a_plus", "a_minus"] {
        assert_eq!(row[key].as_array().unwrap().len(), 2, "{key}");
    }
    assert!(row["coefficient"].as_f64().unwrap() < 1e-18);
    assert_eq!(row["regime_ok"], true);
    assert!(row["flux_balance"].as_f64().unwrap() < 1e-6);
}

#[test]
fn reflection_outside_regime_exits_3() {
    let o = dsw(&["reflect", "--epsilon", "5", "--m", "4.9", "--j", "3"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("epsilon*R >> j"), "{}", stderr(&o));
}

#[test]
fn reflection_sweep_over_energy() {
    let o = dsw(&[
        "reflect",
        "--m",
        "10",
        "--j",
        "1",
        "--sweep",
        "epsilon=20:100:5",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let ie = header.iter().position(|h| *h == "epsilon").unwrap();
    let ic = header.iter().position(|h| *h == "coefficient").unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 17);
    let eps: Vec<f64> = rows.iter().map(|r| r[ie].parse().unwrap()).collect();
    assert!(eps.windows(2).all(|w| w[0] < w[1]));
    assert_eq!((eps[0], eps[16]), (20.0, 100.0));
    assert!(rows.iter().all(|r| r[ic].parse::<f64>().unwrap() < 1e-18));
}

#[test]
fn flat_limit_converges_only_in_valid_regime() {
    let o = dsw(&["flat-limit", "--mu", "2", "--j", "1", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    let dev: Vec<f64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["deviation"].as_f64().unwrap())
        .collect();
    assert_eq!(dev.len(), 4);
    assert!(dev.windows(2).all(|w| w[1] < w[0]));
    assert!(dev.iter().all(|d| *d > 0.0));
    assert_eq!(v["converging"], true);

    let o = dsw(&[
        "flat-limit",
        "--horizon-momentum",
        "--j",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["converging"], false);
}

#[test]
fn expansion_report() {
    let o = dsw(&[
        "expand", "--x", "0.01", "--mu", "2", "--j", "1", "--grid", "20", "--format", "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), 20);
    assert!(v["f1_identity_error"].as_f64().unwrap() < 1e-10);
    assert!((v["residual_slope"].as_f64().unwrap() - 2.0).abs() < 0.1);
    assert!(v["approximant_max_imag"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["audit"]["non_separable"], true);
}

#[test]
fn expansion_rejects_large_x() {
    let o = dsw(&["expand", "--x", "0.2", "--mu", "2"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("validity"));
}

#[test]
fn classify_bundled_fixtures() {
    let o = dsw(&["classify", "--bundled", "de-sitter"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["classification"], "hypergeometric_class");
    assert_eq!(v["singular_points"], 3);
    let o = dsw(&["classify", "--bundled", "schwarzschild-like"]);
    let v = json(&o);
    assert_eq!(v["classification"], "heun_class");
    assert_eq!(v["singular_points"], 4);
}

#[test]
fn classify_malformed_fixture_exits_2() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "{{\"name\": \"broken\", \"p\": [1, 2]}}").unwrap();
    let o = dsw(&["classify", f.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = dsw(&["classify", "/nonexistent/fixture.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn classify_fixture_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("legendre.json");
    // (1 − x²) y'' − 2x y' + 6 y = 0
    std::fs::write(
        &path,
        r#"{"name": "Legendre l = 2", "variable": "x",
            "p": {"numerator": ["0", "2"], "denominator": {"constant": "1",
                  "factors": [{"root": "1", "power": 1}, {"root": "-1", "power": 1}]}},
            "q": {"numerator": ["-6"], "denominator": {"constant": "1",
                  "factors": [{"root": "1", "power": 1}, {"root": "-1", "power": 1}]}}}"#,
    )
    .unwrap();
    let o = dsw(&["classify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["classification"], "hypergeometric_class");
}

#[test]
fn physical_and_horizon_units_agree() {
    let h = dsw(&[
        "wave",
        "--epsilon",
        "10",
        "--m",
        "5",
        "--j",
        "1",
        "--kind",
        "f,out",
    ]);
    let p = dsw(&[
        "wave", "--units", "physical", "--radius", "50", "--lambda", "10", "--mu", "2", "--j", "1",
        "--kind", "f,out",
    ]);
    assert_eq!(code(&p), 0, "{}", stderr(&p));
    let (_, a) = table(&h);
    let (_, b) = table(&p);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        for (u, v) in x.iter().zip(y) {
            assert!((u - v).abs() <= 1e-12 * u.abs().max(1e-300), "{u} vs {v}");
        }
    }

    let h = dsw(&["reflect", "--epsilon", "30", "--m", "10", "--j", "2"]);
    let p = dsw(&[
        "reflect", "--units", "physical", "--radius", "3", "--lambda", "0.3", "--mu", "3", "--j",
        "2",
    ]);
    let (a, b) = (json(&h), json(&p));
    for key in ["epsilon", "m", "ratio"] {
        let (u, v) = (
            a["rows"][0][key].as_f64().unwrap(),
            b["rows"][0][key].as_f64().unwrap(),
        );
        assert!(
            (u - v).abs() <= 1e-12 * u.abs().max(1e-300),
            "{key}: {u} vs {v}"
        );
    }
    let (u, v) = (&a["rows"][0]["a_plus"], &b["rows"][0]["a_plus"]);
    for i in 0..2 {
        let (u, v) = (u[i].as_f64().unwrap(), v[i].as_f64().unwrap());
        assert!((u - v).abs() <= 1e-12 * u.abs(), "{u} vs {v}");
    }
}

#[test]
fn mixed_unit_systems_are_rejected() {
    let o = dsw(&[
        "wave",
        "--units",
        "physical",
        "--radius",
        "50",
        "--lambda",
        "10",
        "--epsilon",
        "10",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("one unit system"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("table.csv");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"units": "horizon", "params": {{"epsilon": 10, "m": 5, "j": 1}},
                "grid": {{"count": 7, "spacing": "linear", "r_min": 0.1, "r_max": 0.7}},
                "kind": ["f"], "output": {{"path": {:?}, "format": "csv"}}}}"#,
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = dsw(&["wave", "--config", cfg.to_str().unwrap(), "--grid", "4"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,f_re,f_im");
    assert_eq!(lines.len(), 5);
    assert!(lines[4].starts_with("6.9999999999999996e-1,"));

    std::fs::write(&cfg, r#"{"unknown_key": 1}"#).unwrap();
    let o = dsw(&["wave", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn tolerance_from_environment_and_flag() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_dsw"));
        c.args(["reflect", "--epsilon", "20", "--m", "10", "--j", "0"])
            .args(extra);
        match env {
            Some(v) => c.env("DSW_TOL", v),
            None => c.env_remove("DSW_TOL"),
        };
        c.output().unwrap()
    };
    let o = run(Some("1e-9"), &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(json(&o)["inputs"]["tolerance"]["rtol"].as_f64(), Some(1e-9));
    let o = run(Some("1e-9"), &["--tol", "1e-10"]);
    assert_eq!(
        json(&o)["inputs"]["tolerance"]["rtol"].as_f64(),
        Some(1e-10)
    );
    let o = run(Some("not-a-number"), &[]);
    assert_eq!(code(&o), 2);
    let o = run(None, &["--tol", "-1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn integration_failure_exits_4() {
    let o = dsw(&[
        "reflect",
        "--epsilon",
        "20",
        "--m",
        "10",
        "--j",
        "1",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn unknown_flag_exits_2() {
    let o = dsw(&["potential", "--bogus"]);
    assert_eq!(code(&o), 2);
}

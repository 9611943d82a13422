use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dicke-engine"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

struct Csv {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let mut meta = Vec::new();
        let mut lines = Vec::new();
        for line in text.lines() {
            match line.strip_prefix("# ") {
                Some(m) => {
                    let (k, v) = m.split_once(" = ").unwrap();
                    meta.push((k.to_string(), v.to_string()));
                }
                None => lines.push(line.split(',').map(str::to_string).collect::<Vec<_>>()),
            }
        }
        let header = lines.remove(0);
        Self { meta, header, rows: lines }
    }

    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
    }

    fn num(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.col(name)].parse().unwrap()
    }

    fn meta(&self, key: &str) -> &str {
        &self.meta.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no metadata {key}")).1
    }
}

fn ok(args: &[&str]) -> Csv {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    Csv::parse(&String::from_utf8(out.stdout).unwrap())
}

#[test]
fn decompose_small_systems() {
    let t = ok(&["decompose", "3"]);
    assert_eq!(t.rows, vec![vec!["3/2", "1", "4", "4"], vec!["1/2", "2", "2", "4"]]);
    let t = ok(&["decompose", "1"]);
    assert_eq!(t.rows, vec![vec!["1/2", "1", "2", "2"]]);
    let t = ok(&["decompose", "4"]);
    let total: u64 = t.rows.iter().map(|r| r[t.col("total_dimension")].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 16);
    assert_eq!(t.meta("total_dimension"), "16");
}

#[test]
fn three_atom_figure_limits() {
    let t = ok(&["figure", "fig3", "--x-min", "1e-8", "--x-max", "1", "--points", "2"]);
    assert!((t.num(0, "pi1_1") - 5.0).abs() < 1e-6);
    assert!((t.num(0, "pi1_0") - 1.0).abs() < 1e-6);
    assert!((t.num(0, "pi1_0.5") - 3.0).abs() < 1e-6);
    assert_eq!(t.num(1, "independent"), 3.0);
}

#[test]
fn first_sinusoidal_figure() {
    let t = ok(&["figure", "fig6", "--points", "2", "--x-h-max", "1.0"]);
    assert_eq!(t.num(0, "x_h"), 1e-4);
    assert!((t.num(0, "power_ratio") - 4.0).abs() < 0.2);
    assert_eq!(t.meta("n_atoms"), "100");
    assert!(t.meta("note").contains("x_h_min"));
    // sign change of the power around the critical point
    let t = ok(&["figure", "fig6", "--x-h-min", "1.237", "--x-h-max", "1.239", "--points", "2"]);
    assert!(t.num(0, "power_collective") < 0.0 && t.num(1, "power_collective") > 0.0);
    let crit: f64 = t.meta("critical_x_h_two_sideband").parse().unwrap();
    assert!((crit - 1.238).abs() < 1e-3);
}

#[test]
fn second_sinusoidal_figure_uses_its_own_cold_bath() {
    let t = ok(&["figure", "fig7", "--points", "2"]);
    let beta_cold: f64 = t.meta("beta_cold").parse().unwrap();
    assert!((beta_cold + 0.9f64.ln()).abs() < 1e-15);
    assert!((t.num(0, "x_eff") - 0.036).abs() < 1e-3);
}

#[test]
fn saturation_figure_has_coth_column() {
    let t = ok(&["figure", "fig5", "--points", "3"]);
    assert_eq!(t.header, vec!["x_eff", "ratio_n5", "ratio_n10", "ratio_n50", "ratio_n100", "coth_half_x"]);
    let x = t.num(2, "x_eff");
    assert!((t.num(2, "coth_half_x") - 1.0 / (x / 2.0).tanh()).abs() < 1e-12);
}

#[test]
fn oracle_compare_agrees() {
    let t = ok(&["oracle-compare", "--n-atoms", "2"]);
    for r in 0..3 {
        assert!(t.num(r, "rel_error") < 1e-6);
    }
    let t = ok(&["oracle-compare", "--n-atoms", "2", "--initial-state", "singlet"]);
    for r in 0..3 {
        assert!(t.num(r, "abs_error") < 1e-10);
        assert!(t.num(r, "closed_form").abs() < 1e-12);
    }
    let t = ok(&["oracle-compare", "--n-atoms", "3", "--initial-state", "product:egg"]);
    assert!((t.meta("weight_j=3/2").parse::<f64>().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert!(t.rows.iter().all(|r| r[t.col("status")] == "pass"));
}

#[test]
fn dephasing_reports() {
    let t = ok(&["dephasing", "--n-atoms", "2", "--gamma-d", "1"]);
    assert!(t.rows.iter().all(|r| r[t.col("status")] == "pass"));
    let t = ok(&["dephasing", "--n-atoms", "1"]);
    assert!((t.num(2, "ratio") - 1.0).abs() < 1e-8);
    let t = ok(&["dephasing", "--n-atoms", "2", "--gamma-d", "0"]);
    assert_eq!(t.meta("regime"), "collective");
    // ratio equals F(1)/(2F(1/2)) at the machine's x_eff
    let beta = ok(&["beta-eff"]);
    let x: f64 = beta.meta("x_eff").parse().unwrap();
    let b = (-x).exp();
    let f1 = (2.0 + 2.0 * b) / (1.0 + b + b * b);
    let fh = 1.0 / (1.0 + b);
    assert!((t.num(2, "ratio") - f1 / (2.0 * fh)).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["boost", "--points", "1"]).status.code(), Some(2));
    assert_eq!(run(&["currents", "--drive", "2.0"]).status.code(), Some(2));
    assert_eq!(run(&["--set", "bogus=1", "decompose"]).status.code(), Some(2));
    assert_eq!(run(&["oracle-compare", "--set", "max_steps=10"]).status.code(), Some(3));
    let loose = run(&["oracle-compare", "--n-atoms", "3", "--set", "oracle_tol=1e-2"]);
    assert_eq!(loose.status.code(), Some(4));
    // the table is still written
    assert!(String::from_utf8(loose.stdout).unwrap().contains("fail"));
}

fn without_jobs(out: Output) -> String {
    let text = String::from_utf8(out.stdout).unwrap();
    text.lines().filter(|l| !l.starts_with("# jobs = ")).collect::<Vec<_>>().join("\n")
}

#[test]
fn output_is_deterministic_across_job_counts() {
    let a = run(&["boost", "--jobs", "1", "--points", "50"]);
    assert_eq!(a.stdout, run(&["boost", "--jobs", "1", "--points", "50"]).stdout);
    let a = without_jobs(a);
    assert!(!a.is_empty());
    assert_eq!(a, without_jobs(run(&["boost", "--jobs", "4", "--points", "50"])));
    let a = without_jobs(run(&["figure", "fig6", "--jobs", "1", "--points", "40"]));
    assert_eq!(a, without_jobs(run(&["figure", "fig6", "--jobs", "3", "--points", "40"])));
}

#[test]
fn json_output_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let status = bin().args(["pq-weights", "--format", "json", "--output"]).arg(&path).status().unwrap();
    assert!(status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["columns"], serde_json::json!(["q", "p"]));
    assert_eq!(v["metadata"]["command"], "pq-weights");
    let total: f64 = v["rows"].as_array().unwrap().iter().map(|r| r[1].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"beta_hot": 0.9, "n_atoms": 5, "weights": "numeric"}"#).unwrap();
    let out = bin().arg("--config").arg(&cfg).args(["currents", "--beta-hot", "0.5", "--print-config"]).output().unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["beta_hot"], 0.5);
    assert_eq!(v["n_atoms"], 5);
    assert_eq!(v["weights"], "numeric");
    assert_eq!(v["beta_cold"], 2.3);

    std::fs::write(&cfg, r#"{"beta_hott": 0.9}"#).unwrap();
    let out = bin().arg("--config").arg(&cfg).arg("currents").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tabulated_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let modulation = dir.path().join("omega.csv");
    let mut f = std::fs::File::create(&modulation).unwrap();
    writeln!(f, "t,omega").unwrap();
    // one period of ω₀ + g sin(Ωt) with ω₀ = 1, g = 0.03, Ω = 0.3
    let period = 2.0 * std::f64::consts::PI / 0.3;
    for k in 0..=2000 {
        let t = period * k as f64 / 2000.0;
        writeln!(f, "{t},{}", 1.0 + 0.03 * (0.3 * t).sin()).unwrap();
    }
    drop(f);
    let cold = dir.path().join("cold.csv");
    std::fs::write(&cold, "0.0,1.0\n0.999,1.0\n1.0,0.0\n3.0,0.0\n").unwrap();
    let hot = dir.path().join("hot.csv");
    std::fs::write(&hot, "0.0,0.0\n1.0,0.0\n1.001,1.0\n3.0,1.0\n").unwrap();

    let p = ok(&["pq-weights", "--modulation-table", modulation.to_str().unwrap()]);
    let row = |q: &str| p.rows.iter().position(|r| r[0] == q).unwrap();
    let p1 = p.num(row("1"), "p");
    // J_1(0.1)² from the series
    assert!((p1 - 0.0024937604).abs() < 1e-6, "{p1}");

    let t = ok(&[
        "beta-eff",
        "--modulation-table",
        modulation.to_str().unwrap(),
        "--spectrum",
        "table",
        "--cold-spectrum-table",
        cold.to_str().unwrap(),
        "--hot-spectrum-table",
        hot.to_str().unwrap(),
    ]);
    assert!(t.rows.iter().all(|r| (r[0] == "cold") == (r[1].parse::<i32>().unwrap() < 0)));
}

#[test]
fn transient_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("transient.csv");
    let status = bin().args(["transient", "--n-atoms", "4", "--output"]).arg(&path).status().unwrap();
    assert!(status.success());
    let t = Csv::parse(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(t.header, vec!["t", "jz", "emission", "residual"]);
    assert_eq!(t.num(0, "jz"), 2.0);
    assert!(t.meta("peak_over_initial").parse::<f64>().unwrap() > 1.0);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn arbandit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arbandit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn rows(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .unwrap()
        .records()
        .map(Result::unwrap)
        .collect()
}

fn header(path: &Path) -> Vec<String> {
    csv::Reader::from_path(path)
        .unwrap()
        .headers()
        .unwrap()
        .iter()
        .map(str::to_string)
        .collect()
}

const CONFIG: &str = r#"{
    "k": 3, "horizon": 400, "instance_count": 5, "master_seed": 1,
    "alpha_law": {"target_mean": 0.9},
    "export": {"trajectories": true, "ledgers": true},
    "policies": [{"kind": "ar2", "c1": [1.0]}, {"kind": "ucb1"}, {"kind": "oracle"}]
}"#;

#[test]
fn simulate_writes_results_exports_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("run");
    let o = arbandit(&["simulate", "--config", &s(&cfg), "--out", &s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let results = out.join("results.csv");
    assert_eq!(
        header(&results),
        [
            "regime",
            "k",
            "policy",
            "mean_normalized_regret",
            "std_normalized_regret",
            "instances_used",
            "instances_excluded"
        ]
    );
    let r = rows(&results);
    assert_eq!(r.len(), 3);
    let oracle = r.iter().find(|row| &row[2] == "oracle").unwrap();
    assert_eq!(oracle[3].parse::<f64>().unwrap(), 0.0);

    let traj = fs::read_dir(out.join("trajectories")).unwrap().count();
    let ledgers = fs::read_dir(out.join("ledgers")).unwrap().count();
    assert_eq!(traj, 5);
    assert_eq!(ledgers, 15);
    let tr = fs::read_dir(out.join("trajectories"))
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    assert_eq!(header(&tr), ["t", "arm", "expected", "realized"]);
    assert_eq!(rows(&tr).len(), 400 * 3);

    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["job"]["command"], "simulate");
    assert!(manifest["outputs"]["results.csv"].as_str().unwrap().len() == 64);
}

#[test]
fn output_dir_comes_from_config_when_out_is_absent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let target = dir.path().join("from-config");
    let text = CONFIG.replacen('{', &format!("{{\"output_dir\": {:?},", s(&target)), 1);
    fs::write(&cfg, text).unwrap();
    assert!(arbandit(&["simulate", "--config", &s(&cfg)])
        .status
        .success());
    assert!(target.join("results.csv").exists());

    fs::write(&cfg, CONFIG).unwrap();
    let o = arbandit(&["simulate", "--config", &s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn seed_override_changes_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, CONFIG).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(
        arbandit(&["simulate", "--config", &s(&cfg), "--out", &s(&a)])
            .status
            .success()
    );
    assert!(arbandit(&[
        "simulate",
        "--config",
        &s(&cfg),
        "--out",
        &s(&b),
        "--seed",
        "2"
    ])
    .status
    .success());
    assert_ne!(
        fs::read(a.join("results.csv")).unwrap(),
        fs::read(b.join("results.csv")).unwrap()
    );
}

#[test]
fn bad_configs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let out = s(&dir.path().join("o"));
    for text in [
        "{not json",
        r#"{"k": 0, "horizon": 10, "instance_count": 1, "alpha_law": {"target_mean": 0.5}, "policies": [{"kind": "naive"}]}"#,
        r#"{"k": 2, "horizon": 10, "instance_count": 1, "alpha_law": {"target_mean": 0.5}, "policies": []}"#,
        r#"{"k": 2, "horizon": 10, "instance_count": 1, "alpha_law": {"target_mean": 0.5}, "policies": [{"kind": "magic"}]}"#,
        r#"{"k": 2, "horizon": 10, "instance_count": 1, "alpha_law": {"target_mean": 0.5}, "typo": 1, "policies": [{"kind": "naive"}]}"#,
    ] {
        fs::write(&cfg, text).unwrap();
        let o = arbandit(&["simulate", "--config", &s(&cfg), "--out", &out]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(!o.stderr.is_empty());
    }
    let missing = arbandit(&["simulate", "--config", "/nonexistent/c.json", "--out", &out]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn table1_writes_a_wide_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = arbandit(&[
        "table1",
        "--regime",
        "0.4",
        "--instances",
        "3",
        "--horizon",
        "300",
        "--out",
        &s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = out.join("table1.csv");
    assert_eq!(
        header(&table),
        [
            "regime",
            "k",
            "AR2",
            "naive",
            "ETC",
            "eps-greedy",
            "UCB",
            "Rexp3",
            "mod-UCB"
        ]
    );
    let r = rows(&table);
    assert_eq!(
        r.iter().map(|row| row[1].to_string()).collect::<Vec<_>>(),
        ["2", "4", "6"]
    );
    assert!(r.iter().all(|row| &row[0] == "0.4"));
}

#[test]
fn bounds_sweeps_alpha_or_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let o = arbandit(&[
        "bounds",
        "--k",
        "3",
        "--alpha-grid",
        "0.5:0.9:0.1",
        "--nodes",
        "64",
        "--out",
        &s(&a),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        header(&a),
        ["alpha", "sigma", "k", "lower", "naive_upper", "ar2_upper"]
    );
    let r = rows(&a);
    assert_eq!(r.len(), 5);
    assert_eq!(r[4][0].parse::<f64>().unwrap(), 0.9);
    assert!(dir.path().join("a.csv.manifest.json").exists());

    let b = dir.path().join("b.csv");
    let o = arbandit(&[
        "bounds",
        "--alpha",
        "0.8",
        "--sigma-grid",
        "0.1:0.3:0.1",
        "--out",
        &s(&b),
    ]);
    assert!(o.status.success());
    let r = rows(&b);
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|row| &row[0] == "0.8"));

    let bad = arbandit(&["bounds", "--alpha-grid", "0.9:0.5:0.1", "--out", &s(&b)]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn stationary_writes_density_and_cdf() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s.csv");
    let o = arbandit(&[
        "stationary",
        "--alpha",
        "0.6",
        "--sigma",
        "0.8",
        "--R",
        "2",
        "--grid",
        "11",
        "--out",
        &s(&f),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&f);
    assert_eq!(r.len(), 11);
    assert_eq!(&r[0][0], "-2.0");
    assert_eq!(&r[10][0], "2.0");
    assert_eq!(r[10][2].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn robustness_reports_quartiles_per_noise_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = arbandit(&[
        "robustness",
        "--p",
        "0,20",
        "--k",
        "3",
        "--instances",
        "4",
        "--horizon",
        "300",
        "--out",
        &s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = out.join("robustness.csv");
    assert_eq!(
        header(&f),
        [
            "policy",
            "p",
            "instances_used",
            "mean",
            "std",
            "min",
            "q1",
            "median",
            "q3",
            "max"
        ]
    );
    let r = rows(&f);
    assert_eq!(r.len(), 6);
    for row in &r {
        let v: Vec<f64> = (5..10).map(|i| row[i].parse().unwrap()).collect();
        assert!(v.windows(2).all(|w| w[0] <= w[1]));
    }
}

fn column(path: &Path, i: usize) -> Vec<f64> {
    rows(path).iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("o");
    assert!(arbandit(&[
        "simulate",
        "--config",
        &s(&cfg),
        "--out",
        &s(&out),
        "--seed",
        "41"
    ])
    .status
    .success());
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["job"]["config"]["master_seed"], 41);
}

#[test]
fn robustness_at_zero_noise_matches_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let (t, r) = (dir.path().join("t"), dir.path().join("r"));
    let scale = ["--instances", "5", "--horizon", "400"];
    let mut a = vec!["table1", "--regime", "0.9", "--out"];
    let ts = s(&t);
    a.push(&ts);
    a.extend(scale);
    assert!(arbandit(&a).status.success());
    let rs = s(&r);
    let mut b = vec!["robustness", "--p", "0", "--k", "4", "--out", &rs];
    b.extend(scale);
    assert!(arbandit(&b).status.success());

    let table = rows(&t.join("results.csv"));
    let robust = rows(&r.join("robustness.csv"));
    for policy in ["AR2", "eps-greedy", "mod-UCB"] {
        let cell = table
            .iter()
            .find(|row| &row[1] == "4" && &row[2] == policy)
            .unwrap();
        let dist = robust.iter().find(|row| &row[0] == policy).unwrap();
        assert_eq!(
            cell[3].parse::<f64>().unwrap(),
            dist[3].parse::<f64>().unwrap(),
            "{policy}"
        );
    }
}

#[test]
fn bounds_grid_edges_and_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    let two = dir.path().join("two.csv");
    let common = ["--alpha-grid", "0.5:0.9:0.4", "--nodes", "64"];
    let mut a = vec!["bounds", "--C", "0.4", "--out"];
    let os = s(&one);
    a.push(&os);
    a.extend(common);
    assert!(arbandit(&a).status.success());
    let mut b = vec!["bounds", "--C", "0.8", "--out"];
    let tw = s(&two);
    b.push(&tw);
    b.extend(common);
    assert!(arbandit(&b).status.success());
    assert_eq!(rows(&one).len(), 2);
    for i in 3..6 {
        for (x, y) in column(&one, i).iter().zip(column(&two, i)) {
            assert!((2.0 * x - y).abs() <= 1e-14 * y.abs(), "column {i}");
        }
    }
}

#[test]
fn stationary_curves_integrate_to_one_and_flatten_with_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let mut peaks = Vec::new();
    for alpha in ["0.3", "0.6", "0.9"] {
        let f = dir.path().join(format!("s{alpha}.csv"));
        let o = arbandit(&[
            "stationary",
            "--alpha",
            alpha,
            "--sigma",
            "0.8",
            "--grid",
            "10000",
            "--out",
            &s(&f),
        ]);
        assert!(o.status.success());
        let (x, pdf) = (column(&f, 0), column(&f, 1));
        let mass: f64 = x
            .windows(2)
            .zip(pdf.windows(2))
            .map(|(x, p)| 0.5 * (x[1] - x[0]) * (p[0] + p[1]))
            .sum();
        assert!((mass - 1.0).abs() < 1e-6, "alpha={alpha}: {mass}");
        let cdf = column(&f, 2);
        assert_eq!((cdf[0], cdf[cdf.len() - 1]), (0.0, 1.0));
        peaks.push(pdf.iter().cloned().fold(0.0, f64::max));
    }
    assert!(peaks[0] > peaks[1] && peaks[1] > peaks[2], "{peaks:?}");
}

#[test]
fn table1_both_regimes_has_six_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = arbandit(&[
        "table1",
        "--instances",
        "2",
        "--horizon",
        "200",
        "--out",
        &s(&out),
    ]);
    assert!(o.status.success());
    let r = rows(&out.join("table1.csv"));
    assert_eq!(r.len(), 6);
    assert_eq!(r[0].len(), 9);
}

use std::path::Path;
use std::process::{Command, Output};

fn grazesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grazesim"))
        .args(args)
        .env_remove("GRAZESIM_SEED")
        .output()
        .unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = grazesim(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn report_value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in report"))
        .parse()
        .unwrap()
}

#[test]
fn osc_params_report() {
    let r = stdout(&["osc-params"]);
    assert!((report_value(&r, "tau") - 0.5813).abs() < 5e-4);
    assert!((report_value(&r, "delta") - 0.1518).abs() < 5e-4);
    assert_eq!(report_value(&r, "chi"), 1.0);
    assert!((report_value(&r, "c") - 2f64.sqrt()).abs() < 1e-12);
    assert!((report_value(&r, "a12") - 0.1227).abs() < 5e-4);
    for key in [
        "F_graz",
        "t_graz",
        "alphaL",
        "betaR",
        "kappa1",
        "mu_per_eta",
        "eta_per_mu",
    ] {
        report_value(&r, key);
    }
    assert!(r.contains("A=[[") && r.contains("b=["));
    let r = stdout(&["osc-params", "--k-osc", "5"]);
    assert!((report_value(&r, "tau") - 0.0927).abs() < 5e-4);
}

#[test]
fn forcing_and_mu_agree() {
    let r = stdout(&["osc-params", "--mu", "0.03"]);
    let f = report_value(&r, "F");
    let back = stdout(&["osc-params", "--F", &format!("{f:e}")]);
    assert!((report_value(&back, "mu") - 0.03).abs() < 1e-12);
}

#[test]
fn degenerate_support_reports_c_zero() {
    let out = grazesim(&["osc-params", "--k-supp", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("c = 0"));
}

#[test]
fn config_errors_exit_with_two() {
    for args in [
        &["sigma", "--mu", "0.03", "--F", "3.5"][..],
        &[
            "sigma", "--model", "n1", "--mu", "0.03", "--eps", "0.1", "--alpha", "1",
        ],
        &["sigma", "--model", "bogus", "--mu", "0.03"],
        &["density", "--model", "ode-none", "--mu", "0.03"],
        &["sample-fr"],
        &["orbit", "--mu", "0.03", "--n", "ten"],
    ] {
        assert_eq!(grazesim(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn numeric_failures_exit_with_three() {
    let diverge = [
        "orbit", "--tau", "3", "--delta", "0.1", "--chi", "1", "--mu", "-1", "--x0", "-1",
    ];
    assert_eq!(grazesim(&diverge).status.code(), Some(3));
    // no visit to x > 0 left of grazing
    assert_eq!(grazesim(&["sigma", "--mu", "-0.01"]).status.code(), Some(3));
}

#[test]
fn config_file_with_flag_override_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# sigma run\nmodel = n1\nmu = 0.03\nalpha = 3\nn = 500\nseed = 1\n",
    )
    .unwrap();
    let cfg_s = cfg.to_str().unwrap();

    let from_file = stdout(&["sigma", "--config", cfg_s]);
    let flags = stdout(&[
        "sigma", "--model", "n1", "--mu", "0.03", "--alpha", "3", "--n", "500", "--seed", "1",
    ]);
    assert_eq!(from_file, flags);
    let overridden = stdout(&["sigma", "--config", cfg_s, "--seed", "2"]);
    assert_ne!(overridden, from_file);

    let dump = dir.path().join("dump.cfg");
    let first = stdout(&[
        "sigma",
        "--config",
        cfg_s,
        "--seed",
        "2",
        "--dump-config",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(first, overridden);
    let replay = stdout(&["sigma", "--config", dump.to_str().unwrap()]);
    assert_eq!(replay, first);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "mu = 0.03\nmystery = 1\n").unwrap();
    assert_eq!(
        grazesim(&["osc-params", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn environment_seed_is_a_fallback() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_grazesim"));
        c.args(["sample-fr", "--rho", "0.03", "--n", "20"])
            .args(extra)
            .env_remove("GRAZESIM_SEED");
        if let Some(s) = env {
            c.env("GRAZESIM_SEED", s);
        }
        c.output().unwrap().stdout
    };
    assert_eq!(run(Some("9"), &[]), run(None, &["--seed", "9"]));
    assert_ne!(run(Some("9"), &[]), run(None, &[]));
    assert_eq!(
        run(Some("9"), &["--seed", "4"]),
        run(None, &["--seed", "4"])
    );
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_grazesim"))
            .args([
                "density", "--model", "n1", "--mu", "0.03", "--alpha", "1", "--n", "20000",
            ])
            .args([
                "--replicas",
                "6",
                "--grid",
                "64",
                "--threads",
                threads,
                "--out",
            ])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(Path::new(&out)).unwrap()
    };
    assert_eq!(run("1", "one"), run("4", "four"));
}

#[test]
fn bifurcation_diagram_skeleton() {
    let text = stdout(&[
        "bifdiag",
        "--mu-min",
        "-0.01",
        "--mu-max",
        "0.05",
        "--mu-steps",
        "61",
        "--n",
        "60",
    ]);
    let rows = csv_rows(&text);
    let distinct_at = |mu: f64| {
        let mut xs: Vec<f64> = rows
            .iter()
            .filter(|r| (r[0] - mu).abs() < 1e-9)
            .map(|r| r[1])
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        xs.len()
    };
    assert_eq!(distinct_at(-0.01), 1);
    assert_eq!(distinct_at(0.03), 3);
    assert_eq!(distinct_at(0.05), 3);
}

#[test]
fn first_return_samples_match_gaussian_covariance() {
    let rho = 0.008;
    let rows = csv_rows(&stdout(&[
        "sample-fr",
        "--rho",
        "0.008",
        "--n",
        "1e5",
        "--seed",
        "2",
    ]));
    assert_eq!(rows.len(), 100_000);
    let n = rows.len() as f64;
    let mr = rows.iter().map(|r| r[0]).sum::<f64>() / n;
    let mh = rows.iter().map(|r| r[1]).sum::<f64>() / n;
    let cov = |f: &dyn Fn(&Vec<f64>) -> f64| rows.iter().map(f).sum::<f64>() / (n - 1.0);
    let k = 2.0 * rho / 3.0;
    let got = [
        cov(&|r| (r[0] - mr) * (r[0] - mr)),
        cov(&|r| (r[0] - mr) * (r[1] - mh)),
        cov(&|r| (r[1] - mh) * (r[1] - mh)),
    ];
    for (g, w) in got.iter().zip([4.0 * k, k, k]) {
        assert!((g - w).abs() / w < 0.05, "{g} vs {w}");
    }
}

#[test]
fn noisy_density_reaches_right_half_plane() {
    let text = stdout(&[
        "density", "--model", "n1", "--mu", "0.001", "--alpha", "1", "--n", "2e5", "--grid", "128",
    ]);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let field = |name: &str| -> f64 {
        header
            .split_whitespace()
            .find_map(|t| t.strip_prefix(&format!("{name}=")))
            .unwrap()
            .parse()
            .unwrap()
    };
    let (x_min, x_max) = (field("x_min"), field("x_max"));
    let rows: Vec<Vec<u64>> = lines
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    let nx = rows[0].len();
    let right: u64 = rows
        .iter()
        .flat_map(|r| r.iter().enumerate())
        .filter(|(i, _)| x_min + (*i as f64 + 0.5) * (x_max - x_min) / nx as f64 > 0.0)
        .map(|(_, c)| c)
        .sum();
    assert!(right > 0);
}

#[test]
fn ode_orbit_writes_trajectory() {
    let text = stdout(&[
        "orbit",
        "--model",
        "ode-switching",
        "--mu",
        "0.03",
        "--alpha",
        "1",
        "--n",
        "2",
    ]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,u,v,branch,xi"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.iter().any(|l| l.contains(",R,")));
    assert!(rows.iter().all(|l| l.split(',').count() == 5));
}

#[test]
fn compare_reports_three_clusters() {
    let rows = csv_rows(&stdout(&[
        "compare", "--model", "n1", "--mu", "0.03", "--alpha", "1", "--n", "300",
    ]));
    assert_eq!(rows.len(), 3);
    for r in rows {
        let ratio = r[16];
        assert!((0.5..=2.0).contains(&ratio), "{ratio}");
    }
}

use std::path::Path;
use std::process::{Command, Output};

use qst_core::config::DEFAULT_CONFIG;

fn qstchain(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qstchain"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> toml::Table {
    std::fs::read_to_string(dir.join("summary.toml")).unwrap().parse().unwrap()
}

fn manifest(dir: &Path) -> toml::Table {
    std::fs::read_to_string(dir.join("manifest.toml")).unwrap().parse().unwrap()
}

#[test]
fn synthesize_produces_mirror_ratios() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qstchain(tmp.path(), &["synthesize"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(tmp.path());
    let ratios: Vec<f64> = s["coupling_ratios"].as_array().unwrap().iter().map(|v| v.as_float().unwrap()).collect();
    // √3 : 2 : √3 normalized to the first link.
    let want = [1.0, 2.0 / 3f64.sqrt(), 1.0];
    for (r, w) in ratios.iter().zip(want) {
        assert!((r - w).abs() < 1e-10, "{ratios:?}");
    }
    assert!(tmp.path().join("schedule.csv").exists());
    assert!(tmp.path().join("schedule.toml").exists());
    let m = manifest(tmp.path());
    assert_eq!(m["subcommand"].as_str(), Some("synthesize"));
    assert_eq!(m["artifacts"].as_table().unwrap().len(), 3);
}

#[test]
fn evolved_schedule_peaks_at_84_ns() {
    let tmp = tempfile::tempdir().unwrap();
    let synth = tmp.path().join("synth");
    assert!(qstchain(&synth, &["synthesize"]).status.success());
    let evolved = tmp.path().join("evolve");
    let config = synth.join("schedule.toml");
    let out = qstchain(&evolved, &["--config", config.to_str().unwrap(), "evolve", "--t-max-ns", "150"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(evolved.join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("time_ns,p_e_q0,p_e_q1,p_e_q2,p_e_q3,norm_or_trace"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], f[4])
        })
        .collect();
    let peak = rows.iter().copied().fold((0.0, -1.0), |a, r| if r.1 > a.1 { r } else { a });
    assert_eq!(peak.0, 84.0);
    assert!(peak.1 > 0.999);
}

#[test]
fn missing_coupling_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    std::fs::write(&config, DEFAULT_CONFIG.replace("[16.68, 17.50, 17.52]", "[16.68, 17.50]")).unwrap();
    let out = qstchain(&tmp.path().join("o"), &["--config", config.to_str().unwrap(), "synthesize"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("chain.static_couplings"));
}

#[test]
fn infeasible_synthesis_reports_headroom() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qstchain(tmp.path(), &["synthesize", "--tau-ns", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("headroom"), "{err}");
}

#[test]
fn unknown_subcommand_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qstchain(tmp.path(), &["transmogrify"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn fit_failure_is_a_numerical_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = qstchain(tmp.path(), &["chevron", "--alpha", "0", "--points", "3", "--samples", "16", "--t-max-ns", "50", "--nu-span-mhz", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_runs_produce_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, seed: &str| {
        let dir = tmp.path().join(name);
        let out = qstchain(&dir, &["--seed", seed, "--workers", "2", "tomography", "--noise", "--shots", "2000"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        manifest(&dir)["artifacts"].clone()
    };
    let a = run("a", "7");
    let b = run("b", "7");
    let c = run("c", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn self_check_and_calibrate_pass_on_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(qstchain(&tmp.path().join("check"), &["self-check"]).status.success());
    assert_eq!(summary(&tmp.path().join("check"))["passed"].as_bool(), Some(true));

    let cal = tmp.path().join("cal");
    assert!(qstchain(&cal, &["calibrate"]).status.success());
    let s = summary(&cal);
    assert!(s["raw_settling_deviation"].as_float().unwrap() > 0.02);
    assert!(s["corrected_settling_deviation"].as_float().unwrap() < 0.01);
    assert!(s["crosstalk_residual"].as_float().unwrap() < 1e-12);
}

#[test]
fn phase_scan_reports_unit_slope() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(qstchain(tmp.path(), &["phase-scan", "--link", "2"]).status.success());
    let slope = summary(tmp.path())["slope"].as_float().unwrap();
    assert!((slope + 1.0).abs() < 1e-2);
}

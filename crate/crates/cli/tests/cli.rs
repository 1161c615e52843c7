use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use biharmonic::config::REPORT_DIR_ENV;
use biharmonic::report::{to_csv, to_json, Check, Status, SuiteReport};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biharmonic"))
        .args(args)
        .env(REPORT_DIR_ENV, dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_report(path: &Path) -> SuiteReport {
    serde_json::from_str(&fs::read_to_string(path).expect("report exists")).expect("report parses")
}

#[test]
fn kernel_eval_prints_closed_form_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(
        dir.path(),
        &[
            "kernel-eval",
            "--model",
            "halfspace",
            "--k",
            "0",
            "--n",
            "4",
            "--point",
            "0,0,0,0,1",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text
        .lines()
        .find(|l| l.starts_with("P0"))
        .expect("value line");
    let v: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    let expected = 15.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
    assert!((v - expected).abs() < 1e-9, "{v}");
    assert!((v - 0.3800).abs() < 1e-4);
    assert!(dir.path().join("kernel-eval.json").exists());
}

#[test]
fn verify_kernels_passes_and_records_references() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.json");
    let o = bin(
        dir.path(),
        &[
            "verify",
            "kernels",
            "--n",
            "5",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r = read_report(&out);
    assert_eq!(r.seed, 7);
    assert!(r.all_passed());
    assert!(!r.checks.is_empty());
    assert!(r.checks.iter().all(|c| !c.paper_ref.is_empty()));
    for prefix in ["relations/", "biharmonicity/", "mass/"] {
        assert!(
            r.checks.iter().any(|c| c.id.starts_with(prefix)),
            "{prefix}"
        );
    }
    let raw = fs::read_to_string(&out).unwrap();
    assert!(raw.contains("\"paper_ref\""));
}

#[test]
fn failing_checks_exit_one_and_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    // A coarse stencil cannot resolve the kernels near the boundary.
    let o = bin(
        dir.path(),
        &["verify", "biharmonicity", "--n", "4", "--stencil-h", "0.5"],
    );
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("failed checks:"));
    let r = read_report(&dir.path().join("biharmonicity.json"));
    assert!(r.summary.failed > 0);
    assert!(r.checks.iter().any(|c| c.status == Status::Fail));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "no-such-suite"][..],
        &["--bogus"][..],
        &[
            "kernel-eval",
            "--model",
            "halfspace",
            "--k",
            "7",
            "--point",
            "0,1",
        ][..],
        &["verify", "mass", "--sphere-order", "1"][..],
        &["verify", "mass", "--config", "/nonexistent/config.json"][..],
    ] {
        let o = bin(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(dir.path(), &["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify"));
}

#[test]
fn csv_report_has_fixed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let o = bin(
        dir.path(),
        &[
            "verify",
            "mass",
            "--n",
            "4",
            "--format",
            "csv",
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,paper_ref,value,tolerance,status"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with(",pass")));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"seed": 3, "n": 4}"#).unwrap();
    let c = cfg.to_str().unwrap();

    let o = bin(dir.path(), &["verify", "mass", "--config", c]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_report(&dir.path().join("mass.json"));
    assert_eq!(r.seed, 3);
    assert!(r.checks.iter().all(|c| c.id.starts_with("mass/n4/")));

    let o = bin(
        dir.path(),
        &["verify", "mass", "--config", c, "--seed", "11"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_report(&dir.path().join("mass.json")).seed, 11);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"sead": 3}"#).unwrap();
    let o = bin(
        dir.path(),
        &["verify", "mass", "--config", cfg.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_report_is_valid() {
    let r = SuiteReport::new("empty", 7, serde_json::json!({}), Vec::new());
    assert!(r.all_passed());
    let back: SuiteReport = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.summary.total, 0);
    assert_eq!(to_csv(&r).unwrap(), "id,paper_ref,value,tolerance,status\n");
}

#[test]
fn report_round_trips_through_json() {
    let checks = vec![
        Check::at_most("a/1", "some identity", 1e-14, 1e-12),
        Check::at_most("a/2", "some identity", f64::NAN, 1e-12),
        Check::info("a/3", "a constant", 0.25),
        Check::failed("a/4", "a bound", "quadrature did not converge"),
    ];
    let r = SuiteReport::new("a", 1, serde_json::json!({"n": 4}), checks);
    assert_eq!(r.summary.failed, 2);
    let back: SuiteReport = serde_json::from_str(&to_json(&r).unwrap()).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.checks[1].value, None);
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = bin(
            dir.path(),
            &[
                "verify",
                "green",
                "--n",
                "4",
                "--seed",
                "5",
                "--out",
                p.to_str().unwrap(),
            ],
        );
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

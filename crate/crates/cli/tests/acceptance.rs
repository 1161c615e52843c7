//! One pass/fail line per acceptance criterion, judged from two `verify all --seed 7` reports.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::thread;

use biharmonic::report::{Check, SuiteReport};

const CRITERIA: [(u32, &str, &[&str]); 13] = [
    (
        1,
        "kernel and fundamental solution relations",
        &["relations"],
    ),
    (2, "kernel biharmonicity", &["biharmonicity"]),
    (3, "unit mass of P0", &["mass"]),
    (4, "boundary limits and derivative limit", &["boundary"]),
    (5, "Green function structure", &["green"]),
    (6, "Green formula round trip", &["roundtrip"]),
    (7, "bubble boundary problems", &["bubbles"]),
    (
        8,
        "classification identities and decay",
        &["classification", "families"],
    ),
    (9, "singular solutions", &["singular"]),
    (10, "comparison principle", &["comparison"]),
    (11, "GJMS trace identity", &["gjms"]),
    (12, "sharp constants", &["constants"]),
    (13, "cylinder ODE", &["ode"]),
];

fn verify_all(out: &Path) -> i32 {
    let out = out.to_str().expect("utf-8 temp path").to_string();
    biharmonic::run(["biharmonic", "verify", "all", "--seed", "7", "--out", &out])
}

fn suite_of(c: &Check) -> &str {
    c.id.split('/').next().unwrap_or("")
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let (a, b) = (
        dir.path().join("first.json"),
        dir.path().join("second.json"),
    );
    let (code_a, code_b) = thread::scope(|s| {
        let ha = s.spawn(|| verify_all(&a));
        let hb = s.spawn(|| verify_all(&b));
        (
            ha.join().expect("first run"),
            hb.join().expect("second run"),
        )
    });
    let bytes_a = fs::read(&a).expect("first report");
    let bytes_b = fs::read(&b).expect("second report");
    let report: SuiteReport = serde_json::from_slice(&bytes_a).expect("report parses");

    println!();
    let mut all_ok = true;
    for (num, title, suites) in CRITERIA {
        let checks: Vec<&Check> = report
            .checks
            .iter()
            .filter(|c| suites.contains(&suite_of(c)))
            .collect();
        let failed: Vec<&&Check> = checks.iter().filter(|c| !c.passed()).collect();
        let ok = !checks.is_empty() && failed.is_empty();
        all_ok &= ok;
        println!(
            "criterion {num:>2} {}: {title} ({} of {} checks pass)",
            if ok { "PASS" } else { "FAIL" },
            checks.len() - failed.len(),
            checks.len()
        );
        for c in failed {
            println!(
                "    failing: {} value {:?} tolerance {:?}",
                c.id, c.value, c.tolerance
            );
        }
    }
    let same = bytes_a == bytes_b;
    all_ok &= same;
    println!(
        "criterion 14 {}: determinism (byte-identical reports: {same})",
        if same { "PASS" } else { "FAIL" }
    );
    println!("exit codes of the two runs: {code_a}, {code_b}");

    if all_ok && code_a == biharmonic::EXIT_OK && code_b == biharmonic::EXIT_OK {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

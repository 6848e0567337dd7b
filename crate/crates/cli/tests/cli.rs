use std::time::Instant;

use orbital_cli::report::{
    to_json, DecideReport, EligibilityReport, PowerReportEnvelope, SampleReport, SelftestEnvelope,
};
use orbital_cli::run;
use orbital_core::{DensityStatus, PowerStatus};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn ok(args: &[&str]) -> String {
    let mut full = vec!["orbital"];
    full.extend_from_slice(args);
    let o = run(full);
    assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
    o.stdout
}

fn code(args: &[&str]) -> i32 {
    let mut full = vec!["orbital"];
    full.extend_from_slice(args);
    run(full).code
}

/// Parses typed JSON and checks re-serialisation is byte-identical.
fn round_trip<T: Serialize + DeserializeOwned>(json: &str) -> T {
    let typed: T = serde_json::from_str(json).unwrap();
    assert_eq!(to_json(&typed).unwrap(), json);
    typed
}

#[test]
fn eligibility_examples() {
    let r: EligibilityReport = round_trip(&ok(&[
        "eligibility",
        "--p",
        "2",
        "--q",
        "3",
        "--x",
        "2;0",
        "--y",
        "1;1",
    ]));
    assert!(r.result.verdict.eligible);
    assert_eq!(r.schema, 1);
    let r: EligibilityReport = round_trip(&ok(&[
        "eligibility",
        "--x",
        "0;3",
        "--y",
        "3;0",
        "--p",
        "3",
        "--q",
        "4",
    ]));
    assert!(!r.result.verdict.eligible);
    let r: EligibilityReport = round_trip(&ok(&[
        "eligibility",
        "--x",
        "2,1;0",
        "--y",
        "1;2",
        "--p",
        "3",
        "--q",
        "4",
    ]));
    assert!(r.result.verdict.eligible);
    assert_eq!(
        (r.result.x_weight, r.result.y_weight, r.result.verdict.lhs),
        (2, 4, 6)
    );
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(
        code(&[
            "eligibility",
            "--p",
            "3",
            "--q",
            "4",
            "--x",
            "2,2;0",
            "--y",
            "1;2"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "eligibility",
            "--p",
            "3",
            "--q",
            "4",
            "--x",
            "a;b",
            "--y",
            "1;2"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "eligibility",
            "--p",
            "4",
            "--q",
            "4",
            "--x",
            "4;0",
            "--y",
            "4;0"
        ]),
        1
    );
    assert_eq!(code(&["decide", "--p", "3", "--q", "4", "--x", "3;0"]), 1);
    assert_eq!(
        code(&[
            "decide",
            "--p",
            "3",
            "--q",
            "4",
            "--x",
            "3;0",
            "--x-values",
            "1,1,1",
            "--y",
            "3;0"
        ]),
        1
    );
    assert_eq!(
        code(&["decide", "--p", "3", "--q", "4", "--x", "3;0", "--y", "3;0", "--field", "O"]),
        1
    );
    assert_eq!(
        code(&[
            "decide",
            "--p",
            "3",
            "--q",
            "4",
            "--x",
            "3;0",
            "--y",
            "3;0",
            "--tol-rank",
            "2"
        ]),
        1
    );
    assert_eq!(code(&["power", "--p", "3", "--q", "4", "--x", "0;3"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn decide_examples() {
    let r: DecideReport = round_trip(&ok(&[
        "decide", "--p", "3", "--q", "4", "--x", "2,1;0", "--y", "1;2",
    ]));
    assert_eq!(r.result.status, DensityStatus::AcCertified);
    assert!(r.result.tangent.unwrap().witness_seed.is_some());

    let r: DecideReport = round_trip(&ok(&[
        "decide",
        "--p",
        "3",
        "--q",
        "4",
        "--x",
        "1;2",
        "--y",
        "1;2",
        "--field",
        "C",
        "--samples",
        "100",
    ]));
    assert_eq!(r.result.status, DensityStatus::SingularProven);
    assert!(!r.result.necessity.unwrap().checks.is_empty());

    let r: DecideReport = round_trip(&ok(&[
        "decide", "--p", "3", "--q", "4", "--x", "2;1", "--y", "2;1", "--trials", "0",
    ]));
    assert_eq!(r.result.status, DensityStatus::Undecided);

    let text = ok(&[
        "decide",
        "--p",
        "2",
        "--q",
        "3",
        "--x-values",
        "1,-1",
        "--y-values",
        "-0.5,0",
        "--format",
        "text",
    ]);
    assert!(text.starts_with("status: AC_CERTIFIED"), "{text}");
}

#[test]
fn sample_examples() {
    let csv = ok(&[
        "sample",
        "--p",
        "3",
        "--q",
        "4",
        "--x",
        "2,1;0",
        "--y",
        "1;2",
        "--samples",
        "3",
        "--format",
        "csv",
    ]);
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "H1,H2,H3,min_abs");
    assert_eq!(rows.len(), 4);
    assert!(rows[1..].iter().all(|r| r.split(',').count() == 4));
    assert!(csv.contains("# seed=0") && csv.contains("# field=R"));

    let r: SampleReport = round_trip(&ok(&[
        "sample",
        "--p",
        "3",
        "--q",
        "4",
        "--x-values",
        "-0.4,1.5,0.2",
        "--y",
        "0;3",
        "--samples",
        "5",
    ]));
    for pt in &r.result.sample.points {
        for (a, b) in pt.values().iter().zip([1.5, 0.4, 0.2]) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    let r: SampleReport = round_trip(&ok(&[
        "sample",
        "--p",
        "3",
        "--q",
        "4",
        "--x",
        "1;2",
        "--y",
        "1;2",
        "--samples",
        "50",
        "--field",
        "H",
    ]));
    assert_eq!(r.result.min_abs.len(), 50);
    assert!(r.result.min_abs.iter().all(|&m| m <= 1e-6));
}

#[test]
fn power_examples() {
    let r: PowerReportEnvelope = round_trip(&ok(&["power", "--p", "3", "--q", "4", "--x", "1;2"]));
    assert_eq!(r.result.min_power, Some(3));
    assert_eq!(r.result.trail.len(), 3);
    assert_eq!(r.result.trail[2].verdict, PowerStatus::AcEvidenced);
    for c in ["1,1,1;0", "2;1"] {
        let r: PowerReportEnvelope = round_trip(&ok(&[
            "power",
            "--p",
            "3",
            "--q",
            "4",
            "--x",
            c,
            "--samples",
            "100",
        ]));
        assert_eq!(r.result.min_power, Some(2), "{c}");
    }
    let csv = ok(&[
        "power",
        "--p",
        "3",
        "--q",
        "4",
        "--x",
        "1;2",
        "--samples",
        "100",
        "--format",
        "csv",
    ]);
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn selftest_exit_codes() {
    let start = Instant::now();
    let out = ok(&["selftest", "--p", "2", "--q", "3"]);
    assert!(start.elapsed().as_secs() < 10);
    let r: SelftestEnvelope = round_trip(&out);
    assert!(r.result.passed());

    let o = run([
        "orbital",
        "selftest",
        "--p",
        "2",
        "--q",
        "3",
        "--tol-rank",
        "0.5",
        "--format",
        "text",
    ]);
    assert_eq!(o.code, 3);
    assert!(o.stdout.contains("FAIL oracle equivalence"), "{}", o.stdout);
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("orbital-cli-test-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let stdout = ok(&[
        "eligibility",
        "--p",
        "2",
        "--q",
        "3",
        "--x",
        "2;0",
        "--y",
        "1;1",
        "--out",
        p,
    ]);
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(
        written,
        ok(&[
            "eligibility",
            "--p",
            "2",
            "--q",
            "3",
            "--x",
            "2;0",
            "--y",
            "1;1"
        ])
    );
    assert_eq!(
        code(&[
            "eligibility",
            "--p",
            "2",
            "--q",
            "3",
            "--x",
            "2;0",
            "--y",
            "1;1",
            "--out",
            "/nonexistent/dir/x.json"
        ]),
        1
    );
}

#[test]
fn numbers_carry_twelve_significant_digits() {
    let out = ok(&[
        "sample",
        "--p",
        "2",
        "--q",
        "3",
        "--x",
        "1;1",
        "--y",
        "1,1;0",
        "--samples",
        "20",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for pt in v["result"]["sample"]["points"].as_array().unwrap() {
        for x in pt.as_array().unwrap() {
            let s = x.to_string();
            let digits = s
                .split(['e', 'E'])
                .next()
                .unwrap()
                .chars()
                .filter(char::is_ascii_digit)
                .collect::<String>();
            assert!(digits.trim_start_matches('0').len() <= 12, "{s}");
        }
    }
}

//! End-to-end checks of the command-line contract: flags, file formats,
//! and the exit-code table (0 ok / 1 validation fail / 2 usage / 3
//! entangled).

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn sepcrit(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepcrit"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn gen_meas_mub_writes_complete_set() {
    let dir = TempDir::new().unwrap();
    let out = sepcrit(
        dir.path(),
        &["gen-meas", "--type", "mub", "--dim", "3", "--out", "m.json"],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("bases = 4"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(doc["kind"], "mub");
    assert_eq!(doc["data"].as_array().unwrap().len(), 4);
}

#[test]
fn gen_meas_mum_prints_closed_form_kappa() {
    let dir = TempDir::new().unwrap();
    let out = sepcrit(
        dir.path(),
        &[
            "gen-meas", "--type", "mum", "--dim", "2", "--count", "3", "--t", "0.1", "--out",
            "m.json",
        ],
    );
    assert_eq!(code(&out), 0);
    // κ = 1/2 + 0.01(1+√2)² = 0.5582842712...
    assert!(
        stdout(&out).contains("kappa = 0.558284271247"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn gen_meas_rejects_composite_mub_dimension() {
    let dir = TempDir::new().unwrap();
    let out = sepcrit(
        dir.path(),
        &["gen-meas", "--type", "mub", "--dim", "6", "--out", "m.json"],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("import a file"), "{}", stderr(&out));
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn validate_meas_exit_codes() {
    let dir = TempDir::new().unwrap();
    let gen = sepcrit(
        dir.path(),
        &[
            "gen-meas", "--type", "mum", "--dim", "3", "--t-frac", "0.5", "--out", "m.json",
        ],
    );
    assert_eq!(code(&gen), 0);

    let ok = sepcrit(dir.path(), &["validate-meas", "m.json"]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    assert!(stdout(&ok).contains("PASS"));

    // perturb one matrix entry by 1e-3: residuals must flag it
    let text = std::fs::read_to_string(dir.path().join("m.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let entry = &mut doc["data"][0][0][0][0][0];
    *entry = serde_json::json!(entry.as_f64().unwrap() + 1e-3);
    std::fs::write(dir.path().join("bad.json"), doc.to_string()).unwrap();
    let bad = sepcrit(dir.path(), &["validate-meas", "bad.json"]);
    assert_eq!(code(&bad), 1, "{}", stdout(&bad));
    assert!(stdout(&bad).contains("FAIL"));

    // truncated JSON is a parse error
    std::fs::write(dir.path().join("trunc.json"), &text[..text.len() / 2]).unwrap();
    let trunc = sepcrit(dir.path(), &["validate-meas", "trunc.json"]);
    assert_eq!(code(&trunc), 2);

    let missing = sepcrit(dir.path(), &["validate-meas", "nope.json"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn certify_bell_reports_unit_margin() {
    let dir = TempDir::new().unwrap();
    sepcrit(
        dir.path(),
        &[
            "gen-meas",
            "--type",
            "mub",
            "--dim",
            "2",
            "--out",
            "mub2.json",
        ],
    );
    sepcrit(
        dir.path(),
        &[
            "gen-state",
            "--family",
            "bell",
            "--dims",
            "2,2",
            "--out",
            "bell.json",
        ],
    );
    let out = sepcrit(
        dir.path(),
        &[
            "certify",
            "--state",
            "bell.json",
            "--criterion",
            "thm1",
            "--meas",
            "mub2.json",
            "mub2.json",
        ],
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("margin      : 1.000000000000"), "{text}");
    assert!(text.contains("verdict     : ENTANGLED"));
}

#[test]
fn certify_separable_state_exits_zero() {
    let dir = TempDir::new().unwrap();
    sepcrit(
        dir.path(),
        &[
            "gen-meas",
            "--type",
            "mub",
            "--dim",
            "2",
            "--out",
            "mub2.json",
        ],
    );
    let out = sepcrit(
        dir.path(),
        &[
            "certify",
            "--family",
            "random-separable",
            "--dims",
            "2,2",
            "--terms",
            "4",
            "--seed",
            "11",
            "--criterion",
            "thm1",
            "--meas",
            "mub2.json",
            "mub2.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("NOT_DETECTED"));
}

#[test]
fn certify_coarse_grains_with_partition() {
    let dir = TempDir::new().unwrap();
    sepcrit(
        dir.path(),
        &[
            "gen-state",
            "--family",
            "ghz",
            "--dims",
            "2,2,2,2",
            "--out",
            "ghz.json",
        ],
    );
    sepcrit(
        dir.path(),
        &[
            "gen-meas",
            "--type",
            "mum",
            "--dim",
            "4",
            "--t-frac",
            "0.9",
            "--out",
            "mum4.json",
        ],
    );
    sepcrit(
        dir.path(),
        &[
            "gen-meas",
            "--type",
            "mum",
            "--dim",
            "4",
            "--t-frac",
            "0.9",
            "--conjugate",
            "--out",
            "mum4c.json",
        ],
    );
    // runs as a 2-part problem after merging 1,2|3,4 and detects the state
    let out = sepcrit(
        dir.path(),
        &[
            "certify",
            "--state",
            "ghz.json",
            "--partition",
            "1,2|3,4",
            "--criterion",
            "thm2",
            "--meas",
            "mum4.json",
            "mum4c.json",
        ],
    );
    assert_eq!(code(&out), 3, "{}\n{}", stdout(&out), stderr(&out));
    assert!(stdout(&out).contains("ENTANGLED"));

    // wrong measurement count for the merged shape is a usage error
    let bad = sepcrit(
        dir.path(),
        &[
            "certify",
            "--state",
            "ghz.json",
            "--partition",
            "1,2|3,4",
            "--criterion",
            "thm2",
            "--meas",
            "mum4.json",
        ],
    );
    assert_eq!(code(&bad), 2);
}

#[test]
fn certify_reports_dimension_mismatch_as_usage_error() {
    let dir = TempDir::new().unwrap();
    sepcrit(
        dir.path(),
        &[
            "gen-meas",
            "--type",
            "mub",
            "--dim",
            "3",
            "--out",
            "mub3.json",
        ],
    );
    sepcrit(
        dir.path(),
        &[
            "gen-state",
            "--family",
            "bell",
            "--dims",
            "2,2",
            "--out",
            "bell.json",
        ],
    );
    let out = sepcrit(
        dir.path(),
        &[
            "certify",
            "--state",
            "bell.json",
            "--criterion",
            "thm1",
            "--meas",
            "mub3.json",
            "mub3.json",
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn scan_isotropic_locates_one_third() {
    let dir = TempDir::new().unwrap();
    sepcrit(
        dir.path(),
        &[
            "gen-meas",
            "--type",
            "mub",
            "--dim",
            "2",
            "--out",
            "mub2.json",
        ],
    );
    sepcrit(
        dir.path(),
        &[
            "gen-meas",
            "--type",
            "mub",
            "--dim",
            "2",
            "--conjugate",
            "--out",
            "mub2c.json",
        ],
    );
    let out = sepcrit(
        dir.path(),
        &[
            "scan",
            "--family",
            "isotropic",
            "--dims",
            "2,2",
            "--criterion",
            "thm1",
            "--meas",
            "mub2.json",
            "mub2c.json",
            "--p-from",
            "0",
            "--p-to",
            "1",
            "--steps",
            "11",
            "--out",
            "scan.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(
        stdout(&out).contains("threshold p* = 0.3333"),
        "{}",
        stdout(&out)
    );

    let csv = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,lhs,rhs,margin,verdict"));
    assert_eq!(csv.lines().count(), 12);
    assert!(!csv.contains('\r'));
    assert!(csv.ends_with('\n'));
    // margins are monotone, so no warning
    assert!(!stdout(&out).contains("warning"));
}

#[test]
fn scan_single_point_range() {
    let dir = TempDir::new().unwrap();
    sepcrit(
        dir.path(),
        &[
            "gen-meas",
            "--type",
            "mub",
            "--dim",
            "2",
            "--out",
            "mub2.json",
        ],
    );
    let out = sepcrit(
        dir.path(),
        &[
            "scan",
            "--family",
            "bell",
            "--dims",
            "2,2",
            "--criterion",
            "thm1",
            "--meas",
            "mub2.json",
            "mub2.json",
            "--p-from",
            "1",
            "--p-to",
            "1",
            "--steps",
            "5",
            "--out",
            "one.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("one.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().ends_with("ENTANGLED"));
}

#[test]
fn scan_validates_range() {
    let dir = TempDir::new().unwrap();
    sepcrit(
        dir.path(),
        &[
            "gen-meas",
            "--type",
            "mub",
            "--dim",
            "2",
            "--out",
            "mub2.json",
        ],
    );
    let out = sepcrit(
        dir.path(),
        &[
            "scan",
            "--family",
            "isotropic",
            "--dims",
            "2,2",
            "--criterion",
            "thm1",
            "--meas",
            "mub2.json",
            "mub2.json",
            "--p-from",
            "0.5",
            "--p-to",
            "0.2",
            "--steps",
            "3",
            "--out",
            "x.csv",
        ],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn gen_state_is_deterministic_under_seed() {
    let dir = TempDir::new().unwrap();
    for name in ["a.json", "b.json"] {
        let out = sepcrit(
            dir.path(),
            &[
                "gen-state",
                "--family",
                "random-separable",
                "--dims",
                "2,3",
                "--terms",
                "3",
                "--seed",
                "42",
                "--out",
                name,
            ],
        );
        assert_eq!(code(&out), 0);
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn gen_state_ghz_has_full_dimension() {
    let dir = TempDir::new().unwrap();
    let out = sepcrit(
        dir.path(),
        &[
            "gen-state",
            "--family",
            "ghz",
            "--dims",
            "2,2,2,2",
            "--out",
            "g.json",
        ],
    );
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(doc["data"].as_array().unwrap().len(), 16);
    assert_eq!(doc["data"][0].as_array().unwrap().len(), 16);
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&sepcrit(dir.path(), &["frobnicate"])), 2);
    assert_eq!(
        code(&sepcrit(dir.path(), &["certify", "--criterion", "thm1"])),
        2
    );
    assert_eq!(
        code(&sepcrit(
            dir.path(),
            &[
                "gen-state",
                "--family",
                "bell",
                "--dims",
                "2,3",
                "--out",
                "x.json"
            ]
        )),
        2
    );
}

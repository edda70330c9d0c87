use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nilsoliton::algebra::StructureConstants;
use nilsoliton::cli::{AlgebraFile, CertificateOutput};
use nilsoliton::soliton::detect_soliton;
use proptest::prelude::*;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nilsoliton"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn docs(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs/examples")
        .join(name)
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn check_json(path: &str) -> (i32, CertificateOutput) {
    let o = run(&["check", path, "--format", "json"]);
    (
        code(&o),
        serde_json::from_slice(&o.stdout).expect("json certificate"),
    )
}

#[test]
fn check_heisenberg_example() {
    let (status, cert) = check_json(docs("case_2_3.toml").to_str().unwrap());
    assert_eq!(status, 0);
    assert!(cert.is_soliton);
    assert!((cert.c + 1.5).abs() < 1e-12);
    let diag: Vec<f64> = (0..5).map(|i| cert.derivation[i][i]).collect();
    for (d, want) in diag.iter().zip([1.0, 1.0, 2.0, 1.5, 1.5]) {
        assert!((d - want).abs() < 1e-12);
    }
    assert_eq!(cert.nilpotency_class, Some(2));
    assert_eq!(cert.center_dim, 3);
    assert_eq!(cert.tool_version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn check_unequal_weights_is_negative() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "a.toml",
        "dim = 5\nbrackets = [{i = 1, j = 2, k = 5, value = 2}, {i = 3, j = 4, k = 5, value = 1}]\n",
    );
    let (status, cert) = check_json(&p);
    assert_eq!(status, 1);
    assert!(!cert.is_soliton);
}

#[test]
fn check_abelian_is_steady() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "a.toml", "dim = 5\n");
    let (status, cert) = check_json(&p);
    assert_eq!(status, 0);
    assert_eq!(cert.c, 0.0);
    assert_eq!(cert.soliton_type, nilsoliton::soliton::SolitonType::Steady);
}

#[test]
fn invalid_inputs_exit_two() {
    let o = run(&["check", docs("not_jacobi.toml").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("Jacobi"));

    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "bad.toml",
        "dim = 3\n\n[[brackets]]\ni = 1\nj = 2\nk = 7\nvalue = 1\n",
    );
    let o = run(&["check", &p]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":6: field `k`"), "{err}");

    assert_eq!(code(&run(&["check", "/nonexistent/file.toml"])), 2);
    assert_eq!(code(&run(&["solve", "3.1"])), 2);
    assert_eq!(code(&run(&["solve", "2.4", "--gauge", "z"])), 2);
    assert_eq!(code(&run(&["solve", "2.10", "--gauge", "u"])), 2);
    assert_eq!(code(&run(&["table", "--multistarts", "0"])), 2);
    assert_eq!(code(&run(&["check", &p, "--tol", "0"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn solve_verdicts_match_table() {
    let o = run(&["solve", "2.4", "--compare", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["comparison"]["pass"], true);
    assert_eq!(v["comparison"]["found_soliton"], true);
    let p = &v["comparison"]["parameters"];
    assert!((p["v"].as_f64().unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-8);
    assert!((v["comparison"]["c"].as_f64().unwrap() + 2.0).abs() < 1e-8);

    let o = run(&["solve", "2.7", "--compare"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("no interior solution"));

    // Without --compare the comparison is omitted but still sets the status.
    let o = run(&["solve", "2.3", "--format", "json"]);
    assert_eq!(code(&o), 0);
    assert!(serde_json::from_slice::<serde_json::Value>(&o.stdout)
        .unwrap()
        .get("comparison")
        .is_none());
}

#[test]
fn solve_is_byte_identical_across_runs() {
    let a = run(&["solve", "2.6", "--seed", "7", "--format", "json"]);
    let b = run(&["solve", "2.6", "--seed", "7", "--format", "json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["solve", "2.6", "--seed", "8", "--format", "json"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn table_json_and_text_agree() {
    let j = run(&["table", "--format", "json"]);
    assert_eq!(code(&j), 0);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert_eq!(
        rows.iter().filter(|r| r["found_soliton"] == true).count(),
        7
    );
    assert!(rows.iter().all(|r| r["pass"] == true));

    let t = run(&["table"]);
    assert_eq!(code(&t), 0);
    let text = stdout(&t);
    assert_eq!(text.lines().filter(|l| l.ends_with("pass")).count(), 10);
    assert!(text.contains("10/10 rows match"));
}

#[test]
fn single_start_table_never_passes_falsely() {
    let o = run(&["table", "--multistarts", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for r in v["rows"].as_array().unwrap() {
        if r["pass"] == true && r["expected_soliton"] == true {
            assert!(r["residual"].as_f64().unwrap() <= 1e-10);
        }
    }
    let all = v["all_pass"] == true;
    assert_eq!(code(&o), if all { 0 } else { 1 });
}

#[test]
fn derivations_listing() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "ab.toml", "dim = 5\n");
    let o = run(&["derivations", &p]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("dim Der(g) = 25"));

    let o = run(&[
        "derivations",
        docs("case_2_1.toml").to_str().unwrap(),
        "--check-diag",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("d1 + d2 = d5:  1.5 + 1.5 = 3"), "{text}");
    assert!(text.contains("d3 + d4 = d5:  1.5 + 1.5 = 3"), "{text}");

    let p = write(
        &dir,
        "neg.toml",
        "dim = 5\nbrackets = [{i = 1, j = 2, k = 5, value = 2}, {i = 3, j = 4, k = 5, value = 1}]\n",
    );
    assert_eq!(code(&run(&["derivations", &p, "--check-diag"])), 1);
    assert_eq!(
        code(&run(&[
            "derivations",
            docs("not_jacobi.toml").to_str().unwrap()
        ])),
        2
    );
}

#[test]
fn soliton_derivation_lies_in_der() {
    // Case 2.6 at its soliton point.
    let dir = TempDir::new().unwrap();
    let a = 1.5f64.sqrt();
    let p = write(
        &dir,
        "c26.toml",
        &format!(
            "dim = 5\nbrackets = [{{i = 1, j = 2, k = 3, value = {a:?}}}, {{i = 1, j = 3, k = 4, value = {a:?}}}, \
             {{i = 1, j = 4, k = 5, value = 1.0}}, {{i = 2, j = 3, k = 5, value = 1.0}}]\n"
        ),
    );
    let o = run(&["derivations", &p, "--check-diag", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["projection_residual"].as_f64().unwrap() <= 1e-10);
    assert!((v["c"].as_f64().unwrap() + 2.75).abs() < 1e-10);
}

#[test]
fn certificate_round_trip_rechecks_identically() {
    let (_, cert) = check_json(docs("case_2_1.toml").to_str().unwrap());
    let text = serde_json::to_string(&cert).unwrap();
    let back: CertificateOutput = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cert);
    let again = detect_soliton(&back.algebra().unwrap(), back.tol).unwrap();
    assert_eq!(again.is_soliton, cert.is_soliton);
    assert_eq!(back.verdict_from_norms(), cert.is_soliton);
}

fn random_file() -> impl Strategy<Value = String> {
    let record = (1usize..=6, 1usize..=6, 1usize..=6, -3.0f64..3.0);
    (
        1usize..=5,
        prop::collection::vec(record, 0..5),
        any::<bool>(),
    )
        .prop_map(|(dim, recs, garble)| {
            let mut s = format!("dim = {dim}\n");
            for (i, j, k, v) in recs {
                s += &format!("[[brackets]]\ni = {i}\nj = {j}\nk = {k}\nvalue = {v:?}\n");
            }
            if garble {
                s += "oops\n";
            }
            s
        })
}

/// The exit status the tool must report for a file, computed through the
/// library.
fn expected_status(text: &str) -> i32 {
    let Ok(file) = AlgebraFile::parse(text, "x") else {
        return 2;
    };
    let Ok(alpha) = file.structure_constants() else {
        return 2;
    };
    if alpha.require_lie(1e-9).is_err() {
        return 2;
    }
    match detect_soliton(&alpha, 1e-10) {
        Ok(c) if c.is_soliton => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exit_codes_follow_validity_and_verdict(text in random_file()) {
        let dir = TempDir::new().unwrap();
        let p = write(&dir, "f.toml", &text);
        let o = run(&["check", &p, "--format", "json"]);
        let status = code(&o);
        prop_assert_eq!(status, expected_status(&text));
        if status != 2 {
            let cert: CertificateOutput = serde_json::from_slice(&o.stdout).unwrap();
            prop_assert_eq!(cert.is_soliton, status == 0);
        }
    }

    #[test]
    fn input_format_round_trips(dim in 2usize..=5, vals in prop::collection::vec(-5.0f64..5.0, 10)) {
        let alpha = StructureConstants::from_fn(dim, |i, j, k| {
            if k > j { vals[(i + 2 * j + 3 * k) % vals.len()] } else { 0.0 }
        }).unwrap();
        let file = AlgebraFile::from_algebra(Some("rt"), &alpha);
        let back = AlgebraFile::parse(&file.to_toml(), "rt").unwrap();
        prop_assert_eq!(back.structure_constants().unwrap(), alpha);
    }
}

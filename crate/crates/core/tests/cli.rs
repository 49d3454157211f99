use std::path::Path;

use regsimplex::cli::{run, EXIT_ERROR, EXIT_OK, EXIT_UNAVAILABLE, EXIT_VERIFY};
use regsimplex::simplex::SimplexEmbedding;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("regsimplex").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_seven() {
    let (code, out, _) = call(&["construct", "--dim", "7"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("n=7 edge=2 "), "{out}");
    assert!(out.contains("strategy=hadamard"));
}

#[test]
fn construct_one_gives_unit_segment() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("one.json");
    let (code, _, _) = call(&["construct", "--dim", "1", "--out", path_str(&file)]);
    assert_eq!(code, EXIT_OK);
    let s = SimplexEmbedding::load(&file).unwrap();
    let mut v = s.vertices().to_vec();
    v.sort_by(|a, b| a[0].total_cmp(&b[0]));
    assert_eq!(v, vec![vec![-0.5], vec![0.5]]);
}

#[test]
fn construct_ninety_one_beats_constant() {
    let (code, out, _) = call(&["construct", "--dim", "91"]);
    assert_eq!(code, EXIT_OK);
    let ratio: f64 = out
        .split_whitespace()
        .find_map(|t| t.strip_prefix("ratio="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(ratio > 0.5012);
    assert!(!out.contains("strategy=hadamard"));
}

#[test]
fn construct_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for n in 1..=200 {
        for (format, ext) in [("json", "json"), ("csv", "csv")] {
            if format == "csv" && n % 10 != 0 {
                continue;
            }
            let file = dir.path().join(format!("s{n}.{ext}"));
            let (code, _, err) = call(&[
                "construct",
                "--dim",
                &n.to_string(),
                "--format",
                format,
                "--out",
                path_str(&file),
            ]);
            assert_eq!(code, EXIT_OK, "construct {n}: {err}");
            let (code, out, _) = call(&["verify", "--input", path_str(&file)]);
            assert_eq!(code, EXIT_OK, "verify {n} {format}: {out}");
        }
    }
}

#[test]
fn csv_and_json_reparse_identically() {
    let dir = tempfile::tempdir().unwrap();
    let j = dir.path().join("a.json");
    let c = dir.path().join("a.csv");
    assert_eq!(
        call(&["construct", "--dim", "37", "--out", path_str(&j)]).0,
        EXIT_OK
    );
    assert_eq!(
        call(&[
            "construct",
            "--dim",
            "37",
            "--format",
            "csv",
            "--out",
            path_str(&c)
        ])
        .0,
        EXIT_OK
    );
    let a = SimplexEmbedding::load(&j).unwrap();
    let b = SimplexEmbedding::load(&c).unwrap();
    assert_eq!(a.vertices(), b.vertices());
}

fn tampered(edit: impl FnOnce(&mut Vec<Vec<f64>>)) -> (i32, String) {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    assert_eq!(
        call(&["construct", "--dim", "12", "--out", path_str(&good)]).0,
        EXIT_OK
    );
    let s = SimplexEmbedding::load(&good).unwrap();
    let mut v = s.vertices().to_vec();
    edit(&mut v);
    let bad = SimplexEmbedding::new(v, s.edge_length()).unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, bad.to_json()).unwrap();
    let (code, out, _) = call(&["verify", "--input", path_str(&path)]);
    (code, out)
}

#[test]
fn verify_flags_coordinate_outside_cube() {
    let (code, out) = tampered(|v| v[3][2] = 0.6);
    assert_eq!(code, EXIT_VERIFY);
    assert!(out.contains("containment"), "{out}");
}

#[test]
fn verify_flags_duplicated_vertex() {
    let (code, out) = tampered(|v| v[1] = v[0].clone());
    assert_eq!(code, EXIT_VERIFY);
    assert!(out.contains("regularity"), "{out}");
}

#[test]
fn verify_parse_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(call(&["verify", "--input", path_str(&path)]).0, EXIT_ERROR);
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        call(&["verify", "--input", path_str(&missing)]).0,
        EXIT_ERROR
    );
}

#[test]
fn failed_construct_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("out.json");
    let (code, out, _) = call(&[
        "construct",
        "--dim",
        "6",
        "--tol-regularity",
        "1e-30",
        "--tol-circumradius",
        "1e-30",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(code, EXIT_VERIFY, "{out}");
    assert!(!file.exists());
    let (code, _, _) = call(&[
        "construct",
        "--dim",
        "6",
        "--strategy",
        "hadamard",
        "--out",
        path_str(&file),
    ]);
    assert_ne!(code, EXIT_OK);
    assert!(!file.exists());
}

#[test]
fn bounds_output() {
    let (code, out, _) = call(&["bounds", "--dim", "7"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().next().unwrap().starts_with("constant=0.5012"));
    let row: serde_json::Value = serde_json::from_str(out.lines().nth(1).unwrap()).unwrap();
    assert_eq!(row["upper"], 2.0);
    assert_eq!(row["hadamard_gap"]["k"], 1);
    assert_eq!(row["hadamard_gap"]["value"], 2.0);

    let (_, out, _) = call(&["bounds", "--dim", "3"]);
    let row: serde_json::Value = serde_json::from_str(out.lines().nth(1).unwrap()).unwrap();
    assert!((row["fourier_refined"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-15);

    let (code, out, _) = call(&["bounds", "--from", "332", "--to", "340", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "chain").unwrap();
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 9);
    for (i, r) in rows.iter().enumerate() {
        let v: f64 = r.split(',').nth(col).unwrap().parse().unwrap();
        let n = 332.0 + i as f64;
        let want = ((336f64.sqrt() - 4.0 - 2f64.sqrt()) / 664f64.sqrt()) * n.sqrt();
        assert!((v - want).abs() < 1e-12);
    }

    assert_eq!(call(&["bounds"]).0, EXIT_ERROR);
}

#[test]
fn hadamard_dumps() {
    let (code, out, _) = call(&["hadamard", "--order", "12"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("order 12: paley1(q=11)"));
    let rows: Vec<Vec<i64>> = serde_json::from_str(out.lines().nth(1).unwrap()).unwrap();
    assert_eq!(rows.len(), 12);

    let (code, out, _) = call(&["hadamard", "--order", "2", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().nth(1).unwrap(), "[[1,1],[1,-1]]");

    let (code, out, _) = call(&["hadamard", "--order", "92"]);
    assert_eq!(code, EXIT_UNAVAILABLE);
    assert!(out.contains("unavailable"));

    let (_, out, _) = call(&["hadamard", "--order", "4", "--format", "text"]);
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sweep.csv");
    let (code, out, _) = call(&[
        "sweep",
        "--from",
        "1",
        "--to",
        "20",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("swept n=1..20"));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("n,edge_length,edge_ratio,best_lower,upper,strategy\n"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn seed_from_environment_and_flag() {
    std::env::set_var("REGSIMPLEX_SEED", "9");
    let (a, out_a, _) = call(&["construct", "--dim", "10", "--phase-grid"]);
    let (b, out_b, _) = call(&["construct", "--dim", "10", "--phase-grid", "--seed", "9"]);
    std::env::remove_var("REGSIMPLEX_SEED");
    assert_eq!((a, b), (EXIT_OK, EXIT_OK));
    assert_eq!(out_a, out_b);
    let (c, _, _) = call(&["construct", "--dim", "10", "--seed", "nope"]);
    assert_eq!(c, EXIT_ERROR);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("construct"));
}

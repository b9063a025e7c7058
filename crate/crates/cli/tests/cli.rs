use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use sparse_po2::engine::{write_file, Encoding};
use sparse_po2::{FactorConfig, Factorization, Po2Matrix};

fn po2(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_po2"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn po2");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bench_single_size_prints_one_table_row() {
    let out = po2(
        &[
            "bench", "table1", "--sizes", "2x4", "--trials", "2000", "--seed", "7",
        ],
        "",
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("N,K,Q,R,trials,snr_db,stderr_db,adds_per_entry")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // one row of the table: size 2x4 at Q = 1..=5
    assert_eq!(rows.len(), 5);
    for (q, row) in rows.iter().enumerate() {
        assert_eq!(&row[..4], &["2", "4", &(q + 1).to_string(), "1"]);
        assert!(row[4].parse::<usize>().unwrap() >= 2000);
    }
    let again = po2(
        &[
            "bench", "table1", "--sizes", "2x4", "--trials", "2000", "--seed", "7",
        ],
        "",
    );
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn apply_identity_echoes_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.po2f");
    let fact = Factorization::new(
        3,
        3,
        vec![Po2Matrix::identity(3); 2],
        FactorConfig::new(2, sparse_po2::Rate::ONE),
    )
    .unwrap();
    write_file(&path, &fact, Encoding::Binary).unwrap();
    let out = po2(&["apply", path_str(&path)], "1.5 -2\n0.125\n");
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "1.5\n-2\n0.125\n");
    assert!(stderr(&out).contains("additions 0"));
}

#[test]
fn bad_subcommand_prints_usage_and_exits_2() {
    let out = po2(&["frobnicate"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
}

#[test]
fn factorize_snr_and_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let mat = dir.path().join("m.mat");
    let gen = po2(&["gen", "4", "16", "--seed", "3"], "");
    assert!(gen.status.success());
    std::fs::write(&mat, &gen.stdout).unwrap();

    for (name, extra) in [("b.po2f", None), ("t.po2f", Some("--text"))] {
        let fact = dir.path().join(name);
        let mut args = vec![
            "factorize",
            path_str(&mat),
            "--q",
            "3",
            "--r",
            "1",
            "--out",
            path_str(&fact),
        ];
        args.extend(extra);
        let out = po2(&args, "");
        assert!(out.status.success(), "{}", stderr(&out));

        let snr = po2(&["snr", path_str(&mat), path_str(&fact)], "");
        assert!(snr.status.success());
        let db: f64 = stdout(&snr).trim().parse().unwrap();
        assert!(db > 25.0, "{db}");

        let rt = po2(&["roundtrip", path_str(&fact)], "");
        assert!(rt.status.success(), "{}", stderr(&rt));
        assert!(stdout(&rt).starts_with("ok:"));
    }
}

#[test]
fn errors_are_one_line_and_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let tall = dir.path().join("tall.mat");
    std::fs::write(&tall, "3 2\n1 2\n3 4\n5 6\n").unwrap();
    let garbage = dir.path().join("junk.po2f");
    std::fs::write(&garbage, "not a factorization").unwrap();
    let out_path = dir.path().join("x.po2f");

    let cases: Vec<(Vec<&str>, &str)> = vec![
        (
            vec![
                "factorize",
                path_str(&tall),
                "--q",
                "1",
                "--out",
                path_str(&out_path),
            ],
            "transpose",
        ),
        (vec!["roundtrip", path_str(&garbage)], "magic"),
        (vec!["apply", path_str(&garbage)], "magic"),
        (
            vec!["snr", "/no/such/file.mat", path_str(&garbage)],
            "cannot read",
        ),
    ];
    for (args, needle) in cases {
        let out = po2(&args, "");
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = stderr(&out);
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
        assert!(err.to_lowercase().contains(needle), "{err}");
    }
}

#[test]
fn apply_rejects_wrong_length() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.po2f");
    let fact = Factorization::new(
        2,
        2,
        vec![Po2Matrix::identity(2)],
        FactorConfig::new(1, sparse_po2::Rate::ONE),
    )
    .unwrap();
    write_file(&path, &fact, Encoding::Text).unwrap();
    let out = po2(&["apply", path_str(&path)], "1 2 3");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn theory_outputs() {
    let fig = po2(&["theory", "fig1"], "");
    assert!(fig.status.success());
    let text = stdout(&fig);
    assert!(text.starts_with("kind,aspect_ratio,bits\n"));
    assert!(text.contains("curve,2,2\n"));
    assert_eq!(
        text.lines().filter(|l| l.starts_with("marker,")).count(),
        13
    );

    let pred = po2(
        &["theory", "predict", "--k", "1024", "--q", "2", "--r", "1/2"],
        "",
    );
    assert!(pred.status.success());
    let text = stdout(&pred);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], &["1024", "2", "1/2", "20"]);
}

#[test]
fn fig1_from_measured_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t1.csv");
    let bench = po2(
        &[
            "bench",
            "table1",
            "--sizes",
            "2x4,3x8",
            "--q-max",
            "3",
            "--min-entries",
            "1000",
        ],
        "",
    );
    assert!(bench.status.success());
    std::fs::write(&csv, &bench.stdout).unwrap();
    let fig = po2(&["theory", "fig1", "--table1", path_str(&csv)], "");
    assert!(fig.status.success(), "{}", stderr(&fig));
    assert_eq!(
        stdout(&fig)
            .lines()
            .filter(|l| l.starts_with("marker,2,"))
            .count(),
        1
    );
}

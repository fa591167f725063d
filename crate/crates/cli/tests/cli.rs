use std::path::Path;
use std::process::{Command, Output};

use panelfact::generate::gen_spd;
use panelfact::mmio::{read_matrix, write_matrix};
use panelfact::oracle::cholesky_crout;
use panelfact::report::timed_factorize;
use panelfact::{BlockPolicy, Kind, Matrix, MulBackend, RunReport};
use panelfact_cli::{input_for, run_cell, Cell};

fn panelfact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_panelfact"))
        .args(args)
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn rows(csv_text: &[u8]) -> Vec<RunReport> {
    csv::Reader::from_reader(csv_text)
        .deserialize()
        .map(Result::unwrap)
        .collect()
}

fn write(dir: &Path, name: &str, m: &Matrix) -> String {
    let path = dir.join(name);
    write_matrix(&path, m).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn gen_is_deterministic_and_loadable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.mtx"), dir.path().join("b.mtx"));
    for out in [&a, &b] {
        let o = panelfact(&[
            "gen",
            "--kind",
            "spd",
            "--n",
            "4",
            "--seed",
            "42",
            "--out",
            p(out),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let c = dir.path().join("c.mtx");
    assert!(panelfact(&[
        "gen",
        "--kind",
        "spd",
        "--n",
        "8",
        "--seed",
        "7",
        "--out",
        p(&c)
    ])
    .status
    .success());
    let m = read_matrix(&c).unwrap();
    assert_eq!(m, gen_spd(8, 7).unwrap());
    cholesky_crout(&m).unwrap();
}

#[test]
fn gen_rejects_empty_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = panelfact(&[
        "gen",
        "--kind",
        "general",
        "--n",
        "0",
        "--out",
        p(&dir.path().join("x.mtx")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_reports_unwritable_path() {
    let o = panelfact(&[
        "gen",
        "--kind",
        "spd",
        "--n",
        "2",
        "--out",
        "/nonexistent/dir/x.mtx",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/dir/x.mtx"));
}

#[test]
fn decompose_cholesky_with_strassen_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "a.mtx", &gen_spd(64, 9).unwrap());
    let prefix = dir.path().join("f");
    let o = panelfact(&[
        "decompose",
        "--kind",
        "cholesky",
        "--input",
        &input,
        "--s",
        "8",
        "--backend",
        "strassen",
        "--depth",
        "2",
        "--seed",
        "9",
        "--out",
        p(&prefix),
        "--verify",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = &rows(&o.stdout)[0];
    assert!(r.residual_rel.unwrap() <= 1e-11);
    assert_eq!(
        (r.s, r.depth, r.seed, r.flushes),
        (Some(8), Some(2), Some(9), 7)
    );
    assert!(r.orth_rel.is_none() && r.error.is_none());

    let l = dir.path().join("f_L.mtx");
    let v = panelfact(&[
        "verify",
        "--kind",
        "cholesky",
        "--input",
        &input,
        "--factors",
        p(&l),
    ]);
    assert_eq!(
        v.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&v.stdout)
    );
}

#[test]
fn decompose_qr_identity() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "i.mtx", &Matrix::identity(6).unwrap());
    let prefix = dir.path().join("qr");
    let o = panelfact(&[
        "decompose",
        "--kind",
        "qr",
        "--input",
        &input,
        "--s",
        "2",
        "--verify",
        "--out",
        p(&prefix),
    ]);
    assert!(o.status.success());
    let r = &rows(&o.stdout)[0];
    assert!(r.orth_rel.unwrap() <= 1e-15);
    assert_eq!(r.discarded_lower_mass, Some(0.0));
    assert_eq!(
        read_matrix(dir.path().join("qr_R.mtx")).unwrap(),
        Matrix::identity(6).unwrap()
    );
}

#[test]
fn decompose_policy_exponent_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "a.mtx",
        &panelfact::generate::gen_general(20, 1).unwrap(),
    );
    let report = dir.path().join("runs.csv");
    for _ in 0..2 {
        let o = panelfact(&[
            "decompose",
            "--kind",
            "lu",
            "--input",
            &input,
            "--policy-exponent",
            "0.5",
            "--report",
            p(&report),
        ]);
        assert!(o.status.success());
    }
    let text = std::fs::read(&report).unwrap();
    let rs = rows(&text);
    assert_eq!(rs.len(), 2);
    assert_eq!(rs[0].s, Some(5));
    assert!(rs[0].residual_rel.is_none());
}

#[test]
fn numerical_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let lu_in = write(
        dir.path(),
        "z.mtx",
        &Matrix::from_rows(&[[0., 1.], [1., 0.]]).unwrap(),
    );
    let o = panelfact(&["decompose", "--kind", "lu", "--input", &lu_in, "--s", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular leading minor at column 1"));

    let ch_in = write(
        dir.path(),
        "n.mtx",
        &Matrix::from_rows(&[[1., 2.], [2., 1.]]).unwrap(),
    );
    for s in ["1", "2"] {
        let o = panelfact(&[
            "decompose",
            "--kind",
            "cholesky",
            "--input",
            &ch_in,
            "--s",
            s,
        ]);
        assert_eq!(o.status.code(), Some(3));
        assert!(String::from_utf8_lossy(&o.stderr).contains("not positive-definite at column 2"));
    }
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mtx");
    std::fs::write(
        &bad,
        "%%MatrixMarket matrix array real general\n2 2\n1\n2\n",
    )
    .unwrap();
    assert_eq!(
        panelfact(&["decompose", "--kind", "lu", "--input", p(&bad), "--s", "1"])
            .status
            .code(),
        Some(2)
    );
    let ok = write(dir.path(), "ok.mtx", &Matrix::identity(3).unwrap());
    assert_eq!(
        panelfact(&["decompose", "--kind", "lu", "--input", &ok])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        panelfact(&["decompose", "--kind", "svd", "--input", &ok, "--s", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        panelfact(&[
            "bench",
            "--kind",
            "lu",
            "--n",
            "4",
            "--repeats",
            "0",
            "--s",
            "1"
        ])
        .status
        .code(),
        Some(2)
    );
    let rect = write(dir.path(), "r.mtx", &Matrix::zeros(2, 3).unwrap());
    assert_eq!(
        panelfact(&["decompose", "--kind", "qr", "--input", &rect, "--s", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_hand_factors() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(
        dir.path(),
        "a.mtx",
        &Matrix::from_rows(&[[4., 2.], [2., 5.]]).unwrap(),
    );
    let l = Matrix::from_rows(&[[2., 0.], [1., 2.]]).unwrap();
    let good = write(dir.path(), "l.mtx", &l);
    let o = panelfact(&[
        "verify",
        "--kind",
        "cholesky",
        "--input",
        &a,
        "--factors",
        &good,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("residual_rel=0e0"));

    let mut t = l.clone();
    t[(1, 1)] += 0.1;
    let tampered = write(dir.path(), "t.mtx", &t);
    assert_eq!(
        panelfact(&[
            "verify",
            "--kind",
            "cholesky",
            "--input",
            &a,
            "--factors",
            &tampered
        ])
        .status
        .code(),
        Some(1)
    );

    let mut u = l;
    u[(0, 1)] = 0.5;
    let upper = write(dir.path(), "u.mtx", &u);
    let o = panelfact(&[
        "verify",
        "--kind",
        "cholesky",
        "--input",
        &a,
        "--factors",
        &upper,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("violations=1"));

    let wrong = write(dir.path(), "w.mtx", &Matrix::identity(3).unwrap());
    assert_eq!(
        panelfact(&[
            "verify",
            "--kind",
            "cholesky",
            "--input",
            &a,
            "--factors",
            &wrong
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn bench_grid_rows() {
    let o = panelfact(&[
        "bench",
        "--kind",
        "cholesky",
        "--n",
        "64",
        "--s",
        "8",
        "--backend",
        "classical,strassen,oracle",
        "--depth",
        "1,2",
        "--repeats",
        "3",
        "--warmup",
        "1",
        "--seed",
        "5",
        "--verify",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert_eq!(text.lines().next().unwrap(), RunReport::COLUMNS.join(","));
    let rs = rows(&o.stdout);
    assert_eq!(rs.len(), 4);
    let names: Vec<_> = rs.iter().map(|r| (r.backend.as_str(), r.depth)).collect();
    assert_eq!(
        names,
        [
            ("classical", Some(0)),
            ("strassen", Some(1)),
            ("strassen", Some(2)),
            ("oracle", None)
        ]
    );
    for r in &rs {
        assert!(r.wall_seconds >= 0.0 && r.residual_rel.unwrap() <= 1e-12);
        assert_eq!(r.seed, Some(5));
    }
    // Strassen trades multiplications for additions on the same input
    assert!(rs[1].mults < rs[0].mults && rs[2].mults < rs[1].mults);
}

#[test]
fn failed_cell_keeps_its_row() {
    let a = Matrix::from_rows(&[[0., 1.], [1., 0.]]).unwrap();
    let cell = Cell {
        kind: Kind::Lu,
        n: 2,
        policy: Some(BlockPolicy::Fixed(1)),
        backend: Some(MulBackend::Classical),
    };
    let r = run_cell(cell, &a, 3, 1, true);
    assert_eq!(
        r.error.as_deref(),
        Some("singular leading minor at column 1")
    );
    assert!(r.residual_rel.is_none());
    assert_eq!((r.kind.as_str(), r.s), ("lu", Some(1)));
}

#[test]
fn classical_repeats_are_bit_identical() {
    let a = input_for(Kind::Qr, 50, 3).unwrap();
    let runs: Vec<_> = (0..3)
        .map(|_| {
            timed_factorize(Kind::Qr, &a, &BlockPolicy::Fixed(7), MulBackend::Classical)
                .0
                .unwrap()
        })
        .collect();
    for f in &runs[1..] {
        for (x, y) in f.matrices().into_iter().zip(runs[0].matrices()) {
            assert!(x
                .as_slice()
                .iter()
                .zip(y.as_slice())
                .all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }
}

#[test]
fn bench_to_file_with_policy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let o = panelfact(&[
        "bench",
        "--kind",
        "qr",
        "--n",
        "1,6",
        "--policy-exponent",
        "0.5",
        "--repeats",
        "1",
        "--warmup",
        "0",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success());
    let rs = rows(&std::fs::read(&out).unwrap());
    assert_eq!(
        rs.iter().map(|r| r.s).collect::<Vec<_>>(),
        [Some(1), Some(3)]
    );
    assert!(rs.iter().all(|r| r.discarded_lower_mass.is_some()));
}

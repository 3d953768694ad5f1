use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hs_cli::io::{load_csv, read_draws, write_draws, Draws, DrawsFormat};
use hs_core::faer::Mat;
use hs_core::RegressionData;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use tempfile::TempDir;

fn hs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hs")).args(args).output().expect("spawn hs")
}

fn error_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr is empty");
    serde_json::from_str(line).expect("error line is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn synthetic_csv(dir: &Path, n: usize, p: usize, seed: u64) -> PathBuf {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut text: String = (0..p).map(|j| format!("x{j},")).collect();
    text.push_str("y\n");
    for _ in 0..n {
        let x: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
        let e: f64 = StandardNormal.sample(&mut rng);
        for v in &x {
            text.push_str(&format!("{v},"));
        }
        text.push_str(&format!("{}\n", 2.0 * x[0] + e));
    }
    write(dir, "data.csv", &text)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn three_by_two_file_loads_standardized() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "t.csv", "x,y\n1,2\n2,4\n3,6");
    let t = load_csv(&path).unwrap();
    assert_eq!((t.n(), t.p()), (3, 1));
    let d = RegressionData::standardized(t.x, t.y).unwrap();
    let col: Vec<f64> = (0..3).map(|i| d.x()[(i, 0)]).collect();
    assert!(col.iter().sum::<f64>().abs() < 1e-12);
    assert!((col.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn header_only_file_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "h.csv", "a,b,y\n");
    assert!(load_csv(&path).unwrap_err().message.contains("no data rows"));
    let out = hs(&["run", "--input", p(&path), "--family", "linear", "--out", p(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(error_json(&out)["error"]["message"].as_str().unwrap().contains("no data rows"));
}

#[test]
fn ragged_and_non_numeric_rows_report_locations() {
    let dir = TempDir::new().unwrap();
    let ragged = write(dir.path(), "r.csv", "a,y\n1,2\n3\n");
    assert!(load_csv(&ragged).unwrap_err().message.contains("row 3"));
    let text = write(dir.path(), "n.csv", "a,y\n1,2\nx,3\n");
    let e = load_csv(&text).unwrap_err().message;
    assert!(e.contains("row 3, column 1 (a)"), "{e}");
}

#[test]
fn minimal_run_writes_three_files_and_reruns_identically() {
    let dir = TempDir::new().unwrap();
    let input = synthetic_csv(dir.path(), 30, 4, 1);
    let run = |out: &str| {
        let out_dir = dir.path().join(out);
        let o = hs(&[
            "run", "--input", p(&input), "--family", "linear", "--burn", "50", "--keep", "120",
            "--seed", "9", "--out", p(&out_dir),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out_dir
    };
    let a = run("a");
    for f in ["draws.csv", "diagnostics.json", "run.json"] {
        assert!(a.join(f).is_file(), "missing {f}");
    }
    let draws = read_draws(&a.join("draws.csv")).unwrap();
    assert_eq!(draws.values.nrows(), 120);
    assert_eq!(draws.names, vec!["x0", "x1", "x2", "x3"]);

    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("run.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 9);
    assert_eq!(meta["config"]["n_keep"], 120);
    let hash = hs_cli::io::content_hash(&fs::read(&input).unwrap());
    assert_eq!(meta["input"]["content_hash"], hash.as_str());

    let b = run("b");
    assert_eq!(fs::read(a.join("draws.csv")).unwrap(), fs::read(b.join("draws.csv")).unwrap());
}

#[test]
fn invalid_family_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let input = synthetic_csv(dir.path(), 10, 2, 2);
    let out = hs(&["run", "--input", p(&input), "--family", "poisson", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = error_json(&out);
    assert_eq!(err["error"]["kind"], "usage");
    assert_eq!(err["error"]["exit_code"], 2);
}

#[test]
fn negbin_requires_dispersion() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "c.csv", "x,y\n0.1,1\n0.5,0\n-0.2,3\n");
    let out = hs(&["run", "--input", p(&input), "--family", "negbin", "--out", p(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let out = hs(&[
        "run", "--input", p(&input), "--family", "linear", "--h", "2", "--out", p(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn glm_families_run_with_intercept_column() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "c.csv", "x,y\n0.1,1\n0.5,0\n-0.2,3\n1.0,2\n-1.0,0\n");
    let out_dir = dir.path().join("nb");
    let o = hs(&[
        "run", "--input", p(&input), "--family", "negbin", "--h", "2", "--burn", "10", "--keep", "20",
        "--out", p(&out_dir),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_draws(&out_dir.join("draws.csv")).unwrap().names, vec!["(Intercept)", "x"]);

    // counts are not a binary response
    let o = hs(&["run", "--input", p(&input), "--family", "logistic", "--out", p(&out_dir)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn overflowing_design_is_numerical_error() {
    let dir = TempDir::new().unwrap();
    let input = write(dir.path(), "b.csv", "x,y\n1e200,1\n-2e200,0\n3e200,1\n-1e200,0\n");
    let o = hs(&[
        "run", "--input", p(&input), "--family", "logistic", "--burn", "5", "--keep", "5",
        "--out", p(&dir.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_json(&o)["error"]["kind"], "numerical");
}

#[test]
fn flags_beat_config_file_beat_defaults() {
    let dir = TempDir::new().unwrap();
    let input = synthetic_csv(dir.path(), 20, 2, 3);
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"family": "linear", "burn": 7, "keep": 30, "seed": 5, "format": "binary"}"#,
    );
    let out_dir = dir.path().join("o");
    let o = hs(&[
        "run", "--input", p(&input), "--config", p(&cfg), "--keep", "25", "--out", p(&out_dir),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("run.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["n_keep"], 25);
    assert_eq!(meta["config"]["n_burn"], 7);
    assert_eq!(meta["seed"], 5);
    assert_eq!(meta["config"]["thin"], 1);
    assert!(meta["config_file"]["content_hash"].is_string());
    assert_eq!(read_draws(&out_dir.join("draws.bin")).unwrap().values.nrows(), 25);

    let bad = write(dir.path(), "bad.json", r#"{"burnin": 7}"#);
    let o = hs(&["run", "--input", p(&input), "--config", p(&bad), "--family", "linear", "--out", p(&out_dir)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn draws_round_trip_bit_identically_in_both_formats() {
    let dir = TempDir::new().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let mut values = Mat::from_fn(37, 3, |_, _| StandardNormal.sample(&mut rng));
    values[(0, 0)] = f64::MIN_POSITIVE;
    values[(1, 1)] = -1e-310;
    values[(2, 2)] = f64::MAX;
    values[(3, 0)] = -0.0;
    let draws = Draws { names: vec!["a".into(), "b b".into(), "\u{3b2}".into()], values };
    for format in [DrawsFormat::Csv, DrawsFormat::Binary] {
        let path = dir.path().join(format.file_name());
        write_draws(&path, &draws, format).unwrap();
        let back = read_draws(&path).unwrap();
        assert_eq!(back.names, draws.names);
        for j in 0..3 {
            for i in 0..37 {
                assert_eq!(back.values[(i, j)].to_bits(), draws.values[(i, j)].to_bits());
            }
        }
    }
    let bin = fs::read(dir.path().join("draws.bin")).unwrap();
    assert_eq!(&bin[..8], b"HSDRAWS1");
    assert_eq!(u32::from_le_bytes(bin[8..12].try_into().unwrap()), 37);
    assert_eq!(u32::from_le_bytes(bin[12..16].try_into().unwrap()), 3);
}

#[test]
fn ess_report_has_five_rows_per_coefficient() {
    let dir = TempDir::new().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let values = Mat::from_fn(3200, 2, |_, _| StandardNormal.sample(&mut rng));
    let path = dir.path().join("iid.csv");
    write_draws(&path, &Draws { names: vec!["u".into(), "v".into()], values }, DrawsFormat::Csv).unwrap();
    let out = dir.path().join("ess.csv");
    let o = hs(&["ess", "--draws", p(&path), "--thin", "1,2,4,8,16", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 10);
    for name in ["u", "v"] {
        assert_eq!(rows.iter().filter(|r| r[0] == name).count(), 5);
    }
    for r in &rows {
        let n_draws: f64 = r[2].parse().unwrap();
        let prop: f64 = r[4].parse().unwrap();
        assert!((prop - 1.0).abs() < 10.0 / n_draws.sqrt(), "{r:?}");
    }
}

#[test]
fn malformed_draws_file_is_data_error() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "d.csv", "a,b\n1,2\n3,x\n");
    let o = hs(&["ess", "--draws", p(&path), "--out", p(&dir.path().join("e.csv"))]);
    assert_eq!(o.status.code(), Some(3));
    let bin = dir.path().join("t.bin");
    fs::write(&bin, b"HSDRAWS1\x05\x00\x00\x00").unwrap();
    let o = hs(&["ess", "--draws", p(&bin), "--out", p(&dir.path().join("e.csv"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bench_small_grid() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t.csv");
    let o = hs(&[
        "bench", "--n", "10,100", "--p", "10,100", "--reps", "1", "--iterations", "50", "--out", p(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,p=10,p=100"));
    let cells: Vec<f64> = lines
        .flat_map(|l| l.split(',').skip(1).map(|v| v.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .collect();
    assert_eq!(cells.len(), 4);
    assert!(cells.iter().all(|&t| t > 0.0 && t.is_finite()));
}

#[test]
fn bench_cost_grows_with_p() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t.csv");
    let o = hs(&["bench", "--n", "10", "--p", "10,1000", "--reps", "3", "--iterations", "200", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert!(row[1] > row[0], "{row:?}");
}

#[test]
fn evidence_writes_estimate_and_rejects_horseshoe_plus() {
    let dir = TempDir::new().unwrap();
    let input = synthetic_csv(dir.path(), 25, 2, 6);
    let out = dir.path().join("ev.json");
    let o = hs(&["evidence", "--input", p(&input), "--burn", "100", "--keep", "300", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let total: f64 = v["ordinate_breakdown"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["value"].as_f64().unwrap())
        .sum();
    assert!((total - v["log_marginal"].as_f64().unwrap()).abs() < 1e-9);
    assert!(v["std_error"].as_f64().unwrap() > 0.0);

    let o = hs(&[
        "evidence", "--input", p(&input), "--prior", "horseshoe_plus", "--out", p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert_eq!(hs(&["--help"]).status.code(), Some(0));
    assert_eq!(hs(&["--version"]).status.code(), Some(0));
    assert_eq!(hs(&[]).status.code(), Some(2));
}

use std::path::Path;
use std::process::{Command, Output};

fn cubeconc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubeconc"))
        .args(args)
        .env_remove("CUBECONC_MAX_N")
        .output()
        .expect("binary runs")
}

fn data_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap();
    reader.records().map(Result::unwrap).collect()
}

fn column(path: &Path, name: &str) -> usize {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap();
    reader
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .unwrap()
}

#[test]
fn uniform_inductive_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let o = cubeconc(&[
        "sweep",
        "--kind",
        "product",
        "--n",
        "8",
        "--p0",
        "0.5",
        "--y",
        "sample:32",
        "--t",
        "0.25:2:0.25",
        "--checks",
        "inductive",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let header = std::fs::read_to_string(&out).unwrap();
    assert!(header.starts_with("# schema=1 rng=ChaCha8Rng generated="));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 256);
    let status = column(&out, "status");
    assert!(rows.iter().all(|r| &r[status] == "ok"));
}

#[test]
fn delta_mix_tail_is_not_a_failure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("tail.csv");
    let o = cubeconc(&[
        "sweep",
        "--kind",
        "delta_mix",
        "--n",
        "12",
        "--mix-eps",
        "0",
        "--y",
        "000000000000",
        "--t",
        "1",
        "--checks",
        "tail",
        "--c",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let rows = data_rows(&out);
    let status = column(&out, "status");
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][status], "expected-nonconcentration");
}

#[test]
fn spec_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"kind": "markov", "n": 5, "seed": 3, "initial_p0": 0.5, "t": "0.5,1",
            "checks": ["set", "smallvar"], "sets": "random:2"}"#,
    )
    .unwrap();
    let from_spec = cubeconc(&["sweep", "--spec", spec.to_str().unwrap()]);
    let from_flags = cubeconc(&[
        "sweep",
        "--kind",
        "markov",
        "--n",
        "5",
        "--seed",
        "3",
        "--initial-p0",
        "0.5",
        "--t",
        "0.5,1",
        "--checks",
        "set,smallvar",
        "--sets",
        "random:2",
    ]);
    assert!(from_spec.status.success() && from_flags.status.success());
    let body = |o: &Output| {
        String::from_utf8(o.stdout.clone())
            .unwrap()
            .lines()
            .skip(1)
            .map(str::to_string)
            .collect::<Vec<_>>()
    };
    assert_eq!(body(&from_spec), body(&from_flags));
    assert!(body(&from_spec).len() > 1);
}

#[test]
fn gen_then_eval_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("mu.json");
    let o = cubeconc(&[
        "gen",
        "--kind",
        "dense",
        "--n",
        "4",
        "--seed",
        "9",
        "--out",
        dist.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = cubeconc(&[
        "eval",
        "--dist",
        dist.to_str().unwrap(),
        "--check",
        "inductive",
        "--y",
        "0110",
        "--t",
        "1",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("check: inductive"));
    assert!(text.contains("status: ok"));
}

#[test]
fn alpha_and_mc_subcommands() {
    let o = cubeconc(&["alpha", "--kind", "product", "--n", "2", "--p0", "0.5"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("eps=1 alpha=0e0 exact"), "{text}");

    let o = cubeconc(&[
        "mc",
        "--kind",
        "dense",
        "--n",
        "6",
        "--seed",
        "2",
        "--y",
        "000111",
        "--c",
        "1",
        "--samples",
        "20000",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("covered: true"), "{text}");
}

#[test]
fn bad_input_exits_with_error() {
    let o = cubeconc(&[
        "sweep",
        "--kind",
        "dense",
        "--n",
        "3",
        "--t",
        "-1",
        "--checks",
        "inductive",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = cubeconc(&[
        "eval",
        "--kind",
        "dense",
        "--n",
        "3",
        "--check",
        "inductive",
        "--t",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn capacity_override_is_honored() {
    let o = Command::new(env!("CARGO_BIN_EXE_cubeconc"))
        .args([
            "sweep", "--kind", "product", "--n", "6", "--t", "1", "--checks", "count",
        ])
        .env("CUBECONC_MAX_N", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("count"));
}

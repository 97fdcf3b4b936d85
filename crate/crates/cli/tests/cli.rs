use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn qdtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdtree")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn train(dir: &Path, file: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(file);
    let (d, sc) = (data("toy.data"), data("toy.schema"));
    let mut args = vec!["train", "--data", s(&d), "--schema", s(&sc), "--out", s(&out)];
    args.extend_from_slice(extra);
    let o = qdtree(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn train_reports_nodes_and_writes_a_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.tree");
    let o = qdtree(&[
        "train", "--data", s(&data("car.data")), "--schema", s(&data("car.schema")),
        "--height", "3", "--backend", "exhaustive", "--out", s(&out),
    ]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("nodes 25\n"), "{stdout}");
    assert!(stdout.contains("elapsed "));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("twoing-tree 1\ndataset car\nbackend exhaustive\n"));
}

#[test]
fn qaoa_tree_carries_run_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = train(dir.path(), "q.tree", &["--height", "3", "--backend", "qaoa", "--p", "5", "--shots", "1024", "--seed", "42"]);
    let text = fs::read_to_string(out).unwrap();
    for line in ["backend qaoa", "p 5", "shots 1024", "seed 42", "calibration grid 16", "rng chacha8"] {
        assert!(text.lines().any(|l| l == line), "missing `{line}`");
    }
    assert_eq!(text.lines().find(|l| l.starts_with("gammas")).unwrap().split(' ').count(), 6);
}

#[test]
fn missing_schema_exits_2_naming_the_path() {
    let o = qdtree(&["train", "--data", s(&data("car.data")), "--schema", "/no/such/car.schema", "--height", "3", "--out", "/tmp/x.tree"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/car.schema"));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(qdtree(&["train", "--height", "three"]).status.code(), Some(2));
    assert_eq!(qdtree(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.tree");
    let o = qdtree(&["train", "--data", s(&data("toy.data")), "--schema", s(&data("toy.schema")), "--height", "0", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn compare_identical_and_different_trees() {
    let dir = tempfile::tempdir().unwrap();
    let deep = train(dir.path(), "deep.tree", &["--height", "3"]);
    let shallow = train(dir.path(), "shallow.tree", &["--height", "1"]);

    let o = qdtree(&["compare", s(&deep), s(&deep), "--require-equal"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("q 1.000000\n"));

    let o = qdtree(&["compare", s(&deep), s(&shallow)]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("mismatch /weight=<: reference colour multiway vs candidate leaf apple"), "{text}");

    let o = qdtree(&["compare", s(&deep), s(&shallow), "--require-equal"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compare_rejects_other_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let toy = train(dir.path(), "toy.tree", &["--height", "2"]);
    let car = dir.path().join("car.tree");
    qdtree(&["train", "--data", s(&data("car.data")), "--schema", s(&data("car.schema")), "--height", "2", "--out", s(&car)]);
    let o = qdtree(&["compare", s(&toy), s(&car)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));
}

#[test]
fn compare_reports_parse_errors_with_lines() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tree");
    fs::write(&bad, "twoing-tree 1\ndataset x\nbackend magic\n").unwrap();
    let o = qdtree(&["compare", s(&bad), s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn predict_reproduces_training_labels() {
    let dir = tempfile::tempdir().unwrap();
    let tree = train(dir.path(), "full.tree", &["--height", "12"]);
    let o = qdtree(&["predict", "--tree", s(&tree), "--data", s(&data("toy.data"))]);
    assert!(o.status.success());
    let want: Vec<String> = fs::read_to_string(data("toy.data"))
        .unwrap()
        .lines()
        .map(|l| l.rsplit(',').next().unwrap().to_string())
        .collect();
    let got: Vec<String> = String::from_utf8(o.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(got, want);
}

#[test]
fn predict_accepts_rows_without_class_and_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let tree = train(dir.path(), "two.tree", &["--height", "2"]);
    let rows = dir.path().join("rows.csv");
    fs::write(&rows, "yellow,119\ngreen,205\n").unwrap();
    let o = qdtree(&["predict", "--tree", s(&tree), "--data", s(&rows)]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "banana\npear\n");

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let o = qdtree(&["predict", "--tree", s(&tree), "--data", s(&empty)]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn predict_checks_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let tree = train(dir.path(), "t.tree", &["--height", "1"]);
    let o = qdtree(&["predict", "--tree", s(&tree), "--data", s(&data("toy.data")), "--schema", s(&data("car.schema"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = qdtree(&["predict", "--tree", s(&tree), "--data", s(&data("car.data"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn leaf_only_tree_predicts_a_constant() {
    let dir = tempfile::tempdir().unwrap();
    let schema = dir.path().join("one.schema");
    let rows = dir.path().join("one.data");
    fs::write(&schema, "attribute a categorical x y\nclass c p q\n").unwrap();
    fs::write(&rows, "x,q\ny,q\n").unwrap();
    let tree = dir.path().join("leaf.tree");
    let o = qdtree(&["train", "--data", s(&rows), "--schema", s(&schema), "--height", "4", "--out", s(&tree)]);
    assert!(o.status.success());
    assert!(fs::read_to_string(&tree).unwrap().ends_with("nodes 1\nnode 0 leaf label=q\n"));
    let o = qdtree(&["predict", "--tree", s(&tree), "--data", s(&rows)]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "q\nq\n");
}

#[test]
fn repeated_training_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--height", "5", "--backend", "qaoa", "--seed", "7", "--split-mode", "binary"];
    let a = fs::read(train(dir.path(), "a.tree", &args)).unwrap();
    let b = fs::read(train(dir.path(), "b.tree", &[&args[..], &["--jobs", "4"]].concat())).unwrap();
    assert_eq!(a, b);
}

#[test]
fn experiment_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("toy.toml");
    fs::write(
        &spec,
        format!(
            "name = \"toy\"\ndata = \"{}\"\nschema = \"{}\"\nheights = [1, 2, 3]\n[qaoa]\np = 3\n",
            s(&data("toy.data")),
            s(&data("toy.schema"))
        ),
    )
    .unwrap();
    let trees = dir.path().join("trees");
    let csv = dir.path().join("out.csv");
    let o = qdtree(&["experiment", s(&spec), "--out", s(&trees), "--csv", s(&csv), "--require-equal"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().count(), 4);
    assert!(table.lines().skip(1).all(|l| l.contains("1.000000")));
    assert_eq!(fs::read_dir(&trees).unwrap().count(), 6);
    assert!(trees.join("toy-h2-qaoa.tree").exists());
    let csv = fs::read_to_string(csv).unwrap();
    assert!(csv.starts_with("dataset,h,q,B,B_eq,nodes_qaoa,t_exh_s,t_qaoa_s,error\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn experiment_rows_fail_without_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = qdtree(&["experiment", "car", "--data-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().filter(|l| l.contains("error:")).count(), 3);
    let o = qdtree(&["experiment", "car", "--data-dir", s(dir.path()), "--require-equal"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(qdtree(&["experiment", "no-such-preset"]).status.code(), Some(2));
}

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use awe::graph::{complete, cycle, save_edge_list_dir, GraphCollection};
use serde_json::Value;

/// Split `line` on whitespace; each `@` takes the next path.
fn argv(line: &str, paths: &[&Path]) -> Vec<OsString> {
    let mut paths = paths.iter();
    line.split_whitespace()
        .map(|w| match w {
            "@" => paths.next().expect("missing path").into(),
            w => w.into(),
        })
        .collect()
}

fn awe(line: &str, paths: &[&Path]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_awe"))
        .args(argv(line, paths))
        .output()
        .expect("run awe")
}

fn ok(line: &str, paths: &[&Path]) -> String {
    let out = awe(line, paths);
    assert!(
        out.status.success(),
        "awe {line} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// 10 cycles and 10 complete graphs on 8..12 nodes.
fn cycles_and_cliques(dir: &Path) -> PathBuf {
    let mut graphs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..10 {
        graphs.push(cycle(8 + i % 5).unwrap());
        labels.push(0);
        graphs.push(complete(8 + i % 5).unwrap());
        labels.push(1);
    }
    let path = dir.join("toy");
    save_edge_list_dir(
        &GraphCollection::from_labeled("toy", graphs, labels).unwrap(),
        &path,
    )
    .unwrap();
    path
}

#[test]
fn enumerate_counts() {
    assert_eq!(ok("enumerate --l 7", &[]).lines().count(), 877);
    assert_eq!(ok("enumerate --l 1", &[]), "1 2\n");
    let three = ok("enumerate --l 3", &[]);
    let lines: Vec<&str> = three.lines().collect();
    assert_eq!(lines, ["1 2 1 2", "1 2 1 3", "1 2 3 1", "1 2 3 2", "1 2 3 4"]);
    assert_eq!(awe("enumerate --l 17", &[]).status.code(), Some(2));
}

#[test]
fn enumerate_to_file_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vocab.txt");
    ok("enumerate --l 4 --out @", &[&out]);
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 15);
    assert_eq!(
        json(&dir.path().join("vocab.txt.manifest.json"))["parameters"]["eta"],
        15
    );
}

#[test]
fn sampled_embedding_records_sample_count() {
    let dir = tempfile::tempdir().unwrap();
    let data = cycles_and_cliques(dir.path());
    let out = dir.path().join("fb");
    let stdout = ok(
        "embed-fb --dataset @ --l 7 --eps 0.5 --delta 0.05 --out @",
        &[&data, &out],
    );
    assert!(stdout.contains("m=4888"));
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["parameters"]["samples"]["7"], 4888);
    assert!(out.join("fb_l7.csv").exists() && out.join("fb_l7.json").exists());
}

#[test]
fn exact_mode_cost_guard() {
    let dir = tempfile::tempdir().unwrap();
    let graphs = vec![complete(40).unwrap(), cycle(5).unwrap()];
    let data = dir.path().join("dense");
    save_edge_list_dir(
        &GraphCollection::from_labeled("d", graphs, vec![0, 1]).unwrap(),
        &data,
    )
    .unwrap();
    let out = dir.path().join("x");
    let r = awe("embed-fb --dataset @ --mode exact --l 12 --out @", &[&data, &out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("sampled mode"));
    assert!(!out.exists());
}

#[test]
fn sampled_embedding_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = cycles_and_cliques(dir.path());
    let run = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let line =
            format!("--threads {threads} embed-fb --dataset @ --l 3,5 --samples 70000 --seed 4 --out @");
        ok(&line, &[&data, &out]);
        (
            std::fs::read(out.join("fb_l5.csv")).unwrap(),
            std::fs::read(out.join("fb_l3.json")).unwrap(),
        )
    };
    let a = run("a", "1");
    assert_eq!(a, run("b", "1"));
    assert_eq!(a, run("c", "2"));
}

#[test]
fn data_driven_defaults_and_zero_epochs() {
    let dir = tempfile::tempdir().unwrap();
    let data = cycles_and_cliques(dir.path());
    let out = dir.path().join("dd");
    ok("embed-dd --dataset @ --epochs 0 --seed 3 --out @", &[&data, &out]);
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["parameters"]["d_a"], 128);
    assert_eq!(m["parameters"]["d_g"], 128);
    assert_eq!(m["parameters"]["l"], 10);
    assert_eq!(m["parameters"]["train"]["window"], 4);

    let written = awe::export::EmbeddingMatrix::read_csv(&out.join("dd.csv")).unwrap();
    let mut init = awe::rng::stream(3, &[0]);
    awe::train::WalkModel::init(115_975, 128, 128, &mut init);
    let graphs = awe::train::GraphVectors::init(20, 128, &mut init);
    assert_eq!(written.rows, graphs.to_rows());
    assert!(out.join("model.bin").exists());
}

#[test]
fn data_driven_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = cycles_and_cliques(dir.path());
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(
            "--threads 1 embed-dd --dataset @ --l 5 --window 2 --walks-per-node 10 --epochs 2 \
             --iterations 10 --batch 20 --walk-dim 8 --graph-dim 8 --sampler loguniform --out @",
            &[&data, &out],
        );
        (
            std::fs::read(out.join("dd.csv")).unwrap(),
            std::fs::read(out.join("model.bin")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn window_longer_than_sequences_is_rejected_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let data = cycles_and_cliques(dir.path());
    let out = dir.path().join("dd");
    let r = awe("embed-dd --dataset @ --window 16 --out @", &[&data, &out]);
    assert_eq!(r.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn classify_separable_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = cycles_and_cliques(dir.path());
    let fb = dir.path().join("fb");
    ok("embed-fb --dataset @ --mode exact --l 4 --out @", &[&data, &fb]);
    let emb = fb.join("fb_l4.csv");
    let run = |name: &str| {
        let report = dir.path().join(name);
        let stdout = ok(
            "--threads 1 classify --embeddings @ --dataset @ --folds 5 --repeats 2 \
             --kernel inner,rbf --sigma 0.1,1 --out @",
            &[&emb, &data, &report],
        );
        assert!(stdout.contains("100.00%"));
        std::fs::read(&report).unwrap()
    };
    let a = run("r1.json");
    assert_eq!(a, run("r2.json"));
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["mean"], 1.0);
    assert_eq!(v["folds"].as_array().unwrap().len(), 10);
    assert!(dir.path().join("r1.json.manifest.json").exists());
}

#[test]
fn classify_missing_labels_fails_first() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let r = awe(
        "classify --embeddings does-not-exist.csv --labels @ --out @",
        &[&dir.path().join("nope.txt"), &report],
    );
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("labels"));
    assert!(!report.exists());
}

#[test]
fn bad_flags_exit_with_two() {
    let fancy = awe("embed-fb --dataset x --mode fancy --out y", &[]);
    assert_eq!(fancy.status.code(), Some(2));
    assert_eq!(awe("enumerate", &[]).status.code(), Some(2));
    assert_eq!(awe("--threads 0 enumerate --l 2", &[]).status.code(), Some(2));
}

#[test]
fn dataset_found_through_env_var() {
    let dir = tempfile::tempdir().unwrap();
    cycles_and_cliques(dir.path());
    let out = dir.path().join("fb");
    let r = Command::new(env!("CARGO_BIN_EXE_awe"))
        .env("AWE_DATA_DIR", dir.path())
        .args(argv("embed-fb --dataset toy --mode exact --l 2 --out @", &[&out]))
        .output()
        .unwrap();
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(out.join("fb_l2.csv").exists());
}

#[test]
fn scalability_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sc");
    ok(
        "scalability --sizes 10,100 --mu 2 --reps 2 --l 4 --window 2 --walks-per-node 5 \
         --iterations 5 --dim 8 --out @",
        &[&out],
    );
    let csv = std::fs::read_to_string(out.join("timings.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("n,mu,mean_seconds,std_seconds"));
    assert_eq!(csv.lines().count(), 3);
    let plot = json(&out.join("plot.json"));
    assert_eq!(plot["x_scale"], "log");
    assert_eq!(plot["series"].as_array().unwrap().len(), 1);
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bandgen(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandgen"))
        .args(args)
        .current_dir(dir)
        .env_remove("BANDGEN_SEED")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = bandgen(dir, args);
    assert!(out.status.success(), "bandgen {args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const SMALL: &str = "hidden = 8\nmlp_hidden = 8\ngru_layers = 1\nepochs = 2\nbatches_per_epoch = 2\nbatch_size = 4\n";

fn grids(dir: &Path) {
    let mut text = String::new();
    for (r, c) in [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4), (4, 4)] {
        let mut edges = Vec::new();
        for i in 0..r {
            for j in 0..c {
                let v = i * c + j;
                if j + 1 < c {
                    edges.push(format!("[{v},{}]", v + 1));
                }
                if i + 1 < r {
                    edges.push(format!("[{v},{}]", v + c));
                }
            }
        }
        text.push_str(&format!("{{\"n\":{},\"edges\":[{}]}}\n", r * c, edges.join(",")));
    }
    fs::write(dir.join("grids.jsonl"), text).unwrap();
    fs::write(dir.join("small.toml"), SMALL).unwrap();
}

#[test]
fn reorder_cycle_prints_bandwidths_and_graymap() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("c6.jsonl"), "{\"n\":6,\"edges\":[[0,1],[1,2],[2,3],[3,4],[4,5],[0,5]]}\n").unwrap();
    let out = ok(d, &["reorder", "--in", "c6.jsonl", "--pgm", "c6.pgm"]);
    assert_eq!(out.trim(), "bandwidth: 5 -> 2");
    let img = fs::read(d.join("c6.pgm")).unwrap();
    let text = String::from_utf8_lossy(&img[..91]);
    assert!(text.starts_with("P5\n# config_hash: "));
    assert!(text.contains("\n6 6\n255\n"));
    assert_eq!(ok(d, &["reorder", "--in", "c6.jsonl", "--before", "bfs"]).trim(), "bandwidth: 2 -> 2");
}

#[test]
fn grid_corpus_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["dataset", "--kind", "grid2d", "--seed", "3", "--out", "grid.jsonl"]);
    assert_eq!(fs::read_to_string(d.join("grid.jsonl")).unwrap().lines().count(), 66);
    let meta = json(&d.join("grid.jsonl.meta.json"));
    assert_eq!(meta["graphs"], 66);
    ok(d, &["report", "--in", "grid.jsonl", "--order", "cm", "--seed", "3", "--out", "report.tsv"]);
    let report = fs::read_to_string(d.join("report.tsv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert!(lines[0].starts_with("# config_hash: "));
    assert_eq!(lines[1].split('\t').count(), 8);
    let row: Vec<&str> = lines[2].split('\t').collect();
    assert_eq!(row[0], "grid");
    let bw_mean: f64 = row[3].parse().unwrap();
    let bw_max: usize = row[7].parse().unwrap();
    assert!((10.0..=21.0).contains(&bw_mean) && bw_max <= 21);
}

#[test]
fn dataset_split_writes_three_parts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["dataset", "--kind", "grid2d", "--out", "g.jsonl", "--split", "0.6,0.2,0.2"]);
    let count = |f: &str| fs::read_to_string(d.join(f)).unwrap().lines().count();
    assert_eq!((count("g.train.jsonl"), count("g.val.jsonl"), count("g.test.jsonl")), (40, 13, 13));
    assert!(d.join("g.test.jsonl.meta.json").exists());
}

#[test]
fn self_evaluation_is_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["dataset", "--kind", "community2", "--count", "12", "--out", "c.jsonl"]);
    ok(d, &["eval", "--test", "c.jsonl", "--generated", "c.jsonl", "--out", "e.json"]);
    let e = json(&d.join("e.json"));
    assert!(e["mmd"]["mean"].as_f64().unwrap() < 1e-12);
    assert_eq!(e["f1_pr"]["f1"], 1.0);
    assert!(e["auprc"].is_null() && e["mean_ll"].is_null());
    assert_eq!(e["config_echo"]["sigma_orbit"], 30.0);
    assert_eq!(e["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn train_sample_eval_round() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    grids(d);
    ok(d, &["--config", "small.toml", "train", "--data", "grids.jsonl", "--out", "m.json", "--temp-grid", "0.5,1"]);
    let ck = json(&d.join("m.json"));
    assert_eq!(ck["row_width"], 5);
    assert!(ck["config_hash"].is_string());
    let t = ck["config"]["temperature"].as_f64().unwrap();
    assert!(t == 0.5 || t == 1.0);

    ok(d, &["sample", "--ckpt", "m.json", "--count", "7", "--seed", "2", "--out", "s1.jsonl"]);
    ok(d, &["--workers", "3", "sample", "--ckpt", "m.json", "--count", "7", "--seed", "2", "--out", "s2.jsonl"]);
    assert_eq!(fs::read(d.join("s1.jsonl")).unwrap(), fs::read(d.join("s2.jsonl")).unwrap());
    assert_eq!(json(&d.join("s1.jsonl.meta.json"))["graphs"], 7);

    ok(d, &["eval", "--ckpt", "m.json", "--test", "grids.jsonl", "--out", "e.json"]);
    let e = json(&d.join("e.json"));
    let auprc = e["auprc"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&auprc));
    assert!(e["mean_ll"].as_f64().unwrap() < 0.0);
    assert_eq!(e["generated"], 6);
}

#[test]
fn hyperopt_reports_best_trial() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    grids(d);
    ok(d, &["--config", "small.toml", "hyperopt", "--data", "grids.jsonl", "--val", "grids.jsonl", "--trials", "2", "--out", "h.json"]);
    let h = json(&d.join("h.json"));
    let trials = h["search"]["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 2);
    let best = h["search"]["best"].as_u64().unwrap() as usize;
    let min = trials.iter().map(|t| t["objective"].as_f64().unwrap()).fold(f64::INFINITY, f64::min);
    assert_eq!(trials[best]["objective"].as_f64().unwrap(), min);
}

#[test]
fn config_file_beats_flags_and_env_is_last_resort() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("seed.toml"), "seed = 5\n").unwrap();
    let hash_of = |args: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_bandgen"));
        cmd.args(args).current_dir(d).env_remove("BANDGEN_SEED");
        if let Some(s) = env {
            cmd.env("BANDGEN_SEED", s);
        }
        assert!(cmd.output().unwrap().status.success());
        json(&d.join("x.jsonl.meta.json"))
    };
    let base = ["dataset", "--kind", "community2", "--count", "3", "--out", "x.jsonl"];
    let file_wins = hash_of(&[&["--config", "seed.toml"], &base[..], &["--seed", "9"]].concat(), Some("7"));
    assert_eq!(file_wins["config_echo"]["seed"], 5);
    let flag_wins = hash_of(&[&base[..], &["--seed", "9"]].concat(), Some("7"));
    assert_eq!(flag_wins["config_echo"]["seed"], 9);
    let env_only = hash_of(&base, Some("7"));
    assert_eq!(env_only["config_echo"]["seed"], 7);
    assert_ne!(env_only["config_hash"], flag_wins["config_hash"]);
}

#[test]
fn errors_are_single_categorized_lines() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.toml"), "hiden = 3\n").unwrap();
    fs::write(d.join("bad.jsonl"), "{\"n\":2,\"edges\":[[1,0]]}\n").unwrap();
    fs::write(d.join("runs.tsv"), "dataset\tsavings\tdelta_ll\na\t1\t2\nb\t2\t3\n").unwrap();
    let cases: [(&[&str], &str, i32); 5] = [
        (&["dataset", "--kind", "lattice", "--out", "x"], "input", 2),
        (&["--config", "bad.toml", "dataset", "--out", "x"], "format", 3),
        (&["report", "--in", "bad.jsonl", "--out", "r.tsv"], "format", 3),
        (&["report", "--in", "missing.jsonl", "--out", "r.tsv"], "io", 6),
        (&["correlate", "--in", "runs.tsv"], "input", 2),
    ];
    for (args, category, code) in cases {
        let out = bandgen(d, args);
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(out.status.code(), Some(code), "{args:?}: {err}");
        assert_eq!(err.lines().count(), 1, "{err}");
        assert!(err.starts_with(&format!("error[{category}]: ")), "{err}");
    }
}

#[test]
fn band_overflow_is_a_capability_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    grids(d);
    let out = bandgen(d, &["--config", "small.toml", "train", "--data", "grids.jsonl", "--row-width", "2", "--out", "m.json"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[capability]: "));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boxclust"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = run(args, dir);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn cut_labels(text: &str) -> Vec<(String, i64)> {
    text.lines()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn empty_input_gives_empty_output() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "e.csv", "");
    assert_eq!(ok(&["cluster", "e.csv", "--eps", "1"], dir.path()), "");
}

#[test]
fn huge_eps_makes_one_cluster() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "p.csv", "x,y\n0,0\n5,1\n-3,2\n");
    let out = ok(&["cluster", "p.csv", "--eps", "1e6", "--min-pts", "1"], dir.path());
    assert_eq!(out, "0,core,0\n1,core,0\n2,core,0\n");
}

#[test]
fn modes_and_pair_checks_agree() {
    let dir = TempDir::new().unwrap();
    ok(&["gen", "--per-cluster", "300", "--seed", "5", "--output", "g.csv"], dir.path());
    for eps in ["8", "25", "60"] {
        for variant in ["dbscan", "dbscan-star"] {
            let base = ok(&["cluster", "g.csv", "--eps", eps, "--variant", variant], dir.path());
            for (mode, check) in [("strip", "brute"), ("strip", "delaunay"), ("grid", "delaunay")] {
                let other = ok(
                    &["cluster", "g.csv", "--eps", eps, "--variant", variant, "--mode", mode, "--pair-check", check],
                    dir.path(),
                );
                assert_eq!(base, other, "eps {eps} {variant} {mode} {check}");
            }
        }
    }
}

#[test]
fn whitespace_format() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "p.txt", "0 0\n0.5 0\n  9 9\n");
    let out = ok(&["cluster", "p.txt", "--format", "ws", "--eps", "1", "--min-pts", "2"], dir.path());
    assert_eq!(out, "0,core,0\n1,core,0\n2,noise,-1\n");
}

#[test]
fn parse_errors_exit_two_with_line() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "bad.csv", "1,2\n3,4\n5\n");
    let out = run(&["cluster", "bad.csv", "--eps", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    write(dir.path(), "nan.csv", "1,2\nNaN,4\n");
    assert_eq!(run(&["cluster", "nan.csv", "--eps", "1"], dir.path()).status.code(), Some(2));
}

#[test]
fn parameter_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "p.csv", "0,0\n1,1\n");
    write(dir.path(), "p3.csv", "0,0,0\n1,1,1\n2,2,2\n");
    let cases: [&[&str]; 6] = [
        &["cluster", "p.csv", "--eps", "0"],
        &["cluster", "p.csv", "--eps", "1", "--min-pts", "0"],
        &["cluster", "p3.csv", "--eps", "1", "--mode", "strip"],
        &["hierarchy", "p3.csv", "--min-pts", "2"],
        &["hierarchy", "p.csv", "--min-pts", "2", "--delta", "1.5"],
        &["cluster", "missing.csv", "--eps", "1"],
    ];
    for args in cases {
        assert_eq!(run(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn higher_dimensions_cluster_on_the_grid() {
    let dir = TempDir::new().unwrap();
    ok(&["gen", "--dim", "3", "--clusters", "8", "--per-cluster", "40", "--output", "g.csv"], dir.path());
    let out = ok(&["cluster", "g.csv", "--eps", "60"], dir.path());
    assert_eq!(out.lines().count(), 336);
}

#[test]
fn single_point_hierarchy() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "one.csv", "3,4\n");
    ok(&["hierarchy", "one.csv", "--output", "h.txt", "--cut", "1"], dir.path());
    assert_eq!(fs::read_to_string(dir.path().join("h.txt")).unwrap(), "");
    assert_eq!(fs::read_to_string(dir.path().join("h.txt.cut1")).unwrap(), "0,noise,-1\n");
    ok(&["hierarchy", "one.csv", "--min-pts", "1", "--output", "h1.txt", "--cut", "0"], dir.path());
    assert_eq!(fs::read_to_string(dir.path().join("h1.txt.cut0")).unwrap(), "0,core,0\n");
}

#[test]
fn cut_at_zero_is_all_noise() {
    let dir = TempDir::new().unwrap();
    ok(&["gen", "--per-cluster", "100", "--output", "g.csv"], dir.path());
    ok(&["hierarchy", "g.csv", "--output", "h.txt", "--cut", "0"], dir.path());
    let cut = fs::read_to_string(dir.path().join("h.txt.cut0")).unwrap();
    assert_eq!(cut.lines().count(), 420);
    assert!(cut_labels(&cut).iter().all(|(k, id)| k == "noise" && *id == -1));
    let tree = fs::read_to_string(dir.path().join("h.txt")).unwrap();
    assert_eq!(tree.lines().count(), 419);
}

#[test]
fn hierarchy_cut_matches_dbscan_star() {
    let dir = TempDir::new().unwrap();
    ok(&["gen", "--per-cluster", "150", "--seed", "2", "--output", "g.csv"], dir.path());
    ok(&["hierarchy", "g.csv", "--output", "h.txt", "--cut", "22.5"], dir.path());
    let cut = fs::read_to_string(dir.path().join("h.txt.cut22.5")).unwrap();
    let flat = ok(&["cluster", "g.csv", "--eps", "22.5", "--variant", "dbscan-star"], dir.path());
    assert_eq!(cut, flat);
}

/// Tight blobs far apart: no pairwise distance falls near the cut values,
/// so the approximate hierarchy must cut the same way as the exact one.
#[test]
fn approximate_cuts_match_on_separated_scales() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut text = String::new();
    for c in 0..5 {
        let (cx, cy) = (100.0 * c as f64, 40.0 * (c % 2) as f64);
        for _ in 0..30 {
            text += &format!("{},{}\n", cx + rng.random::<f64>(), cy + rng.random::<f64>());
        }
    }
    write(dir.path(), "p.csv", &text);
    let cuts = ["0.5", "5", "50", "200"];
    let mut args = vec!["hierarchy", "p.csv", "--output", "exact.txt"];
    for c in &cuts {
        args.extend(["--cut", c]);
    }
    ok(&args, dir.path());
    args[3] = "approx.txt";
    args.extend(["--delta", "0.01"]);
    ok(&args, dir.path());
    for c in cuts {
        let a = fs::read_to_string(dir.path().join(format!("exact.txt.cut{c}"))).unwrap();
        let b = fs::read_to_string(dir.path().join(format!("approx.txt.cut{c}"))).unwrap();
        assert_eq!(a, b, "cut {c}");
    }
    let at_fifty = cut_labels(&fs::read_to_string(dir.path().join("exact.txt.cut50")).unwrap());
    let ids: std::collections::BTreeSet<i64> = at_fifty.iter().map(|l| l.1).collect();
    assert_eq!(ids.len(), 5);
}

#[test]
fn gen_outputs() {
    let dir = TempDir::new().unwrap();
    ok(&["gen", "--per-cluster", "1", "--noise", "0", "--output", "a.csv"], dir.path());
    assert_eq!(fs::read_to_string(dir.path().join("a.csv")).unwrap().lines().count(), 4);
    assert_eq!(fs::read_to_string(dir.path().join("a.csv.labels")).unwrap(), "0\n1\n2\n3\n");

    ok(&["gen", "--per-cluster", "1000", "--noise", "0.05", "--output", "n.csv"], dir.path());
    let labels = fs::read_to_string(dir.path().join("n.csv.labels")).unwrap();
    assert_eq!(labels.lines().filter(|l| *l == "-1").count(), 200);

    ok(&["gen", "--per-cluster", "1000", "--noise", "0.05", "--output", "m.csv"], dir.path());
    assert_eq!(fs::read(dir.path().join("n.csv")).unwrap(), fs::read(dir.path().join("m.csv")).unwrap());
    ok(&["gen", "--per-cluster", "1000", "--seed", "1", "--output", "s.csv"], dir.path());
    assert_ne!(fs::read(dir.path().join("n.csv")).unwrap(), fs::read(dir.path().join("s.csv")).unwrap());
}

#[test]
fn gen_output_parses_back_losslessly() {
    let dir = TempDir::new().unwrap();
    ok(&["gen", "--per-cluster", "20", "--format", "ws", "--output", "w.txt"], dir.path());
    let text = fs::read_to_string(dir.path().join("w.txt")).unwrap();
    let values: Vec<f64> = text.split_whitespace().map(|v| v.parse().unwrap()).collect();
    for v in &values {
        assert_eq!(v.to_string().parse::<f64>().unwrap(), *v);
    }
    let out = ok(&["cluster", "w.txt", "--format", "ws", "--eps", "50"], dir.path());
    assert_eq!(out.lines().count(), values.len() / 2);
}

#[test]
fn bench_single_row_and_determinism() {
    let dir = TempDir::new().unwrap();
    let cfg = "sweep = \"eps\"\neps = [30.0]\nalgorithms = [\"new_strip\"]\noutput = \"b.csv\"\n[dataset]\nper_cluster = 400\n";
    write(dir.path(), "b.toml", cfg);
    let summary = ok(&["bench", "b.toml"], dir.path());
    let first = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(first.lines().count(), 2);
    assert_eq!(summary, ok(&["bench", "b.toml"], dir.path()));
    let second = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    let strip_wall = |s: &str| -> Vec<Vec<String>> {
        s.lines().map(|l| l.split(',').enumerate().filter(|(i, _)| *i != 6).map(|(_, f)| f.to_string()).collect()).collect()
    };
    assert_eq!(strip_wall(&first), strip_wall(&second));
    ok(&["bench", "b.toml", "--seed", "3", "--output", "c.csv"], dir.path());
    let third = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(third.lines().nth(1).unwrap().ends_with(",3"));
}

#[test]
fn bench_density_summary_ratios() {
    let dir = TempDir::new().unwrap();
    let cfg = "sweep = \"density\"\ndensities = [10.0, 20.0]\nalgorithms = [\"original\", \"new_grid\"]\n\
               output = \"d.csv\"\n[dataset]\nper_cluster = 2000\nnoise_fraction = 0.0\n";
    write(dir.path(), "d.toml", cfg);
    let summary = ok(&["bench", "d.toml"], dir.path());
    let csv = fs::read_to_string(dir.path().join("d.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    let seeds: Vec<f64> = rows.iter().filter(|r| r[0] == "original").map(|r| r[8].parse().unwrap()).collect();
    let line = summary
        .lines()
        .skip_while(|l| *l != "original")
        .find(|l| l.contains("last/first"))
        .unwrap();
    assert!(line.contains("density 2.0000"), "{line}");
    assert!(line.contains(&format!("seeds {:.4}", seeds[1] / seeds[0])), "{line}");
}

#[test]
fn bench_bad_config_exits_two() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "bad.toml", "sweep = \"eps\"\nalgorithms = []\n");
    assert_eq!(run(&["bench", "bad.toml"], dir.path()).status.code(), Some(2));
    write(dir.path(), "nout.toml", "sweep = \"eps\"\neps = [1.0]\nalgorithms = [\"original\"]\n");
    assert_eq!(run(&["bench", "nout.toml"], dir.path()).status.code(), Some(2));
}

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn nosub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nosub"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nosub-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn gen_writes_dataset_and_sidecar() {
    let dir = scratch("gen");
    let file = dir.join("gaps.txt");
    stdout(&nosub(&[
        "gen",
        "increasing_gaps",
        "c=2",
        "n=3",
        "-o",
        file.to_str().unwrap(),
    ]));
    let text = std::fs::read_to_string(&file).unwrap();
    let xs: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(xs.len(), 3);
    assert_eq!((xs[0], xs[1]), (0.0, 1.0));
    assert!((xs[2] - 2.4156).abs() < 1e-4);
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("gaps.txt.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["generator"], "increasing_gaps");
    assert_eq!(meta["n"], 3);

    let blobs = dir.join("blobs.txt");
    stdout(&nosub(&[
        "gen",
        "blobs",
        "sizes=[3,2]",
        "separation=10",
        "spread=1",
        "seed=4",
        "-o",
        blobs.to_str().unwrap(),
    ]));
    assert_eq!(std::fs::read_to_string(&blobs).unwrap().lines().count(), 5);
}

#[test]
fn gen_rejects_bad_parameters() {
    let dir = scratch("gen-bad");
    let file = dir.join("x.txt");
    let out = nosub(&["gen", "increasing_gaps", "c=0.5", "n=3", "-o", file.to_str().unwrap()]);
    assert!(!out.status.success());
    let out = nosub(&["gen", "increasing_gaps", "c=2", "n=-3", "-o", file.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("instance.params.n"));
    assert!(!nosub(&["gen", "nope", "-o", file.to_str().unwrap()]).status.success());
    assert!(!nosub(&["gen", "increasing_gaps", "c", "-o", file.to_str().unwrap()])
        .status
        .success());
}

#[test]
fn opt_prints_the_optimum() {
    let dir = scratch("opt");
    let file = dir.join("d.txt");
    std::fs::write(&file, "0\n1\n10\n").unwrap();
    let v: Value = serde_json::from_str(&stdout(&nosub(&["opt", "-k", "2", "-i", file.to_str().unwrap()]))).unwrap();
    assert_eq!(v["cost"], 1.0);
    assert_eq!(v["centers"], serde_json::json!([0, 2]));
    std::fs::write(&file, "0\n4\n5\n").unwrap();
    let v: Value = serde_json::from_str(&stdout(&nosub(&["opt", "-k", "1", "-i", file.to_str().unwrap()]))).unwrap();
    assert_eq!((v["cost"].as_f64(), v["centers"][0].as_u64()), (Some(17.0), Some(1)));
    let out = nosub(&["opt", "-k", "2", "-i", file.to_str().unwrap(), "--budget", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("subset budget"));
}

#[test]
fn trace_prints_one_line_per_arrival() {
    let dir = scratch("trace");
    let file = dir.join("d.txt");
    std::fs::write(&file, "5\n1\n2\n3\n").unwrap();
    let text = stdout(&nosub(&[
        "trace",
        "-a",
        "max_distance",
        "-i",
        file.to_str().unwrap(),
        "--order",
        "given",
    ]));
    assert_eq!(
        text,
        "0,take,first_point\n1,take,max_distance\n2,skip,skip\n3,skip,skip\n"
    );
    let a = stdout(&nosub(&[
        "trace",
        "-a",
        "doubling",
        "-c",
        "2",
        "-i",
        file.to_str().unwrap(),
        "--order",
        "random:7",
    ]));
    let b = stdout(&nosub(&[
        "trace",
        "-a",
        "doubling",
        "-c",
        "2",
        "-i",
        file.to_str().unwrap(),
        "--order",
        "random:7",
    ]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 4);
    assert!(!nosub(&["trace", "-a", "fft", "-i", file.to_str().unwrap()])
        .status
        .success());
    assert!(!nosub(&[
        "trace",
        "-a",
        "max_distance",
        "-i",
        file.to_str().unwrap(),
        "--order",
        "shuffled"
    ])
    .status
    .success());
}

#[test]
fn run_writes_reproducible_reports() {
    let dir = scratch("run");
    std::fs::write(dir.join("d.txt"), "0\n0.5\n1\n9\n9.5\n10\n20\n").unwrap();
    let config = r#"{
        "algorithm": {"name": "max_distance"},
        "instance": {"file": "d.txt"},
        "order": "random",
        "trials": 25,
        "seed": 3,
        "timing": false,
        "output": "out"
    }"#;
    std::fs::write(dir.join("cfg.json"), config).unwrap();
    let cfg = dir.join("cfg.json");
    let agg: Value = serde_json::from_str(&stdout(&nosub(&["run", "-c", cfg.to_str().unwrap()]))).unwrap();
    assert_eq!(agg["trials"], 25);
    let first = std::fs::read_to_string(dir.join("out/report.csv")).unwrap();
    assert_eq!(first.lines().count(), 26);
    assert!(first.starts_with(
        "trial_id,seed,n,k,algorithm,order,centers_taken,alg_cost,baseline_cost,baseline_kind,ratio,runtime_ms"
    ));
    let other = dir.join("again");
    stdout(&nosub(&[
        "run",
        "-c",
        cfg.to_str().unwrap(),
        "-o",
        other.to_str().unwrap(),
    ]));
    assert_eq!(first, std::fs::read_to_string(other.join("report.csv")).unwrap());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(other.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["trials"], 25);
    assert!(report["rng_generator"].is_string());

    std::fs::write(dir.join("bad.json"), config.replace("\"trials\": 25", "\"trials\": 0")).unwrap();
    let out = nosub(&["run", "-c", dir.join("bad.json").to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`trials`"));
}

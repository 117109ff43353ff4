use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

const SMALL: &str = r#"
id = "cli"
[geometry]
n_tx = 2
n_rx = 2
[ris]
mode = "active"
k_ris = 4
levels = 2
gain_db = 10
[noise]
sigma_z2 = 5e-8
[ofdm]
n_sc = 4
[link]
qam_order = 4
n_frames = 2
[seeds]
master = 5
trials = 3
[map]
x = [-1.0, 1.0]
y = [1.0, 2.0]
nx = 3
ny = 2
[sweep]
sizes = [1, 2, 3, 4]
gains_db = [0, 4, 8, 12]
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ris-mimo"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.toml");
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(o: &Output) {
    assert!(
        o.status.success(),
        "status {:?}\n{}",
        o.status,
        String::from_utf8_lossy(&o.stderr)
    );
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Every file below `dir` except the manifest, by relative path.
fn result_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "manifest.json" {
                out.push((
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    fs::read(&p).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn data_lines(p: &Path) -> Vec<String> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(str::to_owned)
        .collect()
}

#[test]
fn missing_field_is_a_config_error_naming_the_field() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), &SMALL.replace("levels = 2\n", ""));
    let o = run(&["simulate", "-c", s(&cfg), "-o", s(&t.path().join("o"))]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("ris") && err.contains("levels"), "{err}");
}

#[test]
fn unknown_key_and_bad_override_are_config_errors() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), &SMALL.replace("gain_db = 10", "gain_db = 10\ngian = 3"));
    assert_eq!(run(&["simulate", "-c", s(&cfg)]).status.code(), Some(3));
    let cfg = write_config(t.path(), SMALL);
    let o = run(&[
        "simulate",
        "-c",
        s(&cfg),
        "--override",
        "ris.levels=\"x\"",
        "-o",
        s(&t.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ris.levels"));
}

#[test]
fn reruns_and_thread_counts_agree_byte_for_byte() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), SMALL);
    for cmd in ["simulate", "optimize", "map"] {
        let mut outs = Vec::new();
        for (i, threads) in [None, Some("1"), Some("4"), None].into_iter().enumerate() {
            let dir = t.path().join(format!("{cmd}{i}"));
            let mut args = vec![cmd, "-c", s(&cfg), "-o", s(&dir)];
            if let Some(n) = threads {
                args.extend(["--threads", n]);
            }
            ok(&run(&args));
            outs.push(result_files(&dir));
        }
        assert!(!outs[0].is_empty());
        assert!(outs.iter().all(|o| *o == outs[0]), "{cmd} outputs differ");
    }
}

#[test]
fn no_ris_reproduces_the_baseline() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), SMALL);
    let dir = t.path().join("o");
    ok(&run(&["simulate", "-c", s(&cfg), "-o", s(&dir), "--no-ris"]));
    let lines = data_lines(&dir.join("results.csv"));
    assert_eq!(lines.len(), 3);
    for l in lines {
        let f: Vec<&str> = l.split(',').collect();
        assert_eq!(f[2], "no-ris");
        assert!(f[7].parse::<f64>().unwrap().abs() < 1e-12, "{l}");
        assert_eq!(f[8], "0");
    }
}

#[test]
fn optimize_writes_traces_matching_the_probe_count() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), SMALL);
    let dir = t.path().join("o");
    ok(&run(&["optimize", "-c", s(&cfg), "-o", s(&dir), "--algorithm", "bg"]));
    for (trial, l) in data_lines(&dir.join("results.csv")).iter().enumerate() {
        let probes: usize = l.split(',').nth(3).unwrap().parse().unwrap();
        assert_eq!(probes, 16 + 4 * 2);
        assert_eq!(
            data_lines(&dir.join(format!("traces/trace_t{trial}.csv"))).len(),
            probes
        );
    }
    let m = manifest(&dir);
    assert_eq!(m["status"], "complete");
    assert!(m["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .any(|o| o == "traces/trace_t2.csv"));
}

#[test]
fn exhaustive_bounds_bg_and_is_refused_when_too_large() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), &SMALL.replace("k_ris = 4", "k_ris = 8"));
    let best = |alg: &str| -> Vec<f64> {
        let dir = t.path().join(alg);
        ok(&run(&["optimize", "-c", s(&cfg), "-o", s(&dir), "--algorithm", alg]));
        data_lines(&dir.join("results.csv"))
            .iter()
            .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
            .collect()
    };
    let (ex, bg) = (best("exhaustive"), best("bg"));
    assert!(ex.iter().zip(&bg).all(|(e, b)| e >= b), "{ex:?} {bg:?}");

    let o = run(&[
        "optimize",
        "-c",
        s(&cfg),
        "-o",
        s(&t.path().join("big")),
        "--algorithm",
        "exhaustive",
        "--override",
        "algorithm.exhaustive_limit=100",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2^8 exceeds the exhaustive-search limit"));
    assert_eq!(manifest(&t.path().join("big"))["status"], "failed");
}

#[test]
fn mpc_without_codebook_points_to_the_codebook_command() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), SMALL);
    let o = run(&[
        "optimize",
        "-c",
        s(&cfg),
        "-o",
        s(&t.path().join("o")),
        "--algorithm",
        "mpc",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("codebook"));
}

#[test]
fn codebook_has_37_increasing_entries_and_drives_mpc() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), SMALL);
    let dir = t.path().join("cb");
    ok(&run(&["codebook", "-c", s(&cfg), "-o", s(&dir)]));
    let path = dir.join("codebook.txt");
    let text = fs::read_to_string(&path).unwrap();
    let cb = ris_mimo::control::McpCodebook::read_text(text.as_bytes()).unwrap();
    assert_eq!(text.lines().count(), 37);
    assert_eq!(cb.len(), 37);
    assert!(cb.entries().windows(2).all(|w| w[0].angle_deg < w[1].angle_deg));
    let mut again = Vec::new();
    cb.write_text(&mut again).unwrap();
    assert_eq!(again, text.as_bytes());

    let out = t.path().join("mpc");
    ok(&run(&[
        "optimize",
        "-c",
        s(&cfg),
        "-o",
        s(&out),
        "--algorithm",
        "mpc",
        "--codebook",
        s(&path),
    ]));
    for l in data_lines(&out.join("results.csv")) {
        assert_eq!(l.split(',').nth(3), Some("37"));
    }
}

#[test]
fn sweep_and_map_emit_one_record_per_cell() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), &SMALL.replace("trials = 3", "trials = 1"));
    let dir = t.path().join("sweep");
    ok(&run(&[
        "sweep",
        "-c",
        s(&cfg),
        "-o",
        s(&dir),
        "--override",
        "map.nx=1",
        "--override",
        "map.ny=1",
    ]));
    assert_eq!(data_lines(&dir.join("sweep.csv")).len(), 16);

    let dir = t.path().join("map");
    ok(&run(&["map", "-c", s(&cfg), "-o", s(&dir)]));
    let lines = data_lines(&dir.join("map.csv"));
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l.split(',').count() == 12));
}

#[test]
fn seed_flag_overrides_the_config_and_is_recorded() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(t.path(), SMALL);
    let a = t.path().join("a");
    let b = t.path().join("b");
    ok(&run(&["simulate", "-c", s(&cfg), "-o", s(&a), "--seed", "77"]));
    ok(&run(&[
        "simulate",
        "-c",
        s(&cfg),
        "-o",
        s(&b),
        "--override",
        "seeds.master=77",
    ]));
    let m = manifest(&a);
    assert_eq!(m["master_seed"], 77);
    assert_eq!(m["config"]["seeds"]["master"], 77);
    assert_eq!(result_files(&a), result_files(&b));
    assert!(data_lines(&a.join("results.csv"))[0].split(',').nth(1) == Some("77"));
}

#[test]
fn killed_run_leaves_an_incomplete_manifest() {
    let t = tempfile::tempdir().unwrap();
    let big = SMALL
        .replace("k_ris = 4", "k_ris = 64")
        .replace("trials = 3", "trials = 400")
        .replace("n_sc = 4", "n_sc = 64");
    let cfg = write_config(t.path(), &big);
    let dir = t.path().join("o");
    let mut child = bin()
        .args(["optimize", "-c", s(&cfg), "-o", s(&dir)])
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let start = Instant::now();
    while !dir.join("manifest.json").exists() {
        assert!(start.elapsed() < Duration::from_secs(60), "manifest never appeared");
        std::thread::sleep(Duration::from_millis(20));
    }
    std::thread::sleep(Duration::from_millis(200));
    child.kill().unwrap();
    child.wait().unwrap();
    let m = manifest(&dir);
    assert_eq!(m["status"], "incomplete");
    assert!(m["finished_unix"].is_null());
}

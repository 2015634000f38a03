//! End-to-end runs of the `schurdyn` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn schurdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schurdyn")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn jsonl(text: &str) -> Vec<Value> {
    text.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

const SPP: &[&str] = &["sample-spp", "--A", "4", "--B", "3", "--pi", "2,1,1,0", "--q", "0.5", "--samples", "10", "--seed", "1"];

#[test]
fn spp_example_gives_ten_records_within_the_draw_bound() {
    let out = schurdyn(SPP);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = jsonl(&stdout(&out));
    assert_eq!(lines[0]["kind"], "header");
    let records = &lines[1..];
    assert_eq!(records.len(), 10);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r["kind"], "plane_partition");
        assert_eq!(r["schema_version"], 1);
        assert_eq!(r["index"], i);
        assert!(r["draws"].as_u64().unwrap() <= 24);
        let cells: Vec<Option<i64>> = r["entries"].as_array().unwrap().iter().flat_map(|row| row.as_array().unwrap().iter().map(Value::as_i64)).collect();
        assert_eq!(cells.iter().filter(|c| c.is_none()).count(), 4);
        assert_eq!(cells.iter().flatten().sum::<i64>(), r["volume"].as_i64().unwrap());
    }
}

#[test]
fn output_is_deterministic_and_thread_independent() {
    let run = |threads: &str| {
        let mut args = SPP.to_vec();
        let n = args.len();
        args[n - 3] = "40";
        args.extend(["--threads", threads]);
        let out = schurdyn(&args);
        assert!(out.status.success());
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("1"));
    assert_eq!(one, run("3"));
}

#[test]
fn zero_samples_writes_nothing() {
    let out = schurdyn(&["sample-spp", "--A", "2", "--B", "2", "--q", "0.5", "--samples", "0"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
}

#[test]
fn invalid_parameters_exit_with_one() {
    for args in [
        &["sample-spp", "--A", "2", "--B", "2", "--q", "1.5"][..],
        &["sample-spp", "--A", "2", "--B", "2", "--pi", "3", "--q", "0.5"],
        &["sample-spp", "--A", "2", "--B", "2", "--pi", "1,2", "--q", "0.5"],
        &["sample-gt", "--N", "0"],
        &["sample-spp", "--bogus"],
    ] {
        let out = schurdyn(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn gamma_is_rejected_with_its_reason() {
    let out = schurdyn(&["sample-gt", "--N", "3", "--gamma-plus", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot be sampled"));
}

#[test]
fn stats_over_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.jsonl");
    let mut args = SPP.to_vec();
    let path = file.to_str().unwrap();
    args.extend(["--out", path]);
    assert!(schurdyn(&args).status.success());

    let stats = |inputs: &[&str]| {
        let mut a = vec!["stats", "--input"];
        a.extend_from_slice(inputs);
        let out = schurdyn(&a);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        jsonl(&stdout(&out)).remove(0)
    };
    let once = stats(&[path]);
    let twice = stats(&[path, path]);
    assert_eq!(once["kind"], "spp_stats");
    assert_eq!(once["samples"], 10);
    assert_eq!(twice["samples"], 20);
    assert_eq!(once["mean_height"], twice["mean_height"]);
    assert_eq!(once["mean_volume"], twice["mean_volume"]);
    assert!(once["closed_form_mean_volume"].as_f64().unwrap() > 0.0);

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(schurdyn(&["stats", "--input", empty.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(schurdyn(&["stats", "--input", "/nonexistent/samples.jsonl"]).status.code(), Some(1));
}

#[test]
fn verify_subset_passes_and_unknown_criterion_fails() {
    let out = schurdyn(&["verify", "--only", "commutation"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = jsonl(&stdout(&out)).remove(0);
    assert_eq!(report["pass"], true);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 1);

    assert_eq!(schurdyn(&["verify", "--only", "nonsense"]).status.code(), Some(1));
}

#[test]
fn flags_override_config_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "A = 2\nB = 5\nq = 0.3\nsamples = 2\n").unwrap();
    let out = schurdyn(&["sample-spp", "--config", cfg.to_str().unwrap(), "--B", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = jsonl(&stdout(&out));
    let header = &lines[0]["config"];
    assert_eq!(header["A"], 2);
    assert_eq!(header["B"], 1);
    assert_eq!(header["q"], 0.3);
    assert_eq!(header["seed"], 0);
    assert_eq!(lines.len(), 3);

    std::fs::write(&cfg, "A = 2\ncolour = \"red\"\n").unwrap();
    assert_eq!(schurdyn(&["sample-spp", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn svg_output_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("pp.svg");
    let mut args = SPP.to_vec();
    args.extend(["--format", "svg", "--out", file.to_str().unwrap()]);
    assert!(schurdyn(&args).status.success());
    let text = std::fs::read_to_string(Path::new(&file)).unwrap();
    assert!(text.starts_with("<svg "));
    assert!(text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<g>").count(), 10);
    assert_eq!(text.matches("<g>").count(), text.matches("</g>").count());
    assert_eq!(text.matches("<polygon").count(), text.matches("/>").count());
}

#[test]
fn gt_sampler_runs_on_the_full_character() {
    let tenth = ["0.1"; 10].join(",");
    let half = ["0.5"; 5].join(",");
    let out = schurdyn(&[
        "sample-gt", "--N", "40", "--samples", "10", "--seed", "2", "--alpha-plus", &tenth, "--beta-plus", &half, "--alpha-minus", &tenth,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = jsonl(&stdout(&out));
    assert_eq!(lines.len(), 1 + 10 + 1);
    assert_eq!(lines[11]["kind"], "gt_stats");
    for r in &lines[1..11] {
        let levels: Vec<Vec<i64>> = serde_json::from_value(r["levels"].clone()).unwrap();
        assert_eq!(levels.len(), 40);
        for (k, pair) in levels.windows(2).enumerate() {
            let (lo, hi) = (&pair[0], &pair[1]);
            assert_eq!((lo.len(), hi.len()), (k + 1, k + 2));
            for i in 0..lo.len() {
                assert!(hi[i] >= lo[i] && lo[i] >= hi[i + 1], "level {k}: {lo:?} / {hi:?}");
            }
        }
    }
}

#[test]
fn trivial_character_gives_zero_patterns() {
    let out = schurdyn(&["sample-gt", "--N", "4", "--samples", "3"]);
    assert!(out.status.success());
    for r in &jsonl(&stdout(&out))[1..4] {
        assert!(r["levels"].as_array().unwrap().iter().flat_map(|l| l.as_array().unwrap()).all(|x| x == 0));
    }
}

#[test]
fn ascii_output_has_a_heat_map() {
    let mut args = SPP.to_vec();
    args.extend(["--format", "ascii"]);
    let text = stdout(&schurdyn(&args));
    assert!(text.starts_with("# "));
    assert_eq!(text.matches("sample ").count(), 10);
    assert!(text.lines().filter(|l| l.contains('|')).count() == 40);
}

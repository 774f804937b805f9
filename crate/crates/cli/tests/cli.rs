use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rugged(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rugged"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON object")
}

#[test]
fn noiseless_rls_reaches_the_optimum() {
    let out = rugged(&[
        "run", "--algo", "rls", "--n", "100", "--noise", "none", "--budget", "n^2", "--seed", "1",
    ]);
    assert_eq!(code(&out), 0);
    let rec = stdout_json(&out);
    assert_eq!(rec["final_ones"], 100);
    assert_eq!(rec["budget"], 10_000);
}

#[test]
fn cga_defaults_k() {
    let out = rugged(&[
        "run",
        "--algo",
        "cga",
        "--n",
        "100",
        "--noise",
        "normal",
        "--variance",
        "5",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0);
    let rec = stdout_json(&out);
    assert!((rec["k"].as_f64().unwrap() - 10.0 * 100f64.ln()).abs() < 1e-9);
    assert_eq!(rec["max_ones"], 100);
}

#[test]
fn trace_lists_start_and_transitions() {
    let out = rugged(&[
        "run",
        "--algo",
        "ea",
        "--n",
        "30",
        "--noise",
        "geometric",
        "--variance",
        "5",
        "--trace",
        "--seed",
        "2",
    ]);
    let rec = stdout_json(&out);
    let trace = rec["noise_trace"].as_array().unwrap();
    assert_eq!(trace.len() as u64, rec["transitions"].as_u64().unwrap() + 1);
    assert!(trace.iter().all(|x| x.as_f64().unwrap() >= 1.0));
}

#[test]
fn usage_errors_exit_2() {
    let out = rugged(&["run", "--algo", "rs", "--n", "0", "--noise", "none"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("n must be ≥ 2"));

    let out = rugged(&["run", "--algo", "rls", "--n", "10", "--K", "n"]);
    assert_eq!(code(&out), 2);

    let out = rugged(&["verify", "--suite", "lemma7"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    for name in [
        "lemma1",
        "collision",
        "gaussmin",
        "tails",
        "stagnation",
        "rs-ceiling",
        "all",
    ] {
        assert!(err.contains(name), "{err}");
    }

    assert_eq!(code(&rugged(&["frobnicate"])), 2);
    assert_eq!(code(&rugged(&["--help"])), 0);
}

#[test]
fn verify_prints_one_line_per_check() {
    let out = rugged(&[
        "verify", "--suite", "tails", "--trials", "300", "--seed", "4",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["verdict"], "pass");
    }
}

#[test]
fn exit_status_tracks_verdicts() {
    let out = rugged(&[
        "verify",
        "--suite",
        "stagnation",
        "--trials",
        "2",
        "--seed",
        "1",
    ]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let any_fail = text.lines().any(|l| l.contains("\"verdict\":\"fail\""));
    assert_eq!(code(&out), if any_fail { 1 } else { 0 });
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

#[test]
fn malformed_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    write(&cfg, "n_values = [10]\nrepetitions = 2\nbudegt = \"n^2\"\n");
    let out = rugged(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("`budegt`"));
}

#[test]
fn config_sweep_writes_records_meta_and_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    write(&cfg, "algorithms = [\"rls\", \"rs\"]\nn_values = [10, 20]\nrepetitions = 3\nnoise = \"geometric\"\nvariance = 5\nseed = 8\n");
    let out_dir = dir.path().join("out");
    let out = rugged(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let records = fs::read_to_string(out_dir.join("records_geometric.csv")).unwrap();
    assert_eq!(records.lines().count(), 1 + 12);
    assert!(out_dir.join("records_geometric.meta.toml").exists());
    let agg = fs::read_to_string(out_dir.join("aggregate.csv")).unwrap();
    assert_eq!(
        agg.lines().next().unwrap(),
        "algorithm,n,mean_pct,std_pct,reps"
    );
    assert!(agg.contains("rls:geometric,10,"));
}

#[test]
fn unwritable_output_fails_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    write(&blocker, "x");
    let out = rugged(&[
        "sweep",
        "--n-values",
        "10",
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not writable"));
}

const AGG: &str = "algorithm,n,mean_pct,std_pct,reps
rls:normal,100,55.5,1,3
rls:normal,200,53.25,1,3
cga:normal,100,100,0,3
cga:normal,200,100,0,3
rs:normal,100,68.5,1,3
rs:normal,200,64,1,3
";

fn circles(svg: &str) -> Vec<(String, usize, f64)> {
    let doc = roxmltree::Document::parse(svg).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    root.descendants()
        .filter(|n| n.has_tag_name("circle"))
        .map(|n| {
            (
                n.attribute("data-series").unwrap().to_string(),
                n.attribute("data-n").unwrap().parse().unwrap(),
                n.attribute("data-mean").unwrap().parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn plot_round_trips_data_and_omits_cga() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("agg.csv");
    write(&input, AGG);
    let svg_path = dir.path().join("chart.svg");
    let out = rugged(&[
        "plot",
        "--in",
        input.to_str().unwrap(),
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let svg = fs::read_to_string(&svg_path).unwrap();
    assert!(!svg.contains("href"), "no external assets");
    let pts = circles(&svg);
    assert_eq!(pts.len(), 4);
    assert!(pts.contains(&("rls:normal".into(), 200, 53.25)));
    assert!(pts.iter().all(|p| !p.0.starts_with("cga")));

    let out = rugged(&[
        "plot",
        "--in",
        input.to_str().unwrap(),
        "--out",
        svg_path.to_str().unwrap(),
        "--include-cga",
    ]);
    assert_eq!(code(&out), 0);
    let pts = circles(&fs::read_to_string(&svg_path).unwrap());
    assert_eq!(pts.len(), 6);
    assert!(pts.contains(&("cga:normal".into(), 100, 100.0)));
}

#[test]
fn plot_rejects_bad_input_without_writing() {
    let dir = tempfile::tempdir().unwrap();
    let svg_path = dir.path().join("chart.svg");
    for (name, text) in [
        ("empty.csv", ""),
        ("header.csv", "algorithm,n,mean_pct,std_pct,reps\n"),
        ("cols.csv", "algorithm,n\nrls,10\n"),
    ] {
        let input = dir.path().join(name);
        write(&input, text);
        let out = rugged(&[
            "plot",
            "--in",
            input.to_str().unwrap(),
            "--out",
            svg_path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 2, "{name}");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains("schema"),
            "{name}"
        );
        assert!(!svg_path.exists(), "{name}");
    }
}

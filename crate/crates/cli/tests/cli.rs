use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graph-sampen")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn compute_reports_sums_for_a_three_node_path() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.csv", "# directed=true\nsrc,dst\n0,1\n1,2\n");
    let s = write(dir.path(), "s.csv", "node,value\n0,1\n1,2\n2,3\n");
    let out = run(&["compute", "--graph", &g, "--signal", &s, "--m", "1", "--r", "0.2"]);
    let v = json(&out);
    // Distinct values one apart never match at 0.2 SD.
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(v["error"], "NoMatches");
    assert_eq!(v["B"], 0.0);
    assert_eq!(v["n_templates_m"], 3);
    assert_eq!(v["n_templates_m1"], 2);
    assert!(v["value"].is_null());

    let out = run(&["compute", "--graph", &g, "--signal", &s, "--m", "1", "--r", "2.0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    // eps = 2 * sqrt(2/3) ~ 1.63: values 1 and 3 do not match, so B = 4/6,
    // while the two 2-patterns (1,2),(2,3) match each other, so A = 1.
    assert!((v["B"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(v["A"], 1.0);
    assert!((v["value"].as_f64().unwrap() + 1.5f64.ln()).abs() < 1e-15);

    let graph = graph_sampen::build_path(3, true).unwrap();
    let signal = graph_sampen::GraphSignal::new(vec![1.0, 2.0, 3.0]).unwrap();
    let oracle = graph_sampen::sampen_oracle(&graph, &signal, &graph_sampen::SampEnParams::new(1, 2.0)).unwrap();
    assert_eq!(v["value"].as_f64().unwrap(), oracle.value);
    assert_eq!(v["epsilon"].as_f64().unwrap(), oracle.epsilon);
}

#[test]
fn compute_constant_signal_is_zero_in_strict_mode() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.csv", "src,dst\n0,1\n1,2\n2,3\n");
    let s = write(dir.path(), "s.csv", "node,value\n0,5\n1,5\n2,5\n3,5\n");
    let out = run(&["compute", "--graph", &g, "--signal", &s, "--mode", "strict", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("value,A,B,n_templates_m,n_templates_m1,epsilon,error"));
    assert!(lines.next().unwrap().starts_with("0,1,1,"));
}

#[test]
fn compute_tiny_tolerance_exits_with_no_matches() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.csv", "src,dst\n0,1\n1,2\n2,3\n3,4\n");
    let s = write(dir.path(), "s.csv", "node,value\n0,1\n1,10\n2,100\n3,1000\n4,10000\n");
    let out = run(&["compute", "--graph", &g, "--signal", &s, "--r", "1e-9"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"], "NoMatches");
}

#[test]
fn usage_and_input_errors_exit_with_one() {
    assert_eq!(run(&["compute", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    let out = run(&["compute", "--graph", "/nonexistent", "--signal", "/nonexistent"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.csv", "src,dst\n0,x\n");
    let s = write(dir.path(), "s.csv", "node,value\n0,1\n1,2\n");
    assert_eq!(run(&["compute", "--graph", &g, "--signal", &s]).status.code(), Some(1));
}

#[test]
fn version_and_help_succeed() {
    let out = run(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains(env!("CARGO_PKG_VERSION")));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn series_of_a_periodic_signal_is_near_zero() {
    let dir = tempfile::tempdir().unwrap();
    let text: String = std::iter::once("value\n".to_string())
        .chain((0..300).map(|i| format!("{}\n", [0.0, 1.0, 0.5][i % 3])))
        .collect();
    let f = write(dir.path(), "p.csv", &text);
    let out = run(&["series", "--input", &f, "--m", "2", "--r", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["value"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn synth_is_deterministic_in_the_seed() {
    let args = ["synth", "logistic", "--rho", "4.0", "--n", "1000", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1000);
    let c = run(&["synth", "logistic", "--rho", "4.0", "--n", "1000", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn synthetic_graph_and_signal_feed_compute() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("ws.csv");
    let s = dir.path().join("x.csv");
    let (g, s) = (g.to_str().unwrap(), s.to_str().unwrap());
    assert!(run(&["synth", "ws", "--n", "200", "--K", "2", "--beta", "0.3", "--seed", "1", "--out", g]).status.success());
    assert!(run(&["synth", "smooth", "--graph", g, "--seed", "2", "--out", s]).status.success());
    let out = run(&["compute", "--graph", g, "--signal", s]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(json(&out)["value"].as_f64().unwrap().is_finite());
}

#[test]
fn image_patches_report_each_patch_and_the_mean() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("img.csv");
    let img = img.to_str().unwrap();
    assert!(run(&["synth", "mix2d", "--size", "40", "--p", "0.5", "--seed", "3", "--out", img]).status.success());
    let out = run(&["image", "--input", img, "--patch", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let patches = v["patches"].as_array().unwrap();
    assert_eq!(patches.len(), 4);
    let mean = patches.iter().map(|p| p["value"].as_f64().unwrap()).sum::<f64>() / 4.0;
    assert!((v["mean"].as_f64().unwrap() - mean).abs() < 1e-12);
}

#[test]
fn er_sweep_decreases_with_degree() {
    let out = run(&["sweep", "--family", "er", "--N", "300", "--K", "3,10", "--m", "2", "--r", "0.2", "--reps", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# base_seed="));
    assert_eq!(lines[1], "N,K,m,r,mean,std,reps_ok,reps_failed,mean_runtime_ms");
    assert_eq!(lines.len(), 4);
    let mean = |line: &str| line.split(',').nth(4).unwrap().parse::<f64>().unwrap();
    assert!(mean(lines[2]) > mean(lines[3]));
}

#[test]
fn sweep_json_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.json");
    let p = path.to_str().unwrap();
    let out = run(&["sweep", "--family", "logistic", "--rho", "3.5,4.0", "--reps", "3", "--format", "json", "--out", p]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[0]["reps_ok"].as_u64().unwrap() + v[0]["reps_failed"].as_u64().unwrap(), 3);
}

#[test]
fn bench_prints_one_row_per_size_and_order() {
    let out = run(&["bench", "--N", "100,200", "--K", "3", "--m", "1,2", "--reps", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("N,m,mean_ms,calls,undefined"));
    assert_eq!(text.lines().count(), 5);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::io::Write as _;

fn langs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/langs")
}

fn regraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regraph"))
        .args(args)
        .output()
        .expect("spawn regraph")
}

fn regraph_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_regraph"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn regraph");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn golden_compile_gen_recognize_replay() {
    let dir = tempfile::tempdir().unwrap();
    for (lang, extra_compile, mode) in [
        ("abc", None, "efficient"),
        ("spikes", None, "efficient"),
        ("palindromes", None, "simple"),
        ("wheels", Some("--allow-uncertified"), "backtracking"),
    ] {
        let regex = langs().join(format!("{lang}.regex"));
        let dfa = dir.path().join(format!("{lang}.dfa"));
        let mut args = vec!["compile", path(&regex), "-o", path(&dfa)];
        args.extend(extra_compile);
        let o = regraph(&args);
        assert_eq!(code(&o), 0, "{lang}: {}", String::from_utf8_lossy(&o.stderr));

        let graph = dir.path().join(format!("{lang}.json"));
        let o = regraph(&["gen", lang, "--edges", "30", "--seed", "7", "--shuffle", "11", "-o", path(&graph)]);
        assert_eq!(code(&o), 0, "{lang}");

        let o = regraph(&["recognize", path(&dfa), path(&graph), "--mode", mode, "--check-witness"]);
        let out = stdout(&o);
        assert_eq!(code(&o), 0, "{lang}: {out}");
        assert!(out.starts_with("accept\nwitness: "), "{lang}: {out}");
        assert!(out.contains("replay: isomorphic"), "{lang}: {out}");
    }
}

#[test]
fn abc_on_smt_has_nine_symbol_witness() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("smt.json");
    assert_eq!(code(&regraph(&["gen", "abc", "--edges", "9", "-o", path(&g)])), 0);
    let o = regraph(&["recognize", path(&langs().join("abc.auto")), path(&g), "--witness", "--trace"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let witness = out.lines().find_map(|l| l.strip_prefix("witness: ")).unwrap();
    assert_eq!(witness.split(' ').count(), 9);
    assert_eq!(out.lines().filter(|l| l.starts_with("step ")).count(), 9);
}

#[test]
fn exit_code_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let abc = langs().join("abc.regex");
    let wheels_dfa = dir.path().join("wheels.dfa");
    let bad_spec = dir.path().join("bad.auto");
    std::fs::write(&bad_spec, "symbol a(2)\nstate q(\n").unwrap();
    let big = dir.path().join("big.json");
    assert_eq!(code(&regraph(&["gen", "abc", "--edges", "300", "--shuffle", "1", "-o", path(&big)])), 0);
    let wheel = dir.path().join("wheel.json");
    assert_eq!(code(&regraph(&["gen", "wheels", "--edges", "12", "-o", path(&wheel)])), 0);
    let s = langs().join("S.json");
    let missing = dir.path().join("missing.json");
    let two_loops = langs().join("two-loops.auto");
    let wheels = langs().join("wheels.regex");

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["compile", path(&abc)], 0),
        (vec!["compile", path(&two_loops)], 1),
        (vec!["compile", path(&wheels), "-o", path(&wheels_dfa)], 1),
        (vec!["compile", path(&bad_spec)], 2),
        (vec!["compile", path(&missing)], 2),
        (vec!["recognize", path(&abc), path(&big)], 0),
        (vec!["recognize", path(&abc), path(&s)], 1),
        (vec!["recognize", path(&abc), path(&wheel)], 1),
        (vec!["recognize", path(&abc), path(&missing)], 2),
        (vec!["recognize", path(&wheels), path(&wheel)], 2),
        (vec!["recognize", path(&wheels), path(&wheel), "--mode", "backtracking"], 0),
        (vec!["recognize", path(&abc), path(&big), "--mode", "backtracking", "--budget", "5"], 3),
        (vec!["recognize", path(&abc), path(&big), "--mode", "quick"], 2),
        (vec!["gen", "hexagons", "--edges", "10"], 2),
        (vec!["gen", "wheels", "--edges", "3"], 2),
        (vec!["bench", "abc", "--sizes", "30", "--reps", "2", "--drop", "2"], 2),
        (vec!["bench", "wheels", "--sizes", "30", "--reps", "2", "--drop", "0"], 2),
        (vec!["export", path(&s)], 0),
        (vec!["frobnicate"], 2),
    ];
    for (args, expected) in cases {
        let o = regraph(&args);
        assert_eq!(
            code(&o),
            expected,
            "{args:?}\nstdout: {}\nstderr: {}",
            stdout(&o),
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn graph_from_stdin() {
    let g = std::fs::read_to_string(langs().join("S.json")).unwrap();
    let o = regraph_stdin(&["recognize", path(&langs().join("abc.regex")), "-"], &g);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "reject\n");
}

#[test]
fn exported_abc_dfa_has_seven_states() {
    let dir = tempfile::tempdir().unwrap();
    let dfa = dir.path().join("abc.dfa");
    assert_eq!(code(&regraph(&["compile", path(&langs().join("abc.regex")), "-o", path(&dfa)])), 0);
    let o = regraph(&["export", path(&dfa)]);
    assert_eq!(code(&o), 0);
    let dot = stdout(&o);
    assert_eq!(dot.lines().filter(|l| l.contains("shape=")).count(), 7);
}

#[test]
fn bench_both_modes_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let o = regraph(&["bench", "abc", "--sizes", "60,120", "--reps", "3", "--drop", "1", "--mode", "both", "--csv", path(&csv)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "language,mode,edges,mean_s,build_s,exec_s,reps,dropped,seed");
    assert_eq!(rows.len(), 5);
    assert!(rows[1].starts_with("abc,simple,60,"));
    assert!(rows[4].starts_with("abc,efficient,120,"));
}

#[test]
fn gen_abc_hits_exact_edge_count() {
    let o = regraph(&["gen", "abc", "--edges", "25023"]);
    assert_eq!(code(&o), 0);
    let g = regraph::formats::parse_graph(&stdout(&o), None).unwrap();
    assert_eq!(g.edge_count(), 25023);
}

//! Runs every `$ regraph ...` line in the `console` fences of `docs/*.md`.
//!
//! Commands run in a scratch directory that links `crates/core/langs` back
//! to the repository, so doc paths read like paths from the repository
//! root. A trailing `# exit: N` sets the expected status (default 0). Lines
//! after a command are its expected stdout: each must match an output line in
//! order, and `...` skips any number of lines.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

struct Fence {
    file: PathBuf,
    line: usize,
    command: Vec<String>,
    exit: i32,
    expected: Vec<String>,
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn parse_fences(file: &Path) -> Vec<Fence> {
    let text = fs::read_to_string(file).unwrap();
    let mut out: Vec<Fence> = Vec::new();
    let mut in_console = false;
    for (i, line) in text.lines().enumerate() {
        if line.starts_with("```") {
            in_console = !in_console && line.trim() == "```console";
            continue;
        }
        if !in_console {
            continue;
        }
        if let Some(cmd) = line.strip_prefix("$ ") {
            let (cmd, exit) = match cmd.split_once(" # exit: ") {
                Some((c, code)) => (c, code.trim().parse().expect("exit code")),
                None => (cmd, 0),
            };
            out.push(Fence {
                file: file.to_path_buf(),
                line: i + 1,
                command: cmd.split_whitespace().map(String::from).collect(),
                exit,
                expected: Vec::new(),
            });
        } else if let Some(f) = out.last_mut() {
            f.expected.push(line.to_string());
        }
    }
    out
}

/// Matches `expected` against `actual` in order; `...` skips lines.
fn output_matches(expected: &[String], actual: &[&str]) -> Result<(), String> {
    let mut pos = 0;
    let mut skipping = false;
    for want in expected {
        if want == "..." {
            skipping = true;
            continue;
        }
        loop {
            match actual.get(pos) {
                Some(got) if got == want => {
                    pos += 1;
                    break;
                }
                Some(got) if !skipping => return Err(format!("expected `{want}`, got `{got}`")),
                Some(_) => pos += 1,
                None => return Err(format!("missing line `{want}`")),
            }
        }
        skipping = false;
    }
    if !skipping && pos < actual.len() {
        return Err(format!("unexpected extra line `{}`", actual[pos]));
    }
    Ok(())
}

fn run(fence: &Fence, cwd: &Path) -> Result<(), String> {
    let (program, args) = fence.command.split_first().ok_or("empty command")?;
    if program != "regraph" {
        return Err(format!("only regraph commands run in docs, found `{program}`"));
    }
    let out = Command::new(env!("CARGO_BIN_EXE_regraph"))
        .args(args)
        .current_dir(cwd)
        .output()
        .map_err(|e| e.to_string())?;
    let code = out.status.code().unwrap_or(-1);
    let stdout = String::from_utf8_lossy(&out.stdout);
    if code != fence.exit {
        return Err(format!(
            "exit {code}, expected {}\nstderr: {}",
            fence.exit,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let lines: Vec<&str> = stdout.lines().collect();
    output_matches(&fence.expected, &lines).map_err(|e| format!("{e}\nstdout:\n{stdout}"))
}

#[test]
fn doc_commands_run() {
    let root = workspace_root();
    let mut pages: Vec<PathBuf> = fs::read_dir(root.join("docs"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "md"))
        .collect();
    pages.push(root.join("README.md"));
    pages.sort();

    let mut failures = Vec::new();
    let mut ran = 0;
    for page in &pages {
        // Each page gets its own scratch directory; commands within a page
        // share it, so later fences can use files written by earlier ones.
        let scratch = tempfile::tempdir().unwrap();
        fs::create_dir_all(scratch.path().join("crates/core")).unwrap();
        std::os::unix::fs::symlink(root.join("crates/core/langs"), scratch.path().join("crates/core/langs")).unwrap();
        for fence in parse_fences(page) {
            ran += 1;
            if let Err(e) = run(&fence, scratch.path()) {
                failures.push(format!("{}:{}: `{}`: {e}", fence.file.display(), fence.line, fence.command.join(" ")));
            }
        }
    }
    assert!(ran > 0, "no doc commands found");
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

#[test]
fn matcher_reports_stale_output() {
    let exp = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    assert!(output_matches(&exp(&["a", "...", "c"]), &["a", "b", "b", "c"]).is_ok());
    assert!(output_matches(&exp(&["a", "..."]), &["a", "b"]).is_ok());
    assert!(output_matches(&exp(&["a"]), &["a", "b"]).is_err());
    assert!(output_matches(&exp(&["a", "c"]), &["a", "b", "c"]).is_err());
    assert!(output_matches(&exp(&[]), &[]).is_ok());
}

#[test]
fn stale_flag_fails_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let page = dir.path().join("page.md");
    fs::write(&page, "intro\n\n```console\n$ regraph gen abc --size 9\n```\n").unwrap();
    let fences = parse_fences(&page);
    assert_eq!(fences.len(), 1);
    assert_eq!(fences[0].line, 4);
    let err = run(&fences[0], dir.path()).unwrap_err();
    assert!(err.starts_with("exit 2, expected 0"), "{err}");
}

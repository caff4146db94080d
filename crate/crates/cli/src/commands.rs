use std::fs;
use std::io::{self, Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context as _};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use regraph::automaton::{Dfa, TypedAutomaton};
use regraph::bench::{render_table, run_bench, write_csv, BenchConfig, BenchError};
use regraph::formats::{automaton_to_dot, graph_to_dot, parse_automaton_spec, parse_graph, read_dfa, write_dfa, write_graph};
use regraph::langs::{shuffle_edges, Language};
use regraph::model::Graph;
use regraph::pipeline::{compile as compile_pipeline, Compilation};
use regraph::recognizer::{
    recognize_backtracking, recognize_linear, render_trace, IndexMode, RecognizeError, RunOptions,
};
use regraph::regex::compile_regex_file;

use crate::{BenchMode, Mode};

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    /// Graph rejected, or the automaton failed a check.
    Rejected = 1,
    /// Bad arguments or unreadable input.
    Usage = 2,
    /// Invariant violation or exhausted search budget.
    Internal = 3,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        ExitCode::from(s as u8)
    }
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub source: anyhow::Error,
}

impl Failure {
    fn usage(source: impl Into<anyhow::Error>) -> Self {
        Self {
            status: Status::Usage,
            source: source.into(),
        }
    }

    fn internal(source: impl Into<anyhow::Error>) -> Self {
        Self {
            status: Status::Internal,
            source: source.into(),
        }
    }

    fn rejected(source: impl Into<anyhow::Error>) -> Self {
        Self {
            status: Status::Rejected,
            source: source.into(),
        }
    }
}

impl From<RecognizeError> for Failure {
    fn from(e: RecognizeError) -> Self {
        match e {
            RecognizeError::UncertifiedDfa => Failure::usage(anyhow!(e).context("pass --allow-uncertified to force")),
            _ => Failure::internal(e),
        }
    }
}

type CmdResult = Result<Status, Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::usage)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::usage),
        None => io::stdout().write_all(text.as_bytes()).map_err(Failure::internal),
    }
}

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e == ext)
}

/// Parses a `.auto` spec or a `.regex` file; other extensions are sniffed
/// for a `state` declaration.
fn parse_source(path: &Path, text: &str) -> Result<TypedAutomaton, Failure> {
    let is_spec = has_extension(path, "auto")
        || (!has_extension(path, "regex") && text.lines().any(|l| l.trim_start().starts_with("state ")));
    let parsed = if is_spec {
        parse_automaton_spec(text).map_err(anyhow::Error::from)
    } else {
        compile_regex_file(text).map_err(anyhow::Error::from)
    };
    parsed
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::usage)
}

fn run_pipeline(a: &TypedAutomaton) -> Result<Compilation, Failure> {
    compile_pipeline(a).map_err(Failure::rejected)
}

fn load_dfa(path: &Path) -> Result<Dfa, Failure> {
    let text = read_text(path)?;
    if text.starts_with("regraph-dfa") {
        return read_dfa(&text)
            .with_context(|| format!("in {}", path.display()))
            .map_err(Failure::usage);
    }
    Ok(run_pipeline(&parse_source(path, &text)?)?.dfa)
}

pub fn compile(input: &Path, out: Option<&Path>, allow_uncertified: bool, timings: bool) -> CmdResult {
    let text = read_text(input)?;
    let source = parse_source(input, &text)?;
    let c = run_pipeline(&source)?;
    let a = c.dfa.automaton();
    println!(
        "states: {} (input {}, subset construction {})",
        a.state_count(),
        c.input.state_count(),
        c.deterministic.state_count()
    );
    print!("{}", c.fec.render(a));
    print!("{}", c.ts.render(a));
    if timings {
        let t = &c.timings;
        for (stage, d) in [
            ("disambiguate", t.disambiguate),
            ("powerset", t.powerset),
            ("minimize", t.minimize),
            ("fec", t.fec),
            ("ts", t.ts),
        ] {
            println!("time {stage}: {:.3} ms", d.as_secs_f64() * 1e3);
        }
    }
    let certified = c.certified();
    if !certified && !allow_uncertified {
        eprintln!("not certified; no DFA written (use --allow-uncertified to write it anyway)");
        return Ok(Status::Rejected);
    }
    if let Some(path) = out {
        write_output(Some(path), &write_dfa(&c.dfa))?;
        let note = if certified { "" } else { " (uncertified)" };
        println!("wrote {}{note}", path.display());
    }
    Ok(Status::Success)
}

pub struct RecognizeFlags {
    pub mode: Mode,
    pub witness: bool,
    pub trace: bool,
    pub check_witness: bool,
    pub allow_uncertified: bool,
    pub budget: u64,
}

/// Labels outside the automaton's vocabulary are accepted here; such graphs
/// are simply rejected by the recognizer.
fn read_graph(arg: &str) -> Result<Graph, Failure> {
    let text = if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(Failure::usage)?;
        s
    } else {
        read_text(Path::new(arg))?
    };
    parse_graph(&text, None)
        .with_context(|| format!("in {arg}"))
        .map_err(Failure::usage)
}

pub fn recognize(automaton: &Path, graph: &str, flags: RecognizeFlags) -> CmdResult {
    let dfa = load_dfa(automaton)?;
    let g = read_graph(graph)?;
    let opts = RunOptions {
        witness: flags.witness,
        trace: flags.trace,
        check_invariants: false,
        budget: flags.budget,
        allow_uncertified: flags.allow_uncertified,
    };
    let r = match flags.mode {
        Mode::Backtracking => recognize_backtracking(dfa.automaton(), &g, &opts)?,
        Mode::Simple => recognize_linear(&dfa, &g, IndexMode::Simple, &opts)?,
        Mode::Efficient => recognize_linear(&dfa, &g, IndexMode::Efficient, &opts)?,
    };
    println!("{}", if r.accepted { "accept" } else { "reject" });
    if let Some(w) = &r.witness {
        if flags.witness {
            println!("witness: {w}");
        }
        if flags.check_witness {
            if !w.certifies(&g).map_err(Failure::internal)? {
                return Err(Failure::internal(anyhow!("witness does not replay to the input graph")));
            }
            println!("replay: isomorphic");
        }
    }
    if flags.trace {
        print!("{}", render_trace(dfa.automaton(), &g, &r.trace));
    }
    Ok(if r.accepted { Status::Success } else { Status::Rejected })
}

fn language(name: &str) -> Result<Language, Failure> {
    name.parse().map_err(Failure::usage)
}

pub fn gen(name: &str, edges: usize, seed: u64, shuffle: Option<u64>, out: Option<&Path>) -> CmdResult {
    let lang = language(name)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = lang.generate(edges, &mut rng).map_err(Failure::usage)?;
    if let Some(s) = shuffle {
        g = shuffle_edges(&g, s);
    }
    write_output(out, &write_graph(&g))?;
    if out.is_some() {
        eprintln!("{lang}: {} nodes, {} edges", g.node_count(), g.edge_count());
    }
    Ok(Status::Success)
}

pub struct BenchArgs {
    pub language: String,
    pub sizes: Vec<usize>,
    pub mode: BenchMode,
    pub reps: usize,
    pub drop: usize,
    pub seed: u64,
    pub csv: Option<PathBuf>,
    pub allow_uncertified: bool,
}

pub fn bench(args: &BenchArgs) -> CmdResult {
    let lang = language(&args.language)?;
    let source = compile_regex_file(lang.regex()).map_err(Failure::internal)?;
    let dfa = run_pipeline(&source)?.dfa;
    let modes: &[IndexMode] = match args.mode {
        BenchMode::Simple => &[IndexMode::Simple],
        BenchMode::Efficient => &[IndexMode::Efficient],
        BenchMode::Both => &[IndexMode::Simple, IndexMode::Efficient],
    };
    let mut records = Vec::new();
    for &mode in modes {
        let mut cfg = BenchConfig::new(lang, args.sizes.clone(), mode);
        cfg.repetitions = args.reps;
        cfg.drop_worst = args.drop;
        cfg.seed = args.seed;
        cfg.allow_uncertified = args.allow_uncertified;
        records.extend(run_bench(&cfg, &dfa).map_err(|e| match e {
            BenchError::Recognize(r) => Failure::from(r),
            BenchError::MemberRejected { .. } => Failure::internal(e),
            other => Failure::usage(other),
        })?);
    }
    print!("{}", render_table(&records));
    if let Some(path) = &args.csv {
        let file = fs::File::create(path)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::usage)?;
        write_csv(&records, file).map_err(Failure::usage)?;
    }
    Ok(Status::Success)
}

pub fn export(input: &Path, out: Option<&Path>) -> CmdResult {
    let text = read_text(input)?;
    let dot = if text.starts_with("regraph-dfa") {
        let dfa = read_dfa(&text)
            .with_context(|| format!("in {}", input.display()))
            .map_err(Failure::usage)?;
        automaton_to_dot(dfa.automaton())
    } else if has_extension(input, "json") || text.trim_start().starts_with('{') {
        let g = parse_graph(&text, None)
            .with_context(|| format!("in {}", input.display()))
            .map_err(Failure::usage)?;
        graph_to_dot(&g)
    } else {
        automaton_to_dot(&parse_source(input, &text)?)
    };
    write_output(out, &dot)?;
    Ok(Status::Success)
}

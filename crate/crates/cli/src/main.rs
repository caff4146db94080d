//! `regraph`: compile graph automata, check them, and recognize graphs.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[global_allocator]
static ALLOC: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[derive(Parser)]
#[command(name = "regraph", version, about = "Finite automata over typed graph symbols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Simple,
    Efficient,
    Backtracking,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchMode {
    Simple,
    Efficient,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a regex file or automaton spec into a certified DFA file.
    Compile {
        /// `.regex` or `.auto` input.
        input: PathBuf,
        /// Output DFA file; the DFA is checked but not written when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Write the DFA even if the FEC or TS check fails.
        #[arg(long)]
        allow_uncertified: bool,
        /// Print per-stage timings.
        #[arg(long)]
        timings: bool,
    },
    /// Decide whether a graph belongs to the language of an automaton.
    Recognize {
        /// DFA file, or a `.regex`/`.auto` file compiled on the fly.
        automaton: PathBuf,
        /// JSON graph file, or `-` for stdin.
        graph: String,
        #[arg(long, value_enum, default_value = "efficient")]
        mode: Mode,
        /// Print the accepting symbol string.
        #[arg(long)]
        witness: bool,
        /// Print one line per executed step.
        #[arg(long)]
        trace: bool,
        /// Re-interpret the witness and check it is isomorphic to the input.
        #[arg(long)]
        check_witness: bool,
        /// Run the linear recognizer without selection certificates.
        #[arg(long)]
        allow_uncertified: bool,
        /// Step limit for backtracking.
        #[arg(long, default_value_t = regraph::recognizer::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Generate a member graph of one of the built-in languages.
    Gen {
        /// abc, spikes, palindromes or wheels.
        language: String,
        /// Largest member with at most this many edges.
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Shuffle the edge list with this seed.
        #[arg(long)]
        shuffle: Option<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Time linear recognition of generated members on shuffled edge lists.
    Bench {
        language: String,
        /// Comma-separated edge counts.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value = "efficient")]
        mode: BenchMode,
        #[arg(long, default_value_t = 40)]
        reps: usize,
        #[arg(long, default_value_t = 4)]
        drop: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output file.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Bench an automaton that fails the FEC or TS check.
        #[arg(long)]
        allow_uncertified: bool,
    },
    /// Write Graphviz DOT for a DFA file, automaton spec, regex or graph.
    Export {
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compile {
            input,
            out,
            allow_uncertified,
            timings,
        } => commands::compile(&input, out.as_deref(), allow_uncertified, timings),
        Command::Recognize {
            automaton,
            graph,
            mode,
            witness,
            trace,
            check_witness,
            allow_uncertified,
            budget,
        } => commands::recognize(
            &automaton,
            &graph,
            commands::RecognizeFlags {
                mode,
                witness: witness || check_witness,
                trace,
                check_witness,
                allow_uncertified,
                budget,
            },
        ),
        Command::Gen {
            language,
            edges,
            seed,
            shuffle,
            out,
        } => commands::gen(&language, edges, seed, shuffle, out.as_deref()),
        Command::Bench {
            language,
            sizes,
            mode,
            reps,
            drop,
            seed,
            csv,
            allow_uncertified,
        } => commands::bench(&commands::BenchArgs {
            language,
            sizes,
            mode,
            reps,
            drop,
            seed,
            csv,
            allow_uncertified,
        }),
        Command::Export { input, out } => commands::export(&input, out.as_deref()),
    };
    match result {
        Ok(status) => status.into(),
        Err(err) => {
            eprintln!("error: {:#}", err.source);
            err.status.into()
        }
    }
}

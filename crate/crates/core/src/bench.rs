//! Timing harness: repeated recognition of shuffled inputs with the worst
//! runs dropped.

use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automaton::Dfa;
use crate::langs::{shuffle_edges, LangError, Language};
use crate::model::Graph;
use crate::recognizer::{IndexMode, LinearRun, RecognizeError, RunOptions};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("repetitions ({repetitions}) must exceed dropped runs ({drop_worst})")]
    BadRepetitions { repetitions: usize, drop_worst: usize },
    #[error(transparent)]
    Recognize(#[from] RecognizeError),
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error("generated {language} member with {edges} edges was rejected")]
    MemberRejected { language: Language, edges: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub language: Language,
    /// Target edge counts; each is rounded down to the nearest member size.
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub drop_worst: usize,
    pub seed: u64,
    pub mode: IndexMode,
    /// Time the linear recognizer on an automaton without certificates.
    pub allow_uncertified: bool,
}

impl BenchConfig {
    pub fn new(language: Language, sizes: Vec<usize>, mode: IndexMode) -> Self {
        Self {
            language,
            sizes,
            repetitions: 40,
            drop_worst: 4,
            seed: 0,
            mode,
            allow_uncertified: false,
        }
    }
}

/// One repetition: its shuffle seed and timings in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRun {
    pub shuffle_seed: u64,
    /// Hash of the shuffled edge order.
    pub fingerprint: u64,
    pub build_s: f64,
    pub exec_s: f64,
    pub dropped: bool,
}

impl BenchRun {
    pub fn total_s(&self) -> f64 {
        self.build_s + self.exec_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub language: Language,
    pub mode: IndexMode,
    pub edges: usize,
    pub mean_s: f64,
    pub build_s: f64,
    pub exec_s: f64,
    pub dropped: usize,
    pub seed: u64,
    pub runs: Vec<BenchRun>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    language: &'a str,
    mode: String,
    edges: usize,
    mean_s: f64,
    build_s: f64,
    exec_s: f64,
    reps: usize,
    dropped: usize,
    seed: u64,
}

/// Order-sensitive hash of a graph's edge list.
pub fn edge_order_fingerprint(g: &Graph) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for (_, label, att) in g.edges() {
        for b in label.bytes() {
            h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
        }
        for &v in att {
            h = (h ^ v as u64).wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Times `cfg.repetitions` runs on fresh shuffles of `g`; the `drop_worst`
/// slowest runs are excluded from the means.
pub fn bench_graph(cfg: &BenchConfig, dfa: &Dfa, g: &Graph) -> Result<BenchRecord, BenchError> {
    if cfg.repetitions <= cfg.drop_worst {
        return Err(BenchError::BadRepetitions {
            repetitions: cfg.repetitions,
            drop_worst: cfg.drop_worst,
        });
    }
    let opts = RunOptions {
        allow_uncertified: cfg.allow_uncertified,
        ..RunOptions::quiet()
    };
    let mut seeds = ChaCha8Rng::seed_from_u64(cfg.seed ^ (g.edge_count() as u64).rotate_left(32));
    let mut runs = Vec::with_capacity(cfg.repetitions);
    for _ in 0..cfg.repetitions {
        let shuffle_seed = seeds.next_u64();
        let shuffled = shuffle_edges(g, shuffle_seed);
        let clock = Instant::now();
        let run = LinearRun::prepare(dfa, &shuffled, cfg.mode, &opts)?;
        let build_s = clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        let r = run.run(&opts)?;
        let exec_s = clock.elapsed().as_secs_f64();
        if !r.accepted {
            return Err(BenchError::MemberRejected {
                language: cfg.language,
                edges: g.edge_count(),
            });
        }
        runs.push(BenchRun {
            shuffle_seed,
            fingerprint: edge_order_fingerprint(&shuffled),
            build_s,
            exec_s,
            dropped: false,
        });
    }
    let mut by_time: Vec<usize> = (0..runs.len()).collect();
    by_time.sort_by(|&i, &j| runs[j].total_s().total_cmp(&runs[i].total_s()));
    for &i in &by_time[..cfg.drop_worst] {
        runs[i].dropped = true;
    }
    let kept: Vec<&BenchRun> = runs.iter().filter(|r| !r.dropped).collect();
    let n = kept.len() as f64;
    let build_s = kept.iter().map(|r| r.build_s).sum::<f64>() / n;
    let exec_s = kept.iter().map(|r| r.exec_s).sum::<f64>() / n;
    Ok(BenchRecord {
        language: cfg.language,
        mode: cfg.mode,
        edges: g.edge_count(),
        mean_s: kept.iter().map(|r| r.total_s()).sum::<f64>() / n,
        build_s,
        exec_s,
        dropped: cfg.drop_worst,
        seed: cfg.seed,
        runs,
    })
}

/// Generates one member per size (outside the timed region) and benchmarks it.
pub fn run_bench(cfg: &BenchConfig, dfa: &Dfa) -> Result<Vec<BenchRecord>, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    cfg.sizes
        .iter()
        .map(|&size| {
            let g = cfg.language.generate(size, &mut rng)?;
            bench_graph(cfg, dfa, &g)
        })
        .collect()
}

pub fn write_csv<W: std::io::Write>(records: &[BenchRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(CsvRow {
            language: r.language.name(),
            mode: r.mode.to_string(),
            edges: r.edges,
            mean_s: r.mean_s,
            build_s: r.build_s,
            exec_s: r.exec_s,
            reps: r.runs.len(),
            dropped: r.dropped,
            seed: r.seed,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn render_table(records: &[BenchRecord]) -> String {
    let mut out = format!(
        "{:<12} {:<9} {:>9} {:>12} {:>12} {:>12} {:>10}\n",
        "language", "mode", "edges", "mean_s", "build_s", "exec_s", "us/edge"
    );
    for r in records {
        let per_edge = if r.edges == 0 { 0.0 } else { r.mean_s * 1e6 / r.edges as f64 };
        out.push_str(&format!(
            "{:<12} {:<9} {:>9} {:>12.6} {:>12.6} {:>12.6} {:>10.3}\n",
            r.language.name(),
            r.mode.to_string(),
            r.edges,
            r.mean_s,
            r.build_s,
            r.exec_s,
            per_edge
        ));
    }
    out
}

/// Least-squares fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
    /// Sum of squared residuals.
    pub sse: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let sst: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r2 = if sst == 0.0 { 1.0 } else { 1.0 - sse / sst };
    LineFit {
        intercept,
        slope,
        r2,
        sse,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::compile;
    use crate::regex::compile_regex_file;

    #[test]
    fn exact_line() {
        let f = fit_line(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]);
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn protocol_on_small_input() {
        let dfa = compile(&compile_regex_file(Language::Abc.regex()).unwrap()).unwrap().dfa;
        let mut cfg = BenchConfig::new(Language::Abc, vec![30, 60], IndexMode::Efficient);
        cfg.repetitions = 6;
        cfg.drop_worst = 2;
        let recs = run_bench(&cfg, &dfa).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].edges, 30);
        assert_eq!(recs[0].runs.iter().filter(|r| r.dropped).count(), 2);
        let mut csv = Vec::new();
        write_csv(&recs, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("language,mode,edges,mean_s,build_s,exec_s,reps,dropped,seed\n"));
        assert!(text.contains("abc,efficient,60,"));
        cfg.drop_worst = 6;
        assert!(matches!(run_bench(&cfg, &dfa), Err(BenchError::BadRepetitions { .. })));
    }
}

//! Desk-scale benchmark harness: run the whole pipeline on seeded synthetic
//! datasets and check measured metrics against per-case bounds. Results land
//! in a results directory as Markdown + CSV.

use crate::annealer::{detect, AnnealOptions, AnnealTrace, TempSchedule};
use crate::cliques::{enumerate_maximal_cliques, CliqueIndex, OpCounter};
use crate::error::Result;
use crate::graph::{Community, DatasetSplit, Graph, NodeId};
use crate::metrics::{report, EvalReport};
use crate::model::ModelParams;
use crate::proposer::{propose_candidates, train_nucleus_proposer, TrainOptions, TrainReport};
use crate::synth::{synth_planted, SynthParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

/// Everything produced by one in-memory pipeline run, kept around so callers
/// can probe the trained model and traces.
pub struct DeskOutcome {
    pub graph: Graph,
    pub comms: Vec<Community>,
    pub split: DatasetSplit,
    pub idx: CliqueIndex,
    pub params: ModelParams,
    pub train_report: TrainReport,
    pub candidates: usize,
    pub predictions: Vec<Vec<NodeId>>,
    pub traces: Vec<AnnealTrace>,
    pub eval: EvalReport,
    pub train_secs: f64,
    pub detect_secs: f64,
}

impl DeskOutcome {
    /// Mean growth steps per annealed candidate.
    pub fn s_avg(&self) -> f64 {
        if self.traces.is_empty() {
            return 0.0;
        }
        self.traces.iter().map(|t| t.growth_steps as f64).sum::<f64>() / self.traces.len() as f64
    }
}

/// Pipeline knobs for desk runs (annealing shares the training encoder cfg).
#[derive(Debug, Clone)]
pub struct DeskOptions {
    pub train: TrainOptions,
    pub anneal: AnnealOptions,
    pub cand_multiplier: usize,
    /// Absolute candidate count override (None = multiplier × test count).
    pub m_total_override: Option<usize>,
    pub train_pct: f64,
    pub valid_pct: f64,
    pub clique_cap: usize,
}

impl Default for DeskOptions {
    fn default() -> Self {
        DeskOptions {
            train: TrainOptions::default(),
            anneal: AnnealOptions::default(),
            cand_multiplier: 4,
            m_total_override: None,
            train_pct: 9.0,
            valid_pct: 1.0,
            clique_cap: 1_000_000,
        }
    }
}

/// Generate → split → enumerate cliques → train → propose → anneal → score
/// against the held-out test communities, all in memory.
pub fn run_desk_case(synth: &SynthParams, seed: u64, opts: &DeskOptions) -> Result<DeskOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (graph, comms) = synth_planted(synth, &mut rng)?;
    let split = DatasetSplit::random(comms.len(), opts.train_pct, opts.valid_pct, &mut rng)?;
    let idx = enumerate_maximal_cliques(&graph, None, opts.clique_cap, &OpCounter::default())?;

    let train_started = Instant::now();
    let mut train_opts = opts.train.clone();
    train_opts.seed = seed;
    let (params, train_report) =
        train_nucleus_proposer(&graph, &idx, &comms, &split.train, &train_opts)?;
    let train_secs = train_started.elapsed().as_secs_f64();

    let detect_started = Instant::now();
    let m_total = opts
        .m_total_override
        .unwrap_or_else(|| (opts.cand_multiplier * split.test.len()).max(split.train.len()));
    let candidates = propose_candidates(
        &params,
        &graph,
        &idx,
        &comms,
        &split.train,
        m_total,
        &train_opts.encoder,
    )?;
    let sizes: Vec<usize> = split.train.iter().map(|&i| comms[i].len()).collect();
    let sched = TempSchedule::from_sizes(&sizes);
    // Identical candidate sets anneal identically (the growth is
    // deterministic), so run each distinct set once.
    let mut seen = std::collections::HashSet::new();
    let cand_sets: Vec<Vec<NodeId>> = candidates
        .entries
        .iter()
        .map(|c| c.members.clone())
        .filter(|m| seen.insert(m.clone()))
        .collect();
    let (predictions, traces) = detect(&params, &graph, &idx, &cand_sets, &sched, &opts.anneal)?;
    let detect_secs = detect_started.elapsed().as_secs_f64();

    let truth: Vec<Vec<NodeId>> = split
        .test
        .iter()
        .map(|&i| comms[i].members.clone())
        .collect();
    let eval = report(&predictions, &truth, Some(graph.n()), None);
    Ok(DeskOutcome {
        graph,
        comms,
        split,
        idx,
        params,
        train_report,
        candidates: cand_sets.len(),
        predictions,
        traces,
        eval,
        train_secs,
        detect_secs,
    })
}

/// One benchmark case: a seeded generator plus metric/step/runtime bounds.
#[derive(Debug, Clone)]
pub struct BenchCase {
    pub name: String,
    pub synth: SynthParams,
    pub seed: u64,
    pub min_f1: Option<f64>,
    pub min_jaccard: Option<f64>,
    pub max_s_avg: Option<f64>,
    /// Wall-clock budget; set at a generous multiple of measured baselines.
    pub max_runtime_s: Option<f64>,
}

/// Default desk suite: the 100-community planted dataset.
pub fn default_suite() -> Vec<BenchCase> {
    vec![BenchCase {
        name: "synth-100".into(),
        synth: SynthParams::default(),
        seed: 20240601,
        min_f1: Some(0.85),
        min_jaccard: Some(0.75),
        max_s_avg: Some(3.0),
        max_runtime_s: Some(3000.0),
    }]
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub name: String,
    pub f1: f64,
    pub jaccard: f64,
    pub onmi: f64,
    pub s_avg: f64,
    pub runtime_s: f64,
    pub failures: Vec<String>,
}

impl BenchRow {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Run every case serially (so timings stay comparable) and collect rows.
pub fn run_bench(cases: &[BenchCase], opts: &DeskOptions) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(cases.len());
    for case in cases {
        let started = Instant::now();
        let outcome = run_desk_case(&case.synth, case.seed, opts)?;
        let runtime = started.elapsed().as_secs_f64();
        let mut failures = Vec::new();
        if let Some(min) = case.min_f1 {
            if outcome.eval.f1 < min {
                failures.push(format!("f1 {:.4} < {min}", outcome.eval.f1));
            }
        }
        if let Some(min) = case.min_jaccard {
            if outcome.eval.jaccard < min {
                failures.push(format!("jaccard {:.4} < {min}", outcome.eval.jaccard));
            }
        }
        if let Some(max) = case.max_s_avg {
            if outcome.s_avg() > max {
                failures.push(format!("s_avg {:.3} > {max}", outcome.s_avg()));
            }
        }
        if let Some(max) = case.max_runtime_s {
            if runtime > max {
                failures.push(format!("runtime {runtime:.1}s > {max}s"));
            }
        }
        rows.push(BenchRow {
            name: case.name.clone(),
            f1: outcome.eval.f1,
            jaccard: outcome.eval.jaccard,
            onmi: outcome.eval.onmi,
            s_avg: outcome.s_avg(),
            runtime_s: runtime,
            failures,
        });
    }
    Ok(rows)
}

/// Pass/fail table rendered for stdout.
pub fn render_table(rows: &[BenchRow]) -> String {
    let mut out = String::from("case\tf1\tjaccard\tonmi\ts_avg\truntime_s\tstatus\n");
    for r in rows {
        writeln!(
            out,
            "{}\t{:.4}\t{:.4}\t{:.4}\t{:.3}\t{:.1}\t{}",
            r.name,
            r.f1,
            r.jaccard,
            r.onmi,
            r.s_avg,
            r.runtime_s,
            if r.passed() {
                "pass".to_string()
            } else {
                format!("FAIL ({})", r.failures.join("; "))
            }
        )
        .unwrap();
    }
    out
}

/// Write Markdown + CSV result files under `dir`.
pub fn write_results(dir: &Path, rows: &[BenchRow]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut md = String::from(
        "# Benchmark results\n\n| case | f1 | jaccard | onmi | s_avg | runtime_s | status |\n|---|---|---|---|---|---|---|\n",
    );
    let mut csv = String::from("case,f1,jaccard,onmi,s_avg,runtime_s,status\n");
    for r in rows {
        let status = if r.passed() {
            "pass".to_string()
        } else {
            format!("fail: {}", r.failures.join("; "))
        };
        writeln!(
            md,
            "| {} | {:.4} | {:.4} | {:.4} | {:.3} | {:.1} | {} |",
            r.name, r.f1, r.jaccard, r.onmi, r.s_avg, r.runtime_s, status
        )
        .unwrap();
        writeln!(
            csv,
            "{},{:.6},{:.6},{:.6},{:.6},{:.3},{}",
            r.name, r.f1, r.jaccard, r.onmi, r.s_avg, r.runtime_s, status
        )
        .unwrap();
    }
    std::fs::write(dir.join("bench.md"), md)?;
    std::fs::write(dir.join("bench.csv"), csv)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_is_a_successful_empty_table() {
        let rows = run_bench(&[], &DeskOptions::default()).unwrap();
        assert!(rows.is_empty());
        let table = render_table(&rows);
        assert_eq!(table.lines().count(), 1); // header only
    }

    #[test]
    fn results_files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![BenchRow {
            name: "case".into(),
            f1: 0.9,
            jaccard: 0.8,
            onmi: 0.7,
            s_avg: 1.5,
            runtime_s: 3.2,
            failures: vec![],
        }];
        write_results(dir.path(), &rows).unwrap();
        assert!(dir.path().join("bench.md").exists());
        let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
        assert!(csv.contains("case,0.900000"));
    }
}

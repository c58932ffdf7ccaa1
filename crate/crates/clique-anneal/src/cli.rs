//! Subcommands and orchestration. Config values come from an optional JSON
//! file with `--kebab-case` flags overriding file values. Exit codes:
//! 0 ok, 1 usage, 2 data error, 3 numeric failure, 4 budget exceeded.

use crate::annealer::{detect, write_traces, AnnealOptions, TempSchedule};
use crate::cliques::{enumerate_maximal_cliques, CliqueIndex, OpCounter};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::graph::{load_communities, write_communities, Community, DatasetSplit, Graph, NodeId};
use crate::metrics;
use crate::model::{load_checkpoint, save_checkpoint, ModelParams};
use crate::proposer::{
    propose_candidates, select_seed_nodes, train_core_filter, train_nucleus_proposer,
};
use crate::synth::{hybrid_merge, prep_filter, synth_planted, PrepParams, SynthParams};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::path::{Path, PathBuf};

/// Worker-count environment variable (overridden by `--workers`).
pub const WORKERS_ENV: &str = "CLIQUE_ANNEAL_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "clique-anneal",
    version,
    about = "Semi-supervised overlapping community detection: train a clique-aware \
             subgraph encoder, propose clique cores, grow them by annealing, and \
             score the predicted cover."
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Generate a seeded synthetic planted-community dataset (writes the
    /// edge list, community file, and split file).
    Synth(CommonArgs),
    /// Preprocess a labeled corpus: percentile size cut, community sampling,
    /// optional hybrid merge with a second graph.
    Prep(CommonArgs),
    /// Train the encoder, interface/integrity heads, and core filter;
    /// writes a checkpoint.
    Train(CommonArgs),
    /// Propose clique candidates and grow them into predicted communities.
    Detect(CommonArgs),
    /// Score a predictions file against a ground-truth community file.
    Eval(EvalArgs),
    /// train → detect → eval against the held-out test communities.
    Pipeline(CommonArgs),
}

/// Flags mirror config keys; defaults in brackets.
#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// JSON config file; explicit flags override file values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Edge list path (output for synth, input otherwise)
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Community file path (output for synth, input otherwise)
    #[arg(long)]
    pub communities: Option<PathBuf>,
    /// Split file path (output for synth, input for train/detect/pipeline)
    #[arg(long)]
    pub split: Option<PathBuf>,
    /// Checkpoint path (output for train, input for detect)
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Predictions file path (detect/pipeline output)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Preprocessed edge list output (prep)
    #[arg(long)]
    pub out_graph: Option<PathBuf>,
    /// Preprocessed community file output (prep)
    #[arg(long)]
    pub out_communities: Option<PathBuf>,
    /// Second edge list for a hybrid merge (prep)
    #[arg(long)]
    pub second_graph: Option<PathBuf>,
    /// Annealing trace output, JSON lines (detect/pipeline)
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Machine-readable evaluation report (pipeline)
    #[arg(long)]
    pub report_json: Option<PathBuf>,
    /// Candidate dump: community id, distance, members per line (detect)
    #[arg(long)]
    pub candidates_dump: Option<PathBuf>,
    /// Clique cache file; stale caches are rejected by graph hash
    #[arg(long)]
    pub clique_cache: Option<PathBuf>,
    /// Training-curve CSV output (train/pipeline)
    #[arg(long)]
    pub train_log: Option<PathBuf>,
    /// Embedding width [64]
    #[arg(long)]
    pub dim: Option<usize>,
    /// GCN propagation layers [3]
    #[arg(long)]
    pub gcn_layers: Option<usize>,
    /// Encoder training epochs [10]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Integrity-head training epochs [10]
    #[arg(long)]
    pub integrity_epochs: Option<usize>,
    /// Adam learning rate [1e-3]
    #[arg(long)]
    pub lr: Option<f64>,
    /// Hinge margin for the oversized negatives [0.1]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Energy-loss weight; set all three γ to skip auto-balancing
    #[arg(long)]
    pub gamma_e: Option<f64>,
    /// Consistency-loss weight
    #[arg(long)]
    pub gamma_c: Option<f64>,
    /// Interface-loss weight
    #[arg(long)]
    pub gamma_i: Option<f64>,
    /// Top cliques folded into the consistency target [2]
    #[arg(long)]
    pub lambda_clq: Option<usize>,
    /// Distortion percentage for replace/remove sampling [25]
    #[arg(long)]
    pub m_pct: Option<u32>,
    /// Ball curvature c [1.0]
    #[arg(long)]
    pub curvature: Option<f64>,
    /// GCN activation: relu | linear [relu]
    #[arg(long)]
    pub gcn_activation: Option<String>,
    /// Init gain of the projection layer [0.02]
    #[arg(long)]
    pub proj_init_gain: Option<f64>,
    /// Candidates per test community [4]
    #[arg(long)]
    pub cand_multiplier: Option<usize>,
    /// Absolute candidate count, overriding the multiplier
    #[arg(long)]
    pub m_override: Option<usize>,
    /// Growth-step budget per candidate [20]
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Core-relocation budget per candidate [0]
    #[arg(long)]
    pub max_transitions: Option<usize>,
    /// Seed-neighborhood hops for the core filter [2]
    #[arg(long)]
    pub hops: Option<usize>,
    /// Graphs smaller than this skip the core filter [50000]
    #[arg(long)]
    pub core_filter_min_nodes: Option<usize>,
    /// Top-scored nodes kept when the core filter is active [5000]
    #[arg(long)]
    pub core_filter_top_m: Option<usize>,
    /// Full-batch steps for the core classifier [200]
    #[arg(long)]
    pub core_filter_steps: Option<usize>,
    /// Abort when the clique count exceeds this [1000000]
    #[arg(long)]
    pub clique_cap: Option<usize>,
    /// Emit raw candidates as predictions (no annealing)
    #[arg(long)]
    pub np_only: bool,
    /// RNG seed (required for synth/prep/train/detect/pipeline)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [env CLIQUE_ANNEAL_WORKERS, else all cores]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Context-only reference F1 echoed in the report footer
    #[arg(long)]
    pub reference_f1: Option<f64>,
    /// Synthetic: community count [100]
    #[arg(long)]
    pub n_comm: Option<usize>,
    /// Synthetic: minimum community size [6]
    #[arg(long)]
    pub size_min: Option<usize>,
    /// Synthetic: maximum community size [12]
    #[arg(long)]
    pub size_max: Option<usize>,
    /// Synthetic: intra-community edge probability [0.9]
    #[arg(long)]
    pub p_intra: Option<f64>,
    /// Synthetic: inter-community edge probability [0.001]
    #[arg(long)]
    pub p_inter: Option<f64>,
    /// Synthetic: per-community intra-density jitter below p-intra [0.25]
    #[arg(long)]
    pub p_jitter: Option<f64>,
    /// Split: training percentage [9]
    #[arg(long)]
    pub train_pct: Option<f64>,
    /// Split: validation percentage [1]
    #[arg(long)]
    pub valid_pct: Option<f64>,
    /// Prep: drop communities above this size percentile [90]
    #[arg(long)]
    pub percentile: Option<f64>,
    /// Prep: communities sampled after the cut [1000]
    #[arg(long)]
    pub sample: Option<usize>,
    /// Prep: cross-links added in a hybrid merge [5000]
    #[arg(long)]
    pub cross_links: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Predicted cover: one community per line, whitespace-separated ids
    #[arg(long)]
    pub predictions: PathBuf,
    /// Ground-truth cover in the same format
    #[arg(long)]
    pub truth: PathBuf,
    /// Machine-readable report output
    #[arg(long)]
    pub report_json: Option<PathBuf>,
    /// Context-only reference F1 echoed in the report footer
    #[arg(long)]
    pub reference_f1: Option<f64>,
}

macro_rules! override_fields {
    ($cfg:ident, $args:ident: $($field:ident),* $(,)?) => {
        $(if $args.$field.is_some() { $cfg.$field = $args.$field.clone(); })*
    };
}

impl CommonArgs {
    /// Merge the config file (if any) with flag overrides.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let args = self;
        override_fields!(cfg, args:
            graph, communities, split, checkpoint, output, out_graph, out_communities,
            second_graph, trace, report_json, candidates_dump, clique_cache, train_log,
            gamma_e, gamma_c, gamma_i, m_override, seed, workers, reference_f1,
        );
        macro_rules! override_plain {
            ($($field:ident),* $(,)?) => {
                $(if let Some(v) = args.$field.clone() { cfg.$field = v; })*
            };
        }
        override_plain!(
            dim, gcn_layers, epochs, integrity_epochs, lr, alpha, lambda_clq, m_pct,
            curvature, gcn_activation, proj_init_gain, cand_multiplier, max_steps,
            max_transitions, hops, core_filter_min_nodes, core_filter_top_m,
            core_filter_steps, clique_cap, n_comm, size_min, size_max, p_intra, p_inter,
            p_jitter, train_pct, valid_pct, percentile, sample, cross_links,
        );
        if args.np_only {
            cfg.np_only = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn init_workers(cfg: &RunConfig) {
    let from_env = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = cfg.workers.or(from_env) {
        // Ignore re-initialization (tests share one process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Synth(args) => cmd_synth(&args.resolve()?),
        Cmd::Prep(args) => cmd_prep(&args.resolve()?),
        Cmd::Train(args) => cmd_train(&args.resolve()?),
        Cmd::Detect(args) => cmd_detect(&args.resolve()?),
        Cmd::Eval(args) => cmd_eval(&args),
        Cmd::Pipeline(args) => cmd_pipeline(&args.resolve()?),
    }
}

fn load_dataset(cfg: &RunConfig) -> Result<(Graph, Vec<Community>, DatasetSplit)> {
    let graph_path = cfg.require_path("graph", &cfg.graph)?;
    let comm_path = cfg.require_path("communities", &cfg.communities)?;
    let split_path = cfg.require_path("split", &cfg.split)?;
    let (g, stats) = Graph::load_edge_list(&graph_path)?;
    if stats.self_loops_dropped > 0 || stats.duplicate_edges_dropped > 0 {
        eprintln!(
            "warning: dropped {} self-loops, {} duplicate edges",
            stats.self_loops_dropped, stats.duplicate_edges_dropped
        );
    }
    let comms = load_communities(&comm_path, &g)?;
    let split = DatasetSplit::load(&split_path)?;
    for &i in split.train.iter().chain(&split.valid).chain(&split.test) {
        if i >= comms.len() {
            return Err(Error::Data(format!(
                "split references community {i} but only {} exist",
                comms.len()
            )));
        }
    }
    Ok((g, comms, split))
}

/// Enumerate (or load from cache) the maximal cliques, restricted to the
/// core-filter seed neighborhood on large graphs.
fn build_clique_index(
    cfg: &RunConfig,
    g: &Graph,
    core_params: &ModelParams,
) -> Result<CliqueIndex> {
    if let Some(cache) = &cfg.clique_cache {
        if cache.exists() {
            match CliqueIndex::load_cache(cache, g) {
                Ok(idx) => return Ok(idx),
                Err(e) => eprintln!("warning: ignoring clique cache: {e}"),
            }
        }
    }
    let restrict: Option<Vec<NodeId>> = if g.n() >= cfg.core_filter_min_nodes {
        Some(select_seed_nodes(
            core_params,
            g,
            cfg.core_filter_top_m,
            cfg.hops,
        )?)
    } else {
        None
    };
    let idx = enumerate_maximal_cliques(g, restrict.as_deref(), cfg.clique_cap, &OpCounter::default())?;
    if let Some(cache) = &cfg.clique_cache {
        idx.save_cache(cache, g)?;
    }
    Ok(idx)
}

fn cmd_synth(cfg: &RunConfig) -> Result<()> {
    init_workers(cfg);
    let seed = cfg.require_seed()?;
    let graph_path = cfg.require_path("graph", &cfg.graph)?;
    let comm_path = cfg.require_path("communities", &cfg.communities)?;
    let split_path = cfg.require_path("split", &cfg.split)?;
    let params = SynthParams {
        n_comm: cfg.n_comm,
        size_min: cfg.size_min,
        size_max: cfg.size_max,
        p_intra: cfg.p_intra,
        p_inter: cfg.p_inter,
        p_jitter: cfg.p_jitter,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (g, comms) = synth_planted(&params, &mut rng)?;
    let split = DatasetSplit::random(comms.len(), cfg.train_pct, cfg.valid_pct, &mut rng)?;
    g.write_edge_list(&graph_path)?;
    let covers: Vec<Vec<NodeId>> = comms.iter().map(|c| c.members.clone()).collect();
    write_communities(&comm_path, &g, &covers)?;
    split.save(&split_path)?;
    println!(
        "synth: {} nodes, {} edges, {} communities ({} train / {} valid / {} test)",
        g.n(),
        g.edge_count(),
        comms.len(),
        split.train.len(),
        split.valid.len(),
        split.test.len()
    );
    Ok(())
}

fn cmd_prep(cfg: &RunConfig) -> Result<()> {
    init_workers(cfg);
    let seed = cfg.require_seed()?;
    let graph_path = cfg.require_path("graph", &cfg.graph)?;
    let comm_path = cfg.require_path("communities", &cfg.communities)?;
    let out_graph = cfg.require_path("out-graph", &cfg.out_graph)?;
    let out_comms = cfg.require_path("out-communities", &cfg.out_communities)?;
    let (g, _) = Graph::load_edge_list(&graph_path)?;
    let comms = load_communities(&comm_path, &g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prep = PrepParams {
        percentile: cfg.percentile,
        sample: cfg.sample,
        cross_links: cfg.cross_links,
    };
    let kept = prep_filter(&comms, &prep, &mut rng)?;
    let (out_g, out_kept) = match &cfg.second_graph {
        Some(second) => {
            let (b, _) = Graph::load_edge_list(second)?;
            hybrid_merge(&g, &kept, &b, prep.cross_links, &mut rng)?
        }
        None => (g, kept),
    };
    out_g.write_edge_list(&out_graph)?;
    let covers: Vec<Vec<NodeId>> = out_kept.iter().map(|c| c.members.clone()).collect();
    write_communities(&out_comms, &out_g, &covers)?;
    println!(
        "prep: kept {} communities over {} nodes",
        out_kept.len(),
        out_g.n()
    );
    Ok(())
}

fn cmd_train(cfg: &RunConfig) -> Result<()> {
    init_workers(cfg);
    let seed = cfg.require_seed()?;
    let ckpt_path = cfg.require_path("checkpoint", &cfg.checkpoint)?;
    let (g, comms, split) = load_dataset(cfg)?;

    // Core filter first: on large graphs it restricts clique enumeration.
    let mut core_params = ModelParams::zeros_with_layers(cfg.dim, cfg.gcn_layers);
    train_core_filter(
        &g,
        &comms,
        &split.train,
        &mut core_params,
        cfg.core_filter_steps,
        cfg.lr,
    )?;
    let idx = build_clique_index(cfg, &g, &core_params)?;

    let opts = cfg.train_options()?;
    let (mut params, report) = train_nucleus_proposer(&g, &idx, &comms, &split.train, &opts)?;
    params.core_w = core_params.core_w;
    params.core_b = core_params.core_b;
    if !report.skipped_communities.is_empty() {
        eprintln!(
            "warning: {} training communities excluded from sampling (disconnected): {:?}",
            report.skipped_communities.len(),
            report.skipped_communities
        );
    }
    save_checkpoint(&ckpt_path, &params, &cfg.echo(), seed)?;
    g.write_id_map(&ckpt_path.with_extension("idmap"))?;
    if let Some(log) = &cfg.train_log {
        report.write_csv(log)?;
    }
    let last = report.epochs.last().copied().unwrap_or_default();
    println!(
        "train: {} cliques, gammas ({:.4}, {:.4}, {:.4}), final losses E {:.4} C {:.4} I {:.4}",
        idx.len(),
        report.gamma.0,
        report.gamma.1,
        report.gamma.2,
        last.energy,
        last.consistency,
        last.interface
    );
    Ok(())
}

fn cmd_detect(cfg: &RunConfig) -> Result<()> {
    init_workers(cfg);
    cfg.require_seed()?;
    let ckpt_path = cfg.require_path("checkpoint", &cfg.checkpoint)?;
    let out_path = cfg.require_path("output", &cfg.output)?;
    let (g, comms, split) = load_dataset(cfg)?;
    let ckpt = load_checkpoint(&ckpt_path)?;
    let params = ckpt.params;
    let enc = cfg.encoder_cfg()?;

    let idx = build_clique_index(cfg, &g, &params)?;
    let m_total = cfg
        .m_override
        .unwrap_or_else(|| (cfg.cand_multiplier * split.test.len()).max(split.train.len()));
    let candidates = propose_candidates(&params, &g, &idx, &comms, &split.train, m_total, &enc)?;
    if candidates.truncated {
        eprintln!(
            "warning: fewer cliques ({}) than requested per community ({})",
            idx.len(),
            candidates.per_community
        );
    }
    if let Some(dump) = &cfg.candidates_dump {
        candidates.dump(dump, &g)?;
    }
    let cand_sets: Vec<Vec<NodeId>> = candidates
        .entries
        .iter()
        .map(|c| c.members.clone())
        .collect();

    let (preds, s_avg) = if cfg.np_only {
        let mut seen = std::collections::HashSet::new();
        let mut preds = Vec::new();
        for c in &cand_sets {
            if seen.insert(c.clone()) {
                preds.push(c.clone());
            }
        }
        (preds, 0.0)
    } else {
        let sizes: Vec<usize> = split.train.iter().map(|&i| comms[i].len()).collect();
        let sched = TempSchedule::from_sizes(&sizes);
        let opts = AnnealOptions {
            max_steps: cfg.max_steps,
            max_transitions: cfg.max_transitions,
            encoder: enc,
        };
        let (preds, traces) = detect(&params, &g, &idx, &cand_sets, &sched, &opts)?;
        if let Some(trace_path) = &cfg.trace {
            write_traces(trace_path, &traces)?;
        }
        let s_avg = if traces.is_empty() {
            0.0
        } else {
            traces.iter().map(|t| t.growth_steps as f64).sum::<f64>() / traces.len() as f64
        };
        (preds, s_avg)
    };
    write_communities(&out_path, &g, &preds)?;
    println!(
        "detect: {} candidates → {} predictions (s_avg {:.3})",
        cand_sets.len(),
        preds.len(),
        s_avg
    );
    Ok(())
}

/// Parse a cover file over arbitrary integer ids (no graph needed).
fn parse_cover(path: &Path) -> Result<Vec<Vec<u64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut members: Vec<u64> = trimmed
            .split_whitespace()
            .map(|t| {
                t.parse().map_err(|_| {
                    Error::Data(format!(
                        "{}:{}: malformed node id {t:?}",
                        path.display(),
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<_>>()?;
        members.sort_unstable();
        members.dedup();
        out.push(members);
    }
    Ok(out)
}

/// Remap two covers over arbitrary ids onto a dense shared universe.
fn densify(
    pred: &[Vec<u64>],
    truth: &[Vec<u64>],
) -> (Vec<Vec<NodeId>>, Vec<Vec<NodeId>>, usize) {
    let mut map: HashMap<u64, NodeId> = HashMap::new();
    let mut next: NodeId = 0;
    let mut convert = |cover: &[Vec<u64>], map: &mut HashMap<u64, NodeId>| -> Vec<Vec<NodeId>> {
        cover
            .iter()
            .map(|c| {
                let mut m: Vec<NodeId> = c
                    .iter()
                    .map(|&v| {
                        *map.entry(v).or_insert_with(|| {
                            let id = next;
                            next += 1;
                            id
                        })
                    })
                    .collect();
                m.sort_unstable();
                m
            })
            .collect()
    };
    let p = convert(pred, &mut map);
    let t = convert(truth, &mut map);
    (p, t, next as usize)
}

fn eval_files(
    pred_path: &Path,
    truth_path: &Path,
    reference_f1: Option<f64>,
    report_json: Option<&Path>,
) -> Result<metrics::EvalReport> {
    let pred_raw = parse_cover(pred_path)?;
    let truth_raw = parse_cover(truth_path)?;
    let (pred, truth, n) = densify(&pred_raw, &truth_raw);
    let report = metrics::report(&pred, &truth, Some(n), reference_f1);
    if let Some(path) = report_json {
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::Data(format!("report serialization: {e}")))?;
        std::fs::write(path, json)?;
    }
    Ok(report)
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let report = eval_files(
        &args.predictions,
        &args.truth,
        args.reference_f1,
        args.report_json.as_deref(),
    )?;
    print!("{}", report.render());
    Ok(())
}

fn cmd_pipeline(cfg: &RunConfig) -> Result<()> {
    cmd_train(cfg)?;
    cmd_detect(cfg)?;
    // Score against the held-out test communities.
    let (g, comms, split) = load_dataset(cfg)?;
    let out_path = cfg.require_path("output", &cfg.output)?;
    let truth_path = out_path.with_extension("truth");
    let covers: Vec<Vec<NodeId>> = split
        .test
        .iter()
        .map(|&i| comms[i].members.clone())
        .collect();
    write_communities(&truth_path, &g, &covers)?;
    let report = eval_files(
        &out_path,
        &truth_path,
        cfg.reference_f1,
        cfg.report_json.as_deref(),
    )?;
    print!("{}", report.render());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("cfg.json");
        std::fs::write(&cfg_path, r#"{"epochs": 3, "alpha": 0.5}"#).unwrap();
        let args = CommonArgs {
            config: Some(cfg_path),
            epochs: Some(7),
            ..CommonArgs::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.epochs, 7); // flag wins
        assert_eq!(cfg.alpha, 0.5); // file value kept
        assert_eq!(cfg.dim, 64); // default kept
    }

    #[test]
    fn missing_seed_is_a_usage_error() {
        let args = CommonArgs::default();
        let cfg = args.resolve().unwrap();
        let err = cmd_synth(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn parse_cover_skips_blank_lines_and_dedups() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.txt");
        std::fs::write(&p, "5 5 9\n\n1 2\n").unwrap();
        let cover = parse_cover(&p).unwrap();
        assert_eq!(cover, vec![vec![5, 9], vec![1, 2]]);
    }

    #[test]
    fn eval_files_perfect_match() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.txt");
        std::fs::write(&p, "1 2 3\n7 9\n").unwrap();
        let report = eval_files(&p, &p, None, None).unwrap();
        assert_eq!((report.f1, report.jaccard, report.onmi), (1.0, 1.0, 1.0));
    }
}

//! Run configuration: JSON config file with CLI flag overrides. Every field
//! has a default; the CLI mirrors keys as `--kebab-case` flags.

use crate::encoder::EncoderCfg;
use crate::error::{Error, Result};
use crate::losses::LossWeights;
use crate::proposer::TrainOptions;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

fn d_dim() -> usize {
    64
}
fn d_layers() -> usize {
    3
}
fn d_epochs() -> usize {
    10
}
fn d_lr() -> f64 {
    1e-3
}
fn d_alpha() -> f64 {
    0.1
}
fn d_lambda() -> usize {
    2
}
fn d_m_pct() -> u32 {
    25
}
fn d_curvature() -> f64 {
    1.0
}
fn d_activation() -> String {
    "relu".into()
}
fn d_proj_gain() -> f64 {
    2e-2
}
fn d_cand_multiplier() -> usize {
    4
}
fn d_max_steps() -> usize {
    20
}
fn d_max_transitions() -> usize {
    0
}
fn d_hops() -> usize {
    2
}
fn d_core_min_nodes() -> usize {
    50_000
}
fn d_core_top_m() -> usize {
    5_000
}
fn d_core_steps() -> usize {
    200
}
fn d_clique_cap() -> usize {
    1_000_000
}
fn d_n_comm() -> usize {
    100
}
fn d_size_min() -> usize {
    6
}
fn d_size_max() -> usize {
    12
}
fn d_p_intra() -> f64 {
    0.9
}
fn d_p_inter() -> f64 {
    0.001
}
fn d_p_jitter() -> f64 {
    0.25
}
fn d_train_pct() -> f64 {
    9.0
}
fn d_valid_pct() -> f64 {
    1.0
}
fn d_percentile() -> f64 {
    90.0
}
fn d_sample() -> usize {
    1000
}
fn d_cross_links() -> usize {
    5000
}

/// Every knob of the toolkit. Paths are inputs or outputs depending on the
/// subcommand (documented on the CLI flags).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    // paths
    pub graph: Option<PathBuf>,
    pub communities: Option<PathBuf>,
    pub split: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub out_graph: Option<PathBuf>,
    pub out_communities: Option<PathBuf>,
    pub second_graph: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub report_json: Option<PathBuf>,
    pub candidates_dump: Option<PathBuf>,
    pub clique_cache: Option<PathBuf>,
    pub results_dir: Option<PathBuf>,
    pub train_log: Option<PathBuf>,

    // model / training
    #[serde(default = "d_dim")]
    pub dim: usize,
    #[serde(default = "d_layers")]
    pub gcn_layers: usize,
    #[serde(default = "d_epochs")]
    pub epochs: usize,
    #[serde(default = "d_epochs")]
    pub integrity_epochs: usize,
    #[serde(default = "d_lr")]
    pub lr: f64,
    #[serde(default = "d_alpha")]
    pub alpha: f64,
    /// All three set → fixed weights; otherwise balanced on the first batch.
    pub gamma_e: Option<f64>,
    pub gamma_c: Option<f64>,
    pub gamma_i: Option<f64>,
    #[serde(default = "d_lambda")]
    pub lambda_clq: usize,
    #[serde(default = "d_m_pct")]
    pub m_pct: u32,
    #[serde(default = "d_curvature")]
    pub curvature: f64,
    /// "relu" (default) or "linear" GCN propagations.
    #[serde(default = "d_activation")]
    pub gcn_activation: String,
    #[serde(default = "d_proj_gain")]
    pub proj_init_gain: f64,

    // candidate selection / annealing
    #[serde(default = "d_cand_multiplier")]
    pub cand_multiplier: usize,
    pub m_override: Option<usize>,
    #[serde(default = "d_max_steps")]
    pub max_steps: usize,
    #[serde(default = "d_max_transitions")]
    pub max_transitions: usize,
    #[serde(default = "d_hops")]
    pub hops: usize,
    #[serde(default = "d_core_min_nodes")]
    pub core_filter_min_nodes: usize,
    #[serde(default = "d_core_top_m")]
    pub core_filter_top_m: usize,
    #[serde(default = "d_core_steps")]
    pub core_filter_steps: usize,
    #[serde(default = "d_clique_cap")]
    pub clique_cap: usize,
    #[serde(default)]
    pub np_only: bool,

    // run control
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub reference_f1: Option<f64>,

    // synthetic generator
    #[serde(default = "d_n_comm")]
    pub n_comm: usize,
    #[serde(default = "d_size_min")]
    pub size_min: usize,
    #[serde(default = "d_size_max")]
    pub size_max: usize,
    #[serde(default = "d_p_intra")]
    pub p_intra: f64,
    #[serde(default = "d_p_inter")]
    pub p_inter: f64,
    #[serde(default = "d_p_jitter")]
    pub p_jitter: f64,
    #[serde(default = "d_train_pct")]
    pub train_pct: f64,
    #[serde(default = "d_valid_pct")]
    pub valid_pct: f64,

    // prep transform
    #[serde(default = "d_percentile")]
    pub percentile: f64,
    #[serde(default = "d_sample")]
    pub sample: usize,
    #[serde(default = "d_cross_links")]
    pub cross_links: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults are total")
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Usage(format!("config {}: {e}", path.display())))
    }

    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn encoder_cfg(&self) -> Result<EncoderCfg> {
        let gcn_relu = match self.gcn_activation.as_str() {
            "relu" => true,
            "linear" => false,
            other => {
                return Err(Error::Usage(format!(
                    "gcn-activation must be 'relu' or 'linear', got {other:?}"
                )))
            }
        };
        Ok(EncoderCfg {
            curvature: self.curvature,
            gcn_relu,
        })
    }

    pub fn weights(&self) -> LossWeights {
        LossWeights {
            gamma_e: self.gamma_e.unwrap_or(1.0),
            gamma_c: self.gamma_c.unwrap_or(1.0),
            gamma_i: self.gamma_i.unwrap_or(1.0),
            alpha: self.alpha,
        }
    }

    pub fn gammas(&self) -> Option<(f64, f64, f64)> {
        match (self.gamma_e, self.gamma_c, self.gamma_i) {
            (Some(e), Some(c), Some(i)) => Some((e, c, i)),
            _ => None,
        }
    }

    pub fn train_options(&self) -> Result<TrainOptions> {
        Ok(TrainOptions {
            dim: self.dim,
            gcn_layers: self.gcn_layers,
            proj_init_gain: self.proj_init_gain,
            epochs: self.epochs,
            integrity_epochs: self.integrity_epochs,
            lr: self.lr,
            m_pct: self.m_pct,
            lambda_clq: self.lambda_clq,
            alpha: self.alpha,
            gammas: self.gammas(),
            encoder: self.encoder_cfg()?,
            seed: self.require_seed()?,
        })
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Usage("--seed is required for this command".into()))
    }

    pub fn require_path(&self, field: &str, value: &Option<PathBuf>) -> Result<PathBuf> {
        value
            .clone()
            .ok_or_else(|| Error::Usage(format!("--{field} is required for this command")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.gcn_layers == 0 {
            return Err(Error::Usage("dim and gcn-layers must be positive".into()));
        }
        if !(0.0..=100.0).contains(&self.train_pct)
            || !(0.0..=100.0).contains(&self.valid_pct)
            || self.train_pct + self.valid_pct > 100.0
        {
            return Err(Error::Usage("split percentages must fit in [0, 100]".into()));
        }
        if self.m_pct > 100 {
            return Err(Error::Usage("m-pct is a percentage".into()));
        }
        if self.curvature <= 0.0 {
            return Err(Error::Usage("curvature must be positive".into()));
        }
        if !(0.0..=100.0).contains(&self.percentile) {
            return Err(Error::Usage("percentile must lie in [0, 100]".into()));
        }
        self.encoder_cfg().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_documented_values() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.dim, 64);
        assert_eq!(cfg.gcn_layers, 3);
        assert_eq!(cfg.epochs, 10);
        assert_eq!(cfg.lr, 1e-3);
        assert_eq!(cfg.alpha, 0.1);
        assert_eq!(cfg.lambda_clq, 2);
        assert_eq!(cfg.m_pct, 25);
        assert_eq!(cfg.curvature, 1.0);
        assert_eq!(cfg.cand_multiplier, 4);
        assert_eq!(cfg.max_steps, 20);
        assert_eq!(cfg.max_transitions, 0);
        assert_eq!(cfg.hops, 2);
        assert_eq!(cfg.core_filter_min_nodes, 50_000);
        assert_eq!(cfg.clique_cap, 1_000_000);
        assert!(cfg.gammas().is_none());
    }

    #[test]
    fn config_echo_is_deterministic() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.echo(), cfg.echo());
        let parsed: RunConfig = serde_json::from_str(&cfg.echo()).unwrap();
        assert_eq!(parsed.echo(), cfg.echo());
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = serde_json::from_str::<RunConfig>("{\"not_a_key\": 1}");
        assert!(err.is_err());
    }

    #[test]
    fn activation_validation() {
        let mut cfg = RunConfig::default();
        cfg.gcn_activation = "linear".into();
        assert!(!cfg.encoder_cfg().unwrap().gcn_relu);
        cfg.gcn_activation = "gelu".into();
        assert!(cfg.encoder_cfg().is_err());
    }
}

//! Experiment configuration, deserialized from JSON for the `bench`
//! subcommand.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knn::Hyperparams;
use crate::model_selection::HyperGrid;
use crate::panel::SynthConfig;
use crate::solver::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mean,
    Opt,
    Med,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Mean => "mean",
            Method::Opt => "opt",
            Method::Med => "med",
        }
    }
}

/// Where the benchmark data comes from: a generator config or a CSV (with an
/// optional outcome-label CSV for the downstream task).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DatasetSource {
    Synthetic {
        #[serde(default)]
        config: SynthConfig,
    },
    Csv {
        path: PathBuf,
        schema: PathBuf,
        #[serde(default)]
        labels: Option<PathBuf>,
    },
}

fn default_cv_folds() -> usize {
    3
}

fn default_cv_max_sweeps() -> usize {
    10
}

fn default_cv_rel_tolerance() -> f64 {
    1e-3
}

/// Cross-validation settings for the med method. Fold solves use a lighter
/// solver (no perturbed restarts, fewer sweeps, looser tolerance): CV only
/// ranks grid points against each other, and the reduced depth keeps the
/// grid sweep affordable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvConfig {
    pub enabled: bool,
    #[serde(default = "default_cv_folds")]
    pub folds: usize,
    #[serde(default)]
    pub grid: HyperGrid,
    #[serde(default)]
    pub restarts: usize,
    #[serde(default = "default_cv_max_sweeps")]
    pub max_sweeps: usize,
    #[serde(default = "default_cv_rel_tolerance")]
    pub rel_tolerance: f64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            enabled: false,
            folds: default_cv_folds(),
            grid: HyperGrid::default(),
            restarts: 0,
            max_sweeps: default_cv_max_sweeps(),
            rel_tolerance: default_cv_rel_tolerance(),
        }
    }
}

fn default_fractions() -> Vec<f64> {
    vec![0.1, 0.2, 0.3, 0.4, 0.5]
}

fn default_opp() -> Vec<usize> {
    vec![1, 2, 4, 10]
}

fn default_opp_fraction() -> f64 {
    0.5
}

fn default_seeds() -> Vec<u64> {
    (0..20).collect()
}

fn default_k() -> usize {
    10
}

fn default_alpha() -> f64 {
    0.5
}

fn default_lambda() -> f64 {
    0.5
}

fn default_restarts() -> usize {
    5
}

fn default_max_sweeps() -> usize {
    50
}

fn default_rel_tolerance() -> f64 {
    1e-6
}

fn default_reg_grid() -> Vec<f64> {
    crate::eval::DEFAULT_REG_GRID.to_vec()
}

/// Solver knobs shared by the experiment conditions; `alpha`/`lambda` are the
/// fixed shared scalars used for the med method when CV is disabled.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSettings {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_sweeps")]
    pub max_sweeps: usize,
    #[serde(default = "default_rel_tolerance")]
    pub rel_tolerance: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            k: default_k(),
            alpha: default_alpha(),
            lambda: default_lambda(),
            restarts: default_restarts(),
            max_sweeps: default_max_sweeps(),
            rel_tolerance: default_rel_tolerance(),
        }
    }
}

impl SolverSettings {
    pub fn config(&self, p: usize, alpha: f64, lambda: f64, seed: u64) -> SolverConfig {
        self.config_with(Hyperparams::uniform(p, alpha, lambda, self.k), seed)
    }

    pub fn config_with(&self, hyperparams: Hyperparams, seed: u64) -> SolverConfig {
        SolverConfig {
            hyperparams,
            max_sweeps: self.max_sweeps,
            rel_tolerance: self.rel_tolerance,
            n_restarts: self.restarts,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub methods: Vec<Method>,
    /// Missing fractions for the missingness sweep; empty skips the sweep.
    #[serde(default = "default_fractions")]
    pub fractions: Vec<f64>,
    /// Observations-per-individual values for the truncation sweep; empty
    /// skips the sweep.
    #[serde(default = "default_opp")]
    pub opp: Vec<usize>,
    /// Missing fraction held fixed during the truncation sweep.
    #[serde(default = "default_opp_fraction")]
    pub opp_fraction: f64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub cv: CvConfig,
    /// Regularization grid for the downstream logistic model.
    #[serde(default = "default_reg_grid")]
    pub reg_grid: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Usage(format!("{}: {}", path.display(), e)))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Usage("methods list must be non-empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Usage("seeds list must be non-empty".into()));
        }
        if self.fractions.iter().any(|f| !(0.0 < *f && *f <= 1.0)) {
            return Err(Error::Usage("missing fractions must lie in (0, 1]".into()));
        }
        if self.opp_fraction.is_nan() || self.opp_fraction <= 0.0 || self.opp_fraction > 1.0 {
            return Err(Error::Usage("opp_fraction must lie in (0, 1]".into()));
        }
        if self.opp.contains(&0) {
            return Err(Error::Usage("opp values must be at least 1".into()));
        }
        if self.fractions.is_empty() && self.opp.is_empty() {
            return Err(Error::Usage("nothing to run: both sweeps are empty".into()));
        }
        if self.reg_grid.is_empty() || self.reg_grid.iter().any(|r| r.is_nan() || *r < 0.0) {
            return Err(Error::Usage("reg_grid must be non-empty and non-negative".into()));
        }
        if let DatasetSource::Synthetic { config } = &self.dataset {
            config.validate()?;
        }
        Ok(())
    }
}

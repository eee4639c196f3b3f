//! Synthetic longitudinal panel generator.
//!
//! Continuous features follow a stationary AR(1) process around an
//! individual-specific level, so values of the same individual are correlated
//! and the correlation decays with the time gap. Levels load on a
//! per-individual latent factor, giving the cross-feature correlation that
//! clinical covariates show; without it, nearest-neighbor methods would have
//! no signal beyond the individual's own rows. Categorical features follow
//! sticky per-individual Markov chains whose level propensities also tilt
//! with the factor. A binary outcome is drawn from a logistic model on a
//! sparse subset of each individual's final-observation covariates.

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::{FeatureInfo, FeatureKind, FeatureSpec, PanelDataset, Schema};
use crate::seed;

const SYNTH_STREAM: u64 = 0x73_796e_7468; // "synth"

/// Loading of each continuous level on the individual's latent factor
/// (alternating sign across features).
const FACTOR_LOADING: f64 = 0.85;

/// Tilt of categorical level propensities per unit of latent factor.
const CATEGORICAL_TILT: f64 = 0.9;

fn default_levels() -> usize {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SynthConfig {
    pub individuals: usize,
    pub obs_per_individual: usize,
    #[serde(alias = "p0")]
    pub continuous_features: usize,
    #[serde(alias = "p1")]
    pub categorical_features: usize,
    /// AR(1) coefficient per observation step, in [0, 1).
    pub autocorrelation: f64,
    /// Gap between consecutive observations, in the declared time unit.
    pub time_step: f64,
    /// Fraction of features with nonzero weight in the outcome model.
    pub outcome_sparsity: f64,
    pub seed: u64,
    #[serde(default = "default_levels")]
    pub categorical_levels: usize,
}

impl Default for SynthConfig {
    /// Desk-scale default: 150 individuals x 10 observations x
    /// (9 continuous + 4 categorical) features.
    fn default() -> Self {
        SynthConfig {
            individuals: 150,
            obs_per_individual: 10,
            continuous_features: 9,
            categorical_features: 4,
            autocorrelation: 0.8,
            time_step: 1.0,
            outcome_sparsity: 0.4,
            seed: 0,
            categorical_levels: 3,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.individuals == 0 || self.obs_per_individual == 0 {
            return Err(Error::Usage("individuals and obs_per_individual must be positive".into()));
        }
        if self.continuous_features + self.categorical_features == 0 {
            return Err(Error::Usage("at least one feature is required".into()));
        }
        if !(0.0..1.0).contains(&self.autocorrelation) {
            return Err(Error::Usage(format!(
                "autocorrelation {} outside [0, 1)",
                self.autocorrelation
            )));
        }
        if !self.time_step.is_finite() || self.time_step <= 0.0 {
            return Err(Error::Usage("time_step must be a positive real".into()));
        }
        if self.outcome_sparsity.is_nan()
            || self.outcome_sparsity <= 0.0
            || self.outcome_sparsity > 1.0
        {
            return Err(Error::Usage("outcome_sparsity must lie in (0, 1]".into()));
        }
        if self.categorical_features > 0 && self.categorical_levels < 2 {
            return Err(Error::Usage("categorical_levels must be at least 2".into()));
        }
        Ok(())
    }

    pub fn p(&self) -> usize {
        self.continuous_features + self.categorical_features
    }

    /// Sidecar schema matching the generated CSV.
    pub fn schema(&self) -> Schema {
        let mut features = Vec::new();
        for c in 0..self.continuous_features {
            features.push(FeatureSpec {
                name: format!("c{}", c),
                kind: FeatureKind::Continuous,
                levels: None,
            });
        }
        let levels: Vec<String> = (0..self.categorical_levels).map(|l| format!("l{}", l)).collect();
        for c in 0..self.categorical_features {
            features.push(FeatureSpec {
                name: format!("k{}", c),
                kind: FeatureKind::Categorical,
                levels: Some(levels.clone()),
            });
        }
        Schema {
            id_column: "id".into(),
            time_column: "t".into(),
            features,
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Generates a fully observed panel plus per-individual binary outcomes.
/// Deterministic given the config seed.
pub fn synth_panel(cfg: &SynthConfig) -> Result<(PanelDataset, Vec<bool>)> {
    cfg.validate()?;
    let mut rng = seed::rng(cfg.seed, SYNTH_STREAM);
    let (m_count, obs) = (cfg.individuals, cfg.obs_per_individual);
    let (p0, p1, p) = (cfg.continuous_features, cfg.categorical_features, cfg.p());
    let n = m_count * obs;
    let rho = cfg.autocorrelation;
    let innovation_sd = (1.0 - rho * rho).sqrt();

    // Outcome model: a sparse subset of features with unit-magnitude weights
    // of random sign, applied to each individual's final observation.
    let n_active = ((cfg.outcome_sparsity * p as f64).round() as usize).max(1).min(p);
    let mut active: Vec<usize> = sample(&mut rng, p, n_active).into_vec();
    active.sort_unstable();
    let coefs: Vec<f64> = active
        .iter()
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();

    let mut continuous = ndarray::Array2::<f64>::zeros((n, p0));
    let mut categorical = ndarray::Array2::<u32>::zeros((n, p1));
    let mut individual = Vec::with_capacity(n);
    let mut timestamp = Vec::with_capacity(n);

    let idiosyncratic_sd = (1.0 - FACTOR_LOADING * FACTOR_LOADING).sqrt();
    let half_span = (cfg.categorical_levels as f64 - 1.0) / 2.0;
    for m in 0..m_count {
        let base = m * obs;
        for k in 0..obs {
            individual.push(m);
            timestamp.push(k as f64 * cfg.time_step);
        }
        let factor: f64 = rng.sample::<f64, _>(StandardNormal);
        for d in 0..p0 {
            let loading = if d % 2 == 0 { FACTOR_LOADING } else { -FACTOR_LOADING };
            let level = loading * factor
                + idiosyncratic_sd * rng.sample::<f64, _>(StandardNormal);
            let mut resid: f64 = rng.sample::<f64, _>(StandardNormal);
            continuous[[base, d]] = level + resid;
            for k in 1..obs {
                let shock: f64 = rng.sample::<f64, _>(StandardNormal);
                resid = rho * resid + innovation_sd * shock;
                continuous[[base + k, d]] = level + resid;
            }
        }
        // level propensities tilted by the factor; cumulative for sampling
        let mut cum = Vec::with_capacity(cfg.categorical_levels);
        let mut total = 0.0;
        for l in 0..cfg.categorical_levels {
            total += (CATEGORICAL_TILT * factor * (l as f64 - half_span)).exp();
            cum.push(total);
        }
        let draw_level = |rng: &mut rand_chacha::ChaCha8Rng| -> u32 {
            let u = rng.random::<f64>() * total;
            cum.iter().position(|&c| u < c).unwrap_or(cfg.categorical_levels - 1) as u32
        };
        for d in 0..p1 {
            let mut state = draw_level(&mut rng);
            categorical[[base, d]] = state;
            for k in 1..obs {
                if rng.random::<f64>() >= rho {
                    state = draw_level(&mut rng);
                }
                categorical[[base + k, d]] = state;
            }
        }
    }

    // Labels from the last observation of each individual.
    let mut labels = Vec::with_capacity(m_count);
    for m in 0..m_count {
        let last = m * obs + (obs - 1);
        let mut score = 0.0;
        for (j, &d) in active.iter().enumerate() {
            let x = if d < p0 {
                continuous[[last, d]]
            } else {
                categorical[[last, d - p0]] as f64 - half_span
            };
            score += coefs[j] * x;
        }
        labels.push(rng.random::<f64>() < sigmoid(score));
    }

    let features: Vec<FeatureInfo> = cfg.schema().ordered_features();
    let ds = PanelDataset::new(
        continuous,
        categorical,
        ndarray::Array2::from_elem((n, p), false),
        individual,
        (1..=m_count).map(|m| m.to_string()).collect(),
        timestamp,
        features,
        "id".into(),
        "t".into(),
    )?;
    Ok((ds, labels))
}

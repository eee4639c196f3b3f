//! Cross-validation for the time-series weights alpha and lambda (and
//! optionally K).
//!
//! Observed cells are partitioned into seeded random folds; for each grid
//! point and fold, the fold's cells are additionally masked, the solver runs,
//! and held-out error is scored against the hidden truths. Folds are
//! cell-level rather than row-level: imputation quality is a per-cell
//! quantity, and removing whole rows would change the neighbor geometry.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knn::Hyperparams;
use crate::panel::{mask_cells, MaskedCell, MaskedValue, PanelDataset};
use crate::seed;
use crate::solver::{med_impute, SolverConfig};

const FOLD_STREAM: u64 = 0x666f_6c64; // "fold"

/// Candidate grid. Shared scalars are broadcast to every feature; the
/// `per_feature` flag adds a coordinate-wise greedy refinement pass
/// (optimize one feature's pair holding the others fixed, one pass), which
/// costs `p * |alphas| * |lambdas| * folds` extra solves.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HyperGrid {
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_ks")]
    pub ks: Vec<usize>,
    #[serde(default)]
    pub per_feature: bool,
}

fn default_alphas() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 0.75, 1.0]
}

fn default_lambdas() -> Vec<f64> {
    vec![0.1, 0.3, 0.5, 0.7, 0.9, 1.0]
}

fn default_ks() -> Vec<usize> {
    vec![10]
}

impl Default for HyperGrid {
    fn default() -> Self {
        HyperGrid {
            alphas: default_alphas(),
            lambdas: default_lambdas(),
            ks: default_ks(),
            per_feature: false,
        }
    }
}

impl HyperGrid {
    fn validate(&self, n_rows: usize) -> Result<()> {
        if self.alphas.is_empty() || self.lambdas.is_empty() || self.ks.is_empty() {
            return Err(Error::Usage("hyperparameter grid lists must be non-empty".into()));
        }
        if self.alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::Usage("grid alpha values must lie in [0, 1]".into()));
        }
        if self.lambdas.iter().any(|l| !(0.0 < *l && *l <= 1.0)) {
            return Err(Error::Usage("grid lambda values must lie in (0, 1]".into()));
        }
        if self.ks.iter().any(|&k| k == 0 || k >= n_rows) {
            return Err(Error::Usage("grid k values must be positive and below the row count".into()));
        }
        Ok(())
    }
}

/// Validation scores for one grid point, averaged over folds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridPointScore {
    pub alpha: f64,
    pub lambda: f64,
    pub k: usize,
    /// Mean absolute error over held-out continuous cells (standardized
    /// units), `None` when no fold held out continuous cells.
    pub mae: Option<f64>,
    /// Misclassification rate over held-out categorical cells.
    pub misclassification: Option<f64>,
    /// Cell-count-weighted combination of the two, the selection criterion.
    pub combined: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CVReport {
    pub scores: Vec<GridPointScore>,
    pub folds: usize,
    pub selected: Hyperparams,
    pub selected_combined: f64,
}

/// Per-fold error tallies on a set of held-out cells.
#[derive(Default, Clone, Copy)]
struct FoldErrors {
    abs_error_sum: f64,
    continuous_cells: usize,
    wrong: usize,
    categorical_cells: usize,
}

impl FoldErrors {
    fn combined(&self) -> f64 {
        let cells = self.continuous_cells + self.categorical_cells;
        (self.abs_error_sum + self.wrong as f64) / cells as f64
    }
}

fn tally(
    completed: &crate::knn::CompletedMatrix,
    truths: &[MaskedCell],
    p0: usize,
    feature_filter: Option<usize>,
) -> FoldErrors {
    let mut errors = FoldErrors::default();
    for cell in truths {
        if let Some(d) = feature_filter {
            if cell.feature != d {
                continue;
            }
        }
        match cell.truth {
            MaskedValue::Continuous(truth) => {
                let imputed = completed.continuous()[[cell.row, cell.feature]];
                errors.abs_error_sum += (imputed - truth).abs();
                errors.continuous_cells += 1;
            }
            MaskedValue::Categorical(truth) => {
                let imputed = completed.categorical()[[cell.row, cell.feature - p0]];
                if imputed != truth {
                    errors.wrong += 1;
                }
                errors.categorical_cells += 1;
            }
        }
    }
    errors
}

fn draw_fold_partition(
    ds: &PanelDataset,
    folds: usize,
    cv_seed: u64,
) -> Result<Vec<Vec<(usize, usize)>>> {
    let observed = ds.observed_cells();
    let mut col_observed = vec![0usize; ds.p()];
    for &(_, d) in &observed {
        col_observed[d] += 1;
    }
    for attempt in 0..10u64 {
        let mut rng = seed::rng(cv_seed, FOLD_STREAM.wrapping_add(attempt));
        let mut cells = observed.clone();
        cells.shuffle(&mut rng);
        let mut parts: Vec<Vec<(usize, usize)>> = vec![Vec::new(); folds];
        for (idx, cell) in cells.into_iter().enumerate() {
            parts[idx % folds].push(cell);
        }
        let valid = parts.iter().all(|part| {
            let mut held = vec![0usize; ds.p()];
            for &(_, d) in part {
                held[d] += 1;
            }
            (0..ds.p()).all(|d| col_observed[d] > held[d])
        });
        if valid {
            for part in &mut parts {
                part.sort_unstable();
            }
            return Ok(parts);
        }
    }
    Err(Error::Numerical(
        "could not draw CV folds leaving every column observed (10 attempts)".into(),
    ))
}

struct FoldData {
    masked: PanelDataset,
    truths: Vec<MaskedCell>,
}

fn score_hyperparams(
    fold_data: &[FoldData],
    hp: &Hyperparams,
    cfg: &SolverConfig,
    p0: usize,
    feature_filter: Option<usize>,
) -> Result<(Option<f64>, Option<f64>, Option<f64>)> {
    let mut combined = Vec::new();
    let mut maes = Vec::new();
    let mut misses = Vec::new();
    for fold in fold_data {
        let mut solver_cfg = cfg.clone();
        solver_cfg.hyperparams = hp.clone();
        let result = med_impute(&fold.masked, &solver_cfg)?;
        let errors = tally(&result.completed, &fold.truths, p0, feature_filter);
        if errors.continuous_cells + errors.categorical_cells > 0 {
            combined.push(errors.combined());
        }
        if errors.continuous_cells > 0 {
            maes.push(errors.abs_error_sum / errors.continuous_cells as f64);
        }
        if errors.categorical_cells > 0 {
            misses.push(errors.wrong as f64 / errors.categorical_cells as f64);
        }
    }
    let mean = |v: &[f64]| {
        if v.is_empty() {
            None
        } else {
            Some(v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    Ok((mean(&combined), mean(&maes), mean(&misses)))
}

/// True when `candidate` beats `best` under the tie-break order: smaller
/// score, then smaller alpha, then larger lambda, then smaller k.
fn beats(candidate: (f64, f64, f64, usize), best: (f64, f64, f64, usize)) -> bool {
    if candidate.0 != best.0 {
        return candidate.0 < best.0;
    }
    if candidate.1 != best.1 {
        return candidate.1 < best.1;
    }
    if candidate.2 != best.2 {
        return candidate.2 > best.2;
    }
    candidate.3 < best.3
}

/// Grid search by cross-validation. The solver never sees a held-out cell's
/// value: fold cells are masked before each solve.
pub fn cross_validate(
    ds: &PanelDataset,
    grid: &HyperGrid,
    folds: usize,
    cv_seed: u64,
    cfg: &SolverConfig,
) -> Result<CVReport> {
    if folds < 2 {
        return Err(Error::Usage("cross-validation needs at least 2 folds".into()));
    }
    if ds.observed_cell_count() < folds {
        return Err(Error::Data("fewer observed cells than folds".into()));
    }
    grid.validate(ds.n_rows())?;

    let partition = draw_fold_partition(ds, folds, cv_seed)?;
    let fold_data: Vec<FoldData> = partition
        .iter()
        .map(|cells| {
            let (masked, truths) = mask_cells(ds, cells)?;
            Ok(FoldData { masked, truths })
        })
        .collect::<Result<Vec<_>>>()?;

    let p = ds.p();
    let p0 = ds.p0();
    let mut points = Vec::new();
    for &k in &grid.ks {
        for &alpha in &grid.alphas {
            for &lambda in &grid.lambdas {
                points.push((alpha, lambda, k));
            }
        }
    }

    let scores: Vec<GridPointScore> = points
        .par_iter()
        .map(|&(alpha, lambda, k)| {
            let hp = Hyperparams::uniform(p, alpha, lambda, k);
            let (combined, mae, misclassification) =
                score_hyperparams(&fold_data, &hp, cfg, p0, None)?;
            Ok(GridPointScore {
                alpha,
                lambda,
                k,
                mae,
                misclassification,
                combined: combined.expect("folds are non-empty"),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0usize;
    for idx in 1..scores.len() {
        let c = &scores[idx];
        let b = &scores[best];
        if beats(
            (c.combined, c.alpha, c.lambda, c.k),
            (b.combined, b.alpha, b.lambda, b.k),
        ) {
            best = idx;
        }
    }
    let chosen = &scores[best];
    let mut selected = Hyperparams::uniform(p, chosen.alpha, chosen.lambda, chosen.k);
    let mut selected_combined = chosen.combined;

    if grid.per_feature {
        // One greedy pass: refine each feature's (alpha, lambda) pair by its
        // own held-out error, holding the other features fixed.
        for d in 0..p {
            let mut pairs = Vec::new();
            for &alpha in &grid.alphas {
                for &lambda in &grid.lambdas {
                    pairs.push((alpha, lambda));
                }
            }
            let pair_scores: Vec<Option<f64>> = pairs
                .par_iter()
                .map(|&(alpha, lambda)| {
                    let mut hp = selected.clone();
                    hp.alpha[d] = alpha;
                    hp.lambda[d] = lambda;
                    let (_, mae, mis) = score_hyperparams(&fold_data, &hp, cfg, p0, Some(d))?;
                    Ok(if d < p0 { mae } else { mis })
                })
                .collect::<Result<Vec<_>>>()?;
            let mut best_pair: Option<(f64, f64, f64)> = None; // (score, alpha, lambda)
            for (idx, score) in pair_scores.iter().enumerate() {
                let Some(score) = score else { continue };
                let (alpha, lambda) = pairs[idx];
                let candidate = (*score, alpha, lambda, 0);
                if best_pair.is_none_or(|(s, a, l)| beats(candidate, (s, a, l, 0))) {
                    best_pair = Some((*score, alpha, lambda));
                }
            }
            if let Some((_, alpha, lambda)) = best_pair {
                selected.alpha[d] = alpha;
                selected.lambda[d] = lambda;
            }
        }
        let (combined, _, _) = score_hyperparams(&fold_data, &selected, cfg, p0, None)?;
        selected_combined = combined.expect("folds are non-empty");
    }

    Ok(CVReport {
        scores,
        folds,
        selected,
        selected_combined,
    })
}

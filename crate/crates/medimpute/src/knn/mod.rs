//! Distance metric, time-decay coefficients, neighbor assignment, and the
//! K-NN imputation objective.
//!
//! The objective couples each incomplete row to its K nearest neighbors with
//! per-feature weight `1 - alpha_d`, and to every other row of the same
//! individual with weight `alpha_d * lambda_d^|t_i - t_j|`. Neighbors are
//! chosen by the unweighted metric: squared difference for continuous
//! features plus a 0/1 mismatch indicator for categorical features.

mod objective;
mod update;

pub use objective::objective_value;
pub use update::{
    update_categorical_cell, update_continuous_cell, SweepContext, UpdateOutcome,
};

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::PanelDataset;

/// Per-feature time-series weights and decay rates, plus the neighbor count.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Hyperparams {
    /// Weight of the same-individual term per feature, each in [0, 1].
    pub alpha: Vec<f64>,
    /// Exponential decay per unit time gap per feature, each in (0, 1].
    pub lambda: Vec<f64>,
    /// Neighbor count K.
    pub k: usize,
}

impl Hyperparams {
    /// Shared scalar alpha/lambda broadcast across all `p` features.
    pub fn uniform(p: usize, alpha: f64, lambda: f64, k: usize) -> Self {
        Hyperparams {
            alpha: vec![alpha; p],
            lambda: vec![lambda; p],
            k,
        }
    }

    pub fn validate(&self, p: usize, n_rows: usize) -> Result<()> {
        if self.alpha.len() != p || self.lambda.len() != p {
            return Err(Error::Usage(format!(
                "hyperparameter vectors must have length {} (got alpha {}, lambda {})",
                p,
                self.alpha.len(),
                self.lambda.len()
            )));
        }
        if self.alpha.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::Usage("alpha values must lie in [0, 1]".into()));
        }
        if self.lambda.iter().any(|l| !(0.0 < *l && *l <= 1.0)) {
            return Err(Error::Usage("lambda values must lie in (0, 1]".into()));
        }
        if self.k == 0 {
            return Err(Error::Usage("k must be positive".into()));
        }
        if self.k >= n_rows {
            return Err(Error::Usage(format!(
                "k = {} must be smaller than the row count {}",
                self.k, n_rows
            )));
        }
        Ok(())
    }

    /// All time-series weights zero: the plain K-NN objective.
    pub fn zero_alpha(&self) -> Self {
        Hyperparams {
            alpha: vec![0.0; self.alpha.len()],
            lambda: self.lambda.clone(),
            k: self.k,
        }
    }
}

/// Decay weights `lambda_d^|t_i - t_j|` for one same-individual partner row.
#[derive(Debug, Clone)]
pub struct DecayPartner {
    pub row: usize,
    /// One weight per feature (global feature order).
    pub weights: Vec<f64>,
}

/// Sparse per-row table of same-individual decay weights. Pairs across
/// different individuals are absent (their coefficient is zero).
#[derive(Debug, Clone)]
pub struct DecayTable {
    partners: Vec<Vec<DecayPartner>>,
}

impl DecayTable {
    pub fn build(ds: &PanelDataset, hp: &Hyperparams) -> Self {
        let p = ds.p();
        let mut partners: Vec<Vec<DecayPartner>> = vec![Vec::new(); ds.n_rows()];
        for range in ds.individual_row_ranges() {
            let rows: Vec<usize> = range.collect();
            for &i in &rows {
                for &j in &rows {
                    if i == j {
                        continue;
                    }
                    let gap = (ds.timestamp_of(i) - ds.timestamp_of(j)).abs();
                    let weights: Vec<f64> =
                        (0..p).map(|d| hp.lambda[d].powf(gap)).collect();
                    partners[i].push(DecayPartner { row: j, weights });
                }
            }
        }
        DecayTable { partners }
    }

    /// Same-individual partners of row `i`, ascending by row index.
    pub fn partners(&self, i: usize) -> &[DecayPartner] {
        &self.partners[i]
    }

    pub fn has_partners(&self, i: usize) -> bool {
        !self.partners[i].is_empty()
    }

    pub fn total_pairs(&self) -> usize {
        self.partners.iter().map(|p| p.len()).sum()
    }
}

/// Neighbor lists for each incomplete row: exactly K rows each, never
/// containing the row itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborAssignment {
    /// Rows with at least one missing cell, ascending.
    pub incomplete_rows: Vec<usize>,
    /// For each incomplete row (parallel to `incomplete_rows`), its K
    /// neighbors ordered by (distance, row index).
    pub neighbors: Vec<Vec<usize>>,
}

impl NeighborAssignment {
    /// For every row j, the incomplete rows that list j as a neighbor
    /// (ascending).
    pub fn reverse(&self, n_rows: usize) -> Vec<Vec<usize>> {
        let mut rev = vec![Vec::new(); n_rows];
        for (idx, &i) in self.incomplete_rows.iter().enumerate() {
            for &j in &self.neighbors[idx] {
                rev[j].push(i);
            }
        }
        rev
    }

    /// Membership flags for the incomplete set.
    pub fn incomplete_flags(&self, n_rows: usize) -> Vec<bool> {
        let mut flags = vec![false; n_rows];
        for &i in &self.incomplete_rows {
            flags[i] = true;
        }
        flags
    }
}

/// Fully filled decision variables: continuous values `w`, categorical codes
/// `v`, and a copy of the originating mask. Cells observed in the source
/// dataset are pinned to their observed values by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletedMatrix {
    w: Array2<f64>,
    v: Array2<u32>,
    missing: Array2<bool>,
    cardinalities: Vec<usize>,
}

impl CompletedMatrix {
    pub fn new(
        w: Array2<f64>,
        v: Array2<u32>,
        missing: Array2<bool>,
        cardinalities: Vec<usize>,
    ) -> Self {
        debug_assert!(w.iter().all(|x| x.is_finite()), "completed matrix must be fully filled");
        CompletedMatrix { w, v, missing, cardinalities }
    }

    /// Copies a dataset with no missing cells.
    pub fn from_complete_dataset(ds: &PanelDataset) -> Result<Self> {
        if ds.missing_cell_count() != 0 {
            return Err(Error::Data("dataset still has missing cells".into()));
        }
        Ok(CompletedMatrix {
            w: ds.raw_continuous().clone(),
            v: ds.raw_categorical().clone(),
            missing: ds.missing_mask().clone(),
            cardinalities: (0..ds.p1()).map(|c| ds.cardinality(c)).collect(),
        })
    }

    pub fn continuous(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn categorical(&self) -> &Array2<u32> {
        &self.v
    }

    pub fn missing_mask(&self) -> &Array2<bool> {
        &self.missing
    }

    pub fn cardinality(&self, col: usize) -> usize {
        self.cardinalities[col]
    }

    pub fn n_rows(&self) -> usize {
        self.w.nrows()
    }

    pub fn p0(&self) -> usize {
        self.w.ncols()
    }

    pub fn p1(&self) -> usize {
        self.v.ncols()
    }

    pub fn p(&self) -> usize {
        self.p0() + self.p1()
    }

    pub(crate) fn set_continuous(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(self.missing[[row, col]], "only masked cells may be rewritten");
        self.w[[row, col]] = value;
    }

    pub(crate) fn set_categorical(&mut self, row: usize, col: usize, code: u32) {
        let d = self.p0() + col;
        debug_assert!(self.missing[[row, d]], "only masked cells may be rewritten");
        self.v[[row, col]] = code;
    }

    fn cont_row(&self, i: usize) -> &[f64] {
        self.w.row(i).to_slice().expect("standard layout")
    }

    fn cat_row(&self, i: usize) -> &[u32] {
        self.v.row(i).to_slice().expect("standard layout")
    }
}

fn distance_slices(wi: &[f64], wj: &[f64], vi: &[u32], vj: &[u32]) -> f64 {
    let mut d = 0.0;
    for (a, b) in wi.iter().zip(wj) {
        let diff = a - b;
        d += diff * diff;
    }
    for (a, b) in vi.iter().zip(vj) {
        if a != b {
            d += 1.0;
        }
    }
    d
}

/// Unweighted distance of the metric: squared continuous differences plus
/// categorical mismatch indicators.
pub fn pairwise_distance(i: usize, j: usize, cm: &CompletedMatrix) -> f64 {
    distance_slices(cm.cont_row(i), cm.cont_row(j), cm.cat_row(i), cm.cat_row(j))
}

/// K nearest rows for each incomplete row under the unweighted metric.
/// Distance ties break toward the smaller row index, so the assignment is
/// deterministic. Rows are processed in parallel against the frozen matrix.
pub fn assign_neighbors(
    cm: &CompletedMatrix,
    incomplete_rows: &[usize],
    k: usize,
) -> NeighborAssignment {
    let n = cm.n_rows();
    assert!(k < n, "k must be smaller than the row count");
    let p0 = cm.p0();
    let p1 = cm.p1();
    let w = cm.w.as_slice().expect("standard layout");
    let v = cm.v.as_slice().expect("standard layout");
    let neighbors: Vec<Vec<usize>> = incomplete_rows
        .par_iter()
        .map(|&i| {
            let wi = &w[i * p0..(i + 1) * p0];
            let vi = &v[i * p1..(i + 1) * p1];
            let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d = distance_slices(wi, &w[j * p0..j * p0 + p0], vi, &v[j * p1..j * p1 + p1]);
                cand.push((d, j));
            }
            let cmp = |a: &(f64, usize), b: &(f64, usize)| {
                a.0.partial_cmp(&b.0)
                    .expect("distances are finite")
                    .then(a.1.cmp(&b.1))
            };
            cand.select_nth_unstable_by(k - 1, cmp);
            cand.truncate(k);
            cand.sort_unstable_by(cmp);
            cand.into_iter().map(|(_, j)| j).collect()
        })
        .collect();
    NeighborAssignment {
        incomplete_rows: incomplete_rows.to_vec(),
        neighbors,
    }
}

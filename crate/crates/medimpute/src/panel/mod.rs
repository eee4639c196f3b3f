//! Data model for longitudinal mixed-type datasets.
//!
//! A [`PanelDataset`] is an n x p matrix of observations in which the first
//! `p0` columns are continuous and the remaining `p1` are categorical, each
//! row carries an individual index and a timestamp, and a boolean mask marks
//! missing cells. Missing cells hold sentinel payloads (NaN for continuous,
//! the column cardinality for categorical) that are unreachable through the
//! masked accessors.

mod csv_io;
mod mask;
mod schema;
mod standardize;
mod synth;

pub use csv_io::{
    load_csv, load_labels_csv, write_completed_csv, write_csv, write_imputed_flags_csv,
    write_labels_csv, write_mask_record_csv,
};
pub use mask::{apply_mcar_mask, mask_cells, MaskRecord, MaskedCell, MaskedValue};
pub use schema::{FeatureSpec, Schema};
pub use standardize::{standardize, unstandardize, StandardizationParams};
pub use synth::{synth_panel, SynthConfig};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Whether a feature column holds real values or category codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Continuous,
    Categorical,
}

/// Name, kind, and (for categorical columns) the declared level names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureInfo {
    pub name: String,
    pub kind: FeatureKind,
    /// Level names in code order; empty for continuous features.
    pub levels: Vec<String>,
}

/// Longitudinal mixed-type dataset with missingness mask.
///
/// Rows are sorted by (individual, timestamp); individual indices are
/// contiguous in order of first appearance in the source. Duplicate
/// (individual, timestamp) pairs are rejected because the time-decay weight
/// of a zero gap would couple distinct rows ambiguously.
#[derive(Debug, Clone)]
pub struct PanelDataset {
    continuous: Array2<f64>,
    categorical: Array2<u32>,
    missing: Array2<bool>,
    individual: Vec<usize>,
    individual_labels: Vec<String>,
    timestamp: Vec<f64>,
    features: Vec<FeatureInfo>,
    p0: usize,
    id_column: String,
    time_column: String,
}

impl PanelDataset {
    /// Validates, sorts rows by (individual, timestamp), and installs
    /// sentinels at masked cells.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        continuous: Array2<f64>,
        categorical: Array2<u32>,
        missing: Array2<bool>,
        individual: Vec<usize>,
        individual_labels: Vec<String>,
        timestamp: Vec<f64>,
        features: Vec<FeatureInfo>,
        id_column: String,
        time_column: String,
    ) -> Result<Self> {
        let n = individual.len();
        if n == 0 {
            return Err(Error::Data("no observations".into()));
        }
        let p0 = continuous.ncols();
        let p1 = categorical.ncols();
        let p = p0 + p1;
        if continuous.nrows() != n || categorical.nrows() != n || missing.nrows() != n {
            return Err(Error::Data("block row counts disagree".into()));
        }
        if missing.ncols() != p {
            return Err(Error::Data("mask width differs from feature count".into()));
        }
        if timestamp.len() != n {
            return Err(Error::Data("timestamp length differs from row count".into()));
        }
        if features.len() != p {
            return Err(Error::Schema("feature list length differs from data width".into()));
        }
        for (d, f) in features.iter().enumerate() {
            match f.kind {
                FeatureKind::Continuous if d >= p0 => {
                    return Err(Error::Schema(format!(
                        "continuous feature {:?} listed after categorical features",
                        f.name
                    )))
                }
                FeatureKind::Categorical if d < p0 => {
                    return Err(Error::Schema(format!(
                        "categorical feature {:?} listed before continuous features",
                        f.name
                    )))
                }
                FeatureKind::Categorical if f.levels.is_empty() => {
                    return Err(Error::Schema(format!(
                        "categorical feature {:?} declares no levels",
                        f.name
                    )))
                }
                _ => {}
            }
        }

        let m = individual_labels.len();
        let mut seen = vec![false; m];
        for &id in &individual {
            if id >= m {
                return Err(Error::Data(format!("individual index {} out of range", id)));
            }
            seen[id] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::Data("individual indices are not contiguous".into()));
        }
        for &t in &timestamp {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::Data(format!("timestamp {} is not a non-negative real", t)));
            }
        }

        let mut ds = PanelDataset {
            continuous,
            categorical,
            missing,
            individual,
            individual_labels,
            timestamp,
            features,
            p0,
            id_column,
            time_column,
        };
        ds.sort_rows();
        ds.check_duplicates()?;
        ds.install_sentinels()?;
        Ok(ds)
    }

    fn sort_rows(&mut self) {
        let n = self.n_rows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            (self.individual[a], self.timestamp[a])
                .partial_cmp(&(self.individual[b], self.timestamp[b]))
                .expect("timestamps are finite")
        });
        if order.iter().enumerate().all(|(pos, &src)| pos == src) {
            return;
        }
        let permute_f = |m: &Array2<f64>| {
            Array2::from_shape_fn(m.dim(), |(i, j)| m[[order[i], j]])
        };
        let permute_u = |m: &Array2<u32>| {
            Array2::from_shape_fn(m.dim(), |(i, j)| m[[order[i], j]])
        };
        let permute_b = |m: &Array2<bool>| {
            Array2::from_shape_fn(m.dim(), |(i, j)| m[[order[i], j]])
        };
        self.continuous = permute_f(&self.continuous);
        self.categorical = permute_u(&self.categorical);
        self.missing = permute_b(&self.missing);
        self.individual = order.iter().map(|&i| self.individual[i]).collect();
        self.timestamp = order.iter().map(|&i| self.timestamp[i]).collect();
    }

    fn check_duplicates(&self) -> Result<()> {
        for w in 0..self.n_rows().saturating_sub(1) {
            if self.individual[w] == self.individual[w + 1]
                && self.timestamp[w] == self.timestamp[w + 1]
            {
                return Err(Error::Data(format!(
                    "duplicate (id, time) pair: individual {:?} at time {}",
                    self.individual_labels[self.individual[w]], self.timestamp[w]
                )));
            }
        }
        Ok(())
    }

    fn install_sentinels(&mut self) -> Result<()> {
        let (p0, n) = (self.p0, self.n_rows());
        for i in 0..n {
            for d in 0..self.p() {
                if self.missing[[i, d]] {
                    if d < p0 {
                        self.continuous[[i, d]] = f64::NAN;
                    } else {
                        let col = d - p0;
                        self.categorical[[i, col]] = self.cardinality(col) as u32;
                    }
                } else if d < p0 {
                    let v = self.continuous[[i, d]];
                    if !v.is_finite() {
                        return Err(Error::Data(format!(
                            "non-finite value in observed cell (row {}, feature {:?})",
                            i + 1,
                            self.features[d].name
                        )));
                    }
                } else {
                    let col = d - p0;
                    if (self.categorical[[i, col]] as usize) >= self.cardinality(col) {
                        return Err(Error::Data(format!(
                            "category code out of range in cell (row {}, feature {:?})",
                            i + 1,
                            self.features[d].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.individual.len()
    }

    pub fn n_individuals(&self) -> usize {
        self.individual_labels.len()
    }

    pub fn p(&self) -> usize {
        self.features.len()
    }

    pub fn p0(&self) -> usize {
        self.p0
    }

    pub fn p1(&self) -> usize {
        self.features.len() - self.p0
    }

    pub fn features(&self) -> &[FeatureInfo] {
        &self.features
    }

    pub fn is_continuous(&self, feature: usize) -> bool {
        feature < self.p0
    }

    /// Number of levels declared for categorical column `col` (0-based within
    /// the categorical block).
    pub fn cardinality(&self, col: usize) -> usize {
        self.features[self.p0 + col].levels.len()
    }

    pub fn individual_of(&self, row: usize) -> usize {
        self.individual[row]
    }

    pub fn individual_label(&self, index: usize) -> &str {
        &self.individual_labels[index]
    }

    pub fn individual_labels(&self) -> &[String] {
        &self.individual_labels
    }

    pub fn timestamp_of(&self, row: usize) -> f64 {
        self.timestamp[row]
    }

    pub fn id_column(&self) -> &str {
        &self.id_column
    }

    pub fn time_column(&self) -> &str {
        &self.time_column
    }

    pub fn is_missing(&self, row: usize, feature: usize) -> bool {
        self.missing[[row, feature]]
    }

    /// Observed continuous value, `None` when the cell is masked.
    pub fn observed_continuous(&self, row: usize, col: usize) -> Option<f64> {
        if self.missing[[row, col]] {
            None
        } else {
            Some(self.continuous[[row, col]])
        }
    }

    /// Observed category code, `None` when the cell is masked.
    pub fn observed_categorical(&self, row: usize, col: usize) -> Option<u32> {
        if self.missing[[row, self.p0 + col]] {
            None
        } else {
            Some(self.categorical[[row, col]])
        }
    }

    /// Row ranges per individual; valid because rows are sorted by
    /// (individual, timestamp).
    pub fn individual_row_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut ranges = Vec::with_capacity(self.n_individuals());
        let mut start = 0usize;
        for i in 1..=self.n_rows() {
            if i == self.n_rows() || self.individual[i] != self.individual[i - 1] {
                ranges.push(start..i);
                start = i;
            }
        }
        // ranges are in row order == individual-index order
        debug_assert_eq!(ranges.len(), self.n_individuals());
        ranges
    }

    /// Rows with at least one missing cell, ascending.
    pub fn incomplete_rows(&self) -> Vec<usize> {
        (0..self.n_rows())
            .filter(|&i| (0..self.p()).any(|d| self.missing[[i, d]]))
            .collect()
    }

    /// All observed (row, feature) cells in row-major order.
    pub fn observed_cells(&self) -> Vec<(usize, usize)> {
        let mut cells = Vec::new();
        for i in 0..self.n_rows() {
            for d in 0..self.p() {
                if !self.missing[[i, d]] {
                    cells.push((i, d));
                }
            }
        }
        cells
    }

    pub fn observed_cell_count(&self) -> usize {
        self.missing.iter().filter(|&&m| !m).count()
    }

    pub fn missing_cell_count(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    pub(crate) fn raw_continuous(&self) -> &Array2<f64> {
        &self.continuous
    }

    pub(crate) fn raw_categorical(&self) -> &Array2<u32> {
        &self.categorical
    }

    pub fn missing_mask(&self) -> &Array2<bool> {
        &self.missing
    }

    pub(crate) fn set_continuous(&mut self, row: usize, col: usize, value: f64) {
        self.continuous[[row, col]] = value;
    }

    pub(crate) fn set_missing(&mut self, row: usize, feature: usize) {
        self.missing[[row, feature]] = true;
        if feature < self.p0 {
            self.continuous[[row, feature]] = f64::NAN;
        } else {
            let col = feature - self.p0;
            self.categorical[[row, col]] = self.cardinality(col) as u32;
        }
    }
}

/// Sentinel-aware equality: masked cells compare by mask only, observed
/// cells bitwise.
impl PartialEq for PanelDataset {
    fn eq(&self, other: &Self) -> bool {
        if self.features != other.features
            || self.p0 != other.p0
            || self.individual != other.individual
            || self.individual_labels != other.individual_labels
            || self.id_column != other.id_column
            || self.time_column != other.time_column
            || self.missing != other.missing
        {
            return false;
        }
        if self
            .timestamp
            .iter()
            .zip(&other.timestamp)
            .any(|(a, b)| a.to_bits() != b.to_bits())
        {
            return false;
        }
        for i in 0..self.n_rows() {
            for c in 0..self.p0 {
                if !self.missing[[i, c]]
                    && self.continuous[[i, c]].to_bits() != other.continuous[[i, c]].to_bits()
                {
                    return false;
                }
            }
            for c in 0..self.p1() {
                if !self.missing[[i, self.p0 + c]]
                    && self.categorical[[i, c]] != other.categorical[[i, c]]
                {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn two_row_dataset() -> PanelDataset {
        PanelDataset::new(
            array![[1.0], [2.0]],
            Array2::zeros((2, 0)),
            array![[false], [false]],
            vec![0, 0],
            vec!["a".into()],
            vec![0.0, 1.0],
            vec![FeatureInfo {
                name: "x".into(),
                kind: FeatureKind::Continuous,
                levels: vec![],
            }],
            "id".into(),
            "t".into(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_duplicate_id_time() {
        let err = PanelDataset::new(
            array![[1.0], [2.0]],
            Array2::zeros((2, 0)),
            array![[false], [false]],
            vec![0, 0],
            vec!["a".into()],
            vec![3.0, 3.0],
            vec![FeatureInfo {
                name: "x".into(),
                kind: FeatureKind::Continuous,
                levels: vec![],
            }],
            "id".into(),
            "t".into(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn sorts_rows_by_individual_then_time() {
        let ds = PanelDataset::new(
            array![[10.0], [20.0], [30.0]],
            Array2::zeros((3, 0)),
            array![[false], [false], [false]],
            vec![1, 0, 1],
            vec!["a".into(), "b".into()],
            vec![5.0, 0.0, 1.0],
            vec![FeatureInfo {
                name: "x".into(),
                kind: FeatureKind::Continuous,
                levels: vec![],
            }],
            "id".into(),
            "t".into(),
        )
        .unwrap();
        assert_eq!(
            (0..3).map(|i| ds.individual_of(i)).collect::<Vec<_>>(),
            vec![0, 1, 1]
        );
        assert_eq!(ds.observed_continuous(0, 0), Some(20.0));
        assert_eq!(ds.observed_continuous(1, 0), Some(30.0));
        assert_eq!(ds.timestamp_of(1), 1.0);
    }

    #[test]
    fn masked_cells_hold_sentinels_and_hide_values() {
        let ds = PanelDataset::new(
            array![[1.0], [2.0]],
            Array2::zeros((2, 0)),
            array![[true], [false]],
            vec![0, 0],
            vec!["a".into()],
            vec![0.0, 1.0],
            vec![FeatureInfo {
                name: "x".into(),
                kind: FeatureKind::Continuous,
                levels: vec![],
            }],
            "id".into(),
            "t".into(),
        )
        .unwrap();
        assert_eq!(ds.observed_continuous(0, 0), None);
        assert!(ds.raw_continuous()[[0, 0]].is_nan());
        assert_eq!(ds.observed_cell_count(), 1);
    }

    #[test]
    fn row_ranges_cover_individuals() {
        let ds = two_row_dataset();
        assert_eq!(ds.individual_row_ranges(), vec![0..2]);
    }

    #[test]
    fn empty_dataset_rejected() {
        let err = PanelDataset::new(
            Array2::zeros((0, 1)),
            Array2::zeros((0, 0)),
            Array2::from_elem((0, 1), false),
            vec![],
            vec![],
            vec![],
            vec![FeatureInfo {
                name: "x".into(),
                kind: FeatureKind::Continuous,
                levels: vec![],
            }],
            "id".into(),
            "t".into(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("no observations"));
    }
}

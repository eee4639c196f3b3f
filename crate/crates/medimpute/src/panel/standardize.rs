//! Observed-entry z-scoring of continuous columns.
//!
//! The distance metric sums squared differences across features, so
//! continuous columns must live on comparable scales before imputation.
//! Moments are computed over observed entries only; a zero-variance column
//! records sd = 1 so scaling is a no-op.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::panel::PanelDataset;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StandardizationParams {
    /// Per continuous column: observed mean.
    pub mean: Vec<f64>,
    /// Per continuous column: observed sample standard deviation, 1.0 when
    /// the column is constant (or has a single observed entry).
    pub sd: Vec<f64>,
}

impl StandardizationParams {
    /// z-scored value back to native units. `col` is the continuous column
    /// index (equal to the global feature index for continuous features).
    pub fn restore_value(&self, col: usize, z: f64) -> f64 {
        z * self.sd[col] + self.mean[col]
    }

    pub fn apply_value(&self, col: usize, x: f64) -> f64 {
        (x - self.mean[col]) / self.sd[col]
    }
}

/// Returns a copy of the dataset whose continuous columns have observed mean
/// 0 and sd 1, plus the parameters to invert the transform. The categorical
/// block and mask are untouched.
pub fn standardize(ds: &PanelDataset) -> Result<(PanelDataset, StandardizationParams)> {
    let p0 = ds.p0();
    let mut mean = Vec::with_capacity(p0);
    let mut sd = Vec::with_capacity(p0);
    for c in 0..p0 {
        let observed: Vec<f64> = (0..ds.n_rows())
            .filter_map(|i| ds.observed_continuous(i, c))
            .collect();
        if observed.is_empty() {
            // Nothing observed: record a no-op transform; the solver rejects
            // such columns separately.
            mean.push(0.0);
            sd.push(1.0);
            continue;
        }
        let m = observed.iter().sum::<f64>() / observed.len() as f64;
        let s = if observed.len() < 2 {
            0.0
        } else {
            let ss = observed.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
            (ss / (observed.len() - 1) as f64).sqrt()
        };
        mean.push(m);
        sd.push(if s > 0.0 { s } else { 1.0 });
    }

    let params = StandardizationParams { mean, sd };
    let mut out = ds.clone();
    for i in 0..ds.n_rows() {
        for c in 0..p0 {
            if let Some(v) = ds.observed_continuous(i, c) {
                out.set_continuous(i, c, params.apply_value(c, v));
            }
        }
    }
    Ok((out, params))
}

/// Inverse transform over observed cells.
pub fn unstandardize(ds: &PanelDataset, params: &StandardizationParams) -> PanelDataset {
    let mut out = ds.clone();
    for i in 0..ds.n_rows() {
        for c in 0..ds.p0() {
            if let Some(v) = ds.observed_continuous(i, c) {
                out.set_continuous(i, c, params.restore_value(c, v));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::{FeatureInfo, FeatureKind};
    use approx::assert_relative_eq;
    use ndarray::{array, Array2};

    fn column_dataset(values: Vec<f64>, missing: Vec<bool>) -> PanelDataset {
        let n = values.len();
        PanelDataset::new(
            Array2::from_shape_vec((n, 1), values).unwrap(),
            Array2::zeros((n, 0)),
            Array2::from_shape_vec((n, 1), missing).unwrap(),
            (0..n).map(|_| 0).collect(),
            vec!["a".into()],
            (0..n).map(|i| i as f64).collect(),
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
    fn three_values_standardize_to_unit_spread() {
        let ds = column_dataset(vec![1.0, 2.0, 3.0], vec![false, false, false]);
        let (z, params) = standardize(&ds).unwrap();
        assert_eq!(params.mean[0], 2.0);
        assert_eq!(params.sd[0], 1.0);
        assert_eq!(z.observed_continuous(0, 0), Some(-1.0));
        assert_eq!(z.observed_continuous(1, 0), Some(0.0));
        assert_eq!(z.observed_continuous(2, 0), Some(1.0));
    }

    #[test]
    fn constant_column_records_unit_sd() {
        let ds = column_dataset(vec![5.0, 5.0], vec![false, false]);
        let (z, params) = standardize(&ds).unwrap();
        assert_eq!(params.sd[0], 1.0);
        assert_eq!(z.observed_continuous(0, 0), Some(0.0));
        assert_eq!(z.observed_continuous(1, 0), Some(0.0));
    }

    #[test]
    fn moments_use_observed_entries_only() {
        // Hand-derived on the observed triple {1, 2, 4}:
        // mean = 7/3, sample variance = ((1-7/3)^2+(2-7/3)^2+(4-7/3)^2)/2 = 7/3.
        let ds = column_dataset(vec![1.0, 2.0, 4.0, 9.0], vec![false, false, false, true]);
        let (z, params) = standardize(&ds).unwrap();
        let mean = 7.0 / 3.0;
        let sd = (7.0f64 / 3.0).sqrt();
        assert_relative_eq!(params.mean[0], mean, max_relative = 1e-15);
        assert_relative_eq!(params.sd[0], sd, max_relative = 1e-15);
        assert_relative_eq!(
            z.observed_continuous(0, 0).unwrap(),
            (1.0 - mean) / sd,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            z.observed_continuous(2, 0).unwrap(),
            (4.0 - mean) / sd,
            max_relative = 1e-15
        );
        assert!(z.is_missing(3, 0));
    }

    #[test]
    fn round_trip_within_1e12_relative() {
        let values = vec![13.25, -2.5, 96.0, 0.3333333333333333, 42.0];
        let ds = column_dataset(values.clone(), vec![false; 5]);
        let (z, params) = standardize(&ds).unwrap();
        let back = unstandardize(&z, &params);
        for (i, v) in values.iter().enumerate() {
            assert_relative_eq!(
                back.observed_continuous(i, 0).unwrap(),
                *v,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn mask_and_categorical_untouched() {
        let ds = PanelDataset::new(
            array![[1.0], [3.0]],
            array![[1u32], [0u32]],
            array![[false, false], [true, false]],
            vec![0, 0],
            vec!["a".into()],
            vec![0.0, 1.0],
            vec![
                FeatureInfo {
                    name: "x".into(),
                    kind: FeatureKind::Continuous,
                    levels: vec![],
                },
                FeatureInfo {
                    name: "k".into(),
                    kind: FeatureKind::Categorical,
                    levels: vec!["a".into(), "b".into()],
                },
            ],
            "id".into(),
            "t".into(),
        )
        .unwrap();
        let (z, _) = standardize(&ds).unwrap();
        assert_eq!(z.missing_mask(), ds.missing_mask());
        assert_eq!(z.observed_categorical(0, 0), Some(1));
        assert_eq!(z.observed_categorical(1, 0), Some(0));
    }
}

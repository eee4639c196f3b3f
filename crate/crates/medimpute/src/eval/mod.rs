//! Imputation error metrics and the downstream classification task:
//! L1-regularized logistic regression on each individual's most recent
//! observation, scored by out-of-sample AUC.

mod auc;
mod logistic;

pub use auc::auc;
pub use logistic::{fit_l1_logistic, smooth_grad, smooth_loss, LogisticModel};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knn::CompletedMatrix;
use crate::panel::{MaskRecord, MaskedValue, PanelDataset};
use crate::seed;

const SPLIT_STREAM: u64 = 0x73_706c_6974; // "split"

/// Default inner grid for choosing the regularization strength on training
/// folds.
pub const DEFAULT_REG_GRID: [f64; 3] = [1e-3, 1e-2, 1e-1];

/// Held-out imputation accuracy over the cells of a mask record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    /// Mean absolute error over masked continuous cells, standardized units.
    pub mae: Option<f64>,
    /// Fraction of masked categorical cells imputed to the wrong level.
    pub misclassification: Option<f64>,
    /// Per-feature breakdown (MAE or misclassification by kind); `None` for
    /// features with no masked cells.
    pub per_feature: Vec<Option<f64>>,
    pub continuous_cells: usize,
    pub categorical_cells: usize,
}

/// Scores an imputation against the hidden truths of a mask record.
pub fn imputation_error(imputed: &CompletedMatrix, record: &MaskRecord) -> Result<MetricReport> {
    if record.is_empty() {
        return Err(Error::Data("nothing to score: mask record is empty".into()));
    }
    let p = imputed.p();
    let p0 = imputed.p0();
    let mut abs_sum = 0.0;
    let mut n_cont = 0usize;
    let mut wrong = 0usize;
    let mut n_cat = 0usize;
    let mut feature_sum = vec![0.0; p];
    let mut feature_count = vec![0usize; p];
    for cell in &record.cells {
        if cell.row >= imputed.n_rows() || cell.feature >= p {
            return Err(Error::Data(format!(
                "mask record cell ({}, {}) outside the matrix",
                cell.row, cell.feature
            )));
        }
        match cell.truth {
            MaskedValue::Continuous(truth) => {
                let err = (imputed.continuous()[[cell.row, cell.feature]] - truth).abs();
                abs_sum += err;
                n_cont += 1;
                feature_sum[cell.feature] += err;
                feature_count[cell.feature] += 1;
            }
            MaskedValue::Categorical(truth) => {
                let miss = imputed.categorical()[[cell.row, cell.feature - p0]] != truth;
                if miss {
                    wrong += 1;
                    feature_sum[cell.feature] += 1.0;
                }
                n_cat += 1;
                feature_count[cell.feature] += 1;
            }
        }
    }
    let per_feature = (0..p)
        .map(|d| {
            if feature_count[d] == 0 {
                None
            } else {
                Some(feature_sum[d] / feature_count[d] as f64)
            }
        })
        .collect();
    Ok(MetricReport {
        mae: if n_cont > 0 { Some(abs_sum / n_cont as f64) } else { None },
        misclassification: if n_cat > 0 { Some(wrong as f64 / n_cat as f64) } else { None },
        per_feature,
        continuous_cells: n_cont,
        categorical_cells: n_cat,
    })
}

/// One design row per individual from its most recent observation.
/// Categorical features expand to indicator columns with level 0 as the
/// dropped reference. Returns the design matrix and, per design row, the
/// panel row it came from (design row m belongs to individual m).
pub fn latest_observation_matrix(
    imputed: &CompletedMatrix,
    ds: &PanelDataset,
) -> (Array2<f64>, Vec<usize>) {
    let p0 = ds.p0();
    let p1 = ds.p1();
    let width = p0 + (0..p1).map(|c| ds.cardinality(c) - 1).sum::<usize>();
    let mut source_rows = Vec::with_capacity(ds.n_individuals());
    for range in ds.individual_row_ranges() {
        // rows are sorted by timestamp within an individual
        source_rows.push(range.end - 1);
    }
    let mut x = Array2::zeros((ds.n_individuals(), width));
    for (m, &row) in source_rows.iter().enumerate() {
        for c in 0..p0 {
            x[[m, c]] = imputed.continuous()[[row, c]];
        }
        let mut offset = p0;
        for c in 0..p1 {
            let code = imputed.categorical()[[row, c]] as usize;
            if code > 0 {
                x[[m, offset + code - 1]] = 1.0;
            }
            offset += ds.cardinality(c) - 1;
        }
    }
    (x, source_rows)
}

/// Seeded stratified split of individual indices; `frac` goes to train.
/// Redraws (up to 10 sub-seeds) until both sides carry both classes.
fn stratified_split(
    labels: &[bool],
    frac: f64,
    split_seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    use rand::seq::SliceRandom;
    let positives = labels.iter().filter(|&&y| y).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::Numerical("single-class labels".into()));
    }
    for attempt in 0..10u64 {
        let mut rng = seed::rng(split_seed, SPLIT_STREAM.wrapping_add(attempt));
        let mut pos: Vec<usize> = (0..labels.len()).filter(|&m| labels[m]).collect();
        let mut neg: Vec<usize> = (0..labels.len()).filter(|&m| !labels[m]).collect();
        pos.shuffle(&mut rng);
        neg.shuffle(&mut rng);
        let n_pos_train = (frac * pos.len() as f64).round() as usize;
        let n_neg_train = (frac * neg.len() as f64).round() as usize;
        let mut train: Vec<usize> = pos[..n_pos_train].to_vec();
        train.extend_from_slice(&neg[..n_neg_train]);
        let mut test: Vec<usize> = pos[n_pos_train..].to_vec();
        test.extend_from_slice(&neg[n_neg_train..]);
        let has_both = |side: &[usize]| {
            side.iter().any(|&m| labels[m]) && side.iter().any(|&m| !labels[m])
        };
        if has_both(&train) && has_both(&test) {
            train.sort_unstable();
            test.sort_unstable();
            return Ok((train, test));
        }
    }
    Err(Error::Numerical(
        "could not draw a stratified split with both classes on each side (10 attempts)".into(),
    ))
}

fn submatrix(x: &Array2<f64>, rows: &[usize]) -> Array2<f64> {
    Array2::from_shape_fn((rows.len(), x.ncols()), |(i, j)| x[[rows[i], j]])
}

/// Column-standardizes train and test by the train moments (zero-variance
/// columns are left unscaled).
fn standardize_design(train: &mut Array2<f64>, test: &mut Array2<f64>) {
    let n = train.nrows() as f64;
    for j in 0..train.ncols() {
        let mean = train.column(j).sum() / n;
        let ss: f64 = train.column(j).iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = if train.nrows() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
        let scale = if sd > 0.0 { sd } else { 1.0 };
        for v in train.column_mut(j) {
            *v = (*v - mean) / scale;
        }
        for v in test.column_mut(j) {
            *v = (*v - mean) / scale;
        }
    }
}

/// Downstream task AUC: 70/30 stratified split over individuals, L1 logistic
/// regression fit on the training rows of the latest-observation design,
/// AUC on the held-out rows.
pub fn downstream_auc(
    ds: &PanelDataset,
    imputed: &CompletedMatrix,
    labels: &[bool],
    split_seed: u64,
    reg: f64,
) -> Result<f64> {
    if labels.len() != ds.n_individuals() {
        return Err(Error::Data("label count differs from individual count".into()));
    }
    let (design, _) = latest_observation_matrix(imputed, ds);
    let (train_idx, test_idx) = stratified_split(labels, 0.7, split_seed)?;
    let mut train = submatrix(&design, &train_idx);
    let mut test = submatrix(&design, &test_idx);
    standardize_design(&mut train, &mut test);
    let train_y: Vec<bool> = train_idx.iter().map(|&m| labels[m]).collect();
    let test_y: Vec<bool> = test_idx.iter().map(|&m| labels[m]).collect();
    let model = fit_l1_logistic(&train, &train_y, reg, split_seed)?;
    auc(&model.margins(&test), &test_y)
}

/// As [`downstream_auc`], but the regularization strength is chosen from
/// `regs` by an inner stratified split of the training individuals (ties to
/// the smaller reg), then the model is refit on the full training side.
/// Returns (test AUC, chosen reg).
pub fn downstream_auc_tuned(
    ds: &PanelDataset,
    imputed: &CompletedMatrix,
    labels: &[bool],
    split_seed: u64,
    regs: &[f64],
) -> Result<(f64, f64)> {
    if regs.is_empty() {
        return Err(Error::Usage("regularization grid is empty".into()));
    }
    if labels.len() != ds.n_individuals() {
        return Err(Error::Data("label count differs from individual count".into()));
    }
    let (design, _) = latest_observation_matrix(imputed, ds);
    let (train_idx, test_idx) = stratified_split(labels, 0.7, split_seed)?;
    let train_y: Vec<bool> = train_idx.iter().map(|&m| labels[m]).collect();

    let chosen = if regs.len() == 1 {
        regs[0]
    } else {
        // inner split of the training side only
        let (inner_train, inner_val) = stratified_split(&train_y, 0.7, seed::mix(split_seed, 1))?;
        let inner_train_idx: Vec<usize> = inner_train.iter().map(|&i| train_idx[i]).collect();
        let inner_val_idx: Vec<usize> = inner_val.iter().map(|&i| train_idx[i]).collect();
        let mut it = submatrix(&design, &inner_train_idx);
        let mut iv = submatrix(&design, &inner_val_idx);
        standardize_design(&mut it, &mut iv);
        let it_y: Vec<bool> = inner_train_idx.iter().map(|&m| labels[m]).collect();
        let iv_y: Vec<bool> = inner_val_idx.iter().map(|&m| labels[m]).collect();
        let mut best = (f64::NEG_INFINITY, regs[0]);
        for &reg in regs {
            let model = fit_l1_logistic(&it, &it_y, reg, split_seed)?;
            let score = auc(&model.margins(&iv), &iv_y)?;
            if score > best.0 {
                best = (score, reg);
            }
        }
        best.1
    };

    let mut train = submatrix(&design, &train_idx);
    let mut test = submatrix(&design, &test_idx);
    standardize_design(&mut train, &mut test);
    let test_y: Vec<bool> = test_idx.iter().map(|&m| labels[m]).collect();
    let model = fit_l1_logistic(&train, &train_y, chosen, split_seed)?;
    Ok((auc(&model.margins(&test), &test_y)?, chosen))
}

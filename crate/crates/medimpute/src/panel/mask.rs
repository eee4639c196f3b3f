//! MCAR amputation: hide observed cells uniformly at random, remembering the
//! ground truth so imputations can be scored.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::PanelDataset;
use crate::seed;

const MASK_STREAM: u64 = 0x6d63_6172; // "mcar"

/// Ground-truth payload of a hidden cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MaskedValue {
    Continuous(f64),
    Categorical(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskedCell {
    pub row: usize,
    /// Global feature index (continuous columns first).
    pub feature: usize,
    pub truth: MaskedValue,
}

/// Record of an amputation run: which cells were hidden and what they held.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaskRecord {
    pub cells: Vec<MaskedCell>,
    pub mechanism: String,
    pub seed: u64,
    pub target_fraction: f64,
}

impl MaskRecord {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

fn truth_of(ds: &PanelDataset, row: usize, feature: usize) -> MaskedValue {
    if ds.is_continuous(feature) {
        MaskedValue::Continuous(ds.observed_continuous(row, feature).expect("observed cell"))
    } else {
        let col = feature - ds.p0();
        MaskedValue::Categorical(ds.observed_categorical(row, col).expect("observed cell"))
    }
}

/// Hides exactly `round(fraction * observed_cell_count)` observed cells,
/// selected uniformly without replacement as a prefix of one seeded shuffle.
/// Deterministic given the seed, and masks drawn at the same seed nest
/// across fractions, which pairs benchmark conditions. Rounding is half-up
/// so the benchmark fractions reproduce exactly.
pub fn apply_mcar_mask(
    ds: &PanelDataset,
    fraction: f64,
    mask_seed: u64,
) -> Result<(PanelDataset, MaskRecord)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Usage(format!(
            "missing fraction {} outside [0, 1]",
            fraction
        )));
    }
    let observed = ds.observed_cells();
    if observed.is_empty() {
        return Err(Error::Data("dataset has no observed cells to mask".into()));
    }
    let count = (fraction * observed.len() as f64).round() as usize;
    let mut rng = seed::rng(mask_seed, MASK_STREAM);
    let mut order: Vec<usize> = (0..observed.len()).collect();
    order.shuffle(&mut rng);
    let mut chosen: Vec<usize> = order[..count].to_vec();
    chosen.sort_unstable();

    let cells: Vec<(usize, usize)> = chosen.iter().map(|&k| observed[k]).collect();
    let (masked, recorded) = mask_cells(ds, &cells)?;
    Ok((
        masked,
        MaskRecord {
            cells: recorded,
            mechanism: "mcar".into(),
            seed: mask_seed,
            target_fraction: fraction,
        },
    ))
}

/// Masks the given observed cells, returning the new dataset and the hidden
/// truths in the order given.
pub fn mask_cells(
    ds: &PanelDataset,
    cells: &[(usize, usize)],
) -> Result<(PanelDataset, Vec<MaskedCell>)> {
    let mut out = ds.clone();
    let mut recorded = Vec::with_capacity(cells.len());
    for &(row, feature) in cells {
        if row >= ds.n_rows() || feature >= ds.p() {
            return Err(Error::Data(format!(
                "mask target ({}, {}) out of bounds",
                row, feature
            )));
        }
        if ds.is_missing(row, feature) {
            return Err(Error::Data(format!(
                "mask target ({}, {}) is already missing",
                row, feature
            )));
        }
        recorded.push(MaskedCell {
            row,
            feature,
            truth: truth_of(ds, row, feature),
        });
        out.set_missing(row, feature);
    }
    Ok((out, recorded))
}

//! Exact single-cell updates for the coordinate-descent sweep.
//!
//! Fixing every other variable, the objective restricted to one missing cell
//! (i, d) is a weighted sum over partner rows j with combined weight
//!
//! ```text
//! u_ijd = (1 - alpha_d) * (z_ij + [j incomplete] * z_ji)
//!       + alpha_d * (C_ijd + [j incomplete] * C_jid)
//! ```
//!
//! The reverse terms (rows that name i as their neighbor, and incomplete
//! same-individual rows) must be included: the objective couples them, and
//! dropping them would break sweep monotonicity. For a continuous cell the
//! minimizer is the u-weighted mean of partner values; for a categorical cell
//! it is the category with the smallest total mismatch weight, ties to the
//! smallest code.
//!
//! When row i has no same-individual partners the decay side vanishes for
//! every alpha, and the update reduces to the plain K-NN weighted mean; that
//! reduction is computed without the alpha scaling so a panel with one
//! observation per individual produces bit-identical results for any alpha.

use super::{CompletedMatrix, DecayTable, Hyperparams, NeighborAssignment};

/// Result of a single-cell update. `ZeroWeight` signals that every partner
/// weight is zero (alpha = 1 with no same-individual rows, or fully decayed
/// weights); the caller substitutes the column's observed mean or mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateOutcome<T> {
    Value(T),
    ZeroWeight,
}

/// One partner row of a cell update, with its neighbor multiplicity and
/// decay weights.
struct PartnerTerm<'a> {
    row: usize,
    /// z_ij + [j incomplete] z_ji, in {0, 1, 2}.
    knn_mult: f64,
    /// 1 + [j incomplete] when j is a same-individual row, else 0.
    decay_mult: f64,
    /// Per-feature lambda^gap weights for same-individual rows.
    decay: Option<&'a [f64]>,
}

/// Sorted partner terms for one row, valid for a fixed neighbor assignment.
pub struct RowPartners<'a> {
    terms: Vec<PartnerTerm<'a>>,
    has_decay: bool,
}

/// Precomputed lookup state for one sweep: reverse neighbor lists and
/// incomplete-row flags against a frozen assignment.
pub struct SweepContext<'a> {
    na: &'a NeighborAssignment,
    dt: &'a DecayTable,
    hp: &'a Hyperparams,
    reverse: Vec<Vec<usize>>,
    position: Vec<Option<usize>>,
    incomplete: Vec<bool>,
}

impl<'a> SweepContext<'a> {
    pub fn new(
        na: &'a NeighborAssignment,
        dt: &'a DecayTable,
        hp: &'a Hyperparams,
        n_rows: usize,
    ) -> Self {
        let mut position = vec![None; n_rows];
        for (idx, &i) in na.incomplete_rows.iter().enumerate() {
            position[i] = Some(idx);
        }
        SweepContext {
            na,
            dt,
            hp,
            reverse: na.reverse(n_rows),
            position,
            incomplete: na.incomplete_flags(n_rows),
        }
    }

    /// Merges neighbors, reverse neighbors, and same-individual rows of `i`
    /// into one list sorted by row index, so weight accumulation follows a
    /// canonical order.
    pub fn row_partners(&self, i: usize) -> RowPartners<'a> {
        let mut raw: Vec<(usize, f64, f64, Option<&'a [f64]>)> = Vec::new();
        if let Some(pos) = self.position[i] {
            for &j in &self.na.neighbors[pos] {
                raw.push((j, 1.0, 0.0, None));
            }
        }
        for &j in &self.reverse[i] {
            raw.push((j, 1.0, 0.0, None));
        }
        let decay_partners = self.dt.partners(i);
        for dp in decay_partners {
            let mult = if self.incomplete[dp.row] { 2.0 } else { 1.0 };
            raw.push((dp.row, 0.0, mult, Some(dp.weights.as_slice())));
        }
        raw.sort_by_key(|t| t.0);
        let mut terms: Vec<PartnerTerm<'a>> = Vec::with_capacity(raw.len());
        for (row, knn, dmult, dec) in raw {
            match terms.last_mut() {
                Some(last) if last.row == row => {
                    last.knn_mult += knn;
                    if dec.is_some() {
                        last.decay_mult = dmult;
                        last.decay = dec;
                    }
                }
                _ => terms.push(PartnerTerm {
                    row,
                    knn_mult: knn,
                    decay_mult: dmult,
                    decay: dec,
                }),
            }
        }
        RowPartners {
            terms,
            has_decay: !decay_partners.is_empty(),
        }
    }

    /// Exact minimizer of the restricted objective for continuous cell
    /// (i, col). The result is clamped to the hull of contributing partner
    /// values, which the exact minimizer lies in.
    pub fn update_continuous(
        &self,
        i: usize,
        col: usize,
        cm: &CompletedMatrix,
        partners: &RowPartners<'_>,
    ) -> UpdateOutcome<f64> {
        let alpha = self.hp.alpha[col];
        let mut knn_num = 0.0;
        let mut knn_den = 0.0;
        let mut dec_num = 0.0;
        let mut dec_den = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in &partners.terms {
            let wj = cm.w[[t.row, col]];
            let c = t.decay.map_or(0.0, |w| t.decay_mult * w[col]);
            if t.knn_mult > 0.0 {
                knn_num += t.knn_mult * wj;
                knn_den += t.knn_mult;
            }
            if c > 0.0 {
                dec_num += c * wj;
                dec_den += c;
            }
            if (alpha < 1.0 && t.knn_mult > 0.0) || (alpha > 0.0 && c > 0.0) {
                lo = lo.min(wj);
                hi = hi.max(wj);
            }
        }

        let value = if !partners.has_decay {
            if alpha == 1.0 || knn_den == 0.0 {
                return UpdateOutcome::ZeroWeight;
            }
            knn_num / knn_den
        } else {
            let num = (1.0 - alpha) * knn_num + alpha * dec_num;
            let den = (1.0 - alpha) * knn_den + alpha * dec_den;
            if den == 0.0 {
                return UpdateOutcome::ZeroWeight;
            }
            num / den
        };
        let new = value.clamp(lo, hi);

        if cfg!(debug_assertions) {
            let old = cm.w[[i, col]];
            if old.is_finite() {
                let before = self.restricted_continuous_cost(col, cm, partners, old);
                let after = self.restricted_continuous_cost(col, cm, partners, new);
                debug_assert!(
                    after <= before * (1.0 + 1e-9) + 1e-12,
                    "cell update increased restricted cost: {} -> {}",
                    before,
                    after
                );
            }
        }
        UpdateOutcome::Value(new)
    }

    /// Restricted objective at a candidate value; differs from the full
    /// objective by a constant in this cell.
    fn restricted_continuous_cost(
        &self,
        col: usize,
        cm: &CompletedMatrix,
        partners: &RowPartners<'_>,
        w: f64,
    ) -> f64 {
        let alpha = self.hp.alpha[col];
        let mut cost = 0.0;
        for t in &partners.terms {
            let c = t.decay.map_or(0.0, |d| t.decay_mult * d[col]);
            let u = (1.0 - alpha) * t.knn_mult + alpha * c;
            let diff = w - cm.w[[t.row, col]];
            cost += u * diff * diff;
        }
        cost
    }

    /// Category with minimal total mismatch weight for cell (i, col within
    /// the categorical block); ties break to the smallest code.
    pub fn update_categorical(
        &self,
        i: usize,
        col: usize,
        cm: &CompletedMatrix,
        partners: &RowPartners<'_>,
    ) -> UpdateOutcome<u32> {
        let d = cm.p0() + col;
        let alpha = self.hp.alpha[d];
        if !partners.has_decay && alpha == 1.0 {
            return UpdateOutcome::ZeroWeight;
        }
        let card = cm.cardinality(col);
        let mut costs = vec![0.0; card];
        let mut total = 0.0;
        for t in &partners.terms {
            let vj = cm.v[[t.row, col]] as usize;
            let u = if !partners.has_decay {
                t.knn_mult
            } else {
                let c = t.decay.map_or(0.0, |w| t.decay_mult * w[d]);
                (1.0 - alpha) * t.knn_mult + alpha * c
            };
            if u > 0.0 {
                total += u;
                for (code, cost) in costs.iter_mut().enumerate() {
                    if code != vj {
                        *cost += u;
                    }
                }
            }
        }
        if total == 0.0 {
            return UpdateOutcome::ZeroWeight;
        }
        let mut best = 0usize;
        for code in 1..card {
            if costs[code] < costs[best] {
                best = code;
            }
        }
        debug_assert!(
            costs[best] <= costs[cm.v[[i, col]] as usize],
            "cell update increased mismatch cost"
        );
        UpdateOutcome::Value(best as u32)
    }
}

/// Spec-shaped convenience wrapper; `col` is the continuous column index.
pub fn update_continuous_cell(
    i: usize,
    col: usize,
    na: &NeighborAssignment,
    cm: &CompletedMatrix,
    hp: &Hyperparams,
    dt: &DecayTable,
) -> UpdateOutcome<f64> {
    let ctx = SweepContext::new(na, dt, hp, cm.n_rows());
    let partners = ctx.row_partners(i);
    ctx.update_continuous(i, col, cm, &partners)
}

/// Spec-shaped convenience wrapper; `feature` is the global feature index of
/// a categorical column.
pub fn update_categorical_cell(
    i: usize,
    feature: usize,
    na: &NeighborAssignment,
    cm: &CompletedMatrix,
    hp: &Hyperparams,
    dt: &DecayTable,
) -> UpdateOutcome<u32> {
    assert!(feature >= cm.p0(), "feature {} is not categorical", feature);
    let ctx = SweepContext::new(na, dt, hp, cm.n_rows());
    let partners = ctx.row_partners(i);
    ctx.update_categorical(i, feature - cm.p0(), cm, &partners)
}

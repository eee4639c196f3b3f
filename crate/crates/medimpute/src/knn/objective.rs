//! Objective evaluation for the imputation formulation.
//!
//! Two sums over incomplete rows i: the (1 - alpha_d)-weighted distance to
//! each of i's K neighbors, and the alpha_d * C_ijd-weighted distance to
//! every same-individual row j. The second sum runs over all j as written,
//! so a same-individual pair with both rows incomplete is counted in both
//! directions; the evaluation does not halve it.

use super::{CompletedMatrix, DecayTable, Hyperparams, NeighborAssignment};

/// Neumaier compensated accumulator. The solver compares consecutive
/// objective values with zero tolerance, so summation error must stay near
/// one ulp even with hundreds of thousands of terms.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Evaluates the full objective for the given completed matrix and neighbor
/// assignment.
pub fn objective_value(
    cm: &CompletedMatrix,
    na: &NeighborAssignment,
    hp: &Hyperparams,
    dt: &DecayTable,
) -> f64 {
    let p0 = cm.p0();
    let p1 = cm.p1();
    let mut acc = CompensatedSum::default();
    for (idx, &i) in na.incomplete_rows.iter().enumerate() {
        for &j in &na.neighbors[idx] {
            let mut pair = 0.0;
            for d in 0..p0 {
                let diff = cm.w[[i, d]] - cm.w[[j, d]];
                pair += (1.0 - hp.alpha[d]) * diff * diff;
            }
            for c in 0..p1 {
                if cm.v[[i, c]] != cm.v[[j, c]] {
                    pair += 1.0 - hp.alpha[p0 + c];
                }
            }
            acc.add(pair);
        }
        for dp in dt.partners(i) {
            let j = dp.row;
            let mut pair = 0.0;
            for d in 0..p0 {
                let diff = cm.w[[i, d]] - cm.w[[j, d]];
                pair += hp.alpha[d] * dp.weights[d] * diff * diff;
            }
            for c in 0..p1 {
                if cm.v[[i, c]] != cm.v[[j, c]] {
                    pair += hp.alpha[p0 + c] * dp.weights[p0 + c];
                }
            }
            acc.add(pair);
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knn::pairwise_distance;
    use crate::panel::{FeatureInfo, FeatureKind, PanelDataset};
    use approx::assert_relative_eq;
    use ndarray::{array, Array2};

    fn mixed_panel(individual: Vec<usize>, times: Vec<f64>) -> PanelDataset {
        let n = individual.len();
        let m = individual.iter().max().unwrap() + 1;
        PanelDataset::new(
            Array2::zeros((n, 2)),
            Array2::zeros((n, 1)),
            Array2::from_elem((n, 3), false),
            individual,
            (0..m).map(|i| format!("i{}", i)).collect(),
            times,
            vec![
                FeatureInfo { name: "x0".into(), kind: FeatureKind::Continuous, levels: vec![] },
                FeatureInfo { name: "x1".into(), kind: FeatureKind::Continuous, levels: vec![] },
                FeatureInfo {
                    name: "k0".into(),
                    kind: FeatureKind::Categorical,
                    levels: vec!["a".into(), "b".into(), "c".into()],
                },
            ],
            "id".into(),
            "t".into(),
        )
        .unwrap()
    }

    fn completed(w: Array2<f64>, v: Array2<u32>, missing: Array2<bool>) -> CompletedMatrix {
        CompletedMatrix::new(w, v, missing, vec![3])
    }

    #[test]
    fn zero_when_rows_match_their_neighbors_at_alpha_zero() {
        let w = array![[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]];
        let v = array![[1u32], [1], [1]];
        let mut missing = Array2::from_elem((3, 3), false);
        missing[[0, 0]] = true;
        let cm = completed(w, v, missing);
        let ds = mixed_panel(vec![0, 1, 2], vec![0.0, 0.0, 0.0]);
        let hp = Hyperparams::uniform(3, 0.0, 0.5, 2);
        let dt = DecayTable::build(&ds, &hp);
        let na = NeighborAssignment {
            incomplete_rows: vec![0],
            neighbors: vec![vec![1, 2]],
        };
        assert_eq!(objective_value(&cm, &na, &hp, &dt), 0.0);
    }

    #[test]
    fn alpha_zero_equals_plain_knn_distance_sum() {
        use rand::Rng;
        let mut rng = crate::seed::rng(5, 3);
        let w = Array2::from_shape_fn((6, 2), |_| rng.random_range(-2.0..2.0));
        let v = Array2::from_shape_fn((6, 1), |_| rng.random_range(0..3u32));
        let mut missing = Array2::from_elem((6, 3), false);
        missing[[0, 0]] = true;
        missing[[3, 2]] = true;
        let cm = completed(w, v, missing);
        let ds = mixed_panel(vec![0, 0, 0, 1, 1, 1], vec![0.0, 1.0, 2.0, 0.0, 1.0, 2.0]);
        let hp = Hyperparams::uniform(3, 0.0, 0.5, 2);
        let dt = DecayTable::build(&ds, &hp);
        let na = crate::knn::assign_neighbors(&cm, &[0, 3], 2);
        let got = objective_value(&cm, &na, &hp, &dt);
        let mut plain = 0.0;
        for (idx, &i) in na.incomplete_rows.iter().enumerate() {
            for &j in &na.neighbors[idx] {
                plain += pairwise_distance(i, j, &cm);
            }
        }
        assert_relative_eq!(got, plain, max_relative = 1e-12);
    }

    #[test]
    fn alpha_zero_is_independent_of_lambda() {
        use rand::Rng;
        let mut rng = crate::seed::rng(6, 4);
        let w = Array2::from_shape_fn((6, 2), |_| rng.random_range(-2.0..2.0));
        let v = Array2::from_shape_fn((6, 1), |_| rng.random_range(0..3u32));
        let mut missing = Array2::from_elem((6, 3), false);
        missing[[1, 1]] = true;
        let cm = completed(w, v, missing);
        let ds = mixed_panel(vec![0, 0, 0, 1, 1, 1], vec![0.0, 1.0, 2.0, 0.0, 1.0, 2.0]);
        let na = NeighborAssignment {
            incomplete_rows: vec![1],
            neighbors: vec![vec![0, 2]],
        };
        let mut values = Vec::new();
        for lambda in [0.1, 0.5, 1.0] {
            let hp = Hyperparams::uniform(3, 0.0, lambda, 2);
            let dt = DecayTable::build(&ds, &hp);
            values.push(objective_value(&cm, &na, &hp, &dt));
        }
        assert_eq!(values[0], values[1]);
        assert_eq!(values[1], values[2]);
    }

    /// Naive double-loop translation of the two objective sums, used as an
    /// oracle on a small mixed-alpha instance.
    fn naive_objective(
        cm: &CompletedMatrix,
        na: &NeighborAssignment,
        hp: &Hyperparams,
        ds: &PanelDataset,
    ) -> f64 {
        let p0 = cm.p0();
        let p1 = cm.p1();
        let n = cm.n_rows();
        let mut total = 0.0;
        for (idx, &i) in na.incomplete_rows.iter().enumerate() {
            for j in 0..n {
                let z = if na.neighbors[idx].contains(&j) { 1.0 } else { 0.0 };
                let c_base = if i != j && ds.individual_of(i) == ds.individual_of(j) {
                    (ds.timestamp_of(i) - ds.timestamp_of(j)).abs()
                } else {
                    f64::NAN
                };
                for d in 0..p0 {
                    let diff = cm.continuous()[[i, d]] - cm.continuous()[[j, d]];
                    total += z * (1.0 - hp.alpha[d]) * diff * diff;
                    if c_base.is_finite() {
                        total += hp.alpha[d] * hp.lambda[d].powf(c_base) * diff * diff;
                    }
                }
                for c in 0..p1 {
                    if cm.categorical()[[i, c]] != cm.categorical()[[j, c]] {
                        total += z * (1.0 - hp.alpha[p0 + c]);
                        if c_base.is_finite() {
                            total += hp.alpha[p0 + c] * hp.lambda[p0 + c].powf(c_base);
                        }
                    }
                }
            }
        }
        total
    }

    #[test]
    fn mixed_alpha_matches_naive_double_loop() {
        use rand::Rng;
        let mut rng = crate::seed::rng(7, 5);
        let w = Array2::from_shape_fn((6, 2), |_| rng.random_range(-2.0..2.0));
        let v = Array2::from_shape_fn((6, 1), |_| rng.random_range(0..3u32));
        let mut missing = Array2::from_elem((6, 3), false);
        missing[[0, 1]] = true;
        missing[[4, 2]] = true;
        let cm = completed(w, v, missing);
        let ds = mixed_panel(vec![0, 0, 0, 1, 1, 1], vec![0.0, 2.0, 5.0, 0.0, 1.0, 7.0]);
        let hp = Hyperparams {
            alpha: vec![0.2, 0.9, 0.5],
            lambda: vec![0.7, 0.4, 0.95],
            k: 2,
        };
        let dt = DecayTable::build(&ds, &hp);
        let na = crate::knn::assign_neighbors(&cm, &[0, 4], 2);
        let got = objective_value(&cm, &na, &hp, &dt);
        let want = naive_objective(&cm, &na, &hp, &ds);
        assert_relative_eq!(got, want, max_relative = 1e-12);
    }
}

//! Area under the ROC curve, Mann-Whitney convention (ties count one half).

use crate::error::{Error, Result};

/// Probability that a uniformly random positive outranks a uniformly random
/// negative, computed from average ranks so tied scores contribute exactly
/// one half.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::Numerical("scores and labels differ in length".into()));
    }
    let n = scores.len();
    let positives = labels.iter().filter(|&&y| y).count();
    let negatives = n - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::Numerical("single-class labels".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::Numerical("scores contain NaN".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        scores[a].partial_cmp(&scores[b]).expect("no NaN").then(a.cmp(&b))
    });
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j share the average rank
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if labels[idx] {
                rank_sum_pos += avg_rank;
            }
        }
        i = j;
    }
    let p = positives as f64;
    let u = rank_sum_pos - p * (p + 1.0) / 2.0;
    Ok(u / (p * negatives as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn pairwise_oracle(scores: &[f64], labels: &[bool]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &yi) in labels.iter().enumerate() {
            if !yi {
                continue;
            }
            for (j, &yj) in labels.iter().enumerate() {
                if yj {
                    continue;
                }
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn perfect_ranking_is_one() {
        assert_eq!(auc(&[0.9, 0.1], &[true, false]).unwrap(), 1.0);
    }

    #[test]
    fn all_ties_are_half() {
        assert_eq!(auc(&[0.5, 0.5, 0.5, 0.5], &[true, false, true, false]).unwrap(), 0.5);
    }

    #[test]
    fn single_class_rejected() {
        assert!(auc(&[0.1, 0.2], &[true, true]).is_err());
    }

    #[test]
    fn matches_pairwise_oracle_exactly_with_ties() {
        let mut rng = crate::seed::rng(10, 0);
        for _ in 0..50 {
            let n = rng.random_range(5..40);
            // coarse grid of score values forces plenty of ties
            let scores: Vec<f64> =
                (0..n).map(|_| (rng.random_range(0..8) as f64) / 4.0).collect();
            let mut labels: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
            labels[0] = true;
            labels[1] = false;
            let got = auc(&scores, &labels).unwrap();
            let want = pairwise_oracle(&scores, &labels);
            assert_eq!(got, want);
        }
    }

    #[test]
    fn complement_identity_for_tie_free_scores() {
        let mut rng = crate::seed::rng(11, 0);
        for _ in 0..20 {
            let n = rng.random_range(4..30);
            let scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let mut labels: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
            labels[0] = true;
            labels[1] = false;
            let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
            let total = auc(&scores, &labels).unwrap() + auc(&neg, &labels).unwrap();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn invariant_under_strictly_increasing_transforms() {
        let mut rng = crate::seed::rng(12, 0);
        let scores: Vec<f64> = (0..25).map(|_| rng.random_range(-3.0..3.0)).collect();
        let mut labels: Vec<bool> = (0..25).map(|_| rng.random::<bool>()).collect();
        labels[0] = true;
        labels[1] = false;
        let base = auc(&scores, &labels).unwrap();
        let exp: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
        let affine: Vec<f64> = scores.iter().map(|s| 3.0 * s + 7.0).collect();
        assert_eq!(auc(&exp, &labels).unwrap(), base);
        assert_eq!(auc(&affine, &labels).unwrap(), base);
    }
}

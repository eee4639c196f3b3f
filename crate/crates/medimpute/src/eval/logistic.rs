//! L1-regularized logistic regression by proximal gradient descent with
//! backtracking line search. The intercept is unpenalized.

use ndarray::Array2;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub reg: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Full objective (mean log-loss + reg * l1) after each iteration,
    /// starting from the zero vector. Non-increasing.
    pub objective_trace: Vec<f64>,
}

impl LogisticModel {
    pub fn margins(&self, x: &Array2<f64>) -> Vec<f64> {
        (0..x.nrows())
            .map(|i| {
                let mut z = self.intercept;
                for (j, w) in self.weights.iter().enumerate() {
                    z += w * x[[i, j]];
                }
                z
            })
            .collect()
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

/// Mean logistic loss, evaluated stably via
/// `ln(1 + e^a) = max(a, 0) + ln(1 + e^-|a|)`.
pub fn smooth_loss(x: &Array2<f64>, y: &[bool], weights: &[f64], intercept: f64) -> f64 {
    let n = x.nrows();
    let mut total = 0.0;
    for i in 0..n {
        let mut z = intercept;
        for (j, w) in weights.iter().enumerate() {
            z += w * x[[i, j]];
        }
        let a = if y[i] { -z } else { z };
        total += a.max(0.0) + (-a.abs()).exp().ln_1p();
    }
    total / n as f64
}

/// Gradient of the mean logistic loss with respect to (weights, intercept).
pub fn smooth_grad(
    x: &Array2<f64>,
    y: &[bool],
    weights: &[f64],
    intercept: f64,
) -> (Vec<f64>, f64) {
    let n = x.nrows();
    let m = x.ncols();
    let mut gw = vec![0.0; m];
    let mut gb = 0.0;
    for i in 0..n {
        let mut z = intercept;
        for (j, w) in weights.iter().enumerate() {
            z += w * x[[i, j]];
        }
        let sign = if y[i] { 1.0 } else { -1.0 };
        let gz = -sign * sigmoid(-sign * z);
        gb += gz;
        for j in 0..m {
            gw[j] += gz * x[[i, j]];
        }
    }
    for g in &mut gw {
        *g /= n as f64;
    }
    (gw, gb / n as f64)
}

fn soft_threshold(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

fn l1(weights: &[f64]) -> f64 {
    weights.iter().map(|w| w.abs()).sum()
}

/// Minimizes `mean log-loss + reg * ||w||_1` (intercept unpenalized) from the
/// zero vector. Steps must both satisfy the proximal sufficient-decrease
/// condition and lower the full objective, so the recorded trace is
/// non-increasing; convergence is declared when the relative objective change
/// drops below 1e-8, with a 10,000 iteration cap.
///
/// The method is deterministic; `_seed` is part of the interface for
/// compatibility with stochastic fitters and is not consumed.
pub fn fit_l1_logistic(
    x: &Array2<f64>,
    y: &[bool],
    reg: f64,
    _seed: u64,
) -> Result<LogisticModel> {
    let n = x.nrows();
    let m = x.ncols();
    if n == 0 || y.len() != n {
        return Err(Error::Numerical("labels and design rows disagree".into()));
    }
    if reg.is_nan() || reg < 0.0 {
        return Err(Error::Usage("regularization strength must be non-negative".into()));
    }
    let positives = y.iter().filter(|&&v| v).count();
    if positives == 0 || positives == n {
        return Err(Error::Numerical("single-class labels".into()));
    }

    const MAX_ITERS: usize = 10_000;
    const REL_TOL: f64 = 1e-8;

    let mut weights = vec![0.0; m];
    let mut intercept = 0.0;
    let mut f_cur = smooth_loss(x, y, &weights, intercept);
    let mut objective = f_cur + reg * l1(&weights);
    let mut trace = vec![objective];
    let mut step: f64 = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=MAX_ITERS {
        iterations = iter;
        let (gw, gb) = smooth_grad(x, y, &weights, intercept);
        step = (step * 2.0).min(1e3);
        let mut accepted = false;
        let mut w_new = vec![0.0; m];
        let mut b_new = 0.0;
        let mut f_new = 0.0;
        let mut obj_new = 0.0;
        while step >= 1e-18 {
            for j in 0..m {
                w_new[j] = soft_threshold(weights[j] - step * gw[j], step * reg);
            }
            b_new = intercept - step * gb;
            f_new = smooth_loss(x, y, &w_new, b_new);
            let mut inner = 0.0;
            let mut sq = 0.0;
            for j in 0..m {
                let dj = w_new[j] - weights[j];
                inner += gw[j] * dj;
                sq += dj * dj;
            }
            let db = b_new - intercept;
            inner += gb * db;
            sq += db * db;
            obj_new = f_new + reg * l1(&w_new);
            if f_new <= f_cur + inner + sq / (2.0 * step) && obj_new <= objective {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no step at any length improves the objective: numerically at
            // the minimizer
            converged = true;
            iterations = iter - 1;
            break;
        }
        weights = w_new;
        intercept = b_new;
        f_cur = f_new;
        let improvement = (objective - obj_new) / objective.abs().max(f64::MIN_POSITIVE);
        objective = obj_new;
        trace.push(objective);
        if improvement < REL_TOL {
            converged = true;
            break;
        }
    }

    Ok(LogisticModel {
        weights,
        intercept,
        reg,
        iterations,
        converged,
        objective_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::Rng;

    fn full_objective(x: &Array2<f64>, y: &[bool], w: &[f64], b: f64, reg: f64) -> f64 {
        smooth_loss(x, y, w, b) + reg * l1(w)
    }

    #[test]
    fn huge_regularization_zeroes_weights_and_leaves_base_rate_intercept() {
        let x = array![[1.0], [2.0], [-1.0], [0.5], [1.5]];
        let y = vec![true, true, false, false, true];
        let model = fit_l1_logistic(&x, &y, 1e6, 0).unwrap();
        assert!(model.weights.iter().all(|&w| w == 0.0));
        let base_rate: f64 = 3.0 / 5.0;
        let log_odds = (base_rate / (1.0 - base_rate)).ln();
        assert!(
            (model.intercept - log_odds).abs() < 1e-3,
            "intercept {} vs log-odds {}",
            model.intercept,
            log_odds
        );
    }

    #[test]
    fn separated_1d_data_matches_refinement_search_oracle() {
        // perfectly separated at 0; reg keeps the optimum finite
        let x = array![[-2.0], [-1.0], [-0.5], [0.5], [1.0], [2.0]];
        let y = vec![false, false, false, true, true, true];
        let reg = 0.1;
        let model = fit_l1_logistic(&x, &y, reg, 0).unwrap();
        assert!(model.weights[0].is_finite());

        // iterative 2-D grid refinement over (w, b)
        let mut center = (0.0, 0.0);
        let mut span = 10.0;
        for _ in 0..14 {
            let mut best = (f64::INFINITY, center);
            for i in -20..=20 {
                for j in -20..=20 {
                    let w = center.0 + span * i as f64 / 20.0;
                    let b = center.1 + span * j as f64 / 20.0;
                    let f = full_objective(&x, &y, &[w], b, reg);
                    if f < best.0 {
                        best = (f, (w, b));
                    }
                }
            }
            center = best.1;
            span *= 0.2;
        }
        let oracle_obj = full_objective(&x, &y, &[center.0], center.1, reg);
        let fit_obj = full_objective(&x, &y, &model.weights, model.intercept, reg);
        assert!(
            (fit_obj - oracle_obj).abs() < 1e-4,
            "fit {} vs oracle {}",
            fit_obj,
            oracle_obj
        );

        // training log-loss beats the base-rate fill
        let base = smooth_loss(&x, &y, &[0.0], 0.0);
        assert!(smooth_loss(&x, &y, &model.weights, model.intercept) < base);
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let mut rng = crate::seed::rng(20, 0);
        for _ in 0..20 {
            let n = rng.random_range(5..20);
            let m = rng.random_range(1..5);
            let x = Array2::from_shape_fn((n, m), |_| rng.random_range(-2.0..2.0));
            let mut y: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
            y[0] = true;
            y[1] = false;
            let w: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b: f64 = rng.random_range(-1.0..1.0);
            let (gw, gb) = smooth_grad(&x, &y, &w, b);
            let h = 1e-5;
            for j in 0..m {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[j] += h;
                wm[j] -= h;
                let fd =
                    (smooth_loss(&x, &y, &wp, b) - smooth_loss(&x, &y, &wm, b)) / (2.0 * h);
                assert!(
                    (fd - gw[j]).abs() < 1e-6,
                    "fd {} vs analytic {}",
                    fd,
                    gw[j]
                );
            }
            let fd_b =
                (smooth_loss(&x, &y, &w, b + h) - smooth_loss(&x, &y, &w, b - h)) / (2.0 * h);
            assert!((fd_b - gb).abs() < 1e-6);
        }
    }

    #[test]
    fn objective_trace_is_non_increasing() {
        let mut rng = crate::seed::rng(21, 0);
        let x = Array2::from_shape_fn((40, 3), |_| rng.random_range(-2.0..2.0));
        let mut y: Vec<bool> = (0..40).map(|_| rng.random::<bool>()).collect();
        y[0] = true;
        y[1] = false;
        for reg in [0.0, 1e-3, 1e-1] {
            let model = fit_l1_logistic(&x, &y, reg, 0).unwrap();
            assert!(model.objective_trace.windows(2).all(|w| w[1] <= w[0]));
            assert!(*model.objective_trace.last().unwrap() <= model.objective_trace[0]);
        }
    }

    #[test]
    fn stronger_regularization_weakly_shrinks_weights() {
        let x = array![[-1.5], [-1.0], [-0.2], [0.3], [1.1], [1.4]];
        let y = vec![false, false, false, true, true, true];
        let mut previous = f64::INFINITY;
        for reg in [1e-3, 1e-2, 1e-1, 1.0] {
            let model = fit_l1_logistic(&x, &y, reg, 0).unwrap();
            let magnitude = model.weights[0].abs();
            assert!(
                magnitude <= previous + 1e-9,
                "|w| grew from {} to {} at reg {}",
                previous,
                magnitude,
                reg
            );
            previous = magnitude;
        }
    }

    #[test]
    fn single_class_labels_rejected() {
        let x = array![[1.0], [2.0]];
        assert!(fit_l1_logistic(&x, &[true, true], 0.1, 0).is_err());
    }
}

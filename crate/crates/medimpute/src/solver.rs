//! Block coordinate descent for the imputation objective.
//!
//! Each restart warm-starts the matrix (mean/mode fill for restart 0, seeded
//! perturbations for later restarts), then alternates a full neighbor
//! reassignment with one sweep of exact cell updates over all missing cells
//! in row-major order. Because each cell update is an exact minimizer and
//! reassignment can only lower the neighbor term, the per-iteration objective
//! trace is non-increasing. The restart with the lowest final objective wins.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knn::{
    assign_neighbors, objective_value, CompletedMatrix, DecayTable, Hyperparams, SweepContext,
    UpdateOutcome,
};
use crate::panel::PanelDataset;
use crate::seed;

const WARM_START_STREAM: u64 = 0x7761_726d; // "warm"

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub hyperparams: Hyperparams,
    /// Maximum (assignment + sweep) iterations per restart.
    pub max_sweeps: usize,
    /// Stop when the relative objective improvement over one full iteration
    /// falls below this.
    pub rel_tolerance: f64,
    /// Number of perturbed restarts in addition to the mean/mode start, so
    /// `n_restarts + 1` descents run in total.
    pub n_restarts: usize,
    pub seed: u64,
}

impl SolverConfig {
    pub fn with_defaults(hyperparams: Hyperparams) -> Self {
        SolverConfig {
            hyperparams,
            max_sweeps: 50,
            rel_tolerance: 1e-6,
            n_restarts: 5,
            seed: 0,
        }
    }

    fn validate(&self, ds: &PanelDataset) -> Result<()> {
        self.hyperparams.validate(ds.p(), ds.n_rows())?;
        if self.max_sweeps == 0 {
            return Err(Error::Usage("max_sweeps must be at least 1".into()));
        }
        if self.rel_tolerance.is_nan() || self.rel_tolerance <= 0.0 {
            return Err(Error::Usage("rel_tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// How a cell of the completed matrix got its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellProvenance {
    Observed,
    Imputed,
    /// Zero-weight cell filled with the column's observed mean/mode.
    Fallback,
}

#[derive(Debug, Clone)]
pub struct ImputationResult {
    pub completed: CompletedMatrix,
    /// Final objective of the winning restart; `None` for the mean/mode
    /// baseline, which has no objective.
    pub objective: Option<f64>,
    pub winner_restart: usize,
    /// Iterations used, per restart.
    pub sweeps_used: Vec<usize>,
    /// Objective trace per restart: warm-start value first, then one entry
    /// per (assignment + sweep) iteration.
    pub objective_traces: Vec<Vec<f64>>,
    pub provenance: Array2<CellProvenance>,
}

/// Observed per-column statistics used by warm starts and fallbacks.
struct ColumnStats {
    cont_mean: Vec<f64>,
    cont_sd: Vec<f64>,
    cat_mode: Vec<u32>,
    /// Cumulative observed level frequencies per categorical column.
    cat_cumfreq: Vec<Vec<f64>>,
}

impl ColumnStats {
    fn compute(ds: &PanelDataset) -> Result<Self> {
        let mut cont_mean = Vec::with_capacity(ds.p0());
        let mut cont_sd = Vec::with_capacity(ds.p0());
        for c in 0..ds.p0() {
            let observed: Vec<f64> = (0..ds.n_rows())
                .filter_map(|i| ds.observed_continuous(i, c))
                .collect();
            if observed.is_empty() {
                return Err(Error::UnimputableColumn(ds.features()[c].name.clone()));
            }
            let mean = observed.iter().sum::<f64>() / observed.len() as f64;
            let sd = if observed.len() < 2 {
                0.0
            } else {
                let ss = observed.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
                (ss / (observed.len() - 1) as f64).sqrt()
            };
            cont_mean.push(mean);
            cont_sd.push(sd);
        }
        let mut cat_mode = Vec::with_capacity(ds.p1());
        let mut cat_cumfreq = Vec::with_capacity(ds.p1());
        for c in 0..ds.p1() {
            let card = ds.cardinality(c);
            let mut counts = vec![0usize; card];
            for i in 0..ds.n_rows() {
                if let Some(code) = ds.observed_categorical(i, c) {
                    counts[code as usize] += 1;
                }
            }
            let total: usize = counts.iter().sum();
            if total == 0 {
                return Err(Error::UnimputableColumn(ds.features()[ds.p0() + c].name.clone()));
            }
            let mut mode = 0usize;
            for code in 1..card {
                if counts[code] > counts[mode] {
                    mode = code;
                }
            }
            cat_mode.push(mode as u32);
            let mut cum = Vec::with_capacity(card);
            let mut acc = 0.0;
            for &count in &counts {
                acc += count as f64 / total as f64;
                cum.push(acc);
            }
            cat_cumfreq.push(cum);
        }
        Ok(ColumnStats { cont_mean, cont_sd, cat_mode, cat_cumfreq })
    }

    fn draw_categorical(&self, col: usize, u: f64) -> u32 {
        let cum = &self.cat_cumfreq[col];
        for (code, &threshold) in cum.iter().enumerate() {
            if u < threshold {
                return code as u32;
            }
        }
        (cum.len() - 1) as u32
    }
}

fn warm_start_with(
    ds: &PanelDataset,
    stats: &ColumnStats,
    restart_index: usize,
    seed_value: u64,
) -> CompletedMatrix {
    let mut w = ds.raw_continuous().clone();
    let mut v = ds.raw_categorical().clone();
    let mut rng = seed::rng(seed_value, WARM_START_STREAM.wrapping_add(restart_index as u64));
    let p0 = ds.p0();
    for i in 0..ds.n_rows() {
        for d in 0..ds.p() {
            if !ds.is_missing(i, d) {
                continue;
            }
            if d < p0 {
                w[[i, d]] = if restart_index == 0 {
                    stats.cont_mean[d]
                } else {
                    // noise sd is half the column's observed spread, i.e.
                    // 0.5 on standardized data; constant columns stay exact
                    let z: f64 = rng.sample(StandardNormal);
                    stats.cont_mean[d] + 0.5 * stats.cont_sd[d] * z
                };
            } else {
                let col = d - p0;
                v[[i, col]] = if restart_index == 0 {
                    stats.cat_mode[col]
                } else {
                    stats.draw_categorical(col, rng.random::<f64>())
                };
            }
        }
    }
    CompletedMatrix::new(
        w,
        v,
        ds.missing_mask().clone(),
        (0..ds.p1()).map(|c| ds.cardinality(c)).collect(),
    )
}

/// Fills missing cells: restart 0 uses the column mean/mode, later restarts
/// perturb (Gaussian noise for continuous cells, draws from the observed
/// level frequencies for categorical ones). Deterministic given
/// (restart_index, seed).
pub fn warm_start(
    ds: &PanelDataset,
    restart_index: usize,
    seed_value: u64,
) -> Result<CompletedMatrix> {
    let stats = ColumnStats::compute(ds)?;
    Ok(warm_start_with(ds, &stats, restart_index, seed_value))
}

struct RestartOutcome {
    cm: CompletedMatrix,
    objective: f64,
    sweeps: usize,
    trace: Vec<f64>,
    fallback_cells: Vec<(usize, usize)>,
}

fn sweep_cells(
    cm: &mut CompletedMatrix,
    ds: &PanelDataset,
    ctx: &SweepContext<'_>,
    stats: &ColumnStats,
) -> Vec<(usize, usize)> {
    let p0 = ds.p0();
    let mut fallback = Vec::new();
    for &i in &ds.incomplete_rows() {
        let partners = ctx.row_partners(i);
        for d in 0..ds.p() {
            if !ds.is_missing(i, d) {
                continue;
            }
            if d < p0 {
                match ctx.update_continuous(i, d, cm, &partners) {
                    UpdateOutcome::Value(value) => cm.set_continuous(i, d, value),
                    UpdateOutcome::ZeroWeight => {
                        cm.set_continuous(i, d, stats.cont_mean[d]);
                        fallback.push((i, d));
                    }
                }
            } else {
                let col = d - p0;
                match ctx.update_categorical(i, col, cm, &partners) {
                    UpdateOutcome::Value(code) => cm.set_categorical(i, col, code),
                    UpdateOutcome::ZeroWeight => {
                        cm.set_categorical(i, col, stats.cat_mode[col]);
                        fallback.push((i, d));
                    }
                }
            }
        }
    }
    fallback
}

fn descend(
    mut cm: CompletedMatrix,
    ds: &PanelDataset,
    cfg: &SolverConfig,
    dt: &DecayTable,
    incomplete: &[usize],
    stats: &ColumnStats,
) -> RestartOutcome {
    let hp = &cfg.hyperparams;
    let mut na = assign_neighbors(&cm, incomplete, hp.k);
    let mut objective = objective_value(&cm, &na, hp, dt);
    let mut trace = vec![objective];
    let mut sweeps = 0usize;
    let mut fallback_cells = Vec::new();
    if incomplete.is_empty() {
        return RestartOutcome { cm, objective, sweeps, trace, fallback_cells };
    }
    loop {
        let ctx = SweepContext::new(&na, dt, hp, cm.n_rows());
        fallback_cells = sweep_cells(&mut cm, ds, &ctx, stats);
        sweeps += 1;
        na = assign_neighbors(&cm, incomplete, hp.k);
        let next = objective_value(&cm, &na, hp, dt);
        trace.push(next);
        let improvement = (objective - next) / objective.abs().max(f64::MIN_POSITIVE);
        objective = next;
        if improvement < cfg.rel_tolerance || sweeps >= cfg.max_sweeps {
            break;
        }
    }
    RestartOutcome { cm, objective, sweeps, trace, fallback_cells }
}

fn provenance_of(
    ds: &PanelDataset,
    fallback_cells: &[(usize, usize)],
) -> Array2<CellProvenance> {
    let mut prov = Array2::from_shape_fn((ds.n_rows(), ds.p()), |(i, d)| {
        if ds.is_missing(i, d) {
            CellProvenance::Imputed
        } else {
            CellProvenance::Observed
        }
    });
    for &(i, d) in fallback_cells {
        prov[[i, d]] = CellProvenance::Fallback;
    }
    prov
}

/// Full solve: coordinate descent with random restarts under the given
/// hyperparameters. Observed cells are never modified.
pub fn med_impute(ds: &PanelDataset, cfg: &SolverConfig) -> Result<ImputationResult> {
    cfg.validate(ds)?;
    let stats = ColumnStats::compute(ds)?;
    let dt = DecayTable::build(ds, &cfg.hyperparams);
    let incomplete = ds.incomplete_rows();

    let mut best: Option<(usize, RestartOutcome)> = None;
    let mut sweeps_used = Vec::with_capacity(cfg.n_restarts + 1);
    let mut traces = Vec::with_capacity(cfg.n_restarts + 1);
    for restart in 0..=cfg.n_restarts {
        let start = warm_start_with(ds, &stats, restart, cfg.seed);
        let outcome = descend(start, ds, cfg, &dt, &incomplete, &stats);
        sweeps_used.push(outcome.sweeps);
        traces.push(outcome.trace.clone());
        let better = match &best {
            None => true,
            Some((_, current)) => outcome.objective < current.objective,
        };
        if better {
            best = Some((restart, outcome));
        }
    }
    let (winner_restart, outcome) = best.expect("at least one restart runs");
    let provenance = provenance_of(ds, &outcome.fallback_cells);
    Ok(ImputationResult {
        completed: outcome.cm,
        objective: Some(outcome.objective),
        winner_restart,
        sweeps_used,
        objective_traces: traces,
        provenance,
    })
}

/// The plain K-NN objective: identical to [`med_impute`] with every alpha
/// forced to zero.
pub fn opt_impute(ds: &PanelDataset, cfg: &SolverConfig) -> Result<ImputationResult> {
    let mut zeroed = cfg.clone();
    zeroed.hyperparams = cfg.hyperparams.zero_alpha();
    med_impute(ds, &zeroed)
}

/// Column mean/mode baseline. Ties in the mode break to the smallest code.
pub fn mean_impute(ds: &PanelDataset) -> Result<ImputationResult> {
    let stats = ColumnStats::compute(ds)?;
    let cm = warm_start_with(ds, &stats, 0, 0);
    let provenance = provenance_of(ds, &[]);
    Ok(ImputationResult {
        completed: cm,
        objective: None,
        winner_restart: 0,
        sweeps_used: Vec::new(),
        objective_traces: Vec::new(),
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::{apply_mcar_mask, synth_panel, FeatureInfo, FeatureKind, SynthConfig};
    use ndarray::array;

    fn fixture(
        w: Array2<f64>,
        missing_cont: Array2<bool>,
        v: Array2<u32>,
        missing_cat: Array2<bool>,
        levels: usize,
    ) -> PanelDataset {
        let n = w.nrows();
        let (p0, p1) = (w.ncols(), v.ncols());
        let mut missing = Array2::from_elem((n, p0 + p1), false);
        for i in 0..n {
            for c in 0..p0 {
                missing[[i, c]] = missing_cont[[i, c]];
            }
            for c in 0..p1 {
                missing[[i, p0 + c]] = missing_cat[[i, c]];
            }
        }
        let mut features: Vec<FeatureInfo> = (0..p0)
            .map(|c| FeatureInfo {
                name: format!("x{}", c),
                kind: FeatureKind::Continuous,
                levels: vec![],
            })
            .collect();
        features.extend((0..p1).map(|c| FeatureInfo {
            name: format!("k{}", c),
            kind: FeatureKind::Categorical,
            levels: (0..levels).map(|l| format!("l{}", l)).collect(),
        }));
        PanelDataset::new(
            w,
            v,
            missing,
            (0..n).collect(),
            (0..n).map(|i| format!("i{}", i)).collect(),
            vec![0.0; n],
            features,
            "id".into(),
            "t".into(),
        )
        .unwrap()
    }

    #[test]
    fn restart_zero_fills_mean_and_mode() {
        let ds = fixture(
            array![[2.0], [4.0], [0.0]],
            array![[false], [false], [true]],
            array![[0u32], [0], [1]],
            array![[false], [false], [true]],
            2,
        );
        let cm = warm_start(&ds, 0, 123).unwrap();
        assert_eq!(cm.continuous()[[2, 0]], 3.0);
        assert_eq!(cm.categorical()[[2, 0]], 0);
        // observed cells untouched
        assert_eq!(cm.continuous()[[0, 0]], 2.0);
        assert_eq!(cm.categorical()[[1, 0]], 0);
    }

    #[test]
    fn perturbed_restarts_differ_but_reproduce() {
        let ds = fixture(
            array![[2.0], [4.0], [0.0], [0.0]],
            array![[false], [false], [true], [true]],
            Array2::zeros((4, 0)),
            Array2::from_elem((4, 0), false),
            2,
        );
        let r1a = warm_start(&ds, 1, 5).unwrap();
        let r1b = warm_start(&ds, 1, 5).unwrap();
        let r2 = warm_start(&ds, 2, 5).unwrap();
        assert_eq!(r1a, r1b);
        assert_ne!(r1a, r2);
        assert_ne!(r1a.continuous()[[2, 0]], 3.0); // actually perturbed
    }

    #[test]
    fn unimputable_column_is_rejected() {
        let ds = fixture(
            array![[0.0], [0.0]],
            array![[true], [true]],
            Array2::zeros((2, 0)),
            Array2::from_elem((2, 0), false),
            2,
        );
        match warm_start(&ds, 0, 0) {
            Err(Error::UnimputableColumn(name)) => assert_eq!(name, "x0"),
            other => panic!("expected unimputable column, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn no_missing_cells_returns_input_with_zero_objective() {
        let ds = fixture(
            array![[1.0, 5.0], [2.0, 6.0], [3.0, 7.0]],
            Array2::from_elem((3, 2), false),
            Array2::zeros((3, 0)),
            Array2::from_elem((3, 0), false),
            2,
        );
        let cfg = SolverConfig::with_defaults(Hyperparams::uniform(2, 0.5, 0.5, 2));
        let result = med_impute(&ds, &cfg).unwrap();
        assert_eq!(result.objective, Some(0.0));
        assert_eq!(result.completed.continuous(), ds.raw_continuous());
        assert!(result
            .provenance
            .iter()
            .all(|&p| p == CellProvenance::Observed));
    }

    #[test]
    fn two_nearest_neighbor_mean_on_hand_fixture() {
        // One missing cell; alpha = 0, K = 2. Column 0 separates rows so the
        // two nearest rows are 1 and 2 in every sweep once the mean fill
        // (60) is replaced; their column-1 mean is 20.
        let ds = fixture(
            array![[0.0, 0.0], [0.1, 10.0], [0.2, 30.0], [60.0, 100.0], [90.0, 100.0]],
            {
                let mut m = Array2::from_elem((5, 2), false);
                m[[0, 1]] = true;
                m
            },
            Array2::zeros((5, 0)),
            Array2::from_elem((5, 0), false),
            2,
        );
        let mut cfg = SolverConfig::with_defaults(Hyperparams::uniform(2, 0.0, 0.5, 2));
        cfg.n_restarts = 0;
        let result = med_impute(&ds, &cfg).unwrap();
        assert_eq!(result.completed.continuous()[[0, 1]], 20.0);
        assert_eq!(result.winner_restart, 0);
        // warm-start objective recorded first, then monotone iterations
        let trace = &result.objective_traces[0];
        assert!(trace.len() >= 2);
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    fn masked_panel(seed: u64, fraction: f64) -> PanelDataset {
        let cfg = SynthConfig {
            individuals: 5,
            obs_per_individual: 4,
            continuous_features: 2,
            categorical_features: 1,
            autocorrelation: 0.6,
            time_step: 1.0,
            outcome_sparsity: 1.0,
            seed,
            categorical_levels: 3,
        };
        let (ds, _) = synth_panel(&cfg).unwrap();
        apply_mcar_mask(&ds, fraction, seed).unwrap().0
    }

    #[test]
    fn objective_traces_are_monotone_and_beat_warm_start() {
        for seed in 0..5 {
            let ds = masked_panel(seed, 0.3);
            let cfg = SolverConfig {
                hyperparams: Hyperparams::uniform(3, 0.5, 0.7, 3),
                max_sweeps: 50,
                rel_tolerance: 1e-6,
                n_restarts: 2,
                seed,
            };
            let result = med_impute(&ds, &cfg).unwrap();
            for trace in &result.objective_traces {
                assert!(
                    trace.windows(2).all(|w| w[1] <= w[0]),
                    "non-monotone trace {:?}",
                    trace
                );
            }
            let finals: Vec<f64> =
                result.objective_traces.iter().map(|t| *t.last().unwrap()).collect();
            let min = finals.iter().cloned().fold(f64::INFINITY, f64::min);
            assert_eq!(result.objective, Some(min));
        }
    }

    #[test]
    fn known_cells_are_preserved() {
        let ds = masked_panel(3, 0.4);
        let cfg = SolverConfig::with_defaults(Hyperparams::uniform(3, 0.75, 0.5, 4));
        let result = med_impute(&ds, &cfg).unwrap();
        for i in 0..ds.n_rows() {
            for c in 0..ds.p0() {
                if let Some(v) = ds.observed_continuous(i, c) {
                    assert_eq!(result.completed.continuous()[[i, c]], v);
                }
            }
            for c in 0..ds.p1() {
                if let Some(code) = ds.observed_categorical(i, c) {
                    assert_eq!(result.completed.categorical()[[i, c]], code);
                }
            }
        }
    }

    #[test]
    fn identical_inputs_give_bit_identical_results() {
        let ds = masked_panel(8, 0.3);
        let cfg = SolverConfig::with_defaults(Hyperparams::uniform(3, 0.5, 0.9, 3));
        let a = med_impute(&ds, &cfg).unwrap();
        let b = med_impute(&ds, &cfg).unwrap();
        assert_eq!(a.completed, b.completed);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.winner_restart, b.winner_restart);
        assert_eq!(a.objective_traces, b.objective_traces);
    }

    #[test]
    fn reported_objective_matches_a_fresh_evaluation() {
        let ds = masked_panel(9, 0.35);
        let cfg = SolverConfig::with_defaults(Hyperparams::uniform(3, 0.4, 0.6, 4));
        let result = med_impute(&ds, &cfg).unwrap();
        let dt = DecayTable::build(&ds, &cfg.hyperparams);
        let na = crate::knn::assign_neighbors(
            &result.completed,
            &ds.incomplete_rows(),
            cfg.hyperparams.k,
        );
        let recomputed = objective_value(&result.completed, &na, &cfg.hyperparams, &dt);
        assert_eq!(result.objective, Some(recomputed));
    }

    #[test]
    fn opt_impute_is_med_with_zero_alpha() {
        let ds = masked_panel(11, 0.25);
        let mut cfg = SolverConfig::with_defaults(Hyperparams::uniform(3, 0.6, 0.4, 3));
        cfg.n_restarts = 2;
        let opt = opt_impute(&ds, &cfg).unwrap();
        let mut zero = cfg.clone();
        zero.hyperparams = cfg.hyperparams.zero_alpha();
        let med = med_impute(&ds, &zero).unwrap();
        assert_eq!(opt.completed, med.completed);
        assert_eq!(opt.objective, med.objective);
        assert_eq!(opt.objective_traces, med.objective_traces);
    }

    #[test]
    fn lambda_has_no_effect_when_alpha_is_zero() {
        let ds = masked_panel(12, 0.3);
        let mut a_cfg = SolverConfig::with_defaults(Hyperparams::uniform(3, 0.0, 0.1, 3));
        a_cfg.n_restarts = 1;
        let mut b_cfg = a_cfg.clone();
        b_cfg.hyperparams.lambda = vec![0.9; 3];
        let a = med_impute(&ds, &a_cfg).unwrap();
        let b = med_impute(&ds, &b_cfg).unwrap();
        assert_eq!(a.completed, b.completed);
        assert_eq!(a.objective, b.objective);
    }

    #[test]
    fn single_observation_per_individual_makes_alpha_inert() {
        let cfg = SynthConfig {
            individuals: 12,
            obs_per_individual: 1,
            continuous_features: 2,
            categorical_features: 1,
            autocorrelation: 0.0,
            time_step: 1.0,
            outcome_sparsity: 1.0,
            seed: 21,
            categorical_levels: 3,
        };
        let (full, _) = synth_panel(&cfg).unwrap();
        let (ds, _) = apply_mcar_mask(&full, 0.3, 21).unwrap();
        let mut solver_cfg = SolverConfig::with_defaults(Hyperparams::uniform(3, 0.7, 0.5, 3));
        solver_cfg.n_restarts = 2;
        let med = med_impute(&ds, &solver_cfg).unwrap();
        let opt = opt_impute(&ds, &solver_cfg).unwrap();
        assert_eq!(med.completed, opt.completed);
        assert_eq!(med.winner_restart, opt.winner_restart);
        assert_eq!(med.sweeps_used, opt.sweeps_used);
    }

    #[test]
    fn mean_impute_fills_mean_and_mode() {
        let ds = fixture(
            array![[1.0], [3.0], [0.0]],
            array![[false], [false], [true]],
            array![[1u32], [1], [0]],
            array![[false], [false], [true]],
            3,
        );
        let result = mean_impute(&ds).unwrap();
        assert_eq!(result.completed.continuous()[[2, 0]], 2.0);
        assert_eq!(result.completed.categorical()[[2, 0]], 1);
        assert_eq!(result.objective, None);
        assert_eq!(result.provenance[[2, 0]], CellProvenance::Imputed);
        assert_eq!(result.provenance[[0, 0]], CellProvenance::Observed);
    }

    #[test]
    fn mean_impute_on_standardized_data_fills_zero() {
        let ds = masked_panel(14, 0.4);
        let (z, _) = crate::panel::standardize(&ds).unwrap();
        let result = mean_impute(&z).unwrap();
        for i in 0..z.n_rows() {
            for c in 0..z.p0() {
                if z.is_missing(i, c) {
                    assert!(result.completed.continuous()[[i, c]].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn fallback_cells_get_column_mean_and_are_flagged() {
        // alpha = 1 and a lone individual: zero weight everywhere for its row
        let ds = PanelDataset::new(
            array![[1.0], [2.0], [0.0]],
            Array2::zeros((3, 0)),
            {
                let mut m = Array2::from_elem((3, 1), false);
                m[[2, 0]] = true;
                m
            },
            vec![0, 0, 1],
            vec!["a".into(), "b".into()],
            vec![0.0, 1.0, 0.0],
            vec![FeatureInfo {
                name: "x".into(),
                kind: FeatureKind::Continuous,
                levels: vec![],
            }],
            "id".into(),
            "t".into(),
        )
        .unwrap();
        let mut cfg = SolverConfig::with_defaults(Hyperparams::uniform(1, 1.0, 0.5, 2));
        cfg.n_restarts = 0;
        let result = med_impute(&ds, &cfg).unwrap();
        assert_eq!(result.completed.continuous()[[2, 0]], 1.5);
        assert_eq!(result.provenance[[2, 0]], CellProvenance::Fallback);
    }
}

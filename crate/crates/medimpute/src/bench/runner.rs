//! Experiment orchestration.
//!
//! Conditions (fraction or opp value, crossed with seeds) run in a work
//! pool; within a condition every method sees the identical masked dataset,
//! so method comparisons are paired. Reports are assembled in condition
//! order, independent of scheduling.

use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;

use crate::bench::config::{CvConfig, DatasetSource, ExperimentConfig, Method};
use crate::bench::report::{ExperimentReport, ReportRow};
use crate::error::{Error, Result};
use crate::eval::{downstream_auc_tuned, imputation_error};
use crate::knn::{CompletedMatrix, Hyperparams};
use crate::model_selection::cross_validate;
use crate::panel::{
    apply_mcar_mask, load_csv, load_labels_csv, standardize, synth_panel, PanelDataset, Schema,
};
use crate::seed;
use crate::solver::{mean_impute, med_impute, opt_impute};

enum SweepKind {
    Missingness,
    Opp,
}

impl SweepKind {
    fn name(&self) -> &'static str {
        match self {
            SweepKind::Missingness => "missingness",
            SweepKind::Opp => "opp",
        }
    }
}

fn base_dataset(
    cfg: &ExperimentConfig,
    condition_seed: u64,
) -> Result<(PanelDataset, Option<Vec<bool>>)> {
    match &cfg.dataset {
        DatasetSource::Synthetic { config } => {
            // one independent replicate per condition seed
            let mut synth_cfg = config.clone();
            synth_cfg.seed = seed::mix(config.seed, condition_seed);
            let (ds, labels) = synth_panel(&synth_cfg)?;
            Ok((ds, Some(labels)))
        }
        DatasetSource::Csv { path, schema, labels } => {
            let schema = Schema::from_path(schema)?;
            let ds = load_csv(path, &schema)?;
            let labels = match labels {
                Some(p) => Some(load_labels_csv(p, &ds)?),
                None => None,
            };
            Ok((ds, labels))
        }
    }
}

/// Keeps each individual's `opp` most recent rows; individuals with fewer
/// rows are dropped (counted in the report row). Labels are filtered to the
/// surviving individuals.
pub fn truncate_to_most_recent(
    ds: &PanelDataset,
    labels: Option<&[bool]>,
    opp: usize,
) -> Result<(PanelDataset, Option<Vec<bool>>, usize)> {
    let ranges = ds.individual_row_ranges();
    let mut keep_rows: Vec<usize> = Vec::new();
    let mut keep_individuals: Vec<usize> = Vec::new();
    let mut excluded = 0usize;
    for (m, range) in ranges.iter().enumerate() {
        if range.len() < opp {
            excluded += 1;
            continue;
        }
        keep_individuals.push(m);
        keep_rows.extend(range.end - opp..range.end);
    }
    if keep_rows.is_empty() {
        return Err(Error::Data(format!(
            "no individual has {} observations",
            opp
        )));
    }

    let n = keep_rows.len();
    let continuous = Array2::from_shape_fn((n, ds.p0()), |(i, c)| {
        ds.raw_continuous()[[keep_rows[i], c]]
    });
    let categorical = Array2::from_shape_fn((n, ds.p1()), |(i, c)| {
        ds.raw_categorical()[[keep_rows[i], c]]
    });
    let missing = Array2::from_shape_fn((n, ds.p()), |(i, d)| {
        ds.missing_mask()[[keep_rows[i], d]]
    });
    let new_index: Vec<usize> = keep_rows
        .iter()
        .map(|&r| keep_individuals.iter().position(|&m| m == ds.individual_of(r)).unwrap())
        .collect();
    let truncated = PanelDataset::new(
        continuous,
        categorical,
        missing,
        new_index,
        keep_individuals.iter().map(|&m| ds.individual_label(m).to_string()).collect(),
        keep_rows.iter().map(|&r| ds.timestamp_of(r)).collect(),
        ds.features().to_vec(),
        ds.id_column().to_string(),
        ds.time_column().to_string(),
    )?;
    let labels = labels.map(|l| keep_individuals.iter().map(|&m| l[m]).collect());
    Ok((truncated, labels, excluded))
}

fn observations_per_individual(ds: &PanelDataset) -> usize {
    ds.individual_row_ranges().iter().map(|r| r.len()).max().unwrap_or(0)
}

fn cv_hyperparams(
    masked: &PanelDataset,
    cfg: &ExperimentConfig,
    cv: &CvConfig,
    condition_seed: u64,
) -> Result<Hyperparams> {
    let mut solver_cfg = cfg.solver.config(masked.p(), 0.0, cfg.solver.lambda, condition_seed);
    solver_cfg.n_restarts = cv.restarts;
    solver_cfg.max_sweeps = cv.max_sweeps;
    solver_cfg.rel_tolerance = cv.rel_tolerance;
    let report = cross_validate(masked, &cv.grid, cv.folds, condition_seed, &solver_cfg)?;
    Ok(report.selected)
}

fn run_condition(
    cfg: &ExperimentConfig,
    kind: &SweepKind,
    fraction: f64,
    opp: Option<usize>,
    condition_seed: u64,
) -> Result<Vec<ReportRow>> {
    let annotate = |e: Error| {
        Error::Numerical(format!(
            "condition (fraction {}, opp {:?}, seed {}): {}",
            fraction, opp, condition_seed, e
        ))
    };
    let run = || -> Result<Vec<ReportRow>> {
        let (raw, labels) = base_dataset(cfg, condition_seed)?;
        let (raw, labels, excluded) = match opp {
            Some(k) => truncate_to_most_recent(&raw, labels.as_deref(), k)?,
            None => (raw, labels, 0),
        };
        let (zds, _params) = standardize(&raw)?;
        let (masked, record) = apply_mcar_mask(&zds, fraction, condition_seed)?;
        let opp_value = opp.unwrap_or_else(|| observations_per_individual(&masked));

        let mut rows = Vec::with_capacity(cfg.methods.len());
        for method in &cfg.methods {
            let start = Instant::now();
            let (completed, hp_used): (CompletedMatrix, Option<Hyperparams>) = match method {
                Method::Mean => (mean_impute(&masked)?.completed, None),
                Method::Opt => {
                    let sc = cfg.solver.config(masked.p(), 0.0, cfg.solver.lambda, condition_seed);
                    let result = opt_impute(&masked, &sc)?;
                    (result.completed, Some(sc.hyperparams))
                }
                Method::Med => {
                    let hp = if cfg.cv.enabled {
                        cv_hyperparams(&masked, cfg, &cfg.cv, condition_seed)?
                    } else {
                        Hyperparams::uniform(
                            masked.p(),
                            cfg.solver.alpha,
                            cfg.solver.lambda,
                            cfg.solver.k,
                        )
                    };
                    let sc = cfg.solver.config_with(hp.clone(), condition_seed);
                    let result = med_impute(&masked, &sc)?;
                    (result.completed, Some(hp))
                }
            };
            let metrics = imputation_error(&completed, &record)?;
            let auc = match &labels {
                Some(l) => {
                    Some(downstream_auc_tuned(&masked, &completed, l, condition_seed, &cfg.reg_grid)?.0)
                }
                None => None,
            };
            rows.push(ReportRow {
                sweep: kind.name().to_string(),
                method: method.name().to_string(),
                fraction,
                opp: opp_value,
                seed: condition_seed,
                mae: metrics.mae,
                misclassification: metrics.misclassification,
                auc,
                seconds: start.elapsed().as_secs_f64(),
                hyperparams: hp_used,
                excluded_individuals: excluded,
            });
        }
        Ok(rows)
    };
    run().map_err(annotate)
}

/// Missing-fraction sweep: every (fraction, seed) condition is masked once
/// and all methods impute the same masked dataset.
pub fn run_missingness_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let conditions: Vec<(f64, u64)> = cfg
        .fractions
        .iter()
        .flat_map(|&f| cfg.seeds.iter().map(move |&s| (f, s)))
        .collect();
    let rows: Vec<Vec<ReportRow>> = conditions
        .par_iter()
        .map(|&(fraction, s)| run_condition(cfg, &SweepKind::Missingness, fraction, None, s))
        .collect::<Result<_>>()?;
    Ok(ExperimentReport::build(cfg.clone(), rows.into_iter().flatten().collect()))
}

/// Observations-per-individual sweep at a fixed missing fraction: each
/// condition truncates to the `opp` most recent rows per individual before
/// masking.
pub fn run_opp_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let conditions: Vec<(usize, u64)> = cfg
        .opp
        .iter()
        .flat_map(|&k| cfg.seeds.iter().map(move |&s| (k, s)))
        .collect();
    let rows: Vec<Vec<ReportRow>> = conditions
        .par_iter()
        .map(|&(k, s)| run_condition(cfg, &SweepKind::Opp, cfg.opp_fraction, Some(k), s))
        .collect::<Result<_>>()?;
    Ok(ExperimentReport::build(cfg.clone(), rows.into_iter().flatten().collect()))
}

/// Runs whichever sweeps the config requests and merges the reports.
pub fn run_experiments(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut report: Option<ExperimentReport> = None;
    if !cfg.fractions.is_empty() {
        report = Some(run_missingness_sweep(cfg)?);
    }
    if !cfg.opp.is_empty() {
        let opp_report = run_opp_sweep(cfg)?;
        report = Some(match report {
            Some(r) => r.merged(opp_report),
            None => opp_report,
        });
    }
    report.ok_or_else(|| Error::Usage("nothing to run: both sweeps are empty".into()))
}

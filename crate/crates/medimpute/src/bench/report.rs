//! Experiment report: raw per-condition rows, aggregates, and file emission
//! (`report.json`, `report.csv`, plot-ready `curves.csv`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::config::ExperimentConfig;
use crate::error::Result;
use crate::knn::Hyperparams;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    /// Which sweep produced the row: "missingness" or "opp".
    pub sweep: String,
    pub method: String,
    pub fraction: f64,
    /// Observations per individual in the condition's dataset.
    pub opp: usize,
    pub seed: u64,
    pub mae: Option<f64>,
    pub misclassification: Option<f64>,
    pub auc: Option<f64>,
    /// Wall-clock seconds for the method under this condition. Excluded,
    /// like the timestamp, from byte-identity comparisons between reruns.
    pub seconds: f64,
    /// Hyperparameters the solver ran with (None for the mean baseline).
    pub hyperparams: Option<Hyperparams>,
    /// Individuals dropped for having fewer rows than the opp value.
    pub excluded_individuals: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateRow {
    pub sweep: String,
    pub method: String,
    pub fraction: f64,
    pub opp: usize,
    pub n_seeds: usize,
    pub mae_mean: Option<f64>,
    pub mae_sd: Option<f64>,
    pub misclassification_mean: Option<f64>,
    pub misclassification_sd: Option<f64>,
    pub auc_mean: Option<f64>,
    pub auc_sd: Option<f64>,
    pub seconds_mean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub generated_at_unix: u64,
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub aggregates: Vec<AggregateRow>,
}

fn mean_sd(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = if values.len() < 2 {
        None
    } else {
        let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
        Some((ss / (n - 1.0)).sqrt())
    };
    (Some(mean), sd)
}

impl ExperimentReport {
    /// Assembles the report, grouping rows by (sweep, method, fraction, opp)
    /// in first-appearance order for the aggregates.
    pub fn build(config: ExperimentConfig, rows: Vec<ReportRow>) -> Self {
        let mut keys: Vec<(String, String, f64, usize)> = Vec::new();
        for row in &rows {
            let key = (row.sweep.clone(), row.method.clone(), row.fraction, row.opp);
            if !keys.contains(&key) {
                keys.push(key);
            }
        }
        let aggregates = keys
            .into_iter()
            .map(|(sweep, method, fraction, opp)| {
                let group: Vec<&ReportRow> = rows
                    .iter()
                    .filter(|r| {
                        r.sweep == sweep
                            && r.method == method
                            && r.fraction == fraction
                            && r.opp == opp
                    })
                    .collect();
                let collect = |f: fn(&ReportRow) -> Option<f64>| -> Vec<f64> {
                    group.iter().filter_map(|r| f(r)).collect()
                };
                let (mae_mean, mae_sd) = mean_sd(&collect(|r| r.mae));
                let (mis_mean, mis_sd) = mean_sd(&collect(|r| r.misclassification));
                let (auc_mean, auc_sd) = mean_sd(&collect(|r| r.auc));
                let seconds_mean =
                    group.iter().map(|r| r.seconds).sum::<f64>() / group.len() as f64;
                AggregateRow {
                    sweep,
                    method,
                    fraction,
                    opp,
                    n_seeds: group.len(),
                    mae_mean,
                    mae_sd,
                    misclassification_mean: mis_mean,
                    misclassification_sd: mis_sd,
                    auc_mean,
                    auc_sd,
                    seconds_mean,
                }
            })
            .collect();
        ExperimentReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            generated_at_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            config,
            rows,
            aggregates,
        }
    }

    pub fn merged(self, other: ExperimentReport) -> ExperimentReport {
        let config = self.config.clone();
        let mut rows = self.rows;
        rows.extend(other.rows);
        ExperimentReport::build(config, rows)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{}", x)).unwrap_or_default()
}

fn fmt_scalar_or_list(values: &[f64]) -> String {
    if values.is_empty() {
        return String::new();
    }
    if values.iter().all(|v| v == &values[0]) {
        format!("{}", values[0])
    } else {
        values.iter().map(|v| format!("{}", v)).collect::<Vec<_>>().join(";")
    }
}

/// Writes `report.json`, flat `report.csv`, and long-format `curves.csv`
/// keyed by (method, x-variable). Identical configs and seeds reproduce all
/// numeric content; only the timestamp and the wall-clock columns vary.
pub fn emit_report(report: &ExperimentReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| crate::error::Error::Data(format!("serializing report: {}", e)))?;
    std::fs::write(dir.join("report.json"), json + "\n")?;

    let mut writer = csv::Writer::from_path(dir.join("report.csv"))?;
    writer.write_record([
        "sweep",
        "method",
        "fraction",
        "opp",
        "seed",
        "mae",
        "misclassification",
        "auc",
        "alpha",
        "lambda",
        "k",
        "excluded_individuals",
        "seconds",
    ])?;
    for row in &report.rows {
        let (alpha, lambda, k) = match &row.hyperparams {
            Some(hp) => (
                fmt_scalar_or_list(&hp.alpha),
                fmt_scalar_or_list(&hp.lambda),
                hp.k.to_string(),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        writer.write_record([
            row.sweep.clone(),
            row.method.clone(),
            format!("{}", row.fraction),
            row.opp.to_string(),
            row.seed.to_string(),
            fmt_opt(row.mae),
            fmt_opt(row.misclassification),
            fmt_opt(row.auc),
            alpha,
            lambda,
            k,
            row.excluded_individuals.to_string(),
            format!("{}", row.seconds),
        ])?;
    }
    writer.flush()?;

    let mut curves = csv::Writer::from_path(dir.join("curves.csv"))?;
    curves.write_record(["sweep", "method", "x", "metric", "mean", "sd", "n_seeds"])?;
    for agg in &report.aggregates {
        let x = if agg.sweep == "opp" {
            agg.opp as f64
        } else {
            agg.fraction
        };
        for (metric, mean, sd) in [
            ("mae", agg.mae_mean, agg.mae_sd),
            ("misclassification", agg.misclassification_mean, agg.misclassification_sd),
            ("auc", agg.auc_mean, agg.auc_sd),
        ] {
            if let Some(mean) = mean {
                curves.write_record([
                    agg.sweep.clone(),
                    agg.method.clone(),
                    format!("{}", x),
                    metric.to_string(),
                    format!("{}", mean),
                    fmt_opt(sd),
                    agg.n_seeds.to_string(),
                ])?;
            }
        }
    }
    curves.flush()?;
    Ok(())
}

//! CSV ingestion and emission.
//!
//! The data CSV has a header naming the id column, the time column, and the
//! feature columns; missing cells are encoded as the literal token `NA`.
//! Emission writes floats in shortest round-trip form so a write/load cycle
//! reproduces the dataset exactly.

use std::collections::HashMap;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::knn::CompletedMatrix;
use crate::panel::{FeatureKind, PanelDataset, Schema, StandardizationParams};

const MISSING_TOKEN: &str = "NA";

/// Loads a panel CSV against its schema. Rows end up sorted by
/// (individual, timestamp); individual indices follow first appearance.
pub fn load_csv(path: &Path, schema: &Schema) -> Result<PanelDataset> {
    schema.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {}", path.display(), e)))?;
    let header = reader
        .headers()
        .map_err(|e| Error::Data(format!("{}: {}", path.display(), e)))?
        .clone();
    let col_of = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("unknown column in schema: {:?}", name)))
    };

    let id_col = col_of(&schema.id_column)?;
    let time_col = col_of(&schema.time_column)?;
    let features = schema.ordered_features();
    let feature_cols = features
        .iter()
        .map(|f| col_of(&f.name))
        .collect::<Result<Vec<_>>>()?;
    let p0 = features.iter().filter(|f| f.kind == FeatureKind::Continuous).count();
    let p = features.len();

    let mut labels: Vec<String> = Vec::new();
    let mut label_index: HashMap<String, usize> = HashMap::new();
    let mut individual = Vec::new();
    let mut timestamp = Vec::new();
    let mut cont_rows: Vec<f64> = Vec::new();
    let mut cat_rows: Vec<u32> = Vec::new();
    let mut mask_rows: Vec<bool> = Vec::new();
    let mut seen_id_time: HashMap<(usize, u64), usize> = HashMap::new();

    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1; // 1-based data row for error messages
        let record = record.map_err(|e| Error::Data(format!("row {}: {}", row, e)))?;
        let field = |c: usize| -> Result<&str> {
            record
                .get(c)
                .ok_or_else(|| Error::Data(format!("row {}: too few fields", row)))
        };

        let id_token = field(id_col)?.to_string();
        let id = *label_index.entry(id_token.clone()).or_insert_with(|| {
            labels.push(id_token);
            labels.len() - 1
        });
        individual.push(id);

        let t_token = field(time_col)?;
        let t: f64 = t_token.parse().map_err(|_| {
            Error::Data(format!("row {}: non-numeric time value {:?}", row, t_token))
        })?;
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Data(format!(
                "row {}: time value {} is not a non-negative real",
                row, t
            )));
        }
        if let Some(first) = seen_id_time.insert((id, t.to_bits()), row) {
            return Err(Error::Data(format!(
                "row {}: duplicate (id, time) pair, first seen at row {}",
                row, first
            )));
        }
        timestamp.push(t);

        for (d, f) in features.iter().enumerate() {
            let token = field(feature_cols[d])?;
            let missing = token == MISSING_TOKEN;
            mask_rows.push(missing);
            match f.kind {
                FeatureKind::Continuous => {
                    if missing {
                        cont_rows.push(f64::NAN);
                    } else {
                        let v: f64 = token.parse().map_err(|_| {
                            Error::Data(format!(
                                "row {}: non-numeric value {:?} for continuous feature {:?}",
                                row, token, f.name
                            ))
                        })?;
                        cont_rows.push(v);
                    }
                }
                FeatureKind::Categorical => {
                    if missing {
                        cat_rows.push(0);
                    } else {
                        let code = f.levels.iter().position(|l| l == token).ok_or_else(|| {
                            Error::Data(format!(
                                "row {}: value {:?} not in declared levels of feature {:?}",
                                row, token, f.name
                            ))
                        })?;
                        cat_rows.push(code as u32);
                    }
                }
            }
        }
    }

    let n = individual.len();
    if n == 0 {
        return Err(Error::Data("no observations".into()));
    }

    // mask_rows is interleaved (continuous then categorical per row already
    // ordered by `features`); split the flat buffers back into blocks.
    let mask = Array2::from_shape_vec((n, p), mask_rows)
        .expect("mask buffer matches dimensions");
    let continuous = Array2::from_shape_vec((n, p0), cont_rows)
        .expect("continuous buffer matches dimensions");
    let categorical = Array2::from_shape_vec((n, p - p0), cat_rows)
        .expect("categorical buffer matches dimensions");

    PanelDataset::new(
        continuous,
        categorical,
        mask,
        individual,
        labels,
        timestamp,
        features,
        schema.id_column.clone(),
        schema.time_column.clone(),
    )
}

fn feature_index_by_name(ds: &PanelDataset, name: &str) -> Result<usize> {
    ds.features()
        .iter()
        .position(|f| f.name == name)
        .ok_or_else(|| Error::Schema(format!("unknown column in schema: {:?}", name)))
}

fn format_cell(ds: &PanelDataset, row: usize, feature: usize) -> String {
    if ds.is_missing(row, feature) {
        return MISSING_TOKEN.to_string();
    }
    if ds.is_continuous(feature) {
        format!("{}", ds.observed_continuous(row, feature).unwrap())
    } else {
        let col = feature - ds.p0();
        let code = ds.observed_categorical(row, col).unwrap() as usize;
        ds.features()[feature].levels[code].clone()
    }
}

/// Writes the dataset with `NA` at masked cells, columns in schema order.
pub fn write_csv(ds: &PanelDataset, schema: &Schema, path: &Path) -> Result<()> {
    let order = schema
        .declared_names()
        .iter()
        .map(|name| feature_index_by_name(ds, name))
        .collect::<Result<Vec<_>>>()?;
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec![schema.id_column.clone(), schema.time_column.clone()];
    header.extend(schema.declared_names().iter().map(|s| s.to_string()));
    writer.write_record(&header)?;
    for i in 0..ds.n_rows() {
        let mut rec = vec![
            ds.individual_label(ds.individual_of(i)).to_string(),
            format!("{}", ds.timestamp_of(i)),
        ];
        for &d in &order {
            rec.push(format_cell(ds, i, d));
        }
        writer.write_record(&rec)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the completed matrix with every cell filled. Continuous values are
/// restored to native units when standardization params are supplied.
pub fn write_completed_csv(
    ds: &PanelDataset,
    completed: &CompletedMatrix,
    params: Option<&StandardizationParams>,
    schema: &Schema,
    path: &Path,
) -> Result<()> {
    let order = schema
        .declared_names()
        .iter()
        .map(|name| feature_index_by_name(ds, name))
        .collect::<Result<Vec<_>>>()?;
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec![schema.id_column.clone(), schema.time_column.clone()];
    header.extend(schema.declared_names().iter().map(|s| s.to_string()));
    writer.write_record(&header)?;
    for i in 0..ds.n_rows() {
        let mut rec = vec![
            ds.individual_label(ds.individual_of(i)).to_string(),
            format!("{}", ds.timestamp_of(i)),
        ];
        for &d in &order {
            if ds.is_continuous(d) {
                let mut v = completed.continuous()[[i, d]];
                if let Some(p) = params {
                    v = p.restore_value(d, v);
                }
                rec.push(format!("{}", v));
            } else {
                let col = d - ds.p0();
                let code = completed.categorical()[[i, col]] as usize;
                rec.push(ds.features()[d].levels[code].clone());
            }
        }
        writer.write_record(&rec)?;
    }
    writer.flush()?;
    Ok(())
}

/// Companion 0/1 flag CSV: 1 marks cells that were missing (hence imputed).
pub fn write_imputed_flags_csv(ds: &PanelDataset, schema: &Schema, path: &Path) -> Result<()> {
    let order = schema
        .declared_names()
        .iter()
        .map(|name| feature_index_by_name(ds, name))
        .collect::<Result<Vec<_>>>()?;
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec![schema.id_column.clone(), schema.time_column.clone()];
    header.extend(schema.declared_names().iter().map(|s| s.to_string()));
    writer.write_record(&header)?;
    for i in 0..ds.n_rows() {
        let mut rec = vec![
            ds.individual_label(ds.individual_of(i)).to_string(),
            format!("{}", ds.timestamp_of(i)),
        ];
        for &d in &order {
            rec.push(if ds.is_missing(i, d) { "1" } else { "0" }.to_string());
        }
        writer.write_record(&rec)?;
    }
    writer.flush()?;
    Ok(())
}

/// Hidden-truth CSV for a mask record: `row,feature,value` with 1-based row
/// numbers and native value formatting.
pub fn write_mask_record_csv(
    record: &crate::panel::MaskRecord,
    ds: &PanelDataset,
    path: &Path,
) -> Result<()> {
    use crate::panel::MaskedValue;
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["row", "feature", "value"])?;
    for cell in &record.cells {
        let value = match cell.truth {
            MaskedValue::Continuous(v) => format!("{}", v),
            MaskedValue::Categorical(code) => {
                ds.features()[cell.feature].levels[code as usize].clone()
            }
        };
        writer.write_record([
            (cell.row + 1).to_string(),
            ds.features()[cell.feature].name.clone(),
            value,
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Binary outcome labels, one row per individual: `id,label`.
pub fn write_labels_csv(ds: &PanelDataset, labels: &[bool], path: &Path) -> Result<()> {
    if labels.len() != ds.n_individuals() {
        return Err(Error::Data("label count differs from individual count".into()));
    }
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["id", "label"])?;
    for (m, &y) in labels.iter().enumerate() {
        writer.write_record([ds.individual_label(m), if y { "1" } else { "0" }])?;
    }
    writer.flush()?;
    Ok(())
}

/// Loads outcome labels and aligns them with the dataset's individuals.
pub fn load_labels_csv(path: &Path, ds: &PanelDataset) -> Result<Vec<bool>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Data(format!("{}: {}", path.display(), e)))?;
    let mut by_label: HashMap<String, bool> = HashMap::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Data(format!("labels row {}: {}", row, e)))?;
        let id = record
            .get(0)
            .ok_or_else(|| Error::Data(format!("labels row {}: missing id", row)))?;
        let raw = record
            .get(1)
            .ok_or_else(|| Error::Data(format!("labels row {}: missing label", row)))?;
        let y = match raw {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Data(format!(
                    "labels row {}: label {:?} is not 0/1",
                    row, other
                )))
            }
        };
        by_label.insert(id.to_string(), y);
    }
    (0..ds.n_individuals())
        .map(|m| {
            by_label.get(ds.individual_label(m)).copied().ok_or_else(|| {
                Error::Data(format!("no label for individual {:?}", ds.individual_label(m)))
            })
        })
        .collect()
}

//! Sidecar schema describing a panel CSV: id/time column names plus feature
//! kinds and categorical level sets.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::{FeatureInfo, FeatureKind};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Schema {
    #[serde(rename = "id")]
    pub id_column: String,
    #[serde(rename = "time")]
    pub time_column: String,
    pub features: Vec<FeatureSpec>,
}

impl Schema {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let schema: Schema = serde_json::from_str(&text)
            .map_err(|e| Error::Schema(format!("{}: {}", path.display(), e)))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn to_path(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Schema(format!("serializing schema: {}", e)))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::Schema("schema declares no features".into()));
        }
        for f in &self.features {
            match f.kind {
                FeatureKind::Categorical => {
                    let levels = f.levels.as_ref().ok_or_else(|| {
                        Error::Schema(format!("categorical feature {:?} declares no levels", f.name))
                    })?;
                    if levels.is_empty() {
                        return Err(Error::Schema(format!(
                            "categorical feature {:?} declares an empty level set",
                            f.name
                        )));
                    }
                    let mut sorted = levels.clone();
                    sorted.sort();
                    sorted.dedup();
                    if sorted.len() != levels.len() {
                        return Err(Error::Schema(format!(
                            "categorical feature {:?} has duplicate levels",
                            f.name
                        )));
                    }
                }
                FeatureKind::Continuous => {
                    if f.levels.is_some() {
                        return Err(Error::Schema(format!(
                            "continuous feature {:?} must not declare levels",
                            f.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Features reordered so continuous columns precede categorical ones,
    /// preserving relative order within each kind.
    pub(crate) fn ordered_features(&self) -> Vec<FeatureInfo> {
        let cont = self.features.iter().filter(|f| f.kind == FeatureKind::Continuous);
        let cat = self.features.iter().filter(|f| f.kind == FeatureKind::Categorical);
        cont.chain(cat)
            .map(|f| FeatureInfo {
                name: f.name.clone(),
                kind: f.kind,
                levels: f.levels.clone().unwrap_or_default(),
            })
            .collect()
    }

    /// Column order of the original CSV (schema declaration order).
    pub(crate) fn declared_names(&self) -> Vec<&str> {
        self.features.iter().map(|f| f.name.as_str()).collect()
    }
}

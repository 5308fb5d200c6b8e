use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{DataError, Result};

/// How a key column joins its attribute table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyKind {
    /// Foreign key into a primary key.
    #[default]
    Pkfk,
    /// Equi-join on a non-unique attribute.
    Mn,
}

/// Storage of a table's feature matrix after loading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Storage {
    /// Dense when the density exceeds [`DENSE_THRESHOLD`](super::DENSE_THRESHOLD).
    #[default]
    Auto,
    Dense,
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeySpec {
    pub column: String,
    pub table: String,
    #[serde(default)]
    pub kind: KeyKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntitySpec {
    /// Headered CSV with keys, the optional target and (unless `features`
    /// is set) the feature columns.
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default)]
    pub keys: Vec<KeySpec>,
    /// Sparse triplet file holding the features instead of the CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<PathBuf>,
    #[serde(default)]
    pub storage: Storage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub id: String,
    pub path: PathBuf,
    /// Key column: unique for PK-FK joins, the join attribute for M:N joins.
    pub pk: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<PathBuf>,
    #[serde(default)]
    pub storage: Storage,
}

/// JSON dataset descriptor. Relative paths resolve against the
/// descriptor's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaDescriptor {
    pub entity: EntitySpec,
    pub tables: Vec<TableSpec>,
}

impl SchemaDescriptor {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(DataError::io(path))?;
        let schema: SchemaDescriptor =
            serde_json::from_str(&text).map_err(|source| DataError::Json { path: path.into(), source })?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("descriptor serializes");
        fs::write(path, text + "\n").map_err(DataError::io(path))
    }

    pub fn table(&self, id: &str) -> Option<&TableSpec> {
        self.tables.iter().find(|t| t.id == id)
    }

    /// Checks references and the supported key combinations.
    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for t in &self.tables {
            if !ids.insert(t.id.as_str()) {
                return Err(DataError::Schema(format!("table id `{}` declared twice", t.id)));
            }
        }
        if self.entity.keys.is_empty() {
            return Err(DataError::Schema("the entity needs at least one key column".into()));
        }
        let mut used = HashSet::new();
        for key in &self.entity.keys {
            if self.table(&key.table).is_none() {
                return Err(DataError::Schema(format!(
                    "key `{}` references undeclared table `{}`",
                    key.column, key.table
                )));
            }
            if !used.insert(key.table.as_str()) {
                return Err(DataError::Schema(format!("table `{}` is joined twice", key.table)));
            }
            if Some(&key.column) == self.entity.target.as_ref() {
                return Err(DataError::Schema(format!("`{}` is both a key and the target", key.column)));
            }
        }
        let mn = self.entity.keys.iter().filter(|k| k.kind == KeyKind::Mn).count();
        if mn > 0 && self.entity.keys.len() > 1 {
            return Err(DataError::Schema(
                "an M:N key must be the only key of the entity; multi-table M:N joins are built programmatically"
                    .into(),
            ));
        }
        Ok(())
    }
}

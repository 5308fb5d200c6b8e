use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use normat_core::normmat::{build_mn, build_pkfk, build_star};
use normat_core::{DenseMatrix, NormalizedMatrix, NumericMatrix};

use super::schema::{KeyKind, SchemaDescriptor, Storage, TableSpec};
use super::tables::{apply_storage, read_csv, read_triplets, CsvTable};
use crate::error::{DataError, Result};

/// Original key values of the attribute rows kept after loading.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyMap {
    pub table: String,
    /// `retained[i]` is the key of loaded row `i`.
    pub retained: Vec<String>,
}

/// A dataset loaded through a [`SchemaDescriptor`].
#[derive(Debug, Clone)]
pub struct Dataset {
    pub matrix: NormalizedMatrix,
    /// Target column aligned with the rows of `matrix` (`n × 1`).
    pub target: Option<NumericMatrix>,
    pub key_maps: Vec<KeyMap>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Features of a table: its CSV columns, or its triplet file when given.
fn features(base: &Path, csv: &CsvTable, triplets: Option<&PathBuf>, storage: Storage) -> Result<NumericMatrix> {
    let m: NumericMatrix = match triplets {
        Some(p) => {
            let path = resolve(base, p);
            let m = read_triplets(&path)?;
            if m.rows() != csv.rows() {
                return Err(DataError::Schema(format!(
                    "{}: {} rows, but its key file has {}",
                    path.display(),
                    m.rows(),
                    csv.rows()
                )));
            }
            m.into()
        }
        None => csv.features.clone().into(),
    };
    Ok(apply_storage(m, storage))
}

fn read_table(base: &Path, spec: &TableSpec) -> Result<(CsvTable, NumericMatrix)> {
    let csv = read_csv(&resolve(base, &spec.path), &[&spec.pk], None, spec.features.is_none())?;
    let m = features(base, &csv, spec.features.as_ref(), spec.storage)?;
    Ok((csv, m))
}

/// Maps foreign-key text to 1-based rows of the referenced table.
fn resolve_foreign_keys(entity_path: &Path, table: &str, fks: &[String], pks: &[String]) -> Result<Vec<usize>> {
    let mut index = HashMap::with_capacity(pks.len());
    for (row, pk) in pks.iter().enumerate() {
        if index.insert(pk.as_str(), row + 1).is_some() {
            return Err(DataError::Schema(format!("table `{table}`: duplicate primary key `{pk}`")));
        }
    }
    fks.iter()
        .enumerate()
        .map(|(row, fk)| {
            index.get(fk.as_str()).copied().ok_or_else(|| DataError::DanglingKey {
                path: entity_path.into(),
                table: table.into(),
                row,
                key: fk.clone(),
            })
        })
        .collect()
}

/// Keys of the referenced rows, in table order (the order the builders keep).
fn retained_keys(table: &str, pks: &[String], referenced: impl Iterator<Item = usize>) -> KeyMap {
    let used: HashSet<usize> = referenced.collect();
    KeyMap {
        table: table.into(),
        retained: pks.iter().enumerate().filter(|(i, _)| used.contains(i)).map(|(_, k)| k.clone()).collect(),
    }
}

/// Loads the dataset described by the descriptor at `schema_path`.
pub fn load(schema_path: &Path) -> Result<Dataset> {
    let schema = SchemaDescriptor::from_file(schema_path)?;
    let base = schema_path.parent().unwrap_or(Path::new("."));
    load_with(&schema, base)
}

/// Loads a dataset whose relative paths resolve against `base`.
pub fn load_with(schema: &SchemaDescriptor, base: &Path) -> Result<Dataset> {
    schema.validate()?;
    let entity = &schema.entity;
    let entity_path = resolve(base, &entity.path);
    let key_columns: Vec<&str> = entity.keys.iter().map(|k| k.column.as_str()).collect();
    let csv = read_csv(&entity_path, &key_columns, entity.target.as_deref(), entity.features.is_none())?;
    let s = features(base, &csv, entity.features.as_ref(), entity.storage)?;
    let table_of = |id: &str| schema.table(id).expect("validated reference");

    if entity.keys[0].kind == KeyKind::Mn {
        let key = &entity.keys[0];
        let (r_csv, r) = read_table(base, table_of(&key.table))?;
        let j_s = csv.key(&key.column);
        let j_r = r_csv.key(&table_of(&key.table).pk);
        // output rows follow entity rows; replicate the target per match
        let mut matches: HashMap<&str, usize> = HashMap::new();
        for v in j_r {
            *matches.entry(v.as_str()).or_default() += 1;
        }
        let target = csv.target.as_ref().map(|y| {
            let values = y
                .iter()
                .zip(j_s)
                .flat_map(|(&v, j)| std::iter::repeat_n(v, matches.get(j.as_str()).copied().unwrap_or(0)))
                .collect();
            DenseMatrix::column(values).into()
        });
        let referenced: HashSet<&str> = j_s.iter().map(String::as_str).collect();
        let key_map = KeyMap {
            table: key.table.clone(),
            retained: j_r.iter().filter(|v| referenced.contains(v.as_str())).cloned().collect(),
        };
        let matrix = build_mn(s, j_s, r, j_r)?;
        return Ok(Dataset { matrix, target, key_maps: vec![key_map] });
    }

    let mut fk_columns = Vec::with_capacity(entity.keys.len());
    let mut tables = Vec::with_capacity(entity.keys.len());
    let mut key_maps = Vec::with_capacity(entity.keys.len());
    for key in &entity.keys {
        let spec = table_of(&key.table);
        let (r_csv, r) = read_table(base, spec)?;
        let pks = r_csv.key(&spec.pk);
        let fks = resolve_foreign_keys(&entity_path, &key.table, csv.key(&key.column), pks)?;
        key_maps.push(retained_keys(&key.table, pks, fks.iter().map(|k| k - 1)));
        fk_columns.push(fks);
        tables.push(r);
    }
    let matrix = if tables.len() == 1 {
        build_pkfk(s, &fk_columns[0], tables.pop().expect("one table"))?
    } else {
        build_star(s, fk_columns.iter().map(Vec::as_slice).zip(tables).collect())?
    };
    let target = csv.target.map(|y| DenseMatrix::column(y).into());
    Ok(Dataset { matrix, target, key_maps })
}

//! Seeded synthetic datasets over the tuple-ratio / feature-ratio grid.

use std::fs;
use std::path::{Path, PathBuf};

use normat_core::{DenseMatrix, NumericMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::schema::{EntitySpec, KeyKind, KeySpec, SchemaDescriptor, Storage, TableSpec};
use super::tables::{write_csv, write_triplets, CsvColumn};
use crate::error::{DataError, Result};

pub const SCHEMA_FILE: &str = "schema.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const VALUE_DISTRIBUTION: &str = "uniform(0,1)";
pub const LABEL_DISTRIBUTION: &str = "uniform{-1,+1}";

/// Dimensions of a synthetic dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthParams {
    pub n_s: usize,
    pub n_r: usize,
    pub d_s: usize,
    pub d_r: usize,
    /// Number of distinct join values (M:N only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_u: Option<usize>,
    /// Probability that a feature value is nonzero; below 1 the features
    /// are written as sparse triplet files.
    pub density: f64,
    pub seed: u64,
}

impl SynthParams {
    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(DataError::InvalidParams(m));
        if self.n_s == 0 || self.n_r == 0 || self.d_s == 0 || self.d_r == 0 {
            return fail(format!("all dimensions must be at least 1: {self:?}"));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return fail(format!("density must lie in (0, 1], got {}", self.density));
        }
        Ok(())
    }
}

/// Record written next to a generated dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub generator: String,
    pub params: SynthParams,
    pub value_distribution: String,
    pub label_distribution: String,
    pub schema: String,
    pub files: Vec<String>,
    /// Rows of the join result.
    pub join_rows: usize,
    pub tuple_ratio: f64,
    pub feature_ratio: f64,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Manifest> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(DataError::io(&path))?;
        serde_json::from_str(&text).map_err(|source| DataError::Json { path, source })
    }
}

fn features(rng: &mut ChaCha8Rng, rows: usize, cols: usize, density: f64) -> DenseMatrix {
    let data = (0..rows * cols)
        .map(|_| if density >= 1.0 || rng.random_bool(density) { rng.random::<f64>() } else { 0.0 })
        .collect();
    DenseMatrix::from_vec(rows, cols, data).expect("length matches shape")
}

fn labels(rng: &mut ChaCha8Rng, rows: usize) -> Vec<f64> {
    (0..rows).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect()
}

/// `rows` values over `0..domain`: the first `domain` rows take each value
/// once, the rest are uniform.
fn covering_values(rng: &mut ChaCha8Rng, rows: usize, domain: usize) -> Vec<usize> {
    (0..rows).map(|i| if i < domain { i } else { rng.random_range(0..domain) }).collect()
}

struct TableOut<'a> {
    stem: &'a str,
    keys: Vec<CsvColumn<'a>>,
    features: &'a DenseMatrix,
    prefix: &'a str,
}

/// Writes one table, returning (csv, optional triplet) file names.
fn write_table(dir: &Path, t: TableOut<'_>, sparse: bool, files: &mut Vec<String>) -> Result<Option<PathBuf>> {
    let csv = format!("{}.csv", t.stem);
    let mut columns = t.keys;
    let triplets = if sparse {
        let name = format!("{}_features.triplets", t.stem);
        write_triplets(&dir.join(&name), &NumericMatrix::Dense(t.features.clone()))?;
        files.push(name.clone());
        Some(PathBuf::from(name))
    } else {
        columns.push(CsvColumn::Matrix(t.prefix, t.features));
        None
    };
    write_csv(&dir.join(&csv), &columns)?;
    files.push(csv);
    Ok(triplets)
}

fn finish(dir: &Path, schema: SchemaDescriptor, mut manifest: Manifest) -> Result<Manifest> {
    schema.write(&dir.join(SCHEMA_FILE))?;
    manifest.files.push(SCHEMA_FILE.into());
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text + "\n").map_err(DataError::io(&path))?;
    Ok(manifest)
}

/// Generates a PK-FK dataset `S(y, fk, s*)`, `R(id, r*)` in `dir`.
///
/// Keys are uniform over `1..=n_R`, except that entity row `i < n_R` gets
/// key `i + 1` so every attribute row is referenced.
pub fn gen_pkfk(p: &SynthParams, dir: &Path) -> Result<Manifest> {
    p.validate()?;
    if p.n_s < p.n_r {
        return Err(DataError::InvalidParams(format!(
            "PK-FK data needs n_S >= n_R (tuple ratio >= 1), got n_S={} n_R={}",
            p.n_s, p.n_r
        )));
    }
    fs::create_dir_all(dir).map_err(DataError::io(dir))?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let s = features(&mut rng, p.n_s, p.d_s, p.density);
    let r = features(&mut rng, p.n_r, p.d_r, p.density);
    let fk: Vec<String> = covering_values(&mut rng, p.n_s, p.n_r).iter().map(|k| (k + 1).to_string()).collect();
    let y = labels(&mut rng, p.n_s);
    let ids: Vec<String> = (1..=p.n_r).map(|k| k.to_string()).collect();

    let sparse = p.density < 1.0;
    let mut files = Vec::new();
    let entity_features = write_table(
        dir,
        TableOut {
            stem: "entity",
            keys: vec![CsvColumn::Numbers("y", &y), CsvColumn::Text("fk", &fk)],
            features: &s,
            prefix: "s",
        },
        sparse,
        &mut files,
    )?;
    let table_features = write_table(
        dir,
        TableOut { stem: "attribute", keys: vec![CsvColumn::Text("id", &ids)], features: &r, prefix: "r" },
        sparse,
        &mut files,
    )?;
    let schema = SchemaDescriptor {
        entity: EntitySpec {
            path: "entity.csv".into(),
            target: Some("y".into()),
            keys: vec![KeySpec { column: "fk".into(), table: "attribute".into(), kind: KeyKind::Pkfk }],
            features: entity_features,
            storage: Storage::Auto,
        },
        tables: vec![TableSpec {
            id: "attribute".into(),
            path: "attribute.csv".into(),
            pk: "id".into(),
            features: table_features,
            storage: Storage::Auto,
        }],
    };
    let manifest = Manifest {
        generator: "pkfk".into(),
        params: p.clone(),
        value_distribution: VALUE_DISTRIBUTION.into(),
        label_distribution: LABEL_DISTRIBUTION.into(),
        schema: SCHEMA_FILE.into(),
        files,
        join_rows: p.n_s,
        tuple_ratio: p.n_s as f64 / p.n_r as f64,
        feature_ratio: p.d_r as f64 / p.d_s as f64,
    };
    finish(dir, schema, manifest)
}

/// Generates an M:N dataset `S(y, j, s*)`, `R(j, r*)` joined on `j`.
///
/// Join values range over `n_U` distinct values on both sides. The first
/// `n_U` rows of each table take every value once (so no row is dropped by
/// the join) and the rest are uniform, giving about `n_S n_R / n_U` output
/// rows.
pub fn gen_mn(p: &SynthParams, dir: &Path) -> Result<Manifest> {
    p.validate()?;
    let n_u = p.n_u.ok_or_else(|| DataError::InvalidParams("M:N data needs n_U".into()))?;
    if n_u == 0 || n_u > p.n_s.min(p.n_r) {
        return Err(DataError::InvalidParams(format!(
            "n_U must lie in 1..=min(n_S, n_R) = {}, got {n_u}",
            p.n_s.min(p.n_r)
        )));
    }
    fs::create_dir_all(dir).map_err(DataError::io(dir))?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let s = features(&mut rng, p.n_s, p.d_s, p.density);
    let r = features(&mut rng, p.n_r, p.d_r, p.density);
    let j_s = covering_values(&mut rng, p.n_s, n_u);
    let j_r = covering_values(&mut rng, p.n_r, n_u);
    let y = labels(&mut rng, p.n_s);

    let mut per_value = vec![0usize; n_u];
    for &v in &j_r {
        per_value[v] += 1;
    }
    let join_rows = j_s.iter().map(|&v| per_value[v]).sum();
    let text = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>();
    let (j_s, j_r) = (text(&j_s), text(&j_r));

    let sparse = p.density < 1.0;
    let mut files = Vec::new();
    let entity_features = write_table(
        dir,
        TableOut {
            stem: "entity",
            keys: vec![CsvColumn::Numbers("y", &y), CsvColumn::Text("j", &j_s)],
            features: &s,
            prefix: "s",
        },
        sparse,
        &mut files,
    )?;
    let table_features = write_table(
        dir,
        TableOut { stem: "attribute", keys: vec![CsvColumn::Text("j", &j_r)], features: &r, prefix: "r" },
        sparse,
        &mut files,
    )?;
    let schema = SchemaDescriptor {
        entity: EntitySpec {
            path: "entity.csv".into(),
            target: Some("y".into()),
            keys: vec![KeySpec { column: "j".into(), table: "attribute".into(), kind: KeyKind::Mn }],
            features: entity_features,
            storage: Storage::Auto,
        },
        tables: vec![TableSpec {
            id: "attribute".into(),
            path: "attribute.csv".into(),
            pk: "j".into(),
            features: table_features,
            storage: Storage::Auto,
        }],
    };
    let manifest = Manifest {
        generator: "mn".into(),
        params: p.clone(),
        value_distribution: VALUE_DISTRIBUTION.into(),
        label_distribution: LABEL_DISTRIBUTION.into(),
        schema: SCHEMA_FILE.into(),
        files,
        join_rows,
        tuple_ratio: p.n_s as f64 / p.n_r as f64,
        feature_ratio: p.d_r as f64 / p.d_s as f64,
    };
    finish(dir, schema, manifest)
}

//! Headered numeric CSV and sparse triplet files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use normat_core::{CsrMatrix, DenseMatrix, NumericMatrix};

use super::schema::Storage;
use super::DENSE_THRESHOLD;
use crate::error::{DataError, Result};

/// Columns read from one CSV file.
#[derive(Debug, Clone)]
pub struct CsvTable {
    /// Raw text of the requested key columns, by column name.
    pub keys: HashMap<String, Vec<String>>,
    pub target: Option<Vec<f64>>,
    pub feature_names: Vec<String>,
    /// Every column that is neither a key nor the target, in file order.
    pub features: DenseMatrix,
}

impl CsvTable {
    pub fn rows(&self) -> usize {
        self.features.rows()
    }

    pub fn key(&self, name: &str) -> &[String] {
        &self.keys[name]
    }
}

fn parse_number(path: &Path, line: u64, column: &str, text: &str) -> Result<f64> {
    let parse_error = |message: String| DataError::Parse { path: path.into(), line, column: column.into(), message };
    let value: f64 = text.trim().parse().map_err(|_| parse_error(format!("`{text}` is not a number")))?;
    if !value.is_finite() {
        return Err(parse_error(format!("`{text}` is not finite")));
    }
    Ok(value)
}

/// Reads a headered CSV. `key_columns` are kept as text, `target` (if any)
/// is parsed separately, and all remaining columns become features unless
/// `with_features` is false (features then come from a triplet file).
pub fn read_csv(path: &Path, key_columns: &[&str], target: Option<&str>, with_features: bool) -> Result<CsvTable> {
    let file = File::open(path).map_err(DataError::io(path))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(BufReader::new(file));
    let headers: Vec<String> = reader.headers().map_err(DataError::csv(path))?.iter().map(str::to_owned).collect();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            DataError::Schema(format!("{}: no column named `{name}` (header: {headers:?})", path.display()))
        })
    };
    let key_idx: Vec<usize> = key_columns.iter().map(|k| find(k)).collect::<Result<_>>()?;
    let target_idx = target.map(find).transpose()?;
    let feature_idx: Vec<usize> = if with_features {
        (0..headers.len()).filter(|i| !key_idx.contains(i) && Some(*i) != target_idx).collect()
    } else {
        Vec::new()
    };

    let mut keys: Vec<Vec<String>> = vec![Vec::new(); key_idx.len()];
    let mut target_values = target_idx.map(|_| Vec::new());
    let mut data = Vec::new();
    let mut rows = 0;
    let mut record = csv::StringRecord::new();
    while reader.read_record(&mut record).map_err(DataError::csv(path))? {
        let line = record.position().map_or(0, |p| p.line());
        for (slot, &i) in keys.iter_mut().zip(&key_idx) {
            slot.push(record[i].to_owned());
        }
        if let (Some(values), Some(i)) = (target_values.as_mut(), target_idx) {
            values.push(parse_number(path, line, &headers[i], &record[i])?);
        }
        for &i in &feature_idx {
            data.push(parse_number(path, line, &headers[i], &record[i])?);
        }
        rows += 1;
    }
    let features = DenseMatrix::from_vec(rows, feature_idx.len(), data)?;
    Ok(CsvTable {
        keys: key_columns.iter().map(|k| k.to_string()).zip(keys).collect(),
        target: target_values,
        feature_names: feature_idx.iter().map(|&i| headers[i].clone()).collect(),
        features,
    })
}

/// Applies the storage policy to a loaded feature matrix.
pub fn apply_storage(m: NumericMatrix, storage: Storage) -> NumericMatrix {
    match storage {
        Storage::Auto => m.with_density_threshold(DENSE_THRESHOLD),
        Storage::Dense => m.with_density_threshold(-1.0),
        Storage::Sparse => m.with_density_threshold(f64::INFINITY),
    }
}

/// Reads a sparse triplet file: `rows,cols` on line 1, `nnz` on line 2,
/// then one `row,col,value` line per entry (0-based indices).
pub fn read_triplets(path: &Path) -> Result<CsrMatrix> {
    let file = File::open(path).map_err(DataError::io(path))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let mut next_line = |what: &str| -> Result<(u64, String)> {
        match lines.next() {
            Some((i, line)) => Ok((i as u64 + 1, line.map_err(DataError::io(path))?)),
            None => Err(DataError::Parse {
                path: path.into(),
                line: 0,
                column: what.into(),
                message: "unexpected end of file".into(),
            }),
        }
    };
    let bad = |line: u64, column: &str, message: String| DataError::Parse {
        path: path.into(),
        line,
        column: column.into(),
        message,
    };
    let index = |line: u64, column: &str, text: &str| -> Result<usize> {
        text.trim().parse().map_err(|_| bad(line, column, format!("`{text}` is not a non-negative integer")))
    };

    let (line, dims) = next_line("rows,cols")?;
    let (rows, cols) = match dims.split(',').collect::<Vec<_>>()[..] {
        [r, c] => (index(line, "rows", r)?, index(line, "cols", c)?),
        _ => return Err(bad(line, "rows,cols", format!("expected `rows,cols`, got `{dims}`"))),
    };
    let (line, nnz) = next_line("nnz")?;
    let nnz = index(line, "nnz", &nnz)?;
    let mut triplets = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let (line, text) = next_line("row,col,value")?;
        let (r, c, v) = match text.split(',').collect::<Vec<_>>()[..] {
            [r, c, v] => (index(line, "row", r)?, index(line, "col", c)?, parse_number(path, line, "value", v)?),
            _ => return Err(bad(line, "row,col,value", format!("expected `row,col,value`, got `{text}`"))),
        };
        if r >= rows || c >= cols {
            return Err(bad(line, "row,col", format!("entry ({r}, {c}) outside a {rows}x{cols} matrix")));
        }
        triplets.push((r, c, v));
    }
    Ok(CsrMatrix::from_triplets(rows, cols, triplets)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(DataError::io(path))?))
}

/// Writes the nonzeros of `m` in triplet format.
pub fn write_triplets(path: &Path, m: &NumericMatrix) -> Result<()> {
    let csr = m.to_sparse();
    let mut out = create(path)?;
    let io = DataError::io(path);
    let result = (|| {
        writeln!(out, "{},{}", csr.rows(), csr.cols())?;
        writeln!(out, "{}", csr.nnz())?;
        for r in 0..csr.rows() {
            let (idx, val) = csr.row(r);
            for (c, v) in idx.iter().zip(val) {
                writeln!(out, "{r},{c},{v}")?;
            }
        }
        out.flush()
    })();
    result.map_err(io)
}

/// A column of a CSV file being written.
pub enum CsvColumn<'a> {
    Text(&'a str, &'a [String]),
    Numbers(&'a str, &'a [f64]),
    /// All columns of a matrix, named `{prefix}{j}`.
    Matrix(&'a str, &'a DenseMatrix),
}

/// Writes a headered CSV. Numbers use the shortest representation that
/// parses back to the same `f64`.
pub fn write_csv(path: &Path, columns: &[CsvColumn<'_>]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(create(path)?);
    let rows = columns
        .iter()
        .map(|c| match c {
            CsvColumn::Text(_, v) => v.len(),
            CsvColumn::Numbers(_, v) => v.len(),
            CsvColumn::Matrix(_, m) => m.rows(),
        })
        .max()
        .unwrap_or(0);
    let err = |e: csv::Error| DataError::Csv { path: path.into(), source: e };
    for c in columns {
        match c {
            CsvColumn::Text(name, _) | CsvColumn::Numbers(name, _) => writer.write_field(name).map_err(err)?,
            CsvColumn::Matrix(prefix, m) => {
                for j in 0..m.cols() {
                    writer.write_field(format!("{prefix}{j}")).map_err(err)?;
                }
            }
        }
    }
    writer.write_record(None::<&[u8]>).map_err(err)?;
    let mut buf = String::new();
    for r in 0..rows {
        for c in columns {
            match c {
                CsvColumn::Text(_, v) => writer.write_field(&v[r]).map_err(err)?,
                CsvColumn::Numbers(_, v) => {
                    buf.clear();
                    write!(buf, "{}", v[r]).expect("write to string");
                    writer.write_field(&buf).map_err(err)?;
                }
                CsvColumn::Matrix(_, m) => {
                    for &v in m.row(r) {
                        buf.clear();
                        write!(buf, "{v}").expect("write to string");
                        writer.write_field(&buf).map_err(err)?;
                    }
                }
            }
        }
        writer.write_record(None::<&[u8]>).map_err(err)?;
    }
    writer.flush().map_err(DataError::io(path))
}

//! Construction of normalized matrices from base tables and key columns.
//!
//! Every builder drops attribute rows that no output row references and
//! renumbers the survivors contiguously, so all indicator columns are
//! nonempty.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{IndicatorMatrix, JoinKind, NormalizedMatrix};
use crate::kernel::NumericMatrix;
use crate::{Error, Result};

/// Targets renumbered over the referenced rows only, plus the original index
/// of every retained row.
fn compact(targets: &[usize], rows: usize) -> (Vec<usize>, Vec<usize>) {
    let mut new_index = vec![usize::MAX; rows];
    for &t in targets {
        new_index[t] = 0;
    }
    let mut retained = Vec::new();
    for (r, slot) in new_index.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = retained.len();
            retained.push(r);
        }
    }
    let remapped = targets.iter().map(|&t| new_index[t]).collect();
    (remapped, retained)
}

/// Like [`compact`], but numbers the referenced rows in order of first use,
/// so rows that are gathered together sit next to each other.
fn compact_by_first_use(targets: &[usize], rows: usize) -> (Vec<usize>, Vec<usize>) {
    let mut new_index = vec![usize::MAX; rows];
    let mut retained = Vec::new();
    let remapped = targets
        .iter()
        .map(|&t| {
            if new_index[t] == usize::MAX {
                new_index[t] = retained.len();
                retained.push(t);
            }
            new_index[t]
        })
        .collect();
    (remapped, retained)
}

fn keep_rows(table: NumericMatrix, retained: &[usize]) -> NumericMatrix {
    if retained.len() == table.rows() && retained.iter().enumerate().all(|(i, &r)| i == r) {
        table
    } else {
        table.select_rows(retained)
    }
}

/// Resolves 1-based key values against an attribute table with `rows` rows.
fn resolve_keys(part: Option<usize>, keys: &[usize], entity_rows: usize, rows: usize) -> Result<Vec<usize>> {
    if keys.len() != entity_rows {
        return Err(Error::InvalidMatrix(format!(
            "{}key column has {} entries but the entity table has {entity_rows} rows",
            part.map(|p| format!("part {p}: ")).unwrap_or_default(),
            keys.len()
        )));
    }
    keys.iter()
        .enumerate()
        .map(
            |(row, &key)| {
                if key == 0 || key > rows {
                    Err(Error::DanglingKey { part, row, key, rows })
                } else {
                    Ok(key - 1)
                }
            },
        )
        .collect()
}

fn indicator_part(
    part: Option<usize>,
    keys: &[usize],
    entity_rows: usize,
    r: NumericMatrix,
) -> Result<(IndicatorMatrix, NumericMatrix)> {
    let targets = resolve_keys(part, keys, entity_rows, r.rows())?;
    let (targets, retained) = compact(&targets, r.rows());
    let k = IndicatorMatrix::from_targets_unchecked(retained.len(), targets);
    Ok((k, keep_rows(r, &retained)))
}

/// Builds `T = [S, KR]`. `key_column[i]` is the 1-based row of `r` joined
/// to row `i` of `s`.
pub fn build_pkfk(s: NumericMatrix, key_column: &[usize], r: NumericMatrix) -> Result<NormalizedMatrix> {
    let (k, r) = indicator_part(None, key_column, s.rows(), r)?;
    NormalizedMatrix::pkfk(s, k, r)
}

/// Builds a star join `T = [S, K₁R₁, …, K_qR_q]` from `(key_column, R_i)`
/// pairs with 1-based keys.
pub fn build_star(s: NumericMatrix, parts: Vec<(&[usize], NumericMatrix)>) -> Result<NormalizedMatrix> {
    let n = s.rows();
    let parts = parts
        .into_iter()
        .enumerate()
        .map(|(i, (keys, r))| indicator_part(Some(i), keys, n, r))
        .collect::<Result<Vec<_>>>()?;
    NormalizedMatrix::star(s, parts)
}

/// Builds an M:N join `T = [I_S S, I_R R]` on join values `j_s` and `j_r`.
///
/// Output rows are ordered lexicographically by (S row, R row). Rows of
/// either table that match nothing are dropped.
pub fn build_mn<V: Ord>(s: NumericMatrix, j_s: &[V], r: NumericMatrix, j_r: &[V]) -> Result<NormalizedMatrix> {
    if j_s.len() != s.rows() || j_r.len() != r.rows() {
        return Err(Error::InvalidMatrix(format!(
            "join columns have {} and {} entries for tables with {} and {} rows",
            j_s.len(),
            j_r.len(),
            s.rows(),
            r.rows()
        )));
    }
    let mut by_value: BTreeMap<&V, Vec<usize>> = BTreeMap::new();
    for (row, v) in j_r.iter().enumerate() {
        by_value.entry(v).or_default().push(row);
    }
    let mut s_rows = Vec::new();
    let mut r_rows = Vec::new();
    for (i, v) in j_s.iter().enumerate() {
        if let Some(matches) = by_value.get(v) {
            for &j in matches {
                s_rows.push(i);
                r_rows.push(j);
            }
        }
    }
    if s_rows.is_empty() {
        return Err(Error::EmptyJoin);
    }
    let (s_targets, s_keep) = compact(&s_rows, s.rows());
    // each key's attribute rows are gathered together for every matching
    // entity row; numbering them by first use keeps every group contiguous
    let (r_targets, r_keep) = compact_by_first_use(&r_rows, r.rows());
    let i_s = IndicatorMatrix::from_targets_unchecked(s_keep.len(), s_targets);
    let i_r = IndicatorMatrix::from_targets_unchecked(r_keep.len(), r_targets);
    NormalizedMatrix::mn(keep_rows(s, &s_keep), i_s, i_r, keep_rows(r, &r_keep))
}

/// Builds a multi-table M:N join from an explicit row mapping: part `j`
/// supplies, for every output row, the 0-based row of `R_j` it comes from.
pub fn build_multi_mn(parts: Vec<(&[usize], NumericMatrix)>) -> Result<NormalizedMatrix> {
    let n = parts.first().map_or(0, |(m, _)| m.len());
    if n == 0 {
        return Err(Error::EmptyJoin);
    }
    let parts = parts
        .into_iter()
        .enumerate()
        .map(|(j, (mapping, r))| {
            if mapping.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "part {j}: row mapping has {} entries, expected {n}",
                    mapping.len()
                )));
            }
            if let Some((row, &key)) = mapping.iter().enumerate().find(|(_, &t)| t >= r.rows()) {
                return Err(Error::DanglingKey { part: Some(j), row, key, rows: r.rows() });
            }
            let (targets, keep) = compact(mapping, r.rows());
            Ok((IndicatorMatrix::from_targets_unchecked(keep.len(), targets), keep_rows(r, &keep)))
        })
        .collect::<Result<Vec<_>>>()?;
    NormalizedMatrix::multi_mn(parts)
}

impl NormalizedMatrix {
    /// True for the two-table variants (PK-FK and M:N).
    pub fn is_two_table(&self) -> bool {
        matches!(self.kind(), JoinKind::PkFk | JoinKind::ManyToMany)
    }
}

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::IndicatorMatrix;
use crate::kernel::{DenseMatrix, NumericMatrix};
use crate::{Error, Result};

/// The join shape a normalized matrix was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JoinKind {
    /// Entity table `S` joined with one attribute table `R` through a key: `T = [S, KR]`.
    PkFk,
    /// Entity table joined with `q` attribute tables: `T = [S, K₁R₁, …, K_qR_q]`.
    Star,
    /// Two tables joined on a non-key attribute: `T = [I_S S, I_R R]`.
    ManyToMany,
    /// `q` tables joined on non-key attributes: `T = [I_{R1} R₁, …, I_{Rq} R_q]`.
    MultiManyToMany,
}

impl JoinKind {
    pub fn as_str(self) -> &'static str {
        match self {
            JoinKind::PkFk => "pkfk",
            JoinKind::Star => "star",
            JoinKind::ManyToMany => "mn",
            JoinKind::MultiManyToMany => "multi_mn",
        }
    }
}

/// One horizontal slice `I · B` of the logical matrix.
///
/// `indicator == None` stands for the identity (the entity table of a
/// PK-FK or star join).
#[derive(Debug, Clone)]
pub struct Block {
    pub(crate) indicator: Option<Arc<IndicatorMatrix>>,
    pub(crate) table: Arc<NumericMatrix>,
}

impl Block {
    pub fn indicator(&self) -> Option<&IndicatorMatrix> {
        self.indicator.as_deref()
    }

    pub fn table(&self) -> &NumericMatrix {
        &self.table
    }

    /// Number of base-table rows (`n_S` or `n_R`).
    pub fn table_rows(&self) -> usize {
        self.table.rows()
    }

    pub fn width(&self) -> usize {
        self.table.cols()
    }
}

/// A join result kept in factorized form, with a transpose flag.
///
/// Internally every variant is a list of blocks `[I₁B₁, …, I_kB_k]`, which
/// lets each rewrite rule be written once for all join shapes.
#[derive(Debug, Clone)]
pub struct NormalizedMatrix {
    kind: JoinKind,
    rows: usize,
    blocks: Vec<Block>,
    transposed: bool,
}

impl NormalizedMatrix {
    fn from_blocks(kind: JoinKind, rows: usize, blocks: Vec<Block>) -> Self {
        NormalizedMatrix { kind, rows, blocks, transposed: false }
    }

    /// `T = [S, KR]` from already-built parts.
    pub fn pkfk(s: NumericMatrix, k: IndicatorMatrix, r: NumericMatrix) -> Result<Self> {
        let mut m = Self::star(s, alloc::vec![(k, r)])?;
        m.kind = JoinKind::PkFk;
        Ok(m)
    }

    /// `T = [S, K₁R₁, …]` from already-built parts.
    pub fn star(s: NumericMatrix, parts: Vec<(IndicatorMatrix, NumericMatrix)>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidConfig("a star join needs at least one attribute table".into()));
        }
        let n = s.rows();
        let mut blocks = Vec::with_capacity(parts.len() + 1);
        blocks.push(Block { indicator: None, table: Arc::new(s) });
        for (i, (k, r)) in parts.into_iter().enumerate() {
            if k.rows() != n || k.cols() != r.rows() {
                return Err(Error::InvalidMatrix(format!(
                    "part {i}: indicator is {}x{}, expected {n}x{} to match the entity table and attribute table",
                    k.rows(),
                    k.cols(),
                    r.rows()
                )));
            }
            blocks.push(Block { indicator: Some(Arc::new(k)), table: Arc::new(r) });
        }
        Ok(Self::from_blocks(JoinKind::Star, n, blocks))
    }

    /// `T = [I_S S, I_R R]` from already-built parts.
    pub fn mn(s: NumericMatrix, i_s: IndicatorMatrix, i_r: IndicatorMatrix, r: NumericMatrix) -> Result<Self> {
        let mut m = Self::multi_mn(alloc::vec![(i_s, s), (i_r, r)])?;
        m.kind = JoinKind::ManyToMany;
        Ok(m)
    }

    /// `T = [I₁R₁, …, I_qR_q]` from already-built parts.
    pub fn multi_mn(parts: Vec<(IndicatorMatrix, NumericMatrix)>) -> Result<Self> {
        let n = match parts.first() {
            Some((i, _)) => i.rows(),
            None => return Err(Error::InvalidConfig("a many-to-many join needs at least one table".into())),
        };
        let mut blocks = Vec::with_capacity(parts.len());
        for (j, (ind, t)) in parts.into_iter().enumerate() {
            if ind.rows() != n || ind.cols() != t.rows() {
                return Err(Error::InvalidMatrix(format!(
                    "part {j}: indicator is {}x{}, expected {n}x{}",
                    ind.rows(),
                    ind.cols(),
                    t.rows()
                )));
            }
            blocks.push(Block { indicator: Some(Arc::new(ind)), table: Arc::new(t) });
        }
        Ok(Self::from_blocks(JoinKind::MultiManyToMany, n, blocks))
    }

    pub fn kind(&self) -> JoinKind {
        self.kind
    }

    pub fn is_transposed(&self) -> bool {
        self.transposed
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Rows of the untransposed logical matrix.
    pub fn base_rows(&self) -> usize {
        self.rows
    }

    /// Columns of the untransposed logical matrix.
    pub fn base_cols(&self) -> usize {
        self.blocks.iter().map(Block::width).sum()
    }

    /// Logical row count, honoring the transpose flag.
    pub fn nrows(&self) -> usize {
        if self.transposed {
            self.base_cols()
        } else {
            self.rows
        }
    }

    /// Logical column count, honoring the transpose flag.
    pub fn ncols(&self) -> usize {
        if self.transposed {
            self.rows
        } else {
            self.base_cols()
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows(), self.ncols())
    }

    /// Entity table `S` (PK-FK, star and M:N joins).
    pub fn entity(&self) -> Option<&NumericMatrix> {
        match self.kind {
            JoinKind::MultiManyToMany => None,
            _ => Some(self.blocks[0].table()),
        }
    }

    /// Attribute tables with their indicators (`(K_i, R_i)` or `(I_R, R)`).
    pub fn attributes(&self) -> impl Iterator<Item = (&IndicatorMatrix, &NumericMatrix)> {
        let skip = usize::from(self.kind != JoinKind::MultiManyToMany);
        self.blocks.iter().skip(skip).filter_map(|b| b.indicator().map(|i| (i, b.table())))
    }

    /// Flips the transpose flag. No data is copied.
    pub fn transpose(&self) -> NormalizedMatrix {
        NormalizedMatrix { transposed: !self.transposed, ..self.clone() }
    }

    /// Replaces every base table by `f(table)`, keeping indicators and flag.
    pub(crate) fn map_tables(&self, mut f: impl FnMut(&NumericMatrix) -> Result<NumericMatrix>) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| Ok(Block { indicator: b.indicator.clone(), table: Arc::new(f(&b.table)?) }))
            .collect::<Result<Vec<_>>>()?;
        Ok(NormalizedMatrix { kind: self.kind, rows: self.rows, blocks, transposed: self.transposed })
    }

    /// Column offset of every block in the untransposed matrix, plus the total.
    pub(crate) fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.blocks.len() + 1);
        let mut acc = 0;
        out.push(0);
        for b in &self.blocks {
            acc += b.width();
            out.push(acc);
        }
        out
    }

    /// Computes the join result explicitly. This is the reference oracle for
    /// every factorized operator. The result is dense when all base tables
    /// are dense, CSR otherwise.
    pub fn materialize(&self) -> NumericMatrix {
        let parts: Vec<NumericMatrix> = self
            .blocks
            .iter()
            .map(|b| match &b.indicator {
                None => (*b.table).clone(),
                Some(k) => b.table.select_rows(k.target()),
            })
            .collect();
        let refs: Vec<&NumericMatrix> = parts.iter().collect();
        let t = if refs.is_empty() {
            NumericMatrix::Dense(DenseMatrix::zeros(self.rows, 0))
        } else {
            NumericMatrix::hstack(&refs).expect("blocks share the row count by construction")
        };
        if self.transposed {
            t.transpose()
        } else {
            t
        }
    }
}

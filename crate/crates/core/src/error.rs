use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch in {op}: left operand is {}x{}, right operand is {}x{}", left.0, left.1, right.0, right.1)]
    Shape { op: &'static str, left: (usize, usize), right: (usize, usize) },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("singular value decomposition did not converge after {sweeps} sweeps")]
    SvdNoConvergence { sweeps: usize },

    #[error("row {row} contains NaN")]
    NanInRow { row: usize },

    #[error("division by a zero scalar")]
    DivisionByZero,

    #[error("{}key at row {row} references attribute row {key}, which does not exist (table has {rows} rows)", part.map(|p| alloc::format!("part {p}: ")).unwrap_or_default())]
    DanglingKey { part: Option<usize>, row: usize, key: usize, rows: usize },

    #[error("join produced no output rows")]
    EmptyJoin,

    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model state became non-finite at iteration {iteration}")]
    Divergence { iteration: usize },
}

impl Error {
    pub(crate) fn shape(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::Shape { op, left, right }
    }
}

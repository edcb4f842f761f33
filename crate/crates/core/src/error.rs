use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("row {0} has zero variance")]
    ZeroVarianceRow(usize),

    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("matrix has {rows}x{cols} shape, expected {expected}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: String,
    },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{redraws} degenerate bootstrap redraws while building {k} replicates")]
    TooManyDegenerateRedraws { k: usize, redraws: usize },

    /// A degenerate-redraw failure raised inside a Monte Carlo sweep.
    #[error("trial {trial}, k = {k}: {source}")]
    Trial {
        trial: usize,
        k: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

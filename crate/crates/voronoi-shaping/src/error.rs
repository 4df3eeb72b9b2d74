use thiserror::Error;

/// Errors produced by the library and the CLI harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported lattice: {family} in dimension {dim}")]
    UnsupportedLattice { family: String, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a lattice point (max coefficient residual {residual:.3e})")]
    NotALatticePoint { residual: f64 },

    #[error("symbol index out of range (must be below r^N)")]
    IndexOutOfRange,

    #[error("digit {digit} out of range for base {base}")]
    DigitOutOfRange { digit: i64, base: u32 },

    #[error("expected {expected} bits, got {got}")]
    WrongBitCount { expected: usize, got: usize },

    #[error("unsupported scale factor r={r}: must be one of 2, 4, 8, 16")]
    UnsupportedScale { r: u32 },

    #[error("shift vector lies outside the Voronoi region of the origin")]
    ShiftOutsideCell,

    #[error("enumeration budget exceeded ({candidates} candidates > {budget})")]
    BudgetExceeded { candidates: u128, budget: u128 },

    #[error("maximum-likelihood detection needs M <= 2^20, constellation has {m}")]
    MlTooLarge { m: String },

    #[error("union bound over all pairs needs M <= 4096, constellation has {m}")]
    UnionBoundTooLarge { m: String },

    #[error("config error: {key}: {msg}")]
    Config { key: String, msg: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 1 for configuration problems, 2 for
    /// runtime/numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io { .. } => 1,
            _ => 2,
        }
    }
}

//! Error type shared across the crate.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("config parse error at line {line} (key `{key}`): {msg}")]
    ConfigParse {
        line: usize,
        key: String,
        msg: String,
    },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error(
        "light-line singularity: reduced angle {theta:.3e} within {eps:.3e} of the free-photon \
         phase (kappa*a = {kappa_a}); re-grid the momentum sweep"
    )]
    LightLineSingular { kappa_a: f64, theta: f64, eps: f64 },

    #[error("eigensolver failed to converge for a {dim}x{dim} matrix")]
    EigenConvergence { dim: usize },

    #[error("eigenpair residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("empty spectrum: {0}")]
    EmptySpectrum(String),

    #[error(
        "branch discontinuity at sweep index {index}: detuning jump {jump:.3e} exceeds {tol:.3e}"
    )]
    BranchDiscontinuity { index: usize, jump: f64, tol: f64 },

    #[error("no modes with detuning in [{lo}, {hi}]; nearest detunings: {nearest:?}")]
    EmptySelection { lo: f64, hi: f64, nearest: Vec<f64> },

    #[error("{context}: I/O error on {path}: {source}")]
    Io {
        context: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("at sweep point {point}: {source}")]
    AtSweepPoint {
        point: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(context: &'static str, path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            context,
            path: path.into(),
            source,
        }
    }

    pub fn at_sweep_point(self, point: String) -> Self {
        Error::AtSweepPoint {
            point,
            source: Box::new(self),
        }
    }

    /// The innermost error, unwrapping sweep-point context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtSweepPoint { source, .. } => source.root(),
            other => other,
        }
    }
}

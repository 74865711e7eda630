use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Fock index {index} out of range for cutoff {cutoff}")]
    IndexOutOfRange { index: usize, cutoff: usize },

    #[error("truncation tail {tail:.3e} exceeds target {target:.3e}; use cutoff >= {suggested}")]
    CutoffTooSmall {
        tail: f64,
        target: f64,
        suggested: usize,
    },

    #[error("space mismatch: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },

    #[error("expected a single-mode space, got {0}")]
    NotSingleMode(String),

    #[error("{name} = {value} is outside [{min}, {max}]")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("operator is not unitary on the input span (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("state is not normalized (squared norm {norm_sqr}, tail bound {tail_bound:.3e})")]
    NotNormalized { norm_sqr: f64, tail_bound: f64 },

    #[error("density matrix trace {trace} is not 1")]
    BadTrace { trace: f64 },

    #[error("invalid POVM: completeness residual {completeness_residual:.3e}, min eigenvalue {min_eigenvalue:.3e}")]
    InvalidPovm {
        completeness_residual: f64,
        min_eigenvalue: f64,
    },

    #[error("Kraus set is not trace preserving (residual {residual:.3e})")]
    IncompleteKraus { residual: f64 },

    #[error("no readout outcome labelled {0}")]
    UnknownLabel(String),

    #[error("branch probability {prob:.3e} is below the floor")]
    BranchSuppressed { prob: f64 },

    #[error("eigen decomposition failed to converge")]
    EigenFailure,

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("no-go inequality violated: p_aveme − p_me = {margin:.3e}")]
    InvariantViolation { margin: f64 },

    #[error("random instance generation failed: {0}")]
    InstanceGeneration(String),

    #[error("cross-check failed at {swept} = {value}: {field} closed form {closed} vs engine {engine} (tolerance {tol:.1e})")]
    CrossCheck {
        swept: &'static str,
        value: f64,
        field: String,
        closed: f64,
        engine: f64,
        tol: f64,
    },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value,
            min: 0.0,
            max: 1.0,
        })
    }
}

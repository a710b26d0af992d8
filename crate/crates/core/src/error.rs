//! Error type shared by all modules.

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A copula parameter lies outside the family's admissible range.
    #[error("parameter {value} out of range for {family} copula (admissible: {range})")]
    ParameterOutOfRange {
        family: &'static str,
        value: f64,
        range: &'static str,
    },

    /// An argument that must lie in the unit interval (or a stated subset) does not.
    #[error("argument {name}={value} outside {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A partial derivative was requested where the family does not define one.
    #[error("{family} copula has no partial derivative in {axis} at ({u}, {v})")]
    DerivativeUndefined {
        family: &'static str,
        axis: &'static str,
        u: f64,
        v: f64,
    },

    /// Exactly equal coordinates in a sample that is assumed to come from
    /// continuous margins.
    #[error("ties present in {axis} coordinates (indices {i} and {j})")]
    TiesPresent {
        axis: &'static str,
        i: usize,
        j: usize,
    },

    /// An operation expected a different margin kind.
    #[error("expected a sample with {expected} margins, got {got}")]
    MarginKindMismatch {
        expected: &'static str,
        got: &'static str,
    },

    /// An operation expected a different grid-function kind.
    #[error("expected a grid function of kind {expected}, got {got}")]
    KindMismatch {
        expected: &'static str,
        got: &'static str,
    },

    /// Adaptive or node-doubled quadrature could not certify the requested tolerance.
    #[error("quadrature error bound {achieved:e} exceeds tolerance {tolerance:e}")]
    QuadratureFailure { tolerance: f64, achieved: f64 },

    /// An experiment result was compared against a model other than the one it was run for.
    #[error("experiment was run for {ran_for} but compared against {compared}")]
    ModelMismatch { ran_for: String, compared: String },

    /// A sample is too small for the requested statistic.
    #[error("sample of size {got} is too small (need at least {min})")]
    SampleTooSmall { min: usize, got: usize },

    /// Invalid experiment or CLI configuration.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Malformed CSV input.
    #[error("CSV parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },

    /// A replication of a Monte Carlo experiment failed.
    #[error("replication {replication} failed: {source}")]
    ReplicationFailed {
        replication: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

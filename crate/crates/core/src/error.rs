use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid code parameters: n = {n}, k = {k}")]
    InvalidCode { n: usize, k: usize },

    #[error("invalid error weights (t_u = {t_u}, t_l = {t_l}) for n = {n}")]
    InvalidWeights { n: usize, t_u: usize, t_l: usize },

    #[error("{name} = {value} is outside [0, 1]")]
    RateOutOfRange { name: &'static str, value: f64 },

    #[error("operator size mismatch: expected {expected} qubits, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("invalid Pauli string {0:?}")]
    ParsePauli(String),

    #[error("invalid stabilizer code: {0}")]
    InvalidStabilizerCode(String),

    #[error("operation requires k = 1, code has k = {0}")]
    UnsupportedK(usize),

    #[error("located index {index} out of range for n = {n}")]
    LocatedOutOfRange { index: usize, n: usize },

    #[error("enumeration of {requested} operators exceeds the cap of {cap}")]
    EnumerationCap { requested: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("block posterior has zero total mass (priors contradict the observed syndrome)")]
    Contradiction,
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the library. Residuals are reported as `f64` regardless
/// of the scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("matrix is not Hermitian: max |H_ij - conj(H_ji)| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace {trace} differs from 1")]
    NotUnitTrace { trace: f64 },

    #[error("vector is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("tolerance {name} = {value:e} outside (0, 1e-3)")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("priors invalid: {0}")]
    InvalidPriors(String),

    #[error("operator is not unitary: ||U^dag U - I||_F = {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("Kraus operators not trace preserving: ||sum K^dag K - I||_F = {residual:e}")]
    NotTracePreserving { residual: f64 },

    #[error("channel is not unital: ||sum K K^dag - I||_F = {residual:e}")]
    NotUnital { residual: f64 },

    #[error("vectors have different sums ({left} vs {right})")]
    SumMismatch { left: f64, right: f64 },

    #[error("Choi matrix is not CPTP: min eigenvalue {min_eigenvalue:e}, ||tr_A J - I/d||_F = {marginal_residual:e}")]
    NotCptp {
        min_eigenvalue: f64,
        marginal_residual: f64,
    },

    #[error("k = {k} outside 1..={max}")]
    InvalidK { k: usize, max: usize },

    #[error("ensemble needs at least 2 states, got {0}")]
    EnsembleTooSmall(usize),

    #[error("C({n},{k}) = {count} subsets exceeds the cap of {cap}")]
    CapExceeded {
        n: usize,
        k: usize,
        count: u128,
        cap: usize,
    },

    #[error("projector-sum bound not saturated: ||sum Pi_x - (N-k) I||_F = {residual:e}")]
    NotSaturated { residual: f64 },

    #[error("POVM labels do not match the {n}-choose-{k} subset family")]
    LabelMismatch { n: usize, k: usize },

    #[error("duplicate POVM label {0}")]
    DuplicateLabel(String),

    #[error("POVM invalid: min eigenvalue {min_eigenvalue:e}, ||sum T - I|| = {residual:e}")]
    InvalidPovm { min_eigenvalue: f64, residual: f64 },

    #[error("decoder has no entry for outcome {0}")]
    DecoderGap(usize),

    #[error("Born probabilities for encoding {label} sum to {sum}")]
    BornNormalization { label: usize, sum: f64 },

    #[error("r_c = {rank} outside 1..={max}")]
    InvalidChoiRank { rank: usize, max: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

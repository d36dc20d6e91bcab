use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e} exceeds {tolerance:.3e})")]
    NonHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {dim}: operation requires a two-level system")]
    UnsupportedDimension { dim: usize },

    #[error("degenerate spectrum at t = {time:.6e} s (gap {gap:.3e} rad/s)")]
    DegenerateSpectrum { time: f64, gap: f64 },

    #[error("vector norm below floor at t = {time:.6e} s")]
    ZeroVector { time: f64 },

    #[error("waveform channel `{channel}` has no matching control operator")]
    ChannelMismatch { channel: String },

    #[error("invalid pulse parameters: {reason}")]
    InvalidParams { reason: String },

    #[error("invalid boundary conditions: {reason}")]
    InvalidBoundary { reason: String },

    #[error("invalid coupling: {reason}")]
    InvalidCoupling { reason: String },

    #[error("invalid perturbation radius {radius} for {n_steps} steps")]
    InvalidRadius { radius: usize, n_steps: usize },

    #[error("eigenvalue ordering violation: expected rank {expected}, got {got}")]
    OrderingViolation { expected: usize, got: usize },

    #[error("no evaluable point in the search grid (all candidates degenerate)")]
    AllDegenerate,

    #[error("grid mismatch: {reason}")]
    GridMismatch { reason: String },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

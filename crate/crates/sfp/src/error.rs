use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SfpError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("truncation interval must satisfy c < 0 < d, got [{c}, {d}]")]
    Interval { c: f64, d: f64 },
    #[error("negative harmonic index {0}")]
    Index(i64),
    #[error("term budget U={terms} too small for {jumps} jump(s)")]
    Degree { terms: usize, jumps: usize },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("evaluation point {y} lies outside [{c}, {d}]; increase the interval multiplier")]
    OutsideInterval { y: f64, c: f64, d: f64 },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("length mismatch: {0} vs {1}")]
    Length(usize, usize),
}

pub type Result<T> = std::result::Result<T, SfpError>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rank {rank} is outside 1..={max}")]
    InvalidRank { rank: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular value iteration did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("numerically rank deficient: sigma_{index} = {sigma:e} below {threshold:e}")]
    RankDeficient {
        index: usize,
        sigma: f64,
        threshold: f64,
    },

    #[error("column {col} has vanishing norm below row {row}")]
    ZeroColumn { row: usize, col: usize },

    #[error("rows are not orthonormal (max |VV* - I| = {defect:e})")]
    NonOrthonormalV { defect: f64 },

    #[error("no admissible column at step {step}: all remaining denominators vanish")]
    NoAdmissibleColumn { step: usize },

    #[error("pivot underflow at step {step}: |V_kk| = {value:e}")]
    PivotUnderflow { step: usize, value: f64 },

    #[error("surrogate rank too low: sigma_r / sigma_1 = {ratio:e}")]
    SurrogateRankTooLow { ratio: f64 },

    #[error("selected rows of the left singular factor are singular (cond^-1 = {rcond:e})")]
    SingularUhat { rcond: f64 },

    #[error("intersection submatrix is singular (cond^-1 = {rcond:e})")]
    SingularAhat { rcond: f64 },

    #[error("selected submatrix is singular (cond^-1 = {rcond:e})")]
    SingularSubmatrix { rcond: f64 },

    #[error("trailing part of the candidate column vanishes (norm {norm:e})")]
    ZeroTail { norm: f64 },

    #[error("problem too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Input problems as opposed to numerical degeneracy of valid input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::EmptyMatrix { .. }
                | Error::NonFinite { .. }
                | Error::DimensionMismatch(_)
                | Error::InvalidRank { .. }
                | Error::InvalidParameter(_)
                | Error::NonOrthonormalV { .. }
                | Error::TooLarge(_)
        )
    }
}

use thiserror::Error;

use crate::C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point {0} is not in the domain")]
    OutsideDomain(C64),

    #[error("scale underflow: shrink 2^-2^(j/3) at j = {j} is below the smallest normal f64")]
    ScaleUnderflow { j: u32 },

    #[error("degenerate annulus: 2 r_k = {} exceeds sqrt(2 r_k) = {}", 2.0 * .r_k, (2.0 * .r_k).sqrt())]
    DegenerateAnnulus { r_k: f64 },

    #[error("{0} is an isolated boundary point; the enlargement needs a non-isolated one")]
    IsolatedBoundaryPoint(C64),

    #[error("ill-conditioned basis: Cholesky failed after jitter {jitter:e} (dim {dim}, min pivot {min_pivot:e}, trace {trace:e})")]
    IllConditioned {
        dim: usize,
        jitter: f64,
        min_pivot: f64,
        trace: f64,
    },

    #[error("degenerate kernel: K = {0:e} at the evaluation point")]
    DegenerateKernel(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("sign of an exact dyadic expression could not be decided")]
    Undecidable,
}

pub type Result<T> = std::result::Result<T, Error>;

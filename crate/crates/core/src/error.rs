// SPDX-License-Identifier: Apache-2.0
use alloc::string::String;

/// Errors raised by the core kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("mode {mode} out of range for an order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("singular matrix in {0}")]
    Singular(&'static str),
    #[error("rank-deficient input: {0}")]
    RankDeficient(String),
    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),
    #[error("norm {norm} exceeds the admissible bound {bound}")]
    NormTooLarge { norm: f64, bound: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

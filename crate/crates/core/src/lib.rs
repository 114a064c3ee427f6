// SPDX-License-Identifier: Apache-2.0
//! Fixed-rank CP, Tucker and tensor-train manifolds treated as homogeneous
//! spaces `G/H` of `G = GL(n₁) × … × GL(n_d)`.
//!
//! Points are stored as the leading columns of a block lower triangular
//! representative, tangents as the leading columns of a horizontal vector,
//! and geodesics of the canonical (right-invariant quotient) metric are
//! evaluated with `O(n k²)` low-rank kernels. Every kernel on the geodesic
//! path charges its multiplications and divisions to a [`FlopLedger`].
//!
//! The crate is `no_std` (it needs `alloc`).

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cp;
pub mod error;
pub mod gl;
pub mod homogeneous;
pub mod linalg;
pub mod oracle;
pub mod psi;
pub mod rng;
pub mod tt;
pub mod tucker;

pub use error::{Error, Result};
pub use linalg::{DenseTensor, FlopLedger, LowRankPair, Matrix, Permutation};

// SPDX-License-Identifier: Apache-2.0
//! Dense matrices and tensors, pivoting, decompositions and the flop ledger.

pub mod counted;
mod decomp;
mod ledger;
mod lowrank;
mod lu;
mod matrix;
mod perm;
mod pivot;
mod tensor;

pub use decomp::{condition_number, numerical_rank, orthonormal_complement, singular_values};
pub use ledger::FlopLedger;
pub use lowrank::LowRankPair;
pub use lu::{inverse, Lu};
pub use matrix::Matrix;
pub use perm::Permutation;
pub use pivot::{basis_completion, pivot_rows, select_submatrix};
pub use tensor::{increment as tensor_increment, multilinear_rank, tt_rank, DenseTensor};

/// Default relative threshold for numerical ranks.
pub const RANK_TOL: f64 = 1e-10;

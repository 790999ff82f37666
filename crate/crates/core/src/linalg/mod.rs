//! Exact integer linear algebra.

mod eliminate;
mod hnf;
mod intmat;
mod lattice;
mod snf;
mod sparse;

pub use eliminate::{invariant_factors, rank, KernelBasis};
pub use hnf::{hnf, row_lattice_basis};
pub use intmat::IntMat;
pub use lattice::{
    cokernel_invariants, factorize, frac_vec, in_row_lattice, is_prime, kernel_basis, p_part, same_row_lattice,
    saturate, solve_diophantine, solve_integer_affine, InvariantFactors,
};
pub use snf::{normalize_diagonal, snf, SnfResult};
pub use sparse::{BlockBuilder, SparseMat};

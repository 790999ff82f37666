//! The free binomial ring functor `Bin_{≤N}` in the Mahler basis and its
//! cosimplicial models of two-term complexes.

mod cosimplicial;
mod level;
mod truncate;

pub use cosimplicial::{
    bin_chain_map, bin_levels, cosimplicialize, moore_bin_complex, normalized_bin_complex, CosimplicialLevels,
    TwoTermComplex, TwoTermMap,
};
pub use level::{
    bin_functor_matrix, bin_images, bin_matrix, bin_rank, binom_int, binom_rat, eval_mahler, gamma_rank, mahler_expand,
    polys_to_matrix, AffineSubst, BinLevel, Exps, MahlerArith, Poly,
};
pub use truncate::{restrict_map, tau_truncate, truncate_with_basis, Truncated};

//! Free cochain complexes, cube-indexed families and Mayer–Vietoris totals.

mod complex;
mod cube;

pub use complex::{block_diagonal, cohomology, Coeff, FreeCochainComplex, HomologySummary};
pub use cube::{e1_page, e2_ranks, mv_assemble, total_complex, CocubicalComplex, MVDoubleComplex};

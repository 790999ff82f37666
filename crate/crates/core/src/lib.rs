//! Homology of complements of rational affine subtorus arrangements in
//! `T = R^n / Z^n`, computed from finite-rank integral cochain models.

pub mod arrangement;
pub mod binomial;
pub mod complexes;
pub mod error;
pub mod linalg;
pub mod models;
pub mod oracle;

pub use arrangement::{build_atlas, ArrangementSpec, CubeAtlas, Subset};
pub use complexes::{cohomology, Coeff, FreeCochainComplex, HomologySummary};
pub use error::{Error, Result};
pub use linalg::{IntMat, InvariantFactors, SparseMat};

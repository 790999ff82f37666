//! Cube-shaped cochain models of an arrangement and the complement answer.

mod answer;
mod build;
mod exterior;

pub use answer::{
    assemble, homology_complement, torsion_prime_candidates, total_cohomology, AnswerOptions, ComplementAnswer,
    ModelTag, Workbench,
};
pub use build::{
    bin_general_with, model_bin_connected, model_bin_general, model_cohomology_e1, quotient_map, stratum_data,
    BinOptions, Splitting, StratumKData,
};
pub use exterior::{lambda_power, lex_subsets};

//! Model-free computations of `H^*(T, ∪T_i)` on restricted inputs, and the
//! certification report.

mod certify;
mod single;
mod surface;

pub use certify::{certify, CertifyOptions, Check, Report, Status};
pub use single::oracle_single;
pub use surface::{cell_pair, oracle_circle, oracle_surface, CellPair};

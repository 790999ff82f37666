//! Arrangements of affine subtori and their cube atlas of intersections.

mod atlas;
mod spec;

pub use atlas::{build_atlas, component_map, stratum_euler, union_euler, CubeAtlas, Stratum, Subset};
pub use spec::{
    fmt_point, fmt_rational, forms_apply, forms_of, is_integral, normalize_subtorus, parse_rational,
    parse_rational_str, AffineSubtorus, ArrangementSpec,
};

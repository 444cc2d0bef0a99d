//! Universal Witt polynomials and truncated Witt vector arithmetic.

mod poly;
mod universal;
mod vector;

pub use poly::{x_vars, xy_vars, UniversalPoly, Var};
pub use universal::{
    cache_line, cache_path, cached_polys, cached_reduced, ghost, ghost_x, homogeneity_check,
    is_prime, is_weighted_homogeneous, neg_polys, parse_cache_line, prod_polys, sum_polys,
    PolyKind, ReducedPoly, WittPolys,
};
pub use vector::{WittRing, WittVector};

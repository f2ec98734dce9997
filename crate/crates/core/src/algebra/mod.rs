//! Exact polynomials and real roots, nested radicals with branch search,
//! lattice reduction, and minimal-polynomial recognition.

mod lll;
mod poly;
mod radical;
mod recognize;

pub use lll::{gram_schmidt, is_lll_reduced, lll_reduce, IntLattice};
pub use poly::{
    count_real_roots, parse_polynomials, real_roots, root_by_spec, IntPolynomial, RealRoot,
    RootSpec,
};
pub use radical::{
    branch_search, matches_target, parse_named, radical_eval, BranchAssignment, RadicalExpr,
    MAX_ROOT_NODES,
};
pub use recognize::recognize_min_poly;

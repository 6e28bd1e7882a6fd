//! The search, Lovász and smooth rectangle LPs, their solvers, and dual
//! certificates.

mod certificate;
mod instance;
mod scan;
pub mod simplex;
mod solve;

pub use certificate::*;
pub use instance::{
    apply_ambiguity_variant, build_lovasz_lp, build_search_lp, build_smooth_lp, LpInstance, LpKind,
    PairConstraint, RowClass,
};
pub use scan::*;
pub use solve::{
    cell, check_primal, family_columns, solve_auto, solve_constraint_generation,
    solve_full_enumeration, LpResult, LpStatus, PrimalCheck, SolveConfig, SolverKind,
    DEFAULT_MAX_COLUMNS, DEFAULT_MAX_ITERATIONS, DEFAULT_MAX_PIVOTS,
};

//! Norms on finitely supported sequences and empirical unconditionality
//! and greedy constants of the canonical basis with respect to a family of
//! coordinate sets.

mod constants;
mod dp;
mod norm;
mod vector;

pub use constants::{
    constant_growth_table, greedy_constant, greedy_sets, growth_table_csv, uncond_constant, witness_vectors, Family,
    GreedyMode, GreedyOptions, GreedyResult, GreedySets, GrowthRow, UncondResult, UncondRoute, DESCENT_MAX_SWEEPS,
    DESCENT_TOLERANCE, ENUMERATION_CAP, GREEDY_SET_CAP,
};
pub use dp::{MaxWeightDp, MAX_DP_WINDOW};
pub use norm::{norm, Norm, NormKind, NormSpec};
pub use vector::{parse_vector, vector_from_json, Scalar, Vector};

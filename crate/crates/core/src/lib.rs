//! Ordinals below ω^ω, Schreier families, the ordinal graphs `G_n` and
//! norms built from Schreier families.

pub mod banach;
pub mod checks;
pub mod error;
pub mod ordinal;
pub mod ordtree;
pub mod policy;
pub mod schreier;

pub use error::{Error, Result};
pub use ordinal::{compare, format_ordinal, fund_seq, parse_ordinal, FundSeqPolicy, Kind, Ordinal, Term};
pub use ordtree::{build_graph, export_dot, f_value, f_witness, find_separation, FEvaluator, OrdGraph};
pub use policy::GrowthFn;
pub use schreier::{
    decompose, enumerate_family, is_maximal, member, parse_finset, DecompWitness, FinSet, GValue, SchreierHandle,
};

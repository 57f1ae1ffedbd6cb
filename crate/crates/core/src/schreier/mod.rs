//! Schreier families `S_α`: membership, decomposition witnesses,
//! exhaustive enumeration and the maximal-interval function `G(n, α)`.
//!
//! `S_0` holds `∅` and the singletons. `S_{γ+1}` holds unions
//! `E_1 ∪ … ∪ E_m` of successive blocks from `S_γ` with `m ≤ min E_1`, and
//! for a limit `β`, `E ∈ S_β` iff `E ∈ S_{β_m}` for some `1 ≤ m ≤ min E`.

mod enumerate;
mod finset;
mod handle;
mod witness;

pub use enumerate::{enumerate_family, FamilyEnumerator, FamilyTable, DEFAULT_ENUMERATION_BOUND};
pub use finset::{parse_finset, FinSet};
pub use handle::{default_g_cap, GValue, SchreierEngine, SchreierHandle};
pub use witness::DecompWitness;

use crate::error::Result;
use crate::ordinal::{FundSeqPolicy, Ordinal};

pub fn member(set: &FinSet, handle: &SchreierHandle) -> bool {
    handle.member(set)
}

pub fn decompose(set: &FinSet, handle: &SchreierHandle) -> Result<DecompWitness> {
    handle.decompose(set)
}

pub fn is_maximal(set: &FinSet, handle: &SchreierHandle) -> Result<bool> {
    handle.is_maximal(set)
}

/// Checks whether `S_alpha ∩ 𝒫({1..window})` is closed under replacing
/// elements by larger ones inside the window. Returns a counterexample pair
/// `(member, spread non-member)` when it is not.
pub fn check_spreading(
    alpha: &Ordinal,
    window: u64,
    policy: &FundSeqPolicy,
) -> Result<Option<(FinSet, FinSet)>> {
    let mut en = FamilyEnumerator::new(window, policy.clone())?;
    let table = en.family(alpha)?;
    for mask in table.masks() {
        let set = FinSet::from_mask(mask);
        // Moving one element up by one generates all spreads by iteration.
        for (i, &e) in set.iter().enumerate() {
            let next = e + 1;
            let blocked = set.get(i + 1).is_some_and(|&f| f == next);
            if next > window || blocked {
                continue;
            }
            let mut moved = set.to_vec();
            moved[i] = next;
            let moved = FinSet::new(moved)?;
            if !table.contains(&moved) {
                return Ok(Some((set, moved)));
            }
        }
    }
    Ok(None)
}

//! Exhaustive construction of `S_α ∩ 𝒫({1..N})` straight from the
//! recursive definition. Serves as the oracle for the greedy membership
//! procedure, so it deliberately shares no code with it.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::FinSet;
use crate::error::{Error, Result};
use crate::ordinal::{FundSeqPolicy, Kind, Ordinal};

pub const DEFAULT_ENUMERATION_BOUND: u64 = 14;

/// Membership bitmap over all subsets of `{1..window}`, indexed by mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyTable {
    window: u32,
    bits: Vec<bool>,
}

impl FamilyTable {
    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn contains_mask(&self, mask: u64) -> bool {
        self.bits[mask as usize]
    }

    pub fn contains(&self, set: &FinSet) -> bool {
        match set.to_mask() {
            Some(mask) if (mask as usize) < self.bits.len() => self.bits[mask as usize],
            _ => false,
        }
    }

    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(|(m, _)| m as u64)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset_of(&self, other: &FamilyTable) -> bool {
        self.window == other.window && self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    /// Members of `self` missing from `other`.
    pub fn difference(&self, other: &FamilyTable) -> Vec<FinSet> {
        self.masks()
            .filter(|m| !other.contains_mask(*m))
            .map(FinSet::from_mask)
            .collect()
    }

    pub fn to_sets(&self) -> BTreeSet<FinSet> {
        self.masks().map(FinSet::from_mask).collect()
    }

    /// Members not contained in any other member of the table.
    pub fn maximal_members(&self) -> Vec<FinSet> {
        let n = self.window;
        self.masks()
            .filter(|&m| (0..n).all(|i| m >> i & 1 == 1 || !self.contains_mask(m | 1 << i)))
            .map(FinSet::from_mask)
            .collect()
    }
}

/// Builds family tables for one window and policy, memoized per ordinal.
#[derive(Debug)]
pub struct FamilyEnumerator {
    window: u32,
    policy: FundSeqPolicy,
    memo: HashMap<Ordinal, Arc<FamilyTable>>,
}

impl FamilyEnumerator {
    pub fn new(window: u64, policy: FundSeqPolicy) -> Result<Self> {
        Self::with_bound(window, policy, DEFAULT_ENUMERATION_BOUND)
    }

    pub fn with_bound(window: u64, policy: FundSeqPolicy, bound: u64) -> Result<Self> {
        if window > bound || window > 24 {
            return Err(Error::BoundExceeded { what: format!("enumeration window {window}"), bound });
        }
        Ok(FamilyEnumerator { window: window as u32, policy, memo: HashMap::new() })
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn family(&mut self, alpha: &Ordinal) -> Result<Arc<FamilyTable>> {
        if let Some(t) = self.memo.get(alpha) {
            return Ok(Arc::clone(t));
        }
        let size = 1usize << self.window;
        let bits = match alpha.classify() {
            Kind::Zero => (0..size).map(|m| m.count_ones() <= 1).collect(),
            Kind::Successor(pred) => {
                let base = self.family(&pred)?;
                successor_bits(&base)
            }
            Kind::Limit => {
                let mut bits = vec![false; size];
                bits[0] = true;
                for m in 1..=self.window as u64 {
                    let approx = self.policy.term(alpha, m)?;
                    let table = self.family(&approx)?;
                    for mask in table.masks().filter(|&x| x != 0) {
                        // m ≤ min(E)
                        if mask.trailing_zeros() as u64 + 1 >= m {
                            bits[mask as usize] = true;
                        }
                    }
                }
                bits
            }
        };
        let table = Arc::new(FamilyTable { window: self.window, bits });
        self.memo.insert(alpha.clone(), Arc::clone(&table));
        Ok(table)
    }
}

/// `E ∈ S_{γ+1}` iff `E` splits into at most `min(E)` successive blocks from
/// `S_γ`. Computes the fewest blocks over every split point.
fn successor_bits(base: &FamilyTable) -> Vec<bool> {
    let size = base.bits.len();
    let mut fewest = vec![u32::MAX; size];
    fewest[0] = 0;
    for mask in 1..size {
        let mut prefix = 0usize;
        let mut rest = mask;
        while rest != 0 {
            let low = rest & rest.wrapping_neg();
            prefix |= low;
            rest ^= low;
            if base.bits[prefix] && fewest[rest] != u32::MAX {
                fewest[mask] = fewest[mask].min(fewest[rest] + 1);
            }
        }
    }
    (0..size)
        .map(|m| m == 0 || fewest[m] <= m.trailing_zeros() + 1)
        .collect()
}

/// `{E ⊆ {1..N} : E ∈ S_α}` with the default bound of 14.
pub fn enumerate_family(alpha: &Ordinal, window: u64, policy: &FundSeqPolicy) -> Result<BTreeSet<FinSet>> {
    let mut en = FamilyEnumerator::new(window, policy.clone())?;
    Ok(en.family(alpha)?.to_sets())
}

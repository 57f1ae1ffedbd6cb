use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::{DecompWitness, FinSet};
use crate::error::{Error, Result};
use crate::ordinal::{FundSeqPolicy, Kind, Ordinal};

/// Default overflow cap for [`SchreierHandle::g_value`]: 10^18.
pub fn default_g_cap() -> BigUint {
    BigUint::from(10u64).pow(18)
}

/// Beyond this many trailing successor steps, membership and `G` use the
/// exact saturation facts below instead of unrolling the recursion.
const DEEP_TAIL: u64 = 32;

/// Result of `G(n, α)`: the value, or `Overflow` when it exceeds the cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GValue {
    Value(BigUint),
    Overflow,
}

impl GValue {
    pub fn value(&self) -> Option<&BigUint> {
        match self {
            GValue::Value(v) => Some(v),
            GValue::Overflow => None,
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value().and_then(|v| v.to_u64())
    }
}

impl std::fmt::Display for GValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GValue::Value(v) => write!(f, "{v}"),
            GValue::Overflow => f.write_str("overflow"),
        }
    }
}

#[derive(Debug, Clone)]
enum GEntry {
    Exact(BigUint),
    /// Known to exceed this cap.
    Above(BigUint),
}

/// Shared memo tables for one approximating-sequence policy. Several
/// handles at different levels may share an engine.
#[derive(Debug, Default)]
pub struct SchreierEngine {
    policy: FundSeqPolicy,
    members: RwLock<HashMap<(Ordinal, Vec<u64>), bool>>,
    intervals: RwLock<HashMap<(Ordinal, BigUint), GEntry>>,
}

impl SchreierEngine {
    pub fn new(policy: FundSeqPolicy) -> Self {
        SchreierEngine { policy, ..Default::default() }
    }

    pub fn policy(&self) -> &FundSeqPolicy {
        &self.policy
    }

    fn approx(&self, beta: &Ordinal, m: u64) -> Ordinal {
        self.policy
            .term(beta, m)
            .expect("caller only asks for approximating terms of limits")
    }

    pub fn member(&self, alpha: &Ordinal, e: &[u64]) -> bool {
        if e.len() <= 1 {
            return true;
        }
        let min = e[0];
        match alpha.classify() {
            Kind::Zero => false,
            Kind::Successor(pred) => {
                let (_, tail) = alpha.split_finite();
                if tail > DEEP_TAIL && tail >= e.len() as u64 {
                    // S_{λ+k} ⊇ S_k, which holds every set with min ≥ 2 and
                    // at most 2^k elements; sets with min 1 are only ∅ or {1}.
                    return min >= 2;
                }
                let key = (alpha.clone(), e.to_vec());
                if let Some(&hit) = self.members.read().unwrap().get(&key) {
                    return hit;
                }
                let result = self.peel(&pred, e, min).is_some();
                self.members.write().unwrap().insert(key, result);
                result
            }
            Kind::Limit => {
                let key = (alpha.clone(), e.to_vec());
                if let Some(&hit) = self.members.read().unwrap().get(&key) {
                    return hit;
                }
                let result = (1..=min).any(|m| self.member(&self.approx(alpha, m), e));
                self.members.write().unwrap().insert(key, result);
                result
            }
        }
    }

    /// Splits `e` greedily into longest prefixes lying in `S_gamma`. Returns
    /// the block end offsets, or `None` once more than `max_blocks` are needed.
    fn peel(&self, gamma: &Ordinal, e: &[u64], max_blocks: u64) -> Option<Vec<usize>> {
        let mut ends = Vec::new();
        let mut start = 0;
        while start < e.len() {
            if ends.len() as u64 == max_blocks {
                return None;
            }
            let rest = &e[start..];
            // Hereditarity makes prefix membership monotone in length.
            let mut good = 1;
            let mut step = 1;
            let mut bad = loop {
                let probe = good + step;
                if probe > rest.len() {
                    break rest.len() + 1;
                }
                if self.member(gamma, &rest[..probe]) {
                    good = probe;
                    step *= 2;
                } else {
                    break probe;
                }
            };
            while bad - good > 1 {
                let mid = good + (bad - good) / 2;
                if self.member(gamma, &rest[..mid]) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            start += good;
            ends.push(start);
        }
        Some(ends)
    }

    pub fn decompose(&self, alpha: &Ordinal, set: &FinSet) -> Result<DecompWitness> {
        let not_member = || Error::NotMember { set: set.to_string(), alpha: alpha.clone() };
        if set.is_empty() {
            return Ok(DecompWitness::Leaf { alpha: alpha.clone(), set: set.clone() });
        }
        match alpha.classify() {
            Kind::Zero if set.len() == 1 => Ok(DecompWitness::Leaf { alpha: alpha.clone(), set: set.clone() }),
            Kind::Zero => Err(not_member()),
            Kind::Successor(_) if set.len() == 1 => {
                Ok(DecompWitness::Leaf { alpha: alpha.clone(), set: set.clone() })
            }
            Kind::Successor(pred) => {
                let ends = self.peel(&pred, set, set[0]).ok_or_else(not_member)?;
                let mut blocks = Vec::with_capacity(ends.len());
                let mut start = 0;
                for end in ends {
                    let block = FinSet::new(set[start..end].to_vec())?;
                    blocks.push(self.decompose(&pred, &block)?);
                    start = end;
                }
                Ok(DecompWitness::Successor { alpha: alpha.clone(), set: set.clone(), blocks })
            }
            Kind::Limit => {
                for m in 1..=set[0] {
                    let approx = self.approx(alpha, m);
                    if self.member(&approx, set) {
                        let inner = self.decompose(&approx, set)?;
                        return Ok(DecompWitness::Limit {
                            alpha: alpha.clone(),
                            set: set.clone(),
                            m,
                            approx,
                            inner: Box::new(inner),
                        });
                    }
                }
                Err(not_member())
            }
        }
    }

    /// Largest `m ≥ n` with `{n, …, m} ∈ S_alpha`, or `None` above `cap`.
    pub fn g(&self, n: &BigUint, alpha: &Ordinal, cap: &BigUint) -> Option<BigUint> {
        if n > cap {
            return None;
        }
        if n.is_one() {
            // Only ∅ and {1} contain 1.
            return Some(n.clone());
        }
        let key = (alpha.clone(), n.clone());
        if let Some(entry) = self.intervals.read().unwrap().get(&key) {
            match entry {
                GEntry::Exact(v) => return (v <= cap).then(|| v.clone()),
                GEntry::Above(c) if cap <= c => return None,
                GEntry::Above(_) => {}
            }
        }
        let result = self.g_uncached(n, alpha, cap);
        let entry = match &result {
            Some(v) => GEntry::Exact(v.clone()),
            None => GEntry::Above(cap.clone()),
        };
        self.intervals.write().unwrap().insert(key, entry);
        result
    }

    fn g_uncached(&self, n: &BigUint, alpha: &Ordinal, cap: &BigUint) -> Option<BigUint> {
        match alpha.classify() {
            Kind::Zero => Some(n.clone()),
            Kind::Successor(pred) => {
                if pred.is_zero() {
                    // n singleton blocks.
                    let v = n * 2u32 - 1u32;
                    return (&v <= cap).then_some(v);
                }
                let (_, tail) = alpha.split_finite();
                if tail > DEEP_TAIL && cap.bits() < 2048 {
                    // S_{λ+k} ⊇ S_4 for k ≥ 4 and G(n, 4) ≥ G(2048, 2) > 2^2048.
                    return None;
                }
                // First block is the S_pred-maximal interval from n; each
                // further block restarts just past the previous end. Since
                // S_pred ⊇ S_1, ends at least double, so this terminates fast.
                let mut end = self.g(n, &pred, cap)?;
                let mut blocks = BigUint::one();
                while &blocks < n {
                    end = self.g(&(end + 1u32), &pred, cap)?;
                    blocks += 1u32;
                }
                Some(end)
            }
            Kind::Limit => {
                let upper = n.to_u64().unwrap_or(u64::MAX);
                let mut best = n.clone();
                for m in 1..=upper {
                    let v = self.g(n, &self.approx(alpha, m), cap)?;
                    best = best.max(v);
                }
                Some(best)
            }
        }
    }
}

/// A Schreier family `S_alpha` under a fixed approximating-sequence policy.
#[derive(Debug, Clone)]
pub struct SchreierHandle {
    alpha: Ordinal,
    engine: Arc<SchreierEngine>,
}

impl SchreierHandle {
    pub fn new(alpha: Ordinal, policy: FundSeqPolicy) -> Self {
        SchreierHandle { alpha, engine: Arc::new(SchreierEngine::new(policy)) }
    }

    pub fn with_engine(alpha: Ordinal, engine: Arc<SchreierEngine>) -> Self {
        SchreierHandle { alpha, engine }
    }

    /// Handle for another level sharing this handle's memo tables.
    pub fn at(&self, alpha: Ordinal) -> Self {
        SchreierHandle { alpha, engine: Arc::clone(&self.engine) }
    }

    pub fn alpha(&self) -> &Ordinal {
        &self.alpha
    }

    pub fn policy(&self) -> &FundSeqPolicy {
        self.engine.policy()
    }

    pub fn engine(&self) -> &Arc<SchreierEngine> {
        &self.engine
    }

    pub fn member(&self, set: &FinSet) -> bool {
        self.engine.member(&self.alpha, set)
    }

    /// Membership for a raw ascending slice of positive naturals.
    pub fn member_slice(&self, elements: &[u64]) -> bool {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        self.engine.member(&self.alpha, elements)
    }

    pub fn decompose(&self, set: &FinSet) -> Result<DecompWitness> {
        self.engine.decompose(&self.alpha, set)
    }

    /// `G(n, α)`: the largest `m` with `{n, …, m} ∈ S_α`.
    pub fn g_value(&self, n: u64, cap: &BigUint) -> Result<GValue> {
        if n == 0 {
            return Err(Error::Invalid("G is defined for n ≥ 1".into()));
        }
        Ok(match self.engine.g(&BigUint::from(n), &self.alpha, cap) {
            Some(v) => GValue::Value(v),
            None => GValue::Overflow,
        })
    }

    /// Whether no `E ∪ {k}` with `k ≤ max(E) + 1` is still a member.
    pub fn is_maximal(&self, set: &FinSet) -> Result<bool> {
        if !self.member(set) {
            return Err(Error::NotMember { set: set.to_string(), alpha: self.alpha.clone() });
        }
        let top = set.max().unwrap_or(0) + 1;
        Ok((1..=top)
            .filter(|k| !set.contains_elem(*k))
            .all(|k| !self.member(&set.with(k))))
    }
}

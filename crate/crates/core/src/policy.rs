//! Transformations of approximating sequences (shifting and boosting by
//! growth functions) and finite-scale diagnostics: chain inclusion of the
//! approximating families, eventual domination of growth functions, and
//! interval gaps for finite unions of Schreier families.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::{FundSeqPolicy, Ordinal};
use crate::schreier::{FamilyEnumerator, FinSet, GValue, SchreierEngine, SchreierHandle};

/// A non-decreasing function `ℕ → ℕ`, tabulated on `1..=len` and constant
/// afterwards. An empty table is the zero function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct GrowthFn(Vec<u64>);

impl GrowthFn {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::NotMonotone { index: i + 2 });
        }
        Ok(GrowthFn(values))
    }

    pub fn zero() -> Self {
        GrowthFn(Vec::new())
    }

    /// Tabulates `f` on `1..=len`.
    pub fn tabulate(len: u64, f: impl Fn(u64) -> u64) -> Result<Self> {
        Self::new((1..=len).map(f).collect())
    }

    pub fn at(&self, n: u64) -> u64 {
        match self.0.len() {
            0 => 0,
            len => self.0[(n.max(1) as usize).min(len) - 1],
        }
    }

    pub fn len(&self) -> u64 {
        self.0.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }
}

impl TryFrom<Vec<u64>> for GrowthFn {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        GrowthFn::new(v)
    }
}

impl From<GrowthFn> for Vec<u64> {
    fn from(g: GrowthFn) -> Self {
        g.0
    }
}

/// `(β, m) ↦ base(β, m) + g(m)` for every limit `β`.
pub fn shift_policy(base: FundSeqPolicy, g: GrowthFn) -> FundSeqPolicy {
    if g.values().iter().all(|&v| v == 0) {
        return base;
    }
    FundSeqPolicy::Shift { base: Box::new(base), g }
}

/// `(β, m) ↦ base(β, m) + h_β(m)` for the limits `β` in `h_map`.
pub fn boost_policy(base: FundSeqPolicy, h_map: BTreeMap<Ordinal, GrowthFn>) -> Result<FundSeqPolicy> {
    if let Some(bad) = h_map.keys().find(|k| !k.is_limit()) {
        return Err(Error::NotLimit(bad.clone()));
    }
    if h_map.is_empty() {
        return Ok(base);
    }
    Ok(FundSeqPolicy::Boost { base: Box::new(base), h: h_map })
}

/// Checks the approximating-sequence contract (successor terms, strictly
/// increasing, below `beta`) for `1 ≤ m ≤ m_max`.
pub fn validate_policy(policy: &FundSeqPolicy, beta: &Ordinal, m_max: u64) -> Result<()> {
    let mut prev: Option<Ordinal> = None;
    for m in 1..=m_max {
        let t = policy.term(beta, m)?;
        if t.is_limit() || t.is_zero() {
            return Err(Error::BadPolicy(format!("{beta}_{m} = {t} is not a successor")));
        }
        if &t >= beta {
            return Err(Error::BadPolicy(format!("{beta}_{m} = {t} is not below {beta}")));
        }
        if let Some(p) = &prev {
            if p >= &t {
                return Err(Error::BadPolicy(format!("{beta}_{m} = {t} does not exceed {p}")));
            }
        }
        prev = Some(t);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InclusionStep {
    pub m: u64,
    pub from: Ordinal,
    pub to: Ordinal,
    pub holds: bool,
    /// Sets of `S_from` missing from `S_to`, at most ten.
    pub counterexamples: Vec<FinSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub policy: String,
    pub beta: Ordinal,
    pub window: u64,
    pub steps: Vec<InclusionStep>,
}

impl ChainReport {
    pub fn all_hold(&self) -> bool {
        self.steps.iter().all(|s| s.holds)
    }
}

/// For `1 ≤ m < m_max`, whether `S_{β_m} ⊆ S_{β_{m+1}}` inside `{1..window}`.
pub fn check_chain_inclusion(
    policy: &FundSeqPolicy,
    beta: &Ordinal,
    m_max: u64,
    window: u64,
) -> Result<ChainReport> {
    if !beta.is_limit() {
        return Err(Error::NotLimit(beta.clone()));
    }
    let mut en = FamilyEnumerator::new(window, policy.clone())?;
    let mut steps = Vec::new();
    for m in 1..m_max {
        let from = policy.term(beta, m)?;
        let to = policy.term(beta, m + 1)?;
        let a = en.family(&from)?;
        let b = en.family(&to)?;
        let mut missing = a.difference(&b);
        let holds = missing.is_empty();
        missing.truncate(10);
        steps.push(InclusionStep { m, from, to, holds, counterexamples: missing });
    }
    Ok(ChainReport { policy: policy.name(), beta: beta.clone(), window, steps })
}

/// Verdict for one function of a family checked for eventual domination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVerdict {
    /// `h(n) < g(n)` for all `threshold < n ≤ L`, with `threshold` least.
    Bounded { threshold: u64 },
    UnboundedWithinL,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformBoundReport {
    pub length: u64,
    pub verdicts: Vec<BoundVerdict>,
}

impl UniformBoundReport {
    pub fn uniformly_bounded(&self) -> bool {
        self.verdicts.iter().all(|v| matches!(v, BoundVerdict::Bounded { .. }))
    }
}

/// Eventual strict domination of every `h ∈ family` by `g`, read on
/// `1..=L` where `L` is the tabulation length of `g`.
pub fn uniform_bound_check(family: &[GrowthFn], g: &GrowthFn) -> UniformBoundReport {
    let length = g.len();
    let verdicts = family
        .iter()
        .map(|h| {
            let last_fail = (1..=length).rev().find(|&n| h.at(n) >= g.at(n));
            match last_fail {
                Some(n) if n == length => BoundVerdict::UnboundedWithinL,
                Some(n) => BoundVerdict::Bounded { threshold: n },
                None => BoundVerdict::Bounded { threshold: 0 },
            }
        })
        .collect();
    UniformBoundReport { length, verdicts }
}

/// One row of [`interval_gap_scan`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub n: u64,
    /// `max_α G(n, α)` over the list, or `None` on overflow.
    pub max_g: Option<BigUint>,
    /// The level attaining the maximum.
    pub argmax: Option<Ordinal>,
    /// `{n, …, max_g + 1}` lies outside every listed family.
    pub gap_end: Option<BigUint>,
    /// Whether the gap was additionally confirmed by direct membership.
    pub confirmed_by_membership: bool,
}

/// Intervals of this length or shorter are also re-checked by membership.
const GAP_CONFIRM_LIMIT: u64 = 4096;

pub fn interval_gap_scan(
    alphas: &[Ordinal],
    policy: &FundSeqPolicy,
    n_max: u64,
    cap: &BigUint,
) -> Result<Vec<GapRow>> {
    let engine = std::sync::Arc::new(SchreierEngine::new(policy.clone()));
    let handles: Vec<SchreierHandle> = alphas
        .iter()
        .map(|a| SchreierHandle::with_engine(a.clone(), engine.clone()))
        .collect();
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let mut best: Option<(BigUint, Ordinal)> = None;
        let mut overflow = false;
        for h in &handles {
            match h.g_value(n, cap)? {
                GValue::Overflow => overflow = true,
                GValue::Value(v) => {
                    if best.as_ref().is_none_or(|(b, _)| &v > b) {
                        best = Some((v, h.alpha().clone()));
                    }
                }
            }
        }
        let row = match best {
            Some((v, arg)) if !overflow => {
                let end = &v + 1u32;
                let confirmed = match u64::try_from(&end) {
                    Ok(e) if e - n < GAP_CONFIRM_LIMIT => {
                        let gap = FinSet::interval(n, e);
                        handles.iter().all(|h| !h.member(&gap))
                    }
                    _ => false,
                };
                GapRow { n, max_g: Some(v), argmax: Some(arg), gap_end: Some(end), confirmed_by_membership: confirmed }
            }
            _ => GapRow { n, max_g: None, argmax: None, gap_end: None, confirmed_by_membership: false },
        };
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordtree::FEvaluator;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn g(v: &[u64]) -> GrowthFn {
        GrowthFn::new(v.to_vec()).unwrap()
    }

    #[test]
    fn growth_fn_extends_constantly() {
        let f = g(&[1, 2, 5]);
        assert_eq!((f.at(1), f.at(3), f.at(100)), (1, 5, 5));
        assert_eq!(GrowthFn::zero().at(7), 0);
        assert_eq!(GrowthFn::new(vec![3, 2]), Err(Error::NotMonotone { index: 2 }));
        assert!(serde_json::from_str::<GrowthFn>("[2,1]").is_err());
    }

    #[test]
    fn shift_examples() {
        let base = FundSeqPolicy::Default;
        assert_eq!(shift_policy(base.clone(), g(&[0, 0, 0])), base);
        let p = shift_policy(base, GrowthFn::tabulate(10, |m| m).unwrap());
        assert_eq!(p.term(&o("w"), 3).unwrap(), o("6"));
        assert_eq!(p.term(&o("w*2"), 2).unwrap(), o("w+4"));
        for beta in ["w", "w*2", "w^2", "w^2+w*3", "w^3"] {
            validate_policy(&p, &o(beta), 30).unwrap();
        }
    }

    #[test]
    fn zero_shift_is_extensionally_base() {
        let p = FundSeqPolicy::Shift { base: Box::new(FundSeqPolicy::Default), g: GrowthFn::zero() };
        for beta in ["w", "w*5", "w^2", "w^2*2+w", "w^3"] {
            for m in 1..=40 {
                assert_eq!(p.term(&o(beta), m), FundSeqPolicy::Default.term(&o(beta), m));
            }
        }
    }

    #[test]
    fn boost_examples() {
        assert_eq!(boost_policy(FundSeqPolicy::Default, BTreeMap::new()).unwrap(), FundSeqPolicy::Default);
        assert_eq!(
            boost_policy(FundSeqPolicy::Default, BTreeMap::from([(o("w+1"), g(&[1]))])),
            Err(Error::NotLimit(o("w+1")))
        );
        let p = boost_policy(
            FundSeqPolicy::Default,
            BTreeMap::from([(o("w"), GrowthFn::tabulate(20, |m| 2 * m).unwrap())]),
        )
        .unwrap();
        let f = FEvaluator::new(p.clone());
        for n in 1..=20 {
            assert!(f.f_value(n, &o("w")) >= 2 * n);
            assert_eq!(f.f_value(n, &o("w")), 3 * n);
        }
        let p = boost_policy(
            FundSeqPolicy::Default,
            BTreeMap::from([(o("w"), GrowthFn::tabulate(4, |m| m * m).unwrap())]),
        )
        .unwrap();
        assert!(FEvaluator::new(p).f_value(4, &o("w")) >= 16);
    }

    #[test]
    fn chain_inclusion_examples() {
        let p = FundSeqPolicy::Default;
        let r = check_chain_inclusion(&p, &o("w"), 3, 8).unwrap();
        assert_eq!(r.steps.len(), 2);
        assert!(r.all_hold());
        let r = check_chain_inclusion(&p, &o("w^2"), 1, 8).unwrap();
        assert!(r.steps.is_empty() && r.all_hold());
        assert!(check_chain_inclusion(&p, &o("w"), 3, 15).is_err());
    }

    #[test]
    fn uniform_bound_examples() {
        let r = uniform_bound_check(&[g(&[1; 10])], &GrowthFn::tabulate(10, |n| n + 1).unwrap());
        assert_eq!(r.verdicts, vec![BoundVerdict::Bounded { threshold: 0 }]);
        let id = GrowthFn::tabulate(10, |n| n).unwrap();
        let r = uniform_bound_check(std::slice::from_ref(&id), &id);
        assert_eq!(r.verdicts, vec![BoundVerdict::UnboundedWithinL]);
        let r = uniform_bound_check(&[id], &GrowthFn::tabulate(10, |n| n * n).unwrap());
        assert_eq!(r.verdicts, vec![BoundVerdict::Bounded { threshold: 1 }]);
    }

    #[test]
    fn gap_scan_examples() {
        let cap = crate::schreier::default_g_cap();
        let rows = interval_gap_scan(&[o("0")], &FundSeqPolicy::Default, 5, &cap).unwrap();
        assert_eq!(rows[4].gap_end, Some(BigUint::from(6u32)));
        assert!(rows[4].confirmed_by_membership);
        let rows = interval_gap_scan(&[o("1"), o("2")], &FundSeqPolicy::Default, 2, &cap).unwrap();
        assert_eq!(rows[1].max_g, Some(BigUint::from(7u32)));
        assert_eq!(rows[1].gap_end, Some(BigUint::from(8u32)));
        assert_eq!(rows[1].argmax, Some(o("2")));
        let omega = interval_gap_scan(&[o("w")], &FundSeqPolicy::Default, 3, &cap).unwrap();
        let three = interval_gap_scan(&[o("3")], &FundSeqPolicy::Default, 3, &cap).unwrap();
        assert_eq!(omega[2].max_g, three[2].max_g);
        assert!(interval_gap_scan(&[], &FundSeqPolicy::Default, 3, &cap).unwrap().iter().all(|r| r.max_g.is_none()));
    }
}

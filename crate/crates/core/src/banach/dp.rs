//! Maximum of `Σ_{i∈E} w_i` over `E ∈ S_α`, `E ⊆ {1..N}`, for weights
//! `w ≥ 0`, by dynamic programming over intervals.
//!
//! `T_α[i][j]` is the best member inside `{i..j}`. For `S_{γ+1}` a member
//! with minimum `c` is a union of at most `c` blocks sitting in consecutive
//! intervals partitioning `{c..j}`, each block optimal for `T_γ` on its
//! interval. Allowing `c` blocks for any starting point `c` at or below the
//! true minimum never admits a non-member. For a limit `β`,
//! `T_β[i][j] = max_m T_{β_m}[max(i,m)][j]`.

use std::collections::HashMap;
use std::rc::Rc;

use super::vector::Scalar;
use crate::error::{Error, Result};
use crate::ordinal::{FundSeqPolicy, Kind, Ordinal};
use crate::schreier::FinSet;

pub const MAX_DP_WINDOW: usize = 64;

#[derive(Debug, Clone)]
struct Table<T> {
    n: usize,
    cells: Vec<(T, u64)>,
}

impl<T: Scalar> Table<T> {
    fn empty(n: usize) -> Self {
        Table { n, cells: vec![(T::zero(), 0); n * n] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.n + (j - 1)
    }

    fn get(&self, i: usize, j: usize) -> (T, u64) {
        if i > j {
            (T::zero(), 0)
        } else {
            self.cells[self.idx(i, j)].clone()
        }
    }

    fn improve(&mut self, i: usize, j: usize, cand: (T, u64)) {
        let k = self.idx(i, j);
        if cand.0 > self.cells[k].0 {
            self.cells[k] = cand;
        }
    }

    fn same_values(&self, other: &Self) -> bool {
        self.cells.iter().zip(&other.cells).all(|(a, b)| a.0 == b.0)
    }
}

pub struct MaxWeightDp<'a, T> {
    weights: Vec<T>,
    policy: &'a FundSeqPolicy,
    memo: HashMap<Ordinal, Rc<Table<T>>>,
}

impl<'a, T: Scalar> MaxWeightDp<'a, T> {
    /// `weights[i - 1]` is `w_i`; all weights must be non-negative.
    pub fn new(weights: Vec<T>, policy: &'a FundSeqPolicy) -> Result<Self> {
        if weights.len() > MAX_DP_WINDOW {
            return Err(Error::BoundExceeded { what: format!("norm window {}", weights.len()), bound: MAX_DP_WINDOW as u64 });
        }
        debug_assert!(weights.iter().all(|w| *w >= T::zero()));
        Ok(MaxWeightDp { weights, policy, memo: HashMap::new() })
    }

    fn n(&self) -> usize {
        self.weights.len()
    }

    /// Best member of `S_alpha` inside `{1..N}`.
    pub fn best(&mut self, alpha: &Ordinal) -> (T, FinSet) {
        self.best_prefixes(alpha).pop().unwrap_or((T::zero(), FinSet::empty()))
    }

    /// Best member of `S_alpha` inside `{1..k}` for every `k = 1..N`.
    pub fn best_prefixes(&mut self, alpha: &Ordinal) -> Vec<(T, FinSet)> {
        let n = self.n();
        if n == 0 {
            return Vec::new();
        }
        let t = self.table(alpha);
        (1..=n).map(|k| {
            let (v, mask) = t.get(1, k);
            (v, FinSet::from_mask(mask))
        })
        .collect()
    }

    fn table(&mut self, alpha: &Ordinal) -> Rc<Table<T>> {
        if let Some(t) = self.memo.get(alpha) {
            return Rc::clone(t);
        }
        let t = match alpha.classify() {
            Kind::Zero => Rc::new(self.singletons()),
            Kind::Limit => Rc::new(self.limit(alpha)),
            Kind::Successor(_) => {
                // Walk the finite tail upwards; once a step changes nothing
                // every later step is the identity.
                let (head, k) = alpha.split_finite();
                let mut cur = self.table(&head);
                for step in 1..=k {
                    let level = head.add_nat(step);
                    if let Some(hit) = self.memo.get(&level) {
                        cur = Rc::clone(hit);
                        continue;
                    }
                    let next = Rc::new(self.successor(&cur));
                    let stable = next.same_values(&cur);
                    self.memo.insert(level, Rc::clone(&next));
                    cur = next;
                    if stable {
                        break;
                    }
                }
                cur
            }
        };
        self.memo.insert(alpha.clone(), Rc::clone(&t));
        t
    }

    fn singletons(&self) -> Table<T> {
        let n = self.n();
        let mut t = Table::empty(n);
        for i in 1..=n {
            for j in i..=n {
                let prev = t.get(i, j - 1);
                t.cells[(i - 1) * n + (j - 1)] = prev;
                t.improve(i, j, (self.weights[j - 1].clone(), 1 << (j - 1)));
            }
        }
        t
    }

    fn successor(&self, base: &Table<T>) -> Table<T> {
        let n = self.n();
        let mut out = Table::empty(n);
        for c in (1..=n).rev() {
            // cur[j - c]: best union of at most r blocks covering {c..j}.
            let mut cur: Vec<(T, u64)> = (c..=n).map(|j| base.get(c, j)).collect();
            for _ in 2..=c.min(n - c + 1) {
                let mut next = cur.clone();
                for j in c + 1..=n {
                    for t in c..j {
                        let (v, m) = &cur[t - c];
                        let (bv, bm) = base.get(t + 1, j);
                        let cand = v.clone() + bv;
                        if cand > next[j - c].0 {
                            next[j - c] = (cand, m | bm);
                        }
                    }
                }
                let stable = next.iter().zip(&cur).all(|(a, b)| a.0 == b.0);
                cur = next;
                if stable {
                    break;
                }
            }
            for j in c..=n {
                let above = out.get(c + 1, j);
                out.cells[(c - 1) * n + (j - 1)] = above;
                out.improve(c, j, cur[j - c].clone());
            }
        }
        out
    }

    fn limit(&mut self, beta: &Ordinal) -> Table<T> {
        let n = self.n();
        let mut out = Table::empty(n);
        for m in 1..=n {
            let approx = self.policy.term(beta, m as u64).expect("limit ordinal");
            let sub = self.table(&approx);
            for i in 1..=n {
                for j in i.max(m)..=n {
                    out.improve(i, j, sub.get(i.max(m), j));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schreier::{FamilyEnumerator, SchreierHandle};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn brute(weights: &[f64], alpha: &Ordinal, policy: &FundSeqPolicy) -> f64 {
        let mut en = FamilyEnumerator::new(weights.len() as u64, policy.clone()).unwrap();
        let table = en.family(alpha).unwrap();
        table
            .masks()
            .map(|m| (0..weights.len()).filter(|i| m >> i & 1 == 1).map(|i| weights[i]).sum::<f64>())
            .fold(0.0, f64::max)
    }

    #[test]
    fn small_examples() {
        let p = FundSeqPolicy::Default;
        let mut dp = MaxWeightDp::new(vec![1.0, 1.0, 1.0], &p).unwrap();
        let (v, e) = dp.best(&o("1"));
        assert_eq!(v, 2.0);
        assert_eq!(e.as_slice(), &[2, 3]);
        let (v, _) = dp.best(&o("0"));
        assert_eq!(v, 1.0);
        let mut dp = MaxWeightDp::new(vec![1.0; 7], &p).unwrap();
        assert_eq!(dp.best(&o("2")).0, 6.0);
        let mut dp = MaxWeightDp::<f64>::new(vec![], &p).unwrap();
        assert_eq!(dp.best(&o("w")).0, 0.0);
        assert!(MaxWeightDp::new(vec![1.0; 65], &p).is_err());
    }

    #[test]
    fn exact_in_rationals() {
        let p = FundSeqPolicy::Default;
        let w: Vec<BigRational> = (1..=9).map(|i| BigRational::new(i.into(), 7.into())).collect();
        let mut dp = MaxWeightDp::new(w, &p).unwrap();
        let (v, e) = dp.best(&o("1"));
        // {5,…,9} has five elements and minimum five.
        assert_eq!(v, BigRational::new(35.into(), 7.into()));
        assert_eq!(e.as_slice(), &[5, 6, 7, 8, 9]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn matches_enumeration(
            weights in prop::collection::vec(0u32..6, 1..=11),
            alpha in prop::sample::select(vec!["0", "1", "2", "3", "w", "w+1", "w*2", "w^2", "w+40"]),
        ) {
            let p = FundSeqPolicy::Default;
            let w: Vec<f64> = weights.iter().map(|&x| x as f64).collect();
            let alpha = o(alpha);
            let mut dp = MaxWeightDp::new(w.clone(), &p).unwrap();
            let prefixes = dp.best_prefixes(&alpha);
            let h = SchreierHandle::new(alpha.clone(), p.clone());
            for (k, (v, e)) in prefixes.iter().enumerate() {
                prop_assert_eq!(*v, brute(&w[..=k], &alpha, &p));
                prop_assert!(h.member(e));
                prop_assert!(e.max().unwrap_or(0) as usize <= k + 1);
                prop_assert_eq!(e.iter().map(|&i| w[i as usize - 1]).sum::<f64>(), *v);
            }
        }
    }
}

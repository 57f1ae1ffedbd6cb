use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::dp::MaxWeightDp;
use super::norm::{Norm, NormKind, NormSpec};
use super::vector::{Scalar, Vector};
use crate::error::{Error, Result};
use crate::ordinal::{FundSeqPolicy, Ordinal};
use crate::schreier::{FinSet, SchreierEngine, SchreierHandle};

/// Largest number of greedy sets enumerated for one `(x, m)`.
pub const GREEDY_SET_CAP: usize = 10_000;
/// Largest number of coordinate sets visited by an enumeration.
pub const ENUMERATION_CAP: u64 = 10_000_000;

/// The coordinate sets a constant quantifies over.
#[derive(Debug, Clone)]
pub enum Family {
    All,
    Schreier(SchreierHandle),
}

impl Family {
    pub fn admits(&self, set: &[u64]) -> bool {
        match self {
            Family::All => true,
            Family::Schreier(h) => h.member_slice(set),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Family::All => "all".into(),
            Family::Schreier(h) => format!("S_{}", h.alpha()),
        }
    }
}

/// Visits every admissible set with elements from `pool` and at most
/// `max_len` elements. Admissible families are hereditary, so a rejected
/// set prunes all its extensions.
fn for_each_admissible(
    family: &Family,
    pool: &[u64],
    max_len: usize,
    mut visit: impl FnMut(&[u64]),
) -> Result<()> {
    fn walk(
        family: &Family,
        pool: &[u64],
        from: usize,
        max_len: usize,
        cur: &mut Vec<u64>,
        count: &mut u64,
        visit: &mut dyn FnMut(&[u64]),
    ) -> Result<()> {
        *count += 1;
        if *count > ENUMERATION_CAP {
            return Err(Error::BoundExceeded { what: "coordinate-set enumeration".into(), bound: ENUMERATION_CAP });
        }
        visit(cur);
        if cur.len() == max_len {
            return Ok(());
        }
        for k in from..pool.len() {
            cur.push(pool[k]);
            if family.admits(cur) {
                walk(family, pool, k + 1, max_len, cur, count, visit)?;
            }
            cur.pop();
        }
        Ok(())
    }
    let mut count = 0;
    walk(family, pool, 0, max_len, &mut Vec::new(), &mut count, &mut visit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UncondRoute {
    /// Closed-form maximization where one exists, otherwise enumeration.
    Auto,
    /// Every admissible `A` inside the support.
    Enumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncondResult<T> {
    pub constant: T,
    pub witness: FinSet,
    pub norm: T,
    pub route: &'static str,
}

/// `max_{A} ‖x − P_A x‖ / ‖x‖` over admissible `A ⊆ {1..N}`.
pub fn uncond_constant<T: Scalar>(
    x: &Vector<T>,
    family: &Family,
    spec: &NormSpec,
    route: UncondRoute,
) -> Result<UncondResult<T>> {
    let norm = Norm::new(spec)?;
    let nx = norm.eval(x)?;
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let (num, witness, route) = match (route, &spec.kind) {
        (UncondRoute::Auto, NormKind::Summing) => {
            let (num, a) = summing_uncond_max(x, family, spec.window)?;
            (num, a, "prefix_dp")
        }
        // ‖x − P_A x‖ ≤ ‖x‖ coordinatewise, with equality at A = ∅.
        (UncondRoute::Auto, _) => (nx.clone(), FinSet::empty(), "lattice"),
        (UncondRoute::Enumeration, _) => {
            let (num, a) = enumerate_uncond_max(x, family, &norm)?;
            (num, a, "enumeration")
        }
    };
    Ok(UncondResult { constant: num / nx.clone(), witness, norm: nx, route })
}

fn enumerate_uncond_max<T: Scalar>(x: &Vector<T>, family: &Family, norm: &Norm) -> Result<(T, FinSet)> {
    let support = x.support();
    let mut y = x.dense(norm.window());
    let mut best = (T::zero(), Vec::new());
    for_each_admissible(family, &support, support.len(), |a| {
        for &i in a {
            y[i as usize - 1] = T::zero();
        }
        let v = norm.eval_dense(&y);
        if v > best.0 {
            best = (v, a.to_vec());
        }
        for &i in a {
            y[i as usize - 1] = x.get(i);
        }
    })?;
    Ok((best.0, FinSet::new(best.1)?))
}

/// For the summing norm `‖x − P_A x‖ = max_k |s_k − Σ_{i∈A, i≤k} x_i|`, so
/// the maximum over `A` splits over `k` into the largest positive and
/// negative mass an admissible set can collect inside `{1..k}`.
fn summing_uncond_max<T: Scalar>(x: &Vector<T>, family: &Family, window: u64) -> Result<(T, FinSet)> {
    let dense = x.dense(window);
    let pos: Vec<T> = dense.iter().map(|v| if *v > T::zero() { v.clone() } else { T::zero() }).collect();
    let neg: Vec<T> = dense.iter().map(|v| if *v < T::zero() { -v.clone() } else { T::zero() }).collect();
    let (best_pos, best_neg) = match family {
        Family::All => (prefix_all(&pos), prefix_all(&neg)),
        Family::Schreier(h) => {
            let policy: &FundSeqPolicy = h.policy();
            (
                MaxWeightDp::new(pos, policy)?.best_prefixes(h.alpha()),
                MaxWeightDp::new(neg, policy)?.best_prefixes(h.alpha()),
            )
        }
    };
    let mut s = T::zero();
    let mut best = (T::zero(), FinSet::empty());
    for (k, v) in dense.iter().enumerate() {
        s = s + v.clone();
        let (p, pa) = &best_pos[k];
        let (q, qa) = &best_neg[k];
        let drop_pos = (s.clone() - p.clone()).abs();
        let drop_neg = (s.clone() + q.clone()).abs();
        if drop_pos > best.0 && drop_pos >= drop_neg {
            best = (drop_pos, pa.clone());
        } else if drop_neg > best.0 {
            best = (drop_neg, qa.clone());
        }
    }
    Ok(best)
}

fn prefix_all<T: Scalar>(w: &[T]) -> Vec<(T, FinSet)> {
    let mut acc = T::zero();
    let mut set = Vec::new();
    w.iter()
        .enumerate()
        .map(|(i, v)| {
            if *v > T::zero() {
                acc = acc.clone() + v.clone();
                set.push(i as u64 + 1);
            }
            (acc.clone(), FinSet::new(set.clone()).expect("ascending"))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedySets {
    pub sets: Vec<FinSet>,
    /// Set when more than [`GREEDY_SET_CAP`] greedy sets exist.
    pub truncated: bool,
}

/// All `Λ ⊆ {1..window}` with `|Λ| = m` and `min_{Λ}|x_n| ≥ max_{n∉Λ}|x_n|`.
pub fn greedy_sets<T: Scalar>(x: &Vector<T>, m: u64, window: u64) -> Result<GreedySets> {
    x.check_window(window)?;
    if m > window {
        return Ok(GreedySets { sets: Vec::new(), truncated: false });
    }
    let mut order: Vec<(u64, T)> = (1..=window).map(|i| (i, x.get(i).abs())).collect();
    order.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("comparable").then(a.0.cmp(&b.0)));
    if m == 0 {
        return Ok(GreedySets { sets: vec![FinSet::empty()], truncated: false });
    }
    let threshold = order[m as usize - 1].1.clone();
    let above: Vec<u64> = order.iter().filter(|(_, v)| *v > threshold).map(|(i, _)| *i).collect();
    let mut tied: Vec<u64> = order.iter().filter(|(_, v)| *v == threshold).map(|(i, _)| *i).collect();
    tied.sort_unstable();
    let need = m as usize - above.len();
    let mut sets = Vec::new();
    let mut truncated = false;
    let mut pick: Vec<usize> = (0..need).collect();
    loop {
        if sets.len() == GREEDY_SET_CAP {
            truncated = true;
            break;
        }
        let chosen = above.iter().copied().chain(pick.iter().map(|&k| tied[k])).collect();
        sets.push(FinSet::from_unsorted(chosen)?);
        // Next combination in lexicographic order.
        let Some(pos) = (0..need).rev().find(|&p| pick[p] < tied.len() - need + p) else { break };
        pick[pos] += 1;
        for q in pos + 1..need {
            pick[q] = pick[q - 1] + 1;
        }
    }
    Ok(GreedySets { sets, truncated })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyMode {
    /// Coefficients fixed to `a_n = x_n`; the ratio is a lower bound.
    Projection,
    /// Coordinate descent over the coefficients of every candidate `A`.
    Optimize,
}

impl GreedyMode {
    pub fn name(self) -> &'static str {
        match self {
            GreedyMode::Projection => "projection",
            GreedyMode::Optimize => "optimize",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GreedyOptions {
    pub mode: GreedyMode,
    /// Candidate sets satisfy `|A| < m`; otherwise `|A| ≤ m`.
    pub strict: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions { mode: GreedyMode::Projection, strict: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreedyResult {
    /// `f64::INFINITY` when the best approximation is exact.
    pub constant: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub lambda: FinSet,
    pub approximant: FinSet,
    pub mode: GreedyMode,
    pub strict: bool,
    pub truncated: bool,
}

pub const DESCENT_TOLERANCE: f64 = 1e-6;
pub const DESCENT_MAX_SWEEPS: usize = 1000;

/// Worst `‖x − P_Λ x‖` over greedy sets of order `m`, divided by the best
/// approximation of `x` from admissible `A` with `|A| < m`.
pub fn greedy_constant(
    x: &Vector<f64>,
    m: u64,
    family: &Family,
    spec: &NormSpec,
    opts: GreedyOptions,
) -> Result<GreedyResult> {
    let norm = Norm::new(spec)?;
    norm.eval(x)?;
    if x.is_zero() {
        return Err(Error::ZeroVector);
    }
    let greedy = greedy_sets(x, m, spec.window)?;
    if greedy.sets.is_empty() {
        return Err(Error::Invalid(format!("no greedy set of order {m} inside window {}", spec.window)));
    }
    let mut numerator = (f64::NEG_INFINITY, FinSet::empty());
    for lambda in &greedy.sets {
        let v = norm.eval(&x.remove(lambda))?;
        if v > numerator.0 {
            numerator = (v, lambda.clone());
        }
    }

    let max_len = if opts.strict { m.saturating_sub(1) } else { m } as usize;
    let dense = x.dense(spec.window);
    let mut denominator = (f64::INFINITY, FinSet::empty());
    match opts.mode {
        GreedyMode::Projection => {
            let support = x.support();
            let mut y = dense.clone();
            for_each_admissible(family, &support, max_len, |a| {
                for &i in a {
                    y[i as usize - 1] = 0.0;
                }
                let v = norm.eval_dense(&y);
                if v < denominator.0 {
                    denominator = (v, FinSet::new(a.to_vec()).expect("ascending"));
                }
                for &i in a {
                    y[i as usize - 1] = dense[i as usize - 1];
                }
            })?;
        }
        GreedyMode::Optimize => {
            // Enlarging A never hurts the infimum, so maximal candidates suffice.
            let pool: Vec<u64> = (1..=spec.window).collect();
            let mut candidates = Vec::new();
            for_each_admissible(family, &pool, max_len, |a| {
                let full = a.len() == max_len;
                let extendable = !full
                    && (1..=spec.window).any(|k| {
                        !a.contains(&k) && {
                            let mut b = a.to_vec();
                            b.push(k);
                            b.sort_unstable();
                            family.admits(&b)
                        }
                    });
                if !extendable {
                    candidates.push(a.to_vec());
                }
            })?;
            for a in candidates {
                let v = coordinate_descent(&norm, &dense, &a);
                if v < denominator.0 {
                    denominator = (v, FinSet::new(a)?);
                }
            }
        }
    }
    let scale = norm.eval_dense(&dense);
    let constant = if numerator.0 == 0.0 {
        0.0
    } else if denominator.0 <= f64::EPSILON * scale {
        f64::INFINITY
    } else {
        numerator.0 / denominator.0
    };
    Ok(GreedyResult {
        constant,
        numerator: numerator.0,
        denominator: denominator.0,
        lambda: numerator.1,
        approximant: denominator.1,
        mode: opts.mode,
        strict: opts.strict,
        truncated: greedy.truncated,
    })
}

/// Minimizes `‖x − Σ_{n∈A} a_n e_n‖` starting from `a_n = x_n`. Each
/// coordinate step is a golden-section search over `y_n ∈ [−2f, 2f]`,
/// which contains the optimum because `|y_n| ≤ 2‖y‖` for these norms.
fn coordinate_descent(norm: &Norm, x: &[f64], a: &[u64]) -> f64 {
    let mut y = x.to_vec();
    for &i in a {
        y[i as usize - 1] = 0.0;
    }
    let mut f = norm.eval_dense(&y);
    if a.is_empty() {
        return f;
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    for _ in 0..DESCENT_MAX_SWEEPS {
        let before = f;
        for &i in a {
            let i = i as usize - 1;
            let eval = |t: f64, y: &mut Vec<f64>| {
                y[i] = t;
                norm.eval_dense(y)
            };
            let current = y[i];
            let (mut lo, mut hi) = (-2.0 * f, 2.0 * f);
            let mut c = hi - INV_PHI * (hi - lo);
            let mut d = lo + INV_PHI * (hi - lo);
            let (mut fc, mut fd) = (eval(c, &mut y), eval(d, &mut y));
            while hi - lo > 1e-10 * (1.0 + f) {
                if fc <= fd {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - INV_PHI * (hi - lo);
                    fc = eval(c, &mut y);
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + INV_PHI * (hi - lo);
                    fd = eval(d, &mut y);
                }
            }
            let (t, ft) = if fc <= fd { (c, fc) } else { (d, fd) };
            if ft < f {
                y[i] = t;
                f = ft;
            } else {
                y[i] = current;
            }
        }
        if before - f <= DESCENT_TOLERANCE * before {
            break;
        }
    }
    f
}

/// Standard witness vectors on `{1..n}`.
pub fn witness_vectors(n: u64) -> Vec<(&'static str, Vector<f64>)> {
    let sign = |i: u64| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    vec![
        ("alternating", Vector::from_pairs((1..=n).map(|i| (i, sign(i)))).expect("indices ≥ 1")),
        ("ones", Vector::from_pairs((1..=n).map(|i| (i, 1.0))).expect("indices ≥ 1")),
        ("alternating_decay", Vector::from_pairs((1..=n).map(|i| (i, sign(i) / i as f64))).expect("indices ≥ 1")),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub alpha: Ordinal,
    #[serde(rename = "N")]
    pub n: u64,
    pub constant: f64,
    pub mode: String,
    pub witness: String,
}

/// Largest `S_α`-unconditional ratio over [`witness_vectors`] for every
/// `(α, N)`; cells run in parallel and come back in grid order.
pub fn constant_growth_table(
    basis: &NormSpec,
    alphas: &[Ordinal],
    ns: &[u64],
    policy: &FundSeqPolicy,
) -> Result<Vec<GrowthRow>> {
    let engine = Arc::new(SchreierEngine::new(policy.clone()));
    let cells: Vec<(Ordinal, u64)> =
        alphas.iter().flat_map(|a| ns.iter().map(move |&n| (a.clone(), n))).collect();
    cells
        .par_iter()
        .map(|(alpha, n)| {
            let family = Family::Schreier(SchreierHandle::with_engine(alpha.clone(), Arc::clone(&engine)));
            let spec = basis.with_window(*n);
            let mut best: Option<(f64, String, &'static str)> = None;
            for (name, x) in witness_vectors(*n) {
                let r = uncond_constant(&x, &family, &spec, UncondRoute::Auto)?;
                if best.as_ref().is_none_or(|b| r.constant > b.0) {
                    best = Some((r.constant, format!("{name} A={}", r.witness), r.route));
                }
            }
            let (constant, witness, mode) = best.unwrap_or((0.0, String::new(), "none"));
            Ok(GrowthRow { alpha: alpha.clone(), n: *n, constant, mode: mode.into(), witness })
        })
        .collect()
}

pub fn growth_table_csv(rows: &[GrowthRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Invalid(e.to_string());
    w.write_record(["alpha", "N", "constant", "mode", "witness"]).map_err(err)?;
    for r in rows {
        w.write_record([r.alpha.to_string(), r.n.to_string(), r.constant.to_string(), r.mode.clone(), r.witness.clone()])
            .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests;

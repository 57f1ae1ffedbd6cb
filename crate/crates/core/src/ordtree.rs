//! The ordinal graph `G_n` and the function `F(n, α)`.
//!
//! `G_n` has a successor edge `α+1 → α` at every successor vertex and limit
//! edges from every limit `α` to `α_1, …, α_n`. `F(n, α)` is the largest
//! number of successor edges on a path from `α` to 0. [`FEvaluator`]
//! computes it by the recursion `F(n,0)=0`, `F(n,α+1)=F(n,α)+1`,
//! `F(n,λ)=max_{m≤n} F(n,λ_m)`; [`OrdGraph`] materializes the graph and
//! recomputes it as a longest path, which is how the recursion is validated.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write;
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ordinal::{FundSeqPolicy, Kind, Ordinal};

pub const DEFAULT_VERTEX_BOUND: u64 = 100_000;

/// Memoized `F(n, α)` under one policy. Safe to share between threads.
#[derive(Debug, Default)]
pub struct FEvaluator {
    policy: FundSeqPolicy,
    memo: RwLock<HashMap<(u64, Ordinal), u64>>,
}

impl FEvaluator {
    pub fn new(policy: FundSeqPolicy) -> Self {
        FEvaluator { policy, memo: RwLock::default() }
    }

    pub fn policy(&self) -> &FundSeqPolicy {
        &self.policy
    }

    /// `F(n, α)` for `n ≥ 1`.
    pub fn f_value(&self, n: u64, alpha: &Ordinal) -> u64 {
        assert!(n >= 1, "F(n, α) is defined for n ≥ 1");
        // Successor clause applied k times at once.
        let (head, k) = alpha.split_finite();
        if head.is_zero() {
            return k;
        }
        let key = (n, head);
        if let Some(&v) = self.memo.read().unwrap().get(&key) {
            return v.saturating_add(k);
        }
        let v = (1..=n)
            .map(|m| self.f_value(n, &self.approx(&key.1, m)))
            .max()
            .unwrap_or(0);
        self.memo.write().unwrap().insert(key, v);
        v.saturating_add(k)
    }

    fn approx(&self, beta: &Ordinal, m: u64) -> Ordinal {
        self.policy.term(beta, m).expect("limit ordinal")
    }

    /// A path from `alpha` to 0 in `G_n` with `F(n, α)` successor edges.
    /// Ties between limit edges go to the smallest index.
    pub fn f_witness(&self, n: u64, alpha: &Ordinal) -> FPath {
        let mut vertices = vec![alpha.clone()];
        let mut successor_edges = 0;
        let mut cur = alpha.clone();
        loop {
            cur = match cur.classify() {
                Kind::Zero => break,
                Kind::Successor(pred) => {
                    successor_edges += 1;
                    pred
                }
                Kind::Limit => {
                    let target = self.f_value(n, &cur);
                    (1..=n)
                        .map(|m| self.approx(&cur, m))
                        .find(|t| self.f_value(n, t) == target)
                        .expect("the maximum is attained")
                }
            };
            vertices.push(cur.clone());
        }
        FPath { vertices, successor_edges }
    }

    /// Least `N ≤ scan_limit` with `F(n,α) < F(n,β)` for all `N < n ≤ scan_limit`.
    /// `None` when even `n = scan_limit` fails.
    pub fn find_separation(&self, alpha: &Ordinal, beta: &Ordinal, scan_limit: u64) -> Result<Option<u64>> {
        if alpha >= beta {
            return Err(Error::NotIncreasing { lower: alpha.clone(), upper: beta.clone() });
        }
        let last_fail = (1..=scan_limit)
            .rev()
            .find(|&n| self.f_value(n, alpha) >= self.f_value(n, beta));
        Ok(match last_fail {
            Some(n) if n == scan_limit => None,
            Some(n) => Some(n),
            None => Some(0),
        })
    }
}

pub fn f_value(n: u64, alpha: &Ordinal, policy: &FundSeqPolicy) -> u64 {
    FEvaluator::new(policy.clone()).f_value(n, alpha)
}

pub fn f_witness(n: u64, alpha: &Ordinal, policy: &FundSeqPolicy) -> FPath {
    FEvaluator::new(policy.clone()).f_witness(n, alpha)
}

pub fn find_separation(
    alpha: &Ordinal,
    beta: &Ordinal,
    policy: &FundSeqPolicy,
    scan_limit: u64,
) -> Result<Option<u64>> {
    FEvaluator::new(policy.clone()).find_separation(alpha, beta, scan_limit)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FPath {
    pub vertices: Vec<Ordinal>,
    pub successor_edges: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Successor,
    Limit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: Ordinal,
    pub to: Ordinal,
    pub kind: EdgeKind,
}

/// The subgraph of `G_n` reachable from `root`.
#[derive(Debug, Clone, Serialize)]
pub struct OrdGraph {
    pub n: u64,
    pub root: Ordinal,
    pub vertices: BTreeSet<Ordinal>,
    pub edges: Vec<Edge>,
}

impl OrdGraph {
    pub fn out_edges(&self) -> BTreeMap<&Ordinal, Vec<&Edge>> {
        let mut out: BTreeMap<&Ordinal, Vec<&Edge>> = self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for e in &self.edges {
            out.get_mut(&e.from).unwrap().push(e);
        }
        out
    }

    /// Longest path to 0 counted in successor edges, for every vertex.
    /// Edges point to smaller ordinals, so ascending order is topological.
    pub fn successor_path_lengths(&self) -> BTreeMap<Ordinal, u64> {
        let out = self.out_edges();
        let mut best: BTreeMap<Ordinal, u64> = BTreeMap::new();
        for v in &self.vertices {
            let value = out[v]
                .iter()
                .filter_map(|e| best.get(&e.to).map(|b| b + u64::from(e.kind == EdgeKind::Successor)))
                .max()
                .unwrap_or(0);
            best.insert(v.clone(), value);
        }
        best
    }

    pub fn max_successor_path(&self) -> u64 {
        self.successor_path_lengths()[&self.root]
    }
}

pub fn build_graph(n: u64, root: &Ordinal, policy: &FundSeqPolicy) -> Result<OrdGraph> {
    build_graph_bounded(n, root, policy, DEFAULT_VERTEX_BOUND)
}

pub fn build_graph_bounded(n: u64, root: &Ordinal, policy: &FundSeqPolicy, bound: u64) -> Result<OrdGraph> {
    let mut vertices = BTreeSet::from([root.clone()]);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([root.clone()]);
    while let Some(v) = queue.pop_front() {
        let targets: Vec<(Ordinal, EdgeKind)> = match v.classify() {
            Kind::Zero => Vec::new(),
            Kind::Successor(pred) => vec![(pred, EdgeKind::Successor)],
            Kind::Limit => (1..=n)
                .map(|m| policy.term(&v, m).map(|t| (t, EdgeKind::Limit)))
                .collect::<Result<_>>()?,
        };
        for (to, kind) in targets {
            if vertices.insert(to.clone()) {
                if vertices.len() as u64 > bound {
                    return Err(Error::BoundExceeded { what: format!("graph G_{n} from {root}"), bound });
                }
                queue.push_back(to.clone());
            }
            edges.push(Edge { from: v.clone(), to, kind });
        }
    }
    Ok(OrdGraph { n, root: root.clone(), vertices, edges })
}

/// DOT rendering: solid successor edges, dashed limit edges.
pub fn export_dot(g: &OrdGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph G_{} {{", g.n);
    let _ = writeln!(out, "  rankdir=TB;");
    for v in g.vertices.iter().rev() {
        let _ = writeln!(out, "  \"{v}\" [label=\"{v}\"];");
    }
    for e in &g.edges {
        let style = match e.kind {
            EdgeKind::Successor => "solid",
            EdgeKind::Limit => "dashed",
        };
        let _ = writeln!(out, "  \"{}\" -> \"{}\" [style={style}];", e.from, e.to);
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FRow {
    pub alpha: Ordinal,
    pub n: u64,
    #[serde(rename = "F")]
    pub f: u64,
}

/// `F` over a grid, ordinal-major.
pub fn f_table(eval: &FEvaluator, alphas: &[Ordinal], ns: impl IntoIterator<Item = u64> + Clone) -> Vec<FRow> {
    alphas
        .iter()
        .flat_map(|a| {
            ns.clone()
                .into_iter()
                .map(move |n| FRow { alpha: a.clone(), n, f: eval.f_value(n, a) })
        })
        .collect()
}

pub fn f_table_csv(rows: &[FRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["alpha", "n", "F"]).map_err(|e| Error::Invalid(e.to_string()))?;
    for r in rows {
        w.write_record([r.alpha.to_string(), r.n.to_string(), r.f.to_string()])
            .map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

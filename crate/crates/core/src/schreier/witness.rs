use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::FinSet;
use crate::ordinal::{FundSeqPolicy, Kind, Ordinal};

/// Membership certificate produced by [`super::SchreierHandle::decompose`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecompWitness {
    /// `∅` or a singleton, which lie in every family.
    Leaf { alpha: Ordinal, set: FinSet },
    /// `set = blocks[0] ∪ … ∪ blocks[k-1]` with `k ≤ min(set)`, each block
    /// certified at the predecessor of `alpha`.
    Successor {
        alpha: Ordinal,
        set: FinSet,
        blocks: Vec<DecompWitness>,
    },
    /// `m ≤ min(set)` and `set ∈ S_approx` with `approx = alpha_m`.
    Limit {
        alpha: Ordinal,
        set: FinSet,
        m: u64,
        approx: Ordinal,
        inner: Box<DecompWitness>,
    },
}

impl DecompWitness {
    pub fn alpha(&self) -> &Ordinal {
        match self {
            DecompWitness::Leaf { alpha, .. }
            | DecompWitness::Successor { alpha, .. }
            | DecompWitness::Limit { alpha, .. } => alpha,
        }
    }

    pub fn set(&self) -> &FinSet {
        match self {
            DecompWitness::Leaf { set, .. }
            | DecompWitness::Successor { set, .. }
            | DecompWitness::Limit { set, .. } => set,
        }
    }

    /// Re-proves membership bottom-up without consulting any membership
    /// routine. Returns a description of the first broken step.
    pub fn verify(&self, policy: &FundSeqPolicy) -> Result<(), String> {
        match self {
            DecompWitness::Leaf { set, .. } => {
                if set.len() > 1 {
                    return Err(format!("leaf {set} has more than one element"));
                }
            }
            DecompWitness::Successor { alpha, set, blocks } => {
                let Kind::Successor(pred) = alpha.classify() else {
                    return Err(format!("successor node at non-successor {alpha}"));
                };
                let first_min = blocks
                    .first()
                    .and_then(|b| b.set().min())
                    .ok_or_else(|| format!("successor node for {set} has no nonempty first block"))?;
                if blocks.len() as u64 > first_min {
                    return Err(format!("{} blocks exceed min {first_min}", blocks.len()));
                }
                let mut union = Vec::new();
                for b in blocks {
                    if b.set().is_empty() {
                        return Err("empty block".into());
                    }
                    if let (Some(&prev), Some(next)) = (union.last(), b.set().min()) {
                        if prev >= next {
                            return Err(format!("blocks not increasing at {}", b.set()));
                        }
                    }
                    if *b.alpha() != pred {
                        return Err(format!("block certified at {} instead of {pred}", b.alpha()));
                    }
                    b.verify(policy)?;
                    union.extend_from_slice(b.set());
                }
                if union != set.as_slice() {
                    return Err(format!("blocks do not reassemble {set}"));
                }
            }
            DecompWitness::Limit { alpha, set, m, approx, inner } => {
                let expected = policy.term(alpha, *m).map_err(|e| e.to_string())?;
                if expected != *approx {
                    return Err(format!("approximating term {m} of {alpha} is {expected}, not {approx}"));
                }
                if let Some(min) = set.min() {
                    if *m > min {
                        return Err(format!("index {m} exceeds min {min}"));
                    }
                }
                if inner.set() != set || inner.alpha() != approx {
                    return Err("limit descent changes the set or level".into());
                }
                inner.verify(policy)?;
            }
        }
        Ok(())
    }

    /// Indented text rendering, one node per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        match self {
            DecompWitness::Leaf { alpha, set } => {
                let _ = writeln!(out, "{pad}leaf S_{alpha} {set}");
            }
            DecompWitness::Successor { alpha, set, blocks } => {
                let _ = writeln!(out, "{pad}successor S_{alpha} {set} ({} blocks)", blocks.len());
                for b in blocks {
                    b.write_text(out, depth + 1);
                }
            }
            DecompWitness::Limit { alpha, set, m, approx, inner } => {
                let _ = writeln!(out, "{pad}limit S_{alpha} {set} via m={m} -> S_{approx}");
                inner.write_text(out, depth + 1);
            }
        }
    }
}

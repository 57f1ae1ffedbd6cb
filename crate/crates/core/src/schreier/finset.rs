use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite, strictly increasing set of positive naturals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FinSet(Vec<u64>);

impl FinSet {
    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    pub fn new(elements: Vec<u64>) -> Result<Self> {
        if elements.first() == Some(&0) {
            return Err(Error::Invalid("set elements must be at least 1".into()));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("set elements must be strictly increasing".into()));
        }
        Ok(FinSet(elements))
    }

    /// Sorts and dedups arbitrary elements.
    pub fn from_unsorted(mut elements: Vec<u64>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        Self::new(elements)
    }

    /// `{lo, lo+1, …, hi}`; empty when `hi < lo`.
    pub fn interval(lo: u64, hi: u64) -> Self {
        assert!(lo >= 1, "intervals start at 1 or later");
        FinSet((lo..=hi).collect())
    }

    /// Decodes a bitmask where bit `i` stands for the element `i + 1`.
    pub fn from_mask(mask: u64) -> Self {
        FinSet((0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect())
    }

    /// Bitmask encoding, if every element is at most 64.
    pub fn to_mask(&self) -> Option<u64> {
        self.0
            .iter()
            .try_fold(0u64, |acc, &e| (e <= 64).then(|| acc | 1 << (e - 1)))
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn min(&self) -> Option<u64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn contains_elem(&self, e: u64) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn with(&self, e: u64) -> FinSet {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&e) {
            v.insert(pos, e);
        }
        FinSet(v)
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.0.iter().all(|e| other.contains_elem(*e))
    }
}

impl Deref for FinSet {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl TryFrom<Vec<u64>> for FinSet {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        FinSet::new(v)
    }
}

impl From<FinSet> for Vec<u64> {
    fn from(s: FinSet) -> Self {
        s.0
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// Parses `{2,5,6}`, `{}` or interval shorthand such as `{4..9}`; items may
/// mix, e.g. `{1,4..6}`, but must be strictly ascending overall.
pub fn parse_finset(text: &str) -> Result<FinSet> {
    let syntax = |position: usize, message: &str| Error::Syntax { position, message: message.into() };
    let inner = text
        .strip_prefix('{')
        .ok_or_else(|| syntax(0, "expected '{'"))?
        .strip_suffix('}')
        .ok_or_else(|| syntax(text.len(), "expected '}'"))?;
    let mut out = Vec::new();
    if inner.is_empty() {
        return Ok(FinSet::empty());
    }
    let mut offset = 1;
    for item in inner.split(',') {
        let nat = |s: &str, at: usize| -> Result<u64> {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
                return Err(syntax(at, "expected a natural number"));
            }
            s.parse().map_err(|_| syntax(at, "natural number out of range"))
        };
        match item.split_once("..") {
            Some((lo, hi)) => {
                let (lo, hi) = (nat(lo, offset)?, nat(hi, offset + lo.len() + 2)?);
                if lo > hi {
                    return Err(syntax(offset, "empty interval"));
                }
                if hi - lo > 1 << 24 {
                    return Err(syntax(offset, "interval too long"));
                }
                out.extend(lo..=hi);
            }
            None => out.push(nat(item, offset)?),
        }
        offset += item.len() + 1;
    }
    FinSet::new(out).map_err(|e| match e {
        Error::Invalid(m) => Error::Syntax { position: 0, message: m },
        other => other,
    })
}

impl FromStr for FinSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_finset(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_finset("{}").unwrap(), FinSet::empty());
        assert_eq!(parse_finset("{2,5,6}").unwrap().as_slice(), &[2, 5, 6]);
        assert_eq!(parse_finset("{4..9}").unwrap(), FinSet::interval(4, 9));
        assert_eq!(parse_finset("{1,4..6,9}").unwrap().as_slice(), &[1, 4, 5, 6, 9]);
        assert_eq!(parse_finset("{2,5,6}").unwrap().to_string(), "{2,5,6}");
    }

    #[test]
    fn malformed_literals() {
        for bad in ["", "2,3", "{2,3", "{3,2}", "{0}", "{2,,3}", "{a}", "{5..3}", "{ 2}", "{02}"] {
            assert!(parse_finset(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn masks() {
        let s = FinSet::new(vec![1, 3, 64]).unwrap();
        assert_eq!(FinSet::from_mask(s.to_mask().unwrap()), s);
        assert_eq!(FinSet::new(vec![65]).unwrap().to_mask(), None);
    }
}

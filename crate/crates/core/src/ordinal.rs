//! Ordinals below ω^ω in Cantor normal form, and the approximating
//! sequences attached to limit ordinals.
//!
//! An [`Ordinal`] is stored as a list of `(exponent, coefficient)` terms with
//! strictly decreasing exponents, so structural equality is ordinal
//! equality. Literals use `w` for ω: `w^2*3+w+5`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::policy::GrowthFn;

/// One Cantor-normal-form term `ω^exp · coeff`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term {
    pub exp: u32,
    pub coeff: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

/// Which branch of the transfinite recursion an ordinal falls into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kind {
    Zero,
    Successor(Ordinal),
    Limit,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn nat(k: u64) -> Self {
        Self::monomial(0, k)
    }

    pub fn omega() -> Self {
        Self::monomial(1, 1)
    }

    /// `ω^exp · coeff`; a zero coefficient yields 0.
    pub fn monomial(exp: u32, coeff: u64) -> Self {
        if coeff == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![Term { exp, coeff }] }
        }
    }

    /// Builds an ordinal from terms that must already be in canonical form.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self> {
        for (i, t) in terms.iter().enumerate() {
            if t.coeff == 0 {
                return Err(Error::Invalid(format!("term {i} has a zero coefficient")));
            }
            if i > 0 && terms[i - 1].exp <= t.exp {
                return Err(Error::Invalid("exponents must strictly decrease".into()));
            }
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exp == 0)
    }

    /// The value as a natural number, if finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [Term { exp: 0, coeff }] => Some(*coeff),
            _ => None,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.terms.last(), Some(t) if t.exp > 0)
    }

    pub fn classify(&self) -> Kind {
        match self.terms.last() {
            None => Kind::Zero,
            Some(t) if t.exp == 0 => {
                let mut pred = self.clone();
                let last = pred.terms.last_mut().unwrap();
                if last.coeff == 1 {
                    pred.terms.pop();
                } else {
                    last.coeff -= 1;
                }
                Kind::Successor(pred)
            }
            Some(_) => Kind::Limit,
        }
    }

    /// Splits `self = λ + k` with `λ` zero or a limit and `k` finite.
    pub fn split_finite(&self) -> (Ordinal, u64) {
        match self.terms.last() {
            Some(t) if t.exp == 0 => {
                let mut head = self.clone();
                let k = head.terms.pop().unwrap().coeff;
                (head, k)
            }
            _ => (self.clone(), 0),
        }
    }

    /// `self + k` for a natural `k`.
    pub fn add_nat(&self, k: u64) -> Ordinal {
        self + &Ordinal::nat(k)
    }

    /// Ordinal (left-absorbing) addition.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(lead) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exp >= lead.exp)
            .copied()
            .collect();
        let mut rest = other.terms.iter();
        match terms.last_mut() {
            Some(t) if t.exp == lead.exp => {
                t.coeff = t
                    .coeff
                    .checked_add(lead.coeff)
                    .expect("ordinal coefficient overflow");
                rest.next();
            }
            _ => {}
        }
        terms.extend(rest.copied());
        Ordinal { terms }
    }
}

impl Add for &Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: &Ordinal) -> Ordinal {
        Ordinal::add(self, rhs)
    }
}

impl Add for Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: Ordinal) -> Ordinal {
        Ordinal::add(&self, &rhs)
    }
}

impl From<u64> for Ordinal {
    fn from(k: u64) -> Self {
        Ordinal::nat(k)
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a.exp.cmp(&b.exp).then(a.coeff.cmp(&b.coeff));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match (t.exp, t.coeff) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

pub fn format_ordinal(a: &Ordinal) -> String {
    a.to_string()
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.pos, message: message.into() }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64> {
        let start = self.pos;
        match self.peek() {
            Some(b'1'..=b'9') => {}
            Some(b'0') => return Err(self.err("natural numbers may not start with 0")),
            _ => return Err(self.err("expected a natural number")),
        }
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse().map_err(|_| Error::Syntax {
            position: start,
            message: "natural number out of range".into(),
        })
    }

    fn term(&mut self) -> Result<Ordinal> {
        if self.eat(b'w') {
            let exp = if self.eat(b'^') {
                u32::try_from(self.nat()?).map_err(|_| self.err("exponent out of range"))?
            } else {
                1
            };
            let coeff = if self.eat(b'*') { self.nat()? } else { 1 };
            Ok(Ordinal::monomial(exp, coeff))
        } else {
            Ok(Ordinal::nat(self.nat()?))
        }
    }
}

/// Parses an ordinal literal. Terms are combined with ordinal addition in
/// the order written, so `w+w` is `w*2` and `3+w` is `w`.
pub fn parse_ordinal(text: &str) -> Result<Ordinal> {
    let mut cur = Cursor { bytes: text.as_bytes(), pos: 0 };
    if text == "0" {
        return Ok(Ordinal::zero());
    }
    if text.is_empty() {
        return Err(cur.err("empty literal"));
    }
    let mut acc = cur.term()?;
    while cur.pos < text.len() {
        if !cur.eat(b'+') {
            return Err(cur.err(format!("unexpected character {:?}", cur.peek().unwrap() as char)));
        }
        acc = &acc + &cur.term()?;
    }
    Ok(acc)
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_ordinal(s)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_ordinal(&text).map_err(serde::de::Error::custom)
    }
}

/// Assignment of an approximating sequence `(β_m)` to every limit ordinal `β`.
///
/// `Default` recurses into the last CNF term and adds 1 whenever the natural
/// fundamental-sequence term is itself a limit, so every `β_m` is a
/// successor. `Shift` and `Boost` add a growth function to the terms of a
/// base policy, either everywhere or only at selected limits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FundSeqPolicy {
    #[default]
    Default,
    Shift {
        base: Box<FundSeqPolicy>,
        g: GrowthFn,
    },
    Boost {
        base: Box<FundSeqPolicy>,
        h: BTreeMap<Ordinal, GrowthFn>,
    },
}

impl FundSeqPolicy {
    pub fn name(&self) -> String {
        match self {
            FundSeqPolicy::Default => "default".into(),
            FundSeqPolicy::Shift { base, .. } => format!("shift({})", base.name()),
            FundSeqPolicy::Boost { base, h } => {
                let keys: Vec<String> = h.keys().map(Ordinal::to_string).collect();
                format!("boost({};{})", base.name(), keys.join(","))
            }
        }
    }

    /// The `m`-th term (`m ≥ 1`) of the approximating sequence of `beta`.
    pub fn term(&self, beta: &Ordinal, m: u64) -> Result<Ordinal> {
        if !beta.is_limit() {
            return Err(Error::NotLimit(beta.clone()));
        }
        if m == 0 {
            return Err(Error::Invalid("approximating index starts at 1".into()));
        }
        Ok(match self {
            FundSeqPolicy::Default => default_term(beta, m),
            FundSeqPolicy::Shift { base, g } => base.term(beta, m)?.add_nat(g.at(m)),
            FundSeqPolicy::Boost { base, h } => {
                let t = base.term(beta, m)?;
                match h.get(beta) {
                    Some(g) => t.add_nat(g.at(m)),
                    None => t,
                }
            }
        })
    }
}

fn default_term(beta: &Ordinal, m: u64) -> Ordinal {
    let mut terms = beta.terms.clone();
    let last = terms.pop().expect("limit ordinals are nonzero");
    if last.coeff > 1 {
        terms.push(Term { exp: last.exp, coeff: last.coeff - 1 });
    }
    let head = Ordinal { terms };
    let tail = Ordinal::monomial(last.exp - 1, m);
    let natural = &head + &tail;
    if natural.is_limit() {
        natural.add_nat(1)
    } else {
        natural
    }
}

/// `β_m` under `policy`; fails unless `beta` is a limit ordinal.
pub fn fund_seq(policy: &FundSeqPolicy, beta: &Ordinal, m: u64) -> Result<Ordinal> {
    policy.term(beta, m)
}

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::schreier::FinSet;

/// Scalars the norms and constants are generic over: `f64` for the fast
/// path and `BigRational` for exact cross-checks.
pub trait Scalar: Clone + PartialOrd + Signed + fmt::Debug + Send + Sync + 'static {
    fn to_f64(&self) -> f64;
    fn from_f64(v: f64) -> Option<Self>;
    fn from_i64(v: i64) -> Self;
}

impl Scalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }
}

impl Scalar for BigRational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

pub(crate) fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// A finitely supported sequence `Σ x_i e_i`, `i ≥ 1`. Only nonzero
/// coefficients are stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Vector<T = f64> {
    coeffs: BTreeMap<u64, T>,
}

impl<T: Scalar> Vector<T> {
    pub fn new() -> Self {
        Vector { coeffs: BTreeMap::new() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, T)>) -> Result<Self> {
        let mut v = Self::new();
        for (i, x) in pairs {
            if i == 0 {
                return Err(Error::Invalid("vector indices start at 1".into()));
            }
            v.set(i, x);
        }
        Ok(v)
    }

    /// `x_1, x_2, …` from a dense slice.
    pub fn from_dense(values: &[T]) -> Self {
        let mut v = Self::new();
        for (i, x) in values.iter().enumerate() {
            v.set(i as u64 + 1, x.clone());
        }
        v
    }

    pub fn unit(i: u64) -> Self {
        Self::from_pairs([(i, T::one())]).expect("index at least 1")
    }

    pub fn set(&mut self, i: u64, x: T) {
        if x.is_zero() {
            self.coeffs.remove(&i);
        } else {
            self.coeffs.insert(i, x);
        }
    }

    pub fn get(&self, i: u64) -> T {
        self.coeffs.get(&i).cloned().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &T)> {
        self.coeffs.iter().map(|(i, x)| (*i, x))
    }

    pub fn support(&self) -> FinSet {
        FinSet::new(self.coeffs.keys().copied().collect()).expect("keys are sorted and positive")
    }

    pub fn max_index(&self) -> Option<u64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `P_A x`.
    pub fn project(&self, a: &FinSet) -> Self {
        Vector { coeffs: self.coeffs.iter().filter(|(i, _)| a.contains_elem(**i)).map(|(i, x)| (*i, x.clone())).collect() }
    }

    /// `x − P_A x`.
    pub fn remove(&self, a: &FinSet) -> Self {
        Vector { coeffs: self.coeffs.iter().filter(|(i, _)| !a.contains_elem(**i)).map(|(i, x)| (*i, x.clone())).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, x) in other.iter() {
            out.set(i, out.get(i) + x.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::new();
        for (i, x) in self.iter() {
            out.set(i, x.clone() * c.clone());
        }
        out
    }

    /// Coefficients `x_1..x_window` as a dense vector, index 0 holding `x_1`.
    pub fn dense(&self, window: u64) -> Vec<T> {
        (1..=window).map(|i| self.get(i)).collect()
    }

    pub fn check_window(&self, window: u64) -> Result<()> {
        match self.max_index() {
            Some(i) if i > window => Err(Error::OutsideWindow { index: i, window }),
            _ => Ok(()),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Vector<U> {
        let mut out = Vector::new();
        for (i, x) in self.iter() {
            out.set(i, f(x));
        }
        out
    }

    pub fn to_f64(&self) -> Vector<f64> {
        self.map(|x| x.to_f64())
    }
}

impl Vector<f64> {
    /// Exact rational image of a float vector.
    pub fn to_rational(&self) -> Vector<BigRational> {
        self.map(|x| BigRational::from_float(*x).expect("stored coefficients are finite"))
    }
}

impl Serialize for Vector<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.serialize(s)
    }
}

impl fmt::Display for Vector<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

/// Parses a vector literal `{"1": 0.5, "4": -2}`.
pub fn parse_vector(text: &str) -> Result<Vector<f64>> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        position: e.column().saturating_sub(1),
        message: e.to_string(),
    })?;
    vector_from_json(&value)
}

pub fn vector_from_json(value: &serde_json::Value) -> Result<Vector<f64>> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Invalid("vector literal must be a JSON object {index: value}".into()))?;
    let mut pairs = Vec::with_capacity(obj.len());
    for (k, v) in obj {
        let i: u64 = k
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("vector index {k:?} is not a natural number")))?;
        let x = v
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Invalid(format!("coefficient at {k} is not a finite number")))?;
        pairs.push((i, x));
    }
    Vector::from_pairs(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_round_trip() {
        let v = parse_vector(r#"{"1": 0.5, "4": -2, "7": 0}"#).unwrap();
        assert_eq!(v.get(1), 0.5);
        assert_eq!(v.get(4), -2.0);
        assert_eq!(v.get(7), 0.0);
        assert_eq!(v.support().as_slice(), &[1, 4]);
        assert_eq!(v.to_string(), r#"{"1":0.5,"4":-2.0}"#);
        assert_eq!(parse_vector(&v.to_string()).unwrap(), v);
        assert!(parse_vector(r#"{"0": 1}"#).is_err());
        assert!(parse_vector(r#"{"a": 1}"#).is_err());
        assert!(parse_vector("[1,2]").is_err());
        assert!(matches!(parse_vector("{"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn projections() {
        let x = Vector::from_dense(&[1.0, -2.0, 3.0, 0.0, 5.0]);
        let a = FinSet::new(vec![2, 4, 5]).unwrap();
        assert_eq!(x.project(&a), Vector::from_pairs([(2, -2.0), (5, 5.0)]).unwrap());
        assert_eq!(x.remove(&a).add(&x.project(&a)), x);
        assert_eq!(x.project(&a).project(&a), x.project(&a));
        assert!(x.check_window(5).is_ok());
        assert_eq!(x.check_window(4), Err(Error::OutsideWindow { index: 5, window: 4 }));
    }
}

use serde::Serialize;

use super::dp::{MaxWeightDp, MAX_DP_WINDOW};
use super::vector::{max_of, Scalar, Vector};
use crate::error::{Error, Result};
use crate::ordinal::{FundSeqPolicy, Ordinal};
use crate::schreier::{FamilyEnumerator, DEFAULT_ENUMERATION_BOUND};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormKind {
    /// `‖x‖ = max_{E ∈ S_α} Σ_{i∈E} |x_i|`.
    Schreier { alpha: Ordinal, policy: FundSeqPolicy },
    /// `‖x‖ = max_k |Σ_{i≤k} x_i|`.
    Summing,
    Sup,
}

/// A norm on sequences supported in `{1..window}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormSpec {
    #[serde(flatten)]
    pub kind: NormKind,
    pub window: u64,
}

impl NormSpec {
    pub fn schreier(alpha: Ordinal, policy: FundSeqPolicy, window: u64) -> Self {
        NormSpec { kind: NormKind::Schreier { alpha, policy }, window }
    }

    pub fn summing(window: u64) -> Self {
        NormSpec { kind: NormKind::Summing, window }
    }

    pub fn sup(window: u64) -> Self {
        NormSpec { kind: NormKind::Sup, window }
    }

    pub fn with_window(&self, window: u64) -> Self {
        NormSpec { kind: self.kind.clone(), window }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            NormKind::Schreier { alpha, .. } => format!("schreier({alpha})"),
            NormKind::Summing => "summing".into(),
            NormKind::Sup => "sup".into(),
        }
    }

    /// Whether `|x_i| ≤ |y_i|` for all `i` implies `‖x‖ ≤ ‖y‖`.
    pub fn is_lattice(&self) -> bool {
        !matches!(self.kind, NormKind::Summing)
    }
}

/// A [`NormSpec`] prepared for repeated evaluation. For small Schreier
/// windows the window-maximal members are listed once up front.
#[derive(Debug, Clone)]
pub struct Norm {
    spec: NormSpec,
    maximal_masks: Option<Vec<u64>>,
}

impl Norm {
    pub fn new(spec: &NormSpec) -> Result<Self> {
        if matches!(spec.kind, NormKind::Schreier { .. }) && spec.window > MAX_DP_WINDOW as u64 {
            return Err(Error::BoundExceeded { what: format!("Schreier norm window {}", spec.window), bound: MAX_DP_WINDOW as u64 });
        }
        let maximal_masks = match &spec.kind {
            NormKind::Schreier { alpha, policy } if spec.window <= DEFAULT_ENUMERATION_BOUND => {
                let mut en = FamilyEnumerator::new(spec.window, policy.clone())?;
                let table = en.family(alpha)?;
                Some(table.maximal_members().iter().map(|s| s.to_mask().expect("small window")).collect())
            }
            _ => None,
        };
        Ok(Norm { spec: spec.clone(), maximal_masks })
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    pub fn window(&self) -> u64 {
        self.spec.window
    }

    pub fn eval<T: Scalar>(&self, x: &Vector<T>) -> Result<T> {
        x.check_window(self.spec.window)?;
        Ok(self.eval_dense(&x.dense(self.spec.window)))
    }

    /// Norm of `x_1..x_N` given densely; the caller guarantees the window.
    pub fn eval_dense<T: Scalar>(&self, x: &[T]) -> T {
        match &self.spec.kind {
            NormKind::Sup => x.iter().fold(T::zero(), |acc, v| max_of(acc, v.abs())),
            NormKind::Summing => {
                let mut s = T::zero();
                let mut best = T::zero();
                for v in x {
                    s = s + v.clone();
                    best = max_of(best, s.abs());
                }
                best
            }
            NormKind::Schreier { alpha, policy } => match &self.maximal_masks {
                Some(masks) => masks.iter().fold(T::zero(), |acc, &m| {
                    let mut s = T::zero();
                    let mut rest = m;
                    while rest != 0 {
                        s = s + x[rest.trailing_zeros() as usize].abs();
                        rest &= rest - 1;
                    }
                    max_of(acc, s)
                }),
                None => {
                    let weights = x.iter().map(|v| v.abs()).collect();
                    let mut dp = MaxWeightDp::new(weights, policy).expect("window checked at construction");
                    dp.best(alpha).0
                }
            },
        }
    }
}

/// `‖x‖` under `spec`.
pub fn norm<T: Scalar>(x: &Vector<T>, spec: &NormSpec) -> Result<T> {
    Norm::new(spec)?.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn specs(window: u64) -> Vec<NormSpec> {
        vec![
            NormSpec::sup(window),
            NormSpec::summing(window),
            NormSpec::schreier(o("1"), FundSeqPolicy::Default, window),
            NormSpec::schreier(o("2"), FundSeqPolicy::Default, window),
            NormSpec::schreier(o("w"), FundSeqPolicy::Default, window),
        ]
    }

    #[test]
    fn examples() {
        let s1 = NormSpec::schreier(o("1"), FundSeqPolicy::Default, 8);
        assert_eq!(norm(&Vector::<f64>::unit(5), &s1).unwrap(), 1.0);
        let s1_3 = NormSpec::schreier(o("1"), FundSeqPolicy::Default, 3);
        assert_eq!(norm(&Vector::from_dense(&[1.0, 1.0, 1.0]), &s1_3).unwrap(), 2.0);
        let alt = Vector::from_dense(&[1.0, -1.0, 1.0, -1.0]);
        assert_eq!(norm(&alt, &NormSpec::summing(4)).unwrap(), 1.0);
        assert_eq!(norm(&alt, &NormSpec::sup(4)).unwrap(), 1.0);
        assert_eq!(norm(&Vector::<f64>::new(), &NormSpec::summing(4)).unwrap(), 0.0);
        assert_eq!(
            norm(&Vector::<f64>::unit(9), &NormSpec::sup(4)),
            Err(Error::OutsideWindow { index: 9, window: 4 })
        );
    }

    #[test]
    fn schreier_window_is_bounded() {
        assert!(Norm::new(&NormSpec::schreier(o("1"), FundSeqPolicy::Default, 64)).is_ok());
        let err = Norm::new(&NormSpec::schreier(o("1"), FundSeqPolicy::Default, 65)).unwrap_err();
        assert!(matches!(err, Error::BoundExceeded { .. }));
        assert!(Norm::new(&NormSpec::summing(1000)).is_ok());
    }

    #[test]
    fn enumeration_and_dp_paths_agree() {
        // Window 14 lists maximal members, window 15 runs the interval DP.
        for a in ["0", "1", "2", "w", "w+1", "w*2"] {
            let x: Vec<f64> = (1..=14).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
            let small = Norm::new(&NormSpec::schreier(o(a), FundSeqPolicy::Default, 14)).unwrap();
            let large = Norm::new(&NormSpec::schreier(o(a), FundSeqPolicy::Default, 15)).unwrap();
            assert!(small.maximal_masks.is_some() && large.maximal_masks.is_none());
            let mut padded = x.clone();
            padded.push(0.0);
            assert_eq!(small.eval_dense(&x), large.eval_dense(&padded), "alpha={a}");
        }
    }

    #[test]
    fn rational_matches_float_on_dyadics() {
        for spec in specs(10) {
            let x: Vec<f64> = (1..=10).map(|i| ((i * 5 % 7) as f64 - 3.0) / 4.0).collect();
            let v = Vector::from_dense(&x);
            let exact: BigRational = norm(&v.to_rational(), &spec).unwrap();
            assert_eq!(exact.to_f64(), norm(&v, &spec).unwrap(), "{}", spec.name());
        }
    }

    fn small_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-8i32..=8, 10).prop_map(|v| v.into_iter().map(|x| x as f64 / 2.0).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn norm_axioms(x in small_vec(), y in small_vec(), c in -5.0f64..5.0) {
            for spec in specs(10) {
                let n = Norm::new(&spec).unwrap();
                let (vx, vy) = (Vector::from_dense(&x), Vector::from_dense(&y));
                let nx = n.eval(&vx).unwrap();
                prop_assert!(nx >= 0.0);
                prop_assert_eq!(nx == 0.0, vx.is_zero());
                let scaled = n.eval(&vx.scale(&c)).unwrap();
                prop_assert!((scaled - c.abs() * nx).abs() <= 1e-12 * (1.0 + nx * c.abs()));
                let sum = n.eval(&vx.add(&vy)).unwrap();
                prop_assert!(sum <= nx + n.eval(&vy).unwrap() + 1e-12);
            }
        }

        #[test]
        fn projection_identities(x in small_vec(), mask in 0u64..1 << 10) {
            let a = crate::schreier::FinSet::from_mask(mask);
            let v = Vector::from_dense(&x);
            prop_assert_eq!(v.project(&a).project(&a), v.project(&a));
            prop_assert_eq!(v.project(&a).add(&v.remove(&a)), v.clone());
            let w = Vector::from_dense(&x.iter().rev().cloned().collect::<Vec<_>>());
            prop_assert_eq!(v.add(&w).project(&a), v.project(&a).add(&w.project(&a)));
        }
    }
}

use num_rational::BigRational;
use proptest::prelude::*;

use super::*;
use crate::banach::norm;

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn s(alpha: &str) -> Family {
    Family::Schreier(SchreierHandle::new(o(alpha), FundSeqPolicy::Default))
}

fn set(v: &[u64]) -> FinSet {
    FinSet::new(v.to_vec()).unwrap()
}

fn alternating(n: u64) -> Vector<f64> {
    witness_vectors(n).remove(0).1
}

#[test]
fn greedy_set_examples() {
    let x = Vector::from_dense(&[3.0, 1.0, 2.0]);
    assert_eq!(greedy_sets(&x, 1, 3).unwrap().sets, vec![set(&[1])]);
    let x = Vector::from_dense(&[1.0, 1.0]);
    assert_eq!(greedy_sets(&x, 1, 2).unwrap().sets, vec![set(&[1]), set(&[2])]);
    let x = Vector::from_dense(&[5.0, -5.0, 2.0]);
    assert_eq!(greedy_sets(&x, 2, 3).unwrap().sets, vec![set(&[1, 2])]);
    // Zero coordinates inside the window tie with each other.
    let x = Vector::from_dense(&[4.0]);
    assert_eq!(greedy_sets(&x, 2, 3).unwrap().sets, vec![set(&[1, 2]), set(&[1, 3])]);
    assert_eq!(greedy_sets(&x, 0, 3).unwrap().sets, vec![FinSet::empty()]);
    assert!(greedy_sets(&x, 4, 3).unwrap().sets.is_empty());
    let many = greedy_sets(&Vector::<f64>::unit(1), 8, 30).unwrap();
    assert!(many.truncated);
    assert_eq!(many.sets.len(), GREEDY_SET_CAP);
}

#[test]
fn uncond_trivial_cases() {
    let x = Vector::from_dense(&[1.0, -3.0, 2.0, 0.5]);
    for route in [UncondRoute::Auto, UncondRoute::Enumeration] {
        assert_eq!(uncond_constant(&x, &Family::All, &NormSpec::sup(4), route).unwrap().constant, 1.0);
        for n in 1..=6 {
            for fam in [Family::All, s("0"), s("1"), s("w")] {
                let r = uncond_constant(&Vector::<f64>::unit(n), &fam, &NormSpec::summing(6), route).unwrap();
                assert!(r.constant <= 1.0);
            }
        }
    }
    assert_eq!(
        uncond_constant(&Vector::<f64>::new(), &Family::All, &NormSpec::sup(4), UncondRoute::Auto),
        Err(Error::ZeroVector)
    );
}

/// `x = Σ_{i≤4m} (−1)^i e_i` under the summing norm: deleting the positive
/// entries from `{2m..4m}` leaves a run of `−1`s.
#[test]
fn alternating_summing_growth_brute_force() {
    for m in 2..=5u64 {
        let n = 4 * m;
        let x = alternating(n);
        let spec = NormSpec::summing(n);
        let brute = uncond_constant(&x, &s("1"), &spec, UncondRoute::Enumeration).unwrap();
        let dp = uncond_constant(&x, &s("1"), &spec, UncondRoute::Auto).unwrap();
        assert_eq!(brute.constant, dp.constant, "m={m}");
        assert!(dp.constant >= m as f64, "m={m}: {}", dp.constant);
        assert!(SchreierHandle::new(o("1"), FundSeqPolicy::Default).member(&dp.witness));
        let analytic: Vec<u64> = (2 * m..=4 * m).filter(|i| i % 2 == 0).collect();
        let removed = norm(&x.remove(&set(&analytic)), &spec).unwrap();
        assert!(removed >= m as f64);
        assert!(removed <= dp.constant * dp.norm);
    }
}

#[test]
fn alternating_summing_growth_exact() {
    for m in 2..=3u64 {
        let n = 4 * m;
        let x = alternating(n).to_rational();
        let spec = NormSpec::summing(n);
        let exact: UncondResult<BigRational> = uncond_constant(&x, &s("1"), &spec, UncondRoute::Auto).unwrap();
        let brute: UncondResult<BigRational> = uncond_constant(&x, &s("1"), &spec, UncondRoute::Enumeration).unwrap();
        assert_eq!(exact.constant, brute.constant);
        assert!(exact.constant >= BigRational::from_integer(m.into()));
        assert_eq!(Scalar::to_f64(&exact.constant), uncond_constant(&alternating(n), &s("1"), &spec, UncondRoute::Auto).unwrap().constant);
    }
}

#[test]
fn schreier_basis_is_unconditional_on_samples() {
    let spec = NormSpec::schreier(o("1"), FundSeqPolicy::Default, 8);
    for seed in 0..60u64 {
        let x = Vector::from_dense(&(1..=8).map(|i| (((seed * 31 + i * 17) % 13) as f64) - 6.0).collect::<Vec<_>>());
        if x.is_zero() {
            continue;
        }
        let r = uncond_constant(&x, &s("1"), &spec, UncondRoute::Enumeration).unwrap();
        assert!(r.constant <= 1.0 + 1e-9);
    }
}

#[test]
fn greedy_strictness_contract() {
    let x = Vector::from_dense(&[1.0, 2.0]);
    let spec = NormSpec::sup(2);
    let strict = greedy_constant(&x, 1, &Family::All, &spec, GreedyOptions::default()).unwrap();
    // Only A = ∅ is allowed, so the denominator is ‖x‖.
    assert_eq!(strict.approximant, FinSet::empty());
    assert_eq!(strict.constant, 0.5);
    let loose = greedy_constant(&x, 1, &Family::All, &spec, GreedyOptions { strict: false, ..Default::default() }).unwrap();
    assert_eq!(loose.approximant, set(&[2]));
    assert_eq!(loose.constant, 1.0);
    // m = |supp x|: the full support is never a candidate in strict mode.
    let full = greedy_constant(&x, 2, &Family::All, &spec, GreedyOptions::default()).unwrap();
    assert_eq!(full.numerator, 0.0);
    assert!(full.approximant.len() < 2);
    assert!(greedy_constant(&Vector::new(), 1, &Family::All, &spec, GreedyOptions::default()).is_err());
}

/// The Schreier basis is not greedy: a spread-out block of slightly smaller
/// coefficients outweighs the greedy block, while the best approximation
/// from two coordinates removes most of it.
#[test]
fn schreier_basis_greedy_counterexample() {
    let spec = NormSpec::schreier(o("1"), FundSeqPolicy::Default, 8);
    let x = Vector::from_pairs([(1, 1.0), (2, 1.0), (3, 1.0), (6, 0.99), (7, 0.99), (8, 0.99)]).unwrap();
    let proj = greedy_constant(&x, 3, &s("1"), &spec, GreedyOptions::default()).unwrap();
    assert_eq!(proj.lambda, set(&[1, 2, 3]));
    assert!((proj.numerator - 2.97).abs() < 1e-12);
    assert!((proj.denominator - 1.99).abs() < 1e-12);
    let opt = greedy_constant(&x, 3, &s("1"), &spec, GreedyOptions { mode: GreedyMode::Optimize, strict: true }).unwrap();
    assert!(opt.constant >= proj.constant - 1e-12);
    assert!(opt.constant > 1.4);
}

#[test]
fn growth_table_rows() {
    let p = FundSeqPolicy::Default;
    assert!(constant_growth_table(&NormSpec::summing(1), &[], &[4, 8], &p).unwrap().is_empty());
    let rows = constant_growth_table(&NormSpec::schreier(o("1"), p.clone(), 1), &[o("1"), o("w")], &[4, 8, 12], &p).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.constant <= 1.0 + 1e-9));
    let rows = constant_growth_table(&NormSpec::summing(1), &[o("1")], &[8, 12, 16, 20], &p).unwrap();
    for (r, m) in rows.iter().zip(2..) {
        assert_eq!(r.n, 4 * m);
        assert!(r.constant >= m as f64, "{r:?}");
    }
    let csv = growth_table_csv(&rows).unwrap();
    assert!(csv.starts_with("alpha,N,constant,mode,witness\n1,8,"));
    assert_eq!(csv.lines().count(), 5);
}

fn small_vec(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-6i32..=6, n).prop_map(|v| v.into_iter().map(|x| x as f64 / 3.0).collect())
}

fn families() -> Vec<Family> {
    vec![Family::All, s("0"), s("1"), s("2"), s("w"), s("w*2")]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn summing_routes_agree(x in small_vec(10)) {
        let v = Vector::from_dense(&x);
        prop_assume!(!v.is_zero());
        let spec = NormSpec::summing(10);
        for fam in families() {
            let a = uncond_constant(&v, &fam, &spec, UncondRoute::Auto).unwrap();
            let b = uncond_constant(&v, &fam, &spec, UncondRoute::Enumeration).unwrap();
            prop_assert!((a.constant - b.constant).abs() <= 1e-12 * (1.0 + b.constant), "{}: {} vs {}", fam.name(), a.constant, b.constant);
            prop_assert!(fam.admits(&a.witness));
            let achieved = norm(&v.remove(&a.witness), &spec).unwrap() / a.norm;
            prop_assert!((achieved - a.constant).abs() <= 1e-12 * (1.0 + a.constant));
        }
    }

    #[test]
    fn family_monotonicity(x in small_vec(10), spec_ix in 0usize..3) {
        let v = Vector::from_dense(&x);
        prop_assume!(!v.is_zero());
        let spec = [NormSpec::summing(10), NormSpec::sup(10), NormSpec::schreier(o("2"), FundSeqPolicy::Default, 10)][spec_ix].clone();
        let c = |f: &Family| uncond_constant(&v, f, &spec, UncondRoute::Enumeration).unwrap().constant;
        let (all, s2, s0) = (c(&Family::All), c(&s("2")), c(&s("0")));
        prop_assert!(all >= s2 && s2 >= s0);
    }

    #[test]
    fn schreier_norm_unconditional(x in small_vec(9), alpha in prop::sample::select(vec!["1", "2", "w"])) {
        let v = Vector::from_dense(&x);
        prop_assume!(!v.is_zero());
        let spec = NormSpec::schreier(o(alpha), FundSeqPolicy::Default, 9);
        let r = uncond_constant(&v, &s(alpha), &spec, UncondRoute::Enumeration).unwrap();
        prop_assert!(r.constant <= 1.0 + 1e-9);
    }

    #[test]
    fn optimize_dominates_projection(x in small_vec(7), m in 1u64..4, spec_ix in 0usize..3) {
        let v = Vector::from_dense(&x);
        prop_assume!(!v.is_zero());
        let spec = [NormSpec::summing(7), NormSpec::sup(7), NormSpec::schreier(o("1"), FundSeqPolicy::Default, 7)][spec_ix].clone();
        for fam in [Family::All, s("1")] {
            let p = greedy_constant(&v, m, &fam, &spec, GreedyOptions::default()).unwrap();
            let q = greedy_constant(&v, m, &fam, &spec, GreedyOptions { mode: GreedyMode::Optimize, strict: true }).unwrap();
            prop_assert!(q.denominator <= p.denominator + 1e-12);
            prop_assert!(q.constant >= p.constant - 1e-9);
        }
    }
}

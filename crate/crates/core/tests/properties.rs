use maxprec::combinatorics::{binomial, exact_max_composition_count, Count};
use maxprec::null_dist::null_distribution;
use maxprec::statistics::{frequency_vector, statistic_bundle, Sample};
use maxprec::Design;
use num_traits::One;
use proptest::prelude::*;

fn distinct_values(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::hash_set(-10_000i32..10_000, len).prop_map(|set| set.into_iter().map(f64::from).collect())
}

/// Splits `m + n` distinct values into X (first m) and Y.
fn two_samples(max: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..=max, 2..=max)
        .prop_flat_map(|(m, n)| distinct_values(m + n).prop_map(move |v| (v[..m].to_vec(), v[m..].to_vec())))
}

fn sample(v: &[f64]) -> Sample {
    Sample::new("s", v.to_vec()).unwrap()
}

proptest! {
    #[test]
    fn pmf_normalizes_and_cdf_is_monotone(m in 1usize..=15, n in 2usize..=15, r in 1usize..=7, s in 1usize..=7) {
        prop_assume!(r + s <= n);
        let dist = null_distribution(Design::new(m, n, r, s).unwrap()).unwrap();
        let total: num_rational::BigRational = dist.pmf_values().iter().sum();
        prop_assert!(total.is_one());
        let cdf = dist.cdf_values();
        prop_assert!(cdf.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(cdf.last().unwrap().is_one());
    }

    #[test]
    fn frequency_vector_invariant_under_increasing_maps((x, y) in two_samples(12), shift in -50.0f64..50.0, scale in 0.1f64..10.0) {
        let n = y.len();
        let r = 1 + n / 3;
        let s = (n - r).clamp(1, 2);
        let base = frequency_vector(&sample(&x), &sample(&y), r, s).unwrap();
        let affine = |v: &[f64]| sample(&v.iter().map(|t| t * scale + shift).collect::<Vec<_>>());
        prop_assert_eq!(&base, &frequency_vector(&affine(&x), &affine(&y), r, s).unwrap());
        let cube = |v: &[f64]| sample(&v.iter().map(|t| t.powi(3)).collect::<Vec<_>>());
        prop_assert_eq!(&base, &frequency_vector(&cube(&x), &cube(&y), r, s).unwrap());
    }

    #[test]
    fn reflection_swaps_precedence_and_exceedance((x, y) in two_samples(12)) {
        let n = y.len();
        let (r, s) = (1, (n - 1).min(2));
        let fv = frequency_vector(&sample(&x), &sample(&y), r, s).unwrap();
        let neg = |v: &[f64]| sample(&v.iter().map(|t| -t).collect::<Vec<_>>());
        let mirrored = frequency_vector(&neg(&x), &neg(&y), s, r).unwrap();
        let mut rev_e = fv.exceedance.clone();
        rev_e.reverse();
        let mut rev_p = fv.precedence.clone();
        rev_p.reverse();
        prop_assert_eq!(&mirrored.precedence, &rev_e);
        prop_assert_eq!(&mirrored.exceedance, &rev_p);
        prop_assert_eq!(mirrored.t(), fv.t());
    }

    #[test]
    fn bundle_is_consistent((x, y) in two_samples(12)) {
        let n = y.len();
        let b = statistic_bundle(&sample(&x), &sample(&y), 1, n - 1).unwrap();
        prop_assert_eq!(b.t, b.p + b.e);
        prop_assert_eq!(b.q, b.p);
        prop_assert!(b.t <= x.len() as u64);
        prop_assert!(b.b >= b.p);
    }
}

#[test]
fn swapping_orders_preserves_the_null_cdf() {
    for m in 1..=10 {
        for n in 2..=10 {
            for r in 1..n {
                for s in (r + 1)..=(n - r) {
                    let a = null_distribution(Design::new(m, n, r, s).unwrap()).unwrap();
                    let b = null_distribution(Design::new(m, n, s, r).unwrap()).unwrap();
                    assert_eq!(a.cdf_values(), b.cdf_values(), "m={m} n={n} r={r} s={s}");
                }
            }
        }
    }
}

#[test]
fn exact_max_counts_partition_all_compositions() {
    for total in 0..=25u64 {
        for parts in 1..=10u64 {
            let sum: Count = (0..=total).map(|i| exact_max_composition_count(total, parts, i)).sum();
            assert_eq!(
                sum,
                binomial(total + parts - 1, parts as i64 - 1),
                "N={total} b={parts}"
            );
        }
    }
}

//! Cross-checks between independent routes to the same quantities.

use maxprec::inference::{mc_power, simulate_histogram, AlternativeSpec, Baseline, SeededRng, StatisticKind};
use maxprec::lehmann::{
    alternative_distribution, exact_power, for_each_frequency_vector, joint_frequency_pmf_lehmann, LehmannParams,
};
use maxprec::null_dist::{brute_force_null_distribution, joint_frequency_pmf_null, null_distribution};
use maxprec::rational;
use maxprec::Design;

fn designs(max: usize) -> impl Iterator<Item = Design> {
    (1..=max).flat_map(move |m| {
        (2..=max)
            .flat_map(move |n| (1..n).flat_map(move |r| (1..=(n - r)).map(move |s| Design::new(m, n, r, s).unwrap())))
    })
}

#[test]
fn closed_form_matches_brute_force_up_to_six() {
    for design in designs(6) {
        let fast = null_distribution(design).unwrap();
        let slow = brute_force_null_distribution(design).unwrap();
        assert_eq!(fast.pmf_values(), slow.pmf_values(), "{design}");
    }
}

#[test]
fn lehmann_at_gamma_one_is_the_null_law() {
    let one = LehmannParams::new(1.0).unwrap();
    for design in designs(6) {
        for_each_frequency_vector(design, |fv| {
            let null = rational::to_f64(&joint_frequency_pmf_null(fv).unwrap());
            let alt = joint_frequency_pmf_lehmann(fv, &one).unwrap();
            assert!((alt - null).abs() <= 1e-10 * null, "{design} {fv:?}: {alt} vs {null}");
        });
    }
}

#[test]
fn lehmann_distribution_normalizes() {
    for gamma in ["1/5", "1/2", "2", "5"] {
        let params = LehmannParams::parse(gamma).unwrap();
        for design in designs(10) {
            let dist = alternative_distribution(design, &params).unwrap();
            assert!((dist.total_mass() - 1.0).abs() < 1e-6, "{design} gamma={gamma}");
        }
    }
}

#[test]
fn lehmann_pmf_matches_simulation() {
    let reps = 1_000_000;
    for r in [1, 2] {
        let design = Design::new(10, 10, r, r).unwrap();
        for gamma in [0.5, 2.0, 5.0] {
            let exact = alternative_distribution(design, &LehmannParams::new(gamma).unwrap()).unwrap();
            let spec = AlternativeSpec::lehmann(gamma).unwrap();
            let hist =
                simulate_histogram(design, &spec, StatisticKind::T, reps, &SeededRng::new(31, r as u64)).unwrap();
            for (t, &count) in hist.iter().enumerate() {
                let p = exact.pmf(t);
                let observed = count as f64 / reps as f64;
                let se = (p * (1.0 - p) / reps as f64).sqrt().max(1.0 / reps as f64);
                assert!(
                    (observed - p).abs() <= 4.0 * se,
                    "{design} gamma={gamma} t={t}: {observed} vs {p}"
                );
            }
        }
    }
}

#[test]
fn exact_power_grows_with_gamma() {
    for m in [10, 20, 30] {
        for r in 1..=4 {
            let design = Design::new(m, m, r, r).unwrap();
            let mut last = 0.0;
            for g in 1..=10 {
                let power = exact_power(design, &LehmannParams::new(g as f64).unwrap(), 0.05).unwrap();
                assert!(power >= last - 1e-12, "{design} gamma={g}");
                last = power;
            }
        }
    }
}

#[test]
fn baseline_does_not_matter() {
    // the test uses ranks only, so an exponential baseline gives the same law
    let design = Design::new(20, 20, 2, 2).unwrap();
    let uniform = AlternativeSpec::lehmann(3.0).unwrap();
    let expo = uniform.with_baseline(Baseline::Exponential);
    let a = mc_power(design, 0.05, &uniform, StatisticKind::T, 100_000, &SeededRng::new(5, 0)).unwrap();
    let b = mc_power(design, 0.05, &expo, StatisticKind::T, 100_000, &SeededRng::new(5, 1)).unwrap();
    let joint = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.power - b.power).abs() <= 4.0 * joint, "{} vs {}", a.power, b.power);
}

#[test]
fn every_statistic_has_size_alpha() {
    let design = Design::new(15, 15, 2, 2).unwrap();
    for statistic in [StatisticKind::T, StatisticKind::V, StatisticKind::Q] {
        let est = mc_power(
            design,
            0.05,
            &AlternativeSpec::null(),
            statistic,
            100_000,
            &SeededRng::new(20240501, 0),
        )
        .unwrap();
        assert!(
            (est.power - 0.05).abs() <= 3.0 * est.std_error,
            "{statistic}: {}",
            est.power
        );
    }
}

#[test]
fn both_directions_are_detected() {
    for m in [10, 20, 30] {
        for r in 1..=4 {
            let design = Design::new(m, m, r, r).unwrap();
            for gamma in ["1/5", "5"] {
                let power = exact_power(design, &LehmannParams::parse(gamma).unwrap(), 0.05).unwrap();
                assert!(power > 0.05, "{design} gamma={gamma}: {power}");
            }
        }
    }
}

#[test]
fn streams_agree_and_seeds_reproduce() {
    let design = Design::new(20, 20, 1, 1).unwrap();
    let spec = AlternativeSpec::lehmann(2.0).unwrap();
    let run = |stream| {
        mc_power(
            design,
            0.05,
            &spec,
            StatisticKind::T,
            50_000,
            &SeededRng::new(77, stream),
        )
        .unwrap()
    };
    let (a, b, again) = (run(0), run(1), run(0));
    assert_eq!(a.power.to_bits(), again.power.to_bits());
    let joint = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!((a.power - b.power).abs() <= 4.0 * joint);
}

use pathlens_core::stats::{
    shapiro_wilk, signed_ranks, wilcoxon_on_differences, wilcoxon_signed_rank, StatsError, TestMethod, WilcoxonMode,
};
use proptest::prelude::*;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

/// Two-sided exact p by walking all `2^n` sign patterns over ranks `1..=n`.
fn enumeration_p(d: &[f64]) -> f64 {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].abs().total_cmp(&d[b].abs()));
    let mut rank = vec![0u64; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r as u64 + 1;
    }
    let w_plus: u64 = (0..n).filter(|&i| d[i] > 0.0).map(|i| rank[i]).sum();
    let total = (n * (n + 1) / 2) as u64;
    let w = w_plus.min(total - w_plus);
    let mut at_most = 0u64;
    for mask in 0u64..(1 << n) {
        let s: u64 = (0..n).filter(|&b| mask >> b & 1 == 1).map(|b| b as u64 + 1).sum();
        if s <= w {
            at_most += 1;
        }
    }
    ((2 * at_most) as f64 / (1u64 << n) as f64).min(1.0)
}

fn tie_free(rng: &mut ChaCha8Rng, n: usize, shift: f64) -> Vec<f64> {
    loop {
        let d: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0 + shift).collect();
        let mut mags: Vec<f64> = d.iter().map(|v| v.abs()).collect();
        mags.sort_by(f64::total_cmp);
        if mags[0] > 0.0 && mags.windows(2).all(|w| w[0] != w[1]) {
            return d;
        }
    }
}

#[test]
fn exact_p_matches_enumeration_bit_for_bit() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 1..=10 {
        for k in 0..200 {
            let d = tie_free(&mut rng, n, (k % 5) as f64 * 0.15);
            let r = wilcoxon_on_differences(&d, WilcoxonMode::Exact).unwrap();
            assert_eq!(r.method, TestMethod::WilcoxonExact);
            assert_eq!(r.p_value.to_bits(), enumeration_p(&d).to_bits(), "n={n} d={d:?}");
        }
    }
}

#[test]
fn worked_examples() {
    let r = wilcoxon_on_differences(&[1.0, 2.0, 3.0, 4.0, 5.0], WilcoxonMode::Auto).unwrap();
    assert_eq!((r.statistic, r.p_value, r.n_effective), (0.0, 0.0625, 5));
    let r = wilcoxon_on_differences(&[1.0, -1.0], WilcoxonMode::Auto).unwrap();
    assert_eq!((r.statistic, r.p_value), (1.5, 1.0));
    assert_eq!(
        wilcoxon_signed_rank(&[1.0, 2.0], &[1.0, 2.0]),
        Err(StatsError::AllDifferencesZero)
    );
    assert_eq!(
        wilcoxon_signed_rank(&[1.0, 2.0], &[1.0]),
        Err(StatsError::LengthMismatch { x: 2, y: 1 })
    );
}

#[test]
fn normal_approximation_against_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let d = tie_free(&mut rng, 30, 0.25);
    let r = wilcoxon_on_differences(&d, WilcoxonMode::Auto).unwrap();
    assert_eq!(r.method, TestMethod::WilcoxonNormalApprox);

    let sr = signed_ranks(&d);
    let mut ranks: Vec<f64> = sr.ranks.iter().map(|r| r.0).collect();
    ranks.sort_by(f64::total_cmp);
    let total: f64 = ranks.iter().sum();
    let observed = sr.w_plus.min(sr.w_minus);
    let samples = 1_000_000;
    let mut mc = ChaCha8Rng::seed_from_u64(31);
    let mut extreme = 0u64;
    for _ in 0..samples {
        let bits = mc.next_u32();
        let w: f64 = (0..30).filter(|&b| bits >> b & 1 == 1).map(|b| ranks[b]).sum();
        if w.min(total - w) <= observed {
            extreme += 1;
        }
    }
    let p_mc = extreme as f64 / samples as f64;
    assert!(
        (r.p_value - p_mc).abs() <= 5e-3,
        "approx {} vs monte carlo {p_mc}",
        r.p_value
    );
}

#[test]
fn normal_approximation_converges_at_25() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let d = tie_free(&mut rng, 25, (k % 4) as f64 * 0.1);
        let exact = wilcoxon_on_differences(&d, WilcoxonMode::Exact).unwrap().p_value;
        let approx = wilcoxon_on_differences(&d, WilcoxonMode::NormalApprox).unwrap().p_value;
        worst = worst.max((exact - approx).abs());
    }
    assert!(worst <= 0.01, "max gap {worst}");
}

proptest! {
    #[test]
    fn rank_sums_total(d in prop::collection::vec(-20i32..20, 1..40)) {
        let d: Vec<f64> = d.into_iter().map(f64::from).collect();
        let sr = signed_ranks(&d);
        let n = sr.n() as f64;
        prop_assert_eq!(sr.w_plus + sr.w_minus, n * (n + 1.0) / 2.0);
        if let Ok(r) = wilcoxon_on_differences(&d, WilcoxonMode::Auto) {
            prop_assert!(r.p_value > 0.0 && r.p_value <= 1.0);
            prop_assert!(r.n_effective <= d.len());
        }
    }

    #[test]
    fn swap_keeps_two_sided_p(pairs in prop::collection::vec((0u8..50, 0u8..50), 1..35)) {
        let x: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let y: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        match (wilcoxon_signed_rank(&x, &y), wilcoxon_signed_rank(&y, &x)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.p_value, b.p_value);
                prop_assert_eq!(a.statistic, b.statistic);
            }
            (a, b) => prop_assert_eq!(a, b),
        }
    }

    #[test]
    fn shapiro_affine_invariant(
        x in prop::collection::vec(-100.0f64..100.0, 3..200),
        scale in 0.01f64..100.0,
        shift in -1e3f64..1e3,
    ) {
        let Ok(base) = shapiro_wilk(&x) else { return Ok(()) };
        prop_assert!(base.statistic > 0.0 && base.statistic <= 1.0);
        prop_assert!(base.p_value > 0.0 && base.p_value <= 1.0);
        let moved: Vec<f64> = x.iter().map(|v| scale * v + shift).collect();
        let w = shapiro_wilk(&moved).unwrap().statistic;
        prop_assert!((w - base.statistic).abs() <= 1e-10, "{} vs {}", w, base.statistic);
    }
}

#[derive(Deserialize)]
struct Case {
    name: String,
    w: f64,
    p: f64,
    sample: Vec<f64>,
}

#[derive(Deserialize)]
struct Reference {
    cases: Vec<Case>,
    heavy_tailed: Case,
}

fn reference() -> Reference {
    serde_json::from_str(include_str!("data/shapiro_reference.json")).unwrap()
}

#[test]
fn shapiro_matches_reference_oracle() {
    let reference = reference();
    assert_eq!(reference.cases.len(), 25);
    for case in reference.cases.iter().chain([&reference.heavy_tailed]) {
        let r = shapiro_wilk(&case.sample).unwrap();
        assert!(
            (r.statistic - case.w).abs() <= 1e-4,
            "{}: W {} vs {}",
            case.name,
            r.statistic,
            case.w
        );
        assert!(
            (r.p_value - case.p).abs() <= 1e-4,
            "{}: p {} vs {}",
            case.name,
            r.p_value,
            case.p
        );
    }
}

#[test]
fn shapiro_small_samples() {
    let r = shapiro_wilk(&[1.0, 2.0, 3.0]).unwrap();
    assert!((r.statistic - 1.0).abs() <= 1e-9);
    assert!((r.p_value - 1.0).abs() <= 1e-9);
    assert_eq!(
        shapiro_wilk(&[1.0, 2.0]),
        Err(StatsError::SampleTooSmall { n: 2, min: 3 })
    );
    assert_eq!(shapiro_wilk(&[4.0; 10]), Err(StatsError::ZeroVariance));
}

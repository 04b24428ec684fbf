use citeburst::bpan::citations_in_window;
use citeburst::kernels::{
    pa_weight, recency_weight, sample_targets, FenwickSampler, PrefixSampler,
};
use citeburst::{AuthorState, Error, KernelParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn counts(weights: &[f64], draws: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![0; weights.len()];
    for i in sample_targets(weights, draws, &mut rng).unwrap() {
        c[i] += 1;
    }
    c
}

fn within_three_sigma(weights: &[f64], observed: &[u64], n: u64) {
    let total: f64 = weights.iter().sum();
    for (w, &o) in weights.iter().zip(observed) {
        let p = w / total;
        let mean = n as f64 * p;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (o as f64 - mean).abs() <= 3.0 * sigma,
            "p={p} observed {o} expected {mean} sigma {sigma}"
        );
    }
}

#[test]
fn symmetric_pair_splits_evenly() {
    let n = 1_000_000;
    within_three_sigma(&[1.0, 1.0], &counts(&[1.0, 1.0], n, 11), n);
}

#[test]
fn three_to_one_pair_matches_binomial() {
    let n = 1_000_000;
    within_three_sigma(&[3.0, 1.0], &counts(&[3.0, 1.0], n, 12), n);
}

#[test]
fn fenwick_matches_binomial_without_updates() {
    let weights = [0.5, 2.0, 0.0, 7.5, 1.0];
    let fen = FenwickSampler::new(&weights).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let n = 400_000;
    let mut c = vec![0; weights.len()];
    for _ in 0..n {
        c[fen.sample(&mut rng).unwrap()] += 1;
    }
    assert_eq!(c[2], 0);
    within_three_sigma(&weights, &c, n);
}

#[test]
fn zero_draws_and_zero_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(sample_targets(&[1.0], 0, &mut rng).unwrap().is_empty());
    assert!(sample_targets(&[0.0, 0.0], 0, &mut rng).unwrap().is_empty());
    assert!(matches!(
        sample_targets(&[0.0, 0.0], 3, &mut rng),
        Err(Error::NoPositiveWeight { .. })
    ));
}

#[test]
fn pa_relative_odds_zero_vs_eighteen() {
    let w0 = pa_weight(0, 1.8).unwrap();
    let w18 = pa_weight(18, 1.8).unwrap();
    let total = w0 + w18;
    assert!((w0 / total - 1.0 / 12.0).abs() < 1e-12);
    assert!((w18 / total - 11.0 / 12.0).abs() < 1e-12);
}

#[test]
fn scaled_weights_give_same_frequencies() {
    let base = [1.0, 4.0, 0.25, 9.0, 2.5];
    let n = 500_000;
    let a = counts(&base, n, 21);
    for scale in [1e-6, 0.37, 3.0, 1e9] {
        let scaled: Vec<f64> = base.iter().map(|w| w * scale).collect();
        let b = counts(&scaled, n, 22);
        let total: f64 = base.iter().sum();
        for (i, w) in base.iter().enumerate() {
            let p = w / total;
            // Difference of two independent binomials.
            let sigma = (2.0 * n as f64 * p * (1.0 - p)).sqrt();
            let diff = a[i] as f64 - b[i] as f64;
            assert!(
                diff.abs() <= 4.0 * sigma,
                "scale {scale} author {i}: {diff}"
            );
        }
    }
}

#[test]
fn prefix_sampler_rejects_bad_weights() {
    assert!(PrefixSampler::new(&[]).is_err());
    assert!(PrefixSampler::new(&[1.0, -1.0]).is_err());
    assert!(PrefixSampler::new(&[f64::NAN]).is_err());
}

fn history() -> impl Strategy<Value = (u32, Vec<u32>)> {
    (0u32..24, prop::collection::vec(0u32..9, 1..48))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn recency_weight_is_a_plus_window_slice(
        (entry, monthly) in history(),
        a in 0.0f64..5.0,
        w in 1u32..40,
        dt in 0u32..60,
    ) {
        let state = AuthorState::with_history("x", entry, monthly.clone());
        let t = entry + dt;
        let params = KernelParams::recency(a, w).unwrap();
        let lo = (i64::from(t) - i64::from(w) + 1).max(i64::from(entry));
        let oracle: u64 = (lo..=i64::from(t))
            .filter_map(|m| monthly.get((m - i64::from(entry)) as usize))
            .map(|&c| u64::from(c))
            .sum();
        prop_assert_eq!(recency_weight(&state, t, &params).unwrap(), a + oracle as f64);
        prop_assert_eq!(citations_in_window(&state, t, w), oracle);
    }

    #[test]
    fn long_window_recency_equals_pa(
        (entry, monthly) in history(),
        a in 0.001f64..5.0,
        dt in 0u32..60,
    ) {
        let state = AuthorState::with_history("x", entry, monthly);
        let t = entry + dt;
        let w = t + 1;
        let rec = recency_weight(&state, t, &KernelParams::recency(a, w).unwrap()).unwrap();
        let pa = pa_weight(state.cumulative(t), a).unwrap();
        prop_assert_eq!(rec, pa);
        let rec_k = KernelParams::recency(a, t + 1).unwrap();
        let pa_k = KernelParams::preferential(a).unwrap();
        prop_assert_eq!(rec_k.weight_at_start(&state, t), pa_k.weight_at_start(&state, t));
    }

    #[test]
    fn weights_positive_when_a_positive((entry, monthly) in history(), a in 1e-6f64..3.0, w in 1u32..30, dt in 0u32..60) {
        let state = AuthorState::with_history("x", entry, monthly);
        let t = entry + dt;
        prop_assert!(pa_weight(state.cumulative(t), a).unwrap() > 0.0);
        prop_assert!(recency_weight(&state, t, &KernelParams::recency(a, w).unwrap()).unwrap() > 0.0);
    }
}

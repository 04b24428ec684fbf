//! Attachment weights and target sampling for five authors.
//!
//! cargo run --release --example kernels_sampling

use citeburst::bpan::AuthorState;
use citeburst::kernels::{pa_weight, recency_weight, sample_targets, FenwickSampler};
use citeburst::KernelParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> citeburst::Result<()> {
    let histories = [
        vec![0, 0, 0, 0, 0, 0],
        vec![5, 0, 0, 0, 0, 0],
        vec![0, 0, 0, 1, 1, 1],
        vec![10, 10, 10, 0, 0, 0],
        vec![0, 2, 0, 2, 0, 2],
    ];
    let authors: Vec<AuthorState> = histories
        .iter()
        .enumerate()
        .map(|(i, h)| AuthorState::with_history(format!("a{i}"), 0, h.clone()))
        .collect();

    let t = 6;
    let recency = KernelParams::recency(0.5, 3)?;
    let pa: Vec<f64> = authors
        .iter()
        .map(|a| pa_weight(a.cumulative_before(t), 1.0))
        .collect::<Result<_, _>>()?;
    let rec: Vec<f64> = authors
        .iter()
        .map(|a| recency_weight(a, t, &recency))
        .collect::<Result<_, _>>()?;

    let draws = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, weights) in [("pa(A=1)", &pa), ("recency(A=0.5, w=3)", &rec)] {
        let total: f64 = weights.iter().sum();
        let mut counts = vec![0u64; weights.len()];
        for i in sample_targets(weights, draws, &mut rng)? {
            counts[i] += 1;
        }
        println!("{name}");
        for (i, (w, c)) in weights.iter().zip(&counts).enumerate() {
            println!(
                "  a{i}: weight {w:>5.1}  expected {:.4}  observed {:.4}",
                w / total,
                *c as f64 / draws as f64
            );
        }
    }

    // Per-citation updates: each draw raises the chosen author's weight.
    let mut fen = FenwickSampler::new(&pa)?;
    for _ in 0..1000 {
        let i = fen.sample(&mut rng)?;
        fen.add(i, 1.0);
    }
    let after: Vec<f64> = (0..pa.len()).map(|i| fen.weight(i)).collect();
    println!("pa weights after 1000 rich-get-richer draws: {after:?}");
    Ok(())
}

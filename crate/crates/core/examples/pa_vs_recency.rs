//! Replay a corpus under preferential attachment and under the recency
//! kernel, then compare citation and burst distributions with the data.
//!
//! cargo run --release --example pa_vs_recency [configs/twenty_years.toml]

use citeburst::corpus::{generate_synthetic, SyntheticSpec};
use citeburst::fit::wasserstein1;
use citeburst::metrics::{burst_distribution, citation_distribution};
use citeburst::{Bpan, KernelParams, Replay, SimConfig, Transform};

fn main() -> citeburst::Result<()> {
    let spec = match std::env::args().nth(1) {
        Some(path) => SyntheticSpec::from_toml(&std::fs::read_to_string(path).expect("spec"))?,
        None => citeburst::cli::demo_spec(),
    };
    let corpus = generate_synthetic(&spec)?;
    let bpan = Bpan::build(&corpus);
    let replay = Replay::new(&corpus, &bpan)?;
    let (t_in, t_f) = replay.month_range();
    let year = (t_f + 1) / 12 - 1;

    let data = replay.empirical();
    let data_k = citation_distribution(data, t_f);
    let data_b = burst_distribution(data, year);
    println!(
        "data     k spans {:.2} decades, bursts {:.2} decades ({} authors uncited at year start)",
        data_k.support_decades(),
        data_b.support_decades(),
        data_b.excluded
    );

    for kernel in [
        KernelParams::preferential(1.8)?,
        KernelParams::recency(0.075, 12)?,
    ] {
        let state = replay.run(&SimConfig::new(t_in, t_f, kernel, 1))?;
        let k = citation_distribution(&state.histories, t_f);
        let b = burst_distribution(&state.histories, year);
        println!(
            "{kernel:<24} k {:.2} decades, bursts {:.2} decades, W1(k) {:.3}, W1(b) {:.3}",
            k.support_decades(),
            b.support_decades(),
            wasserstein1(&k, &data_k, Transform::Log10p)?,
            wasserstein1(&b, &data_b, Transform::Log10p)?,
        );
        assert_eq!(state.citation_total, bpan.total_weight());
    }
    Ok(())
}

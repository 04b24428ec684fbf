//! Correlation between an author's citations now and `lag` months later,
//! for the data and for both kernels.
//!
//! cargo run --release --example lag_correlation

use citeburst::corpus::generate_synthetic;
use citeburst::metrics::LagCorrelator;
use citeburst::{Bpan, Histories, KernelParams, Replay, SimConfig};

fn curve(name: &str, h: &Histories, window: std::ops::RangeInclusive<u32>) {
    let c = LagCorrelator::new(h);
    let row: Vec<String> = [1, 3, 6, 12, 24, 50, 100]
        .iter()
        .map(|&lag| match c.correlation(lag, 0, window.clone()) {
            Ok(r) => format!("{:>6.3}", r.r),
            Err(_) => "     -".into(),
        })
        .collect();
    println!("{name:<10}{}", row.join(" "));
}

fn main() -> citeburst::Result<()> {
    let corpus = generate_synthetic(&citeburst::cli::demo_spec())?;
    let bpan = Bpan::build(&corpus);
    let replay = Replay::new(&corpus, &bpan)?;
    let (t_in, t_f) = replay.month_range();
    let window = t_f.saturating_sub(47)..=t_f;

    println!(
        "lag       {}",
        ["1", "3", "6", "12", "24", "50", "100"]
            .map(|s| format!("{s:>6}"))
            .join(" ")
    );
    curve("data", replay.empirical(), window.clone());
    for (name, kernel) in [
        ("pa", KernelParams::preferential(1.8)?),
        ("recency", KernelParams::recency(0.075, 12)?),
    ] {
        let state = replay.run(&SimConfig::new(t_in, t_f, kernel, 1))?;
        curve(name, &state.histories, window.clone());
    }
    Ok(())
}

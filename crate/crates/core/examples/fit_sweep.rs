//! Sweep the recency kernel over a small (A, w) grid and print the map.
//!
//! cargo run --release --example fit_sweep

use citeburst::corpus::generate_synthetic;
use citeburst::fit::sweep;
use citeburst::{Bpan, GridSpec, Replay, SweepConfig};

fn main() -> citeburst::Result<()> {
    let corpus = generate_synthetic(&citeburst::cli::demo_spec())?;
    let bpan = Bpan::build(&corpus);
    let replay = Replay::new(&corpus, &bpan)?;
    let (t_in, t_f) = replay.month_range();

    let grid = GridSpec::parse("0.025,0.075,0.225", "3,6,12,18,24,36")?;
    let config = SweepConfig {
        replicates: 3,
        ..SweepConfig::new(t_in, t_f, grid)
    };
    let result = sweep(&replay, &config, None)?;

    println!(
        "{:>7} {:>3} {:>8} {:>8} {:>6}",
        "A", "w", "d_k", "d_b", "score"
    );
    for c in &result.cells {
        println!(
            "{:>7} {:>3} {:>8.4} {:>8.4} {:>6.3}",
            c.a, c.w, c.d_citations, c.d_bursts, c.score
        );
    }
    println!("best: A = {}, w = {}", result.best.0, result.best.1);
    Ok(())
}

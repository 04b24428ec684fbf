//! Generate a synthetic corpus from a spec and summarize it.
//!
//! cargo run --release --example synthetic_corpus [configs/demo.toml]

use citeburst::corpus::{generate_synthetic_with_stats, SyntheticSpec};
use citeburst::Bpan;

fn main() -> citeburst::Result<()> {
    let spec = match std::env::args().nth(1) {
        Some(path) => {
            let text = std::fs::read_to_string(&path).expect("readable spec");
            SyntheticSpec::from_toml(&text)?
        }
        None => citeburst::cli::demo_spec(),
    };
    let (corpus, stats) = generate_synthetic_with_stats(&spec)?;
    let bpan = Bpan::build(&corpus);

    println!("target kernel    {}", spec.target_kernel);
    println!("papers           {}", stats.papers);
    println!("authors          {}", stats.authors);
    println!("references       {}", corpus.reference_count());
    println!("author-citations {}", bpan.total_weight());
    assert_eq!(bpan.total_weight(), stats.citations_booked);

    let mut totals: Vec<u64> = bpan.histories.authors.values().map(|a| a.total()).collect();
    totals.sort_unstable_by(|a, b| b.cmp(a));
    println!(
        "top authors by citations: {:?}",
        &totals[..totals.len().min(10)]
    );
    Ok(())
}

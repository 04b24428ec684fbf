//! Build the paper->author network for a handful of papers and print the
//! per-author citation histories.
//!
//! cargo run --example ingest_corpus [corpus.jsonl]

use citeburst::corpus::{load_corpus, Corpus, PaperRecord};
use citeburst::Bpan;

fn main() -> citeburst::Result<()> {
    let corpus = match std::env::args().nth(1) {
        Some(path) => load_corpus(path)?,
        None => Corpus::new(vec![
            PaperRecord::new("R1", 0, &["a", "b"], &[]),
            PaperRecord::new("R2", 1, &["b", "c"], &[]),
            PaperRecord::new("R3", 1, &["b"], &[]),
            PaperRecord::new("P", 3, &["d"], &["R1", "R2", "R3"]),
            PaperRecord::new("Q", 4, &["a"], &["P", "R1", "missing"]),
        ])?,
    };
    let bpan = Bpan::build(&corpus);

    println!("edges (citing paper -> cited author, weight):");
    for e in bpan.edges.iter().take(20) {
        println!("  {} -> {} x{}", e.citing_paper, e.cited_author, e.weight);
    }
    println!("author-citations issued by each paper:");
    for p in corpus.papers().iter().take(20) {
        println!("  {:>4}: c_p = {}", p.paper_id, bpan.issued_by(&p.paper_id));
    }

    let h = &bpan.histories;
    println!("totals at month {}:", h.last_month);
    for (id, state) in h.authors.iter().take(20) {
        println!(
            "  {id}: entered {} k = {} series {:?}",
            state.entry_month,
            state.total(),
            state.cumulative_series()
        );
    }
    println!("{} author-citations in total", bpan.total_weight());
    Ok(())
}

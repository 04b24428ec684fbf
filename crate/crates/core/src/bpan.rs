//! Weighted bipartite paper→author citation network and per-author
//! monthly citation histories.
//!
//! A paper `P` citing references `R_1..R_n` links to every author of each
//! `R_i`; the link weight `w(P, A)` counts how many of the cited references
//! `A` coauthored. An author's citation count is the sum of incoming weights.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, PaperRecord};
use crate::error::{Error, Result};

/// Citation history of one author.
///
/// `monthly_citations[i]` holds the citations received in month
/// `entry_month + i`; months outside the stored range count as zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorState {
    pub author_id: String,
    pub entry_month: u32,
    pub monthly_citations: Vec<u32>,
    /// Months of the author's papers, ascending (repeats allowed).
    pub paper_months: Vec<u32>,
}

impl AuthorState {
    pub fn new(author_id: impl Into<String>, entry_month: u32) -> Self {
        AuthorState {
            author_id: author_id.into(),
            entry_month,
            monthly_citations: Vec::new(),
            paper_months: Vec::new(),
        }
    }

    /// Builds a state from a history that starts at `entry_month`.
    pub fn with_history(author_id: impl Into<String>, entry_month: u32, monthly: Vec<u32>) -> Self {
        AuthorState {
            author_id: author_id.into(),
            entry_month,
            monthly_citations: monthly,
            paper_months: vec![entry_month],
        }
    }

    pub fn monthly(&self, t: u32) -> u32 {
        t.checked_sub(self.entry_month)
            .and_then(|i| self.monthly_citations.get(i as usize))
            .copied()
            .unwrap_or(0)
    }

    /// Sum of monthly citations over months `[from, to]`, clipped to the history.
    pub fn sum_months(&self, from: u32, to: u32) -> u64 {
        if to < self.entry_month || from > to {
            return 0;
        }
        let lo = from.saturating_sub(self.entry_month) as usize;
        let hi = ((to - self.entry_month) as usize + 1).min(self.monthly_citations.len());
        if lo >= hi {
            return 0;
        }
        self.monthly_citations[lo..hi]
            .iter()
            .map(|&c| u64::from(c))
            .sum()
    }

    /// `k^t`: citations received up to and including month `t`.
    pub fn cumulative(&self, t: u32) -> u64 {
        self.sum_months(0, t)
    }

    /// Citations received in months strictly before `t`.
    pub fn cumulative_before(&self, t: u32) -> u64 {
        match t.checked_sub(1) {
            Some(prev) => self.cumulative(prev),
            None => 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.monthly_citations.iter().map(|&c| u64::from(c)).sum()
    }

    /// Papers authored up to and including month `t`.
    pub fn paper_count(&self, t: u32) -> usize {
        self.paper_months.partition_point(|&m| m <= t)
    }

    pub fn add_citations(&mut self, t: u32, n: u32) {
        assert!(t >= self.entry_month, "citation before author entry");
        let i = (t - self.entry_month) as usize;
        if self.monthly_citations.len() <= i {
            self.monthly_citations.resize(i + 1, 0);
        }
        self.monthly_citations[i] += n;
    }

    /// Pads (or truncates) the history so it ends exactly at `last_month`.
    pub fn fit_to(&mut self, last_month: u32) {
        let len = (last_month + 1).saturating_sub(self.entry_month) as usize;
        self.monthly_citations.resize(len, 0);
        let keep = self.paper_count(last_month);
        self.paper_months.truncate(keep);
    }

    /// Running sums `k^t` for `t = entry_month ..= entry_month + len - 1`.
    pub fn cumulative_series(&self) -> Vec<u64> {
        self.monthly_citations
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += u64::from(c);
                Some(*acc)
            })
            .collect()
    }
}

/// `Δk^{[t, t-w]} = k^t - k^{t-w}`: citations over the months `(t-w, t]`.
/// Months before the author's entry contribute nothing.
pub fn citations_in_window(state: &AuthorState, t: u32, w: u32) -> u64 {
    assert!(w >= 1, "window must span at least one month");
    state.sum_months((t + 1).saturating_sub(w), t)
}

/// Author histories observed up to `last_month`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Histories {
    pub authors: BTreeMap<String, AuthorState>,
    pub last_month: u32,
}

impl Histories {
    pub fn len(&self) -> usize {
        self.authors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.authors.is_empty()
    }

    pub fn get(&self, author_id: &str) -> Option<&AuthorState> {
        self.authors.get(author_id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AuthorState> {
        self.authors.values()
    }

    /// Authors present at month `t` and their total citations through `t`.
    pub fn totals_at(&self, t: u32) -> (usize, u64) {
        self.iter()
            .filter(|a| a.entry_month <= t)
            .fold((0, 0), |(n, k), a| (n + 1, k + a.cumulative(t)))
    }

    /// Histories cut at `last_month`; later authors are dropped.
    pub fn truncated(&self, last_month: u32) -> Histories {
        let authors = self
            .authors
            .iter()
            .filter(|(_, a)| a.entry_month <= last_month)
            .map(|(id, a)| {
                let mut a = a.clone();
                a.fit_to(last_month);
                (id.clone(), a)
            })
            .collect();
        Histories {
            authors,
            last_month,
        }
    }

    /// Same authors with every citation before `t_in` removed.
    pub fn since(&self, t_in: u32) -> Histories {
        let mut out = self.clone();
        for a in out.authors.values_mut() {
            let cut = (t_in.saturating_sub(a.entry_month) as usize).min(a.monthly_citations.len());
            a.monthly_citations[..cut].fill(0);
        }
        out
    }

    /// Rows `author_id,month,monthly,cumulative`: the entry month, every month
    /// with citations, and the final month of each author.
    pub fn write_history_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["author_id", "month", "monthly", "cumulative"])?;
        for a in self.iter() {
            let mut cum = 0u64;
            for t in a.entry_month..=self.last_month.max(a.entry_month) {
                let m = a.monthly(t);
                cum += u64::from(m);
                if m > 0 || t == a.entry_month || t == self.last_month {
                    w.write_record([
                        a.author_id.clone(),
                        t.to_string(),
                        m.to_string(),
                        cum.to_string(),
                    ])?;
                }
            }
        }
        w.flush().map_err(|e| Error::io("<history csv>", e))
    }

    /// Rows `author_id,entry_month,paper_months` with months joined by `;`.
    pub fn write_authors_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["author_id", "entry_month", "paper_months"])?;
        for a in self.iter() {
            let months: Vec<String> = a.paper_months.iter().map(u32::to_string).collect();
            w.write_record([
                a.author_id.clone(),
                a.entry_month.to_string(),
                months.join(";"),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<authors csv>", e))
    }

    /// Inverse of [`Histories::write_history_csv`], optionally enriched with
    /// the paper months written by [`Histories::write_authors_csv`].
    pub fn read_csv(history: impl Read, authors: Option<impl Read>) -> Result<Histories> {
        #[derive(Deserialize)]
        struct Row {
            author_id: String,
            month: u32,
            monthly: u32,
        }
        let mut map: BTreeMap<String, AuthorState> = BTreeMap::new();
        let mut last_month = 0;
        for row in csv::Reader::from_reader(history).deserialize() {
            let row: Row = row?;
            last_month = last_month.max(row.month);
            let a = map
                .entry(row.author_id.clone())
                .or_insert_with(|| AuthorState::with_history(row.author_id, row.month, vec![]));
            if row.month < a.entry_month {
                return Err(Error::InvalidConfig(format!(
                    "history rows of `{}` are not in month order",
                    a.author_id
                )));
            }
            if row.monthly > 0 {
                a.add_citations(row.month, row.monthly);
            }
        }
        if let Some(authors) = authors {
            #[derive(Deserialize)]
            struct AuthorRow {
                author_id: String,
                paper_months: String,
            }
            for row in csv::Reader::from_reader(authors).deserialize() {
                let row: AuthorRow = row?;
                if let Some(a) = map.get_mut(&row.author_id) {
                    a.paper_months = row
                        .paper_months
                        .split(';')
                        .filter(|s| !s.is_empty())
                        .map(|s| {
                            s.parse()
                                .map_err(|_| Error::InvalidConfig(format!("bad paper month `{s}`")))
                        })
                        .collect::<Result<_>>()?;
                }
            }
        }
        for a in map.values_mut() {
            a.fit_to(last_month);
        }
        Ok(Histories {
            authors: map,
            last_month,
        })
    }
}

/// One weighted link from a citing paper to a cited author.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BpanEdge {
    pub citing_paper: String,
    pub cited_author: String,
    pub weight: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Drop links from a paper to its own authors.
    pub exclude_self_citations: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bpan {
    pub histories: Histories,
    pub edges: Vec<BpanEdge>,
    pub papers_by_month: BTreeMap<u32, Vec<String>>,
    /// Author-citations issued by each paper (sum of its outgoing weights).
    pub issued: HashMap<String, u64>,
}

impl Bpan {
    pub fn build(corpus: &Corpus) -> Bpan {
        Self::build_with(corpus, BuildOptions::default())
    }

    pub fn build_with(corpus: &Corpus, opts: BuildOptions) -> Bpan {
        let mut authors: BTreeMap<String, AuthorState> = BTreeMap::new();
        let mut papers_by_month: BTreeMap<u32, Vec<String>> = BTreeMap::new();
        for p in corpus.papers() {
            papers_by_month
                .entry(p.month)
                .or_default()
                .push(p.paper_id.clone());
            for a in &p.author_ids {
                authors
                    .entry(a.clone())
                    .or_insert_with(|| AuthorState::new(a.clone(), p.month))
                    .paper_months
                    .push(p.month);
            }
        }

        let mut edges = Vec::new();
        let mut issued = HashMap::with_capacity(corpus.len());
        for p in corpus.papers() {
            let mut weights: BTreeMap<&str, u32> = BTreeMap::new();
            for r in corpus.resolved_references(p) {
                for a in &r.author_ids {
                    if opts.exclude_self_citations && p.author_ids.contains(a) {
                        continue;
                    }
                    *weights.entry(a.as_str()).or_default() += 1;
                }
            }
            let mut out = 0u64;
            for (a, w) in weights {
                // Resolved references never postdate the citing paper, so the
                // cited author has already entered.
                let state = authors.get_mut(a).expect("cited author registered");
                state.add_citations(p.month, w);
                out += u64::from(w);
                edges.push(BpanEdge {
                    citing_paper: p.paper_id.clone(),
                    cited_author: a.to_string(),
                    weight: w,
                });
            }
            issued.insert(p.paper_id.clone(), out);
        }

        let last_month = corpus.month_range().map_or(0, |(_, last)| last);
        for a in authors.values_mut() {
            a.fit_to(last_month);
        }
        Bpan {
            histories: Histories {
                authors,
                last_month,
            },
            edges,
            papers_by_month,
            issued,
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| u64::from(e.weight)).sum()
    }

    /// `c_p` as booked in this network (after any build exclusions).
    pub fn issued_by(&self, paper_id: &str) -> u64 {
        self.issued.get(paper_id).copied().unwrap_or(0)
    }

    pub fn write_edges_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for e in &self.edges {
            w.serialize(e)?;
        }
        w.flush().map_err(|e| Error::io("<edge csv>", e))
    }
}

/// `c_p`: author-citations issued by `paper`, one per author of each
/// distinct resolvable reference, counting shared authors once per reference.
pub fn author_count_cited_by(paper: &PaperRecord, corpus: &Corpus) -> u64 {
    corpus
        .resolved_references(paper)
        .map(|r| r.author_ids.len() as u64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> Corpus {
        Corpus::new(vec![
            PaperRecord::new("R1", 0, &["a", "b"], &[]),
            PaperRecord::new("R2", 0, &["b", "c"], &[]),
            PaperRecord::new("P", 1, &["d"], &["R1", "R2"]),
        ])
        .unwrap()
    }

    #[test]
    fn weight_counts_coauthored_references() {
        let bpan = Bpan::build(&fig1());
        let edges: Vec<_> = bpan
            .edges
            .iter()
            .map(|e| (e.citing_paper.as_str(), e.cited_author.as_str(), e.weight))
            .collect();
        assert_eq!(edges, [("P", "a", 1), ("P", "b", 2), ("P", "c", 1)]);
        assert_eq!(bpan.issued_by("P"), 4);
        assert_eq!(bpan.histories.get("b").unwrap().cumulative(1), 2);
        assert_eq!(bpan.histories.get("b").unwrap().cumulative(0), 0);
    }

    #[test]
    fn c_p_counts_shared_author_per_reference() {
        let c = fig1();
        assert_eq!(author_count_cited_by(c.get("P").unwrap(), &c), 4);
        assert_eq!(author_count_cited_by(c.get("R1").unwrap(), &c), 0);
    }

    #[test]
    fn no_references_means_no_edges() {
        let c = Corpus::new(vec![
            PaperRecord::new("x", 0, &["a"], &[]),
            PaperRecord::new("y", 4, &["a", "b"], &[]),
        ])
        .unwrap();
        let bpan = Bpan::build(&c);
        assert!(bpan.edges.is_empty());
        assert!(bpan.histories.iter().all(|a| a.total() == 0));
        assert_eq!(bpan.histories.get("b").unwrap().entry_month, 4);
        assert_eq!(bpan.histories.get("a").unwrap().paper_count(4), 2);
    }

    #[test]
    fn self_citation_exclusion() {
        let c = Corpus::new(vec![
            PaperRecord::new("R", 0, &["a", "b"], &[]),
            PaperRecord::new("P", 1, &["a"], &["R"]),
        ])
        .unwrap();
        assert_eq!(Bpan::build(&c).total_weight(), 2);
        let ex = Bpan::build_with(
            &c,
            BuildOptions {
                exclude_self_citations: true,
            },
        );
        assert_eq!(ex.total_weight(), 1);
        assert_eq!(ex.issued_by("P"), 1);
        assert_eq!(ex.histories.get("a").unwrap().total(), 0);
    }

    #[test]
    fn window_examples() {
        let s = AuthorState::with_history("x", 0, vec![5, 0, 3]);
        assert_eq!(citations_in_window(&s, 2, 12), 8);
        assert_eq!(citations_in_window(&s, 2, 1), 3);
        assert_eq!(citations_in_window(&s, 1, 1), 0);
        assert_eq!(citations_in_window(&s, 40, 12), 0);

        let late = AuthorState::with_history("y", 10, vec![1, 2, 3]);
        assert_eq!(citations_in_window(&late, 11, 12), 3);
        assert_eq!(citations_in_window(&late, 9, 12), 0);
        assert_eq!(late.cumulative(5), 0);
        assert_eq!(late.cumulative_before(12), 3);
    }

    #[test]
    fn since_and_truncated() {
        let mut h = Histories::default();
        h.authors.insert(
            "x".into(),
            AuthorState::with_history("x", 1, vec![1, 2, 3, 4]),
        );
        h.last_month = 4;
        let s = h.since(3);
        assert_eq!(s.get("x").unwrap().monthly_citations, [0, 0, 3, 4]);
        let t = h.truncated(2);
        assert_eq!(t.get("x").unwrap().monthly_citations, [1, 2]);
        assert_eq!(h.truncated(0).len(), 0);
        assert_eq!(h.totals_at(2), (1, 3));
    }

    #[test]
    fn history_csv_round_trips() {
        let c = fig1();
        let bpan = Bpan::build(&c);
        let mut hist = Vec::new();
        let mut auth = Vec::new();
        bpan.histories.write_history_csv(&mut hist).unwrap();
        bpan.histories.write_authors_csv(&mut auth).unwrap();
        let back = Histories::read_csv(hist.as_slice(), Some(auth.as_slice())).unwrap();
        assert_eq!(back, bpan.histories);
        let text = String::from_utf8(hist).unwrap();
        assert!(text.starts_with("author_id,month,monthly,cumulative\n"));
        assert!(text.contains("b,1,2,2\n"));
    }
}

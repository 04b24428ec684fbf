//! Bibliographic corpora: loading, writing and synthetic generation.

mod epoch;
mod io;
mod synthetic;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use epoch::Epoch;
pub use io::{load_corpus, load_corpus_with_epoch, read_corpus, write_corpus};
pub use synthetic::{
    generate_synthetic, generate_synthetic_with_stats, DiscreteDist, PaperSchedule, SynthStats,
    SyntheticSpec,
};

/// One publication event.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    /// Months since the epoch month.
    pub month: u32,
    #[serde(rename = "authors")]
    pub author_ids: Vec<String>,
    #[serde(rename = "references", default)]
    pub reference_ids: Vec<String>,
}

impl PaperRecord {
    pub fn new(
        paper_id: impl Into<String>,
        month: u32,
        authors: &[&str],
        references: &[&str],
    ) -> Self {
        PaperRecord {
            paper_id: paper_id.into(),
            month,
            author_ids: authors.iter().map(|a| a.to_string()).collect(),
            reference_ids: references.iter().map(|r| r.to_string()).collect(),
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.author_ids.is_empty() {
            return Err(Error::EmptyAuthors(self.paper_id.clone()));
        }
        for (i, a) in self.author_ids.iter().enumerate() {
            if self.author_ids[..i].contains(a) {
                return Err(Error::DuplicateAuthor {
                    paper: self.paper_id.clone(),
                    author: a.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Papers sorted by `(month, paper_id)` with unique ids.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    papers: Vec<PaperRecord>,
    index: HashMap<String, usize>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.papers == other.papers
    }
}

impl Eq for Corpus {}

impl Corpus {
    pub fn new(mut papers: Vec<PaperRecord>) -> Result<Self> {
        for p in &papers {
            p.check()?;
        }
        papers.sort_by(|a, b| (a.month, &a.paper_id).cmp(&(b.month, &b.paper_id)));
        let mut index = HashMap::with_capacity(papers.len());
        for (i, p) in papers.iter().enumerate() {
            if index.insert(p.paper_id.clone(), i).is_some() {
                return Err(Error::DuplicatePaper(p.paper_id.clone()));
            }
        }
        Ok(Corpus { papers, index })
    }

    pub fn papers(&self) -> &[PaperRecord] {
        &self.papers
    }

    pub fn len(&self) -> usize {
        self.papers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.papers.is_empty()
    }

    pub fn get(&self, paper_id: &str) -> Option<&PaperRecord> {
        self.index.get(paper_id).map(|&i| &self.papers[i])
    }

    /// `[first_month, last_month]`, `None` for an empty corpus.
    pub fn month_range(&self) -> Option<(u32, u32)> {
        Some((self.papers.first()?.month, self.papers.last()?.month))
    }

    /// Papers of month `t`, in corpus order.
    pub fn papers_in_month(&self, t: u32) -> &[PaperRecord] {
        let lo = self.papers.partition_point(|p| p.month < t);
        let hi = self.papers.partition_point(|p| p.month <= t);
        &self.papers[lo..hi]
    }

    pub fn reference_count(&self) -> usize {
        self.papers.iter().map(|p| p.reference_ids.len()).sum()
    }

    /// Number of distinct authors.
    pub fn author_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        for p in &self.papers {
            for a in &p.author_ids {
                seen.insert(a.as_str());
            }
        }
        seen.len()
    }

    /// Distinct references of `paper` that resolve to another paper of the
    /// corpus published no later than `paper`.
    pub fn resolved_references<'a>(
        &'a self,
        paper: &'a PaperRecord,
    ) -> impl Iterator<Item = &'a PaperRecord> + 'a {
        paper
            .reference_ids
            .iter()
            .enumerate()
            .filter(move |(i, r)| *r != &paper.paper_id && !paper.reference_ids[..*i].contains(r))
            .filter_map(move |(_, r)| self.get(r))
            .filter(move |r| r.month <= paper.month)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_by_month_then_id() {
        let c = Corpus::new(vec![
            PaperRecord::new("b", 2, &["x"], &[]),
            PaperRecord::new("c", 0, &["x"], &[]),
            PaperRecord::new("a", 2, &["y"], &[]),
        ])
        .unwrap();
        let ids: Vec<_> = c.papers().iter().map(|p| p.paper_id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
        assert_eq!(c.month_range(), Some((0, 2)));
        assert_eq!(c.papers_in_month(2).len(), 2);
        assert!(c.papers_in_month(1).is_empty());
    }

    #[test]
    fn rejects_duplicates_and_empty_authors() {
        let dup = Corpus::new(vec![
            PaperRecord::new("a", 0, &["x"], &[]),
            PaperRecord::new("a", 1, &["y"], &[]),
        ]);
        assert!(matches!(dup, Err(Error::DuplicatePaper(id)) if id == "a"));

        let empty = Corpus::new(vec![PaperRecord::new("a", 0, &[], &[])]);
        assert!(matches!(empty, Err(Error::EmptyAuthors(_))));

        let twice = Corpus::new(vec![PaperRecord::new("a", 0, &["x", "x"], &[])]);
        assert!(matches!(twice, Err(Error::DuplicateAuthor { .. })));
    }

    #[test]
    fn resolved_references_skip_unknown_self_and_repeats() {
        let c = Corpus::new(vec![
            PaperRecord::new("r", 0, &["x"], &[]),
            PaperRecord::new("p", 1, &["y"], &["r", "ghost", "p", "r", "later"]),
            PaperRecord::new("later", 2, &["z"], &[]),
        ])
        .unwrap();
        let p = c.get("p").unwrap();
        let refs: Vec<_> = c.resolved_references(p).map(|r| &r.paper_id).collect();
        assert_eq!(refs, ["r"]);
    }
}

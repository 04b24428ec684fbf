//! Month-by-month replay of a corpus under an attachment kernel.
//!
//! The publication stream is kept verbatim: every paper appears in its real
//! month with its real authors and issues its real number of
//! author-citations `c_p`. Only the cited authors are redrawn from the
//! kernel, so the simulated system always has the same number of authors and
//! the same citation total as the data.

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bpan::{citations_in_window, AuthorState, Bpan, Histories};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::kernels::{FenwickSampler, KernelKind, KernelParams, PrefixSampler, UpdateMode};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StartMode {
    /// Authors existing before `t_in` start with empty histories.
    Cold,
    /// Histories before `t_in` are copied from the data.
    #[default]
    Warm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t_in: u32,
    pub t_f: u32,
    pub kernel: KernelParams,
    pub seed: u64,
    #[serde(default)]
    pub start_mode: StartMode,
    #[serde(default)]
    pub update_mode: UpdateMode,
    /// Forbid a paper from citing its own authors.
    #[serde(default)]
    pub exclude_self: bool,
}

impl SimConfig {
    pub fn new(t_in: u32, t_f: u32, kernel: KernelParams, seed: u64) -> Self {
        SimConfig {
            t_in,
            t_f,
            kernel,
            seed,
            start_mode: StartMode::default(),
            update_mode: UpdateMode::default(),
            exclude_self: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthTotals {
    pub month: u32,
    pub authors: usize,
    pub citations: u64,
}

/// Result of one replica.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub histories: Histories,
    pub month_cursor: u32,
    pub author_count: usize,
    pub citation_total: u64,
    /// Running totals after each simulated month.
    pub trace: Vec<MonthTotals>,
}

impl SimState {
    pub fn snapshot(&self, t: u32) -> Vec<SnapshotRow> {
        snapshot(&self.histories, t)
    }
}

struct ReplayPaper {
    month: u32,
    authors: Vec<u32>,
    issued: u64,
}

/// Corpus and empirical network preprocessed for repeated replicas.
///
/// Authors are numbered by first appearance, so the authors present at any
/// month form a prefix of the numbering.
pub struct Replay {
    ids: Vec<String>,
    entry: Vec<u32>,
    paper_months: Vec<Vec<u32>>,
    papers: Vec<ReplayPaper>,
    empirical: Histories,
    month_range: (u32, u32),
}

impl Replay {
    pub fn new(corpus: &Corpus, bpan: &Bpan) -> Result<Self> {
        let month_range = corpus
            .month_range()
            .ok_or_else(|| Error::InvalidConfig("cannot simulate an empty corpus".into()))?;
        let mut index: HashMap<&str, u32> = HashMap::new();
        let mut ids = Vec::new();
        let mut entry = Vec::new();
        let mut paper_months: Vec<Vec<u32>> = Vec::new();
        let mut papers = Vec::with_capacity(corpus.len());
        for p in corpus.papers() {
            let mut authors = Vec::with_capacity(p.author_ids.len());
            for a in &p.author_ids {
                let i = *index.entry(a.as_str()).or_insert_with(|| {
                    ids.push(a.clone());
                    entry.push(p.month);
                    paper_months.push(Vec::new());
                    (ids.len() - 1) as u32
                });
                paper_months[i as usize].push(p.month);
                authors.push(i);
            }
            papers.push(ReplayPaper {
                month: p.month,
                authors,
                issued: bpan.issued_by(&p.paper_id),
            });
        }
        Ok(Replay {
            ids,
            entry,
            paper_months,
            papers,
            empirical: bpan.histories.clone(),
            month_range,
        })
    }

    pub fn month_range(&self) -> (u32, u32) {
        self.month_range
    }

    pub fn empirical(&self) -> &Histories {
        &self.empirical
    }

    /// Empirical histories commensurate with a run of `config`: cut at
    /// `t_f`, and without pre-`t_in` citations in cold mode.
    pub fn empirical_view(&self, config: &SimConfig) -> Histories {
        let cut = self.empirical.truncated(config.t_f);
        match config.start_mode {
            StartMode::Warm => cut,
            StartMode::Cold => cut.since(config.t_in),
        }
    }

    /// Empirical running totals over `[t_in, t_f]`, the conservation target.
    pub fn empirical_trace(&self, config: &SimConfig) -> Vec<MonthTotals> {
        let view = self.empirical_view(config);
        (config.t_in..=config.t_f)
            .map(|t| {
                let (authors, citations) = view.totals_at(t);
                MonthTotals {
                    month: t,
                    authors,
                    citations,
                }
            })
            .collect()
    }

    fn check(&self, config: &SimConfig) -> Result<()> {
        config.kernel.validate()?;
        let (first, last) = self.month_range;
        if config.t_in > config.t_f {
            return Err(Error::InvalidConfig(format!(
                "t_in {} is after t_f {}",
                config.t_in, config.t_f
            )));
        }
        if config.t_in < first || config.t_f > last {
            return Err(Error::InvalidConfig(format!(
                "simulation months [{}, {}] outside corpus range [{first}, {last}]",
                config.t_in, config.t_f
            )));
        }
        Ok(())
    }

    pub fn run(&self, config: &SimConfig) -> Result<SimState> {
        self.check(config)?;
        let kernel = config.kernel;
        let additive = kernel.additive;
        let window = kernel.window.unwrap_or(1);
        let n_total = self.entry.partition_point(|&e| e <= config.t_f);

        // Histories indexed by month - entry, sized through t_f.
        let mut monthly: Vec<Vec<u32>> = (0..n_total)
            .map(|i| {
                let len = (config.t_f - self.entry[i] + 1) as usize;
                let mut h = vec![0u32; len];
                if config.start_mode == StartMode::Warm {
                    let emp = &self.empirical.authors[&self.ids[i]];
                    let pre = (config.t_in.saturating_sub(self.entry[i]) as usize).min(len);
                    for (slot, m) in h[..pre].iter_mut().zip(&emp.monthly_citations) {
                        *slot = *m;
                    }
                }
                h
            })
            .collect();
        let at = |h: &Vec<u32>, entry: u32, t: u32| -> u64 {
            t.checked_sub(entry)
                .and_then(|i| h.get(i as usize))
                .map_or(0, |&c| u64::from(c))
        };

        // Start-of-month counts: total before t (PA) or trailing window (recency).
        let mut count: Vec<u64> = (0..n_total)
            .map(|i| {
                let state = AuthorState::with_history("", self.entry[i], monthly[i].clone());
                match (kernel.kind, config.t_in.checked_sub(1)) {
                    (_, None) => 0,
                    (KernelKind::Preferential, Some(prev)) => state.cumulative(prev),
                    (KernelKind::Recency, Some(prev)) => citations_in_window(&state, prev, window),
                }
            })
            .collect();

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut citation_total: u64 = match config.start_mode {
            StartMode::Warm => monthly.iter().flatten().map(|&c| u64::from(c)).sum(),
            StartMode::Cold => 0,
        };
        let mut trace = Vec::with_capacity((config.t_f - config.t_in + 1) as usize);
        let mut paper_cursor = self.papers.partition_point(|p| p.month < config.t_in);
        let mut weights: Vec<f64> = Vec::with_capacity(n_total);

        for t in config.t_in..=config.t_f {
            if t > config.t_in {
                let prev = t - 1;
                for i in 0..self.entry.partition_point(|&e| e <= prev) {
                    let e = self.entry[i];
                    count[i] += at(&monthly[i], e, prev);
                    if kernel.kind == KernelKind::Recency {
                        if let Some(old) = prev.checked_sub(window) {
                            count[i] -= at(&monthly[i], e, old);
                        }
                    }
                }
            }
            let present = self.entry.partition_point(|&e| e <= t);
            weights.clear();
            weights.extend(count[..present].iter().map(|&k| additive + k as f64));

            let month_end =
                paper_cursor + self.papers[paper_cursor..].partition_point(|p| p.month <= t);
            let month_papers = &self.papers[paper_cursor..month_end];
            paper_cursor = month_end;
            let issued: u64 = month_papers.iter().map(|p| p.issued).sum();

            if issued > 0 {
                let land = |i: usize, monthly: &mut Vec<Vec<u32>>| {
                    monthly[i][(t - self.entry[i]) as usize] += 1;
                };
                match config.update_mode {
                    UpdateMode::PerMonth => {
                        let sampler = PrefixSampler::new(&weights)
                            .map_err(|_| Error::NoPositiveWeight { requested: issued })?;
                        for p in month_papers {
                            let own_weight: f64 = if config.exclude_self {
                                p.authors.iter().map(|&a| weights[a as usize]).sum()
                            } else {
                                0.0
                            };
                            if p.issued > 0
                                && sampler.total() - own_weight <= 1e-12 * sampler.total()
                            {
                                return Err(Error::NoPositiveWeight {
                                    requested: p.issued,
                                });
                            }
                            for _ in 0..p.issued {
                                let i = loop {
                                    let i = sampler.sample(&mut rng);
                                    if !config.exclude_self || !p.authors.contains(&(i as u32)) {
                                        break i;
                                    }
                                };
                                land(i, &mut monthly);
                            }
                        }
                    }
                    UpdateMode::PerCitation => {
                        let mut sampler = FenwickSampler::new(&weights)?;
                        for p in month_papers {
                            for _ in 0..p.issued {
                                let i = if config.exclude_self {
                                    let own: f64 =
                                        p.authors.iter().map(|&a| sampler.weight(a as usize)).sum();
                                    if sampler.total() - own <= 1e-12 * sampler.total() {
                                        return Err(Error::NoPositiveWeight {
                                            requested: p.issued,
                                        });
                                    }
                                    loop {
                                        let i = sampler.sample(&mut rng)?;
                                        if !p.authors.contains(&(i as u32)) {
                                            break i;
                                        }
                                    }
                                } else {
                                    sampler.sample(&mut rng)?
                                };
                                land(i, &mut monthly);
                                sampler.add(i, 1.0);
                            }
                        }
                    }
                }
            }
            citation_total += issued;
            trace.push(MonthTotals {
                month: t,
                authors: present,
                citations: citation_total,
            });
        }

        let authors: BTreeMap<String, AuthorState> = monthly
            .into_iter()
            .enumerate()
            .map(|(i, h)| {
                let keep = self.paper_months[i].partition_point(|&m| m <= config.t_f);
                let state = AuthorState {
                    author_id: self.ids[i].clone(),
                    entry_month: self.entry[i],
                    monthly_citations: h,
                    paper_months: self.paper_months[i][..keep].to_vec(),
                };
                (self.ids[i].clone(), state)
            })
            .collect();
        Ok(SimState {
            histories: Histories {
                authors,
                last_month: config.t_f,
            },
            month_cursor: config.t_f,
            author_count: n_total,
            citation_total,
            trace,
        })
    }
}

/// Builds the empirical network with default options and runs one replica.
pub fn run(corpus: &Corpus, config: &SimConfig) -> Result<SimState> {
    let bpan = Bpan::build(corpus);
    Replay::new(corpus, &bpan)?.run(config)
}

/// One author at a given month.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRow {
    pub author_id: String,
    /// Citations through the month.
    pub k: u64,
    /// Citations over the trailing 12 months.
    pub delta_k: u64,
    /// Months since entry.
    pub age: u32,
    pub paper_count: usize,
}

pub fn snapshot(histories: &Histories, t: u32) -> Vec<SnapshotRow> {
    histories
        .iter()
        .filter(|a| a.entry_month <= t)
        .map(|a| SnapshotRow {
            author_id: a.author_id.clone(),
            k: a.cumulative(t),
            delta_k: citations_in_window(a, t, 12),
            age: t - a.entry_month,
            paper_count: a.paper_count(t),
        })
        .collect()
}

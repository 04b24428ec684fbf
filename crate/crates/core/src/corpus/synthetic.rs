//! Synthetic corpora whose citations follow an author-level kernel.
//!
//! Every month the generator weighs the authors active before that month
//! with the target kernel (evaluated on the citations the generated corpus
//! has booked so far), draws an author per reference, and cites a uniformly
//! chosen earlier paper of that author. All coauthors of the cited paper
//! collect the citation, exactly as the bipartite network later counts it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Corpus, PaperRecord};
use crate::bpan::AuthorState;
use crate::error::{Error, Result};
use crate::kernels::{KernelParams, PrefixSampler};

/// Finite-support distribution over non-negative counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscreteDist {
    Constant(u32),
    Uniform {
        min: u32,
        max: u32,
    },
    /// `(value, weight)` pairs.
    Weighted(Vec<(u32, f64)>),
    /// Poisson with mean `mean`, truncated to `[min, max]`.
    Poisson {
        mean: f64,
        min: u32,
        max: u32,
    },
}

impl DiscreteDist {
    fn validate(&self, what: &str) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(format!("{what}: {m}")));
        match self {
            DiscreteDist::Constant(_) => Ok(()),
            DiscreteDist::Uniform { min, max } if min > max => {
                bad(format!("min {min} > max {max}"))
            }
            DiscreteDist::Uniform { .. } => Ok(()),
            DiscreteDist::Weighted(pairs) => {
                if pairs.iter().any(|&(_, w)| !(w >= 0.0 && w.is_finite())) {
                    return bad("weights must be finite and non-negative".into());
                }
                if !pairs.iter().any(|&(_, w)| w > 0.0) {
                    return bad("needs a positive weight".into());
                }
                Ok(())
            }
            DiscreteDist::Poisson { mean, min, max } => {
                if !(*mean >= 0.0 && mean.is_finite()) {
                    return bad(format!("mean {mean} must be finite and >= 0"));
                }
                if min > max {
                    return bad(format!("min {min} > max {max}"));
                }
                Ok(())
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            DiscreteDist::Constant(c) => f64::from(*c),
            DiscreteDist::Uniform { min, max } => (f64::from(*min) + f64::from(*max)) / 2.0,
            DiscreteDist::Weighted(pairs) => {
                let total: f64 = pairs.iter().map(|p| p.1).sum();
                pairs.iter().map(|&(v, w)| f64::from(v) * w).sum::<f64>() / total
            }
            DiscreteDist::Poisson { mean, .. } => *mean,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match self {
            DiscreteDist::Constant(c) => *c,
            DiscreteDist::Uniform { min, max } => rng.gen_range(*min..=*max),
            DiscreteDist::Weighted(pairs) => {
                let total: f64 = pairs.iter().map(|p| p.1).sum();
                let mut u = rng.gen::<f64>() * total;
                for &(v, w) in pairs {
                    if u < w {
                        return v;
                    }
                    u -= w;
                }
                pairs.iter().rev().find(|p| p.1 > 0.0).map_or(0, |p| p.0)
            }
            DiscreteDist::Poisson { mean, min, max } => {
                // Inversion; the support is truncated so the loop is bounded.
                let u: f64 = rng.gen();
                let mut p = (-mean).exp();
                let mut cdf = p;
                let mut k = 0u32;
                while u > cdf && k < *max {
                    k += 1;
                    p *= mean / f64::from(k);
                    cdf += p;
                }
                k.clamp(*min, *max)
            }
        }
    }
}

/// Papers published per month.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PaperSchedule {
    Constant(u32),
    /// Linear interpolation from `start` (month 0) to `end` (last month).
    Linear {
        start: u32,
        end: u32,
    },
}

impl PaperSchedule {
    pub fn papers_in(&self, t: u32, months: u32) -> u32 {
        match *self {
            PaperSchedule::Constant(n) => n,
            PaperSchedule::Linear { start, end } => {
                if months <= 1 {
                    return start;
                }
                let f = f64::from(t) / f64::from(months - 1);
                (f64::from(start) + f * (f64::from(end) - f64::from(start))).round() as u32
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub months: u32,
    pub papers_per_month: PaperSchedule,
    pub authors_per_paper: DiscreteDist,
    pub refs_per_paper: DiscreteDist,
    /// Chance that an author slot is filled by a newcomer; otherwise an
    /// existing author is drawn proportionally to their paper count.
    #[serde(default = "default_new_author_prob")]
    pub new_author_prob: f64,
    pub target_kernel: KernelParams,
    pub seed: u64,
}

fn default_new_author_prob() -> f64 {
    0.3
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        self.authors_per_paper.validate("authors_per_paper")?;
        self.refs_per_paper.validate("refs_per_paper")?;
        if !(0.0..=1.0).contains(&self.new_author_prob) {
            return Err(Error::InvalidConfig(format!(
                "new_author_prob {} outside [0, 1]",
                self.new_author_prob
            )));
        }
        self.target_kernel.validate()
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: SyntheticSpec =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SyntheticSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Bookkeeping from one generator run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynthStats {
    /// Reference draws after clamping to the number of citable papers.
    pub reference_draws: u64,
    pub authors: usize,
    pub papers: usize,
    /// Author-citation units booked into the generator's own histories.
    pub citations_booked: u64,
}

struct GenAuthor {
    state: AuthorState,
    /// Indices of the author's papers, in publication order.
    papers: Vec<usize>,
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Corpus> {
    generate_synthetic_with_stats(spec).map(|(c, _)| c)
}

pub fn generate_synthetic_with_stats(spec: &SyntheticSpec) -> Result<(Corpus, SynthStats)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut authors: Vec<GenAuthor> = Vec::new();
    // One slot per authorship: uniform picks are productivity-proportional.
    let mut urn: Vec<usize> = Vec::new();
    let mut papers: Vec<PaperRecord> = Vec::new();
    let mut paper_authors: Vec<Vec<usize>> = Vec::new();
    let mut stats = SynthStats::default();

    for t in 0..spec.months {
        // Authors and papers that existed before this month are citable.
        let citable_authors = authors.len();
        let citable_papers = papers.len();
        let sampler = if citable_authors > 0 {
            let weights: Vec<f64> = authors
                .iter()
                .map(|a| spec.target_kernel.weight_at_start(&a.state, t))
                .collect();
            PrefixSampler::new(&weights).ok()
        } else {
            None
        };

        let first_of_month = papers.len();
        for _ in 0..spec.papers_per_month.papers_in(t, spec.months) {
            let idx = papers.len();
            let n_auth = spec.authors_per_paper.sample(&mut rng).max(1);
            let mut team: Vec<usize> = Vec::with_capacity(n_auth as usize);
            for _ in 0..n_auth {
                let mut pick = None;
                if !urn.is_empty() && rng.gen::<f64>() >= spec.new_author_prob {
                    for _ in 0..16 {
                        let a = urn[rng.gen_range(0..urn.len())];
                        if !team.contains(&a) {
                            pick = Some(a);
                            break;
                        }
                    }
                }
                let a = pick.unwrap_or_else(|| {
                    let id = authors.len();
                    authors.push(GenAuthor {
                        state: AuthorState::new(format!("A{id:06}"), t),
                        papers: Vec::new(),
                    });
                    id
                });
                team.push(a);
            }
            for &a in &team {
                urn.push(a);
                authors[a].papers.push(idx);
                authors[a].state.paper_months.push(t);
            }

            let mut refs: Vec<usize> = Vec::new();
            if let Some(sampler) = &sampler {
                let want = spec.refs_per_paper.sample(&mut rng) as usize;
                let want = want.min(citable_papers);
                stats.reference_draws += want as u64;
                for _ in 0..want {
                    let mut chosen = None;
                    for _ in 0..32 {
                        let a = &authors[sampler.sample(&mut rng)];
                        let prior = a.papers.partition_point(|&p| p < first_of_month);
                        let p = a.papers[rng.gen_range(0..prior)];
                        if !refs.contains(&p) {
                            chosen = Some(p);
                            break;
                        }
                    }
                    let p = chosen.unwrap_or_else(|| {
                        // Saturated: take any earlier paper not yet cited.
                        let start = rng.gen_range(0..citable_papers);
                        (0..citable_papers)
                            .map(|k| (start + k) % citable_papers)
                            .find(|p| !refs.contains(p))
                            .expect("want <= citable papers")
                    });
                    refs.push(p);
                }
            }

            papers.push(PaperRecord {
                paper_id: format!("P{idx:07}"),
                month: t,
                author_ids: team
                    .iter()
                    .map(|&a| authors[a].state.author_id.clone())
                    .collect(),
                reference_ids: refs.iter().map(|&r| papers[r].paper_id.clone()).collect(),
            });
            paper_authors.push(team);
            for r in refs {
                let team = &paper_authors[r];
                for &a in team {
                    authors[a].state.add_citations(t, 1);
                }
                stats.citations_booked += team.len() as u64;
            }
        }
    }

    stats.authors = authors.len();
    stats.papers = papers.len();
    let corpus = Corpus::new(papers)?;
    Ok((corpus, stats))
}

//! Attachment kernels and exact weighted sampling.
//!
//! Each existing author gets a weight; new author-citations are independent
//! draws, with replacement, from the normalized weights.
//!
//! * preferential attachment: `A + k_j`
//! * recency: `A + (k_j^t - k_j^{t-w})`

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bpan::{citations_in_window, AuthorState};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    #[serde(rename = "pa", alias = "preferential")]
    #[value(name = "pa", alias = "preferential")]
    Preferential,
    Recency,
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::Preferential => "pa",
            KernelKind::Recency => "recency",
        })
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pa" | "preferential" => Ok(KernelKind::Preferential),
            "recency" => Ok(KernelKind::Recency),
            other => Err(Error::InvalidKernel(format!(
                "unknown kernel `{other}` (valid kinds: pa, recency)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub kind: KernelKind,
    #[serde(rename = "A")]
    pub additive: f64,
    /// Trailing window in months; recency only.
    #[serde(rename = "w", default, skip_serializing_if = "Option::is_none")]
    pub window: Option<u32>,
}

impl KernelParams {
    pub fn preferential(additive: f64) -> Result<Self> {
        let p = KernelParams {
            kind: KernelKind::Preferential,
            additive,
            window: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn recency(additive: f64, window: u32) -> Result<Self> {
        let p = KernelParams {
            kind: KernelKind::Recency,
            additive,
            window: Some(window),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.additive.is_finite() {
            return Err(Error::InvalidKernel(format!(
                "A must be finite, got {}",
                self.additive
            )));
        }
        match self.kind {
            KernelKind::Preferential if self.additive <= 0.0 => Err(Error::InvalidKernel(format!(
                "preferential attachment needs A > 0, got {}",
                self.additive
            ))),
            KernelKind::Preferential => Ok(()),
            KernelKind::Recency if self.additive < 0.0 => Err(Error::InvalidKernel(format!(
                "recency needs A >= 0, got {}",
                self.additive
            ))),
            KernelKind::Recency => match self.window {
                Some(w) if w >= 1 => Ok(()),
                _ => Err(Error::InvalidKernel("recency needs a window w >= 1".into())),
            },
        }
    }

    /// Weight of `state` at the start of month `t`, i.e. from the
    /// citations of completed months only.
    pub fn weight_at_start(&self, state: &AuthorState, t: u32) -> f64 {
        let count = match (self.kind, t.checked_sub(1)) {
            (_, None) => 0,
            (KernelKind::Preferential, Some(prev)) => state.cumulative(prev),
            (KernelKind::Recency, Some(prev)) => {
                citations_in_window(state, prev, self.window.unwrap_or(1))
            }
        };
        self.additive + count as f64
    }
}

impl fmt::Display for KernelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.window {
            Some(w) => write!(f, "{}(A={}, w={})", self.kind, self.additive, w),
            None => write!(f, "{}(A={})", self.kind, self.additive),
        }
    }
}

/// When kernel weights are refreshed during a month.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateMode {
    /// Once at the start of each month.
    #[default]
    PerMonth,
    /// After every individual citation.
    PerCitation,
}

/// Preferential attachment weight `A + k`.
pub fn pa_weight(k_total: u64, additive: f64) -> Result<f64> {
    if additive <= 0.0 || !additive.is_finite() {
        return Err(Error::InvalidKernel(format!(
            "preferential attachment needs A > 0, got {additive}"
        )));
    }
    Ok(additive + k_total as f64)
}

/// Recency weight `A + Δk` over the months `(t - w, t]`.
pub fn recency_weight(state: &AuthorState, t: u32, params: &KernelParams) -> Result<f64> {
    if params.kind != KernelKind::Recency {
        return Err(Error::InvalidKernel(format!(
            "recency_weight called with {} parameters",
            params.kind
        )));
    }
    params.validate()?;
    let w = params.window.expect("validated recency window");
    Ok(params.additive + citations_in_window(state, t, w) as f64)
}

fn check_weights(weights: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::InvalidConfig(format!("weight #{i} is {w}")));
        }
        total += w;
    }
    Ok(total)
}

/// Static sampler: cumulative sums plus binary search.
#[derive(Debug, Clone)]
pub struct PrefixSampler {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl PrefixSampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        check_weights(weights)?;
        let last_positive = weights
            .iter()
            .rposition(|&w| w > 0.0)
            .ok_or(Error::NoPositiveWeight { requested: 1 })?;
        let cumulative = weights
            .iter()
            .scan(0.0, |acc, &w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(PrefixSampler {
            cumulative,
            last_positive,
        })
    }

    pub fn total(&self) -> f64 {
        self.cumulative[self.last_positive]
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = rng.gen::<f64>() * self.total();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.last_positive)
    }
}

/// Dynamic sampler over a Fenwick tree; weights may grow between draws.
#[derive(Debug, Clone)]
pub struct FenwickSampler {
    tree: Vec<f64>,
    weights: Vec<f64>,
    total: f64,
    top_bit: usize,
}

impl FenwickSampler {
    pub fn new(weights: &[f64]) -> Result<Self> {
        let total = check_weights(weights)?;
        let n = weights.len();
        let mut tree = vec![0.0; n + 1];
        tree[1..].copy_from_slice(weights);
        for j in 1..=n {
            let parent = j + (j & j.wrapping_neg());
            if parent <= n {
                tree[parent] += tree[j];
            }
        }
        let top_bit = if n == 0 {
            0
        } else {
            1 << (usize::BITS - 1 - n.leading_zeros())
        };
        Ok(FenwickSampler {
            tree,
            weights: weights.to_vec(),
            total,
            top_bit,
        })
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn add(&mut self, i: usize, delta: f64) {
        assert!(self.weights[i] + delta >= 0.0, "negative weight");
        self.weights[i] += delta;
        self.total += delta;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    fn descend(&self, mut u: f64) -> usize {
        let n = self.weights.len();
        let mut pos = 0;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= u {
                pos = next;
                u -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(n - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        if self.total <= 0.0 || self.weights.is_empty() {
            return Err(Error::NoPositiveWeight { requested: 1 });
        }
        loop {
            let i = self.descend(rng.gen::<f64>() * self.total);
            // Rounding in the tree can land on an empty slot; redraw.
            if self.weights[i] > 0.0 {
                return Ok(i);
            }
        }
    }
}

/// `c` independent draws, with replacement, proportional to `weights`.
pub fn sample_targets<R: Rng + ?Sized>(weights: &[f64], c: u64, rng: &mut R) -> Result<Vec<usize>> {
    if c == 0 {
        check_weights(weights)?;
        return Ok(Vec::new());
    }
    let sampler = PrefixSampler::new(weights).map_err(|e| match e {
        Error::NoPositiveWeight { .. } => Error::NoPositiveWeight { requested: c },
        e => e,
    })?;
    Ok((0..c).map(|_| sampler.sample(rng)).collect())
}

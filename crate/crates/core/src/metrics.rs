//! Observables of author citation dynamics.
//!
//! * citation distribution: `k_i^t` over all authors present at `t`;
//! * burst size over calendar year `y`: `b = (k^y - k^{y-1}) / k^{y-1}`,
//!   defined only when `k^{y-1} >= 1`;
//! * lag correlation: Pearson `r` across authors between monthly citations
//!   at `t` and `t - w`, averaged over `t`;
//! * maximum burst per author, with age, citations and productivity at the peak.
//!
//! Years are epoch-aligned 12-month blocks: year `y` covers months
//! `[12y, 12y + 11]`.

use std::io::Write;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::bpan::Histories;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogBinning {
    pub base: f64,
    pub bins_per_decade: u32,
}

impl Default for LogBinning {
    fn default() -> Self {
        LogBinning {
            base: 10.0,
            bins_per_decade: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    /// Geometric midpoint of the bin.
    pub center: f64,
    pub probability: f64,
}

/// Probability mass split into a point mass at zero plus log-spaced bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub zero_mass: f64,
    pub bins: Vec<HistogramBin>,
}

impl Histogram {
    pub fn total_mass(&self) -> f64 {
        self.zero_mass + self.bins.iter().map(|b| b.probability).sum::<f64>()
    }

    /// `bin_center,probability`; the zero mass is written as center `0`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_center", "probability"])?;
        if self.zero_mass > 0.0 {
            w.write_record(["0".to_string(), self.zero_mass.to_string()])?;
        }
        for b in &self.bins {
            w.write_record([b.center.to_string(), b.probability.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<histogram csv>", e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSample {
    pub values: Vec<f64>,
    pub label: String,
    pub binning: LogBinning,
    /// Candidates left out of `values` (e.g. undefined burst sizes).
    pub excluded: usize,
}

impl DistributionSample {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        DistributionSample {
            values,
            label: label.into(),
            binning: LogBinning::default(),
            excluded: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Lower median.
    pub fn median(&self) -> Option<f64> {
        let v = self.sorted();
        (!v.is_empty()).then(|| v[(v.len() - 1) / 2])
    }

    pub fn min_positive(&self) -> Option<f64> {
        self.values
            .iter()
            .copied()
            .filter(|&v| v > 0.0)
            .min_by(f64::total_cmp)
    }

    pub fn max(&self) -> Option<f64> {
        self.values.iter().copied().max_by(f64::total_cmp)
    }

    /// Decades spanned by the positive values, `log10(max / min_positive)`.
    pub fn support_decades(&self) -> f64 {
        match (self.min_positive(), self.max()) {
            (Some(lo), Some(hi)) => (hi / lo).log10(),
            _ => 0.0,
        }
    }

    /// Complementary CDF `P(X >= x)` at each distinct value.
    pub fn ccdf(&self) -> Vec<(f64, f64)> {
        let v = self.sorted();
        let n = v.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in v.iter().enumerate() {
            if out.last().is_none_or(|&(last, _)| last != x) {
                out.push((x, (v.len() - i) as f64 / n));
            }
        }
        out
    }

    pub fn histogram(&self) -> Histogram {
        let n = self.values.len();
        if n == 0 {
            return Histogram {
                zero_mass: 0.0,
                bins: Vec::new(),
            };
        }
        let per = f64::from(self.binning.bins_per_decade);
        let log_base = self.binning.base.ln();
        let base = self.binning.base;
        let index = |x: f64| {
            let mut i = ((x.ln() / log_base) * per).floor() as i64;
            // Snap to the stored edges when rounding lands on the wrong side.
            if base.powf((i + 1) as f64 / per) <= x {
                i += 1;
            } else if base.powf(i as f64 / per) > x {
                i -= 1;
            }
            i
        };
        let mut zeros = 0usize;
        let mut idx: Vec<i64> = Vec::with_capacity(n);
        for &x in &self.values {
            if x > 0.0 {
                idx.push(index(x));
            } else {
                zeros += 1;
            }
        }
        let mut bins = Vec::new();
        if let (Some(&lo), Some(&hi)) = (idx.iter().min(), idx.iter().max()) {
            let mut counts = vec![0usize; (hi - lo + 1) as usize];
            for i in idx {
                counts[(i - lo) as usize] += 1;
            }
            for (j, c) in counts.into_iter().enumerate() {
                let i = lo + j as i64;
                let lower = self.binning.base.powf(i as f64 / per);
                let upper = self.binning.base.powf((i + 1) as f64 / per);
                bins.push(HistogramBin {
                    lower,
                    upper,
                    center: (lower * upper).sqrt(),
                    probability: c as f64 / n as f64,
                });
            }
        }
        Histogram {
            zero_mass: zeros as f64 / n as f64,
            bins,
        }
    }
}

/// First and last month of epoch-aligned year `year`.
pub fn year_bounds(year: u32) -> (u32, u32) {
    (12 * year, 12 * year + 11)
}

/// `k_i^t` for every author present at `t`, uncited authors included.
pub fn citation_distribution(histories: &Histories, t: u32) -> DistributionSample {
    let values = histories
        .iter()
        .filter(|a| a.entry_month <= t)
        .map(|a| a.cumulative(t) as f64)
        .collect();
    DistributionSample::new(format!("citations@{t}"), values)
}

/// `(k_now - k_prev) / k_prev`; `None` when `k_prev` is zero.
pub fn burst_size(k_prev: u64, k_now: u64) -> Option<f64> {
    (k_prev > 0).then(|| (k_now as f64 - k_prev as f64) / k_prev as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BurstSample {
    pub author_id: String,
    pub year: u32,
    pub b: f64,
}

/// Burst sizes of year `year` and the number of authors present before the
/// year but still uncited (undefined ratio).
pub fn burst_samples(histories: &Histories, year: u32) -> (Vec<BurstSample>, usize) {
    let (first, last) = year_bounds(year);
    let Some(before) = first.checked_sub(1) else {
        let present = histories.iter().filter(|a| a.entry_month <= last).count();
        return (Vec::new(), present);
    };
    let mut out = Vec::new();
    let mut excluded = 0;
    for a in histories.iter().filter(|a| a.entry_month <= before) {
        let k_prev = a.cumulative(before);
        match burst_size(k_prev, k_prev + a.sum_months(first, last)) {
            Some(b) => out.push(BurstSample {
                author_id: a.author_id.clone(),
                year,
                b,
            }),
            None => excluded += 1,
        }
    }
    (out, excluded)
}

pub fn burst_distribution(histories: &Histories, year: u32) -> DistributionSample {
    let (samples, excluded) = burst_samples(histories, year);
    let mut d = DistributionSample::new(
        format!("bursts@{year}"),
        samples.into_iter().map(|s| s.b).collect(),
    );
    d.excluded = excluded;
    d
}

/// Pearson correlation; `None` if either vector is constant or shorter than 2.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagCorrelation {
    pub lag: u32,
    pub kmin: u64,
    pub r: f64,
    pub months_used: usize,
    pub months_skipped: usize,
}

/// Precomputed cumulative series for repeated lag queries.
pub struct LagCorrelator<'a> {
    histories: &'a Histories,
    cumulative: Vec<Vec<u64>>,
}

impl<'a> LagCorrelator<'a> {
    pub fn new(histories: &'a Histories) -> Self {
        let cumulative = histories.iter().map(|a| a.cumulative_series()).collect();
        LagCorrelator {
            histories,
            cumulative,
        }
    }

    fn k_at(&self, i: usize, entry: u32, t: u32) -> u64 {
        let series = &self.cumulative[i];
        match t.checked_sub(entry) {
            None => 0,
            Some(j) => series
                .get(j as usize)
                .or(series.last())
                .copied()
                .unwrap_or(0),
        }
    }

    /// Pearson `r` between monthly citations at `t` and `t - lag`, across
    /// authors with `k^t > kmin`, averaged over the months `t` of `window`.
    pub fn correlation(
        &self,
        lag: u32,
        kmin: u64,
        window: RangeInclusive<u32>,
    ) -> Result<LagCorrelation> {
        if lag == 0 {
            return Err(Error::InvalidConfig("lag must be >= 1".into()));
        }
        let mut sum = 0.0;
        let mut used = 0;
        let mut skipped = 0;
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for t in window {
            let Some(earlier) = t.checked_sub(lag) else {
                skipped += 1;
                continue;
            };
            x.clear();
            y.clear();
            for (i, a) in self.histories.iter().enumerate() {
                if a.entry_month > t || self.k_at(i, a.entry_month, t) <= kmin {
                    continue;
                }
                x.push(f64::from(a.monthly(t)));
                y.push(f64::from(a.monthly(earlier)));
            }
            match pearson(&x, &y) {
                Some(r) => {
                    sum += r;
                    used += 1;
                }
                None => skipped += 1,
            }
        }
        if used == 0 {
            return Err(Error::DegenerateCorrelation(skipped));
        }
        Ok(LagCorrelation {
            lag,
            kmin,
            r: sum / used as f64,
            months_used: used,
            months_skipped: skipped,
        })
    }
}

pub fn lag_correlation(
    histories: &Histories,
    lag: u32,
    kmin: u64,
    window: RangeInclusive<u32>,
) -> Result<LagCorrelation> {
    LagCorrelator::new(histories).correlation(lag, kmin, window)
}

/// `lag,r,kmin` rows.
pub fn write_correlations_csv(rows: &[LagCorrelation], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lag", "r", "kmin"])?;
    for c in rows {
        w.write_record([c.lag.to_string(), c.r.to_string(), c.kmin.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<correlation csv>", e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxBurst {
    pub author_id: String,
    pub max_b: f64,
    pub year: u32,
    /// Months from entry to the end of the peak year.
    pub age_months: u32,
    /// Citations before the peak year (the burst denominator).
    pub k_at_peak: u64,
    pub paper_count_at_peak: usize,
}

/// Largest yearly burst of each author over complete years; the earliest
/// year wins ties. Authors without any defined burst are omitted.
pub fn max_burst_summary(histories: &Histories) -> Vec<MaxBurst> {
    let complete_years = (histories.last_month + 1) / 12;
    let mut out = Vec::new();
    for a in histories.iter() {
        let mut best: Option<MaxBurst> = None;
        for year in (a.entry_month / 12 + 1)..complete_years {
            let (first, last) = year_bounds(year);
            let k_prev = a.cumulative(first - 1);
            let Some(b) = burst_size(k_prev, k_prev + a.sum_months(first, last)) else {
                continue;
            };
            if best.as_ref().is_none_or(|m| b > m.max_b) {
                best = Some(MaxBurst {
                    author_id: a.author_id.clone(),
                    max_b: b,
                    year,
                    age_months: last - a.entry_month,
                    k_at_peak: k_prev,
                    paper_count_at_peak: a.paper_count(last),
                });
            }
        }
        out.extend(best);
    }
    out
}

pub fn write_rows_csv<T: Serialize>(rows: &[T], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))
}

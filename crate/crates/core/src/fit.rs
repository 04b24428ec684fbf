//! Model-data agreement and the `(A, w)` grid sweep.
//!
//! Distances are first Wasserstein distances between one-dimensional
//! empirical distributions. Each grid cell averages the distance over
//! several replicas; the combined score divides each distance map by its
//! grid-wide median and averages the two, so neither observable dominates
//! by scale.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bpan::Histories;
use crate::error::{Error, Result};
use crate::kernels::{KernelParams, UpdateMode};
use crate::metrics::{burst_distribution, citation_distribution, DistributionSample};
use crate::simulate::{Replay, SimConfig, StartMode};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Linear,
    /// `x -> log10(1 + x)`.
    #[default]
    Log10p,
}

impl Transform {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Transform::Linear => x,
            Transform::Log10p => x.ln_1p() / std::f64::consts::LN_10,
        }
    }
}

/// W1 between two samples given as raw values.
///
/// Equal sizes use the mean absolute difference of order statistics;
/// otherwise the area between the two empirical CDFs.
pub fn wasserstein1_values(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample(
            if a.is_empty() { "left" } else { "right" }.into(),
        ));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    if a.len() == b.len() {
        let sum: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        return Ok(sum / a.len() as f64);
    }
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut prev = a[0].min(b[0]);
    let mut area = 0.0;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        area += (i as f64 / n - j as f64 / m).abs() * (x - prev);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        prev = x;
    }
    Ok(area)
}

pub fn wasserstein1(
    a: &DistributionSample,
    b: &DistributionSample,
    transform: Transform,
) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptySample(a.label.clone()));
    }
    if b.is_empty() {
        return Err(Error::EmptySample(b.label.clone()));
    }
    let ta: Vec<f64> = a.values.iter().map(|&x| transform.apply(x)).collect();
    let tb: Vec<f64> = b.values.iter().map(|&x| transform.apply(x)).collect();
    wasserstein1_values(&ta, &tb)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub a_values: Vec<f64>,
    pub w_values: Vec<u32>,
}

impl Default for GridSpec {
    /// `A` log-spaced over `[0.01, 10]` (13 points), `w` in `1..=36`.
    fn default() -> Self {
        GridSpec {
            a_values: parse_a_grid("0.01:10:log13").expect("valid default"),
            w_values: (1..=36).collect(),
        }
    }
}

impl GridSpec {
    pub fn parse(a: &str, w: &str) -> Result<Self> {
        Ok(GridSpec {
            a_values: parse_a_grid(a)?,
            w_values: parse_w_grid(w)?,
        })
    }

    pub fn cells(&self) -> Vec<(f64, u32)> {
        self.a_values
            .iter()
            .flat_map(|&a| self.w_values.iter().map(move |&w| (a, w)))
            .collect()
    }
}

/// `lo:hi:logN`, `lo:hi:linN`, or a comma list.
pub fn parse_a_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("bad A grid `{s}`"));
    let parts: Vec<&str> = s.split(':').collect();
    let values = match parts.as_slice() {
        [lo, hi, spec] => {
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            let (log, n) = if let Some(n) = spec.strip_prefix("log") {
                (true, n)
            } else if let Some(n) = spec.strip_prefix("lin") {
                (false, n)
            } else {
                return Err(bad());
            };
            let n: usize = n.parse().map_err(|_| bad())?;
            if n == 0 || (log && lo <= 0.0) || hi < lo {
                return Err(bad());
            }
            (0..n)
                .map(|i| {
                    let f = if n == 1 {
                        0.0
                    } else {
                        i as f64 / (n - 1) as f64
                    };
                    if log {
                        10f64.powf(lo.log10() + f * (hi.log10() - lo.log10()))
                    } else {
                        lo + f * (hi - lo)
                    }
                })
                .collect()
        }
        [list] => list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if values.is_empty() || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(bad());
    }
    Ok(values)
}

/// `lo:hi` (inclusive) or a comma list.
pub fn parse_w_grid(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::InvalidConfig(format!("bad w grid `{s}`"));
    let values: Vec<u32> = match s.split_once(':') {
        Some((lo, hi)) => {
            let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
            (lo..=hi).collect()
        }
        None => s
            .split(',')
            .map(|v| v.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?,
    };
    if values.is_empty() || values.contains(&0) {
        return Err(bad());
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub t_in: u32,
    pub t_f: u32,
    pub grid: GridSpec,
    pub replicates: usize,
    /// Replica `r` of every cell uses `base_seed + r`.
    pub base_seed: u64,
    pub start_mode: StartMode,
    pub update_mode: UpdateMode,
    pub transform: Transform,
    /// Worker threads; `None` uses the rayon default.
    pub jobs: Option<usize>,
}

impl SweepConfig {
    pub fn new(t_in: u32, t_f: u32, grid: GridSpec) -> Self {
        SweepConfig {
            t_in,
            t_f,
            grid,
            replicates: 5,
            base_seed: 0,
            start_mode: StartMode::default(),
            update_mode: UpdateMode::default(),
            transform: Transform::default(),
            jobs: None,
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        (0..self.replicates as u64)
            .map(|r| self.base_seed.wrapping_add(r))
            .collect()
    }

    /// Year whose bursts are compared: the last complete year at `t_f`.
    pub fn burst_year(&self) -> Result<u32> {
        match ((self.t_f + 1) / 12).checked_sub(1) {
            Some(y) if y >= 1 => Ok(y),
            _ => Err(Error::InvalidConfig(format!(
                "t_f {} leaves no complete year with a previous year",
                self.t_f
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    #[serde(rename = "A")]
    pub a: f64,
    pub w: u32,
    pub d_citations: f64,
    pub d_bursts: f64,
    pub score: f64,
    pub n_reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    pub best: (f64, u32),
}

impl SweepResult {
    /// Rebuilds scores and the best cell from raw distances.
    pub fn from_distances(mut cells: Vec<SweepCell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidConfig("empty sweep grid".into()));
        }
        let med_c = median(cells.iter().map(|c| c.d_citations));
        let med_b = median(cells.iter().map(|c| c.d_bursts));
        let scale = |d: f64, m: f64| if m > 0.0 { d / m } else { d };
        for c in &mut cells {
            c.score = 0.5 * (scale(c.d_citations, med_c) + scale(c.d_bursts, med_b));
        }
        let best = cells
            .iter()
            .min_by(|x, y| x.score.total_cmp(&y.score))
            .map(|c| (c.a, c.w))
            .expect("non-empty");
        Ok(SweepResult { cells, best })
    }

    pub fn cell(&self, a: f64, w: u32) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.a == a && c.w == w)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["A", "w", "d_citations", "d_bursts", "score", "n_reps"])?;
        for c in &self.cells {
            wtr.write_record([
                c.a.to_string(),
                c.w.to_string(),
                c.d_citations.to_string(),
                c.d_bursts.to_string(),
                c.score.to_string(),
                c.n_reps.to_string(),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<map csv>", e))
    }
}

fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Distances of one parameter cell averaged over replicas.
fn evaluate_cell(
    replay: &Replay,
    config: &SweepConfig,
    target_citations: &DistributionSample,
    target_bursts: &DistributionSample,
    a: f64,
    w: u32,
) -> Result<SweepCell> {
    let kernel = KernelParams::recency(a, w)?;
    let year = config.burst_year()?;
    let (mut dc, mut db) = (0.0, 0.0);
    let seeds = config.seeds();
    for (r, &seed) in seeds.iter().enumerate() {
        let wrap = |e: Error| Error::SweepCell {
            a,
            w,
            replicate: r,
            source: Box::new(e),
        };
        let mut sim = SimConfig::new(config.t_in, config.t_f, kernel, seed);
        sim.start_mode = config.start_mode;
        sim.update_mode = config.update_mode;
        let state = replay.run(&sim).map_err(wrap)?;
        let cit = citation_distribution(&state.histories, config.t_f);
        let bur = burst_distribution(&state.histories, year);
        dc += wasserstein1(&cit, target_citations, config.transform).map_err(wrap)?;
        db += wasserstein1(&bur, target_bursts, config.transform).map_err(wrap)?;
    }
    let n = seeds.len() as f64;
    Ok(SweepCell {
        a,
        w,
        d_citations: dc / n,
        d_bursts: db / n,
        score: f64::NAN,
        n_reps: seeds.len(),
    })
}

/// Empirical targets of a sweep: citations at `t_f` and bursts of the last
/// complete year, from histories commensurate with the start mode.
pub fn sweep_targets(
    replay: &Replay,
    config: &SweepConfig,
) -> Result<(DistributionSample, DistributionSample, Histories)> {
    let probe = SimConfig {
        start_mode: config.start_mode,
        ..SimConfig::new(config.t_in, config.t_f, KernelParams::recency(0.0, 1)?, 0)
    };
    let view = replay.empirical_view(&probe);
    let cit = citation_distribution(&view, config.t_f);
    let bur = burst_distribution(&view, config.burst_year()?);
    Ok((cit, bur, view))
}

/// Runs the full grid. Cells already present in `checkpoint` (a map CSV from
/// an interrupted run with the same replicate count) are reused; newly
/// finished cells are appended to it as they complete.
pub fn sweep(
    replay: &Replay,
    config: &SweepConfig,
    checkpoint: Option<&Path>,
) -> Result<SweepResult> {
    if config.replicates == 0 {
        return Err(Error::InvalidConfig("replicates must be >= 1".into()));
    }
    let (target_c, target_b, _) = sweep_targets(replay, config)?;
    if target_b.is_empty() {
        return Err(Error::EmptySample(target_b.label));
    }

    let mut done: HashMap<(u64, u32), SweepCell> = HashMap::new();
    let mut sink = None;
    if let Some(path) = checkpoint {
        if path.exists() {
            for c in read_map_csv(path)? {
                if c.n_reps == config.replicates {
                    done.insert((c.a.to_bits(), c.w), c);
                }
            }
        }
        let fresh = !path.exists()
            || std::fs::metadata(path)
                .map(|m| m.len() == 0)
                .unwrap_or(true);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(file);
        if fresh {
            w.write_record(["A", "w", "d_citations", "d_bursts", "score", "n_reps"])?;
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        sink = Some(Mutex::new((w, path.to_path_buf())));
    }

    let todo: Vec<(f64, u32)> = config
        .grid
        .cells()
        .into_iter()
        .filter(|(a, w)| !done.contains_key(&(a.to_bits(), *w)))
        .collect();

    let work = || -> Result<Vec<SweepCell>> {
        todo.par_iter()
            .map(|&(a, w)| {
                let cell = evaluate_cell(replay, config, &target_c, &target_b, a, w)?;
                if let Some(sink) = &sink {
                    let mut guard = sink.lock().expect("checkpoint writer");
                    let (wtr, path): &mut (csv::Writer<File>, PathBuf) = &mut guard;
                    wtr.write_record([
                        cell.a.to_string(),
                        cell.w.to_string(),
                        cell.d_citations.to_string(),
                        cell.d_bursts.to_string(),
                        String::new(),
                        cell.n_reps.to_string(),
                    ])?;
                    wtr.flush().map_err(|e| Error::io(path.as_path(), e))?;
                }
                Ok(cell)
            })
            .collect()
    };
    let fresh_cells = match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let mut fresh: HashMap<(u64, u32), SweepCell> = fresh_cells
        .into_iter()
        .map(|c| ((c.a.to_bits(), c.w), c))
        .collect();
    let cells = config
        .grid
        .cells()
        .into_iter()
        .map(|(a, w)| {
            let key = (a.to_bits(), w);
            fresh
                .remove(&key)
                .or_else(|| done.remove(&key))
                .expect("every cell evaluated or resumed")
        })
        .collect();
    SweepResult::from_distances(cells)
}

/// Reads a map CSV; an empty score column (checkpoint rows) parses as NaN.
pub fn read_map_csv(path: &Path) -> Result<Vec<SweepCell>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or("").trim();
        let num = |i: usize| -> Result<f64> {
            let s = field(i);
            if s.is_empty() {
                return Ok(f64::NAN);
            }
            s.parse().map_err(|_| {
                Error::InvalidConfig(format!("bad number `{s}` in {}", path.display()))
            })
        };
        let w: u32 = field(1).parse().map_err(|_| {
            Error::InvalidConfig(format!("bad w `{}` in {}", field(1), path.display()))
        })?;
        let n_reps: usize = field(5).parse().map_err(|_| {
            Error::InvalidConfig(format!("bad n_reps `{}` in {}", field(5), path.display()))
        })?;
        out.push(SweepCell {
            a: num(0)?,
            w,
            d_citations: num(2)?,
            d_bursts: num(3)?,
            score: num(4)?,
            n_reps,
        });
    }
    Ok(out)
}

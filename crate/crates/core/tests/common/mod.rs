#![allow(dead_code)]

use citeburst::corpus::{generate_synthetic, DiscreteDist, PaperSchedule};
use citeburst::{Corpus, KernelParams, SyntheticSpec};

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Small coauthored corpus, a few hundred papers.
pub fn small_spec(months: u32, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        months,
        papers_per_month: PaperSchedule::Linear { start: 2, end: 12 },
        authors_per_paper: DiscreteDist::Uniform { min: 1, max: 4 },
        refs_per_paper: DiscreteDist::Poisson {
            mean: 5.0,
            min: 0,
            max: 20,
        },
        new_author_prob: 0.3,
        target_kernel: KernelParams::preferential(1.0).unwrap(),
        seed,
    }
}

pub fn small_corpus(months: u32, seed: u64) -> Corpus {
    generate_synthetic(&small_spec(months, seed)).unwrap()
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method).
pub fn assignment_cost(cost: &[Vec<f64>]) -> f64 {
    let n = cost.len();
    let (mut u, mut v) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    let (mut p, mut way) = (vec![0usize; n + 1], vec![0usize; n + 1]);
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    (1..=n).map(|j| cost[p[j] - 1][j - 1]).sum()
}

/// Exhaustive search over all matchings.
pub fn permutation_cost(a: &[f64], b: &[f64]) -> f64 {
    fn go(a: &[f64], b: &mut Vec<f64>, k: usize, best: &mut f64) {
        if k == b.len() {
            let c: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum();
            *best = best.min(c);
            return;
        }
        for i in k..b.len() {
            b.swap(k, i);
            go(a, b, k + 1, best);
            b.swap(k, i);
        }
    }
    let mut best = f64::INFINITY;
    go(a, &mut b.to_vec(), 0, &mut best);
    best / a.len() as f64
}

/// Uniform masses 1/n and 1/m become equal-mass atoms after replicating each
/// point lcm/n and lcm/m times; transport between equal atom sets is an
/// assignment problem (Birkhoff).
pub fn optimal_transport(a: &[f64], b: &[f64]) -> f64 {
    let l = a.len() / gcd(a.len(), b.len()) * b.len();
    let rep = |s: &[f64]| -> Vec<f64> {
        s.iter()
            .flat_map(|&x| std::iter::repeat_n(x, l / s.len()))
            .collect()
    };
    let (ra, rb) = (rep(a), rep(b));
    let cost: Vec<Vec<f64>> = ra
        .iter()
        .map(|x| rb.iter().map(|y| (x - y).abs()).collect())
        .collect();
    assignment_cost(&cost) / l as f64
}

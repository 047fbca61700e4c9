//! Globally adaptive cubature over hyper-rectangles using the Genz-Malik
//! degree-7 rule with its embedded degree-5 rule for error estimation.
//!
//! Regions are refined in fixed-size batches; each batch is evaluated in
//! parallel but collected in submission order, so the result is identical
//! for any thread count.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

const LAMBDA2: f64 = 0.358_568_582_800_318_1; // sqrt(9/70)
const LAMBDA4: f64 = 0.948_683_298_050_513_8; // sqrt(9/10)
const LAMBDA5: f64 = 0.688_247_201_611_685_3; // sqrt(9/19)

#[derive(Clone, Debug)]
pub struct Options {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
    /// Regions split per refinement step.
    pub batch: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            rel_tol: 1e-6,
            abs_tol: 0.0,
            max_evals: 5_000_000,
            batch: 16,
        }
    }
}

impl Options {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Options {
            rel_tol,
            ..Options::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
    pub converged: bool,
}

#[derive(Clone, Debug)]
struct Weights {
    w1: f64,
    w2: f64,
    w3: f64,
    w4: f64,
    w5: f64,
    e1: f64,
    e2: f64,
    e3: f64,
    e4: f64,
    ratio: f64,
}

impl Weights {
    fn new(dim: usize) -> Self {
        let n = dim as f64;
        Weights {
            w1: (12824.0 - 9120.0 * n + 400.0 * n * n) / 19683.0,
            w2: 980.0 / 6561.0,
            w3: (1820.0 - 400.0 * n) / 19683.0,
            w4: 200.0 / 19683.0,
            w5: 6859.0 / 19683.0 / (1u64 << dim) as f64,
            e1: (729.0 - 950.0 * n + 50.0 * n * n) / 729.0,
            e2: 245.0 / 486.0,
            e3: (265.0 - 100.0 * n) / 1458.0,
            e4: 25.0 / 729.0,
            ratio: (LAMBDA2 * LAMBDA2) / (LAMBDA4 * LAMBDA4),
        }
    }
}

#[derive(Clone, Debug)]
struct Region {
    center: Vec<f64>,
    half: Vec<f64>,
    value: f64,
    error: f64,
    split_dim: usize,
    seq: u64,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Region {}

impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Region {
    // Largest error first; older regions win ties so the order is total.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn points_per_rule(dim: usize) -> usize {
    1 + 4 * dim + 2 * dim * (dim - 1) + (1usize << dim)
}

fn apply_rule<F>(f: &F, w: &Weights, center: Vec<f64>, half: Vec<f64>, seq: u64) -> Region
where
    F: Fn(&[f64]) -> f64,
{
    let dim = center.len();
    let volume: f64 = half.iter().map(|h| 2.0 * h).product();
    let mut x = center.clone();
    let f0 = f(&x);

    let mut sum2 = 0.0;
    let mut sum3 = 0.0;
    let mut best_dim = 0;
    let mut best_diff = -1.0;
    for i in 0..dim {
        x[i] = center[i] - LAMBDA2 * half[i];
        let a = f(&x);
        x[i] = center[i] + LAMBDA2 * half[i];
        let b = f(&x);
        x[i] = center[i] - LAMBDA4 * half[i];
        let c = f(&x);
        x[i] = center[i] + LAMBDA4 * half[i];
        let d = f(&x);
        x[i] = center[i];
        sum2 += a + b;
        sum3 += c + d;
        let diff = ((a + b - 2.0 * f0) - w.ratio * (c + d - 2.0 * f0)).abs();
        // near-equal differences: prefer the wider side
        let widest = diff > best_diff * (1.0 + 1e-12)
            || (diff >= best_diff * (1.0 - 1e-12) && half[i] > half[best_dim]);
        if best_diff < 0.0 || widest {
            best_diff = diff;
            best_dim = i;
        }
    }

    let mut sum4 = 0.0;
    for i in 0..dim {
        for j in (i + 1)..dim {
            for (si, sj) in [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)] {
                x[i] = center[i] + si * LAMBDA4 * half[i];
                x[j] = center[j] + sj * LAMBDA4 * half[j];
                sum4 += f(&x);
            }
            x[i] = center[i];
            x[j] = center[j];
        }
    }

    let mut sum5 = 0.0;
    for mask in 0..(1usize << dim) {
        for k in 0..dim {
            let sign = if mask & (1 << k) != 0 { 1.0 } else { -1.0 };
            x[k] = center[k] + sign * LAMBDA5 * half[k];
        }
        sum5 += f(&x);
    }

    let deg7 = volume * (w.w1 * f0 + w.w2 * sum2 + w.w3 * sum3 + w.w4 * sum4 + w.w5 * sum5);
    let deg5 = volume * (w.e1 * f0 + w.e2 * sum2 + w.e3 * sum3 + w.e4 * sum4);
    let error = (deg7 - deg5).abs();
    Region {
        center,
        half,
        value: deg7,
        error: if error.is_nan() { f64::INFINITY } else { error },
        split_dim: best_dim,
        seq,
    }
}

/// Neumaier-compensated sum.
fn compensated_sum<I: Iterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Integrate `f` over the box `[lo, hi]` (dimension >= 2).
pub fn integrate<F>(f: F, lo: &[f64], hi: &[f64], opts: &Options) -> Estimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    assert_eq!(lo.len(), hi.len(), "bounds must have equal dimension");
    let dim = lo.len();
    assert!(dim >= 2, "Genz-Malik rules need at least two dimensions");
    let w = Weights::new(dim);
    let per_rule = points_per_rule(dim);

    let center: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let mut seq = 0u64;
    let first = apply_rule(&f, &w, center, half, seq);
    seq += 1;
    let mut evals = per_rule;

    let mut heap = BinaryHeap::new();
    heap.push(first);
    let batch = opts.batch.max(1);

    loop {
        let value = compensated_sum(heap.iter().map(|r| r.value));
        let error = compensated_sum(heap.iter().map(|r| r.error));
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Estimate {
                value,
                error,
                evals,
                converged: true,
            };
        }
        if evals + 2 * batch * per_rule > opts.max_evals {
            return Estimate {
                value,
                error,
                evals,
                converged: false,
            };
        }

        let mut jobs = Vec::with_capacity(2 * batch);
        for _ in 0..batch {
            let Some(region) = heap.pop() else { break };
            let d = region.split_dim;
            let mut half = region.half.clone();
            half[d] *= 0.5;
            let mut left = region.center.clone();
            left[d] -= half[d];
            let mut right = region.center;
            right[d] += half[d];
            jobs.push((left, half.clone(), seq));
            jobs.push((right, half, seq + 1));
            seq += 2;
        }
        evals += jobs.len() * per_rule;
        let children: Vec<Region> = jobs
            .into_par_iter()
            .map(|(c, h, s)| apply_rule(&f, &w, c, h, s))
            .collect();
        heap.extend(children);
    }
}

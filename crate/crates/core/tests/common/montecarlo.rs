//! Importance-sampled Monte Carlo for six-dimensional Coulomb integrals
//! ∫∫ ρa(r) ρb(r') / |r − r' − R| with separable, possibly signed densities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Target = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Piecewise-constant proposal built from |f| on a uniform grid.
pub struct Sampler1D {
    lo: f64,
    h: f64,
    cumulative: Vec<f64>,
    total: f64,
}

impl Sampler1D {
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cells: usize) -> Self {
        let h = (hi - lo) / cells as f64;
        let mut cumulative = Vec::with_capacity(cells + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for i in 0..cells {
            let a = f(lo + i as f64 * h).abs();
            let b = f(lo + (i + 1) as f64 * h).abs();
            let m = f(lo + (i as f64 + 0.5) * h).abs();
            // floor keeps every cell reachable where |f| is tiny
            acc += ((a + 4.0 * m + b) / 6.0 * h).max(1e-300);
            cumulative.push(acc);
        }
        Sampler1D {
            lo,
            h,
            cumulative,
            total: acc,
        }
    }

    /// A point and the proposal density there.
    pub fn sample(&self, rng: &mut impl Rng) -> (f64, f64) {
        let target = rng.random::<f64>() * self.total;
        let i = self.cumulative.partition_point(|c| *c <= target).clamp(1, self.cumulative.len() - 1) - 1;
        let mass = self.cumulative[i + 1] - self.cumulative[i];
        let u = self.lo + (i as f64 + rng.random::<f64>()) * self.h;
        (u, mass / (self.h * self.total))
    }
}

/// One factor of a separable density along one axis.
pub struct Factor {
    sampler: Sampler1D,
    target: Target,
}

impl Factor {
    pub fn new(target: impl Fn(f64) -> f64 + Send + Sync + 'static, lo: f64, hi: f64) -> Self {
        Factor {
            sampler: Sampler1D::new(&target, lo, hi, 40_000),
            target: Box::new(target),
        }
    }
}

/// ρ(r) = Π_axis (f_1 * f_2 * ...)(r_axis): per axis a convolution of factors,
/// sampled as a sum of independent coordinates.
pub struct Density {
    pub axes: [Vec<Factor>; 3],
}

impl Density {
    fn draw(&self, rng: &mut impl Rng) -> ([f64; 3], f64) {
        let mut r = [0.0; 3];
        let mut weight = 1.0;
        for (axis, factors) in self.axes.iter().enumerate() {
            for f in factors {
                let (u, q) = f.sampler.sample(rng);
                r[axis] += u;
                weight *= (f.target)(u) / q;
            }
        }
        (r, weight)
    }
}

/// Mean and standard error of ∫∫ ρa(r) ρb(r') / |r − r' − shift|.
pub fn coulomb_integral(a: &Density, b: &Density, shift: [f64; 3], samples: usize, seed: u64) -> (f64, f64) {
    let chunks = 64;
    let per = samples / chunks;
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(c as u64));
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..per {
                let (ra, wa) = a.draw(&mut rng);
                let (rb, wb) = b.draw(&mut rng);
                let d2: f64 = (0..3).map(|i| (ra[i] - rb[i] - shift[i]).powi(2)).sum();
                let v = wa * wb / d2.sqrt();
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let n = (per * chunks) as f64;
    let s: f64 = sums.iter().map(|p| p.0).sum();
    let s2: f64 = sums.iter().map(|p| p.1).sum();
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

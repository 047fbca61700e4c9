//! Finite-difference eigen-solvers on uniform grids with hard walls.

use dotforge::units::HBAR2_OVER_2M0;

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) below `x`.
fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0f64;
    for (i, d) in diag.iter().enumerate() {
        let prev = if i == 0 { 0.0 } else { off * off / q };
        q = d - x - prev;
        if q == 0.0 {
            q = 1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `n` eigenvalues of -hbar²/2m d²/dx² + V(x) on (-box/2, box/2).
pub fn levels_1d<V: Fn(f64) -> f64>(potential: V, mass: f64, box_l: f64, nodes: usize, n: usize) -> Vec<f64> {
    let h = box_l / (nodes + 1) as f64;
    let t = HBAR2_OVER_2M0 / (mass * h * h);
    let diag: Vec<f64> = (1..=nodes)
        .map(|i| 2.0 * t + potential(-0.5 * box_l + i as f64 * h))
        .collect();
    let lo0 = diag.iter().cloned().fold(f64::INFINITY, f64::min) - 4.0 * t;
    let hi0 = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 4.0 * t;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (lo0, hi0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if sturm_count(&diag, -t, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Square-well potential with value `depth` outside |x| < w/2.
pub fn square_well(width: f64, depth: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| {
        let d = x.abs() - 0.5 * width;
        if d > 1e-12 {
            depth
        } else if d < -1e-12 {
            0.0
        } else {
            0.5 * depth
        }
    }
}

/// Axis grid whose nodes avoid the well edges: returns (h, first node).
pub fn axis_grid(extent: f64, nodes: usize) -> (f64, f64) {
    let h = extent / nodes as f64;
    (h, -0.5 * extent + 0.5 * h)
}

pub struct Grid3 {
    pub n: [usize; 3],
    pub h: [f64; 3],
    pub origin: [f64; 3],
}

impl Grid3 {
    pub fn new(extent: [f64; 3], n: [usize; 3]) -> Self {
        let mut h = [0.0; 3];
        let mut origin = [0.0; 3];
        for a in 0..3 {
            let (ha, o) = axis_grid(extent[a], n[a]);
            h[a] = ha;
            origin[a] = o;
        }
        Grid3 { n, h, origin }
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.h[axis]
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n[1] + j) * self.n[2] + k
    }
}

/// Ground state of -hbar²/2m ∇² + V on a 3D grid with hard walls, by Lanczos
/// (two passes, the second rebuilds the Ritz vector). Returns energy and the
/// normalised ground-state samples.
pub fn ground_state_3d<V: Fn(f64, f64, f64) -> f64>(
    grid: &Grid3,
    potential: V,
    mass: f64,
    iterations: usize,
) -> (f64, Vec<f64>) {
    let n = grid.len();
    let mut pot = vec![0.0; n];
    for i in 0..grid.n[0] {
        for j in 0..grid.n[1] {
            for k in 0..grid.n[2] {
                pot[grid.index(i, j, k)] = potential(grid.coord(0, i), grid.coord(1, j), grid.coord(2, k));
            }
        }
    }
    let t: Vec<f64> = grid.h.iter().map(|h| HBAR2_OVER_2M0 / (mass * h * h)).collect();
    let apply = |x: &[f64], y: &mut [f64]| {
        let [nx, ny, nz] = grid.n;
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..nz {
                    let idx = grid.index(i, j, k);
                    let mut v = (pot[idx] + 2.0 * (t[0] + t[1] + t[2])) * x[idx];
                    if i > 0 {
                        v -= t[0] * x[grid.index(i - 1, j, k)];
                    }
                    if i + 1 < nx {
                        v -= t[0] * x[grid.index(i + 1, j, k)];
                    }
                    if j > 0 {
                        v -= t[1] * x[grid.index(i, j - 1, k)];
                    }
                    if j + 1 < ny {
                        v -= t[1] * x[grid.index(i, j + 1, k)];
                    }
                    if k > 0 {
                        v -= t[2] * x[idx - 1];
                    }
                    if k + 1 < nz {
                        v -= t[2] * x[idx + 1];
                    }
                    y[idx] = v;
                }
            }
        }
    };
    // smooth positive start vector
    let start: Vec<f64> = {
        let mut s = vec![0.0; n];
        for i in 0..grid.n[0] {
            for j in 0..grid.n[1] {
                for k in 0..grid.n[2] {
                    let f = |a: usize, m: usize| (std::f64::consts::PI * (a as f64 + 1.0) / (m as f64 + 1.0)).sin();
                    s[grid.index(i, j, k)] = f(i, grid.n[0]) * f(j, grid.n[1]) * f(k, grid.n[2]);
                }
            }
        }
        let norm = s.iter().map(|v| v * v).sum::<f64>().sqrt();
        s.iter().map(|v| v / norm).collect()
    };

    let run = |coeffs: Option<&[f64]>| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        let mut q_prev = vec![0.0; n];
        let mut q = start.clone();
        let mut w = vec![0.0; n];
        let mut ritz = vec![0.0; n];
        let mut beta = 0.0;
        for it in 0..iterations {
            if let Some(c) = coeffs {
                for (r, qi) in ritz.iter_mut().zip(&q) {
                    *r += c[it] * qi;
                }
            }
            apply(&q, &mut w);
            let alpha: f64 = w.iter().zip(&q).map(|(a, b)| a * b).sum();
            for idx in 0..n {
                w[idx] -= alpha * q[idx] + beta * q_prev[idx];
            }
            alphas.push(alpha);
            beta = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            betas.push(beta);
            for idx in 0..n {
                q_prev[idx] = q[idx];
                q[idx] = w[idx] / beta;
            }
        }
        (alphas, betas, ritz)
    };

    let (alphas, betas, _) = run(None);
    let m = alphas.len();
    let mut tri = nalgebra::DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        tri[(i, i)] = alphas[i];
        if i + 1 < m {
            tri[(i, i + 1)] = betas[i];
            tri[(i + 1, i)] = betas[i];
        }
    }
    let eig = nalgebra::SymmetricEigen::new(tri);
    let (imin, emin) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &e)| if e < acc.1 { (i, e) } else { acc });
    let y: Vec<f64> = eig.eigenvectors.column(imin).iter().cloned().collect();
    let (_, _, mut ritz) = run(Some(&y));
    let norm = ritz.iter().map(|v| v * v).sum::<f64>().sqrt();
    let sign = if ritz.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    for r in ritz.iter_mut() {
        *r *= sign / norm;
    }
    (emin, ritz)
}

/// <coordinate along `axis`> for grid samples normalised to unit sum of squares.
pub fn mean_coordinate(grid: &Grid3, psi: &[f64], axis: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..grid.n[0] {
        for j in 0..grid.n[1] {
            for k in 0..grid.n[2] {
                let c = [i, j, k][axis];
                acc += psi[grid.index(i, j, k)].powi(2) * grid.coord(axis, c);
            }
        }
    }
    acc
}

/// Cuboid potential: zero inside |x|,|y| < base_half, |z| < h/2.
pub fn cuboid(base_half: f64, height: f64, depth: f64) -> impl Fn(f64, f64, f64) -> f64 {
    move |x: f64, y: f64, z: f64| {
        if x.abs() < base_half && y.abs() < base_half && z.abs() < 0.5 * height {
            0.0
        } else {
            depth
        }
    }
}

//! Lowest eigenpairs of symmetric operators given only as a matrix-vector
//! product, restricted to a set of active coordinates.

use nalgebra::{DMatrix, SymmetricEigen};

/// Sectors up to this size are diagonalised densely.
pub(crate) const DENSE_LIMIT: usize = 1200;

const MAX_KRYLOV: usize = 1500;
const RESIDUAL_TOL: f64 = 1e-10;

pub(crate) struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// splitmix64, used for reproducible start vectors.
fn pseudo_random(i: u64) -> f64 {
    let mut z = i.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

/// `n` lowest eigenpairs of the operator restricted to `active`.
pub(crate) fn lowest<F>(apply: F, active: &[bool], n: usize) -> Vec<EigenPair>
where
    F: Fn(&[f64], &mut [f64]),
{
    let dim = active.len();
    let n_active = active.iter().filter(|a| **a).count();
    let n = n.min(n_active);
    if n_active <= DENSE_LIMIT {
        dense(&apply, active, n)
    } else {
        let masked = |x: &[f64], y: &mut [f64]| {
            apply(x, y);
            for (yi, a) in y.iter_mut().zip(active) {
                if !a {
                    *yi = 0.0;
                }
            }
        };
        let mut found: Vec<EigenPair> = Vec::with_capacity(n);
        for k in 0..n {
            let mut start: Vec<f64> = (0..dim)
                .map(|i| if active[i] { 1e-2 * pseudo_random((k * dim + i) as u64) } else { 0.0 })
                .collect();
            if let Some(first) = active.iter().position(|a| *a) {
                start[first] += 1.0;
            }
            found.push(lanczos_lowest(&masked, start, &found, n_active - k));
        }
        found.sort_by(|a, b| a.value.total_cmp(&b.value));
        found
    }
}

fn dense<F>(apply: &F, active: &[bool], n: usize) -> Vec<EigenPair>
where
    F: Fn(&[f64], &mut [f64]),
{
    let dim = active.len();
    let index: Vec<usize> = (0..dim).filter(|i| active[*i]).collect();
    let m = index.len();
    let mut h = DMatrix::<f64>::zeros(m, m);
    let mut e = vec![0.0; dim];
    let mut col = vec![0.0; dim];
    for (j, &gj) in index.iter().enumerate() {
        e[gj] = 1.0;
        apply(&e, &mut col);
        e[gj] = 0.0;
        for (i, &gi) in index.iter().enumerate() {
            h[(i, j)] = col[gi];
        }
    }
    h = 0.5 * (&h + h.transpose());
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    order
        .into_iter()
        .take(n)
        .map(|c| {
            let mut v = vec![0.0; dim];
            for (i, &gi) in index.iter().enumerate() {
                v[gi] = eig.eigenvectors[(i, c)];
            }
            EigenPair {
                value: eig.eigenvalues[c],
                vector: v,
            }
        })
        .collect()
}

/// Lanczos with full reorthogonalisation, deflated against `locked`.
fn lanczos_lowest<F>(apply: &F, mut q: Vec<f64>, locked: &[EigenPair], max_dim: usize) -> EigenPair
where
    F: Fn(&[f64], &mut [f64]),
{
    let dim = q.len();
    let project = |v: &mut [f64], basis: &[Vec<f64>]| {
        for _ in 0..2 {
            for l in locked {
                let c = dot(v, &l.vector);
                axpy(-c, &l.vector, v);
            }
            for b in basis {
                let c = dot(v, b);
                axpy(-c, b, v);
            }
        }
    };
    project(&mut q, &[]);
    normalize(&mut q);

    let limit = MAX_KRYLOV.min(max_dim);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(limit);
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let (value, mut vector) = loop {
        apply(&q, &mut w);
        let alpha = dot(&w, &q);
        basis.push(std::mem::take(&mut q));
        alphas.push(alpha);
        project(&mut w, &basis);
        let beta = normalize(&mut w);
        let m = basis.len();

        let breakdown = beta < 1e-13 * alpha.abs().max(1.0);
        if m % 10 == 0 || breakdown || m == limit {
            let mut tri = DMatrix::<f64>::zeros(m, m);
            for i in 0..m {
                tri[(i, i)] = alphas[i];
                if i + 1 < m {
                    tri[(i, i + 1)] = betas[i];
                    tri[(i + 1, i)] = betas[i];
                }
            }
            let eig = SymmetricEigen::new(tri);
            let (c, theta) = eig
                .eigenvalues
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
            let y = eig.eigenvectors.column(c);
            let residual = beta * y[m - 1].abs();
            let mut ritz = vec![0.0; dim];
            for (bi, yi) in basis.iter().zip(y.iter()) {
                axpy(*yi, bi, &mut ritz);
            }
            if breakdown || m == limit || residual < RESIDUAL_TOL * theta.abs().max(1.0) {
                break (theta, ritz);
            }
        }
        betas.push(beta);
        q = w.clone();
    };
    normalize(&mut vector);
    EigenPair { value, vector }
}

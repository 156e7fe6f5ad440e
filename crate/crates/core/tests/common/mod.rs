//! Shared helpers for integration tests: independent oracles and random
//! generators.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| StandardNormal.sample(rng))
}

pub fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = gaussian(rng, n, n);
    (&g - g.transpose()) * 0.5
}

/// Haar-ish random orthogonal matrix via QR with sign fix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = gaussian(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Householder reflection `1 - 2vvᵀ/|v|²`.
pub fn householder(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let v = gaussian(rng, n, 1);
    DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / v.norm_squared())
}

/// Pfaffian by Gaussian elimination with pivoting (Parlett–Reid style on
/// the upper triangle).
pub fn pfaffian(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n % 2 == 1 {
        return 0.0;
    }
    let mut a = a.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k < n {
        // pivot: largest entry in column k below row k
        let (mut p, mut best) = (k + 1, 0.0);
        for i in k + 1..n {
            if a[(i, k)].abs() > best {
                best = a[(i, k)].abs();
                p = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != k + 1 {
            a.swap_rows(p, k + 1);
            a.swap_columns(p, k + 1);
            pf = -pf;
        }
        pf *= a[(k, k + 1)];
        let piv = a[(k, k + 1)];
        for i in k + 2..n {
            let f = a[(k, i)] / piv;
            // eliminate row/col i using row/col k+1
            for j in 0..n {
                let v = a[(k + 1, j)];
                a[(i, j)] -= f * v;
            }
            for j in 0..n {
                let v = a[(j, k + 1)];
                a[(j, i)] -= f * v;
            }
        }
        k += 2;
    }
    pf
}

/// Block-diagonal `⊕ λ_j σ`, `σ = [[0,-1],[1,0]]`.
pub fn canonical_blocks(vals: &[f64]) -> DMatrix<f64> {
    let n = 2 * vals.len();
    let mut m = DMatrix::zeros(n, n);
    for (j, &v) in vals.iter().enumerate() {
        m[(2 * j, 2 * j + 1)] = -v;
        m[(2 * j + 1, 2 * j)] = v;
    }
    m
}

/// Rotation in the `(i, j)` plane by angle `th`.
pub fn givens(n: usize, i: usize, j: usize, th: f64) -> DMatrix<f64> {
    let mut g = DMatrix::identity(n, n);
    g[(i, i)] = th.cos();
    g[(j, j)] = th.cos();
    g[(i, j)] = -th.sin();
    g[(j, i)] = th.sin();
    g
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

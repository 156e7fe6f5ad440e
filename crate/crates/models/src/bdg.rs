//! Particle-hole symmetric (BdG) matrices and their Majorana form.
//!
//! Layout: index `2j + η` with orbital `j` and particle/hole label `η`. The
//! particle-hole swap is `K = 1 ⊗ σ₁`, so a BdG matrix satisfies
//! `K conj(H) K = -H`. The Majorana form is `T = -i C* H C` with
//! `C = 1 ⊗ (1/√2)[[1, -i], [1, i]]`, which is real and skew.

use nalgebra::{Complex, DMatrix, SymmetricEigen};
use z2flow::SkewMatrix;

use crate::error::{ModelError, Result};

pub type C64 = Complex<f64>;

pub(crate) const I: C64 = Complex { re: 0.0, im: 1.0 };
const BDG_LIMIT: f64 = 1e-10;

/// The per-orbital block of `C`.
fn cayley_block() -> [[C64; 2]; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        [Complex::new(r, 0.0), Complex::new(0.0, -r)],
        [Complex::new(r, 0.0), Complex::new(0.0, r)],
    ]
}

/// Eigenvalues in ascending order.
pub fn hermitian_eigenvalues(h: &DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(h.nrows(), h.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `K conj(H) K + H`.
pub fn bdg_residual(h: &DMatrix<C64>) -> f64 {
    let n = h.nrows();
    let mut r = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            r = r.max((h[(a ^ 1, b ^ 1)].conj() + h[(a, b)]).norm());
        }
    }
    r
}

fn hermitian_residual(h: &DMatrix<C64>) -> f64 {
    max_abs(&(h - h.adjoint()))
}

/// `T = -i C* H C` for a Hermitian BdG matrix.
pub fn majorana_rep(h: &DMatrix<C64>) -> Result<SkewMatrix> {
    let n = h.nrows();
    if n % 2 == 1 || h.ncols() != n {
        return Err(ModelError::InvalidConfig(format!(
            "BdG matrix must be square of even size, got {}x{}",
            n,
            h.ncols()
        )));
    }
    let scale = max_abs(h).max(1.0);
    let residual = bdg_residual(h).max(hermitian_residual(h));
    if residual > BDG_LIMIT * scale {
        return Err(ModelError::NotBdGSymmetric { residual });
    }
    let c = cayley_block();
    let mut t = DMatrix::<f64>::zeros(n, n);
    let mut imag = 0.0_f64;
    for i in 0..n / 2 {
        for j in 0..n / 2 {
            for a in 0..2 {
                for b in 0..2 {
                    let mut s = Complex::new(0.0, 0.0);
                    for p in 0..2 {
                        for q in 0..2 {
                            s += c[p][a].conj() * h[(2 * i + p, 2 * j + q)] * c[q][b];
                        }
                    }
                    let v = -I * s;
                    imag = imag.max(v.im.abs());
                    t[(2 * i + a, 2 * j + b)] = v.re;
                }
            }
        }
    }
    if imag > BDG_LIMIT * scale {
        return Err(ModelError::NotBdGSymmetric { residual: imag });
    }
    // remove rounding asymmetry before the skew check
    let t = (&t - t.transpose()) * 0.5;
    Ok(SkewMatrix::new(t)?)
}

/// Inverse of [`majorana_rep`]: `H = i C T C*`.
pub fn from_majorana(t: &SkewMatrix) -> DMatrix<C64> {
    let n = t.dim();
    let c = cayley_block();
    let m = t.matrix();
    let mut h = DMatrix::<C64>::zeros(n, n);
    for i in 0..n / 2 {
        for j in 0..n / 2 {
            for p in 0..2 {
                for q in 0..2 {
                    let mut s = Complex::new(0.0, 0.0);
                    for a in 0..2 {
                        for b in 0..2 {
                            s += c[p][a] * m[(2 * i + a, 2 * j + b)] * c[q][b].conj();
                        }
                    }
                    h[(2 * i + p, 2 * j + q)] = I * s;
                }
            }
        }
    }
    h
}

/// Indices of eigenvalues with `|E| <= tol`, and the smallest `|E|` outside.
pub(crate) fn near_zero(values: &[f64], tol: f64) -> (Vec<usize>, f64) {
    let mut inside = Vec::new();
    let mut kept = f64::INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v.abs() <= tol {
            inside.push(i);
        } else {
            kept = kept.min(v.abs());
        }
    }
    (inside, kept)
}

/// Number of directions of the span of `cols` localized in the region with
/// diagonal orbital weights `w` (one weight per orbital, applied to both
/// BdG components). Returns `(inside, outside)`, or the offending weight if
/// some direction straddles the region boundary.
pub(crate) fn localized_split(
    vectors: &DMatrix<C64>,
    cols: &[usize],
    w: &[f64],
) -> std::result::Result<(usize, usize), f64> {
    let k = cols.len();
    if k == 0 {
        return Ok((0, 0));
    }
    let mut g = DMatrix::<C64>::zeros(k, k);
    for (a, &ca) in cols.iter().enumerate() {
        for (b, &cb) in cols.iter().enumerate() {
            let mut s = Complex::new(0.0, 0.0);
            for r in 0..vectors.nrows() {
                s += vectors[(r, ca)].conj() * vectors[(r, cb)] * w[r / 2];
            }
            g[(a, b)] = s;
        }
    }
    let mut inside = 0;
    for v in hermitian_eigenvalues(&g) {
        if v > 0.2 && v < 0.8 {
            return Err(v);
        }
        if v >= 0.8 {
            inside += 1;
        }
    }
    Ok((inside, k - inside))
}

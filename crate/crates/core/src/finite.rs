//! Finite-dimensional ℤ₂ spectral flow between two skew matrices.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Result, Z2Error};
use crate::linalg::{
    canonical_from, det_sign, eig_skew, op_norm, singular_values, ComplexStructure, SkewMatrix, SpectralData,
    Tolerance, Z2,
};

pub const ODD_CONVENTION: &str =
    "odd dimension: kernel vectors oriented by first nonzero coordinate positive";
pub const TRANSPORTED_CONVENTION: &str = "odd dimension: kernel orientation supplied by caller";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentResult {
    pub value: Z2,
    pub det_a_sign: i8,
    pub kernel_dims: (usize, usize),
    pub convention_note: String,
}

/// `SF₂(T0, T1)` along the straight line, via the sign of the determinant of
/// a congruence `A` with `Aᵀ T0 A = T1`.
pub fn sf2_segment(t0: &SkewMatrix, t1: &SkewMatrix, tol: &Tolerance) -> Result<SegmentResult> {
    sf2_segment_oriented(t0, t1, None, None, tol)
}

/// As [`sf2_segment`], with optional oriented kernel vectors for odd
/// dimension. A supplied vector must lie in the kernel; only its direction
/// is used.
pub fn sf2_segment_oriented(
    t0: &SkewMatrix,
    t1: &SkewMatrix,
    k0: Option<&DVector<f64>>,
    k1: Option<&DVector<f64>>,
    tol: &Tolerance,
) -> Result<SegmentResult> {
    if t0.dim() != t1.dim() {
        return Err(Z2Error::DimensionMismatch(t0.dim(), t1.dim()));
    }
    let n = t0.dim();
    let minimal = n % 2;
    let s0 = eig_skew(t0, tol)?;
    let s1 = eig_skew(t1, tol)?;
    for s in [&s0, &s1] {
        if s.kernel_dim() != minimal {
            return Err(Z2Error::NonMinimalKernel {
                found: s.kernel_dim(),
                minimal,
            });
        }
    }
    let kern0 = oriented_kernel(t0, &s0, k0)?;
    let kern1 = oriented_kernel(t1, &s1, k1)?;
    let c0 = congruence_factor(&s0, kern0.as_ref());
    let c1 = congruence_factor(&s1, kern1.as_ref());

    // T_i = C_i Σ C_iᵀ, hence A = C0⁻ᵀ C1ᵀ satisfies Aᵀ T0 A = T1.
    let c0t_inv = c0
        .transpose()
        .try_inverse()
        .ok_or(Z2Error::CheckFailed {
            what: "canonical congruence inverse",
            residual: f64::INFINITY,
            limit: 0.0,
        })?;
    let a = c0t_inv * c1.transpose();
    let scale = op_norm(t0.matrix()).max(op_norm(t1.matrix()));
    let residual = op_norm(&(a.transpose() * t0.matrix() * &a - t1.matrix()));
    if residual > 1e-8 * scale.max(f64::MIN_POSITIVE) {
        return Err(Z2Error::CheckFailed {
            what: "congruence A^T T0 A = T1",
            residual,
            limit: 1e-8 * scale,
        });
    }
    let det_a_sign = det_sign(&a);
    let p0 = canonical_from(&s0, kern0.as_ref()).parity;
    let p1 = canonical_from(&s1, kern1.as_ref()).parity;
    let value = p0 + p1;
    debug_assert_eq!(Z2::from_sign(det_a_sign), value);
    let convention_note = if n % 2 == 0 {
        String::new()
    } else if k0.is_some() || k1.is_some() {
        TRANSPORTED_CONVENTION.to_string()
    } else {
        ODD_CONVENTION.to_string()
    };
    Ok(SegmentResult {
        value,
        det_a_sign,
        kernel_dims: (s0.kernel_dim(), s1.kernel_dim()),
        convention_note,
    })
}

fn oriented_kernel(
    t: &SkewMatrix,
    sd: &SpectralData,
    k: Option<&DVector<f64>>,
) -> Result<Option<DMatrix<f64>>> {
    let Some(k) = k else { return Ok(None) };
    if sd.kernel_dim() != 1 {
        return Ok(None);
    }
    let norm = k.norm();
    let residual = (t.matrix() * k).norm() / norm;
    let limit = 1e-6 * op_norm(t.matrix()).max(1e-300);
    if !(norm > 0.0) || residual > limit.max(1e-10) {
        return Err(Z2Error::CheckFailed {
            what: "supplied kernel vector",
            residual,
            limit,
        });
    }
    let base = sd.kernel.column(0);
    let sign = if base.dot(k) < 0.0 { -1.0 } else { 1.0 };
    Ok(Some(DMatrix::from_column_slice(
        k.len(),
        1,
        (base * sign).as_slice(),
    )))
}

/// `C = O · diag(√λ₁, √λ₁, …, 1)` so that `T = C Σ Cᵀ`.
fn congruence_factor(sd: &SpectralData, kernel: Option<&DMatrix<f64>>) -> DMatrix<f64> {
    let mut c = canonical_from(sd, kernel).o;
    for (j, &v) in sd.values.iter().enumerate() {
        let r = v.sqrt();
        c.column_mut(2 * j).scale_mut(r);
        c.column_mut(2 * j + 1).scale_mut(r);
    }
    c
}

/// Singular-value threshold count for `½ dim ker(J0 + J1) mod 2`.
///
/// The singular values of `J0 + J1` lie in `[0, 2]`, and those strictly
/// between 0 and 2 occur with multiplicity divisible by four. Counting all
/// singular values below any threshold inside `(0, 2)` therefore gives the
/// same parity as counting the exact kernel, and is stable under rounding.
/// The threshold is placed in the widest gap of the spectrum inside
/// `[0.5, 1.5]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfKernelCount {
    pub value: Z2,
    /// Number of singular values below the threshold.
    pub below: usize,
    /// Number of singular values below `kernel_tol` (the strict kernel).
    pub strict_kernel: usize,
    pub threshold: f64,
}

/// Midpoint of the widest gap between consecutive values inside `[lo, hi]`,
/// together with its width.
pub(crate) fn widest_gap(values: &[f64], lo: f64, hi: f64) -> (f64, f64) {
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = values.iter().copied().filter(|&v| v > lo && v < hi).collect();
    inner.sort_by(|a, b| a.total_cmp(b));
    edges.extend(inner);
    edges.push(hi);
    let (mut best, mut threshold) = (-1.0, 0.5 * (lo + hi));
    for w in edges.windows(2) {
        if w[1] - w[0] > best {
            best = w[1] - w[0];
            threshold = 0.5 * (w[0] + w[1]);
        }
    }
    (threshold, best)
}

pub(crate) fn half_kernel_count(
    singular_values: &[f64],
    scale: f64,
    kernel_tol: f64,
) -> Result<HalfKernelCount> {
    let (threshold, best) = widest_gap(singular_values, 0.25 * scale, 0.75 * scale);
    let below = singular_values.iter().filter(|&&v| v < threshold).count();
    let strict_kernel = singular_values.iter().filter(|&&v| v <= kernel_tol).count();
    if below % 2 == 1 {
        return Err(Z2Error::AmbiguousKernel {
            discarded: threshold,
            kept: best,
            kernel_tol,
            gap_ratio: 0.0,
        });
    }
    Ok(HalfKernelCount {
        value: Z2::from_count(below / 2),
        below,
        strict_kernel,
        threshold,
    })
}

/// `½ dim ker(J0 + J1) mod 2`.
pub fn sf2_between_structures(
    j0: &ComplexStructure,
    j1: &ComplexStructure,
    tol: &Tolerance,
) -> Result<Z2> {
    Ok(structures_kernel_count(j0, j1, tol)?.value)
}

/// Full count behind [`sf2_between_structures`].
pub fn structures_kernel_count(
    j0: &ComplexStructure,
    j1: &ComplexStructure,
    tol: &Tolerance,
) -> Result<HalfKernelCount> {
    tol.validate()?;
    if j0.dim() != j1.dim() {
        return Err(Z2Error::DimensionMismatch(j0.dim(), j1.dim()));
    }
    let n = j0.dim();
    let sum = j0.matrix() + j1.matrix();
    let sv: Vec<f64> = if n == 0 {
        Vec::new()
    } else {
        singular_values(&sum)
    };
    half_kernel_count(&sv, 2.0, tol.kernel_tol_for(n, 2.0))
}

/// Result of [`minimal_kernel_completion`].
#[derive(Clone, Debug)]
pub struct Completion {
    pub matrix: SkewMatrix,
    /// The added perturbation `R`.
    pub r: DMatrix<f64>,
    /// Remaining kernel direction in odd dimension, oriented by convention.
    pub kernel_vector: Option<DVector<f64>>,
}

/// `T + R` with `R = scale·σ` on consecutive pairs of kernel vectors.
pub fn minimal_kernel_completion(
    t: &SkewMatrix,
    scale: f64,
    tol: &Tolerance,
) -> Result<SkewMatrix> {
    let sd = eig_skew(t, tol)?;
    Ok(completion_from(t, &sd, scale).matrix)
}

pub(crate) fn completion_from(t: &SkewMatrix, sd: &SpectralData, scale: f64) -> Completion {
    let n = t.dim();
    let k = sd.kernel_dim();
    let mut r = DMatrix::zeros(n, n);
    for b in 0..k / 2 {
        let x = sd.kernel.column(2 * b);
        let y = sd.kernel.column(2 * b + 1);
        r += (y * x.transpose() - x * y.transpose()) * scale;
    }
    let kernel_vector = if k % 2 == 1 {
        Some(sd.kernel.column(k - 1).into_owned())
    } else {
        None
    };
    let m = t.matrix() + &r;
    Completion {
        matrix: SkewMatrix::new(m).expect("sum of skew matrices is skew"),
        r,
        kernel_vector,
    }
}

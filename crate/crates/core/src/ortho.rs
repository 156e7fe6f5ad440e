//! The index map `j` on orthogonal matrices relative to a complex structure.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Result, Z2Error};
use crate::finite::{half_kernel_count, widest_gap, HalfKernelCount};
use crate::linalg::{det_sign, op_norm, singular_values, ComplexStructure, OrthogonalMatrix, Tolerance, Z2};

/// `sgn det O` as an element of ℤ₂, from the LU sign.
pub fn j_det(o: &OrthogonalMatrix) -> Z2 {
    Z2::from_sign(det_sign(o.matrix()))
}

/// Which kernel is measured by [`j_kernel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFormula {
    /// `½ dim ker(J + OJOᵀ)`.
    SumOfStructures,
    /// `½ dim ker(O - JOJ)`.
    AntiLinearPart,
    /// `½ dim ker(1 - ½ OᵀJ[O,J])`.
    Commutator,
}

impl KernelFormula {
    pub const ALL: [KernelFormula; 3] = [
        KernelFormula::SumOfStructures,
        KernelFormula::AntiLinearPart,
        KernelFormula::Commutator,
    ];
}

fn check_dims(o: &OrthogonalMatrix, j: &ComplexStructure) -> Result<()> {
    if o.dim() != j.dim() {
        return Err(Z2Error::DimensionMismatch(o.dim(), j.dim()));
    }
    Ok(())
}

/// The operator whose half kernel dimension is taken, and its norm bound.
pub fn kernel_operator(o: &OrthogonalMatrix, j: &ComplexStructure, f: KernelFormula) -> (DMatrix<f64>, f64) {
    let (o, j) = (o.matrix(), j.matrix());
    match f {
        KernelFormula::SumOfStructures => (j + o * j * o.transpose(), 2.0),
        KernelFormula::AntiLinearPart => (o - j * o * j, 2.0),
        KernelFormula::Commutator => {
            let n = o.nrows();
            let comm = o * j - j * o;
            (DMatrix::identity(n, n) - o.transpose() * j * comm * 0.5, 1.0)
        }
    }
}

/// Full count behind [`j_kernel`].
pub fn j_kernel_count(
    o: &OrthogonalMatrix,
    j: &ComplexStructure,
    formula: KernelFormula,
    tol: &Tolerance,
) -> Result<HalfKernelCount> {
    tol.validate()?;
    check_dims(o, j)?;
    let (m, scale) = kernel_operator(o, j, formula);
    let n = m.nrows();
    if n == 0 {
        return half_kernel_count(&[], scale, 0.0);
    }
    let sv = singular_values(&m);
    half_kernel_count(&sv, scale, tol.kernel_tol_for(n, scale))
}

pub fn j_kernel(
    o: &OrthogonalMatrix,
    j: &ComplexStructure,
    formula: KernelFormula,
    tol: &Tolerance,
) -> Result<Z2> {
    Ok(j_kernel_count(o, j, formula, tol)?.value)
}

/// `O = U(1 + K)` with `U` orthogonal and commuting with `J`.
#[derive(Clone, Debug)]
pub struct JFactorization {
    pub u: DMatrix<f64>,
    pub k: DMatrix<f64>,
    /// Dimension of `ker S₀`, `S₀ = ½(O - JOJ)`.
    pub kernel_dim: usize,
    /// `dim ker(K + 2) mod 2`.
    pub value: Z2,
    pub residuals: FactorizationResiduals,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationResiduals {
    pub reconstruction: f64,
    pub commutation: f64,
    pub u_orthogonality: f64,
    pub one_plus_k_orthogonality: f64,
}

impl FactorizationResiduals {
    pub fn max(&self) -> f64 {
        self.reconstruction
            .max(self.commutation)
            .max(self.u_orthogonality)
            .max(self.one_plus_k_orthogonality)
    }
}

/// Orthonormal basis `v₁, Jv₁, v₂, Jv₂, …` of a `J`-invariant subspace
/// given by an orthonormal frame.
fn j_adapted_basis(frame: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    let n = frame.nrows();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(frame.ncols());
    for c in 0..frame.ncols() {
        if out.len() >= frame.ncols() {
            break;
        }
        let mut v = frame.column(c).into_owned();
        for _ in 0..2 {
            for w in &out {
                let d = w.dot(&v);
                v.axpy(-d, w, 1.0);
            }
        }
        let norm = v.norm();
        if norm < 0.5 {
            continue;
        }
        v /= norm;
        let jv = j * &v;
        out.push(v);
        out.push(jv);
    }
    let mut m = DMatrix::zeros(n, out.len());
    for (c, v) in out.iter().enumerate() {
        m.set_column(c, v);
    }
    m
}

/// Factorization following the polar decomposition of `S₀ = ½(O - JOJ)`.
pub fn factorize(
    o: &OrthogonalMatrix,
    j: &ComplexStructure,
    tol: &Tolerance,
) -> Result<JFactorization> {
    tol.validate()?;
    check_dims(o, j)?;
    let n = o.dim();
    let (om, jm) = (o.matrix(), j.matrix());
    let jo_j = jm * om * jm;
    let s0 = (om - &jo_j) * 0.5;
    let s1 = (om + &jo_j) * 0.5;

    // S₀ x = σ w from the symmetric eigenproblem of [[0, S₀], [S₀ᵀ, 0]].
    let mut aug = DMatrix::zeros(2 * n, 2 * n);
    aug.view_mut((0, n), (n, n)).copy_from(&s0);
    aug.view_mut((n, 0), (n, n)).copy_from(&s0.transpose());
    let eig = SymmetricEigen::new(aug);
    let kt = tol
        .kernel_tol
        .unwrap_or(64.0 * n as f64 * f64::EPSILON);
    let id = DMatrix::<f64>::identity(n, n);
    let mut abs_s0 = DMatrix::zeros(n, n);
    let mut v = DMatrix::zeros(n, n);
    let mut range_proj = DMatrix::zeros(n, n);
    let mut range = 0;
    for (i, &s) in eig.eigenvalues.iter().enumerate() {
        if s <= kt {
            continue;
        }
        if s <= tol.gap_ratio * kt {
            return Err(Z2Error::AmbiguousKernel {
                discarded: kt,
                kept: s,
                kernel_tol: kt,
                gap_ratio: tol.gap_ratio,
            });
        }
        let e = eig.eigenvectors.column(i);
        let w = e.rows(0, n) * std::f64::consts::SQRT_2;
        let x = e.rows(n, n) * std::f64::consts::SQRT_2;
        abs_s0 += &x * x.transpose() * s;
        v += &w * x.transpose();
        range_proj += &x * x.transpose();
        range += 1;
    }
    let kernel_dim = n - range;
    if kernel_dim % 2 == 1 {
        return Err(Z2Error::OddKernel(kernel_dim));
    }
    let pk = SymmetricEigen::new(&id - &range_proj);
    let kernel_cols: Vec<usize> = (0..n).filter(|&i| pk.eigenvalues[i] > 0.5).collect();
    if kernel_cols.len() != kernel_dim {
        return Err(Z2Error::CheckFailed {
            what: "kernel frame of S0",
            residual: kernel_cols.len() as f64,
            limit: kernel_dim as f64,
        });
    }
    let x = pk.eigenvectors;
    let kframe = DMatrix::from_fn(n, kernel_cols.len(), |r, c| x[(r, kernel_cols[c])]);
    let basis = j_adapted_basis(&kframe, jm);
    // I = +1 on v, -1 on Jv
    let mut inv = DMatrix::zeros(n, n);
    for p in 0..basis.ncols() / 2 {
        let a = basis.column(2 * p);
        let b = basis.column(2 * p + 1);
        inv += a * a.transpose() - b * b.transpose();
    }
    let u = &v + &s1 * &inv;
    let k = &abs_s0 - DMatrix::identity(n, n) + u.transpose() * &s1;

    let one_k = &id + &k;
    let residuals = FactorizationResiduals {
        reconstruction: op_norm(&(om - &u * &one_k)),
        commutation: op_norm(&(&u * jm - jm * &u)),
        u_orthogonality: op_norm(&(u.transpose() * &u - &id)),
        one_plus_k_orthogonality: op_norm(&(one_k.transpose() * &one_k - &id)),
    };
    if residuals.max() > 1e-9 {
        return Err(Z2Error::CheckFailed {
            what: "factorization O = U(1+K)",
            residual: residuals.max(),
            limit: 1e-9,
        });
    }
    // 1+K is orthogonal: |λ+1| < 1 picks eigenvalues near -1, and the
    // non-real ones come in conjugate pairs.
    let k2 = &k + &id * 2.0;
    let svk: Vec<f64> = if n == 0 {
        Vec::new()
    } else {
        singular_values(&k2)
    };
    let (threshold, _) = widest_gap(&svk, 0.5, 1.5);
    let below = svk.iter().filter(|&&s| s < threshold).count();
    Ok(JFactorization {
        u,
        k,
        kernel_dim,
        value: Z2::from_count(below),
        residuals,
    })
}

/// Residuals of the algebraic identities between `T₀ = ½(J₀+J₁)` and
/// `T₁ = ½(J₀-J₁)`.
#[derive(Clone, Debug, Serialize)]
pub struct PairIdentities {
    pub names: Vec<&'static str>,
    pub residuals: Vec<f64>,
}

impl PairIdentities {
    pub fn max(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

pub fn verify_pair_identities(j0: &ComplexStructure, j1: &ComplexStructure) -> Result<PairIdentities> {
    if j0.dim() != j1.dim() {
        return Err(Z2Error::DimensionMismatch(j0.dim(), j1.dim()));
    }
    let n = j0.dim();
    let (a, b) = (j0.matrix(), j1.matrix());
    let t0 = (a + b) * 0.5;
    let t1 = (a - b) * 0.5;
    let id = DMatrix::<f64>::identity(n, n);
    let r = |m: DMatrix<f64>| op_norm(&m);
    let names = vec![
        "T0*T0 + T1*T1 = 1",
        "T0T0* + T1T1* = 1",
        "T0*T1 + T1*T0 = 0",
        "T0T1* + T1T0* = 0",
        "T0J0 = J1T0",
        "T0J1 = J0T0",
        "T1J0 = -J1T1",
        "T1J1 = -J0T1",
    ];
    let residuals = vec![
        r(t0.transpose() * &t0 + t1.transpose() * &t1 - &id),
        r(&t0 * t0.transpose() + &t1 * t1.transpose() - &id),
        r(t0.transpose() * &t1 + t1.transpose() * &t0),
        r(&t0 * t1.transpose() + &t1 * t0.transpose()),
        r(&t0 * a - b * &t0),
        r(&t0 * b - a * &t0),
        r(&t1 * a + b * &t1),
        r(&t1 * b + a * &t1),
    ];
    Ok(PairIdentities { names, residuals })
}

/// Eigenvalue clusters of `(J₀+J₁)²` strictly inside `(lo, hi)`, as
/// `(centre, multiplicity)`. Values closer than `width` are merged.
pub fn square_sum_clusters(
    j0: &ComplexStructure,
    j1: &ComplexStructure,
    lo: f64,
    hi: f64,
    width: f64,
) -> Vec<(f64, usize)> {
    let s = j0.matrix() + j1.matrix();
    let sq = &s * &s;
    let eig = SymmetricEigen::new((&sq + sq.transpose()) * 0.5);
    let mut ev: Vec<f64> = eig
        .eigenvalues
        .iter()
        .copied()
        .filter(|&v| v > lo + width && v < hi - width)
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for v in ev {
        match out.last_mut() {
            Some((c, m)) if v - last <= width => {
                *c = (*c * *m as f64 + v) / (*m as f64 + 1.0);
                *m += 1;
            }
            _ => out.push((v, 1)),
        }
        last = v;
    }
    out
}

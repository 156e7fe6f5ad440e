//! Real skew-symmetric spectral machinery.
//!
//! A real skew matrix `T` is diagonalized through the Hermitian matrix `iT`.
//! Each positive eigenvalue `λ` of `iT` with eigenvector `x + iy` yields an
//! invariant plane `√2·[x, y]` on which `T` acts as `λσ`, `σ = [[0,-1],[1,0]]`.

use std::fmt;
use std::ops::{Add, AddAssign};

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Result, Z2Error};

type Complex64 = Complex<f64>;

/// Element of ℤ₂, serialized as 0 or 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Z2(u8);

impl Z2 {
    pub const ZERO: Z2 = Z2(0);
    pub const ONE: Z2 = Z2(1);

    pub fn from_count(n: usize) -> Z2 {
        Z2((n % 2) as u8)
    }

    /// `+1 ↦ 0`, `-1 ↦ 1`.
    pub fn from_sign(sign: i8) -> Z2 {
        if sign < 0 {
            Z2::ONE
        } else {
            Z2::ZERO
        }
    }

    pub fn sign(self) -> i8 {
        if self.0 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_one(self) -> bool {
        self.0 == 1
    }
}

impl Add for Z2 {
    type Output = Z2;
    fn add(self, rhs: Z2) -> Z2 {
        Z2(self.0 ^ rhs.0)
    }
}

impl AddAssign for Z2 {
    fn add_assign(&mut self, rhs: Z2) {
        self.0 ^= rhs.0;
    }
}

impl std::iter::Sum for Z2 {
    fn sum<I: Iterator<Item = Z2>>(iter: I) -> Z2 {
        iter.fold(Z2::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Z2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Numerical thresholds shared by the whole crate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute threshold below which `|λ|` counts as zero. `None` selects
    /// `dim · f64::EPSILON · ‖T‖₂` per matrix.
    pub kernel_tol: Option<f64>,
    /// Required ratio between the smallest kept and the largest discarded
    /// eigenvalue.
    pub gap_ratio: f64,
    /// Projector-variation bound used by the path partition.
    pub epsilon: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            kernel_tol: None,
            gap_ratio: 10.0,
            epsilon: 0.2,
        }
    }
}

impl Tolerance {
    pub fn with_kernel_tol(kernel_tol: f64) -> Self {
        Tolerance {
            kernel_tol: Some(kernel_tol),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.kernel_tol {
            if !(k >= 0.0) || !k.is_finite() {
                return Err(Z2Error::InvalidTolerance(format!("kernel_tol = {k}")));
            }
        }
        if !(self.gap_ratio >= 10.0) || !self.gap_ratio.is_finite() {
            return Err(Z2Error::InvalidTolerance(format!(
                "gap_ratio = {} (must be >= 10)",
                self.gap_ratio
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.2) {
            return Err(Z2Error::InvalidTolerance(format!(
                "epsilon = {} (must lie in (0, 0.2])",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Kernel threshold for a matrix of dimension `dim` and spectral norm `norm`.
    pub fn kernel_tol_for(&self, dim: usize, norm: f64) -> f64 {
        self.kernel_tol
            .unwrap_or(dim.max(1) as f64 * f64::EPSILON * norm)
    }
}

/// The 2×2 block `[[0,-1],[1,0]]`.
pub fn sigma() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

/// Block diagonal `diag(σ, …, σ)` of dimension `2·blocks`.
pub fn sigma_blocks(blocks: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * blocks, 2 * blocks);
    for b in 0..blocks {
        m[(2 * b, 2 * b + 1)] = -1.0;
        m[(2 * b + 1, 2 * b)] = 1.0;
    }
    m
}

/// Singular values in descending order.
///
/// Computed from the symmetric eigenproblem of `[[0, M], [Mᵀ, 0]]`, whose
/// eigenvalues are `±σᵢ` (padded with zeros). This keeps absolute accuracy
/// `O(ε‖M‖)` for every singular value, including clustered ones, where the
/// bidiagonal SVD in nalgebra was observed to lose accuracy.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Vec::new();
    }
    let mut a = DMatrix::zeros(r + c, r + c);
    a.view_mut((0, r), (r, c)).copy_from(m);
    a.view_mut((r, 0), (c, r)).copy_from(&m.transpose());
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev.truncate(k);
    ev.iter_mut().for_each(|v| *v = v.max(0.0));
    ev
}

/// Spectral norm.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m)[0]
}

/// Sign of the determinant from an LU factorization with partial pivoting.
/// Returns 0 for an exactly singular pivot.
pub fn det_sign(m: &DMatrix<f64>) -> i8 {
    assert!(m.is_square(), "det_sign needs a square matrix");
    if m.nrows() == 0 {
        return 1;
    }
    let lu = m.clone().lu();
    let mut sign: i8 = lu.p().determinant::<f64>().signum() as i8;
    let u = lu.u();
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if d == 0.0 {
            return 0;
        }
        if d < 0.0 {
            sign = -sign;
        }
    }
    sign
}

/// Real skew-symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix {
    m: DMatrix<f64>,
}

impl SkewMatrix {
    /// Antisymmetrizes `m`; asymmetry above `1e-12·‖m‖` is rejected.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Z2Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        let asym = (&m + m.transpose()).norm() * 0.5;
        let limit = 1e-12 * m.norm();
        if asym > limit {
            return Err(Z2Error::NotSkew {
                asymmetry: asym,
                limit,
            });
        }
        let m = (&m - m.transpose()) * 0.5;
        Ok(SkewMatrix { m })
    }

    pub fn zeros(dim: usize) -> Self {
        SkewMatrix {
            m: DMatrix::zeros(dim, dim),
        }
    }

    pub fn sigma() -> Self {
        SkewMatrix { m: sigma() }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Congruence `Bᵀ T B`; stays skew.
    pub fn congruence(&self, b: &DMatrix<f64>) -> SkewMatrix {
        let m = b.transpose() * &self.m * b;
        SkewMatrix {
            m: (&m - m.transpose()) * 0.5,
        }
    }

    pub fn scale(&self, c: f64) -> SkewMatrix {
        SkewMatrix { m: &self.m * c }
    }

    pub fn neg(&self) -> SkewMatrix {
        self.scale(-1.0)
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &SkewMatrix) -> SkewMatrix {
        let (a, b) = (self.dim(), other.dim());
        let mut m = DMatrix::zeros(a + b, a + b);
        m.view_mut((0, 0), (a, a)).copy_from(&self.m);
        m.view_mut((a, a), (b, b)).copy_from(&other.m);
        SkewMatrix { m }
    }

    pub fn norm(&self) -> f64 {
        op_norm(&self.m)
    }
}

impl std::ops::Index<(usize, usize)> for SkewMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.m[idx]
    }
}

/// Real matrix `J` with `Jᵀ = -J` and `J² = -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStructure {
    m: DMatrix<f64>,
}

impl ComplexStructure {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Z2Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        let n = m.nrows();
        if n % 2 == 1 {
            return Err(Z2Error::OddDimension(n));
        }
        let skew = (&m + m.transpose()).amax();
        let square = (&m * &m + DMatrix::identity(n, n)).amax();
        let residual = skew.max(square);
        if residual > 1e-10 {
            return Err(Z2Error::NotComplexStructure { residual });
        }
        Ok(ComplexStructure { m })
    }

    /// `diag(σ, …, σ)`.
    pub fn standard(dim: usize) -> Result<Self> {
        if dim % 2 == 1 {
            return Err(Z2Error::OddDimension(dim));
        }
        Ok(ComplexStructure {
            m: sigma_blocks(dim / 2),
        })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// `O J Oᵀ`.
    pub fn conjugate(&self, o: &OrthogonalMatrix) -> Result<ComplexStructure> {
        let m = o.matrix() * &self.m * o.matrix().transpose();
        ComplexStructure::new((&m - m.transpose()) * 0.5)
    }

    pub fn neg(&self) -> ComplexStructure {
        ComplexStructure { m: -&self.m }
    }

    pub fn as_skew(&self) -> SkewMatrix {
        SkewMatrix { m: self.m.clone() }
    }
}

/// Real matrix `O` with `OᵀO = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalMatrix {
    m: DMatrix<f64>,
}

impl OrthogonalMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Z2Error::DimensionMismatch(m.nrows(), m.ncols()));
        }
        let n = m.nrows();
        let residual = (m.transpose() * &m - DMatrix::identity(n, n)).amax();
        if residual > 1e-10 {
            return Err(Z2Error::NotOrthogonal { residual });
        }
        Ok(OrthogonalMatrix { m })
    }

    pub fn identity(dim: usize) -> Self {
        OrthogonalMatrix {
            m: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn mul(&self, other: &OrthogonalMatrix) -> OrthogonalMatrix {
        OrthogonalMatrix {
            m: &self.m * &other.m,
        }
    }

    pub fn transpose(&self) -> OrthogonalMatrix {
        OrthogonalMatrix {
            m: self.m.transpose(),
        }
    }
}

/// Spectral decomposition of a real skew matrix.
#[derive(Clone, Debug)]
pub struct SpectralData {
    /// Positive `λ_j`, sorted descending.
    pub values: Vec<f64>,
    /// `dim × 2m` matrix; columns `2j, 2j+1` span the plane of `λ_j`.
    pub planes: DMatrix<f64>,
    /// `dim × k` orthonormal kernel frame.
    pub kernel: DMatrix<f64>,
    /// Threshold that was applied.
    pub kernel_tol: f64,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.planes.nrows()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.ncols()
    }

    pub fn pair_count(&self) -> usize {
        self.values.len()
    }

    pub fn plane(&self, j: usize) -> DMatrix<f64> {
        self.planes.columns(2 * j, 2).into_owned()
    }

    /// `|T|`-spectrum as a sorted list with multiplicity: `k` zeros followed
    /// by each `λ_j` twice, ascending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.kernel_dim()];
        for &v in self.values.iter().rev() {
            s.push(v);
            s.push(v);
        }
        s
    }

    /// `Σ_j plane_j (λ_j σ) plane_jᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut t = DMatrix::zeros(n, n);
        for (j, &v) in self.values.iter().enumerate() {
            let x = self.planes.column(2 * j);
            let y = self.planes.column(2 * j + 1);
            t += (y * x.transpose() - x * y.transpose()) * v;
        }
        t
    }

    /// Orthonormal frame of the spectral window `(-a, a)`: planes with
    /// `λ_j < a` followed by the kernel.
    pub fn window_frame(&self, a: f64) -> DMatrix<f64> {
        let inside: Vec<usize> = (0..self.values.len())
            .filter(|&j| self.values[j] < a)
            .collect();
        let n = self.dim();
        let k = self.kernel_dim();
        let mut f = DMatrix::zeros(n, 2 * inside.len() + k);
        for (c, &j) in inside.iter().enumerate() {
            f.column_mut(2 * c).copy_from(&self.planes.column(2 * j));
            f.column_mut(2 * c + 1).copy_from(&self.planes.column(2 * j + 1));
        }
        f.view_mut((0, 2 * inside.len()), (n, k))
            .copy_from(&self.kernel);
        f
    }
}

fn skew_to_hermitian(t: &DMatrix<f64>) -> DMatrix<Complex64> {
    t.map(|v| Complex64::new(0.0, v))
}

/// Eigenvalues of `iT`, ascending. Cheaper than [`eig_skew`] when no frames
/// are needed.
pub fn skew_eigenvalues(t: &SkewMatrix) -> Vec<f64> {
    if t.dim() == 0 {
        return Vec::new();
    }
    let ev = skew_to_hermitian(t.matrix()).symmetric_eigenvalues();
    let mut v: Vec<f64> = ev.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Orthonormal basis of the range of a real orthogonal projector, chosen by
/// pivoted Gram–Schmidt on its columns (largest residual first, lowest index
/// on ties), then oriented and ordered by the kernel-frame convention.
fn canonical_basis(p: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = p.nrows();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(k);
    let mut residual: Vec<DVector<f64>> = (0..n).map(|i| p.column(i).into_owned()).collect();
    for _ in 0..k {
        let norms: Vec<f64> = residual.iter().map(|r| r.norm()).collect();
        let best = norms.iter().cloned().fold(0.0, f64::max);
        let pick = norms
            .iter()
            .position(|&v| v >= best * (1.0 - 1e-9))
            .unwrap_or(0);
        let mut v = residual[pick].clone();
        // second pass of orthogonalization for stability
        for b in &basis {
            let c = b.dot(&v);
            v.axpy(-c, b, 1.0);
        }
        let nv = v.norm();
        v /= nv;
        for r in residual.iter_mut() {
            let c = v.dot(r);
            r.axpy(-c, &v, 1.0);
        }
        basis.push(v);
    }
    orient_kernel_vectors(&mut basis);
    let mut f = DMatrix::zeros(n, k);
    for (c, v) in basis.iter().enumerate() {
        f.column_mut(c).copy_from(v);
    }
    f
}

fn first_nonzero(v: &DVector<f64>) -> f64 {
    let scale = v.amax();
    v.iter()
        .copied()
        .find(|x| x.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE))
        .unwrap_or(0.0)
}

/// Kernel-frame convention: first nonzero coordinate positive, vectors
/// ordered by descending absolute value of that coordinate.
pub fn orient_kernel_vectors(vs: &mut [DVector<f64>]) {
    for v in vs.iter_mut() {
        if first_nonzero(v) < 0.0 {
            v.neg_mut();
        }
    }
    vs.sort_by(|a, b| first_nonzero(b).abs().total_cmp(&first_nonzero(a).abs()));
}

/// Spectral decomposition of a real skew matrix.
pub fn eig_skew(t: &SkewMatrix, tol: &Tolerance) -> Result<SpectralData> {
    tol.validate()?;
    let n = t.dim();
    if n == 0 {
        return Ok(SpectralData {
            values: Vec::new(),
            planes: DMatrix::zeros(0, 0),
            kernel: DMatrix::zeros(0, 0),
            kernel_tol: 0.0,
        });
    }
    let eig = SymmetricEigen::new(skew_to_hermitian(t.matrix()));
    let norm = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let kt = tol.kernel_tol_for(n, norm);

    let mut positive: Vec<(f64, usize)> = Vec::new();
    let mut kernel_idx: Vec<usize> = Vec::new();
    let mut negative = 0usize;
    for (i, &mu) in eig.eigenvalues.iter().enumerate() {
        if mu > kt {
            positive.push((mu, i));
        } else if mu < -kt {
            negative += 1;
        } else {
            kernel_idx.push(i);
        }
    }
    let discarded = kernel_idx
        .iter()
        .map(|&i| eig.eigenvalues[i].abs())
        .fold(0.0_f64, f64::max);
    let kept = eig
        .eigenvalues
        .iter()
        .filter(|v| v.abs() > kt)
        .map(|v| v.abs())
        .fold(f64::INFINITY, f64::min);
    let ambiguous = positive.len() != negative
        || (kept.is_finite() && kept < tol.gap_ratio * discarded)
        || (kept.is_finite() && kept <= tol.gap_ratio * kt);
    if ambiguous {
        return Err(Z2Error::AmbiguousKernel {
            discarded,
            kept,
            kernel_tol: kt,
            gap_ratio: tol.gap_ratio,
        });
    }

    positive.sort_by(|a, b| b.0.total_cmp(&a.0));
    let m = positive.len();
    let mut planes = DMatrix::zeros(n, 2 * m);
    let mut values = Vec::with_capacity(m);
    let s2 = std::f64::consts::SQRT_2;
    for (c, &(mu, i)) in positive.iter().enumerate() {
        let v = eig.eigenvectors.column(i);
        let vmax = v.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        let p = v
            .iter()
            .position(|z| z.norm() >= vmax * (1.0 - 1e-9))
            .unwrap_or(0);
        let phase = v[p].conj() / v[p].norm();
        for r in 0..n {
            let z = v[r] * phase;
            planes[(r, 2 * c)] = z.re * s2;
            planes[(r, 2 * c + 1)] = z.im * s2;
        }
        values.push(mu);
    }

    let k = kernel_idx.len();
    let kernel = if k == 0 {
        DMatrix::zeros(n, 0)
    } else if k == n {
        canonical_basis(&DMatrix::identity(n, n), k)
    } else {
        let mut p = DMatrix::<f64>::zeros(n, n);
        for &i in &kernel_idx {
            let w = eig.eigenvectors.column(i);
            for c in 0..n {
                for r in 0..n {
                    p[(r, c)] += (w[r] * w[c].conj()).re;
                }
            }
        }
        canonical_basis(&p, k)
    };
    debug_assert_eq!(2 * m + k, n);
    if (k % 2) != (n % 2) {
        return Err(Z2Error::AmbiguousKernel {
            discarded,
            kept,
            kernel_tol: kt,
            gap_ratio: tol.gap_ratio,
        });
    }
    Ok(SpectralData {
        values,
        planes,
        kernel,
        kernel_tol: kt,
    })
}

/// `dim ker T mod 2`.
pub fn kernel_parity(t: &SkewMatrix, tol: &Tolerance) -> Result<Z2> {
    let sd = eig_skew(t, tol)?;
    let parity = Z2::from_count(sd.kernel_dim());
    debug_assert_eq!(parity, Z2::from_count(t.dim()));
    Ok(parity)
}

/// Phase `W = T|T|⁻¹` extended by zero on the kernel.
pub fn phase(t: &SkewMatrix, tol: &Tolerance) -> Result<SkewMatrix> {
    let sd = eig_skew(t, tol)?;
    Ok(phase_from(&sd))
}

pub(crate) fn phase_from(sd: &SpectralData) -> SkewMatrix {
    let n = sd.dim();
    let mut w = DMatrix::zeros(n, n);
    for j in 0..sd.pair_count() {
        let x = sd.planes.column(2 * j);
        let y = sd.planes.column(2 * j + 1);
        w += y * x.transpose() - x * y.transpose();
    }
    SkewMatrix { m: w }
}

/// Adds `σ` blocks on the kernel of `W` (paired in kernel-frame order).
pub fn complete_structure(w: &SkewMatrix, tol: &Tolerance) -> Result<ComplexStructure> {
    let sd = eig_skew(w, tol)?;
    let k = sd.kernel_dim();
    if k % 2 == 1 {
        return Err(Z2Error::OddKernel(k));
    }
    let mut j = w.matrix().clone();
    for b in 0..k / 2 {
        let x = sd.kernel.column(2 * b);
        let y = sd.kernel.column(2 * b + 1);
        j += y * x.transpose() - x * y.transpose();
    }
    ComplexStructure::new(j)
}

/// Orthonormal frame of `χ_(-a,a)(iT)`.
pub fn window_projection(t: &SkewMatrix, a: f64, tol: &Tolerance) -> Result<DMatrix<f64>> {
    let sd = eig_skew(t, tol)?;
    check_window(&sd, a)?;
    Ok(sd.window_frame(a))
}

pub(crate) fn check_window(sd: &SpectralData, a: f64) -> Result<()> {
    for &v in &sd.values {
        if (v - a).abs() < sd.kernel_tol.max(f64::MIN_POSITIVE) {
            return Err(Z2Error::WindowOnEigenvalue {
                radius: a,
                eigenvalue: v,
                kernel_tol: sd.kernel_tol,
            });
        }
    }
    Ok(())
}

/// Orthogonal `O` with `Oᵀ T O = diag(λ₁σ, …, λ_mσ, 0_k)` and `parity = sgn det O`.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub o: DMatrix<f64>,
    pub values: Vec<f64>,
    pub parity: Z2,
}

pub fn canonical_form(t: &SkewMatrix, tol: &Tolerance) -> Result<CanonicalForm> {
    let sd = eig_skew(t, tol)?;
    Ok(canonical_from(&sd, None))
}

/// Canonical form from spectral data; `kernel` overrides the kernel columns
/// (used to carry a transported orientation).
pub(crate) fn canonical_from(sd: &SpectralData, kernel: Option<&DMatrix<f64>>) -> CanonicalForm {
    let n = sd.dim();
    let kern = kernel.unwrap_or(&sd.kernel);
    let mut o = DMatrix::zeros(n, n);
    let p = sd.planes.ncols();
    o.view_mut((0, 0), (n, p)).copy_from(&sd.planes);
    o.view_mut((0, p), (n, kern.ncols())).copy_from(kern);
    let parity = Z2::from_sign(det_sign(&o));
    CanonicalForm {
        o,
        values: sd.values.clone(),
        parity,
    }
}

/// Distance `‖Q - Q'‖` between the orthogonal projectors onto the column
/// spans of two orthonormal frames.
pub fn projector_distance(f: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    if f.ncols() != g.ncols() {
        return 1.0;
    }
    if f.ncols() == 0 {
        return 0.0;
    }
    // sine of the largest principal angle
    let resid = g - f * (f.transpose() * g);
    op_norm(&resid).min(1.0)
}

/// Identification map `V v = Q' v` between window subspaces, in frame coordinates.
#[derive(Clone, Debug)]
pub struct Identification {
    /// `r × r` matrix of `V : ran F → ran F'`.
    pub v: DMatrix<f64>,
    /// `‖Q - Q'‖`.
    pub distance: f64,
}

pub fn subspace_identification(
    f: &DMatrix<f64>,
    g: &DMatrix<f64>,
    _tol: &Tolerance,
) -> Result<Identification> {
    if f.ncols() != g.ncols() || f.nrows() != g.nrows() {
        return Err(Z2Error::DimensionMismatch(f.ncols(), g.ncols()));
    }
    let r = f.ncols();
    let distance = projector_distance(f, g);
    if distance >= 0.5 {
        return Err(Z2Error::FramesTooFar { distance });
    }
    let v = g.transpose() * f;
    if r > 0 {
        let slack = 1e-12;
        let vtv = v.transpose() * &v - DMatrix::<f64>::identity(r, r);
        let dev = op_norm(&vtv);
        if dev > 2.0 * distance + slack {
            return Err(Z2Error::CheckFailed {
                what: "identification |V^T V - 1|",
                residual: dev,
                limit: 2.0 * distance,
            });
        }
        let smin = *singular_values(&v).last().unwrap();
        let inv_norm = 1.0 / smin;
        if inv_norm > 1.0 + 2.0 * distance + slack {
            return Err(Z2Error::CheckFailed {
                what: "identification |V^-1|",
                residual: inv_norm,
                limit: 1.0 + 2.0 * distance,
            });
        }
    }
    Ok(Identification { v, distance })
}

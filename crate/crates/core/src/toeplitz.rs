//! Toeplitz ℤ₂-index of a real orthogonal matrix with respect to a complex
//! structure, and the shift model on a finite circle.
//!
//! Circle layout: sites `n = -N..=N` on the circle `ℤ/(2N+1)`, each carrying
//! a fiber `ℂ²`. Complex vectors are indexed `2(n+N) + a` with fiber index
//! `a ∈ {0,1}`. The real structure is `ψ(n) ↦ conj ψ(-n)`; the real basis
//! used for all real matrices is, per fiber `a`,
//!
//! * `δ₀ ⊗ e_a` at real index `a`,
//! * `(δ_m + δ_{-m})/√2 ⊗ e_a` at `2 + 4(m-1) + 2a`,
//! * `i(δ_m - δ_{-m})/√2 ⊗ e_a` at `2 + 4(m-1) + 2a + 1`,
//!
//! for `m = 1..=N`. Every basis vector is supported on `{m, -m}`, so
//! projections onto symmetric regions `|n| ≤ r` are diagonal.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Result, Z2Error};
use crate::finite::structures_kernel_count;
use crate::linalg::{eig_skew, ComplexStructure, OrthogonalMatrix, SkewMatrix, Tolerance, Z2};

pub type C64 = Complex<f64>;

const I: C64 = Complex { re: 0.0, im: 1.0 };

fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

/// Singular values (descending) of a complex matrix via the Hermitian
/// eigenproblem of `[[0, M], [M*, 0]]`.
pub fn complex_singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let (r, k) = m.shape();
    let q = r.min(k);
    if q == 0 {
        return Vec::new();
    }
    let mut a = DMatrix::zeros(r + k, r + k);
    a.view_mut((0, r), (r, k)).copy_from(m);
    a.view_mut((r, 0), (k, r)).copy_from(&m.adjoint());
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev.truncate(q);
    ev.iter_mut().for_each(|v| *v = v.max(0.0));
    ev
}

fn complex_norm(m: &DMatrix<C64>) -> f64 {
    complex_singular_values(m).first().copied().unwrap_or(0.0)
}

/// A Hermitian idempotent complex matrix.
#[derive(Clone, Debug)]
pub struct ComplexProjector {
    p: DMatrix<C64>,
}

impl ComplexProjector {
    pub fn new(p: DMatrix<C64>) -> Result<Self> {
        let herm = complex_norm(&(&p - p.adjoint()));
        let idem = complex_norm(&(&p * &p - &p));
        let residual = herm.max(idem);
        if residual > 1e-10 {
            return Err(Z2Error::CheckFailed {
                what: "projector P^2 = P = P*",
                residual,
                limit: 1e-10,
            });
        }
        Ok(ComplexProjector { p })
    }

    /// Spectral projection of `J` onto the eigenvalue `+i`, `(1 - iJ)/2`.
    pub fn positive_imaginary(j: &ComplexStructure) -> Self {
        let n = j.dim();
        let jm = j.matrix().map(c);
        let p = (DMatrix::<C64>::identity(n, n) - jm * I) * c(0.5);
        ComplexProjector { p }
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.p
    }

    /// `‖conj(P) - (1 - P)‖`.
    pub fn lagrangian_residual(&self) -> f64 {
        let n = self.dim();
        let conj = self.p.map(|z| z.conj());
        complex_norm(&(conj - (DMatrix::identity(n, n) - &self.p)))
    }

    /// Orthonormal frame of the range.
    pub fn frame(&self) -> DMatrix<C64> {
        let eig = SymmetricEigen::new(self.p.clone());
        let cols: Vec<usize> = (0..self.dim())
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .collect();
        DMatrix::from_fn(self.dim(), cols.len(), |r, k| eig.eigenvectors[(r, cols[k])])
    }
}

/// `dim_ℂ ker(POP|_{ran P}) mod 2` with `P` the `+i` spectral projection.
#[derive(Clone, Debug, Serialize)]
pub struct ToeplitzIndex {
    pub value: Z2,
    pub kernel_dim: usize,
    /// Smallest singular value of the compression above the kernel.
    pub smallest_kept: f64,
    pub kernel_tol: f64,
}

fn toeplitz_kernel(
    o: &OrthogonalMatrix,
    j: &ComplexStructure,
    tol: &Tolerance,
) -> Result<(ToeplitzIndex, DMatrix<C64>)> {
    tol.validate()?;
    if o.dim() != j.dim() {
        return Err(Z2Error::DimensionMismatch(o.dim(), j.dim()));
    }
    let n = o.dim();
    let f = ComplexProjector::positive_imaginary(j).frame();
    let m = f.adjoint() * o.matrix().map(c) * &f;
    let kt = tol.kernel_tol_for(n, 1.0);
    // right singular vectors from the Hermitian eigenproblem of M*M are
    // enough for the kernel frame; the count comes from the augmented form
    let sv = complex_singular_values(&m);
    let mut kernel_dim = 0;
    let mut smallest_kept = f64::INFINITY;
    for &s in &sv {
        if s <= kt {
            kernel_dim += 1;
        } else if s <= tol.gap_ratio * kt {
            return Err(Z2Error::AmbiguousKernel {
                discarded: kt,
                kept: s,
                kernel_tol: kt,
                gap_ratio: tol.gap_ratio,
            });
        } else {
            smallest_kept = smallest_kept.min(s);
        }
    }
    let mm = m.adjoint() * &m;
    let eig = SymmetricEigen::new((&mm + mm.adjoint()) * c(0.5));
    let mut idx: Vec<usize> = (0..mm.nrows()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    idx.truncate(kernel_dim);
    let z = DMatrix::from_fn(mm.nrows(), kernel_dim, |r, k| eig.eigenvectors[(r, idx[k])]);
    Ok((
        ToeplitzIndex {
            value: Z2::from_count(kernel_dim),
            kernel_dim,
            smallest_kept,
            kernel_tol: kt,
        },
        &f * z,
    ))
}

pub fn z2_toeplitz_index(
    o: &OrthogonalMatrix,
    j: &ComplexStructure,
    tol: &Tolerance,
) -> Result<ToeplitzIndex> {
    Ok(toeplitz_kernel(o, j, tol)?.0)
}

/// The shift model on a circle with `2N+1` sites.
#[derive(Clone, Debug)]
pub struct CirclePair {
    pub sites: usize,
    pub j: ComplexStructure,
    pub o: OrthogonalMatrix,
    /// Complex operators in the site layout.
    pub j_hat: DMatrix<C64>,
    pub o_hat: DMatrix<C64>,
    /// Columns are the real basis vectors in the site layout.
    pub basis: DMatrix<C64>,
}

impl CirclePair {
    pub fn half_width(&self) -> usize {
        (self.sites - 1) / 2
    }

    /// Complex index of site `n`, fiber `a`.
    pub fn index(&self, n: i64, a: usize) -> usize {
        circle_index(self.half_width(), n, a)
    }
}

fn circle_index(nh: usize, n: i64, a: usize) -> usize {
    2 * (n + nh as i64) as usize + a
}

/// Real index of the basis vector with orbit `m`, fiber `a` and parity
/// `odd` (ignored for `m = 0`).
pub fn real_index(m: usize, a: usize, odd: bool) -> usize {
    if m == 0 {
        a
    } else {
        2 + 4 * (m - 1) + 2 * a + odd as usize
    }
}

/// Diagonal weights of the region `|n| ≤ radius` in the real basis.
pub fn region_weights(nh: usize, radius: usize) -> DVector<f64> {
    let mut w = DVector::zeros(2 * (2 * nh + 1));
    for m in 0..=nh.min(radius) {
        for a in 0..2 {
            w[real_index(m, a, false)] = 1.0;
            if m > 0 {
                w[real_index(m, a, true)] = 1.0;
            }
        }
    }
    w
}

/// Sign of the position, `sgn(0) = 0`.
fn sgn(n: i64) -> f64 {
    (n.signum()) as f64
}

/// Circular shift `(Sψ)(n) = ψ(n+1)`.
pub fn circle_shift(nh: usize) -> DMatrix<C64> {
    let m = 2 * nh + 1;
    let mut s = DMatrix::zeros(m, m);
    for r in 0..m {
        s[(r, (r + 1) % m)] = c(1.0);
    }
    s
}

/// `A ⊗ E_ab` in the site layout.
fn fiber_block(a: &DMatrix<C64>, out: &mut DMatrix<C64>, fa: usize, fb: usize) {
    let m = a.nrows();
    for r in 0..m {
        for k in 0..m {
            out[(2 * r + fa, 2 * k + fb)] += a[(r, k)];
        }
    }
}

pub fn build_circle_pair(nh: usize) -> Result<CirclePair> {
    if nh < 2 {
        return Err(Z2Error::InvalidTolerance(format!(
            "circle needs at least 2 sites on each side, got {nh}"
        )));
    }
    let m = 2 * nh + 1;
    let d = 2 * m;
    // Ĵ = i sgn(X) ⊗ 1 + p₀ ⊗ σ
    let mut jh = DMatrix::<C64>::zeros(d, d);
    for n in -(nh as i64)..=nh as i64 {
        for a in 0..2 {
            let k = circle_index(nh, n, a);
            jh[(k, k)] = I * sgn(n);
        }
    }
    let z = circle_index(nh, 0, 0);
    jh[(z, z + 1)] = c(-1.0);
    jh[(z + 1, z)] = c(1.0);

    // Ô = ½ [[S+S*, i(S*-S)], [i(S-S*), S+S*]]
    let s = circle_shift(nh);
    let sa = s.adjoint();
    let mut oh = DMatrix::<C64>::zeros(d, d);
    let half = c(0.5);
    fiber_block(&((&s + &sa) * half), &mut oh, 0, 0);
    fiber_block(&((&sa - &s) * (I * half)), &mut oh, 0, 1);
    fiber_block(&((&s - &sa) * (I * half)), &mut oh, 1, 0);
    fiber_block(&((&s + &sa) * half), &mut oh, 1, 1);

    // real basis
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut b = DMatrix::<C64>::zeros(d, d);
    for a in 0..2 {
        b[(circle_index(nh, 0, a), real_index(0, a, false))] = c(1.0);
        for mm in 1..=nh {
            let (p, q) = (circle_index(nh, mm as i64, a), circle_index(nh, -(mm as i64), a));
            let (e, o) = (real_index(mm, a, false), real_index(mm, a, true));
            b[(p, e)] = c(r2);
            b[(q, e)] = c(r2);
            b[(p, o)] = I * r2;
            b[(q, o)] = -I * r2;
        }
    }
    let to_real = |a: &DMatrix<C64>, what: &'static str| -> Result<DMatrix<f64>> {
        let r = b.adjoint() * a * &b;
        let imag = r.map(|z| z.im.abs()).max();
        if imag > 1e-12 {
            return Err(Z2Error::CheckFailed {
                what,
                residual: imag,
                limit: 1e-12,
            });
        }
        Ok(r.map(|z| z.re))
    };
    let j = ComplexStructure::new(to_real(&jh, "real form of J")?)?;
    let o = OrthogonalMatrix::new(to_real(&oh, "real form of O")?)?;
    Ok(CirclePair {
        sites: m,
        j,
        o,
        j_hat: jh,
        o_hat: oh,
        basis: b,
    })
}

/// Sites (as positions) of rows where `|a|` has an entry above `tol`.
pub fn row_support(a: &DMatrix<C64>, nh: usize, tol: f64) -> Vec<i64> {
    let mut out = Vec::new();
    for n in -(nh as i64)..=nh as i64 {
        let hit = (0..2).any(|f| {
            let r = circle_index(nh, n, f);
            a.row(r).iter().any(|z| z.norm() > tol)
        });
        if hit {
            out.push(n);
        }
    }
    out
}

/// How `ÔĴÔ*` compares with `i sgn(X) ⊗ 1 - p₀ ⊗ σ`.
#[derive(Clone, Debug, Serialize)]
pub struct ConjugationReport {
    /// Largest entry of the difference away from the wrap sites `±N`.
    pub interior_residual: f64,
    /// Sites where the difference is nonzero.
    pub support: Vec<i64>,
    /// Sites where `[Ô, Ĵ]` is nonzero.
    pub commutator_support: Vec<i64>,
}

pub fn conjugation_report(pair: &CirclePair) -> ConjugationReport {
    let nh = pair.half_width();
    let d = 2 * pair.sites;
    let mut target = DMatrix::<C64>::zeros(d, d);
    for n in -(nh as i64)..=nh as i64 {
        for a in 0..2 {
            let k = circle_index(nh, n, a);
            target[(k, k)] = I * sgn(n);
        }
    }
    let z = circle_index(nh, 0, 0);
    target[(z, z + 1)] = c(1.0);
    target[(z + 1, z)] = c(-1.0);
    let diff = &pair.o_hat * &pair.j_hat * pair.o_hat.adjoint() - target;
    let mut interior = 0.0_f64;
    for r in 0..d {
        for k in 0..d {
            let (sr, sk) = (r as i64 / 2 - nh as i64, k as i64 / 2 - nh as i64);
            if sr.unsigned_abs() as usize == nh || sk.unsigned_abs() as usize == nh {
                continue;
            }
            interior = interior.max(diff[(r, k)].norm());
        }
    }
    let comm = &pair.o_hat * &pair.j_hat - &pair.j_hat * &pair.o_hat;
    ConjugationReport {
        interior_residual: interior,
        support: row_support(&diff, nh, 1e-12),
        commutator_support: row_support(&comm, nh, 1e-12),
    }
}

/// Counts split between the region around the defect and its complement.
#[derive(Clone, Debug, Serialize)]
pub struct ResolvedCount {
    pub total: Z2,
    pub defect: Z2,
    pub boundary: Z2,
    pub total_dim: usize,
    pub defect_dim: usize,
    pub boundary_dim: usize,
    pub region_radius: usize,
}

/// Number of frame directions localized in the region with weights `w`.
/// Mixed directions are refused.
fn localized_count(frame_weights: &DMatrix<f64>) -> Result<usize> {
    let eig = SymmetricEigen::new((frame_weights + frame_weights.transpose()) * 0.5);
    let mut inside = 0;
    for &v in eig.eigenvalues.iter() {
        if v > 0.1 && v < 0.9 {
            return Err(Z2Error::SectorMixing { weight: v });
        }
        if v >= 0.9 {
            inside += 1;
        }
    }
    Ok(inside)
}

fn resolved(total_dim: usize, defect_dim: usize, halve: bool, radius: usize) -> Result<ResolvedCount> {
    let boundary_dim = total_dim - defect_dim;
    let f = |k: usize| -> Result<Z2> {
        if halve {
            if k % 2 == 1 {
                return Err(Z2Error::OddKernel(k));
            }
            Ok(Z2::from_count(k / 2))
        } else {
            Ok(Z2::from_count(k))
        }
    };
    Ok(ResolvedCount {
        total: f(total_dim)?,
        defect: f(defect_dim)?,
        boundary: f(boundary_dim)?,
        total_dim,
        defect_dim,
        boundary_dim,
        region_radius: radius,
    })
}

/// `SF₂(J, OJOᵀ) = ½ dim ker(J + OJOᵀ) mod 2`, globally and split into the
/// part localized at `|n| ≤ ⌊N/2⌋` and the rest.
pub fn sf2_conjugated(pair: &CirclePair, tol: &Tolerance) -> Result<ResolvedCount> {
    let nh = pair.half_width();
    let radius = nh / 2;
    let j1 = pair.j.conjugate(&pair.o)?;
    let global = structures_kernel_count(&pair.j, &j1, tol)?;
    let sum = SkewMatrix::new(pair.j.matrix() + j1.matrix())?;
    let sd = eig_skew(&sum, tol)?;
    if sd.kernel_dim() != global.below {
        return Err(Z2Error::AmbiguousKernel {
            discarded: global.threshold,
            kept: sd.kernel_tol,
            kernel_tol: sd.kernel_tol,
            gap_ratio: tol.gap_ratio,
        });
    }
    let w = region_weights(nh, radius);
    let k = &sd.kernel;
    let g = k.transpose() * DMatrix::from_diagonal(&w) * k;
    let defect = localized_count(&g)?;
    resolved(sd.kernel_dim(), defect, true, radius)
}

/// Toeplitz index of the circle pair, globally and split as in
/// [`sf2_conjugated`].
pub fn toeplitz_index_resolved(pair: &CirclePair, tol: &Tolerance) -> Result<ResolvedCount> {
    let nh = pair.half_width();
    let radius = nh / 2;
    let (idx, kern) = toeplitz_kernel(&pair.o, &pair.j, tol)?;
    let w = region_weights(nh, radius).map(c);
    let g = kern.adjoint() * DMatrix::from_diagonal(&w) * &kern;
    let eig = SymmetricEigen::new((&g + g.adjoint()) * c(0.5));
    let mut defect = 0;
    for &v in eig.eigenvalues.iter() {
        if v > 0.1 && v < 0.9 {
            return Err(Z2Error::SectorMixing { weight: v });
        }
        if v >= 0.9 {
            defect += 1;
        }
    }
    resolved(idx.kernel_dim, defect, false, radius)
}

/// Residuals of the Cayley-transformed circle model.
#[derive(Clone, Debug, Serialize)]
pub struct CayleyReport {
    /// `‖C Ô C* - diag(S, S*)‖`.
    pub shift_residual: f64,
    /// `‖C P̂ C* - diag(p_>, p_≥)‖` with `P̂ = (1 - iĴ)/2`.
    pub projector_residual: f64,
    /// `‖P̃ÕP̃ - diag(p_> S p_>, p_≥ S* p_≥)‖` with one-sided (non-wrapping)
    /// shifts on the right-hand side.
    pub compressed_residual: f64,
    /// Entries of the circular compression coming from the wrap bond.
    pub wrap_terms: f64,
}

/// Per-site Cayley matrix `2^{-1/2} [[1, -i], [1, i]]` on the fibers.
pub fn cayley_matrix(sites: usize) -> DMatrix<C64> {
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut cm = DMatrix::zeros(2 * sites, 2 * sites);
    for s in 0..sites {
        cm[(2 * s, 2 * s)] = c(r2);
        cm[(2 * s, 2 * s + 1)] = -I * r2;
        cm[(2 * s + 1, 2 * s)] = c(r2);
        cm[(2 * s + 1, 2 * s + 1)] = I * r2;
    }
    cm
}

pub fn cayley_check(pair: &CirclePair) -> CayleyReport {
    let nh = pair.half_width();
    let m = pair.sites;
    let d = 2 * m;
    let cm = cayley_matrix(m);
    let ot = &cm * &pair.o_hat * cm.adjoint();
    let ph = (DMatrix::<C64>::identity(d, d) - &pair.j_hat * I) * c(0.5);
    let pt = &cm * ph * cm.adjoint();

    let s = circle_shift(nh);
    let mut one_sided = DMatrix::<C64>::zeros(m, m);
    for r in 0..m - 1 {
        one_sided[(r, r + 1)] = c(1.0);
    }
    let diag_pos = |strict: bool| {
        DMatrix::<C64>::from_fn(m, m, |r, k| {
            let n = r as i64 - nh as i64;
            if r == k && (n > 0 || (!strict && n == 0)) {
                c(1.0)
            } else {
                c(0.0)
            }
        })
    };
    let (pg, pge) = (diag_pos(true), diag_pos(false));
    let assemble = |a: &DMatrix<C64>, b: &DMatrix<C64>| {
        let mut out = DMatrix::<C64>::zeros(d, d);
        fiber_block(a, &mut out, 0, 0);
        fiber_block(b, &mut out, 1, 1);
        out
    };
    let shift_residual = complex_norm(&(&ot - assemble(&s, &s.adjoint())));
    let projector_residual = complex_norm(&(&pt - assemble(&pg, &pge)));
    let comp = &pt * &ot * &pt;
    let expected = assemble(
        &(&pg * &one_sided * &pg),
        &(&pge * one_sided.adjoint() * &pge),
    );
    let circular = assemble(&(&pg * &s * &pg), &(&pge * s.adjoint() * &pge));
    CayleyReport {
        shift_residual,
        projector_residual,
        compressed_residual: complex_norm(&(&comp - &expected)),
        wrap_terms: complex_norm(&(&circular - &expected)),
    }
}

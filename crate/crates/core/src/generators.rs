//! Named path families, used by the command line and the test suites.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::linalg::{sigma, ComplexStructure, OrthogonalMatrix};
use crate::path::{OperatorPath, Smoothness};

/// `t ↦ (2t-1)σ`.
pub fn linear_2x2() -> OperatorPath {
    OperatorPath::new(2, Smoothness::Analytic, |t| sigma() * (2.0 * t - 1.0))
}

/// `t ↦ |2t-1|σ`. Continuous but not analytic at `t = ½`.
pub fn abs_2x2() -> OperatorPath {
    OperatorPath::new(2, Smoothness::Continuous, |t| sigma() * (2.0 * t - 1.0).abs())
}

/// `t ↦ (2t-1)σ ⊕ 3σ`.
pub fn block_4x4() -> OperatorPath {
    OperatorPath::new(4, Smoothness::Analytic, |t| {
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(&(sigma() * (2.0 * t - 1.0)));
        m.view_mut((2, 2), (2, 2)).copy_from(&(sigma() * 3.0));
        m
    })
}

/// Constant path at `σ ⊕ … ⊕ σ`.
pub fn constant(dim: usize) -> OperatorPath {
    let m = crate::linalg::sigma_blocks(dim / 2);
    let m = if dim % 2 == 1 {
        let mut p = DMatrix::zeros(dim, dim);
        p.view_mut((0, 0), (dim - 1, dim - 1)).copy_from(&m);
        p
    } else {
        m
    };
    OperatorPath::new(dim, Smoothness::Analytic, move |_| m.clone())
}

/// A random analytic path `O_t D_t O_tᵀ` where `O_t` is a product of plane
/// rotations with linear angles and `D_t = ⊕ λ_j(t) σ` has affine
/// eigenvalue branches. Branches listed in the returned crossing times pass
/// through zero transversally; the others stay at least `0.3` away.
#[derive(Clone, Debug)]
pub struct PlantedPath {
    pub dim: usize,
    pub crossings: Vec<f64>,
    rotations: Vec<(usize, usize, f64, f64)>,
    branches: Vec<(f64, f64)>,
}

impl PlantedPath {
    pub fn random(seed: u64, dim: usize, max_crossings: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = dim / 2;
        let k = rng.random_range(0..=max_crossings.min(pairs));
        let mut crossings: Vec<f64> = Vec::with_capacity(k);
        while crossings.len() < k {
            let tau = rng.random_range(0.08..0.92);
            if crossings.iter().all(|c: &f64| (c - tau).abs() > 0.03) {
                crossings.push(tau);
            }
        }
        let mut branches = Vec::with_capacity(pairs);
        for j in 0..pairs {
            if j < k {
                let slope = rng.random_range(0.5..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                branches.push((-slope * crossings[j], slope));
            } else {
                let a: f64 = rng.random_range(0.3..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let b = rng.random_range(-0.2..0.2) * a.abs();
                branches.push((a, b));
            }
        }
        let nrot = 2 * dim;
        let rotations = (0..nrot)
            .map(|_| {
                let i = rng.random_range(0..dim);
                let mut j = rng.random_range(0..dim);
                while j == i {
                    j = rng.random_range(0..dim);
                }
                (i, j, rng.random_range(-3.0..3.0), rng.random_range(0.0..6.3))
            })
            .collect();
        crossings.sort_by(f64::total_cmp);
        PlantedPath {
            dim,
            crossings,
            rotations,
            branches,
        }
    }

    pub fn expected_parity(&self) -> u8 {
        (self.crossings.len() % 2) as u8
    }

    pub fn matrix(&self, t: f64) -> DMatrix<f64> {
        let n = self.dim;
        let mut d = DMatrix::zeros(n, n);
        for (j, &(a, b)) in self.branches.iter().enumerate() {
            let l = a + b * t;
            d[(2 * j, 2 * j + 1)] = -l;
            d[(2 * j + 1, 2 * j)] = l;
        }
        let mut o = DMatrix::<f64>::identity(n, n);
        for &(i, j, w, p) in &self.rotations {
            let th: f64 = w * t + p;
            let (c, s) = (th.cos(), th.sin());
            // o ← o · G(i, j, th)
            for r in 0..n {
                let (x, y) = (o[(r, i)], o[(r, j)]);
                o[(r, i)] = c * x + s * y;
                o[(r, j)] = -s * x + c * y;
            }
        }
        &o * d * o.transpose()
    }

    pub fn path(&self) -> OperatorPath {
        let me = self.clone();
        OperatorPath::new(self.dim, Smoothness::Analytic, move |t| me.matrix(t))
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal moved into `Q`.
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> OrthogonalMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    OrthogonalMatrix::new(q).expect("QR factor is orthogonal")
}

/// `Q J₀ Qᵀ` for the standard structure `J₀` and a random orthogonal `Q`.
pub fn random_structure<R: Rng>(rng: &mut R, dim: usize) -> Result<ComplexStructure> {
    let j0 = ComplexStructure::standard(dim)?;
    let q = random_orthogonal(rng, dim);
    ComplexStructure::new(q.matrix() * j0.matrix() * q.matrix().transpose())
}

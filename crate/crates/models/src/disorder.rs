//! Seeded local disorder with prescribed symmetries.
//!
//! Every site draws from its own ChaCha stream, so the matrix does not
//! depend on the order in which sites are visited.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bdg::{hermitian_eigenvalues, C64};

/// Which antiunitary symmetries the projected disorder keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// `K conj(V) K = -V` only.
    ParticleHole,
    /// `K conj(V) K = -V` and `I conj(V) I = V`, with `I = 1 ⊗ σ₃`.
    ParticleHoleAndTime,
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_block(rng: &mut ChaCha8Rng) -> [[C64; 2]; 2] {
    let mut z = || Complex::new(gaussian(rng), gaussian(rng));
    [[z(), z()], [z(), z()]]
}

/// Random local Hermitian matrix on `cells` two-component cells with
/// nearest-neighbour bonds `c → c+1`. `bonds(c)` says whether the bond
/// leaving `c` (wrapping to 0 at the end) is present. The result is
/// projected onto the symmetric subspace and normalized to operator norm 1.
pub fn local_disorder(
    cells: usize,
    seed: u64,
    symmetry: Symmetry,
    bonds: impl Fn(usize) -> bool,
) -> DMatrix<C64> {
    let n = 2 * cells;
    let mut v = DMatrix::<C64>::zeros(n, n);
    for c in 0..cells {
        let mut rng = stream(seed, c as u64);
        let onsite = complex_block(&mut rng);
        let bond = complex_block(&mut rng);
        for a in 0..2 {
            for b in 0..2 {
                let z = onsite[a][b] + onsite[b][a].conj();
                v[(2 * c + a, 2 * c + b)] += z * 0.5;
            }
        }
        if bonds(c) && cells > 1 {
            let d = (c + 1) % cells;
            for a in 0..2 {
                for b in 0..2 {
                    v[(2 * d + a, 2 * c + b)] += bond[a][b];
                    v[(2 * c + b, 2 * d + a)] += bond[a][b].conj();
                }
            }
        }
    }
    let v = project(&v, symmetry);
    let norm = hermitian_eigenvalues(&v)
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    if norm > 0.0 {
        v / Complex::new(norm, 0.0)
    } else {
        v
    }
}

/// Average over the symmetry operations with their signs.
pub fn project(v: &DMatrix<C64>, symmetry: Symmetry) -> DMatrix<C64> {
    let n = v.nrows();
    // K conj(V) K has entries conj(V[a^1, b^1])
    let p = DMatrix::from_fn(n, n, |a, b| (v[(a, b)] - v[(a ^ 1, b ^ 1)].conj()) * 0.5);
    match symmetry {
        Symmetry::ParticleHole => p,
        Symmetry::ParticleHoleAndTime => {
            // I conj(V) I flips the sign of entries with mixed labels
            DMatrix::from_fn(n, n, |a, b| {
                let s = if (a ^ b) & 1 == 1 { -1.0 } else { 1.0 };
                (p[(a, b)] + p[(a, b)].conj() * s) * 0.5
            })
        }
    }
}

/// Residuals `(‖K conj(V) K + V‖_max, ‖I conj(V) I - V‖_max)`.
pub fn symmetry_residuals(v: &DMatrix<C64>) -> (f64, f64) {
    let n = v.nrows();
    let mut ph = 0.0_f64;
    let mut tr = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            ph = ph.max((v[(a ^ 1, b ^ 1)].conj() + v[(a, b)]).norm());
            let s = if (a ^ b) & 1 == 1 { -1.0 } else { 1.0 };
            tr = tr.max((v[(a, b)].conj() * s - v[(a, b)]).norm());
        }
    }
    (ph, tr)
}

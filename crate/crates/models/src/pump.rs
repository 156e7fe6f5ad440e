//! Rice-Mele charge pump and its BdG doubling.
//!
//! The chain has `cells` unit cells with orbitals `A = 2c` and `B = 2c+1`.
//! Along the cycle `θ = 2π·winding·t`, the intra-cell hopping is
//! `1 + δ cos θ`, the inter-cell hopping is `1 - δ cos θ`, and the onsite
//! energies are `-m sin θ` on `A` and `+m sin θ` on `B`. With this sign
//! choice one cycle pumps one state into the left edge below the Fermi
//! level at `0`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use z2flow::path::{sf2_path_windowed_with, PathOptions, SF2Report};
use z2flow::{OperatorPath, Smoothness, Tolerance, Z2};

use crate::bdg::{hermitian_eigenvalues, majorana_rep, C64};
use crate::disorder::{local_disorder, Symmetry};
use crate::error::{ModelError, Result};
use crate::flow::{complex_spectral_flow, FlowOptions, FlowReport};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiceMele {
    pub delta: f64,
    pub m: f64,
    /// Number of times the parameter cycle is traversed per loop.
    #[serde(default = "one")]
    pub winding: u32,
}

fn one() -> u32 {
    1
}

impl Default for RiceMele {
    fn default() -> Self {
        RiceMele {
            delta: 0.5,
            m: 0.5,
            winding: 1,
        }
    }
}

impl RiceMele {
    fn angle(&self, t: f64) -> f64 {
        2.0 * PI * self.winding as f64 * t
    }

    /// Real symmetric single-particle Hamiltonian at loop time `t ∈ [0,1]`.
    pub fn hamiltonian(&self, cells: usize, t: f64, periodic: bool) -> DMatrix<f64> {
        let th = self.angle(t);
        let (v, w, e) = (1.0 + self.delta * th.cos(), 1.0 - self.delta * th.cos(), self.m * th.sin());
        let n = 2 * cells;
        let mut h = DMatrix::zeros(n, n);
        for c in 0..cells {
            h[(2 * c, 2 * c)] = -e;
            h[(2 * c + 1, 2 * c + 1)] = e;
            h[(2 * c, 2 * c + 1)] = v;
            h[(2 * c + 1, 2 * c)] = v;
            if c + 1 < cells || (periodic && cells > 1) {
                let d = (2 * c + 2) % n;
                h[(2 * c + 1, d)] += w;
                h[(d, 2 * c + 1)] += w;
            }
        }
        h
    }

    /// Bloch Hamiltonian at momentum `k` and loop time `t`.
    pub fn bloch(&self, k: f64, t: f64) -> [[C64; 2]; 2] {
        let th = self.angle(t);
        let (v, w, e) = (1.0 + self.delta * th.cos(), 1.0 - self.delta * th.cos(), self.m * th.sin());
        let off = Complex::new(v, 0.0) + Complex::from_polar(w, -k);
        [[Complex::new(-e, 0.0), off], [off.conj(), Complex::new(e, 0.0)]]
    }

    /// Smallest distance of a bulk band to `level`, on a `samples²` grid.
    pub fn bulk_gap(&self, level: f64, samples: usize) -> f64 {
        let mut gap = f64::INFINITY;
        for i in 0..samples {
            for j in 0..samples {
                let k = 2.0 * PI * i as f64 / samples as f64;
                let b = self.bloch(k, j as f64 / samples as f64);
                let d = b[0][0].re;
                let r = (d * d + b[0][1].norm_sqr()).sqrt();
                gap = gap.min((r - level).abs()).min((r + level).abs());
            }
        }
        gap
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PumpConfig {
    pub model: RiceMele,
    pub cells: usize,
    #[serde(default)]
    pub mu_fermi: f64,
    /// Strength of the loop of particle-hole symmetric couplings.
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub seed: u64,
    /// Onsite energy of the last orbital of the truncated chain. It moves the
    /// crossings of the far edge away from those of the physical edge, which
    /// otherwise coincide at the chiral point of the cycle.
    #[serde(default = "far_edge_default")]
    pub far_edge_potential: f64,
}

fn far_edge_default() -> f64 {
    0.25
}

impl PumpConfig {
    pub fn new(model: RiceMele, cells: usize) -> Self {
        PumpConfig {
            model,
            cells,
            mu_fermi: 0.0,
            lambda: 0.0,
            seed: 0,
            far_edge_potential: far_edge_default(),
        }
    }

    /// Single-particle Hamiltonian of the half-line truncation.
    pub fn half_line(&self, t: f64) -> DMatrix<f64> {
        let mut h = self.model.hamiltonian(self.cells, t, false);
        let last = 2 * self.cells - 1;
        h[(last, last)] += self.far_edge_potential;
        h
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells < 4 {
            return Err(ModelError::InvalidConfig("need at least 4 cells".into()));
        }
        if self.model.winding == 0 {
            return Err(ModelError::InvalidConfig("winding must be positive".into()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() || !self.mu_fermi.is_finite() {
            return Err(ModelError::InvalidConfig(format!(
                "lambda = {}, mu_fermi = {}",
                self.lambda, self.mu_fermi
            )));
        }
        Ok(())
    }

    /// Orbital weights of the left half of the chain.
    pub fn left_region(&self) -> Vec<f64> {
        (0..2 * self.cells)
            .map(|j| if j / 2 < self.cells / 2 { 1.0 } else { 0.0 })
            .collect()
    }

    fn coupling(&self, periodic: bool) -> (DMatrix<C64>, DMatrix<C64>) {
        let cells = 2 * self.cells;
        let draw = |tag: u64| {
            local_disorder(cells, self.seed.wrapping_mul(2).wrapping_add(tag), Symmetry::ParticleHole, |c| {
                periodic || c + 1 < cells
            })
        };
        (draw(0), draw(1))
    }

    /// `H_t(λ) = diag(h_t - μ, -(h_t - μ)) + λ V_t` in the interleaved
    /// particle/hole layout, with `V_t = (cos θ V_a + sin θ V_b)/√2`.
    pub fn bdg_path(&self, periodic: bool) -> impl Fn(f64) -> DMatrix<C64> + Send + Sync + 'static {
        let cfg = self.clone();
        let (va, vb) = if self.lambda > 0.0 {
            let (a, b) = self.coupling(periodic);
            (Some(Arc::new(a)), Some(Arc::new(b)))
        } else {
            (None, None)
        };
        move |t| {
            let h = if periodic {
                cfg.model.hamiltonian(cfg.cells, t, true)
            } else {
                cfg.half_line(t)
            };
            let n = h.nrows();
            let mut big = DMatrix::<C64>::zeros(2 * n, 2 * n);
            for i in 0..n {
                for j in 0..n {
                    let x = h[(i, j)] - if i == j { cfg.mu_fermi } else { 0.0 };
                    big[(2 * i, 2 * j)] = Complex::new(x, 0.0);
                    big[(2 * i + 1, 2 * j + 1)] = Complex::new(-x, 0.0);
                }
            }
            if let (Some(a), Some(b)) = (&va, &vb) {
                let th = cfg.model.angle(t);
                let s = cfg.lambda * std::f64::consts::FRAC_1_SQRT_2;
                big += a.as_ref() * Complex::new(s * th.cos(), 0.0);
                big += b.as_ref() * Complex::new(s * th.sin(), 0.0);
            }
            big
        }
    }

    /// Smallest `|E|` of the periodic BdG Hamiltonian over `samples` loop
    /// times.
    pub fn sampled_gap(&self, samples: usize) -> (f64, f64) {
        let f = self.bdg_path(true);
        (0..samples)
            .map(|i| {
                let t = i as f64 / samples as f64;
                let g = hermitian_eigenvalues(&f(t)).iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
                (t, g)
            })
            .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarizationReport {
    /// Loop ℤ₂ spectral flow of the half-line BdG Hamiltonian, counted at
    /// the physical edge.
    pub sf2: SF2Report,
    /// Charge pumped into the left edge per loop, `ΔP/2π`.
    pub pumped: i64,
    pub pumped_mod2: Z2,
    pub pumped_flow: FlowReport,
    /// Spectral flow of the BdG Hamiltonian through 0 at the left edge.
    pub bdg_flow: FlowReport,
    /// Smallest periodic-chain gap along the loop and where it occurs.
    pub gap: f64,
    pub gap_at: f64,
}

/// ℤ₂ polarization of the pump: the loop ℤ₂ spectral flow of the BdG
/// doubled half-line Hamiltonian, together with the pumped charge from the
/// signed spectral flow of the single-particle half-line Hamiltonian.
///
/// A finite truncation has two edges whose flows cancel, so both counts are
/// restricted to the left half of the chain.
pub fn z2_polarization(cfg: &PumpConfig, tol: &Tolerance, opts: &PathOptions) -> Result<PolarizationReport> {
    cfg.validate()?;
    let (gap_at, gap) = cfg.sampled_gap(64);
    let limit = 1e-8_f64.max(0.05 * cfg.model.bulk_gap(cfg.mu_fermi, 64));
    if gap <= limit {
        return Err(ModelError::GapClosed {
            param: "t",
            at: gap_at,
            gap,
            tol: limit,
        });
    }
    let region = cfg.left_region();
    let weights: Vec<f64> = region.iter().flat_map(|&w| [w, w]).collect();

    let f = cfg.bdg_path(false);
    let dim = 4 * cfg.cells;
    let path = OperatorPath::closed(dim, Smoothness::Analytic, move |t| {
        majorana_rep(&f(t))
            .expect("pump Hamiltonian is particle-hole symmetric")
            .into_matrix()
    });
    let opts = PathOptions {
        region: Some(Arc::new(DVector::from_vec(weights.clone()))),
        ..opts.clone()
    };
    let sf2 = sf2_path_windowed_with(&path, tol, &opts)?;

    let half = cfg.clone();
    let single = move |t: f64| half.half_line(t).map(|x| Complex::new(x, 0.0));
    let flow_opts = FlowOptions {
        region: Some(region),
        ..FlowOptions::default()
    };
    let pumped_flow = complex_spectral_flow(single, cfg.mu_fermi, &flow_opts)?;

    let bdg = cfg.bdg_path(false);
    let bdg_opts = FlowOptions {
        region: Some(weights),
        ..FlowOptions::default()
    };
    let bdg_flow = complex_spectral_flow(bdg, 0.0, &bdg_opts)?;

    Ok(PolarizationReport {
        sf2,
        pumped: pumped_flow.value,
        pumped_mod2: Z2::from_count(pumped_flow.value.unsigned_abs() as usize),
        pumped_flow,
        bdg_flow,
        gap,
        gap_at,
    })
}

//! Kitaev chain on sites `-N..=N` with a flux `2πα` inserted at the bond
//! `0 → 1`.
//!
//! Layout: index `2(n+N) + η`, with `η = 0` for the `+` component and
//! `η = 1` for `-`. The clean Hamiltonian is `S + S* + μ·1⊗σ₃`, where `S`
//! hops `n → n+1` with the 2×2 block `½[[1, i], [i, -1]]`.
//!
//! Two gauges are provided. The local gauge changes only the block on the
//! bond `0 → 1`. The nonlocal gauge gives every bond `n → n+1` the block
//! `½[[1, i e^{iπαs}], [i e^{-iπαs}, -1]]` with `s = +1` for `n ≥ 0` and
//! `s = -1` for `n < 0`, i.e. the sign is read at the site the bond leaves.

use std::collections::VecDeque;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use z2flow::path::{sf2_path_windowed_with, PathOptions, SF2Report};
use z2flow::{sf2_segment, OperatorPath, SkewMatrix, Smoothness, Tolerance, Z2Error, Z2};

use crate::bdg::{
    bdg_residual, hermitian_eigen, hermitian_eigenvalues, localized_split, majorana_rep, max_abs,
    near_zero, C64, I,
};
use crate::disorder::{local_disorder, Symmetry};
use crate::error::{ModelError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    OpenDirichlet,
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KitaevConfig {
    /// Half-width `N`; the chain has `2N+1` sites.
    pub sites: usize,
    pub mu: f64,
    pub boundary: Boundary,
    /// Disorder strength.
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub seed: u64,
}

impl KitaevConfig {
    pub fn new(sites: usize, mu: f64, boundary: Boundary) -> Self {
        KitaevConfig {
            sites,
            mu,
            boundary,
            lambda: 0.0,
            seed: 0,
        }
    }

    pub fn with_disorder(mut self, lambda: f64, seed: u64) -> Self {
        self.lambda = lambda;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 1 {
            return Err(ModelError::InvalidConfig("sites must be at least 1".into()));
        }
        if !self.mu.is_finite() || (self.mu.abs() - 1.0).abs() < 1e-12 {
            return Err(ModelError::InvalidConfig(format!(
                "mu = {} (the bulk gap closes at |mu| = 1)",
                self.mu
            )));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(ModelError::InvalidConfig(format!("lambda = {}", self.lambda)));
        }
        Ok(())
    }

    pub fn site_count(&self) -> usize {
        2 * self.sites + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.site_count()
    }

    pub fn index(&self, n: i64, eta: usize) -> usize {
        2 * (n + self.sites as i64) as usize + eta
    }

    /// Clean bulk gap `||μ| - 1|`.
    pub fn bulk_gap(&self) -> f64 {
        (self.mu.abs() - 1.0).abs()
    }

    /// Threshold for eigenvalues counted as zero modes: the exponential
    /// splitting of localized modes, floored at `1e-10`, relative to `norm`,
    /// and never more than half the bulk gap. Modes at the cut of an open
    /// chain are `N` sites from an end; on the ring the only partner of a
    /// mode at the flux is the flux itself, `2N+1` sites around.
    pub fn zero_tolerance(&self, norm: f64) -> f64 {
        let q = self.mu.abs().min(1.0 / self.mu.abs().max(f64::MIN_POSITIVE));
        let distance = match self.boundary {
            Boundary::OpenDirichlet => self.sites,
            Boundary::Periodic => self.site_count(),
        };
        let split = 10.0 * q.powi(distance as i32);
        (1e-10_f64.max(split) * norm).min(0.5 * self.bulk_gap())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeKind {
    Local,
    Nonlocal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FluxGauge {
    pub kind: GaugeKind,
    pub alpha: f64,
}

impl FluxGauge {
    pub fn local(alpha: f64) -> Self {
        FluxGauge {
            kind: GaugeKind::Local,
            alpha,
        }
    }

    pub fn nonlocal(alpha: f64) -> Self {
        FluxGauge {
            kind: GaugeKind::Nonlocal,
            alpha,
        }
    }
}

type Block = [[C64; 2]; 2];

fn phase(x: f64) -> C64 {
    Complex::from_polar(1.0, std::f64::consts::PI * x)
}

fn clean_block() -> Block {
    let h = Complex::new(0.5, 0.0);
    [[h, I * 0.5], [I * 0.5, -h]]
}

fn local_block(alpha: f64) -> Block {
    [
        [phase(-alpha) * 0.5, I * phase(alpha) * 0.5],
        [I * phase(-alpha) * 0.5, -phase(alpha) * 0.5],
    ]
}

fn nonlocal_block(alpha: f64, s: f64) -> Block {
    let h = Complex::new(0.5, 0.0);
    [
        [h, I * phase(alpha * s) * 0.5],
        [I * phase(-alpha * s) * 0.5, -h],
    ]
}

/// Bonds `n → n+1` (and the closing bond `N → -N` on a ring).
fn bonds(cfg: &KitaevConfig) -> Vec<(i64, i64)> {
    let n = cfg.sites as i64;
    let mut out: Vec<(i64, i64)> = (-n..n).map(|k| (k, k + 1)).collect();
    if cfg.boundary == Boundary::Periodic {
        out.push((n, -n));
    }
    out
}

fn add_bond(h: &mut DMatrix<C64>, cfg: &KitaevConfig, from: i64, to: i64, b: &Block) {
    for a in 0..2 {
        for c in 0..2 {
            let (r, s) = (cfg.index(to, a), cfg.index(from, c));
            h[(r, s)] += b[a][c];
            h[(s, r)] += b[a][c].conj();
        }
    }
}

/// The clean Hamiltonian without disorder.
pub fn clean_hamiltonian(cfg: &KitaevConfig, gauge: FluxGauge) -> DMatrix<C64> {
    let dim = cfg.dim();
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    for (from, to) in bonds(cfg) {
        let b = match gauge.kind {
            GaugeKind::Local if from == 0 => local_block(gauge.alpha),
            GaugeKind::Local => clean_block(),
            GaugeKind::Nonlocal => {
                nonlocal_block(gauge.alpha, if from >= 0 { 1.0 } else { -1.0 })
            }
        };
        add_bond(&mut h, cfg, from, to, &b);
    }
    for s in 0..cfg.site_count() {
        h[(2 * s, 2 * s)] += cfg.mu;
        h[(2 * s + 1, 2 * s + 1)] -= cfg.mu;
    }
    h
}

/// Disorder of unit norm keeping both the particle-hole and the `I`-time
/// reversal symmetry. Bonds across the flux insertion and the ring closure
/// stay clean, so the time reversal of the half-flux Hamiltonian survives.
pub fn kitaev_disorder(cfg: &KitaevConfig) -> DMatrix<C64> {
    let n = cfg.sites as i64;
    let cells = cfg.site_count();
    local_disorder(cells, cfg.seed, Symmetry::ParticleHoleAndTime, |c| {
        let site = c as i64 - n;
        site != 0 && c + 1 < cells
    })
}

/// `H = S_α + S_α* + μ·1⊗σ₃ + λV` on the configured geometry.
pub fn kitaev_hamiltonian(cfg: &KitaevConfig, gauge: FluxGauge) -> Result<DMatrix<C64>> {
    cfg.validate()?;
    let mut h = clean_hamiltonian(cfg, gauge);
    if cfg.lambda > 0.0 {
        h += kitaev_disorder(cfg) * Complex::new(cfg.lambda, 0.0);
    }
    let residual = bdg_residual(&h);
    if residual > 1e-12 * max_abs(&h).max(1.0) {
        return Err(ModelError::NotBdGSymmetric { residual });
    }
    Ok(h)
}

fn spectral_norm(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Entry-wise `e^{iG_a} H_{ab} e^{-iG_b}`.
pub fn apply_gauge(h: &DMatrix<C64>, g: &[f64]) -> DMatrix<C64> {
    DMatrix::from_fn(h.nrows(), h.ncols(), |a, b| {
        h[(a, b)] * Complex::from_polar(1.0, g[a] - g[b])
    })
}

/// Closed-form gauge function on the open chain:
/// `G(n,±) = ∓πα/2` for `n ≤ 0` and `±πα/2` for `n ≥ 1`.
pub fn gauge_function(cfg: &KitaevConfig, alpha: f64) -> Vec<f64> {
    let half = 0.5 * std::f64::consts::PI * alpha;
    let n = cfg.sites as i64;
    let mut g = vec![0.0; cfg.dim()];
    for site in -n..=n {
        let s = if site <= 0 { -1.0 } else { 1.0 };
        g[cfg.index(site, 0)] = s * half;
        g[cfg.index(site, 1)] = -s * half;
    }
    g
}

/// Solve `H̃ = e^{iG} H e^{-iG}` by propagating phases along the nonzero
/// entries of `H`, then measure the Frobenius residual.
pub fn solve_gauge(h: &DMatrix<C64>, ht: &DMatrix<C64>) -> (Vec<f64>, f64) {
    let n = h.nrows();
    let scale = max_abs(h).max(1.0);
    let mut g = vec![f64::NAN; n];
    for root in 0..n {
        if !g[root].is_nan() {
            continue;
        }
        g[root] = 0.0;
        let mut queue = VecDeque::from([root]);
        while let Some(b) = queue.pop_front() {
            for a in 0..n {
                if g[a].is_nan() && h[(a, b)].norm() > 1e-14 * scale {
                    g[a] = g[b] + (ht[(a, b)] / h[(a, b)]).arg();
                    queue.push_back(a);
                }
            }
        }
    }
    let residual = (ht - apply_gauge(h, &g)).norm();
    (g, residual)
}

#[derive(Clone, Debug, Serialize)]
pub struct GaugeTransform {
    /// `G` per basis index.
    pub g: Vec<f64>,
    pub residual: f64,
}

const GAUGE_LIMIT: f64 = 1e-10;

/// Gauge function taking the local-gauge Hamiltonian to the nonlocal one.
pub fn gauge_transform(cfg: &KitaevConfig, alpha: f64) -> Result<GaugeTransform> {
    cfg.validate()?;
    let h = clean_hamiltonian(cfg, FluxGauge::local(alpha));
    let ht = clean_hamiltonian(cfg, FluxGauge::nonlocal(alpha));
    let g = gauge_function(cfg, alpha);
    let residual = (&ht - apply_gauge(&h, &g)).norm();
    if residual <= GAUGE_LIMIT {
        return Ok(GaugeTransform { g, residual });
    }
    let (g, residual) = solve_gauge(&h, &ht);
    if residual <= GAUGE_LIMIT {
        return Ok(GaugeTransform { g, residual });
    }
    match cfg.boundary {
        Boundary::Periodic => Err(ModelError::NotGaugeEquivalent { residual }),
        Boundary::OpenDirichlet => Err(Z2Error::CheckFailed {
            what: "gauge transformation",
            residual,
            limit: GAUGE_LIMIT,
        }
        .into()),
    }
}

/// Zero modes of a BdG matrix split by localization near the cut `0|1`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelSplit {
    pub near_zero: usize,
    /// Zero modes within `N/2` of the cut.
    pub near_cut: usize,
    pub far: usize,
    pub zero_tol: f64,
    pub smallest_kept: f64,
}

fn cut_weights(sites: &[i64], reach: f64) -> Vec<f64> {
    sites
        .iter()
        .map(|&n| if (n as f64 - 0.5).abs() < reach { 1.0 } else { 0.0 })
        .collect()
}

fn kernel_split(h: &DMatrix<C64>, sites: &[i64], cfg: &KitaevConfig) -> Result<KernelSplit> {
    let (values, vectors) = hermitian_eigen(h);
    let zero_tol = cfg.zero_tolerance(spectral_norm(&values));
    let (cols, smallest_kept) = near_zero(&values, zero_tol);
    if smallest_kept < 10.0 * zero_tol {
        return Err(Z2Error::AmbiguousKernel {
            discarded: cols.iter().map(|&i| values[i].abs()).fold(0.0, f64::max),
            kept: smallest_kept,
            kernel_tol: zero_tol,
            gap_ratio: 10.0,
        }
        .into());
    }
    let w = cut_weights(sites, 0.5 * cfg.sites as f64);
    let (near_cut, far) = localized_split(&vectors, &cols, &w)
        .map_err(|weight| Z2Error::SectorMixing { weight })?;
    Ok(KernelSplit {
        near_zero: cols.len(),
        near_cut,
        far,
        zero_tol,
        smallest_kept,
    })
}

fn site_list(cfg: &KitaevConfig) -> Vec<i64> {
    let n = cfg.sites as i64;
    (-n..=n).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HalflineSplit {
    /// Restriction of `H₀` to sites `n ≤ 0`.
    #[serde(skip)]
    pub left: DMatrix<C64>,
    /// Restriction of `H₀` to sites `n ≥ 1`.
    #[serde(skip)]
    pub right: DMatrix<C64>,
    /// Largest entry of `H₀ + H₁ - 2(Ĥ_l ⊕ Ĥ_r)`.
    pub residual: f64,
    pub left_kernel: KernelSplit,
    pub right_kernel: KernelSplit,
    pub sum_kernel: KernelSplit,
}

/// Split `H₀ + H₁` across the bond `0 → 1`. A full flux quantum reverses
/// that bond, so the sum cuts the chain into two Dirichlet halves, each
/// with twice the original couplings.
pub fn halfline_split(cfg: &KitaevConfig) -> Result<HalflineSplit> {
    if cfg.boundary != Boundary::OpenDirichlet {
        return Err(ModelError::InvalidConfig(
            "half-line split needs an open chain".into(),
        ));
    }
    let h0 = kitaev_hamiltonian(cfg, FluxGauge::local(0.0))?;
    let h1 = kitaev_hamiltonian(cfg, FluxGauge::local(1.0))?;
    let sum = &h0 + &h1;
    let cut = cfg.index(1, 0);
    let dim = cfg.dim();
    let left = h0.view((0, 0), (cut, cut)).into_owned();
    let right = h0.view((cut, cut), (dim - cut, dim - cut)).into_owned();
    let mut split = DMatrix::<C64>::zeros(dim, dim);
    split.view_mut((0, 0), (cut, cut)).copy_from(&left);
    split.view_mut((cut, cut), (dim - cut, dim - cut)).copy_from(&right);
    let residual = max_abs(&(&sum - split * Complex::new(2.0, 0.0)));

    let sites = site_list(cfg);
    let n = cfg.sites;
    let left_kernel = kernel_split(&left, &sites[..n + 1], cfg)?;
    let right_kernel = kernel_split(&right, &sites[n + 1..], cfg)?;
    let sum_kernel = kernel_split(&sum, &sites, cfg)?;
    Ok(HalflineSplit {
        left,
        right,
        residual,
        left_kernel,
        right_kernel,
        sum_kernel,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectReport {
    /// `½ (number of zero modes at the flux insertion) mod 2`.
    pub value: Z2,
    pub kernel: KernelSplit,
    /// `‖conj(H̃_½) - H̃_½‖_max` for the clean nonlocal gauge.
    pub time_reversal_residual: f64,
}

/// Zero modes of the half-flux Hamiltonian bound to the flux insertion.
pub fn defect_kernel_parity(cfg: &KitaevConfig) -> Result<DefectReport> {
    let h = kitaev_hamiltonian(cfg, FluxGauge::local(0.5))?;
    let kernel = kernel_split(&h, &site_list(cfg), cfg)?;
    if kernel.near_cut % 2 == 1 {
        return Err(Z2Error::AmbiguousKernel {
            discarded: kernel.zero_tol,
            kept: kernel.smallest_kept,
            kernel_tol: kernel.zero_tol,
            gap_ratio: 10.0,
        }
        .into());
    }
    let ht = clean_hamiltonian(cfg, FluxGauge::nonlocal(0.5));
    let time_reversal_residual = max_abs(&(ht.map(|z| z.conj()) - &ht));
    Ok(DefectReport {
        value: Z2::from_count(kernel.near_cut / 2),
        kernel,
        time_reversal_residual,
    })
}

/// `α ∈ [0,1] ↦ majorana_rep(H_α)` in the local gauge, including disorder.
pub fn flux_path(cfg: &KitaevConfig) -> Result<OperatorPath> {
    let base = Arc::new(kitaev_hamiltonian(cfg, FluxGauge::local(0.0))?);
    let cfg = cfg.clone();
    let dim = cfg.dim();
    let clean = clean_block();
    Ok(OperatorPath::new(dim, Smoothness::Analytic, move |alpha| {
        let mut h = (*base).clone();
        let b = local_block(alpha);
        let mut d = [[Complex::new(0.0, 0.0); 2]; 2];
        for a in 0..2 {
            for c in 0..2 {
                d[a][c] = b[a][c] - clean[a][c];
            }
        }
        add_bond(&mut h, &cfg, 0, 1, &d);
        majorana_rep(&h)
            .expect("flux Hamiltonian is particle-hole symmetric")
            .into_matrix()
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct FluxReport {
    pub sf2: SF2Report,
    /// Windowed value along the straight line between the endpoints.
    pub straight_line: Z2,
    /// Finite-dimensional value of the endpoint pair.
    pub endpoint_value: Z2,
    /// Smallest `|E|` at `α = 0` and `α = 1`.
    pub endpoint_gaps: (f64, f64),
    pub dim: usize,
}

/// ℤ₂ spectral flow of the flux insertion `α ∈ [0,1]`.
pub fn flux_sf2(cfg: &KitaevConfig, tol: &Tolerance, opts: &PathOptions) -> Result<FluxReport> {
    let mut gaps = [0.0; 2];
    for (k, alpha) in [0.0, 1.0].into_iter().enumerate() {
        let h = kitaev_hamiltonian(cfg, FluxGauge::local(alpha))?;
        let values = hermitian_eigenvalues(&h);
        let gap = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        let zt = cfg.zero_tolerance(spectral_norm(&values));
        if gap <= zt {
            return Err(ModelError::GapClosed {
                param: "alpha",
                at: alpha,
                gap,
                tol: zt,
            });
        }
        gaps[k] = gap;
    }
    let path = flux_path(cfg)?;
    let sf2 = sf2_path_windowed_with(&path, tol, opts)?;

    let t0 = path.sample(0.0)?;
    let t1 = path.sample(1.0)?;
    let endpoint_value = sf2_segment(&t0, &t1, tol)?.value;
    let (a, b) = (t0.into_matrix(), t1.into_matrix());
    let line = OperatorPath::new(path.dim, Smoothness::Analytic, move |s| &a * (1.0 - s) + &b * s);
    let straight_line = sf2_path_windowed_with(&line, tol, opts)?.value;
    Ok(FluxReport {
        sf2,
        straight_line,
        endpoint_value,
        endpoint_gaps: (gaps[0], gaps[1]),
        dim: path.dim,
    })
}

/// Eigenvalues of `H_α` at each requested flux.
pub fn flux_spectrum(cfg: &KitaevConfig, alphas: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
    alphas
        .iter()
        .map(|&a| Ok((a, hermitian_eigenvalues(&kitaev_hamiltonian(cfg, FluxGauge::local(a))?))))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteItem {
    pub name: String,
    pub residual: f64,
    pub limit: f64,
    pub passed: bool,
}

impl SuiteItem {
    fn new(name: &str, residual: f64, limit: f64) -> Self {
        SuiteItem {
            name: name.to_string(),
            residual,
            limit,
            passed: residual <= limit,
        }
    }
}

fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn mirror_residual(v: &[f64]) -> f64 {
    let n = v.len();
    (0..n).map(|k| (v[k] + v[n - 1 - k]).abs()).fold(0.0, f64::max)
}

/// Largest violation of `λ_{k-r}(A) ≤ λ_k(B) ≤ λ_{k+r}(A)` for sorted spectra.
fn interlacing_violation(a: &[f64], b: &[f64], r: usize) -> f64 {
    let n = a.len();
    let mut worst = 0.0_f64;
    for k in 0..n {
        if k >= r {
            worst = worst.max(a[k - r] - b[k]);
        }
        if k + r < n {
            worst = worst.max(b[k] - a[k + r]);
        }
    }
    worst
}

/// Symmetry and structure checks of the flux Hamiltonians on the clean
/// open chain, at the given fluxes.
pub fn symmetry_suite(sites: usize, mu: f64, alphas: &[f64]) -> Result<Vec<SuiteItem>> {
    let cfg = KitaevConfig::new(sites, mu, Boundary::OpenDirichlet);
    cfg.validate()?;
    let local = |a: f64| clean_hamiltonian(&cfg, FluxGauge::local(a));
    let nonlocal = |a: f64| clean_hamiltonian(&cfg, FluxGauge::nonlocal(a));
    let conj = |m: &DMatrix<C64>| m.map(|z| z.conj());
    let h0 = local(0.0);
    let spec0 = hermitian_eigenvalues(&h0);
    let (i0, i1) = (cfg.index(0, 0), cfg.index(1, 0));

    let mut bdg = [0.0_f64; 2];
    let mut mirror = [0.0_f64; 2];
    let mut support = 0.0_f64;
    let mut interlacing = 0.0_f64;
    let mut gauge_spectra = 0.0_f64;
    let mut gauge_residual = 0.0_f64;
    let mut periodic = 0.0_f64;
    let mut reflection = 0.0_f64;
    let mut reflection_spectra = 0.0_f64;
    for &a in alphas {
        let h = local(a);
        let ht = nonlocal(a);
        let (sh, sht) = (hermitian_eigenvalues(&h), hermitian_eigenvalues(&ht));
        bdg[0] = bdg[0].max(bdg_residual(&h));
        bdg[1] = bdg[1].max(bdg_residual(&ht));
        mirror[0] = mirror[0].max(mirror_residual(&sh));
        mirror[1] = mirror[1].max(mirror_residual(&sht));

        let d = &h - &h0;
        for r in 0..d.nrows() {
            for c in 0..d.ncols() {
                let linking = (r / 2 == i0 / 2 && c / 2 == i1 / 2) || (r / 2 == i1 / 2 && c / 2 == i0 / 2);
                if !linking {
                    support = support.max(d[(r, c)].norm());
                }
            }
        }
        interlacing = interlacing.max(interlacing_violation(&spec0, &sh, 4));

        gauge_spectra = gauge_spectra.max(spectrum_distance(&sh, &sht));
        gauge_residual = gauge_residual.max(gauge_transform(&cfg, a)?.residual);
        periodic = periodic
            .max(max_abs(&(local(a + 2.0) - &h)))
            .max(max_abs(&(nonlocal(a + 2.0) - &ht)));
        reflection = reflection.max(max_abs(&(conj(&ht) - nonlocal(1.0 - a))));
        reflection_spectra = reflection_spectra
            .max(spectrum_distance(&sh, &hermitian_eigenvalues(&local(1.0 - a))));
    }
    // I = 1 ⊗ σ₃ flips the sign of entries with mixed labels
    let flip = |m: &DMatrix<C64>| {
        DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
            if (r ^ c) & 1 == 1 {
                -m[(r, c)]
            } else {
                m[(r, c)]
            }
        })
    };
    let at_one = max_abs(&(nonlocal(1.0) - flip(&nonlocal(0.0))));

    let mut items = vec![
        SuiteItem::new("particle-hole-local", bdg[0], 1e-12),
        SuiteItem::new("particle-hole-nonlocal", bdg[1], 1e-12),
        SuiteItem::new("spectrum-mirror-local", mirror[0], 1e-9),
        SuiteItem::new("spectrum-mirror-nonlocal", mirror[1], 1e-9),
        SuiteItem::new("difference-support", support, 0.0),
        SuiteItem::new("difference-interlacing", interlacing, 1e-9),
        SuiteItem::new("gauge-residual", gauge_residual, GAUGE_LIMIT),
        SuiteItem::new("gauge-spectra", gauge_spectra, 1e-9),
        SuiteItem::new("periodicity", periodic, 1e-12),
        SuiteItem::new("nonlocal-at-one", at_one, 1e-12),
        SuiteItem::new("conjugation-reflection", reflection, 1e-12),
        SuiteItem::new("reflection-spectra", reflection_spectra, 1e-9),
    ];

    let split = halfline_split(&cfg)?;
    items.push(SuiteItem::new("halfline-direct-sum", split.residual, 1e-12));
    let counts = [
        split.left_kernel.near_cut,
        split.right_kernel.near_cut,
        split.sum_kernel.near_cut,
    ];
    let miss = (counts != [1, 1, 2]) as u8 as f64;
    items.push(SuiteItem::new("halfline-cut-kernels", miss, 0.0));
    let sum_gap = split.sum_kernel.smallest_kept;
    items.push(SuiteItem::new(
        "halfline-gap",
        (cfg.bulk_gap() - sum_gap).max(0.0),
        0.0,
    ));

    if mu == 0.0 {
        // H₀² = 1 and T₀² = -1 away from the two boundary sites
        let sq = &h0 * &h0;
        let t = majorana_rep(&h0)?;
        let tsq = t.matrix() * t.matrix();
        let (lo, hi) = (2, cfg.dim() - 2);
        let mut bulk = 0.0_f64;
        for r in lo..hi {
            for c in 0..cfg.dim() {
                let id = if r == c { 1.0 } else { 0.0 };
                bulk = bulk
                    .max((sq[(r, c)] - Complex::new(id, 0.0)).norm())
                    .max((tsq[(r, c)] + id).abs());
            }
        }
        items.push(SuiteItem::new("square-on-bulk", bulk, 1e-12));
    }
    Ok(items)
}

/// Majorana form of a Kitaev Hamiltonian, for callers holding a config.
pub fn majorana_at(cfg: &KitaevConfig, gauge: FluxGauge) -> Result<SkewMatrix> {
    majorana_rep(&kitaev_hamiltonian(cfg, gauge)?)
}

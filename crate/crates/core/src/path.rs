//! ℤ₂ spectral flow along a path of skew matrices.
//!
//! Three independent routes are provided:
//! * [`sf2_path_windowed`]: adaptive partition into segments on which a
//!   spectral window `(-a, a)` has constant rank and slowly varying
//!   projection, compression to the window, completion of kernels, and a sum
//!   of finite-dimensional segment values;
//! * [`sf2_path_phase_sum`]: half kernel dimensions of sums of consecutive
//!   phases;
//! * [`count_crossings`]: location of zeros of the smallest singular value
//!   of an analytic path.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, Z2Error};
use crate::finite::{completion_from, sf2_segment_oriented, structures_kernel_count, Completion};
use crate::linalg::{
    canonical_from, eig_skew, op_norm, phase_from, projector_distance, skew_eigenvalues,
    subspace_identification, ComplexStructure, SkewMatrix, SpectralData, Tolerance, Z2,
};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothness {
    Analytic,
    Continuous,
}

pub type Sampler = Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;

/// A path `t ∈ [0,1] ↦ T_t`. The sampler may be called concurrently.
#[derive(Clone)]
pub struct OperatorPath {
    pub dim: usize,
    pub sampler: Sampler,
    pub is_loop: bool,
    pub smoothness: Smoothness,
}

impl std::fmt::Debug for OperatorPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OperatorPath")
            .field("dim", &self.dim)
            .field("is_loop", &self.is_loop)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl OperatorPath {
    pub fn new<F>(dim: usize, smoothness: Smoothness, f: F) -> Self
    where
        F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        OperatorPath {
            dim,
            sampler: Arc::new(f),
            is_loop: false,
            smoothness,
        }
    }

    pub fn closed<F>(dim: usize, smoothness: Smoothness, f: F) -> Self
    where
        F: Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    {
        OperatorPath {
            is_loop: true,
            ..OperatorPath::new(dim, smoothness, f)
        }
    }

    /// Piecewise-linear interpolation of samples at increasing times
    /// `ts[0] = 0 < … < ts[last] = 1`.
    pub fn from_samples(ts: Vec<f64>, mats: Vec<DMatrix<f64>>, is_loop: bool) -> Result<Self> {
        if ts.len() != mats.len() || ts.len() < 2 {
            return Err(Z2Error::DimensionMismatch(ts.len(), mats.len()));
        }
        let dim = mats[0].nrows();
        for m in &mats {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Z2Error::DimensionMismatch(dim, m.nrows()));
            }
        }
        if ts[0] != 0.0 || *ts.last().unwrap() != 1.0 || ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Z2Error::InvalidTolerance(
                "sample times must increase from 0 to 1".into(),
            ));
        }
        let f = move |t: f64| {
            let t = t.clamp(0.0, 1.0);
            let i = match ts.iter().position(|&s| s >= t) {
                Some(0) => return mats[0].clone(),
                Some(i) => i,
                None => return mats[mats.len() - 1].clone(),
            };
            let w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
            &mats[i - 1] * (1.0 - w) + &mats[i] * w
        };
        Ok(OperatorPath {
            dim,
            sampler: Arc::new(f),
            is_loop,
            smoothness: Smoothness::Continuous,
        })
    }

    pub fn sample(&self, t: f64) -> Result<SkewMatrix> {
        let m = (self.sampler)(t);
        if m.nrows() != self.dim {
            return Err(Z2Error::DimensionMismatch(self.dim, m.nrows()));
        }
        SkewMatrix::new(m)
    }

    /// `t ↦ T_{1-t}`.
    pub fn reversed(&self) -> Self {
        let s = self.sampler.clone();
        OperatorPath {
            sampler: Arc::new(move |t| s(1.0 - t)),
            ..self.clone()
        }
    }

    /// `t ↦ -T_t`.
    pub fn negated(&self) -> Self {
        let s = self.sampler.clone();
        OperatorPath {
            sampler: Arc::new(move |t| -s(t)),
            ..self.clone()
        }
    }

    /// First `self`, then `other`, each at double speed.
    pub fn concat(&self, other: &OperatorPath) -> Self {
        let (a, b) = (self.sampler.clone(), other.sampler.clone());
        let smoothness = if self.smoothness == Smoothness::Analytic
            && other.smoothness == Smoothness::Analytic
        {
            Smoothness::Analytic
        } else {
            Smoothness::Continuous
        };
        OperatorPath {
            dim: self.dim,
            sampler: Arc::new(move |t| if t <= 0.5 { a(2.0 * t) } else { b(2.0 * t - 1.0) }),
            is_loop: false,
            smoothness,
        }
    }

    /// Restriction to `[t0, t1]`, reparametrized to `[0, 1]`.
    pub fn restrict(&self, t0: f64, t1: f64) -> Self {
        let s = self.sampler.clone();
        OperatorPath {
            sampler: Arc::new(move |t| s(t0 + (t1 - t0) * t)),
            is_loop: false,
            ..self.clone()
        }
    }
}

/// Settings of the path algorithms beyond [`Tolerance`].
#[derive(Clone, Debug)]
pub struct PathOptions {
    /// Sample grid per segment (including both ends).
    pub samples_per_segment: usize,
    pub max_depth: usize,
    /// Completion scale as a fraction of the adjacent window radii.
    pub completion_factor: f64,
    /// Initial uniform partition.
    pub min_segments: usize,
    /// Diagonal weights of a spatial region; when set, window frames are
    /// restricted to the part localized in the region.
    pub region: Option<Arc<DVector<f64>>>,
    /// Grid used by the crossing counter.
    pub crossing_grid: usize,
    /// Smallest interval the phase-sum refinement will split.
    pub min_width: f64,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            samples_per_segment: 33,
            max_depth: 18,
            completion_factor: 0.5,
            min_segments: 1,
            region: None,
            crossing_grid: 257,
            min_width: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Windowed,
    PhaseSum,
    CrossingCount,
}

#[derive(Clone, Debug, Serialize)]
pub struct SegmentRecord {
    pub t0: f64,
    pub t1: f64,
    /// Window radius (windowed method only).
    pub radius: Option<f64>,
    /// Window rank, or dimension of `ker(J + J')` for the phase sum.
    pub rank: usize,
    pub value: Z2,
    /// `‖Q - Q'‖` for the windowed method, `‖J - J'‖` for the phase sum.
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Crossing {
    pub t: f64,
    /// Number of eigenvalue pairs vanishing at `t`.
    pub multiplicity: usize,
    /// Whether the crossing flips the orientation (odd contribution).
    pub odd: bool,
    pub min_singular_value: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnostics {
    pub kernel_tol: f64,
    pub gap_ratio: f64,
    pub epsilon: f64,
    pub evaluations: usize,
    pub max_projector_variation: f64,
    pub max_identification_distance: f64,
    pub completion_scales: Vec<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SF2Report {
    pub value: Z2,
    pub method: Method,
    pub segments: Vec<SegmentRecord>,
    pub crossings: Vec<Crossing>,
    pub diagnostics: Diagnostics,
}

/// One spectral evaluation of the path.
#[derive(Clone, Debug)]
pub struct Sample {
    pub t: f64,
    pub op: SkewMatrix,
    pub spec: SpectralData,
}

#[derive(Clone, Debug)]
pub struct PlannedSegment {
    pub t0: f64,
    pub t1: f64,
    pub radius: f64,
    pub rank: usize,
    /// Rank of the region-restricted frame.
    pub region_rank: Option<usize>,
    /// Largest sampled projector variation on the segment.
    pub variation: f64,
    /// Window frames at the two ends.
    pub frames: (DMatrix<f64>, DMatrix<f64>),
}

#[derive(Clone, Debug)]
pub struct CompletionRecord {
    pub t: f64,
    pub scale: f64,
    pub kernel_dim: usize,
}

/// Partition data of the windowed construction.
#[derive(Clone, Debug)]
pub struct PartitionPlan {
    pub points: Vec<f64>,
    pub segments: Vec<PlannedSegment>,
    pub completions: Vec<CompletionRecord>,
    pub epsilon: f64,
    pub evaluations: usize,
    samples: Vec<Arc<Sample>>,
}

impl PartitionPlan {
    pub fn radii(&self) -> Vec<f64> {
        self.segments.iter().map(|s| s.radius).collect()
    }
}

struct Evaluator<'a> {
    path: &'a OperatorPath,
    tol: Tolerance,
    cache: Mutex<HashMap<u64, Arc<Sample>>>,
}

impl<'a> Evaluator<'a> {
    fn new(path: &'a OperatorPath, tol: &Tolerance) -> Self {
        Evaluator {
            path,
            tol: *tol,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn evaluations(&self) -> usize {
        self.cache.lock().unwrap().len()
    }

    /// Evaluate at `t`; on an ambiguous kernel retry at deterministic
    /// golden-ratio offsets inside `(lo, hi)`.
    fn eval(&self, t: f64, lo: f64, hi: f64, movable: bool) -> Result<Arc<Sample>> {
        if let Some(s) = self.cache.lock().unwrap().get(&t.to_bits()) {
            return Ok(s.clone());
        }
        let width = hi - lo;
        let mut last = None;
        for k in 0..8 {
            let tt = if k == 0 {
                t
            } else {
                let off = ((k as f64 * GOLDEN).fract() - 0.5) * 1e-3 * width;
                (t + off).clamp(lo + 1e-6 * width, hi - 1e-6 * width)
            };
            let op = self.path.sample(tt)?;
            match eig_skew(&op, &self.tol) {
                Ok(spec) => {
                    let s = Arc::new(Sample { t: tt, op, spec });
                    self.cache.lock().unwrap().insert(t.to_bits(), s.clone());
                    return Ok(s);
                }
                Err(e @ Z2Error::AmbiguousKernel { .. }) => {
                    if !movable {
                        return Err(e);
                    }
                    last = Some(e);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last.unwrap())
    }
}

struct WindowChoice {
    radius: f64,
    rank: usize,
    region_rank: Option<usize>,
    variation: f64,
    frames: Vec<DMatrix<f64>>,
}

/// Restrict a frame to the directions localized in a region. The restricted
/// part must be nearly invariant under `t`, i.e. decoupled from the rest of
/// the window, up to a tenth of the window radius.
fn region_frame(
    f: &DMatrix<f64>,
    w: &DVector<f64>,
    t: &DMatrix<f64>,
    radius: f64,
) -> Result<DMatrix<f64>> {
    let r = f.ncols();
    if r == 0 {
        return Ok(f.clone());
    }
    let mut wf = f.clone();
    for (i, mut row) in wf.row_iter_mut().enumerate() {
        row *= w[i];
    }
    let g = f.transpose() * wf;
    let eig = SymmetricEigen::new((&g + g.transpose()) * 0.5);
    let mut cols = Vec::new();
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v > 0.2 && v < 0.8 {
            return Err(Z2Error::SectorMixing { weight: v });
        }
        if v >= 0.8 {
            cols.push(i);
        }
    }
    let u = DMatrix::from_fn(r, cols.len(), |a, b| eig.eigenvectors[(a, cols[b])]);
    let g = f * u;
    if g.ncols() > 0 {
        let tg = t * &g;
        let leakage = op_norm(&(&tg - &g * (g.transpose() * &tg)));
        if leakage > 0.1 * radius {
            return Err(Z2Error::RegionLeakage { leakage, radius });
        }
    }
    Ok(g)
}

fn frobenius_diff(a: &SkewMatrix, b: &SkewMatrix) -> f64 {
    (a.matrix() - b.matrix()).norm()
}

/// Pick a window radius for the samples of one segment.
fn choose_window(
    samples: &[Arc<Sample>],
    tol: &Tolerance,
    region: Option<&DVector<f64>>,
) -> Option<WindowChoice> {
    let s = samples.len();
    let n = samples[0].op.dim();
    // Weyl bound on eigenvalue motion between neighbouring samples.
    let steps: Vec<f64> = samples
        .windows(2)
        .map(|w| frobenius_diff(&w[0].op, &w[1].op))
        .collect();
    let drift: Vec<f64> = (0..s)
        .map(|i| {
            let l = if i > 0 { steps[i - 1] } else { 0.0 };
            let r = if i + 1 < s { steps[i] } else { 0.0 };
            l.max(r)
        })
        .collect();
    let svs: Vec<Vec<f64>> = samples.iter().map(|x| x.spec.singular_values()).collect();
    let kt = samples
        .iter()
        .map(|x| x.spec.kernel_tol)
        .fold(0.0_f64, f64::max);
    let scale = svs
        .iter()
        .map(|v| v.last().copied().unwrap_or(0.0))
        .fold(0.0_f64, f64::max);

    let mut candidates: Vec<(f64, usize, f64)> = Vec::new();
    for r in 0..=n {
        if r > 0 && r < n && svs.iter().any(|v| v[r - 1] == v[r]) {
            continue;
        }
        let lo = if r == 0 {
            0.0
        } else {
            (0..s).map(|i| svs[i][r - 1] + drift[i]).fold(0.0_f64, f64::max)
        };
        let hi = if r == n {
            f64::INFINITY
        } else {
            (0..s)
                .map(|i| svs[i][r] - drift[i])
                .fold(f64::INFINITY, f64::min)
        };
        if !(hi > lo) {
            continue;
        }
        if hi.is_infinite() && region.is_some() {
            // the whole space never splits into decoupled regions
            continue;
        }
        let (a, quality) = if hi.is_infinite() {
            // the whole space is always a valid window; prefer proper gaps
            ((2.0 * lo).max(1e-300) + scale.max(1.0), 0.05)
        } else {
            if hi - lo <= 4.0 * kt + 1e-14 * scale {
                continue;
            }
            if lo > 0.0 && hi < tol.gap_ratio.sqrt() * kt {
                continue;
            }
            (0.5 * (lo + hi), (hi - lo) / hi)
        };
        candidates.push((quality, r, a));
    }
    candidates.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));

    'cand: for &(_, r, a) in candidates.iter().take(4) {
        let mut frames = Vec::with_capacity(s);
        for x in samples {
            let f = x.spec.window_frame(a);
            if f.ncols() != r {
                continue 'cand;
            }
            let f = match region {
                Some(w) => match region_frame(&f, w, x.op.matrix(), a) {
                    Ok(g) => g,
                    Err(_) => continue 'cand,
                },
                None => f,
            };
            frames.push(f);
        }
        let region_rank = region.map(|_| frames[0].ncols());
        if frames.iter().any(|f| f.ncols() != frames[0].ncols()) {
            continue;
        }
        let mid = &frames[s / 2];
        let mut variation = 0.0_f64;
        for f in &frames {
            variation = variation.max(projector_distance(f, mid));
            if variation >= 0.5 * tol.epsilon {
                continue 'cand;
            }
        }
        return Some(WindowChoice {
            radius: a,
            rank: r,
            region_rank,
            variation: 2.0 * variation,
            frames,
        });
    }
    None
}

/// Adaptive partition of `[0,1]` into segments with a valid spectral window.
pub fn plan_partition(
    path: &OperatorPath,
    tol: &Tolerance,
    opts: &PathOptions,
) -> Result<PartitionPlan> {
    tol.validate()?;
    let ev = Evaluator::new(path, tol);
    plan_with(&ev, path, tol, opts)
}

fn plan_with(
    ev: &Evaluator<'_>,
    path: &OperatorPath,
    tol: &Tolerance,
    opts: &PathOptions,
) -> Result<PartitionPlan> {
    let s = opts.samples_per_segment.max(3);
    let m0 = opts.min_segments.max(1);
    let mut stack: Vec<(Arc<Sample>, Arc<Sample>, usize)> = Vec::new();
    let mut points = Vec::with_capacity(m0 + 1);
    for i in 0..=m0 {
        let t = i as f64 / m0 as f64;
        let movable = i != 0 && i != m0;
        points.push(ev.eval(t, 0.0, 1.0, movable)?);
    }
    for i in (0..m0).rev() {
        stack.push((points[i].clone(), points[i + 1].clone(), 0));
    }

    let mut done: Vec<(Arc<Sample>, Arc<Sample>, WindowChoice)> = Vec::new();
    while let Some((left, right, depth)) = stack.pop() {
        let (a, b) = (left.t, right.t);
        let interior: Vec<Arc<Sample>> = (1..s - 1)
            .into_par_iter()
            .map(|i| {
                let t = a + (b - a) * (i as f64 / (s - 1) as f64);
                ev.eval(t, a, b, true)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut grid = Vec::with_capacity(s);
        grid.push(left.clone());
        grid.extend(interior);
        grid.push(right.clone());
        match choose_window(&grid, tol, opts.region.as_deref()) {
            Some(choice) => done.push((left, right, choice)),
            None => {
                if depth + 1 > opts.max_depth {
                    return Err(Z2Error::RefinementExhausted {
                        max_depth: opts.max_depth,
                        t: 0.5 * (a + b),
                    });
                }
                let mid = grid[s / 2].clone();
                stack.push((mid.clone(), right, depth + 1));
                stack.push((left, mid, depth + 1));
            }
        }
    }

    let mut samples = vec![done[0].0.clone()];
    let mut segments = Vec::with_capacity(done.len());
    for (l, r, c) in done {
        samples.push(r.clone());
        let last = c.frames.len() - 1;
        segments.push(PlannedSegment {
            t0: l.t,
            t1: r.t,
            radius: c.radius,
            rank: c.rank,
            region_rank: c.region_rank,
            variation: c.variation,
            frames: (c.frames[0].clone(), c.frames[last].clone()),
        });
    }
    let points = samples.iter().map(|x| x.t).collect();
    let _ = path;
    Ok(PartitionPlan {
        points,
        segments,
        completions: Vec::new(),
        epsilon: tol.epsilon,
        evaluations: ev.evaluations(),
        samples,
    })
}

fn minimal_check(sample: &Sample) -> Result<()> {
    let n = sample.op.dim();
    let k = sample.spec.kernel_dim();
    if k != n % 2 {
        return Err(Z2Error::NonMinimalKernel {
            found: k,
            minimal: n % 2,
        });
    }
    Ok(())
}

/// Windowed ℤ₂ spectral flow.
pub fn sf2_path_windowed(path: &OperatorPath, tol: &Tolerance) -> Result<SF2Report> {
    sf2_path_windowed_with(path, tol, &PathOptions::default())
}

pub fn sf2_path_windowed_with(
    path: &OperatorPath,
    tol: &Tolerance,
    opts: &PathOptions,
) -> Result<SF2Report> {
    tol.validate()?;
    if opts.region.is_some() && path.dim % 2 == 1 {
        return Err(Z2Error::OddDimension(path.dim));
    }
    let ev = Evaluator::new(path, tol);
    let first = ev.eval(0.0, 0.0, 1.0, false)?;
    let last = ev.eval(1.0, 0.0, 1.0, false)?;
    if path.is_loop {
        let gap = frobenius_diff(&first.op, &last.op);
        if gap > 1e-9 * first.op.matrix().norm().max(1.0) {
            return Err(Z2Error::OpenLoop(gap));
        }
    } else {
        minimal_check(&first)?;
        minimal_check(&last)?;
    }
    let mut plan = plan_with(&ev, path, tol, opts)?;
    if path.is_loop {
        let n = plan.samples.len();
        plan.samples[n - 1] = plan.samples[0].clone();
    }
    evaluate_plan(&mut plan, path, tol, opts)
}

/// Sum of segment values for a finished plan.
fn evaluate_plan(
    plan: &mut PartitionPlan,
    path: &OperatorPath,
    tol: &Tolerance,
    opts: &PathOptions,
) -> Result<SF2Report> {
    let np = plan.samples.len();
    let nseg = plan.segments.len();
    // completion scale at each partition point from the adjacent radii
    let mut scales = vec![f64::INFINITY; np];
    for (i, seg) in plan.segments.iter().enumerate() {
        scales[i] = scales[i].min(seg.radius);
        scales[i + 1] = scales[i + 1].min(seg.radius);
    }
    if path.is_loop {
        let m = scales[0].min(scales[np - 1]);
        scales[0] = m;
        scales[np - 1] = m;
    }
    let completions: Vec<Completion> = (0..np)
        .map(|i| {
            let s = &plan.samples[i];
            completion_from(&s.op, &s.spec, opts.completion_factor * scales[i])
        })
        .collect();
    plan.completions = (0..np)
        .map(|i| CompletionRecord {
            t: plan.points[i],
            scale: opts.completion_factor * scales[i],
            kernel_dim: plan.samples[i].spec.kernel_dim(),
        })
        .collect();
    let kt = plan
        .samples
        .iter()
        .map(|s| s.spec.kernel_tol)
        .fold(0.0_f64, f64::max);
    let seg_tol = Tolerance {
        kernel_tol: Some(kt),
        ..*tol
    };

    let region = opts.region.as_deref();
    let records = (0..nseg)
        .into_par_iter()
        .map(|i| {
            let seg = &plan.segments[i];
            let (l, r) = (&plan.samples[i], &plan.samples[i + 1]);
            let (cl, cr) = (&completions[i], &completions[i + 1]);
            let mut fl = l.spec.window_frame(seg.radius);
            let mut fr = r.spec.window_frame(seg.radius);
            if let Some(w) = region {
                fl = region_frame(&fl, w, l.op.matrix(), seg.radius)?;
                fr = region_frame(&fr, w, r.op.matrix(), seg.radius)?;
            }
            let id = subspace_identification(&fl, &fr, tol)?;
            let lop = cl.matrix.congruence(&fl);
            let rop = cr.matrix.congruence(&(&fr * &id.v));
            let kl = cl.kernel_vector.as_ref().map(|k| fl.transpose() * k);
            let kr = match cr.kernel_vector.as_ref() {
                Some(k) => {
                    let inv = id.v.clone().try_inverse().ok_or(Z2Error::FramesTooFar {
                        distance: id.distance,
                    })?;
                    Some(inv * (fr.transpose() * k))
                }
                None => None,
            };
            let kl = kl.filter(|v| v.norm() > 0.5);
            let kr = kr.filter(|v| v.norm() > 0.5);
            let value = if fl.ncols() == 0 {
                Z2::ZERO
            } else {
                sf2_segment_oriented(&lop, &rop, kl.as_ref(), kr.as_ref(), &seg_tol)?.value
            };
            Ok(SegmentRecord {
                t0: seg.t0,
                t1: seg.t1,
                radius: Some(seg.radius),
                rank: fl.ncols(),
                value,
                distance: id.distance,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let value = records.iter().map(|r| r.value).sum();
    let mut notes = Vec::new();
    if path.dim % 2 == 1 && !path.is_loop {
        notes.push(crate::finite::ODD_CONVENTION.to_string());
    }
    if region.is_some() {
        notes.push("window frames restricted to the selected region".to_string());
    }
    let diagnostics = Diagnostics {
        kernel_tol: kt,
        gap_ratio: tol.gap_ratio,
        epsilon: tol.epsilon,
        evaluations: plan.evaluations,
        max_projector_variation: plan
            .segments
            .iter()
            .map(|s| s.variation)
            .fold(0.0, f64::max),
        max_identification_distance: records.iter().map(|r| r.distance).fold(0.0, f64::max),
        completion_scales: plan.completions.iter().map(|c| c.scale).collect(),
        notes,
    };
    Ok(SF2Report {
        value,
        method: Method::Windowed,
        segments: records,
        crossings: Vec::new(),
        diagnostics,
    })
}

/// Plan and evaluate in one go, returning the plan as well.
pub fn sf2_path_windowed_plan(
    path: &OperatorPath,
    tol: &Tolerance,
    opts: &PathOptions,
) -> Result<(SF2Report, PartitionPlan)> {
    tol.validate()?;
    let ev = Evaluator::new(path, tol);
    let first = ev.eval(0.0, 0.0, 1.0, false)?;
    let last = ev.eval(1.0, 0.0, 1.0, false)?;
    if !path.is_loop {
        minimal_check(&first)?;
        minimal_check(&last)?;
    }
    let mut plan = plan_with(&ev, path, tol, opts)?;
    if path.is_loop {
        let n = plan.samples.len();
        plan.samples[n - 1] = plan.samples[0].clone();
    }
    let report = evaluate_plan(&mut plan, path, tol, opts)?;
    Ok((report, plan))
}

/// Phase of an invertible sample. Clustered eigenvalues leave the plane frame
/// slightly non-orthonormal, so the phase is polished by `J ← ½(J − J⁻¹)`,
/// which stays skew and converges quadratically to the nearest `J² = −1`.
fn structure_at(sample: &Sample) -> Result<ComplexStructure> {
    let mut j = phase_from(&sample.spec).into_matrix();
    let n = j.nrows();
    for _ in 0..4 {
        let residual = (&j * &j + DMatrix::identity(n, n)).amax();
        if residual < 1e-14 {
            break;
        }
        let Some(inv) = j.clone().try_inverse() else {
            break;
        };
        j = (&j - inv) * 0.5;
        j = (&j - j.transpose()) * 0.5;
    }
    ComplexStructure::new(j)
}

/// ℤ₂ spectral flow as `Σ ½ dim ker(J_{n-1} + J_n) mod 2` over phases of a
/// sufficiently fine sample.
pub fn sf2_path_phase_sum(path: &OperatorPath, tol: &Tolerance) -> Result<SF2Report> {
    sf2_path_phase_sum_with(path, tol, &PathOptions::default())
}

pub fn sf2_path_phase_sum_with(
    path: &OperatorPath,
    tol: &Tolerance,
    opts: &PathOptions,
) -> Result<SF2Report> {
    tol.validate()?;
    if path.dim % 2 == 1 {
        return Err(Z2Error::OddDimension(path.dim));
    }
    let ev = Evaluator::new(path, tol);
    let s = opts.samples_per_segment.max(3);
    let invertible = |x: &Arc<Sample>| x.spec.kernel_dim() == 0;

    let first = ev.eval(0.0, 0.0, 1.0, false)?;
    let last = ev.eval(1.0, 0.0, 1.0, false)?;
    if !path.is_loop {
        minimal_check(&first)?;
        minimal_check(&last)?;
    }
    let eval_invertible = |t: f64, lo: f64, hi: f64| -> Result<Arc<Sample>> {
        let x = ev.eval(t, lo, hi, true)?;
        if invertible(&x) {
            return Ok(x);
        }
        for k in 1..8 {
            let off = ((k as f64 * GOLDEN).fract() - 0.5) * 1e-3 * (hi - lo);
            let tt = (t + off).clamp(lo + 1e-6 * (hi - lo), hi - 1e-6 * (hi - lo));
            let x = ev.eval(tt, lo, hi, true)?;
            if invertible(&x) {
                return Ok(x);
            }
        }
        Err(Z2Error::NonMinimalKernel {
            found: x.spec.kernel_dim(),
            minimal: 0,
        })
    };

    let mut pts: Vec<Arc<Sample>> = Vec::with_capacity(s);
    pts.push(first.clone());
    let interior = (1..s - 1)
        .into_par_iter()
        .map(|i| eval_invertible(i as f64 / (s - 1) as f64, 0.0, 1.0))
        .collect::<Result<Vec<_>>>()?;
    pts.extend(interior);
    pts.push(last.clone());
    let mut js: Vec<ComplexStructure> = pts.iter().map(|x| structure_at(x)).collect::<Result<_>>()?;

    let limit = std::f64::consts::SQRT_2;
    let max_points = 1usize << opts.max_depth.min(24);
    let mut i = 0;
    while i + 1 < pts.len() {
        let (a, b) = (pts[i].t, pts[i + 1].t);
        let d = op_norm(&(js[i].matrix() - js[i + 1].matrix()));
        if d >= limit && b - a > opts.min_width {
            if pts.len() > max_points {
                return Err(Z2Error::RefinementExhausted {
                    max_depth: opts.max_depth,
                    t: a,
                });
            }
            let x = eval_invertible(0.5 * (a + b), a, b)?;
            let j = structure_at(&x)?;
            pts.insert(i + 1, x);
            js.insert(i + 1, j);
            continue;
        }
        i += 1;
    }
    if path.is_loop {
        let n = js.len();
        js[n - 1] = js[0].clone();
    }

    let records = (0..js.len() - 1)
        .into_par_iter()
        .map(|i| {
            let c = structures_kernel_count(&js[i], &js[i + 1], tol)?;
            Ok(SegmentRecord {
                t0: pts[i].t,
                t1: pts[i + 1].t,
                radius: None,
                rank: c.below,
                value: c.value,
                distance: op_norm(&(js[i].matrix() - js[i + 1].matrix())),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let value = records.iter().map(|r| r.value).sum();
    let diagnostics = Diagnostics {
        kernel_tol: pts.iter().map(|x| x.spec.kernel_tol).fold(0.0, f64::max),
        gap_ratio: tol.gap_ratio,
        epsilon: tol.epsilon,
        evaluations: ev.evaluations(),
        ..Default::default()
    };
    Ok(SF2Report {
        value,
        method: Method::PhaseSum,
        segments: records,
        crossings: Vec::new(),
        diagnostics,
    })
}

/// Smallest singular value above the structural kernel.
fn gap_function(path: &OperatorPath, t: f64) -> Result<f64> {
    let op = path.sample(t)?;
    let ev = skew_eigenvalues(&op);
    let mut abs: Vec<f64> = ev.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| a.total_cmp(b));
    Ok(abs.get(path.dim % 2).copied().unwrap_or(f64::INFINITY))
}

fn golden_min(path: &OperatorPath, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let mut fc = gap_function(path, c)?;
    let mut fd = gap_function(path, d)?;
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = gap_function(path, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = gap_function(path, d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Orientation flip of the compressed operator across a crossing.
fn crossing_flip(path: &OperatorPath, t: f64, scale: f64, zero: f64, width: f64) -> Result<(usize, bool)> {
    let op = path.sample(t)?;
    let tol = Tolerance {
        kernel_tol: Some((zero * 100.0).max(1e-7 * scale)),
        gap_ratio: 10.0,
        epsilon: 0.2,
    };
    let spec = eig_skew(&op, &tol)?;
    let f = spec.kernel.clone();
    let k = f.ncols();
    let n = path.dim;
    let planes = (k - n % 2) / 2;
    let mut h = 1e-6 * width.max(1e-6);
    loop {
        let bm = path.sample(t - h)?.congruence(&f);
        let bp = path.sample(t + h)?.congruence(&f);
        let sm = skew_eigenvalues(&bm);
        let sp = skew_eigenvalues(&bp);
        let small = |v: &Vec<f64>| {
            let mut a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
            a.sort_by(|x, y| x.total_cmp(y));
            a.get(n % 2).copied().unwrap_or(f64::INFINITY)
        };
        if small(&sm).min(small(&sp)) > 1e3 * zero || h > 0.25 * width {
            let loc = Tolerance {
                kernel_tol: Some(1e-3 * small(&sm).min(small(&sp))),
                ..tol
            };
            let cm = eig_skew(&bm, &loc)?;
            let cp = eig_skew(&bp, &loc)?;
            let km = cm.kernel.clone();
            let kp = if km.ncols() == 1 && cp.kernel.ncols() == 1 {
                let s = if km.column(0).dot(&cp.kernel.column(0)) < 0.0 { -1.0 } else { 1.0 };
                Some(&cp.kernel * s)
            } else {
                None
            };
            let pm = canonical_from(&cm, None).parity;
            let pp = canonical_from(&cp, kp.as_ref()).parity;
            return Ok((planes, (pm + pp).is_one()));
        }
        h *= 4.0;
    }
}

/// Parity of eigenvalue crossings through zero of an analytic path, with
/// their locations.
pub fn count_crossings(path: &OperatorPath, tol: &Tolerance) -> Result<SF2Report> {
    count_crossings_with(path, tol, &PathOptions::default())
}

pub fn count_crossings_with(
    path: &OperatorPath,
    tol: &Tolerance,
    opts: &PathOptions,
) -> Result<SF2Report> {
    tol.validate()?;
    if path.smoothness != Smoothness::Analytic {
        return Err(Z2Error::NotAnalyticHint);
    }
    let g = opts.crossing_grid.max(5);
    let ts: Vec<f64> = (0..g).map(|i| i as f64 / (g - 1) as f64).collect();
    let vals = ts
        .par_iter()
        .map(|&t| {
            let op = path.sample(t)?;
            let ev = skew_eigenvalues(&op);
            let scale = ev.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let mut abs: Vec<f64> = ev.iter().map(|v| v.abs()).collect();
            abs.sort_by(|a, b| a.total_cmp(b));
            Ok((abs.get(path.dim % 2).copied().unwrap_or(f64::INFINITY), scale))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = vals.iter().map(|v| v.1).fold(0.0_f64, f64::max).max(f64::MIN_POSITIVE);
    let zero = 1e-7 * scale;
    let clear = 1e-4 * scale;
    let f: Vec<f64> = vals.iter().map(|v| v.0).collect();
    if !path.is_loop && (f[0] <= zero || f[g - 1] <= zero) {
        return Err(Z2Error::NonMinimalKernel {
            found: path.dim % 2 + 2,
            minimal: path.dim % 2,
        });
    }

    let mut found: Vec<Crossing> = Vec::new();
    let h = 1.0 / (g - 1) as f64;
    let lo_idx = if path.is_loop { 0 } else { 1 };
    for i in lo_idx..g - 1 {
        let left = if i == 0 { f[g - 2] } else { f[i - 1] };
        if !(f[i] <= left && f[i] <= f[i + 1]) {
            continue;
        }
        if f[i] > 0.25 * scale {
            continue;
        }
        let a = (ts[i] - h).max(0.0);
        let b = (ts[i] + h).min(1.0);
        let (t, v) = golden_min(path, a, b)?;
        if v > clear {
            continue;
        }
        if v > zero {
            return Err(Z2Error::UnresolvedCrossing { t, value: v });
        }
        if let Some(prev) = found.last() {
            if (prev.t - t).abs() < 1e-10 {
                continue;
            }
            if (prev.t - t).abs() < 1e-6 {
                return Err(Z2Error::UnresolvedCrossing { t, value: v });
            }
        }
        let width = (t - a).min(b - t).max(1e-9);
        let (multiplicity, odd) = crossing_flip(path, t, scale, zero, width)?;
        found.push(Crossing {
            t,
            multiplicity,
            odd,
            min_singular_value: v,
        });
    }
    let value = found.iter().map(|c| Z2::from_count(c.odd as usize)).sum();
    let diagnostics = Diagnostics {
        kernel_tol: zero,
        gap_ratio: tol.gap_ratio,
        epsilon: tol.epsilon,
        evaluations: g,
        notes: vec![format!("crossing threshold {zero:.3e}, clear threshold {clear:.3e}")],
        ..Default::default()
    };
    Ok(SF2Report {
        value,
        method: Method::CrossingCount,
        segments: Vec::new(),
        crossings: found,
        diagnostics,
    })
}

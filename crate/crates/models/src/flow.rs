//! Signed spectral flow of a path of Hermitian matrices through a level.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use z2flow::Z2Error;

use crate::bdg::{hermitian_eigen, C64};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct FlowOptions {
    /// Number of initial cells on `[0,1]`.
    pub grid: usize,
    /// Cells narrower than this are not split further.
    pub min_width: f64,
    /// Diagonal weights selecting a spatial region; `None` counts the whole
    /// space.
    pub region: Option<Vec<f64>>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            grid: 256,
            min_width: 1e-9,
            region: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowReport {
    /// Up-crossings minus down-crossings.
    pub value: i64,
    pub cells: usize,
    /// Largest distance of a per-cell change from its rounded value.
    pub max_residual: f64,
}

/// Weighted count of eigenvalues below `level`, with the distance of the
/// closest eigenvalue to the level.
fn below<F>(f: &F, t: f64, level: f64, w: Option<&[f64]>) -> (f64, f64)
where
    F: Fn(f64) -> DMatrix<C64>,
{
    let h = f(t);
    let (values, vectors) = hermitian_eigen(&h);
    let closest = values.iter().map(|v| (v - level).abs()).fold(f64::INFINITY, f64::min);
    let mut q = 0.0;
    for (k, &v) in values.iter().enumerate() {
        if v < level {
            q += match w {
                None => 1.0,
                Some(w) => vectors
                    .column(k)
                    .iter()
                    .zip(w)
                    .map(|(z, wi)| z.norm_sqr() * wi)
                    .sum(),
            };
        }
    }
    (q, closest)
}

/// Net number of eigenvalues crossing `level` upwards along `t ∈ [0,1]`.
///
/// With a region, the count is `-Σ round(Δ tr(W P_{<level}))` over cells
/// refined until every change is within `1/4` of an integer; crossings of
/// states outside the region then contribute nothing.
pub fn complex_spectral_flow<F>(f: F, level: f64, opts: &FlowOptions) -> Result<FlowReport>
where
    F: Fn(f64) -> DMatrix<C64> + Sync,
{
    let w = opts.region.as_deref();
    let n = opts.grid.max(1);
    let points: Vec<(f64, (f64, f64))> = (0..=n)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / n as f64;
            (t, below(&f, t, level, w))
        })
        .collect();
    for &(t, (_, closest)) in [points[0], points[n]].iter() {
        if closest < 1e-12 {
            return Err(Z2Error::UnresolvedCrossing { t, value: closest }.into());
        }
    }
    let cells: Vec<(i64, f64, usize)> = points
        .par_windows(2)
        .map(|p| refine(&f, level, w, p[0], p[1], opts.min_width))
        .collect::<Result<Vec<_>>>()?;
    let value = cells.iter().map(|c| c.0).sum::<i64>();
    Ok(FlowReport {
        value,
        cells: cells.iter().map(|c| c.2).sum(),
        max_residual: cells.iter().map(|c| c.1).fold(0.0, f64::max),
    })
}

type Point = (f64, (f64, f64));

fn refine<F>(
    f: &F,
    level: f64,
    w: Option<&[f64]>,
    a: Point,
    b: Point,
    min_width: f64,
) -> Result<(i64, f64, usize)>
where
    F: Fn(f64) -> DMatrix<C64>,
{
    let d = b.1 .0 - a.1 .0;
    let residual = (d - d.round()).abs();
    if residual <= 0.25 {
        return Ok((-(d.round() as i64), residual, 1));
    }
    if b.0 - a.0 < min_width {
        return Err(Z2Error::UnresolvedCrossing {
            t: 0.5 * (a.0 + b.0),
            value: a.1 .1.min(b.1 .1),
        }
        .into());
    }
    let tm = 0.5 * (a.0 + b.0);
    let m = (tm, below(f, tm, level, w));
    let l = refine(f, level, w, a, m, min_width)?;
    let r = refine(f, level, w, m, b, min_width)?;
    Ok((l.0 + r.0, l.1.max(r.1), l.2 + r.2))
}

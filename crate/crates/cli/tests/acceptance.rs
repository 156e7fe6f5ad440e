//! Acceptance criteria, one function each. Every criterion prints a single
//! PASS/FAIL line; the test fails if any criterion fails.

use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use z2flow::generators::{abs_2x2, linear_2x2, PlantedPath};
use z2flow::linalg::{sigma, window_projection};
use z2flow::ortho::{factorize, j_det, j_kernel, square_sum_clusters, verify_pair_identities, KernelFormula};
use z2flow::path::{count_crossings_with, sf2_path_phase_sum_with, sf2_path_windowed_with};
use z2flow::toeplitz::{build_circle_pair, cayley_check, conjugation_report, sf2_conjugated, toeplitz_index_resolved};
use z2flow::{
    count_crossings, eig_skew, sf2_path_phase_sum, sf2_path_windowed, ComplexStructure, OperatorPath, OrthogonalMatrix,
    PathOptions, SkewMatrix, Smoothness, Tolerance, Z2Error, Z2,
};
use z2flow_models::bdg::C64;
use z2flow_models::{
    defect_kernel_parity, flux_sf2, symmetry_suite, z2_polarization, Boundary, KitaevConfig, ModelError, PumpConfig,
    RiceMele,
};

type Result<T> = std::result::Result<T, Z2Error>;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut ChaCha8Rng, n: usize, m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, m, |_, _| StandardNormal.sample(r))
}

/// Random orthogonal matrix from Gram-Schmidt on Gaussian columns.
fn gram_schmidt_orthogonal(r: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let mut q = gaussian(r, n, n);
    for j in 0..n {
        for _ in 0..2 {
            for k in 0..j {
                let d = q.column(j).dot(&q.column(k));
                let ck = q.column(k).into_owned();
                q.column_mut(j).axpy(-d, &ck, 1.0);
            }
        }
        let norm = q.column(j).norm();
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    q
}

fn householder(r: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let v = gaussian(r, n, 1);
    DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / v.norm_squared())
}

/// Pfaffian by skew Gaussian elimination with pivoting.
fn pfaffian(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n % 2 == 1 {
        return 0.0;
    }
    let mut a = a.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k < n {
        let (mut p, mut best) = (k + 1, 0.0);
        for i in k + 1..n {
            if a[(i, k)].abs() > best {
                best = a[(i, k)].abs();
                p = i;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if p != k + 1 {
            a.swap_rows(p, k + 1);
            a.swap_columns(p, k + 1);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        pf *= piv;
        for i in k + 2..n {
            let f = a[(k, i)] / piv;
            for j in 0..n {
                let v = a[(k + 1, j)];
                a[(i, j)] -= f * v;
            }
            for j in 0..n {
                let v = a[(j, k + 1)];
                a[(j, i)] -= f * v;
            }
        }
        k += 2;
    }
    pf
}

fn standard(n: usize) -> ComplexStructure {
    ComplexStructure::standard(n).unwrap()
}

fn conjugate(q: &DMatrix<f64>, j: &ComplexStructure) -> ComplexStructure {
    ComplexStructure::new(q * j.matrix() * q.transpose()).unwrap()
}

fn windowed(p: &OperatorPath) -> Result<Z2> {
    Ok(sf2_path_windowed(p, &tol())?.value)
}

fn c1_canonical() -> Verdict {
    let run = || -> Result<(Z2, Z2, Z2, usize)> {
        let lin = windowed(&linear_2x2())?;
        let abs = windowed(&abs_2x2())?;
        let c = count_crossings(&linear_2x2(), &tol())?;
        Ok((lin, abs, c.value, c.crossings.len()))
    };
    match run() {
        Ok((lin, abs, cross, n)) => verdict(
            lin == Z2::ONE && abs == Z2::ZERO && cross == Z2::ONE && n == 1,
            format!("linear {lin}, abs {abs}, crossing count {cross} ({n} crossing)"),
        ),
        Err(e) => verdict(false, e.to_string()),
    }
}

fn c2_cross_algorithm() -> Verdict {
    let n = 200u64;
    let results: Vec<std::result::Result<(), String>> = (0..n)
        .into_par_iter()
        .map(|seed| {
            let dim = 4 + 2 * (seed as usize % 19);
            let pp = PlantedPath::random(10_000 + seed, dim, 5);
            let p = pp.path();
            let o = PathOptions::default();
            let w = sf2_path_windowed_with(&p, &tol(), &o).map_err(|e| format!("seed {seed}: {e}"))?.value;
            let s = sf2_path_phase_sum_with(&p, &tol(), &o).map_err(|e| format!("seed {seed}: {e}"))?.value;
            let c = count_crossings_with(&p, &tol(), &o).map_err(|e| format!("seed {seed}: {e}"))?.value;
            let pf = Z2::from_count(((pfaffian(&pp.matrix(0.0)) > 0.0) != (pfaffian(&pp.matrix(1.0)) > 0.0)) as usize);
            if w == s && s == c && c == pf && w.value() == pp.expected_parity() {
                Ok(())
            } else {
                Err(format!("seed {seed} dim {dim}: windowed {w}, phase sum {s}, crossings {c}, pfaffian {pf}"))
            }
        })
        .collect();
    let bad: Vec<String> = results.into_iter().filter_map(|r| r.err()).collect();
    verdict(
        bad.is_empty(),
        format!("{} of {n} paths in dims 4..40 agree{}", n as usize - bad.len(), first(&bad)),
    )
}

fn first(bad: &[String]) -> String {
    bad.first().map(|s| format!("; first failure: {s}")).unwrap_or_default()
}

fn c3_axioms() -> Verdict {
    let seeds: Vec<u64> = (0..24).collect();
    let results: Vec<std::result::Result<usize, String>> = seeds
        .par_iter()
        .map(|&seed| -> std::result::Result<usize, String> {
            let err = |e: Z2Error| format!("seed {seed}: {e}");
            let dim = 4 + 2 * (seed as usize % 4);
            let a = PlantedPath::random(20_000 + seed, dim, 3);
            let b = PlantedPath::random(30_000 + seed, dim, 3);
            let pa = a.path();
            let v = windowed(&pa).map_err(err)?;
            let mut checks = 0;
            let mut expect = |name: &str, got: Z2, want: Z2| -> std::result::Result<(), String> {
                checks += 1;
                if got == want {
                    Ok(())
                } else {
                    Err(format!("seed {seed}: {name} gave {got}, expected {want}"))
                }
            };
            expect("reversal", windowed(&pa.reversed()).map_err(err)?, v)?;
            expect("negation", windowed(&pa.negated()).map_err(err)?, v)?;
            for (m, f) in [(4, 0.5), (16, 0.5), (1, 0.1), (3, 0.9)] {
                let o = PathOptions {
                    min_segments: m,
                    completion_factor: f,
                    ..PathOptions::default()
                };
                let got = sf2_path_windowed_with(&pa, &tol(), &o).map_err(err)?.value;
                expect("refinement/completion scale", got, v)?;
            }
            // concatenation through a straight link from a(1) to b(0)
            let (a1, b0) = (a.matrix(1.0), b.matrix(0.0));
            let bp = b.clone();
            let link = OperatorPath::new(dim, Smoothness::Continuous, move |t| {
                if t <= 0.5 {
                    &a1 * (1.0 - 2.0 * t) + &b0 * (2.0 * t)
                } else {
                    bp.matrix(2.0 * t - 1.0)
                }
            });
            let sum = v + windowed(&link).map_err(err)?;
            expect("concatenation", windowed(&pa.concat(&link)).map_err(err)?, sum)?;
            // homotopies vanishing at both ends
            let q = PlantedPath::random(40_000 + seed, dim, 0);
            for s in [0.3, 1.0] {
                let (a, q) = (a.clone(), q.clone());
                let h = OperatorPath::new(dim, Smoothness::Analytic, move |t| {
                    a.matrix(t) + q.matrix(t) * (s * t * (1.0 - t))
                });
                expect("fixed-endpoint homotopy", windowed(&h).map_err(err)?, v)?;
            }
            Ok(checks)
        })
        .collect();
    let mut checks = 0;
    let mut bad = Vec::new();
    for r in results {
        match r {
            Ok(c) => checks += c,
            Err(e) => bad.push(e),
        }
    }
    verdict(
        bad.is_empty(),
        format!("{checks} axiom checks on {} paths{}", seeds.len(), first(&bad)),
    )
}

fn c4_jmap() -> Verdict {
    let per_dim = 500;
    let dims: Vec<usize> = (1..=20).map(|h| 2 * h).collect();
    let results: Vec<(usize, usize, f64, f64, Vec<String>)> = dims
        .par_iter()
        .map(|&n| {
            let mut r = rng(50_000 + n as u64);
            let mut bad = Vec::new();
            let mut odd = 0;
            let mut fres = 0.0_f64;
            let mut pres = 0.0_f64;
            for k in 0..per_dim {
                // reflection-count oracle: k Householder factors times a rotation
                let reflections = k % 3;
                let mut m = gram_schmidt_orthogonal(&mut r, n);
                if m.determinant() < 0.0 {
                    m.column_mut(0).neg_mut();
                }
                for _ in 0..reflections {
                    m = householder(&mut r, n) * m;
                }
                let o = OrthogonalMatrix::new(m).unwrap();
                let j = conjugate(&gram_schmidt_orthogonal(&mut r, n), &standard(n));
                let want = Z2::from_count(reflections);
                let mut got = vec![j_det(&o)];
                for f in KernelFormula::ALL {
                    match j_kernel(&o, &j, f, &tol()) {
                        Ok(v) => got.push(v),
                        Err(e) => bad.push(format!("n={n} k={k} {f:?}: {e}")),
                    }
                }
                match factorize(&o, &j, &tol()) {
                    Ok(fz) => {
                        got.push(fz.value);
                        fres = fres.max(fz.residuals.max());
                    }
                    Err(e) => bad.push(format!("n={n} k={k} factorize: {e}")),
                }
                if got.iter().any(|&v| v != want) {
                    bad.push(format!("n={n} k={k}: {got:?}, expected {want}"));
                }
                odd += want.is_one() as usize;
                // homomorphism
                let o2 = OrthogonalMatrix::new(householder(&mut r, n) * gram_schmidt_orthogonal(&mut r, n)).unwrap();
                let prod = OrthogonalMatrix::new(o.matrix() * o2.matrix()).unwrap();
                if j_det(&prod) != j_det(&o) + j_det(&o2) {
                    bad.push(format!("n={n} k={k}: homomorphism"));
                }
                let j1 = conjugate(o.matrix(), &j);
                pres = pres.max(verify_pair_identities(&j, &j1).unwrap().max());
            }
            (n, odd, fres, pres, bad)
        })
        .collect();
    let mut bad: Vec<String> = results.iter().flat_map(|r| r.4.clone()).collect();
    let fres = results.iter().map(|r| r.2).fold(0.0, f64::max);
    let pres = results.iter().map(|r| r.3).fold(0.0, f64::max);
    if pres > 1e-10 {
        bad.push(format!("pair identity residual {pres:.2e}"));
    }
    if fres > 1e-9 {
        bad.push(format!("factorization residual {fres:.2e}"));
    }
    // multiplicity-4 clusters of (J0 + J1)^2
    let mut r = rng(60_000);
    let mut clusters = 0;
    for k in 0..240 {
        let n = 2 * (2 + k % 19);
        let j0 = conjugate(&gram_schmidt_orthogonal(&mut r, n), &standard(n));
        let j1 = conjugate(&gram_schmidt_orthogonal(&mut r, n), &standard(n));
        for (c, m) in square_sum_clusters(&j0, &j1, -4.0, 0.0, 1e-8) {
            clusters += 1;
            if m % 4 != 0 {
                bad.push(format!("pair {k}: cluster at {c:.6} has multiplicity {m}"));
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!(
            "{} orthogonals over dims 2..40, factorization residual {fres:.1e}, identity residual {pres:.1e}, {clusters} clusters from 240 pairs{}",
            per_dim * dims.len(),
            first(&bad)
        ),
    )
}

fn c5_toeplitz() -> Verdict {
    let mut bad = Vec::new();
    let mut worst = 0.0_f64;
    for n in 3..=20 {
        let mut run = || -> Result<()> {
            let pair = build_circle_pair(n)?;
            let s = sf2_conjugated(&pair, &tol())?;
            let t = toeplitz_index_resolved(&pair, &tol())?;
            if s.defect != Z2::ONE || t.defect != Z2::ONE {
                bad.push(format!("N={n}: SF2 {}, Toeplitz {}", s.defect, t.defect));
            }
            if s.total != t.total || s.boundary != t.boundary {
                bad.push(format!("N={n}: global parts differ"));
            }
            let c = conjugation_report(&pair);
            let k = cayley_check(&pair);
            worst = worst
                .max(c.interior_residual)
                .max(k.shift_residual)
                .max(k.projector_residual)
                .max(k.compressed_residual);
            Ok(())
        };
        if let Err(e) = run() {
            bad.push(format!("N={n}: {e}"));
        }
    }
    if worst > 1e-10 {
        bad.push(format!("residual {worst:.2e}"));
    }
    verdict(
        bad.is_empty(),
        format!("N = 3..20: SF2 = 1 = Toeplitz index, conjugation/Cayley residual {worst:.1e}{}", first(&bad)),
    )
}

fn ring(n: usize, mu: f64) -> KitaevConfig {
    KitaevConfig::new(n, mu, Boundary::Periodic)
}

fn c6_kitaev() -> Verdict {
    let mut bad = Vec::new();
    let alphas = [0.0, 0.2, 0.37, 0.5, 0.81, 1.0, 1.23, -0.6];
    for n in [20, 40] {
        for mu in [0.0, 0.5] {
            match symmetry_suite(n, mu, &alphas) {
                Ok(items) => {
                    for it in items.iter().filter(|i| !i.passed) {
                        bad.push(format!("N={n} mu={mu} {}: {:.2e} > {:.2e}", it.name, it.residual, it.limit));
                    }
                }
                Err(e) => bad.push(format!("suite N={n} mu={mu}: {e}")),
            }
        }
    }
    let opts = PathOptions::default();
    let flux_cases = [(20, 0.0, 1), (30, 0.3, 1), (30, 0.5, 1), (60, 0.9, 1), (30, 1.5, 0)];
    let flux: Vec<String> = flux_cases
        .par_iter()
        .filter_map(|&(n, mu, want)| match flux_sf2(&ring(n, mu), &tol(), &opts) {
            Ok(r) if r.sf2.value.value() == want => None,
            Ok(r) => Some(format!("flux N={n} mu={mu}: {}", r.sf2.value)),
            Err(e) => Some(format!("flux N={n} mu={mu}: {e}")),
        })
        .collect();
    bad.extend(flux);
    for (n, mu, want) in [(20, 0.0, 1), (40, 0.3, 1), (40, 0.5, 1), (60, 0.9, 1), (40, 1.5, 0)] {
        match defect_kernel_parity(&ring(n, mu)) {
            Ok(d) => {
                if d.value.value() != want {
                    bad.push(format!("defect N={n} mu={mu}: {}", d.value));
                }
                if mu == 0.0 && d.kernel.near_zero % 4 != 2 {
                    bad.push(format!("defect kernel at mu=0 has dimension {}", d.kernel.near_zero));
                }
            }
            Err(e) => bad.push(format!("defect N={n} mu={mu}: {e}")),
        }
    }
    let disorder: Vec<(u64, f64)> = (0..4u64).flat_map(|s| [(s, 0.0), (s, 0.5)]).collect();
    let dis: Vec<String> = disorder
        .par_iter()
        .flat_map(|&(seed, mu)| {
            let base = ring(20, mu);
            let mut out = Vec::new();
            for frac in [0.1, 0.2] {
                let cfg = base.clone().with_disorder(frac * base.bulk_gap(), seed);
                match flux_sf2(&cfg, &tol(), &opts) {
                    Ok(r) if r.sf2.value == Z2::ONE => {}
                    other => out.push(format!("disordered flux seed {seed} mu {mu}: {:?}", other.map(|r| r.sf2.value))),
                }
                match defect_kernel_parity(&cfg) {
                    Ok(d) if d.value == Z2::ONE => {}
                    other => out.push(format!("disordered defect seed {seed} mu {mu}: {:?}", other.map(|d| d.value))),
                }
            }
            out
        })
        .collect();
    bad.extend(dis);
    verdict(
        bad.is_empty(),
        format!(
            "suite at N in {{20,40}}, mu in {{0,0.5}}; flux SF2 1,1,1,1,0 at mu 0,0.3,0.5,0.9,1.5; defect parity; 16 disordered runs{}",
            first(&bad)
        ),
    )
}

/// Lattice Chern number of the lower Rice-Mele band on an `n × n` (t, k) grid.
fn chern_oracle(model: &RiceMele, n: usize) -> f64 {
    let lower = |t: f64, k: f64| -> [C64; 2] {
        let b = model.bloch(k, t);
        let d = b[0][0].re;
        let off = b[0][1];
        let e = -(d * d + off.norm_sqr()).sqrt();
        let v = if off.norm() > 1e-12 {
            [off, Complex::new(e - d, 0.0)]
        } else if d > 0.0 {
            [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)]
        } else {
            [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)]
        };
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / norm, v[1] / norm]
    };
    let tau = 2.0 * std::f64::consts::PI;
    let u: Vec<Vec<[C64; 2]>> = (0..n)
        .map(|i| (0..n).map(|j| lower(i as f64 / n as f64, tau * j as f64 / n as f64)).collect())
        .collect();
    let dot = |a: &[C64; 2], b: &[C64; 2]| a[0].conj() * b[0] + a[1].conj() * b[1];
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (&u[i][j], &u[(i + 1) % n][j]);
            let (c, d) = (&u[(i + 1) % n][(j + 1) % n], &u[i][(j + 1) % n]);
            total += (dot(a, b) * dot(b, c) * dot(c, d) * dot(d, a)).arg();
        }
    }
    total / tau
}

fn c7_polarization() -> Verdict {
    let one = RiceMele::default();
    let two = RiceMele { winding: 2, ..one };
    let gap = one.bulk_gap(0.0, 64);
    let cases = [
        (one, 0.0, Z2::ONE, 1i64),
        (one, 0.1 * gap, Z2::ONE, 1),
        (two, 0.0, Z2::ZERO, 2),
        (two, 0.1 * gap, Z2::ZERO, 2),
    ];
    let mut bad: Vec<String> = cases
        .par_iter()
        .filter_map(|&(model, lambda, sf2, pumped)| {
            let chern = chern_oracle(&model, 64).round() as i64;
            let cfg = PumpConfig {
                lambda,
                seed: 17,
                ..PumpConfig::new(model, 24)
            };
            match z2_polarization(&cfg, &tol(), &PathOptions::default()) {
                Ok(r) if r.sf2.value == sf2 && r.pumped == pumped && chern == pumped && r.bdg_flow.value == 0 => None,
                Ok(r) => Some(format!(
                    "winding {} lambda {lambda:.3}: SF2 {}, pumped {}, Chern {chern}, BdG flow {}",
                    model.winding, r.sf2.value, r.pumped, r.bdg_flow.value
                )),
                Err(e) => Some(format!("winding {} lambda {lambda:.3}: {e}", model.winding)),
            }
        })
        .collect();
    bad.sort();
    verdict(
        bad.is_empty(),
        format!("Chern 1 and 2 cycles at lambda in {{0, 0.1 gap}}: pumped charge = Chern number, SF2 = 1, 0, BdG flow 0{}", first(&bad)),
    )
}

fn c8_refusals() -> Verdict {
    let mut bad = Vec::new();
    // window radius on an eigenvalue
    let mut blocks = DMatrix::zeros(4, 4);
    blocks.view_mut((0, 0), (2, 2)).copy_from(&sigma());
    blocks.view_mut((2, 2), (2, 2)).copy_from(&(sigma() * 3.0));
    let t = SkewMatrix::new(blocks).unwrap();
    if !matches!(window_projection(&t, 1.0, &tol()), Err(Z2Error::WindowOnEigenvalue { .. })) {
        bad.push("window on eigenvalue accepted".to_string());
    }
    // endpoint kernel larger than the minimal one
    let kernel_end = OperatorPath::new(2, Smoothness::Analytic, |t| sigma() * t);
    if !matches!(sf2_path_windowed(&kernel_end, &tol()), Err(Z2Error::NonMinimalKernel { found: 2, minimal: 0 })) {
        bad.push("windowed accepted a non-minimal endpoint kernel".to_string());
    }
    if !matches!(sf2_path_phase_sum(&kernel_end, &tol()), Err(Z2Error::NonMinimalKernel { .. })) {
        bad.push("phase sum accepted a non-minimal endpoint kernel".to_string());
    }
    let far_end = OperatorPath::new(4, Smoothness::Analytic, |t| {
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(&(sigma() * (1.0 - t)));
        m.view_mut((2, 2), (2, 2)).copy_from(&(sigma() * 2.0));
        m
    });
    if !matches!(sf2_path_windowed(&far_end, &tol()), Err(Z2Error::NonMinimalKernel { .. })) {
        bad.push("kernel at t = 1 accepted".to_string());
    }
    // eigenvalue between kernel tolerance and gap ratio
    let grey = SkewMatrix::new({
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(&(sigma() * 5e-12));
        m.view_mut((2, 2), (2, 2)).copy_from(&sigma());
        m
    })
    .unwrap();
    if !matches!(eig_skew(&grey, &Tolerance::with_kernel_tol(1e-12)), Err(Z2Error::AmbiguousKernel { .. })) {
        bad.push("ambiguous kernel accepted".to_string());
    }
    // closed gaps in the models
    let open = KitaevConfig::new(10, 0.0, Boundary::OpenDirichlet);
    if !matches!(flux_sf2(&open, &tol(), &PathOptions::default()), Err(ModelError::GapClosed { .. })) {
        bad.push("flux on the open chain accepted".to_string());
    }
    let critical = ring(12, 1.0);
    if flux_sf2(&critical, &tol(), &PathOptions::default()).is_ok() {
        bad.push("flux at the critical point accepted".to_string());
    }
    let gapless = PumpConfig::new(RiceMele { delta: 0.0, m: 0.0, winding: 1 }, 8);
    if !matches!(z2_polarization(&gapless, &tol(), &PathOptions::default()), Err(ModelError::GapClosed { .. })) {
        bad.push("gapless pump accepted".to_string());
    }
    // the command line maps refusals to exit code 2
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_z2flow"))
        .args(["kitaev-flux", "--boundary", "open", "--sites", "8"])
        .output()
        .unwrap();
    if out.status.code() != Some(2) {
        bad.push(format!("command line exit code {:?}", out.status.code()));
    }
    verdict(
        bad.is_empty(),
        format!("window edge, endpoint kernels, ambiguous kernel, closed gaps, exit code 2{}", first(&bad)),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict, Duration); 8] = [
        ("1 canonical 2x2 example", c1_canonical, Duration::from_secs(1)),
        ("2 cross-algorithm agreement", c2_cross_algorithm, Duration::from_secs(120)),
        ("3 axioms", c3_axioms, Duration::from_secs(120)),
        ("4 index map on orthogonals", c4_jmap, Duration::from_secs(120)),
        ("5 circle index pairing", c5_toeplitz, Duration::from_secs(30)),
        ("6 Kitaev suite", c6_kitaev, Duration::from_secs(300)),
        ("7 Z2 polarization", c7_polarization, Duration::from_secs(180)),
        ("8 refusals", c8_refusals, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    for (name, run, budget) in criteria {
        let started = Instant::now();
        let v = run();
        let elapsed = started.elapsed();
        let in_time = elapsed <= budget;
        let passed = v.passed && in_time;
        println!(
            "criterion {name}: {} ({:.2} s of {} s) {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            v.detail
        );
        if !passed {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

//! One function per subcommand.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use z2flow::generators::{abs_2x2, block_4x4, linear_2x2, random_orthogonal, random_structure, PlantedPath};
use z2flow::ortho::{factorize, j_det, j_kernel, verify_pair_identities, KernelFormula};
use z2flow::path::{count_crossings_with, sf2_path_phase_sum_with, sf2_path_windowed_with};
use z2flow::toeplitz::{
    build_circle_pair, cayley_check, conjugation_report, sf2_conjugated, toeplitz_index_resolved,
};
use z2flow::{skew_eigenvalues, ComplexStructure, OperatorPath, OrthogonalMatrix, SF2Report, Z2Error};
use z2flow_models::io::{read_config, ModelConfig};
use z2flow_models::{
    defect_kernel_parity, flux_sf2, kitaev, z2_polarization, Boundary, KitaevConfig, PumpConfig, RiceMele,
};

use crate::report::{CliError, Outcome};
use crate::{BoundaryArg, Generator, GlobalOpts, JmapArgs, KitaevArgs, MethodArg, PolarizationArgs, Sf2PathArgs, ToeplitzArgs};

pub const SAMPLES_SCHEMA: u32 = 1;

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

fn grid(points: usize) -> Vec<f64> {
    let n = points.max(2) - 1;
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

#[derive(Debug, Deserialize)]
struct SamplesMeta {
    schema: u32,
    dim: usize,
    #[serde(default, rename = "loop")]
    is_loop: bool,
}

/// Read stacked `dim × dim` blocks with a leading `t` column.
pub fn load_samples(csv_path: &Path, sidecar: &Path) -> Result<OperatorPath, CliError> {
    let meta_text = std::fs::read_to_string(sidecar).map_err(|e| CliError::io(sidecar, e))?;
    let meta: SamplesMeta = serde_json::from_str(&meta_text)?;
    if meta.schema != SAMPLES_SCHEMA {
        return Err(CliError::Usage(format!("unsupported samples schema {}", meta.schema)));
    }
    if meta.dim == 0 {
        return Err(CliError::Usage("samples dimension must be positive".into()));
    }
    let file = std::fs::File::open(csv_path).map_err(|e| CliError::io(csv_path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let d = meta.dim;
    let mut ts = Vec::new();
    let mut mats = Vec::new();
    let mut rows: Vec<f64> = Vec::with_capacity(d * d);
    let mut block_t = f64::NAN;
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != d + 1 {
            return Err(CliError::Usage(format!(
                "samples row {}: expected {} fields, found {}",
                line + 1,
                d + 1,
                record.len()
            )));
        }
        let vals: Vec<f64> = record
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Usage(format!("samples row {}: {e}", line + 1)))?;
        if rows.is_empty() {
            block_t = vals[0];
        } else if vals[0] != block_t {
            return Err(CliError::Usage(format!("samples row {}: t changes inside a block", line + 1)));
        }
        rows.extend_from_slice(&vals[1..]);
        if rows.len() == d * d {
            ts.push(block_t);
            mats.push(DMatrix::from_row_slice(d, d, &rows));
            rows.clear();
        }
    }
    if !rows.is_empty() {
        return Err(CliError::Usage("samples end inside a block".into()));
    }
    Ok(OperatorPath::from_samples(ts, mats, meta.is_loop)?)
}

fn path_spectra(path: &OperatorPath, points: usize) -> Result<Vec<(f64, Vec<f64>)>, CliError> {
    grid(points)
        .into_iter()
        .map(|t| Ok((t, skew_eigenvalues(&path.sample(t)?))))
        .collect()
}

fn report_parts(r: &SF2Report) -> (Vec<Value>, Value) {
    let segments = r.segments.iter().map(to_value).collect();
    let mut diagnostics = to_value(&r.diagnostics);
    diagnostics["crossings"] = to_value(&r.crossings);
    (segments, diagnostics)
}

pub fn sf2_path(a: &Sf2PathArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let tol = g.tolerance()?;
    let opts = g.path_options();
    let mut expected = None;
    let path = match (a.generator, &a.samples) {
        (Some(Generator::Linear2x2), _) => linear_2x2(),
        (Some(Generator::Abs2x2), _) => abs_2x2(),
        (Some(Generator::Block4x4), _) => block_4x4(),
        (Some(Generator::Planted), _) => {
            if a.dim < 2 {
                return Err(CliError::Usage("planted paths need --dim >= 2".into()));
            }
            let p = PlantedPath::random(a.seed, a.dim, a.crossings);
            expected = Some(json!({"parity": p.expected_parity(), "crossings": p.crossings}));
            p.path()
        }
        (None, Some(file)) => {
            let sidecar = a.sidecar.clone().unwrap_or_else(|| file.with_extension("json"));
            load_samples(file, &sidecar)?
        }
        (None, None) => return Err(CliError::Usage("either --generator or --samples is required".into())),
    };
    g.note(format!("sf2-path: dim {}, loop {}", path.dim, path.is_loop));

    let run = |m: MethodArg| -> Result<SF2Report, CliError> {
        Ok(match m {
            MethodArg::Windowed | MethodArg::All => sf2_path_windowed_with(&path, &tol, &opts)?,
            MethodArg::PhaseSum => sf2_path_phase_sum_with(&path, &tol, &opts)?,
            MethodArg::Crossings => count_crossings_with(&path, &tol, &opts)?,
        })
    };
    let primary = run(a.method)?;
    let mut value = json!({"sf2": primary.value});
    let (segments, mut diagnostics) = report_parts(&primary);
    let mut failed = false;
    if a.method == MethodArg::All {
        let mut methods = json!({"windowed": primary.value});
        let mut notes = Vec::new();
        let mut agree = true;
        for (name, m) in [("phase-sum", MethodArg::PhaseSum), ("crossings", MethodArg::Crossings)] {
            match run(m) {
                Ok(r) => {
                    agree &= r.value == primary.value;
                    methods[name] = to_value(&r.value);
                }
                // methods that do not apply to this path are skipped
                Err(CliError::Core(e @ (Z2Error::NotAnalyticHint | Z2Error::OddDimension(_)))) => {
                    methods[name] = Value::Null;
                    notes.push(format!("{name}: {e}"));
                }
                Err(e) => return Err(e),
            }
        }
        value["methods"] = methods;
        value["agree"] = json!(agree);
        diagnostics["skipped"] = json!(notes);
        failed = !agree;
    }
    if let Some(e) = expected {
        value["planted"] = e;
    }
    let spectra = match g.csv {
        Some(_) => Some(path_spectra(&path, a.points)?),
        None => None,
    };
    Ok(Outcome {
        value,
        segments,
        diagnostics,
        spectra,
        failed,
    })
}

pub fn jmap(a: &JmapArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let tol = g.tolerance()?;
    if a.dim == 0 || a.dim % 2 == 1 {
        return Err(CliError::Usage(format!("--dim must be even and positive, got {}", a.dim)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut values = Vec::with_capacity(a.count);
    let mut disagreements = Vec::new();
    let mut factor_residual = 0.0_f64;
    let mut pair_residual = 0.0_f64;
    for k in 0..a.count {
        let mut m = random_orthogonal(&mut rng, a.dim).matrix().clone();
        if rng.random_bool(0.5) {
            m.column_mut(0).neg_mut();
        }
        let o = OrthogonalMatrix::new(m)?;
        let j = random_structure(&mut rng, a.dim)?;
        let d = j_det(&o);
        let mut row = vec![d];
        for f in KernelFormula::ALL {
            row.push(j_kernel(&o, &j, f, &tol)?);
        }
        let fz = factorize(&o, &j, &tol)?;
        row.push(fz.value);
        factor_residual = factor_residual.max(fz.residuals.max());
        let j1 = ComplexStructure::new(o.matrix() * j.matrix() * o.matrix().transpose())?;
        pair_residual = pair_residual.max(verify_pair_identities(&j, &j1)?.max());
        if row.iter().any(|&v| v != d) {
            disagreements.push(json!({"sample": k, "values": row}));
        }
        values.push(d);
    }
    g.note(format!("jmap: {} samples in dimension {}", a.count, a.dim));
    let odd = values.iter().filter(|v| v.is_one()).count();
    let agree = disagreements.is_empty();
    let failed = !agree || factor_residual > 1e-9 || pair_residual > 1e-10;
    Ok(Outcome {
        value: json!({"j": values, "odd": odd, "samples": a.count, "agree": agree}),
        segments: Vec::new(),
        diagnostics: json!({
            "formulas": ["det", "sum-of-structures", "anti-linear-part", "commutator", "factorization"],
            "disagreements": disagreements,
            "max_factorization_residual": factor_residual,
            "max_pair_identity_residual": pair_residual,
        }),
        spectra: None,
        failed,
    })
}

pub fn toeplitz(a: &ToeplitzArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let tol = g.tolerance()?;
    if a.sites < 2 {
        return Err(CliError::Usage("--sites must be at least 2".into()));
    }
    let pair = build_circle_pair(a.sites)?;
    let s = sf2_conjugated(&pair, &tol)?;
    let t = toeplitz_index_resolved(&pair, &tol)?;
    let conj = conjugation_report(&pair);
    let cay = cayley_check(&pair);
    g.note(format!("toeplitz: {} sites", pair.sites));
    let agree = s.defect == t.defect && s.total == t.total && s.boundary == t.boundary;
    Ok(Outcome {
        value: json!({
            "sf2": s.defect,
            "toeplitz_index": t.defect,
            "sf2_total": s.total,
            "toeplitz_total": t.total,
            "sf2_boundary": s.boundary,
            "toeplitz_boundary": t.boundary,
            "agree": agree,
        }),
        segments: Vec::new(),
        diagnostics: json!({
            "sf2_counts": s,
            "toeplitz_counts": t,
            "conjugation": conj,
            "cayley": cay,
        }),
        spectra: None,
        failed: !agree,
    })
}

fn load_model(path: &Option<PathBuf>) -> Result<Option<ModelConfig>, CliError> {
    match path {
        Some(p) => Ok(Some(read_config(p)?)),
        None => Ok(None),
    }
}

fn kitaev_config(a: &KitaevArgs) -> Result<KitaevConfig, CliError> {
    let cfg = match load_model(&a.config)? {
        Some(ModelConfig::Kitaev(c)) => c,
        Some(_) => return Err(CliError::Usage("configuration is not a kitaev model".into())),
        None => {
            let boundary = match a.boundary {
                BoundaryArg::Periodic => Boundary::Periodic,
                BoundaryArg::Open => Boundary::OpenDirichlet,
            };
            KitaevConfig::new(a.sites, a.mu, boundary).with_disorder(a.lambda, a.seed)
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn kitaev_flux(a: &KitaevArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let tol = g.tolerance()?;
    let cfg = kitaev_config(a)?;
    g.note(format!("kitaev-flux: dim {}, mu {}, lambda {}", cfg.dim(), cfg.mu, cfg.lambda));
    let r = flux_sf2(&cfg, &tol, &g.path_options())?;
    let (segments, mut diagnostics) = report_parts(&r.sf2);
    diagnostics["model"] = to_value(&ModelConfig::Kitaev(cfg.clone()));
    diagnostics["endpoint_gaps"] = json!([r.endpoint_gaps.0, r.endpoint_gaps.1]);
    diagnostics["dim"] = json!(r.dim);
    diagnostics["bulk_gap"] = json!(cfg.bulk_gap());
    let spectra = match g.csv {
        Some(_) => Some(kitaev::flux_spectrum(&cfg, &grid(a.points))?),
        None => None,
    };
    Ok(Outcome {
        value: json!({
            "sf2": r.sf2.value,
            "straight_line": r.straight_line,
            "endpoint_value": r.endpoint_value,
        }),
        segments,
        diagnostics,
        spectra,
        failed: false,
    })
}

pub fn defect(a: &KitaevArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let tol = g.tolerance()?;
    let cfg = kitaev_config(a)?;
    g.note(format!("defect: dim {}, mu {}, lambda {}", cfg.dim(), cfg.mu, cfg.lambda));
    let d = defect_kernel_parity(&cfg)?;
    let mut value = json!({"defect_parity": d.value, "zero_modes": d.kernel.near_cut});
    let mut diagnostics = json!({
        "model": ModelConfig::Kitaev(cfg.clone()),
        "kernel": d.kernel,
        "time_reversal_residual": d.time_reversal_residual,
    });
    let mut segments = Vec::new();
    let mut failed = false;
    // the open chain has end modes at integer flux, so there is no flow to compare
    if cfg.boundary == Boundary::Periodic {
        let r = flux_sf2(&cfg, &tol, &g.path_options())?;
        value["sf2"] = to_value(&r.sf2.value);
        value["agree"] = json!(r.sf2.value == d.value);
        failed = r.sf2.value != d.value;
        let (s, diag) = report_parts(&r.sf2);
        segments = s;
        diagnostics["flux"] = diag;
    } else {
        value["sf2"] = Value::Null;
    }
    let spectra = match g.csv {
        Some(_) => Some(kitaev::flux_spectrum(&cfg, &[0.5])?),
        None => None,
    };
    Ok(Outcome {
        value,
        segments,
        diagnostics,
        spectra,
        failed,
    })
}

fn pump_config(a: &PolarizationArgs) -> Result<PumpConfig, CliError> {
    let cfg = match load_model(&a.config)? {
        Some(m) => m
            .as_pump()
            .ok_or_else(|| CliError::Usage("configuration is not a pump model".into()))?,
        None => PumpConfig {
            mu_fermi: a.mu_fermi,
            lambda: a.lambda,
            seed: a.seed,
            far_edge_potential: a.far_edge,
            ..PumpConfig::new(
                RiceMele {
                    delta: a.delta,
                    m: a.m,
                    winding: a.winding,
                },
                a.cells,
            )
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn polarization(a: &PolarizationArgs, g: &GlobalOpts) -> Result<Outcome, CliError> {
    let tol = g.tolerance()?;
    let cfg = pump_config(a)?;
    g.note(format!("polarization: {} cells, winding {}, lambda {}", cfg.cells, cfg.model.winding, cfg.lambda));
    let r = z2_polarization(&cfg, &tol, &g.path_options())?;
    let (segments, mut diagnostics) = report_parts(&r.sf2);
    diagnostics["model"] = to_value(&ModelConfig::pump(&cfg));
    diagnostics["pumped_flow"] = to_value(&r.pumped_flow);
    diagnostics["bdg_flow"] = to_value(&r.bdg_flow);
    diagnostics["gap"] = json!(r.gap);
    diagnostics["gap_at"] = json!(r.gap_at);
    diagnostics["bulk_gap"] = json!(cfg.model.bulk_gap(cfg.mu_fermi, 64));
    let spectra = g.csv.as_ref().map(|_| {
        grid(a.points)
            .into_iter()
            .map(|t| {
                let mut v: Vec<f64> = SymmetricEigen::new(cfg.half_line(t)).eigenvalues.iter().copied().collect();
                v.sort_by(f64::total_cmp);
                (t, v)
            })
            .collect()
    });
    Ok(Outcome {
        value: json!({
            "sf2": r.sf2.value,
            "pumped": r.pumped,
            "pumped_mod2": r.pumped_mod2,
            "bdg_flow": r.bdg_flow.value,
            "agree": r.sf2.value == r.pumped_mod2,
        }),
        segments,
        diagnostics,
        spectra,
        failed: r.sf2.value != r.pumped_mod2,
    })
}

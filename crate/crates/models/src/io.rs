//! JSON model configurations and CSV spectra.
//!
//! A configuration file holds one model tagged by `"model"`:
//!
//! ```json
//! {"model": "kitaev", "sites": 20, "mu": 0.0, "boundary": "periodic", "lambda": 0.0, "seed": 0}
//! {"model": "pump", "model_params": {"delta": 0.5, "m": 0.5, "winding": 1}, "cells": 24}
//! ```
//!
//! Spectra are written as CSV with a leading `# schema: 1` comment and the
//! columns `t_or_alpha,eigenvalue_index,value`.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::kitaev::KitaevConfig;
use crate::pump::{PumpConfig, RiceMele};

pub const SPECTRA_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelConfig {
    Kitaev(KitaevConfig),
    Pump {
        model_params: RiceMele,
        cells: usize,
        #[serde(default)]
        mu_fermi: f64,
        #[serde(default)]
        lambda: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        far_edge_potential: Option<f64>,
    },
}

impl ModelConfig {
    pub fn pump(cfg: &PumpConfig) -> Self {
        ModelConfig::Pump {
            model_params: cfg.model,
            cells: cfg.cells,
            mu_fermi: cfg.mu_fermi,
            lambda: cfg.lambda,
            seed: cfg.seed,
            far_edge_potential: Some(cfg.far_edge_potential),
        }
    }

    pub fn as_pump(&self) -> Option<PumpConfig> {
        match *self {
            ModelConfig::Pump {
                model_params,
                cells,
                mu_fermi,
                lambda,
                seed,
                far_edge_potential,
            } => {
                let mut cfg = PumpConfig::new(model_params, cells);
                cfg.mu_fermi = mu_fermi;
                cfg.lambda = lambda;
                cfg.seed = seed;
                if let Some(v) = far_edge_potential {
                    cfg.far_edge_potential = v;
                }
                Some(cfg)
            }
            _ => None,
        }
    }
}

pub fn read_config(path: &Path) -> Result<ModelConfig> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_config(path: &Path, cfg: &ModelConfig) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(cfg)?)?;
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    t_or_alpha: f64,
    eigenvalue_index: usize,
    value: f64,
}

/// Write `(parameter, eigenvalues)` pairs.
pub fn write_spectra<W: Write>(mut out: W, spectra: &[(f64, Vec<f64>)]) -> Result<()> {
    writeln!(out, "# schema: {SPECTRA_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(out);
    for (t, values) in spectra {
        for (k, &v) in values.iter().enumerate() {
            w.serialize(Row {
                t_or_alpha: *t,
                eigenvalue_index: k,
                value: v,
            })?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read spectra written by [`write_spectra`].
pub fn read_spectra<R: Read>(input: R) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut text = String::new();
    let mut input = input;
    input.read_to_string(&mut text)?;
    let schema = text
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("# schema:"))
        .and_then(|s| s.trim().parse::<u32>().ok());
    if schema != Some(SPECTRA_SCHEMA) {
        return Err(ModelError::InvalidConfig("missing or unsupported spectra schema".into()));
    }
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out: Vec<(f64, Vec<f64>)> = Vec::new();
    for row in r.deserialize() {
        let row: Row = row?;
        match out.last_mut() {
            Some((t, v)) if *t == row.t_or_alpha && v.len() == row.eigenvalue_index => v.push(row.value),
            _ => out.push((row.t_or_alpha, vec![row.value])),
        }
    }
    Ok(out)
}

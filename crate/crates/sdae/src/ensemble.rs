//! Weighted combination of several window-based denoisers.

use std::path::PathBuf;

use sdae_core::nn::Network;
use sdae_core::windowing::{denoise_section, WindowSpec};
use sdae_core::Matrix;

use crate::error::{CoreContext, Error, Result};
use crate::format;

/// Weights may be off from summing to one by at most this much.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Default weights for the short/long window pair.
pub const DEFAULT_WEIGHTS: [f64; 2] = [0.7, 0.3];

pub fn check_weights(weights: &[f64]) -> std::result::Result<(), String> {
    if weights.is_empty() {
        return Err("no weights".into());
    }
    if let Some(w) = weights.iter().find(|w| w.is_nan() || **w < 0.0 || !w.is_finite()) {
        return Err(format!("weight {w} is negative or not finite"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(format!("weights sum to {sum}, not 1"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleMember {
    pub model: PathBuf,
    pub window: WindowSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub members: Vec<EnsembleMember>,
    pub weights: Vec<f64>,
}

impl EnsembleSpec {
    pub fn new(members: Vec<EnsembleMember>, weights: Vec<f64>) -> Result<Self> {
        if members.len() != weights.len() {
            return Err(Error::config(format!("{} weights for {} ensemble members", weights.len(), members.len())));
        }
        check_weights(&weights).map_err(|m| Error::config(format!("ensemble weights: {m}")))?;
        Ok(EnsembleSpec { members, weights })
    }

    /// Loads every member model, failing with the full list of missing files.
    pub fn load(&self) -> Result<Vec<Network>> {
        let missing: Vec<PathBuf> = self.members.iter().map(|m| m.model.clone()).filter(|p| !p.is_file()).collect();
        if !missing.is_empty() {
            return Err(Error::Missing(missing));
        }
        self.members.iter().map(|m| format::load_model(&m.model)).collect()
    }

    /// Denoises `section` with every member and combines the results.
    pub fn denoise(&self, networks: &[Network], section: &Matrix) -> Result<(Matrix, Vec<Matrix>)> {
        let outputs = self
            .members
            .iter()
            .zip(networks)
            .map(|(m, net)| {
                if net.input_dim() != m.window.patch_len() {
                    return Err(Error::config(format!(
                        "{}: model takes {} inputs, its {} x {} window has {}",
                        m.model.display(),
                        net.input_dim(),
                        m.window.patch_rows,
                        m.window.patch_cols,
                        m.window.patch_len()
                    )));
                }
                denoise_section(section, &m.window, net).context(format!("denoising with {}", m.model.display()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((combine(&outputs, &self.weights)?, outputs))
    }
}

/// `sum_k weights[k] * outputs[k]`, element by element.
pub fn combine(outputs: &[Matrix], weights: &[f64]) -> Result<Matrix> {
    check_weights(weights).map_err(|m| Error::config(format!("ensemble weights: {m}")))?;
    let first = outputs.first().ok_or_else(|| Error::config("ensemble has no outputs"))?;
    if outputs.len() != weights.len() {
        return Err(Error::config(format!("{} weights for {} outputs", weights.len(), outputs.len())));
    }
    let (rows, cols) = (first.rows(), first.cols());
    if outputs.iter().any(|o| o.rows() != rows || o.cols() != cols) {
        return Err(Error::config("ensemble outputs differ in shape"));
    }
    let mut out = vec![0.0; rows * cols];
    for (o, &w) in outputs.iter().zip(weights) {
        for (acc, v) in out.iter_mut().zip(o.as_slice()) {
            *acc += w * v;
        }
    }
    Matrix::from_vec(rows, cols, out).context("ensemble output")
}

use super::truth::GroundTruth;
use crate::error::{Error, Result};
use crate::wavelet::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Error {
    pub absolute: f64,
    /// `None` when the truth has zero norm.
    pub relative: Option<f64>,
}

/// Riemann-sum `L^1` distance between an estimate and the truth, both read
/// at the estimate's grid nodes.
pub fn l1_error(estimate: &GridFunction, truth: &GroundTruth) -> Result<L1Error> {
    if estimate.dim() != truth.dim() {
        return Err(Error::config(format!(
            "estimate is {}-dimensional, {} is {}-dimensional",
            estimate.dim(),
            truth.name(),
            truth.dim()
        )));
    }
    let reference = truth.on_grid(estimate.shape())?;
    let h = estimate.shape().cell_volume();
    let absolute = h * estimate
        .values()
        .iter()
        .zip(reference.values())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>();
    let norm = h * reference.values().iter().map(|v| v.abs()).sum::<f64>();
    Ok(L1Error {
        absolute,
        relative: (norm > 0.0).then(|| absolute / norm),
    })
}

use num::complex::Complex64;

use super::contour::{Method, PartitionResult, TimeContour};
use crate::error::{Error, Result};
use crate::opalg::{SystemKind, TensorOperator};

/// Real eigenvalues of a Hermitian operator at boson truncation `d`.
pub fn spectrum(op: &TensorOperator, d: usize) -> Result<Vec<f64>> {
    if !op.is_hermitian() {
        return Err(Error::InvalidInput(format!("{} is not Hermitian", op)));
    }
    let mut vals: Vec<f64> = if op.is_diagonal() {
        op.diagonal_values(d)?.into_iter().map(|v| v.re).collect()
    } else {
        op.to_matrix(d)?
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(vals)
}

/// `tr exp(-tau op)` on the truncated space.
pub fn exact_partition(
    op: &TensorOperator,
    contour: &TimeContour,
    d: usize,
) -> Result<PartitionResult> {
    let vals = spectrum(op, d)?;
    let tau = contour.tau();
    let value: Complex64 = vals.iter().map(|l| (-tau * l).exp()).sum();
    let has_boson = op.systems().contains(&SystemKind::Boson);
    let rounding = 1e-15
        * vals
            .iter()
            .map(|l| (-contour.beta() * l).exp())
            .sum::<f64>()
        * vals.len() as f64;
    let error_estimate = if has_boson {
        // Levels beyond the cut are estimated from the largest retained one.
        let top = vals.last().copied().unwrap_or(0.0);
        rounding + (-contour.beta() * top).exp() * vals.len() as f64
    } else {
        rounding
    };
    Ok(PartitionResult {
        value,
        method: Method::Exact,
        truncation: has_boson.then_some(d),
        cutoff: None,
        error_estimate,
    })
}

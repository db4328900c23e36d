use num::complex::Complex64;

use super::contour::{PartitionResult, TimeContour, TransferMode};
use super::exact::exact_partition;
use super::reduced::reduced_sum_partition;
use super::transfer::{extrapolate_transfer, transfer_partition, TransferSource};
use crate::dequant::{
    dequantize_extended, manifold_for, normal_symbol, symbol_in_zeta, symmetric_slicing_symbol,
};
use crate::error::Result;
use crate::opalg::TensorOperator;

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub method: String,
    pub value: Complex64,
    pub abs_err_vs_exact: f64,
    /// `arg(Z / Z_exact)`.
    pub phase_offset: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    /// Methods that do not apply to this operator, with the reason.
    pub skipped: Vec<(String, String)>,
}

fn row(name: String, r: &PartitionResult, exact: Complex64) -> ComparisonRow {
    ComparisonRow {
        method: name,
        value: r.value,
        abs_err_vs_exact: (r.value - exact).norm(),
        phase_offset: (r.value / exact).arg(),
        error_estimate: r.error_estimate,
    }
}

/// Every applicable evaluation of the partition function side by side.
pub fn slicing_compare(
    op: &TensorOperator,
    contour: &TimeContour,
    schedule: &[usize],
    d: usize,
) -> Result<ComparisonTable> {
    let exact = exact_partition(op, contour, d)?;
    let z0 = exact.value;
    let mut rows = vec![row("exact".into(), &exact, z0)];
    let mut skipped = Vec::new();
    let push = |name: String,
                r: Result<PartitionResult>,
                rows: &mut Vec<ComparisonRow>,
                skipped: &mut Vec<(String, String)>| match r {
        Ok(r) => rows.push(row(name, &r, z0)),
        Err(e) => skipped.push((name, format!("{}: {}", e.name(), e.detail()))),
    };

    let corrected = dequantize_extended(op).and_then(|ext| ext.to_spectral());
    push(
        "reduced_sum:corrected".into(),
        corrected.and_then(|p| reduced_sum_partition(&p, contour, None)),
        &mut rows,
        &mut skipped,
    );

    let local = op.local();
    let manifold = op.systems().first().map(|k| manifold_for(*k));
    match (&local, &manifold) {
        (Some(l), Some(m)) => {
            let naive = symbol_in_zeta(&normal_symbol(l), m);
            push(
                "reduced_sum:naive".into(),
                naive.and_then(|p| reduced_sum_partition(&p, contour, None)),
                &mut rows,
                &mut skipped,
            );
            let sym = symmetric_slicing_symbol(l).and_then(|s| symbol_in_zeta(&s, m));
            push(
                "reduced_sum:symmetric_slicing".into(),
                sym.and_then(|p| reduced_sum_partition(&p, contour, None)),
                &mut rows,
                &mut skipped,
            );
        }
        _ => {
            for name in ["reduced_sum:naive", "reduced_sum:symmetric_slicing"] {
                skipped.push((name.into(), "Unsupported: needs a single subsystem".into()));
            }
        }
    }

    for mode in [
        TransferMode::MatrixElementExp,
        TransferMode::MatrixElementLinear,
    ] {
        for &n in schedule {
            push(
                format!("transfer:{}:N={}", mode, n),
                transfer_partition(TransferSource::Operator(op), contour, n, d, mode),
                &mut rows,
                &mut skipped,
            );
        }
    }

    let symbol = dequantize_extended(op).map(|e| e.single_symbol());
    match (symbol, &manifold) {
        (Ok(Some(h)), Some(m)) => {
            for mode in [TransferMode::NormalKernel, TransferMode::DiagonalKernel] {
                for &n in schedule {
                    push(
                        format!("transfer:{}:N={}", mode, n),
                        transfer_partition(TransferSource::Symbol(&h, m), contour, n, d, mode),
                        &mut rows,
                        &mut skipped,
                    );
                }
            }
            if schedule.len() >= 2 {
                push(
                    format!("transfer:{}:richardson", TransferMode::DiagonalKernel),
                    extrapolate_transfer(
                        TransferSource::Symbol(&h, m),
                        contour,
                        schedule,
                        d,
                        TransferMode::DiagonalKernel,
                    ),
                    &mut rows,
                    &mut skipped,
                );
            }
        }
        _ => {
            for mode in [TransferMode::NormalKernel, TransferMode::DiagonalKernel] {
                skipped.push((
                    format!("transfer:{}", mode),
                    "Unsupported: needs a single-subsystem symbol".into(),
                ));
            }
        }
    }
    Ok(ComparisonTable { rows, skipped })
}

use num::complex::Complex64;
use rayon::prelude::*;

use super::contour::{Method, PartitionResult, TimeContour, TransferMode};
use super::exact::spectrum;
use super::quadrature::{gauss_laguerre, gauss_legendre_unit, GaussRule};
use crate::error::{Error, Result};
use crate::geom::{Manifold, ManifoldKind};
use crate::opalg::{Spin, TensorOperator};
use crate::symcore::{GaussRational, PhaseSymbol};

const QUAD_START: usize = 64;
const QUAD_MAX: usize = 4096;
const QUAD_TOL: f64 = 1e-10;

/// What a slice is built from: the operator itself (matrix-element modes) or a
/// classical symbol on a phase space (kernel modes).
#[derive(Debug, Clone, Copy)]
pub enum TransferSource<'a> {
    Operator(&'a TensorOperator),
    Symbol(&'a PhaseSymbol, &'a Manifold),
}

/// `Z_N = tr K^(N+1)` with `eps = tau / (N + 1)`.
pub fn transfer_partition(
    source: TransferSource<'_>,
    contour: &TimeContour,
    slices: usize,
    d: usize,
    mode: TransferMode,
) -> Result<PartitionResult> {
    let steps = slices + 1;
    let eps = contour.tau() / steps as f64;
    let (diag, quad_err, truncation) = match (mode, source) {
        (
            TransferMode::MatrixElementExp | TransferMode::MatrixElementLinear,
            TransferSource::Operator(op),
        ) => {
            let vals = spectrum(op, d)?;
            let k: Vec<Complex64> = if mode == TransferMode::MatrixElementExp {
                vals.iter().map(|l| (-eps * l).exp()).collect()
            } else {
                let k: Vec<Complex64> = vals
                    .iter()
                    .map(|l| Complex64::new(1.0, 0.0) - eps * l)
                    .collect();
                let unstable = |i: usize| k[i].norm() >= 1.0 && (-eps * vals[i]).exp().norm() < 1.0;
                if let Some(bad) = (0..k.len()).find(|&i| unstable(i)) {
                    return Err(Error::UnstableSlice(format!(
                        "|1 - eps*lambda| = {:.3} >= 1 for lambda = {} at N = {}",
                        k[bad].norm(),
                        vals[bad],
                        slices
                    )));
                }
                k
            };
            let has_boson = op.systems().contains(&crate::opalg::SystemKind::Boson);
            (k, vec![0.0; vals.len()], has_boson.then_some(d))
        }
        (TransferMode::NormalKernel, TransferSource::Symbol(h, m)) => {
            if m.kind() != ManifoldKind::Plane {
                return Err(Error::Unsupported(
                    "normal-ordered kernel is defined for bosons only".into(),
                ));
            }
            let k = normal_kernel_diagonal(h, eps, d)?;
            let n = k.len();
            (k, vec![0.0; n], Some(d))
        }
        (TransferMode::DiagonalKernel, TransferSource::Symbol(h, m)) => {
            let (k, e) = match m.kind() {
                ManifoldKind::Plane => plane_diagonal_kernel(h, eps, d)?,
                ManifoldKind::Sphere(s) => sphere_diagonal_kernel(h, s, eps)?,
            };
            let trunc = (m.kind() == ManifoldKind::Plane).then_some(d);
            (k, e, trunc)
        }
        (mode, _) => {
            return Err(Error::InvalidInput(format!(
                "transfer mode {} needs a different input",
                mode
            )));
        }
    };
    let value: Complex64 = diag.iter().map(|k| k.powu(steps as u32)).sum();
    let error_estimate: f64 = diag
        .iter()
        .zip(&quad_err)
        .map(|(k, e)| steps as f64 * k.norm().max(k.norm() + e).powi(slices as i32) * e)
        .sum::<f64>()
        + 1e-15
            * steps as f64
            * diag
                .iter()
                .map(|k| k.norm().powi(steps as i32))
                .sum::<f64>();
    Ok(PartitionResult {
        value,
        method: Method::Transfer { mode, slices },
        truncation,
        cutoff: None,
        error_estimate,
    })
}

/// Radial coefficients of a plane symbol `H(u)`, `u = z zb`.
fn plane_radial(h: &PhaseSymbol) -> Result<Vec<Complex64>> {
    match h.as_radial() {
        Some((c, 0)) => Ok(c.iter().map(GaussRational::to_c64).collect()),
        _ => Err(Error::Unsupported(format!(
            "{} is not a polynomial in z*zb",
            h
        ))),
    }
}

/// `<n| :exp(-eps H(ad a)): |n> = n! [x^n] exp(x - eps H(x))`.
fn normal_kernel_diagonal(h: &PhaseSymbol, eps: Complex64, d: usize) -> Result<Vec<Complex64>> {
    let hc = plane_radial(h)?;
    let mut g: Vec<Complex64> = hc.iter().map(|c| -eps * c).collect();
    if g.len() < 2 {
        g.resize(2, Complex64::new(0.0, 0.0));
    }
    g[1] += 1.0;
    // f_n = n! e_n obeys f_n = sum_j j g_j (n-1)!/(n-j)! f_(n-j)
    let mut f = vec![g[0].exp()];
    for n in 1..d {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, gj) in g.iter().enumerate().skip(1).take(n) {
            let falling: f64 = ((n - j + 1)..n).map(|x| x as f64).product();
            acc += gj * (j as f64 * falling) * f[n - j];
        }
        f.push(acc);
    }
    Ok(f)
}

fn converge<F>(rule: impl Fn(usize) -> Result<GaussRule>, integrand: F) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let integrate = |r: &GaussRule| -> Complex64 {
        r.nodes
            .iter()
            .zip(&r.weights)
            .map(|(x, w)| integrand(*x) * w)
            .sum()
    };
    let mut q = QUAD_START;
    let mut prev = integrate(&rule(q)?);
    while q < QUAD_MAX {
        q *= 2;
        let cur = integrate(&rule(q)?);
        let diff = (cur - prev).norm();
        if diff <= QUAD_TOL * cur.norm() || diff < 1e-300 {
            return Ok((cur, diff));
        }
        prev = cur;
    }
    Err(Error::QuadratureNotConverged(format!(
        "node doubling reached {} nodes",
        QUAD_MAX
    )))
}

/// `K_nn = (1/n!) int u^n e^(-u) e^(-eps H(u)) du` by generalized Gauss–Laguerre.
fn plane_diagonal_kernel(
    h: &PhaseSymbol,
    eps: Complex64,
    d: usize,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let hc = plane_radial(h)?;
    let hval = move |u: f64| {
        hc.iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * u + c)
    };
    let levels: Vec<(Complex64, f64)> = (0..d)
        .into_par_iter()
        .map(|n| converge(|q| gauss_laguerre(q, n as f64), |u| (-eps * hval(u)).exp()))
        .collect::<Result<Vec<_>>>()?;
    Ok(levels.into_iter().unzip())
}

/// `K_kk = (2s+1) C(2s,k) int_0^1 t^k (1-t)^(2s-k) e^(-eps H) dt` with
/// `t = u/(1+u)`, by Gauss–Legendre.
fn sphere_diagonal_kernel(
    h: &PhaseSymbol,
    s: Spin,
    eps: Complex64,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    if h.as_radial().is_none() {
        return Err(Error::Unsupported(format!(
            "{} is not a function of z*zb",
            h
        )));
    }
    let two_s = s.twice() as usize;
    let levels: Vec<(Complex64, f64)> = (0..=two_s)
        .into_par_iter()
        .map(|k| {
            let binom: f64 = (0..k).fold(1.0, |acc, i| acc * (two_s - i) as f64 / (i + 1) as f64);
            let pre = (two_s + 1) as f64 * binom;
            converge(gauss_legendre_unit, |t| {
                let u = t / (1.0 - t);
                let hv = h.eval(Complex64::new(u.sqrt(), 0.0));
                (-eps * hv).exp() * pre * t.powi(k as i32) * (1.0 - t).powi((two_s - k) as i32)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(levels.into_iter().unzip())
}

/// Neville extrapolation of `Z_N` to `h = 1/(N+1) -> 0`.
pub fn richardson(points: &[(f64, Complex64)]) -> (Complex64, f64) {
    let n = points.len();
    let mut table: Vec<Complex64> = points.iter().map(|p| p.1).collect();
    let mut previous_best = table[n - 1];
    for level in 1..n {
        previous_best = table[n - 1];
        for i in (level..n).rev() {
            let (hi, hj) = (points[i].0, points[i - level].0);
            table[i] = (table[i] * hj - table[i - 1] * hi) / (hj - hi);
        }
    }
    let best = table[n - 1];
    (best, (best - previous_best).norm())
}

/// Richardson limit of a transfer mode over a slice schedule.
pub fn extrapolate_transfer(
    source: TransferSource<'_>,
    contour: &TimeContour,
    schedule: &[usize],
    d: usize,
    mode: TransferMode,
) -> Result<PartitionResult> {
    if schedule.len() < 2 {
        return Err(Error::InvalidInput(
            "extrapolation needs at least two slice counts".into(),
        ));
    }
    let mut points = Vec::new();
    let mut quad = 0.0f64;
    let mut truncation = None;
    for &n in schedule {
        let r = transfer_partition(source, contour, n, d, mode)?;
        quad = quad.max(r.error_estimate);
        truncation = r.truncation;
        points.push((1.0 / (n as f64 + 1.0), r.value));
    }
    let (value, err) = richardson(&points);
    Ok(PartitionResult {
        value,
        method: Method::Extrapolated {
            mode,
            schedule: schedule.to_vec(),
        },
        truncation,
        cutoff: None,
        error_estimate: err + quad,
    })
}

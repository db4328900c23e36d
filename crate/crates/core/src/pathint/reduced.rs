use std::collections::BTreeMap;

use num::complex::Complex64;

use super::contour::{Method, PartitionResult, TimeContour};
use crate::dequant::SpectralPolynomial;
use crate::error::{Error, Result};
use crate::geom::SpectralRule;
use crate::symcore::GaussRational;

const TAIL_TOLERANCE: f64 = 1e-12;
const MAX_BOSON_INDEX: u64 = 10_000_000;

/// Univariate real polynomial, ascending coefficients.
#[derive(Debug, Clone)]
struct Poly(Vec<f64>);

impl Poly {
    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    fn degree(&self) -> usize {
        self.0.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    /// `p(x + 1) - p(x)`
    fn forward_difference(&self) -> Poly {
        let n = self.0.len();
        let mut out = vec![0.0; n.saturating_sub(1).max(1)];
        for (k, c) in self.0.iter().enumerate() {
            // (x+1)^k - x^k = sum_{i<k} C(k,i) x^i
            let mut binom = 1.0;
            for i in 0..k {
                out[i] += c * binom;
                binom = binom * (k - i) as f64 / (i + 1) as f64;
            }
        }
        Poly(out)
    }

    fn derivative(&self) -> Poly {
        let out: Vec<f64> = self
            .0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k as f64)
            .collect();
        Poly(if out.is_empty() { vec![0.0] } else { out })
    }

    /// Cauchy bound: every real root lies below `1 + max |a_i / a_n|`.
    fn root_bound(&self) -> f64 {
        let d = self.degree();
        if d == 0 {
            return 0.0;
        }
        let lead = self.0[d];
        1.0 + self.0[..d]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max)
    }
}

fn real_coefficients(terms: &BTreeMap<Vec<u32>, GaussRational>) -> Result<BTreeMap<Vec<u32>, f64>> {
    terms
        .iter()
        .map(|(k, c)| {
            if !c.is_real() {
                return Err(Error::Unsupported(format!(
                    "complex spectral coefficient {}",
                    c
                )));
            }
            Ok((k.clone(), c.to_c64().re))
        })
        .collect()
}

/// `sum exp(-tau H(m))` over the spectral ranges, with `H` given as a
/// polynomial in the spectral indices.
pub fn spectral_sum(
    index_terms: &BTreeMap<Vec<u32>, GaussRational>,
    rules: &[SpectralRule],
    contour: &TimeContour,
    cutoff: Option<u64>,
) -> Result<PartitionResult> {
    let nvars = index_terms.keys().map(|k| k.len()).max().unwrap_or(0);
    if nvars > rules.len() {
        return Err(Error::MissingRule(format!(
            "polynomial has {} variables but {} spectral rules were given",
            nvars,
            rules.len()
        )));
    }
    let coeffs = real_coefficients(index_terms)?;
    let boson_vars: Vec<usize> = (0..rules.len())
        .filter(|&j| rules[j] == SpectralRule::BosonHalfInteger)
        .collect();
    let spin_vars: Vec<(usize, Vec<f64>)> = rules
        .iter()
        .enumerate()
        .filter_map(|(j, r)| r.finite_values().map(|v| (j, v)))
        .collect();
    if !boson_vars.is_empty() && contour.beta() == 0.0 {
        return Err(Error::DivergentSum(
            "boson spectrum is unbounded and beta = 0".into(),
        ));
    }
    let tau = contour.tau();
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut used_cutoff = None;
    for spins in spin_configurations(&spin_vars) {
        // Polynomial in the boson indices once spins are fixed.
        let mut reduced: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (k, c) in &coeffs {
            let mut w = *c;
            for (j, m) in &spins {
                w *= m.powi(k.get(*j).copied().unwrap_or(0) as i32);
            }
            let key: Vec<u32> = boson_vars
                .iter()
                .map(|&j| k.get(j).copied().unwrap_or(0))
                .collect();
            *reduced.entry(key).or_insert(0.0) += w;
        }
        let (v, e, m) = match boson_vars.len() {
            0 => {
                let h = reduced.values().sum::<f64>();
                ((-tau * h).exp(), 1e-16, None)
            }
            1 => single_boson_sum(&reduced, tau, contour.beta(), cutoff)?,
            _ => multi_boson_sum(&reduced, boson_vars.len(), tau, contour.beta(), cutoff)?,
        };
        value += v;
        error += e;
        used_cutoff = used_cutoff.max(m);
    }
    Ok(PartitionResult {
        value,
        method: Method::ReducedSum,
        truncation: None,
        cutoff: used_cutoff,
        error_estimate: error,
    })
}

/// Reduced spectral sum of a classical symbol written in the spectral
/// variables: boson `zeta -> m + 1/2`, spin `zeta -> m`.
pub fn reduced_sum_partition(
    symbol: &SpectralPolynomial,
    contour: &TimeContour,
    cutoff: Option<u64>,
) -> Result<PartitionResult> {
    spectral_sum(&symbol.in_indices(), symbol.rules(), contour, cutoff)
}

fn spin_configurations(spins: &[(usize, Vec<f64>)]) -> Vec<Vec<(usize, f64)>> {
    let mut out: Vec<Vec<(usize, f64)>> = vec![Vec::new()];
    for (j, vals) in spins {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push((*j, *v));
                    p
                })
            })
            .collect();
    }
    out
}

fn single_boson_sum(
    reduced: &BTreeMap<Vec<u32>, f64>,
    tau: Complex64,
    beta: f64,
    cutoff: Option<u64>,
) -> Result<(Complex64, f64, Option<u64>)> {
    let deg = reduced.keys().map(|k| k[0] as usize).max().unwrap_or(0);
    let mut c = vec![0.0; deg + 1];
    for (k, v) in reduced {
        c[k[0] as usize] += v;
    }
    let p = Poly(c);
    if p.degree() == 0 || p.0[p.degree()] <= 0.0 {
        return Err(Error::DivergentSum(format!(
            "classical energy {:?} is not bounded below by a growing function of m",
            p.0
        )));
    }
    // Beyond `start` the increments are positive and non-decreasing.
    let diff = p.forward_difference();
    let start = diff.root_bound().max(diff.derivative().root_bound()).ceil() as u64;
    let tail_bound = |m: u64| -> f64 {
        let next = (m + 1) as f64;
        let q = (-beta * diff.eval(next)).exp();
        (-beta * p.eval(next)).exp() / (1.0 - q)
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut m = 0u64;
    loop {
        sum += (-tau * p.eval(m as f64)).exp();
        let past_cutoff = cutoff.is_none_or(|mc| m >= mc);
        if m >= start && past_cutoff && (cutoff.is_some() || tail_bound(m) < TAIL_TOLERANCE) {
            return Ok((sum, tail_bound(m), Some(m)));
        }
        m += 1;
        if m > MAX_BOSON_INDEX {
            return Err(Error::DivergentSum(
                "tail bound not reached within the index limit".into(),
            ));
        }
    }
}

fn multi_boson_sum(
    reduced: &BTreeMap<Vec<u32>, f64>,
    nb: usize,
    tau: Complex64,
    beta: f64,
    cutoff: Option<u64>,
) -> Result<(Complex64, f64, Option<u64>)> {
    // With non-negative coefficients, H(m) >= c0 + sum_i b_i m_i where b_i
    // collects the pure powers of m_i (m^k >= m on the integers).
    let mut c0 = 0.0;
    let mut b = vec![0.0; nb];
    for (k, v) in reduced {
        let nonzero: Vec<usize> = (0..nb).filter(|&i| k[i] > 0).collect();
        if nonzero.is_empty() {
            c0 += v;
            continue;
        }
        if *v < 0.0 {
            return Err(Error::Unsupported(
                "multi-boson reduced sums need non-negative coefficients".into(),
            ));
        }
        if nonzero.len() == 1 {
            b[nonzero[0]] += v;
        }
    }
    if b.iter().any(|x| *x <= 0.0) {
        return Err(Error::DivergentSum(
            "some boson index is not confined by the energy".into(),
        ));
    }
    let q: Vec<f64> = b.iter().map(|bi| (-beta * bi).exp()).collect();
    let bound = |m: u64| -> f64 {
        let full: f64 = q.iter().map(|qi| 1.0 / (1.0 - qi)).product();
        let inner: f64 = q
            .iter()
            .map(|qi| (1.0 - qi.powf(m as f64 + 1.0)) / (1.0 - qi))
            .product();
        (-beta * c0).exp() * (full - inner).max(0.0)
    };
    let mut m = cutoff.unwrap_or(0);
    if cutoff.is_none() {
        while bound(m) >= TAIL_TOLERANCE {
            m += 1;
            if m > 100_000 {
                return Err(Error::DivergentSum("tail bound not reached".into()));
            }
        }
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut idx = vec![0u64; nb];
    loop {
        let h: f64 = reduced
            .iter()
            .map(|(k, v)| {
                k.iter()
                    .zip(&idx)
                    .fold(*v, |acc, (e, x)| acc * (*x as f64).powi(*e as i32))
            })
            .sum();
        sum += (-tau * h).exp();
        let mut pos = 0;
        loop {
            if pos == nb {
                return Ok((sum, bound(m), Some(m)));
            }
            idx[pos] += 1;
            if idx[pos] <= m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

use std::collections::BTreeMap;

use num::complex::Complex64;

use crate::error::{Error, Result};
use crate::geom::{Manifold, ManifoldKind, SpectralRule};
use crate::symcore::{GaussRational, PhaseSymbol};

/// Polynomial in one spectral variable `zeta_j` per subsystem. Boson variables
/// take the values `m + 1/2`, spin variables the values `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralPolynomial {
    rules: Vec<SpectralRule>,
    terms: BTreeMap<Vec<u32>, GaussRational>,
}

fn binomial(n: u32, k: u32) -> GaussRational {
    let mut acc = GaussRational::one();
    for i in 0..k {
        acc = &(&acc * &GaussRational::from_int((n - i) as i64))
            / &GaussRational::from_int(i as i64 + 1);
    }
    acc
}

/// Coefficients of `(alpha x + beta)^n`.
fn affine_power(alpha: &GaussRational, beta: &GaussRational, n: u32) -> Vec<GaussRational> {
    (0..=n)
        .map(|i| &(&binomial(n, i) * &alpha.pow(i)) * &beta.pow(n - i))
        .collect()
}

impl SpectralPolynomial {
    pub fn new<I>(rules: Vec<SpectralRule>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, GaussRational)>,
    {
        let mut map: BTreeMap<Vec<u32>, GaussRational> = BTreeMap::new();
        for (k, c) in terms {
            assert_eq!(k.len(), rules.len(), "one exponent per subsystem");
            *map.entry(k).or_insert_with(GaussRational::zero) += &c;
        }
        map.retain(|_, c| !c.is_zero());
        Self { rules, terms: map }
    }

    pub fn univariate(rule: SpectralRule, coeffs: &[GaussRational]) -> Self {
        Self::new(
            vec![rule],
            coeffs
                .iter()
                .enumerate()
                .map(|(n, c)| (vec![n as u32], c.clone())),
        )
    }

    /// Substitutes `g_j = alpha_j zeta_j + beta_j` into `sum w prod g_j^n`.
    pub fn from_generator_powers(
        rules: Vec<SpectralRule>,
        affine: &[(GaussRational, GaussRational)],
        powers: &BTreeMap<Vec<u32>, GaussRational>,
    ) -> Self {
        let mut out: Vec<(Vec<u32>, GaussRational)> = Vec::new();
        for (k, w) in powers {
            let mut acc: Vec<(Vec<u32>, GaussRational)> = vec![(Vec::new(), w.clone())];
            for (n, (alpha, beta)) in k.iter().zip(affine) {
                let expansion = affine_power(alpha, beta, *n);
                let mut next = Vec::new();
                for (prefix, c) in &acc {
                    for (i, e) in expansion.iter().enumerate() {
                        if e.is_zero() {
                            continue;
                        }
                        let mut key = prefix.clone();
                        key.push(i as u32);
                        next.push((key, c * e));
                    }
                }
                acc = next;
            }
            out.extend(acc);
        }
        Self::new(rules, out)
    }

    pub fn rules(&self) -> &[SpectralRule] {
        &self.rules
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, GaussRational> {
        &self.terms
    }

    pub fn eval(&self, zeta: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                k.iter()
                    .zip(zeta)
                    .fold(c.to_c64(), |acc, (n, x)| acc * x.powi(*n as i32))
            })
            .sum()
    }

    /// The polynomial rewritten in the spectral indices: boson `zeta = m + 1/2`,
    /// spin `zeta = m`. Keys are exponents of `m_j`.
    pub fn in_indices(&self) -> BTreeMap<Vec<u32>, GaussRational> {
        let affine: Vec<(GaussRational, GaussRational)> = self
            .rules
            .iter()
            .map(|r| match r {
                SpectralRule::BosonHalfInteger => {
                    (GaussRational::one(), GaussRational::from_ratio(1, 2))
                }
                SpectralRule::SpinInteger(_) => (GaussRational::one(), GaussRational::zero()),
            })
            .collect();
        Self::from_generator_powers(self.rules.clone(), &affine, &self.terms).terms
    }
}

/// Univariate `zeta` polynomial of a radial symbol: on the plane
/// `zeta = z zb`; on the sphere `zeta = s (1 - z zb)/(1 + z zb) + 1/2`.
pub fn symbol_in_zeta(sym: &PhaseSymbol, m: &Manifold) -> Result<SpectralPolynomial> {
    let (num, k) = sym
        .as_radial()
        .ok_or_else(|| Error::Unsupported(format!("{} is not a function of z*zb alone", sym)))?;
    match m.kind() {
        ManifoldKind::Plane => {
            if k != 0 {
                return Err(Error::Unsupported(format!(
                    "{} is not polynomial in z*zb",
                    sym
                )));
            }
            Ok(SpectralPolynomial::univariate(
                SpectralRule::BosonHalfInteger,
                &num,
            ))
        }
        ManifoldKind::Sphere(s) => {
            if num.len() > k as usize + 1 {
                return Err(Error::Unsupported(format!(
                    "{} grows at the pole of the sphere",
                    sym
                )));
            }
            // u^i / (1+u)^k = (1 - t)^i (1 + t)^(k - i) / 2^k with t = (1 - u)/(1 + u)
            let mut t_poly = vec![GaussRational::zero(); k as usize + 1];
            let scale = GaussRational::from_int(2).pow(k).inv().expect("non-zero");
            for (i, c) in num.iter().enumerate() {
                let i = i as u32;
                let a = affine_power(&GaussRational::from_int(-1), &GaussRational::one(), i);
                let b = affine_power(&GaussRational::one(), &GaussRational::one(), k - i);
                for (p, x) in a.iter().enumerate() {
                    for (q, y) in b.iter().enumerate() {
                        t_poly[p + q] += &(&(c * x) * &(y * &scale));
                    }
                }
            }
            // t = (zeta - 1/2) / s
            let inv_s = s.value().inv().expect("positive spin");
            let beta = -(&GaussRational::from_ratio(1, 2) * &inv_s);
            let powers: BTreeMap<Vec<u32>, GaussRational> = t_poly
                .into_iter()
                .enumerate()
                .map(|(n, c)| (vec![n as u32], c))
                .collect();
            Ok(SpectralPolynomial::from_generator_powers(
                vec![SpectralRule::SpinInteger(s)],
                &[(inv_s, beta)],
                &powers,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::Spin;

    #[test]
    fn sphere_sz_symbol_is_zeta() {
        let s = Spin::from_twice(3).unwrap();
        let sym = &PhaseSymbol::from_terms([((0, 0), s.value()), ((1, 1), -s.value())], 1)
            + &PhaseSymbol::constant(GaussRational::from_ratio(1, 2));
        let p = symbol_in_zeta(&sym, &Manifold::sphere(s)).unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[&vec![1]], GaussRational::one());
    }

    #[test]
    fn plane_indices() {
        let sym = PhaseSymbol::modulus_sq();
        let p = symbol_in_zeta(&sym, &Manifold::plane()).unwrap();
        let m = p.in_indices();
        assert_eq!(m[&vec![0]], GaussRational::from_ratio(1, 2));
        assert_eq!(m[&vec![1]], GaussRational::one());
    }
}

use std::collections::BTreeMap;
use std::fmt;

use num::complex::Complex64;

use super::first_order::{dequantize_operator, Metaplectic};
use super::spectral::SpectralPolynomial;
use crate::error::{Error, Result};
use crate::geom::SpectralRule;
use crate::opalg::{
    match_generator_polynomial, BosonOperator, GeneratorTemplate, LocalOperator, SpinOperator,
    SystemKind, TensorOperator,
};
use crate::symcore::{GaussRational, PhaseSymbol};

/// The single first-order operator a subsystem's factors are polynomials in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemGenerator {
    operator: LocalOperator,
    symbol: PhaseSymbol,
    /// Set when the generator is Hermitian of the form `k ad a + c a + conj(c) ad`.
    template: Option<GeneratorTemplate>,
}

impl SubsystemGenerator {
    fn new(operator: LocalOperator) -> Result<Self> {
        let symbol = dequantize_operator(&operator, Metaplectic::On)?.symbol;
        let template = match &operator {
            LocalOperator::Boson(b) => hermitian_template(b),
            LocalOperator::Spin(_) => None,
        };
        Ok(Self {
            operator,
            symbol,
            template,
        })
    }

    fn spin(s: crate::opalg::Spin) -> Result<Self> {
        Self::new(LocalOperator::Spin(SpinOperator::sz(s)))
    }

    pub fn operator(&self) -> &LocalOperator {
        &self.operator
    }

    /// The generator's de-quantized symbol.
    pub fn symbol(&self) -> &PhaseSymbol {
        &self.symbol
    }

    pub fn kind(&self) -> SystemKind {
        self.operator.kind()
    }

    /// Coefficients `l_n` with `op = sum l_n G^n`.
    fn expand(&self, op: &LocalOperator) -> Result<Vec<GaussRational>> {
        match (op, &self.operator) {
            (LocalOperator::Spin(s), LocalOperator::Spin(_)) => Ok(if s.is_zero() {
                vec![GaussRational::zero()]
            } else {
                s.coeffs().to_vec()
            }),
            (LocalOperator::Boson(b), LocalOperator::Boson(g)) => match &self.template {
                Some(t) => match_generator_polynomial(b, t),
                None => affine_in(b, g),
            },
            _ => Err(Error::InvalidInput("subsystem kind mismatch".into())),
        }
    }

    /// `(alpha, beta)` with generator symbol `alpha * zeta + beta`, where `zeta`
    /// obeys the subsystem's spectral rule.
    pub fn spectral_affine(&self) -> Result<(GaussRational, GaussRational)> {
        match (&self.operator, &self.template) {
            (LocalOperator::Spin(_), _) => Ok((GaussRational::one(), GaussRational::zero())),
            (LocalOperator::Boson(_), Some(t)) if !t.k.is_zero() => {
                // G = k (b^+ b) + d - |c|^2/k with b = a + conj(c)/k, symbol k(zeta - 1/2) + d - |c|^2/k
                let shift = &GaussRational::from_ratio(1, 2) * &t.k;
                let disp = &GaussRational::real(t.c.norm_sqr()) / &t.k;
                Ok((t.k.clone(), &(&t.d - &shift) - &disp))
            }
            (LocalOperator::Boson(b), _) => Err(Error::Unsupported(format!(
                "generator {} has no discrete spectral rule",
                b
            ))),
        }
    }

    pub fn spectral_rule(&self) -> SpectralRule {
        match self.kind() {
            SystemKind::Boson => SpectralRule::BosonHalfInteger,
            SystemKind::Spin(s) => SpectralRule::SpinInteger(s),
        }
    }
}

fn hermitian_template(b: &BosonOperator) -> Option<GeneratorTemplate> {
    let first_order = b.terms().keys().all(|&(p, q)| p <= 1 && q <= 1);
    let k = b.coeff(1, 1);
    let c = b.coeff(0, 1);
    let d = b.coeff(0, 0);
    if first_order && k.is_real() && d.is_real() && b.coeff(1, 0) == c.conj() {
        Some(GeneratorTemplate::new(k, c, d))
    } else {
        None
    }
}

/// `op = alpha g + beta`, returned as `[beta, alpha]`.
fn affine_in(op: &BosonOperator, g: &BosonOperator) -> Result<Vec<GaussRational>> {
    let beta = op.coeff(0, 0);
    let rest = op - &BosonOperator::scalar(beta.clone());
    let Some((key, gc)) = g.terms().iter().find(|(k, _)| **k != (0, 0)) else {
        return Ok(vec![beta]);
    };
    let alpha = &rest.coeff(key.0, key.1) / gc;
    let g_core = g - &BosonOperator::scalar(g.coeff(0, 0));
    if rest != g_core.scale(&alpha) {
        return Err(Error::Unsupported(format!(
            "{} and {} are not polynomials in one commuting generator",
            op, g
        )));
    }
    let beta = &beta - &(&alpha * &g.coeff(0, 0));
    Ok(vec![beta, alpha])
}

fn is_first_order(b: &BosonOperator) -> bool {
    b.terms().keys().all(|&(p, q)| p <= 1 && q <= 1)
}

fn infer_boson_generator(slices: &[BosonOperator]) -> Result<BosonOperator> {
    let nontrivial: Vec<&BosonOperator> =
        slices.iter().filter(|b| b.as_scalar().is_none()).collect();
    let Some(first) = nontrivial.first() else {
        return Ok(BosonOperator::number());
    };
    if nontrivial.iter().all(|b| is_first_order(b)) {
        let core = *first - &BosonOperator::scalar(first.coeff(0, 0));
        let k = core.coeff(1, 1);
        let core = if !k.is_zero() && k.is_real() {
            core.scale(&k.inv().expect("non-zero"))
        } else {
            core
        };
        if nontrivial.iter().all(|b| affine_in(b, &core).is_ok()) {
            return Ok(core);
        }
        return Err(Error::Unsupported(format!(
            "{} and {} do not commute",
            first,
            nontrivial
                .iter()
                .find(|b| affine_in(b, &core).is_err())
                .expect("some slice fails")
        )));
    }
    if nontrivial.iter().all(|b| b.is_diagonal()) {
        return Ok(BosonOperator::number());
    }
    // Leading terms of (N + c a + conj(c) ad)^n are ad^n a^n + n c ad^(n-1) a^n.
    let top = nontrivial
        .iter()
        .max_by_key(|b| b.terms().keys().map(|&(p, q)| p.max(q)).max().unwrap_or(0))
        .expect("non-empty");
    let n = top
        .terms()
        .keys()
        .map(|&(p, q)| p.max(q))
        .max()
        .unwrap_or(0);
    let lead = top.coeff(n, n);
    if lead.is_zero() {
        return Err(Error::Unsupported(format!(
            "{} has no leading ad^{} a^{} term",
            top, n, n
        )));
    }
    let c = &top.coeff(n - 1, n) / &(&lead * &GaussRational::from_int(n as i64));
    Ok(BosonOperator::generator(
        &GaussRational::one(),
        &c,
        &GaussRational::zero(),
    ))
}

fn infer_generator(op: &TensorOperator, j: usize) -> Result<SubsystemGenerator> {
    match op.systems()[j] {
        SystemKind::Spin(s) => SubsystemGenerator::spin(s),
        SystemKind::Boson => {
            let slices: Vec<BosonOperator> = op
                .local_slices(j)
                .into_iter()
                .map(|l| match l {
                    LocalOperator::Boson(b) => b,
                    LocalOperator::Spin(_) => unreachable!("boson subsystem"),
                })
                .collect();
            SubsystemGenerator::new(LocalOperator::Boson(infer_boson_generator(&slices)?))
        }
    }
}

/// Classical symbol `sum_l w_l prod_j g_j^{n_lj}` over per-subsystem generator
/// symbols `g_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedSymbol {
    generators: Vec<SubsystemGenerator>,
    terms: BTreeMap<Vec<u32>, GaussRational>,
}

/// Maps every subsystem factor to its generator polynomial and multiplies the
/// per-subsystem symbols.
pub fn dequantize_extended(op: &TensorOperator) -> Result<ExtendedSymbol> {
    let generators = (0..op.systems().len())
        .map(|j| infer_generator(op, j))
        .collect::<Result<Vec<_>>>()?;
    let mut terms = BTreeMap::new();
    expand_into(
        op,
        &generators,
        Vec::new(),
        &GaussRational::one(),
        &mut terms,
    )?;
    terms.retain(|_, c: &mut GaussRational| !c.is_zero());
    Ok(ExtendedSymbol { generators, terms })
}

fn expand_into(
    op: &TensorOperator,
    gens: &[SubsystemGenerator],
    prefix: Vec<u32>,
    weight: &GaussRational,
    out: &mut BTreeMap<Vec<u32>, GaussRational>,
) -> Result<()> {
    if gens.is_empty() {
        let c = op
            .terms()
            .get(&Vec::new())
            .cloned()
            .unwrap_or_else(GaussRational::zero);
        let e = out.entry(prefix).or_insert_with(GaussRational::zero);
        *e += &(weight * &c);
        return Ok(());
    }
    let tail_systems = op.systems()[1..].to_vec();
    let mut per_power: BTreeMap<usize, TensorOperator> = BTreeMap::new();
    for (tail, local) in op.split_first() {
        for (n, l) in gens[0].expand(&local)?.into_iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            let piece = TensorOperator::from_terms(tail_systems.clone(), [(tail.clone(), l)]);
            let slot = per_power
                .entry(n)
                .or_insert_with(|| TensorOperator::zero(tail_systems.clone()));
            *slot = slot.add(&piece)?;
        }
    }
    for (n, rest) in per_power {
        let mut key = prefix.clone();
        key.push(n as u32);
        expand_into(&rest, &gens[1..], key, weight, out)?;
    }
    Ok(())
}

impl ExtendedSymbol {
    pub fn generators(&self) -> &[SubsystemGenerator] {
        &self.generators
    }

    /// Powers of the generator symbols mapped to their coefficients.
    pub fn terms(&self) -> &BTreeMap<Vec<u32>, GaussRational> {
        &self.terms
    }

    /// The symbol as a single phase-space function, for one subsystem.
    pub fn single_symbol(&self) -> Option<PhaseSymbol> {
        if self.generators.len() != 1 {
            return None;
        }
        let g = self.generators[0].symbol();
        Some(self.terms.iter().fold(PhaseSymbol::zero(), |acc, (k, c)| {
            &acc + &g.pow(k[0]).scale(c)
        }))
    }

    pub fn eval(&self, points: &[Complex64]) -> Complex64 {
        let vals: Vec<Complex64> = self
            .generators
            .iter()
            .zip(points)
            .map(|(g, z)| g.symbol().eval(*z))
            .collect();
        self.terms
            .iter()
            .map(|(k, c)| {
                k.iter()
                    .zip(&vals)
                    .fold(c.to_c64(), |acc, (n, v)| acc * v.powu(*n))
            })
            .sum()
    }

    /// Rewrites the symbol as a polynomial in the spectral variables.
    pub fn to_spectral(&self) -> Result<SpectralPolynomial> {
        let affine = self
            .generators
            .iter()
            .map(|g| g.spectral_affine())
            .collect::<Result<Vec<_>>>()?;
        let rules = self.generators.iter().map(|g| g.spectral_rule()).collect();
        Ok(SpectralPolynomial::from_generator_powers(
            rules,
            &affine,
            &self.terms,
        ))
    }

    /// Text form with variables `z1, zb1, z2, ...` for several subsystems.
    pub fn render(&self) -> String {
        if let Some(s) = self.single_symbol() {
            return s.to_string();
        }
        let factors: Vec<String> = self
            .generators
            .iter()
            .enumerate()
            .map(|(j, g)| {
                let text = g
                    .symbol()
                    .render_with(&format!("z{}", j + 1), &format!("zb{}", j + 1));
                format!("({})", text)
            })
            .collect();
        let items: Vec<(GaussRational, String)> = self
            .terms
            .iter()
            .rev()
            .map(|(k, c)| {
                let mono: Vec<String> = k
                    .iter()
                    .enumerate()
                    .filter(|(_, n)| **n > 0)
                    .map(|(j, n)| {
                        if *n == 1 {
                            factors[j].clone()
                        } else {
                            format!("{}^{}", factors[j], n)
                        }
                    })
                    .collect();
                (c.clone(), mono.join("*"))
            })
            .collect();
        crate::opalg::render_sum(&items)
    }
}

impl fmt::Display for ExtendedSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

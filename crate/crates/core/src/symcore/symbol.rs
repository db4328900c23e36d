//! Rational phase-space symbols `N(z, zb) / (1 + z zb)^k`.
//!
//! Every monomial `z^a zb^b` has a U(1) charge `q = a - b` and can be written as
//! `z^q u^j` (or `zb^-q u^j`) with `u = z zb`. Within one charge sector a symbol is
//! a rational function of `u` whose only pole is at `u = -1`, so divisibility by
//! `1 + z zb`, partial fractions and antiderivatives all reduce to univariate
//! polynomial arithmetic per sector.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::complex::Complex64;

use super::scalar::GaussRational;
use crate::error::{Error, Result};

/// Indeterminate selector for differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Z,
    Zbar,
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct PhaseSymbol {
    terms: BTreeMap<(u32, u32), GaussRational>,
    denom_power: u32,
}

/// One charge sector of a symbol in partial-fraction form:
/// `z^q * (poly(u) + sum_e fracs[e-1] / (1+u)^e)` for `q >= 0`, and the same with
/// `zb^-q` for `q < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorPart {
    pub charge: i64,
    pub poly: Vec<GaussRational>,
    pub fracs: Vec<GaussRational>,
}

type UPoly = Vec<GaussRational>;

fn sector_of(a: u32, b: u32) -> (i64, u32) {
    (a as i64 - b as i64, a.min(b))
}

fn mono_of(q: i64, j: u32) -> (u32, u32) {
    if q >= 0 {
        (q as u32 + j, j)
    } else {
        (j, j + (-q) as u32)
    }
}

fn trim(p: &mut UPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn eval_at_minus_one(p: &UPoly) -> GaussRational {
    let mut acc = GaussRational::zero();
    for (j, c) in p.iter().enumerate() {
        if j % 2 == 0 {
            acc += c;
        } else {
            acc -= c;
        }
    }
    acc
}

/// Exact quotient by `(1 + u)`; caller guarantees divisibility.
fn div_one_plus_u(p: &UPoly) -> UPoly {
    if p.is_empty() {
        return Vec::new();
    }
    let d = p.len() - 1;
    let mut m = vec![GaussRational::zero(); d];
    let mut carry = GaussRational::zero();
    for j in (1..=d).rev() {
        let mj1 = &p[j] - &carry;
        m[j - 1] = mj1.clone();
        carry = mj1;
    }
    m
}

/// `p(x + t)` by Horner's scheme.
fn shift(p: &UPoly, t: &GaussRational) -> UPoly {
    let mut out: UPoly = Vec::new();
    for c in p.iter().rev() {
        // out = out * (x + t) + c
        let mut next = vec![GaussRational::zero(); out.len() + 1];
        for (i, oc) in out.iter().enumerate() {
            next[i + 1] += oc;
            next[i] += &(oc * t);
        }
        next[0] += c;
        out = next;
    }
    trim(&mut out);
    out
}

fn mul_by_w(terms: &BTreeMap<(u32, u32), GaussRational>) -> BTreeMap<(u32, u32), GaussRational> {
    let mut out = BTreeMap::new();
    for (&(a, b), c) in terms {
        add_term(&mut out, (a, b), c.clone());
        add_term(&mut out, (a + 1, b + 1), c.clone());
    }
    out
}

fn add_term(map: &mut BTreeMap<(u32, u32), GaussRational>, key: (u32, u32), c: GaussRational) {
    if c.is_zero() {
        return;
    }
    let entry = map.entry(key).or_insert_with(GaussRational::zero);
    *entry += &c;
    if entry.is_zero() {
        map.remove(&key);
    }
}

fn to_sectors(terms: &BTreeMap<(u32, u32), GaussRational>) -> BTreeMap<i64, UPoly> {
    let mut out: BTreeMap<i64, UPoly> = BTreeMap::new();
    for (&(a, b), c) in terms {
        let (q, j) = sector_of(a, b);
        let p = out.entry(q).or_default();
        if p.len() <= j as usize {
            p.resize(j as usize + 1, GaussRational::zero());
        }
        p[j as usize] += c;
    }
    out
}

fn from_sectors(sectors: &BTreeMap<i64, UPoly>) -> BTreeMap<(u32, u32), GaussRational> {
    let mut out = BTreeMap::new();
    for (&q, p) in sectors {
        for (j, c) in p.iter().enumerate() {
            add_term(&mut out, mono_of(q, j as u32), c.clone());
        }
    }
    out
}

impl PhaseSymbol {
    /// Builds a canonical symbol from numerator terms `(a, b) -> c` meaning
    /// `c z^a zb^b`, over `(1 + z zb)^denom_power`.
    pub fn from_terms<I>(terms: I, denom_power: u32) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), GaussRational)>,
    {
        let mut map = BTreeMap::new();
        for (k, c) in terms {
            add_term(&mut map, k, c);
        }
        Self::canonical(map, denom_power)
    }

    fn canonical(mut terms: BTreeMap<(u32, u32), GaussRational>, mut k: u32) -> Self {
        terms.retain(|_, c| !c.is_zero());
        while k > 0 && !terms.is_empty() {
            let sectors = to_sectors(&terms);
            if !sectors.values().all(|p| eval_at_minus_one(p).is_zero()) {
                break;
            }
            let divided: BTreeMap<i64, UPoly> = sectors
                .iter()
                .map(|(&q, p)| (q, div_one_plus_u(p)))
                .collect();
            terms = from_sectors(&divided);
            k -= 1;
        }
        if terms.is_empty() {
            k = 0;
        }
        Self {
            terms,
            denom_power: k,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::from_terms([((0, 0), c)], 0)
    }

    pub fn one() -> Self {
        Self::constant(GaussRational::one())
    }

    pub fn z() -> Self {
        Self::monomial(GaussRational::one(), 1, 0)
    }

    pub fn zbar() -> Self {
        Self::monomial(GaussRational::one(), 0, 1)
    }

    /// `z zb`
    pub fn modulus_sq() -> Self {
        Self::monomial(GaussRational::one(), 1, 1)
    }

    pub fn monomial(c: GaussRational, a: u32, b: u32) -> Self {
        Self::from_terms([((a, b), c)], 0)
    }

    /// `1 / (1 + z zb)^k`
    pub fn inv_w_pow(k: u32) -> Self {
        Self::from_terms([((0, 0), GaussRational::one())], k)
    }

    /// `1 + z zb`
    pub fn w() -> Self {
        Self::from_terms(
            [
                ((0, 0), GaussRational::one()),
                ((1, 1), GaussRational::one()),
            ],
            0,
        )
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), GaussRational> {
        &self.terms
    }

    pub fn denom_power(&self) -> u32 {
        self.denom_power
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the symbol is constant.
    pub fn as_constant(&self) -> Option<GaussRational> {
        match self.terms.len() {
            0 => Some(GaussRational::zero()),
            1 if self.denom_power == 0 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    fn numerator_at(&self, k: u32) -> BTreeMap<(u32, u32), GaussRational> {
        let mut t = self.terms.clone();
        for _ in self.denom_power..k {
            t = mul_by_w(&t);
        }
        t
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        Self::canonical(
            self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
            self.denom_power,
        )
    }

    pub fn conj(&self) -> Self {
        Self::canonical(
            self.terms
                .iter()
                .map(|(&(a, b), v)| ((b, a), v.conj()))
                .collect(),
            self.denom_power,
        )
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, var: Var) -> Self {
        let k = self.denom_power;
        // d(N / w^k) = (dN * w - k * (dw) * N) / w^(k+1), with dw = zb or z.
        let mut dn = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            match var {
                Var::Z if a > 0 => {
                    add_term(&mut dn, (a - 1, b), c * &GaussRational::from_int(a as i64))
                }
                Var::Zbar if b > 0 => {
                    add_term(&mut dn, (a, b - 1), c * &GaussRational::from_int(b as i64))
                }
                _ => {}
            }
        }
        if k == 0 {
            return Self::canonical(dn, 0);
        }
        let mut out = mul_by_w(&dn);
        let kk = GaussRational::from_int(k as i64);
        for (&(a, b), c) in &self.terms {
            let key = match var {
                Var::Z => (a, b + 1),
                Var::Zbar => (a + 1, b),
            };
            add_term(&mut out, key, -(c * &kk));
        }
        Self::canonical(out, k + 1)
    }

    /// True iff the symbol has no `zb` dependence.
    pub fn is_holomorphic(&self) -> bool {
        self.derivative(Var::Zbar).is_zero()
    }

    /// Exact division by a symbol of the form `c * (1 + z zb)^j / (1 + z zb)^k`.
    pub fn checked_div(&self, other: &PhaseSymbol) -> Result<PhaseSymbol> {
        let (c, j) = other.as_scaled_w_power().ok_or_else(|| {
            Error::OutsideClosedFamily(format!("division by {} leaves the symbol algebra", other))
        })?;
        let inv = c
            .inv()
            .ok_or_else(|| Error::OutsideClosedFamily("division by zero symbol".into()))?;
        // self / (c w^(j - k_o)) = self * w^k_o / (c w^j)
        let num = self.numerator_at(self.denom_power + other.denom_power);
        let shifted = Self::canonical(num, self.denom_power + j);
        Ok(shifted.scale(&inv))
    }

    /// Recognises `c * (1 + z zb)^j` numerators, returning `(c, j)`.
    fn as_scaled_w_power(&self) -> Option<(GaussRational, u32)> {
        if self.is_zero() {
            return None;
        }
        let sectors = to_sectors(&self.terms);
        if sectors.len() != 1 || !sectors.contains_key(&0) {
            return None;
        }
        let mut p = sectors[&0].clone();
        let mut j = 0;
        while p.len() > 1 && eval_at_minus_one(&p).is_zero() {
            p = div_one_plus_u(&p);
            trim(&mut p);
            j += 1;
        }
        if p.len() == 1 {
            Some((p[0].clone(), j))
        } else {
            None
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(a, b), c) in &self.terms {
            acc += c.to_c64() * z.powu(a) * zb.powu(b);
        }
        let w = 1.0 + z.norm_sqr();
        acc / w.powi(self.denom_power as i32)
    }

    /// Partial-fraction decomposition in every charge sector.
    pub fn sector_parts(&self) -> Vec<SectorPart> {
        let k = self.denom_power as usize;
        let minus_one = -GaussRational::one();
        let one = GaussRational::one();
        to_sectors(&self.terms)
            .into_iter()
            .map(|(q, n)| {
                // n(u) with u = w - 1, expanded in powers of w
                let r = shift(&n, &minus_one);
                let mut poly_w: UPoly = r.iter().skip(k).cloned().collect();
                trim(&mut poly_w);
                let mut poly = shift(&poly_w, &one);
                trim(&mut poly);
                let fracs: Vec<GaussRational> = (1..=k)
                    .map(|e| r.get(k - e).cloned().unwrap_or_else(GaussRational::zero))
                    .collect();
                SectorPart {
                    charge: q,
                    poly,
                    fracs,
                }
            })
            .collect()
    }

    /// The purely holomorphic additive part: the `u^0` polynomial coefficient of
    /// every sector with non-negative charge.
    pub fn holomorphic_part(&self) -> PhaseSymbol {
        let terms = self.sector_parts().into_iter().filter_map(|part| {
            if part.charge >= 0 {
                part.poly
                    .first()
                    .cloned()
                    .map(|c| ((part.charge as u32, 0), c))
            } else {
                None
            }
        });
        PhaseSymbol::from_terms(terms, 0)
    }

    /// `F` with `dF/dzb = self`, carrying no purely holomorphic additive part.
    ///
    /// Closed family: polynomial terms `z^a zb^b`, and `z^a / (1 + z zb)^e` with
    /// `e >= 2`.
    pub fn antiderivative_dzbar(&self) -> Result<PhaseSymbol> {
        let mut acc = PhaseSymbol::zero();
        for part in self.sector_parts() {
            let q = part.charge;
            for (j, c) in part.poly.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (a, b) = mono_of(q, j as u32);
                let coeff = c / &GaussRational::from_int(b as i64 + 1);
                acc = &acc + &PhaseSymbol::monomial(coeff, a, b + 1);
            }
            for (idx, c) in part.fracs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = idx as u32 + 1;
                if q < 0 || e == 1 {
                    let desc = if q < 0 {
                        format!("zb^{} / (1 + z*zb)^{}", -q, e)
                    } else {
                        format!("z^{} / (1 + z*zb)", q)
                    };
                    return Err(Error::OutsideClosedFamily(format!(
                        "no closed-form zb-antiderivative for {}",
                        desc
                    )));
                }
                let em1 = GaussRational::from_int(e as i64 - 1);
                let term = if q >= 1 {
                    // d/dzb [ -z^(q-1) / ((e-1) w^(e-1)) ] = z^q / w^e
                    PhaseSymbol::from_terms([((q as u32 - 1, 0), -(c / &em1))], e - 1)
                } else {
                    // ((1+u)^(e-1) - 1) / ((e-1) z w^(e-1)) = zb * sum_i C(e-1,i) u^(i-1) / (...)
                    let m = e - 1;
                    let mut binom = GaussRational::one();
                    let mut terms = Vec::new();
                    for i in 1..=m {
                        binom = &(&binom * &GaussRational::from_int((m - i + 1) as i64))
                            / &GaussRational::from_int(i as i64);
                        terms.push(((i - 1, i), &(c * &binom) / &em1));
                    }
                    PhaseSymbol::from_terms(terms, m)
                };
                acc = &acc + &term;
            }
        }
        Ok(acc)
    }

    /// For charge-neutral symbols: numerator coefficients in `u = z zb` and the
    /// denominator power.
    pub fn as_radial(&self) -> Option<(Vec<GaussRational>, u32)> {
        let sectors = to_sectors(&self.terms);
        if sectors.keys().any(|&q| q != 0) {
            return None;
        }
        let mut p = sectors.get(&0).cloned().unwrap_or_default();
        trim(&mut p);
        Some((p, self.denom_power))
    }

    /// Builds a charge-neutral symbol from a polynomial in `u` over `(1+u)^k`.
    pub fn from_radial(coeffs: &[GaussRational], k: u32) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| ((j as u32, j as u32), c.clone())),
            k,
        )
    }

    /// Canonical text using the given variable names for `z` and `zb`.
    pub fn render_with(&self, z: &str, zb: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut ordered: Vec<(&(u32, u32), &GaussRational)> = self.terms.iter().collect();
        ordered.sort_by(|x, y| {
            let (a1, b1) = *x.0;
            let (a2, b2) = *y.0;
            (a2 + b2, a2).cmp(&(a1 + b1, a1))
        });
        let mut num = String::new();
        for (idx, (&(a, b), c)) in ordered.iter().enumerate() {
            let (neg, mag) = c.split_sign();
            let mono = render_mono(a, b, z, zb);
            let body = match (mono.is_empty(), mag.is_one()) {
                (true, _) => mag.to_string(),
                (false, true) => mono,
                (false, false) => format!("{}*{}", mag.factor_text(), mono),
            };
            if idx == 0 {
                if neg {
                    num.push('-');
                }
            } else {
                num.push_str(if neg { " - " } else { " + " });
            }
            num.push_str(&body);
        }
        if self.denom_power == 0 {
            return num;
        }
        let den = if self.denom_power == 1 {
            format!("(1 + {}*{})", z, zb)
        } else {
            format!("(1 + {}*{})^{}", z, zb, self.denom_power)
        };
        let lone_simple = match ordered.as_slice() {
            [(&(0, 0), c)] => c.is_simple(),
            [_] => true,
            _ => false,
        };
        if lone_simple {
            format!("{}/{}", num, den)
        } else {
            format!("({})/{}", num, den)
        }
    }
}

fn render_mono(a: u32, b: u32, z: &str, zb: &str) -> String {
    let mut parts = Vec::new();
    match a {
        0 => {}
        1 => parts.push(z.to_string()),
        _ => parts.push(format!("{}^{}", z, a)),
    }
    match b {
        0 => {}
        1 => parts.push(zb.to_string()),
        _ => parts.push(format!("{}^{}", zb, b)),
    }
    parts.join("*")
}

impl fmt::Display for PhaseSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_with("z", "zb"))
    }
}

impl fmt::Debug for PhaseSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PhaseSymbol({})", self)
    }
}

impl<'a> Add<&'a PhaseSymbol> for &'a PhaseSymbol {
    type Output = PhaseSymbol;
    fn add(self, o: &PhaseSymbol) -> PhaseSymbol {
        let k = self.denom_power.max(o.denom_power);
        let mut t = self.numerator_at(k);
        for (key, c) in o.numerator_at(k) {
            add_term(&mut t, key, c);
        }
        PhaseSymbol::canonical(t, k)
    }
}

impl<'a> Sub<&'a PhaseSymbol> for &'a PhaseSymbol {
    type Output = PhaseSymbol;
    fn sub(self, o: &PhaseSymbol) -> PhaseSymbol {
        self + &(-o)
    }
}

impl Neg for &PhaseSymbol {
    type Output = PhaseSymbol;
    fn neg(self) -> PhaseSymbol {
        self.scale(&-GaussRational::one())
    }
}

impl<'a> Mul<&'a PhaseSymbol> for &'a PhaseSymbol {
    type Output = PhaseSymbol;
    fn mul(self, o: &PhaseSymbol) -> PhaseSymbol {
        let mut t = BTreeMap::new();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &o.terms {
                add_term(&mut t, (a1 + a2, b1 + b2), c1 * c2);
            }
        }
        PhaseSymbol::canonical(t, self.denom_power + o.denom_power)
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<PhaseSymbol> for PhaseSymbol {
            type Output = PhaseSymbol;
            fn $m(self, o: PhaseSymbol) -> PhaseSymbol {
                (&self).$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for PhaseSymbol {
    type Output = PhaseSymbol;
    fn neg(self) -> PhaseSymbol {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::scalar::rat;

    fn c(n: i64, d: i64) -> GaussRational {
        GaussRational::from_ratio(n, d)
    }

    fn u() -> PhaseSymbol {
        PhaseSymbol::modulus_sq()
    }

    /// s (1 - z zb)/(1 + z zb) + 1/2
    fn spin_symbol(s: GaussRational) -> PhaseSymbol {
        let frac = (&PhaseSymbol::one() - &u()) * PhaseSymbol::inv_w_pow(1);
        &frac.scale(&s) + &PhaseSymbol::constant(c(1, 2))
    }

    #[test]
    fn add_example() {
        let s = &u() + &PhaseSymbol::constant(c(-1, 2));
        assert_eq!(s.to_string(), "z*zb - 1/2");
    }

    #[test]
    fn multiplication_cancels_denominator() {
        let p = &PhaseSymbol::inv_w_pow(1) * &PhaseSymbol::w();
        assert_eq!(p, PhaseSymbol::one());
        assert_eq!(p.denom_power(), 0);
    }

    #[test]
    fn conj_example() {
        let iz = PhaseSymbol::monomial(GaussRational::i(), 1, 0);
        assert_eq!(iz.conj(), PhaseSymbol::monomial(-GaussRational::i(), 0, 1));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(u().derivative(Var::Zbar), PhaseSymbol::z());
        assert!(PhaseSymbol::zbar().derivative(Var::Z).is_zero());
        let f = (&PhaseSymbol::one() - &u()) * PhaseSymbol::inv_w_pow(1);
        let expected = PhaseSymbol::from_terms([((1, 0), c(-2, 1))], 2);
        assert_eq!(f.derivative(Var::Zbar), expected);
    }

    #[test]
    fn antiderivative_examples() {
        assert_eq!(PhaseSymbol::z().antiderivative_dzbar().unwrap(), u());
        let s = c(3, 2);
        let g = PhaseSymbol::from_terms([((1, 0), &c(-2, 1) * &s)], 2);
        let expected = PhaseSymbol::inv_w_pow(1).scale(&(&c(2, 1) * &s));
        assert_eq!(g.antiderivative_dzbar().unwrap(), expected);
        let g = PhaseSymbol::inv_w_pow(2);
        let expected = PhaseSymbol::from_terms([((0, 1), c(1, 1))], 1);
        assert_eq!(g.antiderivative_dzbar().unwrap(), expected);
    }

    #[test]
    fn antiderivative_rejects_logarithmic_terms() {
        let err = PhaseSymbol::inv_w_pow(1)
            .antiderivative_dzbar()
            .unwrap_err();
        assert_eq!(err.name(), "OutsideClosedFamily");
        let err = PhaseSymbol::from_terms([((0, 1), c(1, 1))], 2)
            .antiderivative_dzbar()
            .unwrap_err();
        assert_eq!(err.name(), "OutsideClosedFamily");
    }

    #[test]
    fn antiderivative_higher_poles() {
        for e in 2..6 {
            for a in 0..3 {
                let g = PhaseSymbol::from_terms([((a, 0), c(1, 1))], e);
                let f = g.antiderivative_dzbar().unwrap();
                assert_eq!(f.derivative(Var::Zbar), g, "a={a} e={e}");
                assert!(f.holomorphic_part().is_zero());
            }
        }
    }

    #[test]
    fn eval_examples() {
        let s = &u() + &PhaseSymbol::constant(c(-1, 2));
        assert!((s.eval(Complex64::new(1.0, 0.0)) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let f = PhaseSymbol::inv_w_pow(1).scale(&c(2, 1));
        assert!((f.eval(Complex64::new(0.0, 0.0)) - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let f = (&PhaseSymbol::one() - &u()) * PhaseSymbol::inv_w_pow(1);
        assert!(f.eval(Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn is_real_examples() {
        assert!((&u() + &PhaseSymbol::constant(c(-1, 2))).is_real());
        assert!(!PhaseSymbol::monomial(GaussRational::i(), 1, 0).is_real());
        assert!(spin_symbol(c(5, 2)).is_real());
    }

    #[test]
    fn render_spin_symbol() {
        assert_eq!(spin_symbol(c(1, 2)).to_string(), "1/(1 + z*zb)");
        assert_eq!(
            spin_symbol(c(1, 1)).to_string(),
            "(-1/2*z*zb + 3/2)/(1 + z*zb)"
        );
        let s = PhaseSymbol::from_terms([((1, 0), GaussRational::new(rat(1, 1), rat(2, 1)))], 2);
        assert_eq!(s.to_string(), "(1+2i)*z/(1 + z*zb)^2");
        let s = PhaseSymbol::from_terms([((0, 0), GaussRational::new(rat(1, 1), rat(-1, 1)))], 1);
        assert_eq!(s.to_string(), "(1-i)/(1 + z*zb)");
    }

    #[test]
    fn zero_is_canonical() {
        let z = &u() - &u();
        assert!(z.is_zero());
        assert_eq!(z.denom_power(), 0);
        let z = &PhaseSymbol::inv_w_pow(3) - &PhaseSymbol::inv_w_pow(3);
        assert_eq!(z, PhaseSymbol::zero());
    }

    #[test]
    fn division_by_symplectic_density() {
        let omega = PhaseSymbol::inv_w_pow(2).scale(&GaussRational::imag(rat(2, 1)));
        let f = PhaseSymbol::z();
        let q = f.checked_div(&omega).unwrap();
        assert_eq!(&q * &omega, f);
        assert!(f.checked_div(&PhaseSymbol::z()).is_err());
    }

    #[test]
    fn partial_fractions_of_spin_symbol() {
        // s(1-u)/(1+u) + 1/2 = 2s/(1+u) - s + 1/2
        let parts = spin_symbol(c(1, 1)).sector_parts();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].poly, vec![c(-1, 2)]);
        assert_eq!(parts[0].fracs, vec![c(2, 1)]);
    }
}

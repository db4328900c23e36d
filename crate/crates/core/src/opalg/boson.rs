use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::symcore::GaussRational;

/// Single-mode bosonic operator stored in normal order: `sum c * ad^p a^q`,
/// keyed by `(p, q)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BosonOperator {
    terms: BTreeMap<(u32, u32), GaussRational>,
}

fn binomial(n: u32, k: u32) -> GaussRational {
    let mut acc = GaussRational::one();
    for i in 0..k {
        acc = &(&acc * &GaussRational::from_int((n - i) as i64))
            / &GaussRational::from_int(i as i64 + 1);
    }
    acc
}

fn factorial(n: u32) -> GaussRational {
    (1..=n).fold(GaussRational::one(), |acc, i| {
        &acc * &GaussRational::from_int(i as i64)
    })
}

impl BosonOperator {
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), GaussRational)>,
    {
        let mut op = Self::default();
        for (k, c) in terms {
            op.add_term(k, c);
        }
        op
    }

    fn add_term(&mut self, key: (u32, u32), c: GaussRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(GaussRational::zero);
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: GaussRational) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    pub fn identity() -> Self {
        Self::scalar(GaussRational::one())
    }

    pub fn annihilation() -> Self {
        Self::from_terms([((0, 1), GaussRational::one())])
    }

    pub fn creation() -> Self {
        Self::from_terms([((1, 0), GaussRational::one())])
    }

    pub fn number() -> Self {
        Self::from_terms([((1, 1), GaussRational::one())])
    }

    /// `k ad a + c a + conj(c) ad + d`
    pub fn generator(k: &GaussRational, c: &GaussRational, d: &GaussRational) -> Self {
        Self::from_terms([
            ((1, 1), k.clone()),
            ((0, 1), c.clone()),
            ((1, 0), c.conj()),
            ((0, 0), d.clone()),
        ])
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), GaussRational> {
        &self.terms
    }

    pub fn coeff(&self, p: u32, q: u32) -> GaussRational {
        self.terms
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(GaussRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_scalar(&self) -> Option<GaussRational> {
        match self.terms.len() {
            0 => Some(GaussRational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    /// Maximum total ladder degree `p + q`.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(p, q)| p + q).max().unwrap_or(0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.keys().all(|(p, q)| p == q)
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(&(p, q), v)| ((q, p), v.conj())))
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Commutator `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Coefficients `c_n` with `self = sum c_n N^n`, using
    /// `ad^k a^k = N (N-1) ... (N-k+1)`.
    pub fn falling_factorial_decompose(&self) -> Result<Vec<GaussRational>> {
        if !self.is_diagonal() {
            return Err(Error::NotDiagonal(self.to_string()));
        }
        let top = self.terms.keys().map(|(p, _)| *p).max().unwrap_or(0) as usize;
        let mut out = vec![GaussRational::zero(); top + 1];
        for (&(k, _), c) in &self.terms {
            // expand prod_{i<k} (N - i)
            let mut poly = vec![GaussRational::one()];
            for i in 0..k {
                let mut next = vec![GaussRational::zero(); poly.len() + 1];
                let shift = GaussRational::from_int(-(i as i64));
                for (j, pc) in poly.iter().enumerate() {
                    next[j + 1] += pc;
                    next[j] += &(pc * &shift);
                }
                poly = next;
            }
            for (j, pc) in poly.iter().enumerate() {
                out[j] += &(pc * c);
            }
        }
        while out.len() > 1 && out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        Ok(out)
    }

    /// `sum c_n N^n`, normal ordered.
    pub fn from_number_polynomial(coeffs: &[GaussRational]) -> Self {
        let n = Self::number();
        let mut acc = Self::zero();
        let mut power = Self::identity();
        for c in coeffs {
            acc = &acc + &power.scale(c);
            power = &power * &n;
        }
        acc
    }

    /// Normal-ordered product of a sequence of operators.
    pub fn normal_order(factors: &[BosonOperator]) -> Self {
        factors.iter().fold(Self::identity(), |acc, f| &acc * f)
    }

    /// Matrix element `<m| ad^p a^q |n>` in the orthonormal Fock basis.
    pub fn mono_element(p: u32, q: u32, n: usize) -> Option<(usize, f64)> {
        let q = q as usize;
        if n < q {
            return None;
        }
        let mid = n - q;
        let m = mid + p as usize;
        let mut v = 1.0f64;
        for i in (mid + 1)..=n {
            v *= (i as f64).sqrt();
        }
        for i in (mid + 1)..=m {
            v *= (i as f64).sqrt();
        }
        Some((m, v))
    }

    /// Matrix element `ad^p a^q e_n` in the unnormalised basis `e_n = ad^n |0>`.
    /// All entries are integers.
    pub fn mono_element_unnormalised(p: u32, q: u32, n: usize) -> Option<(usize, GaussRational)> {
        let q = q as usize;
        if n < q {
            return None;
        }
        let mut v = GaussRational::one();
        for i in (n - q + 1)..=n {
            v = &v * &GaussRational::from_int(i as i64);
        }
        Some((n - q + p as usize, v))
    }
}

impl<'a> Mul<&'a BosonOperator> for &'a BosonOperator {
    type Output = BosonOperator;
    fn mul(self, o: &BosonOperator) -> BosonOperator {
        // (ad^p1 a^q1)(ad^p2 a^q2) = sum_k C(q1,k) C(p2,k) k! ad^(p1+p2-k) a^(q1+q2-k)
        let mut out = BosonOperator::zero();
        for (&(p1, q1), c1) in &self.terms {
            for (&(p2, q2), c2) in &o.terms {
                let c = c1 * c2;
                for k in 0..=q1.min(p2) {
                    let w = &(&binomial(q1, k) * &binomial(p2, k)) * &factorial(k);
                    out.add_term((p1 + p2 - k, q1 + q2 - k), &c * &w);
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a BosonOperator> for &'a BosonOperator {
    type Output = BosonOperator;
    fn add(self, o: &BosonOperator) -> BosonOperator {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a BosonOperator> for &'a BosonOperator {
    type Output = BosonOperator;
    fn sub(self, o: &BosonOperator) -> BosonOperator {
        self + &(-o)
    }
}

impl Neg for &BosonOperator {
    type Output = BosonOperator;
    fn neg(self) -> BosonOperator {
        self.scale(&GaussRational::from_int(-1))
    }
}

pub(crate) fn render_ladder(p: u32, q: u32) -> String {
    let mut parts = Vec::new();
    match p {
        0 => {}
        1 => parts.push("ad".to_string()),
        _ => parts.push(format!("ad^{}", p)),
    }
    match q {
        0 => {}
        1 => parts.push("a".to_string()),
        _ => parts.push(format!("a^{}", q)),
    }
    parts.join("*")
}

/// Joins `(coefficient, monomial text)` pairs into `t1 + t2 - t3` form. An empty
/// monomial text denotes the identity.
pub(crate) fn render_sum(items: &[(GaussRational, String)]) -> String {
    if items.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (c, mono)) in items.iter().enumerate() {
        let (neg, mag) = c.split_sign();
        let body = match (mono.is_empty(), mag.is_one()) {
            (true, _) => mag.to_string(),
            (false, true) => mono.clone(),
            (false, false) => format!("{}*{}", mag.factor_text(), mono),
        };
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

impl fmt::Display for BosonOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&(u32, u32)> = self.terms.keys().collect();
        keys.sort_by_key(|k| std::cmp::Reverse((k.0 + k.1, k.0)));
        let items: Vec<(GaussRational, String)> = keys
            .into_iter()
            .map(|&(p, q)| (self.terms[&(p, q)].clone(), render_ladder(p, q)))
            .collect();
        write!(f, "{}", render_sum(&items))
    }
}

impl fmt::Debug for BosonOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BosonOperator({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussRational {
        GaussRational::from_int(n)
    }

    #[test]
    fn commutator_definition() {
        let a = BosonOperator::annihilation();
        let ad = BosonOperator::creation();
        let prod = &a * &ad;
        assert_eq!(
            prod,
            BosonOperator::from_terms([((1, 1), g(1)), ((0, 0), g(1))])
        );
        assert_eq!(a.commutator(&ad), BosonOperator::identity());
    }

    #[test]
    fn number_squared() {
        let n = BosonOperator::number();
        assert_eq!(
            &n * &n,
            BosonOperator::from_terms([((2, 2), g(1)), ((1, 1), g(1))])
        );
    }

    #[test]
    fn annihilation_times_number() {
        let a = BosonOperator::annihilation();
        let n = BosonOperator::number();
        assert_eq!(
            &a * &n,
            BosonOperator::from_terms([((1, 2), g(1)), ((0, 1), g(1))])
        );
    }

    #[test]
    fn falling_factorials() {
        let op = BosonOperator::from_terms([((2, 2), g(1))]);
        assert_eq!(
            op.falling_factorial_decompose().unwrap(),
            vec![g(0), g(-1), g(1)]
        );
        assert_eq!(
            BosonOperator::number()
                .falling_factorial_decompose()
                .unwrap(),
            vec![g(0), g(1)]
        );
        assert_eq!(
            BosonOperator::identity()
                .falling_factorial_decompose()
                .unwrap(),
            vec![g(1)]
        );
        let err = BosonOperator::annihilation()
            .falling_factorial_decompose()
            .unwrap_err();
        assert_eq!(err.name(), "NotDiagonal");
    }

    #[test]
    fn render() {
        let op = BosonOperator::from_terms([
            ((2, 2), g(2)),
            ((1, 1), g(3)),
            ((0, 0), GaussRational::from_ratio(-1, 2)),
        ]);
        assert_eq!(op.to_string(), "2*ad^2*a^2 + 3*ad*a - 1/2");
    }
}

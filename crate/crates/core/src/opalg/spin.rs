use std::fmt;

use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};

use super::boson::render_sum;
use crate::error::{Error, Result};
use crate::symcore::GaussRational;

/// Spin representation label `s`, stored as the positive integer `2s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidInput("spin label must be positive".into()));
        }
        Ok(Self { twice })
    }

    /// Accepts exact rationals `s` with `2s` a positive integer.
    pub fn from_rational(s: &BigRational) -> Result<Self> {
        let twice = s * BigRational::from_integer(BigInt::from(2));
        if !twice.is_integer() {
            return Err(Error::InvalidInput(format!(
                "spin {} is not a half-integer",
                s
            )));
        }
        let t: u32 = twice
            .numer()
            .try_into()
            .map_err(|_| Error::InvalidInput(format!("spin {} out of range", s)))?;
        Self::from_twice(t)
    }

    pub fn twice(&self) -> u32 {
        self.twice
    }

    pub fn value(&self) -> GaussRational {
        GaussRational::from_ratio(self.twice as i64, 2)
    }

    pub fn as_f64(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.twice as usize + 1
    }

    /// Eigenvalues `m` of `Sz` in the basis ordering `m = s, s-1, ..., -s`, as `2m`.
    pub fn twice_m_values(&self) -> impl Iterator<Item = i64> + '_ {
        (0..=self.twice).map(move |k| self.twice as i64 - 2 * k as i64)
    }

    pub fn m_values(&self) -> Vec<GaussRational> {
        self.twice_m_values()
            .map(|t| GaussRational::from_ratio(t, 2))
            .collect()
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Polynomial `sum_j c_j Sz^j` in the spin-`s` representation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinOperator {
    spin: Spin,
    coeffs: Vec<GaussRational>,
}

impl SpinOperator {
    pub fn new(spin: Spin, mut coeffs: Vec<GaussRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { spin, coeffs }
    }

    pub fn sz(spin: Spin) -> Self {
        Self::new(spin, vec![GaussRational::zero(), GaussRational::one()])
    }

    pub fn scalar(spin: Spin, c: GaussRational) -> Self {
        Self::new(spin, vec![c])
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.spin, self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    /// Diagonal entry for eigenvalue `m`.
    pub fn value_at(&self, m: &GaussRational) -> GaussRational {
        let mut acc = GaussRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * m) + c;
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self
                    .coeffs
                    .get(i)
                    .cloned()
                    .unwrap_or_else(GaussRational::zero);
                let b = other
                    .coeffs
                    .get(i)
                    .cloned()
                    .unwrap_or_else(GaussRational::zero);
                &a + &b
            })
            .collect();
        Ok(Self::new(self.spin, coeffs))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::new(self.spin, vec![]));
        }
        let mut coeffs = vec![GaussRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += &(a * b);
            }
        }
        Ok(Self::new(self.spin, coeffs))
    }

    pub fn scale(&self, c: &GaussRational) -> Self {
        Self::new(self.spin, self.coeffs.iter().map(|x| x * c).collect())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.spin != other.spin {
            return Err(Error::InvalidInput(format!(
                "spin labels differ: {} vs {}",
                self.spin, other.spin
            )));
        }
        Ok(())
    }
}

pub(crate) fn render_sz_power(spin: Spin, j: usize) -> String {
    match j {
        0 => String::new(),
        1 => format!("Sz{{s={}}}", spin),
        _ => format!("Sz{{s={}}}^{}", spin, j),
    }
}

impl fmt::Display for SpinOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<(GaussRational, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (c.clone(), render_sz_power(self.spin, j)))
            .collect();
        write!(f, "{}", render_sum(&items))
    }
}

impl fmt::Debug for SpinOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinOperator({})", self)
    }
}

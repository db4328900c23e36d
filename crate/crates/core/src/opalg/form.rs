use std::fmt;

use super::boson::BosonOperator;
use super::spin::SpinOperator;
use super::tensor::LocalOperator;
use crate::symcore::{GaussRational, PhaseSymbol, Var};

/// Differential operator `sum_k coeffs[k] * d^k/dz^k` acting on holomorphic
/// wavefunctions.
#[derive(Clone, PartialEq, Eq)]
pub struct DifferentialForm {
    coeffs: Vec<PhaseSymbol>,
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

impl DifferentialForm {
    pub fn new(mut coeffs: Vec<PhaseSymbol>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// First-order form `c * d/dz + v`.
    pub fn first_order(c: PhaseSymbol, v: PhaseSymbol) -> Self {
        Self::new(vec![v, c])
    }

    pub fn multiplication(v: PhaseSymbol) -> Self {
        Self::new(vec![v])
    }

    pub fn derivative() -> Self {
        Self::first_order(PhaseSymbol::one(), PhaseSymbol::zero())
    }

    pub fn identity() -> Self {
        Self::multiplication(PhaseSymbol::one())
    }

    pub fn zero() -> Self {
        Self::new(vec![])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> PhaseSymbol {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(PhaseSymbol::zero)
    }

    pub fn coeffs(&self) -> &[PhaseSymbol] {
        &self.coeffs
    }

    /// Coefficient of `d/dz`.
    pub fn c(&self) -> PhaseSymbol {
        self.coeff(1)
    }

    /// Multiplication part.
    pub fn v(&self) -> PhaseSymbol {
        self.coeff(0)
    }

    /// True when every coefficient depends on `z` only.
    pub fn is_holomorphic(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_holomorphic())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&GaussRational::from_int(-1)))
    }

    pub fn scale(&self, s: &GaussRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.scale(s)).collect())
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut out = vec![PhaseSymbol::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                // d^k (b d^j) = sum_i C(k,i) (d^i b) d^(k-i+j)
                let mut db = b.clone();
                for i in 0..=k {
                    if db.is_zero() {
                        break;
                    }
                    let w = GaussRational::from_int(binomial(k, i));
                    let term = &(a * &db).scale(&w);
                    out[k - i + j] = &out[k - i + j] + term;
                    db = db.derivative(Var::Z);
                }
            }
        }
        Self::new(out)
    }

    /// `self ∘ other - other ∘ self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::identity(), |acc, _| acc.compose(self))
    }

    /// Applies the form to a holomorphic symbol.
    pub fn apply(&self, f: &PhaseSymbol) -> PhaseSymbol {
        let mut out = PhaseSymbol::zero();
        let mut df = f.clone();
        for c in &self.coeffs {
            out = &out + &(c * &df);
            df = df.derivative(Var::Z);
        }
        out
    }
}

/// Form induced by the action on the holomorphic coherent states: `a -> z`,
/// `ad -> d/dz`, `Sz -> -z d/dz + s`. Products compose in reverse order, so
/// `ad^p a^q -> z^q d^p/dz^p`.
pub fn coordinate_form(op: &LocalOperator) -> DifferentialForm {
    match op {
        LocalOperator::Boson(b) => boson_form(b),
        LocalOperator::Spin(s) => spin_form(s),
    }
}

fn boson_form(op: &BosonOperator) -> DifferentialForm {
    let mut acc = DifferentialForm::zero();
    for (&(p, q), c) in op.terms() {
        let mut coeffs = vec![PhaseSymbol::zero(); p as usize + 1];
        coeffs[p as usize] = PhaseSymbol::monomial(c.clone(), q, 0);
        acc = acc.add(&DifferentialForm::new(coeffs));
    }
    acc
}

fn spin_form(op: &SpinOperator) -> DifferentialForm {
    let sz = DifferentialForm::first_order(
        PhaseSymbol::monomial(GaussRational::from_int(-1), 1, 0),
        PhaseSymbol::constant(op.spin().value()),
    );
    let mut acc = DifferentialForm::zero();
    let mut power = DifferentialForm::identity();
    for c in op.coeffs() {
        acc = acc.add(&power.scale(c));
        power = power.compose(&sz);
    }
    acc
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let text = c.to_string();
            let coeff = if text.contains(' ') {
                format!("({})", text)
            } else {
                text
            };
            parts.push(match k {
                0 => coeff,
                1 => format!("{}*dz", coeff),
                _ => format!("{}*dz^{}", coeff, k),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DifferentialForm({})", self)
    }
}

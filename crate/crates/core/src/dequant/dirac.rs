use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num::complex::Complex64;

use super::first_order::quantize;
use crate::error::Result;
use crate::geom::{poisson_bracket, Manifold};
use crate::opalg::{BosonOperator, DifferentialForm};
use crate::symcore::{GaussRational, PhaseSymbol};

/// Commutator of the operators behind two coordinate forms. Forms compose in
/// reverse, so `form([A, B]) = form(B)∘form(A) - form(A)∘form(B)`.
pub fn operator_commutator(a: &DifferentialForm, b: &DifferentialForm) -> DifferentialForm {
    b.compose(a).sub(&a.compose(b))
}

/// `[Q(f), Q(g)] = i Q({f, g})`.
pub fn check_dirac_bracket(f: &PhaseSymbol, g: &PhaseSymbol, m: &Manifold) -> Result<bool> {
    let qf = quantize(f, m)?;
    let qg = quantize(g, m)?;
    let bracket = poisson_bracket(f, g, m)?;
    let rhs = quantize(&bracket, m)?.scale(&GaussRational::i());
    Ok(operator_commutator(&qf, &qg) == rhs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GvhReport {
    pub quadratic_homomorphism_ok: bool,
    pub cubic_difference: BosonOperator,
    pub residual_is_scalar: bool,
    pub residual_value: GaussRational,
}

/// Polynomial in the rescaled phase-space coordinates `X = sqrt(2) x`,
/// `P = sqrt(2) p`, keyed by `(deg X, deg P)`. In these coordinates
/// `{X, P} = 2` and `X -> a + ad`, `P -> i(ad - a)`, all exact.
type XpPoly = BTreeMap<(u32, u32), GaussRational>;

fn x_op() -> BosonOperator {
    &BosonOperator::annihilation() + &BosonOperator::creation()
}

fn p_op() -> BosonOperator {
    (&BosonOperator::creation() - &BosonOperator::annihilation()).scale(&GaussRational::i())
}

fn xp_bracket(f: &XpPoly, g: &XpPoly) -> XpPoly {
    let mut out = XpPoly::new();
    let two = GaussRational::from_int(2);
    for (&(i1, j1), c1) in f {
        for (&(i2, j2), c2) in g {
            // 2 (df/dX dg/dP - df/dP dg/dX)
            if i1 > 0 && j2 > 0 {
                let w = GaussRational::from_int((i1 * j2) as i64);
                *out.entry((i1 + i2 - 1, j1 + j2 - 1))
                    .or_insert_with(GaussRational::zero) += &(&(&(c1 * c2) * &w) * &two);
            }
            if j1 > 0 && i2 > 0 {
                let w = GaussRational::from_int((j1 * i2) as i64);
                *out.entry((i1 + i2 - 1, j1 + j2 - 1))
                    .or_insert_with(GaussRational::zero) -= &(&(&(c1 * c2) * &w) * &two);
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Symmetric quantization on polynomials of degree at most two.
fn quadratic_quantize(f: &XpPoly) -> BosonOperator {
    let x = x_op();
    let p = p_op();
    let mut acc = BosonOperator::zero();
    for (&(i, j), c) in f {
        let op = match (i, j) {
            (0, 0) => BosonOperator::identity(),
            (1, 0) => x.clone(),
            (0, 1) => p.clone(),
            (2, 0) => &x * &x,
            (0, 2) => &p * &p,
            (1, 1) => (&(&x * &p) + &(&p * &x)).scale(&GaussRational::from_ratio(1, 2)),
            _ => unreachable!("degree above two"),
        };
        acc = &acc + &op.scale(c);
    }
    acc
}

fn quadratic_basis() -> Vec<XpPoly> {
    [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]
        .into_iter()
        .map(|k| XpPoly::from([(k, GaussRational::one())]))
        .collect()
}

fn cubic_residual_xp() -> BosonOperator {
    let x = x_op();
    let p = p_op();
    let x2 = &x * &x;
    let p2 = &p * &p;
    let x3 = &x2 * &x;
    let p3 = &p2 * &p;
    let left = x3.commutator(&p3).scale(&GaussRational::from_ratio(1, 3));
    let a = &(&x2 * &p) + &(&p * &x2);
    let b = &(&x * &p2) + &(&p2 * &x);
    let right = a.commutator(&b).scale(&GaussRational::from_ratio(1, 4));
    &left - &right
}

/// Checks the quadratic homomorphism and computes
/// `(1/3)[x^3, p^3] - (1/4)[x^2 p + p x^2, x p^2 + p^2 x]` by exact normal ordering.
pub fn gvh_obstruction() -> GvhReport {
    let basis = quadratic_basis();
    let mut quadratic_ok = true;
    for f in &basis {
        for g in &basis {
            let lhs = quadratic_quantize(f).commutator(&quadratic_quantize(g));
            let rhs = quadratic_quantize(&xp_bracket(f, g)).scale(&GaussRational::i());
            quadratic_ok &= lhs == rhs;
        }
    }
    // six factors of X, P each carry 1/sqrt(2)
    let cubic_difference = cubic_residual_xp().scale(&GaussRational::from_ratio(1, 8));
    let scalar = cubic_difference.as_scalar();
    GvhReport {
        quadratic_homomorphism_ok: quadratic_ok,
        residual_is_scalar: scalar.is_some(),
        residual_value: scalar.unwrap_or_else(GaussRational::zero),
        cubic_difference,
    }
}

/// Builds the same residual from truncated `d x d` position and momentum
/// matrices and returns the largest deviation from `value * I` on the leading
/// `d - guard` block.
pub fn gvh_matrix_deviation(d: usize, guard: usize, value: Complex64) -> f64 {
    let mut a = DMatrix::<Complex64>::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let x = (&a + &ad) * Complex64::new(r, 0.0);
    let p = (&ad - &a) * Complex64::new(0.0, r);
    let comm = |u: &DMatrix<Complex64>, v: &DMatrix<Complex64>| u * v - v * u;
    let x2 = &x * &x;
    let p2 = &p * &p;
    let left = comm(&(&x2 * &x), &(&p2 * &p)) / Complex64::new(3.0, 0.0);
    let ua = &x2 * &p + &p * &x2;
    let ub = &x * &p2 + &p2 * &x;
    let right = comm(&ua, &ub) / Complex64::new(4.0, 0.0);
    let res = left - right;
    let keep = d - guard;
    let mut worst: f64 = 0.0;
    for i in 0..keep {
        for j in 0..keep {
            let target = if i == j {
                value
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((res[(i, j)] - target).norm());
        }
    }
    worst
}

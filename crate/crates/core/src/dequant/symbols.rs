use crate::error::{Error, Result};
use crate::opalg::{coordinate_form, LocalOperator, SystemKind};
use crate::symcore::{solve_exact, GaussRational, LinearSolution, PhaseSymbol};

fn factorial(n: u32) -> GaussRational {
    (1..=n).fold(GaussRational::one(), |acc, i| {
        &acc * &GaussRational::from_int(i as i64)
    })
}

fn binomial(n: u32, k: u32) -> GaussRational {
    &factorial(n) / &(&factorial(k) * &factorial(n - k))
}

/// `<z|op|z> / <z|z>`. With coordinate form `sum_k c_k(z) d^k`, the overlap
/// `e^(zb z)` gives `sum c_k zb^k`, and `(1 + zb z)^(2s)` gives
/// `sum c_k (2s)(2s-1)...(2s-k+1) zb^k / (1 + z zb)^k`.
pub fn normal_symbol(op: &LocalOperator) -> PhaseSymbol {
    let form = coordinate_form(op);
    let mut acc = PhaseSymbol::zero();
    for (k, c) in form.coeffs().iter().enumerate() {
        let k = k as u32;
        let factor = match op.kind() {
            SystemKind::Boson => PhaseSymbol::monomial(GaussRational::one(), 0, k),
            SystemKind::Spin(s) => {
                let twice = s.twice();
                let falling = if k > twice {
                    GaussRational::zero()
                } else {
                    &factorial(twice) / &factorial(twice - k)
                };
                PhaseSymbol::from_terms([((0, k), falling)], k)
            }
        };
        acc = &acc + &(c * &factor);
    }
    acc
}

/// Diagonal entries of `op` in its number / `Sz` eigenbasis (basis index `n`
/// for bosons, `k` with `m = s - k` for spins), exactly.
fn diagonal_entry(op: &LocalOperator, n: u32) -> Result<GaussRational> {
    match op {
        LocalOperator::Boson(b) => {
            let coeffs = b.falling_factorial_decompose()?;
            let x = GaussRational::from_int(n as i64);
            Ok(coeffs
                .iter()
                .rev()
                .fold(GaussRational::zero(), |acc, c| &(&acc * &x) + c))
        }
        LocalOperator::Spin(s) => {
            let m = &s.spin().value() - &GaussRational::from_int(n as i64);
            Ok(s.value_at(&m))
        }
    }
}

/// The symbol `H` whose coherent-state superposition `int |z> H <z| dmu`
/// equals `op`, for operators diagonal in the number (or `Sz`) basis.
///
/// Plane: ansatz `sum h_k (z zb)^k`, with moments `(n+k)!/n!`.
/// Sphere: ansatz `sum h_j t^j`, `t = z zb / (1 + z zb)`, with Beta moments.
pub fn symmetric_slicing_symbol(op: &LocalOperator) -> Result<PhaseSymbol> {
    match op {
        LocalOperator::Boson(b) => {
            let degree = b.falling_factorial_decompose()?.len().saturating_sub(1) as u32;
            let unknowns = degree as usize + 1;
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for n in 0..=degree + 2 {
                rows.push(
                    (0..=degree)
                        .map(|k| &factorial(n + k) / &factorial(n))
                        .collect(),
                );
                rhs.push(diagonal_entry(op, n)?);
            }
            let h = solved(solve_exact(rows, rhs, unknowns), op)?;
            Ok(PhaseSymbol::from_radial(&h, 0))
        }
        LocalOperator::Spin(sop) => {
            let two_s = sop.spin().twice();
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for k in 0..=two_s {
                let pre = &GaussRational::from_int(two_s as i64 + 1) * &binomial(two_s, k);
                rows.push(
                    (0..=two_s)
                        .map(|j| {
                            let beta = &(&factorial(k + j) * &factorial(two_s - k))
                                / &factorial(two_s + j + 1);
                            &pre * &beta
                        })
                        .collect(),
                );
                rhs.push(diagonal_entry(op, k)?);
            }
            let h = solved(solve_exact(rows, rhs, two_s as usize + 1), op)?;
            // sum h_j u^j (1+u)^(J-j) / (1+u)^J
            let j_max = two_s;
            let mut acc = PhaseSymbol::zero();
            for (j, c) in h.iter().enumerate() {
                let j = j as u32;
                let num = &PhaseSymbol::modulus_sq().pow(j) * &PhaseSymbol::w().pow(j_max - j);
                acc = &acc + &num.scale(c);
            }
            Ok(&acc * &PhaseSymbol::inv_w_pow(j_max))
        }
    }
}

fn solved(sol: LinearSolution, op: &LocalOperator) -> Result<Vec<GaussRational>> {
    match sol {
        LinearSolution::Solved { x, unique: true } => Ok(x),
        _ => Err(Error::NoSolution(op.to_string())),
    }
}

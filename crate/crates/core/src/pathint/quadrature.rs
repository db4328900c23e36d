use crate::error::{Error, Result};

/// Nodes and weights of a Gauss rule whose weights sum to one.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Implicit QL on a symmetric tridiagonal matrix, tracking only the first
/// component of each eigenvector. `diag` becomes the eigenvalues; `off[i]`
/// couples `i` and `i + 1`.
fn tridiagonal_eigen(diag: &mut [f64], off: &mut [f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut z0 = vec![0.0; n];
    if n == 0 {
        return Ok(z0);
    }
    z0[0] = 1.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::QuadratureNotConverged(
                    "tridiagonal QL iteration limit".into(),
                ));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let t = z0[i + 1];
                z0[i + 1] = s * z0[i] + c * t;
                z0[i] = c * z0[i] - s * t;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(z0)
}

fn golub_welsch(mut diag: Vec<f64>, mut off: Vec<f64>) -> Result<GaussRule> {
    off.push(0.0);
    let z0 = tridiagonal_eigen(&mut diag, &mut off)?;
    let mut pairs: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(z0.into_iter().map(|v| v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    let (nodes, weights) = pairs.into_iter().unzip();
    Ok(GaussRule { nodes, weights })
}

/// Generalized Gauss–Laguerre rule for the weight `x^alpha e^(-x) / Gamma(alpha + 1)`.
pub fn gauss_laguerre(q: usize, alpha: f64) -> Result<GaussRule> {
    let diag = (0..q).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
    let off = (1..q)
        .map(|k| (k as f64 * (k as f64 + alpha)).sqrt())
        .collect();
    golub_welsch(diag, off)
}

/// Gauss–Legendre rule on `[0, 1]` with unit total weight.
pub fn gauss_legendre_unit(q: usize) -> Result<GaussRule> {
    let diag = vec![0.0; q];
    let off = (1..q)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let rule = golub_welsch(diag, off)?;
    Ok(GaussRule {
        nodes: rule.nodes.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: rule.weights,
    })
}

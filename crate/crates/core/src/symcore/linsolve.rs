use super::GaussRational;

/// Outcome of an exact Gaussian elimination.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearSolution {
    /// A solution (free variables set to zero) and whether it is unique.
    Solved {
        x: Vec<GaussRational>,
        unique: bool,
    },
    Inconsistent,
}

/// Solves `rows * x = rhs` exactly over the Gaussian rationals.
pub fn solve_exact(
    mut rows: Vec<Vec<GaussRational>>,
    mut rhs: Vec<GaussRational>,
    n: usize,
) -> LinearSolution {
    let m = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..m).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        rhs.swap(r, p);
        let inv = rows[r][col].inv().expect("non-zero pivot");
        for j in col..n {
            rows[r][j] = &rows[r][j] * &inv;
        }
        rhs[r] = &rhs[r] * &inv;
        for i in 0..m {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let f = rows[i][col].clone();
            for j in col..n {
                let t = &f * &rows[r][j];
                rows[i][j] -= &t;
            }
            let t = &f * &rhs[r];
            rhs[i] -= &t;
        }
        pivots.push(col);
        r += 1;
        if r == m {
            break;
        }
    }
    if rhs[r..].iter().any(|v| !v.is_zero()) {
        return LinearSolution::Inconsistent;
    }
    let mut x = vec![GaussRational::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rhs[i].clone();
    }
    LinearSolution::Solved {
        unique: pivots.len() == n,
        x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussRational {
        GaussRational::from_int(n)
    }

    #[test]
    fn solves_square_system() {
        // x + y = 3, x - y = 1
        let rows = vec![vec![g(1), g(1)], vec![g(1), g(-1)]];
        let sol = solve_exact(rows, vec![g(3), g(1)], 2);
        assert_eq!(
            sol,
            LinearSolution::Solved {
                x: vec![g(2), g(1)],
                unique: true
            }
        );
    }

    #[test]
    fn detects_inconsistency() {
        let rows = vec![vec![g(1)], vec![g(2)]];
        assert_eq!(
            solve_exact(rows, vec![g(1), g(3)], 1),
            LinearSolution::Inconsistent
        );
    }

    #[test]
    fn overdetermined_consistent() {
        let rows = vec![vec![g(1), g(0)], vec![g(0), g(0)], vec![g(2), g(0)]];
        let sol = solve_exact(rows, vec![g(2), g(0), g(4)], 2);
        assert_eq!(
            sol,
            LinearSolution::Solved {
                x: vec![g(2), g(0)],
                unique: false
            }
        );
    }
}

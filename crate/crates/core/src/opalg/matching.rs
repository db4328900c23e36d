use std::collections::BTreeMap;

use super::boson::BosonOperator;
use crate::error::{Error, Result};
use crate::symcore::{solve_exact, GaussRational, LinearSolution};

/// Generator `G = k ad a + c a + conj(c) ad + d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorTemplate {
    pub k: GaussRational,
    pub c: GaussRational,
    pub d: GaussRational,
}

impl GeneratorTemplate {
    pub fn new(k: GaussRational, c: GaussRational, d: GaussRational) -> Self {
        Self { k, c, d }
    }

    pub fn number() -> Self {
        Self::new(
            GaussRational::one(),
            GaussRational::zero(),
            GaussRational::zero(),
        )
    }

    pub fn operator(&self) -> BosonOperator {
        BosonOperator::generator(&self.k, &self.c, &self.d)
    }
}

fn highest_power(op: &BosonOperator, t: &GeneratorTemplate) -> usize {
    if !t.k.is_zero() {
        op.terms().keys().map(|&(p, q)| p.max(q)).max().unwrap_or(0) as usize
    } else if !t.c.is_zero() {
        op.degree() as usize
    } else {
        0
    }
}

/// `op e_n` in the basis `e_n = ad^n |0>`, as sparse column.
fn apply_to_basis(op: &BosonOperator, n: usize) -> BTreeMap<usize, GaussRational> {
    let mut out: BTreeMap<usize, GaussRational> = BTreeMap::new();
    for (&(p, q), c) in op.terms() {
        if let Some((m, v)) = BosonOperator::mono_element_unnormalised(p, q, n) {
            *out.entry(m).or_insert_with(GaussRational::zero) += &(c * &v);
        }
    }
    out
}

/// Finds `l_n` with `op = sum_n l_n G^n`. Solved exactly on the first
/// `deg + 2` basis states, then confirmed by normal ordering.
pub fn match_generator_polynomial(
    op: &BosonOperator,
    template: &GeneratorTemplate,
) -> Result<Vec<GaussRational>> {
    if !template.k.is_real() || !template.d.is_real() {
        return Err(Error::InvalidInput(
            "generator coefficients k and d must be real".into(),
        ));
    }
    if op.is_zero() {
        return Ok(vec![GaussRational::zero()]);
    }
    let g = template.operator();
    let top = highest_power(op, template);
    let powers: Vec<BosonOperator> = (0..=top).map(|j| g.pow(j as u32)).collect();
    let max_deg = powers
        .iter()
        .map(|p| p.degree())
        .chain([op.degree()])
        .max()
        .unwrap_or(0) as usize;
    let dim = max_deg + 2;

    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for n in 0..dim {
        let target = apply_to_basis(op, n);
        let columns: Vec<_> = powers.iter().map(|p| apply_to_basis(p, n)).collect();
        let mut keys: Vec<usize> = target.keys().copied().collect();
        for col in &columns {
            keys.extend(col.keys().copied());
        }
        keys.sort_unstable();
        keys.dedup();
        for m in keys {
            rows.push(
                columns
                    .iter()
                    .map(|col| col.get(&m).cloned().unwrap_or_else(GaussRational::zero))
                    .collect(),
            );
            rhs.push(target.get(&m).cloned().unwrap_or_else(GaussRational::zero));
        }
    }
    let x = match solve_exact(rows, rhs, powers.len()) {
        LinearSolution::Solved { x, .. } => x,
        LinearSolution::Inconsistent => {
            return Err(Error::NoMatch(format!(
                "{} is not a polynomial in {}",
                op, g
            )));
        }
    };
    let rebuilt = powers
        .iter()
        .zip(&x)
        .fold(BosonOperator::zero(), |acc, (p, l)| &acc + &p.scale(l));
    if &rebuilt != op {
        return Err(Error::NoMatch(format!(
            "residual {} remains",
            op - &rebuilt
        )));
    }
    let mut x = x;
    while x.len() > 1 && x.last().is_some_and(|c| c.is_zero()) {
        x.pop();
    }
    Ok(x)
}

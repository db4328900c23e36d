use crate::error::{Error, Result};
use crate::geom::{hamiltonian_vector_field, preserves_polarization, Manifold, VectorField};
use crate::opalg::{coordinate_form, DifferentialForm, LocalOperator, SystemKind};
use crate::symcore::{GaussRational, PhaseSymbol, Var};

/// Whether the half-form correction `-(i/2) d_z xi^z` is included. `Off` is a
/// negative control only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Metaplectic {
    #[default]
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DequantResult {
    pub symbol: PhaseSymbol,
    pub field: VectorField,
    pub polarization_ok: bool,
    /// The holomorphic integration constant `g(z)`.
    pub holomorphic_part: PhaseSymbol,
    pub manifold: Manifold,
}

/// `(i/2)(d_z + 4i A_z) xi^z`, or without the derivative term when the
/// correction is switched off.
fn scalar_shift(xi_z: &PhaseSymbol, m: &Manifold, meta: Metaplectic) -> PhaseSymbol {
    let i = GaussRational::i();
    let four_i = &GaussRational::from_int(4) * &i;
    let mut inner = (m.a_z() * xi_z).scale(&four_i);
    if meta == Metaplectic::On {
        inner = &inner + &xi_z.derivative(Var::Z);
    }
    inner.scale(&(&i * &GaussRational::from_ratio(1, 2)))
}

/// Differential form `-i xi^z d_z + f - (i/2)(d_z + 4i A_z) xi^z`.
pub fn quantize(f: &PhaseSymbol, m: &Manifold) -> Result<DifferentialForm> {
    quantize_with(f, m, Metaplectic::On)
}

pub fn quantize_with(f: &PhaseSymbol, m: &Manifold, meta: Metaplectic) -> Result<DifferentialForm> {
    let xi = hamiltonian_vector_field(f, m)?;
    if !preserves_polarization(&xi) {
        return Err(Error::PolarizationViolated(format!(
            "d/dz of xi^zb = {} is non-zero",
            xi.xi_zbar
        )));
    }
    let c = xi.xi_z.scale(&-GaussRational::i());
    let v = f - &scalar_shift(&xi.xi_z, m, meta);
    if !c.is_holomorphic() || !v.is_holomorphic() {
        return Err(Error::NotClosedForm(format!(
            "{} yields c = {}, v = {}",
            f, c, v
        )));
    }
    Ok(DifferentialForm::first_order(c, v))
}

/// Solves the quantization equation for `f` given a first-order form.
pub fn dequantize_first_order(form: &DifferentialForm, m: &Manifold) -> Result<DequantResult> {
    dequantize_first_order_with(form, m, Metaplectic::On)
}

pub fn dequantize_first_order_with(
    form: &DifferentialForm,
    m: &Manifold,
    meta: Metaplectic,
) -> Result<DequantResult> {
    if form.order() > 1 {
        return Err(Error::NotFirstOrder(form.order()));
    }
    if !form.is_holomorphic() {
        return Err(Error::NotClosedForm(format!("form {} depends on zb", form)));
    }
    let xi_z = form.c().scale(&GaussRational::i());
    let dzbar_f = -(&xi_z * m.omega());
    let particular = dzbar_f.antiderivative_dzbar()?;
    let g = &(&form.v() - &particular) + &scalar_shift(&xi_z, m, meta);
    if !g.is_holomorphic() {
        return Err(Error::InconsistentScalarPart(format!("g = {}", g)));
    }
    let symbol = &particular + &g;
    let field = hamiltonian_vector_field(&symbol, m)?;
    if !preserves_polarization(&field) {
        return Err(Error::PolarizationViolated(format!(
            "xi^zb = {}",
            field.xi_zbar
        )));
    }
    let back = quantize_with(&symbol, m, meta)?;
    if &back != form {
        return Err(Error::InconsistentScalarPart(format!(
            "{} quantizes back to {}",
            symbol, back
        )));
    }
    Ok(DequantResult {
        symbol,
        field,
        polarization_ok: true,
        holomorphic_part: g,
        manifold: m.clone(),
    })
}

/// The phase space a subsystem's coherent states live on.
pub fn manifold_for(kind: SystemKind) -> Manifold {
    match kind {
        SystemKind::Boson => Manifold::plane(),
        SystemKind::Spin(s) => Manifold::sphere(s),
    }
}

/// De-quantizes a single-subsystem operator whose coordinate form is first order.
pub fn dequantize_operator(op: &LocalOperator, meta: Metaplectic) -> Result<DequantResult> {
    let form = coordinate_form(op);
    let res = dequantize_first_order_with(&form, &manifold_for(op.kind()), meta)?;
    if op.is_hermitian() && !res.symbol.is_real() {
        return Err(Error::InconsistentScalarPart(format!(
            "Hermitian operator {} produced non-real symbol {}",
            op, res.symbol
        )));
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opalg::{BosonOperator, Spin, SpinOperator};

    fn half() -> GaussRational {
        GaussRational::from_ratio(1, 2)
    }

    fn sz_symbol(s: Spin) -> PhaseSymbol {
        &PhaseSymbol::from_terms([((0, 0), s.value()), ((1, 1), -s.value())], 1)
            + &PhaseSymbol::constant(half())
    }

    #[test]
    fn plane_generators() {
        let m = Manifold::plane();
        let n = quantize(
            &(&PhaseSymbol::modulus_sq() - &PhaseSymbol::constant(half())),
            &m,
        )
        .unwrap();
        assert_eq!(
            n,
            DifferentialForm::first_order(PhaseSymbol::z(), PhaseSymbol::zero())
        );
        assert_eq!(
            quantize(&PhaseSymbol::one(), &m).unwrap(),
            DifferentialForm::identity()
        );
        let ad = dequantize_first_order(&DifferentialForm::derivative(), &m).unwrap();
        assert_eq!(ad.symbol, PhaseSymbol::zbar());
    }

    #[test]
    fn sphere_sz() {
        for twice in [1, 2, 3, 10] {
            let s = Spin::from_twice(twice).unwrap();
            let m = Manifold::sphere(s);
            let form = quantize(&sz_symbol(s), &m).unwrap();
            assert_eq!(
                form.c(),
                PhaseSymbol::z().scale(&GaussRational::from_int(-1))
            );
            assert_eq!(form.v(), PhaseSymbol::constant(s.value()));
            let back =
                dequantize_operator(&LocalOperator::Spin(SpinOperator::sz(s)), Metaplectic::On)
                    .unwrap();
            assert_eq!(back.symbol, sz_symbol(s));
        }
    }

    #[test]
    fn metaplectic_off_gives_expectation_values() {
        let n = LocalOperator::Boson(BosonOperator::number());
        let off = dequantize_operator(&n, Metaplectic::Off).unwrap();
        assert_eq!(off.symbol, PhaseSymbol::modulus_sq());
        let s = Spin::from_twice(2).unwrap();
        let sz = dequantize_operator(&LocalOperator::Spin(SpinOperator::sz(s)), Metaplectic::Off)
            .unwrap();
        assert_eq!(sz.symbol, &sz_symbol(s) - &PhaseSymbol::constant(half()));
    }

    #[test]
    fn second_order_is_rejected() {
        let op = BosonOperator::number().pow(2);
        let err = dequantize_operator(&LocalOperator::Boson(op), Metaplectic::On).unwrap_err();
        assert_eq!(err, Error::NotFirstOrder(2));
    }

    #[test]
    fn polarization_violation() {
        let f = PhaseSymbol::monomial(GaussRational::one(), 2, 2);
        assert_eq!(
            quantize(&f, &Manifold::plane()).unwrap_err().name(),
            "PolarizationViolated"
        );
    }
}

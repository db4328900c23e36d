//! Plane and sphere phase spaces: potentials, symplectic forms, Hamiltonian
//! vector fields, Poisson brackets and the spectral substitution rules.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::opalg::Spin;
use crate::symcore::{GaussRational, PhaseSymbol, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ManifoldKind {
    Plane,
    Sphere(Spin),
}

/// Substitution used by the reduced spectral sum: the boson variable takes the
/// values `m + 1/2` (`m = 0, 1, ...`), the spin variable takes `m = -s..s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectralRule {
    BosonHalfInteger,
    SpinInteger(Spin),
}

impl SpectralRule {
    pub fn boson_value(m: u64) -> f64 {
        m as f64 + 0.5
    }

    /// Finite value list, or `None` for the unbounded boson range.
    pub fn finite_values(&self) -> Option<Vec<f64>> {
        match self {
            SpectralRule::BosonHalfInteger => None,
            SpectralRule::SpinInteger(s) => {
                Some(s.twice_m_values().map(|t| t as f64 / 2.0).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifold {
    kind: ManifoldKind,
    a_z: PhaseSymbol,
    a_zbar: PhaseSymbol,
    omega: PhaseSymbol,
    dy_dzbar: PhaseSymbol,
    spectral_rule: SpectralRule,
    nonstandard: bool,
}

fn gi(re: GaussRational) -> GaussRational {
    &re * &GaussRational::i()
}

impl Manifold {
    pub fn plane() -> Self {
        let half = GaussRational::from_ratio(1, 2);
        Self {
            kind: ManifoldKind::Plane,
            a_z: PhaseSymbol::monomial(gi(half.clone()), 0, 1),
            a_zbar: PhaseSymbol::monomial(-gi(half), 1, 0),
            omega: PhaseSymbol::constant(GaussRational::i()),
            dy_dzbar: PhaseSymbol::z(),
            spectral_rule: SpectralRule::BosonHalfInteger,
            nonstandard: false,
        }
    }

    pub fn sphere(s: Spin) -> Self {
        Self::sphere_with_prefactor(s, s.value(), false)
    }

    /// Sphere whose connection carries the prefactor `s + 1/2` (the functional
    /// measure's normalization) while the Kähler data stay those of spin `s`.
    pub fn sphere_nonstandard(s: Spin) -> Self {
        let p = &s.value() + &GaussRational::from_ratio(1, 2);
        Self::sphere_with_prefactor(s, p, true)
    }

    fn sphere_with_prefactor(s: Spin, p: GaussRational, nonstandard: bool) -> Self {
        let sv = s.value();
        Self {
            kind: ManifoldKind::Sphere(s),
            a_z: PhaseSymbol::from_terms([((0, 1), gi(p.clone()))], 1),
            a_zbar: PhaseSymbol::from_terms([((1, 0), -gi(p.clone()))], 1),
            omega: PhaseSymbol::from_terms([((0, 0), gi(&p * &GaussRational::from_int(2)))], 2),
            dy_dzbar: PhaseSymbol::from_terms([((1, 0), &sv * &GaussRational::from_int(2))], 1),
            spectral_rule: SpectralRule::SpinInteger(s),
            nonstandard,
        }
    }

    /// Arbitrary data, for negative controls.
    pub fn custom(
        kind: ManifoldKind,
        a_z: PhaseSymbol,
        a_zbar: PhaseSymbol,
        omega: PhaseSymbol,
        dy_dzbar: PhaseSymbol,
    ) -> Self {
        let spectral_rule = match kind {
            ManifoldKind::Plane => SpectralRule::BosonHalfInteger,
            ManifoldKind::Sphere(s) => SpectralRule::SpinInteger(s),
        };
        Self {
            kind,
            a_z,
            a_zbar,
            omega,
            dy_dzbar,
            spectral_rule,
            nonstandard: true,
        }
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn a_z(&self) -> &PhaseSymbol {
        &self.a_z
    }

    pub fn a_zbar(&self) -> &PhaseSymbol {
        &self.a_zbar
    }

    pub fn omega(&self) -> &PhaseSymbol {
        &self.omega
    }

    pub fn dy_dzbar(&self) -> &PhaseSymbol {
        &self.dy_dzbar
    }

    pub fn spectral_rule(&self) -> SpectralRule {
        self.spectral_rule
    }

    pub fn is_nonstandard(&self) -> bool {
        self.nonstandard
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    pub xi_z: PhaseSymbol,
    pub xi_zbar: PhaseSymbol,
}

impl VectorField {
    pub fn zero() -> Self {
        Self {
            xi_z: PhaseSymbol::zero(),
            xi_zbar: PhaseSymbol::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.xi_z.is_zero() && self.xi_zbar.is_zero()
    }
}

/// `omega = -dA`, i.e. `-(dA_zb/dz - dA_z/dzb) = omega_zzb`.
pub fn check_symplectic(m: &Manifold) -> bool {
    let da = &m.a_zbar.derivative(Var::Z) - &m.a_z.derivative(Var::Zbar);
    -da == m.omega
}

/// `xi^z = -(df/dzb) / omega`, `xi^zb = (df/dz) / omega`.
pub fn hamiltonian_vector_field(f: &PhaseSymbol, m: &Manifold) -> Result<VectorField> {
    let xi_z = (-f.derivative(Var::Zbar)).checked_div(&m.omega)?;
    let xi_zbar = f.derivative(Var::Z).checked_div(&m.omega)?;
    Ok(VectorField { xi_z, xi_zbar })
}

/// Components `(dz, dzb)` of `i_xi omega + df`; both vanish for a Hamiltonian field.
pub fn contraction_residual(
    xi: &VectorField,
    f: &PhaseSymbol,
    m: &Manifold,
) -> (PhaseSymbol, PhaseSymbol) {
    let dz = &f.derivative(Var::Z) - &(&m.omega * &xi.xi_zbar);
    let dzb = &f.derivative(Var::Zbar) + &(&m.omega * &xi.xi_z);
    (dz, dzb)
}

pub fn preserves_polarization(xi: &VectorField) -> bool {
    xi.xi_zbar.derivative(Var::Z).is_zero()
}

/// `{f, g} = (df/dz dg/dzb - df/dzb dg/dz) / omega`; on the plane `{z, zb} = -i`.
pub fn poisson_bracket(f: &PhaseSymbol, g: &PhaseSymbol, m: &Manifold) -> Result<PhaseSymbol> {
    let num = &(&f.derivative(Var::Z) * &g.derivative(Var::Zbar))
        - &(&f.derivative(Var::Zbar) * &g.derivative(Var::Z));
    num.checked_div(&m.omega)
}

/// `dY/dzb = 2i A_zb`.
pub fn kaehler_check(m: &Manifold) -> bool {
    m.dy_dzbar
        == m.a_zbar
            .scale(&GaussRational::from_int(2))
            .scale(&GaussRational::i())
}

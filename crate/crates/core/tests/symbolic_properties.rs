use dequant_core::dequant::{
    dequantize_extended, dequantize_first_order, dequantize_operator, normal_symbol, quantize,
    Metaplectic,
};
use dequant_core::geom::{
    contraction_residual, hamiltonian_vector_field, poisson_bracket, Manifold,
};
use dequant_core::opalg::{
    coordinate_form, BosonOperator, LocalOperator, Spin, SpinOperator, SystemKind, TensorOperator,
};
use dequant_core::symcore::{GaussRational, PhaseSymbol, Var};
use num::complex::Complex64;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> GaussRational {
    GaussRational::from_ratio(n, d)
}

fn half() -> GaussRational {
    q(1, 2)
}

fn scalar() -> impl Strategy<Value = GaussRational> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4)
        .prop_map(|(a, b, c, d)| &q(a, b) + &(&q(c, d) * &GaussRational::i()))
}

fn real_scalar() -> impl Strategy<Value = GaussRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| q(a, b))
}

fn nonzero_real() -> impl Strategy<Value = GaussRational> {
    (1i64..=6, 1i64..=4, any::<bool>()).prop_map(|(a, b, neg)| q(if neg { -a } else { a }, b))
}

fn symbol() -> impl Strategy<Value = PhaseSymbol> {
    (
        prop::collection::vec(((0u32..=3, 0u32..=3), scalar()), 0..5),
        0u32..=2,
    )
        .prop_map(|(terms, k)| PhaseSymbol::from_terms(terms, k))
}

fn polynomial_symbol() -> impl Strategy<Value = PhaseSymbol> {
    prop::collection::vec(((0u32..=3, 0u32..=3), scalar()), 0..5)
        .prop_map(|terms| PhaseSymbol::from_terms(terms, 0))
}

fn real_part(f: &PhaseSymbol) -> PhaseSymbol {
    (f + &f.conj()).scale(&half())
}

fn spin() -> impl Strategy<Value = Spin> {
    (1u32..=6).prop_map(|t| Spin::from_twice(t).unwrap())
}

fn manifold() -> impl Strategy<Value = Manifold> {
    prop_oneof![Just(Manifold::plane()), spin().prop_map(Manifold::sphere)]
}

fn point() -> impl Strategy<Value = Complex64> {
    (-1.5f64..1.5, -1.5f64..1.5).prop_map(|(x, y)| Complex64::new(x, y))
}

fn ladder_word() -> impl Strategy<Value = Vec<bool>> {
    prop::collection::vec(any::<bool>(), 1..=4)
}

fn word_factors(word: &[bool]) -> Vec<BosonOperator> {
    word.iter()
        .map(|&dagger| {
            if dagger {
                BosonOperator::creation()
            } else {
                BosonOperator::annihilation()
            }
        })
        .collect()
}

fn boson_operator() -> impl Strategy<Value = BosonOperator> {
    prop::collection::vec(((0u32..=3, 0u32..=3), scalar()), 0..5)
        .prop_map(BosonOperator::from_terms)
}

fn generator_symbol(k: &GaussRational, c: &GaussRational, d: &GaussRational) -> PhaseSymbol {
    &(&(&(&PhaseSymbol::modulus_sq() - &PhaseSymbol::constant(half())).scale(k)
        + &PhaseSymbol::z().scale(c))
        + &PhaseSymbol::zbar().scale(&c.conj()))
        + &PhaseSymbol::constant(d.clone())
}

fn sz_symbol(s: Spin) -> PhaseSymbol {
    &PhaseSymbol::from_terms([((0, 0), s.value()), ((1, 1), -s.value())], 1)
        + &PhaseSymbol::constant(half())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_idempotent(f in symbol()) {
        let again = PhaseSymbol::from_terms(f.terms().clone(), f.denom_power());
        prop_assert_eq!(again, f);
    }

    #[test]
    fn antiderivative_inverts_dzbar_on_polynomials(f in polynomial_symbol()) {
        let big = f.antiderivative_dzbar().unwrap();
        prop_assert_eq!(big.derivative(Var::Zbar), f);
    }

    #[test]
    fn antiderivative_inverts_dzbar_when_closed(f in symbol()) {
        if let Ok(big) = f.antiderivative_dzbar() {
            prop_assert_eq!(big.derivative(Var::Zbar), f);
        }
    }

    #[test]
    fn eval_is_multiplicative(
        f in symbol(),
        g in symbol(),
        pts in prop::collection::vec(point(), 100),
    ) {
        let fg = &f * &g;
        for z in pts {
            let (a, b) = (f.eval(z), g.eval(z));
            let scale = (a.norm() * b.norm()).max(1.0);
            prop_assert!((fg.eval(z) - a * b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn conj_is_an_involution_fixing_real_symbols(f in symbol(), g in symbol()) {
        prop_assert_eq!(f.conj().conj(), f.clone());
        prop_assert_eq!((&f * &g).conj(), &g.conj() * &f.conj());
        prop_assert_eq!((&f + &g).conj(), &f.conj() + &g.conj());
        let r = real_part(&f);
        prop_assert!(r.is_real());
        prop_assert_eq!(r.conj(), r);
    }

    #[test]
    fn normal_ordering_matches_truncated_products(word in ladder_word()) {
        let d = 20;
        let factors = word_factors(&word);
        let normal = TensorOperator::from_boson(BosonOperator::normal_order(&factors))
            .to_matrix(d)
            .unwrap();
        let product = factors
            .iter()
            .map(|f| TensorOperator::from_boson(f.clone()).to_matrix(d).unwrap())
            .reduce(|acc, m| acc * m)
            .unwrap();
        let keep = d - word.len();
        for i in 0..keep {
            for j in 0..keep {
                prop_assert!((normal[(i, j)] - product[(i, j)]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn adjoint_is_an_involution_and_detects_hermiticity(b in boson_operator()) {
        prop_assert_eq!(b.adjoint().adjoint(), b.clone());
        let herm = &b + &b.adjoint();
        for (op, expect) in [(b.clone(), b.is_hermitian()), (herm, true)] {
            prop_assert_eq!(op.is_hermitian(), expect);
            let m = TensorOperator::from_boson(op).to_matrix(12).unwrap();
            let self_adjoint = (m.adjoint() - &m).iter().all(|x| x.norm() < 1e-12);
            prop_assert_eq!(self_adjoint, expect);
        }
    }

    #[test]
    fn coordinate_forms_compose_in_reverse(a in boson_operator(), b in boson_operator()) {
        let la = LocalOperator::Boson(a);
        let lb = LocalOperator::Boson(b);
        let product = la.mul(&lb).unwrap();
        prop_assert_eq!(
            coordinate_form(&product),
            coordinate_form(&lb).compose(&coordinate_form(&la))
        );
    }

    #[test]
    fn spin_coordinate_forms_compose_in_reverse(
        s in spin(),
        ca in prop::collection::vec(real_scalar(), 1..4),
        cb in prop::collection::vec(real_scalar(), 1..4),
    ) {
        let la = LocalOperator::Spin(SpinOperator::new(s, ca));
        let lb = LocalOperator::Spin(SpinOperator::new(s, cb));
        let product = la.mul(&lb).unwrap();
        prop_assert_eq!(
            coordinate_form(&product),
            coordinate_form(&lb).compose(&coordinate_form(&la))
        );
    }

    #[test]
    fn number_polynomial_round_trips(coeffs in prop::collection::vec(scalar(), 1..6)) {
        let op = BosonOperator::from_number_polynomial(&coeffs);
        let mut back = op.falling_factorial_decompose().unwrap();
        let mut want = coeffs.clone();
        while want.len() > 1 && want.last().is_some_and(|c| c.is_zero()) {
            want.pop();
        }
        back.resize(want.len().max(back.len()), GaussRational::zero());
        want.resize(back.len(), GaussRational::zero());
        prop_assert_eq!(back, want);
    }

    #[test]
    fn hamiltonian_fields_contract_to_minus_df(f in symbol(), m in manifold()) {
        let f = real_part(&f);
        let xi = hamiltonian_vector_field(&f, &m).unwrap();
        let (dz, dzb) = contraction_residual(&xi, &f, &m);
        prop_assert!(dz.is_zero() && dzb.is_zero());
        prop_assert_eq!(xi.xi_zbar, xi.xi_z.conj());
    }

    #[test]
    fn bracket_is_antisymmetric_bilinear_and_leibniz(
        f in symbol(),
        g in symbol(),
        h in symbol(),
        c in scalar(),
        m in manifold(),
    ) {
        let br = |x: &PhaseSymbol, y: &PhaseSymbol| poisson_bracket(x, y, &m).unwrap();
        prop_assert_eq!(br(&f, &g), -br(&g, &f));
        prop_assert_eq!(br(&(&f + &h.scale(&c)), &g), &br(&f, &g) + &br(&h, &g).scale(&c));
        prop_assert_eq!(br(&f, &(&g * &h)), &(&br(&f, &g) * &h) + &(&g * &br(&f, &h)));
    }

    #[test]
    fn first_order_round_trip_on_plane(k in real_scalar(), c in scalar(), d in real_scalar()) {
        let m = Manifold::plane();
        let f = generator_symbol(&k, &c, &d);
        let form = quantize(&f, &m).unwrap();
        let back = dequantize_first_order(&form, &m).unwrap();
        prop_assert!(back.polarization_ok);
        prop_assert!(back.symbol.is_real());
        prop_assert_eq!(&back.symbol, &f);
        prop_assert_eq!(quantize(&back.symbol, &m).unwrap(), form);
    }

    #[test]
    fn first_order_round_trip_on_sphere(s in spin(), a in real_scalar(), d in real_scalar()) {
        let m = Manifold::sphere(s);
        let f = &sz_symbol(s).scale(&a) + &PhaseSymbol::constant(d);
        let form = quantize(&f, &m).unwrap();
        let back = dequantize_first_order(&form, &m).unwrap();
        prop_assert!(back.symbol.is_real());
        prop_assert_eq!(back.symbol, f);
    }

    #[test]
    fn generator_forms_round_trip(k in real_scalar(), c in scalar(), d in real_scalar()) {
        let op = LocalOperator::Boson(BosonOperator::from_terms([
            ((1, 1), k.clone()),
            ((0, 1), c.clone()),
            ((1, 0), c.conj()),
            ((0, 0), d.clone()),
        ]));
        let form = coordinate_form(&op);
        let res = dequantize_operator(&op, Metaplectic::On).unwrap();
        prop_assert!(res.symbol.is_real());
        prop_assert_eq!(res.symbol, generator_symbol(&k, &c, &d));
        prop_assert_eq!(quantize(&generator_symbol(&k, &c, &d), &Manifold::plane()).unwrap(), form);
    }

    #[test]
    fn power_rule_for_boson_generators(
        k in nonzero_real(),
        c in scalar(),
        d in real_scalar(),
        l in prop::collection::vec(real_scalar(), 1..=4),
    ) {
        let g_op = BosonOperator::from_terms([
            ((1, 1), k.clone()),
            ((0, 1), c.clone()),
            ((1, 0), c.conj()),
            ((0, 0), d.clone()),
        ]);
        let g = generator_symbol(&k, &c, &d);
        let mut op = BosonOperator::zero();
        let mut want = PhaseSymbol::zero();
        for (n, ln) in l.iter().enumerate() {
            op = &op + &g_op.pow(n as u32).scale(ln);
            want = &want + &g.pow(n as u32).scale(ln);
        }
        let ext = dequantize_extended(&TensorOperator::from_boson(op)).unwrap();
        prop_assert_eq!(ext.single_symbol().unwrap(), want);
    }

    #[test]
    fn power_rule_for_spin(s in spin(), l in prop::collection::vec(real_scalar(), 1..=4)) {
        let op = SpinOperator::new(s, l.clone());
        let g = sz_symbol(s);
        let want = l
            .iter()
            .enumerate()
            .fold(PhaseSymbol::zero(), |acc, (n, ln)| &acc + &g.pow(n as u32).scale(ln));
        let ext = dequantize_extended(&TensorOperator::from_spin(op)).unwrap();
        prop_assert_eq!(ext.single_symbol().unwrap(), want);
    }

    #[test]
    fn identity_factor_drops_out(s in spin(), l in prop::collection::vec(real_scalar(), 1..=3)) {
        let h = TensorOperator::from_boson(BosonOperator::from_number_polynomial(&l));
        let id = TensorOperator::scalar(vec![SystemKind::Spin(s)], GaussRational::one());
        let alone = dequantize_extended(&h).unwrap();
        let padded = dequantize_extended(&TensorOperator::kron(&[h, id])).unwrap();
        let pts = [Complex64::new(0.3, -0.2), Complex64::new(1.1, 0.4)];
        prop_assert!((alone.eval(&pts[..1]) - padded.eval(&pts)).norm() < 1e-12);
        prop_assert_eq!(padded.generators()[1].kind(), SystemKind::Spin(s));
    }
}

#[test]
fn metaplectic_off_reproduces_normal_symbols() {
    let plane_ops = [
        BosonOperator::annihilation(),
        BosonOperator::creation(),
        BosonOperator::number(),
        BosonOperator::generator(&q(2, 1), &q(1, 3), &q(-1, 1)),
    ];
    for b in plane_ops {
        let op = LocalOperator::Boson(b);
        let off = dequantize_operator(&op, Metaplectic::Off).unwrap().symbol;
        assert_eq!(off, normal_symbol(&op), "{}", op);
    }
    for twice in 1..=6 {
        let op = LocalOperator::Spin(SpinOperator::sz(Spin::from_twice(twice).unwrap()));
        let off = dequantize_operator(&op, Metaplectic::Off).unwrap().symbol;
        assert_eq!(off, normal_symbol(&op));
    }
}

#[test]
fn metaplectic_term_shifts_by_documented_constants() {
    let n = LocalOperator::Boson(BosonOperator::number());
    let on = dequantize_operator(&n, Metaplectic::On).unwrap().symbol;
    let off = dequantize_operator(&n, Metaplectic::Off).unwrap().symbol;
    assert_eq!(&off - &on, PhaseSymbol::constant(half()));
    for twice in 1..=6 {
        let sz = LocalOperator::Spin(SpinOperator::sz(Spin::from_twice(twice).unwrap()));
        let on = dequantize_operator(&sz, Metaplectic::On).unwrap().symbol;
        let off = dequantize_operator(&sz, Metaplectic::Off).unwrap().symbol;
        assert_eq!(&on - &off, PhaseSymbol::constant(half()));
    }
    for b in [BosonOperator::annihilation(), BosonOperator::creation()] {
        let op = LocalOperator::Boson(b);
        assert_eq!(
            dequantize_operator(&op, Metaplectic::On).unwrap().symbol,
            dequantize_operator(&op, Metaplectic::Off).unwrap().symbol
        );
    }
}

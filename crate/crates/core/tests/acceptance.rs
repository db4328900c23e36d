use std::process::ExitCode;
use std::time::{Duration, Instant};

use dequant_core::dequant::{
    check_dirac_bracket, dequantize_extended, dequantize_operator, gvh_matrix_deviation,
    gvh_obstruction, manifold_for, normal_symbol, symbol_in_zeta, symmetric_slicing_symbol,
    Metaplectic,
};
use dequant_core::geom::{
    check_symplectic, contraction_residual, hamiltonian_vector_field, kaehler_check, Manifold,
};
use dequant_core::opalg::{
    BosonOperator, LocalOperator, Spin, SpinOperator, SystemKind, TensorOperator,
};
use dequant_core::pathint::{
    exact_partition, extrapolate_transfer, reduced_sum_partition, transfer_partition,
    PartitionResult, TimeContour, TransferMode, TransferSource,
};
use dequant_core::symcore::{GaussRational, PhaseSymbol};
use num::complex::Complex64;

type Check = std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn q(n: i64, d: i64) -> GaussRational {
    GaussRational::from_ratio(n, d)
}

fn cplx(re: (i64, i64), im: (i64, i64)) -> GaussRational {
    &q(re.0, re.1) + &(&q(im.0, im.1) * &GaussRational::i())
}

fn spin(twice: u32) -> Spin {
    Spin::from_twice(twice).expect("valid spin")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(budget: Duration, start: Instant, what: &str) -> Check {
    let took = start.elapsed();
    ensure(took < budget, || {
        format!("{} took {:?}, budget {:?}", what, took, budget)
    })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn oscillator() -> TensorOperator {
    TensorOperator::from_boson(BosonOperator::from_number_polynomial(&[q(1, 2), q(1, 1)]))
}

fn corrected_sum(
    op: &TensorOperator,
    c: &TimeContour,
    cutoff: Option<u64>,
) -> Result<PartitionResult, String> {
    let poly = dequantize_extended(op)
        .and_then(|e| e.to_spectral())
        .map_err(err)?;
    reduced_sum_partition(&poly, c, cutoff).map_err(err)
}

fn naive_sum(op: &TensorOperator, c: &TimeContour) -> Result<PartitionResult, String> {
    let local = op.local().ok_or("expected a single subsystem")?;
    let m = manifold_for(local.kind());
    let poly = symbol_in_zeta(&normal_symbol(&local), &m).map_err(err)?;
    reduced_sum_partition(&poly, c, None).map_err(err)
}

fn sz_symbol(s: Spin) -> PhaseSymbol {
    &PhaseSymbol::from_terms([((0, 0), s.value()), ((1, 1), -s.value())], 1)
        + &PhaseSymbol::constant(q(1, 2))
}

fn dequantized(op: LocalOperator) -> Result<PhaseSymbol, String> {
    dequantize_operator(&op, Metaplectic::On)
        .map(|r| r.symbol)
        .map_err(err)
}

fn golden_symbols() -> Check {
    let boson = |b: BosonOperator| LocalOperator::Boson(b);
    let budget = Duration::from_secs(1);
    let mut cases: Vec<(&str, LocalOperator, PhaseSymbol)> = vec![
        ("a", boson(BosonOperator::annihilation()), PhaseSymbol::z()),
        ("ad", boson(BosonOperator::creation()), PhaseSymbol::zbar()),
        (
            "N",
            boson(BosonOperator::number()),
            &PhaseSymbol::modulus_sq() - &PhaseSymbol::constant(q(1, 2)),
        ),
    ];
    let (k, l, m, d) = (
        q(3, 2),
        cplx((2, 1), (-1, 1)),
        cplx((1, 3), (1, 1)),
        q(5, 4),
    );
    let general = BosonOperator::from_terms([
        ((1, 1), k.clone()),
        ((0, 1), l.clone()),
        ((1, 0), m.clone()),
        ((0, 0), d.clone()),
    ]);
    let expected = &(&(&(&PhaseSymbol::modulus_sq() - &PhaseSymbol::constant(q(1, 2))).scale(&k)
        + &PhaseSymbol::z().scale(&l))
        + &PhaseSymbol::zbar().scale(&m))
        + &PhaseSymbol::constant(d);
    cases.push(("k N + l a + m ad + d", boson(general), expected));
    for twice in [1, 2, 3, 10] {
        let s = spin(twice);
        cases.push(("Sz", LocalOperator::Spin(SpinOperator::sz(s)), sz_symbol(s)));
    }
    for (name, op, want) in cases {
        let start = Instant::now();
        let got = dequantized(op.clone())?;
        ensure(got == want, || {
            format!("{} on {}: got {}, want {}", name, op.kind(), got, want)
        })?;
        within(budget, start, name)?;
    }
    Ok(())
}

fn harmonic_oscillator() -> Check {
    let start = Instant::now();
    let op = oscillator();
    let c = TimeContour::imaginary(1.0).map_err(err)?;
    let reduced = corrected_sum(&op, &c, Some(200))?.value;
    let exact = exact_partition(&op, &c, 200).map_err(err)?.value;
    let closed = 1.0 / (2.0 * 0.5f64.sinh());
    ensure((reduced - closed).norm() < 1e-10, || {
        format!("reduced {} vs closed form {}", reduced, closed)
    })?;
    ensure((exact - reduced).norm() < 1e-10, || {
        format!("exact {} vs reduced {}", exact, reduced)
    })?;
    within(Duration::from_secs(1), start, "oscillator")
}

fn wrong_phase() -> Check {
    let op = oscillator();
    let c = TimeContour::new(0.2, 1.0).map_err(err)?;
    let tau = c.tau();
    let exact = exact_partition(&op, &c, 200).map_err(err)?.value;
    let naive = naive_sum(&op, &c)?.value;
    let local = op.local().ok_or("single subsystem")?;
    let sym = symmetric_slicing_symbol(&local).map_err(err)?;
    let sym_poly = symbol_in_zeta(&sym, &Manifold::plane()).map_err(err)?;
    let slicing = reduced_sum_partition(&sym_poly, &c, None)
        .map_err(err)?
        .value;
    for (name, got, factor) in [
        ("naive", naive / exact, (-tau / 2.0).exp()),
        ("symmetric slicing", slicing / exact, (tau / 2.0).exp()),
    ] {
        ensure((got - factor).norm() < 1e-9 * factor.norm(), || {
            format!("{} ratio {} vs {}", name, got, factor)
        })?;
    }
    Ok(())
}

fn spin_partition() -> Check {
    let op = TensorOperator::from_spin(SpinOperator::sz(spin(2)));
    let c = TimeContour::real(0.7).map_err(err)?;
    let corrected = corrected_sum(&op, &c, None)?.value;
    let closed = Complex64::new(1.05f64.sin() / 0.35f64.sin(), 0.0);
    ensure((corrected - closed).norm() < 1e-12, || {
        format!("corrected {} vs {}", corrected, closed)
    })?;
    let naive = naive_sum(&op, &c)?.value;
    let factor = Complex64::new(0.0, 0.35).exp();
    ensure((naive - factor * closed).norm() < 1e-12, || {
        format!("naive {} vs {}", naive, factor * closed)
    })
}

fn polynomial_boson() -> Check {
    let start = Instant::now();
    let op = BosonOperator::from_number_polynomial(&[q(1, 1), q(3, 1), q(1, 1)]);
    // N^2 + 3N + 1 = ad^2 a^2 + 4 ad a + 1
    let normal =
        BosonOperator::from_terms([((2, 2), q(1, 1)), ((1, 1), q(4, 1)), ((0, 0), q(1, 1))]);
    ensure(op == normal, || format!("normal-ordered form {}", op))?;
    let back = op.falling_factorial_decompose().map_err(err)?;
    ensure(back == vec![q(1, 1), q(3, 1), q(1, 1)], || {
        format!("number-polynomial coefficients {:?}", back)
    })?;
    let op = TensorOperator::from_boson(op);
    let c = TimeContour::imaginary(1.0).map_err(err)?;
    let reduced = corrected_sum(&op, &c, None)?;
    let m_max = reduced.cutoff.ok_or("reduced sum reported no cutoff")?;
    let direct: f64 = (0..=m_max)
        .map(|m| {
            let m = m as f64;
            (-(m * m + 3.0 * m + 1.0)).exp()
        })
        .sum();
    ensure((reduced.value - direct).norm() < 1e-14, || {
        format!(
            "reduced {} vs direct {} (M = {})",
            reduced.value, direct, m_max
        )
    })?;
    let exact = exact_partition(&op, &c, 60).map_err(err)?.value;
    ensure((exact - reduced.value).norm() < 1e-10, || {
        format!("exact {} vs reduced {}", exact, reduced.value)
    })?;
    within(Duration::from_secs(1), start, "polynomial boson")
}

fn interaction() -> Check {
    let s = spin(2);
    let sz = TensorOperator::from_spin(SpinOperator::sz(s));
    let id = TensorOperator::scalar(vec![SystemKind::Spin(s)], GaussRational::one());
    let sz2 = sz.pow(2).map_err(err)?;
    let op = TensorOperator::kron(&[sz.clone(), sz])
        .add(&TensorOperator::kron(&[sz2, id]).scale(&q(1, 2)))
        .map_err(err)?;
    let c = TimeContour::real(0.9).map_err(err)?;
    let reduced = corrected_sum(&op, &c, None)?.value;
    let exact = exact_partition(&op, &c, 0).map_err(err)?.value;
    ensure((reduced - exact).norm() < 1e-12, || {
        format!("reduced {} vs exact {}", reduced, exact)
    })
}

fn transfer_modes() -> Check {
    let start = Instant::now();
    let d = 80;
    let op = oscillator();
    let c = TimeContour::new(1.0, 0.5).map_err(err)?;
    let tau = c.tau();
    let exact = exact_partition(&op, &c, d).map_err(err)?.value;
    let source = TransferSource::Operator(&op);
    for n in [8, 64, 512] {
        let z = transfer_partition(source, &c, n, d, TransferMode::MatrixElementExp)
            .map_err(err)?
            .value;
        ensure((z - exact).norm() < 1e-12, || {
            format!("exponential slices at N = {}: {} vs {}", n, z, exact)
        })?;
    }
    let linear_err = |n: usize| -> Result<f64, String> {
        transfer_partition(source, &c, n, d, TransferMode::MatrixElementLinear)
            .map(|r| (r.value - exact).norm())
            .map_err(err)
    };
    let errs = [linear_err(64)?, linear_err(128)?, linear_err(256)?];
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        ensure((1.8..=2.2).contains(&ratio), || {
            format!("linear-slice error ratio {} from {:?}", ratio, errs)
        })?;
    }
    // The diagonal kernel realizes the anti-normal ordering of its symbol:
    // |z|^2 -> a ad = N + 1, and |z|^2 - 1/2 -> N + 1/2.
    let plane = Manifold::plane();
    let schedule = [64, 128, 256, 512];
    let corrected = PhaseSymbol::modulus_sq();
    let slicing = &corrected - &PhaseSymbol::constant(q(1, 2));
    for (name, h, factor) in [
        ("|z|^2", corrected, (-tau / 2.0).exp()),
        ("|z|^2 - 1/2", slicing, Complex64::new(1.0, 0.0)),
    ] {
        let z = extrapolate_transfer(
            TransferSource::Symbol(&h, &plane),
            &c,
            &schedule,
            d,
            TransferMode::DiagonalKernel,
        )
        .map_err(err)?
        .value;
        ensure((z / exact - factor).norm() < 1e-6, || {
            format!(
                "diagonal kernel with {}: ratio {} vs {}",
                name,
                z / exact,
                factor
            )
        })?;
    }
    within(Duration::from_secs(30), start, "transfer modes")
}

fn geometry() -> Check {
    let mut manifolds = vec![("plane".to_string(), Manifold::plane())];
    for twice in [1, 2, 3] {
        manifolds.push((
            format!("sphere s={}/2", twice),
            Manifold::sphere(spin(twice)),
        ));
    }
    for (name, m) in &manifolds {
        ensure(check_symplectic(m), || format!("{}: omega != -dA", name))?;
        ensure(kaehler_check(m), || {
            format!("{}: Kaehler data mismatch", name)
        })?;
    }
    for twice in [1, 2, 3] {
        let bad = Manifold::sphere_nonstandard(spin(twice));
        ensure(!kaehler_check(&bad), || {
            format!("nonstandard connection passed at s = {}/2", twice)
        })?;
    }
    let plane_fns = vec![
        PhaseSymbol::one(),
        &PhaseSymbol::z() + &PhaseSymbol::zbar(),
        (&PhaseSymbol::zbar() - &PhaseSymbol::z()).scale(&GaussRational::i()),
        &PhaseSymbol::modulus_sq() - &PhaseSymbol::constant(q(1, 2)),
        PhaseSymbol::modulus_sq().pow(3),
    ];
    for f in &plane_fns {
        residual_vanishes(f, &manifolds[0].1)?;
    }
    for twice in [1, 2, 3] {
        let s = spin(twice);
        let m = Manifold::sphere(s);
        let tilt = (&PhaseSymbol::z() + &PhaseSymbol::zbar())
            .checked_div(&PhaseSymbol::w())
            .map_err(err)?;
        for f in [sz_symbol(s), tilt, PhaseSymbol::one()] {
            residual_vanishes(&f, &m)?;
        }
    }
    Ok(())
}

fn residual_vanishes(f: &PhaseSymbol, m: &Manifold) -> Check {
    let xi = hamiltonian_vector_field(f, m).map_err(err)?;
    let (dz, dzb) = contraction_residual(&xi, f, m);
    ensure(dz.is_zero() && dzb.is_zero(), || {
        format!("i_xi omega + df = ({}, {}) for f = {}", dz, dzb, f)
    })
}

fn groenewold_van_hove() -> Check {
    let report = gvh_obstruction();
    ensure(report.quadratic_homomorphism_ok, || {
        "quadratic homomorphism fails".into()
    })?;
    ensure(report.residual_is_scalar, || {
        format!("residual {} is not scalar", report.cubic_difference)
    })?;
    ensure(!report.residual_value.is_zero(), || {
        "residual vanishes".into()
    })?;
    let dev = gvh_matrix_deviation(30, 6, report.residual_value.to_c64());
    ensure(dev < 1e-9, || {
        format!(
            "truncated matrices deviate from {} by {}",
            report.residual_value, dev
        )
    })
}

fn dirac_brackets() -> Check {
    let plane = vec![
        PhaseSymbol::one(),
        PhaseSymbol::z(),
        PhaseSymbol::zbar(),
        &PhaseSymbol::modulus_sq() - &PhaseSymbol::constant(q(1, 2)),
    ];
    let mut sets = vec![(Manifold::plane(), plane)];
    for twice in [1, 2, 3, 10] {
        let s = spin(twice);
        sets.push((Manifold::sphere(s), vec![PhaseSymbol::one(), sz_symbol(s)]));
    }
    for (m, set) in &sets {
        for f in set {
            for g in set {
                let ok = check_dirac_bracket(f, g, m).map_err(err)?;
                ensure(ok, || {
                    format!("bracket fails for ({}, {}) on {:?}", f, g, m.kind())
                })?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("symbolic golden results", golden_symbols),
        ("harmonic oscillator", harmonic_oscillator),
        ("wrong-phase reproduction", wrong_phase),
        ("spin partition", spin_partition),
        ("polynomial boson Hamiltonian", polynomial_boson),
        ("interaction", interaction),
        ("discrete exactness and sensitivity", transfer_modes),
        ("geometry", geometry),
        ("Groenewold-van Hove", groenewold_van_hove),
        ("Dirac bracket", dirac_brackets),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        match check() {
            Ok(()) => println!(
                "PASS criterion {:>2}: {} ({:.2?})",
                i + 1,
                name,
                start.elapsed()
            ),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {}: {}", i + 1, name, msg);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", failed);
        ExitCode::FAILURE
    }
}

//! Dirac operator application, the twister, and the first/second order
//! decompositions on desk-scale charts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spintor_core::geometry::{ChartPreset, Lattice, MetricChart};
use spintor_core::sig::Signature;
use spintor_core::spinor::{
    bochner_decompose, fiber_pair, lattice_pair, second_order_decompose, spinor_to_fiber,
    trace_v_both_sides, twister, twister_contraction, zero_order_residual, DiracEnv,
    DiracOperator, GammaRep, TwistedSpinorField, ZeroOrderPart,
};
use spintor_core::tolerances::{
    BOCHNER_FLAT, FERMION_REALITY, SIMPLE_TYPE_ANTICOMMUTE, TRACE_IDENTITY,
    UNIVERSAL_ACTION_FLAT,
};
use spintor_core::torsion::TorsionPotential;

type CMat = DMatrix<Complex64>;

fn flat4() -> (MetricChart, GammaRep) {
    let sig = Signature::new(4, 0, 1).unwrap();
    let chart = MetricChart::build(ChartPreset::Flat, Lattice::cubic(4, 4, 1.0), sig).unwrap();
    let gamma = GammaRep::build(sig).unwrap();
    (chart, gamma)
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Constant leg endomorphism field Id_S (x) m with m built from an
/// antisymmetric real block (kept in the commutant of the Clifford action).
fn constant_simple_field(chart: &MetricChart, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let n = chart.n();
    let mut block = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..n {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            block[j * n + k] = v;
        }
    }
    (0..chart.lat.len())
        .flat_map(|_| block.iter().cloned())
        .collect()
}

#[test]
fn plane_wave_eigenvalue_and_zero_mode() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let op = DiracOperator::quantized_connection(None, 0.0);

    // zero mode: constant field is annihilated exactly
    let u: Vec<Complex64> = (0..gamma.d)
        .map(|a| Complex64::new(1.0 + a as f64, -0.3 * a as f64))
        .collect();
    let psi = TwistedSpinorField::constant_uniform(&chart, &gamma, &u);
    let dpsi = op.apply(&env, &psi).unwrap();
    assert!(dpsi.norm_inf() == 0.0);

    // plane wave: D psi = i k-slash-discrete psi with the sin-corrected
    // momentum sin(k_mu h)/h
    let mode = [1i64, 0, 0, 2];
    let psi = TwistedSpinorField::plane_wave(&chart, &gamma, &u, &mode);
    let dpsi = op.apply(&env, &psi).unwrap();
    let ktilde: Vec<f64> = mode
        .iter()
        .zip(&chart.lat.dims)
        .zip(&chart.lat.h)
        .map(|((&m, &l), &h)| {
            let k = 2.0 * std::f64::consts::PI * m as f64 / (l as f64 * h);
            (k * h).sin() / h
        })
        .collect();
    // expected: i * sum_mu ktilde_mu gamma^mu psi
    let mut kslash = CMat::zeros(gamma.d, gamma.d);
    for mu in 0..4 {
        kslash += gamma.gammas[mu].map(|v| v * Complex64::new(0.0, ktilde[mu]));
    }
    let kf = spinor_to_fiber(&kslash, 4);
    let mut worst: f64 = 0.0;
    for x in chart.sites() {
        let expect = &kf * psi.fiber(x);
        let got = dpsi.fiber(x);
        worst = worst.max((expect - got).iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    assert!(worst < 1e-12, "plane wave residual {worst}");
}

#[test]
fn constant_potential_matches_dense_site_operator() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 4;
    let mut block = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..j {
                let v = rng.gen_range(-1.0..1.0);
                block[(i * n + j) * n + k] = v;
                block[(i * n + k) * n + j] = -v;
            }
        }
    }
    let a = TorsionPotential::constant(&chart, &block).unwrap();
    let g = 0.7;
    let op = DiracOperator::quantized_connection(Some(a), g);
    let u: Vec<Complex64> = (0..gamma.d)
        .map(|i| Complex64::new(0.4 - i as f64, 0.9 * i as f64))
        .collect();
    let psi = TwistedSpinorField::constant_uniform(&chart, &gamma, &u);
    let dpsi = op.apply(&env, &psi).unwrap();
    // dense one-site operator: the derivative part annihilates constants
    let dense = op.onsite_block(&env, 0);
    let expect = &dense * psi.fiber(0);
    for x in chart.sites() {
        let got = dpsi.fiber(x);
        assert!(
            (&expect - &got).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-13,
            "site {x}"
        );
    }
}

#[test]
fn dirac_apply_is_linear() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = TorsionPotential::random(&chart, &mut rng, 0.5);
    let op = DiracOperator::quantized_connection(Some(a), 0.3);
    let psi1 = TwistedSpinorField::random(&chart, &gamma, &mut rng, 1.0);
    let psi2 = TwistedSpinorField::random(&chart, &gamma, &mut rng, 1.0);
    let ca = Complex64::new(0.3, -0.8);
    let cb = Complex64::new(-1.1, 0.2);
    let mut combo = TwistedSpinorField::zeros(&chart, &gamma);
    combo.axpy(ca, &psi1);
    combo.axpy(cb, &psi2);
    let lhs = op.apply(&env, &combo).unwrap();
    let d1 = op.apply(&env, &psi1).unwrap();
    let d2 = op.apply(&env, &psi2).unwrap();
    let mut rhs = TwistedSpinorField::zeros(&chart, &gamma);
    rhs.axpy(ca, &d1);
    rhs.axpy(cb, &d2);
    let mut worst: f64 = 0.0;
    for (x, y) in lhs.data.iter().zip(&rhs.data) {
        worst = worst.max((x - y).norm());
    }
    assert!(worst < 1e-12);
}

#[test]
fn dirac_is_odd_in_dense_one_site_build() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = TorsionPotential::random(&chart, &mut rng, 0.4);
    let op = DiracOperator::quantized_connection(Some(a), 1.0);
    // on-site (mass) part anticommutes with the grading exactly; the
    // derivative part carries a gamma and anticommutes as matrices
    let block = op.onsite_block(&env, 5);
    let resid = &env.tau_fiber * &block + &block * &env.tau_fiber;
    assert!(max_abs(&resid) < 1e-13);
    for g in &env.gfiber {
        let r = &env.tau_fiber * g + g * &env.tau_fiber;
        assert!(max_abs(&r) < 1e-13);
    }
}

#[test]
fn fermion_bilinear_imaginary_part_vanishes() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let a = TorsionPotential::random(&chart, &mut rng, 0.6);
        let op = DiracOperator::quantized_connection(Some(a), 0.1);
        let psi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 1.0);
        let dpsi = op.apply(&env, &psi).unwrap();
        let v = lattice_pair(&gamma, &chart, &psi, &dpsi);
        assert!(
            v.im.abs() <= FERMION_REALITY * v.re.abs().max(1.0),
            "Im <psi, D psi> = {}",
            v.im
        );
    }
}

#[test]
fn twister_identities() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = TorsionPotential::random(&chart, &mut rng, 0.5);
    let conn = DiracOperator::quantized_connection(Some(a), 0.4);

    // constant field with zero potential: twister vanishes
    let free = DiracOperator::quantized_connection(None, 0.0);
    let u: Vec<Complex64> = (0..gamma.d).map(|i| Complex64::new(i as f64, 1.0)).collect();
    let cpsi = TwistedSpinorField::constant_uniform(&chart, &gamma, &u);
    let t0 = twister(&env, &free, &cpsi).unwrap();
    assert!(t0.data.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-14);

    // random field: quantization contraction of the twister vanishes
    let psi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 1.0);
    let t = twister(&env, &conn, &psi).unwrap();
    let c = twister_contraction(&env, &t);
    assert!(c < 1e-11, "contraction {c}");

    // T psi + ext_Theta(D psi) = nabla psi exactly: verify one component
    let slashed = conn.apply(&env, &psi).unwrap();
    let n = 4;
    for &x in &[0usize, 100] {
        for aa in 0..n {
            // rebuild nabla_a psi from the definition
            let getter = |y: usize| psi.fiber(y);
            let mut nv = spintor_core::spinor::covariant_at(&env, x, aa, &getter);
            let leg = spintor_core::spinor::potential_leg_matrix(
                &chart,
                conn.potential.as_ref().unwrap(),
                x,
                aa,
            );
            nv += spintor_core::spinor::leg_to_fiber(&leg, gamma.d)
                * psi.fiber(x).map(|z| z * Complex64::new(conn.coupling, 0.0));
            let ct = Complex64::new(chart.sig.epsf() * chart.sig.eta(aa) / n as f64, 0.0);
            let theta_d = (&env.gfiber[aa] * slashed.fiber(x)).map(|z| z * ct);
            for leg_i in 0..n {
                for al in 0..gamma.d {
                    let got = t.get(x, aa, leg_i, al) + theta_d[leg_i * gamma.d + al];
                    let want = nv[leg_i * gamma.d + al];
                    assert!((got - want).norm() < 1e-13);
                }
            }
        }
    }
}

#[test]
fn bochner_of_quantized_connection_vanishes() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // torsion-twisted quantized Clifford connection, constant potential
    let n = 4;
    let mut block = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..j {
                let v = rng.gen_range(-0.5..0.5);
                block[(i * n + j) * n + k] = v;
                block[(i * n + k) * n + j] = -v;
            }
        }
    }
    let a = TorsionPotential::constant(&chart, &block).unwrap();
    let op = DiracOperator::quantized_connection(Some(a), 1.0);
    let dec = bochner_decompose(&env, &op).unwrap();
    let worst = dec.phi.iter().map(max_abs).fold(0.0, f64::max);
    assert!(worst < BOCHNER_FLAT, "Phi_D residual {worst}");
}

#[test]
fn bochner_recovers_simple_type_zero_order() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = {
        let n = 4;
        let mut block = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..j {
                    let v = rng.gen_range(-0.5..0.5);
                    block[(i * n + j) * n + k] = v;
                    block[(i * n + k) * n + j] = -v;
                }
            }
        }
        TorsionPotential::constant(&chart, &block).unwrap()
    };
    let m = constant_simple_field(&chart, &mut rng);
    let op = DiracOperator::simple_type(Some(a), 1.0, &chart, m.clone()).unwrap();
    let dec = bochner_decompose(&env, &op).unwrap();

    // expected zero-order part: tau_S (x) m
    let n = 4;
    let leg = CMat::from_fn(n, n, |j, k| m[j * n + k]);
    let expect = &env.tau_fiber * spintor_core::spinor::leg_to_fiber(&leg, gamma.d);
    let mut worst: f64 = 0.0;
    for x in chart.sites() {
        worst = worst.max(max_abs(&(&dec.phi[x] - &expect)));
    }
    assert!(worst < BOCHNER_FLAT, "recovered Phi_D error {worst}");

    // anticommutation with the Clifford action
    let mut anti: f64 = 0.0;
    for &x in &[0usize, 37, 200] {
        for g in &env.gfiber {
            let r = &dec.phi[x] * g + g * &dec.phi[x];
            anti = anti.max(max_abs(&r));
        }
    }
    assert!(anti < SIMPLE_TYPE_ANTICOMMUTE, "anticommutator {anti}");

    // the Bochner connection of a simple-type operator is again a Clifford
    // connection: on the flat chart its coefficients commute with the
    // constant-frame Clifford matrices
    let mut comm: f64 = 0.0;
    for &x in &[0usize, 100] {
        for aa in 0..n {
            for g in &env.gfiber {
                // gamma(nabla alpha) = 0 for constant frame components
                let r = &dec.omega[x * n + aa] * g - g * &dec.omega[x * n + aa];
                comm = comm.max(max_abs(&r));
            }
        }
    }
    assert!(comm < BOCHNER_FLAT, "Clifford-connection residual {comm}");
}

#[test]
fn second_order_decomposition_flat() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(13);

    // quantized spin connection on the flat chart: V_D = 0 and the trace
    // vanishes (Lichnerowicz with scal = 0)
    let free = DiracOperator::quantized_connection(None, 0.0);
    let dec = second_order_decompose(&env, &free).unwrap();
    let worst = dec.v.iter().map(max_abs).fold(0.0, f64::max);
    assert!(worst < 1e-12, "V_D residual {worst}");

    // simple type with constant phi: V_D = phi^2 = Id_S (x) m^2
    let m = constant_simple_field(&chart, &mut rng);
    let op = DiracOperator::simple_type(None, 0.0, &chart, m.clone()).unwrap();
    let dec = second_order_decompose(&env, &op).unwrap();
    let n = 4;
    let leg = CMat::from_fn(n, n, |j, k| m[j * n + k]);
    let expect = spintor_core::spinor::leg_to_fiber(&(&leg * &leg), gamma.d);
    let mut verr: f64 = 0.0;
    for &x in &[0usize, 50, 255] {
        verr = verr.max(max_abs(&(&dec.v[x] - &expect)));
    }
    assert!(verr < 1e-11, "V_D vs phi^2: {verr}");

    // tr V_D = d * tr(m^2): the dense one-site comparison
    let tr_expect = (&leg * &leg).trace() * Complex64::new(gamma.d as f64, 0.0);
    let got = dec.v[0].trace();
    assert!(
        (got - tr_expect).norm() / tr_expect.norm().max(1.0) < UNIVERSAL_ACTION_FLAT,
        "trace {got} vs {tr_expect}"
    );

    // zero-order property under random scalar multiplication
    let s: Vec<f64> = (0..chart.lat.len())
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let psi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 1.0);
    let r = zero_order_residual(&env, &op, &dec, &s, &psi);
    assert!(r < 1e-11, "zero-order residual {r}");
}

#[test]
fn trace_identity_random_simple_type() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..3 {
        let a = {
            let n = 4;
            let mut block = vec![0.0; n * n * n];
            for i in 0..n {
                for j in 0..n {
                    for k in 0..j {
                        let v = rng.gen_range(-0.4..0.4);
                        block[(i * n + j) * n + k] = v;
                        block[(i * n + k) * n + j] = -v;
                    }
                }
            }
            TorsionPotential::constant(&chart, &block).unwrap()
        };
        let m = constant_simple_field(&chart, &mut rng);
        let op = DiracOperator::simple_type(Some(a), 1.0, &chart, m).unwrap();
        let (lhs, rhs) = trace_v_both_sides(&env, &op).unwrap();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for (l, r) in lhs.iter().zip(&rhs) {
            worst = worst.max((l - r).norm());
            scale = scale.max(l.norm());
        }
        assert!(
            worst / scale < TRACE_IDENTITY,
            "trial {trial}: |lhs - rhs| = {worst}, scale {scale}"
        );
    }
}

#[test]
fn clifford_connection_property_constant_frame_covector() {
    // [nabla_a, gamma(alpha)] = gamma(nabla alpha) for the built twisted
    // connections, tested with covectors of constant frame components
    // (both sides then reduce to pointwise algebra, exact even on curved
    // charts).
    let sig = Signature::new(2, 0, 1).unwrap();
    let chart = MetricChart::build(
        ChartPreset::Sphere2 { radius: 1.0 },
        Lattice::new(vec![16, 8], vec![0.05, 0.05]),
        sig,
    )
    .unwrap();
    let gamma = GammaRep::build(sig).unwrap();
    let env = DiracEnv::new(&chart, &gamma);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let alpha: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let galpha = {
        let mut m = CMat::zeros(gamma.d, gamma.d);
        for (k, &ak) in alpha.iter().enumerate() {
            m += gamma.gammas[k].map(|v| v * Complex64::new(ak, 0.0));
        }
        spinor_to_fiber(&m, 2)
    };
    let psi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 1.0);
    let getter = |y: usize| psi.fiber(y);
    let mut worst: f64 = 0.0;
    for &x in chart.interior_sites(3).iter().take(40) {
        for a in 0..2 {
            // lhs: nabla_a(gamma(alpha) psi) - gamma(alpha) nabla_a psi
            let gpsi = |y: usize| &galpha * psi.fiber(y);
            let lhs = spintor_core::spinor::covariant_at(&env, x, a, &gpsi)
                - &galpha * spintor_core::spinor::covariant_at(&env, x, a, &getter);
            // rhs: gamma(nabla_a alpha), with (nabla_a alpha)_c = -omega_a{}^b{}_c alpha_b
            let mut dal = vec![0.0; 2];
            for c in 0..2 {
                for b in 0..2 {
                    dal[c] -= chart.omega_raised(x, a, b, c) * alpha[b];
                }
            }
            let mut gd = CMat::zeros(gamma.d, gamma.d);
            for (k, &v) in dal.iter().enumerate() {
                gd += gamma.gammas[k].map(|z| z * Complex64::new(v, 0.0));
            }
            let rhs = spinor_to_fiber(&gd, 2) * psi.fiber(x);
            worst = worst.max((lhs - rhs).iter().map(|c| c.norm()).fold(0.0, f64::max));
        }
    }
    assert!(worst < 1e-9, "Clifford connection residual {worst}");
}

#[test]
fn fiber_pairing_matches_block_form() {
    let (chart, gamma) = flat4();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let psi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 1.0);
    let chi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 1.0);
    // Euclidean: <psi, chi> = sum_k psi^k{}^dagger H chi^k
    let mut expect = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        for a in 0..gamma.d {
            for b in 0..gamma.d {
                expect += psi.get(7, k, a).conj() * gamma.hermitian_form[(a, b)] * chi.get(7, k, b);
            }
        }
    }
    let got = fiber_pair(&gamma, &chart, &psi, &chi, 7);
    assert!((got - expect).norm() < 1e-13);
}

#[test]
fn general_zero_order_part_is_supported() {
    let (chart, gamma) = flat4();
    let env = DiracEnv::new(&chart, &gamma);
    let f = env.fiber_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mats: Vec<CMat> = chart
        .sites()
        .map(|_| {
            CMat::from_fn(f, f, |_, _| {
                Complex64::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2))
            })
        })
        .collect();
    let op = DiracOperator {
        coupling: 0.0,
        potential: None,
        zero_order: ZeroOrderPart::General { mats: mats.clone() },
    };
    assert_eq!(op.kind_name(), "general");
    let block = op.onsite_block(&env, 3);
    assert!(max_abs(&(&block - &mats[3])) < 1e-13);
}

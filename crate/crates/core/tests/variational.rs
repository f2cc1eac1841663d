//! Variational consistency of the discretized functionals: analytic
//! gradients against central finite differences, the two-path universal
//! action, the canonical-form stationarity constant, and invariance under
//! global frame rotations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spintor_core::action::{
    action_gradient, solver_gradient, solver_objective, spin_current, total_action,
    universal_action, universal_action_closed_form, CouplingForm,
};
use spintor_core::geometry::{ChartPreset, Lattice, MetricChart};
use spintor_core::sig::Signature;
use spintor_core::spinor::{DiracOperator, GammaRep, TwistedSpinorField};
use spintor_core::tolerances::{
    GAUGE_FRAME_INVARIANCE, GRADIENT_FD, GRADIENT_FD_STEP, UNIVERSAL_ACTION_FLAT,
};
use spintor_core::torsion::{delta_a_two_form, field_strength, TorsionPotential};

type CMat = DMatrix<Complex64>;

fn flat4() -> (MetricChart, GammaRep) {
    let sig = Signature::new(4, 0, 1).unwrap();
    let chart = MetricChart::build(ChartPreset::Flat, Lattice::cubic(4, 4, 1.0), sig).unwrap();
    let gamma = GammaRep::build(sig).unwrap();
    (chart, gamma)
}

/// Directional derivative of a packed A/psi parameterization by central
/// differences of the total action.
fn fd_directional(
    chart: &MetricChart,
    gamma: &GammaRep,
    a: &TorsionPotential,
    psi: &TwistedSpinorField,
    da: &TorsionPotential,
    dpsi: &TwistedSpinorField,
    form: CouplingForm,
    g: f64,
    step: f64,
) -> f64 {
    let eval = |t: f64| {
        let mut at = a.clone();
        at.axpy(t, da);
        let mut pt = psi.clone();
        pt.axpy(Complex64::new(t, 0.0), dpsi);
        total_action(chart, gamma, &at, &pt, form, g).unwrap().total
    };
    (eval(step) - eval(-step)) / (2.0 * step)
}

fn analytic_directional(
    chart: &MetricChart,
    grad_a: &TorsionPotential,
    grad_psi: &TwistedSpinorField,
    da: &TorsionPotential,
    dpsi: &TwistedSpinorField,
) -> f64 {
    let n = chart.n();
    let mut acc = 0.0;
    for x in chart.sites() {
        for k in 0..n {
            for i in 0..n {
                for j in (i + 1)..n {
                    acc += grad_a.get(x, k, i, j) * da.get(x, k, i, j);
                }
            }
        }
    }
    for (g, d) in grad_psi.data.iter().zip(&dpsi.data) {
        acc += (g.conj() * d).re;
    }
    acc
}

#[test]
fn gradient_matches_finite_differences_both_forms() {
    let (chart, gamma) = flat4();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let a = TorsionPotential::random(&chart, &mut rng, 0.3);
    let psi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 0.8);
    for form in [CouplingForm::Rescaled, CouplingForm::Canonical] {
        let g = 0.1;
        let grad = action_gradient(&chart, &gamma, &a, &psi, form, g).unwrap();
        for dir in 0..20 {
            let da = TorsionPotential::random(&chart, &mut rng, 1.0);
            let dpsi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 1.0);
            let fd = fd_directional(
                &chart,
                &gamma,
                &a,
                &psi,
                &da,
                &dpsi,
                form,
                g,
                GRADIENT_FD_STEP,
            );
            let an = analytic_directional(&chart, &grad.grad_a, &grad.grad_psi, &da, &dpsi);
            let scale = fd.abs().max(an.abs()).max(1e-8);
            assert!(
                (fd - an).abs() / scale < GRADIENT_FD,
                "{} dir {dir}: fd {fd} vs analytic {an}",
                form.name()
            );
        }
    }
}

#[test]
fn vacuum_gradients_vanish() {
    let (chart, gamma) = flat4();
    let a = TorsionPotential::zeros(&chart);
    let psi = TwistedSpinorField::zeros(&chart, &gamma);
    let grad = action_gradient(&chart, &gamma, &a, &psi, CouplingForm::Rescaled, 0.1).unwrap();
    assert!(grad.grad_a.norm_inf() == 0.0);
    assert!(grad.grad_psi.norm_inf() == 0.0);
}

#[test]
fn solver_objective_gradient_and_residual_agree() {
    let (chart, gamma) = flat4();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let a = TorsionPotential::random(&chart, &mut rng, 0.25);
    let psi = TwistedSpinorField::modulated_legs(&chart, &gamma, 0.5);
    let current = spin_current(&chart, &gamma, &psi).unwrap();
    let g = 0.1;

    // finite differences of the objective against the packed gradient
    let (grad, residual) = solver_gradient(&chart, &a, &current, g).unwrap();
    for _ in 0..10 {
        let da = TorsionPotential::random(&chart, &mut rng, 1.0);
        let eval = |t: f64| {
            let mut at = a.clone();
            at.axpy(t, &da);
            solver_objective(&chart, &at, &current, g).unwrap()
        };
        let fd = (eval(GRADIENT_FD_STEP) - eval(-GRADIENT_FD_STEP)) / (2.0 * GRADIENT_FD_STEP);
        let mut an = 0.0;
        for x in chart.sites() {
            for k in 0..4 {
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        an += grad.get(x, k, i, j) * da.get(x, k, i, j);
                    }
                }
            }
        }
        let scale = fd.abs().max(an.abs()).max(1e-8);
        assert!((fd - an).abs() / scale < GRADIENT_FD, "fd {fd} vs {an}");
    }

    // gradient = 2 w eta (residual): flat Euclidean unit weights make the
    // two proportional componentwise
    for x in chart.sites().take(64) {
        for k in 0..4 {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let lhs = grad.get(x, k, i, j);
                    let rhs = 2.0 * residual.get(x, k, i, j);
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn canonical_form_carries_the_expected_stationarity_constant() {
    // The canonical-form gradient is 8 lambda_t (delta_A F) - 2 J per
    // weighted component, so its stationary points satisfy
    // delta_A F_A = -lambda0 (eps/n) J with
    // lambda0 = 2^{-2(n+1)} eps n / rk(S).
    let (chart, gamma) = flat4();
    let n = chart.n();
    let lam_t = CouplingForm::Canonical.torsion_coefficient(n, gamma.d, 0.1);
    assert_eq!(lam_t, -1024.0); // -2^{2n} rk(S) at n = 4, d = 4
    let kappa = CouplingForm::Canonical.fermion_coupling(0.1);
    assert_eq!(kappa, 1.0);
    let lambda0 = 2f64.powi(-(2 * (n as i32 + 1))) * chart.sig.epsf() * n as f64 / gamma.d as f64;
    // stationarity coefficient kappa / (4 lambda_t) = -lambda0 eps / n
    let lhs = kappa / (4.0 * lam_t);
    let rhs = -lambda0 * chart.sig.epsf() / n as f64;
    assert!(
        (lhs - rhs).abs() < 1e-18,
        "stationarity constant {lhs} vs -lambda0 eps/n = {rhs}"
    );

    // and the assembled gradient honors exactly those two coefficients
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let a = TorsionPotential::random(&chart, &mut rng, 0.2);
    let psi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 0.5);
    let grad = action_gradient(&chart, &gamma, &a, &psi, CouplingForm::Canonical, 0.1).unwrap();
    let f = field_strength(&chart, &a).unwrap();
    let df = delta_a_two_form(&chart, Some(&a), &f).unwrap();
    let j = spin_current(&chart, &gamma, &psi).unwrap();
    for &x in &[0usize, 99] {
        for k in 0..n {
            for i in 0..n {
                for jj in (i + 1)..n {
                    let expect =
                        8.0 * lam_t * df.get(x, k, i, jj) - 2.0 * kappa * j.field.get(x, k, i, jj);
                    assert!((grad.grad_a.get(x, k, i, jj) - expect).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn universal_action_two_paths_flat() {
    let (chart, gamma) = flat4();

    // quantized Clifford connection on the flat chart: zero
    let free = DiracOperator::quantized_connection(None, 0.0);
    let rep = universal_action(&chart, &gamma, &free).unwrap();
    assert!(rep.value.norm() < 1e-10, "free value {}", rep.value);

    // simple type with constant hermitian phi: both paths agree and the
    // value is vol * tr phi^2
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let n = 4;
    let mut block = vec![Complex64::new(0.0, 0.0); n * n];
    for j in 0..n {
        for k in 0..=j {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            block[j * n + k] = v;
            block[k * n + j] = v.conj();
        }
    }
    let m_field: Vec<Complex64> = (0..chart.lat.len())
        .flat_map(|_| block.iter().cloned())
        .collect();
    let op = DiracOperator::simple_type(None, 0.0, &chart, m_field).unwrap();
    let rep = universal_action(&chart, &gamma, &op).unwrap();
    let closed = universal_action_closed_form(&chart, &gamma, &op).unwrap();
    let scale = closed.norm().max(1.0);
    assert!(
        (rep.value - closed).norm() / scale < UNIVERSAL_ACTION_FLAT,
        "V_D path {} vs closed form {}",
        rep.value,
        closed
    );
    // direct value: vol * d * tr(m^2)
    let mut tr = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            tr += block[j * n + k] * block[k * n + j];
        }
    }
    let direct = tr * Complex64::new(256.0 * gamma.d as f64, 0.0);
    assert!((rep.value - direct).norm() / scale < UNIVERSAL_ACTION_FLAT);
    // reported length: lattice average of tr phi^2
    let lam = rep.lambda.unwrap();
    assert!((lam - tr * Complex64::new(gamma.d as f64, 0.0)).norm() / scale < 1e-8);
}

#[test]
fn universal_action_sphere_reproduces_scalar_curvature_term() {
    let sig = Signature::new(2, 0, 1).unwrap();
    let chart = MetricChart::build(
        ChartPreset::Sphere2 { radius: 1.0 },
        Lattice::new(vec![20, 6], vec![0.02, 0.02]),
        sig,
    )
    .unwrap();
    let gamma = GammaRep::build(sig).unwrap();
    let op = DiracOperator::quantized_connection(None, 0.0);
    let rep = universal_action(&chart, &gamma, &op).unwrap();
    // closed form: -eps rk(E1)/4 * integral(scal), interior-consistent to
    // finite-difference accuracy
    let scal = spintor_core::geometry::scalar_curvature(&chart);
    let interior = chart.interior_sites(6);
    let mut lhs = Complex64::new(0.0, 0.0);
    let mut rhs = 0.0;
    // compare the densities on interior sites only: boundary stencils wrap
    let dec_scale = (gamma.d * 2) as f64 / 4.0;
    let env = spintor_core::spinor::DiracEnv::new(&chart, &gamma);
    let dec = spintor_core::spinor::second_order_decompose(&env, &op).unwrap();
    for &x in &interior {
        lhs += dec.v[x].trace() * Complex64::new(chart.weight(x), 0.0);
        rhs += -chart.sig.epsf() * dec_scale * scal.data[x] * chart.weight(x);
    }
    let _ = rep;
    let scale = rhs.abs().max(1e-12);
    assert!(
        (lhs.re - rhs).abs() / scale < 2e-2,
        "interior V_D trace {} vs curvature term {}",
        lhs.re,
        rhs
    );
    assert!(lhs.im.abs() / scale < 1e-8);
}

fn real_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut acc = term.clone();
    for k in 1..40 {
        term = &term * m / k as f64;
        acc += &term;
    }
    acc
}

fn complex_exp(m: &CMat) -> CMat {
    let n = m.nrows();
    let mut term = CMat::identity(n, n);
    let mut acc = term.clone();
    for k in 1..60 {
        term = &term * m.map(|v| v / Complex64::new(k as f64, 0.0));
        acc += &term;
    }
    acc
}

#[test]
fn action_breakdown_invariant_under_global_frame_rotation() {
    let (chart, gamma) = flat4();
    let n = chart.n();
    let mut rng = ChaCha8Rng::seed_from_u64(61);

    // so generator in the m[j][k] = g(M e_j, e_k) convention
    let mut m = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..j {
            let v = 0.3 * rng.gen_range(-1.0f64..1.0);
            m[j * n + k] = v;
            m[k * n + j] = -v;
        }
    }
    // vector rotation O = exp(M) with M_{cj} = m[j][c] (Euclidean endo)
    let mend = DMatrix::<f64>::from_fn(n, n, |c, j| m[j * n + c]);
    let o = real_exp(&mend);
    // orthogonality check
    let ortho = (&o * o.transpose() - DMatrix::<f64>::identity(n, n))
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    assert!(ortho < 1e-12);

    // spin lift: U = exp(rho(m)) conjugates gamma^a to sum_c O_{ca} gamma^c
    let rho = spintor_core::dense::spin_lift(&gamma, &m);
    let u = complex_exp(&rho);
    let uinv = complex_exp(&rho.map(|v| -v));
    for a in 0..n {
        let lhs = &u * &gamma.gammas[a] * &uinv;
        let mut rhs = CMat::zeros(gamma.d, gamma.d);
        for c in 0..n {
            rhs += gamma.gammas[c].map(|v| v * Complex64::new(o[(c, a)], 0.0));
        }
        let err = (lhs - rhs).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err < 1e-11, "conjugation slot {a}: {err}");
    }
    // the pairing is rotation invariant
    let hrot = u.adjoint() * &gamma.hermitian_form * &u;
    let herr = (&hrot - &gamma.hermitian_form)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    assert!(herr < 1e-11, "pairing invariance {herr}");

    // rotate the fields: all frame indices with O^T (components in the
    // rotated frame), spinors with U^{-1}
    let a_field = TorsionPotential::random(&chart, &mut rng, 0.4);
    let psi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 0.8);
    let mut a_rot = TorsionPotential::zeros(&chart);
    for x in chart.sites() {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut acc = 0.0;
                    for i2 in 0..n {
                        for j2 in 0..n {
                            for k2 in 0..n {
                                acc += o[(i2, i)] * o[(j2, j)] * o[(k2, k)]
                                    * a_field.get(x, i2, j2, k2);
                            }
                        }
                    }
                    a_rot.set(x, i, j, k, acc);
                }
            }
        }
    }
    let mut psi_rot = TwistedSpinorField::zeros(&chart, &gamma);
    for x in chart.sites() {
        for k in 0..n {
            for al in 0..gamma.d {
                let mut acc = Complex64::new(0.0, 0.0);
                for k2 in 0..n {
                    for be in 0..gamma.d {
                        acc += Complex64::new(o[(k2, k)], 0.0) * uinv[(al, be)]
                            * psi.get(x, k2, be);
                    }
                }
                psi_rot.set(x, k, al, acc);
            }
        }
    }

    // the chart's orthonormal frame rotates with the fields: the rotated
    // components live in the rotated frame
    let o_rows: Vec<f64> = (0..n)
        .flat_map(|b| (0..n).map(move |a| (b, a)))
        .map(|(b, a)| o[(b, a)])
        .collect();
    let chart_rot = chart.with_rotated_frame(&o_rows).unwrap();

    let g = 0.1;
    for form in [CouplingForm::Rescaled, CouplingForm::Canonical] {
        let b1 = total_action(&chart, &gamma, &a_field, &psi, form, g).unwrap();
        let b2 = total_action(&chart_rot, &gamma, &a_rot, &psi_rot, form, g).unwrap();
        let scale = b1
            .total
            .abs()
            .max(b1.fermion_term.abs())
            .max(b1.torsion_term.abs())
            .max(1.0);
        assert!(
            (b1.scal_term - b2.scal_term).abs() / scale < GAUGE_FRAME_INVARIANCE,
            "scal term"
        );
        assert!(
            (b1.fermion_term - b2.fermion_term).abs() / scale < GAUGE_FRAME_INVARIANCE,
            "fermion term: {} vs {}",
            b1.fermion_term,
            b2.fermion_term
        );
        assert!(
            (b1.torsion_term - b2.torsion_term).abs() / scale < GAUGE_FRAME_INVARIANCE,
            "torsion term: {} vs {}",
            b1.torsion_term,
            b2.torsion_term
        );
    }
}

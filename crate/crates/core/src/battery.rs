//! Cross-module identity suite: Clifford axioms, roundtrips, projection
//! identities, decomposition constants, adjointness and gradient checks.
//! Used by the command-line `check` run and the acceptance harness.

use crate::action::{action_gradient, spin_current, total_action, CouplingForm};
use crate::clifford::{ext_theta, project_pq, quantize_one_form, EndValuedOneForm, Multivector, SymbolMap};
use crate::dense;
use crate::error::Result;
use crate::geometry::{
    codifferential, d_exterior, kform_inner, ChartPreset, KForm, Lattice, MetricChart,
};
use crate::sig::Signature;
use crate::spinor::{lattice_pair, trace_v_both_sides, DiracEnv, DiracOperator, GammaRep, TwistedSpinorField};
use crate::tolerances as tol;
use crate::torsion::{
    delta_a_two_form, field_strength, potential_from_torsion, torsion_from_potential,
    TorsionPotential,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn record(out: &mut Vec<CheckResult>, name: &str, residual: f64, threshold: f64) {
    out.push(CheckResult {
        name: name.to_string(),
        residual,
        threshold,
        pass: residual.is_finite() && residual <= threshold,
    });
}

fn random_mv(rng: &mut ChaCha8Rng, sig: Signature) -> Multivector {
    let coeffs = (0..sig.blade_count())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Multivector::from_coeffs(sig, coeffs).unwrap()
}

/// Clifford-algebra axioms over the standard signature set.
pub fn check_clifford(out: &mut Vec<CheckResult>, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigs = [(2usize, 0usize), (4, 0), (1, 3), (2, 2)];
    let mut assoc: f64 = 0.0;
    let mut relation: f64 = 0.0;
    let mut roundtrip: f64 = 0.0;
    for (p, q) in sigs {
        let sig = Signature::new(p, q, 1).unwrap();
        for _ in 0..200 {
            let a = random_mv(&mut rng, sig);
            let b = random_mv(&mut rng, sig);
            let c = random_mv(&mut rng, sig);
            let l = a.mul(&b).unwrap().mul(&c).unwrap();
            let r = a.mul(&b.mul(&c).unwrap()).unwrap();
            assoc = assoc.max(l.dist_inf(&r) / l.norm_inf().max(1.0));
        }
        // generator relation e^k e^k = eps eta^kk
        for k in 0..sig.dim() {
            let e = Multivector::generator(sig, k);
            let sq = e.mul(&e).unwrap();
            let mut expect = Multivector::zero(sig);
            expect.coeffs[0] = Complex64::new(sig.epsf() * sig.eta(k), 0.0);
            relation = relation.max(sq.dist_inf(&expect));
        }
        let sm = SymbolMap::new(sig);
        for mask in 0..sig.blade_count() {
            let b = Multivector::basis_blade(sig, mask);
            let back = sm.inverse(&sm.forward(&b).unwrap()).unwrap();
            roundtrip = roundtrip.max(back.dist_inf(&b));
        }
    }
    record(out, "clifford_associativity", assoc, tol::ALGEBRA_EXACT);
    record(out, "clifford_generator_relation", relation, tol::ALGEBRA_EXACT);
    record(out, "symbol_map_roundtrip", roundtrip, tol::ALGEBRA_EXACT);
}

/// Gamma representation invariants and the canonical one-form projections.
pub fn check_gamma(out: &mut Vec<CheckResult>, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut anti: f64 = 0.0;
    let mut grading: f64 = 0.0;
    let mut pairing: f64 = 0.0;
    let mut projection: f64 = 0.0;
    for (p, q) in [(2usize, 0usize), (4, 0), (1, 3), (2, 2)] {
        let sig = Signature::new(p, q, 1).unwrap();
        let g = GammaRep::build(sig).unwrap();
        let d = g.d;
        let id = DMatrix::<Complex64>::identity(d, d);
        for a in 0..sig.dim() {
            for b in 0..sig.dim() {
                let s = &g.gammas[a] * &g.gammas[b] + &g.gammas[b] * &g.gammas[a];
                let expect = if a == b {
                    id.map(|x: Complex64| x * Complex64::new(2.0 * sig.epsf() * sig.eta(a), 0.0))
                } else {
                    DMatrix::zeros(d, d)
                };
                anti = anti.max((s - expect).iter().map(|c| c.norm()).fold(0.0, f64::max));
            }
            let gr = &g.tau * &g.gammas[a] + &g.gammas[a] * &g.tau;
            grading = grading.max(gr.iter().map(|c| c.norm()).fold(0.0, f64::max));
            let hp = &g.hermitian_form * &g.gammas[a] + g.gammas[a].adjoint() * &g.hermitian_form;
            pairing = pairing.max(hp.iter().map(|c| c.norm()).fold(0.0, f64::max));
        }
        // p q projection identities on random End-valued one-forms
        for _ in 0..20 {
            let omega = EndValuedOneForm::new(
                sig,
                (0..sig.dim())
                    .map(|_| {
                        DMatrix::from_fn(d, d, |_, _| {
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                        })
                    })
                    .collect(),
            )
            .unwrap();
            let (pp, qq) = project_pq(&omega, &g).unwrap();
            let (ppp, _) = project_pq(&pp, &g).unwrap();
            projection = projection.max(ppp.sub(&pp).unwrap().norm_inf());
            let slash_q = quantize_one_form(&qq, &g).unwrap();
            projection =
                projection.max(slash_q.iter().map(|c| c.norm()).fold(0.0, f64::max));
            let back = quantize_one_form(&ext_theta(&quantize_one_form(&omega, &g).unwrap(), &g), &g)
                .unwrap();
            let orig = quantize_one_form(&omega, &g).unwrap();
            projection = projection.max(
                (back - orig).iter().map(|c| c.norm()).fold(0.0, f64::max),
            );
        }
    }
    record(out, "gamma_anticommutators", anti, tol::GAMMA_EXACT);
    record(out, "gamma_grading_involution", grading, tol::GAMMA_EXACT);
    record(out, "gamma_pairing_antihermitian", pairing, tol::GAMMA_EXACT);
    record(out, "one_form_projections", projection, tol::ALGEBRA_EXACT);
}

/// Torsion potential/tensor roundtrips at n = 4.
pub fn check_torsion_roundtrip(out: &mut Vec<CheckResult>, chart: &MetricChart, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = TorsionPotential::random(chart, &mut rng, 1.0);
        let t = torsion_from_potential(chart, &a).unwrap();
        let back = potential_from_torsion(chart, &t).unwrap();
        for (x, y) in a.data.iter().zip(&back.data) {
            worst = worst.max((x - y).abs());
        }
    }
    record(out, "torsion_roundtrip", worst, tol::TORSION_ROUNDTRIP);
}

/// Discrete adjointness of (d, delta) on scalar forms and the twisted pair.
pub fn check_adjointness(out: &mut Vec<CheckResult>, chart: &MetricChart, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = chart.n();
    let mut worst: f64 = 0.0;
    for k in 0..2usize {
        let mut x = KForm::zeros(chart, k);
        let mut y = KForm::zeros(chart, k + 1);
        for s in chart.sites() {
            for t in crate::geometry::multi_indices(n, k) {
                x.set(s, &t, rng.gen_range(-1.0..1.0));
            }
            for t in crate::geometry::multi_indices(n, k + 1) {
                let mut sorted = t.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let sg = crate::geometry::perm_sign(&t, &[]);
                if sg != 0.0 && sorted == t {
                    y.set(s, &t, rng.gen_range(-1.0..1.0));
                }
            }
        }
        // antisymmetrize y
        let mut ya = KForm::zeros(chart, k + 1);
        for s in chart.sites() {
            for t in crate::geometry::multi_indices(n, k + 1) {
                let mut sorted = t.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let sg = crate::geometry::perm_sign(&t, &[]);
                ya.set(s, &t, sg * y.get(s, &sorted));
            }
        }
        // antisymmetrize x for k = 1 (k = 0 scalars need none)
        let xs = x;
        let lhs = kform_inner(chart, &d_exterior(chart, &xs).unwrap(), &ya);
        let rhs = kform_inner(chart, &xs, &codifferential(chart, &ya).unwrap());
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    // twisted pair on so-valued forms
    let twist = TorsionPotential::random(chart, &mut rng, 0.5);
    let xf = TorsionPotential::random(chart, &mut rng, 1.0);
    let mut y2 = crate::torsion::TorsionFieldStrength::zeros(chart);
    for s in chart.sites() {
        for a in 0..n {
            for b in (a + 1)..n {
                for j in 0..n {
                    for k in (j + 1)..n {
                        let v = rng.gen_range(-1.0..1.0);
                        y2.set(s, a, b, j, k, v);
                        y2.set(s, b, a, j, k, -v);
                        y2.set(s, a, b, k, j, -v);
                        y2.set(s, b, a, k, j, v);
                    }
                }
            }
        }
    }
    let dx = crate::torsion::d_a_one_form(chart, Some(&twist), &xf).unwrap();
    let dy = delta_a_two_form(chart, Some(&twist), &y2).unwrap();
    let lhs = crate::torsion::so_two_inner(chart, &dx, &y2);
    let rhs = crate::torsion::so_one_inner(chart, &xf, &dy);
    worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    record(out, "codifferential_adjointness", worst, tol::ADJOINTNESS);
}

/// Trace identity for the second-order decomposition on random
/// simple-type operators.
pub fn check_trace_identity(
    out: &mut Vec<CheckResult>,
    chart: &MetricChart,
    gamma: &GammaRep,
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let env = DiracEnv::new(chart, gamma);
    let n = chart.n();
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
    let a = TorsionPotential::constant(chart, &block)?;
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for v in m.iter_mut() {
        *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let m_field: Vec<Complex64> = (0..chart.lat.len()).flat_map(|_| m.iter().cloned()).collect();
    let op = DiracOperator::simple_type(Some(a), 1.0, chart, m_field)?;
    let (lhs, rhs) = trace_v_both_sides(&env, &op)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for (l, r) in lhs.iter().zip(&rhs) {
        worst = worst.max((l - r).norm());
        scale = scale.max(l.norm());
    }
    record(out, "second_order_trace_identity", worst / scale, tol::TRACE_IDENTITY);
    Ok(())
}

/// Dense single-site decomposition constants.
pub fn check_decomposition_constants(out: &mut Vec<CheckResult>, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // n = 2 fully dense
    let sig2 = Signature::new(2, 0, 1).unwrap();
    let g2 = GammaRep::build(sig2).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let r = dense::random_riemann(&sig2, &mut rng);
        let (d, c) = dense::trace_gamma_lifted_curvature_full(&sig2, &g2, &r);
        worst = worst.max((d.re - c).abs() / c.abs().max(1.0)).max(d.im.abs());
        let f = dense::random_strength_block(&sig2, &mut rng);
        let (d, c) = dense::trace_phi_squared_full(&sig2, &g2, &f);
        worst = worst.max((d.re - c).abs() / c.abs().max(1.0)).max(d.im.abs());
    }
    record(out, "decomposition_constants_n2_full", worst, tol::DENSE_CONSTANTS);

    // n = 4 single site
    let sig4 = Signature::new(4, 0, 1).unwrap();
    let g4 = GammaRep::build(sig4).unwrap();
    let mut worst4: f64 = 0.0;
    let r = dense::random_riemann(&sig4, &mut rng);
    let (d, c) = dense::trace_gamma_lifted_curvature(&sig4, &g4, &r);
    worst4 = worst4.max((d.re - c).abs() / c.abs().max(1.0));
    let f = dense::random_strength_block(&sig4, &mut rng);
    let (d, c) = dense::trace_phi_squared(&sig4, &g4, &f);
    worst4 = worst4.max((d.re - c).abs() / c.abs().max(1.0));
    record(out, "decomposition_constants_n4_site", worst4, tol::DENSE_CONSTANTS);
}

/// Reality of the fermion bilinear on a flat periodic chart.
pub fn check_fermion_reality(
    out: &mut Vec<CheckResult>,
    chart: &MetricChart,
    gamma: &GammaRep,
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let env = DiracEnv::new(chart, gamma);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let a = TorsionPotential::random(chart, &mut rng, 0.6);
        let psi = TwistedSpinorField::random(chart, gamma, &mut rng, 1.0);
        let op = DiracOperator::quantized_connection(Some(a), 0.1);
        let dpsi = op.apply(&env, &psi)?;
        let v = lattice_pair(gamma, chart, &psi, &dpsi);
        worst = worst.max(v.im.abs() / v.re.abs().max(1.0));
    }
    record(out, "fermion_bilinear_reality", worst, tol::FERMION_REALITY);
    Ok(())
}

/// Analytic action gradient against central finite differences.
pub fn check_gradient(
    out: &mut Vec<CheckResult>,
    chart: &MetricChart,
    gamma: &GammaRep,
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = TorsionPotential::random(chart, &mut rng, 0.3);
    let psi = TwistedSpinorField::random(chart, gamma, &mut rng, 0.8);
    let form = CouplingForm::Rescaled;
    let g = 0.1;
    let grad = action_gradient(chart, gamma, &a, &psi, form, g)?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let da = TorsionPotential::random(chart, &mut rng, 1.0);
        let dpsi = TwistedSpinorField::random(chart, gamma, &mut rng, 1.0);
        let eval = |t: f64| -> Result<f64> {
            let mut at = a.clone();
            at.axpy(t, &da);
            let mut pt = psi.clone();
            pt.axpy(Complex64::new(t, 0.0), &dpsi);
            Ok(total_action(chart, gamma, &at, &pt, form, g)?.total)
        };
        let h = tol::GRADIENT_FD_STEP;
        let fd = (eval(h)? - eval(-h)?) / (2.0 * h);
        let mut an = 0.0;
        let n = chart.n();
        for x in chart.sites() {
            for k in 0..n {
                for i in 0..n {
                    for j in (i + 1)..n {
                        an += grad.grad_a.get(x, k, i, j) * da.get(x, k, i, j);
                    }
                }
            }
        }
        for (gv, dv) in grad.grad_psi.data.iter().zip(&dpsi.data) {
            an += (gv.conj() * dv).re;
        }
        worst = worst.max((fd - an).abs() / fd.abs().max(an.abs()).max(1e-8));
    }
    record(out, "action_gradient_vs_fd", worst, tol::GRADIENT_FD);
    Ok(())
}

/// Flat-chart Bianchi identity on structured random potentials.
pub fn check_bianchi(out: &mut Vec<CheckResult>, chart: &MetricChart, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = chart.n();
    let sites: Vec<usize> = chart.sites().collect();
    let mut worst: f64 = 0.0;
    // random constant potential
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
    let a = TorsionPotential::constant(chart, &block)?;
    let f = field_strength(chart, &a)?;
    worst = worst.max(crate::torsion::bianchi_residual(chart, &a, &f, &sites));
    // spatially varying single-generator potential
    let mut a = TorsionPotential::zeros(chart);
    for x in chart.sites() {
        let c = chart.lat.coords(x);
        for i in 0..n {
            let s = (2.0 * std::f64::consts::PI * c[(i + 1) % n] as f64
                / chart.lat.dims[(i + 1) % n] as f64)
                .sin()
                * 0.4;
            a.set(x, i, 0, 1, s);
            a.set(x, i, 1, 0, -s);
        }
    }
    let f = field_strength(chart, &a)?;
    worst = worst.max(crate::torsion::bianchi_residual(chart, &a, &f, &sites));
    record(out, "flat_bianchi_identity", worst, tol::BIANCHI_FLAT);
    Ok(())
}

/// The complete battery on a standard flat Euclidean 4^4 chart.
pub fn run_battery(seed: u64) -> Result<Vec<CheckResult>> {
    let sig = Signature::new(4, 0, 1)?;
    let chart = MetricChart::build(ChartPreset::Flat, Lattice::cubic(4, 4, 1.0), sig)?;
    let gamma = GammaRep::build(sig)?;
    let mut out = Vec::new();
    check_clifford(&mut out, seed);
    check_gamma(&mut out, seed.wrapping_add(1));
    check_torsion_roundtrip(&mut out, &chart, seed.wrapping_add(2));
    check_adjointness(&mut out, &chart, seed.wrapping_add(3));
    check_trace_identity(&mut out, &chart, &gamma, seed.wrapping_add(4))?;
    check_decomposition_constants(&mut out, seed.wrapping_add(5));
    check_fermion_reality(&mut out, &chart, &gamma, seed.wrapping_add(6))?;
    check_gradient(&mut out, &chart, &gamma, seed.wrapping_add(7))?;
    check_bianchi(&mut out, &chart, seed.wrapping_add(8))?;
    Ok(out)
}

use crate::error::{Error, Result};
use crate::geometry::{integrate, scalar_curvature, MetricChart};
use crate::spinor::{lattice_pair, DiracEnv, DiracOperator, GammaRep, TwistedSpinorField};
use crate::torsion::{field_strength, TorsionPotential};
use serde::{Deserialize, Serialize};

/// Coupling bookkeeping of the total action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingForm {
    /// Literal decomposition: unit Dirac coupling and torsion coefficient
    /// -2^{2n} rk(S).
    Canonical,
    /// Coupling-g form: Dirac coupling g and torsion term
    /// -(1/2g^2) integral tr(F wedge *F) = +(1/4g^2) sum w ||F||^2.
    Rescaled,
}

impl CouplingForm {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "canonical" => Ok(CouplingForm::Canonical),
            "rescaled" => Ok(CouplingForm::Rescaled),
            other => Err(Error::Config(format!("unknown coupling form '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CouplingForm::Canonical => "canonical",
            CouplingForm::Rescaled => "rescaled",
        }
    }

    /// Dirac coupling multiplying the potential term.
    pub fn fermion_coupling(&self, g: f64) -> f64 {
        match self {
            CouplingForm::Canonical => 1.0,
            CouplingForm::Rescaled => g,
        }
    }

    /// Coefficient of sum_x w ||F||^2.
    pub fn torsion_coefficient(&self, sig_dim: usize, rk_s: usize, g: f64) -> f64 {
        match self {
            CouplingForm::Canonical => -(((1usize << (2 * sig_dim)) * rk_s) as f64),
            CouplingForm::Rescaled => 1.0 / (4.0 * g * g),
        }
    }
}

/// Per-term record of the total action.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionBreakdown {
    pub scal_term: f64,
    pub fermion_term: f64,
    pub torsion_term: f64,
    pub total: f64,
    pub form: String,
    pub coupling_g: f64,
    pub lattice: Vec<usize>,
    pub h: Vec<f64>,
    #[serde(skip)]
    pub fermion_term_im: f64,
}

/// rk of the doubly twisted module the scalar term refers to.
pub fn rank_twisted(sig_dim: usize, rk_s: usize) -> usize {
    rk_s * sig_dim * (1 << (2 * sig_dim))
}

/// Total action: scalar-curvature term with coefficient -eps rk(E')/4,
/// fermion bilinear of the Dirac operator with the form's coupling, and
/// the torsion Yang-Mills term.
pub fn total_action(
    chart: &MetricChart,
    gamma: &GammaRep,
    a: &TorsionPotential,
    psi: &TwistedSpinorField,
    form: CouplingForm,
    g: f64,
) -> Result<ActionBreakdown> {
    a.check_shape(chart)?;
    psi.check_shape(chart)?;
    if g <= 0.0 {
        return Err(Error::Config("coupling g must be positive".into()));
    }
    let n = chart.n();
    let rk = rank_twisted(n, gamma.d) as f64;
    let scal = scalar_curvature(chart);
    let scal_term = -chart.sig.epsf() * rk / 4.0 * integrate(chart, &scal);

    let env = DiracEnv::new(chart, gamma);
    let op = DiracOperator::quantized_connection(Some(a.clone()), form.fermion_coupling(g));
    let dpsi = op.apply(&env, psi)?;
    let ferm = lattice_pair(gamma, chart, psi, &dpsi);

    let f = field_strength(chart, a)?;
    let lam = form.torsion_coefficient(n, gamma.d, g);
    let torsion_term: f64 = chart
        .sites()
        .map(|x| chart.weight(x) * f.norm2_density(chart, x))
        .sum::<f64>()
        * lam;

    Ok(ActionBreakdown {
        scal_term,
        fermion_term: ferm.re,
        torsion_term,
        total: scal_term + ferm.re + torsion_term,
        form: form.name().to_string(),
        coupling_g: g,
        lattice: chart.lat.dims.clone(),
        h: chart.lat.h.clone(),
        fermion_term_im: ferm.im,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ChartPreset, Lattice};
    use crate::sig::Signature;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (MetricChart, GammaRep) {
        let sig = Signature::new(4, 0, 1).unwrap();
        let chart =
            MetricChart::build(ChartPreset::Flat, Lattice::cubic(4, 4, 1.0), sig).unwrap();
        let gamma = GammaRep::build(sig).unwrap();
        (chart, gamma)
    }

    #[test]
    fn vacuum_action_vanishes_on_flat_chart() {
        let (chart, gamma) = setup();
        let a = TorsionPotential::zeros(&chart);
        let psi = TwistedSpinorField::zeros(&chart, &gamma);
        let b = total_action(&chart, &gamma, &a, &psi, CouplingForm::Rescaled, 0.1).unwrap();
        assert_eq!(b.scal_term, 0.0);
        assert_eq!(b.fermion_term, 0.0);
        assert_eq!(b.torsion_term, 0.0);
        assert_eq!(b.total, 0.0);
    }

    #[test]
    fn torsion_term_constant_potentials() {
        let (chart, gamma) = setup();
        let psi = TwistedSpinorField::zeros(&chart, &gamma);
        let n = 4;
        // single commuting component: F = 0
        let mut block = vec![0.0; n * n * n];
        block[(0 * n + 0) * n + 1] = 0.4;
        block[(0 * n + 1) * n + 0] = -0.4;
        let a = TorsionPotential::constant(&chart, &block).unwrap();
        let b = total_action(&chart, &gamma, &a, &psi, CouplingForm::Canonical, 0.1).unwrap();
        assert!(b.torsion_term.abs() < 1e-20);

        // two non-commuting components: torsion term is the commutator
        // density times the decomposition constant
        let mut block = vec![0.0; n * n * n];
        block[(0 * n + 0) * n + 1] = 1.0;
        block[(0 * n + 1) * n + 0] = -1.0;
        block[(1 * n + 1) * n + 2] = 1.0;
        block[(1 * n + 2) * n + 1] = -1.0;
        let a = TorsionPotential::constant(&chart, &block).unwrap();
        let b = total_action(&chart, &gamma, &a, &psi, CouplingForm::Canonical, 0.1).unwrap();
        let f = field_strength(&chart, &a).unwrap();
        let dens = f.norm2_density(&chart, 0);
        let vol = 256.0;
        let expect = -(256.0 * 4.0) * vol * dens; // 2^{2n} rk(S) * integral
        assert!(
            (b.torsion_term - expect).abs() / expect.abs() < 1e-12,
            "{} vs {expect}",
            b.torsion_term
        );
        // and the density itself matches the dense single-site trace
        let mut fblock = vec![0.0; n * n * n * n];
        for ai in 0..n {
            for bi in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        fblock[((ai * n + bi) * n + j) * n + k] = f.get(0, ai, bi, j, k);
                    }
                }
            }
        }
        let (dense, expect_tr) =
            crate::dense::trace_phi_squared(&chart.sig, &gamma, &fblock);
        assert!((dense.re - expect_tr).abs() / expect_tr.abs().max(1.0) < 1e-12);
    }

    #[test]
    fn scal_coefficient_on_sphere() {
        // scal_term / integral(scal) = -eps rk(E')/4 on the sphere preset
        let sig = Signature::new(2, 0, 1).unwrap();
        let chart = MetricChart::build(
            ChartPreset::Sphere2 { radius: 1.0 },
            Lattice::new(vec![24, 8], vec![0.02, 0.02]),
            sig,
        )
        .unwrap();
        let gamma = GammaRep::build(sig).unwrap();
        let a = TorsionPotential::zeros(&chart);
        let psi = TwistedSpinorField::zeros(&chart, &gamma);
        let b = total_action(&chart, &gamma, &a, &psi, CouplingForm::Rescaled, 0.1).unwrap();
        let scal = scalar_curvature(&chart);
        let int_scal = integrate(&chart, &scal);
        let rk = rank_twisted(2, 2) as f64; // 2 * 2 * 16 = 64
        assert!((b.scal_term / int_scal + rk / 4.0).abs() < 1e-9);
    }

    #[test]
    fn fermion_term_real_on_periodic_charts() {
        let (chart, gamma) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = TorsionPotential::random(&chart, &mut rng, 0.5);
            let psi = TwistedSpinorField::random(&chart, &gamma, &mut rng, 1.0);
            let b = total_action(&chart, &gamma, &a, &psi, CouplingForm::Rescaled, 0.1).unwrap();
            assert!(
                b.fermion_term_im.abs() <= 1e-10 * b.fermion_term.abs().max(1.0),
                "Im = {}",
                b.fermion_term_im
            );
        }
    }
}

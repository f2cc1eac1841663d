use crate::error::{Error, Result};
use crate::geometry::MetricChart;
use crate::spinor::field::TwistedSpinorField;
use crate::spinor::GammaRep;
use crate::torsion::TorsionPotential;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

type CMat = DMatrix<Complex64>;
type CVec = DVector<Complex64>;

/// Pointwise (zero-order) part added to the quantized connection.
#[derive(Debug, Clone)]
pub enum ZeroOrderPart {
    None,
    /// tau_E phi with phi = Id_S (x) m(x): the endomorphism m acts on the
    /// tangent legs and commutes with the Clifford action; m is stored
    /// row-major per site, (m v)^j = sum_k m[j][k] v^k.
    SimpleType { m: Vec<Complex64>, n: usize },
    /// Arbitrary pointwise fiber matrices (dn x dn), one per site.
    General { mats: Vec<CMat> },
}

/// Dirac operator on the twisted spinor bundle: quantization of the spin
/// (x) metric connection with torsion potential, plus an optional
/// zero-order part.
#[derive(Debug, Clone)]
pub struct DiracOperator {
    /// Coupling multiplying the potential term (1 for the bare metric
    /// connection, the gauge coupling in rescaled form).
    pub coupling: f64,
    pub potential: Option<TorsionPotential>,
    pub zero_order: ZeroOrderPart,
}

impl DiracOperator {
    pub fn quantized_connection(potential: Option<TorsionPotential>, coupling: f64) -> Self {
        DiracOperator {
            coupling,
            potential,
            zero_order: ZeroOrderPart::None,
        }
    }

    pub fn simple_type(
        potential: Option<TorsionPotential>,
        coupling: f64,
        chart: &MetricChart,
        m_field: Vec<Complex64>,
    ) -> Result<Self> {
        let n = chart.n();
        if m_field.len() != chart.lat.len() * n * n {
            return Err(Error::DimensionMismatch("leg endomorphism field".into()));
        }
        Ok(DiracOperator {
            coupling,
            potential,
            zero_order: ZeroOrderPart::SimpleType { m: m_field, n },
        })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.zero_order {
            ZeroOrderPart::None => "quantized_clifford",
            ZeroOrderPart::SimpleType { .. } => "simple_type",
            ZeroOrderPart::General { .. } => "general",
        }
    }
}

/// Expand a spinor-space matrix to the dn fiber (block diagonal over legs).
pub fn spinor_to_fiber(m: &CMat, n: usize) -> CMat {
    let d = m.nrows();
    let mut out = CMat::zeros(n * d, n * d);
    for leg in 0..n {
        for a in 0..d {
            for b in 0..d {
                out[(leg * d + a, leg * d + b)] = m[(a, b)];
            }
        }
    }
    out
}

/// Expand a leg-space matrix (acting on the TM factor, plain row-column
/// convention) to the dn fiber.
pub fn leg_to_fiber(m: &CMat, d: usize) -> CMat {
    let n = m.nrows();
    let mut out = CMat::zeros(n * d, n * d);
    for j in 0..n {
        for k in 0..n {
            if m[(j, k)] != Complex64::new(0.0, 0.0) {
                for a in 0..d {
                    out[(j * d + a, k * d + a)] = m[(j, k)];
                }
            }
        }
    }
    out
}

/// Leg endomorphism of the potential slot a at site x, plain convention:
/// (A_a v)^j = eta^jj sum_m A[a][m][j] v^m.
pub fn potential_leg_matrix(
    chart: &MetricChart,
    pot: &TorsionPotential,
    x: usize,
    a: usize,
) -> CMat {
    let n = chart.n();
    CMat::from_fn(n, n, |j, m| {
        Complex64::new(chart.sig.eta(j) * pot.get(x, a, m, j), 0.0)
    })
}

/// Evaluation context shared by the pointwise Dirac machinery.
pub struct DiracEnv<'a> {
    pub chart: &'a MetricChart,
    pub gamma: &'a GammaRep,
    /// gamma^a as fiber matrices
    pub gfiber: Vec<CMat>,
    /// grading involution on the fiber
    pub tau_fiber: CMat,
}

impl<'a> DiracEnv<'a> {
    pub fn new(chart: &'a MetricChart, gamma: &'a GammaRep) -> Self {
        let n = chart.n();
        let gfiber = (0..n).map(|a| spinor_to_fiber(&gamma.gammas[a], n)).collect();
        let tau_fiber = spinor_to_fiber(&gamma.tau, n);
        DiracEnv {
            chart,
            gamma,
            gfiber,
            tau_fiber,
        }
    }

    #[inline]
    pub fn fiber_dim(&self) -> usize {
        self.chart.n() * self.gamma.d
    }

    /// Wrapped lattice site of an integer offset from a base site.
    pub fn site_at(&self, base: usize, off: &[isize]) -> usize {
        let mut s = base;
        for (axis, &o) in off.iter().enumerate() {
            if o != 0 {
                s = self.chart.lat.shift(s, axis, o);
            }
        }
        s
    }

    /// Spin connection coefficient sigma_a(x) = (eps/4) omega_{a,bc}
    /// gamma^b gamma^c on the spinor factor, expanded to the fiber, plus
    /// the Levi-Civita rotation of the tangent leg.
    pub fn connection_matrix(&self, x: usize, a: usize) -> CMat {
        let n = self.chart.n();
        let d = self.gamma.d;
        let f = n * d;
        let mut out = CMat::zeros(f, f);
        if self.chart.is_flat_preset() {
            return out;
        }
        // spinor part
        let mut sig = CMat::zeros(d, d);
        for b in 0..n {
            for c in 0..n {
                let w = self.chart.omega(x, a, b, c);
                if w != 0.0 {
                    sig += (&self.gamma.gammas[b] * &self.gamma.gammas[c])
                        .map(|v| v * Complex64::new(0.25 * self.chart.sig.epsf() * w, 0.0));
                }
            }
        }
        out += spinor_to_fiber(&sig, n);
        // leg part: (nabla_a v)^j += omega_a{}^j{}_m v^m
        let leg = CMat::from_fn(n, n, |j, m| {
            Complex64::new(self.chart.omega_raised(x, a, j, m), 0.0)
        });
        out += leg_to_fiber(&leg, d);
        out
    }
}

/// Fields for pointwise application are closures over integer offsets from
/// a base site. Operator coefficients wrap periodically; the field sees the
/// universal cover, which keeps locally linear probe functions exactly
/// linear across the seam of small lattices.
pub type OffsetField<'f> = dyn Fn(&[isize]) -> CVec + 'f;

fn shifted(off: &[isize], axis: usize, step: isize) -> Vec<isize> {
    let mut o = off.to_vec();
    o[axis] += step;
    o
}

/// Covariant derivative (nabla_a psi)(base + off) for an offset field.
pub fn covariant_at_off(
    env: &DiracEnv,
    base: usize,
    off: &[isize],
    a: usize,
    field: &OffsetField,
) -> CVec {
    let chart = env.chart;
    let n = chart.n();
    let x = env.site_at(base, off);
    let mut out = CVec::zeros(env.fiber_dim());
    for mu in 0..n {
        let e = chart.e(x, mu, a);
        if e != 0.0 {
            let c = Complex64::new(e / (2.0 * chart.lat.h[mu]), 0.0);
            let fp = field(&shifted(off, mu, 1));
            let fm = field(&shifted(off, mu, -1));
            out += (fp - fm).map(|v| v * c);
        }
    }
    if !chart.is_flat_preset() {
        out += env.connection_matrix(x, a) * field(off);
    }
    out
}

/// Covariant derivative of a periodic field given by a site closure.
pub fn covariant_at(env: &DiracEnv, x: usize, a: usize, field: &dyn Fn(usize) -> CVec) -> CVec {
    let n = env.chart.n();
    let zero = vec![0isize; n];
    covariant_at_off(env, x, &zero, a, &|off: &[isize]| field(env.site_at(x, off)))
}

impl DiracOperator {
    /// Pointwise mass-type matrix at a site (everything except the
    /// quantized covariant derivative).
    pub fn zero_order_matrix(&self, env: &DiracEnv, x: usize) -> CMat {
        let f = env.fiber_dim();
        let n = env.chart.n();
        let d = env.gamma.d;
        let mut out = CMat::zeros(f, f);
        if let Some(pot) = &self.potential {
            for a in 0..n {
                let leg = potential_leg_matrix(env.chart, pot, x, a);
                let term = &env.gfiber[a] * leg_to_fiber(&leg, d);
                out += term.map(|v| v * Complex64::new(self.coupling, 0.0));
            }
        }
        match &self.zero_order {
            ZeroOrderPart::None => {}
            ZeroOrderPart::SimpleType { m, n: nn } => {
                let leg = CMat::from_fn(*nn, *nn, |j, k| m[(x * nn + j) * nn + k]);
                out += &env.tau_fiber * leg_to_fiber(&leg, d);
            }
            ZeroOrderPart::General { mats } => {
                out += &mats[x];
            }
        }
        out
    }

    /// Apply at base + off to an offset field.
    pub fn apply_at_off(
        &self,
        env: &DiracEnv,
        base: usize,
        off: &[isize],
        field: &OffsetField,
    ) -> CVec {
        let n = env.chart.n();
        let x = env.site_at(base, off);
        let mut out = CVec::zeros(env.fiber_dim());
        for a in 0..n {
            out += &env.gfiber[a] * covariant_at_off(env, base, off, a, field);
        }
        out += self.zero_order_matrix(env, x) * field(off);
        out
    }

    /// Apply at one site to a periodic field given as a site closure.
    pub fn apply_at(&self, env: &DiracEnv, x: usize, field: &dyn Fn(usize) -> CVec) -> CVec {
        let zero = vec![0isize; env.chart.n()];
        self.apply_at_off(env, x, &zero, &|off: &[isize]| field(env.site_at(x, off)))
    }

    /// Global application.
    pub fn apply(&self, env: &DiracEnv, psi: &TwistedSpinorField) -> Result<TwistedSpinorField> {
        psi.check_shape(env.chart)?;
        if let Some(pot) = &self.potential {
            pot.check_shape(env.chart)?;
        }
        let mut out = TwistedSpinorField::zeros(env.chart, env.gamma);
        let getter = |y: usize| psi.fiber(y);
        for x in env.chart.sites() {
            let v = self.apply_at(env, x, &getter);
            out.set_fiber(x, &v);
        }
        Ok(out)
    }

    /// D acting twice at base + off on an offset field.
    pub fn apply_squared_at_off(
        &self,
        env: &DiracEnv,
        base: usize,
        off: &[isize],
        field: &OffsetField,
    ) -> CVec {
        let inner = |o2: &[isize]| self.apply_at_off(env, base, o2, field);
        self.apply_at_off(env, base, off, &inner)
    }

    /// D acting twice, on a periodic site-closure field.
    pub fn apply_squared_at(&self, env: &DiracEnv, x: usize, field: &dyn Fn(usize) -> CVec) -> CVec {
        let zero = vec![0isize; env.chart.n()];
        self.apply_squared_at_off(env, x, &zero, &|off: &[isize]| field(env.site_at(x, off)))
    }

    /// On-site block of the operator: its action on a delta section at the
    /// cover origin, read off at the same point. Stencil parts drop out,
    /// the pointwise part survives.
    pub fn onsite_block(&self, env: &DiracEnv, x: usize) -> CMat {
        let f = env.fiber_dim();
        let zero = vec![0isize; env.chart.n()];
        let mut out = CMat::zeros(f, f);
        for col in 0..f {
            let delta = |off: &[isize]| {
                let mut v = CVec::zeros(f);
                if off.iter().all(|&o| o == 0) {
                    v[col] = Complex64::new(1.0, 0.0);
                }
                v
            };
            let image = self.apply_at_off(env, x, &zero, &delta);
            for row in 0..f {
                out[(row, col)] = image[row];
            }
        }
        out
    }

    /// Adjoint application with respect to the plain unweighted l2 product
    /// (flat charts; used by the least-squares Dirac solver).
    pub fn apply_adjoint_plain(
        &self,
        env: &DiracEnv,
        psi: &TwistedSpinorField,
    ) -> Result<TwistedSpinorField> {
        if !env.chart.is_flat_preset() {
            return Err(Error::Chart(
                "plain adjoint application requires the flat preset".into(),
            ));
        }
        psi.check_shape(env.chart)?;
        let chart = env.chart;
        let n = chart.n();
        let mut out = TwistedSpinorField::zeros(chart, env.gamma);
        // derivative part: adjoint of sum_a G_a D_a is -sum_a G_a^dagger D_a
        let gadj: Vec<CMat> = env.gfiber.iter().map(|g| g.adjoint()).collect();
        for x in chart.sites() {
            let mut acc = CVec::zeros(env.fiber_dim());
            for a in 0..n {
                let xp = chart.lat.shift(x, a, 1);
                let xm = chart.lat.shift(x, a, -1);
                let c = Complex64::new(-1.0 / (2.0 * chart.lat.h[a]), 0.0);
                acc += &gadj[a] * (psi.fiber(xp) - psi.fiber(xm)).map(|v| v * c);
            }
            acc += self.zero_order_matrix(env, x).adjoint() * psi.fiber(x);
            out.set_fiber(x, &acc);
        }
        Ok(out)
    }
}

/// Twister of a connection: T psi = nabla psi - Theta(D-slash psi), an
/// E1-valued one-form whose quantization contraction vanishes.
pub struct SpinorOneForm {
    pub n: usize,
    pub d: usize,
    pub sites: usize,
    /// [site][form a][leg k][alpha]
    pub data: Vec<Complex64>,
}

impl SpinorOneForm {
    #[inline]
    pub fn get(&self, x: usize, a: usize, leg: usize, alpha: usize) -> Complex64 {
        self.data[((x * self.n + a) * self.n + leg) * self.d + alpha]
    }
}

pub fn twister(
    env: &DiracEnv,
    connection: &DiracOperator,
    psi: &TwistedSpinorField,
) -> Result<SpinorOneForm> {
    if !matches!(connection.zero_order, ZeroOrderPart::None) {
        return Err(Error::InvalidInput(
            "twister is defined for connections (no zero-order part)".into(),
        ));
    }
    psi.check_shape(env.chart)?;
    let chart = env.chart;
    let n = chart.n();
    let d = env.gamma.d;
    let slashed = connection.apply(env, psi)?;
    let mut out = SpinorOneForm {
        n,
        d,
        sites: chart.lat.len(),
        data: vec![Complex64::new(0.0, 0.0); chart.lat.len() * n * n * d],
    };
    let getter = |y: usize| psi.fiber(y);
    for x in chart.sites() {
        for a in 0..n {
            let mut v = covariant_at(env, x, a, &getter);
            // potential part of the connection in slot a
            if let Some(pot) = &connection.potential {
                let leg = potential_leg_matrix(chart, pot, x, a);
                v += leg_to_fiber(&leg, d)
                    * psi
                        .fiber(x)
                        .map(|z| z * Complex64::new(connection.coupling, 0.0));
            }
            // Theta_a (D psi) = (eps/n) eta_aa gamma^a (D psi)
            let c = Complex64::new(chart.sig.epsf() * chart.sig.eta(a) / n as f64, 0.0);
            v -= (&env.gfiber[a] * slashed.fiber(x)).map(|z| z * c);
            for leg in 0..n {
                for alpha in 0..d {
                    out.data[((x * n + a) * n + leg) * d + alpha] = v[leg * d + alpha];
                }
            }
        }
    }
    Ok(out)
}

/// Contraction sum_a gamma^a (T psi)_a, which must vanish for a twister.
pub fn twister_contraction(env: &DiracEnv, t: &SpinorOneForm) -> f64 {
    let n = t.n;
    let d = t.d;
    let mut worst: f64 = 0.0;
    for x in 0..t.sites {
        let mut acc = CVec::zeros(n * d);
        for a in 0..n {
            let mut v = CVec::zeros(n * d);
            for leg in 0..n {
                for alpha in 0..d {
                    v[leg * d + alpha] = t.get(x, a, leg, alpha);
                }
            }
            acc += &env.gfiber[a] * v;
        }
        worst = worst.max(acc.iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    worst
}

use crate::error::{Error, Result};
use crate::geometry::MetricChart;
use crate::spinor::GammaRep;
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

/// Twisted spinor field psi = sum_k psi^k (x) e_k: per site, n spinor legs
/// of dimension d. Storage layout: [site][leg k][spinor alpha].
#[derive(Debug, Clone)]
pub struct TwistedSpinorField {
    pub n: usize,
    pub d: usize,
    pub sites: usize,
    pub data: Vec<Complex64>,
}

impl TwistedSpinorField {
    pub fn zeros(chart: &MetricChart, gamma: &GammaRep) -> Self {
        TwistedSpinorField {
            n: chart.n(),
            d: gamma.d,
            sites: chart.lat.len(),
            data: vec![Complex64::new(0.0, 0.0); chart.lat.len() * chart.n() * gamma.d],
        }
    }

    pub fn check_shape(&self, chart: &MetricChart) -> Result<()> {
        if self.n != chart.n() || self.sites != chart.lat.len() {
            return Err(Error::LatticeMismatch("spinor field vs chart".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn fiber_dim(&self) -> usize {
        self.n * self.d
    }

    #[inline]
    pub fn get(&self, x: usize, leg: usize, alpha: usize) -> Complex64 {
        self.data[(x * self.n + leg) * self.d + alpha]
    }

    #[inline]
    pub fn set(&mut self, x: usize, leg: usize, alpha: usize, v: Complex64) {
        self.data[(x * self.n + leg) * self.d + alpha] = v;
    }

    /// Full fiber value at a site as one dn-vector ordered [leg][alpha].
    pub fn fiber(&self, x: usize) -> DVector<Complex64> {
        let f = self.fiber_dim();
        DVector::from_iterator(f, self.data[x * f..(x + 1) * f].iter().cloned())
    }

    pub fn set_fiber(&mut self, x: usize, v: &DVector<Complex64>) {
        let f = self.fiber_dim();
        for i in 0..f {
            self.data[x * f + i] = v[i];
        }
    }

    pub fn random<R: Rng>(chart: &MetricChart, gamma: &GammaRep, rng: &mut R, amp: f64) -> Self {
        let mut out = Self::zeros(chart, gamma);
        for v in out.data.iter_mut() {
            *v = Complex64::new(amp * rng.gen_range(-1.0..1.0), amp * rng.gen_range(-1.0..1.0));
        }
        out
    }

    /// Same spinor on every leg at every site.
    pub fn constant_uniform(chart: &MetricChart, gamma: &GammaRep, u: &[Complex64]) -> Self {
        let mut out = Self::zeros(chart, gamma);
        for x in 0..out.sites {
            for k in 0..out.n {
                for a in 0..out.d {
                    out.set(x, k, a, u[a]);
                }
            }
        }
        out
    }

    /// Constant field with one prescribed spinor per leg.
    pub fn constant_legs(chart: &MetricChart, gamma: &GammaRep, legs: &[Vec<Complex64>]) -> Self {
        let mut out = Self::zeros(chart, gamma);
        for x in 0..out.sites {
            for k in 0..out.n {
                for a in 0..out.d {
                    out.set(x, k, a, legs[k][a]);
                }
            }
        }
        out
    }

    /// Constant-amplitude legs modulated by distinct lattice momenta so
    /// that every leg pair beats with a nonzero wavevector: leg k carries
    /// exp(i 2 pi (k+1) x_0 / L_0).
    pub fn modulated_legs(chart: &MetricChart, gamma: &GammaRep, amp: f64) -> Self {
        let mut out = Self::zeros(chart, gamma);
        let l0 = chart.lat.dims[0] as f64;
        for x in 0..out.sites {
            let c0 = chart.lat.coords(x)[0] as f64;
            for k in 0..out.n {
                let phase = 2.0 * std::f64::consts::PI * (k + 1) as f64 * c0 / l0;
                let ph = Complex64::new(0.0, phase).exp();
                for a in 0..out.d {
                    // deterministic leg pattern
                    let base = Complex64::new(
                        ((a + 1) as f64 * 0.4 + k as f64 * 0.15).cos(),
                        ((a + 2) as f64 * 0.3 - k as f64 * 0.2).sin(),
                    );
                    out.set(x, k, a, base * ph * amp);
                }
            }
        }
        out
    }

    /// Plane wave u e^{i k.x} with the same profile on every leg.
    pub fn plane_wave(
        chart: &MetricChart,
        gamma: &GammaRep,
        u: &[Complex64],
        mode: &[i64],
    ) -> Self {
        let mut out = Self::zeros(chart, gamma);
        for x in 0..out.sites {
            let coords = chart.lat.coords(x);
            let phase: f64 = coords
                .iter()
                .zip(mode)
                .zip(&chart.lat.dims)
                .map(|((&c, &m), &l)| 2.0 * std::f64::consts::PI * m as f64 * c as f64 / l as f64)
                .sum();
            let ph = Complex64::new(0.0, phase).exp();
            for k in 0..out.n {
                for a in 0..out.d {
                    out.set(x, k, a, u[a] * ph);
                }
            }
        }
        out
    }

    pub fn axpy(&mut self, a: Complex64, other: &Self) {
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
    }

    pub fn scale(&mut self, a: Complex64) {
        for x in self.data.iter_mut() {
            *x *= a;
        }
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Plain l2 inner product sum conj(x) y (no metric weights); used by
    /// least-squares solvers.
    pub fn dot_plain(&self, other: &Self) -> Complex64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_plain(&self) -> f64 {
        self.dot_plain(self).re.sqrt()
    }
}

/// Fiber pairing <psi, chi>_E1 (x) = sum_k eta_kk <psi^k, chi^k>_S.
pub fn fiber_pair(
    gamma: &GammaRep,
    chart: &MetricChart,
    psi: &TwistedSpinorField,
    chi: &TwistedSpinorField,
    x: usize,
) -> Complex64 {
    let d = gamma.d;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..psi.n {
        let eta = Complex64::new(chart.sig.eta(k), 0.0);
        for a in 0..d {
            for b in 0..d {
                acc += eta * psi.get(x, k, a).conj() * gamma.hermitian_form[(a, b)]
                    * chi.get(x, k, b);
            }
        }
    }
    acc
}

/// Weighted lattice pairing sum_x w(x) <psi, chi>_E1(x).
pub fn lattice_pair(
    gamma: &GammaRep,
    chart: &MetricChart,
    psi: &TwistedSpinorField,
    chi: &TwistedSpinorField,
) -> Complex64 {
    chart
        .sites()
        .map(|x| Complex64::new(chart.weight(x), 0.0) * fiber_pair(gamma, chart, psi, chi, x))
        .sum()
}

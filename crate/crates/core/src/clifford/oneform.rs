use crate::error::{Error, Result};
use crate::sig::Signature;
use crate::spinor::GammaRep;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// End-valued one-form: omega = sum_i e^i (x) omega_i with d x d complex
/// matrix coefficients in an orthonormal co-frame.
#[derive(Debug, Clone)]
pub struct EndValuedOneForm {
    pub sig: Signature,
    pub rep_dim: usize,
    pub entries: Vec<DMatrix<Complex64>>,
}

impl EndValuedOneForm {
    pub fn zero(sig: Signature, rep_dim: usize) -> Self {
        EndValuedOneForm {
            sig,
            rep_dim,
            entries: vec![DMatrix::zeros(rep_dim, rep_dim); sig.dim()],
        }
    }

    pub fn new(sig: Signature, entries: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if entries.len() != sig.dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} one-form entries, got {}",
                sig.dim(),
                entries.len()
            )));
        }
        let rep_dim = entries[0].nrows();
        for m in &entries {
            if m.nrows() != rep_dim || m.ncols() != rep_dim {
                return Err(Error::DimensionMismatch("ragged one-form entries".into()));
            }
        }
        Ok(EndValuedOneForm {
            sig,
            rep_dim,
            entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(EndValuedOneForm {
            sig: self.sig,
            rep_dim: self.rep_dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries
            .iter()
            .flat_map(|m| m.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.sig != other.sig || self.rep_dim != other.rep_dim {
            return Err(Error::DimensionMismatch("one-form shapes differ".into()));
        }
        Ok(())
    }
}

/// Quantization of an End-valued one-form: sum_i gamma^i omega_i.
pub fn quantize_one_form(omega: &EndValuedOneForm, gamma: &GammaRep) -> Result<DMatrix<Complex64>> {
    if gamma.sig != omega.sig || gamma.d != omega.rep_dim {
        return Err(Error::DimensionMismatch(
            "gamma representation does not match one-form".into(),
        ));
    }
    let mut out = DMatrix::zeros(gamma.d, gamma.d);
    for (i, w) in omega.entries.iter().enumerate() {
        out += &gamma.gammas[i] * w;
    }
    Ok(out)
}

/// Canonical one-form Theta_i = (eps/n) eta_ii gamma^i, normalized so that
/// quantize(ext_theta(Phi)) = Phi.
pub fn theta(gamma: &GammaRep) -> EndValuedOneForm {
    let sig = gamma.sig;
    let n = sig.dim() as f64;
    let entries = (0..sig.dim())
        .map(|i| {
            let c = Complex64::new(sig.epsf() * sig.eta(i) / n, 0.0);
            gamma.gammas[i].map(|x| x * c)
        })
        .collect();
    EndValuedOneForm {
        sig,
        rep_dim: gamma.d,
        entries,
    }
}

/// Right inverse of the quantization map: Phi -> Theta * Phi componentwise.
pub fn ext_theta(phi: &DMatrix<Complex64>, gamma: &GammaRep) -> EndValuedOneForm {
    let th = theta(gamma);
    EndValuedOneForm {
        sig: gamma.sig,
        rep_dim: gamma.d,
        entries: th.entries.iter().map(|t| t * phi).collect(),
    }
}

/// Projection pair on End-valued one-forms:
/// p(omega) = ext_theta(quantize(omega)), q(omega) = omega - p(omega).
pub fn project_pq(
    omega: &EndValuedOneForm,
    gamma: &GammaRep,
) -> Result<(EndValuedOneForm, EndValuedOneForm)> {
    let slash = quantize_one_form(omega, gamma)?;
    let p = ext_theta(&slash, gamma);
    let q = omega.sub(&p)?;
    Ok((p, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor::GammaRep;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(d, d, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn random_one_form(rng: &mut ChaCha8Rng, sig: Signature, d: usize) -> EndValuedOneForm {
        EndValuedOneForm::new(sig, (0..sig.dim()).map(|_| random_matrix(rng, d)).collect())
            .unwrap()
    }

    #[test]
    fn quantize_basis_one_form_gives_gamma() {
        let sig = Signature::new(4, 0, 1).unwrap();
        let g = GammaRep::build(sig).unwrap();
        let mut omega = EndValuedOneForm::zero(sig, g.d);
        omega.entries[0] = DMatrix::identity(g.d, g.d);
        let q = quantize_one_form(&omega, &g).unwrap();
        assert!((&q - &g.gammas[0]).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-15);
    }

    #[test]
    fn right_inverse_property() {
        // quantize(ext_theta(Phi)) = Phi for 50 random Phi.
        for (p, q) in [(4, 0), (1, 3), (2, 2), (2, 0)] {
            for eps in [1i8, -1] {
                let sig = Signature::new(p, q, eps).unwrap();
                let g = GammaRep::build(sig).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(5);
                for _ in 0..50 {
                    let phi = random_matrix(&mut rng, g.d);
                    let back = quantize_one_form(&ext_theta(&phi, &g), &g).unwrap();
                    let err = (&back - &phi).iter().map(|c| c.norm()).fold(0.0, f64::max);
                    assert!(err < 1e-12, "({p},{q},{eps}) err {err}");
                }
            }
        }
    }

    #[test]
    fn theta_component_value() {
        // n = 4, Euclidean, eps = +1: Theta_1 = gamma^1 / 4.
        let sig = Signature::new(4, 0, 1).unwrap();
        let g = GammaRep::build(sig).unwrap();
        let th = theta(&g);
        let expect = g.gammas[0].map(|x| x * Complex64::new(0.25, 0.0));
        assert!((&th.entries[0] - expect).iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-15);
    }

    #[test]
    fn projection_identities() {
        let sig = Signature::new(2, 0, 1).unwrap();
        let g = GammaRep::build(sig).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let omega = random_one_form(&mut rng, sig, g.d);
            let (p, q) = project_pq(&omega, &g).unwrap();
            // completeness
            let sum = EndValuedOneForm::new(
                sig,
                p.entries
                    .iter()
                    .zip(&q.entries)
                    .map(|(a, b)| a + b)
                    .collect(),
            )
            .unwrap();
            assert!(sum.sub(&omega).unwrap().norm_inf() < 1e-13);
            // p is idempotent
            let (pp, _) = project_pq(&p, &g).unwrap();
            assert!(pp.sub(&p).unwrap().norm_inf() < 1e-12);
            // q lands in the kernel of the quantization map
            let slash_q = quantize_one_form(&q, &g).unwrap();
            assert!(slash_q.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12);
        }
    }

    #[test]
    fn image_of_ext_theta_is_p_invariant() {
        let sig = Signature::new(4, 0, 1).unwrap();
        let g = GammaRep::build(sig).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = random_matrix(&mut rng, g.d);
        let omega = ext_theta(&phi, &g);
        let (p, q) = project_pq(&omega, &g).unwrap();
        assert!(p.sub(&omega).unwrap().norm_inf() < 1e-12);
        assert!(q.norm_inf() < 1e-12);
    }

    #[test]
    fn ext_theta_of_zero() {
        let sig = Signature::new(4, 0, 1).unwrap();
        let g = GammaRep::build(sig).unwrap();
        let z = ext_theta(&DMatrix::zeros(g.d, g.d), &g);
        assert!(z.norm_inf() == 0.0);
    }
}

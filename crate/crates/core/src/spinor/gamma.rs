use crate::clifford::Multivector;
use crate::error::{Error, Result};
use crate::sig::Signature;
use nalgebra::DMatrix;
use num_complex::Complex64;

type CMat = DMatrix<Complex64>;

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMat::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

fn pauli() -> (CMat, CMat, CMat) {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let s1 = CMat::from_row_slice(2, 2, &[z, o, o, z]);
    let s2 = CMat::from_row_slice(2, 2, &[z, -i, i, z]);
    let s3 = CMat::from_row_slice(2, 2, &[o, z, z, -o]);
    (s1, s2, s3)
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Irreducible gamma-matrix representation for an even-dimensional
/// signature, with grading involution and an invertible hermitian pairing
/// under which the Clifford action is anti-hermitian.
#[derive(Debug, Clone)]
pub struct GammaRep {
    pub sig: Signature,
    /// Spinor dimension 2^{n/2}.
    pub d: usize,
    /// Generators gamma^1 .. gamma^n satisfying
    /// gamma^a gamma^b + gamma^b gamma^a = 2 eps eta^{ab} Id.
    pub gammas: Vec<CMat>,
    /// Grading involution: squares to Id, anticommutes with every gamma^a.
    pub tau: CMat,
    /// Pairing matrix H = H^dagger with H gamma^a = -(gamma^a)^dagger H.
    pub hermitian_form: CMat,
}

impl GammaRep {
    pub fn build(sig: Signature) -> Result<Self> {
        let n = sig.dim();
        if n % 2 != 0 {
            return Err(Error::Signature("gamma ladder needs even n".into()));
        }
        let (s1, s2, s3) = pauli();

        // Euclidean ladder: each extension tensors the previous generators
        // with sigma_3 and appends I (x) sigma_1, I (x) sigma_2.
        let mut base: Vec<CMat> = vec![s1.clone(), s2.clone()];
        let mut dim = 2usize;
        while base.len() < n {
            let eye = CMat::identity(dim, dim);
            let mut next: Vec<CMat> = base.iter().map(|g| kron(g, &s3)).collect();
            next.push(kron(&eye, &s1));
            next.push(kron(&eye, &s2));
            base = next;
            dim *= 2;
        }
        let d = dim;

        // Phase per generator so that (gamma^a)^2 = eps eta^aa Id.
        let gammas: Vec<CMat> = (0..n)
            .map(|a| {
                if sig.epsf() * sig.eta(a) > 0.0 {
                    base[a].clone()
                } else {
                    base[a].map(|x| x * Complex64::new(0.0, 1.0))
                }
            })
            .collect();

        // Grading involution: normalized product of all generators.
        let mut t = CMat::identity(d, d);
        for g in &gammas {
            t = &t * g;
        }
        let tsq = &t * &t;
        let lambda = tsq[(0, 0)];
        if max_abs(&(&tsq - CMat::identity(d, d).map(|x: Complex64| x * lambda))) > 1e-12 {
            return Err(Error::Numerical("chirality square is not scalar".into()));
        }
        let mu = lambda.sqrt();
        let tau = t.map(|x| x / mu);

        let hermitian_form = build_pairing(&gammas, d)?;

        let rep = GammaRep {
            sig,
            d,
            gammas,
            tau,
            hermitian_form,
        };
        rep.assert_invariants()?;
        Ok(rep)
    }

    /// Construction-time checks: Clifford relations, grading, pairing and
    /// the right-inverse normalization of the canonical one-form.
    fn assert_invariants(&self) -> Result<()> {
        let d = self.d;
        let id = CMat::identity(d, d);
        for a in 0..self.sig.dim() {
            for b in 0..self.sig.dim() {
                let anti = &self.gammas[a] * &self.gammas[b] + &self.gammas[b] * &self.gammas[a];
                let expect = if a == b {
                    id.map(|x: Complex64| x * Complex64::new(2.0 * self.sig.epsf() * self.sig.eta(a), 0.0))
                } else {
                    CMat::zeros(d, d)
                };
                if max_abs(&(anti - expect)) > 1e-12 {
                    return Err(Error::Numerical(format!(
                        "Clifford relation failed at ({a},{b})"
                    )));
                }
            }
            let g = &self.gammas[a];
            if max_abs(&(&self.tau * g + g * &self.tau)) > 1e-12 {
                return Err(Error::Numerical("grading does not anticommute".into()));
            }
            // anti-hermitian Clifford action: H gamma = -gamma^dagger H
            let lhs = &self.hermitian_form * g;
            let rhs = g.adjoint() * &self.hermitian_form;
            if max_abs(&(lhs + rhs)) > 1e-12 {
                return Err(Error::Numerical("Clifford action not anti-hermitian".into()));
            }
        }
        if max_abs(&(&self.tau * &self.tau - &id)) > 1e-12 {
            return Err(Error::Numerical("grading involution square".into()));
        }
        if max_abs(&(self.hermitian_form.adjoint() - &self.hermitian_form)) > 1e-12 {
            return Err(Error::Numerical("pairing not hermitian".into()));
        }
        // delta_gamma . ext_Theta = Id, i.e. sum_k gamma^k Theta_k = Id.
        let n = self.sig.dim() as f64;
        let mut acc = CMat::zeros(d, d);
        for k in 0..self.sig.dim() {
            let c = Complex64::new(self.sig.epsf() * self.sig.eta(k) / n, 0.0);
            acc += &self.gammas[k] * self.gammas[k].map(|x| x * c);
        }
        if max_abs(&(acc - id)) > 1e-12 {
            return Err(Error::Numerical("canonical one-form normalization".into()));
        }
        Ok(())
    }

    /// Representation of a Clifford element: algebra homomorphism extending
    /// gamma on generators, blade by blade.
    pub fn of_multivector(&self, a: &Multivector) -> Result<CMat> {
        if a.sig != self.sig {
            return Err(Error::SignatureMismatch);
        }
        let mut out = CMat::zeros(self.d, self.d);
        for (mask, &c) in a.coeffs.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            out += self.of_blade(mask).map(|x| x * c);
        }
        Ok(out)
    }

    /// Ordered product gamma^{i1} ... gamma^{im} for ascending generators in
    /// the blade mask.
    pub fn of_blade(&self, mask: usize) -> CMat {
        let mut out = CMat::identity(self.d, self.d);
        for k in 0..self.sig.dim() {
            if mask & (1 << k) != 0 {
                out = &out * &self.gammas[k];
            }
        }
        out
    }

    /// Pairing <x, y>_S = x^dagger H y.
    pub fn pair(&self, x: &nalgebra::DVector<Complex64>, y: &nalgebra::DVector<Complex64>) -> Complex64 {
        (x.adjoint() * &self.hermitian_form * y)[(0, 0)]
    }
}

/// Find an invertible hermitian H with H gamma^a = -(gamma^a)^dagger H:
/// the product of all hermitian generators if their count is even,
/// otherwise the product of the anti-hermitian ones.
fn build_pairing(gammas: &[CMat], d: usize) -> Result<CMat> {
    let herm: Vec<usize> = (0..gammas.len())
        .filter(|&a| max_abs(&(gammas[a].adjoint() - &gammas[a])) < 1e-12)
        .collect();
    let anti: Vec<usize> = (0..gammas.len()).filter(|a| !herm.contains(a)).collect();
    let chosen = if herm.len() % 2 == 0 { &herm } else { &anti };
    let mut h = CMat::identity(d, d);
    for &a in chosen {
        h = &h * &gammas[a];
    }
    // Normalize to an honestly hermitian matrix.
    if max_abs(&(h.adjoint() + &h)) < 1e-12 {
        h = h.map(|x| x * Complex64::new(0.0, 1.0));
    }
    if max_abs(&(h.adjoint() - &h)) > 1e-12 {
        return Err(Error::Numerical("could not normalize pairing".into()));
    }
    Ok(h)
}

use crate::error::{Error, Result};
use crate::sig::Signature;
use num_complex::Complex64;

/// Grade of a basis blade, i.e. the number of generators present.
#[inline]
pub fn blade_grade(mask: usize) -> usize {
    mask.count_ones() as usize
}

/// Sign (-1)^swaps needed to merge the generator lists of two blades into
/// canonical ascending order.
#[inline]
fn reorder_sign(a: usize, b: usize) -> f64 {
    let mut a = a >> 1;
    let mut swaps = 0u32;
    while a != 0 {
        swaps += (a & b).count_ones();
        a >>= 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Product of two basis blades: returns (coefficient, result mask).
/// Repeated generators contract with eps * eta^{kk}.
pub fn blade_product(sig: &Signature, a: usize, b: usize) -> (f64, usize) {
    let mut coeff = reorder_sign(a, b);
    let mut common = a & b;
    while common != 0 {
        let k = common.trailing_zeros() as usize;
        coeff *= sig.epsf() * sig.eta(k);
        common &= common - 1;
    }
    (coeff, a ^ b)
}

/// Element of Cl(p, q): 2^n complex coefficients over the blade basis.
/// Bit k of the index set means the generator e^{k+1} is present.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector {
    pub sig: Signature,
    pub coeffs: Vec<Complex64>,
}

impl Multivector {
    pub fn zero(sig: Signature) -> Self {
        Multivector {
            sig,
            coeffs: vec![Complex64::new(0.0, 0.0); sig.blade_count()],
        }
    }

    pub fn one(sig: Signature) -> Self {
        let mut m = Self::zero(sig);
        m.coeffs[0] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn basis_blade(sig: Signature, mask: usize) -> Self {
        assert!(mask < sig.blade_count(), "blade mask out of range");
        let mut m = Self::zero(sig);
        m.coeffs[mask] = Complex64::new(1.0, 0.0);
        m
    }

    /// Generator e^{k+1} for 0-based k.
    pub fn generator(sig: Signature, k: usize) -> Self {
        Self::basis_blade(sig, 1 << k)
    }

    pub fn from_coeffs(sig: Signature, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != sig.blade_count() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} blade coefficients, got {}",
                sig.blade_count(),
                coeffs.len()
            )));
        }
        Ok(Multivector { sig, coeffs })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Multivector {
            sig: self.sig,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch);
        }
        Ok(Multivector {
            sig: self.sig,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Clifford product. Bilinear, associative, unital; generator squares
    /// follow eps * eta.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.sig != other.sig {
            return Err(Error::SignatureMismatch);
        }
        let mut out = Self::zero(self.sig);
        for (a, &ca) in self.coeffs.iter().enumerate() {
            if ca == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (b, &cb) in other.coeffs.iter().enumerate() {
                if cb == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let (s, m) = blade_product(&self.sig, a, b);
                out.coeffs[m] += ca * cb * s;
            }
        }
        Ok(out)
    }

    /// Grade-k part.
    pub fn grade_select(&self, k: usize) -> Self {
        let mut out = Self::zero(self.sig);
        for (mask, &c) in self.coeffs.iter().enumerate() {
            if blade_grade(mask) == k {
                out.coeffs[mask] = c;
            }
        }
        out
    }

    pub fn scalar_part(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Even/odd grading involution: negates odd-grade components.
    pub fn grading_involution(&self) -> Self {
        let mut out = self.clone();
        for (mask, c) in out.coeffs.iter_mut().enumerate() {
            if blade_grade(mask) % 2 == 1 {
                *c = -*c;
            }
        }
        out
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn dist_inf(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_mv(rng: &mut ChaCha8Rng, sig: Signature) -> Multivector {
        let coeffs = (0..sig.blade_count())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        Multivector::from_coeffs(sig, coeffs).unwrap()
    }

    #[test]
    fn generator_squares() {
        // e1 * e1 = 1 in Cl(1,0)-like setting embedded in Cl(2,0).
        let sig = Signature::new(2, 0, 1).unwrap();
        let e1 = Multivector::generator(sig, 0);
        let sq = e1.mul(&e1).unwrap();
        assert_eq!(sq.coeffs[0], c(1.0));
        assert!(sq.dist_inf(&Multivector::one(sig)) == 0.0);

        // Timelike direction with eps = +1: e^2 squares to -1.
        let sig = Signature::new(1, 3, 1).unwrap();
        let e2 = Multivector::generator(sig, 1);
        let sq = e2.mul(&e2).unwrap();
        assert_eq!(sq.coeffs[0], c(-1.0));

        // eps = -1 flips the sign.
        let sig = Signature::new(2, 0, -1).unwrap();
        let e1 = Multivector::generator(sig, 0);
        assert_eq!(e1.mul(&e1).unwrap().coeffs[0], c(-1.0));
    }

    #[test]
    fn generators_anticommute() {
        let sig = Signature::new(2, 2, 1).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let ei = Multivector::generator(sig, i);
                let ej = Multivector::generator(sig, j);
                let ab = ei.mul(&ej).unwrap();
                let ba = ej.mul(&ei).unwrap().scale(c(-1.0));
                assert_eq!(ab, ba);
            }
        }
    }

    #[test]
    fn associativity_sweep() {
        // 1000 random triples in Cl(2,2), relative tolerance 1e-12.
        let sig = Signature::new(2, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let a = random_mv(&mut rng, sig);
            let b = random_mv(&mut rng, sig);
            let cc = random_mv(&mut rng, sig);
            let left = a.mul(&b).unwrap().mul(&cc).unwrap();
            let right = a.mul(&b.mul(&cc).unwrap()).unwrap();
            let scale = left.norm_inf().max(1.0);
            assert!(
                left.dist_inf(&right) / scale < 1e-12,
                "associativity violated"
            );
        }
    }

    #[test]
    fn unital_and_bilinear() {
        let sig = Signature::new(1, 3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_mv(&mut rng, sig);
        let one = Multivector::one(sig);
        assert!(a.mul(&one).unwrap().dist_inf(&a) < 1e-15);
        assert!(one.mul(&a).unwrap().dist_inf(&a) < 1e-15);

        let b = random_mv(&mut rng, sig);
        let d = random_mv(&mut rng, sig);
        let lam = Complex64::new(0.3, -1.2);
        let lhs = a.mul(&b.scale(lam).add(&d).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().scale(lam).add(&a.mul(&d).unwrap()).unwrap();
        assert!(lhs.dist_inf(&rhs) < 1e-12);
    }

    #[test]
    fn signature_mismatch_rejected() {
        let a = Multivector::one(Signature::new(2, 0, 1).unwrap());
        let b = Multivector::one(Signature::new(1, 1, 1).unwrap());
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn grading_involution_anticommutes_with_generators() {
        // tau(e^k x) = -e^k tau(x)
        let sig = Signature::new(2, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_mv(&mut rng, sig);
        for k in 0..4 {
            let e = Multivector::generator(sig, k);
            let lhs = e.mul(&x).unwrap().grading_involution();
            let rhs = e.mul(&x.grading_involution()).unwrap().scale(c(-1.0));
            assert!(lhs.dist_inf(&rhs) < 1e-14);
        }
    }
}

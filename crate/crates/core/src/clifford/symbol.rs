use crate::clifford::multivector::Multivector;
use crate::error::{Error, Result};
use crate::sig::Signature;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Action of the canonical Clifford map on exterior-algebra coefficients:
/// gamma_cl(e^k) w = eps * int_g(e^k) w + e^k /\ w.
///
/// `coeffs` are 2^n exterior coefficients indexed by blade mask.
pub fn gamma_cl_apply(sig: &Signature, k: usize, coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = sig.blade_count();
    let bit = 1usize << k;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (mask, &c) in coeffs.iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        if mask & bit == 0 {
            // exterior part: e^k /\ e^mask
            let below = (mask & (bit - 1)).count_ones();
            let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
            out[mask | bit] += c * sign;
        } else {
            // interior part: contraction against the metric dual of e^k
            let pos = (mask & (bit - 1)).count_ones();
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            out[mask & !bit] += c * sign * sig.eta(k) * sig.epsf();
        }
    }
    out
}

/// The linear isomorphism between the Clifford algebra and the exterior
/// algebra obtained by acting on the unit form, together with its inverse.
pub struct SymbolMap {
    sig: Signature,
    fwd: DMatrix<Complex64>,
    inv: DMatrix<Complex64>,
}

impl SymbolMap {
    pub fn new(sig: Signature) -> Self {
        let n = sig.blade_count();
        let mut fwd = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for mask in 0..n {
            // Image of the Clifford basis blade e^{i1} ... e^{im}: compose
            // the canonical Clifford maps and apply to the unit form.
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            col[0] = Complex64::new(1.0, 0.0);
            let mut gens: Vec<usize> = (0..sig.dim()).filter(|k| mask & (1 << k) != 0).collect();
            gens.reverse();
            for k in gens {
                col = gamma_cl_apply(&sig, k, &col);
            }
            for (row, &v) in col.iter().enumerate() {
                fwd[(row, mask)] = v;
            }
        }
        let inv = fwd
            .clone()
            .try_inverse()
            .expect("symbol map must be invertible");
        SymbolMap { sig, fwd, inv }
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    /// Clifford element -> exterior coefficients.
    pub fn forward(&self, a: &Multivector) -> Result<Vec<Complex64>> {
        if a.sig != self.sig {
            return Err(Error::SignatureMismatch);
        }
        let v = nalgebra::DVector::from_column_slice(&a.coeffs);
        Ok((&self.fwd * v).iter().cloned().collect())
    }

    /// Exterior coefficients -> Clifford element.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Multivector> {
        if coeffs.len() != self.sig.blade_count() {
            return Err(Error::DimensionMismatch(
                "exterior coefficient count".into(),
            ));
        }
        let v = nalgebra::DVector::from_column_slice(coeffs);
        Multivector::from_coeffs(self.sig, (&self.inv * v).iter().cloned().collect())
    }

    /// Rank check used by identity suites: the forward matrix on the blade
    /// basis must have full rank.
    pub fn forward_matrix(&self) -> &DMatrix<Complex64> {
        &self.fwd
    }
}

/// gamma_cl(v)^2 = eps g*(v,v) Id on exterior coefficients, for a covector
/// with orthonormal-frame components `v`.
pub fn gamma_cl_vector_apply(sig: &Signature, v: &[f64], coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); sig.blade_count()];
    for (k, &vk) in v.iter().enumerate() {
        if vk == 0.0 {
            continue;
        }
        for (i, x) in gamma_cl_apply(sig, k, coeffs).into_iter().enumerate() {
            out[i] += x * vk;
        }
    }
    out
}

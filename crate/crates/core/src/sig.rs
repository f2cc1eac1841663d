use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Metric signature (p, q) together with the Clifford sign convention.
///
/// `p` counts +1 directions, `q` counts -1 directions. The total dimension
/// n = p + q must be even and the index s = p - q must avoid 1 mod 4.
/// `eps` fixes the sign in the generator relation e^k e^k = eps * eta^{kk}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub eps: i8,
}

impl Signature {
    pub fn new(p: usize, q: usize, eps: i8) -> Result<Self> {
        let n = p + q;
        // s = p - q computed mod 4 with negative values wrapped. Checked
        // before the parity constraint so the message names the violated rule.
        let s = (p as i64 - q as i64).rem_euclid(4);
        if s == 1 {
            return Err(Error::Signature(format!(
                "index s = p - q = {} is congruent to 1 mod 4, which is excluded",
                p as i64 - q as i64
            )));
        }
        if n == 0 || n % 2 != 0 {
            return Err(Error::Signature(format!(
                "n = p + q = {n} must be even and positive"
            )));
        }
        if eps != 1 && eps != -1 {
            return Err(Error::Signature(format!("eps must be +1 or -1, got {eps}")));
        }
        Ok(Signature { p, q, eps })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Signature::new(n, 0, 1)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// Number of blade-basis elements 2^n.
    #[inline]
    pub fn blade_count(&self) -> usize {
        1 << self.dim()
    }

    /// Diagonal metric entry eta^{kk} = eta_{kk} for frame index k (0-based).
    #[inline]
    pub fn eta(&self, k: usize) -> f64 {
        if k < self.p {
            1.0
        } else {
            -1.0
        }
    }

    #[inline]
    pub fn epsf(&self) -> f64 {
        self.eps as f64
    }

    /// Spinor representation dimension 2^{n/2}.
    #[inline]
    pub fn spinor_dim(&self) -> usize {
        1 << (self.dim() / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_standard_signatures() {
        for (p, q) in [(2, 0), (4, 0), (1, 3), (2, 2), (6, 0)] {
            assert!(Signature::new(p, q, 1).is_ok(), "({p},{q})");
            assert!(Signature::new(p, q, -1).is_ok());
        }
    }

    #[test]
    fn rejects_odd_dimension_and_bad_index() {
        assert!(Signature::new(3, 0, 1).is_err());
        assert!(Signature::new(0, 0, 1).is_err());
        // s = 3 - 2 = 1 mod 4
        assert!(Signature::new(3, 2, 1).is_err()); // also odd, rejected either way
        // n = 6, s = 5 - 1 = 4 -> ok; s = 1 impossible for even n unless ±1 mod 4...
        // (3,1): s = 2 ok even though mixed
        assert!(Signature::new(3, 1, 1).is_ok());
    }

    #[test]
    fn rejects_s_equals_one_mod_four() {
        // (p,q) even n with p - q = 1 mod 4 does not exist for even n,
        // but negative wrap must work: p - q = -3 = 1 mod 4.
        // Example: p=1, q=4 -> n=5 odd (rejected first). Use p=2, q=5? odd.
        // For even n, p-q is even, so s = 1 mod 4 cannot occur; the check
        // still guards directly.
        assert!(Signature::new(1, 0, 1).is_err());
    }

    #[test]
    fn eta_entries() {
        let s = Signature::new(1, 3, 1).unwrap();
        assert_eq!(s.eta(0), 1.0);
        assert_eq!(s.eta(1), -1.0);
        assert_eq!(s.eta(3), -1.0);
        assert_eq!(s.spinor_dim(), 4);
    }
}

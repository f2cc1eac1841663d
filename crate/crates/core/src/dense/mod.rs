//! Dense single-site verification builds on the doubly twisted fiber
//! S (x) TM (x) Cl (x) Cl. Used to pin the decomposition constants before
//! they are trusted at scale: the scalar-curvature coefficient of the
//! quantized-trace identity and the proportionality between the squared
//! zero-order part and the squared field strength.

use crate::clifford::blade_product;
use crate::error::Result;
use crate::sig::Signature;
use crate::spinor::GammaRep;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

type CMat = DMatrix<Complex64>;

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMat::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let v = a[(i, j)];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = v * b[(k, l)];
                }
            }
        }
    }
    out
}

fn eye(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Left Clifford multiplication by the basis blade `mask` on the 2^n blade
/// space.
pub fn cl_left_mult(sig: &Signature, mask: usize) -> CMat {
    let nb = sig.blade_count();
    let mut out = CMat::zeros(nb, nb);
    for col in 0..nb {
        let (c, row) = blade_product(sig, mask, col);
        out[(row, col)] += Complex64::new(c, 0.0);
    }
    out
}

/// Even/odd grading involution of the Clifford fiber.
pub fn cl_grading(sig: &Signature) -> CMat {
    let nb = sig.blade_count();
    CMat::from_fn(nb, nb, |i, j| {
        if i == j {
            Complex64::new(if (i.count_ones() % 2) == 0 { 1.0 } else { -1.0 }, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Induced fiber metric on the Clifford/Grassmann fiber: blades are
/// orthogonal with squared length prod(eta).
pub fn cl_metric(sig: &Signature) -> CMat {
    let nb = sig.blade_count();
    CMat::from_fn(nb, nb, |i, j| {
        if i == j {
            let mut p = 1.0;
            for k in 0..sig.dim() {
                if i & (1 << k) != 0 {
                    p *= sig.eta(k);
                }
            }
            Complex64::new(p, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Endomorphism matrix on tangent components of an so element given in
/// lowered components m[j][k] = g(M e_j, e_k): entry (k, j) = eta^kk m[j][k].
pub fn so_endo_tm(sig: &Signature, m: &[f64]) -> CMat {
    let n = sig.dim();
    CMat::from_fn(n, n, |k, j| Complex64::new(sig.eta(k) * m[j * n + k], 0.0))
}

/// Derivation extension of an so element to the Clifford/Grassmann fiber:
/// each covector generator rotates with the dual action
/// (M alpha)_c = -eta^kk m[c][k] alpha_k, extended over blades.
pub fn so_derivation_cl(sig: &Signature, m: &[f64]) -> CMat {
    let n = sig.dim();
    let nb = sig.blade_count();
    let mut out = CMat::zeros(nb, nb);
    for col in 0..nb {
        for slot in 0..n {
            if col & (1 << slot) == 0 {
                continue;
            }
            for k in 0..n {
                let c = -sig.eta(slot) * m[k * n + slot];
                if c == 0.0 {
                    continue;
                }
                if col & (1 << k) != 0 && k != slot {
                    continue; // duplicate generator: wedge kills it
                }
                let without = col & !(1 << slot);
                let target = without | (1 << k);
                // resort sign: generators passed over between the two slots
                let below_slot = (without & ((1 << slot) - 1)).count_ones();
                let below_k = (without & ((1 << k) - 1)).count_ones();
                let sgn = if (below_slot + below_k) % 2 == 0 { 1.0 } else { -1.0 };
                out[(target, col)] += Complex64::new(c * sgn, 0.0);
            }
        }
    }
    out
}

/// Spin lift of an so element in the m[j][k] = g(M e_j, e_k) convention:
/// rho(M) = -(eps/4) m_{bc} gamma^b gamma^c, the sign fixed by
/// equivariance [rho(M), gamma(alpha)] = gamma(M alpha) with the dual
/// action on covectors.
pub fn spin_lift(gamma: &GammaRep, m: &[f64]) -> CMat {
    let n = gamma.sig.dim();
    let mut out = CMat::zeros(gamma.d, gamma.d);
    for b in 0..n {
        for c in 0..n {
            let v = m[b * n + c];
            if v != 0.0 {
                out += (&gamma.gammas[b] * &gamma.gammas[c])
                    .map(|x| x * Complex64::new(-0.25 * gamma.sig.epsf() * v, 0.0));
            }
        }
    }
    out
}

/// Random algebraic curvature tensor in frame components
/// R[a][b][j][k] = g(R(e_a,e_b)e_j, e_k): pair-symmetric, antisymmetric in
/// both pairs and satisfying the first Bianchi identity.
pub fn random_riemann<R: Rng>(sig: &Signature, rng: &mut R) -> Vec<f64> {
    let n = sig.dim();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            pairs.push((a, b));
        }
    }
    let np = pairs.len();
    let mut s = vec![0.0; np * np];
    for i in 0..np {
        for j in 0..=i {
            let v = rng.gen_range(-1.0..1.0);
            s[i * np + j] = v;
            s[j * np + i] = v;
        }
    }
    let mut r = vec![0.0; n * n * n * n];
    let idx = |a: usize, b: usize, j: usize, k: usize| ((a * n + b) * n + j) * n + k;
    for (pi, &(a, b)) in pairs.iter().enumerate() {
        for (pj, &(j, k)) in pairs.iter().enumerate() {
            let v = s[pi * np + pj];
            r[idx(a, b, j, k)] = v;
            r[idx(b, a, j, k)] = -v;
            r[idx(a, b, k, j)] = -v;
            r[idx(b, a, k, j)] = v;
        }
    }
    // remove the totally antisymmetric part so the first Bianchi identity
    // holds
    let mut out = r.clone();
    for a in 0..n {
        for b in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let cyc =
                        (r[idx(a, b, j, k)] + r[idx(a, j, k, b)] + r[idx(a, k, b, j)]) / 3.0;
                    out[idx(a, b, j, k)] -= cyc;
                }
            }
        }
    }
    out
}

/// Frame scalar curvature of an algebraic curvature tensor:
/// scal = sum_{a,j} eta^aa eta^jj R[a][j][j][a].
pub fn scal_of_riemann(sig: &Signature, r: &[f64]) -> f64 {
    let n = sig.dim();
    let mut acc = 0.0;
    for a in 0..n {
        for j in 0..n {
            acc += sig.eta(a) * sig.eta(j) * r[((a * n + j) * n + j) * n + a];
        }
    }
    acc
}

fn curvature_slot(sig: &Signature, r: &[f64], a: usize, b: usize) -> Vec<f64> {
    let n = sig.dim();
    let mut m = vec![0.0; n * n];
    for j in 0..n {
        for k in 0..n {
            m[j * n + k] = r[((a * n + b) * n + j) * n + k];
        }
    }
    m
}

/// Quantized trace of the lifted curvature on S (x) TM (x) Cl (x) Cl from
/// dense per-factor curvature blocks, with the closed-form value
/// -eps rk(E')/4 scal. The spinor block is fully dense; the twist factors
/// enter through their dense traces.
pub fn trace_gamma_lifted_curvature(
    sig: &Signature,
    gamma: &GammaRep,
    riem: &[f64],
) -> (Complex64, f64) {
    let n = sig.dim();
    let nb = sig.blade_count();
    let dim_e = n * nb * nb;
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in (a + 1)..n {
            let slot = curvature_slot(sig, riem, a, b);
            let fs = spin_lift(gamma, &slot);
            let ftm = so_endo_tm(sig, &slot);
            let fcl = so_derivation_cl(sig, &slot);
            let gab = &gamma.gammas[a] * &gamma.gammas[b];
            // tr over S (x) E of (gab (x) Id)(F_S (x) Id + Id (x) F_E)
            let tr_s_part = (&gab * &fs).trace() * Complex64::new(dim_e as f64, 0.0);
            let f_e_trace = ftm.trace() * Complex64::new((nb * nb) as f64, 0.0)
                + fcl.trace() * Complex64::new(2.0 * (n * nb) as f64, 0.0);
            let tr_e_part = gab.trace() * f_e_trace;
            acc += tr_s_part + tr_e_part;
        }
    }
    let rk = gamma.d * dim_e;
    let closed = -sig.epsf() * rk as f64 / 4.0 * scal_of_riemann(sig, riem);
    (acc, closed)
}

/// Fully dense variant for n = 2: assembles the lifted curvature on the
/// complete 64-dimensional fiber and traces against the quantized blade.
pub fn trace_gamma_lifted_curvature_full(
    sig: &Signature,
    gamma: &GammaRep,
    riem: &[f64],
) -> (Complex64, f64) {
    let n = sig.dim();
    assert_eq!(n, 2, "full dense build is the n = 2 oracle");
    let nb = sig.blade_count();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in (a + 1)..n {
            let slot = curvature_slot(sig, riem, a, b);
            let fs = spin_lift(gamma, &slot);
            let ftm = so_endo_tm(sig, &slot);
            let fcl = so_derivation_cl(sig, &slot);
            let f_full = kron(&fs, &eye(n * nb * nb))
                + kron(&eye(gamma.d), &kron(&ftm, &eye(nb * nb)))
                + kron(&eye(gamma.d), &kron(&eye(n), &kron(&fcl, &eye(nb))))
                + kron(&eye(gamma.d), &kron(&eye(n), &kron(&eye(nb), &fcl)));
            let gab_full = kron(&(&gamma.gammas[a] * &gamma.gammas[b]), &eye(n * nb * nb));
            acc += (gab_full * f_full).trace();
        }
    }
    let rk = gamma.d * n * nb * nb;
    let closed = -sig.epsf() * rk as f64 / 4.0 * scal_of_riemann(sig, riem);
    (acc, closed)
}

/// tr over E' of phi_D^2 for an antisymmetric field-strength block
/// f[a][b][j][k], with phi_D = sum_{ab} Id_S (x) F_ab (x) L_{e^a} (x)
/// L_{e^b}. Returns (dense trace, -2^{2n} rk(S) ||F||^2).
pub fn trace_phi_squared(sig: &Signature, gamma: &GammaRep, f: &[f64]) -> (Complex64, f64) {
    let n = sig.dim();
    let nb = sig.blade_count();
    let dim_k = n * nb * nb;
    let mut k_mat = CMat::zeros(dim_k, dim_k);
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let slot = curvature_slot(sig, f, a, b);
            if slot.iter().all(|&v| v == 0.0) {
                continue;
            }
            let endo = so_endo_tm(sig, &slot);
            let la = cl_left_mult(sig, 1 << a);
            let lb = cl_left_mult(sig, 1 << b);
            k_mat += kron(&endo, &kron(&la, &lb));
        }
    }
    // trace of K^2 without forming the full product
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..dim_k {
        for j in 0..dim_k {
            tr += k_mat[(i, j)] * k_mat[(j, i)];
        }
    }
    let dense = tr * Complex64::new(gamma.d as f64, 0.0);

    let mut norm2 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let e = sig.eta(a) * sig.eta(b) * sig.eta(j) * sig.eta(k);
                    let v = f[((a * n + b) * n + j) * n + k];
                    norm2 += e * v * v;
                }
            }
        }
    }
    let expect = -((1usize << (2 * n)) as f64) * gamma.d as f64 * norm2;
    (dense, expect)
}

/// Fully dense n = 2 variant of `trace_phi_squared` including the spinor
/// factor.
pub fn trace_phi_squared_full(sig: &Signature, gamma: &GammaRep, f: &[f64]) -> (Complex64, f64) {
    let n = sig.dim();
    assert_eq!(n, 2);
    let nb = sig.blade_count();
    let dim = gamma.d * n * nb * nb;
    let mut phi = CMat::zeros(dim, dim);
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let slot = curvature_slot(sig, f, a, b);
            let endo = so_endo_tm(sig, &slot);
            let la = cl_left_mult(sig, 1 << a);
            let lb = cl_left_mult(sig, 1 << b);
            phi += kron(&eye(gamma.d), &kron(&endo, &kron(&la, &lb)));
        }
    }
    let dense = (&phi * &phi).trace();
    let (_, expect) = trace_phi_squared(sig, gamma, f);
    (dense, expect)
}

/// Random antisymmetric field-strength block at one site.
pub fn random_strength_block<R: Rng>(sig: &Signature, rng: &mut R) -> Vec<f64> {
    let n = sig.dim();
    let mut f = vec![0.0; n * n * n * n];
    let idx = |a: usize, b: usize, j: usize, k: usize| ((a * n + b) * n + j) * n + k;
    for a in 0..n {
        for b in (a + 1)..n {
            for j in 0..n {
                for k in (j + 1)..n {
                    let v = rng.gen_range(-1.0f64..1.0);
                    f[idx(a, b, j, k)] = v;
                    f[idx(b, a, j, k)] = -v;
                    f[idx(a, b, k, j)] = -v;
                    f[idx(b, a, k, j)] = v;
                }
            }
        }
    }
    f
}

/// Cross term <psi, tau_{E'} phi_D psi> for psi embedded as psi (x) 1 (x) 1:
/// dense evaluation of the pairing, which must vanish identically.
pub fn cross_term_dense<R: Rng>(sig: &Signature, gamma: &GammaRep, rng: &mut R) -> Result<f64> {
    let n = sig.dim();
    let nb = sig.blade_count();
    let dim = gamma.d * n * nb * nb;
    let f = random_strength_block(sig, rng);
    let mut phi = CMat::zeros(dim, dim);
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let slot = curvature_slot(sig, &f, a, b);
            phi += kron(
                &eye(gamma.d),
                &kron(
                    &so_endo_tm(sig, &slot),
                    &kron(&cl_left_mult(sig, 1 << a), &cl_left_mult(sig, 1 << b)),
                ),
            );
        }
    }
    let tau_full = kron(
        &gamma.tau,
        &kron(&eye(n), &kron(&cl_grading(sig), &eye(nb))),
    );
    let eta_tm = CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(sig.eta(i), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let pairing = kron(
        &gamma.hermitian_form,
        &kron(&eta_tm, &kron(&cl_metric(sig), &cl_metric(sig))),
    );
    let mut psi = nalgebra::DVector::<Complex64>::zeros(dim);
    for alpha in 0..gamma.d {
        for leg in 0..n {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            // layout: S (x) TM (x) Cl (x) Cl, unit blade index 0 in both Cl slots
            psi[((alpha * n + leg) * nb) * nb] = v;
        }
    }
    let val = (psi.adjoint() * pairing * tau_full * phi * psi)[(0, 0)];
    Ok(val.norm())
}

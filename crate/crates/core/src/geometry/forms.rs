use crate::error::{Error, Result};
use crate::geometry::chart::MetricChart;

/// Real scalar field on a chart.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub data: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(chart: &MetricChart) -> Self {
        ScalarField {
            data: vec![0.0; chart.lat.len()],
        }
    }

    pub fn from_fn<F: FnMut(usize) -> f64>(chart: &MetricChart, mut f: F) -> Self {
        ScalarField {
            data: chart.sites().map(|x| f(x)).collect(),
        }
    }
}

/// Scalar-valued k-form in orthonormal-frame components. Components are
/// stored for every index tuple (n^k of them); antisymmetry is maintained
/// by the operations and the inner product carries the 1/k! multiplicity.
#[derive(Debug, Clone)]
pub struct KForm {
    pub k: usize,
    pub n: usize,
    pub data: Vec<f64>,
}

impl KForm {
    pub fn zeros(chart: &MetricChart, k: usize) -> Self {
        let n = chart.n();
        KForm {
            k,
            n,
            data: vec![0.0; chart.lat.len() * n.pow(k as u32)],
        }
    }

    #[inline]
    pub fn comp_count(&self) -> usize {
        self.n.pow(self.k as u32)
    }

    #[inline]
    pub fn get(&self, site: usize, idx: &[usize]) -> f64 {
        self.data[site * self.comp_count() + flat_index(self.n, idx)]
    }

    #[inline]
    pub fn set(&mut self, site: usize, idx: &[usize], v: f64) {
        let c = self.comp_count();
        self.data[site * c + flat_index(self.n, idx)] = v;
    }

    pub fn from_scalar(chart: &MetricChart, f: &ScalarField) -> Self {
        KForm {
            k: 0,
            n: chart.n(),
            data: f.data.clone(),
        }
    }
}

#[inline]
fn flat_index(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0usize, |acc, &i| acc * n + i)
}

/// Iterate all index tuples of length k with entries < n.
pub fn multi_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = Vec::new();
        for t in &out {
            for i in 0..n {
                let mut t2 = t.clone();
                t2.push(i);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

/// Sign of the permutation sending the concatenation (a, b) to ascending
/// order, or 0 if any index repeats.
pub fn perm_sign(a: &[usize], b: &[usize]) -> f64 {
    let mut all: Vec<usize> = a.iter().chain(b.iter()).cloned().collect();
    let m = all.len();
    let mut sign = 1.0;
    for i in 0..m {
        for j in (i + 1)..m {
            if all[i] == all[j] {
                return 0.0;
            }
            if all[i] > all[j] {
                all.swap(i, j);
                sign = -sign;
            }
        }
    }
    sign
}

/// Product of eta entries over an index tuple.
#[inline]
pub fn eta_product(chart: &MetricChart, idx: &[usize]) -> f64 {
    idx.iter().map(|&a| chart.sig.eta(a)).product()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product::<f64>().max(1.0)
}

/// Lattice inner product sum_x w(x) (1/k!) sum_idx (prod eta) X Y.
pub fn kform_inner(chart: &MetricChart, x: &KForm, y: &KForm) -> f64 {
    assert_eq!(x.k, y.k);
    let tuples = multi_indices(x.n, x.k);
    let fk = factorial(x.k);
    let mut acc = 0.0;
    for s in chart.sites() {
        let w = chart.weight(s);
        for t in &tuples {
            acc += w / fk * eta_product(chart, t) * x.get(s, t) * y.get(s, t);
        }
    }
    acc
}

pub fn kform_norm(chart: &MetricChart, x: &KForm) -> f64 {
    kform_inner(chart, x, x).abs().sqrt()
}

/// Covariant derivative component (nabla_a X)_{idx} at a site, with the
/// Levi-Civita frame connection rotating every form index.
fn covariant_component(chart: &MetricChart, x: &KForm, site: usize, a: usize, idx: &[usize]) -> f64 {
    let mut acc = chart.frame_derivative(site, a, |y| x.get(y, idx));
    if !chart.is_flat_preset() {
        let n = chart.n();
        let mut tmp = idx.to_vec();
        for (slot, &b) in idx.iter().enumerate() {
            for c in 0..n {
                let w = chart.omega_raised(site, a, c, b);
                if w != 0.0 {
                    tmp[slot] = c;
                    acc -= w * x.get(site, &tmp);
                }
            }
            tmp[slot] = b;
        }
    }
    acc
}

/// Exterior covariant derivative of a scalar-valued k-form with the
/// Levi-Civita connection: antisymmetrized covariant derivative.
pub fn d_exterior(chart: &MetricChart, x: &KForm) -> Result<KForm> {
    let n = chart.n();
    if x.k >= n {
        return Err(Error::DegreeOutOfRange(x.k + 1, n));
    }
    let mut out = KForm::zeros(chart, x.k + 1);
    let tuples = multi_indices(n, x.k + 1);
    for s in chart.sites() {
        for t in &tuples {
            let mut acc = 0.0;
            for (j, &aj) in t.iter().enumerate() {
                let rest: Vec<usize> = t
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .map(|(_, &v)| v)
                    .collect();
                let sgn = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += sgn * covariant_component(chart, x, s, aj, &rest);
            }
            out.set(s, t, acc);
        }
    }
    Ok(out)
}

/// Codifferential: the exact adjoint of `d_exterior` under `kform_inner`.
///
/// Every elementary contribution of d (out[s,t] += c * X[s',r]) is
/// transposed with the ratio of inner-product weights, so the adjoint
/// identity <dX, Y> = <X, delta Y> holds to rounding.
pub fn codifferential(chart: &MetricChart, y: &KForm) -> Result<KForm> {
    if y.k == 0 {
        return Err(Error::DegreeOutOfRange(0, chart.n()));
    }
    let n = chart.n();
    let k_out = y.k - 1;
    let mut out = KForm::zeros(chart, k_out);
    let tuples = multi_indices(n, y.k);
    let fk_in = factorial(y.k);
    let fk_out = factorial(k_out);

    // scatter: for each forward contribution out_d[s,t] += c * X[s',r],
    // accumulate out[s',r] += c * (w(s) P(t)/fk_in) / (w(s') P(r)/fk_out) * Y[s,t].
    let scatter = |dst: &mut KForm,
                       s_fwd: usize,
                       t_fwd: &[usize],
                       s_src: usize,
                       r_src: &[usize],
                       c: f64,
                       yval: f64| {
        let wt = chart.weight(s_fwd) * eta_product(chart, t_fwd) / fk_in;
        let wr = chart.weight(s_src) * eta_product(chart, r_src) / fk_out;
        let cur = dst.get(s_src, r_src);
        dst.set(s_src, r_src, cur + c * wt / wr * yval);
    };

    for s in chart.sites() {
        for t in &tuples {
            let yval = y.get(s, t);
            if yval == 0.0 {
                continue;
            }
            for (j, &aj) in t.iter().enumerate() {
                let rest: Vec<usize> = t
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .map(|(_, &v)| v)
                    .collect();
                let sgn = if j % 2 == 0 { 1.0 } else { -1.0 };
                // frame-derivative part: e_a(X_rest) = sum_mu E^mu_a *
                // (X(s+mu) - X(s-mu)) / 2h
                for mu in 0..n {
                    let e = chart.e(s, mu, aj);
                    if e != 0.0 {
                        let c = sgn * e / (2.0 * chart.lat.h[mu]);
                        let sp = chart.lat.shift(s, mu, 1);
                        let sm = chart.lat.shift(s, mu, -1);
                        scatter(&mut out, s, t, sp, &rest, c, yval);
                        scatter(&mut out, s, t, sm, &rest, -c, yval);
                    }
                }
                // connection part: -sum_{slot,c} omega_a{}^c{}_b X_{b->c}(s)
                if !chart.is_flat_preset() {
                    let mut tmp = rest.clone();
                    for (slot, &b) in rest.iter().enumerate() {
                        for c in 0..n {
                            let w = chart.omega_raised(s, aj, c, b);
                            if w != 0.0 {
                                tmp[slot] = c;
                                scatter(&mut out, s, t, s, &tmp, -sgn * w, yval);
                            }
                        }
                        tmp[slot] = b;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Hodge star on scalar-valued k-forms in the orthonormal frame:
/// (*X)_{b} = (1/k!) sum_a perm_sign(a, b) (prod eta_a) X_a.
pub fn hodge_star(chart: &MetricChart, x: &KForm) -> Result<KForm> {
    let n = chart.n();
    if x.k > n {
        return Err(Error::DegreeOutOfRange(x.k, n));
    }
    let mut out = KForm::zeros(chart, n - x.k);
    let src = multi_indices(n, x.k);
    let dst = multi_indices(n, n - x.k);
    let fk = factorial(x.k);
    for s in chart.sites() {
        for b in &dst {
            let mut acc = 0.0;
            for a in &src {
                let sg = perm_sign(a, b);
                if sg != 0.0 {
                    acc += sg * eta_product(chart, a) * x.get(s, a) / fk;
                }
            }
            out.set(s, b, acc);
        }
    }
    Ok(out)
}

/// Integral of a scalar field: sum_x prod(h) sqrt|det g| f(x).
pub fn integrate(chart: &MetricChart, f: &ScalarField) -> f64 {
    chart.sites().map(|x| chart.weight(x) * f.data[x]).sum()
}

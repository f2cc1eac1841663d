use crate::error::Result;
use crate::geometry::MetricChart;
use crate::torsion::{d_a_one_form, field_strength, so_two_inner, so_two_norm, TorsionPotential};

/// Weak-coupling diagnostics: the torsion-term energy density and its
/// lattice average (the effective vacuum-energy contribution), together
/// with the size of the commutator correction relative to the linearized
/// field strength.
pub struct WeakCouplingReport {
    /// Energy density (1/4g^2) ||F_A||^2 per site.
    pub density: Vec<f64>,
    /// Volume average of the density: the effective constant shift.
    pub effective_lambda: f64,
    /// ||F_full - F_lin|| / ||F_lin||, the relative size of the
    /// self-coupling at the current amplitude.
    pub commutator_ratio: f64,
}

pub fn weak_coupling_report(
    chart: &MetricChart,
    a: &TorsionPotential,
    g: f64,
) -> Result<WeakCouplingReport> {
    a.check_shape(chart)?;
    let f_full = field_strength(chart, a)?;
    let f_lin = d_a_one_form(chart, None, a)?;

    let mut density = Vec::with_capacity(chart.lat.len());
    let mut acc = 0.0;
    let mut wsum = 0.0;
    for x in chart.sites() {
        let d = f_full.norm2_density(chart, x) / (4.0 * g * g);
        density.push(d);
        acc += chart.weight(x) * d;
        wsum += chart.weight(x);
    }

    let mut diff = f_full.clone();
    for (d, l) in diff.data.iter_mut().zip(&f_lin.data) {
        *d -= l;
    }
    let lin_norm = so_two_norm(chart, &f_lin);
    let diff_norm = (so_two_inner(chart, &diff, &diff)).abs().sqrt();
    let ratio = if lin_norm > 0.0 {
        diff_norm / lin_norm
    } else if diff_norm > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };

    Ok(WeakCouplingReport {
        density,
        effective_lambda: acc / wsum,
        commutator_ratio: ratio,
    })
}

use crate::error::Result;
use crate::geometry::{integrate, scalar_curvature, MetricChart};
use crate::spinor::{second_order_decompose, DiracEnv, DiracOperator, GammaRep, ZeroOrderPart};
use num_complex::Complex64;

/// Universal Dirac action: the integrated trace of the second-order
/// potential V_D, plus the reported length tr phi_D^2 when the operator is
/// of simple type.
pub struct UniversalActionReport {
    /// Integral of tr V_D over the chart.
    pub value: Complex64,
    /// Lattice average of tr phi_D^2 (the cosmological-constant readout),
    /// present for simple-type operators.
    pub lambda: Option<Complex64>,
}

pub fn universal_action(
    chart: &MetricChart,
    gamma: &GammaRep,
    op: &DiracOperator,
) -> Result<UniversalActionReport> {
    let env = DiracEnv::new(chart, gamma);
    let dec = second_order_decompose(&env, op)?;
    let mut value = Complex64::new(0.0, 0.0);
    for x in chart.sites() {
        value += dec.v[x].trace() * Complex64::new(chart.weight(x), 0.0);
    }
    let lambda = match &op.zero_order {
        ZeroOrderPart::SimpleType { .. } => {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut wsum = 0.0;
            for x in chart.sites() {
                let phi = &dec.bochner.phi[x];
                acc += (phi * phi).trace() * Complex64::new(chart.weight(x), 0.0);
                wsum += chart.weight(x);
            }
            Some(acc / Complex64::new(wsum, 0.0))
        }
        _ => None,
    };
    Ok(UniversalActionReport { value, lambda })
}

/// Closed-form value for simple-type operators:
/// integral of (-eps rk(E)/4 scal + tr phi_D^2) with E the twisted spinor
/// module the operator acts on.
pub fn universal_action_closed_form(
    chart: &MetricChart,
    gamma: &GammaRep,
    op: &DiracOperator,
) -> Result<Complex64> {
    let n = chart.n();
    let rk = (gamma.d * n) as f64;
    let scal = scalar_curvature(chart);
    let scal_part = -chart.sig.epsf() * rk / 4.0 * integrate(chart, &scal);
    let mut phi_part = Complex64::new(0.0, 0.0);
    if let ZeroOrderPart::SimpleType { m, n: nn } = &op.zero_order {
        // (tau (x) m)^2 = Id_S (x) m^2, so tr phi^2 = d tr(m^2)
        for x in chart.sites() {
            let mut tr = Complex64::new(0.0, 0.0);
            for j in 0..*nn {
                for k in 0..*nn {
                    tr += m[(x * nn + j) * nn + k] * m[(x * nn + k) * nn + j];
                }
            }
            phi_part += tr * Complex64::new(gamma.d as f64 * chart.weight(x), 0.0);
        }
    }
    Ok(Complex64::new(scal_part, 0.0) + phi_part)
}

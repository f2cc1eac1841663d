//! Central tolerance constants for the identity suites and acceptance
//! checks. Values are grouped by their numerical origin; nothing in the
//! test code introduces ad-hoc thresholds.

/// Exact algebra (blade products, gamma relations, roundtrips): rounding
/// accumulation over a handful of f64 operations.
pub const ALGEBRA_EXACT: f64 = 1e-12;

/// Slightly looser bound for algebra chained through matrix inverses.
pub const ALGEBRA_CHAINED: f64 = 1e-13;

/// Gamma representation invariants hold to machine precision.
pub const GAMMA_EXACT: f64 = 1e-12;

/// Torsion potential/tensor roundtrip (pure component shuffles).
pub const TORSION_ROUNDTRIP: f64 = 1e-13;

/// Discrete adjointness of (d, delta) is structural.
pub const ADJOINTNESS: f64 = 1e-12;

/// Flat-chart Bianchi identity for the torsion field strength.
pub const BIANCHI_FLAT: f64 = 1e-10;

/// Bochner extraction residuals on flat charts (probe solves).
pub const BOCHNER_FLAT: f64 = 1e-9;

/// Anticommutation of the extracted zero-order part with the Clifford
/// action for simple-type operators.
pub const SIMPLE_TYPE_ANTICOMMUTE: f64 = 1e-10;

/// Trace identity for V_D, both sides computed independently.
pub const TRACE_IDENTITY: f64 = 1e-8;

/// Two-path agreement of the universal action on flat charts.
pub const UNIVERSAL_ACTION_FLAT: f64 = 1e-8;

/// Dense single-site verification of the decomposition constants.
pub const DENSE_CONSTANTS: f64 = 1e-10;

/// Imaginary part of the fermion bilinear on periodic charts.
pub const FERMION_REALITY: f64 = 1e-10;

/// Analytic gradient vs central finite differences (relative).
pub const GRADIENT_FD: f64 = 1e-6;

/// Central-difference step for the gradient oracle.
pub const GRADIENT_FD_STEP: f64 = 1e-5;

/// Static solve target residual.
pub const STATIC_RESIDUAL: f64 = 1e-8;

/// Wave dispersion match (relative) for the fitted frequency.
pub const WAVE_DISPERSION: f64 = 1e-6;

/// Wave time-reversibility after a forward/backward round trip.
pub const WAVE_REVERSIBILITY: f64 = 1e-9;

/// Relative drift of the conserved leapfrog energy.
pub const WAVE_ENERGY_DRIFT: f64 = 1e-6;

/// Frame-rotation invariance of the action breakdown.
pub const GAUGE_FRAME_INVARIANCE: f64 = 1e-10;

/// Curvature convergence: minimum observed order on the sphere preset.
pub const CURVATURE_MIN_ORDER: f64 = 1.8;

/// Sphere scalar-curvature absolute error at h = 1e-2.
pub const SPHERE_SCAL_ABS: f64 = 1e-4;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_sane() {
        assert!(ALGEBRA_CHAINED < ALGEBRA_EXACT + 1e-30);
        assert!(BOCHNER_FLAT < TRACE_IDENTITY);
        assert!(GRADIENT_FD > GRADIENT_FD_STEP * 1e-3);
    }
}

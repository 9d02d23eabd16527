//! Default pass thresholds.

/// Soliton and structure-equation residuals for constant structures.
pub const LIE_GROUP: f64 = 1e-12;
/// Soliton and structure-equation residuals when derivatives come from jets.
pub const CHART: f64 = 1e-9;
/// Frame Ricci vs. coordinate Ricci.
pub const CROSSVAL: f64 = 1e-8;
/// Darboux axioms and constraint.
pub const AXIOMS: f64 = 1e-10;
/// Rotated-bracket variation separating homogeneous from inhomogeneous.
pub const HOMOGENEITY: f64 = 1e-7;
/// Normal-case zero tests (`b1 ≡ 0`, Einstein form).
pub const NORMAL: f64 = 1e-10;

pub fn for_mode(lie_group: bool) -> f64 {
    if lie_group {
        LIE_GROUP
    } else {
        CHART
    }
}

//! Ricci-soliton system, (κ, μ) detection and Segre types for paracontact
//! structures.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::GeometryError;
use crate::frame::{
    lie_metric, ricci_operator, BilinearKind, Epsilon, FrameCurvature, HTensor, ParacontactFrameSpec, SymBilinear,
    A1_LOCUS_TOLERANCE, XI,
};
use crate::jet::ChartPoint;

/// The only admissible soliton constant for a paracontact Reeb field.
pub const SOLITON_LAMBDA: f64 = -2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonVerdict {
    Soliton,
    NotSoliton,
    PreconditionFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreconditionFailure {
    pub what: String,
    pub residual: f64,
    pub point: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonReport {
    pub lambda: f64,
    /// `(1/3) tr(G⁻¹(L_ξg + ρ))` at the worst point.
    pub best_lambda: f64,
    /// `L_ξg + ρ - λG` at the worst point.
    pub residual_matrix: [[f64; 3]; 3],
    /// Largest entry of `L_ξg + ρ - λG` over all points.
    pub residual_norm: f64,
    /// Largest `|A - 2a1|`.
    pub a_residual: f64,
    /// Largest `|r + 6|`.
    pub r_residual: f64,
    pub scalar_curvature: f64,
    pub a_value: f64,
    pub a1_value: f64,
    pub epsilon: Epsilon,
    pub worst_point: [f64; 3],
    pub points_checked: usize,
    pub tolerance: f64,
    pub precondition: Option<PreconditionFailure>,
    pub verdict: SolitonVerdict,
}

/// Checks `L_ξg + ρ = λg` with `λ = -2` at every point.
pub fn soliton_check(spec: &ParacontactFrameSpec, points: &[ChartPoint], tol: f64) -> Result<SolitonReport, GeometryError> {
    let mut rep = SolitonReport {
        lambda: SOLITON_LAMBDA,
        best_lambda: f64::NAN,
        residual_matrix: [[0.0; 3]; 3],
        residual_norm: 0.0,
        a_residual: 0.0,
        r_residual: 0.0,
        scalar_curvature: f64::NAN,
        a_value: f64::NAN,
        a1_value: f64::NAN,
        epsilon: spec.epsilon.unwrap_or(Epsilon::Plus),
        worst_point: points.first().map(|p| p.as_array()).unwrap_or_default(),
        points_checked: 0,
        tolerance: tol,
        precondition: None,
        verdict: SolitonVerdict::Soliton,
    };
    let mut seen_eps: Option<Epsilon> = spec.epsilon;
    let mut worst = -1.0;
    for p in points {
        let s = spec.structure_at(p)?;
        if s.a1.value.abs() >= A1_LOCUS_TOLERANCE {
            let e = spec.epsilon_at(&s);
            match seen_eps {
                Some(prev) if prev != e => return Err(GeometryError::EpsilonNotConstant),
                _ => seen_eps = Some(e),
            }
        }
        let iht = match spec.ricci_iht(p, tol) {
            Ok(r) => r,
            Err(GeometryError::PreconditionViolated { what, residual }) => {
                rep.precondition = Some(PreconditionFailure {
                    what,
                    residual,
                    point: p.as_array(),
                });
                rep.verdict = SolitonVerdict::PreconditionFailed;
                rep.worst_point = p.as_array();
                rep.points_checked += 1;
                return Ok(rep);
            }
            Err(e) => return Err(e),
        };
        let lxg = lie_metric(&s);
        let sum = lxg.add(&iht.ricci, BilinearKind::SolitonResidual);
        let res = sum.plus_frame_metric(-SOLITON_LAMBDA, BilinearKind::SolitonResidual);
        let norm = res.max_abs();
        rep.a_residual = rep.a_residual.max((iht.a - 2.0 * s.a1.value).abs());
        rep.r_residual = rep.r_residual.max((iht.r + 6.0).abs());
        rep.residual_norm = rep.residual_norm.max(norm);
        if norm > worst {
            worst = norm;
            rep.residual_matrix = *res.matrix();
            rep.best_lambda = sum.frame_trace() / 3.0;
            rep.scalar_curvature = iht.r;
            rep.a_value = iht.a;
            rep.a1_value = s.a1.value;
            rep.epsilon = iht.epsilon;
            rep.worst_point = p.as_array();
        }
        rep.points_checked += 1;
    }
    if let Some(e) = seen_eps {
        rep.epsilon = e;
    }
    if rep.residual_norm.max(rep.a_residual).max(rep.r_residual) > tol {
        rep.verdict = SolitonVerdict::NotSoliton;
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaMu {
    pub kappa: f64,
    /// Absent on the paraSasakian locus `a1 = 0`.
    pub mu: Option<f64>,
    pub nilpotent_h: bool,
    /// Largest mismatch of `R(X, Y)ξ` against the (κ, μ) form.
    pub curvature_residual: f64,
}

/// (κ, μ) data of a paracontact structure with harmonic Reeb field:
/// `κ = -1`, `μ = -εA/a1`.
pub fn kappa_mu_detect(spec: &ParacontactFrameSpec, p: &ChartPoint, tol: f64) -> Result<KappaMu, GeometryError> {
    let iht = spec.ricci_iht(p, tol)?;
    let s = spec.structure_at(p)?;
    let a1 = s.a1.value;
    let kappa = -1.0;
    let mu = (a1.abs() >= A1_LOCUS_TOLERANCE).then(|| -iht.epsilon.value() * iht.a / a1);
    let h = HTensor::from_structure(&s);
    let mut h2max = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let v: f64 = (0..3).map(|k| h.matrix[i][k] * h.matrix[k][j]).sum();
            h2max = h2max.max(v.abs());
        }
    }
    let curv = FrameCurvature::from_structure(&s);
    let m = mu.unwrap_or(0.0);
    let mut residual = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let eta = |a: usize| if a == XI { 1.0 } else { 0.0 };
            let mut ei = [0.0; 3];
            let mut ej = [0.0; 3];
            ei[i] = 1.0;
            ej[j] = 1.0;
            let hi = h.apply(&ei);
            let hj = h.apply(&ej);
            let lhs = curv.apply(i, j, XI);
            for k in 0..3 {
                let rhs = kappa * (eta(i) * ej[k] - eta(j) * ei[k]) + m * (eta(i) * hj[k] - eta(j) * hi[k]);
                residual = residual.max((lhs[k] - rhs).abs());
            }
        }
    }
    Ok(KappaMu {
        kappa,
        mu,
        nilpotent_h: h2max <= tol * a1.abs().max(1.0).powi(2),
        curvature_residual: residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegreLabel {
    DiagDistinct,
    DiagRepeated,
    ComplexPair,
    #[serde(rename = "segre_21")]
    Segre21,
    #[serde(rename = "segre_degenerate_21")]
    SegreDegenerate21,
    #[serde(rename = "segre_3")]
    Segre3,
}

impl SegreLabel {
    pub fn name(self) -> &'static str {
        match self {
            SegreLabel::DiagDistinct => "diag_distinct",
            SegreLabel::DiagRepeated => "diag_repeated",
            SegreLabel::ComplexPair => "complex_pair",
            SegreLabel::Segre21 => "segre_21",
            SegreLabel::SegreDegenerate21 => "segre_degenerate_21",
            SegreLabel::Segre3 => "segre_3",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegreType {
    pub label: SegreLabel,
    /// Real eigenvalues with multiplicity, ascending.
    pub eigenvalues: Vec<f64>,
    /// `(re, im)` of the complex pair, `im > 0`.
    pub complex_pair: Option<(f64, f64)>,
    /// Segre symbol, e.g. `{(2,1)}`.
    pub notation: String,
    /// Set when a multiplicity or rank decision fell in the borderline band.
    pub borderline: bool,
}

const MULTIPLICITY_TOL: f64 = 1e-10;
const BORDERLINE_TOL: f64 = 1e-7;
const RANK_TOL: f64 = 1e-7;

fn rank_shifted(q: &Matrix3<f64>, lambda: f64, sigma: f64) -> (usize, bool) {
    let m = q - Matrix3::identity() * lambda;
    let sv = m.singular_values();
    let rank = sv.iter().filter(|&&s| s > RANK_TOL * sigma).count();
    let borderline = sv
        .iter()
        .any(|&s| s > MULTIPLICITY_TOL * sigma && s <= RANK_TOL * sigma);
    (rank, borderline)
}

/// Segre type of the Ricci operator `Q = G⁻¹ρ`.
pub fn segre_classify(ricci: &SymBilinear) -> SegreType {
    let qa = ricci_operator(ricci);
    let q = Matrix3::from_fn(|i, j| qa[i][j]);
    let sigma = qa.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));

    let tr = q.trace();
    let c2 = q[(0, 0)] * q[(1, 1)] - q[(0, 1)] * q[(1, 0)] + q[(0, 0)] * q[(2, 2)] - q[(0, 2)] * q[(2, 0)]
        + q[(1, 1)] * q[(2, 2)]
        - q[(1, 2)] * q[(2, 1)];
    let det = q.determinant();
    // λ³ + aλ² + bλ + c, shifted λ = t + s
    let (a, b, c) = (-tr, c2, -det);
    let s = tr / 3.0;
    let p = b - a * a / 3.0;
    let qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

    let mk = |label: SegreLabel, eig: Vec<f64>, cp: Option<(f64, f64)>, notation: &str, borderline: bool| SegreType {
        label,
        eigenvalues: eig,
        complex_pair: cp,
        notation: notation.to_string(),
        borderline,
    };

    let triple_at = |tol: f64| p.abs() <= tol * sigma * sigma && qq.abs() <= tol * sigma.powi(3);
    if triple_at(BORDERLINE_TOL) {
        let borderline_mult = !triple_at(MULTIPLICITY_TOL);
        let (rank, borderline_rank) = rank_shifted(&q, s, sigma);
        let borderline = borderline_mult || borderline_rank;
        let eig = vec![s, s, s];
        return match rank {
            0 => mk(SegreLabel::DiagRepeated, eig, None, "{(1,1,1)}", borderline),
            1 => mk(SegreLabel::SegreDegenerate21, eig, None, "{(2,1)}", borderline),
            _ => mk(SegreLabel::Segre3, eig, None, "{3}", borderline),
        };
    }

    let num = 4.0 * p.powi(3) + 27.0 * qq * qq;
    let den = 4.0 * p.abs().powi(3) + 27.0 * qq * qq;
    let measure = num / den;
    if measure.abs() <= BORDERLINE_TOL {
        let borderline_mult = measure.abs() > MULTIPLICITY_TOL;
        let double = -3.0 * qq / (2.0 * p) + s;
        let simple = 3.0 * qq / p + s;
        let (rank, borderline_rank) = rank_shifted(&q, double, sigma);
        let mut eig = vec![double, double, simple];
        eig.sort_by(f64::total_cmp);
        let borderline = borderline_mult || borderline_rank;
        return if rank <= 1 {
            mk(SegreLabel::DiagRepeated, eig, None, "{(1,1),1}", borderline)
        } else {
            mk(SegreLabel::Segre21, eig, None, "{2,1}", borderline)
        };
    }

    if measure > 0.0 {
        // one real root and a complex pair
        let d = (qq * qq / 4.0 + p.powi(3) / 27.0).sqrt();
        let t0 = (-qq / 2.0 + d).cbrt() + (-qq / 2.0 - d).cbrt();
        let im = (3.0 * t0 * t0 + 4.0 * p).abs().sqrt() / 2.0;
        mk(
            SegreLabel::ComplexPair,
            vec![t0 + s],
            Some((-t0 / 2.0 + s, im)),
            "{z,z̄,1}",
            false,
        )
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * qq / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let mut eig: Vec<f64> = (0..3)
            .map(|k| r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + s)
            .collect();
        eig.sort_by(f64::total_cmp);
        mk(SegreLabel::DiagDistinct, eig, None, "{1,1,1}", false)
    }
}

/// Left-invariant paracontact structure on `SL(2, R)` carrying a
/// nontrivial Ricci soliton: `a2 = a1`, `a3 = 1`, `a4 = a5 = 0`, `ε = 1`.
pub fn homogeneous_soliton(a1: f64) -> Result<ParacontactFrameSpec, GeometryError> {
    if a1 == 0.0 || !a1.is_finite() {
        return Err(GeometryError::ZeroParameter("a1"));
    }
    Ok(ParacontactFrameSpec::from_constants([a1, a1, 1.0, 0.0, 0.0], Some(Epsilon::Plus)))
}

/// `Qξ` for a frame Ricci tensor.
pub fn ricci_operator_on_xi(ricci: &SymBilinear) -> [f64; 3] {
    let q = ricci_operator(ricci);
    [q[0][XI], q[1][XI], q[2][XI]]
}

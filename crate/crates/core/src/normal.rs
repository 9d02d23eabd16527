//! Normal almost paracontact metric structures (`h = 0`, i.e.
//! `a1 = a2 = 0`), described by `b1, b2, a3, a4, a5`.

use serde::Serialize;

use crate::error::GeometryError;
use crate::expr::{Bindings, ExprAst};
use crate::frame::{
    lie_metric, lie_metric_from_connection, BilinearKind, Epsilon, FrameConnection, FrameMode, NaturalFrameSpec,
    StructureValues, SymBilinear, E, PHI_E, XI,
};
use crate::jet::ChartPoint;

/// Names of the normal structure functions, in storage order.
pub const NORMAL_NAMES: [&str; 5] = ["b1", "b2", "a3", "a4", "a5"];

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFrameSpec {
    /// `b1, b2, a3, a4, a5`.
    pub fields: [ExprAst; 5],
    natural: NaturalFrameSpec,
}

impl NormalFrameSpec {
    pub fn new(fields: [ExprAst; 5], mode: FrameMode, env: Bindings) -> Result<Self, GeometryError> {
        let [b1, b2, a3, a4, a5] = fields.clone();
        let zero = ExprAst::num(0.0);
        let natural = NaturalFrameSpec::new([zero.clone(), zero, a3, a4, a5, b1, b2], mode, env)?;
        Ok(Self { fields, natural })
    }

    pub fn from_constants(b1: f64, b2: f64, a3: f64, a4: f64, a5: f64) -> Self {
        Self::new([b1, b2, a3, a4, a5].map(ExprAst::num), FrameMode::LieGroup, Bindings::new())
            .expect("numeric literals are coordinate free")
    }

    pub fn natural(&self) -> &NaturalFrameSpec {
        &self.natural
    }

    pub fn is_lie_group(&self) -> bool {
        self.natural.is_lie_group()
    }

    pub fn structure_at(&self, p: &ChartPoint) -> Result<StructureValues, GeometryError> {
        self.natural.structure_at(p)
    }

    /// Jacobi residuals in the normal case:
    ///
    /// ```text
    /// ξ(b2) + 2 b1 b2
    /// -ξ(a4) + e(a3 - b2) + φe(b1) - b1 a4 + a5 (a3 - b2)
    /// ξ(a5) - e(b1) - φe(a3 - b2) + b1 a5 - a4 (a3 - b2)
    /// ```
    pub fn jacobi_residual(&self, p: &ChartPoint) -> Result<[f64; 3], GeometryError> {
        let s = self.structure_at(p)?;
        let (b1, b2, a3, a4, a5) = (s.b1, s.b2, s.a3, s.a4, s.a5);
        let k = a3 - b2;
        Ok([
            b2.along(XI) + 2.0 * b1.value * b2.value,
            -a4.along(XI) + k.along(E) + b1.along(PHI_E) - b1.value * a4.value + a5.value * k.value,
            a5.along(XI) - b1.along(E) - k.along(PHI_E) + b1.value * a5.value - a4.value * k.value,
        ])
    }

    /// `ξ(b1) + 2b1²`; vanishes iff ξ is an infinitesimal harmonic
    /// transformation.
    pub fn iht_residual(&self, p: &ChartPoint) -> Result<f64, GeometryError> {
        let s = self.structure_at(p)?;
        Ok(iht_residual(&s))
    }

    pub fn ricci(&self, p: &ChartPoint) -> Result<NormalRicciData, GeometryError> {
        Ok(NormalRicciData::from_structure(&self.structure_at(p)?))
    }

    /// `f = (L_ξg)(ξ, ξ)`, the only possible conformal factor of ξ.
    pub fn conformal_factor(&self, p: &ChartPoint) -> Result<f64, GeometryError> {
        let conn = FrameConnection::from_structure(&self.structure_at(p)?);
        Ok(lie_metric_from_connection(&conn).get(XI, XI))
    }
}

fn iht_residual(s: &StructureValues) -> f64 {
    s.b1.along(XI) + 2.0 * s.b1.value * s.b1.value
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalRicciData {
    /// `Ã = ξ(b1) + b1² + b2²`.
    pub a_tilde: f64,
    /// `B̃ = φe(a4) - e(a5) + a4² - a5² - b1² + b2² + 2 b2 a3`.
    pub b_tilde: f64,
    pub ricci: SymBilinear,
    pub r: f64,
}

impl NormalRicciData {
    pub fn from_structure(s: &StructureValues) -> Self {
        let (b1, b2, a3, a4, a5) = (s.b1, s.b2, s.a3, s.a4, s.a5);
        let at = b1.along(XI) + b1.value * b1.value + b2.value * b2.value;
        let bt = a4.along(PHI_E) - a5.along(E) + a4.value * a4.value - a5.value * a5.value - b1.value * b1.value
            + b2.value * b2.value
            + 2.0 * b2.value * a3.value;
        let r01 = b2.along(PHI_E) - b1.along(E);
        let r02 = b2.along(E) - b1.along(PHI_E);
        let ricci = SymBilinear::new(
            BilinearKind::Ricci,
            [[-2.0 * at, r01, r02], [r01, bt - at, 0.0], [r02, 0.0, at - bt]],
        );
        Self {
            a_tilde: at,
            b_tilde: bt,
            ricci,
            r: 2.0 * bt - 4.0 * at,
        }
    }

    /// The tensor rewritten through `B̃ = 2Ã + r/2`.
    pub fn reduced_form(&self) -> SymBilinear {
        let m = self.ricci.matrix();
        let d = self.a_tilde + 0.5 * self.r;
        SymBilinear::new(
            BilinearKind::Ricci,
            [[-2.0 * self.a_tilde, m[0][1], m[0][2]], [m[1][0], d, 0.0], [m[2][0], 0.0, -d]],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AffineKillingVerdict {
    Killing,
    NotAffineKilling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalClass {
    QuasiParaSasakian,
    ParaCosymplectic,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineKillingReport {
    pub verdict: AffineKillingVerdict,
    pub class: Option<NormalClass>,
    /// Largest of `|ξ(b1)|`, `|ξ(b2)|`, `|ξ(b1) + 2b1²|`.
    pub residual: f64,
    pub worst_point: [f64; 3],
}

/// ξ is affine Killing iff `ξ(b1) = ξ(b2) = ξ(b1) + 2b1² = 0`, which forces
/// `b1 = 0`; the class then follows from `b2`.
pub fn normal_affine_killing(spec: &NormalFrameSpec, points: &[ChartPoint], tol: f64) -> Result<AffineKillingReport, GeometryError> {
    let mut residual = 0.0f64;
    let mut worst_point = points.first().map(|p| p.as_array()).unwrap_or_default();
    let (mut pos, mut neg, mut zero) = (false, false, false);
    for p in points {
        let s = spec.structure_at(p)?;
        let r = s.b1.along(XI).abs().max(s.b2.along(XI).abs()).max(iht_residual(&s).abs());
        if r > residual {
            residual = r;
            worst_point = p.as_array();
        }
        let b2 = s.b2.value;
        if b2.abs() <= tol {
            zero = true;
        } else if b2 > 0.0 {
            pos = true;
        } else {
            neg = true;
        }
    }
    let killing = residual <= tol;
    let class = killing.then(|| match (pos, neg, zero) {
        (false, false, true) => NormalClass::ParaCosymplectic,
        (true, false, false) | (false, true, false) => NormalClass::QuasiParaSasakian,
        _ => NormalClass::Undecided,
    });
    Ok(AffineKillingReport {
        verdict: if killing {
            AffineKillingVerdict::Killing
        } else {
            AffineKillingVerdict::NotAffineKilling
        },
        class,
        residual,
        worst_point,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalSolitonVerdict {
    TrivialUnsteady,
    Steady,
    NotSoliton,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalSolitonReport {
    pub lambda: f64,
    pub verdict: NormalSolitonVerdict,
    /// Why the verdict is not a soliton; empty otherwise.
    pub reasons: Vec<String>,
    /// Largest `|ξ(b1) + 2b1²|`.
    pub iht_residual: f64,
    /// Largest residual of each of the four soliton equations.
    pub system_residuals: [f64; 4],
    /// Largest `|λ - 2(b1² - b2²)|`.
    pub forced_lambda_residual: f64,
    /// Largest `|λ b1|`.
    pub lambda_b1: f64,
    pub max_abs_b1: f64,
    /// Sectional curvature `-b2²` on the unsteady branch.
    pub sectional_curvature: Option<f64>,
    /// Largest `|ρ - 2kG|` on the unsteady branch.
    pub einstein_residual: Option<f64>,
    pub epsilon: Option<Epsilon>,
    /// Largest residuals of `b2 - εb1`, `ξ(b1) + 2b1²`, `r + 4b1`,
    /// `(e - εφe)(b1)` on the steady branch.
    pub steady_residuals: Option<[f64; 4]>,
    /// Largest `|L_ξg - diag(0, 2b1, -2b1)|`.
    pub lie_metric_residual: f64,
    pub scalar_curvature: Vec<f64>,
    pub points_checked: usize,
    pub tolerance: f64,
}

struct PointEval {
    s: StructureValues,
    ricci: NormalRicciData,
}

/// Decide whether `L_ξg + ρ = λg` holds, following the normal-case
/// system and its forced consequences `λ = 2(b1² - b2²)`, `λ b1 = 0`.
pub fn normal_soliton_check(
    spec: &NormalFrameSpec,
    lambda: f64,
    points: &[ChartPoint],
    tol: f64,
) -> Result<NormalSolitonReport, GeometryError> {
    let evals = points
        .iter()
        .map(|p| {
            let s = spec.structure_at(p)?;
            Ok(PointEval {
                ricci: NormalRicciData::from_structure(&s),
                s,
            })
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;

    let mut rep = NormalSolitonReport {
        lambda,
        verdict: NormalSolitonVerdict::NotSoliton,
        reasons: Vec::new(),
        iht_residual: 0.0,
        system_residuals: [0.0; 4],
        forced_lambda_residual: 0.0,
        lambda_b1: 0.0,
        max_abs_b1: 0.0,
        sectional_curvature: None,
        einstein_residual: None,
        epsilon: None,
        steady_residuals: None,
        lie_metric_residual: 0.0,
        scalar_curvature: Vec::with_capacity(points.len()),
        points_checked: points.len(),
        tolerance: tol,
    };

    for ev in &evals {
        let (s, rd) = (&ev.s, &ev.ricci);
        let b1 = s.b1.value;
        let b2 = s.b2.value;
        rep.iht_residual = rep.iht_residual.max(iht_residual(s).abs());
        let sys = [
            lambda + 2.0 * rd.a_tilde,
            2.0 * b1 + rd.a_tilde + 0.5 * rd.r - lambda,
            s.b2.along(PHI_E) - s.b1.along(E),
            s.b2.along(E) - s.b1.along(PHI_E),
        ];
        for (acc, v) in rep.system_residuals.iter_mut().zip(sys) {
            *acc = acc.max(v.abs());
        }
        rep.forced_lambda_residual = rep.forced_lambda_residual.max((lambda - 2.0 * (b1 * b1 - b2 * b2)).abs());
        rep.lambda_b1 = rep.lambda_b1.max((lambda * b1).abs());
        rep.max_abs_b1 = rep.max_abs_b1.max(b1.abs());
        let expect = [[0.0, 0.0, 0.0], [0.0, 2.0 * b1, 0.0], [0.0, 0.0, -2.0 * b1]];
        let l = lie_metric(s);
        for i in 0..3 {
            for j in 0..3 {
                rep.lie_metric_residual = rep.lie_metric_residual.max((l.get(i, j) - expect[i][j]).abs());
            }
        }
        rep.scalar_curvature.push(rd.r);
    }

    if rep.iht_residual > tol {
        rep.reasons.push(format!("xi(b1) + 2 b1^2 = {} (not harmonic)", rep.iht_residual));
    }
    for (i, v) in rep.system_residuals.iter().enumerate() {
        if *v > tol {
            rep.reasons.push(format!("soliton equation {} residual {}", i + 1, v));
        }
    }
    if rep.forced_lambda_residual > tol {
        rep.reasons.push(format!(
            "lambda - 2(b1^2 - b2^2) = {} (forced value violated)",
            rep.forced_lambda_residual
        ));
    }
    if rep.lambda_b1 > tol {
        rep.reasons.push(format!("lambda b1 = {} != 0", rep.lambda_b1));
    }

    if lambda.abs() > tol {
        if rep.max_abs_b1 > crate::tolerances::NORMAL {
            rep.reasons.push(format!("b1 must vanish when lambda != 0 (max |b1| = {})", rep.max_abs_b1));
        }
        if let Some(first) = evals.first() {
            let k = -first.s.b2.value * first.s.b2.value;
            let mut worst = 0.0f64;
            for ev in &evals {
                let einstein = SymBilinear::new(BilinearKind::Ricci, [[0.0; 3]; 3]).plus_frame_metric(2.0 * k, BilinearKind::Ricci);
                for i in 0..3 {
                    for j in 0..3 {
                        worst = worst.max((ev.ricci.ricci.get(i, j) - einstein.get(i, j)).abs());
                    }
                }
            }
            rep.sectional_curvature = Some(k);
            rep.einstein_residual = Some(worst);
            if worst > tol {
                rep.reasons.push(format!("not Einstein with k = -b2^2 (residual {worst})"));
            }
        }
        if rep.reasons.is_empty() {
            rep.verdict = NormalSolitonVerdict::TrivialUnsteady;
        }
    } else {
        let mut eps: Option<Epsilon> = None;
        for ev in &evals {
            let (b1, b2) = (ev.s.b1.value, ev.s.b2.value);
            if b1.abs() >= 1e-12 {
                let e = if b2 / b1 < 0.0 { Epsilon::Minus } else { Epsilon::Plus };
                match eps {
                    Some(prev) if prev != e => return Err(GeometryError::EpsilonNotConstant),
                    _ => eps = Some(e),
                }
            }
        }
        let e = eps.unwrap_or(Epsilon::Plus).value();
        let mut st = [0.0f64; 4];
        for ev in &evals {
            let s = &ev.s;
            let vals = [
                s.b2.value - e * s.b1.value,
                iht_residual(s),
                ev.ricci.r + 4.0 * s.b1.value,
                s.b1.along(E) - e * s.b1.along(PHI_E),
            ];
            for (acc, v) in st.iter_mut().zip(vals) {
                *acc = acc.max(v.abs());
            }
        }
        let names = ["b2 = epsilon b1", "xi(b1) = -2 b1^2", "r = -4 b1", "(e - epsilon phi e)(b1) = 0"];
        for (n, v) in names.iter().zip(st) {
            if v > tol {
                rep.reasons.push(format!("steady condition {n} violated (residual {v})"));
            }
        }
        rep.epsilon = eps;
        rep.steady_residuals = Some(st);
        if rep.reasons.is_empty() {
            rep.verdict = NormalSolitonVerdict::Steady;
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FlatCorollary {
    /// Steady soliton with `ξ(r) = 0`: forced flat, and it is.
    Flat,
    /// Steady soliton with `ξ(r) = 0` that is not flat.
    Violated { max_b: f64 },
    /// Steady soliton whose scalar curvature varies along ξ.
    NotApplicable { max_xi_r: f64 },
    /// Unsteady soliton: constant curvature `k = -b2² ≤ 0`.
    ConstantCurvature { k: f64 },
    /// No soliton to apply the corollary to.
    NoSoliton,
}

/// Consequences for solitons with `ξ(r) = 0`.
pub fn normal_flat_corollary(
    spec: &NormalFrameSpec,
    report: &NormalSolitonReport,
    points: &[ChartPoint],
    tol: f64,
) -> Result<FlatCorollary, GeometryError> {
    match report.verdict {
        NormalSolitonVerdict::NotSoliton => Ok(FlatCorollary::NoSoliton),
        NormalSolitonVerdict::TrivialUnsteady => Ok(FlatCorollary::ConstantCurvature {
            k: report.sectional_curvature.unwrap_or(0.0),
        }),
        NormalSolitonVerdict::Steady => {
            // on the steady branch r = -4b1, so ξ(r) = -4ξ(b1)
            let mut max_xi_r = 0.0f64;
            let mut max_b = 0.0f64;
            for p in points {
                let s = spec.structure_at(p)?;
                max_xi_r = max_xi_r.max((4.0 * s.b1.along(XI)).abs());
                max_b = max_b.max(s.b1.value.abs()).max(s.b2.value.abs());
            }
            Ok(if max_xi_r > tol {
                FlatCorollary::NotApplicable { max_xi_r }
            } else if max_b <= tol {
                FlatCorollary::Flat
            } else {
                FlatCorollary::Violated { max_b }
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o() -> ChartPoint {
        ChartPoint::origin()
    }

    #[test]
    fn jacobi_constants() {
        let s = NormalFrameSpec::from_constants(0.0, 2.5, 0.0, 0.0, 0.0);
        assert_eq!(s.jacobi_residual(&o()).unwrap(), [0.0; 3]);
        let s = NormalFrameSpec::from_constants(0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(s.jacobi_residual(&o()).unwrap(), [0.0; 3]);
    }

    #[test]
    fn iht_constants() {
        assert_eq!(NormalFrameSpec::from_constants(1.0, 0.0, 0.0, 0.0, 0.0).iht_residual(&o()).unwrap(), 2.0);
        assert_eq!(NormalFrameSpec::from_constants(0.0, 3.0, 0.0, 0.0, 0.0).iht_residual(&o()).unwrap(), 0.0);
    }

    #[test]
    fn affine_killing_classes() {
        let pts = [o()];
        let r = normal_affine_killing(&NormalFrameSpec::from_constants(0.0, 3.0, 0.0, 0.0, 0.0), &pts, 1e-12).unwrap();
        assert_eq!((r.verdict, r.class), (AffineKillingVerdict::Killing, Some(NormalClass::QuasiParaSasakian)));
        let r = normal_affine_killing(&NormalFrameSpec::from_constants(0.0, 0.0, 0.0, 0.0, 0.0), &pts, 1e-12).unwrap();
        assert_eq!(r.class, Some(NormalClass::ParaCosymplectic));
        let r = normal_affine_killing(&NormalFrameSpec::from_constants(1.0, 0.0, 0.0, 0.0, 0.0), &pts, 1e-12).unwrap();
        assert_eq!(r.verdict, AffineKillingVerdict::NotAffineKilling);
        assert_eq!(r.residual, 2.0);
    }

    #[test]
    fn ricci_of_constants() {
        let c = 1.5;
        let d = NormalFrameSpec::from_constants(0.0, c, 0.0, 0.0, 0.0).ricci(&o()).unwrap();
        assert_eq!((d.a_tilde, d.b_tilde), (c * c, c * c));
        assert_eq!(*d.ricci.matrix(), [[-2.0 * c * c, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);

        let d = NormalFrameSpec::from_constants(0.0, c, -c, 0.0, 0.0).ricci(&o()).unwrap();
        let k = -c * c;
        assert_eq!(*d.ricci.matrix(), [[2.0 * k, 0.0, 0.0], [0.0, 2.0 * k, 0.0], [0.0, 0.0, -2.0 * k]]);
        assert_eq!(d.r, 6.0 * k);
        assert_eq!(d.reduced_form(), d.ricci);

        let d = NormalFrameSpec::from_constants(0.0, 0.0, 0.0, 0.0, 0.0).ricci(&o()).unwrap();
        assert_eq!(d.ricci.max_abs(), 0.0);
    }

    #[test]
    fn trivial_unsteady() {
        let c = 2.0;
        let s = NormalFrameSpec::from_constants(0.0, c, -c, 0.0, 0.0);
        let r = normal_soliton_check(&s, -2.0 * c * c, &[o()], 1e-10).unwrap();
        assert_eq!(r.verdict, NormalSolitonVerdict::TrivialUnsteady, "{:?}", r.reasons);
        assert_eq!(r.sectional_curvature, Some(-4.0));
        assert_eq!(normal_flat_corollary(&s, &r, &[o()], 1e-10).unwrap(), FlatCorollary::ConstantCurvature { k: -4.0 });
    }

    #[test]
    fn lambda_b1_rejected() {
        let s = NormalFrameSpec::from_constants(1.0, 0.0, 0.0, 0.0, 0.0);
        let r = normal_soliton_check(&s, 2.0, &[o()], 1e-10).unwrap();
        assert_eq!(r.verdict, NormalSolitonVerdict::NotSoliton);
        assert!(r.reasons.iter().any(|m| m.contains("lambda b1")));
    }

    #[test]
    fn flat_is_steady_and_flat() {
        let s = NormalFrameSpec::from_constants(0.0, 0.0, 0.0, 0.0, 0.0);
        let r = normal_soliton_check(&s, 0.0, &[o()], 1e-10).unwrap();
        assert_eq!(r.verdict, NormalSolitonVerdict::Steady);
        assert_eq!(normal_flat_corollary(&s, &r, &[o()], 1e-10).unwrap(), FlatCorollary::Flat);
    }

    #[test]
    fn conformal_factor_zero() {
        for b1 in [0.0, 5.0, -3.0] {
            let s = NormalFrameSpec::from_constants(b1, 1.0, 2.0, 3.0, 4.0);
            assert_eq!(s.conformal_factor(&o()).unwrap(), 0.0);
        }
    }
}

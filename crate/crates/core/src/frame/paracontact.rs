use serde::Serialize;

use super::{
    tables, BilinearKind, FrameMode, NaturalFrameSpec, StructureValues, SymBilinear, E, PHI_E, XI,
};
use crate::error::GeometryError;
use crate::expr::{Bindings, ExprAst};
use crate::jet::ChartPoint;

/// Below this `|a1|` a point is on the paraSasakian locus and ε carries no
/// information.
pub const A1_LOCUS_TOLERANCE: f64 = 1e-12;

/// Relative tolerance for `a2 = ε a1`.
pub const NILPOTENT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Epsilon {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Epsilon {
    pub fn value(self) -> f64 {
        match self {
            Epsilon::Plus => 1.0,
            Epsilon::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Option<Self> {
        if v == 1.0 {
            Some(Epsilon::Plus)
        } else if v == -1.0 {
            Some(Epsilon::Minus)
        } else {
            None
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Epsilon::Plus => Epsilon::Minus,
            Epsilon::Minus => Epsilon::Plus,
        }
    }
}

/// Paracontact metric structure on a φ-basis: `a1..a5` free, `b1 = a2`,
/// `b2 = a1 - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParacontactFrameSpec {
    pub a: [ExprAst; 5],
    /// Declared sign in `a2 = ε a1`; inferred from the data when absent.
    pub epsilon: Option<Epsilon>,
    natural: NaturalFrameSpec,
}

/// Ricci data of a paracontact structure whose Reeb field is an
/// infinitesimal harmonic transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IhtRicci {
    pub ricci: SymBilinear,
    pub a: f64,
    pub b: f64,
    pub r: f64,
    pub epsilon: Epsilon,
}

impl IhtRicci {
    /// The same tensor written through `B = -r/2 - 1`.
    pub fn reduced_form(&self) -> SymBilinear {
        let (a, r, e) = (self.a, self.r, self.epsilon.value());
        SymBilinear::new(
            BilinearKind::Ricci,
            [
                [-2.0, 0.0, 0.0],
                [0.0, 0.5 * r + 1.0 - e * a, a],
                [0.0, a, -0.5 * r - 1.0 - e * a],
            ],
        )
    }

    /// `Q = G⁻¹ρ` as a matrix acting on frame components.
    pub fn ricci_operator(&self) -> [[f64; 3]; 3] {
        ricci_operator(&self.ricci)
    }
}

/// The Ricci operator `Q = G⁻¹ρ` on frame components.
pub fn ricci_operator(rho: &SymBilinear) -> [[f64; 3]; 3] {
    let mut q = *rho.matrix();
    for (a, row) in q.iter_mut().enumerate() {
        for v in row.iter_mut() {
            *v *= super::SIGNATURE[a];
        }
    }
    q
}

impl ParacontactFrameSpec {
    pub fn new(a: [ExprAst; 5], epsilon: Option<Epsilon>, mode: FrameMode, env: Bindings) -> Result<Self, GeometryError> {
        let b1 = a[1].clone();
        let b2 = ExprAst::sub(a[0].clone(), ExprAst::num(1.0));
        let [a1, a2, a3, a4, a5] = a.clone();
        let natural = NaturalFrameSpec::new([a1, a2, a3, a4, a5, b1, b2], mode, env)?;
        Ok(Self { a, epsilon, natural })
    }

    pub fn from_constants(a: [f64; 5], epsilon: Option<Epsilon>) -> Self {
        Self::new(a.map(ExprAst::num), epsilon, FrameMode::LieGroup, Bindings::new())
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

    /// Declared ε, else `sign(a2/a1)` off the paraSasakian locus, else `+1`.
    pub fn epsilon_at(&self, s: &StructureValues) -> Epsilon {
        if let Some(e) = self.epsilon {
            return e;
        }
        let (a1, a2) = (s.a1.value, s.a2.value);
        if a1.abs() >= A1_LOCUS_TOLERANCE && a2 / a1 < 0.0 {
            Epsilon::Minus
        } else {
            Epsilon::Plus
        }
    }

    /// `|a2 - ε a1|`, scaled by `max(1, |a1|)`.
    pub fn nilpotency_defect(&self, s: &StructureValues, eps: Epsilon) -> f64 {
        (s.a2.value - eps.value() * s.a1.value).abs() / s.a1.value.abs().max(1.0)
    }

    /// Jacobi residuals; the first entry vanishes identically.
    pub fn jacobi(&self, p: &ChartPoint) -> Result<[f64; 3], GeometryError> {
        let mut r = tables::jacobi_residual(&self.structure_at(p)?);
        r[0] = 0.0;
        Ok(r)
    }

    /// Residuals of the system characterizing `tr(L_ξ∇) = 0` once
    /// `a2 = ε a1`:
    ///
    /// ```text
    /// ξ(a4) - e(a3) + ε a1 a4 - a5 (a3 - a1 + 1)
    /// ξ(a5) - φe(a3) - ε a1 a5 - a4 (a3 + a1 + 1)
    /// (e + ε φe)(a1) + 2ε a1 a4 + 2 a1 a5
    /// ```
    pub fn iht_system(s: &StructureValues, eps: Epsilon) -> [f64; 3] {
        let e = eps.value();
        let (a1, a3, a4, a5) = (s.a1, s.a3, s.a4, s.a5);
        [
            a4.along(XI) - a3.along(E) + e * a1.value * a4.value - a5.value * (a3.value - a1.value + 1.0),
            a5.along(XI) - a3.along(PHI_E) - e * a1.value * a5.value - a4.value * (a3.value + a1.value + 1.0),
            a1.along(E) + e * a1.along(PHI_E) + 2.0 * e * a1.value * a4.value + 2.0 * a1.value * a5.value,
        ]
    }

    /// Largest IHT violation at `p`: nilpotency defect and the three
    /// residuals of [`Self::iht_system`].
    pub fn iht_defect(&self, p: &ChartPoint) -> Result<(f64, Epsilon), GeometryError> {
        let s = self.structure_at(p)?;
        let eps = self.epsilon_at(&s);
        let sys = Self::iht_system(&s, eps);
        let worst = sys.iter().fold(self.nilpotency_defect(&s, eps), |m, v| m.max(v.abs()));
        Ok((worst, eps))
    }

    pub fn ricci_iht(&self, p: &ChartPoint, tol: f64) -> Result<IhtRicci, GeometryError> {
        let s = self.structure_at(p)?;
        let eps = self.epsilon_at(&s);
        let nil = self.nilpotency_defect(&s, eps);
        if nil > NILPOTENT_TOLERANCE {
            return Err(GeometryError::PreconditionViolated {
                what: "a2 = epsilon a1".into(),
                residual: nil,
            });
        }
        let sys = Self::iht_system(&s, eps);
        for (i, v) in sys.iter().enumerate() {
            if v.abs() > tol {
                return Err(GeometryError::PreconditionViolated {
                    what: format!("harmonic transformation equation {}", i + 1),
                    residual: v.abs(),
                });
            }
        }
        Ok(Self::ricci_from_structure(&s, eps))
    }

    /// Ricci data from the closed form, without checking the precondition.
    pub fn ricci_from_structure(s: &StructureValues, eps: Epsilon) -> IhtRicci {
        let e = eps.value();
        let (a1, a3, a4, a5) = (s.a1, s.a3, s.a4, s.a5);
        let a = a1.along(XI) + 2.0 * e * a1.value * a3.value;
        let b = a5.along(E) - a4.along(PHI_E) + 2.0 * a3.value - a4.value * a4.value + a5.value * a5.value;
        let ricci = SymBilinear::new(
            BilinearKind::Ricci,
            [[-2.0, 0.0, 0.0], [0.0, -b - e * a, a], [0.0, a, b - e * a]],
        );
        IhtRicci {
            ricci,
            a,
            b,
            r: -2.0 - 2.0 * b,
            epsilon: eps,
        }
    }

    /// Frame components of `tr(L_ξ∇)`, with the Jacobi equations used to
    /// eliminate `ξ(a4)` and `ξ(a5)`.
    pub fn harmonic_residual(&self, p: &ChartPoint) -> Result<[f64; 3], GeometryError> {
        let s = self.structure_at(p)?;
        let (a1, a2, a4, a5) = (s.a1, s.a2, s.a4, s.a5);
        Ok([
            4.0 * (a1.value * a1.value - a2.value * a2.value),
            2.0 * a2.along(E) + 2.0 * a1.along(PHI_E) + 4.0 * a1.value * a4.value + 4.0 * a2.value * a5.value,
            2.0 * a1.along(E) + 2.0 * a2.along(PHI_E) + 4.0 * a2.value * a4.value + 4.0 * a1.value * a5.value,
        ])
    }

    /// Residuals of the affine-Killing system for ξ:
    /// `ξ(a2) + 2a1a3`, `ξ(a2) + 2a2² + 2a1(a3 - a1 + 1)`,
    /// `ξ(a2) - 2a2² + 2a1(a3 + a1 + 1)`.
    pub fn affine_killing_residual(&self, p: &ChartPoint) -> Result<[f64; 3], GeometryError> {
        let s = self.structure_at(p)?;
        let (a1, a2, a3) = (s.a1.value, s.a2.value, s.a3.value);
        let xa2 = s.a2.along(XI);
        Ok([
            xa2 + 2.0 * a1 * a3,
            xa2 + 2.0 * a2 * a2 + 2.0 * a1 * (a3 - a1 + 1.0),
            xa2 - 2.0 * a2 * a2 + 2.0 * a1 * (a3 + a1 + 1.0),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o() -> ChartPoint {
        ChartPoint::origin()
    }

    #[test]
    fn sl2_ricci() {
        let s = ParacontactFrameSpec::from_constants([1.0, 1.0, 1.0, 0.0, 0.0], Some(Epsilon::Plus));
        let r = s.ricci_iht(&o(), 1e-12).unwrap();
        assert_eq!((r.a, r.b, r.r), (2.0, 2.0, -6.0));
        assert_eq!(*r.ricci.matrix(), [[-2.0, 0.0, 0.0], [0.0, -4.0, 2.0], [0.0, 2.0, 0.0]]);
        assert_eq!(r.reduced_form(), r.ricci);
        let q = r.ricci_operator();
        assert_eq!([q[0][0], q[1][0], q[2][0]], [-2.0, 0.0, 0.0]);
    }

    #[test]
    fn para_sasakian_ricci_is_diagonal() {
        let s = ParacontactFrameSpec::from_constants([0.0; 5], None);
        let r = s.ricci_iht(&o(), 1e-12).unwrap();
        assert_eq!(r.a, 0.0);
        assert_eq!(r.ricci.get(1, 2), 0.0);
        assert_eq!(r.r, -2.0);
    }

    #[test]
    fn non_nilpotent_rejected() {
        let s = ParacontactFrameSpec::from_constants([1.0, 0.0, 0.0, 0.0, 0.0], None);
        assert!(matches!(s.ricci_iht(&o(), 1e-12), Err(GeometryError::PreconditionViolated { .. })));
    }

    #[test]
    fn epsilon_inference() {
        let s = ParacontactFrameSpec::from_constants([-3.0, 3.0, 1.0, 0.0, 0.0], None);
        let sv = s.structure_at(&o()).unwrap();
        assert_eq!(s.epsilon_at(&sv), Epsilon::Minus);
        let s = ParacontactFrameSpec::from_constants([0.0, 0.0, 1.0, 0.0, 0.0], None);
        assert_eq!(s.epsilon_at(&s.structure_at(&o()).unwrap()), Epsilon::Plus);
    }

    #[test]
    fn harmonic_examples() {
        let s = ParacontactFrameSpec::from_constants([1.0, 1.0, 1.0, 0.0, 0.0], None);
        assert_eq!(s.harmonic_residual(&o()).unwrap(), [0.0; 3]);
        let s = ParacontactFrameSpec::from_constants([1.0, 0.0, 0.0, 0.0, 0.0], None);
        assert_eq!(s.harmonic_residual(&o()).unwrap()[0], 4.0);
    }

    #[test]
    fn affine_killing_examples() {
        let s = ParacontactFrameSpec::from_constants([0.0, 0.0, 0.3, -1.0, 2.0], None);
        assert_eq!(s.affine_killing_residual(&o()).unwrap(), [0.0; 3]);
        let s = ParacontactFrameSpec::from_constants([1.0, 1.0, 1.0, 0.0, 0.0], None);
        assert_eq!(s.affine_killing_residual(&o()).unwrap(), [2.0, 4.0, 4.0]);
        let s = ParacontactFrameSpec::from_constants([0.0, 1.0, 0.0, 0.0, 0.0], None);
        assert_eq!(s.affine_killing_residual(&o()).unwrap(), [0.0, 2.0, -2.0]);
    }

    #[test]
    fn jacobi_first_entry_zero() {
        let s = ParacontactFrameSpec::from_constants([0.0, 0.0, 1.0, 1.0, 0.0], None);
        assert_eq!(s.jacobi(&o()).unwrap(), [0.0, 0.0, -2.0]);
    }
}

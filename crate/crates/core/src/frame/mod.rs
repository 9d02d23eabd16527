//! Frame-level geometry on a pseudo-orthonormal φ-basis `(ξ, e, φe)`.
//!
//! A structure is given by the seven structure functions `a1..a5, b1, b2`
//! that fix the Levi-Civita connection in the frame. Functions are either
//! constants (`lie_group` mode, all frame derivatives vanish) or fields on a
//! chart together with a coordinate realization of the three frame vectors
//! (`chart` mode, frame derivatives come from jets).

mod curvature;
mod paracontact;
mod tables;

use std::ops::{Add, Mul, Neg, Sub};

pub use curvature::{reconstruct_curvature, FrameCurvature, RICCI_CONTRACTION_SIGN};
pub use paracontact::{ricci_operator, Epsilon, IhtRicci, ParacontactFrameSpec, A1_LOCUS_TOLERANCE, NILPOTENT_TOLERANCE};
pub use tables::{
    jacobi_residual, lie_metric, lie_metric_from_connection, BracketTable, ClassificationFlags, FrameConnection, HTensor,
};

use crate::chart::{self, FrameJets};
use crate::error::GeometryError;
use crate::expr::{eval_jet, Bindings, ExprAst};
use crate::jet::ChartPoint;

/// Frame index of ξ.
pub const XI: usize = 0;
/// Frame index of e.
pub const E: usize = 1;
/// Frame index of φe (time-like).
pub const PHI_E: usize = 2;

/// The frame metric `G = diag(+1, +1, -1)` in the order `(ξ, e, φe)`.
pub const SIGNATURE: [f64; 3] = [1.0, 1.0, -1.0];

/// `G(u, v)` for frame component vectors.
pub fn frame_dot(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    (0..3).map(|a| SIGNATURE[a] * u[a] * v[a]).sum()
}

/// Coordinate components of the three frame vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub xi: [ExprAst; 3],
    pub e: [ExprAst; 3],
    pub phi_e: [ExprAst; 3],
}

impl Realization {
    pub fn vectors(&self) -> [&[ExprAst; 3]; 3] {
        [&self.xi, &self.e, &self.phi_e]
    }

    pub fn jets(&self, p: &ChartPoint, env: &Bindings) -> Result<FrameJets, GeometryError> {
        let mut out = [[crate::jet::Jet2::ZERO; 3]; 3];
        for (a, v) in self.vectors().into_iter().enumerate() {
            for k in 0..3 {
                out[a][k] = eval_jet(&v[k], p, env)?;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrameMode {
    LieGroup,
    Chart(Realization),
}

impl FrameMode {
    pub fn name(&self) -> &'static str {
        match self {
            FrameMode::LieGroup => "lie_group",
            FrameMode::Chart(_) => "chart",
        }
    }
}

/// A scalar together with its derivatives along `ξ`, `e`, `φe`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameScalar {
    pub value: f64,
    pub d: [f64; 3],
}

impl FrameScalar {
    pub fn constant(value: f64) -> Self {
        Self { value, d: [0.0; 3] }
    }

    /// Derivative along frame vector `i`.
    #[inline]
    pub fn along(&self, i: usize) -> f64 {
        self.d[i]
    }
}

impl Add for FrameScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            value: self.value + o.value,
            d: [self.d[0] + o.d[0], self.d[1] + o.d[1], self.d[2] + o.d[2]],
        }
    }
}

impl Sub for FrameScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for FrameScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            d: self.d.map(|x| -x),
        }
    }
}

impl Mul for FrameScalar {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut d = [0.0; 3];
        for (i, di) in d.iter_mut().enumerate() {
            *di = self.value * o.d[i] + o.value * self.d[i];
        }
        Self {
            value: self.value * o.value,
            d,
        }
    }
}

impl Mul<f64> for FrameScalar {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self {
            value: self.value * k,
            d: self.d.map(|x| x * k),
        }
    }
}

/// Structure functions evaluated at one point, with frame derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StructureValues {
    pub a1: FrameScalar,
    pub a2: FrameScalar,
    pub a3: FrameScalar,
    pub a4: FrameScalar,
    pub a5: FrameScalar,
    pub b1: FrameScalar,
    pub b2: FrameScalar,
}

impl StructureValues {
    /// Constant structure functions (all frame derivatives zero).
    pub fn constants(a: [f64; 5], b1: f64, b2: f64) -> Self {
        let k = FrameScalar::constant;
        Self {
            a1: k(a[0]),
            a2: k(a[1]),
            a3: k(a[2]),
            a4: k(a[3]),
            a5: k(a[4]),
            b1: k(b1),
            b2: k(b2),
        }
    }

    /// Paracontact constants: `b1 = a2`, `b2 = a1 - 1`.
    pub fn paracontact_constants(a: [f64; 5]) -> Self {
        Self::constants(a, a[1], a[0] - 1.0)
    }

    /// Normal constants: `a1 = a2 = 0`.
    pub fn normal_constants(b1: f64, b2: f64, a3: f64, a4: f64, a5: f64) -> Self {
        Self::constants([0.0, 0.0, a3, a4, a5], b1, b2)
    }
}

/// Names of the structure functions, in storage order.
pub const STRUCTURE_NAMES: [&str; 7] = ["a1", "a2", "a3", "a4", "a5", "b1", "b2"];

/// A natural almost paracontact metric structure described by its
/// structure functions on a φ-basis.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalFrameSpec {
    /// `a1..a5, b1, b2` in [`STRUCTURE_NAMES`] order.
    pub functions: [ExprAst; 7],
    pub mode: FrameMode,
    pub env: Bindings,
}

impl NaturalFrameSpec {
    pub fn new(functions: [ExprAst; 7], mode: FrameMode, env: Bindings) -> Result<Self, GeometryError> {
        if matches!(mode, FrameMode::LieGroup) {
            for (name, f) in STRUCTURE_NAMES.iter().zip(&functions) {
                if !f.is_coordinate_free() {
                    return Err(GeometryError::NotConstant((*name).to_string()));
                }
            }
        }
        Ok(Self { functions, mode, env })
    }

    pub fn from_constants(a: [f64; 5], b1: f64, b2: f64) -> Self {
        let n = ExprAst::num;
        Self {
            functions: [n(a[0]), n(a[1]), n(a[2]), n(a[3]), n(a[4]), n(b1), n(b2)],
            mode: FrameMode::LieGroup,
            env: Bindings::new(),
        }
    }

    pub fn is_lie_group(&self) -> bool {
        matches!(self.mode, FrameMode::LieGroup)
    }

    pub fn realization(&self) -> Option<&Realization> {
        match &self.mode {
            FrameMode::Chart(r) => Some(r),
            FrameMode::LieGroup => None,
        }
    }

    /// Realized frame jets at `p` (chart mode only).
    pub fn frame_jets(&self, p: &ChartPoint) -> Result<FrameJets, GeometryError> {
        match &self.mode {
            FrameMode::Chart(r) => r.jets(p, &self.env),
            FrameMode::LieGroup => Err(GeometryError::NotApplicable("chart realization")),
        }
    }

    pub fn structure_at(&self, p: &ChartPoint) -> Result<StructureValues, GeometryError> {
        let frame = match &self.mode {
            FrameMode::Chart(r) => Some(r.jets(p, &self.env)?),
            FrameMode::LieGroup => None,
        };
        let mut vals = [FrameScalar::default(); 7];
        for (slot, f) in vals.iter_mut().zip(&self.functions) {
            let j = eval_jet(f, p, &self.env)?;
            let mut d = [0.0; 3];
            if let Some(frame) = &frame {
                for (a, da) in d.iter_mut().enumerate() {
                    *da = (0..3).map(|k| frame[a][k].value * j.grad[k]).sum();
                }
            }
            *slot = FrameScalar { value: j.value, d };
        }
        let [a1, a2, a3, a4, a5, b1, b2] = vals;
        Ok(StructureValues {
            a1,
            a2,
            a3,
            a4,
            a5,
            b1,
            b2,
        })
    }

    pub fn bracket_table(&self, p: &ChartPoint) -> Result<BracketTable, GeometryError> {
        Ok(BracketTable::from_structure(&self.structure_at(p)?))
    }

    pub fn connection_table(&self, p: &ChartPoint) -> Result<FrameConnection, GeometryError> {
        Ok(FrameConnection::from_structure(&self.structure_at(p)?))
    }

    pub fn jacobi_residual(&self, p: &ChartPoint) -> Result<[f64; 3], GeometryError> {
        Ok(jacobi_residual(&self.structure_at(p)?))
    }

    pub fn h_tensor(&self, p: &ChartPoint) -> Result<HTensor, GeometryError> {
        Ok(HTensor::from_structure(&self.structure_at(p)?))
    }

    pub fn lie_metric(&self, p: &ChartPoint) -> Result<SymBilinear, GeometryError> {
        Ok(lie_metric(&self.structure_at(p)?))
    }

    pub fn classification_flags(&self, p: &ChartPoint, tol: f64) -> Result<ClassificationFlags, GeometryError> {
        Ok(ClassificationFlags::from_structure(&self.structure_at(p)?, tol))
    }

    /// Compare the coordinate Lie brackets of the realized frame with the
    /// bracket table; returns the largest absolute coefficient mismatch.
    pub fn realization_consistency(&self, p: &ChartPoint) -> Result<f64, GeometryError> {
        let frame = match &self.mode {
            FrameMode::Chart(r) => r.jets(p, &self.env)?,
            FrameMode::LieGroup => return Err(GeometryError::NotApplicable("realization_consistency")),
        };
        let table = self.bracket_table(p)?;
        let measured = chart::frame_brackets(&frame)?;
        let mut worst = 0.0f64;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            for k in 0..3 {
                worst = worst.max((measured[i][j][k] - table.c[i][j][k]).abs());
            }
        }
        Ok(worst)
    }

    /// Full curvature from the connection table and its frame derivatives.
    pub fn frame_curvature(&self, p: &ChartPoint) -> Result<FrameCurvature, GeometryError> {
        Ok(FrameCurvature::from_structure(&self.structure_at(p)?))
    }

    /// Curvature of a left-invariant structure.
    pub fn curvature_lie_group(&self) -> Result<FrameCurvature, GeometryError> {
        if !self.is_lie_group() {
            return Err(GeometryError::NotApplicable("curvature_lie_group"));
        }
        self.frame_curvature(&ChartPoint::origin())
    }
}

/// What a [`SymBilinear`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BilinearKind {
    Ricci,
    LieXiG,
    SolitonResidual,
}

/// A symmetric bilinear form, as a matrix in frame (or chart) indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymBilinear {
    pub kind: BilinearKind,
    m: [[f64; 3]; 3],
}

impl SymBilinear {
    /// Symmetrizes `m`; exactly symmetric input is returned unchanged.
    pub fn new(kind: BilinearKind, m: [[f64; 3]; 3]) -> Self {
        let mut s = m;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let v = if m[i][j] == m[j][i] {
                    m[i][j]
                } else {
                    0.5 * (m[i][j] + m[j][i])
                };
                s[i][j] = v;
                s[j][i] = v;
            }
        }
        Self { kind, m: s }
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn eval(&self, u: &[f64; 3], v: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += u[i] * self.m[i][j] * v[j];
            }
        }
        s
    }

    /// Frame trace `tr(G⁻¹ m)`.
    pub fn frame_trace(&self) -> f64 {
        (0..3).map(|a| SIGNATURE[a] * self.m[a][a]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Entrywise `self + k·G`.
    pub fn plus_frame_metric(&self, k: f64, kind: BilinearKind) -> Self {
        let mut m = self.m;
        for (a, row) in m.iter_mut().enumerate() {
            row[a] += k * SIGNATURE[a];
        }
        Self { kind, m }
    }

    pub fn add(&self, other: &SymBilinear, kind: BilinearKind) -> Self {
        let mut m = self.m;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += other.m[i][j];
            }
        }
        Self { kind, m }
    }
}

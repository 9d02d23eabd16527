use serde::Serialize;

use super::{frame_dot, BilinearKind, FrameScalar, StructureValues, SymBilinear, E, PHI_E, SIGNATURE, XI};

/// Lie bracket coefficients: `[E_i, E_j] = Σ_k c[i][j][k] E_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketTable {
    pub c: [[[f64; 3]; 3]; 3],
}

impl BracketTable {
    /// Brackets of a natural structure:
    ///
    /// ```text
    /// [ξ, e]  = -b1 e + (a3 - b2) φe
    /// [ξ, φe] = (a3 + 2a1 - b2) e + (2a2 - b1) φe
    /// [e, φe] = 2(b2 - a1) ξ + a4 e - a5 φe
    /// ```
    pub fn from_structure(s: &StructureValues) -> Self {
        let (a1, a2, a3, a4, a5) = (s.a1.value, s.a2.value, s.a3.value, s.a4.value, s.a5.value);
        let (b1, b2) = (s.b1.value, s.b2.value);
        let mut c = [[[0.0; 3]; 3]; 3];
        c[XI][E] = [0.0, -b1, a3 - b2];
        c[XI][PHI_E] = [0.0, a3 + 2.0 * a1 - b2, 2.0 * a2 - b1];
        c[E][PHI_E] = [2.0 * (b2 - a1), a4, -a5];
        for (i, j) in [(XI, E), (XI, PHI_E), (E, PHI_E)] {
            c[j][i] = c[i][j].map(|v| -v);
        }
        Self { c }
    }

    pub fn bracket(&self, i: usize, j: usize) -> [f64; 3] {
        self.c[i][j]
    }

    /// Rank of the span of all brackets (3 means `[g, g] = g`).
    pub fn derived_rank(&self) -> usize {
        let rows = [self.c[XI][E], self.c[XI][PHI_E], self.c[E][PHI_E]];
        let m = nalgebra::Matrix3::from_fn(|i, j| rows[i][j]);
        m.rank(1e-12)
    }
}

/// Levi-Civita connection: `∇_{E_i} E_j = Σ_k gamma[i][j][k] E_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConnection {
    pub gamma: [[[f64; 3]; 3]; 3],
}

/// Connection coefficients with their frame derivatives.
pub(crate) fn connection_scalars(s: &StructureValues) -> [[[FrameScalar; 3]; 3]; 3] {
    let z = FrameScalar::default();
    let (a1, a2, a3, a4, a5, b1, b2) = (s.a1, s.a2, s.a3, s.a4, s.a5, s.b1, s.b2);
    let mut g = [[[z; 3]; 3]; 3];
    // ∇_ξ
    g[XI][XI] = [z, z, z];
    g[XI][E] = [z, z, a3];
    g[XI][PHI_E] = [z, a3, z];
    // ∇_e
    g[E][XI] = [z, b1, b2];
    g[E][E] = [-b1, z, a4];
    g[E][PHI_E] = [b2, a4, z];
    // ∇_φe
    g[PHI_E][XI] = [z, b2 - a1 * 2.0, b1 - a2 * 2.0];
    g[PHI_E][E] = [a1 * 2.0 - b2, z, a5];
    g[PHI_E][PHI_E] = [b1 - a2 * 2.0, a5, z];
    g
}

impl FrameConnection {
    pub fn from_structure(s: &StructureValues) -> Self {
        let sc = connection_scalars(s);
        let mut gamma = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    gamma[i][j][k] = sc[i][j][k].value;
                }
            }
        }
        Self { gamma }
    }

    pub fn nabla(&self, i: usize, j: usize) -> [f64; 3] {
        self.gamma[i][j]
    }

    /// Largest `|G(∇_i E_j, E_k) + G(E_j, ∇_i E_k)|`.
    pub fn metric_compatibility_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let d = self.gamma[i][j][k] * SIGNATURE[k] + self.gamma[i][k][j] * SIGNATURE[j];
                    worst = worst.max(d.abs());
                }
            }
        }
        worst
    }

    /// Largest component of `∇_i E_j - ∇_j E_i - [E_i, E_j]`.
    pub fn torsion_defect(&self, brackets: &BracketTable) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let t = self.gamma[i][j][k] - self.gamma[j][i][k] - brackets.c[i][j][k];
                    worst = worst.max(t.abs());
                }
            }
        }
        worst
    }
}

/// Left-hand sides of the Jacobi system for a natural structure:
///
/// ```text
/// ξ(b2 - a1) - 2(a2 - b1)(b2 - a1)
/// ξ(a4) - e(a3 + 2a1 - b2) - φe(b1) - a4(2a2 - b1) - a5(a3 + 2a1 - b2)
/// ξ(a5) + e(2a2 - b1) + φe(b2 - a3) + a4(b2 - a3) + a5 b1
/// ```
///
/// With `b1 = a2`, `b2 = a1 - 1` the first line vanishes identically and
/// the other two are the paracontact system.
pub fn jacobi_residual(s: &StructureValues) -> [f64; 3] {
    let (a1, a2, a3, a4, a5, b1, b2) = (s.a1, s.a2, s.a3, s.a4, s.a5, s.b1, s.b2);
    let k1 = a3 + a1 * 2.0 - b2;
    let first = (b2 - a1).along(XI) - 2.0 * (a2.value - b1.value) * (b2.value - a1.value);
    let second = a4.along(XI) - k1.along(E) - b1.along(PHI_E)
        - a4.value * (2.0 * a2.value - b1.value)
        - a5.value * k1.value;
    let third = a5.along(XI) + (a2 * 2.0 - b1).along(E) + (b2 - a3).along(PHI_E)
        + a4.value * (b2.value - a3.value)
        + a5.value * b1.value;
    [first, second, third]
}

/// The tensor `h` restricted to the frame: `he = a1 e + a2 φe`,
/// `hφe = -a2 e - a1 φe`, `hξ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HTensor {
    /// Column `j` holds the frame components of `h E_j`.
    pub matrix: [[f64; 3]; 3],
    /// `tr h²`.
    pub trace_sq: f64,
}

impl HTensor {
    pub fn from_structure(s: &StructureValues) -> Self {
        let (a1, a2) = (s.a1.value, s.a2.value);
        let mut m = [[0.0; 3]; 3];
        m[E][E] = a1;
        m[PHI_E][E] = a2;
        m[E][PHI_E] = -a2;
        m[PHI_E][PHI_E] = -a1;
        let mut tr = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                tr += m[i][k] * m[k][i];
            }
        }
        Self { matrix: m, trace_sq: tr }
    }

    /// The block acting on `span(e, φe)`.
    pub fn block(&self) -> [[f64; 2]; 2] {
        [
            [self.matrix[E][E], self.matrix[E][PHI_E]],
            [self.matrix[PHI_E][E], self.matrix[PHI_E][PHI_E]],
        ]
    }

    pub fn apply(&self, v: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.matrix[i][j] * v[j]).sum();
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
}

/// `L_ξ g` in the frame: `(e,e) = 2b1`, `(φe,φe) = 2(2a2 - b1)`,
/// `(e,φe) = -2a1`, and `(ξ,·) = 0`.
pub fn lie_metric(s: &StructureValues) -> SymBilinear {
    let (a1, a2, b1) = (s.a1.value, s.a2.value, s.b1.value);
    let mut m = [[0.0; 3]; 3];
    m[E][E] = 2.0 * b1;
    m[PHI_E][PHI_E] = 2.0 * (2.0 * a2 - b1);
    m[E][PHI_E] = -2.0 * a1;
    m[PHI_E][E] = -2.0 * a1;
    SymBilinear::new(BilinearKind::LieXiG, m)
}

/// `(L_ξ g)(X, Y) = G(∇_X ξ, Y) + G(∇_Y ξ, X)` straight from a connection.
pub fn lie_metric_from_connection(conn: &FrameConnection) -> SymBilinear {
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut ei = [0.0; 3];
            let mut ej = [0.0; 3];
            ei[i] = 1.0;
            ej[j] = 1.0;
            m[i][j] = frame_dot(&conn.gamma[i][XI], &ej) + frame_dot(&conn.gamma[j][XI], &ei);
        }
    }
    SymBilinear::new(BilinearKind::LieXiG, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassificationFlags {
    pub contact_form: bool,
    pub paracontact: bool,
    pub h_zero: bool,
    pub xi_killing: bool,
    pub divergence_free: bool,
    /// `tr(φ∇ξ) = 2(b2 - a1)`.
    pub tr_phi_nabla_xi: f64,
    /// `div ξ = 2(b1 - a2)`.
    pub div_xi: f64,
}

impl ClassificationFlags {
    pub fn from_structure(s: &StructureValues, tol: f64) -> Self {
        let (a1, a2, b1, b2) = (s.a1.value, s.a2.value, s.b1.value, s.b2.value);
        let h_zero = a1.abs() <= tol && a2.abs() <= tol;
        Self {
            contact_form: (a1 - b2).abs() > tol,
            paracontact: (a1 - b2 - 1.0).abs() <= tol,
            h_zero,
            xi_killing: h_zero && b1.abs() <= tol,
            divergence_free: (b1 - a2).abs() <= tol,
            tr_phi_nabla_xi: 2.0 * (b2 - a1),
            div_xi: 2.0 * (b1 - a2),
        }
    }
}

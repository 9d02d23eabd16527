use super::tables::{connection_scalars, BracketTable};
use super::{BilinearKind, FrameScalar, StructureValues, SymBilinear, SIGNATURE};

/// Sign in `ρ(X, Y) = s · Σ_a ε_a G(R(E_a, X)Y, E_a)` under the convention
/// `R(X, Y) = ∇_[X,Y] - [∇_X, ∇_Y]`. With `s = -1` the result is the usual
/// Ricci tensor and `ρ(ξ, ξ) = -2` on every paracontact metric 3-manifold
/// with nilpotent `h`.
pub const RICCI_CONTRACTION_SIGN: f64 = -1.0;

/// Curvature on the frame: `R(E_i, E_j)E_k = Σ_m r[i][j][k][m] E_m` with
/// `R(X, Y) = ∇_[X,Y] - [∇_X, ∇_Y]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCurvature {
    pub r: [[[[f64; 3]; 3]; 3]; 3],
}

impl FrameCurvature {
    pub fn from_structure(s: &StructureValues) -> Self {
        let gamma = connection_scalars(s);
        let c = BracketTable::from_structure(s).c;

        // nn[i][j][k] = components of ∇_i ∇_j E_k
        let mut nn = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let g_jk: &[FrameScalar; 3] = &gamma[j][k];
                    let mut out = [0.0; 3];
                    for m in 0..3 {
                        out[m] += g_jk[m].along(i);
                        for (n, o) in out.iter_mut().enumerate() {
                            *o += g_jk[m].value * gamma[i][m][n].value;
                        }
                    }
                    nn[i][j][k] = out;
                }
            }
        }

        let mut r = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for m in 0..3 {
                        let mut v = nn[j][i][k][m] - nn[i][j][k][m];
                        for (l, cl) in c[i][j].iter().enumerate() {
                            v += cl * gamma[l][k][m].value;
                        }
                        r[i][j][k][m] = v;
                    }
                }
            }
        }
        Self { r }
    }

    /// Components of `R(E_i, E_j)E_k`.
    pub fn apply(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        self.r[i][j][k]
    }

    /// `R(E_i, E_j, E_k, E_m) = G(R(E_i, E_j)E_k, E_m)`.
    pub fn lower(&self, i: usize, j: usize, k: usize, m: usize) -> f64 {
        self.r[i][j][k][m] * SIGNATURE[m]
    }

    pub fn ricci(&self) -> SymBilinear {
        let mut m = [[0.0; 3]; 3];
        for x in 0..3 {
            for y in 0..3 {
                let s: f64 = (0..3).map(|a| SIGNATURE[a] * self.lower(a, x, y, a)).sum();
                m[x][y] = RICCI_CONTRACTION_SIGN * s;
            }
        }
        SymBilinear::new(BilinearKind::Ricci, m)
    }

    pub fn scalar(&self) -> f64 {
        self.ricci().frame_trace()
    }

    /// Largest violation of the algebraic symmetries of the (0,4) tensor.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for m in 0..3 {
                        let v = self.lower(i, j, k, m);
                        worst = worst
                            .max((v + self.lower(j, i, k, m)).abs())
                            .max((v + self.lower(i, j, m, k)).abs())
                            .max((v - self.lower(k, m, i, j)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Three-dimensional curvature from Ricci data:
///
/// ```text
/// R(X,Y,Z,V) = g(X,Z)ρ(Y,V) - g(Y,Z)ρ(X,V) + g(Y,V)ρ(X,Z) - g(X,V)ρ(Y,Z)
///              - r/2 (g(X,Z)g(Y,V) - g(Y,Z)g(X,V))
/// ```
///
/// Vectors are frame components.
pub fn reconstruct_curvature(rho: &SymBilinear, r: f64, x: &[f64; 3], y: &[f64; 3], z: &[f64; 3], v: &[f64; 3]) -> f64 {
    let g = super::frame_dot;
    g(x, z) * rho.eval(y, v) - g(y, z) * rho.eval(x, v) + g(y, v) * rho.eval(x, z) - g(x, v) * rho.eval(y, z)
        - 0.5 * r * (g(x, z) * g(y, v) - g(y, z) * g(x, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{E, PHI_E, XI};

    const BASIS: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    fn sl2() -> FrameCurvature {
        FrameCurvature::from_structure(&StructureValues::paracontact_constants([1.0, 1.0, 1.0, 0.0, 0.0]))
    }

    #[test]
    fn sl2_components() {
        let c = sl2();
        assert_eq!(c.apply(XI, E, XI), [0.0, -3.0, -2.0]);
        let rho = c.ricci();
        assert_eq!(*rho.matrix(), [[-2.0, 0.0, 0.0], [0.0, -4.0, 2.0], [0.0, 2.0, 0.0]]);
        assert_eq!(c.scalar(), -6.0);
        assert!(c.symmetry_defect() < 1e-12);
    }

    #[test]
    fn para_sasakian_e_phie() {
        let c = FrameCurvature::from_structure(&StructureValues::paracontact_constants([0.0; 5]));
        assert_eq!(c.apply(E, PHI_E, E), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn all_zero_is_flat() {
        let c = FrameCurvature::from_structure(&StructureValues::constants([0.0; 5], 0.0, 0.0));
        assert_eq!(c.r, [[[[0.0; 3]; 3]; 3]; 3]);
    }

    #[test]
    fn reconstruction_matches_sl2() {
        let c = sl2();
        let rho = c.ricci();
        let r = c.scalar();
        assert_eq!(reconstruct_curvature(&rho, r, &BASIS[XI], &BASIS[E], &BASIS[XI], &BASIS[E]), -3.0);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for m in 0..3 {
                        let rc = reconstruct_curvature(&rho, r, &BASIS[i], &BASIS[j], &BASIS[k], &BASIS[m]);
                        assert!((rc - c.lower(i, j, k, m)).abs() < 1e-12);
                    }
                }
            }
            assert_eq!(reconstruct_curvature(&rho, r, &BASIS[i], &BASIS[i], &BASIS[E], &BASIS[PHI_E]), 0.0);
        }
    }

    #[test]
    fn einstein_reconstruction() {
        let rho = SymBilinear::new(BilinearKind::Ricci, [[-2.0, 0.0, 0.0], [0.0, -2.0, 0.0], [0.0, 0.0, 2.0]]);
        // k = -1 in R(X,Y)Z = -k(g(Y,Z)X - g(X,Z)Y)
        let v = reconstruct_curvature(&rho, -6.0, &BASIS[XI], &BASIS[E], &BASIS[XI], &BASIS[E]);
        assert_eq!(v, -1.0);
        let v = reconstruct_curvature(&rho, -6.0, &BASIS[E], &BASIS[PHI_E], &BASIS[E], &BASIS[PHI_E]);
        assert_eq!(v, 1.0);
    }
}

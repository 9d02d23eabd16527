//! Coordinate-chart geometry: Lie brackets of vector fields given by jets,
//! and an independent Christoffel/Riemann/Ricci computation from a metric
//! field.

use nalgebra::{Matrix3, Vector3};

use crate::error::GeometryError;
use crate::expr::{eval_jet, Bindings, ExprAst};
use crate::frame::{BilinearKind, Realization, SymBilinear, SIGNATURE};
use crate::jet::{ChartPoint, Jet2};

/// Below this `|det|` a frame or metric counts as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// Jets of the coordinate components of three vector fields, indexed
/// `[field][coordinate]`.
pub type FrameJets = [[Jet2; 3]; 3];

/// `[U, V]^k = U^i ∂_i V^k - V^i ∂_i U^k`.
pub fn coordinate_bracket(u: &[Jet2; 3], v: &[Jet2; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        *o = (0..3).map(|i| u[i].value * v[k].d(i) - v[i].value * u[k].d(i)).sum();
    }
    out
}

fn frame_matrix(frame: &FrameJets) -> Matrix3<f64> {
    // column a = coordinate components of field a
    Matrix3::from_fn(|k, a| frame[a][k].value)
}

/// Coordinate brackets of the three fields, re-expanded in the fields
/// themselves: `[V_i, V_j] = Σ_k c[i][j][k] V_k`.
pub fn frame_brackets(frame: &FrameJets) -> Result<[[[f64; 3]; 3]; 3], GeometryError> {
    let m = frame_matrix(frame);
    let det = m.determinant();
    if det.abs() < DEGENERACY_TOLERANCE || !det.is_finite() {
        return Err(GeometryError::FrameNotInvertible(det.abs()));
    }
    let lu = m.lu();
    let mut c = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let b = coordinate_bracket(&frame[i], &frame[j]);
            let x = lu
                .solve(&Vector3::from(b))
                .ok_or(GeometryError::FrameNotInvertible(det.abs()))?;
            for k in 0..3 {
                c[i][j][k] = x[k];
                c[j][i][k] = -x[k];
            }
        }
    }
    Ok(c)
}

/// Anything that yields metric component jets at a chart point.
pub trait MetricField {
    fn metric_jets(&self, p: &ChartPoint) -> Result<[[Jet2; 3]; 3], GeometryError>;
}

/// A metric given entrywise by expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartMetricField {
    entries: [[ExprAst; 3]; 3],
    env: Bindings,
}

impl ChartMetricField {
    /// Uses the upper triangle of `entries`; the lower triangle is mirrored.
    pub fn new(entries: [[ExprAst; 3]; 3], env: Bindings) -> Self {
        let mut e = entries;
        for i in 0..3 {
            for j in 0..i {
                e[i][j] = e[j][i].clone();
            }
        }
        Self { entries: e, env }
    }

    pub fn entry(&self, i: usize, j: usize) -> &ExprAst {
        &self.entries[i][j]
    }

    pub fn env(&self) -> &Bindings {
        &self.env
    }
}

impl MetricField for ChartMetricField {
    fn metric_jets(&self, p: &ChartPoint) -> Result<[[Jet2; 3]; 3], GeometryError> {
        let mut g = [[Jet2::ZERO; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let v = eval_jet(&self.entries[i][j], p, &self.env)?;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        Ok(g)
    }
}

/// The metric that makes a realized frame pseudo-orthonormal with
/// signature `(+, +, -)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameInducedMetric {
    pub realization: Realization,
    pub env: Bindings,
}

/// Coframe jets `θ^a_i` (rows of the inverse frame matrix).
pub fn coframe_jets(frame: &FrameJets) -> Result<[[Jet2; 3]; 3], GeometryError> {
    // m[k][a] = V_a^k
    let m = |k: usize, a: usize| frame[a][k];
    let cof = |r: usize, c: usize| {
        let (r0, r1) = ((r + 1) % 3, (r + 2) % 3);
        let (c0, c1) = ((c + 1) % 3, (c + 2) % 3);
        m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0)
    };
    let det = m(0, 0) * cof(0, 0) + m(0, 1) * cof(0, 1) + m(0, 2) * cof(0, 2);
    if det.value.abs() < DEGENERACY_TOLERANCE || !det.value.is_finite() {
        return Err(GeometryError::FrameNotInvertible(det.value.abs()));
    }
    // inverse[a][k] = cof(k, a) / det
    let mut theta = [[Jet2::ZERO; 3]; 3];
    for (a, row) in theta.iter_mut().enumerate() {
        for (k, t) in row.iter_mut().enumerate() {
            *t = cof(k, a).checked_div(det)?;
        }
    }
    Ok(theta)
}

impl MetricField for FrameInducedMetric {
    fn metric_jets(&self, p: &ChartPoint) -> Result<[[Jet2; 3]; 3], GeometryError> {
        let theta = coframe_jets(&self.realization.jets(p, &self.env)?)?;
        let mut g = [[Jet2::ZERO; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let mut s = Jet2::ZERO;
                for a in 0..3 {
                    s = s + theta[a][i] * theta[a][j] * SIGNATURE[a];
                }
                g[i][j] = s;
                g[j][i] = s;
            }
        }
        Ok(g)
    }
}

fn values(g: &[[Jet2; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| g[i][j].value)
}

fn inverse_checked(g: &Matrix3<f64>) -> Result<Matrix3<f64>, GeometryError> {
    let det = g.determinant();
    if det.abs() < DEGENERACY_TOLERANCE || !det.is_finite() {
        return Err(GeometryError::SingularMetric(det.abs()));
    }
    g.try_inverse().ok_or(GeometryError::SingularMetric(det.abs()))
}

/// Christoffel symbols `gamma[k][i][j] = Γ^k_ij` and their coordinate
/// derivatives `dgamma[m][k][i][j] = ∂_m Γ^k_ij`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel {
    pub gamma: [[[f64; 3]; 3]; 3],
    pub dgamma: [[[[f64; 3]; 3]; 3]; 3],
}

impl Christoffel {
    pub fn from_metric_jets(g: &[[Jet2; 3]; 3]) -> Result<Self, GeometryError> {
        let ginv = inverse_checked(&values(g))?;
        let dg = |m: usize| Matrix3::from_fn(|i, j| g[i][j].d(m));
        // ∂_m g^{-1} = -g^{-1} (∂_m g) g^{-1}
        let dginv: [Matrix3<f64>; 3] = std::array::from_fn(|m| -(ginv * dg(m) * ginv));

        // first-kind symbols and their derivatives
        let mut first = [[[0.0; 3]; 3]; 3]; // [l][i][j]
        let mut dfirst = [[[[0.0; 3]; 3]; 3]; 3]; // [m][l][i][j]
        for l in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    first[l][i][j] = 0.5 * (g[j][l].d(i) + g[i][l].d(j) - g[i][j].d(l));
                    for (m, dm) in dfirst.iter_mut().enumerate() {
                        dm[l][i][j] = 0.5 * (g[j][l].dd(m, i) + g[i][l].dd(m, j) - g[i][j].dd(m, l));
                    }
                }
            }
        }

        let mut gamma = [[[0.0; 3]; 3]; 3];
        let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    gamma[k][i][j] = (0..3).map(|l| ginv[(k, l)] * first[l][i][j]).sum();
                    for m in 0..3 {
                        dgamma[m][k][i][j] = (0..3)
                            .map(|l| dginv[m][(k, l)] * first[l][i][j] + ginv[(k, l)] * dfirst[m][l][i][j])
                            .sum();
                    }
                }
            }
        }
        Ok(Self { gamma, dgamma })
    }

    /// Largest `|Γ^k_ij - Γ^k_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    worst = worst.max((self.gamma[k][i][j] - self.gamma[k][j][i]).abs());
                }
            }
        }
        worst
    }

    /// `riemann[i][j][k][l]`: component `l` of `R(∂_i, ∂_j)∂_k` with
    /// `R(X, Y) = ∇_[X,Y] - [∇_X, ∇_Y]`.
    pub fn riemann(&self) -> [[[[f64; 3]; 3]; 3]; 3] {
        let (g, dg) = (&self.gamma, &self.dgamma);
        let mut r = [[[[0.0; 3]; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let mut v = dg[i][l][j][k] - dg[j][l][i][k];
                        for m in 0..3 {
                            v += g[m][j][k] * g[l][i][m] - g[m][i][k] * g[l][j][m];
                        }
                        r[i][j][k][l] = -v;
                    }
                }
            }
        }
        r
    }
}

pub fn chart_christoffel(field: &impl MetricField, p: &ChartPoint) -> Result<[[[f64; 3]; 3]; 3], GeometryError> {
    Ok(Christoffel::from_metric_jets(&field.metric_jets(p)?)?.gamma)
}

/// Coordinate Ricci data at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartRicci {
    /// Symmetrized Ricci tensor in coordinate indices.
    pub ricci: SymBilinear,
    pub scalar: f64,
    /// Largest `|ρ_ij - ρ_ji|` before symmetrization.
    pub asymmetry: f64,
    pub metric: [[f64; 3]; 3],
}

pub fn chart_ricci(field: &impl MetricField, p: &ChartPoint) -> Result<ChartRicci, GeometryError> {
    let g = field.metric_jets(p)?;
    let chr = Christoffel::from_metric_jets(&g)?;
    let riem = chr.riemann();
    let mut rho = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            rho[j][k] = -(0..3).map(|l| riem[l][j][k][l]).sum::<f64>();
        }
    }
    let mut asym = 0.0f64;
    for j in 0..3 {
        for k in 0..3 {
            asym = asym.max((rho[j][k] - rho[k][j]).abs());
        }
    }
    let ricci = SymBilinear::new(BilinearKind::Ricci, rho);
    let gv = values(&g);
    let ginv = inverse_checked(&gv)?;
    let mut scalar = 0.0;
    for j in 0..3 {
        for k in 0..3 {
            scalar += ginv[(j, k)] * ricci.get(j, k);
        }
    }
    let metric = std::array::from_fn(|i| std::array::from_fn(|j| gv[(i, j)]));
    Ok(ChartRicci {
        ricci,
        scalar,
        asymmetry: asym,
        metric,
    })
}

/// Express a frame bilinear form in coordinates, using the coframe
/// `θ^a_i = ε_a g(V_a, ∂_i)` so that no frame inversion is needed.
pub fn push_frame_bilinear(form: &SymBilinear, frame: &[[f64; 3]; 3], metric: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut theta = [[0.0; 3]; 3];
    for a in 0..3 {
        for i in 0..3 {
            theta[a][i] = SIGNATURE[a] * (0..3).map(|k| metric[i][k] * frame[a][k]).sum::<f64>();
        }
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    s += form.get(a, b) * theta[a][i] * theta[b][j];
                }
            }
            out[i][j] = s;
        }
    }
    out
}

/// Values of a realized frame: `[field][coordinate]`.
pub fn frame_values(frame: &FrameJets) -> [[f64; 3]; 3] {
    frame.map(|v| v.map(|j| j.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn field(rows: [[&str; 3]; 3]) -> ChartMetricField {
        ChartMetricField::new(rows.map(|r| r.map(|s| parse(s).unwrap())), Bindings::new())
    }

    #[test]
    fn flat_metric() {
        let g = field([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "-1"]]);
        let p = ChartPoint::new(0.3, 0.1, -2.0).unwrap();
        assert_eq!(chart_christoffel(&g, &p).unwrap(), [[[0.0; 3]; 3]; 3]);
        let r = chart_ricci(&g, &p).unwrap();
        assert_eq!(r.scalar, 0.0);
        assert_eq!(r.ricci.max_abs(), 0.0);
    }

    #[test]
    fn warped_christoffel() {
        let g = field([["1", "0", "0"], ["0", "x^2", "0"], ["0", "0", "-1"]]);
        let p = ChartPoint::new(2.0, 0.0, 0.0).unwrap();
        let c = chart_christoffel(&g, &p).unwrap();
        assert!((c[1][0][1] - 0.5).abs() < 1e-15);
        assert!((c[0][1][1] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_metric() {
        let g = field([["1", "0", "0"], ["0", "0", "0"], ["0", "0", "1"]]);
        assert!(matches!(
            chart_ricci(&g, &ChartPoint::origin()),
            Err(GeometryError::SingularMetric(_))
        ));
    }

    #[test]
    fn round_sphere_patch() {
        // dx² + sin²x dy² + dz²: Ricci = diag(1, sin²x, 0), r = 2
        let g = field([["1", "0", "0"], ["0", "sin(x)^2", "0"], ["0", "0", "1"]]);
        let p = ChartPoint::new(0.7, 0.0, 0.0).unwrap();
        let r = chart_ricci(&g, &p).unwrap();
        assert!((r.scalar - 2.0).abs() < 1e-12);
        assert!((r.ricci.get(0, 0) - 1.0).abs() < 1e-12);
        assert!((r.ricci.get(1, 1) - 0.7f64.sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn brackets_of_coordinate_fields() {
        let p = ChartPoint::new(1.0, 2.0, 3.0).unwrap();
        let s = crate::jet::seeds(&p);
        let one = Jet2::constant(1.0);
        let zero = Jet2::ZERO;
        // ∂x, x∂y, ∂z: [∂x, x∂y] = ∂y = (1/x) (x∂y)
        let frame = [[one, zero, zero], [zero, s[0], zero], [zero, zero, one]];
        let c = frame_brackets(&frame).unwrap();
        assert_eq!(c[0][1], [0.0, 1.0, 0.0]);
        assert_eq!(c[1][0], [0.0, -1.0, 0.0]);
        let dependent = [[one, zero, zero], [one, zero, zero], [zero, zero, one]];
        assert!(matches!(frame_brackets(&dependent), Err(GeometryError::FrameNotInvertible(_))));
    }
}

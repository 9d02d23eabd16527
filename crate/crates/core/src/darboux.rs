//! Paracontact metric structures in Darboux coordinates, where
//! `η = (dz - y dx)/2` and `ξ = 2∂z`.
//!
//! With `a c - b² - c y² = -1` the structure is
//!
//! ```text
//!       1 [  a   b  -y ]        [ -b    -c   0 ]
//! g  =  - [  b   c   0 ]    φ = [ a-y²   b   0 ]
//!       4 [ -y   0   1 ]        [ -by   -cy  0 ]
//! ```

use serde::Serialize;

use crate::chart::{frame_brackets, FrameJets, MetricField};
use crate::error::GeometryError;
use crate::expr::{eval_jet, Bindings, ExprAst};
use crate::frame::{Epsilon, FrameMode, ParacontactFrameSpec, Realization};
use crate::jet::{seeds, ChartPoint, Coord, Jet2, UnaryFn};
use crate::tolerances;

pub const XI: [f64; 3] = [0.0, 0.0, 2.0];

#[derive(Debug, Clone, PartialEq)]
pub struct DarbouxStructure {
    pub a: ExprAst,
    pub b: ExprAst,
    pub c: ExprAst,
    pub env: Bindings,
}

type Mat3 = [[f64; 3]; 3];

fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn transpose(a: &Mat3) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

fn max_abs(a: &Mat3) -> f64 {
    a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

impl DarbouxStructure {
    /// Structure from `a`, `b`, `c` without checking the constraint.
    pub fn new_unchecked(a: ExprAst, b: ExprAst, c: ExprAst, env: Bindings) -> Self {
        Self { a, b, c, env }
    }

    pub fn abc(&self, p: &ChartPoint) -> Result<[Jet2; 3], GeometryError> {
        Ok([
            eval_jet(&self.a, p, &self.env)?,
            eval_jet(&self.b, p, &self.env)?,
            eval_jet(&self.c, p, &self.env)?,
        ])
    }

    /// `a c - b² - c y² + 1`.
    pub fn constraint_residual(&self, p: &ChartPoint) -> Result<f64, GeometryError> {
        let [a, b, c] = self.abc(p)?.map(|j| j.value);
        let y = p.y();
        Ok(a * c - b * b - c * y * y + 1.0)
    }

    pub fn metric(&self, p: &ChartPoint) -> Result<Mat3, GeometryError> {
        Ok(self.metric_jets(p)?.map(|r| r.map(|j| j.value)))
    }

    pub fn phi(&self, p: &ChartPoint) -> Result<Mat3, GeometryError> {
        let [a, b, c] = self.abc(p)?.map(|j| j.value);
        let y = p.y();
        Ok([[-b, -c, 0.0], [a - y * y, b, 0.0], [-b * y, -c * y, 0.0]])
    }

    /// Components of `η` as a row.
    pub fn eta(&self, p: &ChartPoint) -> [f64; 3] {
        [-0.5 * p.y(), 0.0, 0.5]
    }

    /// `dη(X, Y) = (X η(Y) - Y η(X) - η([X, Y]))/2`.
    pub fn d_eta(&self) -> Mat3 {
        [[0.0, 0.25, 0.0], [-0.25, 0.0, 0.0], [0.0, 0.0, 0.0]]
    }
}

impl MetricField for DarbouxStructure {
    fn metric_jets(&self, p: &ChartPoint) -> Result<[[Jet2; 3]; 3], GeometryError> {
        let [a, b, c] = self.abc(p)?;
        let y = seeds(p)[Coord::Y.index()];
        let q = |j: Jet2| j.scale(0.25);
        let z = Jet2::ZERO;
        let ny = q(-y);
        Ok([[q(a), q(b), ny], [q(b), q(c), z], [ny, z, Jet2::constant(0.25)]])
    }
}

/// Build a Darboux structure, checking `a c - b² - c y² = -1` at every
/// point of `points`.
pub fn build_darboux(
    a: ExprAst,
    b: ExprAst,
    c: ExprAst,
    env: Bindings,
    points: &[ChartPoint],
) -> Result<DarbouxStructure, GeometryError> {
    let d = DarbouxStructure::new_unchecked(a, b, c, env);
    let mut worst: Option<([f64; 3], f64)> = None;
    for p in points {
        let r = d.constraint_residual(p)?.abs();
        if r > tolerances::AXIOMS && worst.map_or(true, |(_, w)| r > w) {
            worst = Some((p.as_array(), r));
        }
    }
    match worst {
        Some((point, residual)) => Err(GeometryError::ConstraintViolated { point, residual }),
        None => Ok(d),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxiomResiduals {
    pub constraint: f64,
    /// `φ² - Id + η⊗ξ`.
    pub phi_squared: f64,
    pub phi_xi: f64,
    pub eta_phi: f64,
    /// `η(ξ) - 1`.
    pub eta_xi: f64,
    /// `g(ξ, ξ) - 1`.
    pub g_xi_xi: f64,
    /// `g(φX, φY) + g(X, Y) - η(X)η(Y)`.
    pub compatibility: f64,
    /// `dη - Φ` with `Φ(X, Y) = g(X, φY)`.
    pub contact: f64,
}

impl AxiomResiduals {
    pub fn max(&self) -> f64 {
        [
            self.constraint,
            self.phi_squared,
            self.phi_xi,
            self.eta_phi,
            self.eta_xi,
            self.g_xi_xi,
            self.compatibility,
            self.contact,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn axioms_check(d: &DarbouxStructure, p: &ChartPoint) -> Result<AxiomResiduals, GeometryError> {
    let phi = d.phi(p)?;
    axioms_with_phi(d, &phi, p)
}

/// Axiom residuals for an arbitrary endomorphism field value `phi`.
pub fn axioms_with_phi(d: &DarbouxStructure, phi: &Mat3, p: &ChartPoint) -> Result<AxiomResiduals, GeometryError> {
    let g = d.metric(p)?;
    let eta = d.eta(p);

    let mut sq = matmul(phi, phi);
    for i in 0..3 {
        sq[i][i] -= 1.0;
        for j in 0..3 {
            sq[i][j] += XI[i] * eta[j];
        }
    }
    let phi_xi = (0..3).map(|i| (0..3).map(|k| phi[i][k] * XI[k]).sum::<f64>().abs()).fold(0.0, f64::max);
    let eta_phi = (0..3).map(|j| (0..3).map(|k| eta[k] * phi[k][j]).sum::<f64>().abs()).fold(0.0, f64::max);
    let eta_xi: f64 = (0..3).map(|k| eta[k] * XI[k]).sum();
    let g_xi: f64 = (0..3).map(|i| (0..3).map(|j| XI[i] * g[i][j] * XI[j]).sum::<f64>()).sum();

    let mut compat = matmul(&transpose(phi), &matmul(&g, phi));
    for i in 0..3 {
        for j in 0..3 {
            compat[i][j] += g[i][j] - eta[i] * eta[j];
        }
    }
    let big_phi = matmul(&g, phi);
    let de = d.d_eta();
    let mut contact = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            contact[i][j] = de[i][j] - big_phi[i][j];
        }
    }
    Ok(AxiomResiduals {
        constraint: d.constraint_residual(p)?.abs(),
        phi_squared: max_abs(&sq),
        phi_xi,
        eta_phi,
        eta_xi: (eta_xi - 1.0).abs(),
        g_xi_xi: (g_xi - 1.0).abs(),
        compatibility: max_abs(&compat),
        contact: max_abs(&contact),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HMatrices {
    pub h: Mat3,
    pub h_squared: Mat3,
    /// `b_z² - a_z c_z`.
    pub nilpotency_factor: f64,
    pub para_sasakian: bool,
    pub nilpotent: bool,
}

/// `h = L_ξφ / 2 = ∂_z φ` and `h²`.
pub fn h_matrices(d: &DarbouxStructure, p: &ChartPoint) -> Result<HMatrices, GeometryError> {
    let [a, b, c] = d.abc(p)?;
    let z = Coord::Z.index();
    let (az, bz, cz) = (a.d(z), b.d(z), c.d(z));
    let y = p.y();
    let h = [[-bz, -cz, 0.0], [az, bz, 0.0], [-bz * y, -cz * y, 0.0]];
    let h_squared = matmul(&h, &h);
    let factor = bz * bz - az * cz;
    let scale = az.abs().max(bz.abs()).max(cz.abs()).max(1.0);
    let tol = tolerances::AXIOMS;
    Ok(HMatrices {
        h,
        h_squared,
        nilpotency_factor: factor,
        para_sasakian: az.abs() <= tol && bz.abs() <= tol && cz.abs() <= tol,
        nilpotent: factor.abs() <= tol * scale * scale,
    })
}

/// The inhomogeneous example: `a = F`, `b = 1`, `c = 0` with
/// `F = f(x) + α e^{2z} + β y + γ`, plus its φ-basis realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleStructure {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub f: ExprAst,
    pub darboux: DarbouxStructure,
    pub frame: ParacontactFrameSpec,
}

fn k(name: &str) -> ExprAst {
    ExprAst::Const(name.to_string())
}

fn n(v: f64) -> ExprAst {
    ExprAst::num(v)
}

fn sqrt2_times(e: ExprAst) -> ExprAst {
    ExprAst::mul(ExprAst::call(UnaryFn::Sqrt, n(2.0)), e)
}

/// `F = f(x) + α e^{2z} + β y + γ`.
fn f_field(f: &ExprAst) -> ExprAst {
    let exp2z = ExprAst::call(UnaryFn::Exp, ExprAst::mul(n(2.0), ExprAst::coord(Coord::Z)));
    ExprAst::add(
        ExprAst::add(
            ExprAst::add(f.clone(), ExprAst::mul(k("alpha"), exp2z)),
            ExprAst::mul(k("beta"), ExprAst::coord(Coord::Y)),
        ),
        k("gamma"),
    )
}

pub fn example_structure(alpha: f64, beta: f64, gamma: f64, f: ExprAst) -> Result<ExampleStructure, GeometryError> {
    if alpha == 0.0 {
        return Err(GeometryError::ZeroParameter("alpha"));
    }
    for c in [Coord::Y, Coord::Z] {
        if f.mentions(c) {
            return Err(GeometryError::UnexpectedDependence {
                name: "f".into(),
                coord: c.name(),
            });
        }
    }
    let env = Bindings::new()
        .with("alpha", alpha)?
        .with("beta", beta)?
        .with("gamma", gamma)?;
    let big_f = f_field(&f);
    let darboux = DarbouxStructure::new_unchecked(big_f.clone(), n(1.0), n(0.0), env.clone());

    let y = || ExprAst::coord(Coord::Y);
    let inv_sqrt2 = |e: ExprAst| ExprAst::div(e, ExprAst::call(UnaryFn::Sqrt, n(2.0)));
    let two_y2 = || ExprAst::mul(n(2.0), ExprAst::pow(y(), 2));
    let two_f = || ExprAst::mul(n(2.0), big_f.clone());
    let realization = Realization {
        xi: [n(0.0), n(0.0), n(2.0)],
        e: [
            inv_sqrt2(n(4.0)),
            inv_sqrt2(ExprAst::add(ExprAst::sub(two_y2(), two_f()), n(1.0))),
            inv_sqrt2(ExprAst::mul(n(4.0), y())),
        ],
        phi_e: [
            inv_sqrt2(n(-4.0)),
            inv_sqrt2(ExprAst::add(ExprAst::sub(n(1.0), two_y2()), two_f())),
            inv_sqrt2(ExprAst::mul(n(-4.0), y())),
        ],
    };
    let a1 = ExprAst::mul(
        ExprAst::mul(n(4.0), k("alpha")),
        ExprAst::call(UnaryFn::Exp, ExprAst::mul(n(2.0), ExprAst::coord(Coord::Z))),
    );
    let a4 = sqrt2_times(ExprAst::sub(k("beta"), ExprAst::mul(n(2.0), y())));
    let a5 = ExprAst::neg(a4.clone());
    let frame = ParacontactFrameSpec::new(
        [a1.clone(), a1, n(-1.0), a4, a5],
        Some(Epsilon::Plus),
        FrameMode::Chart(realization),
        env,
    )?;
    Ok(ExampleStructure {
        alpha,
        beta,
        gamma,
        f,
        darboux,
        frame,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub c: f64,
    /// Rotated brackets `[ξ,e]`, `[ξ,φe]`, `[e,φe]` at the first point,
    /// as frame components.
    pub brackets: [[f64; 3]; 3],
    /// Largest (max - min) of any bracket coefficient over the points.
    pub variation: f64,
    /// Largest mismatch against the closed-form rotated brackets.
    pub formula_residual: f64,
    /// Largest `|p² - q² - 1|`.
    pub hyperbolic_residual: f64,
    pub points_checked: usize,
    pub homogeneous: bool,
}

/// Rotate the example frame by `p = (e^z/C + C e^{-z})/2`,
/// `q = (e^z/C - C e^{-z})/2` and measure whether the brackets of
/// `(ξ, pE + qφE, qE + pφE)` are constant.
pub fn homogeneity_probe(ex: &ExampleStructure, c: f64, points: &[ChartPoint]) -> Result<ProbeReport, GeometryError> {
    if c == 0.0 || !c.is_finite() {
        return Err(GeometryError::ZeroParameter("C"));
    }
    let (alpha, beta) = (ex.alpha, ex.beta);
    let mut lo = [[f64::INFINITY; 3]; 3];
    let mut hi = [[f64::NEG_INFINITY; 3]; 3];
    let mut first = None;
    let mut formula = 0.0f64;
    let mut hyper = 0.0f64;
    for pt in points {
        let base = ex.frame.natural().frame_jets(pt)?;
        let z = seeds(pt)[Coord::Z.index()];
        let ez = z.exp();
        let emz = (-z).exp();
        let p = (ez.scale(1.0 / c) + emz.scale(c)).scale(0.5);
        let q = (ez.scale(1.0 / c) - emz.scale(c)).scale(0.5);
        hyper = hyper.max((p.value * p.value - q.value * q.value - 1.0).abs());
        let rotated: FrameJets = [
            base[0],
            std::array::from_fn(|k| p * base[1][k] + q * base[2][k]),
            std::array::from_fn(|k| q * base[1][k] + p * base[2][k]),
        ];
        let cb = frame_brackets(&rotated)?;
        let table = [cb[0][1], cb[0][2], cb[1][2]];
        for i in 0..3 {
            for k in 0..3 {
                lo[i][k] = lo[i][k].min(table[i][k]);
                hi[i][k] = hi[i][k].max(table[i][k]);
            }
        }
        let ac2 = 4.0 * alpha * c * c;
        let w = std::f64::consts::SQRT_2 * beta * c * (-pt.z()).exp();
        let expect_xi_e = [0.0, -ac2, 2.0 - ac2];
        let expect_e_phie = [-2.0, w, w];
        for k in 0..3 {
            formula = formula
                .max((table[0][k] - expect_xi_e[k]).abs())
                .max((table[2][k] - expect_e_phie[k]).abs());
        }
        first.get_or_insert(table);
    }
    let brackets = first.unwrap_or_default();
    let mut variation = 0.0f64;
    if !points.is_empty() {
        for i in 0..3 {
            for k in 0..3 {
                variation = variation.max(hi[i][k] - lo[i][k]);
            }
        }
    }
    Ok(ProbeReport {
        c,
        brackets,
        variation,
        formula_residual: formula,
        hyperbolic_residual: hyper,
        points_checked: points.len(),
        homogeneous: variation <= tolerances::HOMOGENEITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn pts() -> Vec<ChartPoint> {
        [[0.3, -0.2, 0.1], [0.0, 0.0, 0.0], [-0.7, 0.5, -0.9], [0.9, 0.9, 0.8]]
            .iter()
            .map(|&a| ChartPoint::from_array(a).unwrap())
            .collect()
    }

    #[test]
    fn example_constraint_exact() {
        let ex = example_structure(1.0, 2.0, 0.0, parse("sin(x)").unwrap()).unwrap();
        for p in pts() {
            assert_eq!(ex.darboux.constraint_residual(&p).unwrap(), 0.0);
            let ax = axioms_check(&ex.darboux, &p).unwrap();
            assert!(ax.max() <= 1e-12, "{ax:?}");
            assert_eq!(ax.eta_xi, 0.0);
        }
    }

    #[test]
    fn constraint_checks() {
        let e = Bindings::new();
        let ok = build_darboux(parse("y^2-1").unwrap(), parse("0").unwrap(), parse("1").unwrap(), e.clone(), &pts());
        assert!(ok.is_ok());
        let bad = build_darboux(parse("1").unwrap(), parse("1").unwrap(), parse("1").unwrap(), e, &pts());
        assert!(matches!(bad, Err(GeometryError::ConstraintViolated { .. })));
    }

    #[test]
    fn corrupted_phi_detected() {
        let ex = example_structure(1.0, 2.0, 0.0, parse("0").unwrap()).unwrap();
        let p = ChartPoint::new(0.3, -0.2, 0.1).unwrap();
        let mut phi = ex.darboux.phi(&p).unwrap();
        phi[0][0] += 0.01;
        assert!(axioms_with_phi(&ex.darboux, &phi, &p).unwrap().phi_squared >= 1e-3);
    }

    #[test]
    fn example_h() {
        let ex = example_structure(1.0, 2.0, 0.0, parse("sin(x)").unwrap()).unwrap();
        let h = h_matrices(&ex.darboux, &ChartPoint::origin()).unwrap();
        assert_eq!(h.h[1][0], 2.0);
        assert_eq!(h.h_squared, [[0.0; 3]; 3]);
        assert!(h.nilpotent && !h.para_sasakian);
    }

    #[test]
    fn h_formula_only() {
        let d = DarbouxStructure::new_unchecked(parse("z^2").unwrap(), parse("z").unwrap(), parse("1").unwrap(), Bindings::new());
        let h = h_matrices(&d, &ChartPoint::new(0.0, 0.0, 0.25).unwrap()).unwrap();
        assert_eq!(h.nilpotency_factor, 1.0);
        assert!(!h.nilpotent);
        let d = DarbouxStructure::new_unchecked(parse("y^2-1").unwrap(), parse("0").unwrap(), parse("1").unwrap(), Bindings::new());
        assert!(h_matrices(&d, &ChartPoint::new(0.1, 0.2, 0.3).unwrap()).unwrap().para_sasakian);
    }

    #[test]
    fn zero_alpha_and_c() {
        assert_eq!(
            example_structure(0.0, 2.0, 0.0, parse("0").unwrap()),
            Err(GeometryError::ZeroParameter("alpha"))
        );
        let ex = example_structure(1.0, 0.0, 0.0, parse("0").unwrap()).unwrap();
        assert_eq!(homogeneity_probe(&ex, 0.0, &pts()), Err(GeometryError::ZeroParameter("C")));
        assert!(example_structure(1.0, 0.0, 0.0, parse("y").unwrap()).is_err());
    }

    #[test]
    fn probe_beta_zero_vs_nonzero() {
        let ex = example_structure(1.0, 0.0, 0.0, parse("0").unwrap()).unwrap();
        let r = homogeneity_probe(&ex, 1.0, &pts()).unwrap();
        assert!(r.variation <= 1e-10, "{r:?}");
        assert!(r.homogeneous);
        assert!((r.brackets[0][1] + 4.0).abs() < 1e-10 && (r.brackets[0][2] + 2.0).abs() < 1e-10);
        assert!(r.formula_residual < 1e-10);

        let ex = example_structure(1.0, 2.0, 0.0, parse("0").unwrap()).unwrap();
        let r = homogeneity_probe(&ex, 1.0, &pts()).unwrap();
        assert!(r.variation >= 1e-3);
        assert!(!r.homogeneous);
        assert!(r.formula_residual < 1e-10);
        assert!(r.hyperbolic_residual < 1e-12);
    }

    #[test]
    fn realization_matches_table() {
        let ex = example_structure(1.0, 2.0, 0.0, parse("0").unwrap()).unwrap();
        let p = ChartPoint::new(0.3, -0.2, 0.1).unwrap();
        assert!(ex.frame.natural().realization_consistency(&p).unwrap() <= 1e-9);
    }
}

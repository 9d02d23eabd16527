use ppc_core::chart::{chart_christoffel, chart_ricci, frame_values, push_frame_bilinear};
use ppc_core::darboux::{axioms_check, example_structure, h_matrices, ExampleStructure};
use ppc_core::expr::parse;
use ppc_core::frame::{HTensor, E, PHI_E, XI};
use ppc_core::invariants::{kappa_mu_detect, segre_classify, soliton_check, SegreLabel, SolitonVerdict};
use ppc_core::jet::ChartPoint;

fn example(beta: f64, gamma: f64) -> ExampleStructure {
    example_structure(1.0, beta, gamma, parse("sin(x)").unwrap()).unwrap()
}

fn grid() -> Vec<ChartPoint> {
    let v = [-1.0, -0.35, 0.2, 0.85];
    let mut out = Vec::new();
    for &x in &v {
        for &y in &v {
            for &z in &v {
                out.push(ChartPoint::new(x, y, z).unwrap());
            }
        }
    }
    out
}

#[test]
fn structure_equations_hold() {
    let ex = example(2.0, 0.0);
    let spec = &ex.frame;
    for p in grid() {
        for v in spec.jacobi(&p).unwrap() {
            assert!(v.abs() <= 1e-9);
        }
        for v in spec.harmonic_residual(&p).unwrap() {
            assert!(v.abs() <= 1e-9);
        }
        assert!(spec.natural().realization_consistency(&p).unwrap() <= 1e-9);
        assert!(axioms_check(&ex.darboux, &p).unwrap().max() <= 1e-10);
    }
}

#[test]
fn brackets_match_closed_form() {
    let ex = example(2.0, 0.0);
    for p in grid() {
        let t = ex.frame.natural().bracket_table(&p).unwrap();
        let a1 = 4.0 * (2.0 * p.z()).exp();
        let w = 2f64.sqrt() * (2.0 - 2.0 * p.y());
        assert!((t.c[XI][E][E] + a1).abs() < 1e-12 && (t.c[XI][E][PHI_E] + a1).abs() < 1e-12);
        assert!((t.c[XI][PHI_E][E] - a1).abs() < 1e-12 && (t.c[XI][PHI_E][PHI_E] - a1).abs() < 1e-12);
        assert_eq!(t.c[E][PHI_E][XI], -2.0);
        assert!((t.c[E][PHI_E][E] - w).abs() < 1e-12 && (t.c[E][PHI_E][PHI_E] - w).abs() < 1e-12);
    }
}

#[test]
fn soliton_and_kappa_mu() {
    let ex = example(2.0, 0.0);
    let pts = grid();
    let r = soliton_check(&ex.frame, &pts, 1e-9).unwrap();
    assert_eq!(r.verdict, SolitonVerdict::Soliton);
    assert!(r.residual_norm <= 1e-9);
    for p in &pts {
        let iht = ex.frame.ricci_iht(p, 1e-9).unwrap();
        let a1 = 4.0 * (2.0 * p.z()).exp();
        assert!((iht.a - 2.0 * a1).abs() < 1e-9 * a1.max(1.0));
        assert!((iht.r + 6.0).abs() < 1e-9);
        let km = kappa_mu_detect(&ex.frame, p, 1e-9).unwrap();
        assert_eq!(km.kappa, -1.0);
        assert!((km.mu.unwrap() + 2.0).abs() < 1e-12);
        assert!(km.curvature_residual < 1e-9, "{}", km.curvature_residual);
        assert_eq!(segre_classify(&iht.ricci).label, SegreLabel::SegreDegenerate21);
    }
}

#[test]
fn h_nilpotent_not_zero() {
    let ex = example(2.0, 0.0);
    let p = ChartPoint::new(0.4, -0.3, 0.0).unwrap();
    let sv = ex.frame.structure_at(&p).unwrap();
    let h = HTensor::from_structure(&sv);
    assert!(h.trace_sq.abs() <= 1e-12);
    assert!(h.max_abs() >= 0.1);
    let hm = h_matrices(&ex.darboux, &p).unwrap();
    assert!(hm.nilpotent && !hm.para_sasakian);
}

#[test]
fn frame_and_chart_ricci_agree() {
    let ex = example(2.0, 1.0);
    for p in grid() {
        let chart = chart_ricci(&ex.darboux, &p).unwrap();
        assert!(chart.asymmetry <= 1e-12);
        assert!((chart.scalar + 6.0).abs() <= 1e-8);
        assert!((chart.ricci.get(2, 2) + 0.5).abs() <= 1e-8);
        let iht = ex.frame.ricci_iht(&p, 1e-9).unwrap();
        let frame = frame_values(&ex.frame.natural().frame_jets(&p).unwrap());
        let pushed = push_frame_bilinear(&iht.ricci, &frame, &chart.metric);
        for i in 0..3 {
            for j in 0..3 {
                assert!((pushed[i][j] - chart.ricci.get(i, j)).abs() <= 1e-8);
            }
        }
    }
}

#[test]
fn christoffel_symmetric_at_origin() {
    let ex = example_structure(1.0, 2.0, 1.0, parse("0").unwrap()).unwrap();
    let g = chart_christoffel(&ex.darboux, &ChartPoint::origin()).unwrap();
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                assert!(g[k][i][j].is_finite());
                assert!((g[k][i][j] - g[k][j][i]).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn generic_curvature_matches_closed_form_ricci() {
    let ex = example(2.0, 0.0);
    for p in grid() {
        let generic = ex.frame.natural().frame_curvature(&p).unwrap();
        let iht = ex.frame.ricci_iht(&p, 1e-9).unwrap();
        let g = generic.ricci();
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.get(i, j) - iht.ricci.get(i, j)).abs() < 1e-9);
            }
        }
        assert!((iht.reduced_form().max_abs() - iht.ricci.max_abs()).abs() < 1e-12);
    }
}

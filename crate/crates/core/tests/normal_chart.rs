use ppc_core::chart::{chart_ricci, frame_values, push_frame_bilinear, FrameInducedMetric};
use ppc_core::expr::{parse, Bindings};
use ppc_core::frame::{FrameMode, Realization};
use ppc_core::jet::ChartPoint;
use ppc_core::normal::{normal_flat_corollary, normal_soliton_check, FlatCorollary, NormalFrameSpec, NormalSolitonVerdict};

fn steady() -> NormalFrameSpec {
    let p = |s: &str| parse(s).unwrap();
    let u = "exp(-z/2)/(z+3)";
    let realization = Realization {
        xi: [p("0"), p("0"), p("2")],
        e: [
            p(&format!("({u}*2*x^2 + exp(z/2))/2")),
            p(&format!("{u}/2")),
            p(&format!("{u}*8*x/2")),
        ],
        phi_e: [
            p(&format!("({u}*2*x^2 - exp(z/2))/2")),
            p(&format!("{u}/2")),
            p(&format!("{u}*8*x/2")),
        ],
    };
    NormalFrameSpec::new(
        [p("1/(z+3)"), p("1/(z+3)"), p("-1"), p("0"), p("0")],
        FrameMode::Chart(realization),
        Bindings::new(),
    )
    .unwrap()
}

fn points() -> Vec<ChartPoint> {
    let mut out = Vec::new();
    for &x in &[-0.8, 0.1, 0.6] {
        for &y in &[-0.5, 0.3] {
            for &z in &[-1.0, 0.0, 0.9] {
                out.push(ChartPoint::new(x, y, z).unwrap());
            }
        }
    }
    out
}

#[test]
fn steady_realization_is_consistent() {
    let s = steady();
    for p in points() {
        assert!(s.natural().realization_consistency(&p).unwrap() < 1e-12);
        for v in s.jacobi_residual(&p).unwrap() {
            assert!(v.abs() < 1e-12);
        }
        assert!(s.iht_residual(&p).unwrap().abs() < 1e-12);
    }
}

#[test]
fn steady_soliton_verdict() {
    let s = steady();
    let pts = points();
    let r = normal_soliton_check(&s, 0.0, &pts, 1e-9).unwrap();
    assert_eq!(r.verdict, NormalSolitonVerdict::Steady, "{:?}", r.reasons);
    for (p, rr) in pts.iter().zip(&r.scalar_curvature) {
        assert!((rr + 4.0 / (p.z() + 3.0)).abs() < 1e-9);
    }
    assert!(matches!(
        normal_flat_corollary(&s, &r, &pts, 1e-9).unwrap(),
        FlatCorollary::NotApplicable { .. }
    ));
}

#[test]
fn normal_ricci_matches_generic_and_chart() {
    let s = steady();
    let metric = FrameInducedMetric {
        realization: s.natural().realization().unwrap().clone(),
        env: Bindings::new(),
    };
    for p in points() {
        let closed = s.ricci(&p).unwrap();
        let generic = s.natural().frame_curvature(&p).unwrap().ricci();
        for i in 0..3 {
            for j in 0..3 {
                assert!((closed.ricci.get(i, j) - generic.get(i, j)).abs() < 1e-12);
            }
        }
        let chart = chart_ricci(&metric, &p).unwrap();
        let frame = frame_values(&s.natural().frame_jets(&p).unwrap());
        let pushed = push_frame_bilinear(&closed.ricci, &frame, &chart.metric);
        for i in 0..3 {
            for j in 0..3 {
                assert!((pushed[i][j] - chart.ricci.get(i, j)).abs() < 1e-8, "{p} {i}{j}");
            }
        }
        assert!((chart.scalar - closed.r).abs() < 1e-8);
    }
}

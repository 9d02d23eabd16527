//! Orchestration of checks over a sample set, and the report they produce.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::chart::{chart_ricci, frame_brackets, frame_values, push_frame_bilinear, Christoffel, FrameInducedMetric, MetricField};
use crate::darboux::{axioms_check, build_darboux, h_matrices, homogeneity_probe, DarbouxStructure, ExampleStructure};
use crate::error::GeometryError;
use crate::frame::{
    BracketTable, ClassificationFlags, Epsilon, FrameConnection, FrameCurvature, NaturalFrameSpec, ParacontactFrameSpec,
    StructureValues, SymBilinear,
};
use crate::invariants::{kappa_mu_detect, segre_classify, soliton_check, SolitonVerdict};
use crate::jet::ChartPoint;
use crate::normal::{normal_affine_killing, normal_flat_corollary, normal_soliton_check, NormalFrameSpec, NormalRicciData};
use crate::sampling::{SkippedPoint, GUARD_BAND};
use crate::specfile::{Model, SpecError, SpecFile, Variant};
use crate::tolerances;

pub const TOOL_NAME: &str = "ppc";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Check,
    Soliton,
    Crossval,
    ProbeHomogeneity,
    Report,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Check,
        Command::Soliton,
        Command::Crossval,
        Command::ProbeHomogeneity,
        Command::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Soliton => "soliton",
            Command::Crossval => "crossval",
            Command::ProbeHomogeneity => "probe-homogeneity",
            Command::Report => "report",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Overrides every per-check default tolerance.
    pub tol: Option<f64>,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    /// Skip points where evaluation is singular instead of failing.
    pub skip_singular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub location: Option<[f64; 3]>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingSummary {
    pub seed: u64,
    pub requested: usize,
    pub evaluated: usize,
    pub skipped: Vec<SkippedPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub variant: String,
    pub mode: String,
    pub input_digest: String,
    pub sampling: SamplingSummary,
    pub checks: Vec<CheckRecord>,
    pub summary: Map<String, Value>,
    pub pass: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    /// Machine form; object keys are sorted.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("report is serializable")
    }

    pub fn to_json(&self) -> String {
        json_text(&self.to_value())
    }

    pub fn to_text(&self) -> String {
        render_text(&self.to_value())
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value is serializable");
    s.push('\n');
    s
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        _ => {
            let _ = writeln!(out, "  {prefix} = {}", scalar_text(v));
        }
    }
}

/// Human-readable rendering of a machine report. Numbers are printed
/// exactly as in the JSON form.
pub fn render_text(v: &Value) -> String {
    let get = |k: &str| v.get(k).map(scalar_text).unwrap_or_default();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {}: {} on {} ({})",
        get("tool"),
        get("version"),
        get("command"),
        get("variant"),
        get("mode")
    );
    let _ = writeln!(out, "input sha256: {}", get("input_digest"));
    let verdict = if v.get("pass") == Some(&Value::Bool(true)) { "PASS" } else { "FAIL" };
    let _ = writeln!(out, "result: {verdict}");
    out.push_str("checks:\n");
    if let Some(Value::Array(checks)) = v.get("checks") {
        for c in checks {
            let tag = if c.get("pass") == Some(&Value::Bool(true)) { "PASS" } else { "FAIL" };
            let f = |k: &str| c.get(k).map(scalar_text).unwrap_or_default();
            let _ = writeln!(
                out,
                "  [{tag}] {}  residual={}  tol={}  at={}",
                f("name"),
                f("residual"),
                f("tolerance"),
                f("location")
            );
        }
    }
    out.push_str("sampling:\n");
    if let Some(s) = v.get("sampling") {
        flatten("", s, &mut out);
    }
    out.push_str("summary:\n");
    if let Some(s) = v.get("summary") {
        flatten("", s, &mut out);
    }
    out
}

struct Worst {
    name: String,
    tol: f64,
    residual: f64,
    location: Option<[f64; 3]>,
}

impl Worst {
    fn new(name: &str, tol: f64) -> Self {
        Self {
            name: name.to_string(),
            tol,
            residual: 0.0,
            location: None,
        }
    }

    fn see(&mut self, v: f64, p: &ChartPoint) {
        if self.residual.is_nan() {
            return;
        }
        if self.location.is_none() || v.is_nan() || v > self.residual {
            self.residual = v;
            self.location = Some(p.as_array());
        }
    }

    fn record(self) -> CheckRecord {
        CheckRecord {
            pass: self.residual <= self.tol,
            name: self.name,
            residual: self.residual,
            location: self.location,
            tolerance: self.tol,
        }
    }
}

fn fixed(name: &str, residual: f64, location: Option<[f64; 3]>, tol: f64) -> CheckRecord {
    CheckRecord {
        name: name.to_string(),
        residual,
        location,
        tolerance: tol,
        pass: residual <= tol,
    }
}

#[derive(Default)]
struct Section {
    checks: Vec<CheckRecord>,
    summary: Map<String, Value>,
}

impl Section {
    fn push(&mut self, w: Worst) {
        self.checks.push(w.record());
    }

    fn put(&mut self, key: &str, v: impl Serialize) {
        self.summary
            .insert(key.to_string(), serde_json::to_value(v).expect("summary entry is serializable"));
    }
}

fn max_abs3(v: [f64; 3]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn mat_diff(a: &[[f64; 3]; 3], b: impl Fn(usize, usize) -> f64) -> f64 {
    let mut worst = 0.0f64;
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((v - b(i, j)).abs());
        }
    }
    worst
}

fn structure_finite(s: &StructureValues) -> bool {
    [s.a1, s.a2, s.a3, s.a4, s.a5, s.b1, s.b2]
        .iter()
        .all(|f| f.value.is_finite() && f.d.iter().all(|d| d.is_finite()))
}

fn screen_frame(n: &NaturalFrameSpec, p: &ChartPoint) -> Result<(), GeometryError> {
    let s = n.structure_at(p)?;
    if !structure_finite(&s) {
        return Err(GeometryError::NonFinite("structure functions"));
    }
    if n.realization().is_some() {
        let jets = n.frame_jets(p)?;
        if jets.iter().flatten().any(|j| !j.value.is_finite()) {
            return Err(GeometryError::NonFinite("realized frame"));
        }
        frame_brackets(&jets)?;
    }
    Ok(())
}

fn screen_darboux(d: &DarbouxStructure, p: &ChartPoint) -> Result<(), GeometryError> {
    let abc = d.abc(p)?;
    if abc.iter().any(|j| !j.value.is_finite()) {
        return Err(GeometryError::NonFinite("darboux functions"));
    }
    Christoffel::from_metric_jets(&d.metric_jets(p)?)?;
    Ok(())
}

fn screen(model: &Model, p: &ChartPoint) -> Result<(), GeometryError> {
    match model {
        Model::Natural(n) => screen_frame(n, p),
        Model::Paracontact(s) => screen_frame(s.natural(), p),
        Model::Normal(s) => screen_frame(s.natural(), p),
        Model::Darboux(d) => {
            // not a paracontact structure at all: an input error, not a failed check
            build_darboux(d.a.clone(), d.b.clone(), d.c.clone(), d.env.clone(), std::slice::from_ref(p))?;
            screen_darboux(d, p)
        }
        Model::Example(ex) => {
            screen_darboux(&ex.darboux, p)?;
            screen_frame(ex.frame.natural(), p)
        }
    }
}

fn sample(spec: &SpecFile, model: &Model, opts: &RunOptions) -> Result<(Vec<ChartPoint>, SamplingSummary), SpecError> {
    let mut plan = spec.sampling.clone();
    if let Some(n) = opts.points {
        plan.points = n;
    }
    if let Some(s) = opts.seed {
        plan.seed = s;
    }
    let raw = plan.raw_points()?;
    let mut points = Vec::with_capacity(raw.len());
    let mut skipped = Vec::new();
    for p in &raw {
        let verdict = plan
            .guard_violation(p, &spec.constants)
            .and_then(|g| match g {
                Some((i, v)) => Ok(Some(format!("within {GUARD_BAND} of exclude[{i}] (value {v})"))),
                None => screen(model, p).map(|_| None),
            });
        match verdict {
            Ok(None) => points.push(*p),
            Ok(Some(reason)) => skipped.push(SkippedPoint {
                point: p.as_array(),
                reason,
            }),
            Err(e) if e.is_singular() && opts.skip_singular => skipped.push(SkippedPoint {
                point: p.as_array(),
                reason: e.to_string(),
            }),
            Err(e) => return Err(e.into()),
        }
    }
    if points.is_empty() {
        return Err(SpecError::Schema {
            item: "sampling".into(),
            problem: "no usable sample points".into(),
        });
    }
    let summary = SamplingSummary {
        seed: plan.seed,
        requested: raw.len(),
        evaluated: points.len(),
        skipped,
    };
    Ok((points, summary))
}

fn frame_tol(spec: &SpecFile, opts: &RunOptions) -> f64 {
    opts.tol.unwrap_or_else(|| tolerances::for_mode(spec.lie_group))
}

type Jacobi<'a> = &'a dyn Fn(&ChartPoint) -> Result<[f64; 3], GeometryError>;

fn frame_structure_checks(n: &NaturalFrameSpec, jacobi: Jacobi, pts: &[ChartPoint], tol: f64, sec: &mut Section) -> Result<(), SpecError> {
    let mut jac = Worst::new("jacobi", tol);
    let mut compat = Worst::new("connection_metric_compatibility", tol);
    let mut torsion = Worst::new("connection_torsion", tol);
    let mut sym = Worst::new("curvature_symmetries", tol);
    let mut real = n.realization().map(|_| Worst::new("realization_consistency", tol));
    let mut flags: Option<ClassificationFlags> = None;
    let mut flags_constant = true;
    for p in pts {
        let s = n.structure_at(p)?;
        jac.see(max_abs3(jacobi(p)?), p);
        let conn = FrameConnection::from_structure(&s);
        compat.see(conn.metric_compatibility_defect(), p);
        torsion.see(conn.torsion_defect(&BracketTable::from_structure(&s)), p);
        sym.see(FrameCurvature::from_structure(&s).symmetry_defect(), p);
        if let Some(w) = real.as_mut() {
            w.see(n.realization_consistency(p)?, p);
        }
        let f = ClassificationFlags::from_structure(&s, tol);
        match &flags {
            None => flags = Some(f),
            Some(first) => {
                let same = (first.contact_form, first.paracontact, first.h_zero, first.xi_killing, first.divergence_free)
                    == (f.contact_form, f.paracontact, f.h_zero, f.xi_killing, f.divergence_free);
                flags_constant &= same;
            }
        }
    }
    sec.push(jac);
    sec.push(compat);
    sec.push(torsion);
    sec.push(sym);
    if let Some(w) = real {
        sec.push(w);
    }
    sec.put("flags", flags);
    sec.put("flags_constant", flags_constant);
    Ok(())
}

fn paracontact_harmonic_summary(spec: &ParacontactFrameSpec, pts: &[ChartPoint], tol: f64, sec: &mut Section) -> Result<(), SpecError> {
    let mut worst = 0.0f64;
    let mut eps: Option<Epsilon> = None;
    for p in pts {
        let (d, e) = spec.iht_defect(p)?;
        worst = worst.max(d);
        eps.get_or_insert(e);
    }
    sec.put("iht_defect", worst);
    sec.put("harmonic", worst <= tol);
    sec.put("epsilon", eps);
    Ok(())
}

fn darboux_checks(d: &DarbouxStructure, pts: &[ChartPoint], tol: f64, sec: &mut Section) -> Result<(), SpecError> {
    let names = [
        "axiom_constraint",
        "axiom_phi_squared",
        "axiom_phi_xi",
        "axiom_eta_phi",
        "axiom_eta_xi",
        "axiom_g_xi_xi",
        "axiom_compatibility",
        "axiom_contact",
    ];
    let mut ws: Vec<Worst> = names.iter().map(|n| Worst::new(n, tol)).collect();
    let (mut para_sasakian, mut nilpotent) = (true, true);
    let (mut max_factor, mut max_h) = (0.0f64, 0.0f64);
    for p in pts {
        let a = axioms_check(d, p)?;
        let vals = [
            a.constraint,
            a.phi_squared,
            a.phi_xi,
            a.eta_phi,
            a.eta_xi,
            a.g_xi_xi,
            a.compatibility,
            a.contact,
        ];
        for (w, v) in ws.iter_mut().zip(vals) {
            w.see(v, p);
        }
        let h = h_matrices(d, p)?;
        para_sasakian &= h.para_sasakian;
        nilpotent &= h.nilpotent;
        max_factor = max_factor.max(h.nilpotency_factor.abs());
        max_h = max_h.max(h.h.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    for w in ws {
        sec.push(w);
    }
    sec.put("para_sasakian", para_sasakian);
    sec.put("h_nilpotent", nilpotent);
    sec.put("max_abs_nilpotency_factor", max_factor);
    sec.put("max_abs_h", max_h);
    Ok(())
}

fn section_check(spec: &SpecFile, model: &Model, pts: &[ChartPoint], opts: &RunOptions) -> Result<Section, SpecError> {
    let tol = frame_tol(spec, opts);
    let mut sec = Section::default();
    match model {
        Model::Natural(n) => {
            frame_structure_checks(n, &|p| n.jacobi_residual(p), pts, tol, &mut sec)?;
        }
        Model::Paracontact(s) => {
            frame_structure_checks(s.natural(), &|p| s.jacobi(p), pts, tol, &mut sec)?;
            paracontact_harmonic_summary(s, pts, tol, &mut sec)?;
        }
        Model::Normal(s) => {
            frame_structure_checks(s.natural(), &|p| s.jacobi_residual(p), pts, tol, &mut sec)?;
            sec.put("affine_killing", normal_affine_killing(s, pts, tol)?);
        }
        Model::Darboux(d) => {
            darboux_checks(d, pts, opts.tol.unwrap_or(tolerances::AXIOMS), &mut sec)?;
        }
        Model::Example(ex) => {
            darboux_checks(&ex.darboux, pts, opts.tol.unwrap_or(tolerances::AXIOMS), &mut sec)?;
            let f = &ex.frame;
            frame_structure_checks(f.natural(), &|p| f.jacobi(p), pts, tol, &mut sec)?;
            paracontact_harmonic_summary(f, pts, tol, &mut sec)?;
            example_params(ex, &mut sec);
        }
    }
    Ok(sec)
}

fn example_params(ex: &ExampleStructure, sec: &mut Section) {
    sec.put("alpha", ex.alpha);
    sec.put("beta", ex.beta);
    sec.put("gamma", ex.gamma);
    sec.put("f", ex.f.to_string());
}

fn paracontact_soliton(spec: &ParacontactFrameSpec, pts: &[ChartPoint], tol: f64, sec: &mut Section) -> Result<(), SpecError> {
    let rep = soliton_check(spec, pts, tol)?;
    let at = Some(rep.worst_point);
    match &rep.precondition {
        Some(pf) => sec.checks.push(fixed("harmonic_precondition", pf.residual, Some(pf.point), tol)),
        None => {
            sec.checks.push(fixed("harmonic_precondition", 0.0, None, tol));
            sec.checks.push(fixed("soliton_residual", rep.residual_norm, at, tol));
            sec.checks.push(fixed("a_equals_2a1", rep.a_residual, None, tol));
            sec.checks.push(fixed("scalar_curvature_minus_6", rep.r_residual, None, tol));
        }
    }
    if rep.verdict != SolitonVerdict::PreconditionFailed {
        let mut km_first = None;
        let mut km_residual = 0.0f64;
        let mut mu_spread = 0.0f64;
        let mut segre_first = None;
        let mut segre_constant = true;
        for p in pts {
            let km = kappa_mu_detect(spec, p, tol)?;
            km_residual = km_residual.max(km.curvature_residual);
            let first = *km_first.get_or_insert(km);
            if let (Some(a), Some(b)) = (first.mu, km.mu) {
                mu_spread = mu_spread.max((a - b).abs());
            }
            let iht = spec.ricci_iht(p, tol)?;
            let sg = segre_classify(&iht.ricci);
            match &segre_first {
                None => segre_first = Some(sg),
                Some(f) => segre_constant &= f.label == sg.label,
            }
        }
        let mut km = Map::new();
        if let Some(k) = km_first {
            km.insert("kappa".into(), serde_json::to_value(k.kappa).unwrap_or(Value::Null));
            km.insert("mu".into(), serde_json::to_value(k.mu).unwrap_or(Value::Null));
            km.insert("nilpotent_h".into(), Value::Bool(k.nilpotent_h));
        }
        km.insert("curvature_residual".into(), serde_json::to_value(km_residual).unwrap_or(Value::Null));
        km.insert("mu_spread".into(), serde_json::to_value(mu_spread).unwrap_or(Value::Null));
        sec.put("kappa_mu", km);
        sec.put("segre", segre_first);
        sec.put("segre_constant", segre_constant);
    }
    sec.put("soliton", rep);
    Ok(())
}

fn normal_soliton(spec_file: &SpecFile, spec: &NormalFrameSpec, pts: &[ChartPoint], tol: f64, sec: &mut Section) -> Result<(), SpecError> {
    let lambda = spec_file.constants.get("lambda").ok_or_else(|| SpecError::Schema {
        item: "lambda".into(),
        problem: "required in [constants] by `soliton` on the normal variant".into(),
    })?;
    let rep = normal_soliton_check(spec, lambda, pts, tol)?;
    sec.checks.push(fixed("harmonic", rep.iht_residual, None, tol));
    for (i, v) in rep.system_residuals.iter().enumerate() {
        sec.checks.push(fixed(&format!("soliton_equation_{}", i + 1), *v, None, tol));
    }
    sec.checks.push(fixed("forced_lambda", rep.forced_lambda_residual, None, tol));
    sec.checks.push(fixed("lambda_b1", rep.lambda_b1, None, tol));
    if lambda.abs() > tol {
        sec.checks.push(fixed("b1_vanishes", rep.max_abs_b1, None, tolerances::NORMAL));
        if let Some(e) = rep.einstein_residual {
            sec.checks.push(fixed("einstein", e, None, tol));
        }
    } else if let Some(st) = rep.steady_residuals {
        let names = ["steady_b2_equals_eps_b1", "steady_harmonic", "steady_r_equals_minus_4b1", "steady_transverse_b1"];
        for (n, v) in names.iter().zip(st) {
            sec.checks.push(fixed(n, v, None, tol));
        }
    }
    let corollary = normal_flat_corollary(spec, &rep, pts, tol)?;
    sec.put("flat_corollary", corollary);
    sec.put("soliton", rep);
    Ok(())
}

fn mismatch(cmd: Command, reason: &str) -> SpecError {
    SpecError::VariantMismatch {
        command: cmd.name().to_string(),
        reason: reason.to_string(),
    }
}

fn section_soliton(spec: &SpecFile, model: &Model, pts: &[ChartPoint], opts: &RunOptions) -> Result<Section, SpecError> {
    let tol = frame_tol(spec, opts);
    let mut sec = Section::default();
    match model {
        Model::Paracontact(s) => paracontact_soliton(s, pts, tol, &mut sec)?,
        Model::Example(ex) => paracontact_soliton(&ex.frame, pts, tol, &mut sec)?,
        Model::Normal(s) => normal_soliton(spec, s, pts, tol, &mut sec)?,
        Model::Natural(_) => return Err(mismatch(Command::Soliton, "needs a paracontact or normal structure")),
        Model::Darboux(_) => {
            return Err(mismatch(
                Command::Soliton,
                "needs a frame description (use the example shortcut or a frame variant)",
            ))
        }
    }
    Ok(sec)
}

#[derive(Clone, Copy)]
enum ClosedForm<'a> {
    None,
    Paracontact(&'a ParacontactFrameSpec),
    Normal,
}

fn frame_crossval(
    n: &NaturalFrameSpec,
    closed: ClosedForm,
    pts: &[ChartPoint],
    tol: f64,
    sec: &mut Section,
) -> Result<(), SpecError> {
    let Some(real) = n.realization() else {
        return Err(mismatch(Command::Crossval, "needs a chart realization ([frame] section)"));
    };
    let field = FrameInducedMetric {
        realization: real.clone(),
        env: n.env.clone(),
    };
    let mut ricci = Worst::new("frame_vs_chart_ricci", tol);
    let mut scalar = Worst::new("frame_vs_chart_scalar", tol);
    let mut asym = Worst::new("chart_ricci_symmetry", tol);
    let mut real_w = Worst::new("realization_consistency", tol);
    let mut closed_w = Worst::new("closed_form_vs_generic_ricci", tol);
    let mut closed_applicable = true;
    let (mut rmin, mut rmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        let s = n.structure_at(p)?;
        let generic = FrameCurvature::from_structure(&s);
        let gr = generic.ricci();
        let cr = chart_ricci(&field, p)?;
        let frame = frame_values(&n.frame_jets(p)?);
        let pushed = push_frame_bilinear(&gr, &frame, &cr.metric);
        ricci.see(mat_diff(&pushed, |i, j| cr.ricci.get(i, j)), p);
        scalar.see((generic.scalar() - cr.scalar).abs(), p);
        asym.see(cr.asymmetry, p);
        real_w.see(n.realization_consistency(p)?, p);
        rmin = rmin.min(cr.scalar);
        rmax = rmax.max(cr.scalar);
        let closed_form: Option<SymBilinear> = match closed {
            ClosedForm::None => None,
            ClosedForm::Normal => Some(NormalRicciData::from_structure(&s).ricci),
            ClosedForm::Paracontact(spec) => {
                let (defect, eps) = spec.iht_defect(p)?;
                if defect <= tol {
                    Some(ParacontactFrameSpec::ricci_from_structure(&s, eps).ricci)
                } else {
                    closed_applicable = false;
                    None
                }
            }
        };
        if let Some(c) = closed_form {
            closed_w.see(mat_diff(c.matrix(), |i, j| gr.get(i, j)), p);
        }
    }
    sec.push(ricci);
    sec.push(scalar);
    sec.push(asym);
    sec.push(real_w);
    match closed {
        ClosedForm::None => {}
        _ if !closed_applicable => sec.put("closed_form", "not applicable: xi is not harmonic at every point"),
        _ => sec.push(closed_w),
    }
    sec.put("chart_scalar_curvature_min", rmin);
    sec.put("chart_scalar_curvature_max", rmax);
    Ok(())
}

fn example_crossval(ex: &ExampleStructure, pts: &[ChartPoint], tol: f64, sec: &mut Section) -> Result<(), SpecError> {
    let n = ex.frame.natural();
    let real = n.realization().expect("example frame is realized");
    let induced = FrameInducedMetric {
        realization: real.clone(),
        env: n.env.clone(),
    };
    let mut ricci = Worst::new("frame_vs_chart_ricci", tol);
    let mut generic_w = Worst::new("generic_vs_chart_ricci", tol);
    let mut scalar = Worst::new("frame_vs_chart_scalar", tol);
    let mut metric = Worst::new("frame_metric_vs_darboux_metric", tol);
    let mut asym = Worst::new("chart_ricci_symmetry", tol);
    let (mut rmin, mut rmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        let cr = chart_ricci(&ex.darboux, p)?;
        let iht = ex.frame.ricci_iht(p, tol)?;
        let s = n.structure_at(p)?;
        let gr = FrameCurvature::from_structure(&s).ricci();
        let frame = frame_values(&n.frame_jets(p)?);
        let pushed = push_frame_bilinear(&iht.ricci, &frame, &cr.metric);
        ricci.see(mat_diff(&pushed, |i, j| cr.ricci.get(i, j)), p);
        let pushed_g = push_frame_bilinear(&gr, &frame, &cr.metric);
        generic_w.see(mat_diff(&pushed_g, |i, j| cr.ricci.get(i, j)), p);
        scalar.see((iht.r - cr.scalar).abs(), p);
        asym.see(cr.asymmetry, p);
        let gi = induced.metric_jets(p)?;
        metric.see(mat_diff(&cr.metric, |i, j| gi[i][j].value), p);
        rmin = rmin.min(cr.scalar);
        rmax = rmax.max(cr.scalar);
    }
    sec.push(ricci);
    sec.push(generic_w);
    sec.push(scalar);
    sec.push(metric);
    sec.push(asym);
    sec.put("chart_scalar_curvature_min", rmin);
    sec.put("chart_scalar_curvature_max", rmax);
    Ok(())
}

fn section_crossval(model: &Model, pts: &[ChartPoint], opts: &RunOptions) -> Result<Section, SpecError> {
    let tol = opts.tol.unwrap_or(tolerances::CROSSVAL);
    let mut sec = Section::default();
    match model {
        Model::Natural(n) => frame_crossval(n, ClosedForm::None, pts, tol, &mut sec)?,
        Model::Paracontact(s) => frame_crossval(s.natural(), ClosedForm::Paracontact(s), pts, tol, &mut sec)?,
        Model::Normal(s) => frame_crossval(s.natural(), ClosedForm::Normal, pts, tol, &mut sec)?,
        Model::Example(ex) => example_crossval(ex, pts, tol, &mut sec)?,
        Model::Darboux(_) => return Err(mismatch(Command::Crossval, "needs a frame realization to compare against")),
    }
    Ok(sec)
}

fn section_probe(spec: &SpecFile, model: &Model, pts: &[ChartPoint], opts: &RunOptions) -> Result<Section, SpecError> {
    let (Model::Example(ex), Some(params)) = (model, &spec.example) else {
        return Err(mismatch(Command::ProbeHomogeneity, "needs the darboux example shortcut (alpha, beta, gamma, f)"));
    };
    let tol = opts.tol.unwrap_or(tolerances::CHART);
    let rep = homogeneity_probe(ex, params.c, pts)?;
    let mut sec = Section::default();
    sec.checks.push(fixed("rotated_bracket_formula", rep.formula_residual, None, tol));
    sec.checks.push(fixed("hyperbolic_identity", rep.hyperbolic_residual, None, tol));
    example_params(ex, &mut sec);
    sec.put("homogeneity_tolerance", tolerances::HOMOGENEITY);
    sec.put("probe", rep);
    Ok(sec)
}

fn section(spec: &SpecFile, model: &Model, cmd: Command, pts: &[ChartPoint], opts: &RunOptions) -> Result<Section, SpecError> {
    match cmd {
        Command::Check => section_check(spec, model, pts, opts),
        Command::Soliton => section_soliton(spec, model, pts, opts),
        Command::Crossval => section_crossval(model, pts, opts),
        Command::ProbeHomogeneity => section_probe(spec, model, pts, opts),
        Command::Report => unreachable!("report is composed of the other sections"),
    }
}

/// Run one command on a validated spec file.
pub fn run_command(spec: &SpecFile, cmd: Command, opts: &RunOptions) -> Result<Report, SpecError> {
    if let Some(t) = opts.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(SpecError::Schema {
                item: "--tol".into(),
                problem: "must be a finite non-negative number".into(),
            });
        }
    }
    let model = spec.model()?;
    let (pts, sampling) = sample(spec, &model, opts)?;
    let mut checks = Vec::new();
    let mut summary = Map::new();
    if cmd == Command::Report {
        for sub in [Command::Check, Command::Soliton, Command::Crossval, Command::ProbeHomogeneity] {
            match section(spec, &model, sub, &pts, opts) {
                Ok(sec) => {
                    for mut c in sec.checks {
                        c.name = format!("{}.{}", sub.name(), c.name);
                        checks.push(c);
                    }
                    summary.insert(sub.name().to_string(), Value::Object(sec.summary));
                }
                Err(SpecError::VariantMismatch { reason, .. }) => {
                    summary.insert(sub.name().to_string(), Value::String(format!("skipped: {reason}")));
                }
                Err(e) => return Err(e),
            }
        }
    } else {
        let sec = section(spec, &model, cmd, &pts, opts)?;
        checks = sec.checks;
        summary.insert(cmd.name().to_string(), Value::Object(sec.summary));
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        command: cmd.name().to_string(),
        variant: spec.variant.name().to_string(),
        mode: spec.mode_name().to_string(),
        input_digest: spec.digest.clone(),
        sampling,
        checks,
        summary,
        pass,
    })
}

/// Variants a command can run on, for documentation and error messages.
pub fn applicable(cmd: Command, spec: &SpecFile) -> bool {
    match cmd {
        Command::Check | Command::Report => true,
        Command::Soliton => matches!(spec.variant, Variant::Paracontact | Variant::Normal) || spec.example.is_some(),
        Command::Crossval => spec.frame.is_some() || spec.example.is_some(),
        Command::ProbeHomogeneity => spec.example.is_some(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SL2: &str = r#"
[structure]
variant = "paracontact"
epsilon = 1

[functions]
a1 = "1"
a2 = "1"
a3 = "1"
a4 = "0"
a5 = "0"
"#;

    fn run(text: &str, cmd: Command) -> Result<Report, SpecError> {
        run_command(&SpecFile::parse(text).unwrap(), cmd, &RunOptions::default())
    }

    #[test]
    fn sl2_soliton() {
        let r = run(SL2, Command::Soliton).unwrap();
        assert!(r.pass, "{}", r.to_text());
        let s = &r.summary["soliton"];
        assert_eq!(s["soliton"]["lambda"], -2.0);
        assert_eq!(s["soliton"]["scalar_curvature"], -6.0);
        assert_eq!(s["kappa_mu"]["kappa"], -1.0);
        assert_eq!(s["kappa_mu"]["mu"], -2.0);
        assert_eq!(s["segre"]["notation"], "{(2,1)}");
    }

    #[test]
    fn sl2_check_and_mismatch() {
        let r = run(SL2, Command::Check).unwrap();
        assert!(r.pass);
        assert!(matches!(run(SL2, Command::Crossval), Err(SpecError::VariantMismatch { .. })));
        assert!(matches!(run(SL2, Command::ProbeHomogeneity), Err(SpecError::VariantMismatch { .. })));
        let r = run(SL2, Command::Report).unwrap();
        assert!(r.summary["crossval"].as_str().unwrap().starts_with("skipped"));
    }

    #[test]
    fn non_soliton_fails() {
        let text = SL2.replace("a3 = \"1\"", "a3 = \"2\"");
        let r = run(&text, Command::Soliton).unwrap();
        assert!(!r.pass);
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn text_renders_json_numbers() {
        let r = run(SL2, Command::Soliton).unwrap();
        let text = r.to_text();
        for c in &r.checks {
            assert!(text.contains(&format!("residual={}", serde_json::to_value(c.residual).unwrap())));
        }
    }

    #[test]
    fn round_trip() {
        let r = run(SL2, Command::Report).unwrap();
        let json = r.to_json();
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(json_text(&v), json);
    }

    #[test]
    fn singular_points() {
        let text = r#"
[structure]
variant = "normal"
[constants]
lambda = 0
[functions]
b1 = "1/z"
b2 = "1/z"
a3 = "-1"
a4 = "0"
a5 = "0"
[frame]
xi = ["1", "0", "0"]
e = ["0", "1", "0"]
phi_e = ["0", "0", "1"]
[sampling]
fixed_points = [[0.0, 0.0, 0.0]]
points = 4
"#;
        let spec = SpecFile::parse(text).unwrap();
        let err = run_command(&spec, Command::Check, &RunOptions::default()).unwrap_err();
        assert!(matches!(err, SpecError::Geometry(ref g) if g.is_singular()), "{err:?}");
        let opts = RunOptions {
            skip_singular: true,
            ..Default::default()
        };
        let r = run_command(&spec, Command::Check, &opts).unwrap();
        assert_eq!(r.sampling.skipped.len(), 1);
        assert_eq!(r.sampling.evaluated, 4);
    }
}

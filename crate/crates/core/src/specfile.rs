//! Spec files: a TOML description of one structure plus its sampling plan.
//!
//! ```toml
//! [structure]
//! variant = "paracontact"   # natural | paracontact | normal | darboux
//! mode = "lie_group"        # lie_group | chart (default: chart iff [frame] is present)
//! epsilon = 1               # optional, paracontact only
//!
//! [constants]
//! alpha = 1.0
//!
//! [functions]
//! a1 = "1"
//!
//! [frame]                   # chart mode only
//! xi = ["0", "0", "2"]
//! e = ["...", "...", "..."]
//! phi_e = ["...", "...", "..."]
//!
//! [sampling]
//! box = [[-1, 1], [-1, 1], [-1, 1]]
//! points = 64
//! seed = 7
//! fixed_points = [[0.3, -0.2, 0.1]]
//! exclude = ["z + 3"]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::darboux::{example_structure, DarbouxStructure, ExampleStructure};
use crate::error::GeometryError;
use crate::expr::{parse, Bindings, ExprAst, ExprError};
use crate::frame::{Epsilon, FrameMode, NaturalFrameSpec, ParacontactFrameSpec, Realization};
use crate::normal::NormalFrameSpec;
use crate::sampling::SamplingPlan;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed spec file: {0}")]
    Toml(String),
    #[error("schema error: `{item}`: {problem}")]
    Schema { item: String, problem: String },
    #[error("in `{field}`: {source}")]
    Expr {
        field: String,
        #[source]
        source: ExprError,
    },
    #[error("command `{command}` does not apply: {reason}")]
    VariantMismatch { command: String, reason: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl SpecError {
    fn schema(item: impl Into<String>, problem: impl Into<String>) -> Self {
        SpecError::Schema {
            item: item.into(),
            problem: problem.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Natural,
    Paracontact,
    Normal,
    Darboux,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Natural => "natural",
            Variant::Paracontact => "paracontact",
            Variant::Normal => "normal",
            Variant::Darboux => "darboux",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "natural" => Variant::Natural,
            "paracontact" => Variant::Paracontact,
            "normal" => Variant::Normal,
            "darboux" => Variant::Darboux,
            _ => return None,
        })
    }

    /// Required function names (the Darboux example shortcut is handled
    /// separately).
    pub fn required_functions(self) -> &'static [&'static str] {
        match self {
            Variant::Natural => &["a1", "a2", "a3", "a4", "a5", "b1", "b2"],
            Variant::Paracontact => &["a1", "a2", "a3", "a4", "a5"],
            Variant::Normal => &["b1", "b2", "a3", "a4", "a5"],
            Variant::Darboux => &["a", "b", "c"],
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    structure: RawStructure,
    #[serde(default)]
    constants: BTreeMap<String, f64>,
    #[serde(default)]
    functions: BTreeMap<String, String>,
    frame: Option<RawFrame>,
    #[serde(default)]
    sampling: RawSampling,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    variant: String,
    mode: Option<String>,
    epsilon: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFrame {
    xi: [String; 3],
    e: [String; 3],
    phi_e: [String; 3],
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSampling {
    #[serde(rename = "box")]
    bounds: Option<[[f64; 2]; 3]>,
    points: Option<usize>,
    seed: Option<u64>,
    fixed_points: Option<Vec<[f64; 3]>>,
    exclude: Option<Vec<String>>,
}

/// The Darboux example shortcut: `a = F`, `b = 1`, `c = 0` with
/// `F = f(x) + α e^{2z} + β y + γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub f: ExprAst,
    /// Gauge constant of the homogeneity probe (default 1).
    pub c: f64,
}

/// A validated spec file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub variant: Variant,
    /// `lie_group` or `chart`.
    pub lie_group: bool,
    pub epsilon: Option<Epsilon>,
    pub constants: Bindings,
    pub functions: BTreeMap<String, ExprAst>,
    pub frame: Option<Realization>,
    pub example: Option<ExampleParams>,
    pub sampling: SamplingPlan,
    /// Hex SHA-256 of the file bytes.
    pub digest: String,
}

/// The geometric object a spec file describes.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Natural(NaturalFrameSpec),
    Paracontact(ParacontactFrameSpec),
    Normal(NormalFrameSpec),
    Darboux(DarbouxStructure),
    Example(Box<ExampleStructure>),
}

fn parse_field(field: &str, text: &str) -> Result<ExprAst, SpecError> {
    parse(text).map_err(|source| SpecError::Expr {
        field: field.to_string(),
        source,
    })
}

fn check_bound(field: &str, e: &ExprAst, env: &Bindings) -> Result<(), SpecError> {
    for id in e.identifiers() {
        if env.get(&id).is_none() {
            return Err(SpecError::Expr {
                field: field.to_string(),
                source: ExprError::UnboundIdentifier(id),
            });
        }
    }
    Ok(())
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<SpecFile, SpecError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| SpecError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let text = String::from_utf8(bytes).map_err(|e| SpecError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    SpecFile::parse(&text)
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        let digest = hex::encode(Sha256::digest(text.as_bytes()));
        let raw: RawSpec = toml::from_str(text).map_err(|e| SpecError::Toml(e.message().to_string()))?;

        let variant = Variant::parse(&raw.structure.variant)
            .ok_or_else(|| SpecError::schema("structure.variant", format!("unknown variant `{}`", raw.structure.variant)))?;

        let mut constants = Bindings::new();
        for (k, v) in &raw.constants {
            if !v.is_finite() {
                return Err(SpecError::schema(format!("constants.{k}"), "must be finite"));
            }
            constants
                .insert(k.clone(), *v)
                .map_err(|e| SpecError::schema(format!("constants.{k}"), e.to_string()))?;
        }

        let epsilon = match (raw.structure.epsilon, raw.constants.get("epsilon")) {
            (Some(a), Some(b)) if a != *b => {
                return Err(SpecError::schema("epsilon", "structure.epsilon and constants.epsilon disagree"))
            }
            (Some(v), _) | (None, Some(&v)) => Some(
                Epsilon::from_value(v).ok_or_else(|| SpecError::schema("epsilon", format!("must be +1 or -1, got {v}")))?,
            ),
            (None, None) => None,
        };
        if let Some(e) = epsilon {
            if variant != Variant::Paracontact {
                return Err(SpecError::schema("epsilon", format!("not used by the {variant} variant")));
            }
            constants
                .insert("epsilon", e.value())
                .map_err(|err| SpecError::schema("epsilon", err.to_string()))?;
        }

        let mut functions = BTreeMap::new();
        for (k, v) in &raw.functions {
            let e = parse_field(&format!("functions.{k}"), v)?;
            check_bound(&format!("functions.{k}"), &e, &constants)?;
            functions.insert(k.clone(), e);
        }

        let mut example = None;
        if variant == Variant::Darboux && functions.contains_key("f") {
            for k in ["a", "b", "c"] {
                if functions.contains_key(k) {
                    return Err(SpecError::schema(
                        format!("functions.{k}"),
                        "cannot be combined with the example shortcut `f`",
                    ));
                }
            }
            let need = |k: &str| {
                constants
                    .get(k)
                    .ok_or_else(|| SpecError::schema(k, "required by the example shortcut"))
            };
            example = Some(ExampleParams {
                alpha: need("alpha")?,
                beta: need("beta")?,
                gamma: need("gamma")?,
                f: functions["f"].clone(),
                c: constants.get("C").unwrap_or(1.0),
            });
        } else {
            for k in variant.required_functions() {
                if !functions.contains_key(*k) {
                    return Err(SpecError::schema(*k, format!("missing from [functions] ({variant} variant)")));
                }
            }
        }
        let allowed: &[&str] = if example.is_some() { &["f"] } else { variant.required_functions() };
        for k in functions.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(SpecError::schema(
                    format!("functions.{k}"),
                    format!("not a structure function of the {variant} variant"),
                ));
            }
        }

        let lie_group = match raw.structure.mode.as_deref() {
            Some("lie_group") => true,
            Some("chart") => false,
            Some(other) => return Err(SpecError::schema("structure.mode", format!("unknown mode `{other}`"))),
            None => variant != Variant::Darboux && raw.frame.is_none(),
        };
        if variant == Variant::Darboux && lie_group {
            return Err(SpecError::schema("structure.mode", "darboux structures live on a chart"));
        }

        let frame = match &raw.frame {
            Some(f) => {
                if lie_group {
                    return Err(SpecError::schema("frame", "not allowed in lie_group mode"));
                }
                if variant == Variant::Darboux {
                    return Err(SpecError::schema("frame", "darboux structures carry their own frame"));
                }
                let conv = |name: &str, t: &[String; 3]| -> Result<[ExprAst; 3], SpecError> {
                    let mut out = [ExprAst::num(0.0), ExprAst::num(0.0), ExprAst::num(0.0)];
                    for (i, s) in t.iter().enumerate() {
                        let field = format!("frame.{name}[{i}]");
                        let e = parse_field(&field, s)?;
                        check_bound(&field, &e, &constants)?;
                        out[i] = e;
                    }
                    Ok(out)
                };
                Some(Realization {
                    xi: conv("xi", &f.xi)?,
                    e: conv("e", &f.e)?,
                    phi_e: conv("phi_e", &f.phi_e)?,
                })
            }
            None => {
                if !lie_group && variant != Variant::Darboux {
                    return Err(SpecError::schema("frame", "chart mode needs a frame realization"));
                }
                None
            }
        };

        let mut sampling = SamplingPlan::default();
        if let Some(b) = raw.sampling.bounds {
            for (i, [lo, hi]) in b.iter().enumerate() {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(SpecError::schema(format!("sampling.box[{i}]"), "needs finite lo < hi"));
                }
            }
            sampling.bounds = b;
        }
        if let Some(n) = raw.sampling.points {
            sampling.points = n;
        }
        if let Some(s) = raw.sampling.seed {
            sampling.seed = s;
        }
        if let Some(fp) = raw.sampling.fixed_points {
            if fp.iter().flatten().any(|v| !v.is_finite()) {
                return Err(SpecError::schema("sampling.fixed_points", "coordinates must be finite"));
            }
            sampling.fixed_points = fp;
        }
        if let Some(ex) = raw.sampling.exclude {
            for (i, s) in ex.iter().enumerate() {
                let field = format!("sampling.exclude[{i}]");
                let e = parse_field(&field, s)?;
                check_bound(&field, &e, &constants)?;
                sampling.exclude.push(e);
            }
        }
        if sampling.points + sampling.fixed_points.len() == 0 {
            return Err(SpecError::schema("sampling.points", "at least one point is required"));
        }

        Ok(Self {
            variant,
            lie_group,
            epsilon,
            constants,
            functions,
            frame,
            example,
            sampling,
            digest,
        })
    }

    pub fn mode_name(&self) -> &'static str {
        if self.lie_group {
            "lie_group"
        } else {
            "chart"
        }
    }

    fn frame_mode(&self) -> FrameMode {
        match &self.frame {
            Some(r) => FrameMode::Chart(r.clone()),
            None => FrameMode::LieGroup,
        }
    }

    fn take<const N: usize>(&self, names: [&str; N]) -> [ExprAst; N] {
        names.map(|n| self.functions[n].clone())
    }

    pub fn model(&self) -> Result<Model, SpecError> {
        let env = self.constants.clone();
        Ok(match self.variant {
            Variant::Natural => Model::Natural(NaturalFrameSpec::new(
                self.take(["a1", "a2", "a3", "a4", "a5", "b1", "b2"]),
                self.frame_mode(),
                env,
            )?),
            Variant::Paracontact => Model::Paracontact(ParacontactFrameSpec::new(
                self.take(["a1", "a2", "a3", "a4", "a5"]),
                self.epsilon,
                self.frame_mode(),
                env,
            )?),
            Variant::Normal => Model::Normal(NormalFrameSpec::new(
                self.take(["b1", "b2", "a3", "a4", "a5"]),
                self.frame_mode(),
                env,
            )?),
            Variant::Darboux => match &self.example {
                Some(ex) => Model::Example(Box::new(example_structure(ex.alpha, ex.beta, ex.gamma, ex.f.clone())?)),
                None => {
                    let [a, b, c] = self.take(["a", "b", "c"]);
                    Model::Darboux(DarbouxStructure::new_unchecked(a, b, c, env))
                }
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SL2: &str = r#"
[structure]
variant = "paracontact"
mode = "lie_group"
epsilon = 1

[functions]
a1 = "1"
a2 = "1"
a3 = "1"
a4 = "0"
a5 = "0"

[sampling]
points = 1
"#;

    #[test]
    fn sl2_parses() {
        let s = SpecFile::parse(SL2).unwrap();
        assert_eq!(s.variant, Variant::Paracontact);
        assert!(s.lie_group);
        assert_eq!(s.epsilon, Some(Epsilon::Plus));
        assert!(matches!(s.model().unwrap(), Model::Paracontact(_)));
        assert_eq!(s.digest.len(), 64);
    }

    #[test]
    fn missing_function_named() {
        let text = SL2.replace("a4 = \"0\"\n", "");
        match SpecFile::parse(&text) {
            Err(SpecError::Schema { item, .. }) => assert_eq!(item, "a4"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn example_shortcut() {
        let text = r#"
[structure]
variant = "darboux"
[constants]
alpha = 1
beta = 2
gamma = 0
[functions]
f = "sin(x)"
"#;
        let s = SpecFile::parse(text).unwrap();
        let ex = s.example.clone().unwrap();
        assert_eq!((ex.alpha, ex.beta, ex.gamma, ex.c), (1.0, 2.0, 0.0, 1.0));
        match s.model().unwrap() {
            Model::Example(e) => {
                assert_eq!(e.darboux.b, ExprAst::num(1.0));
                assert_eq!(e.darboux.c, ExprAst::num(0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_located() {
        let text = SL2.replace("a3 = \"1\"", "a3 = \"x^y\"");
        assert!(matches!(SpecFile::parse(&text), Err(SpecError::Expr { ref field, .. }) if field == "functions.a3"));
    }

    #[test]
    fn unbound_and_bad_epsilon() {
        let text = SL2.replace("a3 = \"1\"", "a3 = \"kappa\"");
        assert!(matches!(SpecFile::parse(&text), Err(SpecError::Expr { .. })));
        let text = SL2.replace("epsilon = 1", "epsilon = 2");
        assert!(matches!(SpecFile::parse(&text), Err(SpecError::Schema { .. })));
    }

    #[test]
    fn lie_group_rejects_coordinates() {
        let text = SL2.replace("a3 = \"1\"", "a3 = \"z\"");
        let s = SpecFile::parse(&text).unwrap();
        assert!(matches!(s.model(), Err(SpecError::Geometry(GeometryError::NotConstant(_)))));
    }

    #[test]
    fn malformed_toml() {
        assert!(matches!(SpecFile::parse("[structure\nvariant="), Err(SpecError::Toml(_))));
        assert!(matches!(
            SpecFile::parse("[structure]\nvariant = \"natural\"\nfoo = 1\n"),
            Err(SpecError::Toml(_))
        ));
    }
}

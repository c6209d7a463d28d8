//! Scenario files: parsing, referential checks and compilation into jobs.
//!
//! Every problem found while compiling is collected as a [`Diagnostic`]
//! carrying a JSON pointer into the scenario document, so `validate` and
//! `run` share one code path.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use starmod_core::algebra::Algebra;
use starmod_core::automorphism::Automorphism;
use starmod_core::bundle::ClassicalProjection;
use starmod_core::cocycle::CocycleData;
use starmod_core::corpus;
use starmod_core::matrix::{ClassicalMatrix, StarMatrix};
use starmod_core::picard::{CharacteristicClass, CohomologyModel, OutEquivElement};
use starmod_core::scalar::GaussianRational;
use starmod_core::star::{twist_by_automorphism, twist_star, StarProduct};
use starmod_core::wire::{
    element_from_wire, AlgebraDto, ClassDto, CocycleDto, ElementDto, MatrixDto, ModelDto, OutEquivDto, ProjectionDto,
    TransformDto,
};

pub const TASK_KINDS: [&str; 10] = [
    "check-star",
    "deform-projection",
    "bimodule-suite",
    "metric-suite",
    "cocycle",
    "index",
    "index-invariance",
    "morita-check",
    "outequiv",
    "kernel",
];

const OBJECT_TYPES: [&str; 7] = ["projection", "matrix", "cocycle", "model", "class", "outequiv", "transform"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub pointer: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic { pointer: pointer.into(), message: message.into() }
    }
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{at}: {}", self.message)
    }
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", escape(key))),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    out
}

/// Deserializes `value`, reporting failures at `base` extended by the failing path.
pub fn decode<T: DeserializeOwned>(value: &Value, base: &str) -> Result<T, Diagnostic> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = format!("{base}{}", pointer_of(e.path()));
        Diagnostic::new(pointer, e.inner().to_string())
    })
}

/// Parses JSON text, reporting syntax errors with line and column.
pub fn parse_json(text: &str) -> Result<Value, Diagnostic> {
    serde_json::from_str(text).map_err(|e| Diagnostic::new("", format!("invalid JSON: {e}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    algebra: Value,
    truncation: usize,
    seed: u64,
    #[serde(default)]
    star: Option<Value>,
    #[serde(default)]
    objects: Vec<Value>,
    #[serde(default)]
    tasks: Vec<Value>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Product {
    #[default]
    Moyal,
    Corrupted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum AutomorphismDto {
    Lattice([[i64; 2]; 2]),
    /// Shift in units of the period `2π`.
    Translation([GaussianRational; 2]),
}

/// `{"product":"moyal"}` optionally twisted by a transform and/or an automorphism (transform first).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarSpec {
    #[serde(default)]
    pub product: Product,
    #[serde(default)]
    pub transform: Option<Value>,
    #[serde(default)]
    pub automorphism: Option<AutomorphismDto>,
}

#[derive(Clone, Debug)]
pub enum CocycleJob {
    Verify(CocycleData),
    Solve { transition: StarMatrix, classical_inverse: Option<ClassicalMatrix> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutEquivOp {
    NormalForm,
    Compose,
    Inverse,
    Identity,
}

#[derive(Clone, Debug)]
pub enum Job {
    CheckStar { star: Arc<StarProduct>, samples: usize, seed: u64 },
    DeformProjection { projection: ClassicalProjection, emit: bool },
    BimoduleSuite { projection: ClassicalProjection, samples: usize, seed: u64 },
    MetricSuite { projection: ClassicalProjection, samples: usize, seed: u64 },
    Cocycle(CocycleJob),
    Index { projection: ClassicalProjection },
    IndexInvariance { projection: ClassicalProjection, conjugator: StarMatrix },
    Morita { model: CohomologyModel, a: CharacteristicClass, b: CharacteristicClass },
    OutEquiv { model: CohomologyModel, op: OutEquivOp, a: Option<OutEquivElement>, b: Option<OutEquivElement>, order: usize },
    Kernel { model: CohomologyModel, order: usize },
}

#[derive(Clone, Debug)]
pub struct Task {
    pub id: String,
    pub kind: String,
    pub job: Job,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub algebra: Arc<Algebra>,
    pub algebra_descriptor: AlgebraDto,
    pub truncation: usize,
    pub seed: u64,
    pub star: Arc<StarProduct>,
    pub tasks: Vec<Task>,
}

#[derive(Clone, Debug)]
enum Object {
    Projection(ClassicalProjection),
    Matrix(StarMatrix),
    Cocycle(CocycleData),
    Model(CohomologyModel),
    Class(CharacteristicClass),
    OutEquiv(OutEquivElement),
    Transform(Value),
}

impl Object {
    fn type_name(&self) -> &'static str {
        match self {
            Object::Projection(_) => "projection",
            Object::Matrix(_) => "matrix",
            Object::Cocycle(_) => "cocycle",
            Object::Model(_) => "model",
            Object::Class(_) => "class",
            Object::OutEquiv(_) => "outequiv",
            Object::Transform(_) => "transform",
        }
    }
}

struct Context {
    algebra: Arc<Algebra>,
    truncation: usize,
    star: Arc<StarProduct>,
    objects: BTreeMap<String, Object>,
}

fn core_err(pointer: &str) -> impl Fn(starmod_core::Error) -> Diagnostic + '_ {
    move |e| Diagnostic::new(pointer, e.to_string())
}

fn build_star(ctx_alg: &Arc<Algebra>, k: usize, spec: &StarSpec, base: &str, transforms: &BTreeMap<String, Object>) -> Result<Arc<StarProduct>, Diagnostic> {
    let mut star = match spec.product {
        Product::Moyal => StarProduct::moyal(ctx_alg, k),
        Product::Corrupted => StarProduct::corrupted(ctx_alg, k),
    };
    if let Some(t) = &spec.transform {
        let pointer = format!("{base}/transform");
        let value = match t {
            Value::String(id) => match transforms.get(id) {
                Some(Object::Transform(v)) => v.clone(),
                Some(other) => {
                    return Err(Diagnostic::new(pointer, format!("object {id:?} is a {}, expected a transform", other.type_name())))
                }
                None => return Err(Diagnostic::new(pointer, format!("unknown object {id:?}"))),
            },
            v => v.clone(),
        };
        let dto: TransformDto = decode(&value, &pointer)?;
        let transform = dto.to_core(ctx_alg, k).map_err(core_err(&pointer))?;
        star = twist_star(&transform, &star).map_err(core_err(&pointer))?;
    }
    if let Some(a) = &spec.automorphism {
        let pointer = format!("{base}/automorphism");
        let phi = match a {
            AutomorphismDto::Lattice(m) => Automorphism::lattice(*m),
            AutomorphismDto::Translation(s) => {
                if s.iter().any(|x| !x.is_real()) {
                    return Err(Diagnostic::new(pointer, "translation shifts must be real"));
                }
                Automorphism::translation([s[0].re(), s[1].re()])
            }
        }
        .map_err(core_err(&pointer))?;
        star = twist_by_automorphism(&phi, &star).map_err(core_err(&pointer))?;
    }
    Ok(star)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusRef {
    corpus: String,
    #[serde(default)]
    hermitian: Option<bool>,
}

/// A projection written either as `{"corpus": name}` or as an explicit matrix.
pub fn projection_from_value(alg: &Arc<Algebra>, value: &Value, pointer: &str) -> Result<ClassicalProjection, Diagnostic> {
    if value.get("corpus").is_some() {
        let r: CorpusRef = decode(value, pointer)?;
        let p = corpus::by_name(alg, &r.corpus).map_err(core_err(&format!("{pointer}/corpus")))?;
        if let Some(h) = r.hermitian {
            return ClassicalProjection::new(p.matrix().clone(), h).map_err(core_err(pointer));
        }
        return Ok(p);
    }
    let dto: ProjectionDto = decode(value, pointer)?;
    dto.to_core(alg).map_err(core_err(pointer))
}

impl Context {
    fn parse_object(&self, ty: &str, body: &Value, pointer: &str) -> Result<Object, Diagnostic> {
        let alg = &self.algebra;
        Ok(match ty {
            "projection" => Object::Projection(projection_from_value(alg, body, pointer)?),
            "matrix" => {
                let dto: MatrixDto = decode(body, pointer)?;
                Object::Matrix(dto.to_core(&self.star).map_err(core_err(pointer))?)
            }
            "cocycle" => {
                let dto: CocycleDto = decode(body, pointer)?;
                Object::Cocycle(dto.to_core(&self.star).map_err(core_err(pointer))?)
            }
            "model" => {
                let dto: ModelDto = decode(body, pointer)?;
                Object::Model(dto.to_core().map_err(core_err(pointer))?)
            }
            "class" => {
                let dto: ClassDto = decode(body, pointer)?;
                Object::Class(dto.to_core().map_err(core_err(pointer))?)
            }
            "outequiv" => {
                let dto: OutEquivDto = decode(body, pointer)?;
                Object::OutEquiv(dto.to_core().map_err(core_err(pointer))?)
            }
            "transform" => {
                let dto: TransformDto = decode(body, pointer)?;
                dto.to_core(alg, self.truncation).map_err(core_err(pointer))?;
                Object::Transform(body.clone())
            }
            other => return Err(Diagnostic::new(format!("{pointer}/type"), format!("unknown object type {other:?}"))),
        })
    }

    /// Resolves a reference: an object id string, or an inline definition of type `ty`.
    fn resolve(&self, value: &Value, ty: &str, pointer: &str) -> Result<Object, Diagnostic> {
        match value {
            Value::String(id) => match self.objects.get(id) {
                Some(obj) if obj.type_name() == ty => Ok(obj.clone()),
                Some(obj) => Err(Diagnostic::new(pointer, format!("object {id:?} is a {}, expected a {ty}", obj.type_name()))),
                None => Err(Diagnostic::new(pointer, format!("unknown object {id:?}"))),
            },
            Value::Object(_) => self.parse_object(ty, value, pointer),
            _ => Err(Diagnostic::new(pointer, format!("expected an object id or an inline {ty}"))),
        }
    }

    fn projection(&self, v: &Value, p: &str) -> Result<ClassicalProjection, Diagnostic> {
        match self.resolve(v, "projection", p)? {
            Object::Projection(x) => Ok(x),
            _ => unreachable!(),
        }
    }

    fn matrix(&self, v: &Value, p: &str) -> Result<StarMatrix, Diagnostic> {
        match self.resolve(v, "matrix", p)? {
            Object::Matrix(x) => Ok(x),
            _ => unreachable!(),
        }
    }

    fn model(&self, v: &Value, p: &str) -> Result<CohomologyModel, Diagnostic> {
        match self.resolve(v, "model", p)? {
            Object::Model(x) => Ok(x),
            _ => unreachable!(),
        }
    }

    fn class(&self, v: &Value, p: &str) -> Result<CharacteristicClass, Diagnostic> {
        match self.resolve(v, "class", p)? {
            Object::Class(x) => Ok(x),
            _ => unreachable!(),
        }
    }

    fn outequiv(&self, v: &Value, p: &str) -> Result<OutEquivElement, Diagnostic> {
        match self.resolve(v, "outequiv", p)? {
            Object::OutEquiv(x) => Ok(x),
            _ => unreachable!(),
        }
    }
}

fn default_star_samples() -> usize {
    50
}

fn default_suite_samples() -> usize {
    20
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckStarParams {
    #[serde(default)]
    star: Option<StarSpec>,
    #[serde(default = "default_star_samples")]
    samples: usize,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionParams {
    projection: Value,
    #[serde(default)]
    emit: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexParams {
    projection: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteParams {
    projection: Value,
    #[serde(default = "default_suite_samples")]
    samples: usize,
    #[serde(default)]
    seed: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CocycleParams {
    #[serde(default)]
    cocycle: Option<Value>,
    #[serde(default)]
    solve: Option<Value>,
    #[serde(default)]
    classical_inverse: Option<Vec<Vec<ElementDto>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvarianceParams {
    projection: Value,
    conjugator: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MoritaParams {
    model: Value,
    a: Value,
    b: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OutEquivParams {
    model: Value,
    op: OutEquivOp,
    #[serde(default)]
    a: Option<Value>,
    #[serde(default)]
    b: Option<Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelParams {
    model: Value,
    #[serde(rename = "K", default)]
    k: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTask {
    id: String,
    kind: String,
    #[serde(default = "empty_object")]
    params: Value,
}

fn empty_object() -> Value {
    Value::Object(Default::default())
}

impl Context {
    fn compile_task(&self, kind: &str, params: &Value, base: &str, seed: u64) -> Result<Job, Diagnostic> {
        let at = |field: &str| format!("{base}/{field}");
        Ok(match kind {
            "check-star" => {
                let p: CheckStarParams = decode(params, base)?;
                let star = match &p.star {
                    Some(spec) => build_star(&self.algebra, self.truncation, spec, &at("star"), &self.objects)?,
                    None => self.star.clone(),
                };
                if p.samples == 0 {
                    return Err(Diagnostic::new(at("samples"), "samples must be at least 1"));
                }
                Job::CheckStar { star, samples: p.samples, seed: p.seed.unwrap_or(seed) }
            }
            "deform-projection" => {
                let p: ProjectionParams = decode(params, base)?;
                Job::DeformProjection { projection: self.projection(&p.projection, &at("projection"))?, emit: p.emit }
            }
            "bimodule-suite" | "metric-suite" => {
                let p: SuiteParams = decode(params, base)?;
                let projection = self.projection(&p.projection, &at("projection"))?;
                let seed = p.seed.unwrap_or(seed);
                if kind == "bimodule-suite" {
                    Job::BimoduleSuite { projection, samples: p.samples, seed }
                } else {
                    Job::MetricSuite { projection, samples: p.samples, seed }
                }
            }
            "cocycle" => {
                let p: CocycleParams = decode(params, base)?;
                match (&p.cocycle, &p.solve) {
                    (Some(c), None) => {
                        if p.classical_inverse.is_some() {
                            return Err(Diagnostic::new(at("classical_inverse"), "classical_inverse only applies to solve"));
                        }
                        match self.resolve(c, "cocycle", &at("cocycle"))? {
                            Object::Cocycle(data) => Job::Cocycle(CocycleJob::Verify(data)),
                            _ => unreachable!(),
                        }
                    }
                    (None, Some(m)) => {
                        let transition = self.matrix(m, &at("solve"))?;
                        let classical_inverse = match &p.classical_inverse {
                            None => None,
                            Some(rows) => {
                                let pointer = at("classical_inverse");
                                let rows = rows
                                    .iter()
                                    .map(|r| r.iter().map(|e| element_from_wire(&self.algebra, e)).collect::<Result<Vec<_>, _>>())
                                    .collect::<Result<Vec<_>, _>>()
                                    .map_err(core_err(&pointer))?;
                                Some(ClassicalMatrix::from_rows(rows).map_err(core_err(&pointer))?)
                            }
                        };
                        Job::Cocycle(CocycleJob::Solve { transition, classical_inverse })
                    }
                    _ => return Err(Diagnostic::new(base, "exactly one of \"cocycle\" and \"solve\" is required")),
                }
            }
            "index" => {
                let p: IndexParams = decode(params, base)?;
                Job::Index { projection: self.projection(&p.projection, &at("projection"))? }
            }
            "index-invariance" => {
                let p: InvarianceParams = decode(params, base)?;
                Job::IndexInvariance {
                    projection: self.projection(&p.projection, &at("projection"))?,
                    conjugator: self.matrix(&p.conjugator, &at("conjugator"))?,
                }
            }
            "morita-check" => {
                let p: MoritaParams = decode(params, base)?;
                Job::Morita {
                    model: self.model(&p.model, &at("model"))?,
                    a: self.class(&p.a, &at("a"))?,
                    b: self.class(&p.b, &at("b"))?,
                }
            }
            "outequiv" => {
                let p: OutEquivParams = decode(params, base)?;
                let needed = match p.op {
                    OutEquivOp::Identity => 0,
                    OutEquivOp::NormalForm | OutEquivOp::Inverse => 1,
                    OutEquivOp::Compose => 2,
                };
                let given = usize::from(p.a.is_some()) + usize::from(p.b.is_some());
                if given != needed || (needed == 1 && p.a.is_none()) {
                    return Err(Diagnostic::new(base, format!("operation needs {needed} operand(s): a{}", if needed == 2 { ", b" } else { "" })));
                }
                let a = p.a.as_ref().map(|v| self.outequiv(v, &at("a"))).transpose()?;
                let b = p.b.as_ref().map(|v| self.outequiv(v, &at("b"))).transpose()?;
                Job::OutEquiv { model: self.model(&p.model, &at("model"))?, op: p.op, a, b, order: self.truncation }
            }
            "kernel" => {
                let p: KernelParams = decode(params, base)?;
                Job::Kernel { model: self.model(&p.model, &at("model"))?, order: p.k.unwrap_or(self.truncation) }
            }
            other => return Err(Diagnostic::new(format!("{base}/kind"), format!("unknown task kind {other:?}"))),
        })
    }
}

/// Compiles a scenario document, collecting every diagnostic found.
pub fn compile(doc: &Value) -> Result<Scenario, Vec<Diagnostic>> {
    let raw: RawScenario = decode(doc, "").map_err(|d| vec![d])?;
    let algebra_descriptor: AlgebraDto = decode(&raw.algebra, "/algebra").map_err(|d| vec![d])?;
    let algebra = algebra_descriptor.to_core().map_err(|e| vec![Diagnostic::new("/algebra", e.to_string())])?;
    let mut diags = Vec::new();
    let k = raw.truncation;

    let mut ctx = Context { algebra: algebra.clone(), truncation: k, star: StarProduct::moyal(&algebra, k), objects: BTreeMap::new() };

    // transforms first so the scenario star may refer to them
    let mut parsed: Vec<(String, String, Value, String)> = Vec::new();
    for (i, obj) in raw.objects.iter().enumerate() {
        let pointer = format!("/objects/{i}");
        let Some(map) = obj.as_object() else {
            diags.push(Diagnostic::new(pointer, "object definitions must be JSON objects"));
            continue;
        };
        let id = match map.get("id") {
            Some(Value::String(s)) => s.clone(),
            _ => {
                diags.push(Diagnostic::new(format!("{pointer}/id"), "missing string \"id\""));
                continue;
            }
        };
        let ty = match map.get("type") {
            Some(Value::String(s)) if OBJECT_TYPES.contains(&s.as_str()) => s.clone(),
            Some(Value::String(s)) => {
                diags.push(Diagnostic::new(format!("{pointer}/type"), format!("unknown object type {s:?}")));
                continue;
            }
            _ => {
                diags.push(Diagnostic::new(format!("{pointer}/type"), "missing string \"type\""));
                continue;
            }
        };
        let mut body = map.clone();
        body.remove("id");
        body.remove("type");
        if parsed.iter().any(|(other, ..)| *other == id) {
            diags.push(Diagnostic::new(format!("{pointer}/id"), format!("duplicate object id {id:?}")));
            continue;
        }
        parsed.push((id, ty, Value::Object(body), pointer));
    }
    for (id, ty, body, pointer) in parsed.iter().filter(|p| p.1 == "transform") {
        match ctx.parse_object(ty, body, pointer) {
            Ok(obj) => {
                ctx.objects.insert(id.clone(), obj);
            }
            Err(d) => diags.push(d),
        }
    }
    if let Some(spec) = &raw.star {
        match decode::<StarSpec>(spec, "/star").and_then(|s| build_star(&algebra, k, &s, "/star", &ctx.objects)) {
            Ok(star) => ctx.star = star,
            Err(d) => diags.push(d),
        }
    }
    for (id, ty, body, pointer) in parsed.iter().filter(|p| p.1 != "transform") {
        match ctx.parse_object(ty, body, pointer) {
            Ok(obj) => {
                ctx.objects.insert(id.clone(), obj);
            }
            Err(d) => diags.push(d),
        }
    }

    let mut tasks = Vec::new();
    let mut ids: Vec<String> = Vec::new();
    for (i, t) in raw.tasks.iter().enumerate() {
        let pointer = format!("/tasks/{i}");
        let raw_task: RawTask = match decode(t, &pointer) {
            Ok(r) => r,
            Err(d) => {
                diags.push(d);
                continue;
            }
        };
        if ids.contains(&raw_task.id) {
            diags.push(Diagnostic::new(format!("{pointer}/id"), format!("duplicate task id {:?}", raw_task.id)));
        }
        ids.push(raw_task.id.clone());
        if !TASK_KINDS.contains(&raw_task.kind.as_str()) {
            diags.push(Diagnostic::new(format!("{pointer}/kind"), format!("unknown task kind {:?}", raw_task.kind)));
            continue;
        }
        match ctx.compile_task(&raw_task.kind, &raw_task.params, &format!("{pointer}/params"), raw.seed) {
            Ok(job) => tasks.push(Task { id: raw_task.id, kind: raw_task.kind, job }),
            Err(d) => diags.push(d),
        }
    }

    if !diags.is_empty() {
        return Err(diags);
    }
    Ok(Scenario { algebra, algebra_descriptor, truncation: k, seed: raw.seed, star: ctx.star, tasks })
}

/// Schema and referential diagnostics for scenario text, without running anything.
pub fn validate_text(text: &str) -> Vec<Diagnostic> {
    match parse_json(text) {
        Err(d) => vec![d],
        Ok(doc) => compile(&doc).err().unwrap_or_default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base(tasks: Value) -> Value {
        json!({"algebra": {"kind": "torus", "theta": "1"}, "truncation": 2, "seed": 1, "tasks": tasks})
    }

    #[test]
    fn pointers_follow_the_failing_path() {
        let doc = base(json!([{"id": "t", "kind": "check-star", "params": {"samples": "many"}}]));
        let diags = compile(&doc).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].pointer, "/tasks/0/params/samples");
    }

    #[test]
    fn unknown_kind_is_named() {
        let diags = validate_text(&base(json!([{"id": "t", "kind": "frobnicate"}])).to_string());
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("frobnicate"));
        assert_eq!(diags[0].pointer, "/tasks/0/kind");
    }

    #[test]
    fn odd_plane_dimension() {
        let doc = json!({"algebra": {"kind": "plane", "dim": 3}, "truncation": 2, "seed": 1, "tasks": []});
        let diags = compile(&doc).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("dim must be even"));
    }

    #[test]
    fn references_are_checked() {
        let doc = json!({
            "algebra": {"kind": "torus", "theta": "1"}, "truncation": 2, "seed": 1,
            "objects": [{"id": "m", "type": "model", "d1": 2, "d2": 1, "omega": ["1"]}],
            "tasks": [
                {"id": "a", "kind": "index", "params": {"projection": "nope"}},
                {"id": "b", "kind": "index", "params": {"projection": "m"}},
                {"id": "c", "kind": "index", "params": {"projection": {"corpus": "block"}}}
            ]
        });
        let diags = compile(&doc).unwrap_err();
        assert_eq!(diags.len(), 2);
        assert!(diags[0].message.contains("unknown object"));
        assert!(diags[1].message.contains("expected a projection"));
    }

    #[test]
    fn escaped_pointer_tokens() {
        assert_eq!(escape("a/b~c"), "a~1b~0c");
    }
}

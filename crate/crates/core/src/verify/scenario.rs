//! Scenario files: a catalog surface, a deformation, a rotation field, material moduli and
//! sample points.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::catalog::{DeformationSpec, RotationSpec, SurfaceSpec};
use crate::energy::MaterialParams;
use crate::error::{Error, Result};
use crate::field::{Domain, Map3, SurfacePatch};
use crate::strain_nonlinear::RotationField;
use crate::tensor::{Vec2, Vec3};

pub const SCHEMA_VERSION: u32 = 1;

/// Points drawn when a scenario lists none.
pub const DEFAULT_POINT_COUNT: usize = 20;

const SURFACE_KINDS: [&str; 6] = ["plate", "cylinder", "sphere", "polar_plane", "torus", "graph"];
const DEFORMATION_KINDS: [&str; 7] =
    ["identity", "rigid", "scale", "radial_expansion", "isometric_roll", "polynomial", "random"];
const ROTATION_KINDS: [&str; 6] = ["identity", "matched", "constant", "drill", "exp_field", "constrained"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceEntry {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<[[f64; 2]; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    surface: SurfaceEntry,
    deformation: Entry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rotation: Option<Entry>,
    material: MaterialParams,
    #[serde(default)]
    sample_points: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    load: Option<[f64; 3]>,
}

/// Typed scenario description, the exact content of a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub surface: SurfaceSpec,
    pub domain: Option<Domain>,
    pub deformation: DeformationSpec,
    pub rotation: RotationSpec,
    pub material: MaterialParams,
    pub sample_points: Vec<Vec2>,
    /// Constant body force for `minimize`.
    pub load: Option<Vec3>,
}

fn tagged<T: for<'de> Deserialize<'de>>(what: &str, known: &[&str], kind: &str, params: &Option<Value>) -> Result<T> {
    if !known.contains(&kind) {
        return Err(Error::UnknownCatalogId(format!("{what} '{kind}'")));
    }
    let mut obj = Map::new();
    obj.insert("kind".into(), Value::String(kind.into()));
    match params {
        None | Some(Value::Null) => {}
        Some(Value::Object(m)) if m.is_empty() => {}
        Some(p) => {
            obj.insert("params".into(), p.clone());
        }
    }
    serde_json::from_value(Value::Object(obj)).map_err(|e| Error::BadParameters(format!("{what} '{kind}': {e}")))
}

fn untag<T: Serialize>(v: &T) -> Entry {
    let Value::Object(mut o) = serde_json::to_value(v).expect("catalog specs serialize") else {
        unreachable!("catalog specs are tagged objects")
    };
    let kind = o.remove("kind").and_then(|k| k.as_str().map(String::from)).unwrap_or_default();
    Entry { kind, params: o.remove("params") }
}

impl ScenarioSpec {
    pub fn new(surface: SurfaceSpec, deformation: DeformationSpec, material: MaterialParams) -> Self {
        ScenarioSpec {
            surface,
            domain: None,
            deformation,
            rotation: RotationSpec::Matched,
            material,
            sample_points: Vec::new(),
            load: None,
        }
    }

    pub fn with_rotation(mut self, rotation: RotationSpec) -> Self {
        self.rotation = rotation;
        self
    }

    pub fn with_points(mut self, points: Vec<Vec2>) -> Self {
        self.sample_points = points;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("scenario: {e}")))?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        let domain = file.surface.domain.map(|d| Domain::new(d[0][0], d[0][1], d[1][0], d[1][1])).transpose()?;
        Ok(ScenarioSpec {
            surface: tagged("surface", &SURFACE_KINDS, &file.surface.kind, &file.surface.params)?,
            domain,
            deformation: tagged("deformation", &DEFORMATION_KINDS, &file.deformation.kind, &file.deformation.params)?,
            rotation: match &file.rotation {
                Some(r) => tagged("rotation", &ROTATION_KINDS, &r.kind, &r.params)?,
                None => RotationSpec::Matched,
            },
            material: file.material,
            sample_points: file.sample_points.iter().map(|p| Vec2::new(p[0], p[1])).collect(),
            load: file.load.map(Vec3::from),
        })
    }

    pub fn to_json(&self) -> String {
        let s = untag(&self.surface);
        let file = ScenarioFile {
            schema_version: SCHEMA_VERSION,
            surface: SurfaceEntry { kind: s.kind, params: s.params, domain: self.domain.map(|d| d.0) },
            deformation: untag(&self.deformation),
            rotation: Some(untag(&self.rotation)),
            material: self.material,
            sample_points: self.sample_points.iter().map(|p| [p.x, p.y]).collect(),
            load: self.load.map(|l| [l.x, l.y, l.z]),
        };
        serde_json::to_string_pretty(&file).expect("scenario serializes")
    }

    pub fn id(&self) -> String {
        format!("{}/{}/{}", self.surface.id(), self.deformation.id(), rotation_id(&self.rotation))
    }
}

fn rotation_id(r: &RotationSpec) -> &'static str {
    match r {
        RotationSpec::Identity => "identity",
        RotationSpec::Matched => "matched",
        RotationSpec::Constant { .. } => "constant",
        RotationSpec::Drill { .. } => "drill",
        RotationSpec::ExpField { .. } => "exp_field",
        RotationSpec::Constrained => "constrained",
    }
}

/// A scenario with callable fields.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub spec: ScenarioSpec,
    pub id: String,
    pub y0: SurfacePatch,
    pub m: SurfacePatch,
    pub rotation: RotationField,
    pub points: Vec<Vec2>,
}

impl Scenario {
    /// `m − y₀`.
    pub fn displacement(&self) -> Map3 {
        self.m.map.minus(&self.y0.map)
    }
}

pub fn build_scenario(spec: &ScenarioSpec) -> Result<Scenario> {
    spec.material.validate()?;
    let y0 = spec.surface.patch(spec.domain)?;
    let m = y0.with_map(spec.deformation.build(&spec.surface, &y0.map)?);
    let rotation = spec.rotation.build(&spec.deformation, &y0.map, &m.map)?;
    let points = if spec.sample_points.is_empty() {
        crate::catalog::sample_points(&y0.domain, DEFAULT_POINT_COUNT, 0, 0.1)
    } else {
        spec.sample_points.clone()
    };
    for x in &points {
        let margin = y0.margin(x).max(m.margin(x));
        if !y0.domain.contains_with_margin(x, margin) || !x.iter().all(|c| c.is_finite()) {
            return Err(Error::OutOfDomain(x.x, x.y));
        }
    }
    Ok(Scenario { id: spec.id(), spec: spec.clone(), y0, m, rotation, points })
}

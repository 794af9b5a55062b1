//! JSON file formats: measure spaces, projection literals, measure specs,
//! direction registries and vector-measure artifacts.
//!
//! Atom-keyed maps are written in atom order; floats use serde_json's
//! shortest round-trip formatting, so artifacts are byte-stable.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::algebra::{CanonicalProjection, Mat2};
use crate::constructor::{
    AtomSolutionQuadruple, Direction, DirectionRegistry, Sign, VectorMeasure,
};
use crate::error::{Error, Result};
use crate::measure::{FrameFunction, ProjectionMeasure};
use crate::space::{AtomicMeasureSpace, BaseProjection, ScalarField, Space, UnimodularField};
use crate::tolerance;

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))
}

fn from_str<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| parse_err(format!("{what}: {e}")))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexJson {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

/// Accepts a phase within 1e-9 of the unit circle and renormalizes it.
fn parse_phase(c: ComplexJson, context: &str) -> Result<Complex64> {
    let z = Complex64::new(c.re, c.im);
    let norm = z.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > tolerance::PARSED_PHASE {
        return Err(parse_err(format!("{context}: |v| = {norm} is not 1")));
    }
    Ok(z / norm)
}

fn atom_index(space: &Space, id: &str, context: &str) -> Result<usize> {
    space
        .index_of(id)
        .ok_or_else(|| parse_err(format!("{context}: unknown atom `{id}`")))
}

/// Converts an atom-keyed map into a per-atom vector; every atom is required.
fn per_atom<T: Clone>(space: &Space, map: &HashMap<String, T>, context: &str) -> Result<Vec<T>> {
    for id in map.keys() {
        atom_index(space, id, context)?;
    }
    space
        .atoms()
        .iter()
        .map(|a| {
            map.get(&a.id)
                .cloned()
                .ok_or_else(|| parse_err(format!("{context}: missing atom `{}`", a.id)))
        })
        .collect()
}

fn atom_map<T: Serialize>(space: &Space, values: impl IntoIterator<Item = T>) -> Value {
    let map: Map<String, Value> = space
        .atoms()
        .iter()
        .zip(values)
        .map(|(a, v)| (a.id.clone(), serde_json::to_value(v).expect("serializable")))
        .collect();
    Value::Object(map)
}

// ---------------------------------------------------------------------------
// Spaces

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomJson {
    id: String,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceJson {
    atoms: Vec<AtomJson>,
}

fn space_from_json(json: SpaceJson) -> Result<Space> {
    AtomicMeasureSpace::new(json.atoms.into_iter().map(|a| (a.id, a.weight)))
        .map_err(|e| parse_err(format!("space: {e}")))
}

fn space_to_json(space: &Space) -> SpaceJson {
    SpaceJson {
        atoms: space
            .atoms()
            .iter()
            .map(|a| AtomJson {
                id: a.id.clone(),
                weight: a.weight,
            })
            .collect(),
    }
}

pub fn parse_space(text: &str) -> Result<Space> {
    space_from_json(from_str(text, "space")?)
}

pub fn load_space(path: &Path) -> Result<Space> {
    parse_space(&read(path)?)
}

pub fn space_to_string(space: &Space) -> String {
    serde_json::to_string_pretty(&space_to_json(space)).expect("serializable") + "\n"
}

// ---------------------------------------------------------------------------
// Projection literals

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OffJson {
    atom: String,
    x: f64,
    v: ComplexJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionJson {
    #[serde(default)]
    pi1: Vec<String>,
    #[serde(default)]
    pi2: Vec<String>,
    #[serde(default)]
    off: Vec<OffJson>,
}

fn projection_from_json(space: &Space, json: &ProjectionJson) -> Result<CanonicalProjection> {
    let set = |ids: &[String], what: &str| {
        BaseProjection::from_ids(space, ids.iter().map(String::as_str))
            .map_err(|e| parse_err(format!("projection {what}: {e}")))
    };
    let pi1 = set(&json.pi1, "pi1")?;
    let pi2 = set(&json.pi2, "pi2")?;
    let n = space.len();
    let mut supp = vec![false; n];
    let mut x = vec![0.0; n];
    let mut v = vec![Complex64::new(1.0, 0.0); n];
    for entry in &json.off {
        let i = atom_index(space, &entry.atom, "projection off")?;
        if supp[i] {
            return Err(parse_err(format!(
                "projection off: atom `{}` listed twice",
                entry.atom
            )));
        }
        if !(entry.x > 0.0 && entry.x < 1.0) {
            return Err(parse_err(format!(
                "projection off: atom `{}` needs 0 < x < 1, got {}",
                entry.atom, entry.x
            )));
        }
        supp[i] = true;
        x[i] = entry.x;
        v[i] = parse_phase(entry.v, &format!("projection off atom `{}`", entry.atom))?;
    }
    let supp = BaseProjection::from_mask(space, supp)?;
    CanonicalProjection::new(
        pi1,
        pi2,
        supp,
        ScalarField::new(space, x)?,
        UnimodularField::new(space, v)?,
    )
    .map_err(|e| parse_err(format!("projection: {e}")))
}

fn projection_to_json(p: &CanonicalProjection) -> ProjectionJson {
    let space = p.space();
    let ids = |b: &BaseProjection| b.iter().map(|i| space.id(i).to_string()).collect();
    ProjectionJson {
        pi1: ids(p.pi1()),
        pi2: ids(p.pi2()),
        off: p
            .supp()
            .iter()
            .map(|i| OffJson {
                atom: space.id(i).to_string(),
                x: p.x().get(i),
                v: p.v().get(i).into(),
            })
            .collect(),
    }
}

pub fn parse_projection(space: &Space, text: &str) -> Result<CanonicalProjection> {
    projection_from_json(space, &from_str(text, "projection")?)
}

pub fn load_projection(space: &Space, path: &Path) -> Result<CanonicalProjection> {
    parse_projection(space, &read(path)?)
}

pub fn projection_to_string(p: &CanonicalProjection) -> String {
    serde_json::to_string_pretty(&projection_to_json(p)).expect("serializable") + "\n"
}

// ---------------------------------------------------------------------------
// Measures

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateBlockJson {
    atom: String,
    d: [[[f64; 2]; 2]; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TablePointJson {
    n: [f64; 3],
    value: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameParamsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bloch: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    points: Option<Vec<TablePointJson>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntryJson {
    projection: ProjectionJson,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum MeasureJson {
    State {
        blocks: Vec<StateBlockJson>,
    },
    Frame {
        family: String,
        #[serde(default)]
        params: FrameParamsJson,
        constants: HashMap<String, f64>,
    },
    Table {
        entries: Vec<TableEntryJson>,
    },
}

fn measure_from_json(space: &Space, json: MeasureJson) -> Result<ProjectionMeasure> {
    match json {
        MeasureJson::State { blocks } => {
            let mut by_atom: HashMap<String, Mat2> = HashMap::new();
            for b in blocks {
                let c = |e: [f64; 2]| Complex64::new(e[0], e[1]);
                let m = Mat2([[c(b.d[0][0]), c(b.d[0][1])], [c(b.d[1][0]), c(b.d[1][1])]]);
                if by_atom.insert(b.atom.clone(), m).is_some() {
                    return Err(parse_err(format!("state: atom `{}` listed twice", b.atom)));
                }
            }
            let densities = per_atom(space, &by_atom, "state")?;
            ProjectionMeasure::state(space, densities).map_err(|e| parse_err(format!("state: {e}")))
        }
        MeasureJson::Frame {
            family,
            params,
            constants,
        } => {
            let constants = per_atom(space, &constants, "frame constants")?;
            let functions = constants
                .into_iter()
                .map(|c| frame_function(&family, &params, c))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| parse_err(format!("frame: {e}")))?;
            ProjectionMeasure::frame(space, functions).map_err(|e| parse_err(format!("frame: {e}")))
        }
        MeasureJson::Table { entries } => {
            let entries = entries
                .iter()
                .map(|e| Ok((projection_from_json(space, &e.projection)?, e.value)))
                .collect::<Result<Vec<_>>>()?;
            ProjectionMeasure::tabulated(space, entries)
                .map_err(|e| parse_err(format!("table: {e}")))
        }
    }
}

/// Table values are normalized (`f(n) + f(−n) = 1`) and scaled by each atom's constant.
fn frame_function(family: &str, params: &FrameParamsJson, constant: f64) -> Result<FrameFunction> {
    let missing = |field: &str| parse_err(format!("family `{family}` needs params.{field}"));
    match family {
        "abs_nz" => FrameFunction::abs_nz(
            constant,
            params.amplitude.ok_or_else(|| missing("amplitude"))?,
        ),
        "quadratic" => {
            FrameFunction::quadratic(constant, params.bloch.ok_or_else(|| missing("bloch"))?)
        }
        "custom_table" => {
            let points = params.points.as_ref().ok_or_else(|| missing("points"))?;
            FrameFunction::table(
                constant,
                points.iter().map(|p| (p.n, constant * p.value)).collect(),
            )
        }
        other => Err(parse_err(format!("unknown frame family `{other}`"))),
    }
}

pub fn parse_measure(space: &Space, text: &str) -> Result<ProjectionMeasure> {
    measure_from_json(space, from_str(text, "measure")?)
}

pub fn load_measure(space: &Space, path: &Path) -> Result<ProjectionMeasure> {
    parse_measure(space, &read(path)?)
}

/// Serializes a state measure.
pub fn state_measure_to_string(space: &Space, densities: &[Mat2]) -> String {
    let blocks = space
        .atoms()
        .iter()
        .zip(densities)
        .map(|(a, d)| StateBlockJson {
            atom: a.id.clone(),
            d: d.0.map(|row| row.map(|z| [z.re, z.im])),
        })
        .collect();
    serde_json::to_string_pretty(&MeasureJson::State { blocks }).expect("serializable") + "\n"
}

/// Serializes an `abs_nz` frame measure with per-atom constants.
pub fn abs_nz_measure_to_string(space: &Space, amplitude: f64, constants: &[f64]) -> String {
    let json = serde_json::json!({
        "type": "frame",
        "family": "abs_nz",
        "params": {"amplitude": amplitude},
        "constants": atom_map(space, constants.iter().copied()),
    });
    serde_json::to_string_pretty(&json).expect("serializable") + "\n"
}

/// Serializes a tabulated measure from `(projection, value)` entries.
pub fn table_measure_to_string(entries: &[(CanonicalProjection, f64)]) -> String {
    let entries = entries
        .iter()
        .map(|(p, value)| TableEntryJson {
            projection: projection_to_json(p),
            value: *value,
        })
        .collect();
    serde_json::to_string_pretty(&MeasureJson::Table { entries }).expect("serializable") + "\n"
}

// ---------------------------------------------------------------------------
// Registries

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectionJson {
    index: usize,
    x: HashMap<String, f64>,
    v: HashMap<String, ComplexJson>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryJson {
    directions: Vec<DirectionJson>,
}

fn direction_from_json(space: &Space, d: &DirectionJson) -> Result<Direction> {
    let context = format!("direction {}", d.index);
    let x = per_atom(space, &d.x, &context)?;
    let v = per_atom(space, &d.v, &context)?
        .into_iter()
        .map(|c| parse_phase(c, &context))
        .collect::<Result<Vec<_>>>()?;
    Direction::new(ScalarField::new(space, x)?, UnimodularField::new(space, v)?)
        .map_err(|e| parse_err(format!("{context}: {e}")))
}

fn registry_from_json(space: &Space, json: &[DirectionJson]) -> Result<DirectionRegistry> {
    let mut registry = DirectionRegistry::empty(space);
    for (position, d) in json.iter().enumerate() {
        if d.index != position + 1 {
            return Err(parse_err(format!(
                "registry indices must be 1, 2, … in order; found {} at position {}",
                d.index,
                position + 1
            )));
        }
        registry
            .push(direction_from_json(space, d)?)
            .map_err(|e| parse_err(format!("registry: {e}")))?;
    }
    Ok(registry)
}

fn direction_value(d: &Direction) -> Map<String, Value> {
    let space = d.space();
    let mut map = Map::new();
    map.insert("index".into(), d.index().into());
    map.insert("x".into(), atom_map(space, d.x().values().iter().copied()));
    map.insert(
        "v".into(),
        atom_map(space, d.v().values().iter().map(|&z| ComplexJson::from(z))),
    );
    map
}

pub fn parse_registry(space: &Space, text: &str) -> Result<DirectionRegistry> {
    let json: RegistryJson = from_str(text, "registry")?;
    registry_from_json(space, &json.directions)
}

pub fn load_registry(space: &Space, path: &Path) -> Result<DirectionRegistry> {
    parse_registry(space, &read(path)?)
}

pub fn registry_to_string(registry: &DirectionRegistry) -> String {
    let directions: Vec<Value> = registry
        .directions()
        .iter()
        .map(|d| Value::Object(direction_value(d)))
        .collect();
    let json = serde_json::json!({ "directions": directions });
    serde_json::to_string_pretty(&json).expect("serializable") + "\n"
}

// ---------------------------------------------------------------------------
// Artifacts

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BaseJson {
    h0: HashMap<String, f64>,
    k0: HashMap<String, f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArtifactDirectionJson {
    index: usize,
    x: HashMap<String, f64>,
    v: HashMap<String, ComplexJson>,
    quadruples: HashMap<String, [f64; 4]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArtifactJson {
    space: SpaceJson,
    sign: i64,
    base: BaseJson,
    directions: Vec<ArtifactDirectionJson>,
}

/// Serializes a vector measure. Output depends only on the measure's data.
pub fn artifact_to_string(mu: &VectorMeasure) -> String {
    let space = mu.space();
    let mut root = Map::new();
    root.insert(
        "space".into(),
        serde_json::to_value(space_to_json(space)).expect("serializable"),
    );
    root.insert("sign".into(), mu.sign().as_i32().into());
    let mut base = Map::new();
    base.insert(
        "h0".into(),
        atom_map(space, mu.base().h.values().iter().copied()),
    );
    base.insert(
        "k0".into(),
        atom_map(space, mu.base().k.values().iter().copied()),
    );
    root.insert("base".into(), Value::Object(base));
    let directions: Vec<Value> = mu
        .entries()
        .iter()
        .map(|entry| {
            let mut map = direction_value(entry.direction());
            map.insert(
                "quadruples".into(),
                atom_map(space, entry.quadruples().iter().map(|q| q.to_array())),
            );
            Value::Object(map)
        })
        .collect();
    root.insert("directions".into(), Value::Array(directions));
    serde_json::to_string_pretty(&Value::Object(root)).expect("serializable") + "\n"
}

pub fn parse_artifact(text: &str) -> Result<VectorMeasure> {
    let json: ArtifactJson = from_str(text, "artifact")?;
    let space = space_from_json(json.space)?;
    let sign = Sign::from_i64(json.sign).ok_or_else(|| {
        parse_err(format!(
            "artifact: sign must be +1 or -1, got {}",
            json.sign
        ))
    })?;
    let field = |map: &HashMap<String, f64>, what: &str| -> Result<ScalarField> {
        ScalarField::new(&space, per_atom(&space, map, what)?)
    };
    let base = crate::measure::DensityPair {
        h: field(&json.base.h0, "artifact h0")?,
        k: field(&json.base.k0, "artifact k0")?,
    };
    let plain: Vec<DirectionJson> = json
        .directions
        .iter()
        .map(|d| DirectionJson {
            index: d.index,
            x: d.x.clone(),
            v: d.v.clone(),
        })
        .collect();
    let registry = registry_from_json(&space, &plain)?;
    let quadruples = json
        .directions
        .iter()
        .map(|d| {
            Ok(per_atom(
                &space,
                &d.quadruples,
                &format!("artifact direction {}", d.index),
            )?
            .into_iter()
            .map(AtomSolutionQuadruple::from_array)
            .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    VectorMeasure::from_parts(sign, base, &registry, quadruples)
        .map_err(|e| parse_err(format!("artifact: {e}")))
}

pub fn load_artifact(path: &Path) -> Result<VectorMeasure> {
    parse_artifact(&read(path)?)
}

pub fn write_artifact(mu: &VectorMeasure, path: &Path) -> Result<()> {
    fs::write(path, artifact_to_string(mu))?;
    Ok(())
}

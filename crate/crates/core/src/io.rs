//! JSON descriptors for spaces, maps, potentials and systems, plus the
//! versioned report envelope shared with the command line.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::kgraph::{KGraph, KGraphMeasure, Path, RpfIdentityReport};
use crate::ksystem::{BetaSearchOptions, BetaSearchResult, CoordinateRoots, GroupoidElement, JointRpfSolution, KRuelleSystem};
use crate::ruelle::{RpfSolution, Uniqueness};
use crate::nkmod::NkVector;
use crate::scalar::{parse_rational, Rational};
use crate::symspace::{CatalogMap, MapCertificates, CylinderFunction, CylinderMeasure, SpaceKind, SymbolicSpace};

pub const FORMAT: &str = "ruelle-kit/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDescriptor {
    FullShift { n: usize },
    Sft { matrix: Vec<Vec<u8>> },
    Product { factors: Vec<SpaceDescriptor> },
}

impl SpaceDescriptor {
    pub fn build(&self) -> Result<SymbolicSpace> {
        match self {
            SpaceDescriptor::FullShift { n } => SymbolicSpace::full_shift(*n),
            SpaceDescriptor::Sft { matrix } => SymbolicSpace::sft(matrix.clone()),
            SpaceDescriptor::Product { factors } => {
                SymbolicSpace::product(factors.iter().map(SpaceDescriptor::build).collect::<Result<_>>()?)
            }
        }
    }

    pub fn describe(space: &SymbolicSpace) -> Self {
        match space.kind() {
            SpaceKind::FullShift(n) => SpaceDescriptor::FullShift { n: *n },
            SpaceKind::Sft(m) => SpaceDescriptor::Sft { matrix: m.clone() },
            SpaceKind::Product(fs) => SpaceDescriptor::Product {
                factors: fs.iter().map(SpaceDescriptor::describe).collect(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapDescriptor {
    Shift,
    SymbolBijection { perm: Vec<u16> },
    Composition { maps: Vec<MapDescriptor> },
    Factor { index: usize, map: Box<MapDescriptor> },
}

impl MapDescriptor {
    pub fn build(&self) -> CatalogMap {
        match self {
            MapDescriptor::Shift => CatalogMap::Shift,
            MapDescriptor::SymbolBijection { perm } => CatalogMap::SymbolBijection(perm.clone()),
            MapDescriptor::Composition { maps } => CatalogMap::Composition(maps.iter().map(MapDescriptor::build).collect()),
            MapDescriptor::Factor { index, map } => CatalogMap::FactorMap(*index, Box::new(map.build())),
        }
    }

    pub fn describe(map: &CatalogMap) -> Self {
        match map {
            CatalogMap::Shift => MapDescriptor::Shift,
            CatalogMap::SymbolBijection(p) => MapDescriptor::SymbolBijection { perm: p.clone() },
            CatalogMap::Composition(ms) => MapDescriptor::Composition {
                maps: ms.iter().map(MapDescriptor::describe).collect(),
            },
            CatalogMap::FactorMap(j, m) => MapDescriptor::Factor {
                index: *j,
                map: Box::new(MapDescriptor::describe(m)),
            },
        }
    }
}

/// A locally constant function: either a constant or a table of values on
/// every admissible word of the given depth. Values are JSON numbers or
/// strings such as `"-7/10"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionDescriptor {
    Constant { constant: Value },
    Table { depth: usize, values: BTreeMap<String, Value> },
}

fn value_to_rational(v: &Value) -> Result<Rational> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(Error::Schema(format!("expected a number, got {v}"))),
    };
    if let Some(r) = parse_rational(&text) {
        return Ok(r);
    }
    text.parse::<f64>()
        .ok()
        .and_then(Rational::from_float)
        .ok_or_else(|| Error::Schema(format!("cannot read {v} as a number")))
}

fn value_to_f64(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Schema(format!("bad number {n}"))),
        _ => {
            use num_traits::ToPrimitive;
            value_to_rational(v)?
                .to_f64()
                .ok_or_else(|| Error::Schema(format!("{v} does not fit in a float")))
        }
    }
}

impl FunctionDescriptor {
    fn build_with<V: crate::scalar::Scalar>(
        &self,
        space: &SymbolicSpace,
        read: impl Fn(&Value) -> Result<V>,
    ) -> Result<CylinderFunction<V>> {
        match self {
            FunctionDescriptor::Constant { constant } => Ok(CylinderFunction::constant(space, read(constant)?)),
            FunctionDescriptor::Table { depth, values } => {
                let mut table = BTreeMap::new();
                for (k, v) in values {
                    table.insert(space.parse_word(k)?, read(v)?);
                }
                CylinderFunction::new(space.clone(), *depth, table)
            }
        }
    }

    pub fn build_f64(&self, space: &SymbolicSpace) -> Result<CylinderFunction<f64>> {
        self.build_with(space, value_to_f64)
    }

    pub fn build_exact(&self, space: &SymbolicSpace) -> Result<CylinderFunction<Rational>> {
        self.build_with(space, value_to_rational)
    }

    pub fn describe(f: &CylinderFunction<f64>) -> Self {
        FunctionDescriptor::Table {
            depth: f.depth(),
            values: f
                .values()
                .iter()
                .map(|(w, v)| (f.space().format_word(w), float_value(*v)))
                .collect(),
        }
    }
}

/// A bisection term `coef · 1_{Z(Z[x], p, q, Z[y])}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementDescriptor {
    pub coef: f64,
    pub x: String,
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    pub y: String,
}

impl ElementDescriptor {
    pub fn build<P: crate::scalar::Potential>(&self, system: &KRuelleSystem<P>) -> Result<(f64, GroupoidElement)> {
        let space = system.space();
        let g = GroupoidElement::new(
            system,
            space.parse_word(&self.x)?,
            NkVector::new(self.p.clone()),
            NkVector::new(self.q.clone()),
            space.parse_word(&self.y)?,
        )?;
        Ok((self.coef, g))
    }
}

/// `(X, σ, φ)` as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    pub space: SpaceDescriptor,
    pub maps: Vec<MapDescriptor>,
    pub potentials: Vec<FunctionDescriptor>,
    /// Optional bisection terms for `kms-eval`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<ElementDescriptor>,
}

impl SystemDescriptor {
    pub fn from_json(text: &str) -> Result<Self> {
        let d: SystemDescriptor = serde_json::from_str(text)?;
        if let Some(f) = &d.format {
            if f != FORMAT {
                return Err(Error::Schema(format!("unsupported format {f:?}, expected {FORMAT:?}")));
            }
        }
        Ok(d)
    }

    pub fn build_f64(&self) -> Result<KRuelleSystem<f64>> {
        let space = self.space.build()?;
        let potentials = self.potentials.iter().map(|p| p.build_f64(&space)).collect::<Result<_>>()?;
        KRuelleSystem::new(space, self.maps.iter().map(MapDescriptor::build).collect(), potentials)
    }

    pub fn build_exact(&self) -> Result<KRuelleSystem<Rational>> {
        let space = self.space.build()?;
        let potentials = self.potentials.iter().map(|p| p.build_exact(&space)).collect::<Result<_>>()?;
        KRuelleSystem::new(space, self.maps.iter().map(MapDescriptor::build).collect(), potentials)
    }

    pub fn describe(system: &KRuelleSystem<f64>) -> Self {
        SystemDescriptor {
            format: Some(FORMAT.into()),
            space: SpaceDescriptor::describe(system.space()),
            maps: system.maps().iter().map(MapDescriptor::describe).collect(),
            potentials: system.potentials().iter().map(FunctionDescriptor::describe).collect(),
            elements: Vec::new(),
        }
    }
}

/// Cylinder masses keyed by word strings.
pub fn measure_table(mu: &CylinderMeasure) -> BTreeMap<String, f64> {
    mu.masses()
        .iter()
        .map(|(w, m)| (mu.space().format_word(w), *m))
        .collect()
}

/// Reads a table written by [`measure_table`] back into a measure.
pub fn measure_from_table(space: &SymbolicSpace, depth: usize, table: &BTreeMap<String, f64>) -> Result<CylinderMeasure> {
    let mut masses = BTreeMap::new();
    for (k, v) in table {
        masses.insert(space.parse_word(k)?, *v);
    }
    CylinderMeasure::new(space.clone(), depth, masses)
}

pub fn function_table(f: &CylinderFunction<f64>) -> BTreeMap<String, f64> {
    f.values()
        .iter()
        .map(|(w, v)| (f.space().format_word(w), *v))
        .collect()
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

/// Every report is wrapped with the format tag and the command that made it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub format: String,
    pub command: String,
    pub report: T,
}

impl<T> Envelope<T> {
    pub fn new(command: &str, report: T) -> Self {
        Envelope {
            format: FORMAT.into(),
            command: command.into(),
            report,
        }
    }
}

/// Compact JSON with sorted keys and shortest round-trip floats.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    // Going through `Value` sorts object keys.
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)?)
}

pub fn read_report<T: DeserializeOwned>(text: &str) -> Result<Envelope<T>> {
    let env: Envelope<T> = serde_json::from_str(text)?;
    if env.format != FORMAT {
        return Err(Error::Schema(format!("unsupported format {:?}", env.format)));
    }
    Ok(env)
}

/// One `path<TAB>value` line per scalar leaf, in key order.
pub fn to_tsv<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    flatten(&v, String::new(), &mut out);
    Ok(out)
}

fn flatten(v: &Value, prefix: String, out: &mut String) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(x, join(k), out);
            }
        }
        Value::Array(xs) if xs.is_empty() => out.push_str(&format!("{prefix}\t[]\n")),
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(x, join(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}\t{s}\n")),
        other => out.push_str(&format!("{prefix}\t{other}\n")),
    }
}

/// Output of `rpf` for a single triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RpfReport {
    pub index: usize,
    pub depth: usize,
    pub eigenvalue: f64,
    pub log_eigenvalue: f64,
    pub residual_h: f64,
    pub residual_mu: f64,
    pub iterations: usize,
    pub primitivity_exponent: usize,
    pub uniqueness: Uniqueness,
    pub measure: BTreeMap<String, f64>,
    pub eigenfunction: BTreeMap<String, f64>,
}

impl RpfReport {
    pub fn new(index: usize, depth: usize, s: &RpfSolution) -> Self {
        RpfReport {
            index,
            depth,
            eigenvalue: s.eigenvalue,
            log_eigenvalue: s.eigenvalue.ln(),
            residual_h: s.residual_h,
            residual_mu: s.residual_mu,
            iterations: s.iterations,
            primitivity_exponent: s.primitivity_exponent,
            uniqueness: s.uniqueness,
            measure: measure_table(&s.measure),
            eigenfunction: function_table(&s.eigenfunction),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointRpfReport {
    pub depth: usize,
    pub eigenvalues: Vec<f64>,
    pub log_eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub measure: BTreeMap<String, f64>,
}

impl JointRpfReport {
    pub fn new(depth: usize, s: &JointRpfSolution) -> Self {
        JointRpfReport {
            depth,
            eigenvalues: s.eigenvalues.clone(),
            log_eigenvalues: s.log_eigenvalues(),
            residuals: s.residuals.clone(),
            iterations: s.composed.iterations,
            measure: measure_table(&s.measure),
        }
    }
}

/// Exact cocycle-condition and commutation verdicts for a system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleReport {
    pub rank: usize,
    pub cocycle_condition: bool,
    /// First pair `(i, j)` with `φᵢ + φⱼ∘σᵢ ≠ φⱼ + φᵢ∘σⱼ`.
    pub violating_pair: Option<[usize; 2]>,
    pub depth: usize,
    pub operators_commute: bool,
    /// `[i, j, word]` where `LᵢLⱼ` and `LⱼLᵢ` first differ.
    pub commutation_witness: Option<(usize, usize, String)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapReport {
    pub map: MapDescriptor,
    pub consumption: Vec<usize>,
    pub certificates: MapCertificates,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemValidationReport {
    pub valid: bool,
    pub rank: usize,
    pub space: SpaceDescriptor,
    pub maps: Vec<MapReport>,
    pub maps_commute: bool,
    pub cocycle_condition: bool,
    pub violating_pair: Option<[usize; 2]>,
    /// Certificates of `σ₁∘…∘σ_k`, required by the joint solver.
    pub composed_certificates: Option<MapCertificates>,
    pub errors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaSearchReport {
    pub beta_min: f64,
    pub beta_max: f64,
    pub depth: usize,
    pub coordinates: Vec<CoordinateRoots>,
    pub common: Vec<f64>,
}

impl BetaSearchReport {
    pub fn new(opts: &BetaSearchOptions, r: &BetaSearchResult) -> Self {
        BetaSearchReport {
            beta_min: opts.beta_min,
            beta_max: opts.beta_max,
            depth: opts.depth,
            coordinates: r.coordinates.clone(),
            common: r.common.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmsEvalReport {
    /// Always `"quasi_invariant_measure"`: the state is built from `μ`.
    pub state_type: String,
    pub depth: usize,
    pub beta: f64,
    pub eigenvalues: Vec<f64>,
    pub terms: usize,
    pub value: f64,
    /// Quasi-invariance residuals of `μ` for the normalized dynamics at `beta`.
    pub quasi_invariance_residuals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KGraphRpfReport {
    pub eigenvalues: Vec<f64>,
    pub log_eigenvalues: Vec<f64>,
    pub vertex_masses: BTreeMap<String, f64>,
    pub primitivity_witness: NkVector,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub expansive_exact_certificate: bool,
    pub identity: RpfIdentityReport,
    pub cylinder_masses: BTreeMap<String, f64>,
}

impl KGraphRpfReport {
    pub fn new(graph: &KGraph, m: &KGraphMeasure, identity: RpfIdentityReport, paths: &[Path]) -> Self {
        KGraphRpfReport {
            eigenvalues: m.eigenvalues.clone(),
            log_eigenvalues: m.eigenvalues.iter().map(|l| l.ln()).collect(),
            vertex_masses: m
                .vertex_masses
                .iter()
                .enumerate()
                .map(|(v, x)| (graph.vertex_name(v).to_string(), *x))
                .collect(),
            primitivity_witness: m.primitivity_witness.clone(),
            residuals: m.residuals.clone(),
            iterations: m.iterations,
            expansive_exact_certificate: m.expansive_exact_certificate,
            identity,
            cylinder_masses: paths.iter().map(|p| (graph.format_path(p), m.cylinder_mass(p))).collect(),
        }
    }
}

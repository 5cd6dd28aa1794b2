//! JSON file formats for operators, towers, ladders and instances.
//!
//! Integers whose magnitude exceeds `2^53 - 1` are written as decimal strings;
//! readers accept either form. Tables are sparse: κ and twist entries default
//! to `0`, action entries default to the class itself.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::abelian::{AbelianError, FgAbGroup, GroupElement, GroupHom, IntMatrix};
use crate::decide::{ClassAction, ExtensionInstance};
use crate::diffcalc::{DiffError, DiffOperator, DiffTerm};
use crate::tower::{ActionLadder, TowerError, TowerModel};

pub const FORMAT_VERSION: &str = "1";

const SAFE_INTEGER: i64 = (1 << 53) - 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0:?} (expected {FORMAT_VERSION:?})")]
    Version(String),
    #[error("{path}: {msg}")]
    Semantic { path: String, msg: String },
}

impl FormatError {
    fn at(path: impl Into<String>, msg: impl fmt::Display) -> Self {
        FormatError::Semantic { path: path.into(), msg: msg.to_string() }
    }
}

/// Arbitrary-precision integer that serializes as a JSON number when safe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct JsonInt(pub BigInt);

impl From<BigInt> for JsonInt {
    fn from(v: BigInt) -> Self {
        JsonInt(v)
    }
}

impl From<&BigInt> for JsonInt {
    fn from(v: &BigInt) -> Self {
        JsonInt(v.clone())
    }
}

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) if v.abs() <= SAFE_INTEGER => s.serialize_i64(v),
            _ => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = JsonInt;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a decimal string")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<JsonInt, E> {
                Ok(JsonInt(v.into()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<JsonInt, E> {
                Ok(JsonInt(v.into()))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<JsonInt, E> {
                v.parse::<BigInt>().map(JsonInt).map_err(|_| E::custom(format!("not an integer: {v:?}")))
            }
        }
        d.deserialize_any(V)
    }
}

fn ints(v: &[BigInt]) -> Vec<JsonInt> {
    v.iter().map(JsonInt::from).collect()
}

fn bigs(v: &[JsonInt]) -> Vec<BigInt> {
    v.iter().map(|j| j.0.clone()).collect()
}

fn check_version(v: &str) -> Result<(), FormatError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(FormatError::Version(v.to_string()))
    }
}

fn group_from(path: &str, orders: &[JsonInt]) -> Result<FgAbGroup, FormatError> {
    if let Some(i) = orders.iter().position(|q| q.0 == BigInt::from(1)) {
        return Err(FormatError::at(format!("{path}[{i}]"), "trivial summand of order 1"));
    }
    FgAbGroup::new(bigs(orders)).map_err(|e| FormatError::at(path, e))
}

fn element_from(path: &str, group: &FgAbGroup, coords: &[JsonInt]) -> Result<GroupElement, FormatError> {
    group.element(bigs(coords)).map_err(|e| FormatError::at(path, e))
}

fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- operators

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub format_version: String,
    pub p: u64,
    pub m: u32,
    pub l: u64,
    pub theta: JsonInt,
    /// `(coefficient, superscript)` pairs.
    pub terms: Vec<(JsonInt, JsonInt)>,
}

impl OperatorFile {
    pub fn from_operator(op: &DiffOperator) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            p: op.p(),
            m: op.m(),
            l: op.ell(),
            theta: op.theta().into(),
            terms: op
                .terms()
                .iter()
                .map(|t| (JsonInt::from(&t.coefficient), JsonInt::from(&t.superscript)))
                .collect(),
        }
    }

    pub fn to_operator(&self) -> Result<DiffOperator, FormatError> {
        check_version(&self.format_version)?;
        let terms = self
            .terms
            .iter()
            .map(|(c, s)| DiffTerm { coefficient: c.0.clone(), superscript: s.0.clone() })
            .collect();
        DiffOperator::from_parts(self.p, self.m, self.l, self.theta.0.clone(), terms)
            .map_err(|e: DiffError| FormatError::at("operator", e))
    }
}

pub fn parse_operator(text: &str) -> Result<DiffOperator, FormatError> {
    serde_json::from_str::<OperatorFile>(text)?.to_operator()
}

pub fn write_operator(op: &DiffOperator) -> String {
    to_pretty(&OperatorFile::from_operator(op))
}

// ------------------------------------------------------------------- towers

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerFile {
    pub q: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    /// Sparse `(carrier index, value)` entries; absent entries are 0.
    #[serde(default)]
    pub kappa: Vec<(usize, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerFile {
    pub format_version: String,
    pub ground: Vec<JsonInt>,
    pub layers: Vec<LayerFile>,
}

fn sparse<T: Copy + PartialEq + Default>(dense: &[T]) -> Vec<(usize, T)> {
    dense
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != T::default())
        .map(|(i, v)| (i, *v))
        .collect()
}

impl TowerFile {
    pub fn from_tower(t: &TowerModel) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            ground: ints(t.ground().orders()),
            layers: t
                .layers()
                .iter()
                .map(|l| LayerFile { q: l.q(), degree: l.degree, kappa: sparse(l.kappa()) })
                .collect(),
        }
    }

    pub fn to_tower(&self) -> Result<TowerModel, FormatError> {
        check_version(&self.format_version)?;
        let ground = group_from("ground", &self.ground)?;
        let mut size = ground
            .enumerable_size()
            .ok_or_else(|| FormatError::at("ground", "ground group must be finite"))?;
        let mut layers = Vec::with_capacity(self.layers.len());
        for (i, l) in self.layers.iter().enumerate() {
            let mut kappa = vec![0u64; size];
            for &(idx, v) in &l.kappa {
                let slot = kappa
                    .get_mut(idx)
                    .ok_or_else(|| FormatError::at(format!("layers[{i}].kappa"), format!("index {idx} >= carrier size {size}")))?;
                *slot = v;
            }
            layers.push((l.q, kappa, l.degree));
            size = size.saturating_mul(l.q.max(1) as usize);
        }
        TowerModel::new(ground, layers).map_err(|e: TowerError| FormatError::at("layers", e))
    }
}

pub fn parse_tower(text: &str) -> Result<TowerModel, FormatError> {
    serde_json::from_str::<TowerFile>(text)?.to_tower()
}

pub fn write_tower(t: &TowerModel) -> String {
    to_pretty(&TowerFile::from_tower(t))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderLayerExport {
    pub theta_step: JsonInt,
    pub theta: JsonInt,
    pub operator: OperatorFile,
    /// Sparse `(x * |ground| + y, M(x, y))` entries.
    pub twist: Vec<(usize, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LadderExport {
    pub format_version: String,
    pub thetas: Vec<JsonInt>,
    pub common_theta: JsonInt,
    pub layers: Vec<LadderLayerExport>,
}

impl LadderExport {
    pub fn from_ladder(ladder: &ActionLadder) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            thetas: ints(&ladder.thetas()),
            common_theta: crate::tower::common_theta(ladder).into(),
            layers: ladder
                .layers
                .iter()
                .map(|l| LadderLayerExport {
                    theta_step: (&l.theta_step).into(),
                    theta: (&l.theta).into(),
                    operator: OperatorFile::from_operator(&l.op),
                    twist: sparse(&l.twist),
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------- instances

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceGroups {
    pub gx: Vec<JsonInt>,
    pub ga: Vec<JsonInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceHoms {
    /// Row-major, `rank GA` rows of `rank GX` entries.
    pub r_prime: Vec<Vec<JsonInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceScalars {
    pub theta: JsonInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceIdentifiers {
    /// Lift classes over `X` are `0..x`.
    pub x: usize,
    /// Lift classes over `A` are `0..a`.
    pub a: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceTables {
    pub pi_x: Vec<Vec<JsonInt>>,
    pub pi_a: Vec<Vec<JsonInt>>,
    pub r_map: Vec<usize>,
    /// Per generator of GX: sparse `(class, image or null)`; absent means fixed.
    pub act_x: Vec<Vec<(usize, Option<usize>)>>,
    pub act_a: Vec<Vec<(usize, Option<usize>)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDistinguished {
    pub f_prime: Vec<JsonInt>,
    pub f: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format_version: String,
    pub groups: InstanceGroups,
    pub homs: InstanceHoms,
    pub scalars: InstanceScalars,
    pub identifiers: InstanceIdentifiers,
    pub tables: InstanceTables,
    pub distinguished: InstanceDistinguished,
}

fn sparse_action(act: &ClassAction) -> Vec<Vec<(usize, Option<usize>)>> {
    act.by_generator
        .iter()
        .map(|t| {
            t.iter()
                .enumerate()
                .filter(|(g, d)| **d != Some(*g))
                .map(|(g, d)| (g, *d))
                .collect()
        })
        .collect()
}

fn dense_action(path: &str, sparse: &[Vec<(usize, Option<usize>)>], n: usize) -> Result<ClassAction, FormatError> {
    let mut by_generator = Vec::with_capacity(sparse.len());
    for (j, entries) in sparse.iter().enumerate() {
        let mut table: Vec<Option<usize>> = (0..n).map(Some).collect();
        for &(g, d) in entries {
            let slot = table
                .get_mut(g)
                .ok_or_else(|| FormatError::at(format!("{path}[{j}]"), format!("class {g} out of range 0..{n}")))?;
            *slot = d;
        }
        by_generator.push(table);
    }
    Ok(ClassAction { by_generator })
}

impl InstanceFile {
    pub fn from_instance(inst: &ExtensionInstance) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            groups: InstanceGroups { gx: ints(inst.gx.orders()), ga: ints(inst.ga.orders()) },
            homs: InstanceHoms { r_prime: inst.r_prime.matrix().to_rows().iter().map(|r| ints(r)).collect() },
            scalars: InstanceScalars { theta: (&inst.theta).into() },
            identifiers: InstanceIdentifiers { x: inst.pi_x.len(), a: inst.pi_a.len() },
            tables: InstanceTables {
                pi_x: inst.pi_x.iter().map(|e| ints(e.coords())).collect(),
                pi_a: inst.pi_a.iter().map(|e| ints(e.coords())).collect(),
                r_map: inst.r_map.clone(),
                act_x: sparse_action(&inst.act_x),
                act_a: sparse_action(&inst.act_a),
            },
            distinguished: InstanceDistinguished { f_prime: ints(inst.f_prime.coords()), f: inst.f },
        }
    }

    /// Structural conversion; axioms are left to `validate_instance`.
    pub fn to_instance(&self) -> Result<ExtensionInstance, FormatError> {
        check_version(&self.format_version)?;
        let gx = group_from("groups.gx", &self.groups.gx)?;
        let ga = group_from("groups.ga", &self.groups.ga)?;
        let rows: Vec<Vec<BigInt>> = self.homs.r_prime.iter().map(|r| bigs(r)).collect();
        let matrix = IntMatrix::from_rows(rows, gx.rank()).map_err(|e| FormatError::at("homs.r_prime", e))?;
        let r_prime = GroupHom::new(gx.clone(), ga.clone(), matrix)
            .map_err(|e: AbelianError| FormatError::at("homs.r_prime", e))?;
        let ids = &self.identifiers;
        let t = &self.tables;
        if t.pi_x.len() != ids.x {
            return Err(FormatError::at("tables.pi_x", format!("{} entries for {} classes", t.pi_x.len(), ids.x)));
        }
        if t.pi_a.len() != ids.a {
            return Err(FormatError::at("tables.pi_a", format!("{} entries for {} classes", t.pi_a.len(), ids.a)));
        }
        if t.r_map.len() != ids.x {
            return Err(FormatError::at("tables.r_map", format!("{} entries for {} classes", t.r_map.len(), ids.x)));
        }
        let pi_x = t
            .pi_x
            .iter()
            .enumerate()
            .map(|(i, c)| element_from(&format!("tables.pi_x[{i}]"), &gx, c))
            .collect::<Result<Vec<_>, _>>()?;
        let pi_a = t
            .pi_a
            .iter()
            .enumerate()
            .map(|(i, c)| element_from(&format!("tables.pi_a[{i}]"), &ga, c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExtensionInstance {
            f_prime: element_from("distinguished.f_prime", &ga, &self.distinguished.f_prime)?,
            theta: self.scalars.theta.0.clone(),
            act_x: dense_action("tables.act_x", &t.act_x, ids.x)?,
            act_a: dense_action("tables.act_a", &t.act_a, ids.a)?,
            r_map: t.r_map.clone(),
            f: self.distinguished.f,
            gx,
            ga,
            r_prime,
            pi_x,
            pi_a,
        })
    }
}

pub fn parse_instance(text: &str) -> Result<ExtensionInstance, FormatError> {
    serde_json::from_str::<InstanceFile>(text)?.to_instance()
}

pub fn write_instance(inst: &ExtensionInstance) -> String {
    to_pretty(&InstanceFile::from_instance(inst))
}

//! JSON documents describing rings, groups, generalized matrix rings, partial
//! actions, datums, groupoids and groupoid actions.
//!
//! Block indices in keys such as `"1,2"` are 1-based. Element ids are 0-based.
//! An element of a product ring may also be written as the array of its
//! coordinates, and an element of a generalized matrix ring as the row-major
//! array of its blocks. Elements of a module sitting inside a ring (`regular`
//! and `ideal` modules) are written as elements of that ring.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::{json, Value};
use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use crate::bimodule::Bimodule;
use crate::budget::Budget;
use crate::datum::{Datum, GammaAction};
use crate::error::{Error, Result};
use crate::examples::ExampleSpec;
use crate::genmatrix::{build_genmatrix, GenMatrixRing, GenMatrixSpec};
use crate::group::FiniteGroup;
use crate::groupoid::{find_group_type, FiniteGroupoid, GroupTypeData, PartialGroupoidAction};
use crate::partial_action::{PartialGroupAction, PartialMap};
use crate::ring::{zn, DirectProduct, FiniteRing, RingRef, TableRing};
use crate::set::{Elem, ElemSet, NONE};

/// A whole input file. Every section is optional.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    /// Named rings, referenced elsewhere by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rings: BTreeMap<String, RingDesc>,
    /// Named modules, referenced from `genmatrix.modules` by name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genmatrix: Option<GenMatrixDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial_action: Option<ActionDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datum: Option<DatumDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groupoid: Option<GroupoidDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groupoid_action: Option<GroupoidActionDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<ExampleSpec>,
}

impl Document {
    pub fn from_json(s: &str) -> Result<Document> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(path: &Path) -> Result<Document> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    /// Names of the sections present, in schema order.
    pub fn sections(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut add = |present: bool, name: &'static str| {
            if present {
                out.push(name);
            }
        };
        add(!self.rings.is_empty(), "rings");
        add(!self.modules.is_empty(), "modules");
        add(self.group.is_some(), "group");
        add(self.genmatrix.is_some(), "genmatrix");
        add(self.partial_action.is_some(), "partial_action");
        add(self.datum.is_some(), "datum");
        add(self.groupoid.is_some(), "groupoid");
        add(self.groupoid_action.is_some(), "groupoid_action");
        add(self.example.is_some(), "example");
        out
    }
}

/// A ring: a name from `rings`, `"genmatrix"` for the document's generalized
/// matrix ring, or an inline definition.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum RingDesc {
    Named(String),
    Def(RingDef),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum RingDef {
    #[serde(rename = "Zn", alias = "zn")]
    Zn { n: u32 },
    #[serde(rename = "product")]
    Product { factors: Vec<RingDesc> },
    #[serde(rename = "tables")]
    Tables { carrier: usize, add: Vec<Vec<Elem>>, mul: Vec<Vec<Elem>>, one: Elem },
}

impl<'de> Deserialize<'de> for RingDesc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => Ok(RingDesc::Named(s)),
            v => RingDef::deserialize(v).map(RingDesc::Def).map_err(D::Error::custom),
        }
    }
}

/// A bimodule: `"regular"`, a name from `modules`, or an inline definition.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum ModuleDesc {
    Named(String),
    Def(ModuleDef),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModuleDef {
    /// `R` over itself; needs `R_i = R_j`.
    Regular,
    /// A two-sided ideal of `R_i = R_j`, by its elements or by generators.
    Ideal {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        elements: Option<Vec<Value>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<Value>>,
    },
    /// Carrier `0..carrier` with addition and both actions as tables.
    Tables { carrier: usize, add: Vec<Vec<Elem>>, lact: Vec<Vec<Elem>>, ract: Vec<Vec<Elem>> },
}

impl<'de> Deserialize<'de> for ModuleDesc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => Ok(ModuleDesc::Named(s)),
            v => ModuleDef::deserialize(v).map(ModuleDesc::Def).map_err(D::Error::custom),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupDesc {
    Trivial,
    /// Element `i` is `g^i`, named `e`, `g`, `g^2`, ...
    Cyclic { n: usize },
    /// Multiplication table with identity `0`.
    Table {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
    },
}

/// `products` entries are lists of `[a, b, ab]` covering all of `M_ij x M_jk`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenMatrixDesc {
    pub n: usize,
    pub rings: Vec<RingDesc>,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleDesc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub products: BTreeMap<String, Vec<[Value; 3]>>,
}

/// Maps are either a list with one entry per group element, in group order, or
/// an object keyed by element name. Each entry is a list of `[x, y]` pairs; the
/// domain of `alpha_g` is the set of first coordinates and `D_g` is its image.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDesc>,
    pub ring: RingDesc,
    pub maps: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDesc {
    pub maps: Value,
}

/// Component actions on `R_1, ..., R_n` of the document's generalized matrix
/// ring, and `gamma^(ij)` maps keyed by `"i,j"` with `i != j`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumDesc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDesc>,
    pub components: Vec<ComponentDesc>,
    #[serde(default)]
    pub gamma: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupoidDesc {
    /// Morphisms `(x,y)` for all objects `x, y` in `1..=objects`.
    Coarse { objects: usize },
    Group { group: GroupDesc },
    Product { factors: Vec<GroupoidDesc> },
    /// `compose[g][h]` names `gh`, or is null when `t(h) != s(g)`.
    Tables { objects: Vec<String>, morphisms: Vec<MorphismDesc>, compose: Vec<Vec<Option<String>>> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDesc {
    pub name: String,
    pub source: String,
    pub target: String,
}

/// Maps are keyed by morphism like action maps by group element.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidActionDesc {
    pub ring: RingDesc,
    pub maps: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_type: Option<GroupTypeDesc>,
}

/// A base object and one morphism from it to every object, listed in object order.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTypeDesc {
    pub base: String,
    pub h: Vec<String>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

/// Reads and writes elements of one carrier.
#[derive(Clone)]
pub enum Codec {
    Plain(usize),
    Product { ring: Arc<DirectProduct>, factors: Vec<Codec> },
    /// `pos[a]` is the module element at ring element `a`, or `NONE`.
    Inside { ring: Box<Codec>, elems: Vec<Elem>, pos: Vec<Elem> },
    Matrix { ring: Arc<GenMatrixRing>, blocks: Vec<Codec> },
}

impl Codec {
    fn id(v: &Value, order: usize) -> Result<Elem> {
        match v.as_u64() {
            Some(x) if (x as usize) < order => Ok(x as Elem),
            _ => Err(schema(format!("{v} is not an element id below {order}"))),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Codec::Plain(n) => *n,
            Codec::Product { ring, .. } => ring.order(),
            Codec::Inside { elems, .. } => elems.len(),
            Codec::Matrix { ring, .. } => ring.order(),
        }
    }

    pub fn read(&self, v: &Value) -> Result<Elem> {
        match (self, v) {
            (Codec::Product { ring, factors }, Value::Array(xs)) => {
                if xs.len() != factors.len() {
                    return Err(schema(format!("{v} needs {} coordinates", factors.len())));
                }
                let c = xs.iter().zip(factors).map(|(x, f)| f.read(x)).collect::<Result<Vec<_>>>()?;
                Ok(ring.encode(&c))
            }
            (Codec::Matrix { ring, blocks }, Value::Array(xs)) => {
                if xs.len() != blocks.len() {
                    return Err(schema(format!("{v} needs {} blocks", blocks.len())));
                }
                let b = xs.iter().zip(blocks).map(|(x, c)| c.read(x)).collect::<Result<Vec<_>>>()?;
                Ok(ring.encode(&b))
            }
            (Codec::Inside { ring, pos, .. }, _) => {
                let a = ring.read(v)?;
                match pos[a as usize] {
                    NONE => Err(schema(format!("{v} is not in the module"))),
                    m => Ok(m),
                }
            }
            _ => Self::id(v, self.order()),
        }
    }

    pub fn write(&self, x: Elem) -> Value {
        match self {
            Codec::Plain(_) => json!(x),
            Codec::Product { ring, factors } => {
                Value::Array(ring.decode(x).into_iter().zip(factors).map(|(c, f)| f.write(c)).collect())
            }
            Codec::Inside { ring, elems, .. } => ring.write(elems[x as usize]),
            Codec::Matrix { ring, blocks } => {
                Value::Array(ring.decode(x).into_iter().zip(blocks).map(|(c, f)| f.write(c)).collect())
            }
        }
    }

    fn inside(ring: &Codec, elems: Vec<Elem>) -> Codec {
        let mut pos = vec![NONE; ring.order()];
        for (p, &x) in elems.iter().enumerate() {
            pos[x as usize] = p as Elem;
        }
        Codec::Inside { ring: Box::new(ring.clone()), elems, pos }
    }
}

/// A resolved ring with its element codec.
#[derive(Clone)]
pub struct Ring {
    pub ring: RingRef,
    pub codec: Codec,
}

#[derive(Clone)]
pub struct Matrix {
    pub ring: Arc<GenMatrixRing>,
    pub codec: Codec,
    /// Codecs of `R_1, ..., R_n`.
    pub components: Vec<Codec>,
}

/// A document with its named rings resolved. Other sections are built on demand.
pub struct Workspace {
    pub doc: Document,
    pub budget: Budget,
    rings: BTreeMap<String, Ring>,
    matrix: OnceCell<Matrix>,
}

fn parse_key(key: &str, arity: usize, n: usize) -> Result<Vec<usize>> {
    let parts: Vec<usize> = key
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| schema(format!("bad block key {key:?}"))))
        .collect::<Result<_>>()?;
    if parts.len() != arity || parts.iter().any(|&p| p == 0 || p > n) {
        return Err(schema(format!("block key {key:?} needs {arity} indices in 1..={n}")));
    }
    Ok(parts.into_iter().map(|p| p - 1).collect())
}

fn group_of(desc: &GroupDesc) -> Result<FiniteGroup> {
    match desc {
        GroupDesc::Trivial => Ok(FiniteGroup::trivial()),
        GroupDesc::Cyclic { n } if *n > 0 => Ok(FiniteGroup::cyclic(*n)),
        GroupDesc::Cyclic { .. } => Err(schema("cyclic group of order 0")),
        GroupDesc::Table { table, names } => {
            let g = FiniteGroup::from_table(format!("G{}", table.len()), table.clone())?;
            match names {
                Some(ns) => g.with_names(ns.clone()),
                None => Ok(g),
            }
        }
    }
}

pub fn group_desc(g: &FiniteGroup) -> GroupDesc {
    GroupDesc::Table { table: g.table(), names: Some(g.elements().map(|x| g.name(x).to_string()).collect()) }
}

fn groupoid_of(desc: &GroupoidDesc) -> Result<FiniteGroupoid> {
    match desc {
        GroupoidDesc::Coarse { objects } if *objects > 0 => Ok(FiniteGroupoid::coarse(*objects)),
        GroupoidDesc::Coarse { .. } => Err(schema("coarse groupoid needs objects")),
        GroupoidDesc::Group { group } => Ok(FiniteGroupoid::from_group(&group_of(group)?)),
        GroupoidDesc::Product { factors } => {
            let mut it = factors.iter();
            let first = it.next().ok_or_else(|| schema("empty groupoid product"))?;
            it.try_fold(groupoid_of(first)?, |acc, f| Ok(FiniteGroupoid::product(&acc, &groupoid_of(f)?)))
        }
        GroupoidDesc::Tables { objects, morphisms, compose } => {
            let obj = |s: &str| objects.iter().position(|o| o == s).ok_or_else(|| schema(format!("unknown object {s:?}")));
            let mor = |s: &str| morphisms.iter().position(|m| m.name == s).ok_or_else(|| schema(format!("unknown morphism {s:?}")));
            let source = morphisms.iter().map(|m| obj(&m.source)).collect::<Result<Vec<_>>>()?;
            let target = morphisms.iter().map(|m| obj(&m.target)).collect::<Result<Vec<_>>>()?;
            let table = compose
                .iter()
                .map(|row| row.iter().map(|c| c.as_deref().map(mor).transpose()).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            FiniteGroupoid::from_tables(
                "groupoid",
                objects.clone(),
                morphisms.iter().map(|m| m.name.clone()).collect(),
                source,
                target,
                table,
            )
        }
    }
}

/// One map per index, from a list in index order or an object keyed by name.
fn parse_maps(v: &Value, names: &[String], codec: &Codec, what: &str) -> Result<Vec<PartialMap>> {
    let entries: Vec<&Value> = match v {
        Value::Array(xs) if xs.len() == names.len() => xs.iter().collect(),
        Value::Array(xs) => return Err(schema(format!("{what}: {} maps given, need {}", xs.len(), names.len()))),
        Value::Object(m) => {
            if let Some(k) = m.keys().find(|k| !names.contains(k)) {
                return Err(schema(format!("{what}: unknown index {k:?}")));
            }
            names
                .iter()
                .map(|n| m.get(n).ok_or_else(|| schema(format!("{what}: no map for {n:?}"))))
                .collect::<Result<_>>()?
        }
        _ => return Err(schema(format!("{what}: maps must be a list or an object"))),
    };
    entries
        .into_iter()
        .zip(names)
        .map(|(e, name)| {
            let pairs = e.as_array().ok_or_else(|| schema(format!("{what} {name}: expected a list of pairs")))?;
            let pairs = pairs
                .iter()
                .map(|p| match p.as_array().map(Vec::as_slice) {
                    Some([x, y]) => Ok((codec.read(x)?, codec.read(y)?)),
                    _ => Err(schema(format!("{what} {name}: {p} is not a pair"))),
                })
                .collect::<Result<Vec<_>>>()?;
            PartialMap::from_pairs(codec.order(), pairs)
                .map_err(|e| schema(format!("{what} {name}: {e}")))
        })
        .collect()
}

fn images(maps: &[PartialMap], universe: usize) -> Vec<ElemSet> {
    maps.iter().map(|m| m.image(universe)).collect()
}

fn pairs_value(map: &PartialMap, codec: &Codec) -> Value {
    Value::Array(map.pairs().into_iter().map(|(x, y)| json!([codec.write(x), codec.write(y)])).collect())
}

fn resolve(doc: &Document, budget: &Budget, cache: &mut BTreeMap<String, Ring>, desc: &RingDesc, stack: &mut Vec<String>) -> Result<Ring> {
    match desc {
        RingDesc::Named(name) => {
            if let Some(r) = cache.get(name) {
                return Ok(r.clone());
            }
            if stack.contains(name) {
                return Err(schema(format!("ring {name:?} refers to itself")));
            }
            let d = doc.rings.get(name).ok_or_else(|| schema(format!("unknown ring {name:?}")))?;
            stack.push(name.clone());
            let r = resolve(doc, budget, cache, d, stack)?;
            stack.pop();
            cache.insert(name.clone(), r.clone());
            Ok(r)
        }
        RingDesc::Def(RingDef::Zn { n }) => {
            let r = zn(*n)?;
            Ok(Ring { codec: Codec::Plain(r.order()), ring: r })
        }
        RingDesc::Def(RingDef::Product { factors }) => {
            let fs = factors.iter().map(|f| resolve(doc, budget, cache, f, stack)).collect::<Result<Vec<_>>>()?;
            let p = Arc::new(DirectProduct::new(fs.iter().map(|f| f.ring.clone()).collect(), budget)?);
            Ok(Ring { ring: p.ring(), codec: Codec::Product { ring: p, factors: fs.into_iter().map(|f| f.codec).collect() } })
        }
        RingDesc::Def(RingDef::Tables { carrier, add, mul, one }) => {
            budget.check_table("table ring", *carrier as u128)?;
            let square = |t: &Vec<Vec<Elem>>| t.len() == *carrier && t.iter().all(|r| r.len() == *carrier);
            if !square(add) || !square(mul) {
                return Err(Error::TableIncomplete(format!("ring tables must be {carrier} x {carrier}")));
            }
            let r: RingRef = Arc::new(TableRing::from_tables("tables", add, mul, *one)?);
            Ok(Ring { codec: Codec::Plain(*carrier), ring: r })
        }
    }
}

impl Workspace {
    pub fn new(doc: Document, budget: Budget) -> Result<Workspace> {
        let mut rings = BTreeMap::new();
        for name in doc.rings.keys() {
            resolve(&doc, &budget, &mut rings, &RingDesc::Named(name.clone()), &mut Vec::new())?;
        }
        Ok(Workspace { doc, budget, rings, matrix: OnceCell::new() })
    }

    pub fn from_path(path: &Path, budget: Budget) -> Result<Workspace> {
        Self::new(Document::from_path(path)?, budget)
    }

    /// Resolves a ring reference; `"genmatrix"` names the document's matrix ring.
    pub fn ring(&self, desc: &RingDesc) -> Result<Ring> {
        if let RingDesc::Named(n) = desc {
            if n == "genmatrix" {
                let m = self.genmatrix()?;
                return Ok(Ring { ring: m.ring.clone(), codec: m.codec });
            }
            return self.rings.get(n).cloned().ok_or_else(|| schema(format!("unknown ring {n:?}")));
        }
        resolve(&self.doc, &self.budget, &mut self.rings.clone(), desc, &mut Vec::new())
    }

    pub fn group(&self, local: Option<&GroupDesc>) -> Result<Arc<FiniteGroup>> {
        let desc = local.or(self.doc.group.as_ref()).ok_or_else(|| schema("no group given"))?;
        Ok(Arc::new(group_of(desc)?))
    }

    /// Builds and verifies the `genmatrix` section.
    pub fn genmatrix(&self) -> Result<Matrix> {
        if let Some(m) = self.matrix.get() {
            return Ok(m.clone());
        }
        let desc = self.doc.genmatrix.as_ref().ok_or_else(|| schema("no genmatrix section"))?;
        let n = desc.n;
        if desc.rings.len() != n {
            return Err(schema(format!("genmatrix needs {n} rings, got {}", desc.rings.len())));
        }
        let rings = desc.rings.iter().map(|r| self.ring(r)).collect::<Result<Vec<_>>>()?;
        let mut codecs: Vec<Option<Codec>> = vec![None; n * n];
        let mut modules = BTreeMap::new();
        for i in 0..n {
            codecs[i * n + i] = Some(Codec::inside(&rings[i].codec, (0..rings[i].ring.order() as Elem).collect()));
        }
        for (key, m) in &desc.modules {
            let ij = parse_key(key, 2, n)?;
            let (i, j) = (ij[0], ij[1]);
            if i == j {
                return Err(schema(format!("module {key:?} is on the diagonal")));
            }
            let (module, codec) = self.module(m, &rings[i], &rings[j], key)?;
            codecs[i * n + j] = Some(codec);
            modules.insert((i, j), module);
        }
        let codecs: Vec<Codec> = codecs
            .into_iter()
            .enumerate()
            .map(|(b, c)| c.ok_or_else(|| schema(format!("no module for block \"{},{}\"", b / n + 1, b % n + 1))))
            .collect::<Result<_>>()?;
        let mut products = BTreeMap::new();
        for (key, triples) in &desc.products {
            let ijk = parse_key(key, 3, n)?;
            let (i, j, k) = (ijk[0], ijk[1], ijk[2]);
            let (cij, cjk, cik) = (&codecs[i * n + j], &codecs[j * n + k], &codecs[i * n + k]);
            let cols = cjk.order();
            let mut t = vec![NONE; cij.order() * cols];
            for [a, b, c] in triples {
                let (a, b, c) = (cij.read(a)?, cjk.read(b)?, cik.read(c)?);
                let slot = &mut t[a as usize * cols + b as usize];
                if *slot != NONE && *slot != c {
                    return Err(schema(format!("product {key:?} gives two values at ({a}, {b})")));
                }
                *slot = c;
            }
            if t.contains(&NONE) {
                return Err(Error::TableIncomplete(format!("product {key:?} does not cover every pair")));
            }
            products.insert((i, j, k), t);
        }
        let spec = GenMatrixSpec { rings: rings.iter().map(|r| r.ring.clone()).collect(), modules, products };
        let ring = Arc::new(build_genmatrix(spec, &self.budget)?);
        let m = Matrix {
            codec: Codec::Matrix { ring: ring.clone(), blocks: codecs },
            components: rings.into_iter().map(|r| r.codec).collect(),
            ring,
        };
        let _ = self.matrix.set(m.clone());
        Ok(m)
    }

    fn module(&self, desc: &ModuleDesc, ri: &Ring, rj: &Ring, key: &str) -> Result<(Bimodule, Codec)> {
        let def = match desc {
            ModuleDesc::Named(n) if n == "regular" => ModuleDef::Regular,
            ModuleDesc::Named(n) => match self.doc.modules.get(n) {
                Some(ModuleDesc::Def(d)) => d.clone(),
                Some(ModuleDesc::Named(_)) => return Err(schema(format!("module {n:?} must be a definition"))),
                None => return Err(schema(format!("unknown module {n:?}"))),
            },
            ModuleDesc::Def(d) => d.clone(),
        };
        let same = || -> Result<()> {
            if crate::ring::same_ring(&ri.ring, &rj.ring) {
                Ok(())
            } else {
                Err(schema(format!("module {key:?} lies inside a ring, so both rings must agree")))
            }
        };
        match def {
            ModuleDef::Regular => {
                same()?;
                let m = Bimodule::regular(ri.ring.clone());
                Ok((m, Codec::inside(&ri.codec, (0..ri.ring.order() as Elem).collect())))
            }
            ModuleDef::Ideal { elements, generators } => {
                same()?;
                let read = |xs: &[Value]| xs.iter().map(|x| ri.codec.read(x)).collect::<Result<Vec<_>>>();
                let set = match (elements, generators) {
                    (Some(e), None) => ElemSet::from_iter(ri.ring.order(), read(&e)?),
                    (None, Some(g)) => crate::ring::ideal_generated_by(ri.ring.as_ref(), read(&g)?),
                    _ => return Err(schema(format!("ideal {key:?} needs exactly one of elements and generators"))),
                };
                let m = Bimodule::ideal(ri.ring.clone(), &set, format!("M{key}"))?;
                Ok((m, Codec::inside(&ri.codec, set.sorted())))
            }
            ModuleDef::Tables { carrier, add, lact, ract } => {
                self.budget.check_table("table module", carrier as u128)?;
                if add.len() != carrier {
                    return Err(Error::TableIncomplete(format!("module {key:?} addition must have {carrier} rows")));
                }
                let m = Bimodule::from_tables(format!("M{key}"), ri.ring.clone(), rj.ring.clone(), &add, &lact, &ract)?;
                Ok((m, Codec::Plain(carrier)))
            }
        }
    }

    /// The `partial_action` section. Shapes are checked here, axioms are not.
    pub fn partial_action(&self) -> Result<PartialGroupAction> {
        let desc = self.doc.partial_action.as_ref().ok_or_else(|| schema("no partial_action section"))?;
        let group = self.group(desc.group.as_ref())?;
        let ring = self.ring(&desc.ring)?;
        let names: Vec<String> = group.elements().map(|g| group.name(g).to_string()).collect();
        let maps = parse_maps(&desc.maps, &names, &ring.codec, "partial_action")?;
        let domains = images(&maps, ring.ring.order());
        PartialGroupAction::new(group, ring.ring, domains, maps)
    }

    /// The `datum` section over the document's generalized matrix ring.
    pub fn datum(&self) -> Result<Datum> {
        let desc = self.doc.datum.as_ref().ok_or_else(|| schema("no datum section"))?;
        let m = self.genmatrix()?;
        let n = m.ring.size();
        let group = self.group(desc.group.as_ref())?;
        let names: Vec<String> = group.elements().map(|g| group.name(g).to_string()).collect();
        if desc.components.len() != n {
            return Err(schema(format!("datum needs {n} components, got {}", desc.components.len())));
        }
        let mut actions = Vec::with_capacity(n);
        for (i, c) in desc.components.iter().enumerate() {
            let ring = m.ring.ring(i).clone();
            let maps = parse_maps(&c.maps, &names, &m.components[i], &format!("component {}", i + 1))?;
            let domains = images(&maps, ring.order());
            actions.push(PartialGroupAction::new(group.clone(), ring, domains, maps)?);
        }
        let Codec::Matrix { blocks, .. } = &m.codec else { unreachable!("matrix codec") };
        let mut off = BTreeMap::new();
        for (key, v) in &desc.gamma {
            let ij = parse_key(key, 2, n)?;
            if ij[0] == ij[1] {
                return Err(schema(format!("gamma {key:?} is on the diagonal; diagonal maps come from the components")));
            }
            off.insert((ij[0], ij[1]), parse_maps(v, &names, &blocks[ij[0] * n + ij[1]], &format!("gamma {key}"))?);
        }
        Datum::with_offdiagonal(m.ring.clone(), group, actions, off)
    }

    pub fn groupoid(&self) -> Result<Arc<FiniteGroupoid>> {
        let desc = self.doc.groupoid.as_ref().ok_or_else(|| schema("no groupoid section"))?;
        Ok(Arc::new(groupoid_of(desc)?))
    }

    /// The `groupoid_action` section with its group-type data, given or found.
    pub fn groupoid_action(&self) -> Result<(PartialGroupoidAction, Option<GroupTypeData>)> {
        let desc = self.doc.groupoid_action.as_ref().ok_or_else(|| schema("no groupoid_action section"))?;
        let gd = self.groupoid()?;
        let ring = self.ring(&desc.ring)?;
        let names: Vec<String> = (0..gd.morphism_count()).map(|u| gd.name(u).to_string()).collect();
        let maps = parse_maps(&desc.maps, &names, &ring.codec, "groupoid_action")?;
        let domains = images(&maps, ring.ring.order());
        let a = PartialGroupoidAction::new(gd.clone(), ring.ring, domains, maps)?;
        let data = match &desc.group_type {
            Some(t) => {
                let base = (0..gd.object_count())
                    .find(|&x| gd.object_name(x) == t.base)
                    .ok_or_else(|| schema(format!("unknown object {:?}", t.base)))?;
                let h = t
                    .h
                    .iter()
                    .map(|s| names.iter().position(|n| n == s).ok_or_else(|| schema(format!("unknown morphism {s:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Some(GroupTypeData { base, h })
            }
            None => find_group_type(&a),
        };
        Ok((a, data))
    }
}

/// A ring as explicit tables.
pub fn ring_tables(r: &dyn FiniteRing, budget: &Budget) -> Result<RingDef> {
    let n = r.order();
    budget.check_table(&format!("export of {}", r.label()), n as u128)?;
    let table = |f: &dyn Fn(Elem, Elem) -> Elem| -> Vec<Vec<Elem>> {
        (0..n as Elem).map(|a| (0..n as Elem).map(|b| f(a, b)).collect()).collect()
    };
    Ok(RingDef::Tables { carrier: n, add: table(&|a, b| r.add(a, b)), mul: table(&|a, b| r.mul(a, b)), one: r.one() })
}

/// A generalized matrix ring with every ring and module as tables and every
/// product not determined by the module actions listed. Dense element ids are
/// preserved, and elements are written as arrays of block ids.
pub fn genmatrix_desc(r: &GenMatrixRing, budget: &Budget) -> Result<GenMatrixDesc> {
    let n = r.size();
    let rings = r.rings().iter().map(|k| ring_tables(k.as_ref(), budget).map(RingDesc::Def)).collect::<Result<_>>()?;
    let mut modules = BTreeMap::new();
    let mut products = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let m = r.module(i, j);
            budget.check_table(&format!("export of {}", m.label()), m.order() as u128)?;
            let def = ModuleDef::Tables { carrier: m.order(), add: m.add_table(), lact: m.lact_table(), ract: m.ract_table() };
            modules.insert(format!("{},{}", i + 1, j + 1), ModuleDesc::Def(def));
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k {
                    continue;
                }
                let (a, b) = (r.module(i, j).order() as Elem, r.module(j, k).order() as Elem);
                let t = (0..a)
                    .flat_map(|x| (0..b).map(move |y| (x, y)))
                    .map(|(x, y)| [json!(x), json!(y), json!(r.block_product(i, j, k, x, y))])
                    .collect();
                products.insert(format!("{},{},{}", i + 1, j + 1, k + 1), t);
            }
        }
    }
    Ok(GenMatrixDesc { n, rings, modules, products })
}

/// Elements as arrays of block ids.
pub fn block_codec(r: &Arc<GenMatrixRing>) -> Codec {
    let n = r.size();
    Codec::Matrix { ring: r.clone(), blocks: (0..n * n).map(|b| Codec::Plain(r.module(b / n, b % n).order())).collect() }
}

/// A document holding `gamma` as a partial action on an exported copy of the
/// datum's matrix ring. Loading it and checking `partial_action` verifies the
/// action independently of the datum.
pub fn gamma_document(d: &Datum, gamma: &GammaAction, budget: &Budget) -> Result<Document> {
    let codec = block_codec(&d.parent);
    let maps = Value::Array(gamma.maps.iter().map(|m| pairs_value(m, &codec)).collect());
    Ok(Document {
        group: Some(group_desc(&gamma.group)),
        genmatrix: Some(genmatrix_desc(&d.parent, budget)?),
        partial_action: Some(ActionDesc { group: None, ring: RingDesc::Named("genmatrix".into()), maps }),
        ..Default::default()
    })
}

/// The datum itself in document form, over an exported copy of its matrix ring.
pub fn datum_document(d: &Datum, budget: &Budget) -> Result<Document> {
    let n = d.size();
    let r = &d.parent;
    let plain = |b: usize| Codec::Plain(r.module(b / n, b % n).order());
    let components = d
        .actions
        .iter()
        .map(|a| ComponentDesc { maps: Value::Array(a.maps.iter().map(|m| pairs_value(m, &Codec::Plain(a.ring.order()))).collect()) })
        .collect();
    let mut gamma = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let c = plain(i * n + j);
                let maps = d.group.elements().map(|g| pairs_value(d.map(g, i, j), &c)).collect();
                gamma.insert(format!("{},{}", i + 1, j + 1), Value::Array(maps));
            }
        }
    }
    Ok(Document {
        group: Some(group_desc(&d.group)),
        genmatrix: Some(genmatrix_desc(r, budget)?),
        datum: Some(DatumDesc { group: None, components, gamma }),
        ..Default::default()
    })
}

/// Writes a map's pairs, for reports and exports.
pub fn map_pairs(map: &PartialMap, codec: &Codec) -> Value {
    pairs_value(map, codec)
}

/// Element ids as JSON, for witnesses.
pub fn elements(xs: impl IntoIterator<Item = Elem>) -> Value {
    Value::Array(xs.into_iter().map(|x| json!(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::{construct_gamma, verify_datum};
    use crate::partial_action::verify_partial_action;

    const SWAP: &str = r#"{
        "rings": {"B": {"kind": "Zn", "n": 2}, "P": {"kind": "product", "factors": ["B", "B"]}},
        "group": {"kind": "cyclic", "n": 2},
        "partial_action": {
            "ring": "P",
            "maps": {"e": [[[0,0],[0,0]], [[0,1],[0,1]], [[1,0],[1,0]], [[1,1],[1,1]]],
                     "g": [[[0,0],[0,0]], [[0,1],[1,0]], [[1,0],[0,1]], [[1,1],[1,1]]]}
        }
    }"#;

    #[test]
    fn coordinates_and_ids_agree() {
        let ws = Workspace::new(Document::from_json(SWAP).unwrap(), Budget::default()).unwrap();
        let a = ws.partial_action().unwrap();
        assert!(verify_partial_action(&a, &Budget::default()).is_ok());
        assert_eq!(a.apply(1, 1), Some(2));
        let p = &ws.rings["P"];
        assert_eq!(p.codec.read(&json!([1, 0])).unwrap(), 2);
        assert_eq!(p.codec.read(&json!(3)).unwrap(), 3);
        assert_eq!(p.codec.write(2), json!([1, 0]));
        assert!(p.codec.read(&json!(4)).is_err());
    }

    #[test]
    fn unknown_fields_and_cycles_are_rejected() {
        assert!(Document::from_json(r#"{"ringz": {}}"#).is_err());
        let cyc = r#"{"rings": {"A": {"kind": "product", "factors": ["A"]}}}"#;
        assert!(matches!(Workspace::new(Document::from_json(cyc).unwrap(), Budget::default()), Err(Error::Schema(_))));
    }

    #[test]
    fn non_associative_tables_are_rejected() {
        let bad = r#"{"rings": {"T": {"kind": "tables", "carrier": 2,
            "add": [[0,1],[1,0]], "mul": [[0,0],[0,1]], "one": 0}}}"#;
        assert!(Workspace::new(Document::from_json(bad).unwrap(), Budget::default()).is_err());
    }

    #[test]
    fn datum_round_trips_through_export() {
        let b = Budget::default();
        let bun = crate::examples::sec62_standard(&b).unwrap();
        let doc = datum_document(bun.datum(), &b).unwrap();
        let back = Workspace::new(Document::from_json(&doc.to_json()).unwrap(), b).unwrap();
        let d = back.datum().unwrap();
        assert!(verify_datum(&d, &b).is_ok());
        let g = construct_gamma(&d, &b).unwrap();
        assert_eq!(g.maps, bun.gamma().maps);
        let gdoc = gamma_document(&d, &g, &b).unwrap();
        let ws = Workspace::new(Document::from_json(&gdoc.to_json()).unwrap(), b).unwrap();
        let a = ws.partial_action().unwrap();
        assert_eq!(a.maps, g.maps);
        assert!(verify_partial_action(&a, &b).is_ok());
    }
}

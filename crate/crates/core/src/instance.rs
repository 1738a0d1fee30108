//! Problem instances: a directed multigraph with arc capacities (and
//! optional arc costs) plus commodity triples (source, sink, demand).
//!
//! Identifiers are dense 0-based indices internally; external string names
//! are mapped at parse time and kept for diagnostics and serialization.
//! An `Instance` is immutable after validation and safe to share across
//! threads.

use crate::rational::{
    format_rational, parse_rational, rational_from_f64, rational_to_f64, NumberError,
};
use num_rational::BigRational;
use num_traits::Signed;
use serde::Deserialize;
use std::collections::HashMap;
use thiserror::Error;

pub type NodeId = usize;
pub type ArcId = usize;
pub type CommodityId = usize;

pub const FORMAT_TAG: &str = "eqflow-v1";

#[derive(Debug, Clone)]
pub struct Arc {
    pub name: String,
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: BigRational,
    pub cost: BigRational,
}

#[derive(Debug, Clone)]
pub struct Commodity {
    pub name: String,
    pub source: NodeId,
    pub sink: NodeId,
    pub demand: BigRational,
}

#[derive(Debug, Clone)]
pub struct Instance {
    nodes: Vec<String>,
    arcs: Vec<Arc>,
    commodities: Vec<Commodity>,
    capacity_f64: Vec<f64>,
    cost_f64: Vec<f64>,
    demand_f64: Vec<f64>,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
    arc_ids: HashMap<String, ArcId>,
    commodity_ids: HashMap<String, CommodityId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("arc {arc:?} is a self-loop")]
    SelfLoop { arc: String },
    #[error("commodity {commodity:?} has source equal to sink")]
    SourceEqualsSink { commodity: String },
    #[error("commodity {commodity:?} has nonpositive demand")]
    NonpositiveDemand { commodity: String },
    #[error("arc {arc:?} has negative capacity")]
    NegativeCapacity { arc: String },
    #[error("arc {arc:?} has negative cost")]
    NegativeCost { arc: String },
    #[error("commodity {commodity:?}: sink is not reachable from source")]
    UnreachableSink { commodity: String },
    #[error("duplicate node name {node:?}")]
    DuplicateNode { node: String },
    #[error("duplicate arc id {arc:?}")]
    DuplicateArc { arc: String },
    #[error("duplicate commodity id {commodity:?}")]
    DuplicateCommodity { commodity: String },
    #[error("{entity} references unknown node {node:?}")]
    UnknownNode { entity: String, node: String },
    #[error("{entity}: value does not fit in an f64")]
    NotRepresentable { entity: String },
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid instance JSON: {0}")]
    Json(String),
    #[error("unsupported format tag {0:?}, expected {FORMAT_TAG:?}")]
    Format(String),
    #[error("{entity}: {source}")]
    Number { entity: String, source: NumberError },
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

impl Instance {
    /// Validates and builds an instance from index-based records.
    pub fn new(
        nodes: Vec<String>,
        arcs: Vec<Arc>,
        commodities: Vec<Commodity>,
    ) -> Result<Self, ValidationError> {
        let n = nodes.len();
        let mut seen = HashMap::new();
        for (i, name) in nodes.iter().enumerate() {
            if seen.insert(name.clone(), i).is_some() {
                return Err(ValidationError::DuplicateNode { node: name.clone() });
            }
        }

        let mut arc_ids = HashMap::new();
        let mut capacity_f64 = Vec::with_capacity(arcs.len());
        let mut cost_f64 = Vec::with_capacity(arcs.len());
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        for (a, arc) in arcs.iter().enumerate() {
            if arc_ids.insert(arc.name.clone(), a).is_some() {
                return Err(ValidationError::DuplicateArc { arc: arc.name.clone() });
            }
            assert!(arc.tail < n && arc.head < n, "arc endpoint out of range");
            if arc.tail == arc.head {
                return Err(ValidationError::SelfLoop { arc: arc.name.clone() });
            }
            if arc.capacity.is_negative() {
                return Err(ValidationError::NegativeCapacity { arc: arc.name.clone() });
            }
            if arc.cost.is_negative() {
                return Err(ValidationError::NegativeCost { arc: arc.name.clone() });
            }
            let cap = rational_to_f64(&arc.capacity).ok_or_else(|| {
                ValidationError::NotRepresentable { entity: format!("arc {:?} capacity", arc.name) }
            })?;
            let cost = rational_to_f64(&arc.cost).ok_or_else(|| {
                ValidationError::NotRepresentable { entity: format!("arc {:?} cost", arc.name) }
            })?;
            capacity_f64.push(cap);
            cost_f64.push(cost);
            out_arcs[arc.tail].push(a);
            in_arcs[arc.head].push(a);
        }

        let mut commodity_ids = HashMap::new();
        let mut demand_f64 = Vec::with_capacity(commodities.len());
        for (k, c) in commodities.iter().enumerate() {
            if commodity_ids.insert(c.name.clone(), k).is_some() {
                return Err(ValidationError::DuplicateCommodity { commodity: c.name.clone() });
            }
            assert!(c.source < n && c.sink < n, "commodity endpoint out of range");
            if c.source == c.sink {
                return Err(ValidationError::SourceEqualsSink { commodity: c.name.clone() });
            }
            if !c.demand.is_positive() {
                return Err(ValidationError::NonpositiveDemand { commodity: c.name.clone() });
            }
            let d = rational_to_f64(&c.demand).ok_or_else(|| {
                ValidationError::NotRepresentable { entity: format!("commodity {:?} demand", c.name) }
            })?;
            demand_f64.push(d);
        }

        let instance = Instance {
            nodes,
            arcs,
            commodities,
            capacity_f64,
            cost_f64,
            demand_f64,
            out_arcs,
            in_arcs,
            arc_ids,
            commodity_ids,
        };
        for c in &instance.commodities {
            if !instance.reaches(c.source, c.sink) {
                return Err(ValidationError::UnreachableSink { commodity: c.name.clone() });
            }
        }
        Ok(instance)
    }

    /// Name-based convenience constructor: arcs are
    /// `(id, tail, head, capacity, cost)` and commodities
    /// `(id, source, sink, demand)`. The f64 values are taken exactly.
    pub fn from_parts(
        nodes: &[&str],
        arcs: &[(&str, &str, &str, f64, f64)],
        commodities: &[(&str, &str, &str, f64)],
    ) -> Result<Self, ValidationError> {
        let node_names: Vec<String> = nodes.iter().map(|s| s.to_string()).collect();
        let index: HashMap<&str, NodeId> =
            nodes.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let lookup = |entity: &str, name: &str| {
            index.get(name).copied().ok_or_else(|| ValidationError::UnknownNode {
                entity: entity.to_string(),
                node: name.to_string(),
            })
        };
        let to_rational = |entity: &str, x: f64| {
            rational_from_f64(x)
                .map_err(|_| ValidationError::NotRepresentable { entity: entity.to_string() })
        };
        let mut arc_records = Vec::with_capacity(arcs.len());
        for &(id, tail, head, capacity, cost) in arcs {
            arc_records.push(Arc {
                name: id.to_string(),
                tail: lookup(&format!("arc {id:?}"), tail)?,
                head: lookup(&format!("arc {id:?}"), head)?,
                capacity: to_rational(&format!("arc {id:?} capacity"), capacity)?,
                cost: to_rational(&format!("arc {id:?} cost"), cost)?,
            });
        }
        let mut commodity_records = Vec::with_capacity(commodities.len());
        for &(id, source, sink, demand) in commodities {
            commodity_records.push(Commodity {
                name: id.to_string(),
                source: lookup(&format!("commodity {id:?}"), source)?,
                sink: lookup(&format!("commodity {id:?}"), sink)?,
                demand: to_rational(&format!("commodity {id:?} demand"), demand)?,
            });
        }
        Instance::new(node_names, arc_records, commodity_records)
    }

    pub fn from_json_str(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| InstanceError::Json(e.to_string()))?;
        file.build()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn num_commodities(&self) -> usize {
        self.commodities.len()
    }

    pub fn node_name(&self, i: NodeId) -> &str {
        &self.nodes[i]
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: ArcId) -> &Arc {
        &self.arcs[a]
    }

    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn commodity(&self, k: CommodityId) -> &Commodity {
        &self.commodities[k]
    }

    pub fn capacity_f64(&self, a: ArcId) -> f64 {
        self.capacity_f64[a]
    }

    pub fn capacities_f64(&self) -> &[f64] {
        &self.capacity_f64
    }

    pub fn cost_f64(&self, a: ArcId) -> f64 {
        self.cost_f64[a]
    }

    pub fn demand_f64(&self, k: CommodityId) -> f64 {
        self.demand_f64[k]
    }

    /// Outgoing arc ids of a node, in ascending arc id order.
    pub fn out_arcs(&self, i: NodeId) -> &[ArcId] {
        &self.out_arcs[i]
    }

    pub fn in_arcs(&self, i: NodeId) -> &[ArcId] {
        &self.in_arcs[i]
    }

    pub fn arc_id(&self, name: &str) -> Option<ArcId> {
        self.arc_ids.get(name).copied()
    }

    pub fn commodity_id(&self, name: &str) -> Option<CommodityId> {
        self.commodity_ids.get(name).copied()
    }

    fn reaches(&self, from: NodeId, to: NodeId) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            for &a in &self.out_arcs[v] {
                let h = self.arcs[a].head;
                if !seen[h] {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        false
    }

    /// JSON value in the instance file schema; rationals with denominator
    /// one are emitted as numbers when they fit, exact strings otherwise.
    pub fn to_json_value(&self) -> serde_json::Value {
        let quantity = |r: &BigRational| -> serde_json::Value {
            if r.is_integer() {
                if let Ok(i) = i64::try_from(r.numer().clone()) {
                    return serde_json::json!(i);
                }
            }
            serde_json::json!(format_rational(r))
        };
        serde_json::json!({
            "format": FORMAT_TAG,
            "nodes": self.nodes,
            "arcs": self.arcs.iter().map(|a| serde_json::json!({
                "id": a.name,
                "tail": self.nodes[a.tail],
                "head": self.nodes[a.head],
                "capacity": quantity(&a.capacity),
                "cost": quantity(&a.cost),
            })).collect::<Vec<_>>(),
            "commodities": self.commodities.iter().map(|c| serde_json::json!({
                "id": c.name,
                "source": self.nodes[c.source],
                "sink": self.nodes[c.sink],
                "demand": quantity(&c.demand),
            })).collect::<Vec<_>>(),
        })
    }
}

/// A JSON number or an exact string literal ("p/q" or decimal).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum NumberLit {
    Num(serde_json::Number),
    Str(String),
}

impl NumberLit {
    pub fn to_rational(&self, entity: &str) -> Result<BigRational, InstanceError> {
        let wrap = |source| InstanceError::Number { entity: entity.to_string(), source };
        match self {
            NumberLit::Num(n) => {
                let x = n.as_f64().ok_or_else(|| wrap(NumberError::NotFinite))?;
                rational_from_f64(x).map_err(wrap)
            }
            NumberLit::Str(s) => parse_rational(s).map_err(wrap),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    #[serde(default)]
    format: Option<String>,
    nodes: Vec<String>,
    arcs: Vec<ArcFile>,
    commodities: Vec<CommodityFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcFile {
    id: String,
    tail: String,
    head: String,
    capacity: NumberLit,
    #[serde(default)]
    cost: Option<NumberLit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CommodityFile {
    id: String,
    source: String,
    sink: String,
    demand: NumberLit,
}

impl InstanceFile {
    fn build(self) -> Result<Instance, InstanceError> {
        if let Some(tag) = &self.format {
            if tag != FORMAT_TAG {
                return Err(InstanceError::Format(tag.clone()));
            }
        }
        let index: HashMap<&str, NodeId> =
            self.nodes.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let lookup = |entity: String, name: &str| {
            index.get(name).copied().ok_or_else(|| {
                InstanceError::Validation(ValidationError::UnknownNode {
                    entity,
                    node: name.to_string(),
                })
            })
        };
        let mut arcs = Vec::with_capacity(self.arcs.len());
        for a in &self.arcs {
            let cost = match &a.cost {
                Some(lit) => lit.to_rational(&format!("arc {:?} cost", a.id))?,
                None => BigRational::from_integer(0.into()),
            };
            arcs.push(Arc {
                name: a.id.clone(),
                tail: lookup(format!("arc {:?}", a.id), &a.tail)?,
                head: lookup(format!("arc {:?}", a.id), &a.head)?,
                capacity: a.capacity.to_rational(&format!("arc {:?} capacity", a.id))?,
                cost,
            });
        }
        let mut commodities = Vec::with_capacity(self.commodities.len());
        for c in &self.commodities {
            commodities.push(Commodity {
                name: c.id.clone(),
                source: lookup(format!("commodity {:?}", c.id), &c.source)?,
                sink: lookup(format!("commodity {:?}", c.id), &c.sink)?,
                demand: c.demand.to_rational(&format!("commodity {:?} demand", c.id))?,
            });
        }
        Ok(Instance::new(self.nodes, arcs, commodities)?)
    }
}

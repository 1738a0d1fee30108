//! Pseudo-flows and flow arithmetic: aggregation, conservation checking,
//! and path decomposition.
//!
//! A pseudo-flow carries per-commodity nonnegative arc flows that satisfy
//! conservation at every node but not necessarily the capacities. Flow
//! values live in f64; exact rational arithmetic is reserved for
//! certificates and the oracle.

use crate::instance::{ArcId, CommodityId, Instance, NodeId};
use thiserror::Error;

/// Positive-residual threshold and leftover bound for path decomposition.
pub const DEFAULT_DECOMPOSE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoFlow {
    per_commodity: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateFlow {
    pub per_arc: Vec<f64>,
}

impl PseudoFlow {
    pub fn zeros(instance: &Instance) -> Self {
        PseudoFlow {
            per_commodity: vec![vec![0.0; instance.num_arcs()]; instance.num_commodities()],
        }
    }

    /// Wraps raw per-commodity arc flows; shape must match the instance.
    pub fn from_per_commodity(instance: &Instance, per_commodity: Vec<Vec<f64>>) -> Self {
        assert_eq!(per_commodity.len(), instance.num_commodities(), "commodity count mismatch");
        for flows in &per_commodity {
            assert_eq!(flows.len(), instance.num_arcs(), "arc count mismatch");
        }
        PseudoFlow { per_commodity }
    }

    pub fn num_commodities(&self) -> usize {
        self.per_commodity.len()
    }

    pub fn commodity(&self, k: CommodityId) -> &[f64] {
        &self.per_commodity[k]
    }

    pub fn get(&self, k: CommodityId, a: ArcId) -> f64 {
        self.per_commodity[k][a]
    }

    pub fn add(&mut self, k: CommodityId, a: ArcId, amount: f64) {
        self.per_commodity[k][a] += amount;
    }

    pub fn aggregate(&self) -> AggregateFlow {
        let arcs = self.per_commodity.first().map_or(0, Vec::len);
        let mut per_arc = vec![0.0; arcs];
        // Ascending commodity order keeps the sums deterministic.
        for flows in &self.per_commodity {
            for (total, &f) in per_arc.iter_mut().zip(flows) {
                *total += f;
            }
        }
        AggregateFlow { per_arc }
    }

    /// The Frank-Wolfe move: `f + alpha * (y - f)` componentwise.
    pub fn step_toward(&self, direction: &PseudoFlow, alpha: f64) -> PseudoFlow {
        let per_commodity = self
            .per_commodity
            .iter()
            .zip(&direction.per_commodity)
            .map(|(fs, ys)| {
                fs.iter().zip(ys).map(|(&f, &y)| f + alpha * (y - f)).collect()
            })
            .collect();
        PseudoFlow { per_commodity }
    }
}

pub fn aggregate(flow: &PseudoFlow) -> AggregateFlow {
    flow.aggregate()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommodityBalance {
    pub commodity: CommodityId,
    pub max_violation: f64,
    pub worst_node: NodeId,
}

/// Worst deviation from the required divergence, per commodity.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationReport {
    pub tol: f64,
    pub max_violation: f64,
    pub per_commodity: Vec<CommodityBalance>,
}

impl ConservationReport {
    pub fn within_tol(&self) -> bool {
        self.max_violation <= self.tol
    }
}

pub fn check_conservation(instance: &Instance, flow: &PseudoFlow, tol: f64) -> ConservationReport {
    let mut per_commodity = Vec::with_capacity(instance.num_commodities());
    let mut max_violation = 0.0f64;
    for (k, commodity) in instance.commodities().iter().enumerate() {
        let flows = flow.commodity(k);
        let mut worst = CommodityBalance { commodity: k, max_violation: 0.0, worst_node: 0 };
        for node in 0..instance.num_nodes() {
            let mut net = 0.0;
            for &a in instance.out_arcs(node) {
                net += flows[a];
            }
            for &a in instance.in_arcs(node) {
                net -= flows[a];
            }
            let required = if node == commodity.source {
                instance.demand_f64(k)
            } else if node == commodity.sink {
                -instance.demand_f64(k)
            } else {
                0.0
            };
            let violation = (net - required).abs();
            if violation > worst.max_violation {
                worst.max_violation = violation;
                worst.worst_node = node;
            }
        }
        max_violation = max_violation.max(worst.max_violation);
        per_commodity.push(worst);
    }
    ConservationReport { tol, max_violation, per_commodity }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathFlow {
    pub arcs: Vec<ArcId>,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommodityPaths {
    pub commodity: CommodityId,
    pub paths: Vec<PathFlow>,
    /// Circulations found in the input; they carry no source-sink demand.
    pub cycles: Vec<PathFlow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathDecomposition {
    pub per_commodity: Vec<CommodityPaths>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecomposeError {
    #[error("commodity {commodity}: residual flow {leftover} remains on arc {arc} after decomposition")]
    Residual { commodity: CommodityId, arc: ArcId, leftover: f64 },
}

/// Standard flow decomposition: repeatedly extract a source-sink path
/// carrying the minimum positive residual along it; cycles encountered on
/// the way are extracted separately. At most one arc reaches zero per
/// extraction, so each commodity yields at most |A| paths plus cycles.
pub fn decompose_paths(
    instance: &Instance,
    flow: &PseudoFlow,
) -> Result<PathDecomposition, DecomposeError> {
    decompose_paths_with_tol(instance, flow, DEFAULT_DECOMPOSE_TOL)
}

pub fn decompose_paths_with_tol(
    instance: &Instance,
    flow: &PseudoFlow,
    tol: f64,
) -> Result<PathDecomposition, DecomposeError> {
    let mut per_commodity = Vec::with_capacity(instance.num_commodities());
    for (k, commodity) in instance.commodities().iter().enumerate() {
        let mut residual = flow.commodity(k).to_vec();
        let mut paths = Vec::new();
        let mut cycles = Vec::new();

        // Source-sink paths while the source still pushes flow out. A walk
        // that neither reaches the sink nor peels a cycle made no progress;
        // stop and let the leftover check report the residue.
        while instance
            .out_arcs(commodity.source)
            .iter()
            .any(|&a| residual[a] > tol)
        {
            let peeled = cycles.len();
            match walk(instance, &mut residual, commodity.source, Some(commodity.sink), tol, &mut cycles) {
                Some(path) => paths.push(path),
                None if cycles.len() == peeled => break,
                None => {}
            }
        }
        // Remaining positive flow is circulation; peel cycles from any
        // node that still has outgoing residual.
        for start in 0..instance.num_nodes() {
            while instance.out_arcs(start).iter().any(|&a| residual[a] > tol) {
                let peeled = cycles.len();
                if walk(instance, &mut residual, start, None, tol, &mut cycles).is_none()
                    && cycles.len() == peeled
                {
                    break;
                }
            }
        }
        if let Some((arc, &leftover)) = residual
            .iter()
            .enumerate()
            .find(|(_, &r)| r > tol)
        {
            return Err(DecomposeError::Residual { commodity: k, arc, leftover });
        }
        per_commodity.push(CommodityPaths { commodity: k, paths, cycles });
    }
    Ok(PathDecomposition { per_commodity })
}

/// Walks along positive-residual arcs from `start`, extracting any cycle
/// met on the way into `cycles`. Reaching `sink` extracts and returns the
/// walked path; `sink = None` (cycle peeling) and dead ends return None.
fn walk(
    instance: &Instance,
    residual: &mut [f64],
    start: NodeId,
    sink: Option<NodeId>,
    tol: f64,
    cycles: &mut Vec<PathFlow>,
) -> Option<PathFlow> {
    // Node sequence is implicit: start, head(arcs[0]), head(arcs[1]), ...
    let mut arcs: Vec<ArcId> = Vec::new();
    let mut pos_in_walk: Vec<Option<usize>> = vec![None; instance.num_nodes()];
    pos_in_walk[start] = Some(0);
    let mut node = start;
    loop {
        if sink == Some(node) && !arcs.is_empty() {
            let amount = extract(residual, &arcs);
            return Some(PathFlow { arcs, amount });
        }
        let Some(&a) = instance.out_arcs(node).iter().find(|&&a| residual[a] > tol) else {
            return None;
        };
        let next = instance.arc(a).head;
        if let Some(i) = pos_in_walk[next] {
            let mut cycle: Vec<ArcId> = arcs[i..].to_vec();
            cycle.push(a);
            let amount = extract(residual, &cycle);
            cycles.push(PathFlow { arcs: cycle, amount });
            for &dropped in &arcs[i..] {
                pos_in_walk[instance.arc(dropped).head] = None;
            }
            arcs.truncate(i);
            node = next;
        } else {
            arcs.push(a);
            pos_in_walk[next] = Some(arcs.len());
            node = next;
        }
    }
}

fn extract(residual: &mut [f64], arcs: &[ArcId]) -> f64 {
    let amount = arcs.iter().map(|&a| residual[a]).fold(f64::INFINITY, f64::min);
    for &a in arcs {
        residual[a] -= amount;
    }
    amount
}

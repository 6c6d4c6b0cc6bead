//! Reference designs: dedicated 1+1 protection and an exhaustive
//! enumerate-then-place optimum for small networks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coding::CodingGroup;
use crate::lp::MipLimits;
use crate::master::{scap, solve_master_ilp, ColumnPool, Demands, MasterError};
use crate::netgraph::{Network, NodeId};
use crate::pricing::{route_fixed, CodingMode, PricingRequest};
use crate::traffic::TrafficMatrix;

/// Largest network enumerated without an explicit override.
pub const ORACLE_MAX_NODES: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("network has {nodes} nodes; exhaustive enumeration is limited to {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error(transparent)]
    Master(#[from] MasterError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApsDemand {
    pub source: String,
    pub destination: String,
    pub units: u64,
    pub pair_cost: f64,
    pub primary_cost: f64,
}

/// Every demand routed on its own cheapest span-disjoint pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApsPlan {
    pub demands: Vec<ApsDemand>,
    pub total_cost: f64,
    pub primary_cost: f64,
    pub scap: f64,
}

impl ApsPlan {
    /// Total cost per destination.
    pub fn per_destination(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for d in &self.demands {
            *out.entry(d.destination.clone()).or_insert(0.0) += d.pair_cost * d.units as f64;
        }
        out
    }
}

pub fn aps_plan(net: &Network, tm: &TrafficMatrix) -> Result<ApsPlan, MasterError> {
    let mut demands = Vec::new();
    for (s, d, units) in tm.iter() {
        let (sv, dv) = (net.node(s)?, net.node(d)?);
        demands.push(ApsDemand {
            source: s.into(),
            destination: d.into(),
            units,
            pair_cost: net.disjoint_pair(sv, dv)?.cost,
            primary_cost: net.shortest_path(sv, dv)?.cost,
        });
    }
    let total_cost = demands.iter().map(|d| d.pair_cost * d.units as f64).sum();
    let primary_cost = demands.iter().map(|d| d.primary_cost * d.units as f64).sum();
    Ok(ApsPlan {
        demands,
        total_cost,
        primary_cost,
        scap: scap(total_cost, primary_cost),
    })
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    /// Largest group size; capped by the destination degree minus one.
    pub max_size: usize,
    /// Copies of one source allowed in a group.
    pub max_per_source: u32,
    /// Sources to combine; all nodes but the destination when `None`.
    pub sources: Option<Vec<NodeId>>,
    /// Node limit for the size guard.
    pub max_nodes: usize,
    pub limits: MipLimits,
}

impl Default for Enumeration {
    fn default() -> Self {
        Self {
            max_size: usize::MAX,
            max_per_source: u32::MAX,
            sources: None,
            max_nodes: ORACLE_MAX_NODES,
            limits: MipLimits::default(),
        }
    }
}

/// Source count vectors with total size `1..=max_size`, in lexicographic order.
fn multisets(sources: &[NodeId], max_size: usize, per_source: u32) -> Vec<BTreeMap<NodeId, u32>> {
    fn walk(
        sources: &[NodeId],
        i: usize,
        left: usize,
        per_source: u32,
        cur: &mut BTreeMap<NodeId, u32>,
        out: &mut Vec<BTreeMap<NodeId, u32>>,
    ) {
        if i == sources.len() {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            return;
        }
        let top = (left as u64).min(per_source as u64) as u32;
        for c in 0..=top {
            if c > 0 {
                cur.insert(sources[i], c);
            }
            walk(sources, i + 1, left - c as usize, per_source, cur, out);
        }
        cur.remove(&sources[i]);
    }
    let mut out = Vec::new();
    walk(sources, 0, max_size, per_source, &mut BTreeMap::new(), &mut out);
    out
}

/// The cheapest SDC group for every source multiset, routed with zero duals.
/// Multisets without a feasible structure are skipped.
pub fn enumerate_all_groups(net: &Network, d: NodeId, opts: &Enumeration) -> Result<ColumnPool, OracleError> {
    if net.num_nodes() > opts.max_nodes {
        return Err(OracleError::TooLarge {
            nodes: net.num_nodes(),
            limit: opts.max_nodes,
        });
    }
    let sources: Vec<NodeId> = match &opts.sources {
        Some(s) => s.clone(),
        None => net.nodes().filter(|&v| v != d).collect(),
    };
    let size = opts.max_size.min(net.nodal_degree(d).saturating_sub(1));
    let mut pool = ColumnPool::new(d);
    for counts in multisets(&sources, size, opts.max_per_source) {
        let mut req = PricingRequest::new(net, d, BTreeMap::new(), CodingMode::Sdc);
        req.limits = opts.limits;
        req.fixed_counts = Some(counts);
        if let Some(g) = route_fixed(&req).map_err(MasterError::from)? {
            pool.insert(net, g)?;
        }
    }
    Ok(pool)
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub objective: f64,
    pub pool: ColumnPool,
    pub multiplicities: Vec<u64>,
    pub proven: bool,
}

impl OracleResult {
    pub fn placed(&self) -> impl Iterator<Item = (&CodingGroup, u64)> {
        self.pool
            .columns()
            .iter()
            .zip(&self.multiplicities)
            .filter(|(_, &n)| n > 0)
            .map(|(g, &n)| (g, n))
    }
}

/// Integer placement over every SDC group of the positive-demand sources.
pub fn oracle_optimum(net: &Network, dem: &Demands, d: NodeId, opts: &Enumeration) -> Result<OracleResult, OracleError> {
    if dem.is_empty() {
        return Ok(OracleResult {
            objective: 0.0,
            pool: ColumnPool::new(d),
            multiplicities: Vec::new(),
            proven: true,
        });
    }
    let opts = Enumeration {
        sources: Some(dem.keys().copied().collect()),
        ..opts.clone()
    };
    let pool = enumerate_all_groups(net, d, &opts)?;
    let ilp = solve_master_ilp(net, &pool, dem, opts.limits, None)?;
    Ok(OracleResult {
        objective: ilp.objective,
        pool,
        multiplicities: ilp.multiplicities,
        proven: ilp.proven,
    })
}

//! Column generation subproblems: find the coding group with the most
//! negative reduced cost for one destination.

mod nsdc;
mod sdc;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coding::{verify_group, CodingGroup, CodingStructure};
use crate::lp::{self, LpError, MipLimits, MipOptions, Status};
use crate::netgraph::{Network, NodeId};
use crate::Lp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodingMode {
    /// Systematic: raw primary paths plus one parity tree.
    Sdc,
    /// Nonsystematic: any subgroup may combine signals.
    Nsdc,
    /// Nonsystematic with span sharing between coherent paths.
    Cdc,
}

impl CodingMode {
    pub const ALL: [CodingMode; 3] = [CodingMode::Sdc, CodingMode::Nsdc, CodingMode::Cdc];
}

impl fmt::Display for CodingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodingMode::Sdc => "sdc",
            CodingMode::Nsdc => "nsdc",
            CodingMode::Cdc => "cdc",
        })
    }
}

impl FromStr for CodingMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sdc" => Ok(CodingMode::Sdc),
            "nsdc" => Ok(CodingMode::Nsdc),
            "cdc" => Ok(CodingMode::Cdc),
            other => Err(format!("unknown coding mode `{other}` (expected sdc, nsdc or cdc)")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PricingError {
    #[error("destination {node} has nodal degree {degree}; at least 2 is required")]
    DegreeTooLow { node: String, degree: usize },
    #[error("negative dual price {price} for source {node}")]
    NegativeDual { node: String, price: f64 },
    #[error("group of {size} connections exceeds the destination limit {limit}")]
    GroupTooLarge { size: u32, limit: usize },
    #[error("returned column failed verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Solver(#[from] LpError),
}

#[derive(Clone, Debug)]
pub struct PricingRequest<'a> {
    pub net: &'a Network,
    pub destination: NodeId,
    /// Dual price of each source's coverage row; missing sources price at 0.
    pub duals: BTreeMap<NodeId, f64>,
    pub mode: CodingMode,
    /// Voltage step of the anti-cycle rows, in `(0, 1/|V|]`.
    pub alpha: f64,
    /// Protection-tree scaling, at least `2 max(|V|, max degree)`.
    pub beta: f64,
    pub limits: MipLimits,
    /// A column is returned only below `-rc_tolerance`.
    pub rc_tolerance: f64,
    /// Forces the exact source counts of the group (enumeration mode).
    pub fixed_counts: Option<BTreeMap<NodeId, u32>>,
    /// Adds valid inequalities that tighten the relaxation.
    pub strengthen: bool,
}

impl<'a> PricingRequest<'a> {
    pub fn new(net: &'a Network, destination: NodeId, duals: BTreeMap<NodeId, f64>, mode: CodingMode) -> Self {
        let n = net.num_nodes().max(1) as f64;
        Self {
            net,
            destination,
            duals,
            mode,
            alpha: 1.0 / (2.0 * n),
            beta: 2.0 * n.max(net.max_degree() as f64),
            limits: MipLimits::default(),
            rc_tolerance: 1e-6,
            fixed_counts: None,
            strengthen: true,
        }
    }

    pub fn dual(&self, f: NodeId) -> f64 {
        self.duals.get(&f).copied().unwrap_or(0.0)
    }

    /// Largest group size: nodal degree of the destination minus one.
    pub fn max_group(&self) -> usize {
        self.net.nodal_degree(self.destination).saturating_sub(1)
    }

    /// Sources that may appear in the group.
    fn candidate_sources(&self) -> Vec<NodeId> {
        match &self.fixed_counts {
            Some(fc) => fc.iter().filter(|(_, c)| **c > 0).map(|(v, _)| *v).collect(),
            // A source without a positive price never lowers the reduced cost.
            None => self
                .net
                .nodes()
                .filter(|&f| f != self.destination && self.dual(f) > 0.0)
                .collect(),
        }
    }

    fn check(&self) -> Result<(), PricingError> {
        let degree = self.net.nodal_degree(self.destination);
        if degree < 2 {
            return Err(PricingError::DegreeTooLow {
                node: self.net.name(self.destination).into(),
                degree,
            });
        }
        for (f, p) in &self.duals {
            if *p < 0.0 {
                return Err(PricingError::NegativeDual {
                    node: self.net.name(*f).into(),
                    price: *p,
                });
            }
        }
        if let Some(fc) = &self.fixed_counts {
            let size: u32 = fc.values().sum();
            if size as usize > self.max_group() {
                return Err(PricingError::GroupTooLarge {
                    size,
                    limit: self.max_group(),
                });
            }
        }
        Ok(())
    }

    pub fn reduced_cost(&self, group: &CodingGroup) -> f64 {
        group.cost
            - group
                .counts
                .iter()
                .map(|(f, c)| *c as f64 * self.dual(*f))
                .sum::<f64>()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PricingStatus {
    /// An improving column was found and the search finished.
    Column,
    /// Proven: no column has reduced cost below the threshold.
    NoColumn,
    /// Limits hit; any column returned is improving but not proven best.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct PricingResult {
    pub column: Option<CodingGroup>,
    /// Reduced cost of the returned column, or the best value seen.
    pub reduced_cost: Option<f64>,
    pub status: PricingStatus,
    pub nodes: usize,
}

/// Solves the pricing problem for `req.mode`.
pub fn price(req: &PricingRequest) -> Result<PricingResult, PricingError> {
    req.check()?;
    let sources = req.candidate_sources();
    if sources.is_empty() {
        return Ok(PricingResult {
            column: None,
            reduced_cost: None,
            status: PricingStatus::NoColumn,
            nodes: 0,
        });
    }
    let (model, decode): (Lp, Box<dyn Fn(&[f64]) -> CodingStructure>) = match req.mode {
        CodingMode::Sdc => {
            let (m, layout) = sdc::build(req, &sources);
            (m, Box::new(move |x: &[f64]| layout.extract(x)))
        }
        CodingMode::Nsdc | CodingMode::Cdc => {
            let (m, layout) = nsdc::build(req, &sources);
            (m, Box::new(move |x: &[f64]| layout.extract(x)))
        }
    };

    // The cheapest singleton pair is always a valid column; only structures
    // beating it are searched for.
    let singleton = if req.fixed_counts.is_none() {
        best_singleton(req, &sources)
    } else {
        None
    };
    let threshold = -req.rc_tolerance;
    let cutoff = match &singleton {
        Some((_, rc)) if *rc < threshold => *rc,
        _ => threshold,
    };
    let opts = MipOptions {
        limits: req.limits,
        cutoff: Some(cutoff),
        incumbent: None,
    };
    let sol = lp::solve_mip(&model, &opts);
    let mut best: Option<(CodingGroup, f64)> = singleton.filter(|(_, rc)| *rc < threshold);
    if sol.has_solution() {
        let cs = decode(&sol.values);
        let group = CodingGroup::new(cs, req.net);
        check_column(req, &group)?;
        let rc = req.reduced_cost(&group);
        if rc < threshold && best.as_ref().map_or(true, |(_, b)| rc < *b) {
            best = Some((group, rc));
        }
    }
    let status = match sol.status {
        Status::Limit => PricingStatus::Inconclusive,
        _ if best.is_some() => PricingStatus::Column,
        _ => PricingStatus::NoColumn,
    };
    if status == PricingStatus::Inconclusive {
        log::warn!(
            "pricing for {} stopped at a limit after {} nodes",
            req.net.name(req.destination),
            sol.nodes
        );
    }
    let reduced_cost = best.as_ref().map(|(_, rc)| *rc);
    Ok(PricingResult {
        column: best.map(|(g, _)| g),
        reduced_cost,
        status,
        nodes: sol.nodes,
    })
}

/// Cheapest group for exactly the sources in `req.fixed_counts`, ignoring duals.
pub fn route_fixed(req: &PricingRequest) -> Result<Option<CodingGroup>, PricingError> {
    req.check()?;
    let sources = req.candidate_sources();
    if sources.is_empty() {
        return Ok(None);
    }
    let sol = match req.mode {
        CodingMode::Sdc => {
            let (m, layout) = sdc::build(req, &sources);
            let s = lp::solve_mip(&m, &MipOptions { limits: req.limits, ..Default::default() });
            s.has_solution().then(|| layout.extract(&s.values))
        }
        CodingMode::Nsdc | CodingMode::Cdc => {
            let (m, layout) = nsdc::build(req, &sources);
            let s = lp::solve_mip(&m, &MipOptions { limits: req.limits, ..Default::default() });
            s.has_solution().then(|| layout.extract(&s.values))
        }
    };
    match sol {
        Some(cs) => {
            let g = CodingGroup::new(cs, req.net);
            check_column(req, &g)?;
            Ok(Some(g))
        }
        None => Ok(None),
    }
}

fn best_singleton(req: &PricingRequest, sources: &[NodeId]) -> Option<(CodingGroup, f64)> {
    let mut best: Option<(CodingGroup, f64)> = None;
    for &f in sources {
        let Ok(pair) = req.net.disjoint_pair(f, req.destination) else {
            continue;
        };
        let g = CodingGroup::new(CodingStructure::singleton(req.destination, f, &pair), req.net);
        let rc = req.reduced_cost(&g);
        let better = match &best {
            None => true,
            Some((bg, brc)) => rc < *brc || (rc == *brc && g.id < bg.id),
        };
        if better {
            best = Some((g, rc));
        }
    }
    best
}

fn check_column(req: &PricingRequest, g: &CodingGroup) -> Result<(), PricingError> {
    g.structure
        .validate(req.net)
        .map_err(|e| PricingError::Verification(e.to_string()))?;
    if g.size() as usize > req.max_group() {
        return Err(PricingError::Verification(format!(
            "group size {} exceeds {}",
            g.size(),
            req.max_group()
        )));
    }
    let report = verify_group(&g.structure, req.net);
    if !report.passed() {
        return Err(PricingError::Verification(format!(
            "undecodable after failure of spans {:?}",
            report.failing_spans
        )));
    }
    Ok(())
}

/// Builds the pricing model for `req` without solving it, e.g. for export.
pub fn pricing_model(req: &PricingRequest) -> Result<Lp, PricingError> {
    req.check()?;
    let sources = req.candidate_sources();
    Ok(match req.mode {
        CodingMode::Sdc => sdc::build(req, &sources).0,
        _ => nsdc::build(req, &sources).0,
    })
}

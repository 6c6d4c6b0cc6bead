//! Cut-based lower bound on the capacity of any single-destination coded
//! protection design.
//!
//! For a set of spans whose removal separates some sources from the
//! destination, the capacity left on the cut after losing any one of its spans
//! must still carry all demand of the separated sources.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lp::{self, LinearProgram, MipLimits, MipOptions, Sense, Status};
use crate::master::{primary_cost, Demands, MasterError};
use crate::netgraph::{Network, NodeId, SpanId};

/// Default largest cut size.
pub const DEFAULT_MAX_CUT: usize = 5;
/// Subset count above which enumeration logs a warning.
pub const DEFAULT_CUT_BUDGET: u128 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    pub spans: Vec<SpanId>,
    /// Positive-demand sources separated from the destination.
    pub separated: BTreeSet<NodeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CutFamily {
    pub destination: NodeId,
    pub max_cut: usize,
    pub cuts: Vec<Cut>,
    /// Number of span subsets examined.
    pub examined: u128,
    pub over_budget: bool,
}

/// Nodes that can still reach `d` once `removed` spans fail.
fn reaching(net: &Network, d: NodeId, removed: &HashSet<SpanId>) -> Vec<bool> {
    let mut seen = vec![false; net.num_nodes()];
    seen[d.0] = true;
    let mut queue = VecDeque::from([d]);
    while let Some(v) = queue.pop_front() {
        for &l in net.in_links(v) {
            let u = net.link(l).tail;
            if !seen[u.0] && !removed.contains(&l.span()) {
                seen[u.0] = true;
                queue.push_back(u);
            }
        }
    }
    seen
}

fn separated(net: &Network, d: NodeId, dem: &Demands, spans: &[SpanId]) -> BTreeSet<NodeId> {
    let removed: HashSet<SpanId> = spans.iter().copied().collect();
    let seen = reaching(net, d, &removed);
    dem.keys().copied().filter(|f| !seen[f.0]).collect()
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Number of span subsets of size `1..=k` on `m` spans.
pub fn subset_count(m: usize, k: usize) -> u128 {
    (1..=k.min(m)).map(|j| binomial(m, j)).sum()
}

/// All span subsets of size at most `max_cut` that separate at least one
/// positive-demand source from `d`, keeping only those with no smaller
/// subset separating the same sources.
pub fn enumerate_cuts(net: &Network, d: NodeId, dem: &Demands, max_cut: usize, budget: u128) -> CutFamily {
    let m = net.num_spans();
    let examined = subset_count(m, max_cut);
    let over_budget = examined > budget;
    if over_budget {
        log::warn!(
            "cut enumeration at {} examines {examined} span subsets (budget {budget})",
            net.name(d)
        );
    }
    let mut cuts: Vec<Cut> = (0..m)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut found = Vec::new();
            let mut stack = vec![first];
            extend(net, d, dem, max_cut, &mut stack, &mut found);
            found
        })
        .collect();
    cuts.sort_by(|a, b| a.spans.len().cmp(&b.spans.len()).then_with(|| a.spans.cmp(&b.spans)));
    CutFamily {
        destination: d,
        max_cut,
        cuts,
        examined,
        over_budget,
    }
}

/// Depth-first walk over increasing span subsets starting with `stack`.
fn extend(net: &Network, d: NodeId, dem: &Demands, max_cut: usize, stack: &mut Vec<usize>, out: &mut Vec<Cut>) {
    let spans: Vec<SpanId> = stack.iter().map(|&s| SpanId(s)).collect();
    let sep = separated(net, d, dem, &spans);
    if !sep.is_empty() {
        let minimal = (0..spans.len()).all(|i| {
            let mut fewer = spans.clone();
            fewer.remove(i);
            separated(net, d, dem, &fewer) != sep
        });
        if minimal {
            out.push(Cut {
                spans: spans.clone(),
                separated: sep,
            });
        }
    }
    if stack.len() < max_cut {
        let last = *stack.last().expect("nonempty");
        for next in last + 1..net.num_spans() {
            stack.push(next);
            extend(net, d, dem, max_cut, stack, out);
            stack.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    /// The larger of the cut bound and the primary routing cost.
    pub bound: f64,
    /// Optimum (or proven bound) of the cut program; zero without cuts.
    pub cut_bound: f64,
    pub primary_cost: f64,
    /// True when the cut program stopped at a limit and `cut_bound` is its
    /// best proven bound rather than its optimum.
    pub approximate: bool,
    /// Integer capacity per directed link, by `tail->head` label.
    pub capacities: BTreeMap<String, u64>,
}

/// Minimum-cost integer link capacities that satisfy every cut of `cf`.
pub fn solve_lower_bound(
    net: &Network,
    cf: &CutFamily,
    dem: &Demands,
    limits: MipLimits,
) -> Result<LowerBound, MasterError> {
    let primary = primary_cost(net, dem, cf.destination)?;
    if cf.cuts.is_empty() {
        return Ok(LowerBound {
            bound: primary,
            cut_bound: 0.0,
            primary_cost: primary,
            approximate: false,
            capacities: BTreeMap::new(),
        });
    }
    let program = cut_program(net, cf, dem);
    let sol = lp::solve_mip(&program, &MipOptions { limits, ..Default::default() });
    let (cut_bound, values, approximate) = match sol.status {
        Status::Optimal => (sol.objective, sol.values, false),
        Status::Limit => (sol.bound, sol.values, true),
        s => return Err(MasterError::Unsolved(s)),
    };
    let capacities = net
        .link_ids()
        .filter_map(|l| {
            let c = values.get(l.0).map_or(0, |v| v.round().max(0.0) as u64);
            (c > 0).then(|| (net.link_label(l), c))
        })
        .collect();
    Ok(LowerBound {
        bound: cut_bound.max(primary),
        cut_bound,
        primary_cost: primary,
        approximate,
        capacities,
    })
}

/// One integer capacity per directed link; for every cut and every span `f`
/// in it, the capacity on the other spans of the cut covers the separated
/// demand.
pub fn cut_program(net: &Network, cf: &CutFamily, dem: &Demands) -> LinearProgram<f64> {
    let mut lp = LinearProgram::new();
    let cap: Vec<_> = net
        .link_ids()
        .map(|l| {
            let v = lp.add_integer(format!("c_{}", net.link_label(l)), 0.0, None);
            lp.set_objective(v, net.length(l));
            v
        })
        .collect();
    for (k, cut) in cf.cuts.iter().enumerate() {
        let need: u64 = cut.separated.iter().map(|f| dem[f]).sum();
        for &failed in &cut.spans {
            let coeffs: Vec<_> = cut
                .spans
                .iter()
                .filter(|&&s| s != failed)
                .flat_map(|s| s.links())
                .map(|l| (cap[l.0], 1.0))
                .collect();
            lp.add_constraint(format!("cut{k}_s{}", failed.0), coeffs, Sense::Ge, need as f64);
        }
    }
    lp
}

/// Checks every cut row against `capacities`, by link label.
pub fn satisfies_cuts(net: &Network, cf: &CutFamily, dem: &Demands, capacities: &BTreeMap<String, u64>) -> bool {
    let cap = |s: SpanId| -> u64 {
        s.links()
            .iter()
            .map(|&l| capacities.get(&net.link_label(l)).copied().unwrap_or(0))
            .sum()
    };
    cf.cuts.iter().all(|cut| {
        let need: u64 = cut.separated.iter().map(|f| dem[f]).sum();
        let total: u64 = cut.spans.iter().map(|&s| cap(s)).sum();
        let largest = cut.spans.iter().map(|&s| cap(s)).max().unwrap_or(0);
        total - largest >= need
    })
}

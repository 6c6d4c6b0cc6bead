//! Placement master problem and the column-generation loop per destination.
//!
//! The master chooses how many copies of each coding group to install so that
//! every source's demand is covered at minimum total capacity. Its duals price
//! the next column; the loop ends when pricing proves no column improves it.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coding::{verify_group, CodingError, CodingGroup, CodingStructure, GroupJson};
use crate::lp::{self, LinearProgram, LpError, MipLimits, MipOptions, RowId, Sense, Status};
use crate::netgraph::{NetError, Network, NodeId};
use crate::pricing::{self, CodingMode, PricingError, PricingRequest, PricingStatus};
use crate::scalar::Scalar;
use crate::traffic::{DemandVector, TrafficMatrix};
use crate::BigRational;

pub const PLAN_SCHEMA: &str = "divcode.plan/1";

#[derive(Debug, thiserror::Error)]
pub enum MasterError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error(transparent)]
    Solver(#[from] LpError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error("no column covers source {0}")]
    Uncovered(String),
    #[error("column for destination {found} added to the pool of {expected}")]
    WrongDestination { expected: String, found: String },
    #[error("master problem ended with status {0:?}")]
    Unsolved(Status),
    #[error("plan schema `{0}` is not supported")]
    Schema(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Positive unit demands toward one destination, keyed by source.
pub type Demands = BTreeMap<NodeId, u64>;

/// Resolves source names and drops zero entries.
pub fn demands_of(net: &Network, dv: &DemandVector) -> Result<Demands, MasterError> {
    dv.positive()
        .map(|(s, u)| Ok((net.node(s)?, u)))
        .collect()
}

/// Columns of the master problem for one destination, deduplicated by
/// canonical form.
#[derive(Clone, Debug)]
pub struct ColumnPool {
    destination: NodeId,
    columns: Vec<CodingGroup>,
    index: HashMap<u64, Vec<usize>>,
}

impl ColumnPool {
    pub fn new(destination: NodeId) -> Self {
        Self {
            destination,
            columns: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn destination(&self) -> NodeId {
        self.destination
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[CodingGroup] {
        &self.columns
    }

    /// Position of a column with the same canonical form as `g`.
    pub fn position(&self, g: &CodingGroup) -> Option<usize> {
        let key = g.structure.canonical_key();
        self.index
            .get(&g.id)?
            .iter()
            .copied()
            .find(|&i| self.columns[i].structure.canonical_key() == key)
    }

    /// Adds `g` and returns its position, or `None` when it is already pooled.
    pub fn insert(&mut self, net: &Network, g: CodingGroup) -> Result<Option<usize>, MasterError> {
        if g.destination != self.destination {
            return Err(MasterError::WrongDestination {
                expected: net.name(self.destination).into(),
                found: net.name(g.destination).into(),
            });
        }
        if self.position(&g).is_some() {
            return Ok(None);
        }
        let i = self.columns.len();
        self.index.entry(g.id).or_default().push(i);
        self.columns.push(g);
        Ok(Some(i))
    }
}

/// One singleton column per source with demand: its cheapest span-disjoint
/// pair. These alone make the master feasible.
pub fn seed_pool(net: &Network, demands: &Demands, d: NodeId) -> Result<ColumnPool, MasterError> {
    let mut pool = ColumnPool::new(d);
    for &f in demands.keys() {
        let pair = net.disjoint_pair(f, d)?;
        let g = CodingGroup::new(CodingStructure::singleton(d, f, &pair), net);
        pool.insert(net, g)?;
    }
    Ok(pool)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MasterSolution {
    /// Copies of each pool column, by position.
    pub multiplicities: Vec<f64>,
    pub objective: f64,
    /// Price of each source's coverage row.
    pub duals: BTreeMap<NodeId, f64>,
    pub iteration: usize,
}

impl MasterSolution {
    fn empty(columns: usize) -> Self {
        Self {
            multiplicities: vec![0.0; columns],
            objective: 0.0,
            duals: BTreeMap::new(),
            iteration: 0,
        }
    }
}

/// Builds `min sum cost_i n_i  s.t.  sum_i count_{i,f} n_i >= t_f`.
fn placement_program<S: Scalar>(
    net: &Network,
    pool: &ColumnPool,
    demands: &Demands,
    integer: bool,
) -> Result<(LinearProgram<S>, Vec<(NodeId, RowId)>), MasterError> {
    let mut lp = LinearProgram::new();
    let vars: Vec<_> = pool
        .columns
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let name = format!("n{i}");
            let v = if integer {
                lp.add_integer(name, S::zero(), None)
            } else {
                lp.add_continuous(name, S::zero(), None)
            };
            lp.set_objective(v, S::from_f64(g.cost));
            v
        })
        .collect();
    let mut rows = Vec::with_capacity(demands.len());
    for (&f, &t) in demands {
        let coeffs: Vec<_> = pool
            .columns
            .iter()
            .zip(&vars)
            .filter(|(g, _)| g.count(f) > 0)
            .map(|(g, &v)| (v, S::from_i64(g.count(f) as i64)))
            .collect();
        if coeffs.is_empty() {
            return Err(MasterError::Uncovered(net.name(f).into()));
        }
        let r = lp.add_constraint(format!("cover_{}", net.name(f)), coeffs, Sense::Ge, S::from_i64(t as i64));
        rows.push((f, r));
    }
    Ok((lp, rows))
}

/// Continuous master optimum with one dual per positive-demand source.
pub fn solve_master_lp(net: &Network, pool: &ColumnPool, demands: &Demands) -> Result<MasterSolution, MasterError> {
    if demands.is_empty() {
        return Ok(MasterSolution::empty(pool.len()));
    }
    let (program, rows) = placement_program::<f64>(net, pool, demands, false)?;
    let sol = lp::solve_lp(&program)?;
    if !sol.is_optimal() {
        return Err(MasterError::Unsolved(sol.status));
    }
    Ok(MasterSolution {
        duals: rows.iter().map(|&(f, r)| (f, sol.dual(r).max(0.0))).collect(),
        multiplicities: sol.values.iter().map(|v| v.max(0.0)).collect(),
        objective: sol.objective,
        iteration: 0,
    })
}

/// The continuous master optimum in exact rational arithmetic.
pub fn solve_master_lp_exact(net: &Network, pool: &ColumnPool, demands: &Demands) -> Result<BigRational, MasterError> {
    if demands.is_empty() {
        return Ok(BigRational::from_i64(0));
    }
    let (program, _) = placement_program::<BigRational>(net, pool, demands, false)?;
    let sol = lp::solve_lp(&program)?;
    if !sol.is_optimal() {
        return Err(MasterError::Unsolved(sol.status));
    }
    Ok(sol.objective)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegerSolution {
    pub multiplicities: Vec<u64>,
    pub objective: f64,
    /// Best proven lower bound on the integer optimum.
    pub bound: f64,
    pub proven: bool,
}

/// Integer master over the pool. `start` is an optional feasible point, e.g.
/// the solution of a smaller pool padded with zeros.
pub fn solve_master_ilp(
    net: &Network,
    pool: &ColumnPool,
    demands: &Demands,
    limits: MipLimits,
    start: Option<&[u64]>,
) -> Result<IntegerSolution, MasterError> {
    if demands.is_empty() {
        return Ok(IntegerSolution {
            multiplicities: vec![0; pool.len()],
            objective: 0.0,
            bound: 0.0,
            proven: true,
        });
    }
    let (program, _) = placement_program::<f64>(net, pool, demands, true)?;
    let incumbent = start
        .map(|s| {
            let mut x: Vec<f64> = s.iter().map(|&v| v as f64).collect();
            x.resize(pool.len(), 0.0);
            x
        })
        .or_else(|| rounded_up(&program));
    let sol = lp::solve_mip(
        &program,
        &MipOptions {
            limits,
            cutoff: None,
            incumbent,
        },
    );
    if !sol.has_solution() {
        return Err(MasterError::Unsolved(sol.status));
    }
    Ok(IntegerSolution {
        multiplicities: sol.values.iter().map(|v| v.round().max(0.0) as u64).collect(),
        objective: sol.objective,
        bound: sol.bound,
        proven: sol.status == Status::Optimal,
    })
}

/// The LP optimum rounded up is always feasible for a covering program.
fn rounded_up(program: &LinearProgram<f64>) -> Option<Vec<f64>> {
    let sol = lp::solve_lp(program).ok()?;
    sol.is_optimal()
        .then(|| sol.values.iter().map(|v| (v - 1e-9).ceil().max(0.0)).collect())
}

#[derive(Clone, Copy, Debug)]
pub struct CgLimits {
    pub max_iterations: usize,
    /// Relative reduced-cost threshold; the absolute one is this times
    /// `max(1, |objective|)`.
    pub rc_tolerance: f64,
    /// Wall clock for the whole loop; pricing calls get what remains.
    pub time_limit: Duration,
    pub pricing: MipLimits,
    pub final_ilp: MipLimits,
    pub strengthen: bool,
}

impl Default for CgLimits {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            rc_tolerance: 1e-6,
            time_limit: Duration::from_secs(3600),
            pricing: MipLimits::default(),
            final_ilp: MipLimits {
                max_nodes: 200_000,
                time_limit: Duration::from_secs(120),
            },
            strengthen: true,
        }
    }
}

impl CgLimits {
    pub fn with_time_limit(mut self, t: Duration) -> Self {
        self.time_limit = t;
        self.pricing.time_limit = self.pricing.time_limit.min(t);
        self.final_ilp.time_limit = self.final_ilp.time_limit.min(t);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Pricing proved that no column improves the master.
    Converged,
    /// Pricing returned a pooled column, which certifies LP optimality.
    DuplicateColumn,
    IterationLimit,
    TimeLimit,
    /// Pricing stopped at a limit; the LP value is an upper estimate only.
    PricingInconclusive,
}

impl Termination {
    /// True when the final LP value is the optimum over all columns.
    pub fn proven(self) -> bool {
        matches!(self, Termination::Converged | Termination::DuplicateColumn)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub objective: f64,
    pub reduced_cost: Option<f64>,
    pub column_id: Option<String>,
    pub column_cost: Option<f64>,
    pub pool_size: usize,
}

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub destination: NodeId,
    pub mode: CodingMode,
    pub pool: ColumnPool,
    pub lp: MasterSolution,
    pub ilp: IntegerSolution,
    pub trace: Vec<TraceEntry>,
    pub termination: Termination,
    /// Columns added by pricing, excluding the seed.
    pub generated: usize,
    pub elapsed: Duration,
}

impl CgOutcome {
    /// `(ILP - LP) / LP`, zero when the LP value is zero.
    pub fn gap(&self) -> f64 {
        if self.lp.objective.abs() < 1e-12 {
            0.0
        } else {
            ((self.ilp.objective - self.lp.objective) / self.lp.objective).max(0.0)
        }
    }

    /// Placed columns with their integer multiplicities.
    pub fn placed(&self) -> impl Iterator<Item = (&CodingGroup, u64)> {
        self.pool
            .columns()
            .iter()
            .zip(&self.ilp.multiplicities)
            .filter(|(_, &n)| n > 0)
            .map(|(g, &n)| (g, n))
    }
}

/// Seeds the pool with singleton columns and runs column generation.
pub fn run_column_generation(
    net: &Network,
    demands: &Demands,
    d: NodeId,
    mode: CodingMode,
    limits: &CgLimits,
) -> Result<CgOutcome, MasterError> {
    let pool = seed_pool(net, demands, d)?;
    run_from_pool(net, demands, mode, limits, pool, None)
}

/// Column generation continuing from an existing pool, e.g. the final pool
/// of a more restricted coding mode. `start` is a known integer placement
/// over that pool.
pub fn run_from_pool(
    net: &Network,
    demands: &Demands,
    mode: CodingMode,
    limits: &CgLimits,
    mut pool: ColumnPool,
    start: Option<&[u64]>,
) -> Result<CgOutcome, MasterError> {
    let began = Instant::now();
    let d = pool.destination();
    let mut trace = Vec::new();
    let mut generated = 0;
    let mut iteration = 0;
    let (lp, termination) = loop {
        iteration += 1;
        let mut lp = solve_master_lp(net, &pool, demands)?;
        lp.iteration = iteration;
        let mut entry = TraceEntry {
            iteration,
            objective: lp.objective,
            reduced_cost: None,
            column_id: None,
            column_cost: None,
            pool_size: pool.len(),
        };
        if demands.is_empty() {
            trace.push(entry);
            break (lp, Termination::Converged);
        }
        if iteration > limits.max_iterations {
            trace.push(entry);
            break (lp, Termination::IterationLimit);
        }
        let Some(remaining) = limits.time_limit.checked_sub(began.elapsed()) else {
            trace.push(entry);
            break (lp, Termination::TimeLimit);
        };
        let mut req = PricingRequest::new(net, d, lp.duals.clone(), mode);
        req.rc_tolerance = limits.rc_tolerance * lp.objective.abs().max(1.0);
        req.strengthen = limits.strengthen;
        req.limits = MipLimits {
            time_limit: limits.pricing.time_limit.min(remaining),
            ..limits.pricing
        };
        let priced = pricing::price(&req)?;
        let mut added = false;
        if let Some(g) = priced.column {
            entry.reduced_cost = Some(req.reduced_cost(&g));
            entry.column_id = Some(format!("{:016x}", g.id));
            entry.column_cost = Some(g.cost);
            trace.push(entry);
            if pool.insert(net, g)?.is_none() {
                log::warn!("pricing for {} returned a pooled column; stopping", net.name(d));
                break (lp, Termination::DuplicateColumn);
            }
            generated += 1;
            added = true;
        } else {
            trace.push(entry);
        }
        match priced.status {
            PricingStatus::Column => {}
            PricingStatus::NoColumn => break (lp, Termination::Converged),
            PricingStatus::Inconclusive if added => {
                let mut lp = solve_master_lp(net, &pool, demands)?;
                lp.iteration = iteration + 1;
                break (lp, Termination::PricingInconclusive);
            }
            PricingStatus::Inconclusive => break (lp, Termination::PricingInconclusive),
        }
    };
    let ilp = solve_master_ilp(net, &pool, demands, limits.final_ilp, start)?;
    Ok(CgOutcome {
        destination: d,
        mode,
        pool,
        lp,
        ilp,
        trace,
        termination,
        generated,
        elapsed: began.elapsed(),
    })
}

/// Cost of routing every demand once along its shortest path.
pub fn primary_cost(net: &Network, demands: &Demands, d: NodeId) -> Result<f64, MasterError> {
    demands
        .iter()
        .map(|(&f, &t)| Ok(net.shortest_path(f, d)?.cost * t as f64))
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacedColumn {
    pub multiplicity: u64,
    pub group: GroupJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DestinationPlan {
    pub destination: String,
    pub nodal_degree: usize,
    pub demand_units: u64,
    pub primary_cost: f64,
    pub lp_objective: f64,
    pub ilp_objective: f64,
    pub ilp_bound: f64,
    pub gap: f64,
    pub termination: Termination,
    /// LP optimality proven and the integer placement optimal over the pool.
    pub proven: bool,
    pub iterations: usize,
    pub generated_columns: usize,
    pub pool_size: usize,
    pub duals: BTreeMap<String, f64>,
    pub columns: Vec<PlacedColumn>,
    pub trace: Vec<TraceEntry>,
}

impl DestinationPlan {
    pub fn from_outcome(net: &Network, demands: &Demands, out: &CgOutcome) -> Result<Self, MasterError> {
        Ok(Self {
            destination: net.name(out.destination).into(),
            nodal_degree: net.nodal_degree(out.destination),
            demand_units: demands.values().sum(),
            primary_cost: primary_cost(net, demands, out.destination)?,
            lp_objective: out.lp.objective,
            ilp_objective: out.ilp.objective,
            ilp_bound: out.ilp.bound,
            gap: out.gap(),
            termination: out.termination,
            proven: out.termination.proven() && out.ilp.proven,
            iterations: out.trace.len(),
            generated_columns: out.generated,
            pool_size: out.pool.len(),
            duals: out
                .lp
                .duals
                .iter()
                .map(|(f, p)| (net.name(*f).to_string(), *p))
                .collect(),
            columns: out
                .placed()
                .map(|(g, n)| PlacedColumn {
                    multiplicity: n,
                    group: g.to_json(net),
                })
                .collect(),
            trace: out.trace.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DestinationFailure {
    pub destination: String,
    pub error: String,
}

/// Network-wide design: one independent coding design per destination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkPlan {
    pub schema: String,
    pub mode: CodingMode,
    pub total_cost: f64,
    pub primary_cost: f64,
    /// Spare capacity as a percentage of primary capacity.
    pub scap: f64,
    pub destinations: Vec<DestinationPlan>,
    pub errors: Vec<DestinationFailure>,
}

/// Spare over primary capacity, in percent.
pub fn scap(total: f64, primary: f64) -> f64 {
    if primary > 0.0 {
        100.0 * (total - primary) / primary
    } else {
        0.0
    }
}

impl NetworkPlan {
    pub fn new(mode: CodingMode, destinations: Vec<DestinationPlan>, errors: Vec<DestinationFailure>) -> Self {
        // Folding from +0.0 keeps an empty plan from reporting -0.0.
        let total_cost = destinations.iter().fold(0.0, |acc, p| acc + p.ilp_objective);
        let primary_cost = destinations.iter().fold(0.0, |acc, p| acc + p.primary_cost);
        Self {
            schema: PLAN_SCHEMA.into(),
            mode,
            total_cost,
            primary_cost,
            scap: scap(total_cost, primary_cost),
            destinations,
            errors,
        }
    }

    pub fn destination(&self, name: &str) -> Option<&DestinationPlan> {
        self.destinations.iter().find(|p| p.destination == name)
    }

    pub fn generated_columns(&self) -> usize {
        self.destinations.iter().map(|p| p.generated_columns).sum()
    }

    /// `(degree, total, primary, scap)` grouped by destination nodal degree.
    pub fn scap_by_degree(&self) -> Vec<(usize, f64, f64, f64)> {
        let mut by: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        for p in &self.destinations {
            let e = by.entry(p.nodal_degree).or_default();
            e.0 += p.ilp_objective;
            e.1 += p.primary_cost;
        }
        by.into_iter()
            .map(|(k, (t, p))| (k, t, p, scap(t, p)))
            .collect()
    }

    pub fn from_json(text: &str) -> Result<Self, MasterError> {
        let plan: Self = serde_json::from_str(text).map_err(|e| MasterError::Io(e.into()))?;
        if plan.schema != PLAN_SCHEMA {
            return Err(MasterError::Schema(plan.schema));
        }
        Ok(plan)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    /// One row per destination plus a final `ALL` row.
    pub fn write_summary_csv<W: Write>(&self, w: W) -> Result<(), MasterError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "destination",
            "nodal_degree",
            "demand_units",
            "primary_cost",
            "lp_objective",
            "ilp_objective",
            "gap",
            "generated_columns",
            "placed_groups",
            "scap_percent",
            "proven",
        ])?;
        for p in &self.destinations {
            wtr.write_record([
                p.destination.clone(),
                p.nodal_degree.to_string(),
                p.demand_units.to_string(),
                p.primary_cost.to_string(),
                p.lp_objective.to_string(),
                p.ilp_objective.to_string(),
                p.gap.to_string(),
                p.generated_columns.to_string(),
                p.columns.len().to_string(),
                scap(p.ilp_objective, p.primary_cost).to_string(),
                p.proven.to_string(),
            ])?;
        }
        let lp: f64 = self.destinations.iter().map(|p| p.lp_objective).sum();
        let gap = if lp > 0.0 { (self.total_cost - lp) / lp } else { 0.0 };
        wtr.write_record([
            "ALL".to_string(),
            String::new(),
            self.destinations.iter().map(|p| p.demand_units).sum::<u64>().to_string(),
            self.primary_cost.to_string(),
            lp.to_string(),
            self.total_cost.to_string(),
            gap.to_string(),
            self.generated_columns().to_string(),
            self.destinations.iter().map(|p| p.columns.len()).sum::<usize>().to_string(),
            self.scap.to_string(),
            self.destinations.iter().all(|p| p.proven).to_string(),
        ])?;
        wtr.flush()?;
        Ok(())
    }

    /// Objective per iteration for every destination.
    pub fn write_trace_csv<W: Write>(&self, w: W) -> Result<(), MasterError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "destination",
            "iteration",
            "objective",
            "reduced_cost",
            "column_id",
            "column_cost",
            "pool_size",
        ])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for p in &self.destinations {
            for e in &p.trace {
                wtr.write_record([
                    p.destination.clone(),
                    e.iteration.to_string(),
                    e.objective.to_string(),
                    opt(e.reduced_cost),
                    e.column_id.clone().unwrap_or_default(),
                    opt(e.column_cost),
                    e.pool_size.to_string(),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn write_degree_csv<W: Write>(&self, w: W) -> Result<(), MasterError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["nodal_degree", "total_cost", "primary_cost", "scap_percent"])?;
        for (k, t, p, s) in self.scap_by_degree() {
            wtr.write_record([k.to_string(), t.to_string(), p.to_string(), s.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Placed columns of a plan that are malformed or fail decoding under some
/// span failure, as `(destination, column id, reasons)`.
pub fn verify_plan(net: &Network, plan: &NetworkPlan) -> Result<Vec<(String, String, Vec<String>)>, MasterError> {
    let mut failures = Vec::new();
    for p in &plan.destinations {
        for c in &p.columns {
            let g = CodingGroup::from_json(&c.group, net)?;
            let mut reasons = Vec::new();
            if net.name(g.destination) != p.destination {
                reasons.push(format!("column targets {}", net.name(g.destination)));
            }
            if let Err(e) = g.structure.validate(net) {
                reasons.push(e.to_string());
            }
            let report = verify_group(&g.structure, net);
            reasons.extend(
                report
                    .failing_spans
                    .iter()
                    .map(|&s| format!("undecodable after failure of span {}", span_label(net, s))),
            );
            if !report.intact_decodable {
                reasons.push("undecodable without failures".into());
            }
            if !reasons.is_empty() {
                failures.push((p.destination.clone(), c.group.id.clone(), reasons));
            }
        }
    }
    Ok(failures)
}

fn span_label(net: &Network, s: usize) -> String {
    let [a, _] = crate::netgraph::SpanId(s).links();
    let l = net.link(a);
    format!("{}-{}", net.name(l.tail), net.name(l.head))
}

fn destination_demands(net: &Network, tm: &TrafficMatrix) -> Vec<(String, Result<Demands, MasterError>)> {
    tm.destinations()
        .into_iter()
        .map(|d| {
            let dv = tm.aggregate_to_destination(&d);
            let dem = net.node(&d).map_err(MasterError::from).and_then(|_| demands_of(net, &dv));
            (d, dem)
        })
        .collect()
}

/// Runs column generation independently for every destination with inbound
/// demand. Failures are collected per destination and the rest still run.
pub fn design_all_destinations(net: &Network, tm: &TrafficMatrix, mode: CodingMode, limits: &CgLimits) -> NetworkPlan {
    let results: Vec<_> = destination_demands(net, tm)
        .into_par_iter()
        .map(|(name, dem)| {
            let run = || -> Result<DestinationPlan, MasterError> {
                let dem = dem?;
                let d = net.node(&name)?;
                let out = run_column_generation(net, &dem, d, mode, limits)?;
                DestinationPlan::from_outcome(net, &dem, &out)
            };
            let result = run().map_err(|e| e.to_string());
            (name, result)
        })
        .collect();
    split_results(mode, results)
}

fn split_results(mode: CodingMode, results: Vec<(String, Result<DestinationPlan, String>)>) -> NetworkPlan {
    let mut plans = Vec::new();
    let mut errors = Vec::new();
    for (name, r) in results {
        match r {
            Ok(p) => plans.push(p),
            Err(error) => {
                log::error!("destination {name}: {error}");
                errors.push(DestinationFailure {
                    destination: name,
                    error,
                })
            }
        }
    }
    NetworkPlan::new(mode, plans, errors)
}

/// Designs all three modes, each continuing from the previous mode's pool
/// and placement, so the totals are ordered SDC >= NSDC >= CDC.
pub fn design_mode_sweep(net: &Network, tm: &TrafficMatrix, limits: &CgLimits) -> Vec<NetworkPlan> {
    let per_dest: Vec<(String, Vec<Result<DestinationPlan, String>>)> = destination_demands(net, tm)
        .into_par_iter()
        .map(|(name, dem)| {
            let runs = sweep_destination(net, &name, dem, limits);
            (name, runs)
        })
        .collect();
    CodingMode::ALL
        .iter()
        .enumerate()
        .map(|(k, &mode)| {
            let results = per_dest
                .iter()
                .map(|(name, rs)| (name.clone(), rs[k].clone()))
                .collect();
            split_results(mode, results)
        })
        .collect()
}

fn sweep_destination(
    net: &Network,
    name: &str,
    dem: Result<Demands, MasterError>,
    limits: &CgLimits,
) -> Vec<Result<DestinationPlan, String>> {
    let start = dem.and_then(|dem| Ok((net.node(name)?, dem)));
    let (d, dem) = match start {
        Ok(v) => v,
        Err(e) => return vec![Err(e.to_string()); CodingMode::ALL.len()],
    };
    let mut out = Vec::new();
    let mut prev: Option<CgOutcome> = None;
    for mode in CodingMode::ALL {
        let run = match &prev {
            None => run_column_generation(net, &dem, d, mode, limits),
            Some(p) => run_from_pool(net, &dem, mode, limits, p.pool.clone(), Some(&p.ilp.multiplicities)),
        };
        match run.and_then(|o| Ok((DestinationPlan::from_outcome(net, &dem, &o)?, o))) {
            Ok((plan, o)) => {
                out.push(Ok(plan));
                prev = Some(o);
            }
            Err(e) => out.push(Err(e.to_string())),
        }
    }
    out
}

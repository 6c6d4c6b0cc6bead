use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use divcode::baselines::{aps_plan, oracle_optimum, Enumeration};
use divcode::lowerbound::{enumerate_cuts, solve_lower_bound, LowerBound, DEFAULT_CUT_BUDGET};
use divcode::lp::{write_lp_format, MipLimits};
use divcode::master::{
    demands_of, design_all_destinations, design_mode_sweep, verify_plan, CgLimits, NetworkPlan,
};
use divcode::netgraph::{fixtures, parse_topology, Network};
use divcode::pricing::{pricing_model, CodingMode, PricingRequest};
use divcode::traffic::{generate_gravity, NodeWeights, TrafficMatrix};

use crate::{DesignArgs, Fixture, FixtureArgs, GenTrafficArgs, InstanceArgs, LowerboundArgs, OracleArgs, VerifyArgs};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_network(path: &Path) -> Result<Network> {
    parse_topology(&read(path)?).with_context(|| format!("parsing topology {}", path.display()))
}

/// Network and traffic, restricted to `--dest` when given.
fn load(a: &InstanceArgs) -> Result<(Network, TrafficMatrix)> {
    let net = load_network(&a.topology)?;
    let tm = TrafficMatrix::read_csv(read(&a.traffic)?.as_bytes())
        .with_context(|| format!("parsing traffic {}", a.traffic.display()))?;
    for (s, d, _) in tm.iter() {
        for n in [s, d] {
            net.node(n).with_context(|| format!("traffic names unknown node {n}"))?;
        }
    }
    let Some(dest) = &a.dest else {
        return Ok((net, tm));
    };
    net.node(dest)?;
    let mut only = TrafficMatrix::new();
    for (s, d, u) in tm.iter().filter(|(_, d, _)| d == dest) {
        only.add(s, d, u)?;
    }
    if only.is_empty() {
        log::warn!("destination {dest} has no inbound demand; the plan is empty");
    }
    Ok((net, only))
}

fn time_limit(a: &InstanceArgs) -> Result<Option<Duration>> {
    a.time_limit
        .map(|t| Duration::try_from_secs_f64(t).context("time limit must be a nonnegative number of seconds"))
        .transpose()
}

fn mip_limits(a: &InstanceArgs) -> Result<MipLimits> {
    let mut l = MipLimits::default();
    if let Some(t) = time_limit(a)? {
        l.time_limit = t;
    }
    Ok(l)
}

fn write_out(dir: Option<&Path>, name: &str, contents: &[u8]) -> Result<()> {
    if let Some(dir) = dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn plan_summary(plan: &NetworkPlan) -> serde_json::Value {
    json!({
        "mode": plan.mode,
        "total_cost": plan.total_cost,
        "primary_cost": plan.primary_cost,
        "scap_percent": plan.scap,
        "generated_columns": plan.generated_columns(),
        "destinations": plan.destinations.iter().map(|p| json!({
            "destination": p.destination,
            "lp_objective": p.lp_objective,
            "ilp_objective": p.ilp_objective,
            "gap": p.gap,
            "termination": p.termination,
            "iterations": p.iterations,
        })).collect::<Vec<_>>(),
        "errors": plan.errors,
    })
}

pub fn design(a: DesignArgs, json_out: bool) -> Result<ExitCode> {
    let (net, tm) = load(&a.instance)?;
    let mut limits = CgLimits {
        max_iterations: a.max_iter,
        rc_tolerance: a.tolerance,
        ..CgLimits::default()
    };
    if let Some(t) = time_limit(&a.instance)? {
        limits = limits.with_time_limit(t);
    }
    let plans = if a.sweep {
        design_mode_sweep(&net, &tm, &limits)
    } else {
        vec![design_all_destinations(&net, &tm, a.coding.into(), &limits)]
    };
    let out = a.instance.out.as_deref();
    for plan in &plans {
        let suffix = if a.sweep { format!("_{}", plan.mode) } else { String::new() };
        write_out(out, &format!("plan{suffix}.json"), plan.to_json().as_bytes())?;
        let mut buf = Vec::new();
        plan.write_summary_csv(&mut buf)?;
        write_out(out, &format!("summary{suffix}.csv"), &buf)?;
        buf.clear();
        plan.write_trace_csv(&mut buf)?;
        write_out(out, &format!("trace{suffix}.csv"), &buf)?;
        buf.clear();
        plan.write_degree_csv(&mut buf)?;
        write_out(out, &format!("degree{suffix}.csv"), &buf)?;
        if a.dump_models {
            for p in &plan.destinations {
                let d = net.node(&p.destination)?;
                let duals = p
                    .duals
                    .iter()
                    .map(|(n, v)| Ok((net.node(n)?, *v)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                let model = pricing_model(&PricingRequest::new(&net, d, duals, plan.mode))?;
                write_out(
                    out,
                    &format!("pricing{suffix}_{}.lp", p.destination),
                    write_lp_format(&model).as_bytes(),
                )?;
            }
        }
    }
    let run = json!({
        "topology": a.instance.topology,
        "traffic": a.instance.traffic,
        "dest": a.instance.dest,
        "coding": if a.sweep { "sweep".to_string() } else { CodingMode::from(a.coding).to_string() },
        "max_iter": a.max_iter,
        "tolerance": a.tolerance,
        "seed": a.seed,
    });
    write_out(out, "run.json", serde_json::to_string_pretty(&run)?.as_bytes())?;

    if json_out {
        print_json(&plans.iter().map(plan_summary).collect::<Vec<_>>())?;
    } else {
        for plan in &plans {
            println!(
                "{}: total {} primary {} SCaP {:.1}% columns {}",
                plan.mode,
                plan.total_cost,
                plan.primary_cost,
                plan.scap,
                plan.generated_columns()
            );
            for p in &plan.destinations {
                let objectives: Vec<String> = p.trace.iter().map(|e| format!("{}", e.objective)).collect();
                println!(
                    "  {:<8} lp {:<10} ilp {:<10} gap {:.4}% trace {}",
                    p.destination,
                    p.lp_objective,
                    p.ilp_objective,
                    100.0 * p.gap,
                    objectives.join(" -> ")
                );
            }
            for e in &plan.errors {
                println!("  {:<8} error: {}", e.destination, e.error);
            }
        }
    }
    let failed = plans.iter().any(|p| !p.errors.is_empty());
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

#[derive(Serialize)]
struct BoundRow {
    destination: String,
    max_cut: usize,
    cut_count: usize,
    #[serde(flatten)]
    bound: LowerBound,
}

pub fn lowerbound(a: LowerboundArgs, json_out: bool) -> Result<ExitCode> {
    if a.max_cut_size == 0 {
        bail!("--max-cut-size must be at least 1");
    }
    let (net, tm) = load(&a.instance)?;
    let limits = mip_limits(&a.instance)?;
    let mut rows = Vec::new();
    for dest in tm.destinations() {
        let d = net.node(&dest)?;
        let dem = demands_of(&net, &tm.aggregate_to_destination(&dest))?;
        let cf = enumerate_cuts(&net, d, &dem, a.max_cut_size, DEFAULT_CUT_BUDGET);
        let bound = solve_lower_bound(&net, &cf, &dem, limits)?;
        rows.push(BoundRow {
            destination: dest,
            max_cut: a.max_cut_size,
            cut_count: cf.cuts.len(),
            bound,
        });
    }
    let total: f64 = rows.iter().map(|r| r.bound.bound).sum();
    let report = json!({ "max_cut": a.max_cut_size, "total_bound": total, "destinations": rows });
    let out = a.instance.out.as_deref();
    write_out(out, "lowerbound.json", serde_json::to_string_pretty(&report)?.as_bytes())?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["destination", "max_cut", "cut_count", "bound", "cut_bound", "primary_cost", "approximate"])?;
    for r in &rows {
        wtr.write_record([
            r.destination.clone(),
            r.max_cut.to_string(),
            r.cut_count.to_string(),
            r.bound.bound.to_string(),
            r.bound.cut_bound.to_string(),
            r.bound.primary_cost.to_string(),
            r.bound.approximate.to_string(),
        ])?;
    }
    write_out(out, "lowerbound.csv", &wtr.into_inner()?)?;
    if json_out {
        print_json(&report)?;
    } else {
        println!("lower bound (cuts up to {} spans): {total}", a.max_cut_size);
        for r in &rows {
            println!("  {:<8} {} ({} cuts)", r.destination, r.bound.bound, r.cut_count);
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn verify(a: VerifyArgs, json_out: bool) -> Result<ExitCode> {
    let net = load_network(&a.topology)?;
    let plan = NetworkPlan::from_json(&read(&a.plan)?).with_context(|| format!("parsing plan {}", a.plan.display()))?;
    let failures = verify_plan(&net, &plan)?;
    let checked: usize = plan.destinations.iter().map(|p| p.columns.len()).sum();
    if json_out {
        let list: Vec<_> = failures
            .iter()
            .map(|(d, id, reasons)| json!({"destination": d, "column": id, "reasons": reasons}))
            .collect();
        print_json(&json!({"checked": checked, "failures": list}))?;
    } else {
        println!("checked {checked} placed columns, {} failing", failures.len());
        for (d, id, reasons) in &failures {
            println!("  {d} column {id}: {}", reasons.join("; "));
        }
    }
    Ok(if failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

pub fn gen_traffic(a: GenTrafficArgs) -> Result<ExitCode> {
    let weights = match (&a.weights, &a.topology) {
        (Some(w), _) => NodeWeights::read_csv(read(w)?.as_bytes())?,
        (None, Some(t)) => {
            let net = load_network(t)?;
            NodeWeights::uniform(net.nodes().map(|v| net.name(v)))
        }
        (None, None) => bail!("either --weights or --topology is required"),
    };
    let tm = generate_gravity(&weights, a.demands, a.seed)?.split_granularity(a.split)?;
    let mut buf = Vec::new();
    tm.write_csv(&mut buf)?;
    match &a.out {
        Some(p) => fs::write(p, &buf).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{}", String::from_utf8(buf)?),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn oracle(a: OracleArgs, json_out: bool) -> Result<ExitCode> {
    let (net, tm) = load(&a.instance)?;
    let opts = Enumeration {
        max_nodes: a.max_nodes,
        limits: mip_limits(&a.instance)?,
        ..Enumeration::default()
    };
    let mut rows = Vec::new();
    for dest in tm.destinations() {
        let d = net.node(&dest)?;
        let dem = demands_of(&net, &tm.aggregate_to_destination(&dest))?;
        let r = oracle_optimum(&net, &dem, d, &opts)?;
        rows.push(json!({
            "destination": dest,
            "objective": r.objective,
            "groups_enumerated": r.pool.len(),
            "placed_groups": r.placed().count(),
            "proven": r.proven,
        }));
    }
    let total: f64 = rows.iter().filter_map(|r| r["objective"].as_f64()).sum();
    let report = json!({ "total_cost": total, "destinations": rows });
    let out = a.instance.out.as_deref();
    write_out(out, "oracle.json", serde_json::to_string_pretty(&report)?.as_bytes())?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["destination", "objective", "groups_enumerated", "placed_groups", "proven"])?;
    for r in &rows {
        wtr.write_record([
            r["destination"].as_str().unwrap_or_default().to_string(),
            r["objective"].to_string(),
            r["groups_enumerated"].to_string(),
            r["placed_groups"].to_string(),
            r["proven"].to_string(),
        ])?;
    }
    write_out(out, "oracle.csv", &wtr.into_inner()?)?;
    if json_out {
        print_json(&report)?;
    } else {
        println!("oracle optimum (SDC): {total}");
        for r in &rows {
            println!("  {:<8} {}", r["destination"].as_str().unwrap_or_default(), r["objective"]);
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn aps(a: InstanceArgs, json_out: bool) -> Result<ExitCode> {
    let (net, tm) = load(&a)?;
    let plan = aps_plan(&net, &tm)?;
    let out = a.out.as_deref();
    write_out(out, "aps.json", serde_json::to_string_pretty(&plan)?.as_bytes())?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["destination", "total_cost"])?;
    for (d, c) in plan.per_destination() {
        wtr.write_record([d, c.to_string()])?;
    }
    wtr.write_record(["ALL".to_string(), plan.total_cost.to_string()])?;
    write_out(out, "aps.csv", &wtr.into_inner()?)?;
    if json_out {
        print_json(&json!({
            "total_cost": plan.total_cost,
            "primary_cost": plan.primary_cost,
            "scap_percent": plan.scap,
            "per_destination": plan.per_destination(),
        }))?;
    } else {
        println!("1+1 APS: total {} primary {} SCaP {:.1}%", plan.total_cost, plan.primary_cost, plan.scap);
    }
    Ok(ExitCode::SUCCESS)
}

pub fn fixture(a: FixtureArgs) -> Result<ExitCode> {
    let (topology, traffic) = match a.name {
        Fixture::Example1 => (fixtures::EXAMPLE1.to_string(), "S1,D,1\nS2,D,1\n".to_string()),
        Fixture::Diamond => (fixtures::diamond().to_topology(), "s,t,1\n".to_string()),
        Fixture::Butterfly => (fixtures::BUTTERFLY.to_string(), "s,t,2\n".to_string()),
        Fixture::SixNode => {
            let net = fixtures::six_node();
            (fixtures::SIX_NODE.to_string(), gravity_csv(&net, 30)?)
        }
        Fixture::Nsfnet14 => {
            let net = fixtures::nsfnet14();
            (fixtures::NSFNET14.to_string(), gravity_csv(&net, 3000)?)
        }
    };
    if a.traffic {
        if traffic.starts_with("source,") {
            print!("{traffic}");
        } else {
            print!("source,destination,units\n{traffic}");
        }
    } else {
        print!("{topology}");
    }
    Ok(ExitCode::SUCCESS)
}

/// Uniform-weight gravity traffic with seed 1.
fn gravity_csv(net: &Network, demands: u64) -> Result<String> {
    let tm = generate_gravity(&NodeWeights::uniform(net.nodes().map(|v| net.name(v))), demands, 1)?;
    let mut buf = Vec::new();
    tm.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf)?)
}

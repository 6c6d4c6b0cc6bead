//! Coding structures, pricing and column generation against exhaustive
//! references.

mod common;

use std::collections::BTreeMap;
use std::time::Duration;

use common::brute::{brute_structure_cost, Rule};
use common::{random_demands, random_network};
use divcode::baselines::{aps_plan, enumerate_all_groups, Enumeration};
use divcode::coding::{gf2_rank, hall_check, is_decodable, verify_group, BitRow, ReceivedVector};
use divcode::master::{
    design_all_destinations, run_column_generation, solve_master_lp, verify_plan, CgLimits, Demands,
};
use divcode::netgraph::{fixtures, Network, NodeId};
use divcode::pricing::{price, route_fixed, CodingMode, PricingRequest, PricingStatus};
use divcode::traffic::TrafficMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixed(net: &Network, d: NodeId, signals: &[NodeId], mode: CodingMode) -> Option<f64> {
    let mut counts = BTreeMap::new();
    for &s in signals {
        *counts.entry(s).or_insert(0u32) += 1;
    }
    let mut req = PricingRequest::new(net, d, BTreeMap::new(), mode);
    req.fixed_counts = Some(counts);
    route_fixed(&req).unwrap().map(|g| {
        assert!(verify_group(&g.structure, net).passed());
        g.cost
    })
}

fn rule(mode: CodingMode) -> Rule {
    match mode {
        CodingMode::Sdc => Rule::Systematic,
        CodingMode::Nsdc => Rule::Disjoint,
        CodingMode::Cdc => Rule::Semantic,
    }
}

#[test]
fn butterfly_needs_coherent_sharing() {
    let net = fixtures::butterfly();
    let (s, t) = (net.node("s").unwrap(), net.node("t").unwrap());
    for mode in CodingMode::ALL {
        let brute = brute_structure_cost(&net, t, &[s, s], rule(mode));
        assert_eq!(fixed(&net, t, &[s, s], mode), brute, "{mode:?}");
    }
    assert_eq!(brute_structure_cost(&net, t, &[s, s], Rule::Semantic), Some(18.0));
}

#[test]
fn example_one_structures() {
    let net = fixtures::example1();
    let d = net.node("D").unwrap();
    let signals = [net.node("S1").unwrap(), net.node("S2").unwrap()];
    for mode in CodingMode::ALL {
        assert_eq!(fixed(&net, d, &signals, mode), brute_structure_cost(&net, d, &signals, rule(mode)));
    }
    assert_eq!(fixed(&net, d, &signals, CodingMode::Sdc), Some(15.0));
}

#[test]
fn pairs_of_signals_on_random_networks() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut compared = 0;
    for _ in 0..6 {
        let net = random_network(&mut rng, 5, 0.5);
        let d = NodeId(0);
        if net.nodal_degree(d) < 3 {
            continue;
        }
        let a = NodeId(rng.gen_range(1..5));
        let b = NodeId(rng.gen_range(1..5));
        for mode in CodingMode::ALL {
            assert_eq!(
                fixed(&net, d, &[a, b], mode),
                brute_structure_cost(&net, d, &[a, b], rule(mode)),
                "{mode:?} on\n{}",
                net.to_topology()
            );
        }
        compared += 1;
    }
    assert!(compared >= 3, "only {compared} networks had a degree-3 destination");
}

fn reference_rank(rows: &[u64]) -> usize {
    // Size of the span, counted by closing under XOR.
    let mut span = std::collections::BTreeSet::from([0u64]);
    for &r in rows {
        let next: Vec<u64> = span.iter().map(|v| v ^ r).collect();
        span.extend(next);
    }
    span.len().trailing_zeros() as usize
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_matches_span_size(rows in prop::collection::vec(0u64..64, 0..8)) {
        let bits: Vec<BitRow> = rows.iter().map(|&r| BitRow::from_indices(6, (0..6).filter(|i| r >> i & 1 == 1))).collect();
        prop_assert_eq!(gf2_rank(&bits), reference_rank(&rows));
    }

    #[test]
    fn decodability_is_full_rank(sets in prop::collection::vec(prop::collection::btree_set(0usize..4, 0..4), 1..6)) {
        let rows: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let lists: Vec<&[usize]> = rows.iter().map(|r| r.as_slice()).collect();
        let rv = ReceivedVector::from_lists(4, &lists);
        let masks: Vec<u64> = rows.iter().map(|r| r.iter().fold(0, |m, &i| m ^ (1 << i))).collect();
        prop_assert_eq!(is_decodable(&rv), reference_rank(&masks) == 4);
        // The matching condition is necessary for full rank.
        if let Ok(h) = hall_check(&rv) {
            if is_decodable(&rv) {
                prop_assert!(h);
            }
        }
    }
}

fn random_duals(rng: &mut ChaCha8Rng, net: &Network, d: NodeId) -> BTreeMap<NodeId, f64> {
    net.nodes()
        .filter(|&v| v != d)
        .filter_map(|v| rng.gen_bool(0.7).then(|| (v, rng.gen_range(0..30) as f64)))
        .collect()
}

#[test]
fn sdc_pricing_finds_the_best_enumerated_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut improving = 0;
    for _ in 0..12 {
        let n = rng.gen_range(4..=6);
        let net = random_network(&mut rng, n, 0.4);
        let d = NodeId(0);
        let duals = random_duals(&mut rng, &net, d);
        let req = PricingRequest::new(&net, d, duals.clone(), CodingMode::Sdc);
        let got = price(&req).unwrap();
        assert_ne!(got.status, PricingStatus::Inconclusive);
        let opts = Enumeration {
            sources: Some(duals.keys().copied().collect()),
            ..Default::default()
        };
        let pool = enumerate_all_groups(&net, d, &opts).unwrap();
        let best = pool
            .columns()
            .iter()
            .map(|g| req.reduced_cost(g))
            .fold(f64::INFINITY, f64::min);
        match got.reduced_cost {
            Some(rc) => {
                improving += 1;
                assert!((rc - best).abs() < 1e-9, "{rc} vs {best}");
            }
            None => assert!(best >= -req.rc_tolerance, "missed {best}"),
        }
    }
    assert!(improving > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn column_generation_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, 5, 0.4);
        let d = NodeId(0);
        let dem = random_demands(&mut rng, &net, d, 3);
        let limits = CgLimits::default().with_time_limit(Duration::from_secs(60));
        let out = run_column_generation(&net, &dem, d, CodingMode::Sdc, &limits).unwrap();
        prop_assert!(out.termination.proven());
        prop_assert!(out.lp.objective <= out.ilp.objective + 1e-9);
        prop_assert!(out.gap() >= -1e-12);
        let objectives: Vec<f64> = out.trace.iter().map(|e| e.objective).collect();
        prop_assert!(objectives.windows(2).all(|w| w[1] <= w[0] + 1e-9), "{:?}", objectives);
        let relaxed = solve_master_lp(&net, &out.pool, &dem).unwrap();
        prop_assert!((relaxed.objective - out.lp.objective).abs() < 1e-6);
        let mut covered: Demands = BTreeMap::new();
        for (g, n) in out.placed() {
            prop_assert!(verify_group(&g.structure, &net).passed());
            g.structure.validate(&net).unwrap();
            for (&f, &c) in &g.counts {
                *covered.entry(f).or_default() += c as u64 * n;
            }
        }
        for (f, &u) in &dem {
            prop_assert!(covered.get(f).copied().unwrap_or(0) >= u);
        }
        let cost: f64 = out.placed().map(|(g, n)| g.cost * n as f64).sum();
        prop_assert!((cost - out.ilp.objective).abs() < 1e-9);
    }
}

#[test]
fn degree_two_destination_reduces_to_protection_pairs() {
    let net = fixtures::diamond();
    assert_eq!(net.nodal_degree_of("s").unwrap(), 2);
    let mut tm = TrafficMatrix::new();
    tm.add("u", "s", 2).unwrap();
    tm.add("t", "s", 1).unwrap();
    let plan = design_all_destinations(&net, &tm, CodingMode::Sdc, &CgLimits::default());
    assert!(plan.errors.is_empty());
    assert_eq!(plan.total_cost, aps_plan(&net, &tm).unwrap().total_cost);
    assert!(verify_plan(&net, &plan).unwrap().is_empty());
}

//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod brute;
pub mod textbook;

use divcode::master::Demands;
use divcode::netgraph::{Network, NodeId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A ring over `n` nodes plus random chords, lengths 1..=9.
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, chord_p: f64) -> Network {
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut spans = Vec::new();
    for i in 0..n {
        spans.push((i, (i + 1) % n));
    }
    for i in 0..n {
        for j in i + 2..n {
            if (i, j) != (0, n - 1) && rng.gen_bool(chord_p) {
                spans.push((i, j));
            }
        }
    }
    let list: Vec<(&str, &str, f64)> = spans
        .iter()
        .map(|&(a, b)| (names[a].as_str(), names[b].as_str(), rng.gen_range(1..10) as f64))
        .collect();
    Network::from_spans(names.iter().map(String::as_str), list).expect("valid random network")
}

/// Up to `max_units` units from each node but `d`, some of them zero.
pub fn random_demands(rng: &mut ChaCha8Rng, net: &Network, d: NodeId, max_units: u64) -> Demands {
    net.nodes()
        .filter(|&v| v != d)
        .filter_map(|v| {
            let u = rng.gen_range(0..=max_units);
            (u > 0).then_some((v, u))
        })
        .collect()
}

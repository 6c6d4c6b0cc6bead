//! Exhaustive graph searches: simple paths, disjoint pairs, cuts and the
//! cheapest coding structure for a handful of signals.

use std::collections::{BTreeSet, HashSet};

use divcode::master::Demands;
use divcode::netgraph::{LinkId, Network, NodeId, SpanId};

/// Every simple directed path from `s` to `d`, as link lists.
pub fn simple_paths(net: &Network, s: NodeId, d: NodeId) -> Vec<Vec<LinkId>> {
    fn walk(net: &Network, v: NodeId, d: NodeId, seen: &mut Vec<bool>, cur: &mut Vec<LinkId>, out: &mut Vec<Vec<LinkId>>) {
        if v == d {
            out.push(cur.clone());
            return;
        }
        for &l in net.out_links(v) {
            let w = net.link(l).head;
            if !seen[w.0] {
                seen[w.0] = true;
                cur.push(l);
                walk(net, w, d, seen, cur, out);
                cur.pop();
                seen[w.0] = false;
            }
        }
    }
    let mut seen = vec![false; net.num_nodes()];
    seen[s.0] = true;
    let mut out = Vec::new();
    walk(net, s, d, &mut seen, &mut Vec::new(), &mut out);
    out
}

pub fn length(net: &Network, links: &[LinkId]) -> f64 {
    links.iter().map(|&l| net.length(l)).sum()
}

fn spans(links: &[LinkId]) -> HashSet<SpanId> {
    links.iter().map(|l| l.span()).collect()
}

fn disjoint(a: &[LinkId], b: &[LinkId]) -> bool {
    let sa = spans(a);
    b.iter().all(|l| !sa.contains(&l.span()))
}

/// Unordered pairs of span-disjoint simple paths.
pub fn disjoint_pairs(net: &Network, s: NodeId, d: NodeId) -> Vec<(Vec<LinkId>, Vec<LinkId>)> {
    let paths = simple_paths(net, s, d);
    let mut out = Vec::new();
    for i in 0..paths.len() {
        for j in i + 1..paths.len() {
            if disjoint(&paths[i], &paths[j]) {
                out.push((paths[i].clone(), paths[j].clone()));
            }
        }
    }
    out
}

/// Cheapest total length of two span-disjoint paths.
pub fn brute_disjoint_pair(net: &Network, s: NodeId, d: NodeId) -> Option<f64> {
    disjoint_pairs(net, s, d)
        .iter()
        .map(|(a, b)| length(net, a) + length(net, b))
        .min_by(f64::total_cmp)
}

fn reaches(net: &Network, from: NodeId, d: NodeId, removed: &HashSet<usize>) -> bool {
    let mut seen = vec![false; net.num_nodes()];
    let mut stack = vec![from];
    seen[from.0] = true;
    while let Some(v) = stack.pop() {
        if v == d {
            return true;
        }
        for &l in net.out_links(v) {
            let w = net.link(l).head;
            if !seen[w.0] && !removed.contains(&l.span().0) {
                seen[w.0] = true;
                stack.push(w);
            }
        }
    }
    false
}

fn cut_off(net: &Network, d: NodeId, dem: &Demands, removed: &HashSet<usize>) -> BTreeSet<NodeId> {
    dem.keys().copied().filter(|&f| !reaches(net, f, d, removed)).collect()
}

/// Span sets of size `1..=k` separating some demand source, with no proper
/// subset separating the same sources. Returned as sorted span indices.
pub fn brute_cuts(net: &Network, d: NodeId, dem: &Demands, k: usize) -> BTreeSet<(Vec<usize>, BTreeSet<NodeId>)> {
    let m = net.num_spans();
    assert!(m <= 20);
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << m) {
        let members: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        if members.len() > k {
            continue;
        }
        let sep = cut_off(net, d, dem, &members.iter().copied().collect());
        if sep.is_empty() {
            continue;
        }
        let mut sub = (mask - 1) & mask;
        let mut minimal = true;
        while sub != mask {
            let fewer: HashSet<usize> = (0..m).filter(|i| sub >> i & 1 == 1).collect();
            if cut_off(net, d, dem, &fewer) == sep {
                minimal = false;
                break;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & mask;
        }
        if minimal {
            out.insert((members, sep));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// N raw subgroups plus one parity subgroup over every signal; paths in
    /// different subgroups share no span.
    Systematic,
    /// Any subgroup layout; paths in different subgroups share no span.
    Disjoint,
    /// Any subgroup layout; only decodability under every single failure.
    Semantic,
}

fn gf2_rank(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i] >> bit & 1 == 1 {
                rows[i] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

/// Restricted growth strings of length `n`: every set partition once.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let top = cur.iter().max().map_or(0, |m| m + 1);
        for b in 0..=top {
            cur.push(b);
            grow(cur, n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

/// Cheapest coding structure carrying one signal from each entry of
/// `signals` to `d`: two simple span-disjoint paths per signal, grouped into
/// subgroups that pay for the union of their links.
pub fn brute_structure_cost(net: &Network, d: NodeId, signals: &[NodeId], rule: Rule) -> Option<f64> {
    let n = signals.len();
    assert!((1..=3).contains(&n));
    let options: Vec<Vec<(Vec<LinkId>, Vec<LinkId>)>> = signals.iter().map(|&s| disjoint_pairs(net, s, d)).collect();
    let layouts: Vec<Vec<usize>> = partitions(2 * n)
        .into_iter()
        .filter(|p| (0..n).all(|i| p[2 * i] != p[2 * i + 1]))
        .filter(|p| rule != Rule::Systematic || systematic_shape(p, n))
        .collect();
    let mut best: Option<f64> = None;
    let mut choice = vec![0usize; n];
    loop {
        let paths: Vec<&Vec<LinkId>> = (0..n)
            .flat_map(|i| {
                let (a, b) = &options[i][choice[i]];
                [a, b]
            })
            .collect();
        for layout in &layouts {
            if let Some(c) = evaluate(net, &paths, layout, n, rule) {
                if best.map_or(true, |b| c < b) {
                    best = Some(c);
                }
            }
        }
        // Odometer over the pair choice of each signal.
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            if options[i].is_empty() {
                return None;
            }
            choice[i] += 1;
            if choice[i] < options[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Every signal has one path alone in a block, and one shared block holds
/// the other path of every signal.
fn systematic_shape(layout: &[usize], n: usize) -> bool {
    let blocks = layout.iter().max().map_or(0, |m| m + 1);
    if blocks != n + 1 {
        return false;
    }
    let size = |b: usize| layout.iter().filter(|&&x| x == b).count();
    let Some(parity) = (0..blocks).find(|&b| size(b) == n) else {
        return false;
    };
    (0..n).all(|i| {
        let (x, y) = (layout[2 * i], layout[2 * i + 1]);
        (x == parity && size(y) == 1) || (y == parity && size(x) == 1)
    }) || n == 1
}

fn evaluate(net: &Network, paths: &[&Vec<LinkId>], layout: &[usize], n: usize, rule: Rule) -> Option<f64> {
    let blocks = layout.iter().max().map_or(0, |m| m + 1);
    if rule != Rule::Semantic {
        for i in 0..paths.len() {
            for j in i + 1..paths.len() {
                if layout[i] != layout[j] && !disjoint(paths[i], paths[j]) {
                    return None;
                }
            }
        }
    }
    let decodes = |failed: Option<usize>| {
        let mut rows = vec![0u64; blocks];
        for (p, links) in paths.iter().enumerate() {
            if failed.map_or(true, |f| links.iter().all(|l| l.span().0 != f)) {
                rows[layout[p]] ^= 1 << (p / 2);
            }
        }
        gf2_rank(rows) == n
    };
    if !decodes(None) || !(0..net.num_spans()).all(|f| decodes(Some(f))) {
        return None;
    }
    let cost = (0..blocks)
        .map(|b| {
            let used: BTreeSet<LinkId> = paths
                .iter()
                .enumerate()
                .filter(|(p, _)| layout[*p] == b)
                .flat_map(|(_, l)| l.iter().copied())
                .collect();
            used.iter().map(|&l| net.length(l)).sum::<f64>()
        })
        .sum();
    Some(cost)
}

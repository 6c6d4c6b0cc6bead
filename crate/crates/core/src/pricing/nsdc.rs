//! Nonsystematic coding models, with optional coherence-based span sharing.
//!
//! Demand slot `i` owns paths `2i` and `2i + 1`; there are as many subgroup
//! slots as paths. Path `p` may only join subgroups `0..=p`, which removes
//! relabelings of the subgroups without cutting off any structure.

use std::collections::HashMap;

use super::{CodingMode, PricingRequest};
use crate::coding::{CodedPath, CodingStructure};
use crate::lp::{Sense, VarId};
use crate::netgraph::{LinkId, NodeId};
use crate::Lp;

pub(super) struct CodedLayout {
    destination: NodeId,
    sources: Vec<NodeId>,
    slots: usize,
    /// `sigma[i][k]`: slot `i` is a connection from `sources[k]`.
    sigma: Vec<Vec<VarId>>,
    /// `route[p][e]`: path `p` uses link `e`.
    route: Vec<Vec<VarId>>,
    /// `member[p][s]`: path `p` belongs to subgroup `s <= p`.
    member: Vec<Vec<VarId>>,
    links_out: Vec<Vec<LinkId>>,
    heads: Vec<NodeId>,
}

fn complement(p: usize) -> usize {
    p ^ 1
}

fn demand(p: usize) -> usize {
    p / 2
}

pub(super) fn build(req: &PricingRequest, sources: &[NodeId]) -> (Lp, CodedLayout) {
    let net = req.net;
    let d = req.destination;
    let coherent = req.mode == CodingMode::Cdc;
    let fixed: Option<Vec<usize>> = req.fixed_counts.as_ref().map(|fc| {
        sources
            .iter()
            .enumerate()
            .flat_map(|(k, f)| std::iter::repeat(k).take(fc.get(f).copied().unwrap_or(0) as usize))
            .collect()
    });
    let slots = fixed.as_ref().map_or(req.max_group(), |f| f.len());
    let paths = 2 * slots;
    let mut lp = Lp::new();

    let sigma: Vec<Vec<VarId>> = (0..slots)
        .map(|i| {
            sources
                .iter()
                .enumerate()
                .map(|(k, &f)| {
                    let v = lp.add_binary(format!("sigma_{}_{i}", net.name(f)));
                    lp.set_priority(v, 3);
                    lp.set_objective(v, -req.dual(f));
                    if let Some(fx) = &fixed {
                        let val = if fx[i] == k { 1.0 } else { 0.0 };
                        lp.set_bounds(v, Some(val), Some(val));
                    }
                    v
                })
                .collect()
        })
        .collect();
    let route: Vec<Vec<VarId>> = (0..paths)
        .map(|p| {
            net.link_ids()
                .map(|l| lp.add_binary(format!("x_{p}_{}", net.link_label(l))))
                .collect()
        })
        .collect();
    let member: Vec<Vec<VarId>> = (0..paths)
        .map(|p| {
            (0..=p)
                .map(|s| {
                    let v = lp.add_binary(format!("n_{p}_{s}"));
                    lp.set_priority(v, 2);
                    v
                })
                .collect()
        })
        .collect();
    let topo: Vec<Vec<VarId>> = (0..paths)
        .map(|s| {
            net.link_ids()
                .map(|l| {
                    let v = lp.add_binary(format!("t_{s}_{}", net.link_label(l)));
                    lp.set_objective(v, net.length(l));
                    v
                })
                .collect()
        })
        .collect();
    let mut coded: HashMap<(usize, usize), VarId> = HashMap::new();
    for p in 0..paths {
        for q in p + 1..paths {
            if q != complement(p) {
                coded.insert((p, q), lp.add_binary(format!("m_{p}_{q}")));
            }
        }
    }
    let m = |p: usize, q: usize| -> VarId { coded[&(p.min(q), p.max(q))] };
    let mut related: HashMap<(usize, usize), VarId> = HashMap::new();
    for p in 0..paths {
        for f in (0..slots).filter(|&f| f != demand(p)) {
            related.insert((p, f), lp.add_binary(format!("r_{p}_{f}")));
        }
    }

    // At most one source per slot, bounded group size.
    for (i, row) in sigma.iter().enumerate() {
        lp.add_constraint(format!("slot_{i}"), row.iter().map(|&v| (v, 1.0)), Sense::Le, 1.0);
    }
    lp.add_constraint(
        "group_size",
        sigma.iter().flatten().map(|&v| (v, 1.0)),
        Sense::Le,
        req.max_group() as f64,
    );
    if fixed.is_none() {
        // Used slots come first, ordered by source index.
        for i in 1..slots {
            let row = sigma[i - 1]
                .iter()
                .map(|&v| (v, 1.0))
                .chain(sigma[i].iter().map(|&v| (v, -1.0)));
            lp.add_constraint(format!("slot_order_{i}"), row, Sense::Ge, 0.0);
            for k in 0..sources.len() {
                let row = std::iter::once((sigma[i][k], 1.0)).chain((0..=k).map(|k2| (sigma[i - 1][k2], -1.0)));
                lp.add_constraint(format!("slot_source_order_{i}_{k}"), row, Sense::Le, 0.0);
            }
        }
    }

    // Unit flow from the slot's source to the destination on both paths.
    let source_index: HashMap<NodeId, usize> = sources.iter().enumerate().map(|(k, &f)| (f, k)).collect();
    for p in 0..paths {
        let i = demand(p);
        for v in net.nodes() {
            let mut row: Vec<(VarId, f64)> = net.in_links(v).iter().map(|l| (route[p][l.0], 1.0)).collect();
            row.extend(net.out_links(v).iter().map(|l| (route[p][l.0], -1.0)));
            if v == d {
                row.extend(sigma[i].iter().map(|&s| (s, -1.0)));
            } else if let Some(&k) = source_index.get(&v) {
                row.push((sigma[i][k], 1.0));
            }
            lp.add_constraint(format!("flow_{p}_{}", net.name(v)), row, Sense::Eq, 0.0);
        }
    }

    for p in 0..paths {
        lp.add_constraint(
            format!("one_subgroup_{p}"),
            member[p].iter().map(|&v| (v, 1.0)),
            Sense::Eq,
            1.0,
        );
    }
    // A subgroup is labelled by its lowest path; paths of an unused slot sit
    // alone in their own subgroups.
    for p in 0..paths {
        for s in 0..p {
            lp.add_constraint(
                format!("label_{p}_{s}"),
                [(member[p][s], 1.0), (member[s][s], -1.0)],
                Sense::Le,
                0.0,
            );
        }
        let row = std::iter::once((member[p][p], 1.0)).chain(sigma[demand(p)].iter().map(|&v| (v, 1.0)));
        lp.add_constraint(format!("unused_alone_{p}"), row, Sense::Ge, 1.0);
    }
    for i in 0..slots {
        let (a, b) = (2 * i, 2 * i + 1);
        for s in 0..=a {
            lp.add_constraint(
                format!("split_{i}_{s}"),
                [(member[a][s], 1.0), (member[b][s], 1.0)],
                Sense::Le,
                1.0,
            );
        }
    }

    // Subgroup topology is the union of its paths.
    for p in 0..paths {
        for s in 0..=p {
            for l in net.link_ids() {
                lp.add_constraint(
                    format!("topo_{p}_{s}_{}", l.0),
                    [(topo[s][l.0], 1.0), (route[p][l.0], -1.0), (member[p][s], -1.0)],
                    Sense::Ge,
                    -1.0,
                );
            }
        }
        if req.strengthen {
            for l in net.link_ids() {
                let row = (0..=p)
                    .map(|s| (topo[s][l.0], 1.0))
                    .chain(std::iter::once((route[p][l.0], -1.0)));
                lp.add_constraint(format!("topo_cover_{p}_{}", l.0), row, Sense::Ge, 0.0);
            }
        }
    }

    if req.strengthen && !coherent {
        // The two paths of a demand sit in different subgroups.
        for sp in net.span_ids() {
            let [a, b] = sp.links();
            for i in 0..slots {
                let row = [2 * i, 2 * i + 1]
                    .into_iter()
                    .flat_map(|p| [(route[p][a.0], 1.0), (route[p][b.0], 1.0)]);
                lp.add_constraint(format!("pair_disjoint_{}_{i}", sp.0), row, Sense::Le, 1.0);
            }
        }
    }

    if !coherent {
        for sp in net.span_ids() {
            let [a, b] = sp.links();
            for s1 in 0..paths {
                for s2 in s1 + 1..paths {
                    lp.add_constraint(
                        format!("disjoint_{}_{s1}_{s2}", sp.0),
                        [
                            (topo[s1][a.0], 1.0),
                            (topo[s2][a.0], 1.0),
                            (topo[s1][b.0], 1.0),
                            (topo[s2][b.0], 1.0),
                        ],
                        Sense::Le,
                        1.0,
                    );
                }
            }
        }
    }

    // Coded-together indicator, tied in both directions to the memberships.
    for p in 0..paths {
        for q in p + 1..paths {
            if q == complement(p) {
                continue;
            }
            let mv = m(p, q);
            for s in 0..=p {
                lp.add_constraint(
                    format!("coded_{p}_{q}_{s}"),
                    [(mv, 1.0), (member[p][s], -1.0), (member[q][s], -1.0)],
                    Sense::Ge,
                    -1.0,
                );
                lp.add_constraint(
                    format!("coded_only_{p}_{q}_{s}"),
                    [(mv, 1.0), (member[p][s], 1.0), (member[q][s], -1.0)],
                    Sense::Le,
                    1.0,
                );
            }
        }
    }

    // Indirect relations and coding-cycle exclusion.
    for p in 0..paths {
        for f in (0..slots).filter(|&f| f != demand(p)) {
            let (f0, f1) = (2 * f, 2 * f + 1);
            for q in (0..paths).filter(|&q| q != p && q != complement(p) && demand(q) != f) {
                let qs = complement(q);
                lp.add_constraint(
                    format!("related_{p}_{f}_{q}"),
                    [
                        (related[&(p, f)], 1.0),
                        (m(p, q), -1.0),
                        (m(qs, f0), -1.0),
                        (m(qs, f1), -1.0),
                        (m(p, f0), 1.0),
                        (m(p, f1), 1.0),
                    ],
                    Sense::Ge,
                    -1.0,
                );
            }
            for g in (0..slots).filter(|&g| g != f && g != demand(p)) {
                let (g0, g1) = (2 * g, 2 * g + 1);
                lp.add_constraint(
                    format!("related_{p}_{f}_via_{g}"),
                    [
                        (related[&(p, f)], 1.0),
                        (related[&(p, g)], -1.0),
                        (m(g0, f0), -1.0),
                        (m(g0, f1), -1.0),
                        (m(g1, f0), -1.0),
                        (m(g1, f1), -1.0),
                        (m(p, f0), 1.0),
                        (m(p, f1), 1.0),
                    ],
                    Sense::Ge,
                    -1.0,
                );
            }
        }
    }
    for f in 0..slots {
        for g in (0..slots).filter(|&g| g != f) {
            let (f0, f1, g0, g1) = (2 * f, 2 * f + 1, 2 * g, 2 * g + 1);
            lp.add_constraint(
                format!("no_cycle_{f}_{g}"),
                [
                    (related[&(f0, g)], 1.0),
                    (related[&(f1, g)], 1.0),
                    (m(f0, g0), 1.0),
                    (m(f1, g0), 1.0),
                    (m(f0, g1), 1.0),
                    (m(f1, g1), 1.0),
                ],
                Sense::Le,
                1.0,
            );
        }
    }

    if coherent {
        add_coherence(&mut lp, req, paths, &route, &m);
    }

    let layout = CodedLayout {
        destination: d,
        sources: sources.to_vec(),
        slots,
        sigma,
        route,
        member,
        links_out: net.nodes().map(|v| net.out_links(v).to_vec()).collect(),
        heads: net.link_ids().map(|l| net.link(l).head).collect(),
    };
    (lp, layout)
}

/// `nc[p][q] = 1` marks paths that must stay span-disjoint.
fn add_coherence(
    lp: &mut Lp,
    req: &PricingRequest,
    paths: usize,
    route: &[Vec<VarId>],
    m: &impl Fn(usize, usize) -> VarId,
) {
    let net = req.net;
    let mut nc = vec![vec![None; paths]; paths];
    for p in 0..paths {
        for q in (0..paths).filter(|&q| q != p) {
            let v = lp.add_binary(format!("nc_{p}_{q}"));
            if q == complement(p) {
                lp.set_bounds(v, Some(1.0), Some(1.0));
            }
            nc[p][q] = Some(v);
        }
    }
    let nc = |p: usize, q: usize| nc[p][q].expect("distinct paths");
    for p in 0..paths {
        for q in (0..paths).filter(|&q| q != p && q != complement(p)) {
            lp.add_constraint(
                format!("nc_coded_{p}_{q}"),
                [(nc(p, q), 1.0), (m(complement(p), complement(q)), -1.0)],
                Sense::Ge,
                0.0,
            );
        }
    }
    for p in 0..paths {
        for q in (0..paths).filter(|&q| q != p) {
            for r in (0..paths).filter(|&r| r != p && r != q && complement(r) != q) {
                lp.add_constraint(
                    format!("nc_chain_{p}_{q}_{r}"),
                    [(nc(p, r), 1.0), (nc(p, q), -1.0), (m(q, complement(r)), -1.0)],
                    Sense::Ge,
                    -1.0,
                );
            }
        }
    }
    for sp in net.span_ids() {
        let [a, b] = sp.links();
        for p in 0..paths {
            for q in (0..paths).filter(|&q| q != p) {
                lp.add_constraint(
                    format!("share_{}_{p}_{q}", sp.0),
                    [
                        (route[p][a.0], 1.0),
                        (route[q][a.0], 1.0),
                        (route[p][b.0], 1.0),
                        (route[q][b.0], 1.0),
                        (nc(p, q), 1.0),
                    ],
                    Sense::Le,
                    2.0,
                );
            }
        }
    }
}

impl CodedLayout {
    /// Reads the used slots and turns every path flow into a simple path.
    pub(super) fn extract(&self, x: &[f64]) -> CodingStructure {
        let on = |v: VarId| x[v.0] > 0.5;
        let mut signals = Vec::new();
        let mut used_slots = Vec::new();
        for i in 0..self.slots {
            if let Some(k) = (0..self.sources.len()).find(|&k| on(self.sigma[i][k])) {
                signals.push(self.sources[k]);
                used_slots.push(i);
            }
        }
        let mut subgroup_ids: Vec<usize> = Vec::new();
        let mut paths = Vec::new();
        for (sig, &i) in used_slots.iter().enumerate() {
            for p in [2 * i, 2 * i + 1] {
                let s = (0..self.member[p].len())
                    .find(|&s| on(self.member[p][s]))
                    .expect("every path has a subgroup");
                let idx = match subgroup_ids.iter().position(|&t| t == s) {
                    Some(idx) => idx,
                    None => {
                        subgroup_ids.push(s);
                        subgroup_ids.len() - 1
                    }
                };
                let links = self.walk(signals[sig], &self.route[p], &on);
                paths.push(CodedPath {
                    signal: sig,
                    subgroup: idx,
                    links,
                });
            }
        }
        let mut subgroups = vec![Vec::new(); subgroup_ids.len()];
        for p in &paths {
            subgroups[p.subgroup].push(p.signal);
        }
        CodingStructure::new(self.destination, signals, subgroups, paths)
    }

    /// Follows used links from `src` to the destination, then cuts loops.
    fn walk(&self, src: NodeId, vars: &[VarId], on: &impl Fn(VarId) -> bool) -> Vec<LinkId> {
        let mut left: Vec<bool> = vars.iter().map(|&v| on(v)).collect();
        let mut walk: Vec<LinkId> = Vec::new();
        let mut v = src;
        while v != self.destination {
            let Some(&l) = self.links_out[v.0].iter().find(|l| left[l.0]) else {
                break;
            };
            left[l.0] = false;
            walk.push(l);
            v = self.heads[l.0];
        }
        let mut simple: Vec<LinkId> = Vec::new();
        let mut seen_at: HashMap<NodeId, usize> = HashMap::from([(src, 0)]);
        for l in walk {
            let h = self.heads[l.0];
            simple.push(l);
            if let Some(&len) = seen_at.get(&h) {
                for dropped in simple.drain(len..) {
                    let head = self.heads[dropped.0];
                    if head != h {
                        seen_at.remove(&head);
                    }
                }
            } else {
                seen_at.insert(h, simple.len());
            }
        }
        simple
    }
}

//! Systematic coding: span-disjoint primary paths plus one parity tree.

use std::collections::BTreeMap;

use super::PricingRequest;
use crate::coding::CodingStructure;
use crate::lp::{Sense, VarId, VarKind};
use crate::netgraph::{LinkId, NodeId};
use crate::Lp;

pub(super) struct SdcLayout {
    destination: NodeId,
    sources: Vec<NodeId>,
    count: Vec<VarId>,
    primary: Vec<VarId>,
    parity: Vec<VarId>,
    links_out: Vec<Vec<LinkId>>,
    heads: Vec<NodeId>,
}

pub(super) fn build(req: &PricingRequest, sources: &[NodeId]) -> (Lp, SdcLayout) {
    let net = req.net;
    let d = req.destination;
    let group_cap = req.max_group() as f64;
    let mut lp = Lp::new();

    let count: Vec<VarId> = sources
        .iter()
        .map(|&f| {
            let (lo, hi) = match &req.fixed_counts {
                Some(fc) => {
                    let c = fc.get(&f).copied().unwrap_or(0) as f64;
                    (c, c)
                }
                None => (0.0, group_cap),
            };
            let v = lp.add_var(format!("cg_{}", net.name(f)), Some(lo), Some(hi), VarKind::Integer);
            lp.set_objective(v, -req.dual(f));
            v
        })
        .collect();
    let count_of: BTreeMap<NodeId, VarId> = sources.iter().copied().zip(count.iter().copied()).collect();

    let mut primary = Vec::with_capacity(net.num_links());
    let mut parity = Vec::with_capacity(net.num_links());
    for l in net.link_ids() {
        let label = net.link_label(l);
        let dv = lp.add_binary(format!("d_{label}"));
        let cv = lp.add_binary(format!("c_{label}"));
        lp.set_objective(dv, net.length(l));
        lp.set_objective(cv, net.length(l));
        // Nothing leaves the destination.
        if net.link(l).tail == d {
            lp.set_bounds(dv, Some(0.0), Some(0.0));
            lp.set_bounds(cv, Some(0.0), Some(0.0));
        }
        primary.push(dv);
        parity.push(cv);
    }
    let volt_g: Vec<VarId> = net
        .nodes()
        .map(|v| lp.add_continuous(format!("g_{}", net.name(v)), 0.0, Some(1.0)))
        .collect();
    let volt_p: Vec<VarId> = net
        .nodes()
        .map(|v| lp.add_continuous(format!("p_{}", net.name(v)), 0.0, Some(1.0)))
        .collect();

    lp.add_constraint("group_size", count.iter().map(|&v| (v, 1.0)), Sense::Le, group_cap);

    for f in net.nodes().filter(|&f| f != d) {
        let name = net.name(f);
        let mut row: Vec<(VarId, f64)> = net.out_links(f).iter().map(|l| (primary[l.0], 1.0)).collect();
        row.extend(net.in_links(f).iter().map(|l| (primary[l.0], -1.0)));
        if let Some(&c) = count_of.get(&f) {
            row.push((c, -1.0));
        }
        lp.add_constraint(format!("primary_flow_{name}"), row, Sense::Eq, 0.0);

        // beta * out >= count + in, scaled to integer coefficients.
        let mut row: Vec<(VarId, f64)> = net
            .out_links(f)
            .iter()
            .map(|l| (parity[l.0], req.beta))
            .collect();
        row.extend(net.in_links(f).iter().map(|l| (parity[l.0], -1.0)));
        if let Some(&c) = count_of.get(&f) {
            row.push((c, -1.0));
        }
        lp.add_constraint(format!("parity_flow_{name}"), row, Sense::Ge, 0.0);

        if req.strengthen {
            for l in net.in_links(f) {
                let mut row: Vec<(VarId, f64)> = net.out_links(f).iter().map(|o| (parity[o.0], 1.0)).collect();
                row.push((parity[l.0], -1.0));
                lp.add_constraint(format!("parity_continue_{}", net.link_label(*l)), row, Sense::Ge, 0.0);
            }
            if let Some(&c) = count_of.get(&f) {
                let mut row: Vec<(VarId, f64)> = net
                    .out_links(f)
                    .iter()
                    .map(|o| (parity[o.0], group_cap))
                    .collect();
                row.push((c, -1.0));
                lp.add_constraint(format!("parity_origin_{name}"), row, Sense::Ge, 0.0);
            }
        }
    }
    let mut row: Vec<(VarId, f64)> = net.in_links(d).iter().map(|l| (primary[l.0], 1.0)).collect();
    row.extend(count.iter().map(|&c| (c, -1.0)));
    lp.add_constraint("primary_sink", row, Sense::Eq, 0.0);

    let mut row: Vec<(VarId, f64)> = net.in_links(d).iter().map(|l| (parity[l.0], req.beta)).collect();
    row.extend(count.iter().map(|&c| (c, -1.0)));
    lp.add_constraint("parity_sink", row, Sense::Ge, 0.0);
    if req.strengthen {
        let mut row: Vec<(VarId, f64)> = net.in_links(d).iter().map(|l| (parity[l.0], group_cap)).collect();
        row.extend(count.iter().map(|&c| (c, -1.0)));
        lp.add_constraint("parity_sink_tight", row, Sense::Ge, 0.0);
    }

    for sp in net.span_ids() {
        let [a, b] = sp.links();
        lp.add_constraint(
            format!("span_{}", sp.0),
            [(primary[a.0], 1.0), (primary[b.0], 1.0), (parity[a.0], 1.0), (parity[b.0], 1.0)],
            Sense::Le,
            1.0,
        );
    }

    // Voltage rises by alpha along every used link, which rules out cycles.
    for l in net.link_ids() {
        let link = net.link(l);
        for (volt, used, tag) in [(&volt_g, &primary, "g"), (&volt_p, &parity, "p")] {
            lp.add_constraint(
                format!("volt_{tag}_{}", net.link_label(l)),
                [
                    (volt[link.head.0], 1.0),
                    (volt[link.tail.0], -1.0),
                    (used[l.0], -(req.alpha + 1.0)),
                ],
                Sense::Ge,
                -1.0,
            );
        }
    }

    let layout = SdcLayout {
        destination: d,
        sources: sources.to_vec(),
        count,
        primary,
        parity,
        links_out: net.nodes().map(|v| net.out_links(v).to_vec()).collect(),
        heads: net.link_ids().map(|l| net.link(l).head).collect(),
    };
    (lp, layout)
}

impl SdcLayout {
    /// Splits the primary flow into one path per connection and routes every
    /// source along the parity tree.
    pub(super) fn extract(&self, x: &[f64]) -> CodingStructure {
        let on = |v: VarId| x[v.0] > 0.5;
        let mut primary_left: Vec<bool> = self.primary.iter().map(|&v| on(v)).collect();
        let mut primaries = Vec::new();
        let mut parity_routes = Vec::new();
        for (k, &f) in self.sources.iter().enumerate() {
            let copies = x[self.count[k].0].round() as usize;
            for _ in 0..copies {
                let mut links = Vec::new();
                let mut v = f;
                while v != self.destination {
                    let Some(&l) = self.links_out[v.0].iter().find(|l| primary_left[l.0]) else {
                        break;
                    };
                    primary_left[l.0] = false;
                    links.push(l);
                    v = self.heads[l.0];
                }
                primaries.push((f, links));

                let mut route = Vec::new();
                let mut v = f;
                while v != self.destination && route.len() <= self.parity.len() {
                    let Some(&l) = self.links_out[v.0].iter().find(|l| on(self.parity[l.0])) else {
                        break;
                    };
                    route.push(l);
                    v = self.heads[l.0];
                }
                parity_routes.push(route);
            }
        }
        CodingStructure::systematic(self.destination, primaries, parity_routes)
    }
}

//! Directed network with span pairing, topology files, shortest paths and
//! span-disjoint path pairs.
//!
//! Span `k` owns links `2k` (first endpoint to second) and `2k + 1` (reverse).

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpanId(pub usize);

impl LinkId {
    pub fn span(self) -> SpanId {
        SpanId(self.0 / 2)
    }

    /// The opposite-direction link of the same span.
    pub fn twin(self) -> LinkId {
        LinkId(self.0 ^ 1)
    }
}

impl SpanId {
    pub fn links(self) -> [LinkId; 2] {
        [LinkId(2 * self.0), LinkId(2 * self.0 + 1)]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Link {
    pub tail: NodeId,
    pub head: NodeId,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Span {
    pub a: NodeId,
    pub b: NodeId,
    pub length: f64,
    /// Distinguishes parallel spans between the same pair of nodes.
    pub tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: self-loop at node {node}")]
    SelfLoop { line: usize, node: String },
    #[error("line {line}: duplicate link {a} -> {b}")]
    DuplicateLink { line: usize, a: String, b: String },
    #[error("line {line}: link {a} -> {b} has no reverse link of equal length")]
    UnpairedLink { line: usize, a: String, b: String },
    #[error("line {line}: nonpositive length {length}")]
    NonpositiveLength { line: usize, length: f64 },
    #[error("line {line}: header declares {declared} nodes but {found} were named")]
    NodeCount { line: usize, declared: usize, found: usize },
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("node {from} cannot reach {dest} over two span-disjoint paths (unprotectable demand)")]
    Unprotectable { from: String, dest: String },
    #[error("no path from {from} to {dest}")]
    NoPath { from: String, dest: String },
    #[error("source and destination are both {0}")]
    SameEndpoints(String),
}

/// Immutable directed network in which every link has an opposite twin.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    links: Vec<Link>,
    spans: Vec<Span>,
    out_links: Vec<Vec<LinkId>>,
    in_links: Vec<Vec<LinkId>>,
}

impl Network {
    /// Builds a network from node names and undirected `(a, b, length)` spans.
    pub fn from_spans<'a>(
        nodes: impl IntoIterator<Item = &'a str>,
        spans: impl IntoIterator<Item = (&'a str, &'a str, f64)>,
    ) -> Result<Self, NetError> {
        let mut b = Builder::default();
        for n in nodes {
            b.node(n);
        }
        for (i, (x, y, len)) in spans.into_iter().enumerate() {
            b.span(i + 1, x, y, len, None)?;
        }
        Ok(b.finish())
    }

    pub fn num_nodes(&self) -> usize {
        self.names.len()
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn num_spans(&self) -> usize {
        self.spans.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.names.len()).map(NodeId)
    }

    pub fn link_ids(&self) -> impl Iterator<Item = LinkId> {
        (0..self.links.len()).map(LinkId)
    }

    pub fn span_ids(&self) -> impl Iterator<Item = SpanId> {
        (0..self.spans.len()).map(SpanId)
    }

    pub fn name(&self, v: NodeId) -> &str {
        &self.names[v.0]
    }

    pub fn node(&self, name: &str) -> Result<NodeId, NetError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| NetError::UnknownNode(name.to_string()))
    }

    pub fn link(&self, l: LinkId) -> &Link {
        &self.links[l.0]
    }

    pub fn span(&self, s: SpanId) -> &Span {
        &self.spans[s.0]
    }

    pub fn length(&self, l: LinkId) -> f64 {
        self.links[l.0].length
    }

    pub fn out_links(&self, v: NodeId) -> &[LinkId] {
        &self.out_links[v.0]
    }

    pub fn in_links(&self, v: NodeId) -> &[LinkId] {
        &self.in_links[v.0]
    }

    /// Number of spans incident to `v`.
    pub fn nodal_degree(&self, v: NodeId) -> usize {
        self.out_links[v.0].len()
    }

    pub fn nodal_degree_of(&self, name: &str) -> Result<usize, NetError> {
        Ok(self.nodal_degree(self.node(name)?))
    }

    pub fn max_degree(&self) -> usize {
        self.nodes().map(|v| self.nodal_degree(v)).max().unwrap_or(0)
    }

    /// Human-readable link label such as `a->b` or `a->b#tag`.
    pub fn link_label(&self, l: LinkId) -> String {
        let link = &self.links[l.0];
        let mut s = format!("{}->{}", self.names[link.tail.0], self.names[link.head.0]);
        if let Some(tag) = &self.spans[l.span().0].tag {
            let _ = write!(s, "#{tag}");
        }
        s
    }

    /// Shortest distances from `src`, skipping links whose span is blocked.
    pub fn dijkstra(&self, src: NodeId, blocked: &HashSet<SpanId>) -> (Vec<f64>, Vec<Option<LinkId>>) {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Item {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        let n = self.num_nodes();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[src.0] = 0.0;
        heap.push(Item(0.0, src.0));
        while let Some(Item(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &l in &self.out_links[u] {
                if blocked.contains(&l.span()) {
                    continue;
                }
                let link = &self.links[l.0];
                let nd = d + link.length;
                if nd < dist[link.head.0] {
                    dist[link.head.0] = nd;
                    pred[link.head.0] = Some(l);
                    heap.push(Item(nd, link.head.0));
                }
            }
        }
        (dist, pred)
    }

    pub fn shortest_path(&self, s: NodeId, d: NodeId) -> Result<Path, NetError> {
        let (dist, pred) = self.dijkstra(s, &HashSet::new());
        if !dist[d.0].is_finite() {
            return Err(NetError::NoPath {
                from: self.name(s).into(),
                dest: self.name(d).into(),
            });
        }
        let mut links = Vec::new();
        let mut v = d;
        while v != s {
            let l = pred[v.0].expect("reachable node has a predecessor");
            links.push(l);
            v = self.links[l.0].tail;
        }
        links.reverse();
        Ok(Path::new(self, links))
    }

    /// Minimum total cost pair of span-disjoint `s -> d` paths.
    ///
    /// Two rounds of shortest augmenting paths on the residual graph where a
    /// used link may be traversed backwards at negative length, followed by
    /// cancellation and path decomposition.
    pub fn disjoint_pair(&self, s: NodeId, d: NodeId) -> Result<PathPair, NetError> {
        if s == d {
            return Err(NetError::SameEndpoints(self.name(s).into()));
        }
        let unprotectable = || NetError::Unprotectable {
            from: self.name(s).into(),
            dest: self.name(d).into(),
        };
        let mut flow = vec![false; self.num_links()];
        for _ in 0..2 {
            let aug = self.residual_path(s, d, &flow).ok_or_else(unprotectable)?;
            for l in aug {
                if flow[l.twin().0] {
                    flow[l.twin().0] = false;
                } else {
                    flow[l.0] = true;
                }
            }
        }
        let mut paths = Vec::with_capacity(2);
        for _ in 0..2 {
            let mut links = Vec::new();
            let mut v = s;
            while v != d {
                let l = *self.out_links[v.0]
                    .iter()
                    .find(|l| flow[l.0])
                    .ok_or_else(unprotectable)?;
                flow[l.0] = false;
                links.push(l);
                v = self.links[l.0].head;
            }
            paths.push(Path::new(self, links));
        }
        let protection = paths.pop().expect("two paths");
        let primary = paths.pop().expect("two paths");
        let (primary, protection) = if protection.cost < primary.cost {
            (protection, primary)
        } else {
            (primary, protection)
        };
        Ok(PathPair::new(primary, protection))
    }

    /// Bellman-Ford over the residual graph of a unit-capacity span flow.
    fn residual_path(&self, s: NodeId, d: NodeId, flow: &[bool]) -> Option<Vec<LinkId>> {
        let n = self.num_nodes();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred: Vec<Option<LinkId>> = vec![None; n];
        dist[s.0] = 0.0;
        for _ in 0..n {
            let mut changed = false;
            for l in self.link_ids() {
                let span_used = flow[l.0] || flow[l.twin().0];
                let cost = if flow[l.twin().0] {
                    -self.links[l.0].length
                } else if span_used {
                    continue;
                } else {
                    self.links[l.0].length
                };
                let link = &self.links[l.0];
                if dist[link.tail.0].is_finite() && dist[link.tail.0] + cost < dist[link.head.0] - 1e-12 {
                    dist[link.head.0] = dist[link.tail.0] + cost;
                    pred[link.head.0] = Some(l);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !dist[d.0].is_finite() {
            return None;
        }
        let mut links = Vec::new();
        let mut v = d;
        while v != s {
            let l = pred[v.0]?;
            links.push(l);
            v = self.links[l.0].tail;
            if links.len() > self.num_links() {
                return None;
            }
        }
        links.reverse();
        Some(links)
    }

    /// Canonical text form: node declarations in id order, then spans sorted
    /// by endpoint names and tag, each written with its smaller name first.
    pub fn to_topology(&self) -> String {
        let mut out = format!("nodes {}\n", self.num_nodes());
        for name in &self.names {
            let _ = writeln!(out, "node {name}");
        }
        let mut lines: Vec<(String, String, String, f64)> = self
            .spans
            .iter()
            .map(|sp| {
                let (a, b) = (self.names[sp.a.0].clone(), self.names[sp.b.0].clone());
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                (a, b, sp.tag.clone().unwrap_or_default(), sp.length)
            })
            .collect();
        lines.sort_by(|x, y| (&x.0, &x.1, &x.2).cmp(&(&y.0, &y.1, &y.2)).then(x.3.total_cmp(&y.3)));
        for (a, b, tag, len) in lines {
            if tag.is_empty() {
                let _ = writeln!(out, "{a} {b} {len}");
            } else {
                let _ = writeln!(out, "{a} {b} {len} {tag}");
            }
        }
        out
    }
}

impl fmt::Display for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_topology())
    }
}

#[derive(Default)]
struct Builder {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
    links: Vec<Link>,
    spans: Vec<Span>,
    seen: HashSet<(usize, usize, String)>,
}

impl Builder {
    fn node(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = NodeId(self.names.len());
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    fn check(&self, line: usize, a: &str, b: &str, len: f64) -> Result<(), NetError> {
        if a == b {
            return Err(NetError::SelfLoop {
                line,
                node: a.to_string(),
            });
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(NetError::NonpositiveLength { line, length: len });
        }
        Ok(())
    }

    fn span(&mut self, line: usize, a: &str, b: &str, len: f64, tag: Option<String>) -> Result<(), NetError> {
        self.check(line, a, b, len)?;
        let (x, y) = (self.node(a), self.node(b));
        let key = (x.0.min(y.0), x.0.max(y.0), tag.clone().unwrap_or_default());
        if !self.seen.insert(key) {
            return Err(NetError::DuplicateLink {
                line,
                a: a.into(),
                b: b.into(),
            });
        }
        self.links.push(Link { tail: x, head: y, length: len });
        self.links.push(Link { tail: y, head: x, length: len });
        self.spans.push(Span { a: x, b: y, length: len, tag });
        Ok(())
    }

    fn finish(self) -> Network {
        let n = self.names.len();
        let mut out_links = vec![Vec::new(); n];
        let mut in_links = vec![Vec::new(); n];
        for (i, l) in self.links.iter().enumerate() {
            out_links[l.tail.0].push(LinkId(i));
            in_links[l.head.0].push(LinkId(i));
        }
        Network {
            names: self.names,
            index: self.index,
            links: self.links,
            spans: self.spans,
            out_links,
            in_links,
        }
    }
}

/// Parses the line-oriented topology format.
///
/// ```text
/// nodes 4          # required header
/// node s           # optional declaration, fixes order and allows isolated nodes
/// s u 1            # undirected span of length 1
/// s u 2 backup     # parallel span, told apart by its tag
/// ```
///
/// A `directed` line switches the remainder of the file to one directed link
/// per line; every link must then be matched by a reverse link with the same
/// length and tag.
pub fn parse_topology(text: &str) -> Result<Network, NetError> {
    let mut b = Builder::default();
    let mut declared: Option<(usize, usize)> = None;
    let mut directed = false;
    let mut pending: Vec<(usize, String, String, f64, Option<String>)> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tok: Vec<&str> = content.split_whitespace().collect();
        let malformed = |msg: &str| NetError::Malformed {
            line,
            msg: msg.to_string(),
        };
        if declared.is_none() {
            if tok.len() != 2 || tok[0] != "nodes" {
                return Err(malformed("expected header `nodes <n>`"));
            }
            let n = tok[1].parse::<usize>().map_err(|_| malformed("bad node count"))?;
            declared = Some((n, line));
            continue;
        }
        match tok.as_slice() {
            ["directed"] => directed = true,
            ["node", name] => {
                b.node(name);
            }
            [a, bn, len] | [a, bn, len, _] => {
                let length: f64 = len.parse().map_err(|_| malformed("bad length"))?;
                let tag = tok.get(3).map(|t| t.to_string());
                if directed {
                    b.check(line, a, bn, length)?;
                    pending.push((line, a.to_string(), bn.to_string(), length, tag));
                } else {
                    b.span(line, a, bn, length, tag)?;
                }
            }
            _ => return Err(malformed("expected `<a> <b> <length> [tag]`")),
        }
    }
    let Some((declared_n, header_line)) = declared else {
        return Err(NetError::Malformed {
            line: last_line.max(1),
            msg: "missing header `nodes <n>`".into(),
        });
    };
    pair_directed(&mut b, pending)?;
    if b.names.len() != declared_n {
        return Err(NetError::NodeCount {
            line: header_line,
            declared: declared_n,
            found: b.names.len(),
        });
    }
    Ok(b.finish())
}

fn pair_directed(
    b: &mut Builder,
    pending: Vec<(usize, String, String, f64, Option<String>)>,
) -> Result<(), NetError> {
    let mut used = vec![false; pending.len()];
    let mut directed_seen = HashSet::new();
    for (line, a, bn, _, tag) in &pending {
        if !directed_seen.insert((a.clone(), bn.clone(), tag.clone())) {
            return Err(NetError::DuplicateLink {
                line: *line,
                a: a.clone(),
                b: bn.clone(),
            });
        }
    }
    for i in 0..pending.len() {
        if used[i] {
            continue;
        }
        let (line, a, bn, len, tag) = &pending[i];
        let partner = (i + 1..pending.len()).find(|&j| {
            let (_, c, d, l2, t2) = &pending[j];
            !used[j] && c == bn && d == a && l2 == len && t2 == tag
        });
        let Some(j) = partner else {
            return Err(NetError::UnpairedLink {
                line: *line,
                a: a.clone(),
                b: bn.clone(),
            });
        };
        used[i] = true;
        used[j] = true;
        b.span(*line, a, bn, *len, tag.clone())?;
    }
    Ok(())
}

/// A simple directed path given by its links.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub links: Vec<LinkId>,
    pub cost: f64,
}

impl Path {
    pub fn new(net: &Network, links: Vec<LinkId>) -> Self {
        let cost = links.iter().map(|&l| net.length(l)).sum();
        Self { links, cost }
    }

    pub fn source(&self, net: &Network) -> Option<NodeId> {
        self.links.first().map(|&l| net.link(l).tail)
    }

    pub fn target(&self, net: &Network) -> Option<NodeId> {
        self.links.last().map(|&l| net.link(l).head)
    }

    pub fn nodes(&self, net: &Network) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = self.links.iter().map(|&l| net.link(l).tail).collect();
        v.extend(self.target(net));
        v
    }

    pub fn spans(&self) -> impl Iterator<Item = SpanId> + '_ {
        self.links.iter().map(|l| l.span())
    }

    /// Consecutive links chain and no node repeats.
    pub fn is_simple(&self, net: &Network) -> bool {
        let chained = self
            .links
            .windows(2)
            .all(|w| net.link(w[0]).head == net.link(w[1]).tail);
        let nodes = self.nodes(net);
        let distinct: HashSet<_> = nodes.iter().collect();
        chained && distinct.len() == nodes.len()
    }

    pub fn shares_span(&self, other: &Path) -> bool {
        let mine: HashSet<SpanId> = self.spans().collect();
        other.spans().any(|s| mine.contains(&s))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathPair {
    pub primary: Path,
    pub protection: Path,
    pub cost: f64,
}

impl PathPair {
    pub fn new(primary: Path, protection: Path) -> Self {
        let cost = primary.cost + protection.cost;
        Self {
            primary,
            protection,
            cost,
        }
    }
}

/// Small fixed topologies used by examples, tests and the command line.
pub mod fixtures {
    use super::*;

    /// Four nodes, five unit spans: s-u, s-v, u-t, v-t and the chord u-v.
    pub fn diamond() -> Network {
        Network::from_spans(
            ["s", "u", "v", "t"],
            [
                ("s", "u", 1.0),
                ("s", "v", 1.0),
                ("u", "t", 1.0),
                ("v", "t", 1.0),
                ("u", "v", 1.0),
            ],
        )
        .expect("valid fixture")
    }

    /// Two sources whose separate disjoint pairs cost 10 and 7 while a merged
    /// coding group over both costs 15.
    pub const EXAMPLE1: &str = "\
# two sources S1, S2 and destination D
nodes 6
S1 A 1
S1 B 4
S2 A 1
S2 C 2
A D 2
B D 3
C D 2
";

    pub fn example1() -> Network {
        parse_topology(EXAMPLE1).expect("valid fixture")
    }

    /// Low-degree butterfly: the destination `t` has three spans but the
    /// source `s` only two, so both demands of `s` must share its spans.
    pub const BUTTERFLY: &str = "\
nodes 5
s a 1
s b 1
a c 1
b c 1
a t 4
b t 4
c t 4
";

    pub fn butterfly() -> Network {
        parse_topology(BUTTERFLY).expect("valid fixture")
    }

    /// Six nodes, nine spans, destination degrees 2 to 4.
    pub const SIX_NODE: &str = "\
nodes 6
n1 n2 3
n1 n3 4
n2 n3 2
n2 n4 5
n3 n5 3
n4 n5 2
n4 n6 4
n5 n6 3
n1 n4 7
";

    pub fn six_node() -> Network {
        parse_topology(SIX_NODE).expect("valid fixture")
    }

    /// Fourteen-node, twenty-one-span NSFNET-shaped backbone with synthetic
    /// lengths in hundreds of miles.
    pub const NSFNET14: &str = "\
nodes 14
WA CA1 11
WA CA2 16
WA IL 24
CA1 CA2 6
CA1 UT 10
CA2 TX 18
UT CO 6
UT MI 23
CO TX 9
CO NE 7
NE IL 6
NE GA 13
IL PA 7
TX GA 10
TX MD 21
GA PA 9
MI NY 7
MI NJ 8
PA NY 3
PA NJ 2
NY MD 3
";

    pub fn nsfnet14() -> Network {
        parse_topology(NSFNET14).expect("valid fixture")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn diamond_counts_and_degrees() {
        let net = diamond();
        assert_eq!(net.num_spans(), 5);
        assert_eq!(net.num_links(), 10);
        assert_eq!(net.nodal_degree_of("u").unwrap(), 3);
        assert_eq!(net.nodal_degree_of("s").unwrap(), 2);
        assert!(net.nodal_degree_of("zz").is_err());
    }

    #[test]
    fn isolated_node_has_degree_zero() {
        let net = parse_topology("nodes 3\nnode lone\na b 1\n").unwrap();
        assert_eq!(net.nodal_degree_of("lone").unwrap(), 0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(matches!(
            parse_topology("nodes 1\nu u 3\n"),
            Err(NetError::SelfLoop { line: 2, .. })
        ));
        assert!(matches!(
            parse_topology("nodes 2\na b 1\nb a 2\n"),
            Err(NetError::DuplicateLink { line: 3, .. })
        ));
        assert!(matches!(
            parse_topology("nodes 2\na b 0\n"),
            Err(NetError::NonpositiveLength { line: 2, .. })
        ));
        assert!(matches!(
            parse_topology("nodes 2\na b x\n"),
            Err(NetError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_topology("nodes 3\na b 1\n"),
            Err(NetError::NodeCount { line: 1, .. })
        ));
        assert!(matches!(
            parse_topology("nodes 3\ndirected\na b 1\nb a 1\nb c 1\n"),
            Err(NetError::UnpairedLink { line: 5, .. })
        ));
    }

    #[test]
    fn directed_mode_pairs_links() {
        let net = parse_topology("nodes 2\ndirected\na b 2\nb a 2\n").unwrap();
        assert_eq!(net.num_spans(), 1);
        assert_eq!(net.link(LinkId(1)).tail, net.node("b").unwrap());
    }

    #[test]
    fn parallel_spans_need_tags() {
        let net = parse_topology("nodes 2\na b 1\na b 2 alt\n").unwrap();
        assert_eq!(net.num_spans(), 2);
        assert_eq!(net.nodal_degree_of("a").unwrap(), 2);
        let pair = net
            .disjoint_pair(net.node("a").unwrap(), net.node("b").unwrap())
            .unwrap();
        assert_eq!(pair.cost, 3.0);
    }

    #[test]
    fn canonical_round_trip() {
        let net = nsfnet14();
        let text = net.to_topology();
        let again = parse_topology(&text).unwrap();
        assert_eq!(again.to_topology(), text);
    }

    #[test]
    fn diamond_pair() {
        let net = diamond();
        let pair = net
            .disjoint_pair(net.node("s").unwrap(), net.node("t").unwrap())
            .unwrap();
        assert_eq!(pair.cost, 4.0);
        assert!(!pair.primary.shares_span(&pair.protection));
    }

    #[test]
    fn chain_is_unprotectable() {
        let net = Network::from_spans(["s", "a", "d"], [("s", "a", 1.0), ("a", "d", 1.0)]).unwrap();
        let err = net
            .disjoint_pair(net.node("s").unwrap(), net.node("d").unwrap())
            .unwrap_err();
        assert!(matches!(err, NetError::Unprotectable { .. }));
    }

    #[test]
    fn trap_topology_needs_joint_optimum() {
        // The shortest path s-a-b-d blocks every disjoint partner.
        let net = Network::from_spans(
            ["s", "a", "b", "d", "x", "y"],
            [
                ("s", "a", 1.0),
                ("a", "b", 1.0),
                ("b", "d", 1.0),
                ("s", "x", 2.0),
                ("x", "b", 2.0),
                ("a", "y", 2.0),
                ("y", "d", 2.0),
            ],
        )
        .unwrap();
        let pair = net
            .disjoint_pair(net.node("s").unwrap(), net.node("d").unwrap())
            .unwrap();
        assert_eq!(pair.cost, 10.0);
        assert!(pair.primary.is_simple(&net) && pair.protection.is_simple(&net));
    }

    #[test]
    fn example1_pair_costs() {
        let net = example1();
        let d = net.node("D").unwrap();
        let p1 = net.disjoint_pair(net.node("S1").unwrap(), d).unwrap();
        let p2 = net.disjoint_pair(net.node("S2").unwrap(), d).unwrap();
        assert_eq!(p1.cost, 10.0);
        assert_eq!(p2.cost, 7.0);
    }
}

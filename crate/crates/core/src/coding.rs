//! Coding structures, GF(2) decodability and the coherence relation.
//!
//! A structure carries `N` signals. Every signal sits in exactly two
//! subgroups, and each such incidence is transmitted over its own path from
//! the signal's source to the destination. A subgroup's transmission is the
//! XOR of its signals.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::netgraph::{LinkId, Network, NodeId, Path, PathPair, SpanId};

/// Version tag written into every coding-group JSON document.
pub const GROUP_SCHEMA: &str = "divcode.coding-group/1";

/// Largest signal count accepted by [`hall_check`].
pub const HALL_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodingError {
    #[error("unknown span {0}")]
    UnknownSpan(usize),
    #[error("unknown path {0}")]
    UnknownPath(usize),
    #[error("hall check limited to {limit} signals, got {n}")]
    TooManySignals { n: usize, limit: usize },
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("unknown link label {0}")]
    UnknownLink(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("unsupported schema {0}")]
    Schema(String),
}

/// Bit vector over signals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitRow(Vec<u64>);

impl BitRow {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n.div_ceil(64)])
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut r = Self::zeros(n);
        for i in idx {
            r.set(i);
        }
        r
    }

    pub fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a ^= b;
        }
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }

    fn lowest(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn intersects_mask(&self, mask: u64) -> bool {
        self.0.first().is_some_and(|w| w & mask != 0)
    }
}

/// GF(2) rank by elimination on the lowest set bit.
pub fn gf2_rank(rows: &[BitRow]) -> usize {
    let mut basis: Vec<BitRow> = Vec::new();
    for row in rows {
        let mut r = row.clone();
        for b in &basis {
            let pivot = b.lowest().expect("basis rows are nonzero");
            if r.get(pivot) {
                r.xor_assign(b);
            }
        }
        if let Some(p) = r.lowest() {
            for b in basis.iter_mut() {
                if b.get(p) {
                    b.xor_assign(&r);
                }
            }
            basis.push(r);
        }
    }
    basis.len()
}

/// What the destination receives: per subgroup, the XOR of surviving signals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceivedVector {
    pub rows: Vec<BitRow>,
    pub n_signals: usize,
}

impl ReceivedVector {
    /// Builds rows from signal index lists.
    pub fn from_lists(n_signals: usize, rows: &[&[usize]]) -> Self {
        Self {
            rows: rows
                .iter()
                .map(|r| BitRow::from_indices(n_signals, r.iter().copied()))
                .collect(),
            n_signals,
        }
    }
}

/// True iff the surviving rows have full GF(2) rank.
pub fn is_decodable(rv: &ReceivedVector) -> bool {
    gf2_rank(&rv.rows) == rv.n_signals
}

/// Every signal survives somewhere and every `k` signals touch at least `k`
/// nonzero subgroups.
pub fn hall_check(rv: &ReceivedVector) -> Result<bool, CodingError> {
    let n = rv.n_signals;
    if n > HALL_LIMIT {
        return Err(CodingError::TooManySignals { n, limit: HALL_LIMIT });
    }
    let live: Vec<&BitRow> = rv.rows.iter().filter(|r| !r.is_zero()).collect();
    for mask in 1u64..(1u64 << n) {
        let k = mask.count_ones() as usize;
        let touched = live.iter().filter(|r| r.intersects_mask(mask)).count();
        if touched < k {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One signal incidence: the path carrying `signal` inside `subgroup`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodedPath {
    pub signal: usize,
    pub subgroup: usize,
    pub links: Vec<LinkId>,
}

impl CodedPath {
    pub fn spans(&self) -> impl Iterator<Item = SpanId> + '_ {
        self.links.iter().map(|l| l.span())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodingStructure {
    pub destination: NodeId,
    /// Source node of each signal.
    pub signals: Vec<NodeId>,
    /// Signal indices XORed in each subgroup.
    pub subgroups: Vec<Vec<usize>>,
    pub paths: Vec<CodedPath>,
}

impl CodingStructure {
    pub fn new(
        destination: NodeId,
        signals: Vec<NodeId>,
        subgroups: Vec<Vec<usize>>,
        paths: Vec<CodedPath>,
    ) -> Self {
        let mut subgroups = subgroups;
        for s in subgroups.iter_mut() {
            s.sort_unstable();
        }
        Self {
            destination,
            signals,
            subgroups,
            paths,
        }
    }

    pub fn empty(destination: NodeId) -> Self {
        Self::new(destination, Vec::new(), Vec::new(), Vec::new())
    }

    /// A single signal protected by two span-disjoint paths, i.e. 1+1.
    pub fn singleton(destination: NodeId, source: NodeId, pair: &PathPair) -> Self {
        Self::new(
            destination,
            vec![source],
            vec![vec![0], vec![0]],
            vec![
                CodedPath {
                    signal: 0,
                    subgroup: 0,
                    links: pair.primary.links.clone(),
                },
                CodedPath {
                    signal: 0,
                    subgroup: 1,
                    links: pair.protection.links.clone(),
                },
            ],
        )
    }

    /// Systematic code: one subgroup per primary path and a parity subgroup
    /// whose paths are the tree routes of each source.
    pub fn systematic(
        destination: NodeId,
        primaries: Vec<(NodeId, Vec<LinkId>)>,
        parity_routes: Vec<Vec<LinkId>>,
    ) -> Self {
        let n = primaries.len();
        let mut signals = Vec::with_capacity(n);
        let mut subgroups: Vec<Vec<usize>> = Vec::with_capacity(n + 1);
        let mut paths = Vec::with_capacity(2 * n);
        for (k, (src, links)) in primaries.into_iter().enumerate() {
            signals.push(src);
            subgroups.push(vec![k]);
            paths.push(CodedPath {
                signal: k,
                subgroup: k,
                links,
            });
        }
        subgroups.push((0..n).collect());
        for (k, links) in parity_routes.into_iter().enumerate() {
            paths.push(CodedPath {
                signal: k,
                subgroup: n,
                links,
            });
        }
        Self::new(destination, signals, subgroups, paths)
    }

    pub fn n_signals(&self) -> usize {
        self.signals.len()
    }

    /// The two path indices of `signal`, in subgroup order.
    pub fn paths_of(&self, signal: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.paths.len())
            .filter(|&p| self.paths[p].signal == signal)
            .collect();
        v.sort_by_key(|&p| self.paths[p].subgroup);
        v
    }

    /// The other path of the same signal.
    pub fn complement(&self, path: usize) -> Option<usize> {
        let sig = self.paths.get(path)?.signal;
        (0..self.paths.len()).find(|&q| q != path && self.paths[q].signal == sig)
    }

    /// Paths sharing a subgroup with `path`.
    pub fn coded_with(&self, path: usize) -> impl Iterator<Item = usize> + '_ {
        let sg = self.paths[path].subgroup;
        (0..self.paths.len()).filter(move |&q| q != path && self.paths[q].subgroup == sg)
    }

    /// Signal count per source node.
    pub fn counts(&self) -> BTreeMap<NodeId, u32> {
        let mut m = BTreeMap::new();
        for &s in &self.signals {
            *m.entry(s).or_insert(0) += 1;
        }
        m
    }

    /// Every subgroup pays once for each link in the union of its paths.
    pub fn cost(&self, net: &Network) -> f64 {
        let mut total = 0.0;
        for sg in 0..self.subgroups.len() {
            let used: BTreeSet<LinkId> = self
                .paths
                .iter()
                .filter(|p| p.subgroup == sg)
                .flat_map(|p| p.links.iter().copied())
                .collect();
            total += used.iter().map(|&l| net.length(l)).sum::<f64>();
        }
        total
    }

    pub fn intact(&self) -> ReceivedVector {
        self.received(&HashSet::new())
    }

    /// Received vector after the listed paths are lost.
    pub fn received(&self, failed_paths: &HashSet<usize>) -> ReceivedVector {
        let n = self.n_signals();
        let mut rows = vec![BitRow::zeros(n); self.subgroups.len()];
        for (i, p) in self.paths.iter().enumerate() {
            if !failed_paths.contains(&i) {
                rows[p.subgroup].set(p.signal);
            }
        }
        ReceivedVector { rows, n_signals: n }
    }

    /// Drops every incidence whose own path crosses `span`.
    pub fn simulate_span_failure(&self, net: &Network, span: SpanId) -> Result<ReceivedVector, CodingError> {
        if span.0 >= net.num_spans() {
            return Err(CodingError::UnknownSpan(span.0));
        }
        let failed: HashSet<usize> = (0..self.paths.len())
            .filter(|&i| self.paths[i].spans().any(|s| s == span))
            .collect();
        Ok(self.received(&failed))
    }

    /// Applies the four coherence rules starting from `path`.
    ///
    /// The complement is noncoherent; paths coded with a noncoherent path are
    /// coherent; complements of coherent paths are noncoherent. Paths never
    /// reached are coherent.
    pub fn coherence_propagate(&self, path: usize) -> Result<(BTreeSet<usize>, BTreeSet<usize>), CodingError> {
        if path >= self.paths.len() {
            return Err(CodingError::UnknownPath(path));
        }
        let mut coherent = BTreeSet::new();
        let mut noncoherent = BTreeSet::new();
        let mut visited = vec![false; self.paths.len()];
        visited[path] = true;
        let mut queue: VecDeque<(usize, bool)> = VecDeque::new();
        if let Some(c) = self.complement(path) {
            queue.push_back((c, false));
        }
        while let Some((q, is_coherent)) = queue.pop_front() {
            if visited[q] {
                continue;
            }
            visited[q] = true;
            if is_coherent {
                coherent.insert(q);
                if let Some(c) = self.complement(q) {
                    queue.push_back((c, false));
                }
            } else {
                noncoherent.insert(q);
                for r in self.coded_with(q) {
                    queue.push_back((r, true));
                }
            }
        }
        for (q, seen) in visited.iter().enumerate() {
            if !seen {
                coherent.insert(q);
            }
        }
        Ok((coherent, noncoherent))
    }

    /// `m[p][q]` is true when paths `p` and `q` may fail together.
    pub fn coherence_matrix(&self) -> Vec<Vec<bool>> {
        let k = self.paths.len();
        let mut m = vec![vec![true; k]; k];
        for p in 0..k {
            let (_, nc) = self.coherence_propagate(p).expect("path in range");
            for q in nc {
                m[p][q] = false;
            }
        }
        m
    }

    /// Checks the structural invariants against `net`.
    pub fn validate(&self, net: &Network) -> Result<(), CodingError> {
        let bad = |m: String| Err(CodingError::Invalid(m));
        let n = self.n_signals();
        for (s, members) in self.subgroups.iter().enumerate() {
            if members.iter().any(|&i| i >= n) {
                return bad(format!("subgroup {s} names an unknown signal"));
            }
        }
        for sig in 0..n {
            let holders = self.subgroups.iter().filter(|m| m.contains(&sig)).count();
            if holders != 2 {
                return bad(format!("signal {sig} sits in {holders} subgroups instead of 2"));
            }
        }
        let mut seen = HashSet::new();
        for (i, p) in self.paths.iter().enumerate() {
            if p.signal >= n || p.subgroup >= self.subgroups.len() {
                return bad(format!("path {i} references an unknown signal or subgroup"));
            }
            if !self.subgroups[p.subgroup].contains(&p.signal) {
                return bad(format!("path {i} is not an incidence of its subgroup"));
            }
            if !seen.insert((p.signal, p.subgroup)) {
                return bad(format!("incidence of path {i} appears twice"));
            }
            if p.links.iter().any(|l| l.0 >= net.num_links()) {
                return bad(format!("path {i} uses an unknown link"));
            }
            let path = Path::new(net, p.links.clone());
            if path.source(net) != Some(self.signals[p.signal]) || path.target(net) != Some(self.destination) {
                return bad(format!("path {i} does not run from its source to the destination"));
            }
            if !path.is_simple(net) {
                return bad(format!("path {i} is not a simple path"));
            }
        }
        let expected: usize = self.subgroups.iter().map(|m| m.len()).sum();
        if seen.len() != expected {
            return bad("some incidence has no path".into());
        }
        for sig in 0..n {
            let ps = self.paths_of(sig);
            let a: HashSet<SpanId> = self.paths[ps[0]].spans().collect();
            if self.paths[ps[1]].spans().any(|s| a.contains(&s)) {
                return bad(format!("the two paths of signal {sig} share a span"));
            }
        }
        Ok(())
    }

    /// Canonical text used for hashing; invariant under relabeling of signals
    /// and subgroups.
    pub fn canonical_key(&self) -> String {
        let describe = |p: &CodedPath| -> String {
            let links: Vec<String> = p.links.iter().map(|l| l.0.to_string()).collect();
            format!("{}:{}", self.signals[p.signal].0, links.join("."))
        };
        let mut signals: Vec<String> = (0..self.n_signals())
            .map(|s| {
                let mut ps: Vec<String> = self.paths_of(s).iter().map(|&p| describe(&self.paths[p])).collect();
                ps.sort();
                ps.join("|")
            })
            .collect();
        signals.sort();
        let mut subgroups: Vec<String> = (0..self.subgroups.len())
            .map(|sg| {
                let mut ps: Vec<String> = self
                    .paths
                    .iter()
                    .filter(|p| p.subgroup == sg)
                    .map(describe)
                    .collect();
                ps.sort();
                ps.join("+")
            })
            .collect();
        subgroups.sort();
        format!("d{};{};{}", self.destination.0, signals.join(","), subgroups.join(","))
    }
}

/// Outcome of checking one structure against every single span failure.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub spans_checked: usize,
    /// Spans whose failure leaves the code undecodable.
    pub failing_spans: Vec<usize>,
    /// Spans where the Hall-style condition and the rank test disagree.
    pub hall_disagreements: Vec<usize>,
    pub intact_decodable: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.intact_decodable && self.failing_spans.is_empty()
    }
}

pub fn verify_group(cs: &CodingStructure, net: &Network) -> VerifyReport {
    let mut report = VerifyReport {
        intact_decodable: is_decodable(&cs.intact()),
        ..Default::default()
    };
    for sp in net.span_ids() {
        let rv = cs.simulate_span_failure(net, sp).expect("span from network");
        report.spans_checked += 1;
        let rank_ok = is_decodable(&rv);
        if !rank_ok {
            report.failing_spans.push(sp.0);
        }
        if let Ok(hall) = hall_check(&rv) {
            if hall != rank_ok {
                log::warn!("hall condition and rank disagree on span {}", sp.0);
                report.hall_disagreements.push(sp.0);
            }
        }
    }
    report
}

/// A priced column: one coding structure toward a destination.
#[derive(Clone, Debug, PartialEq)]
pub struct CodingGroup {
    pub destination: NodeId,
    pub counts: BTreeMap<NodeId, u32>,
    pub cost: f64,
    pub structure: CodingStructure,
    pub id: u64,
}

impl CodingGroup {
    pub fn new(structure: CodingStructure, net: &Network) -> Self {
        let mut h = DefaultHasher::new();
        structure.canonical_key().hash(&mut h);
        Self {
            destination: structure.destination,
            counts: structure.counts(),
            cost: structure.cost(net),
            id: h.finish(),
            structure,
        }
    }

    pub fn count(&self, source: NodeId) -> u32 {
        self.counts.get(&source).copied().unwrap_or(0)
    }

    pub fn size(&self) -> u32 {
        self.counts.values().sum()
    }

    pub fn to_json(&self, net: &Network) -> GroupJson {
        let coherence = self.structure.coherence_matrix();
        let k = self.structure.paths.len();
        let mut coherent_pairs = Vec::new();
        for p in 0..k {
            for q in p + 1..k {
                if coherence[p][q] && coherence[q][p] {
                    coherent_pairs.push([p, q]);
                }
            }
        }
        GroupJson {
            schema: GROUP_SCHEMA.to_string(),
            id: format!("{:016x}", self.id),
            destination: net.name(self.destination).to_string(),
            counts: self
                .counts
                .iter()
                .map(|(v, c)| (net.name(*v).to_string(), *c))
                .collect(),
            cost: self.cost,
            signals: self
                .structure
                .signals
                .iter()
                .map(|v| net.name(*v).to_string())
                .collect(),
            subgroups: self.structure.subgroups.clone(),
            paths: self
                .structure
                .paths
                .iter()
                .map(|p| PathJson {
                    signal: p.signal,
                    subgroup: p.subgroup,
                    links: p.links.iter().map(|&l| net.link_label(l)).collect(),
                })
                .collect(),
            coherent_pairs,
        }
    }

    /// Rebuilds a group from JSON; cost and id are recomputed from the paths.
    pub fn from_json(doc: &GroupJson, net: &Network) -> Result<Self, CodingError> {
        if doc.schema != GROUP_SCHEMA {
            return Err(CodingError::Schema(doc.schema.clone()));
        }
        let node = |n: &str| net.node(n).map_err(|_| CodingError::UnknownNode(n.to_string()));
        let labels: BTreeMap<String, LinkId> = net.link_ids().map(|l| (net.link_label(l), l)).collect();
        let mut paths = Vec::with_capacity(doc.paths.len());
        for p in &doc.paths {
            let links = p
                .links
                .iter()
                .map(|s| labels.get(s).copied().ok_or_else(|| CodingError::UnknownLink(s.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            paths.push(CodedPath {
                signal: p.signal,
                subgroup: p.subgroup,
                links,
            });
        }
        let signals = doc.signals.iter().map(|s| node(s)).collect::<Result<Vec<_>, _>>()?;
        let cs = CodingStructure::new(node(&doc.destination)?, signals, doc.subgroups.clone(), paths);
        Ok(Self::new(cs, net))
    }
}

/// Serialized form of a coding group.
///
/// `links` use the `tail->head` labels of the network, with `#tag` appended
/// for tagged parallel spans. `coherent_pairs` lists path index pairs that may
/// share spans; all other pairs must stay span-disjoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupJson {
    pub schema: String,
    pub id: String,
    pub destination: String,
    pub counts: BTreeMap<String, u32>,
    pub cost: f64,
    pub signals: Vec<String>,
    pub subgroups: Vec<Vec<usize>>,
    pub paths: Vec<PathJson>,
    pub coherent_pairs: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathJson {
    pub signal: usize,
    pub subgroup: usize,
    pub links: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::fixtures;

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    const E: usize = 4;

    /// `[a+c, b, a+e, c, b+d+e, d]` with placeholder paths.
    fn five_signal_code() -> CodingStructure {
        let subgroups = vec![vec![A, C], vec![B], vec![A, E], vec![C], vec![B, D, E], vec![D]];
        let mut paths = Vec::new();
        for (sg, members) in subgroups.iter().enumerate() {
            for &s in members {
                paths.push(CodedPath {
                    signal: s,
                    subgroup: sg,
                    links: Vec::new(),
                });
            }
        }
        CodingStructure::new(NodeId(0), vec![NodeId(1); 5], subgroups, paths)
    }

    fn path_index(cs: &CodingStructure, signal: usize, subgroup: usize) -> usize {
        cs.paths
            .iter()
            .position(|p| p.signal == signal && p.subgroup == subgroup)
            .unwrap()
    }

    #[test]
    fn rank_examples() {
        let rv = ReceivedVector::from_lists(5, &[&[C], &[], &[A, E], &[C], &[B, D, E], &[D]]);
        assert!(!is_decodable(&rv));
        assert_eq!(gf2_rank(&rv.rows), 4);
        assert!(!hall_check(&rv).unwrap());

        let sys = ReceivedVector::from_lists(2, &[&[0], &[1], &[0, 1]]);
        assert!(is_decodable(&sys));
        assert!(hall_check(&sys).unwrap());

        let dup = ReceivedVector::from_lists(2, &[&[0, 1], &[0, 1]]);
        assert!(!is_decodable(&dup));

        let diag = ReceivedVector::from_lists(2, &[&[0], &[1]]);
        assert!(hall_check(&diag).unwrap());

        let big = ReceivedVector::from_lists(21, &[]);
        assert!(hall_check(&big).is_err());
    }

    #[test]
    fn pair_failure_in_five_signal_code() {
        let cs = five_signal_code();
        let failed: HashSet<usize> = [path_index(&cs, B, 1), path_index(&cs, A, 0)].into();
        let rv = cs.received(&failed);
        assert_eq!(rv, ReceivedVector::from_lists(5, &[&[C], &[], &[A, E], &[C], &[B, D, E], &[D]]));
    }

    #[test]
    fn coherence_of_b_in_second_subgroup() {
        let cs = five_signal_code();
        let (coh, non) = cs.coherence_propagate(path_index(&cs, B, 1)).unwrap();
        let want_coh: BTreeSet<usize> = [(D, 4), (E, 4), (A, 2), (C, 0)]
            .iter()
            .map(|&(s, g)| path_index(&cs, s, g))
            .collect();
        let want_non: BTreeSet<usize> = [(B, 4), (E, 2), (D, 5), (A, 0), (C, 3)]
            .iter()
            .map(|&(s, g)| path_index(&cs, s, g))
            .collect();
        assert_eq!(coh, want_coh);
        assert_eq!(non, want_non);
    }

    #[test]
    fn coherence_of_systematic_pair() {
        let paths = vec![
            CodedPath { signal: 0, subgroup: 0, links: vec![] },
            CodedPath { signal: 1, subgroup: 1, links: vec![] },
            CodedPath { signal: 0, subgroup: 2, links: vec![] },
            CodedPath { signal: 1, subgroup: 2, links: vec![] },
        ];
        let cs = CodingStructure::new(NodeId(0), vec![NodeId(1), NodeId(2)], vec![vec![0], vec![1], vec![0, 1]], paths);
        let (coh, non) = cs.coherence_propagate(0).unwrap();
        assert_eq!(coh, [3].into());
        assert_eq!(non, [1, 2].into());
        assert!(cs.coherence_propagate(9).is_err());
    }

    #[test]
    fn coherence_of_single_signal() {
        let paths = vec![
            CodedPath { signal: 0, subgroup: 0, links: vec![] },
            CodedPath { signal: 0, subgroup: 1, links: vec![] },
        ];
        let cs = CodingStructure::new(NodeId(0), vec![NodeId(1)], vec![vec![0], vec![0]], paths);
        let (coh, non) = cs.coherence_propagate(0).unwrap();
        assert!(coh.is_empty());
        assert_eq!(non, [1].into());
    }

    #[test]
    fn singleton_group_failures() {
        let net = fixtures::diamond();
        let (s, t) = (net.node("s").unwrap(), net.node("t").unwrap());
        let pair = net.disjoint_pair(s, t).unwrap();
        let cs = CodingStructure::singleton(t, s, &pair);
        cs.validate(&net).unwrap();
        let first = pair.primary.links[0].span();
        let rv = cs.simulate_span_failure(&net, first).unwrap();
        assert_eq!(rv, ReceivedVector::from_lists(1, &[&[], &[0]]));
        let unused = net
            .span_ids()
            .find(|sp| !pair.primary.spans().chain(pair.protection.spans()).any(|x| x == *sp))
            .unwrap();
        assert_eq!(cs.simulate_span_failure(&net, unused).unwrap(), cs.intact());
        assert!(cs.simulate_span_failure(&net, SpanId(99)).is_err());
        let report = verify_group(&cs, &net);
        assert!(report.passed());
        let g = CodingGroup::new(cs, &net);
        assert_eq!(g.cost, 4.0);
    }

    #[test]
    fn empty_group_passes_vacuously() {
        let net = fixtures::diamond();
        let cs = CodingStructure::empty(net.node("t").unwrap());
        assert!(verify_group(&cs, &net).passed());
    }

    #[test]
    fn json_round_trip_recomputes_cost() {
        let net = fixtures::example1();
        let d = net.node("D").unwrap();
        let s1 = net.node("S1").unwrap();
        let pair = net.disjoint_pair(s1, d).unwrap();
        let g = CodingGroup::new(CodingStructure::singleton(d, s1, &pair), &net);
        let doc = g.to_json(&net);
        let text = serde_json::to_string(&doc).unwrap();
        let back: GroupJson = serde_json::from_str(&text).unwrap();
        assert_eq!(CodingGroup::from_json(&back, &net).unwrap(), g);
        assert_eq!(g.cost, 10.0);
    }

    #[test]
    fn canonical_key_ignores_labels() {
        let cs = five_signal_code();
        let mut shuffled = cs.clone();
        shuffled.subgroups.reverse();
        let last = shuffled.subgroups.len() - 1;
        for p in shuffled.paths.iter_mut() {
            p.subgroup = last - p.subgroup;
        }
        assert_eq!(cs.canonical_key(), shuffled.canonical_key());
    }
}

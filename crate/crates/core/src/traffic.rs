//! Gravity-model demand generation and per-destination aggregation.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum TrafficError {
    #[error("need at least two nodes with positive weight, got {0}")]
    TooFewNodes(usize),
    #[error("weight of node {node} must be positive, got {weight}")]
    BadWeight { node: String, weight: f64 },
    #[error("split factor must be at least 1")]
    ZeroFactor,
    #[error("self-demand at node {0}")]
    SelfDemand(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Integer unit demands keyed by ordered `(source, destination)` names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficMatrix {
    entries: BTreeMap<(String, String), u64>,
}

impl TrafficMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `units` to the `(s, d)` entry.
    pub fn add(&mut self, s: &str, d: &str, units: u64) -> Result<(), TrafficError> {
        if s == d {
            return Err(TrafficError::SelfDemand(s.to_string()));
        }
        if units > 0 {
            *self.entries.entry((s.to_string(), d.to_string())).or_insert(0) += units;
        }
        Ok(())
    }

    pub fn get(&self, s: &str, d: &str) -> u64 {
        self.entries
            .get(&(s.to_string(), d.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.entries.iter().map(|((s, d), u)| (s.as_str(), d.as_str(), *u))
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Destinations with positive inbound demand, in name order.
    pub fn destinations(&self) -> Vec<String> {
        let mut ds: Vec<String> = self.entries.keys().map(|(_, d)| d.clone()).collect();
        ds.sort();
        ds.dedup();
        ds
    }

    pub fn aggregate_to_destination(&self, d: &str) -> DemandVector {
        let demands = self
            .entries
            .iter()
            .filter(|((_, dest), _)| dest == d)
            .map(|((s, _), u)| (s.clone(), *u))
            .collect();
        DemandVector {
            destination: d.to_string(),
            demands,
        }
    }

    /// Every entry multiplied by `factor`.
    pub fn split_granularity(&self, factor: u64) -> Result<TrafficMatrix, TrafficError> {
        if factor == 0 {
            return Err(TrafficError::ZeroFactor);
        }
        Ok(TrafficMatrix {
            entries: self
                .entries
                .iter()
                .map(|(k, u)| (k.clone(), u * factor))
                .collect(),
        })
    }

    /// Writes `source,destination,units` rows in key order.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), TrafficError> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["source", "destination", "units"])?;
        for (s, d, u) in self.iter() {
            wtr.write_record([s, d, &u.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<TrafficMatrix, TrafficError> {
        #[derive(Deserialize)]
        struct Row {
            source: String,
            destination: String,
            units: u64,
        }
        let mut tm = TrafficMatrix::new();
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        for row in rdr.deserialize() {
            let row: Row = row?;
            tm.add(&row.source, &row.destination, row.units)?;
        }
        Ok(tm)
    }
}

/// Demand toward one destination, keyed by source name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandVector {
    pub destination: String,
    pub demands: BTreeMap<String, u64>,
}

impl DemandVector {
    pub fn total(&self) -> u64 {
        self.demands.values().sum()
    }

    pub fn get(&self, source: &str) -> u64 {
        self.demands.get(source).copied().unwrap_or(0)
    }

    /// Sources with positive demand, in name order.
    pub fn positive(&self) -> impl Iterator<Item = (&str, u64)> {
        self.demands
            .iter()
            .filter(|(_, u)| **u > 0)
            .map(|(s, u)| (s.as_str(), *u))
    }
}

/// Positive per-node weights in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeWeights {
    weights: Vec<(String, f64)>,
}

impl NodeWeights {
    pub fn new(weights: impl IntoIterator<Item = (String, f64)>) -> Result<Self, TrafficError> {
        let weights: Vec<(String, f64)> = weights.into_iter().collect();
        for (node, w) in &weights {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(TrafficError::BadWeight {
                    node: node.clone(),
                    weight: *w,
                });
            }
        }
        Ok(Self { weights })
    }

    /// Equal weight on every named node.
    pub fn uniform<'a>(nodes: impl IntoIterator<Item = &'a str>) -> Self {
        Self {
            weights: nodes.into_iter().map(|n| (n.to_string(), 1.0)).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.weights.iter().map(|(n, w)| (n.as_str(), *w))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, TrafficError> {
        #[derive(Deserialize)]
        struct Row {
            node: String,
            weight: f64,
        }
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let mut rows = Vec::new();
        for row in rdr.deserialize() {
            let row: Row = row?;
            rows.push((row.node, row.weight));
        }
        Self::new(rows)
    }
}

/// Draws `total_demands` unit demands; the ordered pair `(s, d)`, `s != d`, is
/// picked with probability proportional to `w(s) * w(d)`.
pub fn generate_gravity(
    weights: &NodeWeights,
    total_demands: u64,
    seed: u64,
) -> Result<TrafficMatrix, TrafficError> {
    let nodes = &weights.weights;
    if nodes.len() < 2 {
        return Err(TrafficError::TooFewNodes(nodes.len()));
    }
    let mut pairs = Vec::with_capacity(nodes.len() * (nodes.len() - 1));
    let mut probs = Vec::with_capacity(pairs.capacity());
    for (i, (s, ws)) in nodes.iter().enumerate() {
        for (j, (d, wd)) in nodes.iter().enumerate() {
            if i != j {
                pairs.push((s.as_str(), d.as_str()));
                probs.push(ws * wd);
            }
        }
    }
    let dist = WeightedIndex::new(&probs).map_err(|_| TrafficError::TooFewNodes(nodes.len()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tm = TrafficMatrix::new();
    for _ in 0..total_demands {
        let (s, d) = pairs[dist.sample(&mut rng)];
        tm.add(s, d, 1)?;
    }
    Ok(tm)
}

//! Friendship network: ingestion, giant component, degree-preserving rewiring.
//!
//! Node ids are dense `0..node_count` after ingestion. The original string
//! ids are kept in a side table and only matter for I/O.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};

use log::warn;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
    ids: Vec<String>,
    index: HashMap<String, NodeId>,
}

/// What was dropped while building a [`Network`] from raw rows.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub rows: usize,
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Network {
    /// Builds a network over `node_count` nodes labelled `"0".."n-1"`.
    /// Self-loops and duplicate edges are dropped.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self> {
        let ids = (0..node_count).map(|i| i.to_string()).collect();
        Self::with_ids(ids, edges).map(|(net, _)| net)
    }

    /// Builds a network with an explicit original-id table. Every endpoint must be `< ids.len()`.
    pub fn with_ids(
        ids: Vec<String>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<(Self, LoadReport)> {
        let n = ids.len();
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate node id `{id}`")));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut report = LoadReport::default();
        for (u, v) in edges {
            report.rows += 1;
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                report.self_loops += 1;
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut edge_twice = 0;
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            // each duplicate undirected edge shows up once in both endpoint lists
            report.duplicates += before - list.len();
            edge_twice += list.len();
        }
        report.duplicates /= 2;
        Ok((
            Network {
                adjacency,
                edge_count: edge_twice / 2,
                ids,
                index,
            },
            report,
        ))
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Neighbors of `node` in ascending id order.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Original (pre-remapping) id of a dense node.
    pub fn original_id(&self, node: NodeId) -> &str {
        &self.ids[node]
    }

    pub fn original_ids(&self) -> &[String] {
        &self.ids
    }

    pub fn node_of(&self, original_id: &str) -> Option<NodeId> {
        self.index.get(original_id).copied()
    }

    /// True when every node is reachable from node 0 (vacuously true when empty).
    pub fn is_connected(&self) -> bool {
        match self.node_count() {
            0 => true,
            _ => self.component_of(0).len() == self.node_count(),
        }
    }

    fn component_of(&self, start: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut out = Vec::new();
        while let Some(u) = queue.pop_front() {
            out.push(u);
            for &v in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        out
    }

    /// Same network with node `i` renamed to `perm[i]`. Original ids travel with their nodes.
    pub fn permuted(&self, perm: &[NodeId]) -> Result<Self> {
        let n = self.node_count();
        if perm.len() != n {
            return Err(Error::invalid("permutation length differs from node count"));
        }
        let mut ids = vec![String::new(); n];
        for (old, &new) in perm.iter().enumerate() {
            ids[new] = self.ids[old].clone();
        }
        let edges = self.edges().map(|(u, v)| (perm[u], perm[v]));
        Self::with_ids(ids, edges).map(|(net, _)| net)
    }
}

/// Builds a network from string id pairs, remapping ids to dense integers in
/// order of first appearance. Self-loops and duplicate edges are dropped and counted.
pub fn load_network<I, S>(rows: I) -> Result<(Network, LoadReport)>
where
    I: IntoIterator<Item = (S, S)>,
    S: AsRef<str>,
{
    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut intern = |id: &str| -> NodeId {
        if let Some(&i) = index.get(id) {
            return i;
        }
        let i = ids.len();
        ids.push(id.to_owned());
        index.insert(id.to_owned(), i);
        i
    };
    let pairs: Vec<(NodeId, NodeId)> = rows
        .into_iter()
        .map(|(a, b)| (intern(a.as_ref()), intern(b.as_ref())))
        .collect();
    if pairs.is_empty() {
        return Err(Error::EmptyInput("edge list has no rows"));
    }
    let (net, report) = Network::with_ids(ids, pairs)?;
    if report.self_loops > 0 || report.duplicates > 0 {
        warn!(
            "dropped {} self-loop(s) and {} duplicate edge(s)",
            report.self_loops, report.duplicates
        );
    }
    Ok((net, report))
}

/// Orders original ids numerically when both parse as integers, lexicographically otherwise.
pub fn compare_original_ids(a: &str, b: &str) -> Ordering {
    match (a.parse::<i128>(), b.parse::<i128>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

/// Largest connected component. Returns the component as a new network plus
/// `mapping[new_id] = old_id`. Size ties go to the component holding the
/// smallest original id.
pub fn giant_component(net: &Network) -> Result<(Network, Vec<NodeId>)> {
    if net.node_count() == 0 {
        return Err(Error::EmptyInput("network has no nodes"));
    }
    let mut assigned = vec![false; net.node_count()];
    let mut best: Option<(Vec<NodeId>, NodeId)> = None;
    for start in 0..net.node_count() {
        if assigned[start] {
            continue;
        }
        let comp = net.component_of(start);
        for &u in &comp {
            assigned[u] = true;
        }
        let min_id = *comp
            .iter()
            .min_by(|&&a, &&b| compare_original_ids(net.original_id(a), net.original_id(b)))
            .expect("component contains its start node");
        let better = match &best {
            None => true,
            Some((b, b_min)) => {
                comp.len() > b.len()
                    || (comp.len() == b.len()
                        && compare_original_ids(net.original_id(min_id), net.original_id(*b_min))
                            == Ordering::Less)
            }
        };
        if better {
            best = Some((comp, min_id));
        }
    }
    let (mut mapping, _) = best.expect("non-empty network has a component");
    mapping.sort_unstable();
    let mut new_of = vec![usize::MAX; net.node_count()];
    for (new, &old) in mapping.iter().enumerate() {
        new_of[old] = new;
    }
    let ids = mapping.iter().map(|&old| net.ids[old].clone()).collect();
    let edges = net
        .edges()
        .filter(|&(u, _)| new_of[u] != usize::MAX)
        .map(|(u, v)| (new_of[u], new_of[v]));
    let (sub, _) = Network::with_ids(ids, edges)?;
    Ok((sub, mapping))
}

/// Outcome counters of a rewiring run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewireReport {
    pub attempted: usize,
    pub accepted: usize,
}

pub const DEFAULT_SWAPS_PER_EDGE: usize = 10;

/// Degree-preserving randomization by repeated double-edge swaps.
///
/// Each attempt picks two distinct edges `(a, b)`, `(c, d)` and proposes
/// `(a, d)`, `(c, b)` (orientation of the second edge chosen at random). Swaps
/// that would create a self-loop or a duplicate edge are rejected. Exactly
/// `swaps_per_edge * edge_count` attempts are made. Graphs with fewer than two
/// edges, or where every attempt is rejected, come back unchanged.
pub fn configuration_rewire(
    net: &Network,
    swaps_per_edge: usize,
    seed: u64,
) -> Result<(Network, RewireReport)> {
    if swaps_per_edge == 0 {
        return Err(Error::invalid("swaps_per_edge must be at least 1"));
    }
    let mut edges: Vec<(NodeId, NodeId)> = net.edges().collect();
    let m = edges.len();
    if m < 2 {
        warn!("rewire: fewer than two edges, no legal swap exists; network unchanged");
        return Ok((net.clone(), RewireReport::default()));
    }
    let key = |u: NodeId, v: NodeId| if u < v { (u, v) } else { (v, u) };
    let mut present: HashSet<(NodeId, NodeId)> = edges.iter().copied().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = RewireReport {
        attempted: swaps_per_edge * m,
        accepted: 0,
    };
    for _ in 0..report.attempted {
        let i = rng.gen_range(0..m);
        let mut j = rng.gen_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if rng.gen::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b {
            continue;
        }
        let (e1, e2) = (key(a, d), key(c, b));
        if e1 == e2 || present.contains(&e1) || present.contains(&e2) {
            continue;
        }
        present.remove(&edges[i]);
        present.remove(&edges[j]);
        present.insert(e1);
        present.insert(e2);
        edges[i] = e1;
        edges[j] = e2;
        report.accepted += 1;
    }
    if report.accepted == 0 {
        warn!("rewire: no legal double-edge swap found; network unchanged");
    }
    let (out, _) = Network::with_ids(net.ids.clone(), edges)?;
    Ok((out, report))
}

/// |E(a) ∩ E(b)| / |E(a) ∪ E(b)| over dense-id edge sets.
pub fn edge_jaccard(a: &Network, b: &Network) -> f64 {
    let ea: HashSet<_> = a.edges().collect();
    let eb: HashSet<_> = b.edges().collect();
    let union = ea.union(&eb).count();
    if union == 0 {
        return 1.0;
    }
    ea.intersection(&eb).count() as f64 / union as f64
}

/// Per-node demographic attributes; `None` marks a missing value.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NodeAttributes {
    pub vote: Vec<Option<String>>,
    pub age: Vec<Option<f64>>,
    pub gender: Vec<Option<String>>,
    pub locality: Vec<Option<String>>,
}

impl NodeAttributes {
    /// All-missing table for `node_count` nodes.
    pub fn empty(node_count: usize) -> Self {
        NodeAttributes {
            vote: vec![None; node_count],
            age: vec![None; node_count],
            gender: vec![None; node_count],
            locality: vec![None; node_count],
        }
    }

    pub fn node_count(&self) -> usize {
        self.vote.len()
    }
}

//! Network model, oblivious routings, and congestion evaluation.

use crate::assignment::max_weight_assignment;
use crate::error::{Error, Result};
use crate::matrix::TrafficMatrix;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

/// Absolute tolerance for flow conservation and fraction range checks.
pub const CONSERVATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Node {
    pub id: String,
    pub name: String,
    /// Maximum rate at which this node may initiate traffic.
    pub ingress: f64,
    /// Maximum rate at which this node may receive traffic.
    pub egress: f64,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub capacity: f64,
    pub weight: Option<f64>,
}

/// A directed capacitated graph with per-node rate limits.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    node_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    out_adj: Vec<Vec<usize>>, // outgoing edge indices per node
}

impl Network {
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Structural("a network needs at least two nodes".into()));
        }
        let mut node_index = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if node.ingress.is_nan() || node.ingress < 0.0 || node.egress.is_nan() || node.egress < 0.0 {
                return Err(Error::Structural(format!("node `{}` has negative rate", node.id)));
            }
            if node_index.insert(node.id.clone(), i).is_some() {
                return Err(Error::Structural(format!("duplicate node id `{}`", node.id)));
            }
        }
        let mut edge_index = HashMap::new();
        let mut seen_pairs = HashMap::new();
        for (k, edge) in edges.iter().enumerate() {
            if edge.capacity.is_nan() || edge.capacity <= 0.0 {
                return Err(Error::Structural(format!(
                    "edge `{}` must have positive capacity",
                    edge.id
                )));
            }
            if let Some(w) = edge.weight {
                if w.is_nan() || w <= 0.0 {
                    return Err(Error::Structural(format!(
                        "edge `{}` must have positive weight",
                        edge.id
                    )));
                }
            }
            if edge.from >= nodes.len() || edge.to >= nodes.len() {
                return Err(Error::Structural(format!("edge `{}` references unknown node", edge.id)));
            }
            if edge.from == edge.to {
                return Err(Error::Structural(format!("edge `{}` is a self-loop", edge.id)));
            }
            if edge_index.insert(edge.id.clone(), k).is_some() {
                return Err(Error::Structural(format!("duplicate edge id `{}`", edge.id)));
            }
            if seen_pairs.insert((edge.from, edge.to), k).is_some() {
                return Err(Error::Structural(format!(
                    "parallel edge `{}` on pair ({}, {})",
                    edge.id, nodes[edge.from].id, nodes[edge.to].id
                )));
            }
        }
        let mut out_adj = vec![Vec::new(); nodes.len()];
        for (k, edge) in edges.iter().enumerate() {
            out_adj[edge.from].push(k);
        }
        Ok(Network { nodes, edges, node_index, edge_index, out_adj })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_idx(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn edge_idx(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn out_edges(&self, node: usize) -> &[usize] {
        &self.out_adj[node]
    }

    /// True iff every node has unit ingress and egress rate.
    pub fn is_homogeneous(&self) -> bool {
        self.nodes.iter().all(|v| v.ingress == 1.0 && v.egress == 1.0)
    }

    pub fn ingress_rates(&self) -> Vec<f64> {
        self.nodes.iter().map(|v| v.ingress).collect()
    }

    pub fn egress_rates(&self) -> Vec<f64> {
        self.nodes.iter().map(|v| v.egress).collect()
    }
}

/// Per-(source, destination, edge) flow fractions, stored sparse per edge.
///
/// Commodity (i, i) flows are circulations: they are allowed (a walk may
/// leave and re-enter its endpoint) but conservation demands zero net flow
/// at every node.
#[derive(Debug, Clone)]
pub struct Routing {
    n: usize,
    per_edge: Vec<Vec<(u32, u32, f64)>>,
    single_path: bool,
}

impl Routing {
    /// Build from explicit fraction records; rejects fractions outside [0, 1].
    pub fn from_fractions(
        net: &Network,
        records: impl IntoIterator<Item = (usize, usize, usize, f64)>,
    ) -> Result<Self> {
        let n = net.n();
        let mut per_edge: Vec<HashMap<(u32, u32), f64>> = vec![HashMap::new(); net.edges().len()];
        for (src, dst, edge, frac) in records {
            if src >= n || dst >= n || edge >= net.edges().len() {
                return Err(Error::Structural("routing record references unknown node or edge".into()));
            }
            *per_edge[edge].entry((src as u32, dst as u32)).or_insert(0.0) += frac;
        }
        Self::finish(n, per_edge)
    }

    /// Build by laying unit flow along explicit edge paths (one path per record;
    /// a commodity may appear several times, e.g. for an even split).
    pub fn from_paths(
        net: &Network,
        paths: impl IntoIterator<Item = (usize, usize, Vec<usize>, f64)>,
    ) -> Result<Self> {
        let n = net.n();
        let mut per_edge: Vec<HashMap<(u32, u32), f64>> = vec![HashMap::new(); net.edges().len()];
        for (src, dst, path, frac) in paths {
            for e in path {
                *per_edge[e].entry((src as u32, dst as u32)).or_insert(0.0) += frac;
            }
        }
        Self::finish(n, per_edge)
    }

    fn finish(n: usize, per_edge: Vec<HashMap<(u32, u32), f64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(per_edge.len());
        let mut single_path = true;
        for (e, map) in per_edge.into_iter().enumerate() {
            let mut list: Vec<(u32, u32, f64)> =
                map.into_iter().map(|((i, j), f)| (i, j, f)).collect();
            for &(i, j, f) in &list {
                if !(-CONSERVATION_TOL..=1.0 + CONSERVATION_TOL).contains(&f) {
                    return Err(Error::Structural(format!(
                        "fraction {f} for commodity ({i}, {j}) on edge index {e} is outside [0, 1]"
                    )));
                }
                if f != 1.0 {
                    single_path = false;
                }
            }
            list.retain(|&(_, _, f)| f != 0.0);
            list.sort_by_key(|&(i, j, _)| (i, j));
            out.push(list);
        }
        Ok(Routing { n, per_edge: out, single_path })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// True iff every stored fraction is exactly 1.
    pub fn is_single_path(&self) -> bool {
        self.single_path
    }

    /// Sparse support of f(e): `(src, dst, fraction)` triples.
    pub fn edge_support(&self, edge: usize) -> &[(u32, u32, f64)] {
        &self.per_edge[edge]
    }

    pub fn fraction(&self, src: usize, dst: usize, edge: usize) -> f64 {
        let key = (src as u32, dst as u32);
        match self.per_edge[edge].binary_search_by_key(&key, |&(i, j, _)| (i, j)) {
            Ok(pos) => self.per_edge[edge][pos].2,
            Err(_) => 0.0,
        }
    }

    /// Dense copy of f(e) as an n x n matrix.
    pub fn edge_matrix(&self, edge: usize) -> Vec<f64> {
        let n = self.n;
        let mut w = vec![0.0; n * n];
        for &(i, j, f) in &self.per_edge[edge] {
            w[i as usize * n + j as usize] = f;
        }
        w
    }
}

/// One flow conservation violation: commodity `(src, dst)` has nonzero
/// `residual` net flow at `node` (after accounting for its role).
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationViolation {
    pub src: usize,
    pub dst: usize,
    pub node: usize,
    pub residual: f64,
}

pub fn validate_routing(net: &Network, routing: &Routing) -> Result<Vec<ConservationViolation>> {
    validate_routing_with_tol(net, routing, CONSERVATION_TOL)
}

/// Checks the linear flow conservation constraints for every routed commodity
/// (one with any stored fraction).
///
/// For (i, j) with i != j the net out-flow at i and net in-flow at j must be
/// 1 and all other nodes must conserve. Flow on an (i, i) commodity must be a
/// circulation (zero net flow everywhere).
pub fn validate_routing_with_tol(
    net: &Network,
    routing: &Routing,
    tol: f64,
) -> Result<Vec<ConservationViolation>> {
    let n = net.n();
    if routing.n() != n {
        return Err(Error::Structural(format!(
            "routing dimension {} does not match network size {n}",
            routing.n()
        )));
    }
    // net out-flow per (commodity, node)
    let mut balance: HashMap<(u32, u32), Vec<f64>> = HashMap::new();
    for (e, support) in routing.per_edge.iter().enumerate() {
        let edge = &net.edges()[e];
        for &(i, j, f) in support {
            let b = balance.entry((i, j)).or_insert_with(|| vec![0.0; n]);
            b[edge.from] += f;
            b[edge.to] -= f;
        }
    }
    let mut violations = Vec::new();
    for (&(src, dst), b) in balance.iter() {
        let (src, dst) = (src as usize, dst as usize);
        for (node, &net_out) in b.iter().enumerate() {
            let expected = if src == dst {
                0.0
            } else if node == src {
                1.0
            } else if node == dst {
                -1.0
            } else {
                0.0
            };
            let residual = net_out - expected;
            if residual.abs() > tol {
                violations.push(ConservationViolation { src, dst, node, residual });
            }
        }
    }
    violations.sort_by_key(|v| (v.src, v.dst, v.node));
    Ok(violations)
}

/// Flow crossing edge `e` under demand `d`: sum of D_ij * f_ij(e).
#[inline]
pub fn edge_flow(routing: &Routing, edge: usize, d: &TrafficMatrix) -> f64 {
    let n = d.n();
    debug_assert_eq!(routing.n(), n);
    let data = d.data();
    let mut flow = 0.0;
    for &(i, j, f) in &routing.per_edge[edge] {
        flow += data[i as usize * n + j as usize] * f;
    }
    flow
}

/// Edge congestion: flow crossing `e` divided by its capacity.
#[inline]
pub fn edge_congestion(net: &Network, routing: &Routing, edge: usize, d: &TrafficMatrix) -> f64 {
    assert_eq!(d.n(), net.n(), "traffic matrix dimension mismatch");
    edge_flow(routing, edge, d) / net.edges()[edge].capacity
}

/// Global congestion: the maximum edge congestion over all edges.
pub fn global_congestion(net: &Network, routing: &Routing, d: &TrafficMatrix) -> f64 {
    assert_eq!(d.n(), net.n(), "traffic matrix dimension mismatch");
    let mut worst = 0.0f64;
    for e in 0..net.edges().len() {
        let c = edge_flow(routing, e, d) / net.edges()[e].capacity;
        if c > worst {
            worst = c;
        }
    }
    worst
}

/// Throughput: min(1/GC, 1); a zero-demand matrix gets throughput 1.
pub fn throughput(net: &Network, routing: &Routing, d: &TrafficMatrix) -> f64 {
    let gc = global_congestion(net, routing, d);
    if gc <= 1.0 {
        1.0
    } else {
        1.0 / gc
    }
}

#[derive(Debug, Clone)]
pub struct EdgeClassification {
    /// Edges whose removal disconnects the underlying undirected graph.
    pub bridges: Vec<usize>,
    /// The unique capacity minimizer, if one exists.
    pub strictly_minimal: Option<usize>,
}

pub fn classify_edges(net: &Network) -> EdgeClassification {
    let base = undirected_components(net, None);
    let mut bridges = Vec::new();
    for e in 0..net.edges().len() {
        if undirected_components(net, Some(e)) > base {
            bridges.push(e);
        }
    }
    let mut strictly_minimal = None;
    if !net.edges().is_empty() {
        let mut best = 0usize;
        for e in 1..net.edges().len() {
            if net.edges()[e].capacity < net.edges()[best].capacity {
                best = e;
            }
        }
        let c = net.edges()[best].capacity;
        let unique = net
            .edges()
            .iter()
            .enumerate()
            .all(|(e, edge)| e == best || edge.capacity > c);
        if unique {
            strictly_minimal = Some(best);
        }
    }
    EdgeClassification { bridges, strictly_minimal }
}

fn undirected_components(net: &Network, skip_edge: Option<usize>) -> usize {
    let n = net.n();
    let mut adj = vec![Vec::new(); n];
    for (k, e) in net.edges().iter().enumerate() {
        if Some(k) == skip_edge {
            continue;
        }
        adj[e.from].push(e.to);
        adj[e.to].push(e.from);
    }
    let mut seen = vec![false; n];
    let mut comps = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        comps += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    comps
}

/// Worst-case congestion on `edge` over all permutation traffic matrices,
/// solved exactly as a max-weight perfect assignment on f(e).
///
/// Only meaningful on homogeneous networks, where the admissible worst case
/// is attained on permutations.
pub fn worst_case_edge_congestion(net: &Network, routing: &Routing, edge: usize) -> Result<f64> {
    Ok(worst_case_with_witness(net, routing, edge)?.0)
}

/// Same as [`worst_case_edge_congestion`] but also returns a maximizing
/// permutation.
pub fn worst_case_with_witness(
    net: &Network,
    routing: &Routing,
    edge: usize,
) -> Result<(f64, Vec<usize>)> {
    if !net.is_homogeneous() {
        return Err(Error::UnsupportedMode(
            "worst-case edge congestion via assignment requires a homogeneous network".into(),
        ));
    }
    let n = net.n();
    let w = routing.edge_matrix(edge);
    let (value, witness) = max_weight_assignment(n, |i, j| w[i * n + j]);
    Ok((value / net.edges()[edge].capacity, witness))
}

/// Single-path shortest-path routing under the edge metric weights.
///
/// Every commodity (i, j), i != j, follows the minimum-weight path; ties are
/// broken toward the lexicographically smallest node-id sequence. Self
/// commodities are not routed.
pub fn shortest_path_routing(net: &Network) -> Result<Routing> {
    let n = net.n();
    for e in net.edges() {
        if e.weight.is_none() {
            return Err(Error::Structural(format!(
                "edge `{}` has no metric weight; shortest-path routing needs one",
                e.id
            )));
        }
    }
    // dist[s][v] = min weight from s to v
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (s, row) in dist.iter_mut().enumerate() {
        dijkstra(net, s, row);
    }
    let mut paths = Vec::new();
    for s in 0..n {
        #[allow(clippy::needless_range_loop)] // d also indexes other dist rows below
        for d in 0..n {
            if s == d {
                continue;
            }
            if !dist[s][d].is_finite() {
                return Err(Error::UnreachablePair {
                    src: net.nodes()[s].id.clone(),
                    dst: net.nodes()[d].id.clone(),
                });
            }
            // Greedy forward walk on the shortest-path DAG, choosing the
            // lexicographically smallest next node id at every step.
            let mut path = Vec::new();
            let mut v = s;
            while v != d {
                let mut best: Option<(usize, usize)> = None; // (edge, node)
                for &e in net.out_edges(v) {
                    let edge = &net.edges()[e];
                    let w = edge.weight.unwrap();
                    if (w + dist[edge.to][d] - dist[v][d]).abs() <= 1e-9 {
                        let better = match best {
                            None => true,
                            Some((_, u)) => net.nodes()[edge.to].id < net.nodes()[u].id,
                        };
                        if better {
                            best = Some((e, edge.to));
                        }
                    }
                }
                let (e, u) = best.expect("shortest-path DAG must have an outgoing arc");
                path.push(e);
                v = u;
            }
            paths.push((s, d, path, 1.0));
        }
    }
    Routing::from_paths(net, paths)
}

fn dijkstra(net: &Network, source: usize, dist: &mut [f64]) {
    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
        }
    }
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(Entry(0.0, source)));
    while let Some(Reverse(Entry(d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &e in net.out_edges(v) {
            let edge = &net.edges()[e];
            let nd = d + edge.weight.unwrap();
            if nd < dist[edge.to] {
                dist[edge.to] = nd;
                heap.push(Reverse(Entry(nd, edge.to)));
            }
        }
    }
}

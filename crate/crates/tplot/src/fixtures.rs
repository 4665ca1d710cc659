//! Bundled example networks and synthetic test instances.

use crate::error::{Error, Result};
use crate::net::{Edge, Network, Node, Routing};

/// Abilene backbone: 11 nodes, 28 directed unit-capacity edges, homogeneous
/// unit node rates. Metric weights are the publicly known Abilene IGP metrics.
///
/// Edge ids are `e1`..`e28`; `e13` is the Kansas City -> Indianapolis edge and
/// `e1` the Seattle -> Sunnyvale edge.
pub fn abilene_homogeneous() -> Network {
    abilene(None)
}

/// Abilene topology with heterogeneous per-node rates.
///
/// The per-node maximum rates are a surrogate table (fractions of the 10 Gbps
/// interface rate, in normalized units); substitute measured rates through the
/// network JSON format when available.
pub fn abilene_heterogeneous() -> Network {
    const RATES: [(&str, f64); 11] = [
        ("STTL", 0.20),
        ("SNVA", 0.25),
        ("LOSA", 0.30),
        ("DNVR", 0.15),
        ("KSCY", 0.20),
        ("HSTN", 0.25),
        ("CHIN", 0.35),
        ("IPLS", 0.25),
        ("ATLA", 0.30),
        ("WASH", 0.35),
        ("NYCM", 0.40),
    ];
    abilene(Some(&RATES))
}

fn abilene(rates: Option<&[(&str, f64)]>) -> Network {
    const CITIES: [(&str, &str); 11] = [
        ("STTL", "Seattle"),
        ("SNVA", "Sunnyvale"),
        ("LOSA", "Los Angeles"),
        ("DNVR", "Denver"),
        ("KSCY", "Kansas City"),
        ("HSTN", "Houston"),
        ("CHIN", "Chicago"),
        ("IPLS", "Indianapolis"),
        ("ATLA", "Atlanta"),
        ("WASH", "Washington"),
        ("NYCM", "New York"),
    ];
    // Undirected links with IGP metric; expanded to a directed pair each, in
    // an order that puts Seattle->Sunnyvale at e1 and Kansas City->
    // Indianapolis at e13.
    const LINKS: [(&str, &str, f64); 14] = [
        ("STTL", "SNVA", 861.0),
        ("STTL", "DNVR", 2095.0),
        ("SNVA", "LOSA", 366.0),
        ("SNVA", "DNVR", 1295.0),
        ("LOSA", "HSTN", 1705.0),
        ("DNVR", "KSCY", 639.0),
        ("KSCY", "IPLS", 548.0),
        ("KSCY", "HSTN", 902.0),
        ("HSTN", "ATLA", 1385.0),
        ("IPLS", "CHIN", 260.0),
        ("IPLS", "ATLA", 738.0),
        ("CHIN", "NYCM", 700.0),
        ("ATLA", "WASH", 846.0),
        ("NYCM", "WASH", 233.0),
    ];
    let nodes: Vec<Node> = CITIES
        .iter()
        .map(|(id, name)| {
            let rate = rates
                .map(|rs| rs.iter().find(|(rid, _)| rid == id).unwrap().1)
                .unwrap_or(1.0);
            Node { id: id.to_string(), name: name.to_string(), ingress: rate, egress: rate }
        })
        .collect();
    let idx = |id: &str| CITIES.iter().position(|(cid, _)| *cid == id).unwrap();
    let mut edges = Vec::with_capacity(28);
    for (a, b, w) in LINKS {
        for (from, to) in [(a, b), (b, a)] {
            edges.push(Edge {
                id: format!("e{}", edges.len() + 1),
                from: idx(from),
                to: idx(to),
                capacity: 1.0,
                weight: Some(w),
            });
        }
    }
    Network::new(nodes, edges).unwrap()
}

/// Four-node bidirectional ring with a unit metric, used for exact
/// enumeration tests (4! = 24 permutations).
pub fn toy4() -> Network {
    let ids = ["n1", "n2", "n3", "n4"];
    let nodes = ids
        .iter()
        .map(|id| Node { id: id.to_string(), name: id.to_string(), ingress: 1.0, egress: 1.0 })
        .collect();
    let ring = [(0usize, 1usize), (1, 2), (2, 3), (3, 0)];
    let mut edges = Vec::new();
    for (a, b) in ring {
        for (from, to) in [(a, b), (b, a)] {
            edges.push(Edge {
                id: format!("{}-{}", ids[from], ids[to]),
                from,
                to,
                capacity: 1.0,
                weight: Some(1.0),
            });
        }
    }
    Network::new(nodes, edges).unwrap()
}

/// Complete digraph on `n` nodes with unit weights. Edge `e0` is
/// (v0, v1) with capacity 1; every other edge has capacity 2, which makes
/// `e0` the strictly minimal edge and no edge a bridge.
pub fn complete_network(n: usize) -> Network {
    let nodes = (0..n)
        .map(|i| Node {
            id: format!("v{i}"),
            name: format!("v{i}"),
            ingress: 1.0,
            egress: 1.0,
        })
        .collect();
    let mut pairs = vec![(0usize, 1usize)];
    for a in 0..n {
        for b in 0..n {
            if a != b && !(a == 0 && b == 1) {
                pairs.push((a, b));
            }
        }
    }
    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(k, (a, b))| Edge {
            id: format!("e{k}"),
            from: a,
            to: b,
            capacity: if k == 0 { 1.0 } else { 2.0 },
            weight: Some(1.0),
        })
        .collect();
    Network::new(nodes, edges).unwrap()
}

/// Five-node strongly connected fixture for the permanent-reduction demos.
pub fn fix5() -> Network {
    complete_network(5)
}

/// Routing on a complete n-node graph where edge `e0 = (v0, v1)` carries node
/// v0's traffic to destinations v1..vk and nothing else, so f(e0) has `k`
/// ones confined to the first row. All other commodities take direct edges.
///
/// Returns `(network, routing, e0)`.
pub fn single_row_routing(n: usize, k: usize) -> (Network, Routing, usize) {
    assert!(k >= 1 && k < n, "need 1 <= k < n");
    let net = unit_complete(n);
    let edge = |a: usize, b: usize| net.edge_idx(&format!("v{a}-v{b}")).unwrap();
    let e0 = edge(0, 1);
    let mut paths = Vec::new();
    for d in 1..n {
        if d <= k {
            let mut p = vec![e0];
            if d != 1 {
                p.push(edge(1, d));
            }
            paths.push((0, d, p, 1.0));
        } else {
            paths.push((0, d, vec![edge(0, d)], 1.0));
        }
    }
    for s in 1..n {
        for d in 0..n {
            if s != d {
                paths.push((s, d, vec![edge(s, d)], 1.0));
            }
        }
    }
    let routing = Routing::from_paths(&net, paths).unwrap();
    (net, routing, e0)
}

/// Complete digraph with uniform unit capacities, edges named `vA-vB`.
pub fn unit_complete(n: usize) -> Network {
    let nodes = (0..n)
        .map(|i| Node {
            id: format!("v{i}"),
            name: format!("v{i}"),
            ingress: 1.0,
            egress: 1.0,
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if a != b {
                edges.push(Edge {
                    id: format!("v{a}-v{b}"),
                    from: a,
                    to: b,
                    capacity: 1.0,
                    weight: Some(1.0),
                });
            }
        }
    }
    Network::new(nodes, edges).unwrap()
}

/// Look up a bundled network by name.
pub fn load_fixture(name: &str) -> Result<Network> {
    match name {
        "abilene-homogeneous" => Ok(abilene_homogeneous()),
        "abilene-heterogeneous" => Ok(abilene_heterogeneous()),
        "toy4" => Ok(toy4()),
        "fix5" => Ok(fix5()),
        other => Err(Error::InvalidArgument(format!(
            "unknown fixture `{other}`; available: abilene-homogeneous, abilene-heterogeneous, toy4, fix5"
        ))),
    }
}

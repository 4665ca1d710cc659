//! File formats: network/routing JSON, T-Plot JSON and CSV, and provenance
//! headers for CLI outputs.

use crate::error::{Error, Result};
use crate::net::{Edge, Network, Node, Routing};
use crate::stats::{Bin, PlotData, PlotTarget, TPlot};
use crate::tset::TSetSpec;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
pub struct NetworkFile {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "one")]
    pub r: f64,
    #[serde(default = "one")]
    pub q: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: String,
    pub from: String,
    pub to: String,
    pub capacity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

/// A single explicit routing fraction.
#[derive(Debug, Serialize, Deserialize)]
pub struct RoutingRecord {
    pub src: String,
    pub dst: String,
    pub edge: String,
    pub fraction: f64,
}

pub fn network_to_json(net: &Network) -> NetworkFile {
    NetworkFile {
        nodes: net
            .nodes()
            .iter()
            .map(|v| NodeRecord {
                id: v.id.clone(),
                name: Some(v.name.clone()),
                r: v.ingress,
                q: v.egress,
            })
            .collect(),
        edges: net
            .edges()
            .iter()
            .map(|e| EdgeRecord {
                id: e.id.clone(),
                from: net.nodes()[e.from].id.clone(),
                to: net.nodes()[e.to].id.clone(),
                capacity: e.capacity,
                weight: e.weight,
            })
            .collect(),
    }
}

pub fn network_from_json(file: &NetworkFile) -> Result<Network> {
    let nodes: Vec<Node> = file
        .nodes
        .iter()
        .map(|r| Node {
            id: r.id.clone(),
            name: r.name.clone().unwrap_or_else(|| r.id.clone()),
            ingress: r.r,
            egress: r.q,
        })
        .collect();
    let index = |id: &str| {
        nodes
            .iter()
            .position(|v| v.id == id)
            .ok_or_else(|| Error::Structural(format!("edge references unknown node `{id}`")))
    };
    let edges: Vec<Edge> = file
        .edges
        .iter()
        .map(|r| {
            Ok(Edge {
                id: r.id.clone(),
                from: index(&r.from)?,
                to: index(&r.to)?,
                capacity: r.capacity,
                weight: r.weight,
            })
        })
        .collect::<Result<_>>()?;
    Network::new(nodes, edges)
}

pub fn read_network(path: &Path) -> Result<Network> {
    let text = std::fs::read_to_string(path)?;
    network_from_json(&serde_json::from_str(&text)?)
}

pub fn write_network(path: &Path, net: &Network) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(&network_to_json(net))?)?;
    Ok(())
}

pub fn read_routing(path: &Path, net: &Network) -> Result<Routing> {
    let text = std::fs::read_to_string(path)?;
    let records: Vec<RoutingRecord> = serde_json::from_str(&text)?;
    let mut triples = Vec::with_capacity(records.len());
    for r in &records {
        let src = net
            .node_idx(&r.src)
            .ok_or_else(|| Error::Structural(format!("unknown node `{}`", r.src)))?;
        let dst = net
            .node_idx(&r.dst)
            .ok_or_else(|| Error::Structural(format!("unknown node `{}`", r.dst)))?;
        let edge = net
            .edge_idx(&r.edge)
            .ok_or_else(|| Error::Structural(format!("unknown edge `{}`", r.edge)))?;
        triples.push((src, dst, edge, r.fraction));
    }
    Routing::from_fractions(net, triples)
}

/// Wire form of a T-Plot (metadata plus either bins or atoms).
#[derive(Debug, Serialize, Deserialize)]
pub struct TPlotFile {
    pub target: String,
    pub tset: TSetSpec,
    pub total: u64,
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<Vec<(f64, f64, u64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<(f64, u64)>>,
}

fn target_string(target: PlotTarget, net: &Network) -> String {
    match target {
        PlotTarget::Edge(e) => format!("edge:{}", net.edges()[e].id),
        PlotTarget::EdgePair(a, b) => {
            format!("pair:{}+{}", net.edges()[a].id, net.edges()[b].id)
        }
        PlotTarget::Global => "global".into(),
        PlotTarget::Throughput => "throughput".into(),
    }
}

fn target_from_string(s: &str, net: &Network) -> Result<PlotTarget> {
    if s == "global" {
        return Ok(PlotTarget::Global);
    }
    if s == "throughput" {
        return Ok(PlotTarget::Throughput);
    }
    if let Some(id) = s.strip_prefix("edge:") {
        let e = net
            .edge_idx(id)
            .ok_or_else(|| Error::Structural(format!("unknown edge `{id}`")))?;
        return Ok(PlotTarget::Edge(e));
    }
    if let Some(pair) = s.strip_prefix("pair:") {
        let (a, b) = pair
            .split_once('+')
            .ok_or_else(|| Error::Structural(format!("malformed pair target `{s}`")))?;
        let ea = net
            .edge_idx(a)
            .ok_or_else(|| Error::Structural(format!("unknown edge `{a}`")))?;
        let eb = net
            .edge_idx(b)
            .ok_or_else(|| Error::Structural(format!("unknown edge `{b}`")))?;
        return Ok(PlotTarget::EdgePair(ea, eb));
    }
    Err(Error::Structural(format!("malformed plot target `{s}`")))
}

pub fn tplot_to_file(tp: &TPlot, net: &Network) -> TPlotFile {
    let (bins, atoms) = match &tp.data {
        PlotData::Bins(b) => {
            (Some(b.iter().map(|bin| (bin.lower, bin.upper, bin.count)).collect()), None)
        }
        PlotData::Atoms(a) => (None, Some(a.clone())),
    };
    TPlotFile {
        target: target_string(tp.target, net),
        tset: tp.tset.clone(),
        total: tp.total,
        exact: tp.exact,
        seed: tp.seed,
        bins,
        atoms,
    }
}

pub fn tplot_from_file(file: &TPlotFile, net: &Network) -> Result<TPlot> {
    let data = match (&file.bins, &file.atoms) {
        (Some(b), None) => PlotData::Bins(
            b.iter().map(|&(lower, upper, count)| Bin { lower, upper, count }).collect(),
        ),
        (None, Some(a)) => PlotData::Atoms(a.clone()),
        _ => return Err(Error::Structural("plot must carry exactly one of bins/atoms".into())),
    };
    let tp = TPlot {
        target: target_from_string(&file.target, net)?,
        tset: file.tset.clone(),
        data,
        total: file.total,
        exact: file.exact,
        seed: file.seed,
    };
    tp.validate()?;
    Ok(tp)
}

/// Provenance header lines stamped onto every CLI output.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: Option<u64>,
    pub config_digest: String,
}

impl Provenance {
    pub fn new(seed: Option<u64>, config_repr: &str) -> Self {
        use sha2::{Digest, Sha256};
        let hash = Sha256::digest(config_repr.as_bytes());
        let digest: String = hash.iter().take(8).map(|b| format!("{b:02x}")).collect();
        Provenance {
            tool_version: format!("tplot {}", env!("CARGO_PKG_VERSION")),
            seed,
            config_digest: digest,
        }
    }

    pub fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# tool: {}", self.tool_version),
            format!("# config: {}", self.config_digest),
        ];
        if let Some(seed) = self.seed {
            lines.insert(1, format!("# seed: {seed}"));
        }
        lines
    }
}

/// CSV rows (bin_lower, bin_upper, count, pdf, cdf); atoms use equal
/// lower/upper edges. Numbers print in shortest round-trip form.
pub fn write_tplot_csv(w: &mut impl Write, tp: &TPlot, provenance: &Provenance) -> Result<()> {
    for line in provenance.comment_lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "bin_lower,bin_upper,count,pdf,cdf")?;
    let total = tp.total as f64;
    let mut cum = 0u64;
    match &tp.data {
        PlotData::Bins(bins) => {
            for b in bins {
                cum += b.count;
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    b.lower,
                    b.upper,
                    b.count,
                    b.count as f64 / total,
                    cum as f64 / total
                )?;
            }
        }
        PlotData::Atoms(atoms) => {
            for &(v, c) in atoms {
                cum += c;
                writeln!(w, "{},{},{},{},{}", v, v, c, c as f64 / total, cum as f64 / total)?;
            }
        }
    }
    Ok(())
}

//! T-Plots: empirical and exact congestion distributions, Gaussian parameter
//! computation, and normality assessment.

pub mod normality;

use crate::error::{Error, Result};
use crate::matrix::TrafficMatrix;
use crate::net::{self, Network, Routing};
use crate::tset::moments::MomentStore;
use crate::tset::{derive_seed, SampleStream, SamplerConfig, TSetKind, TSetSpec};
use std::collections::BTreeMap;

/// Default histogram resolution.
pub const DEFAULT_BINS: usize = 100;
/// Default cap on exhaustive permutation enumeration (n! evaluations).
pub const EXACT_ENUMERATION_LIMIT: usize = 8;
/// Cap used when the long-run gate is enabled (11! is about 4e7).
pub const EXACT_ENUMERATION_LONG_RUN_LIMIT: usize = 11;

/// The congestion statistic a T-Plot describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotTarget {
    /// Congestion on one edge.
    Edge(usize),
    /// Sum of the congestions on two edges (the dummy-edge construction).
    EdgePair(usize, usize),
    /// Maximum edge congestion.
    Global,
    /// Throughput min(1/GC, 1).
    Throughput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub lower: f64,
    pub upper: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlotData {
    /// Equal-width histogram bins; the final bin is closed above.
    Bins(Vec<Bin>),
    /// Exact (or degenerate) distributions store their atoms directly.
    Atoms(Vec<(f64, u64)>),
}

/// The distribution of a congestion statistic as traffic matrices range over
/// a T-Set.
#[derive(Debug, Clone, PartialEq)]
pub struct TPlot {
    pub target: PlotTarget,
    pub tset: TSetSpec,
    pub data: PlotData,
    pub total: u64,
    /// True iff built by full enumeration of the (discrete) T-Set.
    pub exact: bool,
    pub seed: Option<u64>,
}

impl TPlot {
    /// Pr{X <= x}. Exact for atom plots; for binned plots a bin's mass sits
    /// at its upper edge.
    pub fn cdf_at(&self, x: f64) -> f64 {
        let mass = match &self.data {
            PlotData::Atoms(atoms) => {
                atoms.iter().take_while(|&&(v, _)| v <= x).map(|&(_, c)| c).sum::<u64>()
            }
            PlotData::Bins(bins) => {
                bins.iter().filter(|b| b.upper <= x).map(|b| b.count).sum::<u64>()
            }
        };
        mass as f64 / self.total as f64
    }

    /// Pr{X >= x}. For binned plots every bin that could contain a value
    /// >= x counts fully, so the estimate errs on the high side.
    pub fn tail_at_least(&self, x: f64) -> f64 {
        let mass = match &self.data {
            PlotData::Atoms(atoms) => {
                atoms.iter().skip_while(|&&(v, _)| v < x).map(|&(_, c)| c).sum::<u64>()
            }
            PlotData::Bins(bins) => {
                bins.iter().filter(|b| b.upper >= x).map(|b| b.count).sum::<u64>()
            }
        };
        mass as f64 / self.total as f64
    }

    pub fn mean(&self) -> f64 {
        let mut sum = 0.0;
        self.for_each_mass(|x, c| sum += x * c);
        sum / self.total as f64
    }

    pub fn variance(&self) -> f64 {
        let n = self.total as f64;
        let mut sum = 0.0;
        let mut sq = 0.0;
        self.for_each_mass(|x, c| {
            sum += x * c;
            sq += x * x * c;
        });
        (sq / n - (sum / n) * (sum / n)).max(0.0)
    }

    fn for_each_mass(&self, mut f: impl FnMut(f64, f64)) {
        match &self.data {
            PlotData::Atoms(atoms) => {
                for &(v, c) in atoms {
                    f(v, c as f64);
                }
            }
            PlotData::Bins(bins) => {
                for b in bins {
                    f(0.5 * (b.lower + b.upper), b.count as f64);
                }
            }
        }
    }

    /// Smallest bin upper edge (atom value) whose CDF reaches `q`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidArgument(format!("quantile level {q} outside [0, 1]")));
        }
        let need = q * self.total as f64;
        let mut acc = 0u64;
        match &self.data {
            PlotData::Atoms(atoms) => {
                for &(v, c) in atoms {
                    acc += c;
                    if acc as f64 >= need {
                        return Ok(v);
                    }
                }
                Ok(atoms.last().map(|&(v, _)| v).unwrap_or(0.0))
            }
            PlotData::Bins(bins) => {
                for b in bins {
                    acc += b.count;
                    if acc as f64 >= need {
                        return Ok(b.upper);
                    }
                }
                Ok(bins.last().map(|b| b.upper).unwrap_or(0.0))
            }
        }
    }

    /// Largest load with nonzero mass.
    pub fn worst_observed(&self) -> f64 {
        match &self.data {
            PlotData::Atoms(atoms) => atoms.last().map(|&(v, _)| v).unwrap_or(0.0),
            PlotData::Bins(bins) => {
                bins.iter().rev().find(|b| b.count > 0).map(|b| b.upper).unwrap_or(0.0)
            }
        }
    }

    /// Merge two histograms of the same statistic (associative, commutative).
    pub fn merge(&self, other: &TPlot) -> Result<TPlot> {
        if self.target != other.target || self.tset != other.tset || self.exact != other.exact {
            return Err(Error::InvalidArgument(
                "cannot merge plots of different statistics".into(),
            ));
        }
        let data = match (&self.data, &other.data) {
            (PlotData::Bins(a), PlotData::Bins(b)) => {
                if a.len() != b.len()
                    || a.iter().zip(b).any(|(x, y)| x.lower != y.lower || x.upper != y.upper)
                {
                    return Err(Error::InvalidArgument("bin edges differ; cannot merge".into()));
                }
                PlotData::Bins(
                    a.iter()
                        .zip(b)
                        .map(|(x, y)| Bin {
                            lower: x.lower,
                            upper: x.upper,
                            count: x.count + y.count,
                        })
                        .collect(),
                )
            }
            (PlotData::Atoms(a), PlotData::Atoms(b)) => {
                let mut map: BTreeMap<u64, u64> = BTreeMap::new();
                for &(v, c) in a.iter().chain(b.iter()) {
                    *map.entry(v.to_bits()).or_insert(0) += c;
                }
                PlotData::Atoms(map.into_iter().map(|(k, c)| (f64::from_bits(k), c)).collect())
            }
            _ => return Err(Error::InvalidArgument("mixed bin/atom plots cannot merge".into())),
        };
        Ok(TPlot {
            target: self.target,
            tset: self.tset.clone(),
            data,
            total: self.total + other.total,
            exact: self.exact,
            seed: None,
        })
    }

    /// Histogram a load sequence: range [0, hi] when `hi` is given, the
    /// observed maximum otherwise; degenerate ranges collapse to atoms.
    pub fn from_loads(
        target: PlotTarget,
        tset: TSetSpec,
        loads: &[f64],
        hi: Option<f64>,
        bins: usize,
        seed: Option<u64>,
    ) -> TPlot {
        let hi = hi.unwrap_or_else(|| loads.iter().copied().fold(0.0f64, f64::max));
        TPlot {
            target,
            tset,
            data: histogram(loads, 0.0, hi, bins),
            total: loads.len() as u64,
            exact: false,
            seed,
        }
    }

    /// Internal consistency: counts sum to total, edges increase.
    pub fn validate(&self) -> Result<()> {
        let sum: u64 = match &self.data {
            PlotData::Atoms(a) => a.iter().map(|&(_, c)| c).sum(),
            PlotData::Bins(b) => b.iter().map(|b| b.count).sum(),
        };
        if sum != self.total {
            return Err(Error::Structural(format!("counts {sum} != total {}", self.total)));
        }
        match &self.data {
            PlotData::Atoms(a) => {
                if a.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::Structural("atoms not strictly increasing".into()));
                }
            }
            PlotData::Bins(b) => {
                if b.iter().any(|bin| bin.lower >= bin.upper)
                    || b.windows(2).any(|w| w[0].upper != w[1].lower)
                {
                    return Err(Error::Structural("bin edges not increasing/contiguous".into()));
                }
            }
        }
        Ok(())
    }
}

/// The congestion statistic of one traffic matrix under the target.
pub fn target_load(
    net: &Network,
    routing: &Routing,
    target: PlotTarget,
    d: &TrafficMatrix,
) -> f64 {
    match target {
        PlotTarget::Edge(e) => net::edge_congestion(net, routing, e, d),
        PlotTarget::EdgePair(e1, e2) => {
            net::edge_congestion(net, routing, e1, d) + net::edge_congestion(net, routing, e2, d)
        }
        PlotTarget::Global => net::global_congestion(net, routing, d),
        PlotTarget::Throughput => net::throughput(net, routing, d),
    }
}

/// Upper end of the histogram range when it can be fixed a priori: the
/// assignment-solver worst case for permutation-bounded T-Sets on
/// homogeneous networks, 1 for throughput.
fn fixed_range_hi(
    net: &Network,
    routing: &Routing,
    target: PlotTarget,
    tset: &TSetSpec,
) -> Option<f64> {
    if target == PlotTarget::Throughput {
        return Some(1.0);
    }
    if !net.is_homogeneous() || tset.kind.is_heterogeneous() {
        return None;
    }
    let wc = |e: usize| net::worst_case_edge_congestion(net, routing, e).ok();
    match target {
        PlotTarget::Edge(e) => wc(e),
        PlotTarget::EdgePair(e1, e2) => Some(wc(e1)? + wc(e2)?),
        PlotTarget::Global => {
            let mut hi = 0.0f64;
            for e in 0..net.edges().len() {
                hi = hi.max(wc(e)?);
            }
            Some(hi)
        }
        PlotTarget::Throughput => unreachable!(),
    }
}

fn histogram(loads: &[f64], lo: f64, hi: f64, bins: usize) -> PlotData {
    if hi <= lo {
        // degenerate distribution: store atoms
        let mut map: BTreeMap<u64, u64> = BTreeMap::new();
        for &x in loads {
            *map.entry(x.to_bits()).or_insert(0) += 1;
        }
        return PlotData::Atoms(map.into_iter().map(|(k, c)| (f64::from_bits(k), c)).collect());
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &x in loads {
        let idx = (((x - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    PlotData::Bins(
        counts
            .into_iter()
            .enumerate()
            .map(|(k, count)| Bin {
                lower: lo + k as f64 * width,
                upper: if k + 1 == bins { hi } else { lo + (k + 1) as f64 * width },
                count,
            })
            .collect(),
    )
}

/// Build an empirical T-Plot from `m` samples of the T-Set.
///
/// The histogram spans [0, worst-case] when the worst case is computable and
/// the observed range otherwise. Runs are deterministic in `seed`.
pub fn build_tplot(
    net: &Network,
    routing: &Routing,
    tset: &TSetSpec,
    target: PlotTarget,
    m: usize,
    bins: usize,
    seed: u64,
) -> Result<TPlot> {
    build_tplot_cfg(net, routing, tset, target, m, bins, &SamplerConfig::with_seed(seed), 1)
}

/// Multi-chain variant: `chains` independent samplers with seeds derived
/// from `seed`, merged in chain order; `chains = 1` uses `seed` directly.
#[allow(clippy::too_many_arguments)]
pub fn build_tplot_chains(
    net: &Network,
    routing: &Routing,
    tset: &TSetSpec,
    target: PlotTarget,
    m: usize,
    bins: usize,
    seed: u64,
    chains: usize,
) -> Result<TPlot> {
    build_tplot_cfg(net, routing, tset, target, m, bins, &SamplerConfig::with_seed(seed), chains)
}

/// Full-control variant taking a sampler configuration.
#[allow(clippy::too_many_arguments)]
pub fn build_tplot_cfg(
    net: &Network,
    routing: &Routing,
    tset: &TSetSpec,
    target: PlotTarget,
    m: usize,
    bins: usize,
    cfg: &SamplerConfig,
    chains: usize,
) -> Result<TPlot> {
    if m < 1 || bins < 1 || chains < 1 {
        return Err(Error::InvalidArgument("need m >= 1, bins >= 1, chains >= 1".into()));
    }
    if tset.n != net.n() {
        return Err(Error::Structural(format!(
            "T-Set dimension {} does not match network size {}",
            tset.n,
            net.n()
        )));
    }
    let chains = chains.min(m);
    let mut loads = vec![Vec::new(); chains];
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for chain in 0..chains {
            let share = m / chains + usize::from(chain < m % chains);
            let chain_seed =
                if chains == 1 { cfg.seed } else { derive_seed(cfg.seed, chain as u64) };
            let tset = tset.clone();
            let chain_cfg = SamplerConfig { seed: chain_seed, ..cfg.clone() };
            handles.push(scope.spawn(move || -> Result<Vec<f64>> {
                let mut out = Vec::with_capacity(share);
                for d in SampleStream::new(&tset, &chain_cfg, share)? {
                    out.push(target_load(net, routing, target, &d));
                }
                Ok(out)
            }));
        }
        for (chain, handle) in handles.into_iter().enumerate() {
            loads[chain] = handle.join().expect("sampler thread panicked")?;
        }
        Ok(())
    })?;
    let loads: Vec<f64> = loads.concat();
    let hi = fixed_range_hi(net, routing, target, tset);
    Ok(TPlot::from_loads(target, tset.clone(), &loads, hi, bins, Some(cfg.seed)))
}

/// Exact T-Plot over all n! permutations (or all derangements), refusing
/// instances beyond [`EXACT_ENUMERATION_LIMIT`].
pub fn exact_tplot_permutations(
    net: &Network,
    routing: &Routing,
    target: PlotTarget,
    zero_diagonal: bool,
) -> Result<TPlot> {
    exact_tplot_permutations_with_limit(
        net,
        routing,
        target,
        zero_diagonal,
        EXACT_ENUMERATION_LIMIT,
    )
}

pub fn exact_tplot_permutations_with_limit(
    net: &Network,
    routing: &Routing,
    target: PlotTarget,
    zero_diagonal: bool,
    limit: usize,
) -> Result<TPlot> {
    let n = net.n();
    if n > limit {
        return Err(Error::OverLimit {
            n,
            limit,
            hint: "exhaustive enumeration costs n! evaluations; the long-run gate allows n up to 11".into(),
        });
    }
    // dense per-edge weights for O(n) load evaluation per permutation
    let relevant: Vec<usize> = match target {
        PlotTarget::Edge(e) => vec![e],
        PlotTarget::EdgePair(e1, e2) => vec![e1, e2],
        PlotTarget::Global | PlotTarget::Throughput => (0..net.edges().len()).collect(),
    };
    let dense: Vec<(f64, Vec<f64>)> = relevant
        .iter()
        .map(|&e| (net.edges()[e].capacity, routing.edge_matrix(e)))
        .collect();
    let mut atoms: BTreeMap<u64, u64> = BTreeMap::new();
    let mut total = 0u64;
    for_each_permutation(n, |perm| {
        if zero_diagonal && perm.iter().enumerate().any(|(i, &j)| i == j) {
            return;
        }
        let load = match target {
            PlotTarget::Edge(_) => perm_load(&dense[0], perm, n),
            PlotTarget::EdgePair(_, _) => {
                perm_load(&dense[0], perm, n) + perm_load(&dense[1], perm, n)
            }
            PlotTarget::Global | PlotTarget::Throughput => {
                let gc = dense.iter().map(|d| perm_load(d, perm, n)).fold(0.0f64, f64::max);
                if target == PlotTarget::Global {
                    gc
                } else if gc <= 1.0 {
                    1.0
                } else {
                    1.0 / gc
                }
            }
        };
        *atoms.entry(load.to_bits()).or_insert(0) += 1;
        total += 1;
    });
    Ok(TPlot {
        target,
        tset: TSetSpec::homogeneous(
            if zero_diagonal { TSetKind::Derangements } else { TSetKind::Permutations },
            n,
        )?,
        data: PlotData::Atoms(atoms.into_iter().map(|(k, c)| (f64::from_bits(k), c)).collect()),
        total,
        exact: true,
        seed: None,
    })
}

#[inline]
fn perm_load(dense: &(f64, Vec<f64>), perm: &[usize], n: usize) -> f64 {
    let mut flow = 0.0;
    for (i, &j) in perm.iter().enumerate() {
        flow += dense.1[i * n + j];
    }
    flow / dense.0
}

/// Heap's algorithm; calls `f` once per permutation of 0..n.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&a);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            f(&a);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// How a pair of Gaussian parameters was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamMethod {
    /// Exact combinatorial moments over the permutation set.
    ClosedFormPermutations,
    /// Exact combinatorial moments over the derangement set.
    ClosedFormDerangements,
    /// Exact mean, Monte Carlo second moment (doubly stochastic kinds).
    SemiAnalyticStochastic,
    /// Both moments from the Monte Carlo class table (admissible kinds).
    McMomentsAdmissible,
    /// Both moments from per-index Monte Carlo tables (heterogeneous).
    McMomentsHeterogeneous,
    /// Sample mean / sample standard deviation of observed loads.
    Empirical,
}

/// Mean and standard deviation of an edge load over a T-Set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    pub mu: f64,
    pub sigma: f64,
    pub method: ParamMethod,
}

impl GaussianParams {
    pub fn new(mu: f64, sigma: f64, method: ParamMethod) -> Self {
        GaussianParams { mu, sigma, method }
    }
}

/// Analytic (or semi-analytic) Gaussian parameters of the congestion on
/// `edge` over `tset`.
///
/// Permutation and derangement kinds are exact closed forms. Doubly
/// stochastic kinds take the exact mean and a Monte Carlo second moment;
/// admissible and heterogeneous kinds read both moments from `store`, which
/// must already hold (or be able to load) a table for the (kind, n) at hand.
pub fn gaussian_params(
    net: &Network,
    routing: &Routing,
    edge: usize,
    tset: &TSetSpec,
    store: &MomentStore,
) -> Result<GaussianParams> {
    if tset.n != net.n() {
        return Err(Error::Structural("T-Set dimension does not match network".into()));
    }
    let support = routing.edge_support(edge);
    let c = net.edges()[edge].capacity;
    let n = net.n();
    match tset.kind {
        TSetKind::Permutations => {
            let sum: f64 = support.iter().map(|&(_, _, f)| f).sum();
            let mu = sum / (n as f64 * c);
            let mut e2 = 0.0;
            for &(i, j, fa) in support {
                for &(k, l, fb) in support {
                    if i == k && j == l {
                        e2 += fa * fb / n as f64;
                    } else if i != k && j != l {
                        e2 += fa * fb / (n as f64 * (n - 1) as f64);
                    }
                }
            }
            e2 /= c * c;
            Ok(GaussianParams::new(
                mu,
                (e2 - mu * mu).max(0.0).sqrt(),
                ParamMethod::ClosedFormPermutations,
            ))
        }
        TSetKind::Derangements => {
            let d_n = subfactorial(n)? as f64;
            let sum: f64 =
                support.iter().filter(|&&(i, j, _)| i != j).map(|&(_, _, f)| f).sum();
            let mu = sum / ((n - 1) as f64 * c);
            let mut e2 = 0.0;
            for &(i, j, fa) in support {
                if i == j {
                    continue;
                }
                for &(k, l, fb) in support {
                    if k == l {
                        continue;
                    }
                    let w = if i == k && j == l {
                        1.0 / (n - 1) as f64
                    } else if i == k || j == l {
                        0.0
                    } else {
                        // derangements fixing sigma(i)=j and sigma(k)=l: count
                        // bijections of the remaining n-2 elements that avoid
                        // the n-|{i,j,k,l}| forbidden positions left over
                        let distinct = distinct_count(i, j, k, l);
                        rencontres(n - 2, n - distinct)? as f64 / d_n
                    };
                    e2 += fa * fb * w;
                }
            }
            e2 /= c * c;
            Ok(GaussianParams::new(
                mu,
                (e2 - mu * mu).max(0.0).sqrt(),
                ParamMethod::ClosedFormDerangements,
            ))
        }
        TSetKind::DoublyStochastic | TSetKind::DoublyStochasticZeroDiag => {
            let table = store
                .get(tset.kind, n)
                .ok_or(Error::MissingMomentTable { kind: tset.kind.label().into(), n })?;
            let denom = if tset.kind == TSetKind::DoublyStochastic { n } else { n - 1 } as f64;
            let sum: f64 = support
                .iter()
                .filter(|&&(i, j, _)| !(tset.kind.zero_diagonal() && i == j))
                .map(|&(_, _, f)| f)
                .sum();
            let mu = sum / (denom * c);
            let e2 = pair_second_moment(support, &table) / (c * c);
            Ok(GaussianParams::new(
                mu,
                (e2 - mu * mu).max(0.0).sqrt(),
                ParamMethod::SemiAnalyticStochastic,
            ))
        }
        TSetKind::Admissible | TSetKind::AdmissibleZeroDiag => {
            let table = store
                .get(tset.kind, n)
                .ok_or(Error::MissingMomentTable { kind: tset.kind.label().into(), n })?;
            let mu = support
                .iter()
                .map(|&(i, j, f)| f * table.first(i as usize, j as usize))
                .sum::<f64>()
                / c;
            let e2 = pair_second_moment(support, &table) / (c * c);
            Ok(GaussianParams::new(
                mu,
                (e2 - mu * mu).max(0.0).sqrt(),
                ParamMethod::McMomentsAdmissible,
            ))
        }
        TSetKind::Heterogeneous => {
            let table = store
                .get_h(tset)
                .ok_or(Error::MissingMomentTable { kind: tset.kind.label().into(), n })?;
            let mu = support
                .iter()
                .map(|&(i, j, f)| f * table.first(i as usize, j as usize))
                .sum::<f64>()
                / c;
            let mut e2 = 0.0;
            for &(i, j, fa) in support {
                for &(k, l, fb) in support {
                    e2 += fa * fb * table.second(i as usize, j as usize, k as usize, l as usize);
                }
            }
            e2 /= c * c;
            Ok(GaussianParams::new(
                mu,
                (e2 - mu * mu).max(0.0).sqrt(),
                ParamMethod::McMomentsHeterogeneous,
            ))
        }
        TSetKind::HeterogeneousSurface => Err(Error::UnsupportedMode(
            "no analytic parameters for the heterogeneous surface; sample and use empirical_params"
                .into(),
        )),
    }
}

fn pair_second_moment(
    support: &[(u32, u32, f64)],
    table: &crate::tset::moments::MomentTable,
) -> f64 {
    let mut e2 = 0.0;
    for &(i, j, fa) in support {
        for &(k, l, fb) in support {
            e2 += fa * fb * table.second(i as usize, j as usize, k as usize, l as usize);
        }
    }
    e2
}

fn distinct_count(i: u32, j: u32, k: u32, l: u32) -> usize {
    let mut ids = [i, j, k, l];
    ids.sort_unstable();
    1 + ids.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Sample mean and (m-1)-normalized standard deviation of observed loads.
pub fn empirical_params(loads: &[f64]) -> GaussianParams {
    let m = loads.len() as f64;
    let mu = loads.iter().sum::<f64>() / m;
    let var = if loads.len() > 1 {
        loads.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    GaussianParams::new(mu, var.sqrt(), ParamMethod::Empirical)
}

/// n! for n up to 33 (fits in u128).
fn factorial(n: usize) -> Result<u128> {
    if n > 33 {
        return Err(Error::OverLimit { n, limit: 33, hint: "factorial overflows u128".into() });
    }
    Ok((2..=n as u128).product())
}

/// Number of derangements D_n.
pub fn subfactorial(n: usize) -> Result<u128> {
    rencontres(n, n)
}

/// Number of bijections of an m-set avoiding u specified forbidden positions
/// (u <= m): sum_s (-1)^s C(u, s) (m - s)!.
pub fn rencontres(m: usize, u: usize) -> Result<u128> {
    debug_assert!(u <= m);
    let mut acc: i128 = 0;
    let mut binom: u128 = 1;
    for s in 0..=u {
        let term = (binom * factorial(m - s)?) as i128;
        acc += if s % 2 == 0 { term } else { -term };
        binom = binom * (u - s) as u128 / (s + 1) as u128;
    }
    Ok(acc as u128)
}

/// Summary statistics of a T-Plot.
#[derive(Debug, Clone, Copy)]
pub struct PlotSummary {
    pub mean: f64,
    pub variance: f64,
    pub quantile: f64,
    pub worst_observed: f64,
}

pub fn tplot_stats(tp: &TPlot, q: f64) -> Result<PlotSummary> {
    if tp.total < 1 {
        return Err(Error::InvalidArgument("empty plot".into()));
    }
    Ok(PlotSummary {
        mean: tp.mean(),
        variance: tp.variance(),
        quantile: tp.quantile(q)?,
        worst_observed: tp.worst_observed(),
    })
}

/// Transform a global-congestion plot into the throughput distribution
/// (stored as atoms; query its CCDF via [`TPlot::tail_at_least`]).
pub fn throughput_ccdf(tp: &TPlot) -> Result<TPlot> {
    if tp.target != PlotTarget::Global {
        return Err(Error::InvalidArgument("throughput CCDF derives from a global plot".into()));
    }
    let mut map: BTreeMap<u64, u64> = BTreeMap::new();
    let mut push = |gc: f64, count: u64| {
        let tp_val = if gc <= 1.0 { 1.0 } else { 1.0 / gc };
        *map.entry(tp_val.to_bits()).or_insert(0) += count;
    };
    match &tp.data {
        PlotData::Atoms(atoms) => {
            for &(gc, c) in atoms {
                push(gc, c);
            }
        }
        PlotData::Bins(bins) => {
            for b in bins {
                if b.count > 0 {
                    push(0.5 * (b.lower + b.upper), b.count);
                }
            }
        }
    }
    Ok(TPlot {
        target: PlotTarget::Throughput,
        tset: tp.tset.clone(),
        data: PlotData::Atoms(map.into_iter().map(|(k, c)| (f64::from_bits(k), c)).collect()),
        total: tp.total,
        exact: tp.exact,
        seed: tp.seed,
    })
}

//! Distribution-free performance guarantees from (mu, sigma) and
//! approximation/bounds for the global congestion CDF.

use crate::error::{Error, Result};
use crate::net::{Network, Routing};
use crate::stats::{GaussianParams, PlotTarget, TPlot};

/// A capacity query against an edge's Gaussian parameters.
#[derive(Debug, Clone)]
pub struct GuaranteeQuery {
    pub edge: String,
    pub capacity: f64,
    pub params: GaussianParams,
    /// Desired certainty level G in [0, 1).
    pub guarantee: f64,
}

impl GuaranteeQuery {
    pub fn new(edge: String, capacity: f64, params: GaussianParams, guarantee: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&guarantee) {
            return Err(Error::InvalidArgument("guarantee level must lie in [0, 1)".into()));
        }
        if params.sigma < 0.0 {
            return Err(Error::InvalidArgument("sigma must be nonnegative".into()));
        }
        Ok(GuaranteeQuery { edge, capacity, params, guarantee })
    }

    /// Upper bound on the probability that the edge saturates at its
    /// current capacity.
    pub fn saturation_bound(&self) -> f64 {
        chebyshev_saturation_bound(&self.params, self.capacity)
    }

    /// Capacity serving at least the requested fraction of the T-Set.
    pub fn required_capacity(&self) -> f64 {
        capacity_for_guarantee(&self.params, self.guarantee)
            .expect("guarantee level validated at construction")
    }
}

/// One-tailed Chebyshev bound on the saturation probability:
/// Pr{X >= c} <= 1 / (1 + ((c - mu)/sigma)^2) for c > mu, and 1 otherwise.
pub fn chebyshev_saturation_bound(params: &GaussianParams, capacity: f64) -> f64 {
    if capacity <= params.mu {
        return 1.0;
    }
    if params.sigma == 0.0 {
        return 0.0;
    }
    let k = (capacity - params.mu) / params.sigma;
    1.0 / (1.0 + k * k)
}

/// Capacity that serves at least a fraction G of the T-Set without
/// saturating: c'(e) = mu + sigma * sqrt(G / (1 - G)).
pub fn capacity_for_guarantee(params: &GaussianParams, guarantee: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&guarantee) {
        return Err(Error::InvalidArgument(format!(
            "guarantee level {guarantee} needs 0 <= G < 1 (G = 1 demands infinite capacity)"
        )));
    }
    Ok(params.mu + params.sigma * (guarantee / (1.0 - guarantee)).sqrt())
}

/// A synthetic edge whose load is EC(e1) + EC(e2).
///
/// Its weight matrix is f(e1)/c(e1) + f(e2)/c(e2) with capacity 1, which
/// reduces to f(e1) + f(e2) on unit-capacity networks.
#[derive(Debug, Clone)]
pub struct DummyEdge {
    pub pair: (usize, usize),
    pub weights: Vec<(u32, u32, f64)>,
    pub capacity: f64,
}

impl DummyEdge {
    /// The plot target evaluating this dummy edge's load.
    pub fn target(&self) -> PlotTarget {
        PlotTarget::EdgePair(self.pair.0, self.pair.1)
    }

    pub fn load(&self, d: &crate::matrix::TrafficMatrix) -> f64 {
        let n = d.n();
        let mut flow = 0.0;
        for &(i, j, w) in &self.weights {
            flow += d.data()[i as usize * n + j as usize] * w;
        }
        flow / self.capacity
    }
}

pub fn dummy_edge(net: &Network, routing: &Routing, e1: usize, e2: usize) -> Result<DummyEdge> {
    if e1 == e2 {
        return Err(Error::InvalidArgument("dummy edge needs two distinct edges".into()));
    }
    let c1 = net.edges()[e1].capacity;
    let c2 = net.edges()[e2].capacity;
    let mut weights: std::collections::BTreeMap<(u32, u32), f64> = std::collections::BTreeMap::new();
    for &(i, j, f) in routing.edge_support(e1) {
        *weights.entry((i, j)).or_insert(0.0) += f / c1;
    }
    for &(i, j, f) in routing.edge_support(e2) {
        *weights.entry((i, j)).or_insert(0.0) += f / c2;
    }
    Ok(DummyEdge {
        pair: (e1, e2),
        weights: weights.into_iter().map(|((i, j), w)| (i, j, w)).collect(),
        capacity: 1.0,
    })
}

/// Bounds on the global congestion CDF at one load level.
#[derive(Debug, Clone, Copy)]
pub struct GlobalCdfBounds {
    pub level: f64,
    /// Product of the per-edge CDFs (exact only under independence).
    pub independence_approx: f64,
    /// min( min_e EC_CDF(e, L), EC_CDF(dummy, 2L) ), an upper bound on
    /// Pr{GC <= L}.
    pub upper_bound: f64,
    /// Lower bound on the tail Pr{GC > L}, clamped to [0, 1].
    pub lower_tail_bound: f64,
    /// The same tail bound before clamping.
    pub raw_lower_tail: f64,
}

/// Evaluate the independence approximation and the pair-based bounds at `level`.
///
/// `edge_tplots` must contain a plot for every edge of the network including
/// the dummy's two member edges; `dummy_tplot` is the plot of the dummy pair
/// (its CDF is evaluated at 2L).
pub fn global_cdf_bounds(
    edge_tplots: &[TPlot],
    dummy_tplot: &TPlot,
    level: f64,
) -> Result<GlobalCdfBounds> {
    if level < 0.0 {
        return Err(Error::InvalidArgument("load level must be nonnegative".into()));
    }
    if edge_tplots.is_empty() {
        return Err(Error::InvalidArgument("need at least one edge plot".into()));
    }
    let (d1, d2) = match dummy_tplot.target {
        PlotTarget::EdgePair(a, b) => (a, b),
        _ => {
            return Err(Error::InvalidArgument(
                "dummy plot must target an edge pair".into(),
            ))
        }
    };
    let mut independence_approx = 1.0;
    let mut min_edge_cdf = f64::INFINITY;
    let mut tail1 = None;
    let mut tail2 = None;
    for tp in edge_tplots {
        let cdf = tp.cdf_at(level);
        independence_approx *= cdf;
        min_edge_cdf = min_edge_cdf.min(cdf);
        match tp.target {
            PlotTarget::Edge(e) if e == d1 => tail1 = Some(1.0 - cdf),
            PlotTarget::Edge(e) if e == d2 => tail2 = Some(1.0 - cdf),
            _ => {}
        }
    }
    let (tail1, tail2) = match (tail1, tail2) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::InvalidArgument(
                "edge plots must include the dummy's two member edges".into(),
            ))
        }
    };
    let dummy_cdf_2l = dummy_tplot.cdf_at(2.0 * level);
    let upper_bound = min_edge_cdf.min(dummy_cdf_2l);
    let raw_lower_tail = tail1 + tail2 - (1.0 - dummy_cdf_2l);
    Ok(GlobalCdfBounds {
        level,
        independence_approx,
        upper_bound,
        lower_tail_bound: raw_lower_tail.clamp(0.0, 1.0),
        raw_lower_tail,
    })
}

/// Pick the two edges with the highest mean congestion under `params`
/// (the default dummy pair).
pub fn two_most_loaded(params: &[(usize, GaussianParams)]) -> Result<(usize, usize)> {
    if params.len() < 2 {
        return Err(Error::InvalidArgument("need at least two edges".into()));
    }
    let mut sorted: Vec<_> = params.to_vec();
    sorted.sort_by(|a, b| b.1.mu.total_cmp(&a.1.mu).then(a.0.cmp(&b.0)));
    Ok((sorted[0].0, sorted[1].0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::net::shortest_path_routing;
    use crate::stats::{
        build_tplot, exact_tplot_permutations, gaussian_params, ParamMethod, PlotData,
    };
    use crate::tset::moments::MomentStore;
    use crate::tset::{TSetKind, TSetSpec};
    use approx::assert_abs_diff_eq;

    fn params(mu: f64, sigma: f64) -> GaussianParams {
        GaussianParams::new(mu, sigma, ParamMethod::Empirical)
    }

    #[test]
    fn chebyshev_arithmetic() {
        let p = params(1.9, 0.2);
        assert_abs_diff_eq!(chebyshev_saturation_bound(&p, 2.3), 0.2, epsilon = 1e-12);
        assert_eq!(chebyshev_saturation_bound(&p, 1.9), 1.0);
        assert_eq!(chebyshev_saturation_bound(&p, 1.0), 1.0);
        assert_eq!(chebyshev_saturation_bound(&params(1.0, 0.0), 1.5), 0.0);
    }

    #[test]
    fn chebyshev_bound_is_decreasing_in_capacity() {
        let p = params(1.0, 0.5);
        let mut prev = 1.0;
        let mut c = 1.0;
        while c < 5.0 {
            let b = chebyshev_saturation_bound(&p, c);
            assert!(b <= prev && (0.0..=1.0).contains(&b));
            prev = b;
            c += 0.05;
        }
    }

    #[test]
    fn guarantee_query_bundles_the_bounds() {
        let q = GuaranteeQuery::new("e13".into(), 2.3, params(1.9, 0.2), 0.9).unwrap();
        assert!((q.saturation_bound() - 0.2).abs() < 1e-12);
        assert!((q.required_capacity() - 2.5).abs() < 1e-12);
        assert!(GuaranteeQuery::new("x".into(), 1.0, params(1.0, 0.1), 1.0).is_err());
    }

    #[test]
    fn capacity_guarantee_round_trip() {
        let p = params(1.9, 0.3);
        assert_eq!(capacity_for_guarantee(&p, 0.0).unwrap(), 1.9);
        assert_abs_diff_eq!(capacity_for_guarantee(&p, 0.5).unwrap(), 2.2, epsilon = 1e-12);
        assert_abs_diff_eq!(capacity_for_guarantee(&p, 0.9).unwrap(), 2.8, epsilon = 1e-12);
        assert!(capacity_for_guarantee(&p, 1.0).is_err());
        // inverse consistency and monotonicity in G
        let mut prev = 0.0;
        for g in [0.0, 0.3, 0.6, 0.9, 0.99] {
            let c = capacity_for_guarantee(&p, g).unwrap();
            assert!(c >= prev);
            prev = c;
            if g > 0.0 {
                let back = chebyshev_saturation_bound(&p, c);
                assert_abs_diff_eq!(back, 1.0 - g, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn dummy_edge_adds_flows() {
        let net = fixtures::abilene_homogeneous();
        let routing = shortest_path_routing(&net).unwrap();
        let e13 = net.edge_idx("e13").unwrap();
        let e14 = net.edge_idx("e14").unwrap();
        let dummy = dummy_edge(&net, &routing, e13, e14).unwrap();
        // unit capacities: weights literally f(e13) + f(e14)
        for &(i, j, w) in &dummy.weights {
            let expect = routing.fraction(i as usize, j as usize, e13)
                + routing.fraction(i as usize, j as usize, e14);
            assert_eq!(w, expect);
        }
        assert!(dummy_edge(&net, &routing, e13, e13).is_err());
    }

    #[test]
    fn dummy_with_zero_flow_partner_equals_single_edge() {
        let (net, routing, e0) = fixtures::single_row_routing(4, 2);
        let empty =
            (0..net.edges().len()).find(|&e| routing.edge_support(e).is_empty()).unwrap();
        let tset = TSetSpec::homogeneous(TSetKind::Permutations, 4).unwrap();
        let single =
            build_tplot(&net, &routing, &tset, PlotTarget::Edge(e0), 3000, 30, 5).unwrap();
        let pair =
            build_tplot(&net, &routing, &tset, PlotTarget::EdgePair(e0, empty), 3000, 30, 5)
                .unwrap();
        assert_eq!(single.data, pair.data);
    }

    #[test]
    fn reverse_pair_plot_is_symmetric_about_twice_the_mean() {
        // e13 and e14 are the two directions of the same link; sampling D and
        // effectively D-transposed makes the pair load distribution symmetric
        let net = fixtures::abilene_homogeneous();
        let routing = shortest_path_routing(&net).unwrap();
        let e13 = net.edge_idx("e13").unwrap();
        let e14 = net.edge_idx("e14").unwrap();
        let tset = TSetSpec::homogeneous(TSetKind::Admissible, 11).unwrap();
        let m = 20_000;
        let single =
            build_tplot(&net, &routing, &tset, PlotTarget::Edge(e13), m, 60, 3).unwrap();
        let pair =
            build_tplot(&net, &routing, &tset, PlotTarget::EdgePair(e13, e14), m, 60, 3).unwrap();
        let center = 2.0 * single.mean();
        assert_abs_diff_eq!(pair.mean(), center, epsilon = 0.05);
        // symmetric distribution: mean and median close relative to sigma
        let median = pair.quantile(0.5).unwrap();
        assert!(
            (median - pair.mean()).abs() < 0.35 * pair.variance().sqrt(),
            "median {median} vs mean {}",
            pair.mean()
        );
    }

    #[test]
    fn single_loaded_edge_bounds_collapse() {
        // two nodes, two directed edges, but only e0 carries flow: every
        // quantity collapses onto e0's own CDF
        let net = fixtures::unit_complete(2);
        let e0 = net.edge_idx("v0-v1").unwrap();
        let e1 = net.edge_idx("v1-v0").unwrap();
        let routing = crate::net::Routing::from_fractions(&net, [(0, 1, e0, 1.0)]).unwrap();
        let plot = |t| exact_tplot_permutations(&net, &routing, t, false).unwrap();
        let edge_plots = vec![plot(PlotTarget::Edge(e0)), plot(PlotTarget::Edge(e1))];
        let dummy = plot(PlotTarget::EdgePair(e0, e1));
        let gc = plot(PlotTarget::Global);
        // beyond every worst case all quantities saturate
        let b = global_cdf_bounds(&edge_plots, &dummy, 10.0).unwrap();
        assert_eq!(b.independence_approx, 1.0);
        assert_eq!(b.upper_bound, 1.0);
        assert_eq!(b.lower_tail_bound, 0.0);
        for level in [0.0, 0.25, 0.75, 1.0, 2.0] {
            let b = global_cdf_bounds(&edge_plots, &dummy, level).unwrap();
            let exact_cdf = gc.cdf_at(level);
            let edge_cdf = edge_plots[0].cdf_at(level);
            assert_abs_diff_eq!(b.independence_approx, edge_cdf, epsilon = 1e-15);
            assert_abs_diff_eq!(b.upper_bound, edge_cdf, epsilon = 1e-15);
            assert_abs_diff_eq!(exact_cdf, edge_cdf, epsilon = 1e-15);
            assert!(b.lower_tail_bound <= 1.0 - exact_cdf + 1e-12);
        }
    }

    #[test]
    fn most_loaded_pair_selection() {
        let ps = vec![
            (0usize, params(0.5, 0.1)),
            (1, params(1.9, 0.1)),
            (2, params(1.2, 0.1)),
        ];
        assert_eq!(two_most_loaded(&ps).unwrap(), (1, 2));
    }

    #[test]
    fn abilene_chebyshev_holds_on_sampled_plot() {
        let net = fixtures::abilene_homogeneous();
        let routing = shortest_path_routing(&net).unwrap();
        let e13 = net.edge_idx("e13").unwrap();
        let tset = TSetSpec::homogeneous(TSetKind::Permutations, 11).unwrap();
        let m = 30_000;
        let tp = build_tplot(&net, &routing, &tset, PlotTarget::Edge(e13), m, 80, 7).unwrap();
        let store = MomentStore::in_memory();
        let p = gaussian_params(&net, &routing, e13, &tset, &store).unwrap();
        let hi = match &tp.data {
            PlotData::Bins(b) => b.last().unwrap().upper,
            _ => panic!(),
        };
        for step in 0..50 {
            let c = p.mu + (hi * 1.02 - p.mu) * step as f64 / 49.0;
            let tail = tp.tail_at_least(c);
            let bound = chebyshev_saturation_bound(&p, c);
            assert!(tail <= bound + 1e-9, "c={c}: tail {tail} > bound {bound}");
        }
    }
}

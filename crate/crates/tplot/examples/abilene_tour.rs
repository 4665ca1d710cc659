//! Library walkthrough on the bundled backbone fixture: routing, load
//! distribution, Gaussian parameters, guarantees, and a capacity allocation.

use tplot::bounds::{capacity_for_guarantee, chebyshev_saturation_bound};
use tplot::capalloc::mu_k_sigma_allocation;
use tplot::net::{shortest_path_routing, worst_case_edge_congestion};
use tplot::stats::{build_tplot, gaussian_params, tplot_stats, PlotTarget};
use tplot::tset::moments::MomentStore;
use tplot::tset::{SamplerConfig, TSetKind, TSetSpec};

fn main() -> tplot::Result<()> {
    let net = tplot::fixtures::abilene_homogeneous();
    let routing = shortest_path_routing(&net)?;
    let e13 = net.edge_idx("e13").unwrap();

    println!("worst-case load on e13: {}", worst_case_edge_congestion(&net, &routing, e13)?);

    let tset = TSetSpec::homogeneous(TSetKind::Admissible, net.n())?;
    let plot = build_tplot(&net, &routing, &tset, PlotTarget::Edge(e13), 100_000, 100, 42)?;
    let summary = tplot_stats(&plot, 0.98)?;
    println!(
        "e13 over the admissible set: mean {:.3}, 98% cutoff {:.3}, worst observed {:.3}",
        summary.mean, summary.quantile, summary.worst_observed
    );

    let store = MomentStore::in_memory();
    store.get_or_compute(&tset, &SamplerConfig::with_seed(2024), 100_000)?;
    let params = gaussian_params(&net, &routing, e13, &tset, &store)?;
    println!("analytic parameters: mu {:.3}, sigma {:.3}", params.mu, params.sigma);
    println!(
        "capacity for a 95% guarantee: {:.3} (bound there: {:.3})",
        capacity_for_guarantee(&params, 0.95)?,
        chebyshev_saturation_bound(&params, capacity_for_guarantee(&params, 0.95)?)
    );

    let all_params: Vec<_> = (0..net.edges().len())
        .map(|e| gaussian_params(&net, &routing, e, &tset, &store))
        .collect::<tplot::Result<_>>()?;
    let alloc = mu_k_sigma_allocation(&all_params, 28.0)?;
    println!("mu + k*sigma allocation at total capacity 28: k = {:.3}", alloc.k.unwrap());
    Ok(())
}

//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values (visible under `cargo test -- --nocapture`).

use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use std::sync::OnceLock;
use tplot::bounds::{
    capacity_for_guarantee, chebyshev_saturation_bound, dummy_edge, global_cdf_bounds,
    two_most_loaded,
};
use tplot::capalloc::{
    lagrangian_allocation, mu_k_sigma_allocation, optimize_envelope, recover_k,
    saturation_probability, CapacityAllocation, EnvelopeOptions, SaturationModel,
};
use tplot::complexity::{reduction_routing, verify_reduction, ZeroOneMatrix};
use tplot::fixtures;
use tplot::gauss::std_normal_cdf;
use tplot::net::{
    edge_flow, shortest_path_routing, validate_routing, worst_case_edge_congestion,
};
use tplot::stats::normality::lilliefors_test;
use tplot::stats::{
    build_tplot, exact_tplot_permutations, exact_tplot_permutations_with_limit, gaussian_params,
    target_load, GaussianParams, PlotData, PlotTarget, TPlot,
};
use tplot::tset::moments::MomentStore;
use tplot::tset::{
    convergence_diagnostics, sample_stream, ConvergenceOptions, SampleStream, SamplerConfig,
    TSetKind, TSetSpec,
};
use tplot::TrafficMatrix;

const MOMENT_SEED: u64 = 2024;
const MOMENT_SAMPLES: usize = 100_000;

fn store() -> &'static MomentStore {
    static STORE: OnceLock<MomentStore> = OnceLock::new();
    STORE.get_or_init(MomentStore::in_memory)
}

fn admissible_table(n: usize) -> &'static MomentStore {
    let s = store();
    let spec = TSetSpec::homogeneous(TSetKind::Admissible, n).unwrap();
    s.get_or_compute(&spec, &SamplerConfig::with_seed(MOMENT_SEED), MOMENT_SAMPLES).unwrap();
    s
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Criterion 1: closed-form permutation/derangement moments equal exhaustive
/// enumeration to 1e-12 relative error for random single-path routings at
/// n in 3..=7.
#[test]
fn criterion_01_oracle_equivalence() {
    let start = std::time::Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let store = MomentStore::in_memory();
    let mut cases = 0usize;
    let mut worst = 0.0f64;
    for n in 3..=7 {
        let net = fixtures::complete_network(n);
        for _ in 0..20 {
            let a = ZeroOneMatrix::random(&mut rng, n, 0.5, true);
            let routing = reduction_routing(&net, 0, &a).unwrap();
            assert!(routing.is_single_path());
            for (kind, zero_diag) in
                [(TSetKind::Permutations, false), (TSetKind::Derangements, true)]
            {
                let tset = TSetSpec::homogeneous(kind, n).unwrap();
                let params = gaussian_params(&net, &routing, 0, &tset, &store).unwrap();
                let exact =
                    exact_tplot_permutations(&net, &routing, PlotTarget::Edge(0), zero_diag)
                        .unwrap();
                let gap_mean = relative_gap(params.mu, exact.mean());
                let gap_var = relative_gap(params.sigma * params.sigma, exact.variance());
                assert!(gap_mean <= 1e-12, "{kind:?} n={n} mean gap {gap_mean}");
                assert!(
                    gap_var <= 1e-12 || (params.sigma * params.sigma - exact.variance()).abs() <= 1e-12,
                    "{kind:?} n={n} var gap {gap_var}"
                );
                worst = worst.max(gap_mean).max(gap_var);
                cases += 1;
            }
        }
    }
    assert!(start.elapsed().as_secs() < 60);
    println!(
        "ACCEPTANCE 1 (oracle equivalence): PASS — {cases} cases, worst relative gap {worst:.2e}, {:?}",
        start.elapsed()
    );
}

/// Criterion 2: the single-row counter-example is exactly a two-point
/// distribution with Gaussian parameters (p, p(1-p)), and Lilliefors rejects
/// normality at alpha = 0.20 on 1000 sampled loads.
#[test]
fn criterion_02_counter_example_distribution() {
    let start = std::time::Instant::now();
    let n = 10;
    let k = 1; // p = 0.1
    let p = k as f64 / n as f64;
    let (net, routing, e0) = fixtures::single_row_routing(n, k);
    let tp =
        exact_tplot_permutations_with_limit(&net, &routing, PlotTarget::Edge(e0), false, 10)
            .unwrap();
    let atoms = match &tp.data {
        PlotData::Atoms(a) => a.clone(),
        _ => panic!("exact plot must store atoms"),
    };
    assert_eq!(atoms.len(), 2);
    assert_eq!(atoms[0].0, 0.0);
    assert_eq!(atoms[1].0, 1.0);
    let total = tp.total as f64;
    assert!((atoms[1].1 as f64 / total - p).abs() <= 1e-12);
    assert!((atoms[0].1 as f64 / total - (1.0 - p)).abs() <= 1e-12);

    let tset = TSetSpec::homogeneous(TSetKind::Permutations, n).unwrap();
    let params = gaussian_params(&net, &routing, e0, &tset, &MomentStore::in_memory()).unwrap();
    assert!((params.mu - p).abs() <= 1e-12);
    assert!((params.sigma * params.sigma - p * (1.0 - p)).abs() <= 1e-12);

    let cfg = SamplerConfig::with_seed(202);
    let loads: Vec<f64> = sample_stream(&tset, &cfg, 1000)
        .unwrap()
        .map(|d| target_load(&net, &routing, PlotTarget::Edge(e0), &d))
        .collect();
    let outcome = lilliefors_test(&loads, 0.20).unwrap();
    assert!(outcome.reject, "normality must be rejected: {outcome:?}");
    println!(
        "ACCEPTANCE 2 (counter-example): PASS — atoms (0: {:.3}, 1: {:.3}), params ({:.3}, {:.4}), D={:.4} > {:.4}, {:?}",
        atoms[0].1 as f64 / total,
        atoms[1].1 as f64 / total,
        params.mu,
        params.sigma * params.sigma,
        outcome.statistic,
        outcome.critical_value,
        start.elapsed()
    );
}

/// Criterion 3: mu over derangements divided by mu over permutations is
/// exactly n/(n-1) whenever the diagonal carries no flow.
#[test]
fn criterion_03_mean_ratio_law() {
    let mut rng = ChaCha12Rng::seed_from_u64(303);
    let store = MomentStore::in_memory();
    let mut checked = 0usize;
    for n in 3..=7 {
        let net = fixtures::complete_network(n);
        let ratio_target = n as f64 / (n as f64 - 1.0);
        for _ in 0..5 {
            let a = ZeroOneMatrix::random(&mut rng, n, 0.5, true);
            let routing = reduction_routing(&net, 0, &a).unwrap();
            for e in 0..net.edges().len() {
                if routing.edge_support(e).is_empty() {
                    continue;
                }
                let pp = gaussian_params(
                    &net,
                    &routing,
                    e,
                    &TSetSpec::homogeneous(TSetKind::Permutations, n).unwrap(),
                    &store,
                )
                .unwrap();
                let pd = gaussian_params(
                    &net,
                    &routing,
                    e,
                    &TSetSpec::homogeneous(TSetKind::Derangements, n).unwrap(),
                    &store,
                )
                .unwrap();
                assert!(
                    (pd.mu / pp.mu - ratio_target).abs() <= 1e-12,
                    "n={n} edge={e}: ratio {}",
                    pd.mu / pp.mu
                );
                checked += 1;
            }
        }
    }
    // and on the Abilene fixture (n = 11, shortest-path routing)
    let net = fixtures::abilene_homogeneous();
    let routing = shortest_path_routing(&net).unwrap();
    let store = MomentStore::in_memory();
    for e in 0..net.edges().len() {
        let pp = gaussian_params(
            &net,
            &routing,
            e,
            &TSetSpec::homogeneous(TSetKind::Permutations, 11).unwrap(),
            &store,
        )
        .unwrap();
        let pd = gaussian_params(
            &net,
            &routing,
            e,
            &TSetSpec::homogeneous(TSetKind::Derangements, 11).unwrap(),
            &store,
        )
        .unwrap();
        assert!((pd.mu / pp.mu - 1.1).abs() <= 1e-12);
        checked += 1;
    }
    println!("ACCEPTANCE 3 (mean-ratio law): PASS — {checked} routing/edge pairs at 1e-12");
}

/// Criterion 4: Perm(A) equals n! times the exact PDF atom at n/c(e) for 50
/// random 0-1 matrices at each n in {3, 4, 5}.
#[test]
fn criterion_04_reduction_identity() {
    let start = std::time::Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(404);
    let mut cases = 0usize;
    for n in 3..=5 {
        let net = fixtures::complete_network(n);
        for _ in 0..50 {
            let density = 0.2 + 0.6 * rng.random::<f64>();
            let a = ZeroOneMatrix::random(&mut rng, n, density, false);
            let check = verify_reduction(&net, 0, &a).unwrap();
            assert!(
                check.equal,
                "n={n}: permanent {} vs scaled mass {}",
                check.permanent, check.scaled_pdf_mass
            );
            cases += 1;
        }
    }
    assert!(start.elapsed().as_secs() < 60);
    println!(
        "ACCEPTANCE 4 (reduction identity): PASS — {cases}/{cases} equalities, {:?}",
        start.elapsed()
    );
}

/// Criterion 5: the one-tailed Chebyshev bound dominates the empirical tail
/// on every fixture plot at 50 grid capacities, and capacity_for_guarantee
/// round-trips through the bound to 1e-12.
#[test]
fn criterion_05_chebyshev_validity() {
    let start = std::time::Instant::now();
    let m = 100_000;
    let mut checked_plots = 0;

    let mut check_plot = |tp: &TPlot, params: &GaussianParams, label: &str| {
        let hi = tp.worst_observed().max(params.mu + 1e-9);
        for step in 0..50 {
            let c = params.mu + (hi * 1.02 - params.mu) * step as f64 / 49.0;
            let tail = tp.tail_at_least(c);
            let bound = chebyshev_saturation_bound(params, c);
            assert!(tail <= bound + 1e-9, "{label}: c={c} tail {tail} > bound {bound}");
        }
        checked_plots += 1;
    };

    let net = fixtures::abilene_homogeneous();
    let routing = shortest_path_routing(&net).unwrap();
    let e13 = net.edge_idx("e13").unwrap();
    let store = admissible_table(11);

    let tset_a = TSetSpec::homogeneous(TSetKind::Admissible, 11).unwrap();
    let tp = build_tplot(&net, &routing, &tset_a, PlotTarget::Edge(e13), m, 100, 505).unwrap();
    let pa = gaussian_params(&net, &routing, e13, &tset_a, store).unwrap();
    check_plot(&tp, &pa, "abilene e13 over A");

    let tset_p = TSetSpec::homogeneous(TSetKind::Permutations, 11).unwrap();
    let tp = build_tplot(&net, &routing, &tset_p, PlotTarget::Edge(e13), m, 100, 506).unwrap();
    let pp = gaussian_params(&net, &routing, e13, &tset_p, store).unwrap();
    check_plot(&tp, &pp, "abilene e13 over P");

    let toy = fixtures::toy4();
    let toy_routing = shortest_path_routing(&toy).unwrap();
    let store4 = admissible_table(4);
    let tset4 = TSetSpec::homogeneous(TSetKind::Admissible, 4).unwrap();
    let tp = build_tplot(&toy, &toy_routing, &tset4, PlotTarget::Edge(0), m, 100, 507).unwrap();
    let p4 = gaussian_params(&toy, &toy_routing, 0, &tset4, store4).unwrap();
    check_plot(&tp, &p4, "toy4 edge over A");

    // round-trip identity
    for g in [0.1, 0.25, 0.5, 0.75, 0.9, 0.99] {
        let c = capacity_for_guarantee(&pa, g).unwrap();
        let back = chebyshev_saturation_bound(&pa, c);
        assert!((back - (1.0 - g)).abs() <= 1e-12, "g={g}: {back}");
    }
    println!(
        "ACCEPTANCE 5 (Chebyshev validity): PASS — {checked_plots} plots x 50 capacities, round-trip 1e-12, {:?}",
        start.elapsed()
    );
}

/// Criterion 6: on the 4-node toy network over permutations (exact
/// enumeration), independence approx <= exact GC CDF <= upper bound at 20
/// grid points.
#[test]
fn criterion_06_global_cdf_sandwich() {
    let net = fixtures::toy4();
    let routing = shortest_path_routing(&net).unwrap();
    let store = MomentStore::in_memory();
    let tset_p = TSetSpec::homogeneous(TSetKind::Permutations, 4).unwrap();
    let edge_plots: Vec<TPlot> = (0..net.edges().len())
        .map(|e| exact_tplot_permutations(&net, &routing, PlotTarget::Edge(e), false).unwrap())
        .collect();
    let ranked: Vec<(usize, GaussianParams)> = (0..net.edges().len())
        .map(|e| (e, gaussian_params(&net, &routing, e, &tset_p, &store).unwrap()))
        .collect();
    let (a, b) = two_most_loaded(&ranked).unwrap();
    let dummy = dummy_edge(&net, &routing, a, b).unwrap();
    let dummy_plot =
        exact_tplot_permutations(&net, &routing, dummy.target(), false).unwrap();
    let gc = exact_tplot_permutations(&net, &routing, PlotTarget::Global, false).unwrap();
    let hi = gc.worst_observed();
    for i in 0..20 {
        let level = hi * (i as f64 + 0.5) / 20.0;
        let bounds = global_cdf_bounds(&edge_plots, &dummy_plot, level).unwrap();
        let exact = gc.cdf_at(level);
        assert!(
            bounds.independence_approx <= exact + 1e-12,
            "L={level}: approx {} > exact {exact}",
            bounds.independence_approx
        );
        assert!(
            exact <= bounds.upper_bound + 1e-12,
            "L={level}: exact {exact} > upper {}",
            bounds.upper_bound
        );
        assert!(bounds.lower_tail_bound <= (1.0 - exact) + 1e-12);
    }
    println!(
        "ACCEPTANCE 6 (global CDF sandwich): PASS — 20 grid points on toy4 over P, dummy pair ({}, {})",
        net.edges()[a].id,
        net.edges()[b].id
    );
}

/// Criterion 7: the bin-indicator estimator variance scales as p(1-p)/m
/// within factor [0.5, 2] between m = 1e4 and 1e5 across 50 runs, and the
/// two-start CDF sup-distance stays below 0.01 at m = 1e5.
#[test]
fn criterion_07_sampler_convergence() {
    let start = std::time::Instant::now();
    // variance curve on the 4-node fixture (50 runs)
    let toy = fixtures::toy4();
    let toy_routing = shortest_path_routing(&toy).unwrap();
    let tset4 = TSetSpec::homogeneous(TSetKind::Admissible, 4).unwrap();
    let opts = ConvergenceOptions { m_grid: vec![10_000, 100_000], runs: 50, starts: None };
    let report = convergence_diagnostics(
        &tset4,
        &SamplerConfig::with_seed(11),
        |d| target_load(&toy, &toy_routing, PlotTarget::Edge(0), d),
        (0.2, 0.5),
        &opts,
    )
    .unwrap();
    let v4 = report.points[0].variance;
    let v5 = report.points[1].variance;
    let ratio = v4 / v5;
    assert!(
        (5.0..=20.0).contains(&ratio),
        "variance ratio {ratio} outside [0.5, 2] x 10 (v4 {v4}, v5 {v5})"
    );

    // two-start distance for the Abilene e13 load over A at m = 1e5
    let net = fixtures::abilene_homogeneous();
    let routing = shortest_path_routing(&net).unwrap();
    let e13 = net.edge_idx("e13").unwrap();
    let tset = TSetSpec::homogeneous(TSetKind::Admissible, 11).unwrap();
    let opts = ConvergenceOptions { m_grid: vec![100_000], runs: 2, starts: None };
    let rep = convergence_diagnostics(
        &tset,
        &SamplerConfig::with_seed(5),
        |d| target_load(&net, &routing, PlotTarget::Edge(e13), d),
        (1.8, 2.2),
        &opts,
    )
    .unwrap();
    assert!(
        rep.two_start_sup_distance < 0.01,
        "two-start distance {}",
        rep.two_start_sup_distance
    );
    println!(
        "ACCEPTANCE 7 (sampler convergence): PASS — variance ratio {ratio:.2} in [5, 20], two-start distance {:.4} < 0.01, {:?}",
        rep.two_start_sup_distance,
        start.elapsed()
    );
}

/// Criterion 8: doubly stochastic sampler moments: every entry mean within 3
/// batch-means standard errors of 1/n, and row/column sums drift at most
/// 1e-12 over 1e5 walk steps.
#[test]
fn criterion_08_stochastic_sampler_moments() {
    let n = 5;
    let tset = TSetSpec::homogeneous(TSetKind::DoublyStochastic, n).unwrap();
    let cfg = SamplerConfig::with_seed(808);
    let m = 20_000;
    let batches = 100;
    let batch_len = m / batches;
    let mut batch_means = vec![vec![0.0f64; n * n]; batches];
    for (idx, d) in SampleStream::new(&tset, &cfg, m).unwrap().enumerate() {
        let b = &mut batch_means[idx / batch_len];
        for (k, &v) in d.data().iter().enumerate() {
            b[k] += v / batch_len as f64;
        }
    }
    let target = 1.0 / n as f64;
    let mut worst_z = 0.0f64;
    for k in 0..n * n {
        let vals: Vec<f64> = batch_means.iter().map(|b| b[k]).collect();
        let mean = vals.iter().sum::<f64>() / batches as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
            / (batches as f64 - 1.0);
        let se = (var / batches as f64).sqrt();
        let z = (mean - target).abs() / se;
        worst_z = worst_z.max(z);
        assert!(z <= 3.0, "entry {k}: mean {mean} vs {target} is {z:.2} SEs away");
    }

    // sum drift over 1e5 raw steps
    let drift_cfg = SamplerConfig {
        burn_in: Some(0),
        thinning: Some(1),
        ..SamplerConfig::with_seed(809)
    };
    let last = SampleStream::new(&tset, &drift_cfg, 100_000).unwrap().last().unwrap();
    let mut worst_drift = 0.0f64;
    for i in 0..n {
        worst_drift = worst_drift.max((last.row_sum(i) - 1.0).abs());
        worst_drift = worst_drift.max((last.col_sum(i) - 1.0).abs());
    }
    assert!(worst_drift <= 1e-12, "sum drift {worst_drift}");
    println!(
        "ACCEPTANCE 8 (S sampler moments): PASS — worst entry z {worst_z:.2} <= 3, sum drift {worst_drift:.2e} <= 1e-12"
    );
}

/// Criterion 9: under the equal-sigma independent-Gaussian model the
/// mu + k*sigma allocation beats 100 random budget-respecting perturbations,
/// and the Lagrangian solver matches a 1000-point grid search on two-edge
/// unequal-sigma cases.
#[test]
fn criterion_09_allocation_optimality() {
    // local-optimality spot check on a 5-edge synthetic fixture
    let params: Vec<GaussianParams> = [0.9, 0.4, 0.7, 1.3, 0.6]
        .iter()
        .map(|&mu| GaussianParams::new(mu, 0.25, tplot::stats::ParamMethod::Empirical))
        .collect();
    let budget: f64 = params.iter().map(|p| p.mu).sum::<f64>() + 5.0 * 0.25 * 0.8;
    let alloc = mu_k_sigma_allocation(&params, budget).unwrap();
    assert!((alloc.capacities.iter().sum::<f64>() - budget).abs() <= 1e-9);
    let base = saturation_probability(&alloc, &params, SaturationModel::IndependentGaussian);
    let mut rng = ChaCha12Rng::seed_from_u64(909);
    for trial in 0..100 {
        let mut delta: Vec<f64> = (0..5)
            .map(|_| 0.08 * rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let mean = delta.iter().sum::<f64>() / 5.0;
        for d in delta.iter_mut() {
            *d -= mean;
        }
        let capacities: Vec<f64> =
            alloc.capacities.iter().zip(&delta).map(|(c, d)| c + d).collect();
        let perturbed = CapacityAllocation { capacities, k: None, budget };
        let sat = saturation_probability(&perturbed, &params, SaturationModel::IndependentGaussian);
        assert!(sat >= base - 1e-12, "trial {trial}: {sat} < {base}");
    }

    // Lagrangian vs 1000-point grid search
    let mut worst_gap = 0.0f64;
    for (s1, s2) in [(0.1, 0.3), (0.05, 0.4), (0.2, 0.25)] {
        let params = [
            GaussianParams::new(1.0, s1, tplot::stats::ParamMethod::Empirical),
            GaussianParams::new(1.0, s2, tplot::stats::ParamMethod::Empirical),
        ];
        let budget = 2.4;
        let alloc = lagrangian_allocation(&params, budget).unwrap();
        let steps = 1000;
        let mut best_c1 = 0.0;
        let mut best_val = f64::NEG_INFINITY;
        for i in 1..steps {
            let c1 = budget * i as f64 / steps as f64;
            let val = std_normal_cdf((c1 - 1.0) / s1).ln()
                + std_normal_cdf((budget - c1 - 1.0) / s2).ln();
            if val > best_val {
                best_val = val;
                best_c1 = c1;
            }
        }
        let gap = (alloc.capacities[0] - best_c1).abs();
        let resolution = budget / steps as f64;
        assert!(gap <= resolution, "sigma ({s1}, {s2}): gap {gap} > {resolution}");
        worst_gap = worst_gap.max(gap);
    }
    // round-trip of the k recovery
    let k = recover_k(&alloc, &params);
    assert!((k - alloc.k.unwrap()).abs() <= 1e-12);
    println!(
        "ACCEPTANCE 9 (allocation optimality): PASS — 100 perturbations dominated, grid gap <= {worst_gap:.2e}"
    );
}

/// Criterion 10: the optimizer envelope dominates both the homogeneous and
/// the mu + k*sigma CDFs pointwise on the Abilene fixture (1e4 matrices, 1e4
/// iterations per level, 8 grid points).
#[test]
fn criterion_10_envelope_dominance() {
    let start = std::time::Instant::now();
    let net = fixtures::abilene_homogeneous();
    let routing = shortest_path_routing(&net).unwrap();
    let tset = TSetSpec::homogeneous(TSetKind::Admissible, 11).unwrap();
    let cfg = SamplerConfig::with_seed(1010);
    let samples: Vec<TrafficMatrix> = sample_stream(&tset, &cfg, 10_000).unwrap().collect();
    let budget = 28.0;
    // grid endpoints from the sample set itself
    let edges = net.edges().len();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for d in &samples {
        let total: f64 = (0..edges).map(|e| edge_flow(&routing, e, d)).sum();
        lo = lo.min(total / budget);
        let worst = (0..edges)
            .map(|e| edge_flow(&routing, e, d) / (budget / edges as f64))
            .fold(0.0f64, f64::max);
        hi = hi.max(worst);
    }
    let l_grid: Vec<f64> = (0..8).map(|i| lo + (hi - lo) * i as f64 / 7.0).collect();
    let opts = EnvelopeOptions { iterations: 10_000, seed: 1010, l_grid, step_sd: None };
    let report = optimize_envelope(&net, &routing, &samples, budget, &opts).unwrap();
    let mut max_gain = 0.0f64;
    for p in &report.points {
        assert!(
            p.envelope_fraction >= p.homogeneous_fraction - 1e-12,
            "L={}: envelope {} < homogeneous {}",
            p.level,
            p.envelope_fraction,
            p.homogeneous_fraction
        );
        assert!(
            p.envelope_fraction >= p.mu_k_sigma_fraction - 1e-12,
            "L={}: envelope {} < mu+k*sigma {}",
            p.level,
            p.envelope_fraction,
            p.mu_k_sigma_fraction
        );
        max_gain = max_gain.max(p.envelope_fraction - p.homogeneous_fraction);
        // the envelope must be attainable: every best allocation respects
        // the budget
        assert!((p.best_allocation.iter().sum::<f64>() - budget).abs() <= 1e-6);
    }
    // envelope is monotone nondecreasing in the load level
    for w in report.points.windows(2) {
        assert!(w[1].envelope_fraction >= w[0].envelope_fraction - 1e-12);
    }
    assert!(start.elapsed().as_secs() < 3600, "runtime budget exceeded");
    println!(
        "ACCEPTANCE 10 (envelope dominance): PASS — 8 levels, max gain over homogeneous {max_gain:.3}, {:?}",
        start.elapsed()
    );
}

/// Criterion 11 (reported, not gated): best-effort reproduction of the
/// published Abilene figures; deviations are attributed to the metric
/// reconstruction.
#[test]
fn criterion_11_published_number_report() {
    let start = std::time::Instant::now();
    let net = fixtures::abilene_homogeneous();
    let routing = shortest_path_routing(&net).unwrap();
    assert!(validate_routing(&net, &routing).unwrap().is_empty());
    let e13 = net.edge_idx("e13").unwrap();
    let store = admissible_table(11);

    let worst = worst_case_edge_congestion(&net, &routing, e13).unwrap();
    let tset_a = TSetSpec::homogeneous(TSetKind::Admissible, 11).unwrap();
    let tp =
        build_tplot(&net, &routing, &tset_a, PlotTarget::Edge(e13), 100_000, 100, 1111).unwrap();
    let mean = tp.mean();
    let q98 = tp.quantile(0.98).unwrap();

    let params: Vec<GaussianParams> = (0..net.edges().len())
        .map(|e| gaussian_params(&net, &routing, e, &tset_a, store).unwrap())
        .collect();
    let alloc = mu_k_sigma_allocation(&params, 28.0).unwrap();
    let k = alloc.k.unwrap();

    let in_band = |x: f64, target: f64, tol: f64| if (x - target).abs() <= tol { "in" } else { "OUT of" };
    println!("ACCEPTANCE 11 (published-number report, best-effort, not gated):");
    println!(
        "  e13 worst case: {worst} (target exactly 5 — {})",
        if worst == 5.0 { "match" } else { "DEVIATION" }
    );
    println!(
        "  e13 mean over A: {mean:.4} ({} target band 1.9 +- 0.15)",
        in_band(mean, 1.9, 0.15)
    );
    println!(
        "  e13 98%-cutoff over A: {q98:.4} ({} target band 2.5 +- 0.2)",
        in_band(q98, 2.5, 0.2)
    );
    println!("  mu+k*sigma at C=28: k = {k:.4} ({} target band 1.14 +- 0.1)", in_band(k, 1.14, 0.1));
    println!("  deviations, if any, stem from the best-effort metric reconstruction");
    println!("  ({:?})", start.elapsed());
}

/// Long-run gate: the full 11! enumeration on the backbone fixture, checked
/// against the closed forms. Run with `cargo test -- --ignored`.
#[test]
#[ignore = "11! evaluations; takes a few minutes"]
fn long_run_exact_enumeration_n11() {
    let start = std::time::Instant::now();
    let net = fixtures::abilene_homogeneous();
    let routing = shortest_path_routing(&net).unwrap();
    let e13 = net.edge_idx("e13").unwrap();
    let store = MomentStore::in_memory();
    for (kind, zero_diag) in [(TSetKind::Permutations, false), (TSetKind::Derangements, true)] {
        let tset = TSetSpec::homogeneous(kind, 11).unwrap();
        let exact = exact_tplot_permutations_with_limit(
            &net,
            &routing,
            PlotTarget::Edge(e13),
            zero_diag,
            11,
        )
        .unwrap();
        let params = gaussian_params(&net, &routing, e13, &tset, &store).unwrap();
        assert!(relative_gap(params.mu, exact.mean()) <= 1e-12);
        assert!(relative_gap(params.sigma * params.sigma, exact.variance()) <= 1e-12);
        assert_eq!(exact.worst_observed(), 5.0);
    }
    println!("long-run 11! enumeration: PASS in {:?}", start.elapsed());
}

/// Extra regression: the envelope run's single-level winners stay weakly
/// dominated by the envelope everywhere (checked cheaply at reduced scale).
#[test]
fn envelope_cross_domination_regression() {
    let net = fixtures::abilene_homogeneous();
    let routing = shortest_path_routing(&net).unwrap();
    let tset = TSetSpec::homogeneous(TSetKind::Admissible, 11).unwrap();
    let cfg = SamplerConfig::with_seed(77);
    let samples: Vec<TrafficMatrix> = sample_stream(&tset, &cfg, 2_000).unwrap().collect();
    let l_grid: Vec<f64> = (0..5).map(|i| 1.2 + 0.35 * i as f64).collect();
    let opts = EnvelopeOptions { iterations: 1_000, seed: 7, l_grid, step_sd: None };
    let report = optimize_envelope(&net, &routing, &samples, 28.0, &opts).unwrap();
    // objective of any winner at any level never exceeds the envelope there
    let objective = |caps: &[f64], level: f64| -> f64 {
        let ok = samples
            .iter()
            .filter(|d| {
                (0..net.edges().len())
                    .all(|e| edge_flow(&routing, e, d) <= level * caps[e])
            })
            .count();
        ok as f64 / samples.len() as f64
    };
    for p in &report.points {
        for q in &report.points {
            let v = objective(&q.best_allocation, p.level);
            assert!(v <= p.envelope_fraction + 1e-12);
        }
    }
}

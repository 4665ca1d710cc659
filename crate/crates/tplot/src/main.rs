//! Command-line front end: T-Plot construction, exact enumeration, Gaussian
//! parameters, normality tests, global-CDF bounds, capacity allocation, the
//! optimization envelope, raw sampling, the permanent reduction demo, and
//! sampler diagnostics.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;
use tplot::bounds::{dummy_edge, global_cdf_bounds, two_most_loaded};
use tplot::capalloc::{
    lagrangian_allocation, mu_k_sigma_allocation, optimize_envelope, EnvelopeOptions,
};
use tplot::complexity::{verify_reduction, ZeroOneMatrix};
use tplot::error::{Error, Result};
use tplot::io::{self, Provenance};
use tplot::net::{shortest_path_routing, validate_routing_with_tol, Network, Routing};
use tplot::stats::normality::{lilliefors_test, npp_data};
use tplot::stats::{
    build_tplot_cfg, empirical_params, exact_tplot_permutations_with_limit, gaussian_params,
    target_load, GaussianParams, PlotTarget, TPlot, DEFAULT_BINS, EXACT_ENUMERATION_LIMIT,
    EXACT_ENUMERATION_LONG_RUN_LIMIT,
};
use tplot::tset::moments::MomentStore;
use tplot::tset::{
    convergence_diagnostics, sample_stream, ConvergenceOptions, SamplerConfig, TSetKind, TSetSpec,
};
use tplot::TrafficMatrix;

#[derive(Parser)]
#[command(
    name = "tplot",
    version,
    about = "Traffic load distribution plots for capacitated networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Histogram of one edge's congestion over a T-Set.
    TplotEdge(TplotEdgeArgs),
    /// Histogram of the global congestion (or throughput) over a T-Set.
    TplotGlobal(TplotGlobalArgs),
    /// Exact distribution over all permutations or derangements.
    ExactTplot(ExactArgs),
    /// Analytic Gaussian parameters (mu, sigma) of an edge load.
    GaussianParams(GaussianArgs),
    /// Lilliefors normality test of sampled edge loads, plus NPP data.
    Normality(NormalityArgs),
    /// Independence approximation and bounds for the global congestion CDF.
    Bounds(BoundsArgs),
    /// Capacity allocation from per-edge Gaussian parameters.
    Capalloc(CapallocArgs),
    /// Hill-climbed envelope of achievable global-congestion CDF values.
    OptimizeEnvelope(EnvelopeArgs),
    /// Emit raw traffic-matrix samples as CSV (row-major).
    Sample(SampleArgs),
    /// Verify Perm(A) = n! * PDF mass at n/c(e) with the planted routing.
    ReducePermanent(ReduceArgs),
    /// Sampler convergence diagnostics (variance curve, two-start distance).
    Diagnostics(DiagnosticsArgs),
}

#[derive(Args)]
struct NetArgs {
    /// Network JSON file.
    #[arg(long, conflicts_with = "fixture")]
    network: Option<PathBuf>,
    /// Bundled network: abilene-homogeneous, abilene-heterogeneous, toy4, fix5.
    #[arg(long)]
    fixture: Option<String>,
    /// Explicit routing JSON (default: shortest-path routing on the metric).
    #[arg(long)]
    routing: Option<PathBuf>,
    /// Absolute tolerance for flow conservation checks.
    #[arg(long, default_value_t = 1e-9)]
    conservation_tol: f64,
}

impl NetArgs {
    fn load(&self) -> Result<(Network, Routing)> {
        let net = match (&self.network, &self.fixture) {
            (Some(path), None) => io::read_network(path)?,
            (None, Some(name)) => tplot::fixtures::load_fixture(name)?,
            _ => {
                return Err(Error::InvalidArgument(
                    "pass exactly one of --network or --fixture".into(),
                ))
            }
        };
        let routing = match &self.routing {
            Some(path) => {
                let r = io::read_routing(path, &net)?;
                let violations = validate_routing_with_tol(&net, &r, self.conservation_tol)?;
                if !violations.is_empty() {
                    let v = &violations[0];
                    return Err(Error::Structural(format!(
                        "routing violates conservation for commodity ({}, {}) at node {} (residual {:+e}; {} violations total)",
                        net.nodes()[v.src].id,
                        net.nodes()[v.dst].id,
                        net.nodes()[v.node].id,
                        v.residual,
                        violations.len()
                    )));
                }
                r
            }
            None => shortest_path_routing(&net)?,
        };
        Ok((net, routing))
    }
}

#[derive(Args)]
struct SamplerArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thinning: Option<usize>,
    #[arg(long)]
    step_scale: Option<f64>,
}

impl SamplerArgs {
    fn config(&self) -> SamplerConfig {
        SamplerConfig {
            seed: self.seed,
            burn_in: self.burn_in,
            thinning: self.thinning,
            step_scale: self.step_scale,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(std::fs::File::create(path)?),
            None => Box::new(std::io::stdout().lock()),
        })
    }
}

#[derive(Args)]
struct TplotEdgeArgs {
    #[command(flatten)]
    net: NetArgs,
    /// T-Set kind: P, Pd, S, Sd, A, Ad, H, Hs.
    #[arg(long)]
    tset: String,
    /// Edge id.
    #[arg(long)]
    edge: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 1)]
    chains: usize,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TplotGlobalArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long)]
    tset: String,
    /// Plot the throughput distribution instead of the congestion.
    #[arg(long)]
    throughput: bool,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = 1)]
    chains: usize,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    net: NetArgs,
    /// Edge id; or use --global for the global plot.
    #[arg(long, conflicts_with = "global")]
    edge: Option<String>,
    #[arg(long)]
    global: bool,
    /// Enumerate derangements instead of all permutations.
    #[arg(long)]
    zero_diagonal: bool,
    /// Allow n up to 11 (n! evaluations; minutes at n = 11).
    #[arg(long)]
    long_run: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct GaussianArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long)]
    tset: String,
    #[arg(long)]
    edge: String,
    /// Monte Carlo samples for the moment table (continuous kinds).
    #[arg(long, default_value_t = 100_000)]
    moment_samples: usize,
    #[arg(long, default_value_t = 2024)]
    moment_seed: u64,
}

#[derive(Args)]
struct NormalityArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long)]
    tset: String,
    #[arg(long)]
    edge: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Significance level: 0.01, 0.05, or 0.20.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Write normal-probability-plot points (CSV) here.
    #[arg(long)]
    npp_out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long)]
    tset: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// Dummy pair as `edgeA,edgeB` (default: the two most loaded edges).
    #[arg(long)]
    pair: Option<String>,
    #[arg(long, default_value_t = 20)]
    grid_points: usize,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CapallocArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long)]
    tset: String,
    #[arg(long)]
    budget: f64,
    #[arg(long, value_enum, default_value = "mu-k-sigma")]
    method: AllocMethod,
    #[arg(long, default_value_t = 100_000)]
    moment_samples: usize,
    #[arg(long, default_value_t = 2024)]
    moment_seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum AllocMethod {
    MuKSigma,
    Lagrangian,
}

#[derive(Args)]
struct EnvelopeArgs {
    #[command(flatten)]
    net: NetArgs,
    /// T-Set the sample matrices are drawn from.
    #[arg(long, default_value = "A")]
    tset: String,
    #[arg(long)]
    budget: f64,
    /// Matrices in the fixed evaluation set.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 10_000)]
    iterations: usize,
    /// Load-level grid size; 0 means the automatic 40-point sweep.
    #[arg(long, default_value_t = 8)]
    grid_points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SampleArgs {
    /// Matrix dimension (homogeneous kinds); H kinds take it from --network.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, conflicts_with = "fixture")]
    network: Option<PathBuf>,
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long)]
    tset: String,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long)]
    edge: String,
    /// 0-1 matrix as CSV: n rows of n comma-separated entries.
    #[arg(long)]
    matrix: PathBuf,
}

#[derive(Args)]
struct DiagnosticsArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long)]
    tset: String,
    /// Edge whose congestion is the diagnosed statistic.
    #[arg(long)]
    edge: String,
    /// Indicator bin as `lo,hi`.
    #[arg(long)]
    bin: String,
    #[arg(long, default_value_t = 50)]
    runs: usize,
    /// Comma-separated sample counts for the variance curve.
    #[arg(long, default_value = "100,1000,10000,100000")]
    m_grid: String,
    #[command(flatten)]
    sampler: SamplerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        if let Error::Io(io_err) = &err {
            if io_err.kind() == std::io::ErrorKind::BrokenPipe {
                return;
            }
        }
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::TplotEdge(args) => tplot_edge(args),
        Command::TplotGlobal(args) => tplot_global(args),
        Command::ExactTplot(args) => exact_tplot(args),
        Command::GaussianParams(args) => gaussian(args),
        Command::Normality(args) => normality(args),
        Command::Bounds(args) => bounds(args),
        Command::Capalloc(args) => capalloc_cmd(args),
        Command::OptimizeEnvelope(args) => envelope(args),
        Command::Sample(args) => sample(args),
        Command::ReducePermanent(args) => reduce(args),
        Command::Diagnostics(args) => diagnostics(args),
    }
}

fn edge_index(net: &Network, id: &str) -> Result<usize> {
    net.edge_idx(id).ok_or_else(|| {
        let mut ids: Vec<&str> = net.edges().iter().map(|e| e.id.as_str()).collect();
        ids.sort_unstable();
        Error::InvalidArgument(format!("unknown edge `{id}`; available: {}", ids.join(", ")))
    })
}

fn tset_spec(kind: &str, net: &Network) -> Result<TSetSpec> {
    TSetSpec::for_network(kind.parse::<TSetKind>()?, net)
}

fn emit_tplot(tp: &TPlot, net: &Network, output: &OutputArgs, provenance: &Provenance) -> Result<()> {
    let mut w = output.writer()?;
    match output.format {
        Format::Csv => io::write_tplot_csv(&mut w, tp, provenance)?,
        Format::Json => {
            let file = io::tplot_to_file(tp, net);
            serde_json::to_writer_pretty(&mut w, &file)?;
            writeln!(w)?;
        }
    }
    Ok(())
}

fn tplot_edge(args: TplotEdgeArgs) -> Result<()> {
    let (net, routing) = args.net.load()?;
    let tset = tset_spec(&args.tset, &net)?;
    let edge = edge_index(&net, &args.edge)?;
    let tp = build_tplot_cfg(
        &net,
        &routing,
        &tset,
        PlotTarget::Edge(edge),
        args.samples,
        args.bins,
        &args.sampler.config(),
        args.chains,
    )?;
    let prov = Provenance::new(
        Some(args.sampler.seed),
        &format!(
            "tplot-edge tset={} edge={} m={} bins={} chains={}",
            args.tset, args.edge, args.samples, args.bins, args.chains
        ),
    );
    emit_tplot(&tp, &net, &args.output, &prov)
}

fn tplot_global(args: TplotGlobalArgs) -> Result<()> {
    let (net, routing) = args.net.load()?;
    let tset = tset_spec(&args.tset, &net)?;
    let target = if args.throughput { PlotTarget::Throughput } else { PlotTarget::Global };
    let tp = build_tplot_cfg(
        &net,
        &routing,
        &tset,
        target,
        args.samples,
        args.bins,
        &args.sampler.config(),
        args.chains,
    )?;
    let prov = Provenance::new(
        Some(args.sampler.seed),
        &format!(
            "tplot-global tset={} throughput={} m={} bins={} chains={}",
            args.tset, args.throughput, args.samples, args.bins, args.chains
        ),
    );
    emit_tplot(&tp, &net, &args.output, &prov)
}

fn exact_tplot(args: ExactArgs) -> Result<()> {
    let (net, routing) = args.net.load()?;
    let target = match (&args.edge, args.global) {
        (Some(id), false) => PlotTarget::Edge(edge_index(&net, id)?),
        (None, true) => PlotTarget::Global,
        _ => return Err(Error::InvalidArgument("pass exactly one of --edge or --global".into())),
    };
    let limit =
        if args.long_run { EXACT_ENUMERATION_LONG_RUN_LIMIT } else { EXACT_ENUMERATION_LIMIT };
    let tp = exact_tplot_permutations_with_limit(&net, &routing, target, args.zero_diagonal, limit)?;
    let prov = Provenance::new(
        None,
        &format!("exact-tplot target={:?} zero_diagonal={}", args.edge, args.zero_diagonal),
    );
    emit_tplot(&tp, &net, &args.output, &prov)
}

fn prepare_moments(store: &MomentStore, tset: &TSetSpec, seed: u64, samples: usize) -> Result<()> {
    let cfg = SamplerConfig::with_seed(seed);
    match tset.kind {
        TSetKind::DoublyStochastic
        | TSetKind::DoublyStochasticZeroDiag
        | TSetKind::Admissible
        | TSetKind::AdmissibleZeroDiag => {
            store.get_or_compute(tset, &cfg, samples)?;
        }
        TSetKind::Heterogeneous => {
            store.get_or_compute_h(tset, &cfg, samples)?;
        }
        _ => {}
    }
    Ok(())
}

fn gaussian(args: GaussianArgs) -> Result<()> {
    let (net, routing) = args.net.load()?;
    let tset = tset_spec(&args.tset, &net)?;
    let edge = edge_index(&net, &args.edge)?;
    let store = MomentStore::from_env();
    prepare_moments(&store, &tset, args.moment_seed, args.moment_samples)?;
    let params = gaussian_params(&net, &routing, edge, &tset, &store)?;
    println!(
        "edge={} tset={} mu={} sigma={} method={:?}",
        args.edge, args.tset, params.mu, params.sigma, params.method
    );
    Ok(())
}

fn normality(args: NormalityArgs) -> Result<()> {
    let (net, routing) = args.net.load()?;
    let tset = tset_spec(&args.tset, &net)?;
    let edge = edge_index(&net, &args.edge)?;
    let cfg = args.sampler.config();
    let loads: Vec<f64> = sample_stream(&tset, &cfg, args.samples)?
        .map(|d| target_load(&net, &routing, PlotTarget::Edge(edge), &d))
        .collect();
    let outcome = lilliefors_test(&loads, args.alpha)?;
    let fit = empirical_params(&loads);
    println!(
        "edge={} tset={} m={} mean={} sd={} D={} critical={} alpha={} decision={}{}",
        args.edge,
        args.tset,
        args.samples,
        fit.mu,
        fit.sigma,
        outcome.statistic,
        outcome.critical_value,
        outcome.alpha,
        if outcome.reject { "reject" } else { "accept" },
        if outcome.degenerate { " (degenerate: zero variance)" } else { "" },
    );
    if let Some(path) = &args.npp_out {
        let prov = Provenance::new(
            Some(args.sampler.seed),
            &format!("normality-npp edge={} tset={} m={}", args.edge, args.tset, args.samples),
        );
        let mut w = std::fs::File::create(path)?;
        for line in prov.comment_lines() {
            writeln!(w, "{line}")?;
        }
        writeln!(w, "normal_quantile,ordered_load")?;
        for (q, x) in npp_data(&loads)? {
            writeln!(w, "{q},{x}")?;
        }
    }
    Ok(())
}

fn bounds(args: BoundsArgs) -> Result<()> {
    let (net, routing) = args.net.load()?;
    let tset = tset_spec(&args.tset, &net)?;
    let cfg = args.sampler.config();
    // one shared sample pass scores every edge plot, the dummy, and the
    // empirical global CDF
    let edges = net.edges().len();
    let samples: Vec<TrafficMatrix> = sample_stream(&tset, &cfg, args.samples)?.collect();
    let plot_of = |target: PlotTarget| -> TPlot {
        let loads: Vec<f64> =
            samples.iter().map(|d| target_load(&net, &routing, target, d)).collect();
        TPlot::from_loads(target, tset.clone(), &loads, None, args.bins, Some(cfg.seed))
    };
    let edge_plots: Vec<TPlot> = (0..edges).map(|e| plot_of(PlotTarget::Edge(e))).collect();
    let pair = match &args.pair {
        Some(spec) => {
            let (a, b) = spec
                .split_once(',')
                .ok_or_else(|| Error::InvalidArgument("--pair wants `edgeA,edgeB`".into()))?;
            (edge_index(&net, a.trim())?, edge_index(&net, b.trim())?)
        }
        None => {
            let ranked: Vec<(usize, GaussianParams)> = edge_plots
                .iter()
                .enumerate()
                .map(|(e, tp)| {
                    (e, GaussianParams::new(tp.mean(), tp.variance().sqrt(), tplot::stats::ParamMethod::Empirical))
                })
                .collect();
            two_most_loaded(&ranked)?
        }
    };
    let dummy = dummy_edge(&net, &routing, pair.0, pair.1)?;
    let dummy_plot = plot_of(dummy.target());
    let gc_plot = plot_of(PlotTarget::Global);
    let hi = gc_plot.worst_observed();
    let prov = Provenance::new(
        Some(cfg.seed),
        &format!(
            "bounds tset={} m={} pair={}+{}",
            args.tset,
            args.samples,
            net.edges()[pair.0].id,
            net.edges()[pair.1].id
        ),
    );
    let mut w = args.output.writer()?;
    for line in prov.comment_lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "level,independence_approx,upper_bound,lower_tail_bound,empirical_cdf")?;
    for i in 0..args.grid_points {
        let level = hi * (i as f64 + 0.5) / args.grid_points as f64;
        let b = global_cdf_bounds(&edge_plots, &dummy_plot, level)?;
        writeln!(
            w,
            "{},{},{},{},{}",
            level,
            b.independence_approx,
            b.upper_bound,
            b.lower_tail_bound,
            gc_plot.cdf_at(level)
        )?;
    }
    Ok(())
}

fn capalloc_cmd(args: CapallocArgs) -> Result<()> {
    let (net, routing) = args.net.load()?;
    let tset = tset_spec(&args.tset, &net)?;
    let store = MomentStore::from_env();
    prepare_moments(&store, &tset, args.moment_seed, args.moment_samples)?;
    let params: Vec<GaussianParams> = (0..net.edges().len())
        .map(|e| gaussian_params(&net, &routing, e, &tset, &store))
        .collect::<Result<_>>()?;
    let alloc = match args.method {
        AllocMethod::MuKSigma => mu_k_sigma_allocation(&params, args.budget)?,
        AllocMethod::Lagrangian => lagrangian_allocation(&params, args.budget)?,
    };
    let mut w = args.output.writer()?;
    let prov = Provenance::new(
        None,
        &format!("capalloc tset={} budget={}", args.tset, args.budget),
    );
    for line in prov.comment_lines() {
        writeln!(w, "{line}")?;
    }
    if let Some(k) = alloc.k {
        writeln!(w, "# k: {k}")?;
    }
    writeln!(w, "edge,mu,sigma,capacity")?;
    for (e, (p, c)) in params.iter().zip(&alloc.capacities).enumerate() {
        writeln!(w, "{},{},{},{}", net.edges()[e].id, p.mu, p.sigma, c)?;
    }
    Ok(())
}

fn envelope(args: EnvelopeArgs) -> Result<()> {
    let (net, routing) = args.net.load()?;
    let tset = tset_spec(&args.tset, &net)?;
    let cfg = SamplerConfig::with_seed(args.seed);
    let samples: Vec<TrafficMatrix> = sample_stream(&tset, &cfg, args.samples)?.collect();
    let mut opts = EnvelopeOptions {
        iterations: args.iterations,
        seed: args.seed,
        ..EnvelopeOptions::default()
    };
    if args.grid_points > 0 {
        // probe the automatic range cheaply, then trim to the requested size
        let probe = optimize_envelope(
            &net,
            &routing,
            &samples,
            args.budget,
            &EnvelopeOptions { iterations: 0, seed: args.seed, ..EnvelopeOptions::default() },
        )?;
        let lo = probe.points.first().unwrap().level;
        let hi = probe.points.last().unwrap().level;
        let g = args.grid_points.max(2);
        opts.l_grid = (0..g).map(|i| lo + (hi - lo) * i as f64 / (g - 1) as f64).collect();
    }
    let report = optimize_envelope(&net, &routing, &samples, args.budget, &opts)?;
    let prov = Provenance::new(
        Some(args.seed),
        &format!(
            "optimize-envelope tset={} budget={} m={} iters={} grid={}",
            args.tset, args.budget, args.samples, args.iterations, args.grid_points
        ),
    );
    let mut w = args.output.writer()?;
    for line in prov.comment_lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "level,envelope_fraction,homogeneous_fraction,mu_k_sigma_fraction,start_gap")?;
    for p in &report.points {
        writeln!(
            w,
            "{},{},{},{},{}",
            p.level,
            p.envelope_fraction,
            p.homogeneous_fraction,
            p.mu_k_sigma_fraction,
            p.start_gap
        )?;
    }
    Ok(())
}

fn sample(args: SampleArgs) -> Result<()> {
    let kind: TSetKind = args.tset.parse()?;
    let spec = if kind.is_heterogeneous() {
        let net = match (&args.network, &args.fixture) {
            (Some(path), None) => io::read_network(path)?,
            (None, Some(name)) => tplot::fixtures::load_fixture(name)?,
            _ => {
                return Err(Error::InvalidArgument(
                    "H kinds take rates from --network or --fixture".into(),
                ))
            }
        };
        TSetSpec::for_network(kind, &net)?
    } else {
        let n = args
            .n
            .ok_or_else(|| Error::InvalidArgument("--n is required without a network".into()))?;
        TSetSpec::homogeneous(kind, n)?
    };
    let cfg = args.sampler.config();
    let prov = Provenance::new(
        Some(cfg.seed),
        &format!("sample tset={} n={} count={}", args.tset, spec.n, args.count),
    );
    let mut w = args.output.writer()?;
    for line in prov.comment_lines() {
        writeln!(w, "{line}")?;
    }
    for d in sample_stream(&spec, &cfg, args.count)? {
        let row: Vec<String> = d.data().iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn reduce(args: ReduceArgs) -> Result<()> {
    let (net, _) = args.net.load()?;
    let edge = edge_index(&net, &args.edge)?;
    let text = std::fs::read_to_string(&args.matrix)?;
    let mut entries = Vec::new();
    let mut rows = 0usize;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        rows += 1;
        for cell in line.split(',') {
            entries.push(cell.trim().parse::<u8>().map_err(|_| {
                Error::InvalidArgument(format!("matrix entries must be 0/1, got `{cell}`"))
            })?);
        }
    }
    if rows * rows != entries.len() {
        return Err(Error::InvalidArgument(format!(
            "matrix must be square; read {rows} rows and {} entries",
            entries.len()
        )));
    }
    if rows != net.n() {
        return Err(Error::InvalidArgument(format!(
            "matrix is {rows}x{rows} but the network has {} nodes",
            net.n()
        )));
    }
    let a = ZeroOneMatrix::from_entries(rows, entries)?;
    let check = verify_reduction(&net, edge, &a)?;
    println!("permanent          = {}", check.permanent);
    println!("n! * pdf_mass_at_L = {}", check.scaled_pdf_mass);
    println!("load level L       = {}", check.load_level);
    println!("equal              = {}", check.equal);
    Ok(())
}

fn diagnostics(args: DiagnosticsArgs) -> Result<()> {
    let (net, routing) = args.net.load()?;
    let tset = tset_spec(&args.tset, &net)?;
    let edge = edge_index(&net, &args.edge)?;
    let (lo, hi) = args
        .bin
        .split_once(',')
        .ok_or_else(|| Error::InvalidArgument("--bin wants `lo,hi`".into()))?;
    let bin = (
        lo.trim().parse::<f64>().map_err(|e| Error::InvalidArgument(e.to_string()))?,
        hi.trim().parse::<f64>().map_err(|e| Error::InvalidArgument(e.to_string()))?,
    );
    let m_grid: Vec<usize> = args
        .m_grid
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|e| Error::InvalidArgument(e.to_string())))
        .collect::<Result<_>>()?;
    let opts = ConvergenceOptions { m_grid, runs: args.runs, starts: None };
    let report = convergence_diagnostics(
        &tset,
        &args.sampler.config(),
        |d| target_load(&net, &routing, PlotTarget::Edge(edge), d),
        bin,
        &opts,
    )?;
    let prov = Provenance::new(
        Some(args.sampler.seed),
        &format!(
            "diagnostics tset={} edge={} bin={:?} runs={}",
            args.tset, args.edge, bin, args.runs
        ),
    );
    let mut w = args.output.writer()?;
    for line in prov.comment_lines() {
        writeln!(w, "{line}")?;
    }
    writeln!(w, "m,mean_estimate,variance,binomial_reference")?;
    for p in &report.points {
        writeln!(w, "{},{},{},{}", p.m, p.mean_estimate, p.variance, p.binomial_reference)?;
    }
    writeln!(w, "# two_start_sup_distance: {}", report.two_start_sup_distance)?;
    Ok(())
}

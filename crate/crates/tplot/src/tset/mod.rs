//! Traffic-matrix sets: membership, uniform samplers, and convergence
//! diagnostics.
//!
//! Discrete kinds (permutations, derangements) are sampled directly. The
//! continuous kinds use Markov-chain samplers: a Gaussian ball walk with
//! membership rejection for the polytope kinds, and sum-preserving pair /
//! hexagon moves for the surface kinds.

pub mod moments;

use crate::error::{Error, Result};
use crate::matrix::TrafficMatrix;
use crate::net::Network;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Sum tolerance for membership tests on continuous T-Sets.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TSetKind {
    /// P: 0-1 matrices with one 1 per row and column.
    Permutations,
    /// P_d: permutations without fixed points.
    Derangements,
    /// S: row and column sums exactly 1.
    DoublyStochastic,
    /// S_d: doubly stochastic with zero diagonal.
    DoublyStochasticZeroDiag,
    /// A: row and column sums at most 1 (doubly substochastic).
    Admissible,
    /// A_d: admissible with zero diagonal.
    AdmissibleZeroDiag,
    /// H: row sums at most r_i, column sums at most q_j.
    Heterogeneous,
    /// Surface of H: row sums exactly r_i, column sums exactly q_j.
    HeterogeneousSurface,
}

impl TSetKind {
    pub fn zero_diagonal(self) -> bool {
        matches!(self, TSetKind::Derangements | TSetKind::DoublyStochasticZeroDiag | TSetKind::AdmissibleZeroDiag)
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, TSetKind::Permutations | TSetKind::Derangements)
    }

    pub fn is_heterogeneous(self) -> bool {
        matches!(self, TSetKind::Heterogeneous | TSetKind::HeterogeneousSurface)
    }

    pub fn label(self) -> &'static str {
        match self {
            TSetKind::Permutations => "P",
            TSetKind::Derangements => "Pd",
            TSetKind::DoublyStochastic => "S",
            TSetKind::DoublyStochasticZeroDiag => "Sd",
            TSetKind::Admissible => "A",
            TSetKind::AdmissibleZeroDiag => "Ad",
            TSetKind::Heterogeneous => "H",
            TSetKind::HeterogeneousSurface => "Hs",
        }
    }
}

impl std::fmt::Display for TSetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for TSetKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "").as_str() {
            "p" => Ok(TSetKind::Permutations),
            "pd" => Ok(TSetKind::Derangements),
            "s" => Ok(TSetKind::DoublyStochastic),
            "sd" => Ok(TSetKind::DoublyStochasticZeroDiag),
            "a" => Ok(TSetKind::Admissible),
            "ad" => Ok(TSetKind::AdmissibleZeroDiag),
            "h" => Ok(TSetKind::Heterogeneous),
            "hs" | "hsurface" => Ok(TSetKind::HeterogeneousSurface),
            other => Err(Error::InvalidArgument(format!(
                "unknown T-Set `{other}`; expected one of P, Pd, S, Sd, A, Ad, H, Hs"
            ))),
        }
    }
}

/// A concrete T-Set: kind, dimension, and (for heterogeneous kinds) the
/// per-node rate vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TSetSpec {
    pub kind: TSetKind,
    pub n: usize,
    pub ingress: Option<Vec<f64>>,
    pub egress: Option<Vec<f64>>,
}

impl TSetSpec {
    pub fn homogeneous(kind: TSetKind, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("T-Set dimension must be at least 2".into()));
        }
        if kind.is_heterogeneous() {
            return Err(Error::InvalidArgument(
                "heterogeneous T-Sets need rate vectors; use `heterogeneous`".into(),
            ));
        }
        Ok(TSetSpec { kind, n, ingress: None, egress: None })
    }

    pub fn heterogeneous(kind: TSetKind, ingress: Vec<f64>, egress: Vec<f64>) -> Result<Self> {
        let n = ingress.len();
        if n < 2 || egress.len() != n {
            return Err(Error::InvalidArgument("rate vectors must share length >= 2".into()));
        }
        if !kind.is_heterogeneous() {
            return Err(Error::InvalidArgument("rate vectors only apply to H kinds".into()));
        }
        if ingress.iter().chain(egress.iter()).any(|&r| r.is_nan() || r <= 0.0) {
            return Err(Error::InvalidArgument("all rates must be strictly positive".into()));
        }
        Ok(TSetSpec { kind, n, ingress: Some(ingress), egress: Some(egress) })
    }

    /// Spec for `kind` sized to `net`, taking rates from the network for H kinds.
    pub fn for_network(kind: TSetKind, net: &Network) -> Result<Self> {
        if kind.is_heterogeneous() {
            Self::heterogeneous(kind, net.ingress_rates(), net.egress_rates())
        } else {
            Self::homogeneous(kind, net.n())
        }
    }

    fn row_limit(&self, i: usize) -> f64 {
        self.ingress.as_ref().map(|r| r[i]).unwrap_or(1.0)
    }

    fn col_limit(&self, j: usize) -> f64 {
        self.egress.as_ref().map(|q| q[j]).unwrap_or(1.0)
    }

    /// Membership test: exact 0/1 structure for the permutation kinds,
    /// tolerance [`MEMBERSHIP_TOL`] on the sum constraints otherwise.
    pub fn contains(&self, d: &TrafficMatrix) -> bool {
        let n = self.n;
        if d.n() != n {
            return false;
        }
        if self.kind.zero_diagonal() && (0..n).any(|i| d.get(i, i) != 0.0) {
            return false;
        }
        match self.kind {
            TSetKind::Permutations | TSetKind::Derangements => {
                if d.data().iter().any(|&x| x != 0.0 && x != 1.0) {
                    return false;
                }
                (0..n).all(|i| d.row_sum(i) == 1.0 && d.col_sum(i) == 1.0)
            }
            TSetKind::DoublyStochastic | TSetKind::DoublyStochasticZeroDiag => {
                d.data().iter().all(|&x| x >= 0.0)
                    && (0..n).all(|i| {
                        (d.row_sum(i) - 1.0).abs() <= MEMBERSHIP_TOL
                            && (d.col_sum(i) - 1.0).abs() <= MEMBERSHIP_TOL
                    })
            }
            TSetKind::Admissible | TSetKind::AdmissibleZeroDiag => {
                d.data().iter().all(|&x| (0.0..=1.0 + MEMBERSHIP_TOL).contains(&x))
                    && (0..n).all(|i| {
                        d.row_sum(i) <= 1.0 + MEMBERSHIP_TOL && d.col_sum(i) <= 1.0 + MEMBERSHIP_TOL
                    })
            }
            TSetKind::Heterogeneous => {
                d.data().iter().all(|&x| x >= 0.0)
                    && (0..n).all(|i| {
                        d.row_sum(i) <= self.row_limit(i) + MEMBERSHIP_TOL
                            && d.col_sum(i) <= self.col_limit(i) + MEMBERSHIP_TOL
                    })
            }
            TSetKind::HeterogeneousSurface => {
                d.data().iter().all(|&x| x >= 0.0)
                    && (0..n).all(|i| {
                        (d.row_sum(i) - self.row_limit(i)).abs() <= MEMBERSHIP_TOL
                            && (d.col_sum(i) - self.col_limit(i)).abs() <= MEMBERSHIP_TOL
                    })
            }
        }
    }

    /// Canonical starting matrix for the walk samplers.
    pub fn default_start(&self) -> Result<TrafficMatrix> {
        let n = self.n;
        match self.kind {
            TSetKind::Permutations => Ok(TrafficMatrix::permutation(&(0..n).collect::<Vec<_>>())),
            TSetKind::Derangements => {
                let perm: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
                Ok(TrafficMatrix::permutation(&perm))
            }
            TSetKind::Admissible | TSetKind::AdmissibleZeroDiag | TSetKind::Heterogeneous => {
                Ok(TrafficMatrix::zeros(n))
            }
            TSetKind::DoublyStochastic => Ok(TrafficMatrix::uniform(n, 1.0 / n as f64)),
            TSetKind::DoublyStochasticZeroDiag => {
                let mut m = TrafficMatrix::uniform(n, 1.0 / (n - 1) as f64);
                for i in 0..n {
                    m.set(i, i, 0.0);
                }
                Ok(m)
            }
            TSetKind::HeterogeneousSurface => {
                let r = self.ingress.as_ref().unwrap();
                let q = self.egress.as_ref().unwrap();
                let total_r: f64 = r.iter().sum();
                let total_q: f64 = q.iter().sum();
                if (total_r - total_q).abs() > MEMBERSHIP_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "surface T-Set is empty: total ingress {total_r} != total egress {total_q}"
                    )));
                }
                let mut m = TrafficMatrix::zeros(n);
                for (i, &ri) in r.iter().enumerate() {
                    for (j, &qj) in q.iter().enumerate() {
                        m.set(i, j, ri * qj / total_q);
                    }
                }
                Ok(m)
            }
        }
    }
}

/// Random-walk sampler configuration. `None` fields take the defaults
/// burn_in = 10 n^2, thinning = n^2 (the walks move one entry, or one sparse
/// pattern, per step, so n^2 steps amount to one sweep of the matrix), and
/// step_scale = sqrt(1/(2n)) (the per-entry standard deviation of the
/// Gaussian walk increments).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub burn_in: Option<usize>,
    pub thinning: Option<usize>,
    pub step_scale: Option<f64>,
}

impl SamplerConfig {
    pub fn with_seed(seed: u64) -> Self {
        SamplerConfig { seed, burn_in: None, thinning: None, step_scale: None }
    }

    fn resolve(&self, n: usize) -> Result<(usize, usize, f64)> {
        let burn_in = self.burn_in.unwrap_or(10 * n * n);
        let thinning = self.thinning.unwrap_or(n * n);
        let step = self.step_scale.unwrap_or_else(|| (1.0 / (2.0 * n as f64)).sqrt());
        if thinning < 1 {
            return Err(Error::InvalidArgument("thinning must be at least 1".into()));
        }
        if step.is_nan() || step <= 0.0 {
            return Err(Error::InvalidArgument("step_scale must be positive".into()));
        }
        Ok((burn_in, thinning, step))
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self::with_seed(0)
    }
}

/// Deterministic per-chain seed derivation: the SplitMix64 finalizer applied
/// to `master + (index + 1) * golden_gamma`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform random permutation matrix; with `zero_diagonal`, uniform over
/// derangements by rejection.
pub fn sample_permutation(rng: &mut impl Rng, n: usize, zero_diagonal: bool) -> TrafficMatrix {
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        perm.shuffle(rng);
        if !zero_diagonal || perm.iter().enumerate().all(|(i, &j)| i != j) {
            return TrafficMatrix::permutation(&perm);
        }
    }
}

/// One walk move. Returns the next matrix: the proposal when it stays inside
/// the T-Set, the unchanged input otherwise.
pub fn walk_step(
    spec: &TSetSpec,
    rng: &mut impl Rng,
    d: &TrafficMatrix,
    cfg: &SamplerConfig,
) -> Result<TrafficMatrix> {
    if spec.kind.is_discrete() {
        return Err(Error::UnsupportedMode("walk_step applies to continuous T-Sets only".into()));
    }
    let (_, _, step) = cfg.resolve(spec.n)?;
    let mut next = d.clone();
    step_in_place(spec, rng, &mut next, step);
    Ok(next)
}

fn step_in_place(spec: &TSetSpec, rng: &mut impl Rng, d: &mut TrafficMatrix, step: f64) -> bool {
    match spec.kind {
        TSetKind::Admissible | TSetKind::AdmissibleZeroDiag | TSetKind::Heterogeneous => {
            ball_step(spec, rng, d, step)
        }
        TSetKind::DoublyStochastic => pair_step(spec, rng, d, step),
        TSetKind::DoublyStochasticZeroDiag | TSetKind::HeterogeneousSurface => {
            // pair moves alone do not connect the zero-diagonal surface at
            // small n, so alternate with hexagon moves
            if rng.random::<bool>() {
                pair_step(spec, rng, d, step)
            } else {
                hexagon_step(spec, rng, d, step)
            }
        }
        TSetKind::Permutations | TSetKind::Derangements => unreachable!(),
    }
}

/// Gaussian ball walk on the polytope kinds: a u.a.r. entry (i, j) receives a
/// Gaussian increment and the move is accepted iff the result stays in the
/// T-Set. The change matrix is zero elsewhere, mirroring the sparse moves of
/// the sum-preserving walks; perturbing every entry at once is rejected with
/// overwhelming probability already at moderate n. For heterogeneous kinds
/// the step in row i is scaled by r_i.
fn ball_step(spec: &TSetSpec, rng: &mut impl Rng, d: &mut TrafficMatrix, step: f64) -> bool {
    let n = spec.n;
    let i = rng.random_range(0..n);
    let j = rng.random_range(0..n);
    if spec.kind.zero_diagonal() && i == j {
        return false;
    }
    let row_scale = if spec.kind.is_heterogeneous() { spec.row_limit(i) } else { 1.0 };
    let delta: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal) * step * row_scale;
    let new_val = d.get(i, j) + delta;
    if new_val < 0.0 {
        return false;
    }
    let (row_cap, col_cap) = match spec.kind {
        TSetKind::Heterogeneous => (spec.row_limit(i), spec.col_limit(j)),
        _ => (1.0, 1.0),
    };
    if d.row_sum(i) + delta > row_cap || d.col_sum(j) + delta > col_cap {
        return false;
    }
    d.set(i, j, new_val);
    true
}

/// Sum-preserving pair move: four u.a.r. indices (i1, j1, i2, j2) and a
/// Gaussian delta applied as +delta on (i1,j2),(i2,j1) and -delta on
/// (i1,j1),(i2,j2). Degenerate index draws leave the matrix unchanged.
fn pair_step(spec: &TSetSpec, rng: &mut impl Rng, d: &mut TrafficMatrix, step: f64) -> bool {
    let n = spec.n;
    let i1 = rng.random_range(0..n);
    let j1 = rng.random_range(0..n);
    let i2 = rng.random_range(0..n);
    let j2 = rng.random_range(0..n);
    if i1 == i2 || j1 == j2 {
        return false;
    }
    if spec.kind.zero_diagonal() {
        let cells = [(i1, j1), (i1, j2), (i2, j1), (i2, j2)];
        if cells.iter().any(|&(i, j)| i == j) {
            return false;
        }
    }
    let delta: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal) * step;
    let new_11 = d.get(i1, j1) - delta;
    let new_22 = d.get(i2, j2) - delta;
    let new_12 = d.get(i1, j2) + delta;
    let new_21 = d.get(i2, j1) + delta;
    if new_11 < 0.0 || new_22 < 0.0 || new_12 < 0.0 || new_21 < 0.0 {
        return false;
    }
    d.set(i1, j1, new_11);
    d.set(i2, j2, new_22);
    d.set(i1, j2, new_12);
    d.set(i2, j1, new_21);
    true
}

/// Sum-preserving hexagon move on three rows and three columns; needed to
/// connect the zero-diagonal surfaces where legal pair moves can be scarce.
fn hexagon_step(spec: &TSetSpec, rng: &mut impl Rng, d: &mut TrafficMatrix, step: f64) -> bool {
    let n = spec.n;
    if n < 3 {
        return false;
    }
    let mut rows = [0usize; 3];
    let mut cols = [0usize; 3];
    for slot in 0..3 {
        rows[slot] = rng.random_range(0..n);
        cols[slot] = rng.random_range(0..n);
    }
    if rows[0] == rows[1] || rows[0] == rows[2] || rows[1] == rows[2] {
        return false;
    }
    if cols[0] == cols[1] || cols[0] == cols[2] || cols[1] == cols[2] {
        return false;
    }
    let plus = [(rows[0], cols[0]), (rows[1], cols[1]), (rows[2], cols[2])];
    let minus = [(rows[0], cols[1]), (rows[1], cols[2]), (rows[2], cols[0])];
    if spec.kind.zero_diagonal()
        && plus.iter().chain(minus.iter()).any(|&(i, j)| i == j)
    {
        return false;
    }
    let delta: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal) * step;
    for &(i, j) in &minus {
        if d.get(i, j) - delta < 0.0 {
            return false;
        }
    }
    for &(i, j) in &plus {
        if d.get(i, j) + delta < 0.0 {
            return false;
        }
    }
    for &(i, j) in &plus {
        d.add(i, j, delta);
    }
    for &(i, j) in &minus {
        d.add(i, j, -delta);
    }
    true
}

/// Deterministic stream of `m` samples from a T-Set.
///
/// Permutation kinds draw i.i.d.; walk kinds discard `burn_in` steps up
/// front and take every `thinning`-th iterate afterwards.
pub struct SampleStream {
    spec: TSetSpec,
    rng: ChaCha12Rng,
    current: Option<TrafficMatrix>,
    thinning: usize,
    step: f64,
    remaining: usize,
}

impl SampleStream {
    pub fn new(spec: &TSetSpec, cfg: &SamplerConfig, m: usize) -> Result<Self> {
        let start =
            if spec.kind.is_discrete() { None } else { Some(spec.default_start()?) };
        Self::build(spec, cfg, m, start)
    }

    /// Walk stream from an explicit starting matrix (diagnostics).
    pub fn with_initial(
        spec: &TSetSpec,
        cfg: &SamplerConfig,
        m: usize,
        initial: TrafficMatrix,
    ) -> Result<Self> {
        if spec.kind.is_discrete() {
            return Err(Error::UnsupportedMode(
                "initial matrices apply to walk samplers only".into(),
            ));
        }
        if !spec.contains(&initial) {
            return Err(Error::InvalidArgument("initial matrix is outside the T-Set".into()));
        }
        Self::build(spec, cfg, m, Some(initial))
    }

    fn build(
        spec: &TSetSpec,
        cfg: &SamplerConfig,
        m: usize,
        start: Option<TrafficMatrix>,
    ) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidArgument("sample count must be at least 1".into()));
        }
        let (burn_in, thinning, step) = cfg.resolve(spec.n)?;
        let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
        let mut current = start;
        if let Some(d) = current.as_mut() {
            for _ in 0..burn_in {
                step_in_place(spec, &mut rng, d, step);
            }
        }
        Ok(SampleStream { spec: spec.clone(), rng, current, thinning, step, remaining: m })
    }
}

impl Iterator for SampleStream {
    type Item = TrafficMatrix;

    fn next(&mut self) -> Option<TrafficMatrix> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        match self.current.as_mut() {
            None => Some(sample_permutation(
                &mut self.rng,
                self.spec.n,
                self.spec.kind.zero_diagonal(),
            )),
            Some(d) => {
                for _ in 0..self.thinning {
                    step_in_place(&self.spec, &mut self.rng, d, self.step);
                }
                Some(d.clone())
            }
        }
    }
}

pub fn sample_stream(spec: &TSetSpec, cfg: &SamplerConfig, m: usize) -> Result<SampleStream> {
    SampleStream::new(spec, cfg, m)
}

/// One point of the variance-vs-m curve.
#[derive(Debug, Clone, Serialize)]
pub struct VariancePoint {
    pub m: usize,
    pub mean_estimate: f64,
    /// Variance of the bin-frequency estimator across the repeated runs.
    pub variance: f64,
    /// The i.i.d. reference p(1-p)/m at the pooled estimate of p.
    pub binomial_reference: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub points: Vec<VariancePoint>,
    /// Sup distance between the statistic's empirical CDFs from two chains
    /// started at different matrices.
    pub two_start_sup_distance: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceOptions {
    pub m_grid: Vec<usize>,
    pub runs: usize,
    /// Override the two starting matrices; defaults are kind-specific.
    pub starts: Option<(TrafficMatrix, TrafficMatrix)>,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions { m_grid: vec![100, 1_000, 10_000, 100_000], runs: 50, starts: None }
    }
}

/// Sampler convergence diagnostics for walk T-Sets: the across-run variance
/// of a bin indicator frequency at several sample counts, and the two-start
/// CDF sup-distance of the scalar statistic.
pub fn convergence_diagnostics(
    spec: &TSetSpec,
    cfg: &SamplerConfig,
    statistic: impl Fn(&TrafficMatrix) -> f64,
    bin: (f64, f64),
    opts: &ConvergenceOptions,
) -> Result<DiagnosticsReport> {
    if spec.kind.is_discrete() {
        return Err(Error::UnsupportedMode(
            "convergence diagnostics apply to walk samplers".into(),
        ));
    }
    if opts.m_grid.is_empty() || opts.runs < 2 {
        return Err(Error::InvalidArgument("need a nonempty m grid and at least 2 runs".into()));
    }
    let mut grid = opts.m_grid.clone();
    grid.sort_unstable();
    let m_max = *grid.last().unwrap();

    // repeated runs for the variance curve
    let mut freqs = vec![Vec::with_capacity(opts.runs); grid.len()];
    for run in 0..opts.runs {
        let chain_cfg = SamplerConfig { seed: derive_seed(cfg.seed, run as u64), ..cfg.clone() };
        let mut hits = 0usize;
        let mut seen = 0usize;
        let mut grid_pos = 0usize;
        for d in SampleStream::new(spec, &chain_cfg, m_max)? {
            let x = statistic(&d);
            if x >= bin.0 && x < bin.1 {
                hits += 1;
            }
            seen += 1;
            while grid_pos < grid.len() && seen == grid[grid_pos] {
                freqs[grid_pos].push(hits as f64 / seen as f64);
                grid_pos += 1;
            }
        }
    }
    let pooled_p = mean(&freqs[grid.len() - 1]);
    let points = grid
        .iter()
        .zip(freqs.iter())
        .map(|(&m, f)| VariancePoint {
            m,
            mean_estimate: mean(f),
            variance: population_variance(f),
            binomial_reference: pooled_p * (1.0 - pooled_p) / m as f64,
        })
        .collect();

    // two-start comparison
    let (start_a, start_b) = match &opts.starts {
        Some((a, b)) => (a.clone(), b.clone()),
        None => default_start_pair(spec)?,
    };
    let cfg_a = SamplerConfig { seed: derive_seed(cfg.seed, opts.runs as u64), ..cfg.clone() };
    let cfg_b =
        SamplerConfig { seed: derive_seed(cfg.seed, opts.runs as u64 + 1), ..cfg.clone() };
    let xs: Vec<f64> = SampleStream::with_initial(spec, &cfg_a, m_max, start_a)?
        .map(|d| statistic(&d))
        .collect();
    let ys: Vec<f64> = SampleStream::with_initial(spec, &cfg_b, m_max, start_b)?
        .map(|d| statistic(&d))
        .collect();
    let two_start_sup_distance = ecdf_sup_distance(xs, ys);

    Ok(DiagnosticsReport { points, two_start_sup_distance })
}

fn default_start_pair(spec: &TSetSpec) -> Result<(TrafficMatrix, TrafficMatrix)> {
    let n = spec.n;
    let a = spec.default_start()?;
    let b = match spec.kind {
        TSetKind::Admissible | TSetKind::DoublyStochastic => {
            TrafficMatrix::permutation(&(0..n).collect::<Vec<_>>())
        }
        TSetKind::AdmissibleZeroDiag | TSetKind::DoublyStochasticZeroDiag => {
            TrafficMatrix::permutation(&(0..n).map(|i| (i + 1) % n).collect::<Vec<_>>())
        }
        _ => {
            // walk the canonical start away with a fixed auxiliary seed
            let mut d = a.clone();
            let mut rng = ChaCha12Rng::seed_from_u64(0x5eed_0002);
            let step = (1.0 / (2.0 * n as f64)).sqrt();
            for _ in 0..50 * n {
                step_in_place(spec, &mut rng, &mut d, step);
            }
            d
        }
    };
    Ok((a, b))
}

/// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
fn ecdf_sup_distance(mut xs: Vec<f64>, mut ys: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (nx, ny) = (xs.len() as f64, ys.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut sup = 0.0f64;
    while i < xs.len() && j < ys.len() {
        if xs[i] <= ys[j] {
            i += 1;
        } else {
            j += 1;
        }
        sup = sup.max((i as f64 / nx - j as f64 / ny).abs());
    }
    sup
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_variance(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / xs.len() as f64
}

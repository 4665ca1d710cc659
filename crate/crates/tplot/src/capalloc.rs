//! Capacity allocation: the mu + k*sigma scheme, the Lagrangian solution for
//! unequal sigmas, saturation probability under the independent-Gaussian
//! model, and the local-search optimization envelope.

use crate::error::{Error, Result};
use crate::gauss::{pdf_over_cdf, std_normal_cdf};
use crate::matrix::TrafficMatrix;
use crate::net::{edge_flow, Network, Routing};
use crate::stats::{empirical_params, GaussianParams};
use crate::tset::derive_seed;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

/// Budget conservation tolerance.
pub const BUDGET_TOL: f64 = 1e-9;
/// Smallest capacity the optimizer will assign to an edge.
pub const CAPACITY_FLOOR: f64 = 1e-6;

/// A per-edge capacity vector summing to `budget`.
#[derive(Debug, Clone)]
pub struct CapacityAllocation {
    pub capacities: Vec<f64>,
    /// The common multiplier when built by the mu + k*sigma scheme.
    pub k: Option<f64>,
    pub budget: f64,
}

impl CapacityAllocation {
    fn check(self, edge_ids: impl Fn(usize) -> String) -> Result<Self> {
        let bad: Vec<String> = self
            .capacities
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c <= 0.0)
            .map(|(e, _)| edge_ids(e))
            .collect();
        if !bad.is_empty() {
            return Err(Error::DegenerateBudget(bad));
        }
        debug_assert!((self.capacities.iter().sum::<f64>() - self.budget).abs() <= BUDGET_TOL);
        Ok(self)
    }
}

/// c(i) = mu_i + k * sigma_i with k = (C - sum mu) / (sum sigma); k may be
/// negative when the budget sits below the total mean load.
pub fn mu_k_sigma_allocation(params: &[GaussianParams], budget: f64) -> Result<CapacityAllocation> {
    let sum_mu: f64 = params.iter().map(|p| p.mu).sum();
    let sum_sigma: f64 = params.iter().map(|p| p.sigma).sum();
    if sum_sigma <= 0.0 {
        return Err(Error::InvalidArgument("mu + k sigma needs a positive total sigma".into()));
    }
    let k = (budget - sum_mu) / sum_sigma;
    let capacities: Vec<f64> = params.iter().map(|p| p.mu + k * p.sigma).collect();
    CapacityAllocation { capacities, k: Some(k), budget }.check(|e| format!("#{e}"))
}

/// Recover k from an allocation built by the mu + k*sigma scheme.
pub fn recover_k(alloc: &CapacityAllocation, params: &[GaussianParams]) -> f64 {
    let sum_mu: f64 = params.iter().map(|p| p.mu).sum();
    let sum_sigma: f64 = params.iter().map(|p| p.sigma).sum();
    (alloc.capacities.iter().sum::<f64>() - sum_mu) / sum_sigma
}

/// Maximize the product of per-edge non-saturation probabilities
/// prod_i H((C_i - mu_i)/sigma_i) subject to sum C_i = C.
///
/// The stationarity condition equalizes h(z_i)/(sigma_i H(z_i)) across edges;
/// each inner inverse is a bisection on the strictly decreasing ratio, and an
/// outer bisection on the multiplier meets the budget. With equal sigmas the
/// result coincides with the mu + k*sigma allocation.
pub fn lagrangian_allocation(params: &[GaussianParams], budget: f64) -> Result<CapacityAllocation> {
    if params.iter().any(|p| p.sigma <= 0.0) {
        return Err(Error::InvalidArgument("Lagrangian allocation needs all sigma > 0".into()));
    }
    const Z_RANGE: f64 = 60.0;
    let z_for = |lambda: f64, sigma: f64| -> f64 {
        // solve h(z)/H(z) = lambda * sigma on [-Z_RANGE, Z_RANGE]
        let target = lambda * sigma;
        if pdf_over_cdf(-Z_RANGE) <= target {
            return -Z_RANGE;
        }
        if pdf_over_cdf(Z_RANGE) >= target {
            return Z_RANGE;
        }
        let (mut lo, mut hi) = (-Z_RANGE, Z_RANGE);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if pdf_over_cdf(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let total = |lambda: f64| -> f64 {
        params.iter().map(|p| p.mu + p.sigma * z_for(lambda, p.sigma)).sum()
    };
    // bracket the multiplier: capacity total is decreasing in lambda
    let mut lam_lo = 1e-300; // huge capacities
    let mut lam_hi = 1e300; // tiny capacities
    if !(total(lam_hi) <= budget && budget <= total(lam_lo)) {
        return Err(Error::NoConvergence(format!(
            "budget {budget} outside achievable range [{}, {}]",
            total(lam_hi),
            total(lam_lo)
        )));
    }
    let mut resolved = false;
    for _ in 0..10_000 {
        let mid = (lam_lo * lam_hi).sqrt(); // geometric bisection over magnitudes
        if total(mid) > budget {
            lam_lo = mid;
        } else {
            lam_hi = mid;
        }
        if (total(lam_lo) - budget).abs() <= BUDGET_TOL {
            lam_hi = lam_lo;
            resolved = true;
            break;
        }
        if (total(lam_hi) - budget).abs() <= BUDGET_TOL {
            lam_lo = lam_hi;
            resolved = true;
            break;
        }
    }
    if !resolved {
        let residual = (total(lam_lo) - budget).abs().min((total(lam_hi) - budget).abs());
        if residual > BUDGET_TOL {
            return Err(Error::NoConvergence(format!(
                "outer bisection residual {residual} after 10000 iterations"
            )));
        }
    }
    let lambda = lam_lo;
    let mut capacities: Vec<f64> =
        params.iter().map(|p| p.mu + p.sigma * z_for(lambda, p.sigma)).collect();
    // absorb the residual into the largest edge to meet the budget exactly
    let drift = budget - capacities.iter().sum::<f64>();
    let top = (0..capacities.len())
        .max_by(|&a, &b| capacities[a].total_cmp(&capacities[b]))
        .unwrap();
    capacities[top] += drift;
    CapacityAllocation { capacities, k: None, budget }.check(|e| format!("#{e}"))
}

/// Model flag for [`saturation_probability`]; the caller acknowledges the
/// independence and Gaussian assumptions explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaturationModel {
    IndependentGaussian,
}

/// Probability that at least one edge is saturated under independent
/// Gaussian edge loads: 1 - prod_i H((c_i - mu_i)/sigma_i).
///
/// Degenerate sigma_i = 0 edges contribute factor 1 when c_i > mu_i and 0
/// otherwise.
pub fn saturation_probability(
    alloc: &CapacityAllocation,
    params: &[GaussianParams],
    _model: SaturationModel,
) -> f64 {
    let mut no_saturation = 1.0;
    for (c, p) in alloc.capacities.iter().zip(params) {
        let factor = if p.sigma == 0.0 {
            if *c > p.mu {
                1.0
            } else {
                0.0
            }
        } else {
            std_normal_cdf((c - p.mu) / p.sigma)
        };
        no_saturation *= factor;
    }
    1.0 - no_saturation
}

#[derive(Debug, Clone)]
pub struct EnvelopeOptions {
    /// Hill-climb proposals per load level (per start).
    pub iterations: usize,
    pub seed: u64,
    /// Load levels to optimize at; empty means an automatic 40-point grid.
    pub l_grid: Vec<f64>,
    /// Proposal standard deviation; defaults to 0.02 * C / |E|.
    pub step_sd: Option<f64>,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        EnvelopeOptions { iterations: 10_000, seed: 0, l_grid: Vec::new(), step_sd: None }
    }
}

#[derive(Debug, Clone)]
pub struct EnvelopePoint {
    pub level: f64,
    /// Best fraction of sample matrices with GC <= level over all evaluated
    /// allocations.
    pub envelope_fraction: f64,
    pub homogeneous_fraction: f64,
    pub mu_k_sigma_fraction: f64,
    pub best_allocation: Vec<f64>,
    /// |objective gap| between the two hill-climb starts (restart check).
    pub start_gap: f64,
}

#[derive(Debug, Clone)]
pub struct EnvelopeReport {
    pub points: Vec<EnvelopePoint>,
    pub budget: f64,
    pub samples: usize,
}

/// Trace the per-level envelope of achievable CDF values over
/// budget-respecting capacity allocations by accept-if-better hill climbing.
///
/// The objective at level L is the fraction of the fixed `samples` whose
/// global congestion stays at or below L; the same sample set scores every
/// candidate. Two climbs run per level (starting from the homogeneous and the
/// mu + k*sigma allocations) and every level winner is re-scored on the whole
/// grid, so the envelope dominates each individual scheme by construction.
pub fn optimize_envelope(
    net: &Network,
    routing: &Routing,
    samples: &[TrafficMatrix],
    budget: f64,
    opts: &EnvelopeOptions,
) -> Result<EnvelopeReport> {
    let edges = net.edges().len();
    if samples.is_empty() {
        return Err(Error::InvalidArgument("need a nonempty sample set".into()));
    }
    if budget <= CAPACITY_FLOOR * edges as f64 {
        return Err(Error::InvalidArgument(format!(
            "budget {budget} cannot cover the capacity floor on {edges} edges"
        )));
    }
    // flows are allocation-independent; precompute once, sample-major
    let flows: Vec<f64> = {
        let mut v = Vec::with_capacity(samples.len() * edges);
        for d in samples {
            for e in 0..edges {
                v.push(edge_flow(routing, e, d));
            }
        }
        v
    };
    let objective = |caps: &[f64], level: f64| -> f64 {
        let mut ok = 0usize;
        for s in 0..samples.len() {
            let row = &flows[s * edges..(s + 1) * edges];
            let mut fits = true;
            for e in 0..edges {
                if row[e] > level * caps[e] {
                    fits = false;
                    break;
                }
            }
            ok += usize::from(fits);
        }
        ok as f64 / samples.len() as f64
    };

    let homogeneous = vec![budget / edges as f64; edges];
    // per-edge flow statistics over the sample set give the mu+k*sigma start
    let flow_params: Vec<GaussianParams> = (0..edges)
        .map(|e| {
            let loads: Vec<f64> = (0..samples.len()).map(|s| flows[s * edges + e]).collect();
            empirical_params(&loads)
        })
        .collect();
    let mu_k_sigma = mu_k_sigma_allocation(&flow_params, budget)
        .map(|a| a.capacities)
        .unwrap_or_else(|_| homogeneous.clone());

    let l_grid = if opts.l_grid.is_empty() {
        default_grid(&flows, samples.len(), edges, budget)
    } else {
        opts.l_grid.clone()
    };
    let step_sd = opts.step_sd.unwrap_or(0.02 * budget / edges as f64);

    struct Climb {
        caps: Vec<f64>,
        objective: f64,
    }
    let climb = |start: &[f64], level: f64, seed: u64| -> Climb {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut caps = start.to_vec();
        let mut best = objective(&caps, level);
        let mut proposal = vec![0.0; edges];
        for _ in 0..opts.iterations {
            for (p, c) in proposal.iter_mut().zip(&caps) {
                *p = c + step_sd * rng.sample::<f64, _>(rand_distr::StandardNormal);
            }
            project_to_budget(&mut proposal, budget);
            let cand = objective(&proposal, level);
            if cand > best {
                best = cand;
                caps.copy_from_slice(&proposal);
            }
        }
        Climb { caps, objective: best }
    };

    let mut raw: Vec<(f64, Climb, Climb)> = Vec::with_capacity(l_grid.len());
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (li, &level) in l_grid.iter().enumerate() {
            let homogeneous = &homogeneous;
            let mu_k_sigma = &mu_k_sigma;
            let climb = &climb;
            handles.push(scope.spawn(move || {
                let a = climb(homogeneous, level, derive_seed(opts.seed, 2 * li as u64));
                let b = climb(mu_k_sigma, level, derive_seed(opts.seed, 2 * li as u64 + 1));
                (level, a, b)
            }));
        }
        for h in handles {
            raw.push(h.join().expect("optimizer thread panicked"));
        }
    });
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));

    // cross-evaluate every winner on the whole grid: the envelope is the max
    // over all evaluated allocations at each level
    let winners: Vec<Vec<f64>> = raw
        .iter()
        .map(|(_, a, b)| if a.objective >= b.objective { a.caps.clone() } else { b.caps.clone() })
        .collect();
    let points = raw
        .iter()
        .enumerate()
        .map(|(li, (level, a, b))| {
            let mut env = a.objective.max(b.objective).max(objective(&homogeneous, *level));
            env = env.max(objective(&mu_k_sigma, *level));
            let mut best_allocation = winners[li].clone();
            for w in &winners {
                let v = objective(w, *level);
                if v > env {
                    env = v;
                    best_allocation = w.clone();
                }
            }
            EnvelopePoint {
                level: *level,
                envelope_fraction: env,
                homogeneous_fraction: objective(&homogeneous, *level),
                mu_k_sigma_fraction: objective(&mu_k_sigma, *level),
                best_allocation,
                start_gap: (a.objective - b.objective).abs(),
            }
        })
        .collect();
    Ok(EnvelopeReport { points, budget, samples: samples.len() })
}

/// Project onto the budget hyperplane and clip at the capacity floor,
/// redistributing any clipped mass over the free coordinates.
fn project_to_budget(caps: &mut [f64], budget: f64) {
    let n = caps.len() as f64;
    let shift = (budget - caps.iter().sum::<f64>()) / n;
    for c in caps.iter_mut() {
        *c += shift;
    }
    for _ in 0..100 {
        for c in caps.iter_mut() {
            if *c < CAPACITY_FLOOR {
                *c = CAPACITY_FLOOR;
            }
        }
        let excess = caps.iter().sum::<f64>() - budget;
        if excess.abs() <= 1e-12 {
            break;
        }
        let free: Vec<usize> =
            (0..caps.len()).filter(|&e| caps[e] - CAPACITY_FLOOR > 1e-12).collect();
        if free.is_empty() {
            break;
        }
        let per = excess / free.len() as f64;
        for e in free {
            caps[e] -= per;
        }
    }
}

/// 40 evenly spaced levels from the best achievable congestion of any single
/// sample up to the homogeneous allocation's worst case.
fn default_grid(flows: &[f64], samples: usize, edges: usize, budget: f64) -> Vec<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let homog = budget / edges as f64;
    for s in 0..samples {
        let row = &flows[s * edges..(s + 1) * edges];
        let total: f64 = row.iter().sum();
        lo = lo.min(total / budget);
        hi = hi.max(row.iter().fold(0.0f64, |m, &f| m.max(f)) / homog);
    }
    let lo = lo.min(hi);
    (0..40).map(|i| lo + (hi - lo) * i as f64 / 39.0).collect()
}

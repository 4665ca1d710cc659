//! Goodness-of-fit to a Gaussian: the Lilliefors variant of the
//! Kolmogorov-Smirnov test (mean and variance estimated from the data) and
//! normal probability plot data.
//!
//! Critical values come from a Monte Carlo calibration under the null
//! (100,000 replicates per sample size, fixed internal seed
//! [`CALIBRATION_SEED`]), cached per sample size. Sizes beyond
//! [`CALIBRATION_MAX_M`] scale the calibrated value by sqrt(m0/m).

use crate::error::{Error, Result};
use crate::gauss::{std_normal_cdf, std_normal_quantile};
use crate::tset::derive_seed;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use std::collections::HashMap;
use std::sync::Mutex;

pub const CALIBRATION_SEED: u64 = 0x4c49_4c4c_4945_464f;
pub const CALIBRATION_REPLICATES: usize = 100_000;
pub const CALIBRATION_MAX_M: usize = 5_000;

/// The significance levels the critical-value table covers.
pub const ALPHAS: [f64; 3] = [0.01, 0.05, 0.20];

#[derive(Debug, Clone, Copy)]
pub struct LillieforsOutcome {
    /// Sup distance between the empirical CDF and the fitted normal CDF.
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub reject: bool,
    /// Zero sample variance: the fit is meaningless and normality rejected.
    pub degenerate: bool,
}

/// Lilliefors test at `alpha` in {0.01, 0.05, 0.20}; needs at least 20
/// samples.
pub fn lilliefors_test(samples: &[f64], alpha: f64) -> Result<LillieforsOutcome> {
    let m = samples.len();
    if m < 20 {
        return Err(Error::InvalidArgument(format!("need at least 20 samples, got {m}")));
    }
    let slot = alpha_slot(alpha)?;
    let critical_value = lilliefors_critical(m, alpha)?;
    let (mean, sd) = sample_mean_sd(samples);
    if sd == 0.0 {
        return Ok(LillieforsOutcome {
            statistic: 1.0,
            critical_value,
            alpha: ALPHAS[slot],
            reject: true,
            degenerate: true,
        });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let statistic = ks_statistic(&sorted, mean, sd);
    Ok(LillieforsOutcome {
        statistic,
        critical_value,
        alpha: ALPHAS[slot],
        reject: statistic > critical_value,
        degenerate: false,
    })
}

/// Calibrated critical value for sample size `m` at `alpha`.
pub fn lilliefors_critical(m: usize, alpha: f64) -> Result<f64> {
    let slot = alpha_slot(alpha)?;
    if m > CALIBRATION_MAX_M {
        let base = calibrated(CALIBRATION_MAX_M)[slot];
        return Ok(base * (CALIBRATION_MAX_M as f64 / m as f64).sqrt());
    }
    Ok(calibrated(m)[slot])
}

fn alpha_slot(alpha: f64) -> Result<usize> {
    ALPHAS
        .iter()
        .position(|&a| (a - alpha).abs() < 1e-9)
        .ok_or_else(|| Error::InvalidArgument(format!("alpha {alpha} not in {ALPHAS:?}")))
}

fn calibrated(m: usize) -> [f64; 3] {
    static CACHE: Mutex<Option<HashMap<usize, [f64; 3]>>> = Mutex::new(None);
    let mut guard = CACHE.lock().unwrap();
    let cache = guard.get_or_insert_with(HashMap::new);
    if let Some(v) = cache.get(&m) {
        return *v;
    }
    let v = calibrate(m);
    cache.insert(m, v);
    v
}

/// Null distribution of the statistic by simulation: standard normal samples
/// of size m, statistic computed exactly as in the test.
fn calibrate(m: usize) -> [f64; 3] {
    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(CALIBRATION_SEED, m as u64));
    let mut stats = Vec::with_capacity(CALIBRATION_REPLICATES);
    let mut buf = vec![0.0f64; m];
    for _ in 0..CALIBRATION_REPLICATES {
        for x in buf.iter_mut() {
            *x = rng.sample(rand_distr::StandardNormal);
        }
        let (mean, sd) = sample_mean_sd(&buf);
        buf.sort_by(f64::total_cmp);
        stats.push(ks_statistic(&buf, mean, sd));
    }
    stats.sort_by(f64::total_cmp);
    let quantile = |alpha: f64| {
        let idx = ((1.0 - alpha) * CALIBRATION_REPLICATES as f64).ceil() as usize;
        stats[idx.min(CALIBRATION_REPLICATES - 1)]
    };
    [quantile(ALPHAS[0]), quantile(ALPHAS[1]), quantile(ALPHAS[2])]
}

fn sample_mean_sd(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1.0);
    (mean, var.sqrt())
}

fn ks_statistic(sorted: &[f64], mean: f64, sd: f64) -> f64 {
    let m = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let z = std_normal_cdf((x - mean) / sd);
        let hi = (i + 1) as f64 / m - z;
        let lo = z - i as f64 / m;
        d = d.max(hi).max(lo);
    }
    d
}

/// Normal probability plot data: (theoretical standard normal quantile at
/// plotting position (i - 0.5)/m, i-th order statistic).
pub fn npp_data(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    let m = samples.len();
    if m < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples for a probability plot".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, x)| (std_normal_quantile((i as f64 + 0.5) / m as f64), x))
        .collect())
}

/// Pearson correlation of the NPP point cloud; near 1 for Gaussian data.
pub fn npp_correlation(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for &(x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn npp_identity_line() {
        let m = 200;
        let samples: Vec<f64> =
            (0..m).map(|i| std_normal_quantile((i as f64 + 0.5) / m as f64)).collect();
        for (x, y) in npp_data(&samples).unwrap() {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn npp_constant_samples() {
        let samples = vec![2.5; 30];
        let pts = npp_data(&samples).unwrap();
        assert!(pts.iter().all(|&(_, y)| y == 2.5));
        assert_eq!(npp_correlation(&pts), 0.0);
    }

    #[test]
    fn npp_two_level_data_correlates_poorly() {
        let mut samples = vec![0.0; 900];
        samples.extend(vec![1.0; 100]);
        let pts = npp_data(&samples).unwrap();
        let r = npp_correlation(&pts);
        assert!(r < 0.95, "two-point data should not look normal: r = {r}");
    }

    #[test]
    fn rejects_two_point_data_at_loose_level() {
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let samples: Vec<f64> =
            (0..1000).map(|_| if rng.random::<f64>() < 0.1 { 1.0 } else { 0.0 }).collect();
        let out = lilliefors_test(&samples, 0.20).unwrap();
        assert!(out.reject, "D = {} vs critical {}", out.statistic, out.critical_value);
    }

    #[test]
    fn accepts_normal_data_at_roughly_one_minus_alpha() {
        let mut rng = ChaCha12Rng::seed_from_u64(123);
        let reps = 200;
        let m = 1000;
        let mut rejections = [0usize; 2];
        for _ in 0..reps {
            let samples: Vec<f64> = (0..m)
                .map(|_| 5.0 + 2.0 * rng.sample::<f64, _>(rand_distr::StandardNormal))
                .collect();
            for (slot, alpha) in [0.01, 0.20].iter().enumerate() {
                if lilliefors_test(&samples, *alpha).unwrap().reject {
                    rejections[slot] += 1;
                }
            }
        }
        let rate_001 = rejections[0] as f64 / reps as f64;
        let rate_020 = rejections[1] as f64 / reps as f64;
        assert!(rate_001 < 0.06, "alpha=0.01 rejected {rate_001}");
        assert!((rate_020 - 0.20).abs() < 0.11, "alpha=0.20 rejected {rate_020}");
    }

    #[test]
    fn degenerate_samples_reject_with_note() {
        let out = lilliefors_test(&vec![1.0; 50], 0.05).unwrap();
        assert!(out.reject && out.degenerate);
    }

    #[test]
    fn input_validation() {
        assert!(lilliefors_test(&[1.0; 10], 0.05).is_err());
        assert!(lilliefors_test(&[1.0; 30], 0.1).is_err());
        assert!(npp_data(&[1.0]).is_err());
    }
}

//! Lagged cross-covariance with per-lag confidence bands.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synthesis::TimeSeries;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    /// Lag of `b` relative to `a`, seconds, from `-max_lag` to `+max_lag`.
    pub lags: Vec<f64>,
    /// Biased (1/N) cross-covariance, m^2.
    pub covariance: Vec<f64>,
    /// Covariance divided by `sqrt(var_a var_b)`.
    pub normalized: Vec<f64>,
    /// Per-lag 1-sigma band on `covariance` (Bartlett).
    pub sigma: Vec<f64>,
    /// Per-lag 1-sigma band on `normalized`.
    pub sigma_normalized: Vec<f64>,
    /// `N / sum_m rho_aa(m) rho_bb(m)`.
    pub n_samples_effective: f64,
}

impl CorrelationResult {
    pub fn zero_lag_index(&self) -> usize {
        self.lags.len() / 2
    }
}

/// Mean-removed lagged products `(1/N) sum_t a_t b_{t+k}` for `|k| <= max_k`,
/// returned with index `max_k + k`.
fn lagged_covariance(a: &[f64], b: &[f64], max_k: usize) -> Vec<f64> {
    let n = a.len();
    let size = (n + max_k + 1).next_power_of_two();
    let mean_a = a.iter().sum::<f64>() / n as f64;
    let mean_b = b.iter().sum::<f64>() / n as f64;
    let load = |x: &[f64], m: f64| -> Vec<Complex64> {
        let mut v: Vec<Complex64> = x.iter().map(|x| Complex64::new(x - m, 0.0)).collect();
        v.resize(size, Complex64::new(0.0, 0.0));
        v
    };
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa = load(a, mean_a);
    let mut fb = load(b, mean_b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    let mut prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x.conj() * y).collect();
    inv.process(&mut prod);
    let scale = 1.0 / (size as f64 * n as f64);
    (0..=2 * max_k)
        .map(|i| {
            let k = i as i64 - max_k as i64;
            let idx = if k >= 0 { k as usize } else { size - (-k) as usize };
            prod[idx].re * scale
        })
        .collect()
}

/// Biased cross-covariance of `a` and `b` at lags up to `max_lag` seconds.
///
/// The band at lag `k` follows Bartlett's large-sample formula
/// `var = (1/N) sum_m [g_aa(m) g_bb(m) + g_ab(m + k) g_ab(m - k)]`,
/// with the sum truncated at `|m| <= max_lag`.
pub fn cross_correlation(a: &TimeSeries, b: &TimeSeries, max_lag: f64) -> Result<CorrelationResult> {
    if a.sample_rate != b.sample_rate || a.len() != b.len() {
        return Err(Error::Argument("series must share sample rate and length".into()));
    }
    if !(max_lag >= 0.0) || max_lag >= a.duration() / 2.0 {
        return Err(Error::Argument(format!(
            "max_lag {max_lag:e} s must be below half the record ({:e} s)",
            a.duration() / 2.0
        )));
    }
    let n = a.len();
    let max_k = (max_lag * a.sample_rate).floor() as usize;
    let gaa = lagged_covariance(&a.values, &a.values, max_k);
    let gbb = lagged_covariance(&b.values, &b.values, max_k);
    let gab = lagged_covariance(&a.values, &b.values, 2 * max_k);

    let at = |g: &[f64], center: usize, k: i64| g[(center as i64 + k) as usize];
    let var_a = gaa[max_k];
    let var_b = gbb[max_k];
    let norm = (var_a * var_b).sqrt();

    let mut auto_sum = 0.0;
    for m in -(max_k as i64)..=(max_k as i64) {
        auto_sum += at(&gaa, max_k, m) * at(&gbb, max_k, m);
    }

    let mut lags = Vec::with_capacity(2 * max_k + 1);
    let mut covariance = Vec::with_capacity(2 * max_k + 1);
    let mut sigma = Vec::with_capacity(2 * max_k + 1);
    for k in -(max_k as i64)..=(max_k as i64) {
        let mut cross_sum = 0.0;
        for m in -(max_k as i64)..=(max_k as i64) {
            cross_sum += at(&gab, 2 * max_k, m + k) * at(&gab, 2 * max_k, m - k);
        }
        lags.push(k as f64 / a.sample_rate);
        covariance.push(at(&gab, 2 * max_k, k));
        sigma.push(((auto_sum + cross_sum) / n as f64).max(0.0).sqrt());
    }
    let (normalized, sigma_normalized) = if norm > 0.0 {
        (
            covariance.iter().map(|c| c / norm).collect(),
            sigma.iter().map(|s| s / norm).collect(),
        )
    } else {
        (vec![0.0; covariance.len()], vec![0.0; sigma.len()])
    };
    let n_eff = if auto_sum > 0.0 { n as f64 * var_a * var_b / auto_sum } else { n as f64 };
    Ok(CorrelationResult {
        lags,
        covariance,
        normalized,
        sigma,
        sigma_normalized,
        n_samples_effective: n_eff,
    })
}

//! Gaussian time series with the predicted Planckian displacement statistics.
//!
//! Two independent generators are provided:
//!
//! * [`synthesize_spectral`] colors white Gaussian Fourier coefficients by the
//!   target spectrum. The result is circularly stationary and its expected
//!   periodogram equals the analytic PSD exactly on the discrete frequency grid.
//! * [`synthesize_boxcar`] samples `x(t) = W(t) - W(t - 2L/c)` exactly, where `W`
//!   is a Wiener process with two-sided white PSD `2 c^2 t_P / pi`. This is white
//!   noise convolved with a boxcar of duration `2L/c`; the sampled autocovariance
//!   is the exact triangle, and the sampled spectrum is the analytic one folded
//!   about Nyquist (see [`HolographicSpectrum::sampled_psd`]).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::noise_model::HolographicSpectrum;

/// Substream identifiers derived from one user seed.
pub mod streams {
    pub const GEOMETRIC: u64 = 1;
    pub const SHOT: u64 = 2;
    pub const GEOMETRIC_INDEPENDENT: u64 = 3;
    pub const SHOT_B: u64 = 4;
}

/// Independent, reproducible generator for channel `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniformly sampled displacement record in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub sample_rate: f64,
    pub start_time: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(sample_rate: f64, start_time: f64, values: Vec<f64>) -> Result<Self> {
        if !(sample_rate > 0.0) || !sample_rate.is_finite() {
            return Err(Error::Argument(format!("sample rate must be positive, got {sample_rate}")));
        }
        if values.is_empty() {
            return Err(Error::Argument("time series must hold at least one sample".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            sample_rate,
            start_time,
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 / self.sample_rate
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Population variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.len() as f64
    }

    pub fn mean_square(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.len() as f64
    }

    pub fn slice(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end > self.len() {
            return Err(Error::Argument(format!("bad slice {start}..{end} of {}", self.len())));
        }
        Ok(Self {
            sample_rate: self.sample_rate,
            start_time: self.start_time + start as f64 / self.sample_rate,
            values: self.values[start..end].to_vec(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthesisMethod {
    #[default]
    Spectral,
    Boxcar,
}

impl std::fmt::Display for SynthesisMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SynthesisMethod::Spectral => write!(f, "spectral"),
            SynthesisMethod::Boxcar => write!(f, "boxcar"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub arm_length: f64,
    pub sample_rate: f64,
    pub n_samples: usize,
    pub seed: u64,
    #[serde(default)]
    pub method: SynthesisMethod,
}

impl SynthesisConfig {
    /// Holometer geometry at 16 MHz, 2^20 samples.
    pub fn holometer(seed: u64, method: SynthesisMethod) -> Self {
        Self {
            arm_length: 40.0,
            sample_rate: 16e6,
            n_samples: 1 << 20,
            seed,
            method,
        }
    }

    /// Collects every violated invariant.
    pub fn validate(&self, consts: &PhysicalConstants) -> Result<()> {
        let problems = sampling_problems(self.arm_length, self.sample_rate, self.n_samples, consts);
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }
}

/// Sampling must resolve the first spectral zero at least four times over and
/// the record must span ten coherence times.
pub(crate) fn sampling_problems(
    arm_length: f64,
    sample_rate: f64,
    n_samples: usize,
    consts: &PhysicalConstants,
) -> Vec<String> {
    let mut problems = Vec::new();
    if !(arm_length > 0.0) || !arm_length.is_finite() {
        problems.push(format!("arm_length: must be positive, got {arm_length}"));
        return problems;
    }
    if !(sample_rate > 0.0) || !sample_rate.is_finite() {
        problems.push(format!("sample_rate: must be positive, got {sample_rate}"));
        return problems;
    }
    let first_zero = consts.c / (2.0 * arm_length);
    if sample_rate < 4.0 * first_zero {
        problems.push(format!(
            "sample_rate: {sample_rate:e} Hz is below 4 x first zero = {:e} Hz",
            4.0 * first_zero
        ));
    }
    let coherence = 2.0 * arm_length / consts.c;
    if (n_samples as f64) / sample_rate < 10.0 * coherence {
        problems.push(format!(
            "n_samples: record of {n_samples} samples is shorter than 10 x 2L/c = {:e} s",
            10.0 * coherence
        ));
    }
    problems
}

pub fn synthesize(cfg: &SynthesisConfig) -> Result<TimeSeries> {
    match cfg.method {
        SynthesisMethod::Spectral => synthesize_spectral(cfg),
        SynthesisMethod::Boxcar => synthesize_boxcar(cfg),
    }
}

pub fn synthesize_spectral(cfg: &SynthesisConfig) -> Result<TimeSeries> {
    synthesize_with(cfg, SynthesisMethod::Spectral)
}

pub fn synthesize_boxcar(cfg: &SynthesisConfig) -> Result<TimeSeries> {
    synthesize_with(cfg, SynthesisMethod::Boxcar)
}

fn synthesize_with(cfg: &SynthesisConfig, method: SynthesisMethod) -> Result<TimeSeries> {
    let consts = PhysicalConstants::default();
    cfg.validate(&consts)?;
    let model = HolographicSpectrum::new(cfg.arm_length, consts)?;
    let mut rng = substream(cfg.seed, streams::GEOMETRIC);
    let values = geometric_noise(&model, cfg.sample_rate, cfg.n_samples, method, &mut rng);
    TimeSeries::new(cfg.sample_rate, 0.0, values)
}

/// Draws one realization with the given method; no validation.
pub(crate) fn geometric_noise(
    model: &HolographicSpectrum,
    sample_rate: f64,
    n: usize,
    method: SynthesisMethod,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    match method {
        SynthesisMethod::Spectral => spectral_noise(model, sample_rate, n, rng),
        SynthesisMethod::Boxcar => boxcar_noise(model, sample_rate, n, rng),
    }
}

fn spectral_noise(
    model: &HolographicSpectrum,
    sample_rate: f64,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    if n == 1 {
        let sigma = (model.psd_unchecked(0.0) * sample_rate).sqrt();
        let z: f64 = StandardNormal.sample(rng);
        return vec![sigma * z];
    }
    let df = sample_rate / n as f64;
    // E|X_k|^2 = S(f_k) fs / N makes the periodogram dt/N |FFT|^2 unbiased for S.
    let scale = sample_rate / n as f64;
    let mut spectrum = vec![Complex64::new(0.0, 0.0); n];
    let half = n / 2;
    for k in 0..=half {
        let power = model.psd_unchecked(k as f64 * df) * scale;
        let self_conjugate = k == 0 || (n % 2 == 0 && k == half);
        if self_conjugate {
            let z: f64 = StandardNormal.sample(rng);
            spectrum[k] = Complex64::new(power.sqrt() * z, 0.0);
        } else {
            let s = (0.5 * power).sqrt();
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            spectrum[k] = Complex64::new(s * re, s * im);
            spectrum[n - k] = spectrum[k].conj();
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(n).process(&mut spectrum);
    spectrum.into_iter().map(|c| c.re).collect()
}

fn boxcar_noise(
    model: &HolographicSpectrum,
    sample_rate: f64,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let dt = 1.0 / sample_rate;
    let window = model.coherence_time() / dt;
    let q = window.floor() as usize;
    let r = window - q as f64;
    let white = model.white_noise_psd();
    // Wiener increments over the interleaved grid {m dt} U {(m - r) dt}:
    // a_m spans ((m - r) dt, m dt], b_m spans (m dt, (m + 1 - r) dt].
    let sigma_a = (white * r * dt).sqrt();
    let sigma_b = (white * (1.0 - r) * dt).sqrt();
    let count = n + q;
    let mut a = Vec::with_capacity(count);
    let mut b = Vec::with_capacity(count);
    for _ in 0..count {
        let za: f64 = StandardNormal.sample(rng);
        let zb: f64 = StandardNormal.sample(rng);
        a.push(sigma_a * za);
        b.push(sigma_b * zb);
    }
    // Index j = m + q. x_n = sum_{j=n}^{n+q} a_j + sum_{j=n}^{n+q-1} b_j.
    let exact = |i: usize| -> f64 { a[i..=i + q].iter().sum::<f64>() + b[i..i + q].iter().sum::<f64>() };
    const REFRESH: usize = 4096;
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    for i in 0..n {
        if i % REFRESH == 0 {
            acc = exact(i);
        } else {
            acc += a[i + q] + b[i + q - 1] - a[i - 1] - b[i - 1];
        }
        out.push(acc);
    }
    out
}

/// Sample excess kurtosis.
pub fn excess_kurtosis(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2) - 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(method: SynthesisMethod, seed: u64, n: usize) -> SynthesisConfig {
        SynthesisConfig {
            n_samples: n,
            ..SynthesisConfig::holometer(seed, method)
        }
    }

    #[test]
    fn deterministic_in_seed() {
        for method in [SynthesisMethod::Spectral, SynthesisMethod::Boxcar] {
            let a = synthesize(&cfg(method, 7, 4096)).unwrap();
            let b = synthesize(&cfg(method, 7, 4096)).unwrap();
            let c = synthesize(&cfg(method, 8, 4096)).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn invalid_configs_list_every_problem() {
        let bad = SynthesisConfig {
            arm_length: 40.0,
            sample_rate: 1e6,
            n_samples: 2,
            seed: 0,
            method: SynthesisMethod::Spectral,
        };
        match synthesize(&bad) {
            Err(Error::Config(p)) => {
                assert_eq!(p.len(), 2, "{p:?}");
                assert!(p[0].starts_with("sample_rate"));
                assert!(p[1].starts_with("n_samples"));
            }
            other => panic!("expected config error, got {other:?}"),
        }
        assert!(synthesize(&SynthesisConfig { arm_length: -1.0, ..bad }).is_err());
    }

    #[test]
    fn boxcar_window_sum_matches_direct() {
        // Refresh boundaries must not change the sliding sum.
        let model = HolographicSpectrum::with_arm_length(40.0).unwrap();
        let mut rng = substream(3, streams::GEOMETRIC);
        let x = boxcar_noise(&model, 16e6, 10_000, &mut rng);
        let mut rng = substream(3, streams::GEOMETRIC);
        let dt = 1.0 / 16e6;
        let q = (model.coherence_time() / dt).floor() as usize;
        let r = model.coherence_time() / dt - q as f64;
        let w = model.white_noise_psd();
        let mut a = vec![];
        let mut b = vec![];
        for _ in 0..10_000 + q {
            let za: f64 = StandardNormal.sample(&mut rng);
            let zb: f64 = StandardNormal.sample(&mut rng);
            a.push(za * (w * r * dt).sqrt());
            b.push(zb * (w * (1.0 - r) * dt).sqrt());
        }
        for i in [0, 1, 4095, 4096, 4097, 9999] {
            let direct: f64 = a[i..=i + q].iter().sum::<f64>() + b[i..i + q].iter().sum::<f64>();
            assert!((x[i] - direct).abs() <= 1e-12 * model.peak_variance().sqrt());
        }
    }

    #[test]
    fn boxcar_variance_and_increments() {
        let model = HolographicSpectrum::with_arm_length(40.0).unwrap();
        let c = SynthesisConfig {
            sample_rate: 256e6,
            ..cfg(SynthesisMethod::Boxcar, 11, 1 << 20)
        };
        let ts = synthesize(&c).unwrap();
        let var = ts.mean_square();
        assert!((var / model.peak_variance() - 1.0).abs() < 0.05, "{var}");
        // Random-walk regime: <(x(t+k dt) - x(t))^2> = 2 S_w k dt for k dt < 2L/c.
        for k in [1usize, 2, 4, 8] {
            let msd = ts.values.windows(k + 1).map(|w| (w[k] - w[0]).powi(2)).sum::<f64>()
                / (ts.len() - k) as f64;
            let expected = 2.0 * model.white_noise_psd() * k as f64 / c.sample_rate;
            assert!((msd / expected - 1.0).abs() < 0.05, "k = {k}: {msd} vs {expected}");
        }
    }

    #[test]
    fn variance_scales_with_arm_length() {
        let base = SynthesisConfig {
            sample_rate: 64e6,
            ..cfg(SynthesisMethod::Boxcar, 5, 1 << 18)
        };
        let v1 = synthesize(&base).unwrap().mean_square();
        let v2 = synthesize(&SynthesisConfig { arm_length: 80.0, ..base }).unwrap().mean_square();
        assert!((v2 / v1 - 2.0).abs() < 0.15, "{}", v2 / v1);
    }

    #[test]
    fn spectral_record_is_gaussian() {
        let ts = synthesize(&cfg(SynthesisMethod::Spectral, 21, 1 << 20)).unwrap();
        assert!(excess_kurtosis(&ts.values).abs() < 0.1);
        let model = HolographicSpectrum::with_arm_length(40.0).unwrap();
        assert!((ts.mean_square() / model.peak_variance() - 1.0).abs() < 0.1);
    }

    #[test]
    fn single_sample_series_rejected_by_validation_but_supported() {
        let model = HolographicSpectrum::with_arm_length(40.0).unwrap();
        let mut rng = substream(0, 0);
        assert_eq!(spectral_noise(&model, 16e6, 1, &mut rng).len(), 1);
        assert!(TimeSeries::new(1.0, 0.0, vec![]).is_err());
        assert!(TimeSeries::new(1.0, 0.0, vec![f64::NAN]).is_err());
        assert!(TimeSeries::new(0.0, 0.0, vec![1.0]).is_err());
    }
}

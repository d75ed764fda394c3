//! Statistical invariants of synthesis, the two-detector model and the estimators.

use planck_noise::analysis::{
    coherence_from, cross_correlation, welch_cross, welch_psd, Window, WelchParams,
};
use planck_noise::interferometer::{simulate_detector, simulate_dual_with, DetectorConfig, DualDetectorConfig};
use planck_noise::synthesis::{synthesize, streams, substream};
use planck_noise::{HolographicSpectrum, SynthesisConfig, SynthesisMethod, TimeSeries};
use rand_distr::{Distribution, StandardNormal};

fn model() -> HolographicSpectrum {
    HolographicSpectrum::with_arm_length(40.0).unwrap()
}

fn quiet(geometric: bool) -> DetectorConfig {
    DetectorConfig { arm_length: 40.0, shot_noise_asd: 0.0, geometric_sensitivity: geometric }
}

#[test]
fn stationary_across_record_quarters() {
    for method in [SynthesisMethod::Spectral, SynthesisMethod::Boxcar] {
        let ts = synthesize(&SynthesisConfig::holometer(21, method)).unwrap();
        let q = ts.len() / 4;
        let vars: Vec<f64> = (0..4).map(|i| ts.slice(i * q, (i + 1) * q).unwrap().variance()).collect();
        let mean = vars.iter().sum::<f64>() / 4.0;
        // Each quarter holds ~61000 coherence times; 3% is many sigma.
        for v in &vars {
            assert!((v / mean - 1.0).abs() < 0.03, "{method}: {vars:?}");
        }
    }
}

#[test]
fn increments_follow_the_triangle() {
    // E[(x(t + tau) - x(t))^2] = 2 (C(0) - C(tau)), saturating at 2 C(0) beyond 2L/c.
    let m = model();
    let cfg = SynthesisConfig { arm_length: 40.0, sample_rate: 128e6, n_samples: 1 << 20, seed: 5, method: SynthesisMethod::Boxcar };
    let ts = synthesize(&cfg).unwrap();
    for lag in [4usize, 8, 16, 34, 40, 100] {
        let tau = lag as f64 / cfg.sample_rate;
        let msd = ts.values.windows(lag + 1).map(|w| (w[lag] - w[0]).powi(2)).sum::<f64>() / (ts.len() - lag) as f64;
        let expect = 2.0 * (m.peak_variance() - m.analytic_autocorrelation(tau));
        assert!((msd / expect - 1.0).abs() < 0.03, "lag {lag}: {msd:e} vs {expect:e}");
    }
}

#[test]
fn dual_cross_spectrum_is_rho_times_model() {
    let m = model();
    let rho = 0.6;
    let cfg = DualDetectorConfig { det_a: quiet(true), det_b: quiet(true), rho_geom: rho };
    let params = WelchParams::new(1024, 0.5, Window::Hann);
    let mut re = vec![0.0; 513];
    let mut im = vec![0.0; 513];
    let mut freqs = Vec::new();
    let runs = 10;
    for seed in 0..runs {
        let (a, b) = simulate_dual_with(&cfg, 1.0e-3, 128e6, seed, SynthesisMethod::Boxcar).unwrap();
        let c = welch_cross(&a, &b, &params).unwrap();
        for (k, v) in c.csd.values.iter().enumerate() {
            re[k] += v.re / runs as f64;
            im[k] += v.im / runs as f64;
        }
        freqs = c.csd.frequencies.clone();
    }
    let r = (1..freqs.len()).take_while(|&k| freqs[k] < m.zero(1));
    let (mut meas, mut pred, mut imag) = (0.0, 0.0, 0.0);
    for k in r {
        meas += re[k];
        imag += im[k];
        pred += 2.0 * rho * m.analytic_psd(freqs[k]).unwrap();
    }
    assert!((meas / pred - 1.0).abs() < 0.03, "{meas:e} vs {pred:e}");
    assert!(imag.abs() < 0.03 * pred);
}

#[test]
fn insensitive_layout_gives_null_cross_spectrum() {
    let cfg = DualDetectorConfig {
        det_a: DetectorConfig { geometric_sensitivity: false, ..DetectorConfig::holometer() },
        det_b: DetectorConfig::holometer(),
        rho_geom: 1.0,
    };
    let (a, b) = simulate_dual_with(&cfg, 0.016, 16e6, 9, SynthesisMethod::Spectral).unwrap();
    let params = WelchParams::default();
    let c = welch_cross(&a, &b, &params).unwrap();
    let coh = coherence_from(&c);
    // Unbiased coherence of independent channels averages to about H(0)/n_seg.
    let interior = &coh.values[2..coh.values.len() - 2];
    let mean = interior.iter().sum::<f64>() / interior.len() as f64;
    let expect = c.csd.variance_factor() / c.csd.n_segments as f64;
    assert!((mean / expect - 1.0).abs() < 0.15, "{mean:e} vs {expect:e}");
}

#[test]
fn coherence_bias_without_overlap_is_one_over_segments() {
    let mut rng = substream(77, streams::SHOT);
    let n = 1 << 18;
    let mut draw = || -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let a = TimeSeries::new(1e6, 0.0, draw()).unwrap();
    let b = TimeSeries::new(1e6, 0.0, draw()).unwrap();
    for window in [Window::Rectangular, Window::Hann] {
        let params = WelchParams::new(256, 0.0, window);
        let coh = coherence_from(&welch_cross(&a, &b, &params).unwrap());
        let interior = &coh.values[1..coh.values.len() - 1];
        let mean = interior.iter().sum::<f64>() / interior.len() as f64;
        let expect = 1.0 / coh.n_segments as f64;
        assert!((mean / expect - 1.0).abs() < 0.1, "{window:?}: {mean:e} vs {expect:e}");
    }
}

#[test]
fn psd_scatter_shrinks_as_inverse_root_segments() {
    // Scatter of each bin across independent records; neighbouring bins are correlated,
    // so the spread within one record would understate it.
    let m = model();
    let params = WelchParams::default();
    let runs = 60;
    let mut last = None;
    for octave in 0..4 {
        let n = (1usize << 14) << octave;
        let mut ratios: Vec<Vec<f64>> = Vec::new();
        let mut predicted = 0.0;
        for seed in 0..runs {
            let cfg = SynthesisConfig { arm_length: 40.0, sample_rate: 16e6, n_samples: n, seed: 100 * octave as u64 + seed, method: SynthesisMethod::Spectral };
            let p = welch_psd(&synthesize(&cfg).unwrap(), &params).unwrap();
            predicted = p.relative_error();
            ratios.push((2..10).map(|k| p.values[k] / (2.0 * m.analytic_psd(p.frequencies[k]).unwrap())).collect());
        }
        let mut sd = 0.0;
        for k in 0..8 {
            let col: Vec<f64> = ratios.iter().map(|r| r[k]).collect();
            let mean = col.iter().sum::<f64>() / runs as f64;
            sd += (col.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (runs - 1) as f64).sqrt() / 8.0;
        }
        assert!((sd / predicted - 1.0).abs() < 0.2, "octave {octave}: {sd} vs {predicted}");
        if let Some((prev_sd, prev_pred)) = last {
            let r: f64 = prev_sd / sd;
            assert!((r / 2f64.sqrt() - 1.0).abs() < 0.2, "measured ratio {r}");
            let r: f64 = prev_pred / predicted;
            assert!((r - 2f64.sqrt()).abs() < 0.02, "{r}");
        }
        last = Some((sd, predicted));
    }
}

#[test]
fn triangle_recovered_in_lag_domain() {
    let m = model();
    let cfg = DualDetectorConfig { det_a: quiet(true), det_b: quiet(true), rho_geom: 1.0 };
    let (a, b) = simulate_dual_with(&cfg, 0.01, 128e6, 4, SynthesisMethod::Boxcar).unwrap();
    let xc = cross_correlation(&a, &b, 4.0 * m.coherence_time()).unwrap();
    let mut outside = 0;
    for i in 0..xc.lags.len() {
        let expect = m.analytic_autocorrelation(xc.lags[i]);
        if ((xc.covariance[i] - expect) / xc.sigma[i]).abs() > 3.0 {
            outside += 1;
        }
    }
    assert!(outside as f64 <= 0.02 * xc.lags.len() as f64, "{outside} of {}", xc.lags.len());
}

#[test]
fn shot_noise_level_matches_asd() {
    let cfg = DetectorConfig { geometric_sensitivity: false, ..DetectorConfig::holometer() };
    let ts = simulate_detector(&cfg, 0.016, 16e6, 2).unwrap();
    let p = welch_psd(&ts, &WelchParams::default()).unwrap();
    let interior = &p.values[2..p.values.len() - 2];
    let mean = interior.iter().sum::<f64>() / interior.len() as f64;
    assert!((mean / cfg.shot_noise_asd.powi(2) - 1.0).abs() < 0.02);
}

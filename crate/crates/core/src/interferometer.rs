//! Signal streams of one or two Michelson interferometers.
//!
//! Each output is the geometric displacement noise (when the layout responds to
//! it) plus white Gaussian shot noise. Two co-located instruments share a
//! fraction `rho_geom` of their geometric noise:
//! `g_b = rho * g_shared + sqrt(1 - rho^2) * g_independent`.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::noise_model::HolographicSpectrum;
use crate::synthesis::{self, streams, substream, SynthesisMethod, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub arm_length: f64,
    /// One-sided shot-noise amplitude spectral density, m/sqrt(Hz).
    pub shot_noise_asd: f64,
    pub geometric_sensitivity: bool,
}

impl DetectorConfig {
    /// 40 m arms with a shot floor three times the Planckian plateau ASD.
    pub fn holometer() -> Self {
        Self {
            arm_length: 40.0,
            shot_noise_asd: default_shot_noise_asd(40.0),
            geometric_sensitivity: true,
        }
    }

    fn problems(&self, label: &str) -> Vec<String> {
        let mut p = Vec::new();
        if !(self.arm_length > 0.0) || !self.arm_length.is_finite() {
            p.push(format!("{label}.arm_length: must be positive, got {}", self.arm_length));
        }
        if !(self.shot_noise_asd >= 0.0) || !self.shot_noise_asd.is_finite() {
            p.push(format!(
                "{label}.shot_noise_asd: must be non-negative, got {}",
                self.shot_noise_asd
            ));
        }
        p
    }
}

/// Three times the one-sided plateau ASD `sqrt(2 * 8 t_P L^2 / pi)`.
pub fn default_shot_noise_asd(arm_length: f64) -> f64 {
    let model = HolographicSpectrum::new(arm_length, PhysicalConstants::default())
        .map(|m| m.plateau())
        .unwrap_or(0.0);
    3.0 * (2.0 * model).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualDetectorConfig {
    pub det_a: DetectorConfig,
    pub det_b: DetectorConfig,
    pub rho_geom: f64,
}

impl DualDetectorConfig {
    pub fn holometer(rho_geom: f64) -> Self {
        Self {
            det_a: DetectorConfig::holometer(),
            det_b: DetectorConfig::holometer(),
            rho_geom,
        }
    }

    pub fn problems(&self) -> Vec<String> {
        let mut p = self.det_a.problems("det_a");
        p.extend(self.det_b.problems("det_b"));
        if !(0.0..=1.0).contains(&self.rho_geom) {
            p.push(format!("rho_geom: must lie in [0, 1], got {}", self.rho_geom));
        }
        if self.rho_geom > 0.0 && self.det_a.arm_length != self.det_b.arm_length {
            p.push(format!(
                "det_b.arm_length: correlated detectors need equal arms ({} vs {})",
                self.det_a.arm_length, self.det_b.arm_length
            ));
        }
        p
    }
}

fn sample_count(
    det: &DetectorConfig,
    label: &str,
    duration: f64,
    sample_rate: f64,
    consts: &PhysicalConstants,
) -> (usize, Vec<String>) {
    let mut p = det.problems(label);
    if !(duration > 0.0) || !duration.is_finite() {
        p.push(format!("duration: must be positive, got {duration}"));
        return (0, p);
    }
    if !(sample_rate > 0.0) || !sample_rate.is_finite() {
        p.push(format!("sample_rate: must be positive, got {sample_rate}"));
        return (0, p);
    }
    let n = (duration * sample_rate).round() as usize;
    if p.is_empty() {
        let coherence = 2.0 * det.arm_length / consts.c;
        if duration < 10.0 * coherence {
            p.push(format!(
                "duration: {duration:e} s is shorter than 10 x 2L/c = {:e} s",
                10.0 * coherence
            ));
        } else if det.geometric_sensitivity {
            p.extend(synthesis::sampling_problems(det.arm_length, sample_rate, n, consts));
        }
    }
    (n, p)
}

fn shot_noise(asd: f64, sample_rate: f64, n: usize, seed: u64, stream: u64) -> Vec<f64> {
    // One-sided PSD a^2 is two-sided a^2/2 over [-fs/2, fs/2].
    let sigma = asd * (0.5 * sample_rate).sqrt();
    let mut rng = substream(seed, stream);
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        })
        .collect()
}

fn geometric(
    arm_length: f64,
    sample_rate: f64,
    n: usize,
    seed: u64,
    stream: u64,
    method: SynthesisMethod,
) -> Result<Vec<f64>> {
    let model = HolographicSpectrum::new(arm_length, PhysicalConstants::default())?;
    let mut rng = substream(seed, stream);
    Ok(synthesis::geometric_noise(&model, sample_rate, n, method, &mut rng))
}

pub fn simulate_detector(
    cfg: &DetectorConfig,
    duration: f64,
    sample_rate: f64,
    seed: u64,
) -> Result<TimeSeries> {
    simulate_detector_with(cfg, duration, sample_rate, seed, SynthesisMethod::Spectral)
}

pub fn simulate_detector_with(
    cfg: &DetectorConfig,
    duration: f64,
    sample_rate: f64,
    seed: u64,
    method: SynthesisMethod,
) -> Result<TimeSeries> {
    let consts = PhysicalConstants::default();
    let (n, problems) = sample_count(cfg, "detector", duration, sample_rate, &consts);
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    let mut values = shot_noise(cfg.shot_noise_asd, sample_rate, n, seed, streams::SHOT);
    if cfg.geometric_sensitivity {
        let g = geometric(cfg.arm_length, sample_rate, n, seed, streams::GEOMETRIC, method)?;
        values.iter_mut().zip(&g).for_each(|(v, g)| *v += g);
    }
    TimeSeries::new(sample_rate, 0.0, values)
}

pub fn simulate_dual(
    cfg: &DualDetectorConfig,
    duration: f64,
    sample_rate: f64,
    seed: u64,
) -> Result<(TimeSeries, TimeSeries)> {
    simulate_dual_with(cfg, duration, sample_rate, seed, SynthesisMethod::Spectral)
}

/// Detector A reproduces [`simulate_detector_with`] for the same seed.
pub fn simulate_dual_with(
    cfg: &DualDetectorConfig,
    duration: f64,
    sample_rate: f64,
    seed: u64,
    method: SynthesisMethod,
) -> Result<(TimeSeries, TimeSeries)> {
    let consts = PhysicalConstants::default();
    let mut problems = cfg.problems();
    let (n, pa) = sample_count(&cfg.det_a, "det_a", duration, sample_rate, &consts);
    let (_, pb) = sample_count(&cfg.det_b, "det_b", duration, sample_rate, &consts);
    for p in pa.into_iter().chain(pb) {
        if !problems.contains(&p) {
            problems.push(p);
        }
    }
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    let rho = cfg.rho_geom;

    let mut a = shot_noise(cfg.det_a.shot_noise_asd, sample_rate, n, seed, streams::SHOT);
    let mut b = shot_noise(cfg.det_b.shot_noise_asd, sample_rate, n, seed, streams::SHOT_B);

    let needs_shared = cfg.det_a.geometric_sensitivity || (cfg.det_b.geometric_sensitivity && rho > 0.0);
    let shared = if needs_shared {
        Some(geometric(cfg.det_a.arm_length, sample_rate, n, seed, streams::GEOMETRIC, method)?)
    } else {
        None
    };
    if cfg.det_a.geometric_sensitivity {
        if let Some(g) = &shared {
            a.iter_mut().zip(g).for_each(|(v, g)| *v += g);
        }
    }
    if cfg.det_b.geometric_sensitivity {
        if let (Some(g), true) = (&shared, rho > 0.0) {
            b.iter_mut().zip(g).for_each(|(v, g)| *v += rho * g);
        }
        if rho < 1.0 {
            let own = (1.0 - rho * rho).sqrt();
            let g = geometric(
                cfg.det_b.arm_length,
                sample_rate,
                n,
                seed,
                streams::GEOMETRIC_INDEPENDENT,
                method,
            )?;
            b.iter_mut().zip(&g).for_each(|(v, g)| *v += own * g);
        }
    }
    Ok((
        TimeSeries::new(sample_rate, 0.0, a)?,
        TimeSeries::new(sample_rate, 0.0, b)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FS: f64 = 16e6;

    #[test]
    fn default_shot_floor_is_three_times_plateau_asd() {
        let asd = default_shot_noise_asd(40.0);
        assert!((asd - 3.0 * (2.0f64 * 2.1962e-40).sqrt()).abs() / asd < 1e-4);
    }

    #[test]
    fn too_short_duration_is_config_error() {
        let err = simulate_detector(&DetectorConfig::holometer(), 1e-6, FS, 1);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn unequal_arms_rejected_when_correlated() {
        let mut cfg = DualDetectorConfig::holometer(0.5);
        cfg.det_b.arm_length = 41.0;
        match simulate_dual(&cfg, 1e-3, FS, 0) {
            Err(Error::Config(p)) => assert!(p.iter().any(|s| s.contains("equal arms"))),
            other => panic!("{other:?}"),
        }
        cfg.rho_geom = 0.0;
        assert!(simulate_dual(&cfg, 1e-3, FS, 0).is_ok());
    }

    #[test]
    fn bad_rho_rejected() {
        let cfg = DualDetectorConfig::holometer(1.5);
        assert!(simulate_dual(&cfg, 1e-3, FS, 0).is_err());
    }

    #[test]
    fn full_correlation_without_shot_noise_gives_identical_outputs() {
        let mut cfg = DualDetectorConfig::holometer(1.0);
        cfg.det_a.shot_noise_asd = 0.0;
        cfg.det_b.shot_noise_asd = 0.0;
        let (a, b) = simulate_dual(&cfg, 1e-3, FS, 9).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn detector_a_matches_single_detector() {
        let cfg = DualDetectorConfig::holometer(0.3);
        let (a, _) = simulate_dual(&cfg, 1e-3, FS, 4).unwrap();
        let single = simulate_detector(&cfg.det_a, 1e-3, FS, 4).unwrap();
        assert_eq!(a, single);
    }

    #[test]
    fn components_add_in_variance() {
        let cfg = DetectorConfig::holometer();
        let ts = simulate_detector(&cfg, 0.05, FS, 2).unwrap();
        let model = HolographicSpectrum::with_arm_length(40.0).unwrap();
        // Spectral synthesis on the grid holds the in-band part of C(0).
        let geom: f64 = {
            let n = ts.len();
            let df = FS / n as f64;
            (0..n)
                .map(|k| {
                    let f = if k <= n / 2 { k as f64 } else { (n - k) as f64 } * df;
                    model.analytic_psd(f).unwrap() * df
                })
                .sum()
        };
        let shot = cfg.shot_noise_asd.powi(2) * FS / 2.0;
        let ratio = ts.mean_square() / (geom + shot);
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
    }
}

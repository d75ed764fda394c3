use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::WelchParams;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::interferometer::DualDetectorConfig;
use crate::noise_model::HolographicSpectrum;
use crate::synthesis::SynthesisMethod;

/// Default record: 2^20 samples at 16 MHz (65.5 ms), about 8190 Hann segments.
pub const REFERENCE_DURATION: f64 = 1_048_576.0 / 16e6;

/// Declarative description of one dual-interferometer experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub detectors: DualDetectorConfig,
    pub sample_rate: f64,
    pub duration: f64,
    #[serde(default)]
    pub method: SynthesisMethod,
    #[serde(default)]
    pub welch: WelchParams,
    /// Fit band `[f_lo, f_hi)` in Hz; defaults to `[f_c / 10, 2 c / 2L)` capped below Nyquist.
    #[serde(default)]
    pub band: Option<[f64; 2]>,
    /// Largest lag of the time-domain correlation; defaults to four coherence times.
    #[serde(default)]
    pub max_lag: Option<f64>,
}

impl RunConfig {
    pub fn reference(seed: u64, rho_geom: f64) -> Self {
        Self {
            seed,
            detectors: DualDetectorConfig::holometer(rho_geom),
            sample_rate: 16e6,
            duration: REFERENCE_DURATION,
            method: SynthesisMethod::Spectral,
            welch: WelchParams::default(),
            band: None,
            max_lag: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))
    }

    pub fn model(&self) -> Result<HolographicSpectrum> {
        HolographicSpectrum::new(self.detectors.det_a.arm_length, PhysicalConstants::default())
    }

    pub fn fit_band(&self) -> Result<(f64, f64)> {
        if let Some([lo, hi]) = self.band {
            return Ok((lo, hi));
        }
        let m = self.model()?;
        Ok((m.f_c / 10.0, m.zero(2).min(0.45 * self.sample_rate)))
    }

    pub fn lag_limit(&self) -> Result<f64> {
        match self.max_lag {
            Some(l) => Ok(l),
            None => Ok(4.0 * self.model()?.coherence_time()),
        }
    }

    /// Every schema-level violation, each prefixed by its field path.
    pub fn problems(&self) -> Vec<String> {
        let mut p = self.detectors.problems();
        p.extend(self.welch.problems().into_iter().map(|s| format!("welch.{s}")));
        if !(self.sample_rate > 0.0) || !self.sample_rate.is_finite() {
            p.push(format!("sample_rate: must be positive, got {}", self.sample_rate));
        }
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            p.push(format!("duration: must be positive, got {}", self.duration));
        } else if self.sample_rate > 0.0 {
            let n = (self.duration * self.sample_rate).round() as usize;
            if n < self.welch.segment_length {
                p.push(format!(
                    "duration: {n} samples do not fill one welch segment of {}",
                    self.welch.segment_length
                ));
            }
        }
        if let Some([lo, hi]) = self.band {
            if !(lo >= 0.0 && lo < hi) {
                p.push(format!("band: need 0 <= f_lo < f_hi, got [{lo}, {hi}]"));
            }
        }
        if let Some(l) = self.max_lag {
            if !(l > 0.0) || l >= self.duration / 2.0 {
                p.push(format!("max_lag: must lie in (0, duration / 2), got {l}"));
            }
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_is_valid_and_round_trips() {
        let c = RunConfig::reference(3, 1.0);
        c.validate().unwrap();
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut v = serde_json::to_value(RunConfig::reference(0, 0.0)).unwrap();
        v["bogus"] = serde_json::json!(1);
        assert!(serde_json::from_value::<RunConfig>(v).is_err());
    }

    #[test]
    fn problems_name_fields() {
        let mut c = RunConfig::reference(0, 2.0);
        c.welch.segment_length = 4;
        c.duration = -1.0;
        let p = c.problems();
        assert!(p.iter().any(|s| s.starts_with("rho_geom")));
        assert!(p.iter().any(|s| s.starts_with("welch.segment_length")));
        assert!(p.iter().any(|s| s.starts_with("duration")));
    }

    #[test]
    fn default_band_sits_below_nyquist() {
        let c = RunConfig::reference(0, 1.0);
        let (lo, hi) = c.fit_band().unwrap();
        assert!((lo - 5.964e4).abs() < 10.0);
        assert!(hi <= 0.45 * 16e6);
    }
}

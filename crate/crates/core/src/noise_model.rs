//! Closed-form prediction of the Planckian displacement noise of a Michelson
//! interferometer with arm length `L`.
//!
//! Two-sided power spectral density
//! `S(f) = 4 c^2 t_P / (pi (2 pi f)^2) * (1 - cos(f / f_c))`, `f_c = c / (4 pi L)`.
//! Its inverse Fourier transform is the triangle
//! `C(tau) = (4 c t_P L / pi) * max(0, 1 - |tau| / T)` with `T = 2L/c`,
//! so the two-sided spectrum integrates to `C(0)`. One-sided quantities are twice
//! the two-sided value for `f > 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolographicSpectrum {
    pub arm_length: f64,
    pub consts: PhysicalConstants,
    pub f_c: f64,
}

impl HolographicSpectrum {
    pub fn new(arm_length: f64, consts: PhysicalConstants) -> Result<Self> {
        if !(arm_length > 0.0) || !arm_length.is_finite() {
            return Err(Error::Argument(format!("arm length must be positive, got {arm_length}")));
        }
        Ok(Self {
            arm_length,
            consts,
            f_c: consts.c / (4.0 * PI * arm_length),
        })
    }

    pub fn with_arm_length(arm_length: f64) -> Result<Self> {
        Self::new(arm_length, PhysicalConstants::default())
    }

    /// Light round-trip time `2L/c`; the correlation vanishes beyond this lag.
    pub fn coherence_time(&self) -> f64 {
        2.0 * self.arm_length / self.consts.c
    }

    /// Zero-frequency limit `8 t_P L^2 / pi` (two-sided, m^2/Hz).
    pub fn plateau(&self) -> f64 {
        8.0 * self.consts.t_p * self.arm_length * self.arm_length / PI
    }

    /// Total variance `C(0) = 4 c t_P L / pi` (m^2).
    pub fn peak_variance(&self) -> f64 {
        4.0 * self.consts.c * self.consts.t_p * self.arm_length / PI
    }

    /// Two-sided PSD of the white noise whose boxcar average over `2L/c` has this spectrum.
    pub fn white_noise_psd(&self) -> f64 {
        2.0 * self.consts.c * self.consts.c * self.consts.t_p / PI
    }

    /// n-th spectral zero `n c / 2L`, n >= 1.
    pub fn zero(&self, n: u32) -> f64 {
        f64::from(n) * self.consts.c / (2.0 * self.arm_length)
    }

    /// Zeros at or below `f_max`.
    pub fn zeros_up_to(&self, f_max: f64) -> Vec<f64> {
        (1..)
            .map(|n| self.zero(n))
            .take_while(|&z| z <= f_max)
            .collect()
    }

    /// Two-sided PSD at `f >= 0`, m^2/Hz.
    pub fn analytic_psd(&self, f: f64) -> Result<f64> {
        if !(f >= 0.0) {
            return Err(Error::Argument(format!("frequency must be non-negative, got {f}")));
        }
        Ok(self.psd_unchecked(f))
    }

    /// Evaluated as `plateau * sinc^2`, which has no cancellation near f = 0.
    pub(crate) fn psd_unchecked(&self, f: f64) -> f64 {
        let half = 0.5 * f.abs() / self.f_c;
        if half == 0.0 {
            return self.plateau();
        }
        let s = half.sin() / half;
        self.plateau() * s * s
    }

    /// Triangular autocorrelation at `lag` seconds, m^2.
    pub fn analytic_autocorrelation(&self, lag: f64) -> f64 {
        self.peak_variance() * (1.0 - lag.abs() / self.coherence_time()).max(0.0)
    }

    /// Mean-square displacement averaged over `tau >> 2L/c`: `C(0) * 2L / (c tau)`.
    pub fn time_averaged_ms_displacement(&self, tau: f64) -> Result<f64> {
        if !(tau > self.coherence_time()) {
            return Err(Error::Domain(format!(
                "averaging time {tau:e} s must exceed 2L/c = {:e} s",
                self.coherence_time()
            )));
        }
        Ok(self.peak_variance() * self.coherence_time() / tau)
    }

    /// Upper envelope `8 c^2 t_P / (pi (2 pi f)^2)` of the oscillating spectrum above `f_c`.
    pub fn envelope_high_f(&self, f: f64) -> Result<f64> {
        if !(f > self.f_c) {
            return Err(Error::Domain(format!(
                "envelope defined above f_c = {:e} Hz, got {f:e}",
                self.f_c
            )));
        }
        let w = 2.0 * PI * f;
        Ok(8.0 * self.consts.c * self.consts.c * self.consts.t_p / (PI * w * w))
    }

    /// Expected two-sided PSD of the continuous process sampled at `sample_rate`,
    /// i.e. the spectrum folded into `[-fs/2, fs/2]`. Exact: the sampled
    /// autocorrelation has finite support.
    pub fn sampled_psd(&self, f: f64, sample_rate: f64) -> f64 {
        let dt = 1.0 / sample_rate;
        let max_k = (self.coherence_time() / dt).ceil() as usize;
        let mut sum = self.peak_variance();
        for k in 1..=max_k {
            let lag = k as f64 * dt;
            sum += 2.0 * self.analytic_autocorrelation(lag) * (2.0 * PI * f * lag).cos();
        }
        sum * dt
    }
}

//! Single-amplitude template fit of the predicted spectrum to a measured CSD.

use serde::{Deserialize, Serialize};

use super::welch::CrossSpectrum;
use super::window::overlap_kernel;
use crate::error::{Error, Result};
use crate::noise_model::HolographicSpectrum;

/// Kernel reach in bins; Hann leakage is exactly zero beyond two bins and the
/// rectangular window's overlap terms are negligible past this.
const KERNEL_REACH: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    /// Least-squares scale of the one-sided prediction against `Re(CSD)`.
    pub amplitude_fit: f64,
    /// 1-sigma error on `amplitude_fit`.
    pub amplitude_error: f64,
    pub snr: f64,
    pub n_bins: usize,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Fits `Re(CSD_k) = a * M_k` over `f_lo <= f < f_hi`, where `M` is the one-sided
/// predicted PSD.
///
/// Bins are weighted by the inverse of the local single-segment variance
/// `(P_a P_b + Re(C^2)) / 2`. The error on `a` sums the bin covariances implied by
/// the window leakage and segment overlap (see [`overlap_kernel`]). DC and the two
/// bins nearest each end of the spectrum are never used.
pub fn detection_significance(
    cross: &CrossSpectrum,
    model: &HolographicSpectrum,
    band: (f64, f64),
) -> Result<Detection> {
    let (f_lo, f_hi) = band;
    if !(f_lo < f_hi) {
        return Err(Error::Argument(format!("empty band [{f_lo}, {f_hi})")));
    }
    let csd = &cross.csd;
    let last = csd.frequencies.len().saturating_sub(1);
    if f_lo < 0.0 || f_lo > csd.frequencies[last] {
        return Err(Error::Argument(format!(
            "band [{f_lo}, {f_hi}) lies outside the estimate grid [0, {}]",
            csd.frequencies[last]
        )));
    }
    let range = csd.band_indices(f_lo, f_hi);
    let lo = range.start.max(2);
    let hi = range.end.min(last.saturating_sub(1));

    let mut bins = Vec::new();
    for k in lo..hi {
        let template = 2.0 * model.analytic_psd(csd.frequencies[k])?;
        let c = csd.values[k];
        let var = 0.5 * (cross.psd_a.values[k] * cross.psd_b.values[k] + c.re * c.re - c.im * c.im);
        if var > 0.0 && var.is_finite() && template > 0.0 {
            bins.push((k, template, c.re, var));
        }
    }
    if bins.is_empty() {
        return Err(Error::Argument(format!("band [{f_lo}, {f_hi}) holds no usable bins")));
    }

    let fisher: f64 = bins.iter().map(|(_, m, _, v)| m * m / v).sum();
    let amplitude_fit = bins.iter().map(|(_, m, re, v)| m * re / v).sum::<f64>() / fisher;

    let window = csd.params.window.coefficients(csd.params.segment_length);
    let kernel: Vec<f64> = (0..=KERNEL_REACH)
        .map(|d| overlap_kernel(&window, csd.params.step(), csd.n_segments, d))
        .collect();
    // u_k = M_k / (V_k F); var(a) = sum u_k u_k' sqrt(V_k V_k') H(k - k') / n_seg.
    let mut variance = 0.0;
    for (i, (k, m, _, v)) in bins.iter().enumerate() {
        let u = m / (v * fisher);
        for (k2, m2, _, v2) in &bins[i..] {
            let d = (*k2 - *k) as i64;
            if d > KERNEL_REACH {
                break;
            }
            let u2 = m2 / (v2 * fisher);
            let term = u * u2 * (v * v2).sqrt() * kernel[d as usize];
            variance += if d == 0 { term } else { 2.0 * term };
        }
    }
    variance /= csd.n_segments as f64;
    let amplitude_error = variance.sqrt();
    Ok(Detection {
        amplitude_fit,
        amplitude_error,
        snr: amplitude_fit / amplitude_error,
        n_bins: bins.len(),
        f_lo,
        f_hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::welch::{SpectrumEstimate, WelchParams};
    use num_complex::Complex64;

    fn exact_model_input(model: &HolographicSpectrum) -> CrossSpectrum {
        let params = WelchParams::default();
        let fs = 16e6;
        let df = fs / params.segment_length as f64;
        let freqs: Vec<f64> = (0..=params.segment_length / 2).map(|k| k as f64 * df).collect();
        let m: Vec<f64> = freqs.iter().map(|f| 2.0 * model.analytic_psd(*f).unwrap()).collect();
        let est = |values: Vec<f64>| SpectrumEstimate {
            frequencies: freqs.clone(),
            values,
            n_segments: 100,
            sample_rate: fs,
            params,
        };
        CrossSpectrum {
            csd: SpectrumEstimate {
                frequencies: freqs.clone(),
                values: m.iter().map(|v| Complex64::new(*v, 0.0)).collect(),
                n_segments: 100,
                sample_rate: fs,
                params,
            },
            psd_a: est(m.clone()),
            psd_b: est(m),
        }
    }

    #[test]
    fn self_fit_is_exact() {
        let model = HolographicSpectrum::with_arm_length(40.0).unwrap();
        let input = exact_model_input(&model);
        let d = detection_significance(&input, &model, (0.0, 8e6)).unwrap();
        assert!((d.amplitude_fit - 1.0).abs() < 1e-6);
        assert!(d.snr > 0.0 && d.amplitude_error > 0.0);
    }

    #[test]
    fn empty_band_rejected() {
        let model = HolographicSpectrum::with_arm_length(40.0).unwrap();
        let input = exact_model_input(&model);
        assert!(detection_significance(&input, &model, (1e6, 1e6)).is_err());
        assert!(detection_significance(&input, &model, (2e6, 1e6)).is_err());
        assert!(detection_significance(&input, &model, (9e6, 1e7)).is_err());
    }
}

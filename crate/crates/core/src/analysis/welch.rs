//! Segment-averaged (Welch) spectral estimates.
//!
//! All spectra are one-sided: bins `0..=N/2` at `k fs / N`, interior bins carry
//! twice the two-sided density so that `sum(values) * df` is the mean square of
//! the input (exactly so for a rectangular window without overlap).

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::window::{overlap_kernel, Window};
use crate::error::{Error, Result};
use crate::synthesis::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchParams {
    pub segment_length: usize,
    pub overlap_fraction: f64,
    #[serde(default)]
    pub window: Window,
}

impl Default for WelchParams {
    fn default() -> Self {
        Self {
            segment_length: 256,
            overlap_fraction: 0.5,
            window: Window::Hann,
        }
    }
}

impl WelchParams {
    pub fn new(segment_length: usize, overlap_fraction: f64, window: Window) -> Self {
        Self {
            segment_length,
            overlap_fraction,
            window,
        }
    }

    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        if self.segment_length < 16 {
            p.push(format!(
                "segment_length: must be at least 16, got {}",
                self.segment_length
            ));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            p.push(format!(
                "overlap_fraction: must lie in [0, 1), got {}",
                self.overlap_fraction
            ));
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Argument(p.join("; ")))
        }
    }

    /// Hop between segment starts, in samples.
    pub fn step(&self) -> usize {
        let s = (self.segment_length as f64 * (1.0 - self.overlap_fraction)).round() as usize;
        s.max(1)
    }

    pub fn segment_count(&self, n_samples: usize) -> usize {
        if n_samples < self.segment_length {
            0
        } else {
            (n_samples - self.segment_length) / self.step() + 1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate<T> {
    pub frequencies: Vec<f64>,
    pub values: Vec<T>,
    pub n_segments: usize,
    pub sample_rate: f64,
    pub params: WelchParams,
}

impl<T> SpectrumEstimate<T> {
    pub fn df(&self) -> f64 {
        self.sample_rate / self.params.segment_length as f64
    }

    /// `H(0)` for this estimate's window and overlap.
    pub fn variance_factor(&self) -> f64 {
        let w = self.params.window.coefficients(self.params.segment_length);
        overlap_kernel(&w, self.params.step(), self.n_segments, 0)
    }

    /// Relative 1-sigma error of an interior PSD bin.
    pub fn relative_error(&self) -> f64 {
        (self.variance_factor() / self.n_segments as f64).sqrt()
    }

    /// Indices of bins with `lo <= f < hi`.
    pub fn band_indices(&self, lo: f64, hi: f64) -> std::ops::Range<usize> {
        let start = self.frequencies.partition_point(|&f| f < lo);
        let end = self.frequencies.partition_point(|&f| f < hi);
        start..end.max(start)
    }
}

impl SpectrumEstimate<f64> {
    /// `sum(values) * df`.
    pub fn integrated_power(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.df()
    }
}

/// CSD together with both channel PSDs from the same segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossSpectrum {
    pub csd: SpectrumEstimate<Complex64>,
    pub psd_a: SpectrumEstimate<f64>,
    pub psd_b: SpectrumEstimate<f64>,
}

struct Segmenter {
    params: WelchParams,
    window: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    n_segments: usize,
    sample_rate: f64,
    /// Converts |X|^2 to one-sided density.
    scale: f64,
}

impl Segmenter {
    fn new(len: usize, sample_rate: f64, params: &WelchParams) -> Result<Self> {
        params.validate()?;
        if len < params.segment_length {
            return Err(Error::Argument(format!(
                "record of {len} samples is shorter than one segment ({})",
                params.segment_length
            )));
        }
        let window = params.window.coefficients(params.segment_length);
        let norm: f64 = window.iter().map(|w| w * w).sum();
        let fft = FftPlanner::new().plan_fft_forward(params.segment_length);
        Ok(Self {
            params: *params,
            window,
            fft,
            n_segments: params.segment_count(len),
            sample_rate,
            scale: 1.0 / (sample_rate * norm),
        })
    }

    fn transform(&self, values: &[f64], seg: usize, buf: &mut [Complex64]) {
        let start = seg * self.params.step();
        for (i, b) in buf.iter_mut().enumerate() {
            *b = Complex64::new(values[start + i] * self.window[i], 0.0);
        }
        self.fft.process(buf);
    }

    fn n_bins(&self) -> usize {
        self.params.segment_length / 2 + 1
    }

    fn one_sided_factor(&self, k: usize) -> f64 {
        let n = self.params.segment_length;
        if k == 0 || (n % 2 == 0 && k == n / 2) {
            1.0
        } else {
            2.0
        }
    }

    fn finish<T>(&self, sums: Vec<T>, f: impl Fn(usize, T) -> T) -> SpectrumEstimate<T> {
        let df = self.sample_rate / self.params.segment_length as f64;
        SpectrumEstimate {
            frequencies: (0..self.n_bins()).map(|k| k as f64 * df).collect(),
            values: sums.into_iter().enumerate().map(|(k, s)| f(k, s)).collect(),
            n_segments: self.n_segments,
            sample_rate: self.sample_rate,
            params: self.params,
        }
    }
}

pub fn welch_psd(ts: &TimeSeries, params: &WelchParams) -> Result<SpectrumEstimate<f64>> {
    let seg = Segmenter::new(ts.len(), ts.sample_rate, params)?;
    let mut buf = vec![Complex64::new(0.0, 0.0); params.segment_length];
    let mut sums = vec![0.0; seg.n_bins()];
    for s in 0..seg.n_segments {
        seg.transform(&ts.values, s, &mut buf);
        for (acc, x) in sums.iter_mut().zip(&buf) {
            *acc += x.norm_sqr();
        }
    }
    let norm = seg.scale / seg.n_segments as f64;
    Ok(seg.finish(sums, |k, s| s * norm * seg.one_sided_factor(k)))
}

fn check_pair(a: &TimeSeries, b: &TimeSeries) -> Result<()> {
    if a.sample_rate != b.sample_rate {
        return Err(Error::Argument(format!(
            "sample rates differ: {} vs {}",
            a.sample_rate, b.sample_rate
        )));
    }
    if a.len() != b.len() {
        return Err(Error::Argument(format!("lengths differ: {} vs {}", a.len(), b.len())));
    }
    Ok(())
}

/// CSD, PSD of `a` and PSD of `b` in one pass. The CSD is `conj(X_a) X_b`.
pub fn welch_cross(a: &TimeSeries, b: &TimeSeries, params: &WelchParams) -> Result<CrossSpectrum> {
    check_pair(a, b)?;
    let seg = Segmenter::new(a.len(), a.sample_rate, params)?;
    let n_bins = seg.n_bins();
    let mut xa = vec![Complex64::new(0.0, 0.0); params.segment_length];
    let mut xb = xa.clone();
    let mut cross = vec![Complex64::new(0.0, 0.0); n_bins];
    let mut pa = vec![0.0; n_bins];
    let mut pb = vec![0.0; n_bins];
    for s in 0..seg.n_segments {
        seg.transform(&a.values, s, &mut xa);
        seg.transform(&b.values, s, &mut xb);
        for k in 0..n_bins {
            cross[k] += xa[k].conj() * xb[k];
            pa[k] += xa[k].norm_sqr();
            pb[k] += xb[k].norm_sqr();
        }
    }
    let norm = seg.scale / seg.n_segments as f64;
    Ok(CrossSpectrum {
        csd: seg.finish(cross, |k, s| s * (norm * seg.one_sided_factor(k))),
        psd_a: seg.finish(pa, |k, s| s * norm * seg.one_sided_factor(k)),
        psd_b: seg.finish(pb, |k, s| s * norm * seg.one_sided_factor(k)),
    })
}

pub fn welch_csd(
    a: &TimeSeries,
    b: &TimeSeries,
    params: &WelchParams,
) -> Result<SpectrumEstimate<Complex64>> {
    Ok(welch_cross(a, b, params)?.csd)
}

/// Magnitude-squared coherence `|CSD|^2 / (PSD_a PSD_b)`, clipped to [0, 1].
pub fn coherence(a: &TimeSeries, b: &TimeSeries, params: &WelchParams) -> Result<SpectrumEstimate<f64>> {
    Ok(coherence_from(&welch_cross(a, b, params)?))
}

pub fn coherence_from(cross: &CrossSpectrum) -> SpectrumEstimate<f64> {
    let values = cross
        .csd
        .values
        .iter()
        .zip(cross.psd_a.values.iter().zip(&cross.psd_b.values))
        .map(|(c, (pa, pb))| {
            let denom = pa * pb;
            if denom > 0.0 {
                (c.norm_sqr() / denom).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect();
    SpectrumEstimate {
        frequencies: cross.csd.frequencies.clone(),
        values,
        n_segments: cross.csd.n_segments,
        sample_rate: cross.csd.sample_rate,
        params: cross.csd.params,
    }
}

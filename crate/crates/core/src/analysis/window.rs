use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Rectangular,
    #[default]
    Hann,
}

impl Window {
    /// Periodic (DFT-even) coefficients of length `n`.
    pub fn coefficients(&self, n: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; n],
            Window::Hann => (0..n)
                .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
                .collect(),
        }
    }
}

/// Second-moment kernel of a segment-averaged spectral estimate.
///
/// For locally white input, the covariance between averaged periodogram (or
/// cross-periodogram) values `d` bins apart is the single-segment variance times
/// `H(d) / n_segments`, where
/// `H(d) = sum_j (1 - |j|/n_segments) |g(d, j)|^2` and
/// `g(d, j) = sum_n w_n w_{n + j step} exp(-2 pi i d n / N) / sum_n w_n^2`.
pub fn overlap_kernel(window: &[f64], step: usize, n_segments: usize, d: i64) -> f64 {
    let n = window.len();
    let norm: f64 = window.iter().map(|w| w * w).sum();
    let mut total = 0.0;
    let mut j = 0usize;
    while j < n_segments && j * step < n {
        let shift = j * step;
        let mut g = Complex64::new(0.0, 0.0);
        for i in 0..(n - shift) {
            let phase = -2.0 * PI * d as f64 * i as f64 / n as f64;
            g += Complex64::from_polar(window[i] * window[i + shift], phase);
        }
        let mag2 = (g / norm).norm_sqr();
        let weight = 1.0 - j as f64 / n_segments as f64;
        total += if j == 0 { mag2 } else { 2.0 * weight * mag2 };
        j += 1;
        if step == 0 {
            break;
        }
    }
    total
}

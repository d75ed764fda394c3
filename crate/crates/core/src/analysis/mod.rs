//! Estimation and detection: Welch PSD/CSD/coherence, lagged correlation and
//! template-fit significance.

pub mod correlation;
pub mod detection;
pub mod welch;
pub mod window;

pub use correlation::{cross_correlation, CorrelationResult};
pub use detection::{detection_significance, Detection};
pub use welch::{coherence, coherence_from, welch_cross, welch_csd, welch_psd, CrossSpectrum, SpectrumEstimate, WelchParams};
pub use window::Window;

use serde::{Deserialize, Serialize};

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
/// Planck length at four significant figures, m.
pub const PLANCK_LENGTH: f64 = 1.616e-35;
/// Planck mass at four significant figures, kg (2.176e-5 g).
pub const PLANCK_MASS: f64 = 2.176e-8;
/// CODATA 2018 reduced Planck constant, J s. Used only as a consistency reference.
pub const HBAR_CODATA: f64 = 1.054_571_817e-34;
/// 1 TeV in joules.
pub const TEV: f64 = 1.602_176_634e-7;
pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;

/// Physical scales entering the position algebra and the noise spectrum.
///
/// `c`, `l_p` and `m_p` are primary. `t_p = l_p / c` and `hbar = m_p c^2 t_p`
/// are derived so that the set is exactly self-consistent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub c: f64,
    pub l_p: f64,
    pub t_p: f64,
    pub m_p: f64,
    pub hbar: f64,
}

impl PhysicalConstants {
    pub fn new(c: f64, l_p: f64, m_p: f64) -> Self {
        let t_p = l_p / c;
        Self {
            c,
            l_p,
            t_p,
            m_p,
            hbar: m_p * c * c * t_p,
        }
    }

    /// Same constants with a different length scale; `l_p = 0` is the classical limit.
    pub fn with_planck_length(&self, l_p: f64) -> Self {
        Self::new(self.c, l_p, self.m_p)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::new(SPEED_OF_LIGHT, PLANCK_LENGTH, PLANCK_MASS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planck_time_is_length_over_c() {
        let k = PhysicalConstants::default();
        assert!(((k.c * k.t_p - k.l_p) / k.l_p).abs() < 1e-12);
        assert!((k.t_p - 5.3904e-44).abs() / 5.3904e-44 < 1e-4);
    }

    #[test]
    fn hbar_consistent_with_codata() {
        let k = PhysicalConstants::default();
        assert!(((k.m_p * k.c * k.c * k.t_p - k.hbar) / k.hbar).abs() < 1e-3);
        assert!(((k.hbar - HBAR_CODATA) / HBAR_CODATA).abs() < 1e-3);
    }
}

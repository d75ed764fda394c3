//! Numeric self-check of the algebra and the closed-form spectrum.

use rand::Rng;
use serde::Serialize;

use crate::algebra::{
    angular_uncertainty_bound, commutator_tensor, covariance_residual, dof_counts,
    heisenberg_variance_bound, rest_frame_commutator, scale_estimates, uncertainty_bound,
    FourVector, LorentzTransform, ThreeVector,
};
use crate::constants::{PhysicalConstants, HBAR_CODATA};
use crate::noise_model::HolographicSpectrum;
use crate::synthesis::substream;

/// Seed for the random boost sweep; fixed so reports are reproducible.
const BOOST_SEED: u64 = 0x5eed_b005;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub claim: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: String,
    pub passed: bool,
}

fn rel_check(claim: &str, computed: f64, expected: f64, rel_tol: f64) -> Check {
    Check {
        claim: claim.into(),
        computed,
        expected,
        tolerance: format!("relative {rel_tol:e}"),
        passed: ((computed - expected) / expected).abs() <= rel_tol,
    }
}

fn bound_check(claim: &str, computed: f64, limit: f64) -> Check {
    Check {
        claim: claim.into(),
        computed,
        expected: limit,
        tolerance: "computed <= expected".into(),
        passed: computed <= limit,
    }
}

fn factor_check(claim: &str, computed: f64, expected: f64, factor: f64) -> Check {
    let ratio = computed / expected;
    Check {
        claim: claim.into(),
        computed,
        expected,
        tolerance: format!("within factor {factor}"),
        passed: ratio <= factor && ratio >= 1.0 / factor,
    }
}

fn random_boost(rng: &mut impl Rng) -> LorentzTransform {
    loop {
        let dir: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = ThreeVector(dir).norm();
        if !(0.05..=1.0).contains(&n) {
            continue;
        }
        let speed = rng.random_range(0.0..0.99);
        let beta = [speed * dir[0] / n, speed * dir[1] / n, speed * dir[2] / n];
        let axis: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if ThreeVector(axis).norm() < 0.05 {
            continue;
        }
        let angle = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let (Ok(b), Ok(r)) = (LorentzTransform::boost(beta), LorentzTransform::rotation(axis, angle)) else {
            continue;
        };
        return b.compose(&r);
    }
}

/// Runs every check. Never fails; the verdict is in the returned list.
pub fn run_checks() -> Vec<Check> {
    let k = PhysicalConstants::default();
    let model = HolographicSpectrum::new(40.0, k).expect("40 m is a valid arm length");
    let mut out = Vec::new();

    out.push(rel_check("critical frequency c/(4 pi L), L = 40 m [Hz]", model.f_c, 5.964e5, 1e-3));
    out.push(rel_check("critical frequency vs quoted 6e5 Hz (one significant figure)", model.f_c, 6e5, 0.05));
    out.push(rel_check("first spectral zero c/2L vs quoted 3.75 MHz [Hz]", model.zero(1), 3.75e6, 0.5e4 / 3.75e6));
    out.push(rel_check("l_P = c t_P", k.c * k.t_p, k.l_p, 1e-12));
    out.push(rel_check("hbar = m_P c^2 t_P vs CODATA [J s]", k.hbar, HBAR_CODATA, 1e-3));
    out.push(rel_check(
        "Planck-mass crossover: 2 hbar tau / m_P = 2 c tau l_P, tau = 1 s [m^2]",
        heisenberg_variance_bound(k.m_p, 1.0, &k).unwrap_or(f64::NAN),
        2.0 * k.c * k.l_p,
        1e-12,
    ));

    let mut rng = substream(BOOST_SEED, 0);
    let mut worst_cov: f64 = 0.0;
    let mut worst_reduction: f64 = 0.0;
    let mut antisymmetric = true;
    for _ in 0..100 {
        let x = FourVector([
            rng.random_range(-10.0..10.0),
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
            rng.random_range(-50.0..50.0),
        ]);
        let u = FourVector::velocity([
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
        ])
        .expect("subluminal");
        let boost = random_boost(&mut rng);
        if let Ok(c) = commutator_tensor(&x, &u, &k) {
            antisymmetric &= c.is_antisymmetric();
            // Scale by the larger of |C| and its transported image.
            let transported = {
                let up = c.raised();
                let l = &boost.0;
                let mut m: f64 = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        let mut s = 0.0;
                        for mu in 0..4 {
                            for nu in 0..4 {
                                s += l[a][mu] * up[mu][nu] * l[b][nu];
                            }
                        }
                        m = m.max(s.abs());
                    }
                }
                m
            };
            if let Ok(r) = covariance_residual(&x, &u, &boost, &k) {
                worst_cov = worst_cov.max(r / transported.max(c.max_norm()));
            } else {
                worst_cov = f64::INFINITY;
            }
        }
        let rest = commutator_tensor(&x, &FourVector::REST_VELOCITY, &k).expect("rest velocity is valid");
        let block = rest.spatial_block();
        let direct = rest_frame_commutator(&x.spatial(), &k);
        let scale = x.spatial().norm() * k.l_p;
        for i in 0..3 {
            for j in 0..3 {
                worst_reduction = worst_reduction.max((block[i][j] - direct[i][j]).abs() / scale);
            }
        }
    }
    out.push(Check {
        claim: "commutator antisymmetry, 100 random inputs (exact)".into(),
        computed: if antisymmetric { 0.0 } else { 1.0 },
        expected: 0.0,
        tolerance: "exact".into(),
        passed: antisymmetric,
    });
    out.push(bound_check("rest-frame reduction, max relative deviation", worst_reduction, 1e-15));
    out.push(bound_check("Lorentz covariance residual / |C|, 100 random boosts", worst_cov, 1e-10));

    let sep = ThreeVector::new(0.0, 0.0, 40.0);
    let bound = uncertainty_bound(&sep, 1, 2, &k).unwrap_or(f64::NAN);
    out.push(rel_check("uncertainty bound, 40 m separation [m^2]", bound, 3.232e-34, 1e-3));
    out.push(factor_check("transverse rms sqrt(bound) vs ten attometers [m]", bound.sqrt(), 1e-17, 3.0));
    out.push(rel_check(
        "angular bound, 40 m",
        angular_uncertainty_bound(40.0, &k).unwrap_or(f64::NAN),
        2.02e-37,
        1e-3,
    ));
    let lab = scale_estimates(5.0, &k).expect("positive length");
    out.push(factor_check("equivalent speed at 5 m vs 1 cm/yr [cm/yr]", lab.v_equivalent_cm_per_year(), 1.0, 3.0));
    out.push(factor_check("Planck lengths across a few meters vs 1e36", lab.n, 1e36, 10.0));
    out.push(factor_check("excursion sqrt(c tau l_P) at 4 m vs ten attometers [m]", scale_estimates(4.0, &k).map(|s| s.excursion_rms).unwrap_or(f64::NAN), 1e-17, 3.0));
    out.push(factor_check("m_P c^2 / TeV vs 1e16", lab.n_tev, 1e16, 3.0));
    let dof = dof_counts(40.0, &k).expect("positive length");
    out.push(Check {
        claim: "holographic count N_total = N_radial N_transverse".into(),
        computed: dof.total,
        expected: dof.radial * dof.transverse,
        tolerance: "exact".into(),
        passed: dof.total == dof.radial * dof.transverse,
    });

    // Spectrum shape.
    let plateau = model.plateau();
    let mut worst_flat: f64 = 0.0;
    for i in 0..=1000 {
        let f = model.f_c / 20.0 * i as f64 / 1000.0;
        worst_flat = worst_flat.max((model.psd_unchecked(f) / plateau - 1.0).abs());
    }
    out.push(bound_check("plateau flatness below f_c/20 (max relative deviation)", worst_flat, 0.01));
    let worst_zero = (1..=3)
        .map(|n| model.psd_unchecked(model.zero(n)) / plateau)
        .fold(0.0_f64, f64::max);
    out.push(bound_check("PSD at first three zeros / plateau", worst_zero, 1e-6));
    let mut worst_env: f64 = 0.0;
    for f in [1e6, 5e6, 2e7, 1e8] {
        let r = model.envelope_high_f(2.0 * f).unwrap_or(f64::NAN) / model.envelope_high_f(f).unwrap_or(f64::NAN);
        worst_env = worst_env.max((r - 0.25).abs());
    }
    out.push(bound_check("envelope f^-2 law: |E(2f)/E(f) - 1/4|", worst_env, 1e-9));
    let mut worst_fourier: f64 = 0.0;
    for i in 0..1000 {
        let f = 10.0 * model.f_c * i as f64 / 999.0;
        let numeric = cosine_transform_of_triangle(&model, f);
        let exact = model.psd_unchecked(f);
        worst_fourier = worst_fourier.max((numeric - exact).abs() / exact.max(1e-6 * plateau));
    }
    out.push(bound_check("cosine transform of triangle vs PSD, 1000 frequencies", worst_fourier, 1e-3));
    out
}

/// `2 int_0^T C(tau) cos(2 pi f tau) dtau` by composite Simpson.
fn cosine_transform_of_triangle(model: &HolographicSpectrum, f: f64) -> f64 {
    let t = model.coherence_time();
    let n = 2000;
    let h = t / n as f64;
    let g = |tau: f64| model.analytic_autocorrelation(tau) * (2.0 * std::f64::consts::PI * f * tau).cos();
    let mut s = g(0.0) + g(t);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
    }
    2.0 * s * h / 3.0
}

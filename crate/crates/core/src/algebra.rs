//! Noncommuting position algebra for macroscopic bodies.
//!
//! Position operators along different directions obey
//! `[x_mu, x_nu] = i * xbar^kappa * Ubar^lambda * eps_{mu nu kappa lambda} * l_P`.
//! Operators are not represented; a commutator is stored as the real
//! coefficient of `i`, in square meters.
//!
//! Index conventions: four-vector index 0 is time, 1..=3 are spatial.
//! The Levi-Civita symbol is fixed by `eps_{1230} = +1`, so the rest-frame
//! reduction gives `eps_{123} = +1` with no sign change. Lorentz checks use the
//! metric signature `(+, -, -, -)`.

use serde::{Deserialize, Serialize};

use crate::constants::{PhysicalConstants, SECONDS_PER_YEAR, TEV};
use crate::error::{Error, Result};

/// Minkowski metric diagonal.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

const VELOCITY_NORM_TOL: f64 = 1e-9;
const METRIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const REST_VELOCITY: FourVector = FourVector([1.0, 0.0, 0.0, 0.0]);

    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self([t, x, y, z])
    }

    /// Minkowski inner product with signature (+,-,-,-).
    pub fn dot(&self, other: &FourVector) -> f64 {
        (0..4).map(|i| METRIC[i] * self.0[i] * other.0[i]).sum()
    }

    /// Dimensionless 4-velocity of a body moving with 3-velocity `beta` (units of c).
    pub fn velocity(beta: [f64; 3]) -> Result<Self> {
        let b2: f64 = beta.iter().map(|b| b * b).sum();
        if b2 >= 1.0 {
            return Err(Error::Validation(format!(
                "|beta| = {} is not subluminal",
                b2.sqrt()
            )));
        }
        let gamma = 1.0 / (1.0 - b2).sqrt();
        Ok(Self([gamma, gamma * beta[0], gamma * beta[1], gamma * beta[2]]))
    }

    /// Checks `U.U = 1` to 1e-9.
    pub fn validate_velocity(&self) -> Result<()> {
        let norm = self.dot(self);
        if !norm.is_finite() || (norm - 1.0).abs() > VELOCITY_NORM_TOL {
            return Err(Error::Validation(format!(
                "4-velocity {:?} has U.U = {norm}, expected 1",
                self.0
            )));
        }
        Ok(())
    }

    pub fn spatial(&self) -> ThreeVector {
        ThreeVector([self.0[1], self.0[2], self.0[3]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeVector(pub [f64; 3]);

impl ThreeVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Antisymmetric coefficients `C` with `[x_mu, x_nu] = i C_{mu nu}` (lower indices, m^2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorTensor(pub [[f64; 4]; 4]);

impl CommutatorTensor {
    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.0[mu][nu]
    }

    pub fn max_norm(&self) -> f64 {
        max_abs(&self.0)
    }

    /// Components with both indices raised by the metric.
    pub fn raised(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for mu in 0..4 {
            for nu in 0..4 {
                out[mu][nu] = METRIC[mu] * METRIC[nu] * self.0[mu][nu];
            }
        }
        out
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..4).all(|mu| (0..4).all(|nu| self.0[mu][nu] == -self.0[nu][mu]))
    }

    /// Spatial 3x3 block (indices 1..=3).
    pub fn spatial_block(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = self.0[i + 1][j + 1];
            }
        }
        out
    }
}

/// A homogeneous Lorentz transformation acting on contravariant vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzTransform(pub [[f64; 4]; 4]);

impl LorentzTransform {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self(m)
    }

    /// Validated construction from a raw matrix.
    pub fn from_matrix(m: [[f64; 4]; 4]) -> Result<Self> {
        let t = Self(m);
        t.validate()?;
        Ok(t)
    }

    /// Pure boost with velocity `beta` (units of c).
    pub fn boost(beta: [f64; 3]) -> Result<Self> {
        let b2: f64 = beta.iter().map(|b| b * b).sum();
        if b2 >= 1.0 {
            return Err(Error::Validation(format!(
                "boost speed {} is not subluminal",
                b2.sqrt()
            )));
        }
        let mut m = Self::identity().0;
        if b2 == 0.0 {
            return Ok(Self(m));
        }
        let gamma = 1.0 / (1.0 - b2).sqrt();
        m[0][0] = gamma;
        for i in 0..3 {
            m[0][i + 1] = gamma * beta[i];
            m[i + 1][0] = gamma * beta[i];
            for j in 0..3 {
                m[i + 1][j + 1] += (gamma - 1.0) * beta[i] * beta[j] / b2;
            }
        }
        Ok(Self(m))
    }

    /// Spatial rotation by `angle` (rad) about `axis` (Rodrigues).
    pub fn rotation(axis: [f64; 3], angle: f64) -> Result<Self> {
        let n = ThreeVector(axis).norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Argument("rotation axis must be a nonzero finite vector".into()));
        }
        let k = [axis[0] / n, axis[1] / n, axis[2] / n];
        let (s, c) = angle.sin_cos();
        let mut m = Self::identity().0;
        for i in 0..3 {
            for j in 0..3 {
                let cross = match (i, j) {
                    (0, 1) => -k[2],
                    (0, 2) => k[1],
                    (1, 0) => k[2],
                    (1, 2) => -k[0],
                    (2, 0) => -k[1],
                    (2, 1) => k[0],
                    _ => 0.0,
                };
                let delta = if i == j { 1.0 } else { 0.0 };
                m[i + 1][j + 1] = c * delta + s * cross + (1.0 - c) * k[i] * k[j];
            }
        }
        Ok(Self(m))
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &LorentzTransform) -> Self {
        Self(matmul(&self.0, &other.0))
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        let mut out = [0.0; 4];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|nu| self.0[mu][nu] * v.0[nu]).sum();
        }
        FourVector(out)
    }

    pub fn determinant(&self) -> f64 {
        det4(&self.0)
    }

    /// Max-norm of `L^T eta L - eta`.
    pub fn metric_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let v: f64 = (0..4).map(|mu| self.0[mu][a] * METRIC[mu] * self.0[mu][b]).sum();
                let target = if a == b { METRIC[a] } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    /// Metric preservation to 1e-10 (scaled by the squared matrix size for large boosts)
    /// and unit determinant. Improper transforms are rejected: the Levi-Civita symbol
    /// is a pseudotensor and the commutator would flip sign under parity.
    pub fn validate(&self) -> Result<()> {
        let scale = max_abs(&self.0).max(1.0);
        let residual = self.metric_residual();
        if !residual.is_finite() || residual > METRIC_TOL * scale * scale {
            return Err(Error::Validation(format!(
                "transform does not preserve the metric (residual {residual:e})"
            )));
        }
        if self.determinant() <= 0.0 {
            return Err(Error::Validation("transform is not proper (det = -1)".into()));
        }
        Ok(())
    }
}

/// Totally antisymmetric symbol with `eps_{1230} = +1`.
pub fn levi_civita4(mu: usize, nu: usize, kappa: usize, lambda: usize) -> Result<i8> {
    let idx = [mu, nu, kappa, lambda];
    if idx.iter().any(|&i| i > 3) {
        return Err(Error::Argument(format!("Levi-Civita index out of range: {idx:?}")));
    }
    // (1,2,3,0) is an odd permutation of (0,1,2,3); eps_{0123} = -1.
    Ok(-permutation_sign(idx))
}

/// Three-index symbol with `eps_{123} = +1`, indices 1..=3.
pub fn levi_civita3(i: usize, j: usize, k: usize) -> Result<i8> {
    if [i, j, k].iter().any(|&v| !(1..=3).contains(&v)) {
        return Err(Error::Argument(format!("spatial index out of range: {:?}", [i, j, k])));
    }
    levi_civita4(i, j, k, 0)
}

fn permutation_sign<const N: usize>(mut idx: [usize; N]) -> i8 {
    let mut sign = 1;
    for i in 0..N {
        for j in (i + 1)..N {
            if idx[i] == idx[j] {
                return 0;
            }
        }
    }
    for i in 0..N {
        while idx[i] != i {
            let t = idx[i];
            idx.swap(i, t);
            sign = -sign;
        }
    }
    sign
}

/// `C_{mu nu} = sum_{kappa lambda} xbar^kappa Ubar^lambda eps_{mu nu kappa lambda} l_P`.
pub fn commutator_tensor(
    xbar: &FourVector,
    ubar: &FourVector,
    consts: &PhysicalConstants,
) -> Result<CommutatorTensor> {
    ubar.validate_velocity()?;
    Ok(contract(xbar, ubar, consts.l_p))
}

fn contract(xbar: &FourVector, ubar: &FourVector, l_p: f64) -> CommutatorTensor {
    let mut c = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in (mu + 1)..4 {
            let mut sum = 0.0;
            for kappa in 0..4 {
                for lambda in 0..4 {
                    let eps = levi_civita4(mu, nu, kappa, lambda).unwrap_or(0);
                    if eps != 0 {
                        sum += f64::from(eps) * xbar.0[kappa] * ubar.0[lambda];
                    }
                }
            }
            c[mu][nu] = sum * l_p;
            c[nu][mu] = -c[mu][nu];
        }
    }
    CommutatorTensor(c)
}

/// Rest-frame commutator `C_{ij} = sum_k xbar^k eps_{ijk} l_P`; `[i][j]` holds axes `i+1, j+1`.
pub fn rest_frame_commutator(xbar3: &ThreeVector, consts: &PhysicalConstants) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let k = 3 - i - j;
            let eps = levi_civita3(i + 1, j + 1, k + 1).unwrap_or(0);
            c[i][j] = f64::from(eps) * xbar3.0[k] * consts.l_p;
            c[j][i] = -c[i][j];
        }
    }
    c
}

/// Max-norm difference between the commutator built from transformed vectors and
/// the Lorentz transport of the original commutator (both with raised indices).
pub fn covariance_residual(
    xbar: &FourVector,
    ubar: &FourVector,
    boost: &LorentzTransform,
    consts: &PhysicalConstants,
) -> Result<f64> {
    boost.validate()?;
    let original = commutator_tensor(xbar, ubar, consts)?.raised();
    let moved_u = boost.apply(ubar);
    // The transported velocity is valid by construction; its norm is not rechecked.
    let moved = contract(&boost.apply(xbar), &moved_u, consts.l_p).raised();
    let lam = &boost.0;
    let mut transported = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut s = 0.0;
            for mu in 0..4 {
                for nu in 0..4 {
                    s += lam[a][mu] * original[mu][nu] * lam[b][nu];
                }
            }
            transported[a][b] = s;
        }
    }
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            worst = worst.max((moved[a][b] - transported[a][b]).abs());
        }
    }
    Ok(worst)
}

/// Lower bound on `dx_i dx_j`: `|sum_k xbar^k eps_{ijk}| l_P / 2`. Axes `i`, `j` are 1..=3.
pub fn uncertainty_bound(
    xbar3: &ThreeVector,
    i: usize,
    j: usize,
    consts: &PhysicalConstants,
) -> Result<f64> {
    if !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(Error::Argument(format!("spatial axes must be 1..=3, got ({i}, {j})")));
    }
    if i == j {
        return Err(Error::Argument("uncertainty bound needs two distinct directions".into()));
    }
    let mut sum = 0.0;
    for k in 1..=3 {
        sum += f64::from(levi_civita3(i, j, k)?) * xbar3.0[k - 1];
    }
    Ok(sum.abs() * consts.l_p / 2.0)
}

/// Lower bound on `dtheta_1 dtheta_2` for a body at distance `separation`.
pub fn angular_uncertainty_bound(separation: f64, consts: &PhysicalConstants) -> Result<f64> {
    if !(separation > 0.0) {
        return Err(Error::Argument(format!("separation must be positive, got {separation}")));
    }
    Ok(consts.l_p / (2.0 * separation))
}

/// Standard quantum limit on the variance of a position difference over `tau`: `2 hbar tau / m`.
pub fn heisenberg_variance_bound(mass: f64, tau: f64, consts: &PhysicalConstants) -> Result<f64> {
    if !(mass > 0.0) || !(tau > 0.0) {
        return Err(Error::Argument(format!(
            "mass and duration must be positive, got m = {mass}, tau = {tau}"
        )));
    }
    Ok(2.0 * consts.hbar * tau / mass)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DofCounts {
    pub radial: f64,
    pub transverse: f64,
    pub total: f64,
}

/// Holographic counting for a region of size `length`: `N` radial states,
/// `N` transverse states, `N^2` in total.
pub fn dof_counts(length: f64, consts: &PhysicalConstants) -> Result<DofCounts> {
    if !(length > 0.0) {
        return Err(Error::Argument(format!("length must be positive, got {length}")));
    }
    let radial = length / consts.l_p;
    // |x|^2 / (dx_i dx_j) with dx_i dx_j ~ |x| l_P
    let transverse = length * length / (length * consts.l_p);
    Ok(DofCounts {
        radial,
        transverse,
        total: radial * transverse,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleEstimates {
    /// Planck lengths across the apparatus.
    pub n: f64,
    /// `c / sqrt(N)`, m/s.
    pub v_equivalent: f64,
    /// `2L/c`, s.
    pub coherence_time: f64,
    /// `sqrt(c * coherence_time * l_P)`, m.
    pub excursion_rms: f64,
    /// `m_P c^2 / 1 TeV`.
    pub n_tev: f64,
}

impl ScaleEstimates {
    pub fn v_equivalent_cm_per_year(&self) -> f64 {
        self.v_equivalent * SECONDS_PER_YEAR * 100.0
    }
}

pub fn scale_estimates(length: f64, consts: &PhysicalConstants) -> Result<ScaleEstimates> {
    if !(length > 0.0) {
        return Err(Error::Argument(format!("length must be positive, got {length}")));
    }
    let n = length / consts.l_p;
    let coherence_time = 2.0 * length / consts.c;
    Ok(ScaleEstimates {
        n,
        v_equivalent: consts.c / n.sqrt(),
        coherence_time,
        excursion_rms: (consts.c * coherence_time * consts.l_p).sqrt(),
        n_tev: consts.m_p * consts.c * consts.c / TEV,
    })
}

fn matmul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn max_abs(m: &[[f64; 4]; 4]) -> f64 {
    m.iter().flatten().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let minor = |r: usize, c: usize| -> f64 {
        let mut sub = [[0.0; 3]; 3];
        let mut si = 0;
        for (i, row) in m.iter().enumerate() {
            if i == r {
                continue;
            }
            let mut sj = 0;
            for (j, v) in row.iter().enumerate() {
                if j == c {
                    continue;
                }
                sub[si][sj] = *v;
                sj += 1;
            }
            si += 1;
        }
        sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
            - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
            + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0])
    };
    (0..4)
        .map(|c| if c % 2 == 0 { 1.0 } else { -1.0 } * m[0][c] * minor(0, c))
        .sum()
}

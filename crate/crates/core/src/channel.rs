//! Scenario description, link geometry, path gains, and correlated channel
//! realizations for the BS -> RIS 1 -> RIS 2 -> user network.
//!
//! Sign conventions follow the received-signal model: the BS applies the
//! conjugate-based MRT precoder and the useful gain is `h^T w` with a plain
//! transpose, so conjugation happens exactly once (in the precoder).

use num_complex::Complex64;

use crate::correlation::{BsCorrelationSpec, CorrelationSet, RisGeometry};
use crate::error::{Error, Result};
use crate::matrix::{CMat, CVec};
use crate::stochastic::{complex_gaussian_matrix, complex_gaussian_vector, SimRng};

/// Converts a dBm figure to watts: `10^((x - 30) / 10)`.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// 2D node placement in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLayout {
    pub bs: [f64; 2],
    pub ris1: [f64; 2],
    pub ris2: [f64; 2],
    pub users: Vec<[f64; 2]>,
}

impl NodeLayout {
    /// Users evenly spaced on the segment from `(50, 0)` to `(70, 0)`:
    /// `x_k = 50 + (k-1)/(K-1) * 20`. A single user sits at the segment start.
    pub fn standard(users: usize) -> Self {
        let user_positions = (0..users)
            .map(|k| {
                let frac = if users > 1 {
                    k as f64 / (users as f64 - 1.0)
                } else {
                    0.0
                };
                [50.0 + 20.0 * frac, 0.0]
            })
            .collect();
        Self {
            bs: [0.0, 0.0],
            ris1: [0.0, 15.0],
            ris2: [60.0, 15.0],
            users: user_positions,
        }
    }
}

/// Full scenario description consumed by the analytics and Monte Carlo paths.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub bs_correlation: BsCorrelationSpec,
    pub ris1: RisGeometry,
    pub ris2: RisGeometry,
    pub layout: NodeLayout,
    /// Path-loss exponent alpha.
    pub path_loss_exponent: f64,
    /// Carrier wavelength in meters.
    pub wavelength: f64,
    /// Noise power sigma^2 in watts.
    pub noise_power_w: f64,
    /// Total BS power budget in watts.
    pub total_power_w: f64,
    /// Per-user transmit powers in watts; must sum to at most the budget.
    pub user_powers_w: Vec<f64>,
    /// Von Mises phase-noise concentration.
    pub kappa: f64,
    /// Monte Carlo trial count.
    pub trials: usize,
    /// Base RNG seed; trial `t` uses substream `t`.
    pub seed: u64,
}

impl SystemConfig {
    pub fn bs_antennas(&self) -> usize {
        self.bs_correlation.antennas
    }

    pub fn users(&self) -> usize {
        self.layout.users.len()
    }

    /// Equal split of a total budget across `users`.
    pub fn equal_power_split(total_w: f64, users: usize) -> Vec<f64> {
        vec![total_w / users as f64; users]
    }

    pub fn validate(&self) -> Result<()> {
        self.bs_correlation.validate()?;
        self.ris1.validate()?;
        self.ris2.validate()?;
        if self.users() == 0 {
            return Err(Error::InvalidConfig {
                reason: "at least one user is required".into(),
            });
        }
        if self.user_powers_w.len() != self.users() {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "power allocation has {} entries for {} users",
                    self.user_powers_w.len(),
                    self.users()
                ),
            });
        }
        let total: f64 = self.user_powers_w.iter().sum();
        if total > self.total_power_w * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "allocated power {total} W exceeds budget {} W",
                    self.total_power_w
                ),
            });
        }
        if self.user_powers_w.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidConfig {
                reason: "per-user powers must be nonnegative and finite".into(),
            });
        }
        for (name, v) in [
            ("path_loss_exponent", self.path_loss_exponent),
            ("wavelength", self.wavelength),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::InvalidConfig {
                    reason: format!("{name} must be positive, got {v}"),
                });
            }
        }
        if self.noise_power_w < 0.0 || !self.noise_power_w.is_finite() {
            return Err(Error::InvalidConfig {
                reason: format!("noise power must be nonnegative, got {}", self.noise_power_w),
            });
        }
        if self.kappa < 0.0 || !self.kappa.is_finite() {
            return Err(Error::InvalidKappa { kappa: self.kappa });
        }
        derive_geometry(self)?;
        Ok(())
    }
}

/// Link distances in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceTable {
    pub bs_ris1: f64,
    pub bs_ris2: f64,
    pub ris_ris: f64,
    pub ris1_user: Vec<f64>,
    pub ris2_user: Vec<f64>,
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Euclidean distances for every modeled link. Links through which no signal
/// flows (direct BS-user) are not computed.
pub fn derive_geometry(config: &SystemConfig) -> Result<DistanceTable> {
    let l = &config.layout;
    let checked = |d: f64, link: String| {
        if d == 0.0 {
            Err(Error::CoincidentNodes { link })
        } else {
            Ok(d)
        }
    };
    Ok(DistanceTable {
        bs_ris1: checked(distance(l.bs, l.ris1), "BS-RIS1".into())?,
        bs_ris2: checked(distance(l.bs, l.ris2), "BS-RIS2".into())?,
        ris_ris: checked(distance(l.ris1, l.ris2), "RIS1-RIS2".into())?,
        ris1_user: l
            .users
            .iter()
            .enumerate()
            .map(|(k, &u)| checked(distance(l.ris1, u), format!("RIS1-user{k}")))
            .collect::<Result<_>>()?,
        ris2_user: l
            .users
            .iter()
            .enumerate()
            .map(|(k, &u)| checked(distance(l.ris2, u), format!("RIS2-user{k}")))
            .collect::<Result<_>>()?,
    })
}

/// Distance-based gain `d^{-alpha} * area`. The inter-RIS link passes the
/// squared element area.
pub fn path_gain(distance: f64, alpha: f64, area: f64) -> Result<f64> {
    if distance <= 0.0 || !distance.is_finite() {
        return Err(Error::InvalidDistance { distance });
    }
    Ok(distance.powf(-alpha) * area)
}

/// Average power gains of every link group.
///
/// Tests zero individual fields to isolate the double- or single-reflection
/// paths; the channel draw honors whatever gains are supplied.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGains {
    /// beta_B1: BS to each RIS 1 element.
    pub bs_ris1: f64,
    /// beta_B2: BS to each RIS 2 element.
    pub bs_ris2: f64,
    /// beta_G: RIS 1 to RIS 2.
    pub inter_ris: f64,
    /// beta_1k per user.
    pub ris1_user: Vec<f64>,
    /// beta_2k per user.
    pub ris2_user: Vec<f64>,
}

impl PathGains {
    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        let d = derive_geometry(config)?;
        let alpha = config.path_loss_exponent;
        let a1 = config.ris1.element_area();
        let a2 = config.ris2.element_area();
        Ok(Self {
            bs_ris1: path_gain(d.bs_ris1, alpha, a1)?,
            bs_ris2: path_gain(d.bs_ris2, alpha, a2)?,
            inter_ris: path_gain(d.ris_ris, alpha, a1 * a2)?,
            ris1_user: d
                .ris1_user
                .iter()
                .map(|&dist| path_gain(dist, alpha, a1))
                .collect::<Result<_>>()?,
            ris2_user: d
                .ris2_user
                .iter()
                .map(|&dist| path_gain(dist, alpha, a2))
                .collect::<Result<_>>()?,
        })
    }

    pub fn users(&self) -> usize {
        self.ris1_user.len()
    }
}

/// Deterministic reflect phases of both surfaces, in radians. The applied
/// coefficients `exp(j theta)` are unit-modulus by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    pub theta1: Vec<f64>,
    pub theta2: Vec<f64>,
}

/// One draw of every fading link.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// BS to RIS 1, M x N1.
    pub h_b1: CMat,
    /// BS to RIS 2, M x N2.
    pub h_b2: CMat,
    /// RIS 1 to RIS 2, N1 x N2.
    pub g: CMat,
    /// RIS 1 to user k, length N1.
    pub q1: Vec<CVec>,
    /// RIS 2 to user k, length N2.
    pub q2: Vec<CVec>,
}

/// Draws one independent realization of all links with the Kronecker
/// correlation structure.
///
/// Draw order is fixed: H_B1, H_B2, G, then (q_1k, q_2k) per user in index
/// order. Changing the order would silently break reproducibility.
pub fn draw_channels(
    gains: &PathGains,
    corr: &CorrelationSet,
    rng: &mut SimRng,
) -> ChannelRealization {
    let m = corr.bs_antennas();
    let n1 = corr.ris1_elements();
    let n2 = corr.ris2_elements();

    let scaled = |mat: CMat, beta: f64| mat.scale(beta.sqrt());

    let h_b1 = scaled(
        &corr.sqrt_bs * complex_gaussian_matrix(m, n1, rng) * &corr.sqrt_ris1,
        gains.bs_ris1,
    );
    let h_b2 = scaled(
        &corr.sqrt_bs * complex_gaussian_matrix(m, n2, rng) * &corr.sqrt_ris2,
        gains.bs_ris2,
    );
    let g = scaled(
        &corr.sqrt_ris1 * complex_gaussian_matrix(n1, n2, rng) * &corr.sqrt_ris2,
        gains.inter_ris,
    );
    let mut q1 = Vec::with_capacity(gains.users());
    let mut q2 = Vec::with_capacity(gains.users());
    for k in 0..gains.users() {
        q1.push((&corr.sqrt_ris1 * complex_gaussian_vector(n1, rng)).scale(gains.ris1_user[k].sqrt()));
        q2.push((&corr.sqrt_ris2 * complex_gaussian_vector(n2, rng)).scale(gains.ris2_user[k].sqrt()));
    }
    ChannelRealization { h_b1, h_b2, g, q1, q2 }
}

/// Effective downlink channel of user `k`:
///
/// `h_k = H_B1 T1 G T2 q_2k + H_B1 T1 q_1k + H_B2 T2 q_2k`
///
/// with `T_i = diag(exp(j(theta_i + noise_i)))`; the deterministic phase and
/// the phase-noise rotation commute on the diagonal so they simply add.
pub fn effective_channel(
    real: &ChannelRealization,
    phases: &PhaseConfig,
    noise1: &[f64],
    noise2: &[f64],
    user: usize,
) -> Result<CVec> {
    let n1 = real.h_b1.ncols();
    let n2 = real.h_b2.ncols();
    if phases.theta1.len() != n1
        || noise1.len() != n1
        || phases.theta2.len() != n2
        || noise2.len() != n2
    {
        return Err(Error::DimensionMismatch {
            context: "effective_channel",
            left: format!("N1 = {n1}, N2 = {n2}"),
            right: format!(
                "theta1[{}], noise1[{}], theta2[{}], noise2[{}]",
                phases.theta1.len(),
                noise1.len(),
                phases.theta2.len(),
                noise2.len()
            ),
        });
    }
    let t1: Vec<Complex64> = phases
        .theta1
        .iter()
        .zip(noise1)
        .map(|(&a, &b)| Complex64::from_polar(1.0, a + b))
        .collect();
    let t2: Vec<Complex64> = phases
        .theta2
        .iter()
        .zip(noise2)
        .map(|(&a, &b)| Complex64::from_polar(1.0, a + b))
        .collect();

    // a = T2 q_2k; double and second single hop share it
    let a = CVec::from_iterator(n2, real.q2[user].iter().zip(&t2).map(|(q, t)| q * t));
    // b = T1 (G a + q_1k)
    let ga = &real.g * &a;
    let b = CVec::from_iterator(
        n1,
        ga.iter()
            .zip(real.q1[user].iter())
            .zip(&t1)
            .map(|((g, q), t)| (g + q) * t),
    );
    Ok(&real.h_b1 * b + &real.h_b2 * a)
}

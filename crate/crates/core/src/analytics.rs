//! Closed-form rate analysis: the channel-strength statistic eta, the SINR
//! lower bound under MRT, the effective-channel covariance, and the general
//! covariance-based hardening bound it collapses from.
//!
//! eta consumes precomputed phase-weighted traces rather than matrices, so
//! sweeps never pay O(N^3) per evaluation; the traces come from
//! [`crate::correlation::phase_weighted_trace`] and are cached alongside the
//! correlation matrices.

use crate::channel::{PathGains, PhaseConfig};
use crate::correlation::{phase_weighted_trace, CorrelationSet};
use crate::error::{Error, Result};
use crate::matrix::{trace_product, CMat};

/// Scalar inputs of the eta closed form for one user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaInputs {
    /// beta_B1.
    pub beta_b1: f64,
    /// beta_B2.
    pub beta_b2: f64,
    /// beta_1k.
    pub beta_1k: f64,
    /// beta_2k.
    pub beta_2k: f64,
    /// beta_G.
    pub beta_g: f64,
    /// Von Mises characteristic-function value.
    pub varphi: f64,
    /// RIS 1 element count.
    pub n1: usize,
    /// RIS 2 element count.
    pub n2: usize,
    /// v_1 = tr(R_1 Theta_1 R_1 Theta_1^H).
    pub v1: f64,
    /// v_2 = tr(R_2 Theta_2 R_2 Theta_2^H).
    pub v2: f64,
}

impl EtaInputs {
    /// Assembles the per-user inputs from path gains and weighted traces.
    pub fn for_user(
        gains: &PathGains,
        varphi: f64,
        n1: usize,
        n2: usize,
        v1: f64,
        v2: f64,
        user: usize,
    ) -> Self {
        Self {
            beta_b1: gains.bs_ris1,
            beta_b2: gains.bs_ris2,
            beta_1k: gains.ris1_user[user],
            beta_2k: gains.ris2_user[user],
            beta_g: gains.inter_ris,
            varphi,
            n1,
            n2,
            v1,
            v2,
        }
    }
}

/// Channel-strength statistic eta_k.
///
/// Aggregates path gains, correlation traces, and phase-noise attenuation:
/// the double-reflection term carries varphi^4 while single reflections carry
/// varphi^2, so cascaded links lose the most to phase noise.
pub fn eta_k(inputs: &EtaInputs) -> Result<f64> {
    let p = inputs.varphi;
    if !(0.0..=1.0).contains(&p) || !p.is_finite() {
        return Err(Error::InvalidCf { varphi: p });
    }
    let p2 = p * p;
    let p4 = p2 * p2;
    let n1 = inputs.n1 as f64;
    let n2 = inputs.n2 as f64;
    let double = inputs.beta_b1
        * inputs.beta_2k
        * inputs.beta_g
        * (inputs.v2 * (p4 * inputs.v1 + (p2 - p4) * n1)
            + n2 * ((p2 - p4) * inputs.v1 + (1.0 - p2) * (1.0 - p2) * n1));
    let single_1 = inputs.beta_b1 * inputs.beta_1k * (p2 * inputs.v1 + (1.0 - p2) * n1);
    let single_2 = inputs.beta_b2 * inputs.beta_2k * (p2 * inputs.v2 + (1.0 - p2) * n2);
    Ok(double + single_1 + single_2)
}

/// eta_k under optimal reflect beamforming: the weighted traces reach their
/// maxima tr(R_i^2).
pub fn eta_k_optimal(inputs: &EtaInputs, tr_r1_sq: f64, tr_r2_sq: f64) -> Result<f64> {
    eta_k(&EtaInputs {
        v1: tr_r1_sq,
        v2: tr_r2_sq,
        ..*inputs
    })
}

/// Both phase-weighted traces (v_1, v_2) for a phase configuration.
pub fn weighted_traces(corr: &CorrelationSet, phases: &PhaseConfig) -> Result<(f64, f64)> {
    Ok((
        phase_weighted_trace(&corr.r_ris1, &phases.theta1)?,
        phase_weighted_trace(&corr.r_ris2, &phases.theta2)?,
    ))
}

/// eta_k evaluated for one user of a full scenario.
pub fn eta_for_user(
    gains: &PathGains,
    corr: &CorrelationSet,
    phases: &PhaseConfig,
    varphi: f64,
    user: usize,
) -> Result<f64> {
    let (v1, v2) = weighted_traces(corr, phases)?;
    eta_k(&EtaInputs::for_user(
        gains,
        varphi,
        corr.ris1_elements(),
        corr.ris2_elements(),
        v1,
        v2,
        user,
    ))
}

/// Lower-bound SINR under MRT:
/// `p_k M^2 / (tr(R_B^2) sum_l p_l + M sigma^2 / eta_k)`.
pub fn sinr_lower_bound(
    p_k: f64,
    sum_powers: f64,
    bs_antennas: usize,
    tr_rb_sq: f64,
    noise_power: f64,
    eta: f64,
) -> Result<f64> {
    if eta <= 0.0 || eta.is_nan() {
        return Err(Error::DegenerateEta { eta });
    }
    let m = bs_antennas as f64;
    Ok(p_k * m * m / (tr_rb_sq * sum_powers + m * noise_power / eta))
}

/// Achievable rate in bits/s/Hz: `log2(1 + sinr)`.
pub fn achievable_rate(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

/// Effective-channel covariance `Psi_k = eta_k R_B`.
pub fn channel_covariance(
    gains: &PathGains,
    corr: &CorrelationSet,
    phases: &PhaseConfig,
    varphi: f64,
    user: usize,
) -> Result<CMat> {
    let eta = eta_for_user(gains, corr, phases, varphi, user)?;
    Ok(corr.r_bs.scale(eta))
}

/// Covariance-based hardening bound for arbitrary PSD covariances:
/// `p_k tr(Psi_k) / (sum_l p_l tr(Psi_k Psi_l) / tr(Psi_l) + sigma^2)`.
///
/// With `Psi_l = eta_l R_B` this collapses algebraically to
/// [`sinr_lower_bound`]; keeping the general form gives an independent
/// consistency check on that collapse.
pub fn general_hardening_sinr(
    covariances: &[CMat],
    powers: &[f64],
    noise_power: f64,
    user: usize,
) -> Result<f64> {
    if covariances.len() != powers.len() {
        return Err(Error::DimensionMismatch {
            context: "general_hardening_sinr",
            left: format!("{} covariances", covariances.len()),
            right: format!("{} powers", powers.len()),
        });
    }
    let psi_k = &covariances[user];
    let tr_k = psi_k.trace().re;
    if tr_k == 0.0 {
        return Err(Error::SingularCovariance { user });
    }
    let mut interference = 0.0;
    for (l, psi_l) in covariances.iter().enumerate() {
        let tr_l = psi_l.trace().re;
        if tr_l == 0.0 {
            return Err(Error::SingularCovariance { user: l });
        }
        interference += powers[l] * trace_product(psi_k, psi_l)?.re / tr_l;
    }
    Ok(powers[user] * tr_k / (interference + noise_power))
}

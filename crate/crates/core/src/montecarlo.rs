//! Monte Carlo estimation of ergodic rates, moment-based bounds, and channel
//! covariances — the empirical counterpart of the closed forms in
//! [`crate::analytics`].
//!
//! Trials are independent: trial `t` draws everything from RNG substream
//! `(seed, t)`, fading and phase noise alike, so results are identical for
//! any thread count. Per-trial outputs are collected in trial order and
//! reduced sequentially; nothing about the accumulation depends on the
//! parallel schedule.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::analytics::{eta_k, weighted_traces, EtaInputs};
use crate::channel::{draw_channels, effective_channel, PathGains, PhaseConfig};
use crate::correlation::CorrelationSet;
use crate::error::{Error, Result};
use crate::matrix::{CMat, CVec};
use crate::stochastic::{substream, PhaseNoiseModel};

/// Instantaneous per-user outcome of a single trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    /// Instantaneous SINR per user.
    pub sinr: Vec<f64>,
    /// Instantaneous rate per user in bits/s/Hz.
    pub rate: Vec<f64>,
}

/// Mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserRateEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Moment-estimated hardening bound for one user. A denominator driven
/// non-positive by sampling noise is reported, not treated as an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentBound {
    pub sinr: f64,
    pub rate: f64,
    pub negative_denominator: bool,
}

/// Side-by-side closed-form and empirical rates for a scenario.
#[derive(Debug, Clone)]
pub struct RateReport {
    /// Closed-form lower bound per user.
    pub closed_form_rate: Vec<f64>,
    /// Monte Carlo ergodic rate per user.
    pub mc_rate: Vec<UserRateEstimate>,
    /// Moment-estimated bound per user.
    pub moment_bound: Vec<MomentBound>,
    pub trials: usize,
    /// Digest of the canonicalized scenario this report was computed from.
    pub config_digest: String,
}

/// Everything one batch of trials needs, borrowed read-only.
#[derive(Debug, Clone)]
pub struct TrialSetup<'a> {
    pub gains: &'a PathGains,
    pub corr: &'a CorrelationSet,
    pub phases: &'a PhaseConfig,
    pub noise_model: PhaseNoiseModel,
    /// Per-user transmit powers in watts.
    pub powers: &'a [f64],
    /// sigma^2 in watts.
    pub noise_power_w: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Aggregated statistics of a trial batch.
#[derive(Debug, Clone)]
pub struct McStats {
    pub trials: usize,
    /// eta_k used for the statistical MRT normalization.
    pub eta: Vec<f64>,
    /// Ergodic rate estimate per user.
    pub rate: Vec<UserRateEstimate>,
    /// Sample mean of h_k^T w_k per user.
    pub mean_self_gain: Vec<Complex64>,
    /// Sample mean of |h_k^T w_l|^2, indexed (k, l).
    pub mean_cross_power: DMatrix<f64>,
    /// Sample mean of h_k h_k^H per user, symmetrized.
    pub covariance: Vec<CMat>,
}

/// MRT precoder `w_k = h_k^* / sqrt(M eta_k)`.
///
/// The normalizer is the statistical `E{||h_k||^2} = M eta_k`, not the
/// per-trial norm; the hardening bound's equality step relies on that.
pub fn mrt_precoder(h: &CVec, eta: f64, bs_antennas: usize) -> Result<CVec> {
    if eta <= 0.0 || eta.is_nan() {
        return Err(Error::DegenerateEta { eta });
    }
    let scale = 1.0 / (bs_antennas as f64 * eta).sqrt();
    Ok(CVec::from_iterator(
        h.len(),
        h.iter().map(|z| z.conj() * scale),
    ))
}

/// Instantaneous SINR of user `k` under precoders `w_l`:
/// `p_k |h_k^T w_k|^2 / (sum_{l != k} p_l |h_k^T w_l|^2 + sigma^2)`.
pub fn instantaneous_sinr(
    channels: &[CVec],
    precoders: &[CVec],
    powers: &[f64],
    noise_power_w: f64,
    user: usize,
) -> f64 {
    let gain = |l: usize| transpose_dot(&channels[user], &precoders[l]).norm_sqr();
    let interference: f64 = powers
        .iter()
        .enumerate()
        .filter(|&(l, _)| l != user)
        .map(|(l, &p)| p * gain(l))
        .sum();
    powers[user] * gain(user) / (interference + noise_power_w)
}

/// Plain-transpose inner product `a^T b` (no conjugation).
fn transpose_dot(a: &CVec, b: &CVec) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

struct TrialOutput {
    channels: Vec<CVec>,
    /// z[(k, l)] = h_k^T w_l.
    gains: DMatrix<Complex64>,
    rates: Vec<f64>,
}

fn run_one_trial(setup: &TrialSetup<'_>, eta: &[f64], trial: usize) -> Result<TrialOutput> {
    let users = setup.powers.len();
    let m = setup.corr.bs_antennas();
    let mut rng = substream(setup.seed, trial as u64);
    let real = draw_channels(setup.gains, setup.corr, &mut rng);
    let noise1 = setup.noise_model.sample(setup.corr.ris1_elements(), &mut rng);
    let noise2 = setup.noise_model.sample(setup.corr.ris2_elements(), &mut rng);

    let mut channels = Vec::with_capacity(users);
    for k in 0..users {
        channels.push(effective_channel(&real, setup.phases, &noise1, &noise2, k)?);
    }
    let precoders = channels
        .iter()
        .zip(eta)
        .map(|(h, &e)| mrt_precoder(h, e, m))
        .collect::<Result<Vec<_>>>()?;

    let gains = DMatrix::from_fn(users, users, |k, l| {
        transpose_dot(&channels[k], &precoders[l])
    });
    let rates = (0..users)
        .map(|k| {
            let mut interference = 0.0;
            for l in 0..users {
                if l != k {
                    interference += setup.powers[l] * gains[(k, l)].norm_sqr();
                }
            }
            let sinr = setup.powers[k] * gains[(k, k)].norm_sqr()
                / (interference + setup.noise_power_w);
            (1.0 + sinr).log2()
        })
        .collect();
    Ok(TrialOutput {
        channels,
        gains,
        rates,
    })
}

/// Runs a batch of independent trials and aggregates every statistic the
/// estimators need in one pass.
pub fn run_trials(setup: &TrialSetup<'_>) -> Result<McStats> {
    let users = setup.powers.len();
    if users != setup.gains.users() {
        return Err(Error::DimensionMismatch {
            context: "run_trials",
            left: format!("{} powers", users),
            right: format!("{} users in path gains", setup.gains.users()),
        });
    }
    if setup.trials == 0 {
        return Err(Error::InvalidConfig {
            reason: "trial count must be positive".into(),
        });
    }
    let m = setup.corr.bs_antennas();
    let varphi = setup.noise_model.varphi();
    let (v1, v2) = weighted_traces(setup.corr, setup.phases)?;
    let eta: Vec<f64> = (0..users)
        .map(|k| {
            eta_k(&EtaInputs::for_user(
                setup.gains,
                varphi,
                setup.corr.ris1_elements(),
                setup.corr.ris2_elements(),
                v1,
                v2,
                k,
            ))
        })
        .collect::<Result<_>>()?;

    // parallel map, order-preserving collect, then a sequential reduction in
    // trial order: results are bit-identical for any thread count
    let outputs: Vec<TrialOutput> = (0..setup.trials)
        .into_par_iter()
        .map(|t| run_one_trial(setup, &eta, t))
        .collect::<Result<_>>()?;

    let nf = setup.trials as f64;
    let mut covariance = vec![CMat::zeros(m, m); users];
    let mut mean_self_gain = vec![Complex64::new(0.0, 0.0); users];
    let mut mean_cross_power = DMatrix::zeros(users, users);
    let mut rate_sum = vec![0.0f64; users];
    let mut rate_sq_sum = vec![0.0f64; users];
    for out in &outputs {
        for k in 0..users {
            covariance[k] += &out.channels[k] * out.channels[k].adjoint();
            mean_self_gain[k] += out.gains[(k, k)];
            for l in 0..users {
                mean_cross_power[(k, l)] += out.gains[(k, l)].norm_sqr();
            }
            rate_sum[k] += out.rates[k];
            rate_sq_sum[k] += out.rates[k] * out.rates[k];
        }
    }
    let covariance = covariance
        .into_iter()
        .map(|acc| {
            let mean = acc.unscale(nf);
            (&mean + mean.adjoint()).scale(0.5)
        })
        .collect();
    let rate = (0..users)
        .map(|k| {
            let mean = rate_sum[k] / nf;
            let var = (rate_sq_sum[k] / nf - mean * mean).max(0.0);
            UserRateEstimate {
                mean,
                std_error: (var / nf).sqrt(),
            }
        })
        .collect();
    Ok(McStats {
        trials: setup.trials,
        eta,
        rate,
        mean_self_gain: mean_self_gain.into_iter().map(|z| z / nf).collect(),
        mean_cross_power: mean_cross_power.unscale(nf),
        covariance,
    })
}

impl McStats {
    /// Moment-estimated hardening bound per user: sample moments plugged into
    /// `p_k |E{h^T w_k}|^2 / (sum_l p_l E{|h^T w_l|^2} - p_k |E{h^T w_k}|^2 + sigma^2)`.
    pub fn moment_bounds(&self, powers: &[f64], noise_power_w: f64) -> Vec<MomentBound> {
        (0..powers.len())
            .map(|k| {
                let signal = powers[k] * self.mean_self_gain[k].norm_sqr();
                let total: f64 = powers
                    .iter()
                    .enumerate()
                    .map(|(l, &p)| p * self.mean_cross_power[(k, l)])
                    .sum();
                let denominator = total - signal + noise_power_w;
                if denominator <= 0.0 {
                    MomentBound {
                        sinr: f64::NAN,
                        rate: f64::NAN,
                        negative_denominator: true,
                    }
                } else {
                    let sinr = signal / denominator;
                    MomentBound {
                        sinr,
                        rate: (1.0 + sinr).log2(),
                        negative_denominator: false,
                    }
                }
            })
            .collect()
    }
}

/// Ergodic rate per user: sample mean of `log2(1 + SINR)` over independent
/// realizations of fading and phase noise, with standard errors.
pub fn ergodic_rate_estimate(setup: &TrialSetup<'_>) -> Result<Vec<UserRateEstimate>> {
    Ok(run_trials(setup)?.rate)
}

/// Moment-estimated bound per user (see [`McStats::moment_bounds`]).
pub fn moment_bound_estimate(setup: &TrialSetup<'_>) -> Result<Vec<MomentBound>> {
    let stats = run_trials(setup)?;
    Ok(stats.moment_bounds(setup.powers, setup.noise_power_w))
}

/// Sample covariance `E{h_k h_k^H}` of one user, symmetrized.
pub fn covariance_estimate(setup: &TrialSetup<'_>, user: usize) -> Result<CMat> {
    let stats = run_trials(setup)?;
    Ok(stats.covariance[user].clone())
}

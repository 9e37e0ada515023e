//! Simulation and analytics for phase-noise-impaired double-RIS multiuser
//! MISO downlinks.
//!
//! The crate has two routes to the same per-user rates and keeps them
//! deliberately independent so they can cross-validate each other:
//!
//! * [`analytics`] — closed forms: the channel-strength statistic eta, the
//!   MRT lower-bound SINR, and the effective-channel covariance.
//! * [`montecarlo`] — empirical estimates of the same quantities from
//!   correlated channel realizations with Von Mises phase noise.
//!
//! Supporting modules: [`matrix`] (Hermitian PSD square roots, trace
//! products), [`correlation`] (BS and RIS correlation models, phase-weighted
//! traces), [`stochastic`] (samplers and RNG substreams), [`channel`]
//! (geometry, path gains, channel assembly), and [`rbd`] (closed-form optimal
//! reflect beamforming plus baselines).

pub mod analytics;
pub mod channel;
pub mod correlation;
pub mod error;
pub mod matrix;
pub mod montecarlo;
pub mod rbd;
pub mod stochastic;

pub use analytics::{
    achievable_rate, channel_covariance, eta_for_user, eta_k, eta_k_optimal,
    general_hardening_sinr, sinr_lower_bound, weighted_traces, EtaInputs,
};
pub use channel::{
    dbm_to_watts, derive_geometry, draw_channels, effective_channel, path_gain,
    ChannelRealization, DistanceTable, NodeLayout, PathGains, PhaseConfig, SystemConfig,
};
pub use correlation::{
    all_ones_correlation, build_bs_correlation, build_ris_correlation, phase_weighted_trace,
    sinc, BsCorrelationSpec, CorrelationSet, RisGeometry,
};
pub use error::{Error, Result};
pub use matrix::{hermitian_psd_sqrt, is_hermitian, trace_product, trace_square, CMat, CVec};
pub use montecarlo::{
    covariance_estimate, ergodic_rate_estimate, instantaneous_sinr, moment_bound_estimate,
    mrt_precoder, run_trials, McStats, MomentBound, RateReport, TrialResult, TrialSetup,
    UserRateEstimate,
};
pub use rbd::{
    eta_coefficients, evaluate_design, optimal_phase_config, random_phase_config, DesignReport,
    EtaCoefficients,
};
pub use stochastic::{
    complex_gaussian_matrix, complex_gaussian_vector, substream, vm_cf, PhaseNoiseModel, SimRng,
};

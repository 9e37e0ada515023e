//! Reflect beamforming design.
//!
//! Under statistical CSI the optimal phase configuration is closed-form:
//! all-equal phases at each surface maximize the phase-weighted trace, so no
//! iterative optimizer is needed. This module constructs optimal and baseline
//! configurations and evaluates any configuration against the closed-form
//! rate, exposing the affine structure of eta in (v1, v2, v1 v2).

use std::f64::consts::PI;

use rand::Rng;

use crate::analytics::{achievable_rate, eta_k, sinr_lower_bound, weighted_traces, EtaInputs};
use crate::channel::{PathGains, PhaseConfig, SystemConfig};
use crate::correlation::CorrelationSet;
use crate::error::Result;
use crate::stochastic::SimRng;

/// All-equal phase configuration `theta_i = c 1`; any real `c` attains the
/// optimum, `c = 0` gives identity phase matrices.
pub fn optimal_phase_config(n1: usize, n2: usize, c: f64) -> PhaseConfig {
    PhaseConfig {
        theta1: vec![c; n1],
        theta2: vec![c; n2],
    }
}

/// Baseline configuration with i.i.d. uniform phases in `[-pi, pi)`.
pub fn random_phase_config(n1: usize, n2: usize, rng: &mut SimRng) -> PhaseConfig {
    PhaseConfig {
        theta1: (0..n1).map(|_| rng.gen_range(-PI..PI)).collect(),
        theta2: (0..n2).map(|_| rng.gen_range(-PI..PI)).collect(),
    }
}

/// Coefficients of the affine form
/// `eta_k = product * v1 v2 + v1_lin * v1 + v2_lin * v2 + constant`.
///
/// All four are strictly positive for `0 < varphi < 1`, which is what makes
/// maximizing v1 and v2 separately optimal for every user at once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaCoefficients {
    pub product: f64,
    pub v1_lin: f64,
    pub v2_lin: f64,
    pub constant: f64,
}

impl EtaCoefficients {
    pub fn evaluate(&self, v1: f64, v2: f64) -> f64 {
        self.product * v1 * v2 + self.v1_lin * v1 + self.v2_lin * v2 + self.constant
    }
}

/// Expands the eta closed form into its affine coefficients in (v1, v2).
pub fn eta_coefficients(inputs: &EtaInputs) -> EtaCoefficients {
    let p2 = inputs.varphi * inputs.varphi;
    let p4 = p2 * p2;
    let n1 = inputs.n1 as f64;
    let n2 = inputs.n2 as f64;
    let cascade = inputs.beta_b1 * inputs.beta_2k * inputs.beta_g;
    EtaCoefficients {
        product: cascade * p4,
        v1_lin: cascade * n2 * (p2 - p4) + inputs.beta_b1 * inputs.beta_1k * p2,
        v2_lin: cascade * n1 * (p2 - p4) + inputs.beta_b2 * inputs.beta_2k * p2,
        constant: cascade * n1 * n2 * (1.0 - p2) * (1.0 - p2)
            + inputs.beta_b1 * inputs.beta_1k * (1.0 - p2) * n1
            + inputs.beta_b2 * inputs.beta_2k * (1.0 - p2) * n2,
    }
}

/// Closed-form evaluation of one phase configuration.
#[derive(Debug, Clone)]
pub struct DesignReport {
    /// v_1 = tr(R_1 Theta_1 R_1 Theta_1^H).
    pub v1: f64,
    /// v_2 = tr(R_2 Theta_2 R_2 Theta_2^H).
    pub v2: f64,
    /// eta_k per user.
    pub eta: Vec<f64>,
    /// Closed-form rate per user in bits/s/Hz.
    pub rate: Vec<f64>,
    /// Affine coefficients of eta in (v1, v2) per user.
    pub coefficients: Vec<EtaCoefficients>,
}

impl DesignReport {
    pub fn sum_rate(&self) -> f64 {
        self.rate.iter().sum()
    }
}

/// Evaluates a phase configuration: the trace objectives, the resulting
/// per-user eta, and the closed-form rates.
pub fn evaluate_design(
    config: &SystemConfig,
    corr: &CorrelationSet,
    phases: &PhaseConfig,
    varphi: f64,
) -> Result<DesignReport> {
    let gains = PathGains::from_config(config)?;
    let (v1, v2) = weighted_traces(corr, phases)?;
    let sum_powers: f64 = config.user_powers_w.iter().sum();
    let users = config.users();
    let mut eta = Vec::with_capacity(users);
    let mut rate = Vec::with_capacity(users);
    let mut coefficients = Vec::with_capacity(users);
    for k in 0..users {
        let inputs = EtaInputs::for_user(
            &gains,
            varphi,
            corr.ris1_elements(),
            corr.ris2_elements(),
            v1,
            v2,
            k,
        );
        let e = eta_k(&inputs)?;
        let sinr = sinr_lower_bound(
            config.user_powers_w[k],
            sum_powers,
            config.bs_antennas(),
            corr.tr_bs_sq,
            config.noise_power_w,
            e,
        )?;
        eta.push(e);
        rate.push(achievable_rate(sinr));
        coefficients.push(eta_coefficients(&inputs));
    }
    Ok(DesignReport {
        v1,
        v2,
        eta,
        rate,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{dbm_to_watts, NodeLayout};
    use crate::correlation::{BsCorrelationSpec, RisGeometry};
    use crate::matrix::CMat;
    use crate::stochastic::{substream, vm_cf};
    use approx::assert_relative_eq;

    fn config(n_side: usize) -> SystemConfig {
        let users = 3;
        let total = dbm_to_watts(20.0);
        SystemConfig {
            bs_correlation: BsCorrelationSpec::new(8, 0.8, 0.0).unwrap(),
            ris1: RisGeometry::new(n_side, n_side, 0.025, 0.1, 0.025, 0.025).unwrap(),
            ris2: RisGeometry::new(n_side, n_side, 0.025, 0.1, 0.025, 0.025).unwrap(),
            layout: NodeLayout::standard(users),
            path_loss_exponent: 2.7,
            wavelength: 0.1,
            noise_power_w: dbm_to_watts(-94.0),
            total_power_w: total,
            user_powers_w: SystemConfig::equal_power_split(total, users),
            kappa: 4.0,
            trials: 100,
            seed: 3,
        }
    }

    #[test]
    fn optimal_config_default_is_all_zero() {
        let phases = optimal_phase_config(4, 6, 0.0);
        assert!(phases.theta1.iter().all(|&t| t == 0.0));
        assert_eq!(phases.theta2.len(), 6);
    }

    #[test]
    fn constant_shift_leaves_objective_unchanged() {
        let cfg = config(3);
        let corr = CorrelationSet::build(&cfg.bs_correlation, &cfg.ris1, &cfg.ris2).unwrap();
        let n1 = corr.ris1_elements();
        let n2 = corr.ris2_elements();
        let base = weighted_traces(&corr, &optimal_phase_config(n1, n2, 0.0)).unwrap();
        for c in [1.0, PI, -2.5] {
            let shifted = weighted_traces(&corr, &optimal_phase_config(n1, n2, c)).unwrap();
            assert!((shifted.0 - base.0).abs() <= 1e-9);
            assert!((shifted.1 - base.1).abs() <= 1e-9);
        }
        // c = pi flips every coefficient to -1; the objective cannot tell
        let pi_traces = weighted_traces(&corr, &optimal_phase_config(n1, n2, PI)).unwrap();
        assert_relative_eq!(pi_traces.0, corr.tr_ris1_sq, epsilon = 1e-9);
    }

    #[test]
    fn random_config_is_unit_modulus_and_reproducible() {
        let a = random_phase_config(16, 9, &mut substream(5, 0));
        let b = random_phase_config(16, 9, &mut substream(5, 0));
        assert_eq!(a, b);
        for &t in a.theta1.iter().chain(a.theta2.iter()) {
            assert!((-PI..PI).contains(&t));
            // exp(j t) has unit modulus by construction
            assert_relative_eq!(
                num_complex::Complex64::from_polar(1.0, t).norm(),
                1.0,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn random_configs_stay_below_optimum_on_correlated_surfaces() {
        let cfg = config(3);
        let corr = CorrelationSet::build(&cfg.bs_correlation, &cfg.ris1, &cfg.ris2).unwrap();
        let mut rng = substream(17, 0);
        for _ in 0..200 {
            let phases =
                random_phase_config(corr.ris1_elements(), corr.ris2_elements(), &mut rng);
            let (v1, v2) = weighted_traces(&corr, &phases).unwrap();
            assert!(v1 < corr.tr_ris1_sq, "random v1 {v1} reached the optimum");
            assert!(v2 < corr.tr_ris2_sq);
        }
    }

    #[test]
    fn evaluate_design_optimal_attains_trace_squares() {
        let cfg = config(3);
        let corr = CorrelationSet::build(&cfg.bs_correlation, &cfg.ris1, &cfg.ris2).unwrap();
        let varphi = vm_cf(cfg.kappa).unwrap();
        let optimal = evaluate_design(
            &cfg,
            &corr,
            &optimal_phase_config(corr.ris1_elements(), corr.ris2_elements(), 0.0),
            varphi,
        )
        .unwrap();
        assert_relative_eq!(optimal.v1, corr.tr_ris1_sq, epsilon = 1e-9);
        assert_relative_eq!(optimal.v2, corr.tr_ris2_sq, epsilon = 1e-9);

        let mut rng = substream(23, 0);
        for _ in 0..100 {
            let phases =
                random_phase_config(corr.ris1_elements(), corr.ris2_elements(), &mut rng);
            let report = evaluate_design(&cfg, &corr, &phases, varphi).unwrap();
            assert!(report.sum_rate() <= optimal.sum_rate() + 1e-12);
            // every user is maximized simultaneously, not just the sum
            for k in 0..cfg.users() {
                assert!(report.eta[k] <= optimal.eta[k] + 1e-12 * optimal.eta[k]);
            }
        }
    }

    #[test]
    fn swapping_theta1_only_moves_v1_terms() {
        let cfg = config(3);
        let corr = CorrelationSet::build(&cfg.bs_correlation, &cfg.ris1, &cfg.ris2).unwrap();
        let varphi = vm_cf(cfg.kappa).unwrap();
        let n1 = corr.ris1_elements();
        let n2 = corr.ris2_elements();
        let mut rng = substream(29, 0);
        let theta1_a = random_phase_config(n1, n2, &mut rng).theta1;
        let theta1_b = random_phase_config(n1, n2, &mut rng).theta1;
        let theta2 = random_phase_config(n1, n2, &mut rng).theta2;
        let a = evaluate_design(
            &cfg,
            &corr,
            &PhaseConfig {
                theta1: theta1_a,
                theta2: theta2.clone(),
            },
            varphi,
        )
        .unwrap();
        let b = evaluate_design(
            &cfg,
            &corr,
            &PhaseConfig {
                theta1: theta1_b,
                theta2,
            },
            varphi,
        )
        .unwrap();
        // v2 untouched, and eta moves exactly by the affine v1 terms
        assert_relative_eq!(a.v2, b.v2, epsilon = 1e-12);
        for k in 0..cfg.users() {
            let coeff = a.coefficients[k];
            let predicted = b.eta[k] + (coeff.product * a.v2 + coeff.v1_lin) * (a.v1 - b.v1);
            assert_relative_eq!(a.eta[k], predicted, max_relative = 1e-10);
        }
    }

    #[test]
    fn identity_correlation_makes_design_irrelevant() {
        let cfg = config(3);
        let n = cfg.ris1.elements();
        let corr = CorrelationSet::from_matrices(
            crate::correlation::build_bs_correlation(&cfg.bs_correlation).unwrap(),
            CMat::identity(n, n),
            CMat::identity(n, n),
        )
        .unwrap();
        let varphi = vm_cf(cfg.kappa).unwrap();
        let mut rng = substream(31, 0);
        let baseline = evaluate_design(
            &cfg,
            &corr,
            &optimal_phase_config(n, n, 0.0),
            varphi,
        )
        .unwrap();
        assert_relative_eq!(baseline.v1, n as f64, epsilon = 1e-9);
        for _ in 0..20 {
            let report = evaluate_design(
                &cfg,
                &corr,
                &random_phase_config(n, n, &mut rng),
                varphi,
            )
            .unwrap();
            assert_relative_eq!(report.v1, n as f64, epsilon = 1e-9);
            for k in 0..cfg.users() {
                assert_relative_eq!(report.rate[k], baseline.rate[k], max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn coefficients_are_positive_and_reconstruct_eta() {
        let cfg = config(3);
        let corr = CorrelationSet::build(&cfg.bs_correlation, &cfg.ris1, &cfg.ris2).unwrap();
        for varphi in [0.3, 0.7, 0.95] {
            let report = evaluate_design(
                &cfg,
                &corr,
                &random_phase_config(
                    corr.ris1_elements(),
                    corr.ris2_elements(),
                    &mut substream(41, 0),
                ),
                varphi,
            )
            .unwrap();
            for k in 0..cfg.users() {
                let c = report.coefficients[k];
                assert!(c.product > 0.0 && c.v1_lin > 0.0 && c.v2_lin > 0.0 && c.constant > 0.0);
                assert_relative_eq!(
                    c.evaluate(report.v1, report.v2),
                    report.eta[k],
                    max_relative = 1e-12
                );
            }
        }
    }
}

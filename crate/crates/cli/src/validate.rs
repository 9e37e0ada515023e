//! Validation runs: the full oracle suite on one scenario, plus the
//! sampling-based check of the closed-form reflect-beamforming optimum.
//!
//! Each check compares an empirical quantity against its closed-form
//! counterpart with an explicit threshold; failures land in the report
//! instead of aborting the run, and the process exit code reflects the
//! overall verdict.

use std::f64::consts::PI;
use std::fmt;

use ris_core::{
    achievable_rate, channel_covariance, evaluate_design, optimal_phase_config,
    phase_weighted_trace, random_phase_config, run_trials, sinr_lower_bound, substream, vm_cf,
    CorrelationSet, PathGains, PhaseNoiseModel, TrialSetup,
};

use crate::scenario::ResolvedScenario;
use crate::CliError;

/// One named check with its measured value and threshold. Informational
/// entries report a measurement without affecting the verdict.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
    pub informational: bool,
}

impl CheckResult {
    fn upper(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            passed: measured <= threshold,
            informational: false,
        }
    }

    fn info(name: impl Into<String>, measured: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold: f64::NAN,
            passed: true,
            informational: true,
        }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.informational {
            write!(f, "INFO {:<42} measured {:>13.6e}", self.name, self.measured)
        } else {
            write!(
                f,
                "{} {:<42} measured {:>13.6e}  threshold {:>10.3e}",
                if self.passed { "PASS" } else { "FAIL" },
                self.name,
                self.measured,
                self.threshold
            )
        }
    }
}

/// Outcome of a validation run.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub trials: usize,
    pub config_digest: String,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "validation of scenario {} ({} trials)",
            self.config_digest, self.trials
        )?;
        for check in &self.checks {
            writeln!(f, "  {check}")?;
        }
        write!(
            f,
            "verdict: {}",
            if self.all_passed() { "PASS" } else { "FAIL" }
        )
    }
}

const COVARIANCE_TOL: f64 = 0.10;
const SELF_GAIN_TOL: f64 = 0.03;
const ERGODIC_SIGMA: f64 = 2.0;
const TRACE_BOUND_TOL: f64 = 1e-9;
const RATE_BOUND_TOL: f64 = 1e-12;
const CONSTANT_PHASE_TOL: f64 = 1e-9;
const KAPPA_ZERO_RATE_TOL: f64 = 1e-12;
const KAPPA_ZERO_MC_SIGMA: f64 = 3.0;
const OPTIMALITY_SAMPLES: usize = 200;

/// Runs every check against one scenario. `trials` overrides the scenario's
/// Monte Carlo depth.
pub fn validate(scenario: &ResolvedScenario, trials: Option<usize>) -> Result<ValidationReport, CliError> {
    let trials = trials.unwrap_or(scenario.trials);
    let config = scenario.to_system_config()?;
    let corr = CorrelationSet::build(&config.bs_correlation, &config.ris1, &config.ris2)?;
    let gains = PathGains::from_config(&config)?;
    let n1 = corr.ris1_elements();
    let n2 = corr.ris2_elements();
    let phases = optimal_phase_config(n1, n2, 0.0);
    let noise_model = PhaseNoiseModel::new(config.kappa)?;
    let varphi = noise_model.varphi();
    let users = config.users();
    let sum_powers: f64 = config.user_powers_w.iter().sum();

    let mut checks = Vec::new();

    // one Monte Carlo pass feeds the covariance, moment-bound, and ergodic
    // checks
    let setup = TrialSetup {
        gains: &gains,
        corr: &corr,
        phases: &phases,
        noise_model,
        powers: &config.user_powers_w,
        noise_power_w: config.noise_power_w,
        trials,
        seed: config.seed,
    };
    let stats = run_trials(&setup)?;
    let moment_bounds = stats.moment_bounds(&config.user_powers_w, config.noise_power_w);

    for k in 0..users {
        let psi = channel_covariance(&gains, &corr, &phases, varphi, k)?;
        let rel = (&stats.covariance[k] - &psi).norm() / psi.norm();
        checks.push(CheckResult::upper(
            format!("covariance_match[user{k}]"),
            rel,
            COVARIANCE_TOL,
        ));
    }

    for (k, mb) in moment_bounds.iter().enumerate() {
        // E{h^T w_k} = sqrt(M eta_k) holds exactly under the model, with no
        // Gaussian approximation; a miss here means a real bug
        let expected_gain = (config.bs_antennas() as f64 * stats.eta[k]).sqrt();
        let gain_err = (stats.mean_self_gain[k].norm() - expected_gain).abs() / expected_gain;
        checks.push(CheckResult::upper(
            format!("self_gain_match[user{k}]"),
            gain_err,
            SELF_GAIN_TOL,
        ));

        let closed_sinr = sinr_lower_bound(
            config.user_powers_w[k],
            sum_powers,
            config.bs_antennas(),
            corr.tr_bs_sq,
            config.noise_power_w,
            stats.eta[k],
        )?;
        let closed_rate = achievable_rate(closed_sinr);
        let shortfall = closed_rate - stats.rate[k].mean;
        checks.push(CheckResult::upper(
            format!("ergodic_above_bound[user{k}]"),
            shortfall,
            ERGODIC_SIGMA * stats.rate[k].std_error,
        ));

        // gap between the sample-moment bound and the closed form measures
        // how Gaussian the cascaded channel really is at this scale; reported
        // for diagnosis, not gated (it is a property of the scenario, not of
        // the implementation)
        let hardening_gap = if mb.negative_denominator {
            f64::INFINITY
        } else {
            (mb.sinr - closed_sinr).abs() / closed_sinr
        };
        checks.push(CheckResult::info(
            format!("hardening_gap[user{k}]"),
            hardening_gap,
        ));
    }

    // equal-phase optimality by sampling: no random configuration may beat
    // the all-equal phases, neither in the trace objectives nor in the
    // closed-form sum rate
    let optimal_report = evaluate_design(&config, &corr, &phases, varphi)?;
    let mut rng = substream(config.seed ^ 0x7261_6e64, 0);
    let mut max_trace_excess = f64::NEG_INFINITY;
    let mut max_rate_excess = f64::NEG_INFINITY;
    for _ in 0..OPTIMALITY_SAMPLES {
        let candidate = random_phase_config(n1, n2, &mut rng);
        let report = evaluate_design(&config, &corr, &candidate, varphi)?;
        max_trace_excess = max_trace_excess
            .max(report.v1 - corr.tr_ris1_sq)
            .max(report.v2 - corr.tr_ris2_sq);
        max_rate_excess = max_rate_excess.max(report.sum_rate() - optimal_report.sum_rate());
    }
    checks.push(CheckResult::upper(
        "equal_phase_trace_bound",
        max_trace_excess,
        TRACE_BOUND_TOL,
    ));
    checks.push(CheckResult::upper(
        "equal_phase_rate_bound",
        max_rate_excess,
        RATE_BOUND_TOL,
    ));

    // constant phases attain the optimum for any offset
    let mut max_constant_err: f64 = 0.0;
    for c in [0.0, 1.0, PI, -2.5] {
        let v1 = phase_weighted_trace(&corr.r_ris1, &vec![c; n1])?;
        let v2 = phase_weighted_trace(&corr.r_ris2, &vec![c; n2])?;
        max_constant_err = max_constant_err
            .max((v1 - corr.tr_ris1_sq).abs())
            .max((v2 - corr.tr_ris2_sq).abs());
    }
    checks.push(CheckResult::upper(
        "constant_phase_invariance",
        max_constant_err,
        CONSTANT_PHASE_TOL,
    ));

    // with uninformative phases the design cannot matter at all
    if config.kappa == 0.0 {
        debug_assert_eq!(vm_cf(0.0)?, 0.0);
        let alt_phases = random_phase_config(n1, n2, &mut rng);
        let alt_report = evaluate_design(&config, &corr, &alt_phases, varphi)?;
        let max_diff = (0..users)
            .map(|k| (alt_report.rate[k] - optimal_report.rate[k]).abs())
            .fold(0.0f64, f64::max);
        checks.push(CheckResult::upper(
            "kappa_zero_closed_form_irrelevance",
            max_diff,
            KAPPA_ZERO_RATE_TOL,
        ));

        let alt_setup = TrialSetup {
            phases: &alt_phases,
            ..setup.clone()
        };
        let alt_stats = run_trials(&alt_setup)?;
        let mut worst_sigma: f64 = 0.0;
        for k in 0..users {
            let combined = (stats.rate[k].std_error.powi(2)
                + alt_stats.rate[k].std_error.powi(2))
            .sqrt();
            worst_sigma =
                worst_sigma.max((stats.rate[k].mean - alt_stats.rate[k].mean).abs() / combined);
        }
        checks.push(CheckResult::upper(
            "kappa_zero_mc_agreement_sigma",
            worst_sigma,
            KAPPA_ZERO_MC_SIGMA,
        ));
    }

    Ok(ValidationReport {
        checks,
        trials,
        config_digest: scenario.digest(),
    })
}

/// Outcome of the reflect-beamforming sampling check.
#[derive(Debug, Clone)]
pub struct RbdCheckReport {
    pub samples: usize,
    pub tr_r1_sq: f64,
    pub tr_r2_sq: f64,
    pub max_v1: f64,
    pub max_v2: f64,
    pub optimal_sum_rate: f64,
    pub max_random_sum_rate: f64,
    pub constant_invariance_error: f64,
    pub violations: usize,
}

impl RbdCheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl fmt::Display for RbdCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "reflect-beamforming check over {} random configurations", self.samples)?;
        writeln!(
            f,
            "  v1: max random {:.9} vs optimum {:.9}",
            self.max_v1, self.tr_r1_sq
        )?;
        writeln!(
            f,
            "  v2: max random {:.9} vs optimum {:.9}",
            self.max_v2, self.tr_r2_sq
        )?;
        writeln!(
            f,
            "  sum rate: max random {:.9} vs equal-phase {:.9}",
            self.max_random_sum_rate, self.optimal_sum_rate
        )?;
        writeln!(
            f,
            "  constant-offset invariance error {:.3e}",
            self.constant_invariance_error
        )?;
        write!(
            f,
            "verdict: {} ({} violations)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.violations
        )
    }
}

/// Samples random phase configurations and verifies none beats the
/// closed-form optimum.
pub fn rbd_check(scenario: &ResolvedScenario, samples: usize) -> Result<RbdCheckReport, CliError> {
    let config = scenario.to_system_config()?;
    let corr = CorrelationSet::build(&config.bs_correlation, &config.ris1, &config.ris2)?;
    let n1 = corr.ris1_elements();
    let n2 = corr.ris2_elements();
    let varphi = vm_cf(config.kappa)?;
    let optimal = evaluate_design(
        &config,
        &corr,
        &optimal_phase_config(n1, n2, 0.0),
        varphi,
    )?;

    let mut rng = substream(config.seed ^ 0x7262_6463, 0);
    let mut max_v1 = f64::NEG_INFINITY;
    let mut max_v2 = f64::NEG_INFINITY;
    let mut max_sum_rate = f64::NEG_INFINITY;
    let mut violations = 0usize;
    for _ in 0..samples {
        let candidate = random_phase_config(n1, n2, &mut rng);
        let report = evaluate_design(&config, &corr, &candidate, varphi)?;
        max_v1 = max_v1.max(report.v1);
        max_v2 = max_v2.max(report.v2);
        max_sum_rate = max_sum_rate.max(report.sum_rate());
        if report.v1 > corr.tr_ris1_sq + TRACE_BOUND_TOL
            || report.v2 > corr.tr_ris2_sq + TRACE_BOUND_TOL
            || report.sum_rate() > optimal.sum_rate() + RATE_BOUND_TOL
        {
            violations += 1;
        }
    }

    let mut constant_err: f64 = 0.0;
    for c in [0.0, 1.0, PI, -2.5] {
        let v1 = phase_weighted_trace(&corr.r_ris1, &vec![c; n1])?;
        let v2 = phase_weighted_trace(&corr.r_ris2, &vec![c; n2])?;
        constant_err = constant_err
            .max((v1 - corr.tr_ris1_sq).abs())
            .max((v2 - corr.tr_ris2_sq).abs());
    }
    if constant_err > CONSTANT_PHASE_TOL {
        violations += 1;
    }

    Ok(RbdCheckReport {
        samples,
        tr_r1_sq: corr.tr_ris1_sq,
        tr_r2_sq: corr.tr_ris2_sq,
        max_v1,
        max_v2,
        optimal_sum_rate: optimal.sum_rate(),
        max_random_sum_rate: max_sum_rate,
        constant_invariance_error: constant_err,
        violations,
    })
}

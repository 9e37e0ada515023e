//! Monte Carlo estimator behavior across scenario knobs: power and
//! phase-noise monotonicity of the ergodic rate, and agreement between the
//! moment-estimated bound and the closed form where hardening is strong
//! enough to resolve at this scale.

use ris_core::*;

fn config(kappa: f64, total_power_dbm: f64) -> SystemConfig {
    let users = 2;
    let total = dbm_to_watts(total_power_dbm);
    SystemConfig {
        bs_correlation: BsCorrelationSpec::new(8, 0.8, 0.0).unwrap(),
        ris1: RisGeometry::new(4, 4, 0.025, 0.1, 0.025, 0.025).unwrap(),
        ris2: RisGeometry::new(4, 4, 0.025, 0.1, 0.025, 0.025).unwrap(),
        layout: NodeLayout::standard(users),
        path_loss_exponent: 2.7,
        wavelength: 0.1,
        noise_power_w: dbm_to_watts(-94.0),
        total_power_w: total,
        user_powers_w: SystemConfig::equal_power_split(total, users),
        kappa,
        trials: 2000,
        seed: 7,
    }
}

fn ergodic(config: &SystemConfig) -> Vec<UserRateEstimate> {
    let corr =
        CorrelationSet::build(&config.bs_correlation, &config.ris1, &config.ris2).unwrap();
    let gains = PathGains::from_config(config).unwrap();
    let phases = optimal_phase_config(corr.ris1_elements(), corr.ris2_elements(), 0.0);
    let setup = TrialSetup {
        gains: &gains,
        corr: &corr,
        phases: &phases,
        noise_model: PhaseNoiseModel::new(config.kappa).unwrap(),
        powers: &config.user_powers_w,
        noise_power_w: config.noise_power_w,
        trials: config.trials,
        seed: config.seed,
    };
    ergodic_rate_estimate(&setup).unwrap()
}

#[test]
fn ergodic_rate_grows_with_transmit_power() {
    let mut last = vec![0.0; 2];
    for dbm in [0.0, 10.0, 20.0, 30.0] {
        let rates = ergodic(&config(4.0, dbm));
        for (k, r) in rates.iter().enumerate() {
            assert!(
                r.mean > last[k],
                "user {k} rate {} did not grow at {dbm} dBm",
                r.mean
            );
            last[k] = r.mean;
        }
    }
}

#[test]
fn ergodic_rate_grows_with_phase_noise_concentration() {
    let low = ergodic(&config(0.0, 20.0));
    let high = ergodic(&config(10.0, 20.0));
    for k in 0..2 {
        let combined = (low[k].std_error.powi(2) + high[k].std_error.powi(2)).sqrt();
        assert!(
            high[k].mean > low[k].mean + 3.0 * combined,
            "user {k}: rate at kappa 10 ({}) not above kappa 0 ({})",
            high[k].mean,
            low[k].mean
        );
    }
}

#[test]
fn moment_bound_is_reproducible_and_finite() {
    let cfg = config(4.0, 20.0);
    let corr = CorrelationSet::build(&cfg.bs_correlation, &cfg.ris1, &cfg.ris2).unwrap();
    let gains = PathGains::from_config(&cfg).unwrap();
    let phases = optimal_phase_config(corr.ris1_elements(), corr.ris2_elements(), 0.0);
    let setup = TrialSetup {
        gains: &gains,
        corr: &corr,
        phases: &phases,
        noise_model: PhaseNoiseModel::new(cfg.kappa).unwrap(),
        powers: &cfg.user_powers_w,
        noise_power_w: cfg.noise_power_w,
        trials: 1500,
        seed: 11,
    };
    let a = moment_bound_estimate(&setup).unwrap();
    let b = moment_bound_estimate(&setup).unwrap();
    assert_eq!(a, b);
    for bound in &a {
        assert!(!bound.negative_denominator);
        assert!(bound.sinr.is_finite() && bound.sinr > 0.0);
    }
}

#[test]
fn rate_report_assembles_both_routes() {
    let cfg = config(4.0, 20.0);
    let corr = CorrelationSet::build(&cfg.bs_correlation, &cfg.ris1, &cfg.ris2).unwrap();
    let gains = PathGains::from_config(&cfg).unwrap();
    let phases = optimal_phase_config(corr.ris1_elements(), corr.ris2_elements(), 0.0);
    let noise_model = PhaseNoiseModel::new(cfg.kappa).unwrap();
    let setup = TrialSetup {
        gains: &gains,
        corr: &corr,
        phases: &phases,
        noise_model,
        powers: &cfg.user_powers_w,
        noise_power_w: cfg.noise_power_w,
        trials: 1500,
        seed: 13,
    };
    let stats = run_trials(&setup).unwrap();
    let sum_powers: f64 = cfg.user_powers_w.iter().sum();
    let closed: Vec<f64> = (0..cfg.users())
        .map(|k| {
            let sinr = sinr_lower_bound(
                cfg.user_powers_w[k],
                sum_powers,
                cfg.bs_antennas(),
                corr.tr_bs_sq,
                cfg.noise_power_w,
                stats.eta[k],
            )
            .unwrap();
            achievable_rate(sinr)
        })
        .collect();
    let report = RateReport {
        closed_form_rate: closed,
        mc_rate: stats.rate.clone(),
        moment_bound: stats.moment_bounds(&cfg.user_powers_w, cfg.noise_power_w),
        trials: stats.trials,
        config_digest: String::from("test"),
    };
    assert_eq!(report.mc_rate.len(), cfg.users());
    for r in &report.mc_rate {
        assert!(r.std_error > 0.0);
    }
}

//! Parameter sweeps over a base scenario with CSV emission.
//!
//! Column order is fixed:
//! `sweep_value,user_index,rate_closed_form,rate_mc,rate_mc_stderr,eta_k,v1,v2,config_digest`.
//! Monte Carlo columns are left empty in closed-form mode. Output is
//! deterministic for a given scenario and seed: rows are generated in grid
//! order and trials use per-index RNG substreams, so the bytes do not depend
//! on the thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use ris_core::{
    evaluate_design, optimal_phase_config, run_trials, vm_cf, CorrelationSet, PathGains,
    PhaseNoiseModel, SystemConfig, TrialSetup,
};

use crate::scenario::ResolvedScenario;
use crate::CliError;

/// Parameter swept over a grid; everything else comes from the base scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    TotalPowerDbm,
    RhoMagnitude,
    Kappa,
    BsAntennas,
    ElementSpacing,
}

impl SweepParam {
    pub const NAMES: [&'static str; 5] = [
        "total_power_dbm",
        "rho_magnitude",
        "kappa",
        "bs_antennas",
        "element_spacing_m",
    ];
}

impl FromStr for SweepParam {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "total_power_dbm" => Ok(Self::TotalPowerDbm),
            "rho_magnitude" => Ok(Self::RhoMagnitude),
            "kappa" => Ok(Self::Kappa),
            "bs_antennas" => Ok(Self::BsAntennas),
            "element_spacing_m" => Ok(Self::ElementSpacing),
            other => Err(CliError::Range {
                field: "param".into(),
                message: format!(
                    "unknown sweep parameter `{other}`; expected one of {}",
                    Self::NAMES.join(", ")
                ),
            }),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Self::TotalPowerDbm => "total_power_dbm",
            Self::RhoMagnitude => "rho_magnitude",
            Self::Kappa => "kappa",
            Self::BsAntennas => "bs_antennas",
            Self::ElementSpacing => "element_spacing_m",
        };
        f.write_str(name)
    }
}

/// Which rate routes a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Closed,
    Mc,
    Both,
}

impl SweepMode {
    fn wants_mc(self) -> bool {
        matches!(self, Self::Mc | Self::Both)
    }
}

impl FromStr for SweepMode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "closed" => Ok(Self::Closed),
            "mc" => Ok(Self::Mc),
            "both" => Ok(Self::Both),
            other => Err(CliError::Range {
                field: "mode".into(),
                message: format!("unknown mode `{other}`; expected closed, mc, or both"),
            }),
        }
    }
}

/// A sweep: one parameter, its grid, and the base scenario.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub grid: Vec<f64>,
    pub base: ResolvedScenario,
}

impl SweepSpec {
    pub fn new(param: SweepParam, grid: Vec<f64>, base: ResolvedScenario) -> Result<Self, CliError> {
        if grid.is_empty() {
            return Err(CliError::Range {
                field: "grid".into(),
                message: "sweep grid must be non-empty".into(),
            });
        }
        Ok(Self { param, grid, base })
    }

    /// Applies one grid value to a copy of the base scenario.
    fn scenario_at(&self, value: f64) -> Result<ResolvedScenario, CliError> {
        let mut s = self.base.clone();
        match self.param {
            SweepParam::TotalPowerDbm => {
                if !value.is_finite() {
                    return Err(CliError::Range {
                        field: "grid".into(),
                        message: format!("total power {value} dBm is not finite"),
                    });
                }
                s.total_power_dbm = value;
                // sweeping the budget re-splits it equally
                s.user_powers_w = SystemConfig::equal_power_split(
                    ris_core::dbm_to_watts(value),
                    s.users,
                );
            }
            SweepParam::RhoMagnitude => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(CliError::Range {
                        field: "grid".into(),
                        message: format!("|rho| = {value} outside [0, 1]"),
                    });
                }
                s.rho_magnitude = value;
            }
            SweepParam::Kappa => {
                if value < 0.0 || !value.is_finite() {
                    return Err(CliError::Range {
                        field: "grid".into(),
                        message: format!("kappa = {value} must be nonnegative"),
                    });
                }
                s.kappa = value;
            }
            SweepParam::BsAntennas => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(CliError::Range {
                        field: "grid".into(),
                        message: format!("antenna count {value} must be a positive integer"),
                    });
                }
                s.bs_antennas = value as usize;
            }
            SweepParam::ElementSpacing => {
                if value <= 0.0 || !value.is_finite() {
                    return Err(CliError::Range {
                        field: "grid".into(),
                        message: format!("element spacing {value} must be positive"),
                    });
                }
                s.ris1.element_spacing_m = value;
                s.ris2.element_spacing_m = value;
            }
        }
        Ok(s)
    }
}

/// One CSV row: a grid point and a user.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub user_index: usize,
    pub rate_closed_form: f64,
    pub rate_mc: Option<f64>,
    pub rate_mc_stderr: Option<f64>,
    pub eta_k: f64,
    pub v1: f64,
    pub v2: f64,
    pub config_digest: String,
}

fn rows_for_point(
    spec: &SweepSpec,
    mode: SweepMode,
    value: f64,
) -> Result<Vec<SweepRow>, CliError> {
    let scenario = spec.scenario_at(value)?;
    let digest = scenario.digest();
    let config = scenario.to_system_config()?;
    let corr = CorrelationSet::build(&config.bs_correlation, &config.ris1, &config.ris2)?;
    let phases = optimal_phase_config(corr.ris1_elements(), corr.ris2_elements(), 0.0);
    let varphi = vm_cf(config.kappa)?;
    let report = evaluate_design(&config, &corr, &phases, varphi)?;

    let mc = if mode.wants_mc() {
        let gains = PathGains::from_config(&config)?;
        let setup = TrialSetup {
            gains: &gains,
            corr: &corr,
            phases: &phases,
            noise_model: PhaseNoiseModel::new(config.kappa)?,
            powers: &config.user_powers_w,
            noise_power_w: config.noise_power_w,
            trials: config.trials,
            seed: config.seed,
        };
        Some(run_trials(&setup)?.rate)
    } else {
        None
    };

    Ok((0..config.users())
        .map(|k| SweepRow {
            sweep_value: value,
            user_index: k,
            rate_closed_form: report.rate[k],
            rate_mc: mc.as_ref().map(|r| r[k].mean),
            rate_mc_stderr: mc.as_ref().map(|r| r[k].std_error),
            eta_k: report.eta[k],
            v1: report.v1,
            v2: report.v2,
            config_digest: digest.clone(),
        })
        .collect())
}

/// Runs the sweep: one row per grid point per user, in grid order.
pub fn run_sweep(spec: &SweepSpec, mode: SweepMode) -> Result<Vec<SweepRow>, CliError> {
    let per_point: Vec<Vec<SweepRow>> = spec
        .grid
        .par_iter()
        .map(|&value| rows_for_point(spec, mode, value))
        .collect::<Result<_, _>>()?;
    Ok(per_point.into_iter().flatten().collect())
}

/// CSV header matching [`SweepRow`] field order.
pub const CSV_HEADER: &str =
    "sweep_value,user_index,rate_closed_form,rate_mc,rate_mc_stderr,eta_k,v1,v2,config_digest";

/// Renders rows as CSV text; shortest-round-trip float formatting keeps the
/// bytes reproducible.
pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.sweep_value,
            row.user_index,
            row.rate_closed_form,
            opt(row.rate_mc),
            opt(row.rate_mc_stderr),
            row.eta_k,
            row.v1,
            row.v2,
            row.config_digest
        ));
    }
    out
}

/// Parses a comma-separated grid such as `0,5,10,15`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| CliError::Range {
                field: "grid".into(),
                message: format!("`{tok}` is not a number"),
            })
        })
        .collect()
}

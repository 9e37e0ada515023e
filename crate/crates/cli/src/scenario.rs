//! Scenario files: JSON schema with explicit units in field names, default
//! values, resolution into a [`SystemConfig`], and the canonical digest that
//! every CSV row echoes for provenance.
//!
//! Every field is optional; an empty object `{}` resolves to the standard
//! scenario: a 64-antenna BS at the origin, two 10x10 quarter-wave-spaced
//! surfaces at (0, 15) and (60, 15), four users on the segment from (50, 0)
//! to (70, 0), wavelength 0.1 m, path-loss exponent 2.7, noise power -94 dBm,
//! total power 20 dBm split equally, and Von Mises concentration 4.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use ris_core::{
    BsCorrelationSpec, NodeLayout, RisGeometry, SystemConfig, dbm_to_watts,
};

use crate::CliError;

/// Environment variable overriding the default seed. An explicit `seed` in
/// the scenario file still wins.
pub const SEED_ENV_VAR: &str = "RIS_SIM_SEED";

/// Seed used when neither the scenario file nor the environment provides one.
pub const DEFAULT_SEED: u64 = 1;

const DEFAULT_WAVELENGTH_M: f64 = 0.1;
const DEFAULT_PATH_LOSS_EXPONENT: f64 = 2.7;
const DEFAULT_NOISE_POWER_DBM: f64 = -94.0;
const DEFAULT_TOTAL_POWER_DBM: f64 = 20.0;
const DEFAULT_KAPPA: f64 = 4.0;
const DEFAULT_RHO_MAGNITUDE: f64 = 0.8;
const DEFAULT_BS_ANTENNAS: usize = 64;
const DEFAULT_USERS: usize = 4;
const DEFAULT_RIS_SIDE: usize = 10;
const DEFAULT_TRIALS: usize = 10_000;

/// Raw scenario file; unknown fields are schema errors.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub bs_antennas: Option<usize>,
    pub users: Option<usize>,
    pub wavelength_m: Option<f64>,
    pub path_loss_exponent: Option<f64>,
    pub noise_power_dbm: Option<f64>,
    pub total_power_dbm: Option<f64>,
    pub kappa: Option<f64>,
    pub rho_magnitude: Option<f64>,
    pub rho_phase_rad: Option<f64>,
    pub ris1: Option<RisSectionFile>,
    pub ris2: Option<RisSectionFile>,
    pub positions_m: Option<PositionsFile>,
    pub user_powers_w: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisSectionFile {
    pub n_vertical: Option<usize>,
    pub n_horizontal: Option<usize>,
    pub element_spacing_m: Option<f64>,
    pub element_height_m: Option<f64>,
    pub element_width_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionsFile {
    pub bs: Option<[f64; 2]>,
    pub ris1: Option<[f64; 2]>,
    pub ris2: Option<[f64; 2]>,
    pub users: Option<Vec<[f64; 2]>>,
}

/// Fully resolved scenario: every parameter concrete, serializable in
/// canonical form for digesting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedScenario {
    pub bs_antennas: usize,
    pub users: usize,
    pub wavelength_m: f64,
    pub path_loss_exponent: f64,
    pub noise_power_dbm: f64,
    pub total_power_dbm: f64,
    pub kappa: f64,
    pub rho_magnitude: f64,
    pub rho_phase_rad: f64,
    pub ris1: RisSection,
    pub ris2: RisSection,
    pub positions_m: Positions,
    pub user_powers_w: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RisSection {
    pub n_vertical: usize,
    pub n_horizontal: usize,
    pub element_spacing_m: f64,
    pub element_height_m: f64,
    pub element_width_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Positions {
    pub bs: [f64; 2],
    pub ris1: [f64; 2],
    pub ris2: [f64; 2],
    pub users: Vec<[f64; 2]>,
}

fn range_err(field: &str, message: impl Into<String>) -> CliError {
    CliError::Range {
        field: field.to_string(),
        message: message.into(),
    }
}

fn resolve_ris(section: Option<&RisSectionFile>, wavelength: f64, field: &str) -> Result<RisSection, CliError> {
    let file = section.cloned().unwrap_or_default();
    let quarter_wave = wavelength / 4.0;
    let out = RisSection {
        n_vertical: file.n_vertical.unwrap_or(DEFAULT_RIS_SIDE),
        n_horizontal: file.n_horizontal.unwrap_or(DEFAULT_RIS_SIDE),
        element_spacing_m: file.element_spacing_m.unwrap_or(quarter_wave),
        element_height_m: file.element_height_m.unwrap_or(quarter_wave),
        element_width_m: file.element_width_m.unwrap_or(quarter_wave),
    };
    if out.n_vertical == 0 || out.n_horizontal == 0 {
        return Err(range_err(field, "element grid must be non-empty"));
    }
    if out.element_spacing_m <= 0.0 || out.element_spacing_m.is_nan() {
        return Err(range_err(
            &format!("{field}.element_spacing_m"),
            "spacing must be positive",
        ));
    }
    if out.element_height_m <= 0.0 || out.element_width_m <= 0.0
        || out.element_height_m.is_nan() || out.element_width_m.is_nan()
    {
        return Err(range_err(field, "element dimensions must be positive"));
    }
    Ok(out)
}

impl ScenarioFile {
    /// Parses a scenario file from JSON text.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    /// Reads and parses a scenario file from disk.
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Fills every unspecified field with its default and validates ranges.
    ///
    /// Seed precedence: explicit file seed, then [`SEED_ENV_VAR`], then
    /// [`DEFAULT_SEED`].
    pub fn resolve(&self) -> Result<ResolvedScenario, CliError> {
        let wavelength = self.wavelength_m.unwrap_or(DEFAULT_WAVELENGTH_M);
        if wavelength <= 0.0 || !wavelength.is_finite() {
            return Err(range_err("wavelength_m", "must be positive and finite"));
        }
        let users = self.users.unwrap_or(DEFAULT_USERS);
        if users == 0 {
            return Err(range_err("users", "at least one user is required"));
        }
        let bs_antennas = self.bs_antennas.unwrap_or(DEFAULT_BS_ANTENNAS);
        if bs_antennas == 0 {
            return Err(range_err("bs_antennas", "at least one antenna is required"));
        }
        let rho_magnitude = self.rho_magnitude.unwrap_or(DEFAULT_RHO_MAGNITUDE);
        if !(0.0..=1.0).contains(&rho_magnitude) || !rho_magnitude.is_finite() {
            return Err(range_err("rho_magnitude", "must lie in [0, 1]"));
        }
        let kappa = self.kappa.unwrap_or(DEFAULT_KAPPA);
        if kappa < 0.0 || !kappa.is_finite() {
            return Err(range_err("kappa", "must be nonnegative and finite"));
        }
        let path_loss_exponent = self.path_loss_exponent.unwrap_or(DEFAULT_PATH_LOSS_EXPONENT);
        if path_loss_exponent <= 0.0 || !path_loss_exponent.is_finite() {
            return Err(range_err("path_loss_exponent", "must be positive"));
        }
        let trials = self.trials.unwrap_or(DEFAULT_TRIALS);
        if trials == 0 {
            return Err(range_err("trials", "must be positive"));
        }
        let total_power_dbm = self.total_power_dbm.unwrap_or(DEFAULT_TOTAL_POWER_DBM);
        let noise_power_dbm = self.noise_power_dbm.unwrap_or(DEFAULT_NOISE_POWER_DBM);
        for (field, v) in [
            ("total_power_dbm", total_power_dbm),
            ("noise_power_dbm", noise_power_dbm),
        ] {
            if !v.is_finite() {
                return Err(range_err(field, "must be finite"));
            }
        }

        let default_layout = NodeLayout::standard(users);
        let positions_file = self.positions_m.clone().unwrap_or_default();
        let positions = Positions {
            bs: positions_file.bs.unwrap_or(default_layout.bs),
            ris1: positions_file.ris1.unwrap_or(default_layout.ris1),
            ris2: positions_file.ris2.unwrap_or(default_layout.ris2),
            users: positions_file.users.unwrap_or(default_layout.users),
        };
        if positions.users.len() != users {
            return Err(range_err(
                "positions_m.users",
                format!("{} positions for {} users", positions.users.len(), users),
            ));
        }

        let total_power_w = dbm_to_watts(total_power_dbm);
        let user_powers_w = match &self.user_powers_w {
            Some(p) => {
                if p.len() != users {
                    return Err(range_err(
                        "user_powers_w",
                        format!("{} entries for {} users", p.len(), users),
                    ));
                }
                if p.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                    return Err(range_err("user_powers_w", "entries must be nonnegative"));
                }
                if p.iter().sum::<f64>() > total_power_w * (1.0 + 1e-12) {
                    return Err(range_err(
                        "user_powers_w",
                        "allocation exceeds the total power budget",
                    ));
                }
                p.clone()
            }
            None => SystemConfig::equal_power_split(total_power_w, users),
        };

        let seed = self.seed.unwrap_or_else(|| {
            std::env::var(SEED_ENV_VAR)
                .ok()
                .and_then(|s| s.parse().ok())
                .unwrap_or(DEFAULT_SEED)
        });

        Ok(ResolvedScenario {
            bs_antennas,
            users,
            wavelength_m: wavelength,
            path_loss_exponent,
            noise_power_dbm,
            total_power_dbm,
            kappa,
            rho_magnitude,
            rho_phase_rad: self.rho_phase_rad.unwrap_or(0.0),
            ris1: resolve_ris(self.ris1.as_ref(), wavelength, "ris1")?,
            ris2: resolve_ris(self.ris2.as_ref(), wavelength, "ris2")?,
            positions_m: positions,
            user_powers_w,
            trials,
            seed,
        })
    }
}

impl ResolvedScenario {
    /// Digest of the canonicalized scenario: SHA-256 over the JSON value with
    /// lexicographically sorted keys, truncated to 16 hex characters.
    pub fn digest(&self) -> String {
        let value = serde_json::to_value(self).expect("scenario serializes");
        let canonical = value.to_string();
        let hash = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(16);
        for byte in hash.iter().take(8) {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    fn ris_geometry(&self, section: &RisSection) -> Result<RisGeometry, CliError> {
        Ok(RisGeometry::new(
            section.n_vertical,
            section.n_horizontal,
            section.element_spacing_m,
            self.wavelength_m,
            section.element_height_m,
            section.element_width_m,
        )?)
    }

    /// Converts to the core [`SystemConfig`] and runs the core validator.
    pub fn to_system_config(&self) -> Result<SystemConfig, CliError> {
        let config = SystemConfig {
            bs_correlation: BsCorrelationSpec::new(
                self.bs_antennas,
                self.rho_magnitude,
                self.rho_phase_rad,
            )?,
            ris1: self.ris_geometry(&self.ris1)?,
            ris2: self.ris_geometry(&self.ris2)?,
            layout: NodeLayout {
                bs: self.positions_m.bs,
                ris1: self.positions_m.ris1,
                ris2: self.positions_m.ris2,
                users: self.positions_m.users.clone(),
            },
            path_loss_exponent: self.path_loss_exponent,
            wavelength: self.wavelength_m,
            noise_power_w: dbm_to_watts(self.noise_power_dbm),
            total_power_w: dbm_to_watts(self.total_power_dbm),
            user_powers_w: self.user_powers_w.clone(),
            kappa: self.kappa,
            trials: self.trials,
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Loads a scenario from disk and resolves it against the defaults.
pub fn load_scenario(path: &Path) -> Result<ResolvedScenario, CliError> {
    ScenarioFile::from_path(path)?.resolve()
}

//! Line-oriented run configuration.
//!
//! Runs carry ~25 parameters, so they live in a small `key = value` file
//! with `[section]` headers rather than on the command line:
//!
//! ```text
//! [medium]
//! preset = freshwater
//!
//! [geometry]
//! d1 = 0.25
//! d2 = 0.25
//! drive_current = 0.5
//!
//! [modem]
//! sample_rate = 150000
//! ...
//! ```
//!
//! Unknown keys are rejected with their line number. Every default equals
//! the crate-wide defaults, so an absent file (or empty sections) still
//! describes the standard run.

use crate::field::{DriveSpec, LinkGeometry, WaterMedium};
use crate::mlp::TrainConfig;
use crate::modem::{ModemConfig, Scheme};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey {
        line: usize,
        key: String,
        section: String,
    },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: bad value for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        reason: String,
    },
    #[error("[geometry] must set exactly one of drive_current or drive_voltage (with water_resistance)")]
    AmbiguousDrive,
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Noise prescription as configured (seedless spec lives in
/// [`crate::channel::NoiseSpec`]; this mirrors it plus the seed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseConfig {
    SnrDb { snr_db: f64, seed: u64 },
    FloorVolts { noise_rms: f64, seed: u64 },
}

impl NoiseConfig {
    pub fn to_spec(self) -> crate::channel::NoiseSpec {
        match self {
            NoiseConfig::SnrDb { snr_db, seed } => crate::channel::NoiseSpec::SnrDb { snr_db, seed },
            NoiseConfig::FloorVolts { noise_rms, seed } => {
                crate::channel::NoiseSpec::FloorVolts { noise_rms, seed }
            }
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            NoiseConfig::SnrDb { seed, .. } | NoiseConfig::FloorVolts { seed, .. } => *seed,
        }
    }
}

/// Effective configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub medium: WaterMedium,
    pub geometry: LinkGeometry,
    pub modem: ModemConfig,
    pub noise: NoiseConfig,
    pub train: TrainConfig,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            medium: WaterMedium::freshwater(),
            geometry: LinkGeometry::new(0.25, 0.25, DriveSpec::Current { amps: 0.5 }).unwrap(),
            modem: ModemConfig::default_fsk(),
            noise: NoiseConfig::SnrDb {
                snr_db: 0.0,
                seed: 1,
            },
            train: TrainConfig::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Gain reference frequency for narrowband link scaling: the midpoint
    /// of the two carriers.
    pub fn carrier_ref_hz(&self) -> f64 {
        (self.modem.f1 + self.modem.f2) / 2.0
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let defaults = RunConfig::default();
        let mut section = String::new();

        let mut sigma = defaults.medium.conductivity;
        let mut epsilon = defaults.medium.permittivity;
        let mut mu = defaults.medium.permeability;

        let mut d1 = defaults.geometry.tx_separation;
        let mut d2 = defaults.geometry.rx_separation;
        let mut drive_current: Option<f64> = None;
        let mut drive_voltage: Option<f64> = None;
        let mut water_resistance: Option<f64> = None;

        let mut modem = defaults.modem;
        let mut noise_mode = String::from("snr_db");
        let mut snr_db = 0.0;
        let mut noise_rms = 0.0;
        let mut noise_seed = 1u64;
        let mut train = defaults.train.clone();
        let mut output_dir = defaults.output_dir.clone();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim();
                match name {
                    "medium" | "geometry" | "modem" | "noise" | "train" | "output" => {
                        section = name.to_string();
                    }
                    _ => {
                        return Err(ConfigError::UnknownSection {
                            line: line_no,
                            section: name.to_string(),
                        })
                    }
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                text: raw.trim().to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |reason: &str| ConfigError::BadValue {
                line: line_no,
                key: key.to_string(),
                reason: reason.to_string(),
            };
            let parse_f64 = |v: &str| v.parse::<f64>().map_err(|_| bad("not a number"));
            let parse_u64 = |v: &str| v.parse::<u64>().map_err(|_| bad("not a non-negative integer"));
            let parse_usize = |v: &str| v.parse::<usize>().map_err(|_| bad("not a non-negative integer"));

            match (section.as_str(), key) {
                ("medium", "preset") => match value {
                    "freshwater" => {
                        let m = WaterMedium::freshwater();
                        (sigma, epsilon, mu) = (m.conductivity, m.permittivity, m.permeability);
                    }
                    "seawater" => {
                        let m = WaterMedium::seawater();
                        (sigma, epsilon, mu) = (m.conductivity, m.permittivity, m.permeability);
                    }
                    _ => return Err(bad("expected freshwater or seawater")),
                },
                ("medium", "conductivity") => sigma = parse_f64(value)?,
                ("medium", "permittivity") => epsilon = parse_f64(value)?,
                ("medium", "permeability") => mu = parse_f64(value)?,

                ("geometry", "d1") => d1 = parse_f64(value)?,
                ("geometry", "d2") => d2 = parse_f64(value)?,
                ("geometry", "drive_current") => drive_current = Some(parse_f64(value)?),
                ("geometry", "drive_voltage") => drive_voltage = Some(parse_f64(value)?),
                ("geometry", "water_resistance") => water_resistance = Some(parse_f64(value)?),

                ("modem", "sample_rate") => modem.sample_rate = parse_f64(value)?,
                ("modem", "symbol_rate") => modem.symbol_rate = parse_f64(value)?,
                ("modem", "f1") => modem.f1 = parse_f64(value)?,
                ("modem", "f2") => modem.f2 = parse_f64(value)?,
                ("modem", "amplitude") => modem.amplitude = parse_f64(value)?,
                ("modem", "scheme") => {
                    modem.scheme = match value {
                        "fsk2" => Scheme::Fsk2,
                        "ask2" => Scheme::Ask2,
                        _ => return Err(bad("expected fsk2 or ask2")),
                    }
                }

                ("noise", "mode") => match value {
                    "snr_db" | "floor_volts" => noise_mode = value.to_string(),
                    _ => return Err(bad("expected snr_db or floor_volts")),
                },
                ("noise", "snr_db") => snr_db = parse_f64(value)?,
                ("noise", "noise_rms") => noise_rms = parse_f64(value)?,
                ("noise", "seed") => noise_seed = parse_u64(value)?,

                ("train", "learning_rate") => train.learning_rate = parse_f64(value)?,
                ("train", "batch_size") => train.batch_size = parse_usize(value)?,
                ("train", "epochs") => train.epochs = parse_usize(value)?,
                ("train", "seed") => train.seed = parse_u64(value)?,
                ("train", "symbols_per_snr") => train.symbols_per_snr = parse_usize(value)?,
                ("train", "snr_grid_db") => {
                    train.snr_grid_db = value
                        .split(',')
                        .map(|tok| tok.trim().parse::<f64>().map_err(|_| bad("expected a comma-separated list of numbers")))
                        .collect::<Result<_, _>>()?;
                }

                ("output", "dir") => output_dir = PathBuf::from(value),

                (sec, _) => {
                    return Err(ConfigError::UnknownKey {
                        line: line_no,
                        key: key.to_string(),
                        section: sec.to_string(),
                    })
                }
            }
        }

        let medium =
            WaterMedium::new(sigma, epsilon, mu).map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let drive = match (drive_current, drive_voltage, water_resistance) {
            (Some(amps), None, None) => DriveSpec::Current { amps },
            (None, Some(volts), Some(rw)) => DriveSpec::Voltage {
                volts,
                water_resistance: rw,
            },
            (None, None, None) => RunConfig::default().geometry.drive,
            _ => return Err(ConfigError::AmbiguousDrive),
        };
        let geometry =
            LinkGeometry::new(d1, d2, drive).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        modem
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let noise = match noise_mode.as_str() {
            "snr_db" => NoiseConfig::SnrDb {
                snr_db,
                seed: noise_seed,
            },
            _ => NoiseConfig::FloorVolts {
                noise_rms,
                seed: noise_seed,
            },
        };
        if train.learning_rate <= 0.0 || train.batch_size == 0 || train.epochs == 0 {
            return Err(ConfigError::Invalid(
                "training parameters must be positive".into(),
            ));
        }
        if train.snr_grid_db.is_empty() {
            return Err(ConfigError::Invalid("train snr_grid_db must be non-empty".into()));
        }
        if train.symbols_per_snr == 0 {
            return Err(ConfigError::Invalid("symbols_per_snr must be positive".into()));
        }

        Ok(RunConfig {
            medium,
            geometry,
            modem,
            noise,
            train,
            output_dir,
        })
    }

    /// Render the effective configuration in the same format `parse`
    /// reads; `parse(dump())` reproduces the config exactly.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[medium]");
        let _ = writeln!(s, "conductivity = {}", self.medium.conductivity);
        let _ = writeln!(s, "permittivity = {}", self.medium.permittivity);
        let _ = writeln!(s, "permeability = {}", self.medium.permeability);
        let _ = writeln!(s, "\n[geometry]");
        let _ = writeln!(s, "d1 = {}", self.geometry.tx_separation);
        let _ = writeln!(s, "d2 = {}", self.geometry.rx_separation);
        match self.geometry.drive {
            DriveSpec::Current { amps } => {
                let _ = writeln!(s, "drive_current = {amps}");
            }
            DriveSpec::Voltage {
                volts,
                water_resistance,
            } => {
                let _ = writeln!(s, "drive_voltage = {volts}");
                let _ = writeln!(s, "water_resistance = {water_resistance}");
            }
        }
        let _ = writeln!(s, "\n[modem]");
        let _ = writeln!(s, "sample_rate = {}", self.modem.sample_rate);
        let _ = writeln!(s, "symbol_rate = {}", self.modem.symbol_rate);
        let _ = writeln!(s, "f1 = {}", self.modem.f1);
        let _ = writeln!(s, "f2 = {}", self.modem.f2);
        let _ = writeln!(s, "amplitude = {}", self.modem.amplitude);
        let _ = writeln!(
            s,
            "scheme = {}",
            match self.modem.scheme {
                Scheme::Fsk2 => "fsk2",
                Scheme::Ask2 => "ask2",
            }
        );
        let _ = writeln!(s, "\n[noise]");
        match self.noise {
            NoiseConfig::SnrDb { snr_db, seed } => {
                let _ = writeln!(s, "mode = snr_db");
                let _ = writeln!(s, "snr_db = {snr_db}");
                let _ = writeln!(s, "seed = {seed}");
            }
            NoiseConfig::FloorVolts { noise_rms, seed } => {
                let _ = writeln!(s, "mode = floor_volts");
                let _ = writeln!(s, "noise_rms = {noise_rms}");
                let _ = writeln!(s, "seed = {seed}");
            }
        }
        let _ = writeln!(s, "\n[train]");
        let _ = writeln!(s, "learning_rate = {}", self.train.learning_rate);
        let _ = writeln!(s, "batch_size = {}", self.train.batch_size);
        let _ = writeln!(s, "epochs = {}", self.train.epochs);
        let _ = writeln!(s, "seed = {}", self.train.seed);
        let grid: Vec<String> = self.train.snr_grid_db.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "snr_grid_db = {}", grid.join(","));
        let _ = writeln!(s, "symbols_per_snr = {}", self.train.symbols_per_snr);
        let _ = writeln!(s, "\n[output]");
        let _ = writeln!(s, "dir = {}", self.output_dir.display());
        s
    }
}

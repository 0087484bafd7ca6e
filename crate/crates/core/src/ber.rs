//! Monte-Carlo bit-error-rate experiments.
//!
//! Sweeps are paired: at each grid point every method demodulates the same
//! transmitted bits under the same noise realization, with the noise level
//! referenced to the 2FSK waveform power so all methods see the identical
//! channel. Each grid point derives its own generator from the run seed,
//! so results are independent of evaluation order.

use crate::channel::{add_awgn, link_gain, LinkSpec, NoiseSpec};
use crate::field::{received_voltage, FieldError, LinkGeometry, WaterMedium};
use crate::mlp::{nn_demodulate, MlpError, MlpModel};
use crate::modem::{ask_modulate, coherent_demod, fsk_modulate, ModemConfig, ModemError, Waveform};
use crate::rng::SplitMix64;
use std::io::Write;

/// Transmit power above this many watts is over the design budget.
pub const POWER_BUDGET_WATTS: f64 = 0.1;

#[derive(Debug, thiserror::Error)]
pub enum BerError {
    #[error("a trained model is required for the nn_fsk method")]
    MissingModel,
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("bit count must be positive")]
    NoBits,
    #[error("distances must be positive and ascending")]
    BadDistances,
    #[error("water resistance must be positive")]
    BadResistance,
    #[error("peak-to-peak voltage must be non-negative")]
    BadVpp,
    #[error(transparent)]
    Modem(#[from] ModemError),
    #[error(transparent)]
    Mlp(#[from] MlpError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
}

/// Demodulation route under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    CoherentFsk,
    NnFsk,
    CoherentAsk,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::CoherentFsk => "coherent_fsk",
            Method::NnFsk => "nn_fsk",
            Method::CoherentAsk => "coherent_ask",
        }
    }

    pub fn parse(name: &str) -> Option<Method> {
        match name {
            "coherent_fsk" => Some(Method::CoherentFsk),
            "nn_fsk" => Some(Method::NnFsk),
            "coherent_ask" => Some(Method::CoherentAsk),
            _ => None,
        }
    }
}

/// One (grid point, method) measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x_value: f64,
    pub method: Method,
    pub bits_total: u64,
    pub bit_errors: u64,
    pub ber: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepMetadata {
    pub seed: u64,
    pub notes: Vec<String>,
    /// Set by callers that want wall-clock provenance; the sweep functions
    /// leave it empty so results stay byte-reproducible.
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    /// CSV with the given x-column name; rows come out sorted by x value
    /// then method.
    pub fn write_csv<W: Write>(&self, x_name: &str, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{x_name},method,bits,errors,ber")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                row.x_value,
                row.method.as_str(),
                row.bits_total,
                row.bit_errors,
                row.ber
            )?;
        }
        Ok(())
    }
}

fn count_errors(tx: &[bool], rx: &[bool]) -> u64 {
    tx.iter().zip(rx).filter(|(a, b)| a != b).count() as u64
}

fn sort_rows(rows: &mut [SweepRow]) {
    rows.sort_by(|a, b| {
        a.x_value
            .partial_cmp(&b.x_value)
            .unwrap()
            .then(a.method.cmp(&b.method))
    });
}

/// BER of each method across an SNR grid, with paired bits and noise.
pub fn snr_sweep(
    methods: &[Method],
    snr_grid_db: &[f64],
    bits_per_point: usize,
    seed: u64,
    fsk_cfg: &ModemConfig,
    model: Option<&MlpModel>,
) -> Result<SweepResult, BerError> {
    if snr_grid_db.is_empty() || methods.is_empty() {
        return Err(BerError::EmptyGrid);
    }
    if bits_per_point == 0 {
        return Err(BerError::NoBits);
    }
    if methods.contains(&Method::NnFsk) && model.is_none() {
        return Err(BerError::MissingModel);
    }
    let ask_cfg = ModemConfig::new(
        fsk_cfg.sample_rate,
        fsk_cfg.symbol_rate,
        fsk_cfg.f1,
        fsk_cfg.f2,
        fsk_cfg.amplitude,
        crate::modem::Scheme::Ask2,
    )?;
    let wants_ask = methods.contains(&Method::CoherentAsk);
    let mut rows = Vec::with_capacity(methods.len() * snr_grid_db.len());
    for (grid_index, &snr_db) in snr_grid_db.iter().enumerate() {
        let mut bit_rng = SplitMix64::for_trial(seed, 2 * grid_index as u64);
        let tx: Vec<bool> = (0..bits_per_point).map(|_| bit_rng.next_bool()).collect();
        let clean_fsk = fsk_modulate(&tx, fsk_cfg)?;

        // One noise realization per grid point, its level referenced to the
        // 2FSK signal power, shared verbatim by every method.
        let sigma = (clean_fsk.power() / 10f64.powf(snr_db / 10.0)).sqrt();
        let mut noise_rng = SplitMix64::new(seed.wrapping_add(2 * grid_index as u64 + 1));
        let noise: Vec<f64> = (0..clean_fsk.len()).map(|_| sigma * noise_rng.standard_normal()).collect();

        let noisy_fsk = Waveform::new(
            clean_fsk.samples.iter().zip(&noise).map(|(x, n)| x + n).collect(),
            fsk_cfg.sample_rate,
        );
        let noisy_ask = if wants_ask {
            let clean_ask = ask_modulate(&tx, &ask_cfg)?;
            Some(Waveform::new(
                clean_ask.samples.iter().zip(&noise).map(|(x, n)| x + n).collect(),
                ask_cfg.sample_rate,
            ))
        } else {
            None
        };

        for &method in methods {
            let rx = match method {
                Method::CoherentFsk => coherent_demod(&noisy_fsk, fsk_cfg)?,
                Method::NnFsk => nn_demodulate(model.unwrap(), &noisy_fsk, fsk_cfg)?,
                Method::CoherentAsk => coherent_demod(noisy_ask.as_ref().unwrap(), &ask_cfg)?,
            };
            let bit_errors = count_errors(&tx, &rx);
            rows.push(SweepRow {
                x_value: snr_db,
                method,
                bits_total: bits_per_point as u64,
                bit_errors,
                ber: bit_errors as f64 / bits_per_point as f64,
            });
        }
    }
    sort_rows(&mut rows);
    Ok(SweepResult {
        rows,
        metadata: SweepMetadata {
            seed,
            notes: vec![format!("bits_per_point={bits_per_point}")],
            timestamp: None,
        },
    })
}

/// Link template for the distance sweep: the geometry/medium of
/// [`LinkSpec`] with the distance left free.
#[derive(Debug, Clone, Copy)]
pub struct LinkTemplate {
    pub medium: WaterMedium,
    pub geometry: LinkGeometry,
    pub carrier_ref_hz: f64,
}

impl LinkTemplate {
    pub fn at_distance(&self, distance: f64) -> LinkSpec {
        LinkSpec {
            medium: self.medium,
            geometry: self.geometry,
            distance,
            carrier_ref_hz: self.carrier_ref_hz,
        }
    }
}

/// Noise floor (RMS volts at the receiver) that puts the realized SNR at
/// `knee_snr_db` for the given distance: floor = rms(received) /
/// 10^(knee_snr_db/20), with rms(received) = gain * amplitude / sqrt(2)
/// for a constant-envelope FSK waveform.
pub fn calibrate_noise_floor(
    template: &LinkTemplate,
    fsk_cfg: &ModemConfig,
    knee_distance_m: f64,
    knee_snr_db: f64,
) -> Result<f64, BerError> {
    let gain = link_gain(&template.at_distance(knee_distance_m))?;
    let received_rms = gain.abs() * fsk_cfg.amplitude / std::f64::consts::SQRT_2;
    Ok(received_rms / 10f64.powf(knee_snr_db / 20.0))
}

/// Neural-demodulator BER versus link distance under a fixed receiver
/// noise floor.
pub fn distance_sweep(
    template: &LinkTemplate,
    distances_m: &[f64],
    noise_floor_volts: f64,
    bits_per_point: usize,
    seed: u64,
    fsk_cfg: &ModemConfig,
    model: &MlpModel,
) -> Result<SweepResult, BerError> {
    if distances_m.is_empty() {
        return Err(BerError::EmptyGrid);
    }
    if bits_per_point == 0 {
        return Err(BerError::NoBits);
    }
    if !distances_m.windows(2).all(|w| w[0] < w[1]) || distances_m[0] <= 0.0 {
        return Err(BerError::BadDistances);
    }
    let mut rows = Vec::with_capacity(distances_m.len());
    for (grid_index, &distance) in distances_m.iter().enumerate() {
        let mut bit_rng = SplitMix64::for_trial(seed, 2 * grid_index as u64);
        let tx: Vec<bool> = (0..bits_per_point).map(|_| bit_rng.next_bool()).collect();
        let clean = fsk_modulate(&tx, fsk_cfg)?;
        let received = crate::channel::apply_link(&clean, &template.at_distance(distance))?;
        let noisy = add_awgn(
            &received.waveform,
            &NoiseSpec::FloorVolts {
                noise_rms: noise_floor_volts,
                seed: seed.wrapping_add(2 * grid_index as u64 + 1),
            },
        )?;
        let rx = nn_demodulate(model, &noisy, fsk_cfg)?;
        let bit_errors = count_errors(&tx, &rx);
        rows.push(SweepRow {
            x_value: distance,
            method: Method::NnFsk,
            bits_total: bits_per_point as u64,
            bit_errors,
            ber: bit_errors as f64 / bits_per_point as f64,
        });
    }
    sort_rows(&mut rows);
    Ok(SweepResult {
        rows,
        metadata: SweepMetadata {
            seed,
            notes: vec![
                format!("bits_per_point={bits_per_point}"),
                format!("noise_floor_volts={noise_floor_volts}"),
            ],
            timestamp: None,
        },
    })
}

/// One (distance, frequency, voltage) point of the channel-law surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoltagePoint {
    pub r_m: f64,
    pub f_hz: f64,
    pub u2_volts: f64,
}

/// Received voltage over a distance x frequency grid.
pub fn voltage_curve(
    r_grid_m: &[f64],
    f_grid_hz: &[f64],
    medium: &WaterMedium,
    geometry: &LinkGeometry,
) -> Result<Vec<VoltagePoint>, BerError> {
    if r_grid_m.is_empty() || f_grid_hz.is_empty() {
        return Err(BerError::EmptyGrid);
    }
    let mut points = Vec::with_capacity(r_grid_m.len() * f_grid_hz.len());
    for &r in r_grid_m {
        for &f in f_grid_hz {
            let u2 = received_voltage(r, f, medium, geometry)?;
            points.push(VoltagePoint {
                r_m: r,
                f_hz: f,
                u2_volts: u2.volts,
            });
        }
    }
    Ok(points)
}

/// CSV with header `r_m,f_hz,u2_volts`.
pub fn write_voltage_csv<W: Write>(points: &[VoltagePoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "r_m,f_hz,u2_volts")?;
    for p in points {
        writeln!(out, "{},{},{}", p.r_m, p.f_hz, p.u2_volts)?;
    }
    Ok(())
}

/// Sinusoidal transmit power into the water resistance: `vpp^2 / (8*Rw)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    pub vpp: f64,
    pub r_w: f64,
    pub power: f64,
    pub under_budget: bool,
}

pub fn transmit_power(vpp: f64, r_w: f64) -> Result<PowerBudget, BerError> {
    if !(r_w.is_finite() && r_w > 0.0) {
        return Err(BerError::BadResistance);
    }
    if !(vpp.is_finite() && vpp >= 0.0) {
        return Err(BerError::BadVpp);
    }
    let power = vpp * vpp / (8.0 * r_w);
    Ok(PowerBudget {
        vpp,
        r_w,
        power,
        under_budget: power < POWER_BUDGET_WATTS,
    })
}

/// CSV with header `vpp_v,rw_ohm,power_w,under_budget`.
pub fn write_power_csv<W: Write>(budget: &PowerBudget, mut out: W) -> std::io::Result<()> {
    writeln!(out, "vpp_v,rw_ohm,power_w,under_budget")?;
    writeln!(
        out,
        "{},{},{},{}",
        budget.vpp, budget.r_w, budget.power, budget.under_budget
    )?;
    Ok(())
}

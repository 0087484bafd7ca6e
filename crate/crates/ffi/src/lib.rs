//! C ABI for the ecomm laboratory.
//!
//! Everything crosses the boundary through opaque handles and status
//! codes; no struct layout is shared. Handles are created and destroyed by
//! the paired `_new`/`_free` functions, output values go through out
//! pointers, and every function returns an [`EcStatus`]. The header
//! `include/ecomm.h` is generated by cbindgen at build time.

use ecomm_core::ber::transmit_power;
use ecomm_core::channel::{add_awgn, NoiseSpec};
use ecomm_core::field::{self, DriveSpec, LinkGeometry, WaterMedium};
use ecomm_core::mlp::{nn_demodulate, MlpModel};
use ecomm_core::modem::{
    ask_modulate, bit_error_rate, coherent_demod, fsk_modulate, ModemConfig, Scheme, Waveform,
};
use libc::{c_char, c_double, size_t};
use std::ffi::CStr;

/// Status code returned by every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    FramingError = 4,
    IoError = 5,
    ParseError = 6,
    BufferTooSmall = 7,
}

/// Water medium handle.
pub struct EcMedium(WaterMedium);
/// Electrode geometry and drive handle.
pub struct EcGeometry(LinkGeometry);
/// Modem configuration handle.
pub struct EcModemConfig(ModemConfig);
/// Sampled waveform handle.
pub struct EcWaveform(Waveform);
/// Trained demodulation model handle.
pub struct EcModel(MlpModel);

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ec_status_message(status: EcStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        EcStatus::Ok => b"ok\0",
        EcStatus::NullPointer => b"null pointer argument\0",
        EcStatus::InvalidArgument => b"invalid argument\0",
        EcStatus::DomainError => b"argument outside the model domain\0",
        EcStatus::FramingError => b"waveform not aligned to the symbol length\0",
        EcStatus::IoError => b"file i/o failed\0",
        EcStatus::ParseError => b"malformed model file\0",
        EcStatus::BufferTooSmall => b"output buffer too small\0",
    };
    msg.as_ptr() as *const c_char
}

macro_rules! nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            return EcStatus::NullPointer;
        }
    };
}

unsafe fn write_out<T>(out: *mut T, value: T) {
    if !out.is_null() {
        *out = value;
    }
}

// --- medium -----------------------------------------------------------

/// New medium from explicit constants. Fails with `DomainError` unless all
/// three are strictly positive and finite.
#[no_mangle]
pub unsafe extern "C" fn ec_medium_new(
    conductivity: c_double,
    permittivity: c_double,
    permeability: c_double,
    out: *mut *mut EcMedium,
) -> EcStatus {
    nonnull!(out);
    match WaterMedium::new(conductivity, permittivity, permeability) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(EcMedium(m)));
            EcStatus::Ok
        }
        Err(_) => EcStatus::DomainError,
    }
}

/// Freshwater preset (sigma = 0.01 S/m).
#[no_mangle]
pub unsafe extern "C" fn ec_medium_freshwater(out: *mut *mut EcMedium) -> EcStatus {
    nonnull!(out);
    *out = Box::into_raw(Box::new(EcMedium(WaterMedium::freshwater())));
    EcStatus::Ok
}

/// Seawater preset (sigma = 4 S/m).
#[no_mangle]
pub unsafe extern "C" fn ec_medium_seawater(out: *mut *mut EcMedium) -> EcStatus {
    nonnull!(out);
    *out = Box::into_raw(Box::new(EcMedium(WaterMedium::seawater())));
    EcStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn ec_medium_free(medium: *mut EcMedium) {
    if !medium.is_null() {
        drop(Box::from_raw(medium));
    }
}

// --- geometry ---------------------------------------------------------

/// Geometry with a known electrode current.
#[no_mangle]
pub unsafe extern "C" fn ec_geometry_current_drive(
    d1_m: c_double,
    d2_m: c_double,
    current_a: c_double,
    out: *mut *mut EcGeometry,
) -> EcStatus {
    nonnull!(out);
    match LinkGeometry::new(d1_m, d2_m, DriveSpec::Current { amps: current_a }) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(EcGeometry(g)));
            EcStatus::Ok
        }
        Err(_) => EcStatus::DomainError,
    }
}

/// Geometry with a known source voltage across a known water resistance.
#[no_mangle]
pub unsafe extern "C" fn ec_geometry_voltage_drive(
    d1_m: c_double,
    d2_m: c_double,
    voltage_v: c_double,
    water_resistance_ohm: c_double,
    out: *mut *mut EcGeometry,
) -> EcStatus {
    nonnull!(out);
    match LinkGeometry::new(
        d1_m,
        d2_m,
        DriveSpec::Voltage {
            volts: voltage_v,
            water_resistance: water_resistance_ohm,
        },
    ) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(EcGeometry(g)));
            EcStatus::Ok
        }
        Err(_) => EcStatus::DomainError,
    }
}

#[no_mangle]
pub unsafe extern "C" fn ec_geometry_free(geometry: *mut EcGeometry) {
    if !geometry.is_null() {
        drop(Box::from_raw(geometry));
    }
}

// --- channel physics ----------------------------------------------------

/// Displacement/conduction current amplitude ratio at `frequency_hz`.
#[no_mangle]
pub unsafe extern "C" fn ec_quasi_static_ratio(
    medium: *const EcMedium,
    frequency_hz: c_double,
    out_ratio: *mut c_double,
) -> EcStatus {
    nonnull!(medium);
    nonnull!(out_ratio);
    match field::quasi_static_ratio(&(*medium).0, frequency_hz) {
        Ok(ratio) => {
            *out_ratio = ratio;
            EcStatus::Ok
        }
        Err(_) => EcStatus::DomainError,
    }
}

/// Distance factor sqrt(1+2t+2t^2+4t^3+4t^4)*e^-t.
#[no_mangle]
pub unsafe extern "C" fn ec_attenuation_factor(t: c_double, out_factor: *mut c_double) -> EcStatus {
    nonnull!(out_factor);
    match field::attenuation_factor(t) {
        Ok(v) => {
            *out_factor = v;
            EcStatus::Ok
        }
        Err(_) => EcStatus::DomainError,
    }
}

/// Near-field radius lambda/(2*pi) in meters.
#[no_mangle]
pub unsafe extern "C" fn ec_near_field_radius(
    medium: *const EcMedium,
    frequency_hz: c_double,
    out_radius_m: *mut c_double,
) -> EcStatus {
    nonnull!(medium);
    nonnull!(out_radius_m);
    match field::near_field_radius(&(*medium).0, frequency_hz) {
        Ok(v) => {
            *out_radius_m = v;
            EcStatus::Ok
        }
        Err(_) => EcStatus::DomainError,
    }
}

/// Received voltage across the receiving electrodes at axial distance `r_m`.
/// `out_separation_warning`, when non-null, is set non-zero when r is
/// within 4x the electrode separation and the closed form is suspect.
#[no_mangle]
pub unsafe extern "C" fn ec_received_voltage(
    medium: *const EcMedium,
    geometry: *const EcGeometry,
    r_m: c_double,
    frequency_hz: c_double,
    out_volts: *mut c_double,
    out_separation_warning: *mut i32,
) -> EcStatus {
    nonnull!(medium);
    nonnull!(geometry);
    nonnull!(out_volts);
    match field::received_voltage(r_m, frequency_hz, &(*medium).0, &(*geometry).0) {
        Ok(u2) => {
            *out_volts = u2.volts;
            write_out(out_separation_warning, u2.separation_warning as i32);
            EcStatus::Ok
        }
        Err(_) => EcStatus::DomainError,
    }
}

/// Transmit power vpp^2/(8*Rw); `out_under_budget` is non-zero below the
/// 0.1 W budget.
#[no_mangle]
pub unsafe extern "C" fn ec_transmit_power(
    vpp_v: c_double,
    rw_ohm: c_double,
    out_power_w: *mut c_double,
    out_under_budget: *mut i32,
) -> EcStatus {
    nonnull!(out_power_w);
    match transmit_power(vpp_v, rw_ohm) {
        Ok(budget) => {
            *out_power_w = budget.power;
            write_out(out_under_budget, budget.under_budget as i32);
            EcStatus::Ok
        }
        Err(_) => EcStatus::DomainError,
    }
}

// --- modem --------------------------------------------------------------

/// Modem configuration. `scheme` is 0 for 2FSK, 1 for 2ASK.
#[no_mangle]
pub unsafe extern "C" fn ec_modem_config_new(
    sample_rate_hz: c_double,
    symbol_rate_hz: c_double,
    f1_hz: c_double,
    f2_hz: c_double,
    amplitude_v: c_double,
    scheme: i32,
    out: *mut *mut EcModemConfig,
) -> EcStatus {
    nonnull!(out);
    let scheme = match scheme {
        0 => Scheme::Fsk2,
        1 => Scheme::Ask2,
        _ => return EcStatus::InvalidArgument,
    };
    match ModemConfig::new(sample_rate_hz, symbol_rate_hz, f1_hz, f2_hz, amplitude_v, scheme) {
        Ok(cfg) => {
            *out = Box::into_raw(Box::new(EcModemConfig(cfg)));
            EcStatus::Ok
        }
        Err(_) => EcStatus::InvalidArgument,
    }
}

/// The default 5 kbit/s 2FSK configuration (fs 150 kHz, f1 10 kHz,
/// f2 20 kHz, 1 V).
#[no_mangle]
pub unsafe extern "C" fn ec_modem_config_default_fsk(out: *mut *mut EcModemConfig) -> EcStatus {
    nonnull!(out);
    *out = Box::into_raw(Box::new(EcModemConfig(ModemConfig::default_fsk())));
    EcStatus::Ok
}

/// Samples per symbol of a configuration.
#[no_mangle]
pub unsafe extern "C" fn ec_modem_config_samples_per_symbol(
    cfg: *const EcModemConfig,
    out: *mut size_t,
) -> EcStatus {
    nonnull!(cfg);
    nonnull!(out);
    *out = (*cfg).0.samples_per_symbol();
    EcStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn ec_modem_config_free(cfg: *mut EcModemConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

unsafe fn bits_from_raw(bits: *const u8, count: size_t) -> Option<Vec<bool>> {
    let slice = std::slice::from_raw_parts(bits, count);
    if slice.iter().any(|&b| b > 1) {
        return None;
    }
    Some(slice.iter().map(|&b| b == 1).collect())
}

/// Modulate `bit_count` bits (bytes valued 0 or 1) with the configured
/// scheme.
#[no_mangle]
pub unsafe extern "C" fn ec_modulate(
    cfg: *const EcModemConfig,
    bits: *const u8,
    bit_count: size_t,
    out: *mut *mut EcWaveform,
) -> EcStatus {
    nonnull!(cfg);
    nonnull!(out);
    if bits.is_null() && bit_count > 0 {
        return EcStatus::NullPointer;
    }
    let Some(bits) = bits_from_raw(bits, bit_count) else {
        return EcStatus::InvalidArgument;
    };
    let cfg = &(*cfg).0;
    let result = match cfg.scheme {
        Scheme::Fsk2 => fsk_modulate(&bits, cfg),
        Scheme::Ask2 => ask_modulate(&bits, cfg),
    };
    match result {
        Ok(wave) => {
            *out = Box::into_raw(Box::new(EcWaveform(wave)));
            EcStatus::Ok
        }
        Err(_) => EcStatus::InvalidArgument,
    }
}

/// Wrap caller-provided samples into a waveform handle (samples are
/// copied).
#[no_mangle]
pub unsafe extern "C" fn ec_waveform_new(
    samples: *const c_double,
    sample_count: size_t,
    sample_rate_hz: c_double,
    out: *mut *mut EcWaveform,
) -> EcStatus {
    nonnull!(out);
    if samples.is_null() && sample_count > 0 {
        return EcStatus::NullPointer;
    }
    let samples = std::slice::from_raw_parts(samples, sample_count).to_vec();
    *out = Box::into_raw(Box::new(EcWaveform(Waveform::new(samples, sample_rate_hz))));
    EcStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn ec_waveform_len(wave: *const EcWaveform, out: *mut size_t) -> EcStatus {
    nonnull!(wave);
    nonnull!(out);
    *out = (*wave).0.len();
    EcStatus::Ok
}

/// Copy samples into `buffer` (capacity `buffer_len`); fails with
/// `BufferTooSmall` if the waveform does not fit.
#[no_mangle]
pub unsafe extern "C" fn ec_waveform_samples(
    wave: *const EcWaveform,
    buffer: *mut c_double,
    buffer_len: size_t,
) -> EcStatus {
    nonnull!(wave);
    nonnull!(buffer);
    let samples = &(*wave).0.samples;
    if buffer_len < samples.len() {
        return EcStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(samples.as_ptr(), buffer, samples.len());
    EcStatus::Ok
}

#[no_mangle]
pub unsafe extern "C" fn ec_waveform_free(wave: *mut EcWaveform) {
    if !wave.is_null() {
        drop(Box::from_raw(wave));
    }
}

/// Add white Gaussian noise at an SNR (dB) relative to the waveform's own
/// mean power. Deterministic per seed.
#[no_mangle]
pub unsafe extern "C" fn ec_add_awgn_snr(
    wave: *const EcWaveform,
    snr_db: c_double,
    seed: u64,
    out: *mut *mut EcWaveform,
) -> EcStatus {
    nonnull!(wave);
    nonnull!(out);
    match add_awgn(&(*wave).0, &NoiseSpec::SnrDb { snr_db, seed }) {
        Ok(noisy) => {
            *out = Box::into_raw(Box::new(EcWaveform(noisy)));
            EcStatus::Ok
        }
        Err(_) => EcStatus::DomainError,
    }
}

/// Add white Gaussian noise with a fixed RMS floor in volts.
#[no_mangle]
pub unsafe extern "C" fn ec_add_awgn_floor(
    wave: *const EcWaveform,
    noise_rms_v: c_double,
    seed: u64,
    out: *mut *mut EcWaveform,
) -> EcStatus {
    nonnull!(wave);
    nonnull!(out);
    match add_awgn(&(*wave).0, &NoiseSpec::FloorVolts { noise_rms: noise_rms_v, seed }) {
        Ok(noisy) => {
            *out = Box::into_raw(Box::new(EcWaveform(noisy)));
            EcStatus::Ok
        }
        Err(_) => EcStatus::DomainError,
    }
}

/// Classical coherent demodulation into a caller buffer of 0/1 bytes.
/// `bit_capacity` must cover one bit per symbol; the bit count is written
/// to `out_bit_count`.
#[no_mangle]
pub unsafe extern "C" fn ec_coherent_demod(
    wave: *const EcWaveform,
    cfg: *const EcModemConfig,
    bits: *mut u8,
    bit_capacity: size_t,
    out_bit_count: *mut size_t,
) -> EcStatus {
    nonnull!(wave);
    nonnull!(cfg);
    nonnull!(bits);
    nonnull!(out_bit_count);
    match coherent_demod(&(*wave).0, &(*cfg).0) {
        Ok(decoded) => {
            if bit_capacity < decoded.len() {
                return EcStatus::BufferTooSmall;
            }
            for (i, bit) in decoded.iter().enumerate() {
                *bits.add(i) = *bit as u8;
            }
            *out_bit_count = decoded.len();
            EcStatus::Ok
        }
        Err(_) => EcStatus::FramingError,
    }
}

/// Fraction of differing bits between two equal-length 0/1 byte streams.
#[no_mangle]
pub unsafe extern "C" fn ec_bit_error_rate(
    tx: *const u8,
    rx: *const u8,
    bit_count: size_t,
    out_ber: *mut c_double,
) -> EcStatus {
    nonnull!(tx);
    nonnull!(rx);
    nonnull!(out_ber);
    let (Some(tx), Some(rx)) = (bits_from_raw(tx, bit_count), bits_from_raw(rx, bit_count)) else {
        return EcStatus::InvalidArgument;
    };
    match bit_error_rate(&tx, &rx) {
        Ok(ber) => {
            *out_ber = ber;
            EcStatus::Ok
        }
        Err(_) => EcStatus::InvalidArgument,
    }
}

// --- neural demodulator ---------------------------------------------------

/// Load a trained model from its text file.
#[no_mangle]
pub unsafe extern "C" fn ec_model_load(path: *const c_char, out: *mut *mut EcModel) -> EcStatus {
    nonnull!(path);
    nonnull!(out);
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        return EcStatus::InvalidArgument;
    };
    match MlpModel::load_from_path(path) {
        Ok(model) => {
            *out = Box::into_raw(Box::new(EcModel(model)));
            EcStatus::Ok
        }
        Err(ecomm_core::mlp::MlpError::Io(_)) => EcStatus::IoError,
        Err(_) => EcStatus::ParseError,
    }
}

/// Save a model to its text file.
#[no_mangle]
pub unsafe extern "C" fn ec_model_save(model: *const EcModel, path: *const c_char) -> EcStatus {
    nonnull!(model);
    nonnull!(path);
    let Ok(path) = CStr::from_ptr(path).to_str() else {
        return EcStatus::InvalidArgument;
    };
    match (*model).0.save_to_path(path) {
        Ok(()) => EcStatus::Ok,
        Err(_) => EcStatus::IoError,
    }
}

#[no_mangle]
pub unsafe extern "C" fn ec_model_free(model: *mut EcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// P(bit = 1) for one symbol window (`window_len` must equal the model
/// input width; the window is RMS-normalized internally).
#[no_mangle]
pub unsafe extern "C" fn ec_model_classify(
    model: *const EcModel,
    window: *const c_double,
    window_len: size_t,
    out_probability: *mut c_double,
) -> EcStatus {
    nonnull!(model);
    nonnull!(window);
    nonnull!(out_probability);
    let window = std::slice::from_raw_parts(window, window_len);
    let normalized = ecomm_core::mlp::normalize_window(window);
    match (*model).0.forward(&normalized) {
        Ok(p) => {
            *out_probability = p;
            EcStatus::Ok
        }
        Err(_) => EcStatus::InvalidArgument,
    }
}

/// Neural demodulation of a symbol-aligned waveform into a caller buffer
/// of 0/1 bytes.
#[no_mangle]
pub unsafe extern "C" fn ec_nn_demodulate(
    model: *const EcModel,
    wave: *const EcWaveform,
    cfg: *const EcModemConfig,
    bits: *mut u8,
    bit_capacity: size_t,
    out_bit_count: *mut size_t,
) -> EcStatus {
    nonnull!(model);
    nonnull!(wave);
    nonnull!(cfg);
    nonnull!(bits);
    nonnull!(out_bit_count);
    match nn_demodulate(&(*model).0, &(*wave).0, &(*cfg).0) {
        Ok(decoded) => {
            if bit_capacity < decoded.len() {
                return EcStatus::BufferTooSmall;
            }
            for (i, bit) in decoded.iter().enumerate() {
                *bits.add(i) = *bit as u8;
            }
            *out_bit_count = decoded.len();
            EcStatus::Ok
        }
        Err(ecomm_core::mlp::MlpError::Misaligned { .. }) => EcStatus::FramingError,
        Err(_) => EcStatus::InvalidArgument,
    }
}

/// Name of a sweep method code as used in CSV output: 0 coherent_fsk,
/// 1 nn_fsk, 2 coherent_ask.
#[no_mangle]
pub extern "C" fn ec_method_name(method: i32) -> *const c_char {
    let name: &'static [u8] = match method {
        0 => b"coherent_fsk\0",
        1 => b"nn_fsk\0",
        2 => b"coherent_ask\0",
        _ => b"unknown\0",
    };
    name.as_ptr() as *const c_char
}

//! Bit framing, 2FSK/2ASK modulation and classical coherent demodulation.
//!
//! The default configuration carries 5 kbit/s: 30 samples per symbol at a
//! 150 kHz sample rate, with carriers at 10 kHz (bit 0, two cycles per
//! symbol) and 20 kHz (bit 1, four cycles). Both carriers are integer
//! multiples of the symbol rate so they are exactly orthogonal over one
//! symbol and every symbol starts at zero phase.

use std::f64::consts::PI;
use std::io::Write;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModemError {
    #[error("invalid modem config: {0}")]
    Config(String),
    #[error("waveform length {len} is not a multiple of the {n}-sample symbol")]
    Misaligned { len: usize, n: usize },
    #[error("bit streams differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("bit streams are empty")]
    Empty,
    #[error("frame preamble not found")]
    PreambleMismatch,
    #[error("frame shorter than its declared payload")]
    LengthOverrun,
}

/// Binary modulation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Frequency shift keying: bit 0 -> f1, bit 1 -> f2.
    Fsk2,
    /// On-off keying: bit 1 -> f1 carrier, bit 0 -> silence.
    Ask2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModemConfig {
    pub sample_rate: f64,
    pub symbol_rate: f64,
    /// Carrier for bit 0 (FSK) / bit 1 (ASK), Hz.
    pub f1: f64,
    /// Carrier for bit 1 (FSK), Hz.
    pub f2: f64,
    pub amplitude: f64,
    pub scheme: Scheme,
}

impl ModemConfig {
    pub fn new(
        sample_rate: f64,
        symbol_rate: f64,
        f1: f64,
        f2: f64,
        amplitude: f64,
        scheme: Scheme,
    ) -> Result<Self, ModemError> {
        let cfg = ModemConfig {
            sample_rate,
            symbol_rate,
            f1,
            f2,
            amplitude,
            scheme,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// 5 kbit/s 2FSK: fs = 150 kHz, 30 samples/symbol, f1 = 10 kHz,
    /// f2 = 20 kHz, 1 V amplitude.
    pub fn default_fsk() -> Self {
        ModemConfig {
            sample_rate: 150_000.0,
            symbol_rate: 5_000.0,
            f1: 10_000.0,
            f2: 20_000.0,
            amplitude: 1.0,
            scheme: Scheme::Fsk2,
        }
    }

    /// Same timing and carrier as `default_fsk` but on-off keyed.
    pub fn default_ask() -> Self {
        ModemConfig {
            scheme: Scheme::Ask2,
            ..Self::default_fsk()
        }
    }

    pub fn validate(&self) -> Result<(), ModemError> {
        for (name, v) in [
            ("sample_rate", self.sample_rate),
            ("symbol_rate", self.symbol_rate),
            ("f1", self.f1),
            ("f2", self.f2),
            ("amplitude", self.amplitude),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModemError::Config(format!("{name} must be positive and finite")));
            }
        }
        let ratio = self.sample_rate / self.symbol_rate;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
            return Err(ModemError::Config(
                "sample_rate must be an integer multiple of symbol_rate".into(),
            ));
        }
        for (name, f) in [("f1", self.f1), ("f2", self.f2)] {
            let cycles = f / self.symbol_rate;
            if (cycles - cycles.round()).abs() > 1e-9 {
                return Err(ModemError::Config(format!(
                    "{name} must be an integer multiple of symbol_rate for coherent orthogonality"
                )));
            }
            if f >= self.sample_rate / 2.0 {
                return Err(ModemError::Config(format!("{name} must be below the Nyquist rate")));
            }
        }
        if self.f1 == self.f2 {
            return Err(ModemError::Config("f1 and f2 must differ".into()));
        }
        Ok(())
    }

    /// Samples per symbol (N).
    pub fn samples_per_symbol(&self) -> usize {
        (self.sample_rate / self.symbol_rate).round() as usize
    }
}

/// Uniformly sampled real-valued signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f64>,
    pub sample_rate: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, sample_rate: f64) -> Self {
        Waveform {
            samples,
            sample_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean square power over all samples.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|x| x * x).sum::<f64>() / self.samples.len() as f64
    }

    /// CSV with header `index,sample`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,sample")?;
        for (i, x) in self.samples.iter().enumerate() {
            writeln!(out, "{i},{x}")?;
        }
        Ok(())
    }
}

fn carrier_sample(frequency: f64, sample_rate: f64, n: usize) -> f64 {
    (2.0 * PI * frequency * n as f64 / sample_rate).sin()
}

/// 2FSK modulation with phase reset at every symbol boundary.
pub fn fsk_modulate(bits: &[bool], cfg: &ModemConfig) -> Result<Waveform, ModemError> {
    if cfg.scheme != Scheme::Fsk2 {
        return Err(ModemError::Config("fsk_modulate requires an FSK2 config".into()));
    }
    cfg.validate()?;
    let n = cfg.samples_per_symbol();
    let mut samples = Vec::with_capacity(n * bits.len());
    for &bit in bits {
        let f = if bit { cfg.f2 } else { cfg.f1 };
        for i in 0..n {
            samples.push(cfg.amplitude * carrier_sample(f, cfg.sample_rate, i));
        }
    }
    Ok(Waveform::new(samples, cfg.sample_rate))
}

/// 2ASK (on-off keying): bit 1 is an f1 burst, bit 0 is silence.
pub fn ask_modulate(bits: &[bool], cfg: &ModemConfig) -> Result<Waveform, ModemError> {
    if cfg.scheme != Scheme::Ask2 {
        return Err(ModemError::Config("ask_modulate requires an ASK2 config".into()));
    }
    cfg.validate()?;
    let n = cfg.samples_per_symbol();
    let mut samples = Vec::with_capacity(n * bits.len());
    for &bit in bits {
        for i in 0..n {
            if bit {
                samples.push(cfg.amplitude * carrier_sample(cfg.f1, cfg.sample_rate, i));
            } else {
                samples.push(0.0);
            }
        }
    }
    Ok(Waveform::new(samples, cfg.sample_rate))
}

/// Modulate with whichever scheme the config selects.
pub fn modulate(bits: &[bool], cfg: &ModemConfig) -> Result<Waveform, ModemError> {
    match cfg.scheme {
        Scheme::Fsk2 => fsk_modulate(bits, cfg),
        Scheme::Ask2 => ask_modulate(bits, cfg),
    }
}

/// In-phase correlation of one symbol window against a reference carrier.
fn correlate(window: &[f64], frequency: f64, sample_rate: f64) -> f64 {
    window
        .iter()
        .enumerate()
        .map(|(i, x)| x * carrier_sample(frequency, sample_rate, i))
        .sum()
}

/// Classical coherent demodulation with known symbol timing and zero
/// carrier phase. FSK compares the two correlator outputs (ties decode as
/// 0); ASK thresholds at half the noiseless on-symbol correlation.
pub fn coherent_demod(wave: &Waveform, cfg: &ModemConfig) -> Result<Vec<bool>, ModemError> {
    cfg.validate()?;
    let n = cfg.samples_per_symbol();
    if wave.len() % n != 0 {
        return Err(ModemError::Misaligned {
            len: wave.len(),
            n,
        });
    }
    let mut bits = Vec::with_capacity(wave.len() / n);
    for window in wave.samples.chunks_exact(n) {
        let bit = match cfg.scheme {
            Scheme::Fsk2 => {
                let s1 = correlate(window, cfg.f1, cfg.sample_rate);
                let s2 = correlate(window, cfg.f2, cfg.sample_rate);
                s2 > s1
            }
            Scheme::Ask2 => {
                let s = correlate(window, cfg.f1, cfg.sample_rate);
                s > n as f64 * cfg.amplitude / 4.0
            }
        };
        bits.push(bit);
    }
    Ok(bits)
}

/// Fraction of positions where the two streams differ.
pub fn bit_error_rate(tx: &[bool], rx: &[bool]) -> Result<f64, ModemError> {
    if tx.is_empty() {
        return Err(ModemError::Empty);
    }
    if tx.len() != rx.len() {
        return Err(ModemError::LengthMismatch(tx.len(), rx.len()));
    }
    let errors = tx.iter().zip(rx).filter(|(a, b)| a != b).count();
    Ok(errors as f64 / tx.len() as f64)
}

/// Frame preamble: 0xAA55, sent MSB-first.
pub const FRAME_PREAMBLE: u16 = 0xAA55;

fn push_u16_msb_first(bits: &mut Vec<bool>, value: u16) {
    for i in (0..16).rev() {
        bits.push(value >> i & 1 == 1);
    }
}

fn take_u16(bits: &[bool]) -> u16 {
    bits.iter().fold(0u16, |acc, &b| acc << 1 | b as u16)
}

/// Frame a payload: 16-bit preamble 0xAA55, 16-bit big-endian payload
/// length in bytes, then the payload MSB-first.
pub fn frame_bits(payload: &[u8]) -> Vec<bool> {
    let mut bits = Vec::with_capacity(32 + 8 * payload.len());
    push_u16_msb_first(&mut bits, FRAME_PREAMBLE);
    push_u16_msb_first(&mut bits, payload.len() as u16);
    for &byte in payload {
        for i in (0..8).rev() {
            bits.push(byte >> i & 1 == 1);
        }
    }
    bits
}

/// Inverse of `frame_bits`. Trailing bits beyond the declared payload are
/// ignored (they may belong to the next frame).
pub fn deframe_bits(bits: &[bool]) -> Result<Vec<u8>, ModemError> {
    if bits.len() < 32 {
        return Err(ModemError::PreambleMismatch);
    }
    if take_u16(&bits[..16]) != FRAME_PREAMBLE {
        return Err(ModemError::PreambleMismatch);
    }
    let length = take_u16(&bits[16..32]) as usize;
    if bits.len() < 32 + 8 * length {
        return Err(ModemError::LengthOverrun);
    }
    let payload = bits[32..32 + 8 * length]
        .chunks_exact(8)
        .map(|byte| byte.iter().fold(0u8, |acc, &b| acc << 1 | b as u8))
        .collect();
    Ok(payload)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use approx::assert_relative_eq;

    fn random_bits(count: usize, seed: u64) -> Vec<bool> {
        let mut rng = SplitMix64::new(seed);
        (0..count).map(|_| rng.next_bool()).collect()
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = ModemConfig::default_fsk();
        cfg.validate().unwrap();
        assert_eq!(cfg.samples_per_symbol(), 30);
    }

    #[test]
    fn config_rejects_non_orthogonal_carriers() {
        assert!(ModemConfig::new(150e3, 5e3, 10_500.0, 20e3, 1.0, Scheme::Fsk2).is_err());
        assert!(ModemConfig::new(150e3, 5e3, 10e3, 10e3, 1.0, Scheme::Fsk2).is_err());
        assert!(ModemConfig::new(150e3, 5e3, 10e3, 80e3, 1.0, Scheme::Fsk2).is_err());
        assert!(ModemConfig::new(141e3, 5e3, 10e3, 20e3, 1.0, Scheme::Fsk2).is_err());
    }

    #[test]
    fn fsk_empty_bits() {
        let wave = fsk_modulate(&[], &ModemConfig::default_fsk()).unwrap();
        assert!(wave.is_empty());
    }

    #[test]
    fn fsk_single_zero_symbol_is_two_cycles() {
        let cfg = ModemConfig::default_fsk();
        let wave = fsk_modulate(&[false], &cfg).unwrap();
        assert_eq!(wave.len(), 30);
        assert_eq!(wave.samples[0], 0.0);
        // 10 kHz at 150 kHz sampling = 2 full cycles over 30 samples, so
        // sample 15 starts the second cycle at ~0.
        assert!(wave.samples[15].abs() < 1e-12);
    }

    #[test]
    fn fsk_per_symbol_energy() {
        let cfg = ModemConfig::default_fsk();
        let wave = fsk_modulate(&[false, true], &cfg).unwrap();
        let n = cfg.samples_per_symbol();
        let expected = n as f64 * cfg.amplitude * cfg.amplitude / 2.0;
        for window in wave.samples.chunks_exact(n) {
            let energy: f64 = window.iter().map(|x| x * x).sum();
            assert_relative_eq!(energy, expected, max_relative = 1e-9);
        }
    }

    #[test]
    fn ask_symbols() {
        let cfg = ModemConfig::default_ask();
        let off = ask_modulate(&[false], &cfg).unwrap();
        assert!(off.samples.iter().all(|&x| x == 0.0));

        let on = ask_modulate(&[true], &cfg).unwrap();
        let fsk_cfg = ModemConfig::default_fsk();
        let reference = fsk_modulate(&[false], &fsk_cfg).unwrap();
        assert_eq!(on.samples, reference.samples);

        let three = ask_modulate(&[true, false, true], &cfg).unwrap();
        let middle: f64 = three.samples[30..60].iter().map(|x| x * x).sum();
        assert_eq!(middle, 0.0);
    }

    #[test]
    fn carrier_orthogonality() {
        let cfg = ModemConfig::default_fsk();
        let n = cfg.samples_per_symbol();
        let dot: f64 = (0..n)
            .map(|i| {
                carrier_sample(cfg.f1, cfg.sample_rate, i) * carrier_sample(cfg.f2, cfg.sample_rate, i)
            })
            .sum();
        assert!(dot.abs() < 1e-9 * n as f64);
    }

    #[test]
    fn noiseless_round_trip_fsk() {
        let cfg = ModemConfig::default_fsk();
        let bits = random_bits(1000, 31);
        let wave = fsk_modulate(&bits, &cfg).unwrap();
        let decoded = coherent_demod(&wave, &cfg).unwrap();
        assert_eq!(decoded, bits);
        assert_eq!(bit_error_rate(&bits, &decoded).unwrap(), 0.0);
    }

    #[test]
    fn noiseless_round_trip_ask() {
        let cfg = ModemConfig::default_ask();
        let bits = random_bits(1000, 32);
        let wave = ask_modulate(&bits, &cfg).unwrap();
        assert_eq!(coherent_demod(&wave, &cfg).unwrap(), bits);
    }

    #[test]
    fn all_zero_waveform_decodes_to_zeros() {
        let cfg = ModemConfig::default_fsk();
        let wave = Waveform::new(vec![0.0; 90], cfg.sample_rate);
        assert_eq!(coherent_demod(&wave, &cfg).unwrap(), vec![false; 3]);
    }

    #[test]
    fn demod_rejects_misaligned_length() {
        let cfg = ModemConfig::default_fsk();
        let wave = Waveform::new(vec![0.0; 31], cfg.sample_rate);
        assert!(matches!(
            coherent_demod(&wave, &cfg),
            Err(ModemError::Misaligned { .. })
        ));
    }

    #[test]
    fn output_length_is_symbol_count_times_n() {
        let cfg = ModemConfig::default_fsk();
        for count in [1usize, 7, 64] {
            let wave = fsk_modulate(&random_bits(count, count as u64), &cfg).unwrap();
            assert_eq!(wave.len(), 30 * count);
        }
    }

    #[test]
    fn ber_definitional_cases() {
        let a = [true, false, true, true, false, false, true, false];
        assert_eq!(bit_error_rate(&a, &a).unwrap(), 0.0);
        let complement: Vec<bool> = a.iter().map(|b| !b).collect();
        assert_eq!(bit_error_rate(&a, &complement).unwrap(), 1.0);
        let mut one_off = a.to_vec();
        one_off[3] = !one_off[3];
        assert_eq!(bit_error_rate(&a, &one_off).unwrap(), 0.125);
        assert!(bit_error_rate(&a, &a[..4]).is_err());
        assert!(bit_error_rate(&[], &[]).is_err());
    }

    #[test]
    fn frame_header_only() {
        let bits = frame_bits(&[]);
        assert_eq!(bits.len(), 32);
        assert_eq!(deframe_bits(&bits).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn frame_single_ff_byte() {
        let bits = frame_bits(&[0xFF]);
        assert_eq!(bits.len(), 40);
        assert!(bits[32..].iter().all(|&b| b));
    }

    #[test]
    fn frame_error_paths() {
        let mut bits = frame_bits(&[1, 2, 3]);
        bits[0] = !bits[0];
        assert_eq!(deframe_bits(&bits), Err(ModemError::PreambleMismatch));

        let bits = frame_bits(&[1, 2, 3]);
        assert_eq!(deframe_bits(&bits[..40]), Err(ModemError::LengthOverrun));
        assert_eq!(deframe_bits(&bits[..8]), Err(ModemError::PreambleMismatch));
    }

    #[test]
    fn waveform_csv_header() {
        let wave = Waveform::new(vec![1.5, -0.25], 10.0);
        let mut buf = Vec::new();
        wave.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "index,sample\n0,1.5\n1,-0.25\n");
    }
}

//! Exercises the C ABI from Rust: handle lifecycles, out-pointer
//! conventions and status codes.

use ecomm_ffi::*;
use std::ffi::CStr;
use std::ptr;

fn status_name(s: EcStatus) -> String {
    unsafe { CStr::from_ptr(ec_status_message(s)) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn status_messages_are_static_strings() {
    assert_eq!(status_name(EcStatus::Ok), "ok");
    assert_eq!(status_name(EcStatus::NullPointer), "null pointer argument");
    assert!(!status_name(EcStatus::BufferTooSmall).is_empty());
}

#[test]
fn medium_lifecycle_and_domain_checks() {
    unsafe {
        let mut medium = ptr::null_mut();
        assert_eq!(ec_medium_freshwater(&mut medium), EcStatus::Ok);
        assert!(!medium.is_null());

        let mut ratio = 0.0;
        assert_eq!(ec_quasi_static_ratio(medium, 1e6, &mut ratio), EcStatus::Ok);
        assert!((ratio - 0.4449).abs() < 1e-3, "ratio {ratio}");
        ec_medium_free(medium);

        let mut bad = ptr::null_mut();
        assert_eq!(ec_medium_new(0.0, 7.08e-10, 1.2566e-6, &mut bad), EcStatus::DomainError);
        assert_eq!(ec_medium_freshwater(ptr::null_mut()), EcStatus::NullPointer);
    }
}

#[test]
fn received_voltage_matches_reference_point() {
    unsafe {
        let mut medium = ptr::null_mut();
        let mut geometry = ptr::null_mut();
        assert_eq!(ec_medium_freshwater(&mut medium), EcStatus::Ok);
        assert_eq!(ec_geometry_current_drive(0.25, 0.25, 0.5, &mut geometry), EcStatus::Ok);

        let mut volts = 0.0;
        let mut warning = -1;
        assert_eq!(
            ec_received_voltage(medium, geometry, 3.0, 1.0, &mut volts, &mut warning),
            EcStatus::Ok
        );
        assert!((volts - 9.211e-3).abs() / 9.211e-3 < 1e-3, "volts {volts}");
        assert_eq!(warning, 0);

        assert_eq!(
            ec_received_voltage(medium, geometry, 0.5, 1.0, &mut volts, &mut warning),
            EcStatus::Ok
        );
        assert_eq!(warning, 1);

        assert_eq!(
            ec_received_voltage(medium, geometry, -1.0, 1.0, &mut volts, &mut warning),
            EcStatus::DomainError
        );
        ec_geometry_free(geometry);
        ec_medium_free(medium);
    }
}

#[test]
fn voltage_drive_geometry_works() {
    unsafe {
        let mut geometry = ptr::null_mut();
        assert_eq!(
            ec_geometry_voltage_drive(0.25, 0.25, 12.0, 200.0, &mut geometry),
            EcStatus::Ok
        );
        ec_geometry_free(geometry);
        assert_eq!(
            ec_geometry_voltage_drive(0.25, 0.25, 12.0, 0.0, &mut geometry),
            EcStatus::DomainError
        );
    }
}

#[test]
fn attenuation_factor_is_one_at_zero() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(ec_attenuation_factor(0.0, &mut v), EcStatus::Ok);
        assert_eq!(v, 1.0);
        assert_eq!(ec_attenuation_factor(-1.0, &mut v), EcStatus::DomainError);
    }
}

#[test]
fn transmit_power_budget() {
    unsafe {
        let mut power = 0.0;
        let mut under = 0;
        assert_eq!(ec_transmit_power(12.0, 200.0, &mut power, &mut under), EcStatus::Ok);
        assert!((power - 0.09).abs() < 1e-12);
        assert_eq!(under, 1);
        assert_eq!(ec_transmit_power(12.0, 0.0, &mut power, &mut under), EcStatus::DomainError);
    }
}

#[test]
fn modulate_demodulate_round_trip() {
    unsafe {
        let mut cfg = ptr::null_mut();
        assert_eq!(ec_modem_config_default_fsk(&mut cfg), EcStatus::Ok);

        let mut n = 0usize;
        assert_eq!(ec_modem_config_samples_per_symbol(cfg, &mut n), EcStatus::Ok);
        assert_eq!(n, 30);

        let tx: Vec<u8> = (0..16).map(|i| (i % 3 == 0) as u8).collect();
        let mut wave = ptr::null_mut();
        assert_eq!(ec_modulate(cfg, tx.as_ptr(), tx.len(), &mut wave), EcStatus::Ok);

        let mut len = 0usize;
        assert_eq!(ec_waveform_len(wave, &mut len), EcStatus::Ok);
        assert_eq!(len, 16 * 30);

        let mut rx = vec![9u8; 16];
        let mut count = 0usize;
        assert_eq!(
            ec_coherent_demod(wave, cfg, rx.as_mut_ptr(), rx.len(), &mut count),
            EcStatus::Ok
        );
        assert_eq!(count, 16);
        assert_eq!(rx, tx);

        let mut ber = -1.0;
        assert_eq!(ec_bit_error_rate(tx.as_ptr(), rx.as_ptr(), 16, &mut ber), EcStatus::Ok);
        assert_eq!(ber, 0.0);

        // Too-small output buffer is reported, not truncated.
        let mut tiny = [0u8; 4];
        assert_eq!(
            ec_coherent_demod(wave, cfg, tiny.as_mut_ptr(), tiny.len(), &mut count),
            EcStatus::BufferTooSmall
        );

        ec_waveform_free(wave);
        ec_modem_config_free(cfg);
    }
}

#[test]
fn modulate_rejects_non_binary_bytes() {
    unsafe {
        let mut cfg = ptr::null_mut();
        ec_modem_config_default_fsk(&mut cfg);
        let bits = [0u8, 1, 2];
        let mut wave = ptr::null_mut();
        assert_eq!(ec_modulate(cfg, bits.as_ptr(), 3, &mut wave), EcStatus::InvalidArgument);
        ec_modem_config_free(cfg);
    }
}

#[test]
fn modem_config_new_validates() {
    unsafe {
        let mut cfg = ptr::null_mut();
        // 13 kHz is not an integer multiple of the symbol rate.
        assert_eq!(
            ec_modem_config_new(150_000.0, 5_000.0, 13_000.0, 20_000.0, 1.0, 0, &mut cfg),
            EcStatus::InvalidArgument
        );
        assert_eq!(
            ec_modem_config_new(150_000.0, 5_000.0, 10_000.0, 20_000.0, 1.0, 7, &mut cfg),
            EcStatus::InvalidArgument
        );
        assert_eq!(
            ec_modem_config_new(150_000.0, 5_000.0, 10_000.0, 20_000.0, 1.0, 1, &mut cfg),
            EcStatus::Ok
        );
        ec_modem_config_free(cfg);
    }
}

#[test]
fn awgn_is_deterministic_per_seed() {
    unsafe {
        let mut cfg = ptr::null_mut();
        ec_modem_config_default_fsk(&mut cfg);
        let bits = [1u8, 0, 1, 1];
        let mut wave = ptr::null_mut();
        ec_modulate(cfg, bits.as_ptr(), bits.len(), &mut wave);

        let samples_of = |w: *mut EcWaveform| {
            let mut len = 0usize;
            assert_eq!(ec_waveform_len(w, &mut len), EcStatus::Ok);
            let mut buf = vec![0.0f64; len];
            assert_eq!(ec_waveform_samples(w, buf.as_mut_ptr(), len), EcStatus::Ok);
            buf
        };

        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        let mut c = ptr::null_mut();
        assert_eq!(ec_add_awgn_snr(wave, 0.0, 42, &mut a), EcStatus::Ok);
        assert_eq!(ec_add_awgn_snr(wave, 0.0, 42, &mut b), EcStatus::Ok);
        assert_eq!(ec_add_awgn_snr(wave, 0.0, 43, &mut c), EcStatus::Ok);
        assert_eq!(samples_of(a), samples_of(b));
        assert_ne!(samples_of(a), samples_of(c));

        let mut floored = ptr::null_mut();
        assert_eq!(ec_add_awgn_floor(wave, 0.1, 1, &mut floored), EcStatus::Ok);

        for w in [a, b, c, floored, wave] {
            ec_waveform_free(w);
        }
        ec_modem_config_free(cfg);
    }
}

#[test]
fn waveform_new_copies_samples() {
    unsafe {
        let samples = [0.5f64, -0.25, 0.125];
        let mut wave = ptr::null_mut();
        assert_eq!(ec_waveform_new(samples.as_ptr(), 3, 150e3, &mut wave), EcStatus::Ok);
        let mut buf = [0.0f64; 3];
        assert_eq!(ec_waveform_samples(wave, buf.as_mut_ptr(), 3), EcStatus::Ok);
        assert_eq!(buf, samples);
        let mut small = [0.0f64; 2];
        assert_eq!(
            ec_waveform_samples(wave, small.as_mut_ptr(), 2),
            EcStatus::BufferTooSmall
        );
        ec_waveform_free(wave);
    }
}

#[test]
fn model_load_save_and_classify() {
    use ecomm_core::mlp::MlpModel;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.ecmlp");
    MlpModel::init(5).save_to_path(&path).unwrap();
    let c_path = std::ffi::CString::new(path.to_str().unwrap()).unwrap();

    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(ec_model_load(c_path.as_ptr(), &mut model), EcStatus::Ok);

        let window = [0.25f64; 30];
        let mut p = -1.0;
        assert_eq!(ec_model_classify(model, window.as_ptr(), 30, &mut p), EcStatus::Ok);
        assert!(p > 0.0 && p < 1.0);
        assert_eq!(
            ec_model_classify(model, window.as_ptr(), 7, &mut p),
            EcStatus::InvalidArgument
        );

        let copy = dir.path().join("copy.ecmlp");
        let c_copy = std::ffi::CString::new(copy.to_str().unwrap()).unwrap();
        assert_eq!(ec_model_save(model, c_copy.as_ptr()), EcStatus::Ok);
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&copy).unwrap(),
            "save/load round trip must be byte-exact"
        );
        ec_model_free(model);
    }
}

#[test]
fn model_load_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = dir.path().join("garbage.ecmlp");
    std::fs::write(&garbage, "not a model\n").unwrap();
    let missing = std::ffi::CString::new(dir.path().join("missing").to_str().unwrap()).unwrap();
    let garbage = std::ffi::CString::new(garbage.to_str().unwrap()).unwrap();
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(ec_model_load(missing.as_ptr(), &mut model), EcStatus::IoError);
        assert_eq!(ec_model_load(garbage.as_ptr(), &mut model), EcStatus::ParseError);
        assert_eq!(ec_model_load(ptr::null(), &mut model), EcStatus::NullPointer);
    }
}

#[test]
fn nn_demodulate_reports_misalignment() {
    use ecomm_core::mlp::MlpModel;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.ecmlp");
    MlpModel::init(1).save_to_path(&path).unwrap();
    let c_path = std::ffi::CString::new(path.to_str().unwrap()).unwrap();

    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(ec_model_load(c_path.as_ptr(), &mut model), EcStatus::Ok);
        let mut cfg = ptr::null_mut();
        ec_modem_config_default_fsk(&mut cfg);

        // 45 samples is one and a half symbols.
        let samples = vec![0.1f64; 45];
        let mut wave = ptr::null_mut();
        ec_waveform_new(samples.as_ptr(), samples.len(), 150e3, &mut wave);
        let mut bits = [0u8; 4];
        let mut count = 0usize;
        assert_eq!(
            ec_nn_demodulate(model, wave, cfg, bits.as_mut_ptr(), 4, &mut count),
            EcStatus::FramingError
        );

        ec_waveform_free(wave);
        ec_modem_config_free(cfg);
        ec_model_free(model);
    }
}

#[test]
fn method_names_match_csv_vocabulary() {
    let name = |m| unsafe { CStr::from_ptr(ec_method_name(m)) }.to_string_lossy().into_owned();
    assert_eq!(name(0), "coherent_fsk");
    assert_eq!(name(1), "nn_fsk");
    assert_eq!(name(2), "coherent_ask");
    assert_eq!(name(9), "unknown");
}

#[test]
fn generated_header_exists_and_exports_the_abi() {
    let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("include")
        .join("ecomm.h");
    let text = std::fs::read_to_string(&header).expect("cbindgen header");
    assert!(text.contains("#ifndef ECOMM_H"));
    for symbol in [
        "ec_medium_freshwater",
        "ec_received_voltage",
        "ec_modulate",
        "ec_coherent_demod",
        "ec_nn_demodulate",
        "ec_model_load",
        "ec_transmit_power",
    ] {
        assert!(text.contains(symbol), "header is missing {symbol}");
    }
}

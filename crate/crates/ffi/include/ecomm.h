#ifndef ECOMM_H
#define ECOMM_H

/* Generated by cbindgen from ecomm-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every FFI call.
 */
typedef enum EcStatus {
  EcStatus_Ok = 0,
  EcStatus_NullPointer = 1,
  EcStatus_InvalidArgument = 2,
  EcStatus_DomainError = 3,
  EcStatus_FramingError = 4,
  EcStatus_IoError = 5,
  EcStatus_ParseError = 6,
  EcStatus_BufferTooSmall = 7,
} EcStatus;

/**
 * Electrode geometry and drive handle.
 */
typedef struct EcGeometry EcGeometry;

/**
 * Water medium handle.
 */
typedef struct EcMedium EcMedium;

/**
 * Trained demodulation model handle.
 */
typedef struct EcModel EcModel;

/**
 * Modem configuration handle.
 */
typedef struct EcModemConfig EcModemConfig;

/**
 * Sampled waveform handle.
 */
typedef struct EcWaveform EcWaveform;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *ec_status_message(enum EcStatus status);

/**
 * New medium from explicit constants. Fails with `DomainError` unless all
 * three are strictly positive and finite.
 */
enum EcStatus ec_medium_new(double conductivity,
                            double permittivity,
                            double permeability,
                            struct EcMedium **out);

/**
 * Freshwater preset (sigma = 0.01 S/m).
 */
enum EcStatus ec_medium_freshwater(struct EcMedium **out);

/**
 * Seawater preset (sigma = 4 S/m).
 */
enum EcStatus ec_medium_seawater(struct EcMedium **out);

void ec_medium_free(struct EcMedium *medium);

/**
 * Geometry with a known electrode current.
 */
enum EcStatus ec_geometry_current_drive(double d1_m,
                                        double d2_m,
                                        double current_a,
                                        struct EcGeometry **out);

/**
 * Geometry with a known source voltage across a known water resistance.
 */
enum EcStatus ec_geometry_voltage_drive(double d1_m,
                                        double d2_m,
                                        double voltage_v,
                                        double water_resistance_ohm,
                                        struct EcGeometry **out);

void ec_geometry_free(struct EcGeometry *geometry);

/**
 * Displacement/conduction current amplitude ratio at `frequency_hz`.
 */
enum EcStatus ec_quasi_static_ratio(const struct EcMedium *medium,
                                    double frequency_hz,
                                    double *out_ratio);

/**
 * Distance factor sqrt(1+2t+2t^2+4t^3+4t^4)*e^-t.
 */
enum EcStatus ec_attenuation_factor(double t, double *out_factor);

/**
 * Near-field radius lambda/(2*pi) in meters.
 */
enum EcStatus ec_near_field_radius(const struct EcMedium *medium,
                                   double frequency_hz,
                                   double *out_radius_m);

/**
 * Received voltage across the receiving electrodes at axial distance `r_m`.
 * `out_separation_warning`, when non-null, is set non-zero when r is
 * within 4x the electrode separation and the closed form is suspect.
 */
enum EcStatus ec_received_voltage(const struct EcMedium *medium,
                                  const struct EcGeometry *geometry,
                                  double r_m,
                                  double frequency_hz,
                                  double *out_volts,
                                  int32_t *out_separation_warning);

/**
 * Transmit power vpp^2/(8*Rw); `out_under_budget` is non-zero below the
 * 0.1 W budget.
 */
enum EcStatus ec_transmit_power(double vpp_v,
                                double rw_ohm,
                                double *out_power_w,
                                int32_t *out_under_budget);

/**
 * Modem configuration. `scheme` is 0 for 2FSK, 1 for 2ASK.
 */
enum EcStatus ec_modem_config_new(double sample_rate_hz,
                                  double symbol_rate_hz,
                                  double f1_hz,
                                  double f2_hz,
                                  double amplitude_v,
                                  int32_t scheme,
                                  struct EcModemConfig **out);

/**
 * The default 5 kbit/s 2FSK configuration (fs 150 kHz, f1 10 kHz,
 * f2 20 kHz, 1 V).
 */
enum EcStatus ec_modem_config_default_fsk(struct EcModemConfig **out);

/**
 * Samples per symbol of a configuration.
 */
enum EcStatus ec_modem_config_samples_per_symbol(const struct EcModemConfig *cfg, size_t *out);

void ec_modem_config_free(struct EcModemConfig *cfg);

/**
 * Modulate `bit_count` bits (bytes valued 0 or 1) with the configured
 * scheme.
 */
enum EcStatus ec_modulate(const struct EcModemConfig *cfg,
                          const uint8_t *bits,
                          size_t bit_count,
                          struct EcWaveform **out);

/**
 * Wrap caller-provided samples into a waveform handle (samples are
 * copied).
 */
enum EcStatus ec_waveform_new(const double *samples,
                              size_t sample_count,
                              double sample_rate_hz,
                              struct EcWaveform **out);

enum EcStatus ec_waveform_len(const struct EcWaveform *wave, size_t *out);

/**
 * Copy samples into `buffer` (capacity `buffer_len`); fails with
 * `BufferTooSmall` if the waveform does not fit.
 */
enum EcStatus ec_waveform_samples(const struct EcWaveform *wave, double *buffer, size_t buffer_len);

void ec_waveform_free(struct EcWaveform *wave);

/**
 * Add white Gaussian noise at an SNR (dB) relative to the waveform's own
 * mean power. Deterministic per seed.
 */
enum EcStatus ec_add_awgn_snr(const struct EcWaveform *wave,
                              double snr_db,
                              uint64_t seed,
                              struct EcWaveform **out);

/**
 * Add white Gaussian noise with a fixed RMS floor in volts.
 */
enum EcStatus ec_add_awgn_floor(const struct EcWaveform *wave,
                                double noise_rms_v,
                                uint64_t seed,
                                struct EcWaveform **out);

/**
 * Classical coherent demodulation into a caller buffer of 0/1 bytes.
 * `bit_capacity` must cover one bit per symbol; the bit count is written
 * to `out_bit_count`.
 */
enum EcStatus ec_coherent_demod(const struct EcWaveform *wave,
                                const struct EcModemConfig *cfg,
                                uint8_t *bits,
                                size_t bit_capacity,
                                size_t *out_bit_count);

/**
 * Fraction of differing bits between two equal-length 0/1 byte streams.
 */
enum EcStatus ec_bit_error_rate(const uint8_t *tx,
                                const uint8_t *rx,
                                size_t bit_count,
                                double *out_ber);

/**
 * Load a trained model from its text file.
 */
enum EcStatus ec_model_load(const char *path, struct EcModel **out);

/**
 * Save a model to its text file.
 */
enum EcStatus ec_model_save(const struct EcModel *model, const char *path);

void ec_model_free(struct EcModel *model);

/**
 * P(bit = 1) for one symbol window (`window_len` must equal the model
 * input width; the window is RMS-normalized internally).
 */
enum EcStatus ec_model_classify(const struct EcModel *model,
                                const double *window,
                                size_t window_len,
                                double *out_probability);

/**
 * Neural demodulation of a symbol-aligned waveform into a caller buffer
 * of 0/1 bytes.
 */
enum EcStatus ec_nn_demodulate(const struct EcModel *model,
                               const struct EcWaveform *wave,
                               const struct EcModemConfig *cfg,
                               uint8_t *bits,
                               size_t bit_capacity,
                               size_t *out_bit_count);

/**
 * Name of a sweep method code as used in CSV output: 0 coherent_fsk,
 * 1 nn_fsk, 2 coherent_ask.
 */
const char *ec_method_name(int32_t method);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ECOMM_H */

//! Desk-scale laboratory for underwater electric-field communication.
//!
//! The crate covers the whole link end to end:
//!
//! * [`field`]: quasi-static dipole channel physics: wavenumber,
//!   field components, near-field radius and the received-voltage
//!   closed form.
//! * [`modem`]: bit framing, 2FSK/2ASK modulation and classical
//!   coherent demodulation.
//! * [`channel`]: link attenuation plus seeded AWGN.
//! * [`mlp`]: a from-scratch neural-network demodulator (30-28-10-1,
//!   tanh/sigmoid) with training, persistence and stream demodulation.
//! * [`ber`]: Monte-Carlo BER sweeps over SNR and distance, voltage
//!   curves and the transmit power budget.
//! * [`config`]: the `key = value` run-configuration format used by the
//!   `ecomm` CLI.
//!
//! Every stochastic step is seeded through [`rng::SplitMix64`], so any
//! sweep or training run is byte-reproducible from its configuration.

pub mod ber;
pub mod channel;
pub mod config;
pub mod field;
pub mod mlp;
pub mod modem;
pub mod rng;

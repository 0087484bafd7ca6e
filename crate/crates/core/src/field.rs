//! Quasi-static dipole model of the underwater electric-field channel.
//!
//! A pair of transmitting electrodes driven by a sinusoidal current behaves
//! as an electric dipole in conductive water. The model below gives the
//! complex field components around the dipole, the near-field radius, and
//! the closed-form voltage induced across a coaxial receiving electrode
//! pair:
//!
//! ```text
//! U2 = I0*d1*d2 / (4*pi*sigma*r^3) * sqrt(1 + 2t + 2t^2 + 4t^3 + 4t^4) * e^-t
//! ```
//!
//! with `t = r*sqrt(omega*mu*sigma/2)`. The wavenumber is taken as
//! `k = kappa - j*kappa` (decaying convention); the opposite sign would make
//! the field grow exponentially with distance, contradicting the closed
//! form above. The equivalence of the two routes is pinned by a test.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Permittivity of water at 20 degrees C, F/m (about 80x vacuum).
pub const WATER_PERMITTIVITY: f64 = 7.08e-10;
/// Vacuum permeability, H/m. Water is non-magnetic, so this is the default.
pub const VACUUM_PERMEABILITY: f64 = 4.0e-7 * PI;
/// Typical seawater conductivity, S/m.
pub const SEAWATER_CONDUCTIVITY: f64 = 4.0;
/// Lower end of freshwater conductivity, S/m.
pub const FRESHWATER_CONDUCTIVITY: f64 = 0.01;

/// The displacement current is negligible (and the quasi-static model
/// valid) when the displacement/conduction amplitude ratio is below this.
pub const QUASI_STATIC_LIMIT: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} must be strictly positive and finite")]
    NotPositive(&'static str),
    #[error("{0} must be finite")]
    NotFinite(&'static str),
    #[error("{0} must be non-negative")]
    Negative(&'static str),
    #[error("link geometry must specify either a drive current or a drive voltage with water resistance")]
    MissingDrive,
}

/// Electrical properties of the transmission medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterMedium {
    /// sigma, S/m.
    pub conductivity: f64,
    /// epsilon, F/m.
    pub permittivity: f64,
    /// mu, H/m.
    pub permeability: f64,
}

impl WaterMedium {
    pub fn new(conductivity: f64, permittivity: f64, permeability: f64) -> Result<Self, FieldError> {
        for (name, v) in [
            ("conductivity", conductivity),
            ("permittivity", permittivity),
            ("permeability", permeability),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(FieldError::NotPositive(name));
            }
        }
        Ok(WaterMedium {
            conductivity,
            permittivity,
            permeability,
        })
    }

    /// Freshwater preset: sigma = 0.01 S/m.
    pub fn freshwater() -> Self {
        WaterMedium {
            conductivity: FRESHWATER_CONDUCTIVITY,
            permittivity: WATER_PERMITTIVITY,
            permeability: VACUUM_PERMEABILITY,
        }
    }

    /// Seawater preset: sigma = 4 S/m.
    pub fn seawater() -> Self {
        WaterMedium {
            conductivity: SEAWATER_CONDUCTIVITY,
            permittivity: WATER_PERMITTIVITY,
            permeability: VACUUM_PERMEABILITY,
        }
    }
}

/// How the transmitting dipole is driven.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveSpec {
    /// Known electrode current I0, A.
    Current { amps: f64 },
    /// Known source voltage U1 across a known water resistance Rw; the
    /// effective electrode current is U1/Rw.
    Voltage { volts: f64, water_resistance: f64 },
}

/// Electrode geometry and drive of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Transmitting electrode separation d1, m.
    pub tx_separation: f64,
    /// Receiving electrode separation d2, m.
    pub rx_separation: f64,
    pub drive: DriveSpec,
}

impl LinkGeometry {
    pub fn new(tx_separation: f64, rx_separation: f64, drive: DriveSpec) -> Result<Self, FieldError> {
        if !(tx_separation.is_finite() && tx_separation > 0.0) {
            return Err(FieldError::NotPositive("tx_separation"));
        }
        if !(rx_separation.is_finite() && rx_separation > 0.0) {
            return Err(FieldError::NotPositive("rx_separation"));
        }
        match drive {
            DriveSpec::Current { amps } => {
                if !amps.is_finite() {
                    return Err(FieldError::NotFinite("drive current"));
                }
            }
            DriveSpec::Voltage {
                volts,
                water_resistance,
            } => {
                if !volts.is_finite() {
                    return Err(FieldError::NotFinite("drive voltage"));
                }
                if !(water_resistance.is_finite() && water_resistance > 0.0) {
                    return Err(FieldError::NotPositive("water resistance"));
                }
            }
        }
        Ok(LinkGeometry {
            tx_separation,
            rx_separation,
            drive,
        })
    }

    /// Electrode current in amps regardless of drive kind.
    pub fn effective_current(&self) -> f64 {
        match self.drive {
            DriveSpec::Current { amps } => amps,
            DriveSpec::Voltage {
                volts,
                water_resistance,
            } => volts / water_resistance,
        }
    }
}

/// Complex wavenumber of a conductive medium, equal real and imaginary
/// magnitudes `kappa = sqrt(omega*mu*sigma/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexWavenumber {
    /// kappa, 1/m.
    pub real_part: f64,
    /// -kappa (decaying sign convention), 1/m.
    pub imag_part: f64,
}

impl ComplexWavenumber {
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.real_part, self.imag_part)
    }
}

/// One complex field sample at polar position (r, theta) around the dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    /// Radial component, V/m.
    pub e_r: Complex64,
    /// Azimuthal component, V/m.
    pub e_theta: Complex64,
    pub r: f64,
    pub theta: f64,
}

/// Received voltage with a validity note on the electrode-scale assumption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceivedVoltage {
    pub volts: f64,
    /// True when r < 4*max(d1, d2): the field is no longer approximately
    /// constant across the receiving electrodes, so the d2 factor in the
    /// closed form is suspect.
    pub separation_warning: bool,
}

fn check_frequency(frequency_hz: f64) -> Result<(), FieldError> {
    if !frequency_hz.is_finite() {
        return Err(FieldError::NotFinite("frequency"));
    }
    if frequency_hz < 0.0 {
        return Err(FieldError::Negative("frequency"));
    }
    Ok(())
}

/// Amplitude ratio of displacement to conduction current,
/// `epsilon * omega / sigma`. Linear in frequency.
pub fn quasi_static_ratio(medium: &WaterMedium, frequency_hz: f64) -> Result<f64, FieldError> {
    check_frequency(frequency_hz)?;
    Ok(medium.permittivity * 2.0 * PI * frequency_hz / medium.conductivity)
}

/// True when the quasi-static model is valid at this frequency.
pub fn quasi_static_ok(medium: &WaterMedium, frequency_hz: f64) -> Result<bool, FieldError> {
    Ok(quasi_static_ratio(medium, frequency_hz)? < QUASI_STATIC_LIMIT)
}

/// Complex wavenumber at `frequency_hz`. Requires f > 0.
pub fn wavenumber(medium: &WaterMedium, frequency_hz: f64) -> Result<ComplexWavenumber, FieldError> {
    if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
        return Err(FieldError::NotPositive("frequency"));
    }
    let omega = 2.0 * PI * frequency_hz;
    let kappa = (omega * medium.permeability * medium.conductivity / 2.0).sqrt();
    Ok(ComplexWavenumber {
        real_part: kappa,
        imag_part: -kappa,
    })
}

/// Dimensionless distance `t = r*kappa`; 0 at zero frequency.
pub fn dimensionless_distance(
    medium: &WaterMedium,
    frequency_hz: f64,
    r: f64,
) -> Result<f64, FieldError> {
    check_frequency(frequency_hz)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(FieldError::NotPositive("distance r"));
    }
    if frequency_hz == 0.0 {
        return Ok(0.0);
    }
    Ok(r * wavenumber(medium, frequency_hz)?.real_part)
}

/// Complex dipole field components at polar position (r, theta).
pub fn dipole_field(
    r: f64,
    theta: f64,
    medium: &WaterMedium,
    geometry: &LinkGeometry,
    frequency_hz: f64,
) -> Result<FieldSample, FieldError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(FieldError::NotPositive("distance r"));
    }
    if !theta.is_finite() {
        return Err(FieldError::NotFinite("theta"));
    }
    let k = wavenumber(medium, frequency_hz)?.as_complex();
    let i0 = geometry.effective_current();
    let d1 = geometry.tx_separation;
    let sigma = medium.conductivity;
    let j = Complex64::new(0.0, 1.0);
    let phase = (-j * k * r).exp();

    let radial_profile = 1.0 / (r * r * r) + j * k / (r * r);
    let azimuthal_profile = radial_profile - k * k / r;

    let e_r = i0 * d1 * theta.cos() / (2.0 * PI * sigma) * radial_profile * phase;
    let e_theta = i0 * d1 * theta.sin() / (4.0 * PI * sigma) * azimuthal_profile * phase;
    Ok(FieldSample {
        e_r,
        e_theta,
        r,
        theta,
    })
}

/// `sqrt(1 + 2t + 2t^2 + 4t^3 + 4t^4) * e^-t`: the distance-dependent factor
/// of the received-voltage closed form. 1 at t = 0, -> 0 as t -> inf.
pub fn attenuation_factor(t: f64) -> Result<f64, FieldError> {
    if !t.is_finite() {
        return Err(FieldError::NotFinite("t"));
    }
    if t < 0.0 {
        return Err(FieldError::Negative("t"));
    }
    let poly = 1.0 + 2.0 * t + 2.0 * t * t + 4.0 * t * t * t + 4.0 * t * t * t * t;
    Ok(poly.sqrt() * (-t).exp())
}

/// Voltage across the receiving electrodes at axial distance `r`.
pub fn received_voltage(
    r: f64,
    frequency_hz: f64,
    medium: &WaterMedium,
    geometry: &LinkGeometry,
) -> Result<ReceivedVoltage, FieldError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(FieldError::NotPositive("distance r"));
    }
    let t = dimensionless_distance(medium, frequency_hz, r)?;
    let i0 = geometry.effective_current();
    let base = i0 * geometry.tx_separation * geometry.rx_separation
        / (4.0 * PI * medium.conductivity * r * r * r);
    let volts = base * attenuation_factor(t)?;
    let separation_warning = r < 4.0 * geometry.tx_separation.max(geometry.rx_separation);
    Ok(ReceivedVoltage {
        volts,
        separation_warning,
    })
}

/// Near-field radius `lambda/(2*pi) = sqrt(2/(omega*mu*sigma))`.
pub fn near_field_radius(medium: &WaterMedium, frequency_hz: f64) -> Result<f64, FieldError> {
    if !(frequency_hz.is_finite() && frequency_hz > 0.0) {
        return Err(FieldError::NotPositive("frequency"));
    }
    let omega = 2.0 * PI * frequency_hz;
    Ok((2.0 / (omega * medium.permeability * medium.conductivity)).sqrt())
}

/// Wavelength-based near-field test: r well inside lambda/(2*pi).
pub fn within_near_field(r: f64, medium: &WaterMedium, frequency_hz: f64) -> Result<bool, FieldError> {
    Ok(r < 0.1 * near_field_radius(medium, frequency_hz)?)
}

/// Geometric far-zone test: r > 10*max(d1, d2) counts as outside the
/// near-field region of the electrodes themselves.
pub fn outside_near_field_geometric(r: f64, geometry: &LinkGeometry) -> bool {
    r > 10.0 * geometry.tx_separation.max(geometry.rx_separation)
}

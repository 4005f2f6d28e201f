//! Physical constants (CODATA 2018) and the unit conversions used at the I/O
//! boundary. All internal computation is SI; only configuration parsing and
//! output formatting convert.

use crate::error::{Error, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K), exact since the 2019 SI redefinition.
pub const K_B: f64 = 1.380_649e-23;
/// Speed of light in vacuum (m/s), exact.
pub const C: f64 = 299_792_458.0;
/// Vacuum permeability (N/A^2).
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity (F/m), derived as 1/(mu0 c^2) so that
/// mu0 eps0 c^2 = 1 holds to rounding.
pub const EPSILON_0: f64 = 1.0 / (MU_0 * C * C);
/// Elementary charge (C), exact.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// One electronvolt in joules.
pub const EV: f64 = ELEMENTARY_CHARGE;
/// One debye in C m: 1 D = 1e-21/c C m.
pub const DEBYE: f64 = 1e-21 / C;

/// The frozen constant table as a value, for code that wants to thread the
/// whole set around. Immutable; safe to share across threads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Speed of light (m/s).
    pub c: f64,
    /// Vacuum permeability (N/A^2).
    pub mu_0: f64,
    /// Vacuum permittivity (F/m).
    pub epsilon_0: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 values, identical to the module constants.
    pub const fn codata2018() -> Self {
        Self {
            hbar: HBAR,
            k_b: K_B,
            c: C,
            mu_0: MU_0,
            epsilon_0: EPSILON_0,
        }
    }
}

/// Unit tags supported by [`convert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Meter,
    Micrometer,
    Joule,
    ElectronVolt,
    Debye,
    CoulombMeter,
    Kelvin,
    RadPerSec,
    Hertz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dimension {
    Length,
    Energy,
    Dipole,
    Temperature,
    AngularFrequency,
}

impl Unit {
    fn dimension(self) -> Dimension {
        match self {
            Unit::Meter | Unit::Micrometer => Dimension::Length,
            Unit::Joule | Unit::ElectronVolt => Dimension::Energy,
            Unit::Debye | Unit::CoulombMeter => Dimension::Dipole,
            Unit::Kelvin => Dimension::Temperature,
            Unit::RadPerSec | Unit::Hertz => Dimension::AngularFrequency,
        }
    }

    /// Scale factor to the SI base unit of this tag's dimension.
    fn to_base(self) -> f64 {
        match self {
            Unit::Meter => 1.0,
            Unit::Micrometer => 1e-6,
            Unit::Joule => 1.0,
            Unit::ElectronVolt => EV,
            Unit::CoulombMeter => 1.0,
            Unit::Debye => DEBYE,
            Unit::Kelvin => 1.0,
            Unit::RadPerSec => 1.0,
            Unit::Hertz => 2.0 * std::f64::consts::PI,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Unit::Meter => "m",
            Unit::Micrometer => "um",
            Unit::Joule => "J",
            Unit::ElectronVolt => "eV",
            Unit::Debye => "D",
            Unit::CoulombMeter => "C*m",
            Unit::Kelvin => "K",
            Unit::RadPerSec => "rad/s",
            Unit::Hertz => "Hz",
        }
    }
}

/// Exact linear conversion between dimensionally compatible unit tags.
pub fn convert(value: f64, from: Unit, to: Unit) -> Result<f64> {
    if from.dimension() != to.dimension() {
        return Err(Error::IncompatibleUnits {
            from: from.name(),
            to: to.name(),
        });
    }
    Ok(value * (from.to_base() / to.to_base()))
}

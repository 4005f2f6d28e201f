//! Permittivity models on the real and imaginary frequency axes.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative permittivity model of the body material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PermittivityModel {
    /// eps(omega) = 1 - wp^2/(omega^2 + i gamma omega).
    Drude {
        /// Plasma frequency (rad/s).
        plasma_frequency: f64,
        /// Relaxation rate (rad/s).
        relaxation_rate: f64,
    },
    /// |eps| -> infinity; downstream coefficients take their analytic limits.
    PerfectConductor,
    /// Fixed complex permittivity (real part used on the imaginary axis).
    Constant { value: Complex64 },
}

/// Permittivity evaluated on the real axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsRealAxis {
    Finite(Complex64),
    /// Perfect-conductor marker.
    Infinite,
}

/// Permittivity evaluated on the imaginary axis (always real there).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsImagAxis {
    Finite(f64),
    /// Perfect conductor, or the xi -> 0 divergence of the Drude model.
    Infinite,
}

/// Default gold parameters: hbar wp = 9.0 eV, hbar gamma = 35 meV.
pub fn gold_drude() -> PermittivityModel {
    let ev = crate::units::EV / crate::units::HBAR;
    PermittivityModel::Drude {
        plasma_frequency: 9.0 * ev,
        relaxation_rate: 0.035 * ev,
    }
}

impl PermittivityModel {
    /// eps(omega) for omega > 0.
    pub fn eps_real_axis(&self, omega: f64) -> Result<EpsRealAxis> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!(
                "eps_real_axis requires omega > 0, got {omega}"
            )));
        }
        Ok(match *self {
            PermittivityModel::Drude {
                plasma_frequency: wp,
                relaxation_rate: gamma,
            } => EpsRealAxis::Finite(
                Complex64::new(1.0, 0.0)
                    - wp * wp / Complex64::new(omega * omega, gamma * omega),
            ),
            PermittivityModel::PerfectConductor => EpsRealAxis::Infinite,
            PermittivityModel::Constant { value } => EpsRealAxis::Finite(value),
        })
    }

    /// eps(i xi) for xi >= 0. Real and >= 1 for passive models.
    pub fn eps_imag_axis(&self, xi: f64) -> Result<EpsImagAxis> {
        if xi < 0.0 {
            return Err(Error::Domain(format!(
                "eps_imag_axis requires xi >= 0, got {xi}"
            )));
        }
        Ok(match *self {
            PermittivityModel::Drude {
                plasma_frequency: wp,
                relaxation_rate: gamma,
            } => {
                if xi == 0.0 {
                    EpsImagAxis::Infinite
                } else {
                    EpsImagAxis::Finite(1.0 + wp * wp / (xi * xi + gamma * xi))
                }
            }
            PermittivityModel::PerfectConductor => EpsImagAxis::Infinite,
            PermittivityModel::Constant { value } => EpsImagAxis::Finite(value.re),
        })
    }

    /// True when the model carries dissipation on the real axis. A lossless
    /// cylinder wall has waveguide poles on the real integration contour and
    /// is rejected there.
    pub fn is_lossy(&self) -> bool {
        match *self {
            PermittivityModel::Drude { relaxation_rate, .. } => relaxation_rate > 0.0,
            PermittivityModel::PerfectConductor => false,
            PermittivityModel::Constant { value } => value.im > 0.0,
        }
    }

    /// Zero-frequency limit of the planar p-polarization reflection
    /// coefficient, taken analytically inside the Fresnel formula.
    ///
    /// Drude: (eps - 1) xi^2 -> 0 while eps -> infinity, so r_p -> 1 exactly.
    /// Constant eps: the electrostatic value (eps - 1)/(eps + 1).
    pub fn static_rp_limit(&self) -> f64 {
        match *self {
            PermittivityModel::Drude { .. } | PermittivityModel::PerfectConductor => 1.0,
            PermittivityModel::Constant { value } => (value.re - 1.0) / (value.re + 1.0),
        }
    }
}

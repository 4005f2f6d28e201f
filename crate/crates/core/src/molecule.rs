//! Particle transition data, isotropic ground-state polarizability, thermal
//! photon numbers and Matsubara frequencies.

use crate::error::{Error, Result};
use crate::units::{DEBYE, HBAR, K_B};

/// One electric-dipole transition out of the ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    /// Transition frequency omega_k (rad/s), > 0.
    pub omega: f64,
    /// |d_0k|^2 in (C m)^2.
    pub dipole_squared: f64,
}

/// Transition set of an isotropic ground-state particle.
#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeSpec {
    pub name: String,
    pub transitions: Vec<Transition>,
}

impl MoleculeSpec {
    pub fn new(name: impl Into<String>, transitions: Vec<Transition>) -> Result<Self> {
        if transitions.is_empty() {
            return Err(Error::InvalidInput("molecule needs at least one transition".into()));
        }
        for t in &transitions {
            if !(t.omega > 0.0) || !(t.dipole_squared > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "transition must have omega > 0 and |d|^2 > 0, got ({}, {})",
                    t.omega, t.dipole_squared
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            transitions,
        })
    }

    /// Single-transition spec with the dipole given in debye.
    pub fn single(name: impl Into<String>, omega: f64, dipole_debye: f64) -> Result<Self> {
        Self::new(
            name,
            vec![Transition {
                omega,
                dipole_squared: (dipole_debye * DEBYE).powi(2),
            }],
        )
    }

    /// Parse the molecule file format: one `omega_rad_per_s dipole_debye`
    /// record per line, `#` comments allowed.
    pub fn parse(text: &str, name: impl Into<String>) -> Result<Self> {
        let mut transitions = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let omega: f64 = it
                .next()
                .ok_or_else(|| Error::InvalidInput(format!("line {}: missing omega", lineno + 1)))?
                .parse()
                .map_err(|e| Error::InvalidInput(format!("line {}: {e}", lineno + 1)))?;
            let dipole_debye: f64 = it
                .next()
                .ok_or_else(|| {
                    Error::InvalidInput(format!("line {}: missing dipole", lineno + 1))
                })?
                .parse()
                .map_err(|e| Error::InvalidInput(format!("line {}: {e}", lineno + 1)))?;
            if it.next().is_some() {
                return Err(Error::InvalidInput(format!(
                    "line {}: expected exactly two fields",
                    lineno + 1
                )));
            }
            transitions.push(Transition {
                omega,
                dipole_squared: (dipole_debye * DEBYE).powi(2),
            });
        }
        Self::new(name, transitions)
    }

    /// alpha(i xi) = (2/3 hbar) sum_k |d_0k|^2 omega_k / (omega_k^2 + xi^2).
    pub fn alpha_imag_axis(&self, xi: f64) -> f64 {
        let mut s = 0.0;
        for t in &self.transitions {
            s += t.dipole_squared * t.omega / (t.omega * t.omega + xi * xi);
        }
        2.0 / (3.0 * HBAR) * s
    }

    /// Principal-value real part on the real axis:
    /// (2/3 hbar) sum_k |d_0k|^2 omega_k / (omega_k^2 - omega^2).
    ///
    /// The delta-function (resonant) contribution is handled separately by the
    /// potential engine.
    pub fn alpha_real_axis_principal(&self, omega: f64) -> Result<f64> {
        if omega < 0.0 {
            return Err(Error::Domain("alpha requires omega >= 0".into()));
        }
        let mut s = 0.0;
        for t in &self.transitions {
            if ((omega - t.omega) / t.omega).abs() < 1e-12 {
                return Err(Error::Domain(format!(
                    "omega = {omega} coincides with the transition at {}",
                    t.omega
                )));
            }
            s += t.dipole_squared * t.omega / (t.omega * t.omega - omega * omega);
        }
        Ok(2.0 / (3.0 * HBAR) * s)
    }
}

/// Temperature plus the Matsubara truncation policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalContext {
    /// Environment temperature (K), > 0.
    pub temperature: f64,
    /// Hard cap on the adaptive Matsubara cutoff.
    pub matsubara_cutoff: usize,
}

impl ThermalContext {
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature > 0.0) {
            return Err(Error::Domain(format!(
                "temperature must be > 0, got {temperature}"
            )));
        }
        Ok(Self {
            temperature,
            matsubara_cutoff: 1 << 21,
        })
    }
}

/// Thermal photon number N(omega, T) = 1/(exp(hbar omega / kB T) - 1).
///
/// Returns 0 once hbar omega / kB T exceeds 700 (the exact value underflows).
pub fn photon_number(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "photon_number requires omega > 0, got {omega}"
        )));
    }
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!(
            "photon_number requires T > 0, got {temperature}"
        )));
    }
    let x = HBAR * omega / (K_B * temperature);
    if x > 700.0 {
        return Ok(0.0);
    }
    Ok(1.0 / x.exp_m1())
}

/// Matsubara frequency xi_m = 2 pi m kB T / hbar.
pub fn matsubara_frequency(m: usize, temperature: f64) -> f64 {
    2.0 * std::f64::consts::PI * m as f64 * K_B * temperature / HBAR
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn single_spec(omega: f64, d2: f64) -> MoleculeSpec {
        MoleculeSpec::new(
            "test",
            vec![Transition {
                omega,
                dipole_squared: d2,
            }],
        )
        .unwrap()
    }

    #[test]
    fn photon_number_at_ln2_is_one() {
        // hbar omega / kB T = ln 2  =>  N = 1
        let t = 300.0;
        let omega = K_B * t * 2f64.ln() / HBAR;
        assert_relative_eq!(photon_number(omega, t).unwrap(), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn photon_number_vanishes_at_high_frequency() {
        assert_eq!(photon_number(1e25, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn photon_number_for_lih_scale_transition() {
        // omega reverse-engineered from the resonant cylinder radius,
        // R_11 = c j_11 / omega with 1.5 R_11 ~ 618 um.
        let n = photon_number(2.79e12, 300.0).unwrap();
        assert_relative_eq!(n, 13.58, max_relative = 1e-3);
    }

    #[test]
    fn photon_number_rejects_bad_domain() {
        assert!(photon_number(0.0, 300.0).is_err());
        assert!(photon_number(-1.0, 300.0).is_err());
        assert!(photon_number(1e12, 0.0).is_err());
    }

    #[test]
    fn matsubara_values() {
        assert_eq!(matsubara_frequency(0, 300.0), 0.0);
        assert_relative_eq!(
            matsubara_frequency(1, 300.0),
            2.4679e14,
            max_relative = 1e-4
        );
        assert_relative_eq!(
            matsubara_frequency(2, 150.0),
            matsubara_frequency(1, 300.0),
            max_relative = 1e-15
        );
    }

    #[test]
    fn alpha_static_single_transition() {
        let (omega, d2) = (2.79e12, 1e-59);
        let spec = single_spec(omega, d2);
        assert_relative_eq!(
            spec.alpha_imag_axis(0.0),
            2.0 / (3.0 * HBAR) * d2 / omega,
            max_relative = 1e-14
        );
    }

    #[test]
    fn alpha_decays_and_is_linear_in_transitions() {
        let spec = single_spec(1e13, 1e-59);
        assert!(spec.alpha_imag_axis(1e18) < 1e-6 * spec.alpha_imag_axis(0.0));
        let double = MoleculeSpec::new(
            "two",
            vec![
                Transition {
                    omega: 1e13,
                    dipole_squared: 1e-59,
                },
                Transition {
                    omega: 1e13,
                    dipole_squared: 1e-59,
                },
            ],
        )
        .unwrap();
        for &xi in &[0.0, 3e12, 1e14] {
            assert_relative_eq!(
                double.alpha_imag_axis(xi),
                2.0 * spec.alpha_imag_axis(xi),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn alpha_imag_axis_decreasing_and_convex_in_tail() {
        let spec = MoleculeSpec::new(
            "m",
            vec![
                Transition {
                    omega: 2.79e12,
                    dipole_squared: 1e-59,
                },
                Transition {
                    omega: 9e12,
                    dipole_squared: 4e-60,
                },
            ],
        )
        .unwrap();
        // strict decrease everywhere
        let grid: Vec<f64> = (0..400).map(|k| 1e11 * k as f64).collect();
        let vals: Vec<f64> = grid.iter().map(|&xi| spec.alpha_imag_axis(xi)).collect();
        for w in vals.windows(2) {
            assert!(w[1] < w[0]);
        }
        // each Lorentzian 1/(omega^2 + xi^2) is concave below omega/sqrt(3),
        // so convexity of alpha(i xi) holds only beyond the largest
        // transition; sample that region
        let tail: Vec<f64> = (0..200).map(|k| 9e12 + 1e11 * k as f64).collect();
        let tvals: Vec<f64> = tail.iter().map(|&xi| spec.alpha_imag_axis(xi)).collect();
        for w in tvals.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] > 0.0, "tail convexity violated");
        }
    }

    #[test]
    fn alpha_real_axis_matches_imag_axis_at_zero() {
        let spec = single_spec(2.79e12, 1e-59);
        assert_relative_eq!(
            spec.alpha_real_axis_principal(0.0).unwrap(),
            spec.alpha_imag_axis(0.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn alpha_real_axis_below_resonance() {
        let omega_k = 2.79e12;
        let d2 = 1e-59;
        let spec = single_spec(omega_k, d2);
        // at omega = omega_k/sqrt(2): denominator = omega_k^2/2
        let a = spec
            .alpha_real_axis_principal(omega_k / 2f64.sqrt())
            .unwrap();
        assert_relative_eq!(
            a,
            2.0 / (3.0 * HBAR) * d2 * 2.0 / omega_k,
            max_relative = 1e-12
        );
    }

    #[test]
    fn alpha_real_axis_resonance_coincidence_rejected() {
        let spec = single_spec(2.79e12, 1e-59);
        assert!(spec.alpha_real_axis_principal(2.79e12).is_err());
        assert!(spec
            .alpha_real_axis_principal(2.79e12 * (1.0 + 1e-13))
            .is_err());
        assert!(spec
            .alpha_real_axis_principal(2.79e12 * (1.0 + 1e-6))
            .is_ok());
    }

    #[test]
    fn molecule_file_parsing() {
        let text = "# LiH-like\n2.79e12 5.88  # dominant transition\n\n9.0e12 1.0\n";
        let spec = MoleculeSpec::parse(text, "lih").unwrap();
        assert_eq!(spec.transitions.len(), 2);
        assert_relative_eq!(
            spec.transitions[0].dipole_squared,
            (5.88 * DEBYE).powi(2),
            max_relative = 1e-15
        );
        assert!(MoleculeSpec::parse("", "empty").is_err());
        assert!(MoleculeSpec::parse("1e12", "bad").is_err());
        assert!(MoleculeSpec::parse("-1e12 2.0", "bad").is_err());
    }
}

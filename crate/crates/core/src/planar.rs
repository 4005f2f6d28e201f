//! Half-space and planar-cavity scattering Green-tensor traces.
//!
//! The half-space trace at a distance z from the wall is the transverse
//! momentum integral
//!
//! ```text
//! Tr G1(z,z,omega) = (i/4 pi) int_0^inf dq (q/beta) e^{2 i beta z}
//!                      [ r_s - r_p (1 - 2 q^2 c^2/omega^2) ]
//! ```
//!
//! with beta = sqrt(omega^2/c^2 - q^2), Im beta >= 0, and Fresnel
//! coefficients in the convention r_s -> -1, r_p -> +1 for |eps| -> infinity.
//! The q-integral splits naturally at q = omega/c: the propagating part is
//! parametrized by u = beta c/omega in (0,1) (oscillatory, integrated on
//! panels aligned with the phase nodes of e^{2ikzu}), the evanescent part by
//! kappa = -i beta > 0 (exponentially damped, truncated once 2 kappa z > 60).
//!
//! On the imaginary frequency axis the same integral is real and
//! sign-definite, with e^{-2 eta z} damping, eta = sqrt(xi^2/c^2 + q^2).
//!
//! The cavity trace dresses the single-bounce terms with the multiple
//! reflection denominators D_sigma = 1 - r_sigma^2 e^{2 i beta a} and adds the
//! two round-trip families, whose p-polarization weight is identically one.

use num_complex::Complex64;
use std::cell::Cell;

use crate::error::{Error, Result};
use crate::materials::{EpsImagAxis, EpsRealAxis, PermittivityModel};
use crate::quadrature;
use crate::units::C;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;
/// e^{-60} < 1e-26 bounds every truncated exponential tail.
const EXP_CUTOFF: f64 = 60.0;
const REL_TOL: f64 = 1e-9;
/// Absolute floor as a fraction of the |r| <= 1 bound of each integral; lets
/// near-zero integrands (vacuum, vanishing contrast) converge at their
/// rounding level.
const ABS_FLOOR: f64 = 1e-13;

/// Half-space or two-mirror cavity, both mirrors of the same material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanarGeometry {
    HalfSpace,
    /// Mirrors at z = 0 and z = a.
    Cavity { width: f64 },
}

/// Scenario: geometry, wall material and particle position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarConfig {
    pub geometry: PlanarGeometry,
    pub material: PermittivityModel,
    /// Distance from the near wall (m).
    pub position: f64,
}

impl PlanarConfig {
    pub fn half_space(material: PermittivityModel, z: f64) -> Self {
        Self {
            geometry: PlanarGeometry::HalfSpace,
            material,
            position: z,
        }
    }

    pub fn cavity(material: PermittivityModel, width: f64, z: f64) -> Self {
        Self {
            geometry: PlanarGeometry::Cavity { width },
            material,
            position: z,
        }
    }

    /// Same scenario at a different position.
    pub fn at(&self, z: f64) -> Self {
        Self {
            position: z,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        match self.geometry {
            PlanarGeometry::HalfSpace => {
                if !(self.position > 0.0) {
                    return Err(Error::Domain(format!(
                        "half-space requires z > 0, got {}",
                        self.position
                    )));
                }
            }
            PlanarGeometry::Cavity { width } => {
                if !(width > 0.0) || !(self.position > 0.0) || !(self.position < width) {
                    return Err(Error::Domain(format!(
                        "cavity requires 0 < z < a, got z = {}, a = {width}",
                        self.position
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Complex trace decomposed at q = omega/c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenTraceSplit {
    pub propagating: Complex64,
    pub evanescent: Complex64,
    pub total: Complex64,
}

impl GreenTraceSplit {
    fn new(propagating: Complex64, evanescent: Complex64) -> Self {
        Self {
            propagating,
            evanescent,
            total: propagating + evanescent,
        }
    }
}

/// Which frequency axis a [`fresnel`] evaluation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Real,
    Imaginary,
}

fn sqrt_upper(z: Complex64) -> Complex64 {
    let w = z.sqrt();
    if w.im < 0.0 {
        -w
    } else {
        w
    }
}

/// Fresnel reflection coefficients (r_s, r_p) at transverse momentum q.
///
/// Real axis: r_s = (beta - beta1)/(beta + beta1),
/// r_p = (eps beta - beta1)/(eps beta + beta1), beta with Im beta >= 0.
/// Imaginary axis: the rotated, purely real forms; at xi = 0 the analytic
/// zero-frequency limits of the given material.
pub fn fresnel(
    model: &PermittivityModel,
    freq: f64,
    q: f64,
    axis: Axis,
) -> Result<(Complex64, Complex64)> {
    if q < 0.0 {
        return Err(Error::Domain(format!("fresnel requires q >= 0, got {q}")));
    }
    match axis {
        Axis::Real => {
            let eps = match model.eps_real_axis(freq)? {
                EpsRealAxis::Infinite => {
                    return Ok((Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)))
                }
                EpsRealAxis::Finite(e) => e,
            };
            let k = freq / C;
            let beta = sqrt_upper(Complex64::new(k * k - q * q, 0.0));
            let beta1 = sqrt_upper(eps * (k * k) - q * q);
            let r_s = (beta - beta1) / (beta + beta1);
            let r_p = (eps * beta - beta1) / (eps * beta + beta1);
            Ok((r_s, r_p))
        }
        Axis::Imaginary => {
            let xi = freq;
            if xi == 0.0 {
                // analytic xi -> 0 limits: r_s -> 0 for any finite material,
                // (-1, +1) for the perfect conductor
                return Ok(match model {
                    PermittivityModel::PerfectConductor => {
                        (Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0))
                    }
                    _ => (
                        Complex64::new(0.0, 0.0),
                        Complex64::new(model.static_rp_limit(), 0.0),
                    ),
                });
            }
            let eps = match model.eps_imag_axis(xi)? {
                EpsImagAxis::Infinite => {
                    return Ok((Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)))
                }
                EpsImagAxis::Finite(e) => e,
            };
            let eta = (xi * xi / (C * C) + q * q).sqrt();
            let eta1 = (eps * xi * xi / (C * C) + q * q).sqrt();
            Ok((
                Complex64::new((eta - eta1) / (eta + eta1), 0.0),
                Complex64::new((eps * eta - eta1) / (eps * eta + eta1), 0.0),
            ))
        }
    }
}

/// (r_s, r_p) on the real axis parametrized by u = beta/k in (0,1].
fn fresnel_prop(eps: Option<Complex64>, u: f64) -> (Complex64, Complex64) {
    match eps {
        None => (Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)),
        Some(eps) => {
            let beta = Complex64::new(u, 0.0);
            let beta1 = sqrt_upper(eps - Complex64::new(1.0 - u * u, 0.0));
            (
                (beta - beta1) / (beta + beta1),
                (eps * beta - beta1) / (eps * beta + beta1),
            )
        }
    }
}

/// (r_s, r_p) on the real axis parametrized by w = kappa/k > 0 (beta = i k w).
fn fresnel_evan(eps: Option<Complex64>, w: f64) -> (Complex64, Complex64) {
    match eps {
        None => (Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)),
        Some(eps) => {
            let beta = Complex64::new(0.0, w);
            let beta1 = sqrt_upper(eps - Complex64::new(1.0 + w * w, 0.0));
            (
                (beta - beta1) / (beta + beta1),
                (eps * beta - beta1) / (eps * beta + beta1),
            )
        }
    }
}

/// (r_s, r_p) on the imaginary axis parametrized by eta >= xi/c.
fn fresnel_imag(eps: Option<f64>, xi_over_c: f64, eta: f64) -> (f64, f64) {
    match eps {
        None => (-1.0, 1.0),
        Some(eps) => {
            let eta1 = (eta * eta + (eps - 1.0) * xi_over_c * xi_over_c).sqrt();
            (
                (eta - eta1) / (eta + eta1),
                (eps * eta - eta1) / (eps * eta + eta1),
            )
        }
    }
}

fn eps_real_option(model: &PermittivityModel, omega: f64) -> Result<Option<Complex64>> {
    Ok(match model.eps_real_axis(omega)? {
        EpsRealAxis::Infinite => None,
        EpsRealAxis::Finite(e) => Some(e),
    })
}

fn eps_imag_option(model: &PermittivityModel, xi: f64) -> Result<Option<f64>> {
    Ok(match model.eps_imag_axis(xi)? {
        EpsImagAxis::Infinite => None,
        EpsImagAxis::Finite(e) => Some(e),
    })
}

/// Panel nodes in u aligned with the phase nodes of e^{2ikLu} for each length
/// scale, merged and capped.
fn phase_nodes(k: f64, lengths: &[f64]) -> Vec<f64> {
    let mut nodes = vec![0.0, 1.0];
    for &l in lengths {
        let spacing = std::f64::consts::PI / (2.0 * k * l);
        if spacing <= 0.0 || !spacing.is_finite() {
            continue;
        }
        let count = (1.0 / spacing) as usize;
        if count > 2000 {
            // cap: thin to 2000 equidistant nodes for this scale
            for j in 1..2000 {
                nodes.push(j as f64 / 2000.0);
            }
            continue;
        }
        for j in 1..=count {
            let u = j as f64 * spacing;
            if u < 1.0 {
                nodes.push(u);
            }
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    nodes
}

/// Half-space trace at real omega > 0, split at q = omega/c.
pub fn halfspace_trace(config: &PlanarConfig, omega: f64) -> Result<GreenTraceSplit> {
    config.validate()?;
    if !matches!(config.geometry, PlanarGeometry::HalfSpace) {
        return Err(Error::Domain("halfspace_trace needs a half-space config".into()));
    }
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
    }
    let z = config.position;
    let k = omega / C;
    let eps = eps_real_option(&config.material, omega)?;

    // propagating: (ik/4pi) int_0^1 du [r_s - r_p (2u^2-1)] e^{2ikzu}
    let nodes = phase_nodes(k, &[z]);
    let (prop_int, _) = quadrature::integrate_with_breakpoints(
        |u| {
            let (rs, rp) = fresnel_prop(eps, u);
            let phase = Complex64::new(0.0, 2.0 * k * z * u).exp();
            (rs - rp * (2.0 * u * u - 1.0)) * phase
        },
        &nodes,
        REL_TOL,
        3.0 * ABS_FLOOR,
    )?;
    let prop = Complex64::new(0.0, k / FOUR_PI) * prop_int;

    // evanescent: (1/4pi) int_0^inf dkappa [r_s + r_p (1 + 2 kappa^2/k^2)] e^{-2 kappa z}
    let kappa_max = EXP_CUTOFF / (2.0 * z);
    let evan_bound = 1.0 / z + 1.0 / (2.0 * k * k * z.powi(3));
    let (evan_int, _) = quadrature::integrate(
        |kappa: f64| {
            let w = kappa / k;
            let (rs, rp) = fresnel_evan(eps, w);
            (rs + rp * (1.0 + 2.0 * w * w)) * (-2.0 * kappa * z).exp()
        },
        0.0,
        kappa_max,
        REL_TOL,
        ABS_FLOOR * evan_bound,
    )?;
    let evan = evan_int / FOUR_PI;

    Ok(GreenTraceSplit::new(prop, evan))
}

/// Half-space trace at imaginary frequency i xi, xi > 0. Real-valued.
pub fn halfspace_trace_imag(config: &PlanarConfig, xi: f64) -> Result<f64> {
    config.validate()?;
    if !matches!(config.geometry, PlanarGeometry::HalfSpace) {
        return Err(Error::Domain("halfspace_trace_imag needs a half-space config".into()));
    }
    if !(xi > 0.0) {
        return Err(Error::Domain(format!(
            "xi must be > 0 (use zero_frequency_limit for the m = 0 term), got {xi}"
        )));
    }
    let z = config.position;
    let b = xi / C;
    // every integrand value carries e^{-2 eta z} <= e^{-2 b z}; below the f64
    // floor the trace is an exact numerical zero
    if 2.0 * b * z > 700.0 {
        return Ok(0.0);
    }
    let eps = eps_imag_option(&config.material, xi)?;
    let eta_max = b + (EXP_CUTOFF + 10.0) / (2.0 * z);
    let imag_bound = (2.0 * C * C / (xi * xi))
        * (-2.0 * b * z).exp()
        * (b * b / (2.0 * z) + b / (2.0 * z * z) + 1.0 / (4.0 * z.powi(3)));
    let (v, _) = quadrature::integrate(
        |eta: f64| {
            let (rs, rp) = fresnel_imag(eps, b, eta);
            let w = eta / b;
            (rs - rp * (2.0 * w * w - 1.0)) * (-2.0 * eta * z).exp()
        },
        b,
        eta_max,
        REL_TOL,
        ABS_FLOOR * imag_bound,
    )?;
    Ok(v / FOUR_PI)
}

/// lim_{xi->0} xi^2 Tr G1(i xi) for the half-space: -c^2 r_p0 / (8 pi z^3),
/// with r_p0 the analytic zero-frequency p reflection of the material.
pub fn halfspace_zero_frequency_limit(config: &PlanarConfig) -> Result<f64> {
    config.validate()?;
    let z = config.position;
    Ok(-C * C * config.material.static_rp_limit() / (8.0 * std::f64::consts::PI * z.powi(3)))
}

/// Cavity trace at real omega > 0, split at q = omega/c.
///
/// Errors with [`Error::CavityResonance`] if a round-trip denominator comes
/// within 1e-8 of zero anywhere on the propagating contour.
pub fn cavity_trace(config: &PlanarConfig, omega: f64) -> Result<GreenTraceSplit> {
    config.validate()?;
    let a = match config.geometry {
        PlanarGeometry::Cavity { width } => width,
        _ => return Err(Error::Domain("cavity_trace needs a cavity config".into())),
    };
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
    }
    let z = config.position;
    let k = omega / C;
    let eps = eps_real_option(&config.material, omega)?;

    let min_d = Cell::new(f64::INFINITY);
    let nodes = phase_nodes(k, &[z, a - z, a]);
    let prop_res = quadrature::integrate_with_breakpoints(
        |u| {
            let (rs, rp) = fresnel_prop(eps, u);
            let ez = Complex64::new(0.0, 2.0 * k * z * u).exp();
            let eaz = Complex64::new(0.0, 2.0 * k * (a - z) * u).exp();
            let ea = Complex64::new(0.0, 2.0 * k * a * u).exp();
            let ds = 1.0 - rs * rs * ea;
            let dp = 1.0 - rp * rp * ea;
            let dmin = ds.norm().min(dp.norm());
            if dmin < min_d.get() {
                min_d.set(dmin);
            }
            let s_term = (rs * (ez + eaz) + 2.0 * rs * rs * ea) / ds;
            let p_weight = 1.0 - 2.0 * u * u;
            let p_term = (rp * p_weight * (ez + eaz) + 2.0 * rp * rp * ea) / dp;
            s_term + p_term
        },
        &nodes,
        REL_TOL,
        24.0 * ABS_FLOOR,
    );
    if min_d.get() < 1e-8 {
        return Err(Error::CavityResonance {
            magnitude: min_d.get(),
        });
    }
    let prop = Complex64::new(0.0, k / FOUR_PI) * prop_res?.0;

    let kappa_max = EXP_CUTOFF / (2.0 * z.min(a - z));
    let zmin = z.min(a - z);
    let evan_bound = 8.0 * (1.0 / zmin + 1.0 / (2.0 * k * k * zmin.powi(3)));
    let (evan_int, _) = quadrature::integrate(
        |kappa: f64| {
            let w = kappa / k;
            let (rs, rp) = fresnel_evan(eps, w);
            let fz = (-2.0 * kappa * z).exp();
            let faz = (-2.0 * kappa * (a - z)).exp();
            let fa = (-2.0 * kappa * a).exp();
            let ds = 1.0 - rs * rs * fa;
            let dp = 1.0 - rp * rp * fa;
            let s_term = (rs * (fz + faz) + 2.0 * rs * rs * fa) / ds;
            let p_weight = 1.0 + 2.0 * w * w;
            let p_term = (rp * p_weight * (fz + faz) + 2.0 * rp * rp * fa) / dp;
            s_term + p_term
        },
        0.0,
        kappa_max,
        REL_TOL,
        ABS_FLOOR * evan_bound,
    )?;
    let evan = evan_int / FOUR_PI;

    Ok(GreenTraceSplit::new(prop, evan))
}

/// Cavity trace at imaginary frequency i xi, xi > 0. Real-valued; the
/// round-trip denominators are strictly positive there.
pub fn cavity_trace_imag(config: &PlanarConfig, xi: f64) -> Result<f64> {
    config.validate()?;
    let a = match config.geometry {
        PlanarGeometry::Cavity { width } => width,
        _ => return Err(Error::Domain("cavity_trace_imag needs a cavity config".into())),
    };
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("xi must be > 0, got {xi}")));
    }
    let z = config.position;
    let b = xi / C;
    if 2.0 * b * z.min(a - z) > 700.0 {
        return Ok(0.0);
    }
    let eps = eps_imag_option(&config.material, xi)?;
    let zmin = z.min(a - z);
    let eta_max = b + (EXP_CUTOFF + 10.0) / (2.0 * zmin);
    let imag_bound = (16.0 * C * C / (xi * xi))
        * (-2.0 * b * zmin).exp()
        * (b * b / (2.0 * zmin) + b / (2.0 * zmin * zmin) + 1.0 / (4.0 * zmin.powi(3)));
    let (v, _) = quadrature::integrate(
        |eta: f64| {
            let (rs, rp) = fresnel_imag(eps, b, eta);
            let w = eta / b;
            let fz = (-2.0 * eta * z).exp();
            let faz = (-2.0 * eta * (a - z)).exp();
            let fa = (-2.0 * eta * a).exp();
            let ds = 1.0 - rs * rs * fa;
            let dp = 1.0 - rp * rp * fa;
            let s_term = (rs * (fz + faz) + 2.0 * rs * rs * fa) / ds;
            let p_weight = -(2.0 * w * w - 1.0);
            let p_term = (rp * p_weight * (fz + faz) + 2.0 * rp * rp * fa) / dp;
            s_term + p_term
        },
        b,
        eta_max,
        REL_TOL,
        ABS_FLOOR * imag_bound,
    )?;
    Ok(v / FOUR_PI)
}

/// lim_{xi->0} xi^2 Tr G1(i xi) for the cavity.
pub fn cavity_zero_frequency_limit(config: &PlanarConfig) -> Result<f64> {
    config.validate()?;
    let a = match config.geometry {
        PlanarGeometry::Cavity { width } => width,
        _ => return Err(Error::Domain("cavity config required".into())),
    };
    let z = config.position;
    let rp0 = config.material.static_rp_limit();
    let eta_max = (EXP_CUTOFF + 10.0) / (2.0 * z.min(a - z));
    let (v, _) = quadrature::integrate(
        |eta: f64| {
            let fz = (-2.0 * eta * z).exp();
            let faz = (-2.0 * eta * (a - z)).exp();
            let fa = (-2.0 * eta * a).exp();
            eta * eta * rp0 * (fz + faz) / (1.0 - rp0 * rp0 * fa)
        },
        0.0,
        eta_max,
        REL_TOL,
        0.0,
    )?;
    Ok(-C * C / (2.0 * std::f64::consts::PI) * v)
}

/// Trace dispatch over the configured geometry (real axis).
pub fn trace_real(config: &PlanarConfig, omega: f64) -> Result<GreenTraceSplit> {
    match config.geometry {
        PlanarGeometry::HalfSpace => halfspace_trace(config, omega),
        PlanarGeometry::Cavity { .. } => cavity_trace(config, omega),
    }
}

/// Trace dispatch over the configured geometry (imaginary axis).
pub fn trace_imag(config: &PlanarConfig, xi: f64) -> Result<f64> {
    match config.geometry {
        PlanarGeometry::HalfSpace => halfspace_trace_imag(config, xi),
        PlanarGeometry::Cavity { .. } => cavity_trace_imag(config, xi),
    }
}

/// Zero-frequency weighted limit dispatch.
pub fn zero_frequency_limit(config: &PlanarConfig) -> Result<f64> {
    match config.geometry {
        PlanarGeometry::HalfSpace => halfspace_zero_frequency_limit(config),
        PlanarGeometry::Cavity { .. } => cavity_zero_frequency_limit(config),
    }
}

/// Signed-frequency propagating integrand component, used to exercise the
/// Schwarz reflection property Tr G(-omega) = Tr G(omega)* without defining
/// traces at negative frequencies. The retarded continuation takes
/// beta(-omega) = -beta(omega), eps(-omega) = eps*(omega) and
/// beta1(-omega) = -beta1*(omega); for a dissipative material the last
/// follows from the upper-half-plane branch of the conjugated argument.
pub fn prop_integrand_signed(
    model: &PermittivityModel,
    omega: f64,
    u: f64,
    z: f64,
) -> Result<Complex64> {
    let eps = match model.eps_real_axis(omega.abs())? {
        EpsRealAxis::Infinite => None,
        EpsRealAxis::Finite(e) => Some(if omega < 0.0 { e.conj() } else { e }),
    };
    let k = omega / C;
    let sign = omega.signum();
    let (rs, rp) = match eps {
        None => (Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)),
        Some(eps) => {
            let beta = Complex64::new(sign * u, 0.0);
            // Im(eps) != 0 keeps the root off the real axis, where taking the
            // upper branch of the conjugated argument is exactly -beta1*.
            let beta1 = sqrt_upper(eps - Complex64::new(1.0 - u * u, 0.0));
            (
                (beta - beta1) / (beta + beta1),
                (eps * beta - beta1) / (eps * beta + beta1),
            )
        }
    };
    let phase = Complex64::new(0.0, 2.0 * k * z * u).exp();
    Ok(Complex64::new(0.0, k / FOUR_PI) * (rs - rp * (2.0 * u * u - 1.0)) * phase)
}

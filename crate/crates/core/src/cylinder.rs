//! Scattering Green-tensor trace inside a cylindrical vacuum cavity in an
//! unbounded medium.
//!
//! The trace at radial position rho = phi R is the axial-momentum integral
//! and primed azimuthal sum
//!
//! ```text
//! Tr G(rho,rho;omega) = (ik/2 pi) int_0^inf dt sum'_n {
//!     (r_M + t^2 r_N) [ n^2/(phi x)^2 J_n^2(phi x) + J_n'^2(phi x) ]
//!     + r_N (x^2/g^2) J_n^2(phi x) }
//! ```
//!
//! with g = kR, x = g sqrt(1 - t^2), x1 = g sqrt(eps - t^2) and reflection
//! coefficients r_{M,N} = -[H1_n(x)/J_n(x)] (A + B_{M,N})/(A + B_D) built from
//! the logarithmic derivatives jt = J_n'/J_n at x and ht = H1_n'/H1_n at x
//! and x1. Everything is evaluated in ratio / log-scaled form: the only
//! exponentially large objects, H1_n(x)/J_n(x) and J_n^2(phi x), appear in
//! the combined product
//!
//! ```text
//! Q_n = H1_n(x) J_n^2(phi x) / J_n(x)
//! ```
//!
//! whose log-scale is i Re x - 2 (1 - phi) Im x and therefore bounded for
//! phi < 1 however large |Im x| becomes.
//!
//! On the real axis the reflection coefficients have a double pole at the
//! vacuum light line t = 1 (the common denominator A + B_D vanishes like x^2
//! there). With the retarded prescription k -> k + i0 the pole sits at
//! t = 1 + i0, above the integration path, so the t-contour is deformed
//! along a small semicircle below the real axis around t = 1. The arc radius
//! is kept small enough that |x| stays below the first cavity resonance, so
//! the deformation crosses no waveguide pole of a lossy wall. On the
//! imaginary axis the integration variable is t_tilde = h R (real axial
//! momentum), which stays regular for every Matsubara order including m = 0.

use num_complex::Complex64;
use std::cell::Cell;

use crate::bessel::{self, LogScaled};
use crate::error::{Error, Result};
use crate::materials::{EpsImagAxis, EpsRealAxis, PermittivityModel};
use crate::quadrature;
use crate::units::C;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const EXP_CUTOFF: f64 = 60.0;
const REL_TOL: f64 = 1e-9;
/// Per-evaluation relative floor below which azimuthal terms are considered
/// converged out.
const TERM_TOL: f64 = 1e-12;

/// Cylinder scenario: radius, wall material, radial position and the
/// azimuthal cutoff policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderConfig {
    /// Cavity radius R (m).
    pub radius: f64,
    pub material: PermittivityModel,
    /// Dimensionless radial coordinate rho/R in [0, 1).
    pub phi: f64,
    /// Forced azimuthal cutoff; `None` selects the adaptive default with
    /// automatic escalation.
    pub n_max: Option<usize>,
    /// Depth of the depressed real-axis t-contour (dimensionless, below the
    /// retarded pole line). Exposed so self-consistency tests can vary it.
    pub contour_depth: f64,
}

impl CylinderConfig {
    pub fn new(radius: f64, material: PermittivityModel, phi: f64) -> Self {
        Self {
            radius,
            material,
            phi,
            n_max: None,
            contour_depth: 0.05,
        }
    }

    pub fn at_phi(&self, phi: f64) -> Self {
        Self { phi, ..*self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) {
            return Err(Error::Domain(format!("radius must be > 0, got {}", self.radius)));
        }
        if !(0.0..1.0).contains(&self.phi) {
            return Err(Error::Domain(format!(
                "phi must lie in [0, 1), got {}",
                self.phi
            )));
        }
        Ok(())
    }
}

/// Dimensionless kernel state at one (order, axial momentum) point.
#[derive(Debug, Clone, Copy)]
pub struct CylinderKernelState {
    /// g = k R.
    pub g: Complex64,
    /// t = h/k.
    pub t: Complex64,
    /// x = g sqrt(1 - t^2), upper-half-plane branch.
    pub x: Complex64,
    /// x1 = g sqrt(eps - t^2), upper-half-plane branch.
    pub x1: Complex64,
    /// Azimuthal order.
    pub order: u32,
}

fn sqrt_upper(z: Complex64) -> Complex64 {
    let w = z.sqrt();
    if w.im < 0.0 {
        -w
    } else {
        w
    }
}

impl CylinderKernelState {
    pub fn new(order: u32, g: Complex64, t: Complex64, eps: Complex64) -> Self {
        let g2 = g * g;
        let x = sqrt_upper(g2 * (1.0 - t * t));
        let x1 = sqrt_upper(g2 * (eps - t * t));
        Self { g, t, x, x1, order }
    }
}

/// The ratio pair (rtilde_M, rtilde_N) = (A + B_{M,N})/(A + B_D).
///
/// `jt2`, `ht2` are J'/J and H'/H at x; `ht1` is H'/H at x1.
fn rtilde(
    n: u32,
    g2: Complex64,
    x: Complex64,
    x1: Complex64,
    eps: Complex64,
    jt2: Complex64,
    ht2: Complex64,
    ht1: Complex64,
    t_for_diag: f64,
) -> Result<(Complex64, Complex64)> {
    let x2 = x * x;
    let x1sq = x1 * x1;
    let n2 = (n as f64) * (n as f64);

    let a = n2
        * (x2 * x2 * x2 - (2.0 * x1sq + g2) * x2 * x2 + (2.0 * g2 + x1sq) * x1sq * x2
            - g2 * x1sq * x1sq);

    let front = g2 * x1sq * x2;
    let quad = eps * ht1 * ht1 * x2;
    let tail = ht2 * jt2 * x1sq;
    let b_m = front * (quad - (ht1 * jt2 + eps * ht1 * ht2) * x1 * x + tail);
    let b_n = front * (quad - (eps * ht1 * jt2 + ht1 * ht2) * x1 * x + tail);
    let b_d = front * (quad - (eps + 1.0) * ht1 * jt2 * x1 * x + jt2 * jt2 * x1sq);

    // A + B_D vanishes like x^2 at the (removable) t = 1 point, so smallness
    // relative to A alone is not a pole; only an exact zero / non-finite
    // denominator marks a true waveguide mode on the contour.
    let denom = a + b_d;
    let rt_m = (a + b_m) / denom;
    let rt_n = (a + b_n) / denom;
    if denom.norm() == 0.0 || !rt_m.is_finite() || !rt_n.is_finite() {
        return Err(Error::ModePole {
            order: n,
            t: t_for_diag,
        });
    }
    Ok((rt_m, rt_n))
}

/// Full reflection coefficients r_M, r_N = -[H1_n(x)/J_n(x)] rtilde_{M,N}.
///
/// Raw-valued; the argument x must respect the Bessel overflow guard. The
/// trace integrands never call this (they keep the Hankel/Bessel prefactor
/// inside the scaled kernel product).
pub fn cylinder_reflection(
    state: &CylinderKernelState,
    eps: Complex64,
) -> Result<(Complex64, Complex64)> {
    let n = state.order;
    let (jr, hr) = bessel::ratio_seq(state.x, n as usize)?;
    let (_, hr1) = bessel::ratio_seq(state.x1, n as usize)?;
    let (rt_m, rt_n) = rtilde(
        n,
        state.g * state.g,
        state.x,
        state.x1,
        eps,
        jr[n as usize],
        hr[n as usize],
        hr1[n as usize],
        state.t.re,
    )?;
    let h = bessel::hankel1(n, state.x)?;
    let j = bessel::bessel_j(n, state.x)?;
    if j.norm() == 0.0 {
        return Err(Error::ModePole {
            order: n,
            t: state.t.re,
        });
    }
    let pref = -h / j;
    Ok((pref * rt_m, pref * rt_n))
}

/// Shared per-evaluation context for the azimuthal sum.
struct KernelPoint {
    /// g^2 (negative real on the imaginary axis).
    g2: Complex64,
    /// x = g sqrt(1 - t^2).
    x: Complex64,
    /// x1, `None` for the perfect conductor.
    x1: Option<Complex64>,
    /// eps, `None` for the perfect conductor.
    eps: Option<Complex64>,
    /// t^2 as a complex number (t^2 = -t_tilde^2/g_hat^2 on the imaginary axis).
    t2: Complex64,
    /// x^2/g^2.
    x2_over_g2: Complex64,
    t_for_diag: f64,
}

struct SumDiagnostics {
    cap_hit: Cell<bool>,
    pole: Cell<Option<Error>>,
}

impl SumDiagnostics {
    fn new() -> Self {
        Self {
            cap_hit: Cell::new(false),
            pole: Cell::new(None),
        }
    }
}

/// sum'_n of the trace kernel at one axial-momentum point.
fn kernel_sum(p: &KernelPoint, phi: f64, cap: usize, diag: &SumDiagnostics) -> Complex64 {
    let x = p.x;
    let seq_x = match bessel::cylinder_seq(x, cap) {
        Ok(s) => s,
        Err(_) => return Complex64::new(0.0, 0.0),
    };
    let hr1: Option<Vec<Complex64>> = match p.x1 {
        Some(x1) => match bessel::ratio_seq(x1, cap) {
            Ok((_, hr)) => Some(hr),
            Err(_) => return Complex64::new(0.0, 0.0),
        },
        None => None,
    };
    let jphi: Option<Vec<LogScaled>> = if phi > 0.0 {
        match bessel::j_seq(phi * x, cap) {
            Ok(s) => Some(s),
            Err(_) => return Complex64::new(0.0, 0.0),
        }
    } else {
        None
    };

    let mut sum = Complex64::new(0.0, 0.0);
    let mut streak = 0;
    let localization = x.norm().max(phi * x.norm()).ceil() as usize + 2;

    for n in 0..=cap {
        if seq_x.j[n].is_zero() || seq_x.h1[n].is_zero() {
            continue;
        }
        let jt2 = seq_x.jp[n].ratio(&seq_x.j[n]);
        let ht2 = seq_x.h1p[n].ratio(&seq_x.h1[n]);

        let (rt_m, rt_n) = match (p.eps, &hr1) {
            (Some(eps), Some(hr1)) => {
                match rtilde(
                    n as u32,
                    p.g2,
                    x,
                    p.x1.unwrap(),
                    eps,
                    jt2,
                    ht2,
                    hr1[n],
                    p.t_for_diag,
                ) {
                    Ok(r) => r,
                    Err(e) => {
                        diag.pole.set(Some(e));
                        return Complex64::new(0.0, 0.0);
                    }
                }
            }
            // perfect conductor: r_M -> -H'/J', r_N -> -H/J, i.e.
            // rtilde_M = ht2/jt2 and rtilde_N = 1
            _ => (ht2 / jt2, Complex64::new(1.0, 0.0)),
        };

        let term = if let Some(jphi) = &jphi {
            // Q_n = H1_n(x) J_n^2(phi x)/J_n(x), log-scales combined
            let q = seq_x.h1[n]
                .mul(&jphi[n])
                .mul(&jphi[n])
                .div(&seq_x.j[n])
                .value();
            if q.re == 0.0 && q.im == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                let arg = phi * x;
                let jr_phi = if n == 0 {
                    -jphi[1].ratio(&jphi[0])
                } else {
                    jphi[n - 1].ratio(&jphi[n]) - n as f64 / arg
                };
                let bracket = (n as f64 * n as f64) / (arg * arg) + jr_phi * jr_phi;
                -q * ((rt_m + p.t2 * rt_n) * bracket + rt_n * p.x2_over_g2)
            }
        } else {
            // on-axis limits: n = 0 keeps r_N x^2/g^2, n = 1 keeps
            // (r_M + t^2 r_N)/2, all higher orders vanish
            match n {
                0 => {
                    let hj = seq_x.h1[0].ratio(&seq_x.j[0]);
                    -hj * rt_n * p.x2_over_g2
                }
                1 => {
                    let hj = seq_x.h1[1].ratio(&seq_x.j[1]);
                    -hj * (rt_m + p.t2 * rt_n) * 0.5
                }
                _ => Complex64::new(0.0, 0.0),
            }
        };

        let weighted = if n == 0 { term * 0.5 } else { term };
        sum += weighted;

        if phi == 0.0 && n >= 1 {
            break;
        }
        if n > localization {
            if weighted.norm() <= TERM_TOL * sum.norm().max(1e-300) {
                streak += 1;
                if streak >= 3 {
                    return sum;
                }
            } else {
                streak = 0;
            }
        }
    }
    if phi > 0.0 {
        diag.cap_hit.set(true);
    }
    sum
}

/// Azimuthal cutoff start: the angular spectrum localizes at n ~ |g|, but
/// close to the wall the terms decay only like phi^(2n), which needs
/// n ~ 14/(1 - phi) to fall below the term tolerance.
fn default_cap(g_scale: f64, phi: f64) -> usize {
    let wall = (14.0 / (1.0 - phi).max(1e-3)).ceil() as usize;
    g_scale.ceil() as usize + 25 + wall
}

fn eps_real(config: &CylinderConfig, omega: f64) -> Result<Option<Complex64>> {
    Ok(match config.material.eps_real_axis(omega)? {
        EpsRealAxis::Infinite => None,
        EpsRealAxis::Finite(e) => {
            if (e - Complex64::new(1.0, 0.0)).norm() < 1e-14 {
                return Err(Error::Domain(
                    "eps = 1 has no interface; the cylinder trace is identically zero".into(),
                ));
            }
            Some(e)
        }
    })
}

/// Scattering trace at real frequency omega > 0. Complex-valued.
///
/// Requires a dissipative wall: a strictly lossless wall puts waveguide poles
/// on the integration contour.
pub fn cylinder_trace(config: &CylinderConfig, omega: f64) -> Result<Complex64> {
    config.validate()?;
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("omega must be > 0, got {omega}")));
    }
    if !config.material.is_lossy() {
        return Err(Error::LosslessRealAxis(
            "use a Drude or complex-constant wall for real-axis cylinder traces".into(),
        ));
    }
    let eps = eps_real(config, omega)?;
    let k = omega / C;
    let g = k * config.radius;
    let phi = config.phi;

    let base_cap = config.n_max.unwrap_or(default_cap(g, phi));
    let forced = config.n_max.is_some();
    let mut cap = base_cap;

    for _attempt in 0..8 {
        let diag = SumDiagnostics::new();
        let point = |t2_c: Complex64, t_diag: f64| -> KernelPoint {
            let g2 = Complex64::new(g * g, 0.0);
            let x = sqrt_upper(g2 * (1.0 - t2_c));
            let x1 = eps.map(|e| sqrt_upper(g2 * (e - t2_c)));
            KernelPoint {
                g2,
                x,
                x1,
                eps,
                t2: t2_c,
                x2_over_g2: 1.0 - t2_c,
                t_for_diag: t_diag,
            }
        };
        let kernel_at_complex = |t: Complex64| -> Complex64 {
            kernel_sum(&point(t * t, t.re), phi, cap, &diag)
        };

        // evanescent decay scale: Im x = g sqrt(t^2 - 1) for t > 1
        let w_max = (EXP_CUTOFF / 2.0 + 8.0) / ((1.0 - phi) * g);
        let t_max = (1.0 + w_max * w_max).sqrt();
        // Depressed rectangular contour 0 -> -iD -> t_max - iD -> t_max. The
        // retarded poles (waveguide modes, surface wave, the t = 1 + i0 light
        // line) all sit above the real axis for a dissipative wall, so the
        // path below is pole-free and the integrand smooth; x^2 = g^2(1-t^2)
        // keeps a positive imaginary part along the horizontal run, so the
        // Im x >= 0 branch is followed continuously.
        let depth = config.contour_depth;

        let down = quadrature::integrate(
            |s: f64| {
                kernel_at_complex(Complex64::new(0.0, -s)) * Complex64::new(0.0, -1.0)
            },
            0.0,
            depth,
            REL_TOL,
            0.0,
        );

        let mut nodes: Vec<f64> = Vec::new();
        let n_nodes = (2.0 * g * (1.0 + phi) / std::f64::consts::PI).ceil() as usize
            + (1.0 / depth).ceil() as usize
            + 8;
        for j in 0..=n_nodes {
            nodes.push(t_max * j as f64 / n_nodes as f64);
        }
        // absolute floor from probe magnitudes so vanishing-contrast kernels
        // converge at their rounding level
        let probe = [0.23, 0.52, 0.87]
            .iter()
            .map(|&f| kernel_at_complex(Complex64::new(f, -depth)).norm())
            .fold(0.0, f64::max);
        let abs_floor = 1e-13 * probe * (t_max + 1.0);
        let run = quadrature::integrate_with_breakpoints(
            |sigma: f64| kernel_at_complex(Complex64::new(sigma, -depth)),
            &nodes,
            REL_TOL,
            abs_floor,
        );

        let up = quadrature::integrate(
            |s: f64| {
                kernel_at_complex(Complex64::new(t_max, -s)) * Complex64::new(0.0, 1.0)
            },
            0.0,
            depth,
            REL_TOL,
            0.0,
        );

        if let Some(e) = diag.pole.take() {
            return Err(e);
        }
        if diag.cap_hit.get() && !forced {
            cap *= 2;
            continue;
        }
        if diag.cap_hit.get() && forced {
            return Err(Error::SumNonconvergence {
                requested: TERM_TOL,
                n_max: cap,
            });
        }
        let total = down?.0 + run?.0 + up?.0;
        return Ok(Complex64::new(0.0, k / TWO_PI) * total);
    }
    Err(Error::SumNonconvergence {
        requested: TERM_TOL,
        n_max: cap,
    })
}

/// Core of the imaginary-axis evaluation, parametrized by t_tilde = h R.
/// Returns the full complex value of (i/(2 pi R)) int dt_tilde sum_n {...};
/// the imaginary residue must vanish and is checked by callers/tests.
fn trace_imag_complex(config: &CylinderConfig, xi: f64) -> Result<Complex64> {
    let eps = match config.material.eps_imag_axis(xi)? {
        EpsImagAxis::Infinite => None,
        EpsImagAxis::Finite(e) => {
            if (e - 1.0).abs() < 1e-14 {
                return Err(Error::Domain(
                    "eps = 1 has no interface; the cylinder trace is identically zero".into(),
                ));
            }
            Some(Complex64::new(e, 0.0))
        }
    };
    let g_hat = xi * config.radius / C;
    let phi = config.phi;

    // every kernel value carries e^{-2 (1-phi) g_hat}; once that factor is
    // below ~1e-20 the term cannot move a Matsubara sum whose m = 0 member is
    // unsuppressed, and the large-order evaluation is expensive rounding
    // noise. Treated as a numerical zero.
    if 2.0 * (1.0 - phi) * g_hat > 46.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }

    let base_cap = config.n_max.unwrap_or(default_cap(g_hat, phi));
    let forced = config.n_max.is_some();
    let mut cap = base_cap;

    for _attempt in 0..8 {
        let diag = SumDiagnostics::new();
        let kernel_at = |tt: f64| -> Complex64 {
            let u = (g_hat * g_hat + tt * tt).sqrt();
            let g2 = Complex64::new(-g_hat * g_hat, 0.0);
            let x = Complex64::new(0.0, u);
            let x1 = eps.map(|e| sqrt_upper(g2 * (e - Complex64::new(-(tt * tt) / (g_hat * g_hat), 0.0))));
            let p = KernelPoint {
                g2,
                x,
                x1,
                eps,
                t2: Complex64::new(-(tt * tt) / (g_hat * g_hat), 0.0),
                x2_over_g2: Complex64::new((u * u) / (g_hat * g_hat), 0.0),
                t_for_diag: tt,
            };
            kernel_sum(&p, phi, cap, &diag)
        };

        let reach = EXP_CUTOFF / 2.0 + 8.0;
        let tt_max = ((g_hat + reach / (1.0 - phi)).powi(2) - g_hat * g_hat).sqrt();
        // seed the panel list with the medium-side boundary layer at
        // t_tilde ~ sqrt((eps - 1) g_hat^2), which becomes very thin for the
        // near-static (m = 0) evaluation where eps diverges while g_hat -> 0
        let mut nodes = vec![0.0];
        if let Some(e) = eps {
            let layer = ((e.re - 1.0).abs() * g_hat * g_hat).sqrt();
            for f in [0.1, 1.0, 10.0, 100.0] {
                let v = layer * f;
                if v > 0.0 && v < tt_max {
                    nodes.push(v);
                }
            }
        }
        for j in 1..=8 {
            nodes.push(tt_max * j as f64 / 8.0);
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * tt_max);
        let probe = [0.1, 0.3, 0.6]
            .iter()
            .map(|&f| kernel_at(f * tt_max).norm())
            .fold(0.0, f64::max);
        let result = quadrature::integrate_with_breakpoints(
            &kernel_at,
            &nodes,
            REL_TOL,
            1e-13 * probe * tt_max,
        );

        if let Some(e) = diag.pole.take() {
            return Err(e);
        }
        if diag.cap_hit.get() {
            if forced {
                return Err(Error::SumNonconvergence {
                    requested: TERM_TOL,
                    n_max: cap,
                });
            }
            cap *= 2;
            continue;
        }
        let integral = result?.0;
        return Ok(Complex64::new(0.0, 1.0 / (TWO_PI * config.radius)) * integral);
    }
    Err(Error::SumNonconvergence {
        requested: TERM_TOL,
        n_max: cap,
    })
}

/// The imaginary-axis integrand at one t_tilde = h R node, for fixed-grid
/// oracle tests.
#[doc(hidden)]
pub fn imag_axis_kernel(config: &CylinderConfig, xi: f64, t_tilde: f64) -> Result<Complex64> {
    config.validate()?;
    let eps = match config.material.eps_imag_axis(xi)? {
        EpsImagAxis::Infinite => None,
        EpsImagAxis::Finite(e) => Some(Complex64::new(e, 0.0)),
    };
    let g_hat = xi * config.radius / C;
    let phi = config.phi;
    let cap = config.n_max.unwrap_or(default_cap(g_hat, phi));
    let diag = SumDiagnostics::new();
    let tt = t_tilde;
    let u = (g_hat * g_hat + tt * tt).sqrt();
    let g2 = Complex64::new(-g_hat * g_hat, 0.0);
    let t2 = Complex64::new(-(tt * tt) / (g_hat * g_hat), 0.0);
    let p = KernelPoint {
        g2,
        x: Complex64::new(0.0, u),
        x1: eps.map(|e| sqrt_upper(g2 * (e - t2))),
        eps,
        t2,
        x2_over_g2: Complex64::new((u * u) / (g_hat * g_hat), 0.0),
        t_for_diag: tt,
    };
    let v = kernel_sum(&p, phi, cap, &diag);
    if let Some(e) = diag.pole.take() {
        return Err(e);
    }
    Ok(v)
}

/// Trace at the m-th Matsubara frequency.
///
/// For m >= 1 this is Tr G(i xi_m), real-valued. For m = 0 the trace itself
/// diverges like 1/xi^2 and the returned value is the weighted limit
/// lim_{xi->0} xi^2 Tr G(i xi) that the half-weight Matsubara term needs.
pub fn cylinder_trace_imag(config: &CylinderConfig, xi: f64, m: usize) -> Result<f64> {
    config.validate()?;
    if m == 0 {
        return cylinder_zero_frequency_limit(config);
    }
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("xi must be > 0 for m >= 1, got {xi}")));
    }
    Ok(trace_imag_complex(config, xi)?.re)
}

/// lim_{xi->0} xi^2 Tr G(i xi).
///
/// Evaluated at a material-dependent small xi_eff chosen so that the
/// coefficient degeneracy parameter (eps(i xi) - 1)(xi R/c)^2 stays below
/// 1e-6; the relative limit error is of the same order.
pub fn cylinder_zero_frequency_limit(config: &CylinderConfig) -> Result<f64> {
    config.validate()?;
    let r = config.radius;
    let xi_eff = match config.material {
        PermittivityModel::Drude {
            plasma_frequency: wp,
            relaxation_rate: gamma,
        } => (1e-6 * gamma * C * C / (wp * wp * r * r)).min(1e-3 * gamma),
        PermittivityModel::PerfectConductor => 1e-9 * C / r,
        PermittivityModel::Constant { value } => {
            let contrast = (value.re - 1.0).abs().max(1e-6)
;
            (1e-6f64 / contrast).sqrt() * C / r
        }
    };
    let v = trace_imag_complex(config, xi_eff)?;
    Ok(xi_eff * xi_eff * v.re)
}

/// Resonant radius R = c j / omega with j the i-th zero of J_n (or J_n').
pub fn resonant_radius(n: u32, i: u32, omega: f64, prime: bool) -> f64 {
    assert!(omega > 0.0, "resonant_radius requires omega > 0");
    C * bessel::bessel_zero(n, i, prime) / omega
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::gold_drude;
    use approx::assert_relative_eq;

    const OMEGA_LIH: f64 = 2.79e12;

    #[test]
    fn kernel_state_invariants() {
        let eps = Complex64::new(-6.6e4, 1.26e6);
        for &t in &[0.1, 0.5, 0.9, 1.5, 3.0] {
            let g = Complex64::new(5.75, 0.0);
            let s = CylinderKernelState::new(2, g, Complex64::new(t, 0.0), eps);
            let lhs = s.x * s.x + g * g * s.t * s.t;
            assert!((lhs - g * g).norm() <= 1e-12 * (g * g).norm());
            let lhs1 = s.x1 * s.x1 + g * g * s.t * s.t;
            assert!((lhs1 - eps * g * g).norm() <= 1e-12 * (eps * g * g).norm());
            assert!(s.x.im >= 0.0 && s.x1.im >= 0.0);
        }
    }

    #[test]
    fn perfect_conductor_limit_of_reflection_coefficients() {
        // r_M -> -H1'/J1', r_N -> -H1/J at |eps| = 1e8. The finite-eps
        // correction scales like n t^2/(g(1-t^2) sqrt(eps)), so the kernel
        // state grows with the order and keeps each sampled x away from that
        // order's J_n / J_n' zeros, where the reference ratio itself is
        // near-singular.
        let eps = Complex64::new(1e8, 1e8);
        let g_for_n = [1.6, 2.7, 4.0, 5.2, 6.4, 7.75];
        for n in 0..=5u32 {
            let g = Complex64::new(g_for_n[n as usize], 0.0);
            for &t in &[0.1, 0.5, 0.9, 1.5] {
                let s = CylinderKernelState::new(n, g, Complex64::new(t, 0.0), eps);
                let (r_m, r_n) = cylinder_reflection(&s, eps).unwrap();
                let e = bessel::bessel_eval(n, s.x).unwrap();
                let expect_m = -e.h1p / e.jp;
                let expect_n = -e.h1 / e.j;
                assert!(
                    (r_m - expect_m).norm() <= 1e-3 * expect_m.norm(),
                    "r_M at n={n}, t={t}: {r_m} vs {expect_m}"
                );
                assert!(
                    (r_n - expect_n).norm() <= 1e-3 * expect_n.norm(),
                    "r_N at n={n}, t={t}: {r_n} vs {expect_n}"
                );
            }
        }
    }

    #[test]
    fn order_zero_has_no_a_term() {
        // at n = 0, A = 0 so rtilde = B/B_D exactly; verify rtilde against a
        // direct B-only evaluation
        let eps = Complex64::new(4.0, 1.0);
        let g = Complex64::new(3.0, 0.0);
        let s = CylinderKernelState::new(0, g, Complex64::new(0.4, 0.0), eps);
        let (jr, hr) = bessel::ratio_seq(s.x, 0).unwrap();
        let (_, hr1) = bessel::ratio_seq(s.x1, 0).unwrap();
        let (rt_m, rt_n) = rtilde(0, g * g, s.x, s.x1, eps, jr[0], hr[0], hr1[0], 0.4).unwrap();
        let (jt2, ht2, ht1) = (jr[0], hr[0], hr1[0]);
        let x = s.x;
        let x1 = s.x1;
        let front = g * g * x1 * x1 * x * x;
        let quad = eps * ht1 * ht1 * x * x;
        let tail = ht2 * jt2 * x1 * x1;
        let b_m = front * (quad - (ht1 * jt2 + eps * ht1 * ht2) * x1 * x + tail);
        let b_n = front * (quad - (eps * ht1 * jt2 + ht1 * ht2) * x1 * x + tail);
        let b_d = front * (quad - (eps + 1.0) * ht1 * jt2 * x1 * x + jt2 * jt2 * x1 * x1);
        assert!((rt_m - b_m / b_d).norm() <= 1e-14 * rt_m.norm());
        assert!((rt_n - b_n / b_d).norm() <= 1e-14 * rt_n.norm());
    }

    #[test]
    fn vanishing_contrast_continuity() {
        // constant eps -> 1+ gives trace -> 0, linearly in the contrast
        let r = 618e-6;
        let mut norms = Vec::new();
        for &de in &[1e-1, 1e-2, 1e-3] {
            let m = PermittivityModel::Constant {
                value: Complex64::new(1.0 + de, de * 0.3),
            };
            let cfg = CylinderConfig::new(r, m, 0.5);
            norms.push(cylinder_trace(&cfg, OMEGA_LIH).unwrap().norm());
        }
        assert!(norms[1] < 0.3 * norms[0]);
        assert!(norms[2] < 0.3 * norms[1]);
        let ratio = norms[1] / norms[2];
        assert!(
            (3.0..30.0).contains(&ratio),
            "decay should be roughly linear in the contrast, got ratio {ratio}"
        );
        // absolute scale: well below the wavenumber scale k for a 1e-3 contrast
        let k = OMEGA_LIH / C;
        assert!(norms[2] < 1e-2 * k, "trace {} vs k {}", norms[2], k);
    }

    #[test]
    fn lossless_wall_rejected_on_real_axis() {
        let cfg = CylinderConfig::new(618e-6, PermittivityModel::PerfectConductor, 0.5);
        assert!(matches!(
            cylinder_trace(&cfg, OMEGA_LIH),
            Err(Error::LosslessRealAxis(_))
        ));
        let lossless = PermittivityModel::Constant {
            value: Complex64::new(4.0, 0.0),
        };
        assert!(cylinder_trace(&CylinderConfig::new(618e-6, lossless, 0.5), OMEGA_LIH).is_err());
    }

    #[test]
    fn imaginary_axis_trace_is_real() {
        let cfg = CylinderConfig::new(20e-6, gold_drude(), 0.5);
        let xi = 2.4679e14 * 0.05;
        let v = trace_imag_complex(&cfg, xi).unwrap();
        assert!(
            v.im.abs() <= 1e-10 * v.re.abs(),
            "imaginary residue {} vs {}",
            v.im,
            v.re
        );
        assert!(v.re < 0.0, "metallic cylinder trace must be attractive-sign");
    }

    #[test]
    fn zero_frequency_limit_is_stable_against_xi_eff_choice() {
        let cfg = CylinderConfig::new(618e-6, gold_drude(), 0.5);
        let z0 = cylinder_zero_frequency_limit(&cfg).unwrap();
        // halving xi_eff by hand: evaluate at two small xi and compare the
        // weighted values
        let xi_a = 0.02;
        let xi_b = 0.01;
        let va = xi_a * xi_a * trace_imag_complex(&cfg, xi_a).unwrap().re;
        let vb = xi_b * xi_b * trace_imag_complex(&cfg, xi_b).unwrap().re;
        assert_relative_eq!(va, vb, max_relative = 1e-5);
        assert_relative_eq!(z0, vb, max_relative = 1e-4);
        assert!(z0 < 0.0);
    }

    #[test]
    fn resonant_radius_values() {
        // R_11 = c j_11 / omega, and 1.5 R_11 ~ 618 um at the LiH-scale frequency
        let r11 = resonant_radius(1, 1, OMEGA_LIH, false);
        assert_relative_eq!(1.5 * r11, 618e-6, max_relative = 0.01);
        // doubling omega halves R
        assert_relative_eq!(
            resonant_radius(1, 1, 2.0 * OMEGA_LIH, false),
            r11 / 2.0,
            max_relative = 1e-14
        );
        // primed radius from the J' zero
        assert_relative_eq!(
            resonant_radius(1, 1, OMEGA_LIH, true),
            C * 1.841183781340659 / OMEGA_LIH,
            max_relative = 1e-10
        );
    }

    #[test]
    fn invalid_configs_rejected() {
        let cfg = CylinderConfig::new(618e-6, gold_drude(), 1.0);
        assert!(cylinder_trace(&cfg, OMEGA_LIH).is_err());
        let cfg = CylinderConfig::new(-1.0, gold_drude(), 0.5);
        assert!(cylinder_trace(&cfg, OMEGA_LIH).is_err());
        let cfg = CylinderConfig::new(618e-6, gold_drude(), 0.5);
        assert!(cylinder_trace(&cfg, 0.0).is_err());
    }
}

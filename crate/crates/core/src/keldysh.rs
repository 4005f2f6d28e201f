//! Desk-scale numerical verification of the non-equilibrium identities the
//! potential formula rests on.
//!
//! Two families of checks:
//!
//! 1. Contour rotation: for damped scalar response models (analytic in the
//!    upper half-plane), the real-frequency form of the thermal shift equals
//!    the Matsubara-sum form plus the common resonant integral. Both sides
//!    are computed by independent routes (adaptive real-axis quadrature vs
//!    pole sum with analytic tail).
//!
//! 2. Finite-dimensional Born series: the kinetic equation for the field
//!    correlation matrix,
//!    rho = rho0 + rho0 Pi_A G_A + G0 Pi_R rho + G0 Pi12 G_A,
//!    iterated from the free-field seed rho0 = -2i N_E Im G0, converges to
//!    the closed form -[2i N_E Im G + G (N_E Pi21 - (N_E+1) Pi12) G^dag]
//!    with G = (1 - G0 Pi_R)^{-1} G0. At detailed balance
//!    (Pi12/Pi21 = N/(N+1), N_S = N_E) the correlation reduces to the
//!    equilibrium fluctuation-dissipation form -2i N Im G.
//!
//! The matrix checks validate the algebraic structure (iteration, Born
//! resummation, closed form) on finite surrogates of the continuum kernels,
//! not the continuum analysis itself.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::molecule::{matsubara_frequency, photon_number};
use crate::quadrature;
use crate::units::{EPSILON_0, HBAR, K_B, MU_0};

// ---------------------------------------------------------------------------
// Scalar response models
// ---------------------------------------------------------------------------

/// One damped oscillator pole of a scalar response model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPole {
    /// Resonance frequency (rad/s), > 0.
    pub omega: f64,
    /// Damping rate (rad/s), > 0 for upper-half-plane analyticity.
    pub gamma: f64,
    /// Oscillator weight (arbitrary units).
    pub weight: f64,
}

/// G(omega) = sum_j w_j / (Omega_j^2 - omega^2 - i Gamma_j omega).
///
/// Satisfies G*(omega) = G(-omega) on the real axis, is analytic in the upper
/// half-plane, and is real on the imaginary axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarModelGreen {
    pub poles: Vec<ModelPole>,
}

impl ScalarModelGreen {
    pub fn new(poles: Vec<ModelPole>) -> Result<Self> {
        if poles.is_empty() {
            return Err(Error::InvalidInput("model needs at least one pole".into()));
        }
        for p in &poles {
            if !(p.omega > 0.0) || !(p.gamma > 0.0) {
                return Err(Error::InvalidInput(
                    "poles need omega > 0 and gamma > 0".into(),
                ));
            }
        }
        Ok(Self { poles })
    }

    pub fn eval_real(&self, omega: f64) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for p in &self.poles {
            s += p.weight
                / Complex64::new(p.omega * p.omega - omega * omega, -p.gamma * omega);
        }
        s
    }

    pub fn eval_imag(&self, xi: f64) -> f64 {
        let mut s = 0.0;
        for p in &self.poles {
            s += p.weight / (p.omega * p.omega + xi * xi + p.gamma * xi);
        }
        s
    }
}

/// Outcome of one contour-rotation comparison.
#[derive(Debug, Clone, Copy)]
pub struct ContourCheck {
    /// Real-frequency route (J-like units).
    pub lhs: f64,
    /// Matsubara route plus the resonant correction.
    pub rhs: f64,
    pub rel_err: f64,
    /// The resonant correction alone (shared by both forms).
    pub resonant: f64,
}

fn real_axis_breakpoints(models: [&ScalarModelGreen; 2]) -> Vec<f64> {
    let mut pts = vec![0.0];
    let mut omega_max: f64 = 0.0;
    for m in models {
        for p in &m.poles {
            omega_max = omega_max.max(p.omega);
            for f in [-8.0, -3.0, -1.0, 1.0, 3.0, 8.0] {
                let w = p.omega + f * p.gamma.max(1e-4 * p.omega);
                if w > 0.0 {
                    pts.push(w);
                }
            }
        }
    }
    // log ladder out to 1e5 * omega_max; the integrand tail falls like 1/w^3
    for k in 0..=25 {
        pts.push(omega_max * (10f64).powf(k as f64 / 5.0));
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1e-300));
    pts
}

/// The resonant correction (hbar mu0/pi) int_0^inf w^2 N(w,T) Im alpha Re G dw.
fn resonant_integral(
    green: &ScalarModelGreen,
    alpha: &ScalarModelGreen,
    temperature: f64,
) -> Result<f64> {
    let pts = real_axis_breakpoints([green, alpha]);
    let (v, _) = quadrature::integrate_with_breakpoints(
        |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let n = photon_number(w, temperature).unwrap_or(0.0);
            if n == 0.0 {
                return 0.0;
            }
            w * w * n * alpha.eval_real(w).im * green.eval_real(w).re
        },
        &pts,
        1e-10,
        0.0,
    )?;
    Ok(HBAR * MU_0 / std::f64::consts::PI * v)
}

/// Matsubara sum mu0 kB T sum'_m xi_m^2 alpha(i xi_m) G(i xi_m) with an
/// analytic 1/xi^2 .. 1/xi^4 tail beyond the explicit cutoff.
fn matsubara_sum(
    green: &ScalarModelGreen,
    alpha: &ScalarModelGreen,
    temperature: f64,
) -> f64 {
    let xi1 = matsubara_frequency(1, temperature);
    let scale = green
        .poles
        .iter()
        .chain(alpha.poles.iter())
        .map(|p| p.omega.max(p.gamma))
        .fold(0.0, f64::max);
    let m_cut = ((100.0 * scale / xi1).ceil() as usize).max(100_000);

    let mut sum = 0.0; // m = 0 term vanishes (xi^2 prefactor, regular models)
    for m in 1..=m_cut {
        let xi = m as f64 * xi1;
        sum += xi * xi * alpha.eval_imag(xi) * green.eval_imag(xi);
    }

    // tail: xi^2 alpha G = A/xi^2 + B/xi^3 + C/xi^4 + O(1/xi^5)
    let w_a: f64 = alpha.poles.iter().map(|p| p.weight).sum();
    let w_g: f64 = green.poles.iter().map(|p| p.weight).sum();
    let wg_a: f64 = alpha.poles.iter().map(|p| p.weight * p.gamma).sum();
    let wg_g: f64 = green.poles.iter().map(|p| p.weight * p.gamma).sum();
    let wq_a: f64 = alpha
        .poles
        .iter()
        .map(|p| p.weight * (p.gamma * p.gamma - p.omega * p.omega))
        .sum();
    let wq_g: f64 = green
        .poles
        .iter()
        .map(|p| p.weight * (p.gamma * p.gamma - p.omega * p.omega))
        .sum();
    let a = w_a * w_g;
    let b = -(w_a * wg_g + w_g * wg_a);
    let c = w_a * wq_g + w_g * wq_a + wg_a * wg_g;

    // zeta(p, M+1) via Euler-Maclaurin, good to ~1e-14 for M >= 50
    let m = m_cut as f64;
    let s2 = 1.0 / m - 1.0 / (2.0 * m * m) + 1.0 / (6.0 * m.powi(3)) - 1.0 / (30.0 * m.powi(5));
    let s3 = 1.0 / (2.0 * m * m) - 1.0 / (2.0 * m.powi(3)) + 1.0 / (4.0 * m.powi(4));
    let s4 = 1.0 / (3.0 * m.powi(3)) - 1.0 / (2.0 * m.powi(4)) + 1.0 / (3.0 * m.powi(5));
    let tail = a * s2 / (xi1 * xi1) + b * s3 / xi1.powi(3) + c * s4 / xi1.powi(4);

    MU_0 * K_B * temperature * (sum + tail)
}

/// Compare the real-frequency and Matsubara forms of the thermal shift for a
/// scalar Green model and a scalar polarizability model.
pub fn contour_rotation_check(
    green: &ScalarModelGreen,
    alpha: &ScalarModelGreen,
    temperature: f64,
) -> Result<ContourCheck> {
    if !(temperature > 0.0) {
        return Err(Error::Domain("temperature must be > 0".into()));
    }

    // lhs: -(hbar mu0/2 pi) int w^2 [(2N+1) Im(alpha G) - 2 N Im alpha Re G] dw
    let pts = real_axis_breakpoints([green, alpha]);
    let (v, _) = quadrature::integrate_with_breakpoints(
        |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let n = photon_number(w, temperature).unwrap_or(0.0);
            let a = alpha.eval_real(w);
            let g = green.eval_real(w);
            w * w * ((2.0 * n + 1.0) * (a * g).im - 2.0 * n * a.im * g.re)
        },
        &pts,
        1e-10,
        0.0,
    )?;
    let lhs = -(HBAR * MU_0) / (2.0 * std::f64::consts::PI) * v;

    let resonant = resonant_integral(green, alpha, temperature)?;
    let rhs = matsubara_sum(green, alpha, temperature) + resonant;

    let rel_err = (lhs - rhs).abs() / lhs.abs().max(rhs.abs());
    Ok(ContourCheck {
        lhs,
        rhs,
        rel_err,
        resonant,
    })
}

/// Zero-temperature form of the Matsubara route: the sum becomes
/// (hbar mu0/2 pi) int_0^inf xi^2 alpha(i xi) G(i xi) d xi.
pub fn zero_temperature_integral(
    green: &ScalarModelGreen,
    alpha: &ScalarModelGreen,
) -> Result<f64> {
    let scale = green
        .poles
        .iter()
        .chain(alpha.poles.iter())
        .map(|p| p.omega)
        .fold(0.0, f64::max);
    let mut pts: Vec<f64> = (0..=40).map(|k| scale * k as f64 / 10.0).collect();
    for k in 1..=20 {
        pts.push(scale * 4.0 * (10f64).powf(k as f64 / 4.0));
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (v, _) = quadrature::integrate_with_breakpoints(
        |xi: f64| xi * xi * alpha.eval_imag(xi) * green.eval_imag(xi),
        &pts,
        1e-11,
        0.0,
    )?;
    // analytic 1/xi^2 tail beyond the ladder
    let w_a: f64 = alpha.poles.iter().map(|p| p.weight).sum();
    let w_g: f64 = green.poles.iter().map(|p| p.weight).sum();
    let tail = w_a * w_g / pts.last().unwrap();
    Ok(HBAR * MU_0 / (2.0 * std::f64::consts::PI) * (v + tail))
}

/// Matsubara route alone (no resonant correction), for the T -> 0 check.
pub fn matsubara_route(
    green: &ScalarModelGreen,
    alpha: &ScalarModelGreen,
    temperature: f64,
) -> f64 {
    matsubara_sum(green, alpha, temperature)
}

// ---------------------------------------------------------------------------
// Detailed balance and local FDT
// ---------------------------------------------------------------------------

/// N(T_E)[N(T_S)+1] - [N(T_E)+1] N(T_S); algebraically N(T_E) - N(T_S).
pub fn detailed_balance_factor(omega: f64, t_env: f64, t_body: f64) -> Result<f64> {
    let n_e = photon_number(omega, t_env)?;
    let n_s = photon_number(omega, t_body)?;
    Ok(n_e * (n_s + 1.0) - (n_e + 1.0) * n_s)
}

/// Local polarization-operator pair from the body-side FDT:
/// Pi12 = -i (hbar eps0/2 pi) w^2 N(w,T_S) Im eps,
/// Pi21 = -i (hbar eps0/2 pi) w^2 [N(w,T_S)+1] Im eps.
pub fn polarization_pair(
    eps_im: f64,
    omega: f64,
    t_body: f64,
) -> Result<(Complex64, Complex64)> {
    if eps_im < 0.0 {
        return Err(Error::Domain("Im eps must be >= 0".into()));
    }
    if !(omega > 0.0) {
        return Err(Error::Domain("omega must be > 0".into()));
    }
    let n = photon_number(omega, t_body)?;
    let front = Complex64::new(0.0, -1.0) * HBAR * EPSILON_0 / (2.0 * std::f64::consts::PI)
        * omega
        * omega
        * eps_im;
    Ok((front * n, front * (n + 1.0)))
}

// ---------------------------------------------------------------------------
// Dense complex matrices (small N)
// ---------------------------------------------------------------------------

/// Row-major dense complex matrix, sized for desk-scale surrogate systems.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let mut pivot = col;
            for r in col + 1..n {
                if a.data[r * n + col].norm() > a.data[pivot * n + col].norm() {
                    pivot = r;
                }
            }
            if a.data[pivot * n + col].norm() < 1e-300 {
                return Err(Error::Domain("singular matrix".into()));
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(col * n + j, pivot * n + j);
                    inv.data.swap(col * n + j, pivot * n + j);
                }
            }
            let d = a.data[col * n + col];
            for j in 0..n {
                a.data[col * n + j] /= d;
                inv.data[col * n + j] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.data[r * n + col];
                if f.re == 0.0 && f.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = a.data[col * n + j];
                    a.data[r * n + j] -= f * v;
                    let w = inv.data[col * n + j];
                    inv.data[r * n + j] -= f * w;
                }
            }
        }
        Ok(inv)
    }

    /// (M - M^dag)/2i, the anti-hermitian part as a "matrix imaginary part".
    pub fn imag_part(&self) -> Self {
        self.sub(&self.adjoint())
            .scale(Complex64::new(0.0, -0.5))
    }

    /// Largest |eigenvalue| by power iteration (generic matrices).
    pub fn spectral_radius(&self) -> f64 {
        let n = self.n;
        let mut v: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 + 0.3 * i as f64, 0.7 - 0.1 * i as f64))
            .collect();
        let mut lambda = 0.0;
        for _ in 0..500 {
            let mut w = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..n {
                for j in 0..n {
                    w[i] += self.data[i * n + j] * v[j];
                }
            }
            let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            lambda = norm / v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v = w.iter().map(|c| c / norm).collect();
        }
        lambda
    }
}

// ---------------------------------------------------------------------------
// Discrete Keldysh system
// ---------------------------------------------------------------------------

/// Finite-dimensional surrogate of the kinetic equation's kernels, in units
/// where hbar = mu0 = 1.
#[derive(Debug, Clone)]
pub struct DiscreteKeldyshSystem {
    pub g0: CMatrix,
    pub pi12: CMatrix,
    pub pi21: CMatrix,
    pub pi_r: CMatrix,
    /// Environment Bose factor at the working frequency.
    pub n_env: f64,
}

/// Tiny deterministic PRNG (splitmix64) so seeded systems need no external
/// dependency.
struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [-1, 1).
    fn sym(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0
    }

    fn complex(&mut self) -> Complex64 {
        Complex64::new(self.sym(), self.sym())
    }
}

fn random_matrix(rng: &mut SplitMix64, n: usize) -> CMatrix {
    CMatrix::from_fn(n, |_, _| rng.complex())
}

fn hermitian(m: &CMatrix) -> CMatrix {
    m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0))
}

impl DiscreteKeldyshSystem {
    /// Random system with PiR - PiA = Pi12 - Pi21 enforced and the spectral
    /// radius of G0 PiR scaled to `radius`.
    pub fn seeded(n: usize, seed: u64, radius: f64, n_env: f64) -> Self {
        let mut rng = SplitMix64(seed.wrapping_mul(0xA24B_AED4_963E_E407).wrapping_add(1));
        let g0 = random_matrix(&mut rng, n);
        // anti-hermitian Pi12, Pi21: i * hermitian
        let i = Complex64::new(0.0, 1.0);
        let pi12 = hermitian(&random_matrix(&mut rng, n)).scale(i);
        let pi21 = hermitian(&random_matrix(&mut rng, n)).scale(i);
        let pi_r = hermitian(&random_matrix(&mut rng, n))
            .add(&pi12.sub(&pi21).scale(Complex64::new(0.5, 0.0)));
        Self::rescaled(g0, pi12, pi21, pi_r, radius, n_env)
    }

    /// Random equilibrium system: Pi12/Pi21 = n_bose/(n_bose+1) with a common
    /// positive-semidefinite hermitian profile (the discrete "Im eps >= 0").
    pub fn seeded_equilibrium(n: usize, seed: u64, radius: f64, n_bose: f64) -> Self {
        let mut rng = SplitMix64(seed.wrapping_mul(0xD6E8_FEB8_6659_FD93).wrapping_add(3));
        let g0 = random_matrix(&mut rng, n);
        let b = random_matrix(&mut rng, n);
        let p = b.adjoint().mul(&b); // positive semidefinite
        let i = Complex64::new(0.0, 1.0);
        let pi12 = p.scale(-i * n_bose);
        let pi21 = p.scale(-i * (n_bose + 1.0));
        let pi_r = hermitian(&random_matrix(&mut rng, n))
            .add(&pi12.sub(&pi21).scale(Complex64::new(0.5, 0.0)));
        Self::rescaled(g0, pi12, pi21, pi_r, radius, n_bose)
    }

    fn rescaled(
        g0: CMatrix,
        pi12: CMatrix,
        pi21: CMatrix,
        pi_r: CMatrix,
        radius: f64,
        n_env: f64,
    ) -> Self {
        let sr = g0.mul(&pi_r).spectral_radius();
        let s = Complex64::new(radius / sr.max(1e-300), 0.0);
        // scaling all polarization blocks together preserves
        // PiR - PiA = Pi12 - Pi21 and the detailed-balance ratio
        Self {
            g0,
            pi12: pi12.scale(s),
            pi21: pi21.scale(s),
            pi_r: pi_r.scale(s),
            n_env,
        }
    }

    pub fn pi_a(&self) -> CMatrix {
        self.pi_r.adjoint()
    }

    /// Max-norm of (PiR - PiA) - (Pi12 - Pi21); zero by construction.
    pub fn constraint_residual(&self) -> f64 {
        self.pi_r
            .sub(&self.pi_a())
            .sub(&self.pi12.sub(&self.pi21))
            .max_norm()
    }

    /// Free-field seed rho0 = -2i N_E Im G0.
    pub fn rho0(&self) -> CMatrix {
        self.g0
            .imag_part()
            .scale(Complex64::new(0.0, -2.0 * self.n_env))
    }

    /// Dressed propagator G = (1 - G0 PiR)^{-1} G0.
    pub fn dressed_green(&self) -> Result<CMatrix> {
        let n = self.g0.n;
        CMatrix::identity(n)
            .sub(&self.g0.mul(&self.pi_r))
            .inverse()
            .map(|inv| inv.mul(&self.g0))
    }

    /// Closed form -[2i N_E Im G + G (N_E Pi21 - (N_E+1) Pi12) G^dag].
    pub fn closed_form(&self) -> Result<CMatrix> {
        let g = self.dressed_green()?;
        let braces = self
            .pi21
            .scale(Complex64::new(self.n_env, 0.0))
            .sub(&self.pi12.scale(Complex64::new(self.n_env + 1.0, 0.0)));
        let first = g.imag_part().scale(Complex64::new(0.0, 2.0 * self.n_env));
        Ok(first
            .add(&g.mul(&braces).mul(&g.adjoint()))
            .scale(Complex64::new(-1.0, 0.0)))
    }

    /// Fixed-point iteration of the kinetic equation from rho0.
    pub fn iterate(&self, iterations: usize) -> Result<CMatrix> {
        let sr = self.g0.mul(&self.pi_r).spectral_radius();
        if sr >= 1.0 {
            return Err(Error::Domain(format!(
                "iteration diverges: spectral radius {sr:.3} >= 1"
            )));
        }
        let rho0 = self.rho0();
        let g_a = self.dressed_green()?.adjoint();
        let fixed = rho0
            .add(&rho0.mul(&self.pi_a()).mul(&g_a))
            .add(&self.g0.mul(&self.pi12).mul(&g_a));
        let m = self.g0.mul(&self.pi_r);
        let mut rho = rho0;
        for _ in 0..iterations {
            rho = fixed.add(&m.mul(&rho));
        }
        Ok(rho)
    }
}

/// Max-norm relative error between the iterated fixed point and the closed
/// form.
pub fn born_series_fixpoint_check(
    system: &DiscreteKeldyshSystem,
    iterations: usize,
) -> Result<f64> {
    let fixed = system.iterate(iterations)?;
    let closed = system.closed_form()?;
    let scale = closed.max_norm().max(1e-300);
    Ok(fixed.sub(&closed).max_norm() / scale)
}

/// Max-norm relative deviation of the equilibrium fixed point from the FDT
/// form -2i N Im G.
pub fn equilibrium_fdt_residual(
    system: &DiscreteKeldyshSystem,
    iterations: usize,
) -> Result<f64> {
    let fixed = system.iterate(iterations)?;
    let g = system.dressed_green()?;
    let fdt = g
        .imag_part()
        .scale(Complex64::new(0.0, -2.0 * system.n_env));
    let scale = fdt.max_norm().max(1e-300);
    Ok(fixed.sub(&fdt).max_norm() / scale)
}

// ---------------------------------------------------------------------------
// Standard verification battery
// ---------------------------------------------------------------------------

/// One named check of the battery behind the `verify` command.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    /// Worst error observed across the check's sample set.
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &str, error: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            error,
            tolerance,
            passed: error <= tolerance,
        }
    }
}

/// The full desk-scale battery: contour rotation on a pole/damping/temperature
/// grid, Born-series fixed points, equilibrium FDT recovery, the
/// detailed-balance identity and the local polarization-operator ratio.
pub fn standard_battery() -> Vec<CheckOutcome> {
    let mut out = Vec::new();

    // 1. contour rotation across pole frequency x damping x temperature
    let mut worst: f64 = 0.0;
    for &omega0 in &[1.4e12, 2.79e12, 8.0e12] {
        for &q in &[1e-3, 1e-2, 1e-1] {
            for &t in &[10.0, 300.0, 1000.0] {
                let g = ScalarModelGreen::new(vec![ModelPole {
                    omega: omega0,
                    gamma: q * omega0,
                    weight: 1.0,
                }])
                .unwrap();
                let a = ScalarModelGreen::new(vec![ModelPole {
                    omega: 1.7 * omega0,
                    gamma: 1.3 * q * omega0,
                    weight: 0.8,
                }])
                .unwrap();
                match contour_rotation_check(&g, &a, t) {
                    Ok(c) => worst = worst.max(c.rel_err),
                    Err(_) => worst = f64::INFINITY,
                }
            }
        }
    }
    out.push(CheckOutcome::new("contour_rotation", worst, 1e-6));

    // 2. Born-series fixed point vs closed form, 50 random systems
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let radius = 0.2 + 0.6 * (seed as f64 / 49.0);
        let sys = DiscreteKeldyshSystem::seeded(4, seed, radius, 0.3 + 0.1 * seed as f64);
        match born_series_fixpoint_check(&sys, 600) {
            Ok(e) => worst = worst.max(e),
            Err(_) => worst = f64::INFINITY,
        }
    }
    out.push(CheckOutcome::new("born_series_fixed_point", worst, 1e-10));

    // 3. equilibrium FDT recovery, 10 random systems
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let sys = DiscreteKeldyshSystem::seeded_equilibrium(4, 1000 + seed, 0.6, 0.4 + 0.3 * seed as f64);
        match equilibrium_fdt_residual(&sys, 600) {
            Ok(e) => worst = worst.max(e),
            Err(_) => worst = f64::INFINITY,
        }
    }
    out.push(CheckOutcome::new("equilibrium_fdt_recovery", worst, 1e-10));

    // 4. detailed balance factor = N(T_E) - N(T_S), 100 random samples
    let mut rng = SplitMix64(0xDB);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let omega = 1e12 * 10f64.powf(1.5 * (rng.sym() + 1.0) * 0.5);
        let t_env = 20.0 + 480.0 * (rng.sym() + 1.0) * 0.5;
        let t_body = 20.0 + 480.0 * (rng.sym() + 1.0) * 0.5;
        let lhs = detailed_balance_factor(omega, t_env, t_body).unwrap();
        let n_e = photon_number(omega, t_env).unwrap();
        let n_s = photon_number(omega, t_body).unwrap();
        let scale = n_e.abs().max(n_s.abs()).max(1e-300);
        worst = worst.max((lhs - (n_e - n_s)).abs() / scale);
    }
    // exact zero at equal temperatures
    let z = detailed_balance_factor(2.79e12, 300.0, 300.0).unwrap();
    worst = worst.max(z.abs());
    out.push(CheckOutcome::new("detailed_balance", worst, 1e-12));

    // 5. local FDT pair ratio Pi12/Pi21 = N/(N+1)
    let mut rng = SplitMix64(0xFD7);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let omega = 1e12 * (1.0 + 9.0 * (rng.sym() + 1.0) * 0.5);
        let t_body = 5.0 + 600.0 * (rng.sym() + 1.0) * 0.5;
        let eps_im = (rng.sym() + 1.0) * 0.5;
        let (p12, p21) = polarization_pair(eps_im, omega, t_body).unwrap();
        if p21.norm() == 0.0 {
            continue;
        }
        let n = photon_number(omega, t_body).unwrap();
        let ratio = p12 / p21;
        worst = worst.max((ratio - n / (n + 1.0)).norm());
    }
    out.push(CheckOutcome::new("polarization_fdt_ratio", worst, 1e-14));

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn matrix_inverse_round_trip() {
        let mut rng = SplitMix64(42);
        let m = random_matrix(&mut rng, 5);
        let inv = m.inverse().unwrap();
        let eye = m.mul(&inv);
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((eye.get(i, j) - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn constraint_holds_by_construction() {
        for seed in 0..20 {
            let sys = DiscreteKeldyshSystem::seeded(4, seed, 0.5, 2.3);
            assert!(sys.constraint_residual() < 1e-14 * sys.pi_r.max_norm().max(1.0));
        }
    }

    #[test]
    fn free_field_is_a_fixed_point_when_interactions_vanish() {
        let mut sys = DiscreteKeldyshSystem::seeded(4, 7, 0.5, 1.7);
        sys.pi12 = CMatrix::zeros(4);
        sys.pi21 = CMatrix::zeros(4);
        sys.pi_r = CMatrix::zeros(4);
        let rho = sys.iterate(50).unwrap();
        let rho0 = sys.rho0();
        assert!(rho.sub(&rho0).max_norm() < 1e-15 * rho0.max_norm());
    }

    #[test]
    fn fixed_point_matches_closed_form() {
        let sys = DiscreteKeldyshSystem::seeded(4, 1234, 0.5, 0.8);
        let err = born_series_fixpoint_check(&sys, 200).unwrap();
        assert!(err < 1e-10, "relative error {err}");
    }

    #[test]
    fn divergent_radius_rejected() {
        let sys = DiscreteKeldyshSystem::seeded(4, 5, 1.3, 0.8);
        assert!(sys.iterate(10).is_err());
    }

    #[test]
    fn equilibrium_recovers_fdt() {
        let sys = DiscreteKeldyshSystem::seeded_equilibrium(4, 99, 0.6, 1.9);
        let res = equilibrium_fdt_residual(&sys, 300).unwrap();
        assert!(res < 1e-10, "FDT residual {res}");
    }

    #[test]
    fn detailed_balance_examples() {
        let omega = 2.79e12;
        assert_eq!(detailed_balance_factor(omega, 300.0, 300.0).unwrap(), 0.0);
        assert!(detailed_balance_factor(omega, 310.0, 300.0).unwrap() > 0.0);
        let lhs = detailed_balance_factor(omega, 300.0, 310.0).unwrap();
        let rhs = photon_number(omega, 300.0).unwrap() - photon_number(omega, 310.0).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn polarization_pair_ratio() {
        let (p12, p21) = polarization_pair(0.3, 2.0e13, 450.0).unwrap();
        let n = photon_number(2.0e13, 450.0).unwrap();
        let ratio = p12 / p21;
        assert_relative_eq!(ratio.re, n / (n + 1.0), max_relative = 1e-14);
        assert!(ratio.im.abs() < 1e-16);
        // T -> 0: Pi12 -> 0, Pi21 proportional to Im eps
        let (p12, p21) = polarization_pair(0.3, 2.0e13, 1e-3).unwrap();
        assert_eq!(p12, Complex64::new(0.0, 0.0));
        assert!(p21.norm() > 0.0);
        // Im eps = 0: both vanish
        let (p12, p21) = polarization_pair(0.0, 2.0e13, 450.0).unwrap();
        assert_eq!(p12.norm(), 0.0);
        assert_eq!(p21.norm(), 0.0);
    }

    #[test]
    fn scalar_model_symmetries() {
        let g = ScalarModelGreen::new(vec![ModelPole {
            omega: 3e12,
            gamma: 2e10,
            weight: 1.0,
        }])
        .unwrap();
        for &w in &[1e11, 2.9e12, 8e13] {
            let plus = g.eval_real(w);
            let minus = g.eval_real(-w);
            assert!((plus.conj() - minus).norm() < 1e-15 * plus.norm());
        }
        assert!(g.eval_imag(5e12) > 0.0);
    }

    #[test]
    fn contour_rotation_single_pole() {
        let g = ScalarModelGreen::new(vec![ModelPole {
            omega: 2.79e12,
            gamma: 2.79e10,
            weight: 1.0,
        }])
        .unwrap();
        let a = ScalarModelGreen::new(vec![ModelPole {
            omega: 5.0e12,
            gamma: 5.0e10,
            weight: 1.0,
        }])
        .unwrap();
        let check = contour_rotation_check(&g, &a, 300.0).unwrap();
        assert!(
            check.rel_err < 1e-6,
            "lhs {} vs rhs {} (rel {})",
            check.lhs,
            check.rhs,
            check.rel_err
        );
    }

    #[test]
    fn bose_suppressed_resonant_correction() {
        // alpha pole far above 100 kB T/hbar: the resonant correction is
        // negligible relative to the total
        let t = 30.0;
        let cut = 100.0 * K_B * t / HBAR;
        let g = ScalarModelGreen::new(vec![ModelPole {
            omega: 2.0 * cut,
            gamma: 0.02 * cut,
            weight: 1.0,
        }])
        .unwrap();
        let a = ScalarModelGreen::new(vec![ModelPole {
            omega: 3.0 * cut,
            gamma: 0.03 * cut,
            weight: 1.0,
        }])
        .unwrap();
        let check = contour_rotation_check(&g, &a, t).unwrap();
        assert!(check.resonant.abs() < 1e-10 * check.lhs.abs());
    }

    #[test]
    fn zero_temperature_limit_of_matsubara_sum() {
        let g = ScalarModelGreen::new(vec![ModelPole {
            omega: 2.79e12,
            gamma: 2.79e10,
            weight: 1.0,
        }])
        .unwrap();
        let a = ScalarModelGreen::new(vec![ModelPole {
            omega: 4.0e12,
            gamma: 8.0e10,
            weight: 0.7,
        }])
        .unwrap();
        let sum = matsubara_route(&g, &a, 0.05);
        let integral = zero_temperature_integral(&g, &a).unwrap();
        assert_relative_eq!(sum, integral, max_relative = 1e-8);
    }
}

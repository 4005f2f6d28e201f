//! Cylinder functions of integer order for complex arguments.
//!
//! Provides J_n, Y_n, H1_n = J_n + i Y_n and their derivatives on the closed
//! upper half-plane, the positive real zeros of J_n and J_n', and the ratio
//! and log-scaled entry points the cylindrical geometry needs when raw values
//! would overflow (J_n of a large imaginary argument grows like e^{|Im z|}).
//!
//! Algorithm selection:
//! - |z| < 2: ascending series for J_n and Y_n.
//! - |z| >= 2: Miller downward recurrence for J_n, normalized with
//!   e^{-iz} = J_0 + 2 sum_n (-i)^n J_n (valid for any complex z and free of
//!   the exponential cancellation the classical even-order normalization
//!   suffers on the imaginary axis); H1_0'/H1_0 from a continued fraction,
//!   absolute normalization from the Wronskian, then upward recurrence.
//!
//! All sequence evaluations carry values as (mantissa, log-scale) pairs so
//! that downstream products like H1_n(x) J_n^2(phi x) / J_n(x) can combine
//! exponents analytically and never overflow.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// |Im z| limit for raw-value entry points. Beyond this, unscaled values leave
/// the representable range once multiplied together; callers must switch to
/// the ratio or log-scaled API.
pub const OVERFLOW_GUARD: f64 = 600.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_RADIUS: f64 = 2.0;

/// One evaluation of J, J', H1, H1' at a common order and argument.
#[derive(Debug, Clone, Copy)]
pub struct BesselEval {
    pub order: u32,
    pub argument: Complex64,
    pub j: Complex64,
    pub jp: Complex64,
    pub h1: Complex64,
    pub h1p: Complex64,
}

/// A complex value stored as `mantissa * exp(log_scale)` with |mantissa| = 1
/// (or mantissa = 0 for the zero value).
#[derive(Debug, Clone, Copy)]
pub struct LogScaled {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl LogScaled {
    pub fn zero() -> Self {
        Self {
            mantissa: Complex64::new(0.0, 0.0),
            log_scale: f64::NEG_INFINITY,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn new(mantissa: Complex64, log_scale: f64) -> Self {
        if mantissa.re == 0.0 && mantissa.im == 0.0 {
            return Self::zero();
        }
        // keep the mantissa unnormalized while it stays in a comfortable
        // range; renormalization costs a sqrt and only matters near the
        // representable limits
        let nsq = mantissa.norm_sqr();
        if (1e-80..=1e80).contains(&nsq) {
            return Self {
                mantissa,
                log_scale,
            };
        }
        // norm_sqr can overflow for mantissa magnitudes ~1e160 that are
        // themselves representable; hypot handles those
        let a = if nsq.is_finite() {
            nsq.sqrt()
        } else {
            mantissa.norm()
        };
        if !a.is_finite() || a == 0.0 {
            return Self {
                mantissa,
                log_scale: if a == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                },
            };
        }
        Self {
            mantissa: mantissa / a,
            log_scale: log_scale + a.ln(),
        }
    }

    pub fn from_complex(v: Complex64) -> Self {
        Self::new(v, 0.0)
    }

    /// Materialize the value; saturates to 0 below the f64 range and to an
    /// infinite complex above it.
    pub fn value(&self) -> Complex64 {
        if self.is_zero() || self.log_scale < -745.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.mantissa * self.log_scale.exp()
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self::new(self.mantissa * rhs.mantissa, self.log_scale + rhs.log_scale)
    }

    pub fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by log-scaled zero");
        if self.is_zero() {
            return Self::zero();
        }
        Self::new(self.mantissa / rhs.mantissa, self.log_scale - rhs.log_scale)
    }

    pub fn mul_complex(&self, c: Complex64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::new(self.mantissa * c, self.log_scale)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return *rhs;
        }
        if rhs.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.log_scale >= rhs.log_scale {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = lo.log_scale - hi.log_scale;
        if shift < -745.0 {
            return *hi;
        }
        Self::new(hi.mantissa + lo.mantissa * shift.exp(), hi.log_scale)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.mul_complex(Complex64::new(-1.0, 0.0)))
    }

    /// Ratio as a plain complex number (log scales largely cancel).
    pub fn ratio(&self, rhs: &Self) -> Complex64 {
        self.div(rhs).value()
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// psi(m) for positive integer m.
fn digamma_int(m: usize) -> f64 {
    harmonic(m - 1) - EULER_GAMMA
}

// ---------------------------------------------------------------------------
// Ascending series (|z| < SERIES_RADIUS)
// ---------------------------------------------------------------------------

fn series_j(n: usize, z: Complex64) -> LogScaled {
    if z.re == 0.0 && z.im == 0.0 {
        return if n == 0 {
            LogScaled::from_complex(Complex64::new(1.0, 0.0))
        } else {
            LogScaled::zero()
        };
    }
    let w = z * 0.5;
    let q = -w * w; // series runs in powers of -z^2/4
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..60 {
        term = term * q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    let log = n as f64 * w.norm().ln() - ln_factorial(n);
    let phase = Complex64::from_polar(1.0, n as f64 * w.arg());
    LogScaled::new(phase * sum, log)
}

fn series_y(n: usize, z: Complex64) -> LogScaled {
    let w = z * 0.5;
    let q = w * w;

    // -(z/2)^{-n}/pi * sum_{k<n} (n-k-1)!/k! * (z^2/4)^k
    let mut finite_part = LogScaled::zero();
    if n >= 1 {
        let mut term = Complex64::new(1.0, 0.0); // k = 0 term / (n-1)!
        let mut sum = term;
        for k in 1..n {
            term = term * q / (k as f64 * (n - k) as f64);
            sum += term;
        }
        let log = ln_factorial(n - 1) - n as f64 * w.norm().ln();
        let phase = Complex64::from_polar(1.0, -(n as f64) * w.arg());
        finite_part = LogScaled::new(-phase * sum / std::f64::consts::PI, log);
    }

    // (2/pi) ln(z/2) J_n(z)
    let log_term = series_j(n, z).mul_complex(w.ln() * 2.0 / std::f64::consts::PI);

    // -(z/2)^n/pi * sum_k (psi(k+1)+psi(n+k+1)) (-z^2/4)^k / (k! (n+k)!)
    let mut p = Complex64::new(1.0, 0.0); // (-q)^k / (k! (n+k)!/n!)
    let mut sum = p * (digamma_int(1) + digamma_int(n + 1));
    for k in 1..60 {
        p = p * (-q) / (k as f64 * (n + k) as f64);
        let term = p * (digamma_int(k + 1) + digamma_int(n + k + 1));
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    let log = n as f64 * w.norm().ln() - ln_factorial(n);
    let phase = Complex64::from_polar(1.0, n as f64 * w.arg());
    let psi_part = LogScaled::new(-phase * sum / std::f64::consts::PI, log);

    finite_part.add(&log_term).add(&psi_part)
}

// ---------------------------------------------------------------------------
// Miller recurrence and continued fractions (|z| >= SERIES_RADIUS)
// ---------------------------------------------------------------------------

fn miller_start_order(n_needed: usize, z_abs: f64) -> usize {
    let base = n_needed.max(z_abs.ceil() as usize);
    base + 16 + (40.0 * (base as f64 + 1.0)).sqrt().ceil() as usize
}

/// True J_n(z) for n = 0..=n_max as log-scaled values. Requires Im z >= 0.
fn miller_j_seq(z: Complex64, n_max: usize) -> Vec<LogScaled> {
    let n_start = miller_start_order(n_max + 1, z.norm());
    let mut stored: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n_start + 1];
    let mut log_off: Vec<f64> = vec![0.0; n_start + 1];

    let mut above = Complex64::new(0.0, 0.0); // J_{m+1} (unnormalized)
    let mut cur = Complex64::new(1e-30, 0.0); // J_m
    let mut ell = 0.0;
    stored[n_start] = cur;
    for m in (1..=n_start).rev() {
        let below = cur * (2.0 * m as f64) / z - above;
        above = cur;
        cur = below;
        let a = cur.norm();
        if a > 1e250 {
            cur /= a;
            above /= a;
            ell += a.ln();
        }
        stored[m - 1] = cur;
        log_off[m - 1] = ell;
    }

    // Normalization: e^{-iz} = J_0 + 2 sum_{n>=1} (-i)^n J_n.
    let ell_max = log_off.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut s = Complex64::new(0.0, 0.0);
    let powers = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    for m in 0..=n_start {
        let shift = log_off[m] - ell_max;
        if shift < -700.0 {
            continue;
        }
        let weight = if m == 0 { 1.0 } else { 2.0 };
        s += stored[m] * powers[m % 4] * weight * shift.exp();
    }
    // true J_n = stored[n] e^{log_off[n]} * e^{-iz} / (s e^{ell_max})
    let s_norm = s.norm();
    let s_phase = s / s_norm;
    let phase = Complex64::from_polar(1.0, -z.re); // e^{-i Re z}
    (0..=n_max)
        .map(|m| {
            LogScaled::new(
                stored[m] * phase / s_phase,
                log_off[m] - ell_max - s_norm.ln() + z.im,
            )
        })
        .collect()
}

/// Continued fraction for H1_nu'(z)/H1_nu(z); converges for Im z >= 0 away
/// from the origin.
fn cf2_h1_ratio(nu: f64, z: Complex64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let tiny = Complex64::new(1e-100, 0.0);
    let mut f = tiny;
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..200_000 {
        let kf = k as f64;
        let a = Complex64::new((kf - 0.5) * (kf - 0.5) - nu * nu, 0.0);
        let b = 2.0 * (z + i * kf);
        d = b + a * d;
        if d.norm() < 1e-100 {
            d = tiny;
        }
        c = b + a / c;
        if c.norm() < 1e-100 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    i - 0.5 / z + i * f / z
}

/// Continued fraction for J_{n+1}(z)/J_n(z) (Lentz; converges for any z != 0).
fn cf1_j_ratio(n: usize, z: Complex64) -> Complex64 {
    let tiny = Complex64::new(1e-100, 0.0);
    let mut f = tiny;
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for k in 1..400_000 {
        let a = if k == 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        };
        let b = 2.0 * (n + k) as f64 / z;
        d = b + a * d;
        if d.norm() < 1e-100 {
            d = tiny;
        }
        c = b + a / c;
        if c.norm() < 1e-100 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    f
}

// ---------------------------------------------------------------------------
// Sequence evaluation
// ---------------------------------------------------------------------------

/// J_n, J_n', H1_n, H1_n' for n = 0..=n_max in log-scaled form.
#[derive(Debug, Clone)]
pub struct CylinderSeq {
    pub z: Complex64,
    pub j: Vec<LogScaled>,
    pub jp: Vec<LogScaled>,
    pub h1: Vec<LogScaled>,
    pub h1p: Vec<LogScaled>,
}

fn derivative_seq(z: Complex64, vals: &[LogScaled]) -> Vec<LogScaled> {
    let n_max = vals.len() - 1;
    let mut out = Vec::with_capacity(vals.len());
    // C_0' = -C_1
    out.push(vals[1].mul_complex(Complex64::new(-1.0, 0.0)));
    for n in 1..=n_max {
        // C_n' = C_{n-1} - (n/z) C_n
        out.push(vals[n - 1].sub(&vals[n].mul_complex(n as f64 / z)));
    }
    out
}

/// True J_n(z) for n = 0..=n_max (log-scaled). Requires Im z >= 0.
pub fn j_seq(z: Complex64, n_max: usize) -> Result<Vec<LogScaled>> {
    check_upper_half(z)?;
    let want = n_max.max(1) + 1; // one extra order for derivatives
    let seq = if z.norm() < SERIES_RADIUS {
        (0..=want).map(|n| series_j(n, z)).collect()
    } else {
        miller_j_seq(z, want)
    };
    Ok(seq)
}

/// Full J/H sequence with derivatives. Requires Im z >= 0 and z != 0.
pub fn cylinder_seq(z: Complex64, n_max: usize) -> Result<CylinderSeq> {
    check_upper_half(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("cylinder_seq requires z != 0".into()));
    }
    let want = n_max.max(1) + 1;
    let j = j_seq(z, want)?;

    let h1: Vec<LogScaled> = if z.norm() < SERIES_RADIUS {
        let i = Complex64::new(0.0, 1.0);
        (0..=want)
            .map(|n| j[n].add(&series_y(n, z).mul_complex(i)))
            .collect()
    } else {
        // H1_0 from the CF2 ratio and the Wronskian
        // J_0 H1_0' - J_0' H1_0 = 2i/(pi z), with H1_0' = r0 H1_0:
        let r0 = cf2_h1_ratio(0.0, z);
        let jp0 = j[1].mul_complex(Complex64::new(-1.0, 0.0));
        let denom = j[0].mul_complex(r0).sub(&jp0);
        let lead = LogScaled::from_complex(
            Complex64::new(0.0, 2.0) / (std::f64::consts::PI * z),
        );
        let h0 = lead.div(&denom);
        let h1v = h0.mul_complex(-r0); // H1_1 = -H1_0'
        let mut out = Vec::with_capacity(want + 1);
        out.push(h0);
        out.push(h1v);
        // upward recurrence with running rescale
        let ell = h0.log_scale.max(h1v.log_scale);
        let mut prev = h0.mantissa * (h0.log_scale - ell).exp();
        let mut cur = h1v.mantissa * (h1v.log_scale - ell).exp();
        let mut ell_run = ell;
        for n in 1..want {
            let next = cur * (2.0 * n as f64) / z - prev;
            prev = cur;
            cur = next;
            let a = cur.norm();
            if a > 1e50 {
                cur /= a;
                prev /= a;
                ell_run += a.ln();
            }
            out.push(LogScaled::new(cur, ell_run));
        }
        out
    };

    let jp = derivative_seq(z, &j);
    let h1p = derivative_seq(z, &h1);
    Ok(CylinderSeq { z, j, jp, h1, h1p })
}

/// Logarithmic-derivative pair (J_n'/J_n, H1_n'/H1_n) for n = 0..=n_max.
///
/// Stable for arbitrarily large |Im z| (only ratios are formed); this is the
/// entry point the cylindrical reflection algebra uses on the medium side of
/// the interface where raw values overflow.
pub fn ratio_seq(z: Complex64, n_max: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    check_upper_half(z)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("ratio_seq requires z != 0".into()));
    }
    if z.norm() < SERIES_RADIUS {
        let seq = cylinder_seq(z, n_max)?;
        let jr = (0..=n_max).map(|n| seq.jp[n].ratio(&seq.j[n])).collect();
        let hr = (0..=n_max).map(|n| seq.h1p[n].ratio(&seq.h1[n])).collect();
        return Ok((jr, hr));
    }

    // J ratios: CF1 at the top order, then downward
    //   J_n'/J_n = n/z - J_{n+1}/J_n,  J_n/J_{n-1} = 1/(2n/z - J_{n+1}/J_n).
    let mut jr = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let mut r = cf1_j_ratio(n_max, z); // J_{n_max+1}/J_{n_max}
    jr[n_max] = n_max as f64 / z - r;
    for n in (0..n_max).rev() {
        // r becomes J_{n+1}/J_n
        r = 1.0 / (2.0 * (n + 1) as f64 / z - r);
        jr[n] = n as f64 / z - r;
    }

    // H ratios: CF2 at order zero, then upward on rho_n = H_{n+1}/H_n.
    let mut hr = vec![Complex64::new(0.0, 0.0); n_max + 1];
    let h0_ratio = cf2_h1_ratio(0.0, z);
    hr[0] = h0_ratio;
    let mut rho = -h0_ratio; // H_1/H_0 = -H_0'/H_0
    for n in 1..=n_max {
        // rho_n = H_{n+1}/H_n = 2n/z - 1/rho_{n-1}
        rho = 2.0 * n as f64 / z - 1.0 / rho;
        hr[n] = n as f64 / z - rho;
    }
    Ok((jr, hr))
}

fn check_upper_half(z: Complex64) -> Result<()> {
    if z.im < -1e-14 * z.norm().max(1.0) {
        return Err(Error::Domain(format!(
            "argument {z} lies below the real axis; evaluate at the conjugate and reflect"
        )));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain("non-finite argument".into()));
    }
    Ok(())
}

fn check_raw_guard(z: Complex64) -> Result<()> {
    if z.im.abs() > OVERFLOW_GUARD {
        return Err(Error::BesselOverflowDomain {
            im_abs: z.im.abs(),
            guard: OVERFLOW_GUARD,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Raw-value API
// ---------------------------------------------------------------------------

/// All four values at one order.
pub fn bessel_eval(n: u32, z: Complex64) -> Result<BesselEval> {
    check_raw_guard(z)?;
    let seq = cylinder_seq(z, n as usize)?;
    let n = n as usize;
    Ok(BesselEval {
        order: n as u32,
        argument: z,
        j: seq.j[n].value(),
        jp: seq.jp[n].value(),
        h1: seq.h1[n].value(),
        h1p: seq.h1p[n].value(),
    })
}

/// J_n(z).
pub fn bessel_j(n: u32, z: Complex64) -> Result<Complex64> {
    check_raw_guard(z)?;
    if z.norm() == 0.0 {
        return Ok(if n == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        });
    }
    Ok(j_seq(z, n as usize)?[n as usize].value())
}

/// d/dz J_n(z).
pub fn bessel_j_prime(n: u32, z: Complex64) -> Result<Complex64> {
    check_raw_guard(z)?;
    if z.norm() == 0.0 {
        return Ok(match n {
            1 => Complex64::new(0.5, 0.0),
            _ => Complex64::new(0.0, 0.0),
        });
    }
    let seq = j_seq(z, n as usize + 1)?;
    let n = n as usize;
    Ok(if n == 0 {
        -seq[1].value()
    } else {
        seq[n - 1].sub(&seq[n].mul_complex(n as f64 / z)).value()
    })
}

/// H^(1)_n(z).
pub fn hankel1(n: u32, z: Complex64) -> Result<Complex64> {
    Ok(bessel_eval(n, z)?.h1)
}

/// d/dz H^(1)_n(z).
pub fn hankel1_prime(n: u32, z: Complex64) -> Result<Complex64> {
    Ok(bessel_eval(n, z)?.h1p)
}

/// Y_n(z) = (H1_n - J_n)/i.
pub fn bessel_y(n: u32, z: Complex64) -> Result<Complex64> {
    let e = bessel_eval(n, z)?;
    Ok((e.h1 - e.j) / Complex64::new(0.0, 1.0))
}

/// J_n'(z)/J_n(z); stable for any |Im z|.
pub fn j_ratio(n: u32, z: Complex64) -> Result<Complex64> {
    Ok(ratio_seq(z, n as usize)?.0[n as usize])
}

/// H1_n'(z)/H1_n(z); stable for any |Im z| (upper half-plane).
pub fn h1_ratio(n: u32, z: Complex64) -> Result<Complex64> {
    Ok(ratio_seq(z, n as usize)?.1[n as usize])
}

// ---------------------------------------------------------------------------
// Zeros
// ---------------------------------------------------------------------------

fn j_real(n: u32, x: f64) -> f64 {
    bessel_j(n, Complex64::new(x, 0.0)).expect("real J evaluation").re
}

fn jp_real(n: u32, x: f64) -> f64 {
    bessel_j_prime(n, Complex64::new(x, 0.0))
        .expect("real J' evaluation")
        .re
}

/// i-th positive zero of J_n (or of J_n' with `prime`), refined to ~1e-14
/// relative. For J_0' the trivial zero at x = 0 is excluded, so the zeros
/// coincide with those of J_1.
///
/// Panics if `i == 0`.
pub fn bessel_zero(n: u32, i: u32, prime: bool) -> f64 {
    assert!(i >= 1, "zero index is 1-based");
    let f: Box<dyn Fn(f64) -> f64> = if prime {
        Box::new(move |x| jp_real(n, x))
    } else {
        Box::new(move |x| j_real(n, x))
    };

    // Zeros of J_n and J_n' (n >= 1) all exceed ~n/2; step well below the
    // asymptotic pi spacing so none is skipped.
    let mut x = 0.05f64.max(0.5 * n as f64);
    let step = 0.2;
    let mut found = 0;
    let mut f_prev = f(x);
    // skip a leading exact zero (J_n'(x) ~ x^{n-1} starts at 0 in f64 for large n)
    while f_prev == 0.0 {
        x += step;
        f_prev = f(x);
    }
    loop {
        let x_next = x + step;
        let f_next = f(x_next);
        if f_prev == 0.0 || f_prev.signum() != f_next.signum() {
            found += 1;
            if found == i {
                // bisection
                let (mut a, mut b) = (x, x_next);
                let mut fa = f_prev;
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let fm = f(m);
                    if fm == 0.0 {
                        return m;
                    }
                    if fa.signum() == fm.signum() {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                return 0.5 * (a + b);
            }
        }
        x = x_next;
        f_prev = f_next;
        assert!(
            x < 1e5,
            "zero search for (n={n}, i={i}, prime={prime}) ran away"
        );
    }
}

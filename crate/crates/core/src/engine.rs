//! Assembles the thermal Casimir-Polder potential and force over position
//! scans, for any geometry backend.
//!
//! The potential has a non-resonant Matsubara part and a resonant
//! photon-absorption part,
//!
//! ```text
//! U_nr  = mu0 kB T sum'_m xi_m^2 alpha(i xi_m) Tr G1(i xi_m)
//! U_res = (mu0/3) sum_k |d_0k|^2 omega_k^2 N(omega_k, T) Re Tr G1(omega_k)
//! ```
//!
//! The m = 0 term carries half-weight; since the geometry traces diverge like
//! 1/xi^2 there, the backends provide the finite weighted limit
//! xi^2 Tr G1(i xi) -> Z directly and the engine adds alpha(0) Z / 2. The
//! Matsubara cutoff starts from the decay scales of alpha(i xi) and
//! e^{-2 xi z / c} and doubles until the sum is stable to 1e-8 relative.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cylinder::{self, CylinderConfig};
use crate::error::{Error, Result};
use crate::molecule::{matsubara_frequency, photon_number, MoleculeSpec, ThermalContext};
use crate::planar::{self, PlanarConfig};
use crate::units::{C, HBAR, K_B, MU_0};

const MATSUBARA_REL_TOL: f64 = 1e-8;

/// Resonant-term trace with the planar propagating/evanescent split when the
/// geometry provides one.
#[derive(Debug, Clone, Copy)]
pub struct ResonantTrace {
    pub total: Complex64,
    /// (propagating, evanescent), planar geometries only.
    pub split: Option<(Complex64, Complex64)>,
}

/// A geometry's Green-trace surface as seen by the engine.
pub trait GreenBackend: Sync {
    /// Tr G1(i xi) at xi > 0.
    fn trace_imag(&self, xi: f64, position: f64) -> Result<f64>;
    /// lim_{xi->0} xi^2 Tr G1(i xi).
    fn zero_frequency_limit(&self, position: f64) -> Result<f64>;
    /// Tr G1(omega) at real omega > 0.
    fn trace_real(&self, omega: f64, position: f64) -> Result<ResonantTrace>;
    fn check_position(&self, position: f64) -> Result<()>;
    /// Whether [`ResonantTrace::split`] is populated.
    fn splits_resonant(&self) -> bool;
}

/// Half-space / cavity backend; the scan coordinate is the wall distance z.
#[derive(Debug, Clone, Copy)]
pub struct PlanarBackend {
    pub template: PlanarConfig,
}

impl PlanarBackend {
    pub fn new(template: PlanarConfig) -> Self {
        Self { template }
    }
}

impl GreenBackend for PlanarBackend {
    fn trace_imag(&self, xi: f64, position: f64) -> Result<f64> {
        planar::trace_imag(&self.template.at(position), xi)
    }

    fn zero_frequency_limit(&self, position: f64) -> Result<f64> {
        planar::zero_frequency_limit(&self.template.at(position))
    }

    fn trace_real(&self, omega: f64, position: f64) -> Result<ResonantTrace> {
        let split = planar::trace_real(&self.template.at(position), omega)?;
        Ok(ResonantTrace {
            total: split.total,
            split: Some((split.propagating, split.evanescent)),
        })
    }

    fn check_position(&self, position: f64) -> Result<()> {
        // reuse the config validation through a cheap call path
        let cfg = self.template.at(position);
        match cfg.geometry {
            planar::PlanarGeometry::HalfSpace if position > 0.0 => Ok(()),
            planar::PlanarGeometry::Cavity { width } if position > 0.0 && position < width => {
                Ok(())
            }
            _ => Err(Error::Domain(format!(
                "position {position} outside the geometry's valid domain"
            ))),
        }
    }

    fn splits_resonant(&self) -> bool {
        true
    }
}

/// Cylindrical-cavity backend; the scan coordinate is the radial position
/// rho (m) with rho/R < 1.
#[derive(Debug, Clone, Copy)]
pub struct CylinderBackend {
    pub template: CylinderConfig,
}

impl CylinderBackend {
    pub fn new(template: CylinderConfig) -> Self {
        Self { template }
    }

    fn at(&self, rho: f64) -> CylinderConfig {
        self.template.at_phi(rho / self.template.radius)
    }
}

impl GreenBackend for CylinderBackend {
    fn trace_imag(&self, xi: f64, position: f64) -> Result<f64> {
        cylinder::cylinder_trace_imag(&self.at(position), xi, 1)
    }

    fn zero_frequency_limit(&self, position: f64) -> Result<f64> {
        cylinder::cylinder_zero_frequency_limit(&self.at(position))
    }

    fn trace_real(&self, omega: f64, position: f64) -> Result<ResonantTrace> {
        Ok(ResonantTrace {
            total: cylinder::cylinder_trace(&self.at(position), omega)?,
            split: None,
        })
    }

    fn check_position(&self, position: f64) -> Result<()> {
        if position >= 0.0 && position < self.template.radius {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "rho = {position} outside [0, R = {})",
                self.template.radius
            )))
        }
    }

    fn splits_resonant(&self) -> bool {
        false
    }
}

/// Non-resonant (Matsubara) potential at one position (J).
pub fn nonresonant_potential<B: GreenBackend>(
    molecule: &MoleculeSpec,
    backend: &B,
    thermal: &ThermalContext,
    position: f64,
) -> Result<f64> {
    backend.check_position(position)?;
    let t = thermal.temperature;

    // half-weight m = 0 term from the analytic weighted limit
    let zero_term = 0.5 * molecule.alpha_imag_axis(0.0) * backend.zero_frequency_limit(position)?;

    let omega_mol = molecule
        .transitions
        .iter()
        .map(|tr| tr.omega)
        .fold(0.0, f64::max);
    let omega_scale = omega_mol.max(C / position.max(1e-12));
    let mut m_cut = ((10.0 * HBAR * omega_scale) / (2.0 * std::f64::consts::PI * K_B * t)).ceil()
        as usize;
    m_cut = m_cut.max(4);

    let term = |m: usize| -> Result<f64> {
        let xi = matsubara_frequency(m, t);
        Ok(xi * xi * molecule.alpha_imag_axis(xi) * backend.trace_imag(xi, position)?)
    };

    let mut sum = 0.0;
    for m in 1..=m_cut {
        sum += term(m)?;
    }
    loop {
        let mut block = 0.0;
        for m in (m_cut + 1)..=(2 * m_cut) {
            block += term(m)?;
        }
        let new_sum = sum + block;
        let scale = (zero_term + new_sum).abs().max(1e-300);
        if block.abs() <= MATSUBARA_REL_TOL * scale {
            sum = new_sum;
            break;
        }
        sum = new_sum;
        m_cut *= 2;
        if m_cut > thermal.matsubara_cutoff {
            return Err(Error::TruncationNonconvergence {
                requested: MATSUBARA_REL_TOL,
                cutoff: m_cut,
            });
        }
    }

    Ok(MU_0 * K_B * t * (zero_term + sum))
}

/// Resonant potential components at one position (J).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantParts {
    pub total: f64,
    pub propagating: Option<f64>,
    pub evanescent: Option<f64>,
}

/// Resonant (photon-absorption) potential at one position.
pub fn resonant_potential<B: GreenBackend>(
    molecule: &MoleculeSpec,
    backend: &B,
    thermal: &ThermalContext,
    position: f64,
) -> Result<ResonantParts> {
    backend.check_position(position)?;
    let mut total = 0.0;
    let mut prop = 0.0;
    let mut evan = 0.0;
    let mut has_split = backend.splits_resonant();
    for tr in &molecule.transitions {
        let n = photon_number(tr.omega, thermal.temperature)?;
        if n == 0.0 {
            continue;
        }
        let weight = MU_0 / 3.0 * tr.dipole_squared * tr.omega * tr.omega * n;
        let trace = backend.trace_real(tr.omega, position)?;
        total += weight * trace.total.re;
        match trace.split {
            Some((p, e)) => {
                prop += weight * p.re;
                evan += weight * e.re;
            }
            None => has_split = false,
        }
    }
    Ok(ResonantParts {
        total,
        propagating: has_split.then_some(prop),
        evanescent: has_split.then_some(evan),
    })
}

/// Per-sample outcome in a potential curve.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleStatus {
    Ok,
    /// Finite-difference grid too coarse at this sample (force error estimate
    /// above 1% of |F|).
    GridWarning,
    Failed(String),
}

impl SampleStatus {
    pub fn label(&self) -> String {
        match self {
            SampleStatus::Ok => "ok".to_string(),
            SampleStatus::GridWarning => "grid_warning".to_string(),
            SampleStatus::Failed(msg) => {
                format!("failed:{}", msg.split_whitespace().next().unwrap_or("error"))
            }
        }
    }
}

/// Sampled potential components and force along the scan coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialCurve {
    /// z for planar geometries, rho for the cylinder (m).
    pub positions: Vec<f64>,
    pub u_nonresonant: Vec<f64>,
    pub u_resonant_propagating: Option<Vec<f64>>,
    pub u_resonant_evanescent: Option<Vec<f64>>,
    pub u_resonant_total: Vec<f64>,
    pub u_total: Vec<f64>,
    /// F = -dU/d(position) (N).
    pub force: Vec<f64>,
    pub status: Vec<SampleStatus>,
}

/// Potential components over a monotone scan grid, evaluated in parallel with
/// a deterministic (index-ordered) reduction. Failed samples carry NaN values
/// and a per-sample status instead of aborting the sweep.
pub fn total_potential_curve<B: GreenBackend>(
    molecule: &MoleculeSpec,
    backend: &B,
    thermal: &ThermalContext,
    positions: &[f64],
) -> Result<PotentialCurve> {
    if positions.len() < 2 {
        return Err(Error::InvalidInput("scan grid needs at least 2 samples".into()));
    }
    if !positions.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidInput("scan grid must be strictly increasing".into()));
    }
    for &p in positions {
        backend.check_position(p)?;
    }

    struct Sample {
        u_nr: f64,
        res: ResonantParts,
        status: SampleStatus,
    }

    let samples: Vec<Sample> = positions
        .par_iter()
        .map(|&pos| {
            let u_nr = nonresonant_potential(molecule, backend, thermal, pos);
            let res = resonant_potential(molecule, backend, thermal, pos);
            match (u_nr, res) {
                (Ok(u_nr), Ok(res)) => Sample {
                    u_nr,
                    res,
                    status: SampleStatus::Ok,
                },
                (u, r) => {
                    let msg = u
                        .err()
                        .map(|e| e.to_string())
                        .or_else(|| r.as_ref().err().map(|e| e.to_string()))
                        .unwrap_or_default();
                    Sample {
                        u_nr: f64::NAN,
                        res: ResonantParts {
                            total: f64::NAN,
                            propagating: None,
                            evanescent: None,
                        },
                        status: SampleStatus::Failed(msg),
                    }
                }
            }
        })
        .collect();

    let splits = backend.splits_resonant();
    let u_nonresonant: Vec<f64> = samples.iter().map(|s| s.u_nr).collect();
    let u_resonant_total: Vec<f64> = samples.iter().map(|s| s.res.total).collect();
    let u_total: Vec<f64> = samples
        .iter()
        .map(|s| s.u_nr + s.res.total)
        .collect();
    let mut status: Vec<SampleStatus> = samples.iter().map(|s| s.status.clone()).collect();

    let (force, coarse) = force_from_potential(positions, &u_total)?;
    for (i, flag) in coarse.iter().enumerate() {
        if *flag && status[i] == SampleStatus::Ok {
            status[i] = SampleStatus::GridWarning;
        }
    }

    Ok(PotentialCurve {
        positions: positions.to_vec(),
        u_nonresonant,
        u_resonant_propagating: splits.then(|| {
            samples
                .iter()
                .map(|s| s.res.propagating.unwrap_or(f64::NAN))
                .collect()
        }),
        u_resonant_evanescent: splits.then(|| {
            samples
                .iter()
                .map(|s| s.res.evanescent.unwrap_or(f64::NAN))
                .collect()
        }),
        u_resonant_total,
        u_total,
        force,
        status,
    })
}

#[derive(Clone, Copy, PartialEq)]
enum GridKind {
    Linear(f64),
    Logarithmic(f64),
}

fn classify_grid(positions: &[f64]) -> Result<GridKind> {
    let h = positions[1] - positions[0];
    if positions
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs())
    {
        return Ok(GridKind::Linear(h));
    }
    if positions.iter().all(|&p| p > 0.0) {
        let logs: Vec<f64> = positions.iter().map(|p| p.ln()).collect();
        let hl = logs[1] - logs[0];
        if logs
            .windows(2)
            .all(|w| ((w[1] - w[0]) - hl).abs() <= 1e-9 * hl.abs())
        {
            return Ok(GridKind::Logarithmic(hl));
        }
    }
    Err(Error::InvalidInput(
        "force differentiation needs a grid uniform in the coordinate or its logarithm".into(),
    ))
}

/// F = -dU/dx by central finite differences: 4th order in the interior,
/// 2nd order at the boundary. The second element of the return value flags
/// samples where the difference between the 4th- and 2nd-order estimates
/// exceeds 1% of |F| (grid too coarse).
pub fn force_from_potential(positions: &[f64], u: &[f64]) -> Result<(Vec<f64>, Vec<bool>)> {
    if positions.len() != u.len() {
        return Err(Error::InvalidInput("positions/potential length mismatch".into()));
    }
    let n = positions.len();
    if n < 5 {
        return Err(Error::InvalidInput(
            "force differentiation needs at least 5 samples".into(),
        ));
    }
    let kind = classify_grid(positions)?;
    let h = match kind {
        GridKind::Linear(h) | GridKind::Logarithmic(h) => h,
    };

    let mut du = vec![0.0; n];
    let mut coarse = vec![false; n];
    for i in 0..n {
        let d = if i == 0 {
            (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h)
        } else if i == n - 1 {
            (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h)
        } else if i == 1 || i == n - 2 {
            (u[i + 1] - u[i - 1]) / (2.0 * h)
        } else {
            let d4 = (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) / (12.0 * h);
            let d2 = (u[i + 1] - u[i - 1]) / (2.0 * h);
            if (d4 - d2).abs() > 0.01 * d4.abs().max(1e-300) {
                coarse[i] = true;
            }
            d4
        };
        du[i] = d;
    }

    let force = match kind {
        GridKind::Linear(_) => du.iter().map(|d| -d).collect(),
        GridKind::Logarithmic(_) => du
            .iter()
            .zip(positions)
            .map(|(d, &p)| -d / p)
            .collect(),
    };
    Ok((force, coarse))
}

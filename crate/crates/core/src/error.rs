//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the numerical layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Unit tags live in different dimension classes.
    #[error("incompatible units: cannot convert {from} to {to}")]
    IncompatibleUnits { from: &'static str, to: &'static str },

    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A raw Bessel value was requested where only scaled/ratio forms are
    /// representable (|Im z| beyond the overflow guard).
    #[error("bessel overflow domain: |Im z| = {im_abs:.3e} exceeds guard {guard}; use ratio or scaled entry points")]
    BesselOverflowDomain { im_abs: f64, guard: f64 },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: requested rel {requested:.1e}, achieved {achieved:.1e} after {subdivisions} subdivisions")]
    QuadratureNonconvergence {
        requested: f64,
        achieved: f64,
        subdivisions: usize,
    },

    /// The azimuthal sum of the cylinder trace failed to stabilize.
    #[error("azimuthal sum did not stabilize to {requested:.1e} at n_max = {n_max}")]
    SumNonconvergence { requested: f64, n_max: usize },

    /// Doubling the Matsubara cutoff kept changing the result.
    #[error("matsubara sum did not stabilize to {requested:.1e} at cutoff {cutoff}")]
    TruncationNonconvergence { requested: f64, cutoff: usize },

    /// A true waveguide pole was hit on the real axis.
    #[error("waveguide mode pole: |A + B_D| underflow at n = {order}, t = {t}")]
    ModePole { order: u32, t: f64 },

    /// The cavity round-trip denominator approached a true resonance.
    #[error("cavity resonance proximity: |1 - r^2 e^(2i beta a)| = {magnitude:.3e} < 1e-8")]
    CavityResonance { magnitude: f64 },

    /// A real-axis evaluation was requested for a configuration whose real-axis
    /// integrand has poles (lossless conductor inside a cylinder).
    #[error("lossless cylinder wall on the real frequency axis is principal-value territory: {0}")]
    LosslessRealAxis(String),

    /// Molecule / scenario input failed validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

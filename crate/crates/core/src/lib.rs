//! Thermal Casimir-Polder potentials on ground-state polarizable particles.
//!
//! The library evaluates the two-part thermal CP potential
//!
//! ```text
//! U(r) = mu0 kB T sum'_m  xi_m^2 alpha(i xi_m) Tr G1(r,r,i xi_m)
//!      + (mu0/3) sum_k |d_0k|^2 omega_k^2 N(omega_k,T) Re Tr G1(r,r,omega_k)
//! ```
//!
//! for a particle in a uniform-temperature environment next to a half-space,
//! inside a planar cavity, or inside a cylindrical cavity. The first
//! (non-resonant) term is a Matsubara sum over the imaginary frequency axis;
//! the second (resonant) term samples the scattering Green tensor at the real
//! molecular transition frequencies, weighted by thermal photon numbers.
//!
//! Modules:
//! - [`units`] -- frozen CODATA constants and the few unit conversions used at
//!   the I/O boundary (everything internal is SI).
//! - [`bessel`] -- cylinder functions J_n, Y_n, H1_n with derivatives for
//!   complex arguments, ratio and scaled entry points, and real zeros.
//! - [`quadrature`] -- adaptive Gauss-Kronrod panels used by the geometry
//!   backends.
//! - [`materials`] -- Drude / perfect-conductor / constant permittivity on the
//!   real and imaginary frequency axes.
//! - [`molecule`] -- transition data, polarizability, photon numbers and
//!   Matsubara frequencies.
//! - [`planar`] -- half-space and planar-cavity Green-tensor traces with the
//!   propagating/evanescent split.
//! - [`cylinder`] -- Green-tensor trace inside a cylindrical vacuum cavity,
//!   reflection-coefficient algebra and resonance radii.
//! - [`engine`] -- assembles potential curves and forces over position scans.
//! - [`keldysh`] -- desk-scale numerical checks of the non-equilibrium
//!   identities behind the potential formula.

pub mod bessel;
pub mod cylinder;
pub mod engine;
pub mod error;
pub mod keldysh;
pub mod materials;
pub mod molecule;
pub mod planar;
pub mod quadrature;
pub mod units;

pub use error::Error;

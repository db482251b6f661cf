//! Scattering and spectral computations for Schrödinger operators
//! `−d²/dx² + V` on quantum star graphs with Kirchhoff vertex conditions.
//!
//! The pipeline runs bottom-up:
//!
//! * [`potential`]: edge potentials with exact derivatives and hypothesis checks;
//! * [`jost`]: Jost solutions on each edge and zero-energy solutions;
//! * [`pdet`]: the perturbation determinant `D(ζ)` and amplitude/phase scans;
//! * [`spectrum`]: negative eigenvalues, multiplicities, zero-energy resonances,
//!   and a finite-difference reference spectrum;
//! * [`asymptotics`]: the coefficients `L_m` of `log D(ζ) = Σ L_m (2iζ)^{-m}`;
//! * [`traceform`]: numerical checks of the trace identities built on all of the above;
//! * [`cli`]: configuration-driven orchestration behind the `star-trace` binary.

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod jost;
pub mod ode;
pub mod pdet;
pub mod potential;
pub mod quad;
pub mod spectrum;
pub mod traceform;

pub use error::{Error, Result};
pub use potential::{EdgePotential, Family, StarPotential};

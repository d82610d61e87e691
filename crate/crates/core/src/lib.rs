//! Collective emission spectra of 1D atomic arrays in a spatially periodic
//! magnetic field.
//!
//! A chain of V-level atoms (circular-polarization excited states `|±⟩`)
//! coupled through the free-space photon field is described by a 2N×2N
//! non-Hermitian effective Hamiltonian: on-site Zeeman shifts `±μBₙ − iγ₀/2`
//! plus long-range photon-mediated hoppings given by the dyadic Green's
//! function of the chain axis. A cosine field profile
//! `Bₙ = B₀ cos(2πbn + φ)` makes the modulation frequency `b` act as a
//! magnetic flux and the phase `φ` as a synthetic momentum, so the 1D chain
//! inherits 2D Hofstadter-type physics: a butterfly spectrum versus `b`,
//! band gaps, and topologically protected boundary states whose collective
//! decay rates can lie above (superradiant) or below (subradiant) the
//! single-atom rate.
//!
//! Everything is dimensionless: lengths in units of the transition
//! wavelength λ, rates in units of the single-atom decay rate γ₀, energies
//! as detunings `(ω − ω₀)/γ₀`.
//!
//! Module map:
//! - [`config`]: shared domain types, unit conventions, config-file parsing
//! - [`greens`]: pair couplings and Bloch-summed lattice couplings
//! - [`hamiltonian`]: finite-chain and magnetic-supercell matrix assembly
//! - [`eigen`]: dense non-Hermitian eigendecomposition and residual checks
//! - [`spectra`]: butterfly and φ sweeps, band-gap detection
//! - [`analysis`]: boundary-state classification, intensity profiles, branch
//!   tracking
//! - [`runs`]: deterministic file-emitting drivers behind the CLI

pub mod analysis;
pub mod config;
pub mod eigen;
pub mod error;
pub mod greens;
pub mod hamiltonian;
pub mod runs;
pub mod spectra;

pub use config::{ChainConfig, CollectiveMode, ComplexEigenvalue, Numerics};
pub use error::{Error, Result};

//! Coupled Morse oscillators along a parametric path from local-mode
//! (water-like) to normal-mode (CO₂-like) behaviour.
//!
//! The quantum side builds and diagonalizes the two-oscillator Hamiltonian
//! and evaluates fidelity, entanglement entropy, local/normal components
//! and probability densities. The classical side integrates the matching
//! classical Hamiltonian and produces Poincaré sections and Lyapunov
//! estimates.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod morse;
pub mod observables;
pub mod params;
pub mod quadrature;

pub use classical::{
    classical_energy, lyapunov_estimate, lyapunov_survey, poincare_section, section_energy,
    ClassicalSystem, EnergyConvention, Integrator, LyapunovOutcome, LyapunovSpec, PhaseState,
    SectionResult, SectionSpec,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    build_hamiltonian, diagonalize, find_avoided_crossings, scan, AvoidedCrossing, SpectrumPoint,
    DEFAULT_N_SINGLE,
    Symmetry, Tracking, TwoModeBasis,
};
pub use morse::MorseWell;
pub use observables::{
    components, diagnose_scan, entanglement_entropy, entropy, fidelity, label_entropy,
    probability_density, Components, DiagnosticsOptions, EntropyBasis, FidelityStep, NormalBasisMap,
    StateDiagnostics,
};
pub use params::{gamma, harmonic_couplings, xi, zeta, HarmonicCouplings, MoleculeParams, PathSpec};

//! Numerical model of a double Stern-Gerlach interferometer for twin spin-1 atoms.
//!
//! Two atoms produced with zero total angular momentum fly to opposite sides of
//! the apparatus. Each side holds a polarizer, a longitudinal phase object and
//! an analyzer; the coincidence rate between the two analyzers depends on how
//! much spin coherence the pair carries. The crate is organised bottom-up:
//!
//! * [`spinops`]: spin-1 matrices, Wigner rotations, 1⊗1 Clebsch-Gordan
//!   coefficients and the Zeeman phase of a phase object.
//! * [`twinstate`]: two-atom spin states, the coherence-parametrised initial
//!   density matrix and purity diagnostics.
//! * [`interferometer`]: the side-resolved device pipeline, coincidence signal,
//!   closed-form signal, scans and coherence estimation.
//! * [`robustness`]: Monte Carlo phase-noise ensembles and distinguishability.
//! * [`selftest`]: the invariant suite behind `twinsg selftest`.

pub mod error;
pub mod interferometer;
pub mod linalg;
pub mod robustness;
pub mod selftest;
pub mod spinops;
pub mod twinstate;

pub use error::{Error, Result};
pub use interferometer::{
    analytic_signal, coincidence, detection_state, estimate_lambda_from_ratio, evolve,
    evolved_overlap, fit_lambda, initial_state, phase_object_operator, polarizer_operator, scan,
    signal, Evolved, FitResult, PhaseSettings, RatioEstimate, ScanResult, Side, SidedDensity,
};
pub use robustness::{
    ensemble_scan, perturbed_signal, separation_report, EnsembleStats, NoiseDistribution,
    NoiseSpec, SeparationReport,
};
pub use twinstate::{Coherence, TwoAtomDensity, TwoAtomSpinState};

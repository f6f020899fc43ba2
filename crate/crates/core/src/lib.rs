//! Numerical phase-space toolkit for speed limits on quantum,
//! semiclassical, and classical evolution under quadratic Hamiltonians.
//!
//! States live on a shared uniform (q, p) grid as [`grid::PhaseField`]s:
//! Wigner functions of harmonic-oscillator eigenstates and Gaussians, and
//! classical probability densities related to them by rho = 2 pi hbar W^2.
//! Evolution under a frequency-modulated trap follows the Ermakov scaling
//! solution, applied as an exact symplectic pullback. On top of that the
//! toolkit measures fidelity / Bhattacharyya overlaps, computes the three
//! speed-limit velocities
//!
//! * quantum: ||{{H, W0}}||_2 with the 2 pi hbar dq dp measure,
//! * semiclassical: ||{H, W0}||_2 with the same measure,
//! * classical: ||{H, sqrt(rho0)}||_2 with plain dq dp,
//!
//! and verifies that the measured rate of overlap change never exceeds the
//! applicable bound.
//!
//! The `phaselimit` binary runs end-to-end scenarios from a config file
//! ([`config`] / [`scenario`]) and the self-check suite ([`verify`]).

// validation guards are written `!(x > 0.0)` so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod bracket;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod oracles;
pub mod scenario;
pub mod states;
pub mod verify;

pub use bounds::{
    tau_bound, v_csl, v_csl_timeavg, v_qsl, v_ssl, verify_rate_dominance, BoundCheck, BoundKind,
    BoundReport, MARGIN_TOLERANCE,
};
pub use bracket::{moyal, poisson, MoyalOrder};
pub use config::{ScenarioConfig, ScenarioKind, StateKind};
pub use dynamics::{
    evolve_quench, scaling_map, solve_ermakov, transport, QuenchTrajectory, SymplecticMap,
};
pub use error::{Error, Result};
pub use grid::{PhaseField, PhaseGrid};
pub use metrics::{
    bhattacharyya, bures_angle, closed_form_fidelity, fidelity, hellinger, overlap_series,
    OverlapMeasure, OverlapSeries,
};
pub use oracles::{gaussian_energy_variance, quench_bhattacharyya, quench_vcsl, OracleResult};
pub use states::{
    classical_from_wigner, classical_gaussian, gaussian_wigner, ho_wigner, purity,
    quadratic_hamiltonian, GaussianSpec, UnitsSpec,
};

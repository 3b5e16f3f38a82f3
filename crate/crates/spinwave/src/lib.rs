//! Closed-form dynamics and entanglement analysis for optical fields
//! coupled through a collective atomic spin wave.
//!
//! A pump-driven atomic ensemble couples a Stokes field to the spin wave
//! by pair creation and an anti-Stokes field by excitation exchange; a
//! second pump adds another Stokes field for the tripartite regime. The
//! crate provides:
//!
//! - [`model`] — coupling parameters, their validation and derivation
//!   from physical quantities, and the oscillation period of the
//!   dynamics ([`CouplingParams`], [`oscillation_period`]).
//! - [`bogoliubov`] — the exact closed-form Bogoliubov transform of the
//!   mode operators at time `t`, with symplectic and equation-of-motion
//!   self-checks ([`BogoliubovTransform`], [`ode_residual`]).
//! - [`moments`] — Gaussian-style moment tables (means plus centered
//!   ordered second moments), their initial values under two spin
//!   conventions, and their propagation through a transform.
//! - [`criteria`] — the Duan–Simon bipartite criterion and the van
//!   Loock–Furusawa tripartite criteria with optimal gains, plus photon
//!   number accounting ([`duan_v`], [`vlf_gains`], [`vlf_correlations`],
//!   [`tripartite_verdict`], [`mean_photon`], [`EntanglementReport`]).
//! - [`oracle`] — independent verification by exact truncated Fock-space
//!   evolution, brute-force spin moments, and end-to-end closed-form
//!   comparison ([`fock_evolve`], [`exact_moments`],
//!   [`spin_moments_bruteforce`], [`closed_form_vs_exact`]).
//! - [`sweep`] — parallel time-grid sweeps of the criteria, empirical
//!   period extraction, and refined minimum scans.
//!
//! Quadrature convention: `x = a + a†`, `p = -i (a - a†)`, so each
//! vacuum quadrature variance is 1, the Duan–Simon bound is 4, and the
//! van Loock–Furusawa bound is likewise 4.
//!
//! All types are immutable after construction and all operations are
//! pure, so everything here is safe to use from parallel sweeps.

pub mod bogoliubov;
pub mod criteria;
pub mod error;
pub mod model;
pub mod moments;
pub mod oracle;
pub mod sweep;

pub use bogoliubov::{ode_residual, BogoliubovTransform};
pub use criteria::{
    duan_v, mean_photon, tripartite_verdict, vlf_correlations, vlf_gains, EntanglementReport,
    PhotonNumbers, VlfGains,
};
pub use error::{Error, Result};
pub use model::{
    coupling_from_physical, oscillation_period, CouplingParams, ModeId, Period, PhysicalCouplings,
};
pub use moments::{evolve_moments, initial_moments, MomentTable, SpinConvention};
pub use oracle::{
    closed_form_vs_exact, exact_moments, fock_evolve, spin_moments_bruteforce, CouplingKind,
    FockState, HamiltonianSpec, SpinMoments,
};
pub use sweep::{
    bipartite_series, empirical_period, golden_min, min_scan_bipartite, min_scan_tripartite,
    tripartite_series, BipartitePoint, MinScanSummary, TripartitePoint,
};

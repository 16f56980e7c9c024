//! Gaussian quantum fluctuations of light in arrays of coupled Kerr waveguides.
//!
//! The crate follows a bright discrete soliton through the array and tracks
//! the first and second normally ordered moments of the field under a
//! Gaussian (cumulant) closure. From the second moments it builds two-mode
//! quadrature covariance matrices and the logarithmic negativity of any
//! waveguide pair. A third-order cumulant monitor bounds the propagation
//! distance over which the Gaussian closure can be trusted, and a truncated
//! Fock-space propagator provides an exact reference for small systems.
//!
//! Normalization: with `L` the quantum scale, the mean field is
//! `alpha_k = sqrt(L) <psi_k>` and the fluctuation matrices are
//! `delta_n = L <psi_k^+ psi_l> - alpha_k^* alpha_l` and
//! `delta_a = L <psi_k psi_l> - alpha_k alpha_l`.

pub mod entanglement;
pub mod experiment;
pub mod fock;
pub mod integrator;
pub mod model;
pub mod moments;
pub mod output;
pub mod params;
pub mod soliton;
pub mod validity;

pub use num_complex::Complex64;

pub use entanglement::{
    covariance, log_negativity, log_negativity_of, negativity_map, symplectic_eigenvalues,
    CovarianceMatrix, EntanglementError,
};
pub use model::{classical_invariants, dnls_rhs, ClassicalField};
pub use moments::{initial_state, moment_rhs, propagate, MomentState, PropagationError};
pub use params::{ParamsError, SystemParams};
pub use soliton::{
    continuation, find_soliton, linear_stability, seed_profile, solve_soliton, SolitonError, SolitonKind,
    SolitonProfile, StabilityReport,
};
pub use validity::{err_metric, gaussian_third_moment, third_cumulant_rhs, ThirdCumulantState};

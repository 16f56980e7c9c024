//! Two-mode quadrature covariance matrices and logarithmic negativity.
//!
//! Quadratures are `q = (psi^+ + psi) / sqrt(2)` and `p = i (psi^+ - psi) / sqrt(2)`,
//! so the vacuum covariance is `I / 2`.

use nalgebra::{DMatrix, Matrix4};
use rayon::prelude::*;
use thiserror::Error;

use crate::moments::MomentState;

/// Tolerance below `1/2` allowed for symplectic eigenvalues of a physical state.
pub const PHYSICALITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntanglementError {
    #[error("invalid waveguide pair ({k}, {l}) for {n} sites")]
    InvalidPair { k: usize, l: usize, n: usize },
    #[error("quantum scale must be nonnegative and finite, got {0}")]
    InvalidScale(f64),
    #[error("covariance matrix has non-finite entries")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    /// Ordering `(q_k, p_k, q_l, p_l)`.
    pub entries: Matrix4<f64>,
    pub pair: (usize, usize),
}

fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0,
    )
}

impl CovarianceMatrix {
    pub fn vacuum(pair: (usize, usize)) -> Self {
        Self { entries: Matrix4::identity() * 0.5, pair }
    }

    /// Standard two-mode squeezed vacuum with squeezing parameter `r`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let (c, s) = ((2.0 * r).cosh() * 0.5, (2.0 * r).sinh() * 0.5);
        let entries = Matrix4::new(
            c, 0.0, s, 0.0, //
            0.0, c, 0.0, -s, //
            s, 0.0, c, 0.0, //
            0.0, -s, 0.0, c,
        );
        Self { entries, pair: (0, 1) }
    }

    pub fn asymmetry(&self) -> f64 {
        (self.entries - self.entries.transpose()).amax()
    }

    /// Flips the sign of the second mode's momentum quadrature.
    pub fn partial_transpose(&self) -> Self {
        let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
        Self { entries: p * self.entries * p, pair: self.pair }
    }

    /// Uncertainty principle `sigma + i Omega / 2 >= 0`, i.e. both symplectic
    /// eigenvalues at least `1/2 - PHYSICALITY_TOL`.
    pub fn is_physical(&self) -> bool {
        symplectic_eigenvalues(self).map(|(l1, _)| l1 >= 0.5 - PHYSICALITY_TOL).unwrap_or(false)
    }
}

/// Assembles the covariance matrix of waveguides `k` and `l`.
pub fn covariance(state: &MomentState, k: usize, l: usize) -> Result<CovarianceMatrix, EntanglementError> {
    let n = state.n_sites();
    if k == l || k >= n || l >= n {
        return Err(EntanglementError::InvalidPair { k, l, n });
    }
    let scale = state.quantum_scale;
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(EntanglementError::InvalidScale(scale));
    }
    let inv = if state.is_rescaled() { 1.0 } else { 1.0 / scale };
    let modes = [k, l];
    let dn = |a: usize, b: usize| state.delta_n[(modes[a], modes[b])] * inv;
    let da = |a: usize, b: usize| state.delta_a[(modes[a], modes[b])] * inv;
    let delta = |a: usize, b: usize| if a == b { 0.5 } else { 0.0 };

    // Symmetrized centred second moments of the quadratures.
    let qq = |a: usize, b: usize| (da(a, b) + dn(a, b)).re + delta(a, b);
    let pp = |a: usize, b: usize| (dn(a, b) - da(a, b)).re + delta(a, b);
    let qp = |a: usize, b: usize| (da(a, b) + dn(a, b)).im;

    let mut m = Matrix4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            m[(2 * a, 2 * b)] = qq(a, b);
            m[(2 * a + 1, 2 * b + 1)] = pp(a, b);
            m[(2 * a, 2 * b + 1)] = qp(a, b);
            m[(2 * b + 1, 2 * a)] = qp(a, b);
        }
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(EntanglementError::NonFinite);
    }
    Ok(CovarianceMatrix { entries: m, pair: (k, l) })
}

/// Symplectic eigenvalues `(l1 <= l2)`: moduli of the eigenvalues of `i Omega sigma`.
pub fn symplectic_eigenvalues(sigma: &CovarianceMatrix) -> Result<(f64, f64), EntanglementError> {
    if sigma.entries.iter().any(|x| !x.is_finite()) {
        return Err(EntanglementError::NonFinite);
    }
    // Omega sigma has spectrum {+-i l1, +-i l2}.
    let product = symplectic_form() * sigma.entries;
    let mut moduli: Vec<f64> = product.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    Ok((0.5 * (moduli[0] + moduli[1]), 0.5 * (moduli[2] + moduli[3])))
}

/// Closed form via the symplectic invariant `det A + det B + 2 det C`.
pub fn symplectic_eigenvalues_closed_form(sigma: &CovarianceMatrix) -> (f64, f64) {
    let s = &sigma.entries;
    let det2 = |r: usize, c: usize| s[(r, c)] * s[(r + 1, c + 1)] - s[(r, c + 1)] * s[(r + 1, c)];
    let invariant = det2(0, 0) + det2(2, 2) + 2.0 * det2(0, 2);
    let det = s.determinant();
    let disc = (invariant * invariant - 4.0 * det).max(0.0).sqrt();
    let lo = ((invariant - disc) * 0.5).max(0.0).sqrt();
    let hi = ((invariant + disc) * 0.5).max(0.0).sqrt();
    (lo, hi)
}

/// `E_N = sum_r max(0, -log2(2 l~_r))` over the symplectic eigenvalues of the
/// partially transposed covariance matrix.
pub fn log_negativity_of(sigma: &CovarianceMatrix) -> Result<f64, EntanglementError> {
    let (l1, l2) = symplectic_eigenvalues(&sigma.partial_transpose())?;
    let term = |l: f64| (-(2.0 * l).log2()).max(0.0);
    Ok(term(l1) + term(l2))
}

pub fn log_negativity(state: &MomentState, k: usize, l: usize) -> Result<f64, EntanglementError> {
    log_negativity_of(&covariance(state, k, l)?)
}

/// Symmetric matrix of pairwise logarithmic negativities (zero diagonal).
/// Pairs whose covariance cannot be evaluated are reported as `NaN`.
pub fn negativity_map(state: &MomentState) -> DMatrix<f64> {
    let n = state.n_sites();
    let upper: Vec<(usize, usize, f64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|k| {
            (k + 1..n).map(move |l| (k, l, log_negativity(state, k, l).unwrap_or(f64::NAN)))
        })
        .collect();
    let mut map = DMatrix::zeros(n, n);
    for (k, l, e) in upper {
        map[(k, l)] = e;
        map[(l, k)] = e;
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn vacuum_values() {
        let v = CovarianceMatrix::vacuum((0, 1));
        let (a, b) = symplectic_eigenvalues(&v).unwrap();
        assert!((a - 0.5).abs() < 1e-14 && (b - 0.5).abs() < 1e-14);
        assert_eq!(log_negativity_of(&v).unwrap(), 0.0);
    }

    #[test]
    fn block_diagonal_spectrum() {
        let sigma = CovarianceMatrix {
            entries: Matrix4::from_diagonal(&nalgebra::Vector4::new(1.7, 1.7, 0.6, 0.6)),
            pair: (0, 1),
        };
        let (a, b) = symplectic_eigenvalues(&sigma).unwrap();
        assert!((a - 0.6).abs() < 1e-13 && (b - 1.7).abs() < 1e-13);
    }

    #[test]
    fn squeezed_vacuum_is_pure_and_entangled() {
        for r in [0.1, 0.5, 1.0] {
            let s = CovarianceMatrix::two_mode_squeezed(r);
            let (a, b) = symplectic_eigenvalues(&s).unwrap();
            assert!((a - 0.5).abs() < 1e-10 && (b - 0.5).abs() < 1e-10);
            let en = log_negativity_of(&s).unwrap();
            assert!((en - 2.0 * r / std::f64::consts::LN_2).abs() < 1e-10, "r={r} en={en}");
            let (c1, c2) = symplectic_eigenvalues_closed_form(&s.partial_transpose());
            assert!((c1 - (-2.0 * r).exp() / 2.0).abs() < 1e-10);
            assert!((c2 - (2.0 * r).exp() / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn coherent_state_covariance_is_vacuum() {
        let s = MomentState::coherent(vec![Complex64::new(2.0, 1.0); 4], 0.01);
        let cov = covariance(&s, 1, 3).unwrap();
        assert_eq!(cov.entries, Matrix4::identity() * 0.5);
        assert_eq!(log_negativity(&s, 1, 3).unwrap(), 0.0);
        assert!(negativity_map(&s).iter().all(|x| *x == 0.0));
    }

    #[test]
    fn invalid_pairs() {
        let s = MomentState::coherent(vec![Complex64::new(1.0, 0.0); 3], 0.01);
        assert!(matches!(covariance(&s, 1, 1), Err(EntanglementError::InvalidPair { .. })));
        assert!(matches!(covariance(&s, 0, 3), Err(EntanglementError::InvalidPair { .. })));
        let mut bad = s.clone();
        bad.quantum_scale = -1.0;
        assert!(matches!(covariance(&bad, 0, 1), Err(EntanglementError::InvalidScale(_))));
    }
}

//! Stationary discrete solitons `alpha_k(z) = beta_k exp(i omega z)`.
//!
//! Real profiles solve `-omega beta_k + beta_{k-1} + beta_{k+1} + beta_k^3 = 0`
//! on the open chain. They are found by Newton iteration seeded from the
//! anticontinuum limit (isolated excited sites at `+-sqrt(omega)`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::SystemParams;

pub const RESIDUAL_TOL: f64 = 1e-12;
pub const EDGE_TOL: f64 = 1e-8;
pub const MAX_NEWTON_ITERATIONS: usize = 50;
/// Real parts above this count as growth in [`linear_stability`].
pub const GROWTH_TOL: f64 = 1e-8;
/// Eigenvalues smaller than this in magnitude are treated as the phase zero mode.
pub const ZERO_MODE_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolitonError {
    #[error("stationary solitons require omega > 2, got {0}")]
    UnsupportedOmega(f64),
    #[error("Newton iteration did not converge: {reason} (residual {residual:e} after {iterations} iterations)")]
    NoConvergence { reason: String, residual: f64, iterations: usize },
    #[error("converged profile is not of kind {kind}: {reason}")]
    WrongBranch { kind: SolitonKind, reason: String },
    #[error("profile leaks to the array edge (|beta_1|={left:e}, |beta_N|={right:e}); use more sites")]
    EdgeLeak { left: f64, right: f64 },
    #[error("profile has {got} sites, expected {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error("need {needed} sites for this soliton kind, have {have}")]
    ArrayTooSmall { needed: usize, have: usize },
}

/// Shape class of a real stationary profile.
///
/// `MultiTwisted(m)` has `m + 1` adjacent dominant sites of alternating sign;
/// `Twisted` is the two-site case and `Fundamental` the single-site case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolitonKind {
    Fundamental,
    Twisted,
    MultiTwisted(usize),
}

impl SolitonKind {
    /// Number of sign changes between consecutive dominant sites.
    pub fn sign_changes(self) -> usize {
        match self {
            SolitonKind::Fundamental => 0,
            SolitonKind::Twisted => 1,
            SolitonKind::MultiTwisted(m) => m,
        }
    }

    pub fn dominant_sites(self) -> usize {
        self.sign_changes() + 1
    }

    /// Indices (0-based) of the dominant block, centred in an array of `n` sites.
    pub fn dominant_block(self, n: usize) -> std::ops::Range<usize> {
        let b = self.dominant_sites();
        let start = n.saturating_sub(b) / 2;
        start..start + b
    }

    /// The pair of waveguides used by default for entanglement diagnostics:
    /// the two central dominant sites, or the centre and its right neighbour
    /// for a fundamental soliton.
    pub fn central_pair(self, n: usize) -> (usize, usize) {
        let block = self.dominant_block(n);
        match self {
            SolitonKind::Fundamental => (block.start, block.start + 1),
            _ => {
                let mid = block.start + (block.len() - 1) / 2;
                (mid, mid + 1)
            }
        }
    }
}

impl std::fmt::Display for SolitonKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolitonKind::Fundamental => write!(f, "fundamental"),
            SolitonKind::Twisted => write!(f, "twisted"),
            SolitonKind::MultiTwisted(m) => write!(f, "multi_twisted({m})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonProfile {
    pub beta: Vec<f64>,
    pub omega: f64,
    pub kind: SolitonKind,
    /// Max-norm of the stationary residual.
    pub residual: f64,
}

impl SolitonProfile {
    pub fn n_sites(&self) -> usize {
        self.beta.len()
    }

    pub fn is_converged(&self) -> bool {
        self.residual <= RESIDUAL_TOL
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.beta.iter().map(|&b| Complex64::new(b, 0.0)).collect()
    }

    /// Index of the site with the largest |beta|.
    pub fn peak_site(&self) -> usize {
        self.beta
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex64>,
    /// Largest real part among eigenvalues outside the zero-mode filter.
    pub max_growth_rate: f64,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.max_growth_rate <= GROWTH_TOL
    }

    pub fn zero_modes(&self) -> usize {
        self.eigenvalues.iter().filter(|l| l.norm() < ZERO_MODE_TOL).count()
    }
}

/// `F_k(beta) = -omega beta_k + beta_{k-1} + beta_{k+1} + beta_k^3`.
pub fn stationary_residual(beta: &[f64], omega: f64) -> Vec<f64> {
    let n = beta.len();
    (0..n)
        .map(|k| {
            let left = if k > 0 { beta[k - 1] } else { 0.0 };
            let right = if k + 1 < n { beta[k + 1] } else { 0.0 };
            -omega * beta[k] + left + right + beta[k].powi(3)
        })
        .collect()
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub fn seed_profile(kind: SolitonKind, params: &SystemParams) -> Result<SolitonProfile, SolitonError> {
    if params.omega <= 2.0 || !params.omega.is_finite() {
        return Err(SolitonError::UnsupportedOmega(params.omega));
    }
    let n = params.n_sites;
    if kind.dominant_sites() > n {
        return Err(SolitonError::ArrayTooSmall { needed: kind.dominant_sites(), have: n });
    }
    let amp = params.omega.sqrt();
    let mut beta = vec![0.0; n];
    for (j, k) in kind.dominant_block(n).enumerate() {
        beta[k] = if j % 2 == 0 { amp } else { -amp };
    }
    let residual = max_norm(&stationary_residual(&beta, params.omega));
    Ok(SolitonProfile { beta, omega: params.omega, kind, residual })
}

/// Newton solve of the stationary equations starting from `seed`.
pub fn solve_soliton(seed: &SolitonProfile, params: &SystemParams) -> Result<SolitonProfile, SolitonError> {
    let omega = params.omega;
    if omega <= 2.0 || !omega.is_finite() {
        return Err(SolitonError::UnsupportedOmega(omega));
    }
    if seed.beta.len() != params.n_sites {
        return Err(SolitonError::SizeMismatch { got: seed.beta.len(), expected: params.n_sites });
    }
    if seed.beta.iter().any(|b| !b.is_finite()) {
        return Err(SolitonError::NoConvergence {
            reason: "non-finite seed".into(),
            residual: f64::NAN,
            iterations: 0,
        });
    }

    let n = seed.beta.len();
    let mut beta = DVector::from_column_slice(&seed.beta);
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations <= MAX_NEWTON_ITERATIONS {
        let f = stationary_residual(beta.as_slice(), omega);
        residual = max_norm(&f);
        if !residual.is_finite() {
            break;
        }
        if residual <= RESIDUAL_TOL {
            converged = true;
            break;
        }
        if iterations == MAX_NEWTON_ITERATIONS {
            break;
        }
        let jac = DMatrix::from_fn(n, n, |k, l| {
            if k == l {
                3.0 * beta[k] * beta[k] - omega
            } else if k.abs_diff(l) == 1 {
                1.0
            } else {
                0.0
            }
        });
        let rhs = DVector::from_vec(f);
        let Some(delta) = jac.lu().solve(&rhs) else {
            return Err(SolitonError::NoConvergence {
                reason: "singular Jacobian".into(),
                residual,
                iterations,
            });
        };
        beta -= delta;
        iterations += 1;
    }
    if !converged {
        return Err(SolitonError::NoConvergence {
            reason: "iteration cap reached".into(),
            residual,
            iterations,
        });
    }

    let profile = SolitonProfile { beta: beta.as_slice().to_vec(), omega, kind: seed.kind, residual };
    check_kind(&profile, &seed.beta)?;
    let (left, right) = (profile.beta[0].abs(), profile.beta[n - 1].abs());
    if left > EDGE_TOL || right > EDGE_TOL {
        return Err(SolitonError::EdgeLeak { left, right });
    }
    Ok(profile)
}

/// Verifies that a converged profile still has the shape of its declared kind
/// and the sign pattern of the seed's dominant sites.
fn check_kind(profile: &SolitonProfile, seed: &[f64]) -> Result<(), SolitonError> {
    let kind = profile.kind;
    let wrong = |reason: String| SolitonError::WrongBranch { kind, reason };
    let beta = &profile.beta;
    let peak = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    if peak < 1e-6 {
        return Err(wrong("collapsed to the zero solution".into()));
    }

    // Dominant sites: the |seed|-largest `m + 1` sites, in index order.
    let mut order: Vec<usize> = (0..beta.len()).collect();
    order.sort_by(|&a, &b| seed[b].abs().total_cmp(&seed[a].abs()).then(a.cmp(&b)));
    let mut dominant: Vec<usize> = order[..kind.dominant_sites()].to_vec();
    dominant.sort_unstable();

    let weakest = dominant.iter().map(|&k| beta[k].abs()).fold(f64::INFINITY, f64::min);
    let strongest_other = (0..beta.len())
        .filter(|k| !dominant.contains(k))
        .map(|k| beta[k].abs())
        .fold(0.0f64, f64::max);
    if weakest <= strongest_other {
        return Err(wrong(format!(
            "dominant sites lost dominance ({weakest:.3e} <= {strongest_other:.3e})"
        )));
    }
    for &k in &dominant {
        if seed[k] != 0.0 && beta[k].signum() != seed[k].signum() {
            return Err(wrong(format!("sign of site {k} flipped")));
        }
    }
    let changes = dominant.windows(2).filter(|w| beta[w[0]].signum() != beta[w[1]].signum()).count();
    if changes != kind.sign_changes() {
        return Err(wrong(format!("{changes} sign changes between dominant sites, expected {}", kind.sign_changes())));
    }
    if kind == SolitonKind::Fundamental {
        let sign = beta[dominant[0]].signum();
        if beta.iter().any(|&b| b * sign < -1e-14) {
            return Err(wrong("fundamental profile changes sign".into()));
        }
        let c = dominant[0];
        let rising = beta[..=c].windows(2).all(|w| w[0].abs() <= w[1].abs());
        let falling = beta[c..].windows(2).all(|w| w[0].abs() >= w[1].abs());
        if !(rising && falling) {
            return Err(wrong("fundamental profile has more than one maximum".into()));
        }
    }
    Ok(())
}

/// Spectrum of the linearization of the DNLS about `beta_k exp(i omega z)`.
///
/// Writing the perturbation in the co-rotating frame as `u + i v`, the
/// linear flow is `u' = -L_- v`, `v' = L_+ u` with
/// `L_+- = hop + diag((2 +- 1) beta^2) - omega`.
pub fn linear_stability(profile: &SolitonProfile) -> StabilityReport {
    let n = profile.n_sites();
    let beta = &profile.beta;
    let omega = profile.omega;
    let hop = |k: usize, l: usize| if k.abs_diff(l) == 1 { 1.0 } else { 0.0 };
    let l_minus = |k: usize, l: usize| hop(k, l) + if k == l { beta[k] * beta[k] - omega } else { 0.0 };
    let l_plus = |k: usize, l: usize| hop(k, l) + if k == l { 3.0 * beta[k] * beta[k] - omega } else { 0.0 };
    let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| match (r < n, c < n) {
        (true, false) => -l_minus(r, c - n),
        (false, true) => l_plus(r - n, c),
        _ => 0.0,
    });
    let eigenvalues: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    let max_growth_rate = eigenvalues
        .iter()
        .filter(|l| l.norm() >= ZERO_MODE_TOL)
        .map(|l| l.re)
        .fold(0.0f64, f64::max);
    StabilityReport { eigenvalues, max_growth_rate }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("continuation failed at omega={omega}: {source}")]
pub struct ContinuationError {
    pub omega: f64,
    #[source]
    pub source: SolitonError,
    /// Profiles converged before the failure.
    pub partial: Vec<SolitonProfile>,
}

/// Tracks a soliton branch over `steps + 1` equally spaced frequencies,
/// seeding each Newton solve with the previous solution.
pub fn continuation(
    kind: SolitonKind,
    omega_start: f64,
    omega_end: f64,
    steps: usize,
    params: &SystemParams,
) -> Result<Vec<SolitonProfile>, ContinuationError> {
    let fail = |omega: f64, source: SolitonError, partial: Vec<SolitonProfile>| ContinuationError {
        omega,
        source,
        partial,
    };
    if steps == 0 {
        return Err(fail(omega_start, SolitonError::NoConvergence {
            reason: "continuation needs at least one step".into(),
            residual: f64::NAN,
            iterations: 0,
        }, Vec::new()));
    }
    for w in [omega_start, omega_end] {
        if w <= 2.0 || !w.is_finite() {
            return Err(fail(w, SolitonError::UnsupportedOmega(w), Vec::new()));
        }
    }
    let mut out: Vec<SolitonProfile> = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let omega = omega_start + (omega_end - omega_start) * i as f64 / steps as f64;
        let p = SystemParams { omega, ..*params };
        let seed = match out.last() {
            Some(prev) => SolitonProfile { omega, ..prev.clone() },
            None => match seed_profile(kind, &p) {
                Ok(s) => s,
                Err(e) => return Err(fail(omega, e, out)),
            },
        };
        match solve_soliton(&seed, &p) {
            Ok(profile) => out.push(profile),
            Err(e) => return Err(fail(omega, e, out)),
        }
    }
    Ok(out)
}

/// Seeds and solves in one call.
pub fn find_soliton(kind: SolitonKind, params: &SystemParams) -> Result<SolitonProfile, SolitonError> {
    solve_soliton(&seed_profile(kind, params)?, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dnls_rhs, ClassicalField};

    fn params(n: usize, omega: f64) -> SystemParams {
        SystemParams { n_sites: n, omega, ..Default::default() }
    }

    #[test]
    fn fundamental_seed_layout() {
        let s = seed_profile(SolitonKind::Fundamental, &params(15, 10.0)).unwrap();
        assert!((s.beta[7] - 10f64.sqrt()).abs() < 1e-15);
        assert!((s.beta[7] - 3.1623).abs() < 1e-4);
        assert_eq!(s.beta.iter().filter(|b| **b != 0.0).count(), 1);
    }

    #[test]
    fn twisted_seed_layout() {
        // Sites 7 and 8 in 1-based numbering.
        let s = seed_profile(SolitonKind::Twisted, &params(15, 10.0)).unwrap();
        assert_eq!(s.beta[6], 10f64.sqrt());
        assert_eq!(s.beta[7], -(10f64.sqrt()));
        assert_eq!(s.beta.iter().filter(|b| **b != 0.0).count(), 2);
    }

    #[test]
    fn multi_twisted_seed_alternates() {
        let s = seed_profile(SolitonKind::MultiTwisted(3), &params(22, 10.0)).unwrap();
        let nz: Vec<f64> = s.beta.iter().copied().filter(|b| *b != 0.0).collect();
        assert_eq!(nz.len(), 4);
        assert!(nz.windows(2).all(|w| w[0] * w[1] < 0.0));
        assert_eq!(SolitonKind::MultiTwisted(3).dominant_block(22), 9..13);
    }

    #[test]
    fn omega_at_threshold_is_rejected() {
        assert_eq!(
            seed_profile(SolitonKind::Fundamental, &params(15, 2.0)),
            Err(SolitonError::UnsupportedOmega(2.0))
        );
    }

    #[test]
    fn fundamental_solution() {
        let p = params(21, 10.0);
        let s = find_soliton(SolitonKind::Fundamental, &p).unwrap();
        assert!(s.residual <= RESIDUAL_TOL);
        assert!((s.beta[10] - 10f64.sqrt()).abs() < 0.1);
        for k in 0..21 {
            assert!((s.beta[k] - s.beta[20 - k]).abs() < 1e-12);
        }
        let d = dnls_rhs(&ClassicalField::from_real(&s.beta));
        for (dk, bk) in d.0.iter().zip(&s.beta) {
            assert!((dk - Complex64::new(0.0, 10.0 * bk)).norm() < 1e-11);
        }
    }

    #[test]
    fn twisted_solution_is_antisymmetric() {
        let p = params(22, 10.0);
        let s = find_soliton(SolitonKind::Twisted, &p).unwrap();
        for k in 0..22 {
            assert!((s.beta[k] + s.beta[21 - k]).abs() < 1e-12, "site {k}");
        }
    }

    #[test]
    fn small_array_leaks() {
        let err = find_soliton(SolitonKind::Fundamental, &params(15, 10.0)).unwrap_err();
        assert!(matches!(err, SolitonError::EdgeLeak { .. }), "{err:?}");
    }

    #[test]
    fn anticontinuum_scaling() {
        let dev: Vec<f64> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&w| {
                let s = find_soliton(SolitonKind::Fundamental, &params(21, w)).unwrap();
                (s.beta[10] / w.sqrt() - 1.0).abs()
            })
            .collect();
        assert!(dev[0] > dev[1] && dev[1] > dev[2], "{dev:?}");
    }

    #[test]
    fn fundamental_is_stable_with_phase_mode() {
        let s = find_soliton(SolitonKind::Fundamental, &params(21, 10.0)).unwrap();
        let r = linear_stability(&s);
        assert!(r.is_stable(), "growth {}", r.max_growth_rate);
        assert!(r.zero_modes() >= 2);
        for l in &r.eigenvalues {
            let mirror = -l.conj();
            let closest = r.eigenvalues.iter().map(|m| (m - mirror).norm()).fold(f64::INFINITY, f64::min);
            assert!(closest < 1e-10 || l.norm() < ZERO_MODE_TOL, "{l} has no partner ({closest:e})");
        }
    }

    #[test]
    fn wrong_sign_pattern_is_detected() {
        let p = params(21, 10.0);
        let mut seed = seed_profile(SolitonKind::Twisted, &p).unwrap();
        // Same-sign pair is an in-phase two-site state, not a twisted mode.
        let b = seed.kind.dominant_block(21);
        seed.beta[b.start + 1] = seed.beta[b.start];
        assert!(matches!(solve_soliton(&seed, &p), Err(SolitonError::WrongBranch { .. })));
    }

    #[test]
    fn continuation_is_monotone() {
        let branch = continuation(SolitonKind::Fundamental, 10.0, 4.0, 12, &params(41, 10.0)).unwrap();
        assert_eq!(branch.len(), 13);
        assert!(branch.iter().all(|p| p.residual <= RESIDUAL_TOL));
        let centre: Vec<f64> = branch.iter().map(|p| p.beta[20]).collect();
        assert!(centre.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn trivial_continuation_matches_single_solve() {
        let p = params(21, 10.0);
        let single = find_soliton(SolitonKind::Twisted, &p).unwrap();
        let branch = continuation(SolitonKind::Twisted, 10.0, 10.0, 1, &p).unwrap();
        assert!(branch.iter().all(|b| b.beta == single.beta));
    }

    #[test]
    fn continuation_towards_threshold() {
        let branch = continuation(SolitonKind::Fundamental, 10.0, 2.05, 80, &params(241, 10.0)).unwrap();
        let last = branch.last().unwrap();
        assert!(last.residual <= RESIDUAL_TOL);
        assert!(last.beta[120] < 0.5, "centre {}", last.beta[120]);
    }

    #[test]
    fn continuation_reports_failing_omega() {
        // 15 sites are too few for omega = 10 tails.
        let err = continuation(SolitonKind::Fundamental, 20.0, 10.0, 10, &params(15, 20.0)).unwrap_err();
        assert!(err.omega > 10.0 && err.omega < 20.0);
        assert!(!err.partial.is_empty());
        assert!(matches!(err.source, SolitonError::EdgeLeak { .. }));
    }
}

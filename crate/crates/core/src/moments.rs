//! Closed second-order moment dynamics under the Gaussian closure.
//!
//! State variables are the mean field `alpha_k`, the normal fluctuation
//! matrix `delta_n` (Hermitian) and the anomalous fluctuation matrix
//! `delta_a` (symmetric). Absorption adds `-gamma/2 alpha`,
//! `-gamma delta_n` and `-gamma delta_a`.
//!
//! When the quantum scale `L` is exactly zero the fluctuations vanish, so
//! the state instead carries the rescaled limits `delta / L`. In that mode
//! the fluctuation back-action on the mean field drops out and the
//! anomalous source term becomes `i alpha_k^2`.

use log::{debug, warn};
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::integrator::{AdaptiveRk4, Rk4};
use crate::model::neighbour_sum;
use crate::params::{ParamsError, SystemParams};
use crate::soliton::SolitonProfile;
use crate::validity::{third_cumulant_rhs_into, ThirdCumulantState};

/// Entries beyond this magnitude are treated as a blow-up.
pub const BLOWUP_LIMIT: f64 = 1e12;
/// Hermiticity / symmetry drift that triggers a warning at snapshots.
pub const SYMMETRY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagationError {
    #[error("numerical blow-up at z={z}: {what}")]
    NumericalBlowup { z: f64, what: String },
    #[error("adaptive step size collapsed at z={z}")]
    StepCollapse { z: f64 },
    #[error("state has {got} sites but parameters specify {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Params(#[from] ParamsError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    pub z: f64,
    pub alpha: Vec<Complex64>,
    pub delta_n: DMatrix<Complex64>,
    pub delta_a: DMatrix<Complex64>,
    /// `L` the fluctuations refer to; `0` marks the rescaled classical-limit form.
    pub quantum_scale: f64,
}

impl MomentState {
    pub fn coherent(alpha: Vec<Complex64>, quantum_scale: f64) -> Self {
        let n = alpha.len();
        Self {
            z: 0.0,
            alpha,
            delta_n: DMatrix::zeros(n, n),
            delta_a: DMatrix::zeros(n, n),
            quantum_scale,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_rescaled(&self) -> bool {
        self.quantum_scale == 0.0
    }

    /// Connected normal and anomalous moments `delta / L` of the unscaled
    /// field operators. In rescaled mode the stored matrices already are these.
    pub fn connected_moments(&self) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        if self.is_rescaled() {
            (self.delta_n.clone(), self.delta_a.clone())
        } else {
            let inv = 1.0 / self.quantum_scale;
            (self.delta_n.map(|x| x * inv), self.delta_a.map(|x| x * inv))
        }
    }

    /// Normalized power `|alpha_k|^2 + delta_n_kk` carried by site `k`.
    pub fn site_power(&self, k: usize) -> f64 {
        let fluct = if self.is_rescaled() { 0.0 } else { self.delta_n[(k, k)].re };
        self.alpha[k].norm_sqr() + fluct
    }

    pub fn total_power(&self) -> f64 {
        (0..self.n_sites()).map(|k| self.site_power(k)).sum()
    }

    /// Largest `|delta_n[k,l] - conj(delta_n[l,k])|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.n_sites();
        let mut e: f64 = 0.0;
        for k in 0..n {
            for l in 0..n {
                e = e.max((self.delta_n[(k, l)] - self.delta_n[(l, k)].conj()).norm());
            }
        }
        e
    }

    /// Largest `|delta_a[k,l] - delta_a[l,k]|`.
    pub fn symmetry_error(&self) -> f64 {
        let n = self.n_sites();
        let mut e: f64 = 0.0;
        for k in 0..n {
            for l in 0..n {
                e = e.max((self.delta_a[(k, l)] - self.delta_a[(l, k)]).norm());
            }
        }
        e
    }

    /// Most negative diagonal entry of `delta_n` (or zero).
    pub fn min_occupation(&self) -> f64 {
        (0..self.n_sites()).map(|k| self.delta_n[(k, k)].re).fold(0.0, f64::min)
    }

    pub(crate) fn flat_len(n: usize) -> usize {
        n + 2 * n * n
    }

    pub(crate) fn write_flat(&self, out: &mut [Complex64]) {
        let n = self.n_sites();
        out[..n].copy_from_slice(&self.alpha);
        for k in 0..n {
            for l in 0..n {
                out[n + k * n + l] = self.delta_n[(k, l)];
                out[n + n * n + k * n + l] = self.delta_a[(k, l)];
            }
        }
    }

    pub(crate) fn from_flat(y: &[Complex64], n: usize, z: f64, quantum_scale: f64) -> Self {
        Self {
            z,
            alpha: y[..n].to_vec(),
            delta_n: DMatrix::from_fn(n, n, |k, l| y[n + k * n + l]),
            delta_a: DMatrix::from_fn(n, n, |k, l| y[n + n * n + k * n + l]),
            quantum_scale,
        }
    }
}

/// Coherent input state carrying the soliton profile: `alpha = beta`, no fluctuations.
pub fn initial_state(profile: &SolitonProfile, quantum_scale: f64) -> MomentState {
    MomentState::coherent(profile.amplitudes(), quantum_scale)
}

/// Weights selecting the physical or the rescaled form of the moment equations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Closure {
    /// Coefficient of fluctuation back-action (terms nonlinear in the stored fluctuations).
    pub backaction: f64,
    /// Coefficient of the commutator source in the anomalous block.
    pub source: f64,
    pub absorption: f64,
}

impl Closure {
    pub fn new(quantum_scale: f64, absorption: f64) -> Self {
        if quantum_scale == 0.0 {
            Self { backaction: 0.0, source: 1.0, absorption }
        } else {
            Self { backaction: 1.0, source: quantum_scale, absorption }
        }
    }
}

/// Flat-layout kernel: `y = [alpha | delta_n (row-major) | delta_a (row-major)]`.
pub(crate) fn moment_rhs_into(n: usize, c: Closure, y: &[Complex64], dy: &mut [Complex64]) {
    let (alpha, rest) = y.split_at(n);
    let (dn, da) = rest.split_at(n * n);
    let (d_alpha, d_rest) = dy.split_at_mut(n);
    let (d_dn, d_da) = d_rest.split_at_mut(n * n);
    let g = c.backaction;
    let gamma = c.absorption;

    let at = |m: &[Complex64], k: isize, l: isize| -> Complex64 {
        if k < 0 || l < 0 || k >= n as isize || l >= n as isize {
            ZERO
        } else {
            m[k as usize * n + l as usize]
        }
    };

    for k in 0..n {
        let a = alpha[k];
        let fluct = a * dn[k * n + k] * 2.0 + a.conj() * da[k * n + k];
        d_alpha[k] = I * (neighbour_sum(alpha, k) + a * a.norm_sqr() + fluct * g) - a * (0.5 * gamma);
    }

    for k in 0..n {
        let ak = alpha[k];
        let pk = ak.norm_sqr();
        let nkk = dn[k * n + k];
        let akk = da[k * n + k];
        let ki = k as isize;
        for l in 0..n {
            let al = alpha[l];
            let pl = al.norm_sqr();
            let nll = dn[l * n + l];
            let all = da[l * n + l];
            let li = l as isize;
            let nkl = dn[k * n + l];
            let akl = da[k * n + l];

            let hop_n = at(dn, ki, li + 1) + at(dn, ki, li - 1) - at(dn, ki + 1, li) - at(dn, ki - 1, li);
            let mut rate_n = I * hop_n
                + I * 2.0 * ((nll - nkk) * g + (pl - pk)) * nkl
                + I * ((akl.conj() * all - akl * akk.conj()) * g + al * al * akl.conj() - ak.conj() * ak.conj() * akl);
            rate_n -= nkl * gamma;
            d_dn[k * n + l] = rate_n;

            let hop_a = at(da, ki, li + 1) + at(da, ki, li - 1) + at(da, ki + 1, li) + at(da, ki - 1, li);
            let mut rate_a = I * hop_a
                + I * 2.0 * ((nkk + nll) * g + (pk + pl)) * akl
                + I * (akk * g + ak * ak) * nkl
                + I * (all * g + al * al) * nkl.conj();
            if k == l {
                rate_a += I * (0.5 * c.source) * (ak * ak + al * al + (akk + all) * g);
            }
            rate_a -= akl * gamma;
            d_da[k * n + l] = rate_a;
        }
    }
}

/// Derivative of a moment state; the returned value carries `d/dz` of each
/// field in the corresponding slot (its `z` is left at the input's).
pub fn moment_rhs(state: &MomentState, params: &SystemParams) -> MomentState {
    let n = state.n_sites();
    let mut y = vec![ZERO; MomentState::flat_len(n)];
    let mut dy = y.clone();
    state.write_flat(&mut y);
    moment_rhs_into(n, Closure::new(state.quantum_scale, params.absorption), &y, &mut dy);
    MomentState::from_flat(&dy, n, state.z, state.quantum_scale)
}

/// What the propagator hands to observers at each output point.
#[derive(Debug)]
pub struct Snapshot<'a> {
    pub state: &'a MomentState,
    pub cumulants: Option<&'a ThirdCumulantState>,
    /// Size of the symmetrization applied to this snapshot.
    pub symmetry_correction: f64,
}

pub trait Observer {
    fn observe(&mut self, snapshot: &Snapshot<'_>);
}

impl<F: FnMut(&Snapshot<'_>)> Observer for F {
    fn observe(&mut self, snapshot: &Snapshot<'_>) {
        self(snapshot)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagateOptions {
    /// Record a snapshot every `output_stride` steps (the final point is always recorded).
    pub output_stride: usize,
    /// Relative tolerance for step-doubling adaptive RK4; `None` means fixed steps.
    pub adaptive_tolerance: Option<f64>,
    /// Also evolve third-order cumulants (needed for the validity metric).
    pub track_cumulants: bool,
    /// Keep every snapshot state in the returned trajectory.
    pub store_states: bool,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self { output_stride: 10, adaptive_tolerance: None, track_cumulants: false, store_states: true }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub states: Vec<MomentState>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&MomentState> {
        self.states.last()
    }

    pub fn z_values(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.z).collect()
    }
}

/// Fixed-step RK4 propagation with snapshots every `output_stride` steps.
pub fn propagate(
    state0: &MomentState,
    params: &SystemParams,
    observers: &mut [&mut dyn Observer],
) -> Result<Trajectory, PropagationError> {
    propagate_with(state0, params, &PropagateOptions::default(), observers)
}

pub fn propagate_with(
    state0: &MomentState,
    params: &SystemParams,
    options: &PropagateOptions,
    observers: &mut [&mut dyn Observer],
) -> Result<Trajectory, PropagationError> {
    params.validate()?;
    let n = state0.n_sites();
    if n != params.n_sites {
        return Err(PropagationError::SizeMismatch { got: n, expected: params.n_sites });
    }
    let scale = state0.quantum_scale;
    let closure = Closure::new(scale, params.absorption);
    let m2_len = MomentState::flat_len(n);
    let m3_len = if options.track_cumulants { 2 * n * n * n } else { 0 };

    let mut y = vec![ZERO; m2_len + m3_len];
    state0.write_flat(&mut y[..m2_len]);

    let rhs = |y: &[Complex64], dy: &mut [Complex64]| {
        let (m2, m3) = y.split_at(m2_len);
        let (d2, d3) = dy.split_at_mut(m2_len);
        moment_rhs_into(n, closure, m2, d2);
        if !m3.is_empty() {
            third_cumulant_rhs_into(n, scale, params.absorption, m2, m3, d3);
        }
    };

    let n_steps = params.n_steps();
    let h = params.z_max / n_steps as f64;
    let stride = options.output_stride.max(1);
    let mut trajectory = Trajectory::default();
    let mut fixed = Rk4::new(y.len());
    let mut adaptive = options.adaptive_tolerance.map(|tol| AdaptiveRk4::new(y.len(), h, tol));

    let z0 = state0.z;
    let mut emit = |y: &mut [Complex64], z: f64, trajectory: &mut Trajectory| {
        let correction = symmetrize(n, y, m2_len);
        if correction > SYMMETRY_TOL {
            warn!("symmetrization at z={z:.6} corrected drift of {correction:.3e}");
        } else {
            debug!("symmetrization at z={z:.6}: {correction:.3e}");
        }
        let state = MomentState::from_flat(&y[..m2_len], n, z, scale);
        if state.min_occupation() < -SYMMETRY_TOL {
            warn!("negative fluctuation occupation {:.3e} at z={z:.6}", state.min_occupation());
        }
        let cumulants = (m3_len > 0).then(|| ThirdCumulantState::from_flat(n, &y[m2_len..]));
        let snap = Snapshot { state: &state, cumulants: cumulants.as_ref(), symmetry_correction: correction };
        for obs in observers.iter_mut() {
            obs.observe(&snap);
        }
        if options.store_states {
            trajectory.states.push(state);
        }
    };

    emit(&mut y, z0, &mut trajectory);
    let mut step = 0;
    while step < n_steps {
        let chunk = stride.min(n_steps - step);
        match adaptive.as_mut() {
            Some(ad) => {
                if ad.integrate(&rhs, &mut y, chunk as f64 * h).is_none() {
                    return Err(PropagationError::StepCollapse { z: z0 + step as f64 * h });
                }
                step += chunk;
                check_finite(&y, z0 + step as f64 * h)?;
            }
            None => {
                for _ in 0..chunk {
                    fixed.step(&rhs, &mut y, h);
                    step += 1;
                    check_finite(&y, z0 + step as f64 * h)?;
                }
            }
        }
        emit(&mut y, z0 + step as f64 * h, &mut trajectory);
    }
    Ok(trajectory)
}

fn check_finite(y: &[Complex64], z: f64) -> Result<(), PropagationError> {
    for (i, v) in y.iter().enumerate() {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(PropagationError::NumericalBlowup { z, what: format!("non-finite entry {i}") });
        }
        if v.norm() > BLOWUP_LIMIT {
            return Err(PropagationError::NumericalBlowup { z, what: format!("|entry {i}| = {:.3e}", v.norm()) });
        }
    }
    Ok(())
}

/// Projects the fluctuation blocks (and cumulant tensors, if present) back
/// onto their symmetry manifolds. Returns the largest correction applied.
fn symmetrize(n: usize, y: &mut [Complex64], m2_len: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..n {
        for l in k..n {
            let (ikl, ilk) = (n + k * n + l, n + l * n + k);
            let avg = (y[ikl] + y[ilk].conj()) * 0.5;
            worst = worst.max((y[ikl] - avg).norm());
            y[ikl] = avg;
            y[ilk] = avg.conj();

            let (ikl, ilk) = (ikl + n * n, ilk + n * n);
            let avg = (y[ikl] + y[ilk]) * 0.5;
            worst = worst.max((y[ikl] - avg).norm());
            y[ikl] = avg;
            y[ilk] = avg;
        }
    }
    if y.len() > m2_len {
        worst = worst.max(crate::validity::symmetrize_flat(n, &mut y[m2_len..]));
    }
    worst
}

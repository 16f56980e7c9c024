//! Exact propagation of a few coupled Kerr modes in a truncated Fock basis.
//!
//! The generator is fixed by requiring that the Heisenberg equation of each
//! mode reproduce `d psi_k / dz = i (psi_{k-1} + psi_{k+1}) + i L psi_k^+ psi_k psi_k`:
//!
//! `H = -sum_k (psi_k^+ psi_{k+1} + h.c.) - (L/2) sum_k psi_k^+2 psi_k^2`,
//! with states evolving as `exp(-i H z)`.
//!
//! `H` conserves the total photon number, so the basis is truncated by total
//! photon number (`cutoff`) and each number sector is diagonalized exactly.
//! Only meant as a reference for small systems.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::moments::MomentState;
use crate::validity::ThirdCumulantState;

pub const MAX_MODES: usize = 3;
/// Largest number sector the oracle is willing to diagonalize.
pub const MAX_SECTOR_DIM: usize = 4000;
pub const SHELL_TOL: f64 = 1e-8;
pub const TAIL_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("population {population:e} reaches the truncation (cutoff {cutoff})")]
    TruncationOverflow { population: f64, cutoff: usize },
    #[error("oracle supports 2..={MAX_MODES} modes, got {0}")]
    UnsupportedModes(usize),
    #[error("number sector of dimension {0} is too large")]
    TooLarge(usize),
    #[error("quantum scale must be positive, got {0}")]
    InvalidScale(f64),
}

/// Occupation-number basis with all states of total photon number `<= cutoff`.
#[derive(Debug, Clone)]
pub struct FockBasis {
    pub n_modes: usize,
    pub cutoff: usize,
    pub states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    /// Index ranges of each total-number sector.
    sectors: Vec<std::ops::Range<usize>>,
}

impl FockBasis {
    pub fn new(n_modes: usize, cutoff: usize) -> Self {
        let mut states = Vec::new();
        let mut sectors = Vec::with_capacity(cutoff + 1);
        for total in 0..=cutoff {
            let start = states.len();
            compositions(n_modes, total, &mut Vec::new(), &mut states);
            sectors.push(start..states.len());
        }
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self { n_modes, cutoff, states, index, sectors }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn find(&self, occupation: &[usize]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    /// `psi_k |v>`.
    pub fn lower(&self, k: usize, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim()];
        let mut occ = vec![0; self.n_modes];
        for (i, s) in self.states.iter().enumerate() {
            if s[k] == 0 || v[i] == ZERO {
                continue;
            }
            occ.copy_from_slice(s);
            occ[k] -= 1;
            let j = self.index[&occ];
            out[j] += v[i] * (s[k] as f64).sqrt();
        }
        out
    }
}

fn compositions(modes: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if modes == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        compositions(modes - 1, total - first, prefix, out);
        prefix.pop();
    }
}

#[derive(Debug, Clone)]
pub struct FockState {
    pub basis: FockBasis,
    pub amplitudes: Vec<Complex64>,
    pub z: f64,
}

impl FockState {
    pub fn n_modes(&self) -> usize {
        self.basis.n_modes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mean_photons(&self) -> f64 {
        self.basis
            .states
            .iter()
            .zip(&self.amplitudes)
            .map(|(s, a)| a.norm_sqr() * s.iter().sum::<usize>() as f64)
            .sum()
    }

    /// Probability of the outermost shell (total photon number == cutoff).
    pub fn shell_population(&self) -> f64 {
        self.basis.sectors[self.basis.cutoff].clone().map(|i| self.amplitudes[i].norm_sqr()).sum()
    }

    /// Product coherent state with `<psi_k> = alpha_k / sqrt(L)`.
    pub fn coherent(alpha: &[Complex64], quantum_scale: f64, cutoff: usize) -> Result<Self, FockError> {
        let n_modes = alpha.len();
        if !(2..=MAX_MODES).contains(&n_modes) {
            return Err(FockError::UnsupportedModes(n_modes));
        }
        if !(quantum_scale > 0.0) {
            return Err(FockError::InvalidScale(quantum_scale));
        }
        let basis = FockBasis::new(n_modes, cutoff);
        let beta: Vec<Complex64> = alpha.iter().map(|a| a / quantum_scale.sqrt()).collect();
        // log of |beta|^n / sqrt(n!) with the phase tracked separately.
        let ln_fact: Vec<f64> = (0..=cutoff)
            .scan(0.0, |acc, n| {
                if n > 0 {
                    *acc += (n as f64).ln();
                }
                Some(*acc)
            })
            .collect();
        let amplitudes: Vec<Complex64> = basis
            .states
            .iter()
            .map(|s| {
                let mut log_mod = 0.0;
                let mut phase = 0.0;
                for (b, &n) in beta.iter().zip(s) {
                    log_mod -= 0.5 * b.norm_sqr();
                    if n > 0 {
                        if b.norm() == 0.0 {
                            return ZERO;
                        }
                        log_mod += n as f64 * b.norm().ln() - 0.5 * ln_fact[n];
                        phase += n as f64 * b.arg();
                    }
                }
                Complex64::from_polar(log_mod.exp(), phase)
            })
            .collect();
        let mut state = Self { basis, amplitudes, z: 0.0 };
        let tail = 1.0 - state.norm().powi(2);
        if tail > TAIL_TOL {
            return Err(FockError::TruncationOverflow { population: tail, cutoff });
        }
        let norm = state.norm();
        state.amplitudes.iter_mut().for_each(|a| *a /= norm);
        let shell = state.shell_population();
        if shell > SHELL_TOL {
            return Err(FockError::TruncationOverflow { population: shell, cutoff });
        }
        Ok(state)
    }
}

/// Smallest total-photon cutoff that captures a coherent input to within
/// [`TAIL_TOL`] (mean plus a generous Poisson tail).
pub fn suggested_cutoff(alpha: &[Complex64], quantum_scale: f64) -> usize {
    let mean: f64 = alpha.iter().map(|a| a.norm_sqr()).sum::<f64>() / quantum_scale;
    (mean + 8.0 * mean.sqrt() + 25.0).ceil() as usize
}

/// Real symmetric generator restricted to one number sector.
fn sector_hamiltonian(basis: &FockBasis, range: std::ops::Range<usize>, quantum_scale: f64) -> DMatrix<f64> {
    let dim = range.len();
    let offset = range.start;
    let mut h = DMatrix::zeros(dim, dim);
    let mut occ = vec![0; basis.n_modes];
    for i in range.clone() {
        let s = &basis.states[i];
        let kerr: f64 = s.iter().map(|&n| (n * n.saturating_sub(1)) as f64).sum();
        h[(i - offset, i - offset)] = -0.5 * quantum_scale * kerr;
        // psi_k^+ psi_{k+1} and its conjugate.
        for k in 0..basis.n_modes - 1 {
            if s[k + 1] > 0 {
                occ.copy_from_slice(s);
                occ[k + 1] -= 1;
                occ[k] += 1;
                let j = basis.index[&occ];
                let amp = ((s[k + 1] * (s[k] + 1)) as f64).sqrt();
                h[(j - offset, i - offset)] -= amp;
                h[(i - offset, j - offset)] -= amp;
            }
        }
    }
    h
}

/// Evolves a coherent input over distance `z` (lossless only).
pub fn exact_propagate(alpha: &[Complex64], quantum_scale: f64, z: f64, cutoff: usize) -> Result<FockState, FockError> {
    let mut state = FockState::coherent(alpha, quantum_scale, cutoff)?;
    evolve(&mut state, quantum_scale, z)?;
    Ok(state)
}

pub fn evolve(state: &mut FockState, quantum_scale: f64, z: f64) -> Result<(), FockError> {
    let sectors = state.basis.sectors.clone();
    for range in sectors {
        if range.len() > MAX_SECTOR_DIM {
            return Err(FockError::TooLarge(range.len()));
        }
        let c = DVector::from_iterator(range.len(), range.clone().map(|i| state.amplitudes[i]));
        if c.iter().all(|x| x.norm_sqr() < 1e-300) {
            continue;
        }
        let h = sector_hamiltonian(&state.basis, range.clone(), quantum_scale);
        let eig = SymmetricEigen::new(h);
        let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let mut coeffs = v.adjoint() * c;
        for (ci, &e) in coeffs.iter_mut().zip(eig.eigenvalues.iter()) {
            *ci *= Complex64::from_polar(1.0, -e * z);
        }
        let out = v * coeffs;
        for (i, x) in range.zip(out.iter()) {
            state.amplitudes[i] = *x;
        }
    }
    state.z += z;
    Ok(())
}

/// Exact centred moments in the normalized units of [`MomentState`] and
/// [`ThirdCumulantState`].
#[derive(Debug, Clone)]
pub struct ExactMoments {
    pub moments: MomentState,
    pub cumulants: ThirdCumulantState,
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn exact_moments(state: &FockState, quantum_scale: f64) -> ExactMoments {
    let n = state.n_modes();
    let b = &state.basis;
    let psi = &state.amplitudes;
    let lowered: Vec<Vec<Complex64>> = (0..n).map(|k| b.lower(k, psi)).collect();
    let twice: Vec<Vec<Vec<Complex64>>> = (0..n).map(|k| (0..n).map(|l| b.lower(k, &lowered[l])).collect()).collect();

    let sl = quantum_scale.sqrt();
    let mean: Vec<Complex64> = (0..n).map(|k| inner(psi, &lowered[k])).collect();
    let alpha: Vec<Complex64> = mean.iter().map(|m| m * sl).collect();
    let raw_n = DMatrix::from_fn(n, n, |k, l| inner(&lowered[k], &lowered[l]) * quantum_scale);
    let raw_a = DMatrix::from_fn(n, n, |k, l| inner(psi, &twice[k][l]) * quantum_scale);

    let mut m2 = MomentState::coherent(alpha.clone(), quantum_scale);
    m2.z = state.z;
    m2.delta_n = DMatrix::from_fn(n, n, |k, l| raw_n[(k, l)] - alpha[k].conj() * alpha[l]);
    m2.delta_a = DMatrix::from_fn(n, n, |k, l| raw_a[(k, l)] - alpha[k] * alpha[l]);

    let s3 = quantum_scale.powf(1.5);
    let mut m3 = ThirdCumulantState::zeros(n);
    let a = &alpha;
    for k in 0..n {
        let third: Vec<Vec<Vec<Complex64>>> = (0..n).map(|l| (0..n).map(|m| b.lower(k, &twice[l][m])).collect()).collect();
        for l in 0..n {
            for m in 0..n {
                let i = m3.index(k, l, m);
                let aaa = inner(psi, &third[l][m]) * s3;
                m3.kappa_aaa[i] = aaa - a[k] * raw_a[(l, m)] - a[l] * raw_a[(k, m)] - a[m] * raw_a[(k, l)]
                    + a[k] * a[l] * a[m] * 2.0;
                let naa = inner(&lowered[k], &twice[l][m]) * s3;
                m3.kappa_naa[i] = naa - a[k].conj() * raw_a[(l, m)] - a[l] * raw_n[(k, m)] - a[m] * raw_n[(k, l)]
                    + a[k].conj() * a[l] * a[m] * 2.0;
            }
        }
    }
    ExactMoments { moments: m2, cumulants: m3 }
}

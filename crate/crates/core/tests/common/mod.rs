//! Shared helpers for the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use soliton_entanglement::fock::{exact_moments, exact_propagate, suggested_cutoff};
use soliton_entanglement::moments::{propagate_with, PropagateOptions};
use soliton_entanglement::{covariance, MomentState, SystemParams, ThirdCumulantState};

pub const SCALE: f64 = 0.05;

pub fn input() -> Vec<Complex64> {
    vec![Complex64::new(2.0, 0.0), Complex64::from_polar(2.0, 1.0)]
}

/// Largest entrywise deviation relative to the largest exact entry.
fn rel_dev<'a>(got: impl Iterator<Item = &'a Complex64>, exact: impl Iterator<Item = &'a Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (g, e) in got.zip(exact) {
        worst = worst.max((g - e).norm());
        scale = scale.max(e.norm());
    }
    worst / scale
}

fn closure_at(z: f64) -> (MomentState, ThirdCumulantState) {
    let params = SystemParams { n_sites: 2, quantum_scale: SCALE, z_max: z, step: 1e-4, ..Default::default() };
    let options = PropagateOptions { output_stride: 1000, track_cumulants: true, store_states: false, ..Default::default() };
    let mut last = None;
    let mut keep = |s: &soliton_entanglement::moments::Snapshot<'_>| {
        last = Some((s.state.clone(), s.cumulants.cloned().unwrap()));
    };
    propagate_with(&MomentState::coherent(input(), SCALE), &params, &options, &mut [&mut keep]).unwrap();
    last.unwrap()
}

pub struct Deviations {
    pub alpha: f64,
    pub delta_n: f64,
    pub delta_a: f64,
    pub kappa: f64,
    pub covariance: f64,
}

/// Closure-versus-exact deviations for the two-mode oracle problem at `z`.
pub fn deviations(z: f64) -> Deviations {
    let alpha = input();
    let cutoff = suggested_cutoff(&alpha, SCALE);
    let exact = exact_moments(&exact_propagate(&alpha, SCALE, z, cutoff).unwrap(), SCALE);
    let (m2, m3) = closure_at(z);
    let kappa = rel_dev(m3.kappa_aaa.iter(), exact.cumulants.kappa_aaa.iter())
        .max(rel_dev(m3.kappa_naa.iter(), exact.cumulants.kappa_naa.iter()));
    let cov_got = covariance(&m2, 0, 1).unwrap().entries;
    let cov_exact = covariance(&exact.moments, 0, 1).unwrap().entries;
    Deviations {
        alpha: rel_dev(m2.alpha.iter(), exact.moments.alpha.iter()),
        delta_n: rel_dev(m2.delta_n.iter(), exact.moments.delta_n.iter()),
        delta_a: rel_dev(m2.delta_a.iter(), exact.moments.delta_a.iter()),
        kappa,
        covariance: (cov_got - cov_exact).amax() / cov_exact.amax(),
    }
}

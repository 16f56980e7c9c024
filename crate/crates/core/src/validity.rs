//! Third-order cumulants and the Gaussian-closure validity metric.
//!
//! Two connected moments of the fluctuation `d_k = a_k - alpha_k`
//! (`a_k = sqrt(L) psi_k`) are tracked:
//!
//! * `kappa_aaa[k,l,m] = <d_k d_l d_m>`, fully symmetric;
//! * `kappa_naa[k,l,m] = <d_k^+ d_l d_m>`, symmetric in `l, m`.
//!
//! Their equations of motion follow from the Heisenberg equations with all
//! cumulants of order four and higher set to zero; the derivation is written
//! out in `docs/third_cumulants.md`. The second-order system is not fed back
//! from these cumulants: they only monitor how far the state has drifted
//! from Gaussian.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::moments::MomentState;
use crate::params::SystemParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Denominators below this make [`err_metric`] undefined.
pub const DENOMINATOR_FLOOR: f64 = 1e-300;
/// Default trust cap on [`err_metric`].
pub const DEFAULT_ERR_CAP: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidityError {
    #[error("site index out of range: ({k}, {l}, {m}) with {n} sites")]
    IndexOutOfRange { k: usize, l: usize, m: usize, n: usize },
    #[error("moments in unscaled units need L > 0")]
    ZeroScale,
    #[error("all third moments vanish; Err is undefined")]
    DegenerateDenominator,
    #[error("cumulant state has {got} sites, moment state has {expected}")]
    SizeMismatch { got: usize, expected: usize },
}

/// Normally ordered third-moment patterns entering the validity metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThirdPattern {
    /// `psi_k psi_l psi_m`
    Annihilation,
    /// `psi_k^+ psi_l psi_m`
    Mixed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThirdCumulantState {
    pub n: usize,
    pub kappa_aaa: Vec<Complex64>,
    pub kappa_naa: Vec<Complex64>,
}

impl ThirdCumulantState {
    pub fn zeros(n: usize) -> Self {
        Self { n, kappa_aaa: vec![ZERO; n * n * n], kappa_naa: vec![ZERO; n * n * n] }
    }

    #[inline]
    pub fn index(&self, k: usize, l: usize, m: usize) -> usize {
        (k * self.n + l) * self.n + m
    }

    pub fn aaa(&self, k: usize, l: usize, m: usize) -> Complex64 {
        self.kappa_aaa[self.index(k, l, m)]
    }

    pub fn naa(&self, k: usize, l: usize, m: usize) -> Complex64 {
        self.kappa_naa[self.index(k, l, m)]
    }

    pub(crate) fn from_flat(n: usize, y: &[Complex64]) -> Self {
        let n3 = n * n * n;
        Self { n, kappa_aaa: y[..n3].to_vec(), kappa_naa: y[n3..2 * n3].to_vec() }
    }

    pub(crate) fn write_flat(&self, out: &mut [Complex64]) {
        let n3 = self.kappa_aaa.len();
        out[..n3].copy_from_slice(&self.kappa_aaa);
        out[n3..2 * n3].copy_from_slice(&self.kappa_naa);
    }

    /// Largest violation of the index symmetries.
    pub fn symmetry_error(&self) -> f64 {
        let n = self.n;
        let mut e: f64 = 0.0;
        for k in 0..n {
            for l in 0..n {
                for m in 0..n {
                    let x = self.aaa(k, l, m);
                    for y in [self.aaa(k, m, l), self.aaa(l, k, m), self.aaa(m, l, k)] {
                        e = e.max((x - y).norm());
                    }
                    e = e.max((self.naa(k, l, m) - self.naa(k, m, l)).norm());
                }
            }
        }
        e
    }
}

/// Symmetrizes cumulant tensors stored flat; returns the largest correction.
pub(crate) fn symmetrize_flat(n: usize, y: &mut [Complex64]) -> f64 {
    let n3 = n * n * n;
    let idx = |k: usize, l: usize, m: usize| (k * n + l) * n + m;
    let mut worst: f64 = 0.0;
    let (aaa, naa) = y.split_at_mut(n3);
    for k in 0..n {
        for l in k..n {
            for m in l..n {
                let perms = [idx(k, l, m), idx(k, m, l), idx(l, k, m), idx(l, m, k), idx(m, k, l), idx(m, l, k)];
                let avg = perms.iter().map(|&i| aaa[i]).sum::<Complex64>() / 6.0;
                for &i in &perms {
                    worst = worst.max((aaa[i] - avg).norm());
                    aaa[i] = avg;
                }
            }
        }
    }
    for k in 0..n {
        for l in 0..n {
            for m in l + 1..n {
                let (a, b) = (idx(k, l, m), idx(k, m, l));
                let avg = (naa[a] + naa[b]) * 0.5;
                worst = worst.max((naa[a] - avg).norm());
                naa[a] = avg;
                naa[b] = avg;
            }
        }
    }
    worst
}

/// Read-only view of the flat moment and cumulant blocks.
struct View<'a> {
    n: usize,
    alpha: &'a [Complex64],
    dn: &'a [Complex64],
    da: &'a [Complex64],
    aaa: &'a [Complex64],
    naa: &'a [Complex64],
}

impl View<'_> {
    #[inline]
    fn nn(&self, k: usize, l: usize) -> Complex64 {
        self.dn[k * self.n + l]
    }
    #[inline]
    fn an(&self, k: usize, l: usize) -> Complex64 {
        self.da[k * self.n + l]
    }
    #[inline]
    fn m(&self, k: usize, l: usize, m: usize) -> Complex64 {
        self.aaa[(k * self.n + l) * self.n + m]
    }
    #[inline]
    fn x(&self, k: usize, l: usize, m: usize) -> Complex64 {
        self.naa[(k * self.n + l) * self.n + m]
    }
    /// Sum over the neighbours `j +- 1` of `f(j')`, zero outside the chain.
    #[inline]
    fn hop(&self, j: usize, f: impl Fn(usize) -> Complex64) -> Complex64 {
        let mut s = ZERO;
        if j > 0 {
            s += f(j - 1);
        }
        if j + 1 < self.n {
            s += f(j + 1);
        }
        s
    }

    /// `<(D d_j) d_p d_q>` with `D d_j` the normally ordered fluctuation derivative.
    fn t(&self, j: usize, p: usize, q: usize) -> Complex64 {
        let aj = self.alpha[j];
        let (njp, njq, njj) = (self.nn(j, p), self.nn(j, q), self.nn(j, j));
        let (ajp, ajq, ajj) = (self.an(j, p), self.an(j, q), self.an(j, j));
        let mjpq = self.m(j, p, q);
        let xjpq = self.x(j, p, q);
        I * (self.hop(j, |jj| self.m(jj, p, q))
            + mjpq * (2.0 * aj.norm_sqr())
            + aj * aj * xjpq
            + aj.conj() * ajp * ajq * 2.0
            + aj * (njp * ajq + njq * ajp) * 2.0
            + njj * mjpq * 2.0
            + njp * self.m(j, j, q)
            + njq * self.m(j, j, p)
            + ajj * xjpq
            + ajp * self.x(j, j, q) * 2.0
            + ajq * self.x(j, j, p) * 2.0)
    }

    /// `<(D d_k^+) d_l d_m>`.
    fn u(&self, k: usize, l: usize, m: usize) -> Complex64 {
        let ak = self.alpha[k];
        let akc = ak.conj();
        let (nkl, nkm, nkk) = (self.nn(k, l), self.nn(k, m), self.nn(k, k));
        let (akl, akm, akk) = (self.an(k, l), self.an(k, m), self.an(k, k));
        let mklm = self.m(k, l, m);
        let xklm = self.x(k, l, m);
        -I * (self.hop(k, |kk| self.x(kk, l, m))
            + xklm * (2.0 * ak.norm_sqr())
            + akc * akc * mklm
            + ak * nkl * nkm * 2.0
            + akc * (nkl * akm + nkm * akl) * 2.0
            + akk.conj() * mklm
            + nkk * xklm * 2.0
            + nkl * self.x(k, k, m) * 2.0
            + nkm * self.x(k, k, l) * 2.0
            + akl * self.x(m, k, k).conj()
            + akm * self.x(l, k, k).conj())
    }

    /// `<d_k^+ (D d_j) d_q>` in normal order.
    fn r(&self, k: usize, j: usize, q: usize) -> Complex64 {
        let aj = self.alpha[j];
        let (nkj, njq, njj) = (self.nn(k, j), self.nn(j, q), self.nn(j, j));
        let (akj, ajq, ajj) = (self.an(k, j), self.an(j, q), self.an(j, j));
        let xkjq = self.x(k, j, q);
        let xqkj_c = self.x(q, k, j).conj();
        I * (self.hop(j, |jj| self.x(k, jj, q))
            + xkjq * (2.0 * aj.norm_sqr())
            + aj * aj * xqkj_c
            + aj.conj() * nkj * ajq * 2.0
            + aj * (akj.conj() * ajq + nkj * njq) * 2.0
            + akj.conj() * self.m(j, j, q)
            + nkj * self.x(j, j, q) * 2.0
            + njj * xkjq * 2.0
            + njq * self.x(k, j, j)
            + ajj * xqkj_c
            + ajq * self.x(j, k, j).conj() * 2.0)
    }
}

/// Flat-layout kernel. `m2` is the moment block `[alpha | delta_n | delta_a]`
/// in physical (`L`-scaled) form; `m3` is `[kappa_aaa | kappa_naa]`.
pub(crate) fn third_cumulant_rhs_into(
    n: usize,
    quantum_scale: f64,
    absorption: f64,
    m2: &[Complex64],
    m3: &[Complex64],
    d3: &mut [Complex64],
) {
    let n2 = n * n;
    let n3 = n2 * n;
    if quantum_scale == 0.0 {
        // Rescaled classical limit: physical third cumulants vanish identically.
        for (d, k) in d3.iter_mut().zip(m3) {
            *d = -*k * (1.5 * absorption);
        }
        return;
    }
    let v = View {
        n,
        alpha: &m2[..n],
        dn: &m2[n..n + n2],
        da: &m2[n + n2..n + 2 * n2],
        aaa: &m3[..n3],
        naa: &m3[n3..2 * n3],
    };
    let lq = quantum_scale;
    let damp = 1.5 * absorption;
    let (d_aaa, d_naa) = d3.split_at_mut(n3);

    // Only the independent entries are evaluated (k <= l <= m for the fully
    // symmetric tensor, l <= m for the mixed one); the rest are mirrored.
    let sorted: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let ak = v.alpha[k];
            let mut out = Vec::with_capacity((n - k) * (n - k + 1) / 2);
            for l in k..n {
                for m in l..n {
                    let d = v.t(k, l, m) + v.t(l, k, m) + v.t(m, k, l);
                    let mut corr = ZERO;
                    if k == l {
                        corr += I * (ak * v.an(k, m) * 2.0 + v.m(k, k, m));
                    }
                    if k == m {
                        corr += I * (ak * v.an(k, l) * 2.0 + v.m(k, k, l));
                    }
                    if l == m {
                        corr += I * (v.alpha[l] * v.an(l, k) * 2.0 + v.m(l, l, k));
                    }
                    out.push(d + corr * lq - v.m(k, l, m) * damp);
                }
            }
            out
        })
        .collect();
    for (k, values) in sorted.iter().enumerate() {
        let mut it = values.iter();
        for l in k..n {
            for m in l..n {
                let d = *it.next().expect("one value per sorted triple");
                for (a, b, c) in [(k, l, m), (k, m, l), (l, k, m), (l, m, k), (m, k, l), (m, l, k)] {
                    d_aaa[(a * n + b) * n + c] = d;
                }
            }
        }
    }

    d_naa.par_chunks_mut(n2).enumerate().for_each(|(k, block)| {
        for l in 0..n {
            for m in l..n {
                let mut d = v.u(k, l, m) + v.r(k, l, m) + v.r(k, m, l);
                if l == m {
                    d += I * (v.alpha[m] * v.nn(k, m) * 2.0 + v.x(k, m, m)) * lq;
                }
                d -= v.x(k, l, m) * damp;
                block[l * n + m] = d;
                block[m * n + l] = d;
            }
        }
    });
}

/// Derivative of the third cumulants given the current Gaussian moments.
pub fn third_cumulant_rhs(
    m2: &MomentState,
    m3: &ThirdCumulantState,
    params: &SystemParams,
) -> Result<ThirdCumulantState, ValidityError> {
    let n = m2.n_sites();
    if m3.n != n {
        return Err(ValidityError::SizeMismatch { got: m3.n, expected: n });
    }
    let mut y2 = vec![ZERO; MomentState::flat_len(n)];
    m2.write_flat(&mut y2);
    let mut y3 = vec![ZERO; 2 * n * n * n];
    m3.write_flat(&mut y3);
    let mut d3 = y3.clone();
    third_cumulant_rhs_into(n, m2.quantum_scale, params.absorption, &y2, &y3, &mut d3);
    Ok(ThirdCumulantState::from_flat(n, &d3))
}

/// Gaussian third moment in `L`-scaled units (`L^{3/2} <...>`).
fn scaled_gaussian_moment(state: &MomentState, pattern: ThirdPattern, k: usize, l: usize, m: usize) -> Complex64 {
    let a = &state.alpha;
    // <X1 X2 X3> = sum_cyc <X_i><X_j X_k> - 2 <X1><X2><X3>
    let pair_aa = |i: usize, j: usize| state.delta_a[(i, j)] + a[i] * a[j];
    let pair_na = |i: usize, j: usize| state.delta_n[(i, j)] + a[i].conj() * a[j];
    match pattern {
        ThirdPattern::Annihilation => {
            a[k] * pair_aa(l, m) + a[l] * pair_aa(k, m) + a[m] * pair_aa(k, l) - a[k] * a[l] * a[m] * 2.0
        }
        ThirdPattern::Mixed => {
            a[k].conj() * pair_aa(l, m) + a[l] * pair_na(k, m) + a[m] * pair_na(k, l)
                - a[k].conj() * a[l] * a[m] * 2.0
        }
    }
}

/// Full (non-centred) third moment of the unscaled field operators implied
/// by the Gaussian factorization of the current first and second moments.
pub fn gaussian_third_moment(
    state: &MomentState,
    pattern: ThirdPattern,
    k: usize,
    l: usize,
    m: usize,
) -> Result<Complex64, ValidityError> {
    let n = state.n_sites();
    if k >= n || l >= n || m >= n {
        return Err(ValidityError::IndexOutOfRange { k, l, m, n });
    }
    if !(state.quantum_scale > 0.0) {
        return Err(ValidityError::ZeroScale);
    }
    Ok(scaled_gaussian_moment(state, pattern, k, l, m) / state.quantum_scale.powf(1.5))
}

/// Ratio of the largest `(k,k,l)` third cumulant to the largest Gaussian
/// third moment of the same patterns.
///
/// In the rescaled classical limit the cumulants vanish and the metric is 0.
pub fn err_metric(m2: &MomentState, m3: &ThirdCumulantState) -> Result<f64, ValidityError> {
    let n = m2.n_sites();
    if m3.n != n {
        return Err(ValidityError::SizeMismatch { got: m3.n, expected: n });
    }
    let mut numerator: f64 = 0.0;
    let mut denominator: f64 = 0.0;
    for k in 0..n {
        for l in 0..n {
            numerator = numerator.max(m3.naa(k, k, l).norm()).max(m3.aaa(k, k, l).norm());
            denominator = denominator
                .max(scaled_gaussian_moment(m2, ThirdPattern::Mixed, k, k, l).norm())
                .max(scaled_gaussian_moment(m2, ThirdPattern::Annihilation, k, k, l).norm());
        }
    }
    if denominator < DENOMINATOR_FLOOR {
        return Err(ValidityError::DegenerateDenominator);
    }
    if m2.is_rescaled() {
        return Ok(0.0);
    }
    Ok(numerator / denominator)
}

/// First `z` at which `err` exceeds `cap`, linearly interpolated between
/// samples. `None` if the series never crosses.
pub fn validity_limit(z: &[f64], err: &[f64], cap: f64) -> Option<f64> {
    for i in 0..z.len().min(err.len()) {
        if err[i] > cap {
            if i == 0 {
                return Some(z[0]);
            }
            let t = (cap - err[i - 1]) / (err[i] - err[i - 1]);
            return Some(z[i - 1] + t * (z[i] - z[i - 1]));
        }
    }
    None
}

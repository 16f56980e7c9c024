//! Classical discrete nonlinear Schrodinger (DNLS) dynamics on an open chain.
//!
//! `d alpha_k / dz = i (alpha_{k-1} + alpha_{k+1}) + i |alpha_k|^2 alpha_k`,
//! with missing neighbours at the two edges contributing zero.

use num_complex::Complex64;

use crate::integrator::Rk4;

/// Mean-field amplitudes `alpha_k`, one per waveguide.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalField(pub Vec<Complex64>);

impl ClassicalField {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self(amplitudes)
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    /// Multiplies every amplitude by `exp(i phase)`.
    pub fn rotated(&self, phase: f64) -> Self {
        let r = Complex64::from_polar(1.0, phase);
        Self(self.0.iter().map(|a| a * r).collect())
    }
}

/// Sum of the two nearest neighbours of site `k` (zero outside the chain).
#[inline]
pub(crate) fn neighbour_sum(values: &[Complex64], k: usize) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    if k > 0 {
        s += values[k - 1];
    }
    if k + 1 < values.len() {
        s += values[k + 1];
    }
    s
}

pub(crate) fn dnls_rhs_into(alpha: &[Complex64], out: &mut [Complex64]) {
    let i = Complex64::i();
    for k in 0..alpha.len() {
        let a = alpha[k];
        out[k] = i * (neighbour_sum(alpha, k) + a * a.norm_sqr());
    }
}

pub fn dnls_rhs(field: &ClassicalField) -> ClassicalField {
    let mut out = vec![Complex64::new(0.0, 0.0); field.len()];
    dnls_rhs_into(&field.0, &mut out);
    ClassicalField(out)
}

/// Norm `sum |alpha_k|^2` and Hamiltonian
/// `sum 2 Re(alpha_k^* alpha_{k+1}) + 1/2 sum |alpha_k|^4`, both conserved by [`dnls_rhs`].
pub fn classical_invariants(field: &ClassicalField) -> (f64, f64) {
    let a = &field.0;
    let norm: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let hopping: f64 = a.windows(2).map(|w| 2.0 * (w[0].conj() * w[1]).re).sum();
    let kerr: f64 = a.iter().map(|x| 0.5 * x.norm_sqr().powi(2)).sum();
    (norm, hopping + kerr)
}

/// Integrates the classical DNLS from `field` over `[0, z]` with fixed-step RK4.
pub fn evolve_classical(field: &ClassicalField, z: f64, step: f64) -> ClassicalField {
    let n_steps = (z / step - 1e-9).ceil().max(1.0) as usize;
    let mut y = field.0.clone();
    let mut rk = Rk4::new(y.len());
    rk.integrate(&dnls_rhs_into, &mut y, z, n_steps);
    ClassicalField(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_field_is_fixed_point() {
        let d = dnls_rhs(&ClassicalField::zeros(5));
        assert!(d.0.iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn two_site_substitution() {
        let d = dnls_rhs(&ClassicalField::from_real(&[1.0, 0.0]));
        assert_eq!(d.0, vec![c(0.0, 1.0), c(0.0, 1.0)]);
    }

    #[test]
    fn invariants_of_simple_fields() {
        assert_eq!(classical_invariants(&ClassicalField::zeros(3)), (0.0, 0.0));
        assert_eq!(classical_invariants(&ClassicalField::from_real(&[2.0])), (4.0, 8.0));
    }

    #[test]
    fn invariants_conserved_along_trajectory() {
        let field = ClassicalField::new(vec![c(1.0, 0.2), c(-0.5, 0.7), c(1.3, 0.0), c(0.0, -0.4)]);
        let (n0, h0) = classical_invariants(&field);
        let end = evolve_classical(&field, 1.0, 1e-4);
        let (n1, h1) = classical_invariants(&end);
        assert!((n1 - n0).abs() < 1e-8, "norm drift {}", n1 - n0);
        assert!((h1 - h0).abs() < 1e-8, "hamiltonian drift {}", h1 - h0);
    }

    proptest! {
        #[test]
        fn rhs_is_phase_equivariant(
            values in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..8),
            phase in -3.2f64..3.2,
        ) {
            let field = ClassicalField::new(values.iter().map(|&(r, i)| c(r, i)).collect());
            let lhs = dnls_rhs(&field.rotated(phase));
            let rhs = dnls_rhs(&field).rotated(phase);
            for (a, b) in lhs.0.iter().zip(&rhs.0) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }
    }
}

//! Runge-Kutta integration of autonomous complex ODE systems stored as flat vectors.

use num_complex::Complex64;

/// Right-hand side of an autonomous system `dy/dz = f(y)`.
pub trait Rhs {
    fn eval(&self, y: &[Complex64], dy: &mut [Complex64]);
}

impl<F> Rhs for F
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    fn eval(&self, y: &[Complex64], dy: &mut [Complex64]) {
        self(y, dy)
    }
}

/// Classical fixed-step fourth-order Runge-Kutta with reusable stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        let zero = vec![Complex64::new(0.0, 0.0); dim];
        Self { k1: zero.clone(), k2: zero.clone(), k3: zero.clone(), k4: zero.clone(), tmp: zero }
    }

    pub fn dim(&self) -> usize {
        self.k1.len()
    }

    /// Advances `y` in place by one step of size `h`.
    pub fn step<R: Rhs + ?Sized>(&mut self, rhs: &R, y: &mut [Complex64], h: f64) {
        debug_assert_eq!(y.len(), self.dim());
        let half = 0.5 * h;
        rhs.eval(y, &mut self.k1);
        for ((t, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *t = yi + k * half;
        }
        rhs.eval(&self.tmp, &mut self.k2);
        for ((t, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *t = yi + k * half;
        }
        rhs.eval(&self.tmp, &mut self.k3);
        for ((t, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *t = yi + k * h;
        }
        rhs.eval(&self.tmp, &mut self.k4);
        let sixth = h / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * sixth;
        }
    }

    /// Integrates over `span` using `n` equal steps.
    pub fn integrate<R: Rhs + ?Sized>(&mut self, rhs: &R, y: &mut [Complex64], span: f64, n: usize) {
        let h = span / n as f64;
        for _ in 0..n {
            self.step(rhs, y, h);
        }
    }
}

/// Step-doubling error control around [`Rk4`]. Used when a run opts into
/// adaptive stepping; output points are still hit exactly.
#[derive(Debug, Clone)]
pub struct AdaptiveRk4 {
    rk: Rk4,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    pub tolerance: f64,
    pub min_step: f64,
    h: f64,
}

impl AdaptiveRk4 {
    pub fn new(dim: usize, initial_step: f64, tolerance: f64) -> Self {
        Self {
            rk: Rk4::new(dim),
            full: vec![Complex64::new(0.0, 0.0); dim],
            half: vec![Complex64::new(0.0, 0.0); dim],
            tolerance,
            min_step: initial_step * 1e-6,
            h: initial_step,
        }
    }

    /// Integrates over `span`, returning the number of accepted steps, or
    /// `None` if the step size collapsed below `min_step`.
    pub fn integrate<R: Rhs + ?Sized>(&mut self, rhs: &R, y: &mut [Complex64], span: f64) -> Option<usize> {
        let mut done = 0.0;
        let mut accepted = 0;
        while span - done > 1e-14 * span.max(1.0) {
            let h = self.h.min(span - done);
            self.full.copy_from_slice(y);
            self.rk.step(rhs, &mut self.full, h);
            self.half.copy_from_slice(y);
            self.rk.step(rhs, &mut self.half, 0.5 * h);
            self.rk.step(rhs, &mut self.half, 0.5 * h);

            let mut err: f64 = 0.0;
            for (a, b) in self.full.iter().zip(&self.half) {
                let scale = 1.0 + b.norm();
                err = err.max((a - b).norm() / scale);
            }
            err /= 15.0;

            if err <= self.tolerance || h <= self.min_step {
                if h <= self.min_step && err > self.tolerance {
                    return None;
                }
                // Richardson extrapolation of the two estimates.
                for ((yi, &a), &b) in y.iter_mut().zip(&self.full).zip(&self.half) {
                    *yi = b + (b - a) / 15.0;
                }
                done += h;
                accepted += 1;
            }
            let factor = if err > 0.0 { 0.9 * (self.tolerance / err).powf(0.2) } else { 4.0 };
            let next = h * factor.clamp(0.2, 4.0);
            // Keep the unclipped step if we only shortened it to land on `span`.
            self.h = if h < self.h && err <= self.tolerance { self.h.max(next) } else { next };
        }
        Some(accepted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(y: &[Complex64], dy: &mut [Complex64]) {
        for (d, v) in dy.iter_mut().zip(y) {
            *d = Complex64::i() * v;
        }
    }

    #[test]
    fn rk4_matches_exponential() {
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let mut rk = Rk4::new(1);
        rk.integrate(&rotation, &mut y, 1.0, 1000);
        let exact = Complex64::new(0.0, 1.0).exp();
        assert!((y[0] - exact).norm() < 1e-12);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let run = |n: usize| {
            let mut y = vec![Complex64::new(1.0, 0.0)];
            Rk4::new(1).integrate(&rotation, &mut y, 2.0, n);
            (y[0] - Complex64::new(0.0, 2.0).exp()).norm()
        };
        let ratio = run(20) / run(40);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn adaptive_hits_tolerance() {
        let mut y = vec![Complex64::new(1.0, 0.0)];
        let mut ad = AdaptiveRk4::new(1, 0.5, 1e-10);
        let steps = ad.integrate(&rotation, &mut y, 3.0).unwrap();
        assert!(steps > 3);
        assert!((y[0] - Complex64::new(0.0, 3.0).exp()).norm() < 1e-8);
    }
}

//! Fixed-step classical Runge–Kutta integration of complex linear ODEs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::scalar::Real;

/// Row-major list of the nonzero entries of a dense matrix.
#[derive(Clone, Debug)]
pub struct SparseMatrix<T: Real> {
    n: usize,
    entries: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn from_dense(m: &DMatrix<Complex<T>>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let mut entries = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != zero {
                    entries.push((i, j, v));
                }
            }
        }
        Self { n: m.nrows(), entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// `y += factor · A x`.
    #[inline]
    pub fn apply_acc(&self, x: &DVector<Complex<T>>, y: &mut DVector<Complex<T>>, factor: Complex<T>) {
        for &(i, j, v) in &self.entries {
            y[i] += factor * v * x[j];
        }
    }
}

/// Classical fourth-order Runge–Kutta stepper with reusable stage buffers.
pub struct Rk4<T: Real> {
    k1: DVector<Complex<T>>,
    k2: DVector<Complex<T>>,
    k3: DVector<Complex<T>>,
    k4: DVector<Complex<T>>,
    tmp: DVector<Complex<T>>,
}

impl<T: Real> Rk4<T> {
    pub fn new(n: usize) -> Self {
        Self {
            k1: DVector::zeros(n),
            k2: DVector::zeros(n),
            k3: DVector::zeros(n),
            k4: DVector::zeros(n),
            tmp: DVector::zeros(n),
        }
    }

    /// Advances `y` from `t` to `t + h`. `f(t, y, out)` must overwrite `out`
    /// with `dy/dt`.
    pub fn step<F>(&mut self, f: &mut F, t: T, y: &mut DVector<Complex<T>>, h: T)
    where
        F: FnMut(T, &DVector<Complex<T>>, &mut DVector<Complex<T>>),
    {
        let two = T::lit(2.0);
        let half = h / two;
        let ch = Complex::new(h, T::zero());
        let chalf = Complex::new(half, T::zero());

        f(t, y, &mut self.k1);

        self.tmp.copy_from(y);
        self.tmp.axpy(chalf, &self.k1, Complex::new(T::one(), T::zero()));
        f(t + half, &self.tmp, &mut self.k2);

        self.tmp.copy_from(y);
        self.tmp.axpy(chalf, &self.k2, Complex::new(T::one(), T::zero()));
        f(t + half, &self.tmp, &mut self.k3);

        self.tmp.copy_from(y);
        self.tmp.axpy(ch, &self.k3, Complex::new(T::one(), T::zero()));
        f(t + h, &self.tmp, &mut self.k4);

        let sixth = Complex::new(h / T::lit(6.0), T::zero());
        let third = Complex::new(h / T::lit(3.0), T::zero());
        for i in 0..y.len() {
            y[i] += sixth * (self.k1[i] + self.k4[i]) + third * (self.k2[i] + self.k3[i]);
        }
    }
}

/// Number of equal substeps needed to cover `span` with steps no longer than `max_step`.
pub(crate) fn substeps<T: Real>(span: T, max_step: T) -> usize {
    let n = (span / max_step).ceil().as_f64();
    (n as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_fourth_order() {
        // y' = (-1 + 2i) y, y(0) = 1.
        let rate = Complex::new(-1.0f64, 2.0);
        let exact = (rate * 1.0).exp();
        let mut errs = Vec::new();
        for &n in &[20usize, 40, 80] {
            let h = 1.0 / n as f64;
            let mut rk = Rk4::new(1);
            let mut y = DVector::from_element(1, Complex::new(1.0, 0.0));
            let mut f = |_t: f64, y: &DVector<Complex<f64>>, out: &mut DVector<Complex<f64>>| {
                out[0] = rate * y[0];
            };
            for k in 0..n {
                rk.step(&mut f, k as f64 * h, &mut y, h);
            }
            errs.push((y[0] - exact).norm());
        }
        assert!(errs[0] / errs[1] > 14.0 && errs[1] / errs[2] > 14.0, "{errs:?}");
    }

    #[test]
    fn sparse_matches_dense() {
        let m = DMatrix::from_fn(4, 4, |i, j| {
            if (i + j) % 3 == 0 {
                Complex::new(i as f64, j as f64)
            } else {
                Complex::new(0.0, 0.0)
            }
        });
        let x = DVector::from_fn(4, |i, _| Complex::new(1.0 + i as f64, -0.5));
        let sp = SparseMatrix::from_dense(&m);
        let mut y = DVector::zeros(4);
        sp.apply_acc(&x, &mut y, Complex::new(1.0, 0.0));
        assert!((y - &m * &x).norm() < 1e-14);
        assert_eq!(sp.dim(), 4);
        assert!(sp.nnz() < 16);
    }
}

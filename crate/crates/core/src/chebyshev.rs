//! Chebyshev series on `[-1, 1]`: interpolation at first-kind nodes, Clenshaw
//! evaluation, and spectral differentiation and integration of coefficients.

use std::f64::consts::PI;

/// A truncated Chebyshev series `sum_k c_k T_k(x)` on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev {
    pub coeffs: Vec<f64>,
}

/// First-kind (Gauss-Chebyshev) nodes `cos(pi (j + 1/2) / n)`, descending.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| (PI * (j as f64 + 0.5) / n as f64).cos()).collect()
}

impl Chebyshev {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "empty Chebyshev series");
        Self { coeffs }
    }

    /// Interpolant through `values[j] = f(nodes(n)[j])`.
    pub fn interpolate(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n > 0);
        let nf = n as f64;
        let coeffs = (0..n)
            .map(|k| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / nf).cos())
                    .sum();
                let scale = if k == 0 { 1.0 / nf } else { 2.0 / nf };
                s * scale
            })
            .collect();
        Self { coeffs }
    }

    /// Interpolant of `f` at `n` first-kind nodes.
    pub fn fit<F: FnMut(f64) -> f64>(n: usize, mut f: F) -> Self {
        let v: Vec<f64> = nodes(n).into_iter().map(&mut f).collect();
        Self::interpolate(&v)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        let x2 = 2.0 * x;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + x2 * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + x * b1 - b2
    }

    /// Coefficients of the derivative series.
    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n == 1 {
            return Self { coeffs: vec![0.0] };
        }
        let mut d = vec![0.0; n];
        for k in (1..n).rev() {
            let next = if k + 1 < n { d[k + 1] } else { 0.0 };
            d[k - 1] = next + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        Self { coeffs: d }
    }

    /// Antiderivative vanishing at `x = -1`.
    pub fn antiderivative(&self) -> Self {
        let n = self.coeffs.len();
        let c = |k: usize| -> f64 {
            if k < n {
                self.coeffs[k] * if k == 0 { 2.0 } else { 1.0 }
            } else {
                0.0
            }
        };
        let mut a = vec![0.0; n + 1];
        for (k, slot) in a.iter_mut().enumerate().skip(1) {
            *slot = (c(k - 1) - c(k + 1)) / (2.0 * k as f64);
        }
        let mut series = Self { coeffs: a };
        let at_minus_one = series.eval(-1.0);
        series.coeffs[0] = -at_minus_one;
        series
    }

    /// Largest absolute value among the last `tail` coefficients, a proxy for
    /// the truncation error of the series.
    pub fn tail_magnitude(&self, tail: usize) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n.saturating_sub(tail)..]
            .iter()
            .fold(0.0, |m, c| m.max(c.abs()))
    }
}

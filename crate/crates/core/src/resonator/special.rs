//! Normalized Riccati-Bessel families of half-integer order `L + 1/2`, each an
//! entire function of `x^2` (or a polynomial) so that no branch of `x` enters.
//!
//! * `phi_L(x) = (2L+1)!! j_L(x) / x^L`, regular, `phi_L(0) = 1`;
//!   `phi_{-1} = cos x`, `phi_0 = sin x / x`.
//! * `psi_L(x) = -x^{L+1} y_L(x) / (2L-1)!!`, irregular, `psi_L(0) = 1`;
//!   `psi_{-1} = sin x / x`, `psi_0 = cos x`.
//! * `chi_L(x) = i x^{L+1} h+_L(x) e^{-ix} / (2L-1)!!`, a polynomial of degree
//!   `L`; `chi_0 = 1`, `chi_1 = 1 - ix`.
//!
//! `psi` and `chi` obey `X_L = X_{L-1} - x^2 X_{L-2} / ((2L-1)(2L-3))`, run
//! upward. `phi` is the minimal solution of the same recurrence and is built
//! from downward ratios.
//!
//! For `Im x < 0` the outgoing function decays relative to the incoming one
//! as `L` passes `|x|`, so upward recurrence for `chi(x)` and `psi(x)` loses
//! about `e^{2 |Im x|}`. There both are rebuilt from `phi(x)` and the stable
//! incoming polynomial `chi(-x)`:
//! `chi_L(x) = e^{-2ix} chi_L(-x) + 2i C_L phi_L(x) e^{-ix}` and
//! `psi_L(x) = i C_L phi_L(x) + e^{-ix} chi_L(-x)`, where
//! `C_L = x^{2L+1} / ((2L+1)!! (2L-1)!!)`.

use num_complex::Complex64;

fn sinc(x: Complex64) -> Complex64 {
    if x.norm() < 1e-4 {
        let x2 = x * x;
        Complex64::new(1.0, 0.0) - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Power series of `phi_L` about 0.
fn phi_series(l: u32, x2: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let lf = f64::from(l);
    for k in 0..200 {
        let kf = k as f64;
        term *= -x2 * 0.5 / ((kf + 1.0) * (2.0 * lf + 2.0 * kf + 3.0));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// `(phi_{L-1}(x), phi_L(x))`.
pub fn phi_pair(l: u32, x: Complex64) -> (Complex64, Complex64) {
    let x2 = x * x;
    if l == 0 {
        return (x.cos(), sinc(x));
    }
    let small = x2.norm() <= 0.5 * f64::from(2 * l + 1);
    if small {
        return (phi_series(l - 1, x2), phi_series(l, x2));
    }
    let ax = x.norm();
    let n = (f64::from(l).max(ax) + 50.0 + 0.5 * ax).ceil() as usize;
    // t[m] = phi_m / phi_{m-1}, from the top of the recurrence downward
    let mut t = vec![Complex64::new(0.0, 0.0); l as usize + 1];
    let mut next = Complex64::new(0.0, 0.0);
    for m in (0..=n).rev() {
        let mf = m as f64;
        let mut den = Complex64::new(1.0, 0.0) - x2 * next / ((2.0 * mf + 1.0) * (2.0 * mf + 3.0));
        if den.norm() == 0.0 {
            den = Complex64::new(f64::EPSILON, 0.0);
        }
        let cur = den.inv();
        if m <= l as usize {
            t[m] = cur;
        }
        next = cur;
    }
    // start from whichever of phi_{-1}, phi_0 is better separated from zero
    let (c, s) = (x.cos(), x.sin());
    let (mut val, start) = if c.norm() >= s.norm() {
        (c, 0usize)
    } else {
        (s / x, 1usize)
    };
    let mut prev = val;
    for tm in t.iter().take(l as usize + 1).skip(start) {
        prev = val;
        val *= tm;
    }
    (prev, val)
}

fn psi_forward(l: u32, x: Complex64) -> (Complex64, Complex64) {
    let x2 = x * x;
    let mut pm1 = sinc(x);
    let mut p0 = x.cos();
    if l == 0 {
        return (x * x.sin(), p0);
    }
    for m in 1..=l {
        let mf = f64::from(m);
        let p1 = p0 - x2 * pm1 / ((2.0 * mf - 1.0) * (2.0 * mf - 3.0));
        pm1 = p0;
        p0 = p1;
    }
    (x2 * pm1, p0)
}

fn chi_forward(l: u32, x: Complex64) -> (Complex64, Complex64) {
    let x2 = x * x;
    let i = Complex64::new(0.0, 1.0);
    if l == 0 {
        return (-i * x, Complex64::new(1.0, 0.0));
    }
    let mut cm1 = Complex64::new(1.0, 0.0);
    let mut c0 = Complex64::new(1.0, 0.0) - i * x;
    for m in 2..=l {
        let mf = f64::from(m);
        let c1 = c0 - x2 * cm1 / ((2.0 * mf - 1.0) * (2.0 * mf - 3.0));
        cm1 = c0;
        c0 = c1;
    }
    (x2 * cm1, c0)
}

/// Below this `|Im x|` the forward recurrences lose at most a factor `e^2`.
const REFLECT_DEPTH: f64 = 1.0;

/// `(x C_{L-1}, C_L)`.
fn c_pair(l: u32, x: Complex64) -> (Complex64, Complex64) {
    let x2 = x * x;
    let mut prev = Complex64::new(0.0, 0.0);
    let mut c = x;
    for m in 1..=l {
        let mf = f64::from(m);
        prev = c;
        c *= x2 / ((2.0 * mf + 1.0) * (2.0 * mf - 1.0));
    }
    (x * prev, c)
}

/// `(x^2 psi_{L-1}(x), psi_L(x))`.
pub fn psi_pair(l: u32, x: Complex64) -> (Complex64, Complex64) {
    if l == 0 || x.im.abs() <= REFLECT_DEPTH {
        return psi_forward(l, x);
    }
    if x.im > 0.0 {
        // even in x
        return psi_pair(l, -x);
    }
    let i = Complex64::new(0.0, 1.0);
    let ph = phi_pair(l, x);
    let (xc0, c1) = c_pair(l, x);
    let inc = chi_forward(l, -x);
    let em = (-i * x).exp();
    (i * x * xc0 * ph.0 + em * inc.0, i * c1 * ph.1 + em * inc.1)
}

/// `(x^2 chi_{L-1}(x), chi_L(x))`.
pub fn chi_pair(l: u32, x: Complex64) -> (Complex64, Complex64) {
    if l == 0 || x.im >= -REFLECT_DEPTH {
        return chi_forward(l, x);
    }
    let i = Complex64::new(0.0, 1.0);
    let ph = phi_pair(l, x);
    let (xc0, c1) = c_pair(l, x);
    let inc = chi_forward(l, -x);
    let em = (-i * x).exp();
    let em2 = em * em;
    (
        em2 * inc.0 + 2.0 * i * x * xc0 * ph.0 * em,
        em2 * inc.1 + 2.0 * i * c1 * ph.1 * em,
    )
}

/// Scaled derivative of `r^{L+1} phi_L(qr)`: `(2L+1) phi_{L-1} - L phi_L`.
pub fn phi_deriv(l: u32, pair: (Complex64, Complex64)) -> Complex64 {
    pair.0 * f64::from(2 * l + 1) - pair.1 * f64::from(l)
}

/// Scaled derivative of `r^{-L} X_L(kr)` for `X` in {psi, chi}:
/// `x^2 X_{L-1} / (2L-1) - L X_L`.
pub fn irregular_deriv(l: u32, pair: (Complex64, Complex64)) -> Complex64 {
    pair.0 / (2.0 * f64::from(l) - 1.0) - pair.1 * f64::from(l)
}

//! The function `rho(z) = log((1 + w) / z) - w`, `w = sqrt(1 - z^2)`, on the
//! closed upper half-plane, its derivative, and the curve where `Re rho`
//! changes sign.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{self, Chebyshev};
use crate::error::{Error, Result};

/// A nonzero point of the closed upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperPoint(Complex64);

impl UpperPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.im >= 0.0) || (z.re == 0.0 && z.im == 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain { re: z.re, im: z.im });
        }
        // -0.0 imaginary parts are taken as limits from above
        Ok(Self(Complex64::new(z.re, z.im + 0.0)))
    }

    /// `t e^{i theta}` for `t > 0`, `theta` in `[0, pi]`.
    pub fn polar(t: f64, theta: f64) -> Result<Self> {
        let z = Complex64::from_polar(t, theta);
        // clamp the rounding of sin(pi) to the real axis
        Self::new(Complex64::new(z.re, z.im.max(0.0)))
    }

    pub fn z(self) -> Complex64 {
        self.0
    }
}

/// `sqrt(1 - z^2)` with the principal branch on the open upper half-plane,
/// extended to the real axis by continuity from above.
pub fn sqrt_one_minus_sq(p: UpperPoint) -> Complex64 {
    let z = p.0;
    let s = Complex64::new(1.0, 0.0) - z * z;
    if s.im == 0.0 && s.re < 0.0 {
        // on the real axis with |x| > 1, or where Im(1 - z^2) underflows
        let m = (-s.re).sqrt();
        return Complex64::new(0.0, -m.copysign(z.re));
    }
    s.sqrt()
}

/// `rho(z) = log(1 + w) - log z - w`.
///
/// Splitting the logarithm keeps the value continuous on the closed upper
/// half-plane: `Re(1 + w) >= 1` and `arg z` stays in `[0, pi]`.
pub fn rho(p: UpperPoint) -> Complex64 {
    let w = sqrt_one_minus_sq(p);
    (Complex64::new(1.0, 0.0) + w).ln() - p.0.ln() - w
}

/// `rho'(z) = -sqrt(1 - z^2) / z`.
pub fn rho_prime(p: UpperPoint) -> Complex64 {
    -sqrt_one_minus_sq(p) / p.0
}

fn re_rho_ray(t: f64, theta: f64) -> f64 {
    rho(UpperPoint::polar(t, theta).expect("positive radius")).re
}

fn d_re_rho_ray(t: f64, theta: f64) -> f64 {
    let p = UpperPoint::polar(t, theta).expect("positive radius");
    (Complex64::from_polar(1.0, theta) * rho_prime(p)).re
}

const BRACKET_CAP: f64 = 1.0e6;

/// Radius `r0(theta)` where `Re rho(t e^{i theta})` changes sign from positive
/// to negative.
pub fn sigma_radius(theta: f64, tol: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::InvalidArgument(format!("angle {theta} outside (0, pi)")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be positive")));
    }
    let mut lo = 0.5;
    if re_rho_ray(lo, theta) <= 0.0 {
        return Err(Error::NoBracket { theta, cap: lo });
    }
    let mut hi = 1.0;
    while re_rho_ray(hi, theta) >= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > BRACKET_CAP {
            return Err(Error::NoBracket {
                theta,
                cap: BRACKET_CAP,
            });
        }
    }
    // near the real axis the zero set meets the branch points, where the
    // derivative vanishes like a square root: stay with bisection there
    let bisect_only = theta.sin() < 0.05;
    let switch = if bisect_only { 0.0 } else { 1e-3 };
    while hi - lo > switch {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if re_rho_ray(mid, theta) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if bisect_only {
        return Ok(0.5 * (lo + hi));
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..60 {
        let f = re_rho_ray(r, theta);
        if f > 0.0 {
            lo = lo.max(r);
        } else {
            hi = hi.min(r);
        }
        if f.abs() <= 1e-3 * tol || f == 0.0 {
            return Ok(r);
        }
        let df = d_re_rho_ray(r, theta);
        let mut next = r - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 4.0 * f64::EPSILON * r {
            return Ok(next);
        }
        r = next;
    }
    Ok(r)
}

/// Map between the Chebyshev variable `x` in `[-1, 1]` and the angle
/// `theta = pi sin^2(psi / 2)`, `psi = pi (1 + x) / 2`.
///
/// Functions of `theta^{1/2}` and `(pi - theta)^{1/2}` become smooth in `x`,
/// which is what the angular profile looks like at both ends.
pub mod anglemap {
    use std::f64::consts::{FRAC_PI_2, PI};

    pub fn psi(x: f64) -> f64 {
        FRAC_PI_2 * (1.0 + x)
    }

    pub fn theta(x: f64) -> f64 {
        let half = 0.5 * psi(x);
        if x <= 0.0 {
            let s = half.sin();
            (PI * s * s).clamp(0.0, PI)
        } else {
            let c = half.cos();
            (PI - PI * c * c).clamp(0.0, PI)
        }
    }

    pub fn x_of_theta(theta: f64) -> f64 {
        let t = theta.clamp(0.0, PI);
        let psi = 2.0 * t.sqrt().atan2((PI - t).sqrt());
        psi / FRAC_PI_2 - 1.0
    }

    /// `d theta / d x`.
    pub fn dtheta_dx(x: f64) -> f64 {
        FRAC_PI_2 * FRAC_PI_2 * psi(x).sin()
    }
}

/// Interpolated zero curve of `Re rho` in the upper half-plane, in polar form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaCurve {
    /// `(theta, r0(theta))` at the interpolation nodes, ascending in theta.
    pub nodes: Vec<(f64, f64)>,
    #[serde(skip)]
    series: Option<Chebyshev>,
}

impl SigmaCurve {
    /// Rebuild the interpolant from node data produced by [`build_sigma`].
    pub fn from_nodes(nodes: Vec<(f64, f64)>) -> Self {
        // build_sigma stores the Chebyshev nodes in ascending theta order
        let values: Vec<f64> = nodes.iter().rev().map(|&(_, r)| r).collect();
        let series = Chebyshev::interpolate(&values);
        Self {
            nodes,
            series: Some(series),
        }
    }

    pub fn r0(&self, theta: f64) -> f64 {
        let x = anglemap::x_of_theta(theta);
        match &self.series {
            Some(s) => s.eval(x),
            None => Self::from_nodes(self.nodes.clone()).r0(theta),
        }
    }
}

/// Sample `r0` at `nnodes` Chebyshev nodes of the angle map.
pub fn build_sigma(nnodes: usize, tol: f64) -> Result<SigmaCurve> {
    if nnodes < 16 {
        return Err(Error::InvalidArgument(format!(
            "at least 16 nodes required, got {nnodes}"
        )));
    }
    let xs = chebyshev::nodes(nnodes);
    let mut nodes = Vec::with_capacity(nnodes);
    for &x in xs.iter().rev() {
        let th = anglemap::theta(x);
        nodes.push((th, sigma_radius(th, tol)?));
    }
    Ok(SigmaCurve::from_nodes(nodes))
}

//! The limit distribution `mu = mu0 + mu-` of rescaled resonances: the angular
//! profile `h_d`, the constants `e_d`, `c_d`, the density `kappa`, the
//! potentials `H` and `H_Z`, sector and window masses, and sampling.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::chebyshev::{self, Chebyshev};
use crate::complexfn::{anglemap, rho, sigma_radius, sqrt_one_minus_sq, SigmaCurve, UpperPoint};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_2d, integrate_with_breaks, QuadOptions, Rect};
use crate::window::Window;

pub fn check_dimension(d: u32) -> Result<()> {
    if d < 3 || d.is_multiple_of(2) {
        return Err(Error::InvalidDimension(d));
    }
    Ok(())
}

/// `(d - 2)!` as a float.
pub fn factorial_dm2(d: u32) -> f64 {
    (1..=d.saturating_sub(2)).map(f64::from).product()
}

/// `e_d = sqrt(pi) Gamma((d - 1)/2) / ((d - 2)! Gamma(1 + d/2))`.
pub fn e_const(d: u32) -> Result<f64> {
    check_dimension(d)?;
    let df = f64::from(d);
    let ln = 0.5 * PI.ln() + ln_gamma(0.5 * (df - 1.0)) - ln_gamma(df - 1.0) - ln_gamma(1.0 + 0.5 * df);
    Ok(ln.exp())
}

/// Chebyshev representation of `h_d` and its first two derivatives, in the
/// variable of [`anglemap`].
#[derive(Debug, Clone, PartialEq)]
pub struct AngularProfile {
    pub d: u32,
    pub tol: f64,
    /// `h_d(theta(x))`.
    pub coeffs: Vec<f64>,
    /// `h_d'(theta(x))`.
    pub dcoeffs: Vec<f64>,
    /// `d/dx [h_d'(theta(x))]`; `h_d'' = ddcoeffs / theta'(x)`.
    pub ddcoeffs: Vec<f64>,
    /// Zero curve sampled at the profile nodes.
    pub sigma: SigmaCurve,
    h: Chebyshev,
    dh: Chebyshev,
    ddh: Chebyshev,
    dddh: Chebyshev,
    hint: Chebyshev,
}

/// Values of `h_d(theta)` and `h_d'(theta)` from their ray integrals.
pub fn profile_integrals(d: u32, theta: f64, r0: f64, tol: f64) -> Result<(f64, f64)> {
    let fact = factorial_dm2(d);
    let pref = 4.0 / fact;
    let dm1 = f64::from(d - 1);
    // |Re rho|, |Im w| <= 2 t for t >= 4: the tail beyond T is below tol / 2
    let t_cut = (16.0 / (fact * dm1 * tol)).powf(1.0 / dm1).max(4.0);
    let mut breaks = vec![r0];
    if r0 < 1.0 && 1.0 < 2.0 * r0 {
        breaks.push(1.0);
    }
    let mut t = 2.0 * r0;
    while t < t_cut {
        breaks.push(t);
        t *= 2.0;
    }
    breaks.push(t_cut);
    let opts = QuadOptions {
        abs_tol: 0.1 * tol / pref,
        rel_tol: 0.0,
        max_segments: 20_000,
    };
    let dp1 = d as i32 + 1;
    let mut fh = |t: f64| {
        let p = UpperPoint::polar(t, theta).expect("positive radius");
        -rho(p).re / t.powi(dp1)
    };
    let h = integrate_with_breaks(&mut fh, &breaks, opts).map_err(|source| Error::Quadrature { theta, source })?;
    let mut fdh = |t: f64| {
        let p = UpperPoint::polar(t, theta).expect("positive radius");
        sqrt_one_minus_sq(p).im / t.powi(dp1)
    };
    let dh = integrate_with_breaks(&mut fdh, &breaks, opts).map_err(|source| Error::Quadrature { theta, source })?;
    Ok((pref * h.value, -pref * dh.value))
}

const MIN_NODES: usize = 64;
const MAX_NODES: usize = 1024;

/// Build the angular profile of `h_d` to accuracy `tol`.
pub fn build_profile(d: u32, tol: f64) -> Result<AngularProfile> {
    check_dimension(d)?;
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::InvalidArgument(format!(
            "profile tolerance {tol} must lie in (0, 1e-4]"
        )));
    }
    let mut n = MIN_NODES;
    loop {
        let xs = chebyshev::nodes(n);
        let vals: Vec<(f64, f64, f64)> = xs
            .par_iter()
            .map(|&x| {
                let th = anglemap::theta(x);
                let r0 = sigma_radius(th, 1e-3 * tol)?;
                let (h, dh) = profile_integrals(d, th, r0, 0.1 * tol)?;
                Ok((r0, h, dh))
            })
            .collect::<Result<Vec<_>>>()?;
        let hs = Chebyshev::interpolate(&vals.iter().map(|v| v.1).collect::<Vec<_>>());
        let dhs = Chebyshev::interpolate(&vals.iter().map(|v| v.2).collect::<Vec<_>>());
        let tail = hs.tail_magnitude(8).max(dhs.tail_magnitude(8));
        if tail <= 0.1 * tol || n >= MAX_NODES {
            if tail > 0.1 * tol {
                log::warn!("angular profile for d = {d}: coefficient tail {tail:e} above target at {n} nodes");
            }
            let sigma_nodes: Vec<(f64, f64)> = xs
                .iter()
                .zip(&vals)
                .rev()
                .map(|(&x, v)| (anglemap::theta(x), v.0))
                .collect();
            let ddcoeffs = dhs.derivative().coeffs;
            return Ok(AngularProfile::from_parts(
                d,
                tol,
                hs.coeffs,
                dhs.coeffs,
                ddcoeffs,
                SigmaCurve::from_nodes(sigma_nodes),
            ));
        }
        n *= 2;
    }
}

impl AngularProfile {
    /// Assemble a profile from stored coefficient data.
    pub fn from_parts(
        d: u32,
        tol: f64,
        coeffs: Vec<f64>,
        dcoeffs: Vec<f64>,
        ddcoeffs: Vec<f64>,
        sigma: SigmaCurve,
    ) -> Self {
        let h = Chebyshev::new(coeffs.clone());
        let dh = Chebyshev::new(dcoeffs.clone());
        let ddh = Chebyshev::new(ddcoeffs.clone());
        let dddh = ddh.derivative();
        // integrand h(theta(x)) theta'(x) sampled on a finer grid
        let m = 2 * coeffs.len();
        let hint = Chebyshev::fit(m, |x| h.eval(x) * anglemap::dtheta_dx(x)).antiderivative();
        Self {
            d,
            tol,
            coeffs,
            dcoeffs,
            ddcoeffs,
            sigma,
            h,
            dh,
            ddh,
            dddh,
            hint,
        }
    }

    /// `h_d(theta)` for `theta` in `[0, pi]`.
    pub fn h(&self, theta: f64) -> f64 {
        self.h.eval(anglemap::x_of_theta(theta))
    }

    /// `h_d'(theta)`; at the endpoints this is the one-sided derivative.
    pub fn dh(&self, theta: f64) -> f64 {
        self.dh.eval(anglemap::x_of_theta(theta))
    }

    /// `h_d''(theta)` for `theta` in `[0, pi]`.
    pub fn ddh(&self, theta: f64) -> f64 {
        let x = anglemap::x_of_theta(theta);
        let psi = anglemap::psi(x);
        let s = psi.sin();
        let q = std::f64::consts::FRAC_PI_2;
        if s.abs() < 1e-6 {
            // both numerator and theta'(x) vanish at the ends
            return self.dddh.eval(x) / (q * q * q * psi.cos());
        }
        self.ddh.eval(x) / anglemap::dtheta_dx(x)
    }

    /// `d^2 h_d + h_d''`, the angular part of the density.
    pub fn angular_factor(&self, theta: f64) -> f64 {
        let d2 = f64::from(self.d * self.d);
        d2 * self.h(theta) + self.ddh(theta)
    }

    /// `int_0^theta h_d`.
    pub fn integral(&self, theta: f64) -> f64 {
        self.hint.eval(anglemap::x_of_theta(theta))
    }

    /// Number of Chebyshev coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Sector `Omega(theta1, theta2) = {z in D : theta1 - pi < arg z < theta2 - pi}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub theta1: f64,
    pub theta2: f64,
}

impl Sector {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        if !(0.0 <= theta1 && theta1 < theta2 && theta2 <= PI) {
            return Err(Error::InvalidArgument(format!(
                "sector angles must satisfy 0 <= {theta1} < {theta2} <= pi"
            )));
        }
        Ok(Self { theta1, theta2 })
    }
}

const CDF_TABLE: usize = 4096;

/// The limit distribution in dimension `d`.
#[derive(Debug, Clone)]
pub struct MZDistribution {
    pub d: u32,
    pub profile: AngularProfile,
    pub e_d: f64,
    pub c_d: f64,
    /// `F(x)` for the angular sampler on an equispaced grid in `x`.
    cdf: Vec<f64>,
}

impl MZDistribution {
    pub fn build(d: u32, tol: f64) -> Result<Self> {
        Ok(Self::from_profile(build_profile(d, tol)?))
    }

    pub fn from_profile(profile: AngularProfile) -> Self {
        let d = profile.d;
        let e_d = e_const(d).expect("profile dimension is valid");
        let c_d = c_const(&profile);
        let mut dist = Self {
            d,
            profile,
            e_d,
            c_d,
            cdf: vec![],
        };
        dist.cdf = (0..=CDF_TABLE)
            .map(|i| dist.angular_cdf_x(-1.0 + 2.0 * i as f64 / CDF_TABLE as f64))
            .collect();
        dist
    }

    pub fn sigma(&self) -> &SigmaCurve {
        &self.profile.sigma
    }

    fn df(&self) -> f64 {
        f64::from(self.d)
    }

    /// Density of `mu-` at `z` off the real axis (extended evenly to the upper
    /// half-plane).
    pub fn kappa(&self, z: Complex64) -> Result<f64> {
        if z.im == 0.0 || !z.im.is_finite() || !z.re.is_finite() {
            return Err(Error::Domain { re: z.re, im: z.im });
        }
        let theta = z.arg().abs();
        Ok(z.norm().powi(self.d as i32 - 2) * self.profile.angular_factor(theta) / (2.0 * PI * self.c_d))
    }

    /// Density of `mu0` on the real axis.
    pub fn mu0_density(&self, x: f64) -> f64 {
        self.e_d / (2.0 * PI * self.c_d) * x.abs().powi(self.d as i32 - 1)
    }

    /// `mu0([a, b])`.
    pub fn mu0_mass(&self, a: f64, b: f64) -> f64 {
        let f = |x: f64| x.signum() * x.abs().powi(self.d as i32) / self.df();
        self.e_d / (2.0 * PI * self.c_d) * (f(b) - f(a))
    }

    /// `H(z) = |z|^d h_d(|arg z|) / c_d`.
    pub fn potential_h(&self, z: Complex64) -> f64 {
        let r = z.norm();
        if r == 0.0 {
            return 0.0;
        }
        let theta = Complex64::new(z.re, z.im.abs()).arg();
        r.powi(self.d as i32) * self.profile.h(theta) / self.c_d
    }

    /// `H_Z(z)`: zero on the open upper half-plane, `H(z)` on the closed lower
    /// half-plane.
    pub fn potential_hz(&self, z: Complex64) -> f64 {
        if z.im > 0.0 {
            0.0
        } else {
            self.potential_h(z)
        }
    }

    /// `mu-(Omega(theta1, theta2))`, with one-sided derivatives at `0` and `pi`.
    pub fn sector_mass(&self, s: Sector) -> f64 {
        let p = &self.profile;
        let d2 = self.df() * self.df();
        (p.dh(s.theta2) - p.dh(s.theta1) + d2 * (p.integral(s.theta2) - p.integral(s.theta1)))
            / (2.0 * PI * self.df() * self.c_d)
    }

    /// Coefficient of the sector count law, with the endpoint convention
    /// `c(0) = c(pi) = 0` in place of `h_d'`.
    pub fn corollary_coefficient(&self, s: Sector) -> f64 {
        let p = &self.profile;
        let c = |t: f64| if t == 0.0 || t == PI { 0.0 } else { p.dh(t) };
        let d2 = self.df() * self.df();
        (c(s.theta2) - c(s.theta1) + d2 * (p.integral(s.theta2) - p.integral(s.theta1)))
            / (2.0 * PI * self.df() * self.c_d)
    }

    /// Mass of the closed window: `mu-` by integration over ray angles with
    /// the radial integral done in closed form, plus `mu0` of the real
    /// segments.
    pub fn window_mass(&self, w: &Window) -> Result<f64> {
        w.validate()?;
        let df = self.df();
        let d = self.d as i32;
        let mut f = |phi: f64| {
            let radial: f64 = w.ray_intervals(phi).iter().map(|&(a, b)| b.powi(d) - a.powi(d)).sum();
            if radial == 0.0 {
                0.0
            } else {
                radial * self.profile.angular_factor(phi.abs().min(PI))
            }
        };
        let breaks = w.angular_breakpoints();
        let scale = w.circumradius().powi(d).max(1.0);
        let opts = QuadOptions {
            abs_tol: 1e-11 * scale,
            rel_tol: 1e-12,
            max_segments: 20_000,
        };
        let area = integrate_with_breaks(&mut f, &breaks, opts)
            .map_err(|source| Error::Quadrature {
                theta: f64::NAN,
                source,
            })?
            .value
            / (2.0 * PI * self.c_d * df);
        let line: f64 = w.real_segments().iter().map(|&(a, b)| self.mu0_mass(a, b)).sum();
        Ok(area + line)
    }

    /// Angular CDF of `mu-` on the unit half-disc in the Chebyshev variable.
    fn angular_cdf_x(&self, x: f64) -> f64 {
        let p = &self.profile;
        let d2 = self.df() * self.df();
        let num = |x: f64| p.dh.eval(x) - p.dh.eval(-1.0) + d2 * p.hint.eval(x);
        num(x.clamp(-1.0, 1.0)) / num(1.0)
    }

    /// `n` independent draws from the distribution restricted to the closed
    /// lower unit half-disc, normalized to a probability.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let df = self.df();
        let p0 = 2.0 * self.e_d / (2.0 * PI * df * self.c_d);
        let p0 = p0
            / (p0
                + self.sector_mass(Sector {
                    theta1: 0.0,
                    theta2: PI,
                }));
        (0..n)
            .map(|_| {
                let u: f64 = rng.gen();
                let r = rng.gen::<f64>().powf(1.0 / df);
                if u < p0 {
                    if rng.gen::<bool>() {
                        Complex64::new(r, 0.0)
                    } else {
                        Complex64::new(-r, 0.0)
                    }
                } else {
                    let theta = self.invert_angular_cdf(rng.gen());
                    let z = Complex64::from_polar(r, -theta);
                    Complex64::new(z.re, z.im.min(0.0))
                }
            })
            .collect()
    }

    fn invert_angular_cdf(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&f| f <= u).clamp(1, CDF_TABLE);
        let step = 2.0 / CDF_TABLE as f64;
        let (mut lo, mut hi) = (-1.0 + (i - 1) as f64 * step, -1.0 + i as f64 * step);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.angular_cdf_x(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        anglemap::theta(0.5 * (lo + hi))
    }
}

/// `c_d = (d / 2 pi) int_0^pi h_d`.
pub fn c_const(profile: &AngularProfile) -> f64 {
    f64::from(profile.d) / (2.0 * PI) * profile.integral(PI)
}

/// `c_d` from the area integral
/// `(2d / (pi (d-2)!)) int_{Im z > 0} max(-Re rho, 0) / |z|^{d+2}`,
/// computed by 2-D cubature in `(theta, 1/|z|)`, independent of the profile.
pub fn c_const_area(d: u32, abs_tol: f64) -> Result<f64> {
    check_dimension(d)?;
    let dm1 = d as i32 - 1;
    let f = |theta: f64, s: f64| {
        let p = UpperPoint::polar(1.0 / s, theta).expect("positive radius");
        (-rho(p).re).max(0.0) * s.powi(dm1)
    };
    let rect = Rect {
        x0: 0.0,
        x1: PI,
        y0: 0.0,
        y1: 2.0,
    };
    let e = integrate_2d(f, rect, abs_tol, 400_000).map_err(|source| Error::Quadrature {
        theta: f64::NAN,
        source,
    })?;
    Ok(2.0 * f64::from(d) / (PI * factorial_dm2(d)) * e.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e_closed_forms() {
        assert!((e_const(3).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!((e_const(5).unwrap() - 4.0 / 45.0).abs() < 1e-15);
        assert!(e_const(4).is_err());
        assert!(e_const(1).is_err());
    }

    #[test]
    fn sector_validation() {
        assert!(Sector::new(0.5, 0.5).is_err());
        assert!(Sector::new(-0.1, 1.0).is_err());
        assert!(Sector::new(0.0, PI).is_ok());
    }
}

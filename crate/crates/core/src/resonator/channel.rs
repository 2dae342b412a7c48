//! Radial step potentials and the per-channel matching determinant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::special::{chi_pair, irregular_deriv, phi_deriv, phi_pair, psi_pair};
use crate::error::{Error, Result};
use crate::mzdist::check_dimension;

/// One constant layer `r_{j-1} < r <= radius` with value `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub radius: f64,
    pub value: Complex64,
}

/// Piecewise-constant radial potential supported in the ball of radius `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialPotential {
    pub d: u32,
    pub shells: Vec<Shell>,
}

impl RadialPotential {
    pub fn new(d: u32, shells: Vec<Shell>) -> Result<Self> {
        check_dimension(d)?;
        if shells.is_empty() {
            return Err(Error::InvalidArgument("potential needs at least one shell".into()));
        }
        let mut prev = 0.0;
        for s in &shells {
            if !(s.radius > prev && s.radius.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "shell radii must be positive and strictly increasing (got {} after {prev})",
                    s.radius
                )));
            }
            if !(s.value.re.is_finite() && s.value.im.is_finite()) {
                return Err(Error::InvalidArgument("non-finite shell value".into()));
            }
            prev = s.radius;
        }
        Ok(Self { d, shells })
    }

    /// Single well or barrier of radius `a` and height `v`.
    pub fn step(d: u32, a: f64, v: Complex64) -> Result<Self> {
        Self::new(d, vec![Shell { radius: a, value: v }])
    }

    /// Support radius.
    pub fn a(&self) -> f64 {
        self.shells.last().map_or(0.0, |s| s.radius)
    }

    pub fn sup_norm(&self) -> f64 {
        self.shells.iter().fold(0.0, |m, s| m.max(s.value.norm()))
    }

    pub fn is_real(&self) -> bool {
        self.shells.iter().all(|s| s.value.im == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.shells.iter().all(|s| s.value.norm() == 0.0)
    }

    /// True when the value at the outer edge is nonzero.
    pub fn edge_nonzero(&self) -> bool {
        self.shells.last().is_some_and(|s| s.value.norm() != 0.0)
    }
}

/// Number of linearly independent degree-`l` spherical harmonics in `d`
/// variables.
pub fn harmonic_multiplicity(d: u32, l: u32) -> u64 {
    if l == 0 {
        return 1;
    }
    // (2l + d - 2) (l + d - 3)! / (l! (d - 2)!)
    let (d, l) = (u64::from(d), u64::from(l));
    let mut binom: u64 = 1; // C(l + d - 3, d - 3)
    for i in 1..=(d - 3) {
        binom = binom * (l + i) / i;
    }
    (2 * l + d - 2) * binom / (d - 2)
}

/// Half-integer order offset: the channel `l` in dimension `d` uses Bessel
/// order `L + 1/2` with `L = l + (d - 3)/2`.
pub fn effective_order(d: u32, l: u32) -> u32 {
    l + (d - 3) / 2
}

/// Determinant value together with the magnitude of the largest term that
/// entered it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelValue {
    pub value: Complex64,
    pub scale: f64,
}

impl ChannelValue {
    /// Value divided by the largest intermediate magnitude: a
    /// scale-free size in which rounding noise is about `1e-16`.
    pub fn normalized(&self) -> Complex64 {
        self.value / self.scale
    }

    pub fn relative_size(&self) -> f64 {
        self.value.norm() / self.scale
    }
}

/// Cap on `|Im k| a` (exponential factors up to `e^{2 |Im k| a}` must fit
/// in a double).
pub const DEFAULT_DEPTH_CAP: f64 = 150.0;

/// Square root of `k^2 - v` with the branch nearest to `k`.
fn inner_wavenumber(k: Complex64, v: Complex64) -> Complex64 {
    let q = (k * k - v).sqrt();
    if (q - k).norm() <= (q + k).norm() {
        q
    } else {
        -q
    }
}

/// Evaluator for `D_l(k)`, the Wronskian of the regular solution (normalized
/// as `r^{L+1}` at the origin) with the outgoing solution, times `e^{-ika}`
/// and divided by `-(2L+1)`. It is entire in `k` and equals `e^{-ika}` for
/// the zero potential.
#[derive(Debug, Clone)]
pub struct ChannelDet<'a> {
    pub potential: &'a RadialPotential,
    pub l: u32,
    order: u32,
    pub depth_cap: f64,
}

impl<'a> ChannelDet<'a> {
    pub fn new(potential: &'a RadialPotential, l: u32) -> Self {
        Self {
            potential,
            l,
            order: effective_order(potential.d, l),
            depth_cap: DEFAULT_DEPTH_CAP,
        }
    }

    pub fn with_depth_cap(mut self, cap: f64) -> Self {
        self.depth_cap = cap;
        self
    }

    /// Scaled state `(u / r^{L+1}, u' / r^L)` just inside the last shell
    /// boundary, and the coefficients `(alpha, beta~)` of the regular and
    /// irregular solutions in the last shell.
    fn propagate(&self, k: Complex64) -> (Complex64, Complex64, Complex64, Complex64, f64) {
        let l = self.order;
        let lf = 2.0 * f64::from(l) + 1.0;
        let shells = &self.potential.shells;
        let first = shells[0];
        let q = inner_wavenumber(k, first.value);
        let ph = phi_pair(l, q * first.radius);
        let mut u = ph.1;
        let mut du = phi_deriv(l, ph);
        let (mut alpha, mut beta) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        let mut ratio = 1.0;
        for j in 1..shells.len() {
            let r1 = shells[j - 1].radius;
            let r2 = shells[j].radius;
            let q = inner_wavenumber(k, shells[j].value);
            let x1 = q * r1;
            let (ph1, ps1) = (phi_pair(l, x1), psi_pair(l, x1));
            alpha = -(u * irregular_deriv(l, ps1) - du * ps1.1) / lf;
            beta = -(ph1.1 * du - phi_deriv(l, ph1) * u) / lf;
            ratio = (r1 / r2).powf(lf);
            let x2 = q * r2;
            let (ph2, ps2) = (phi_pair(l, x2), psi_pair(l, x2));
            u = alpha * ph2.1 + beta * ratio * ps2.1;
            du = alpha * phi_deriv(l, ph2) + beta * ratio * irregular_deriv(l, ps2);
        }
        (u, du, alpha, beta, ratio)
    }

    /// Evaluate `D_l(k)` with its conditioning scale.
    pub fn eval(&self, k: Complex64) -> Result<ChannelValue> {
        let a = self.potential.a();
        let depth = k.im.abs() * a;
        if depth > self.depth_cap {
            return Err(Error::Overflow {
                depth,
                cap: self.depth_cap,
            });
        }
        if self.potential.is_zero() {
            let value = (-Complex64::new(0.0, 1.0) * k * a).exp();
            return Ok(ChannelValue {
                value,
                scale: value.norm(),
            });
        }
        let l = self.order;
        let lf = 2.0 * f64::from(l) + 1.0;
        let (u, du, alpha, beta, ratio) = self.propagate(k);

        let ka = k * a;
        let ch = chi_pair(l, ka);
        let f = ch.1;
        let df = irregular_deriv(l, ch);

        // regular/irregular form: exact but cancels like e^{2 |Im q| a}
        let t1 = u * df;
        let t2 = du * f;
        let v1 = ChannelValue {
            value: (t1 - t2) / (-lf),
            scale: t1.norm().max(t2.norm()) / lf,
        };

        // outgoing/incoming form with the exponentials factored out
        let v2 = self.hankel_form(k, alpha, beta, ratio, f, df);
        let best = match v2 {
            Some(v2) if v2.scale.is_finite() && v2.value.re.is_finite() && v2.value.im.is_finite() => {
                if v2.scale < v1.scale || !v1.scale.is_finite() {
                    v2
                } else {
                    v1
                }
            }
            _ => v1,
        };
        if !(best.scale.is_finite() && best.scale > 0.0) {
            return Err(Error::Overflow {
                depth,
                cap: self.depth_cap,
            });
        }
        Ok(best)
    }

    fn hankel_form(
        &self,
        k: Complex64,
        alpha: Complex64,
        beta: Complex64,
        ratio: f64,
        chi_k: Complex64,
        g_k: Complex64,
    ) -> Option<ChannelValue> {
        let l = self.order;
        let lf = 2.0 * f64::from(l) + 1.0;
        let last = self.potential.shells.last()?;
        let a = last.radius;
        let q = inner_wavenumber(k, last.value);
        let qa = q * a;
        if qa.norm() == 0.0 {
            return None;
        }
        let i = Complex64::new(0.0, 1.0);
        let cp = chi_pair(l, qa);
        let cm = chi_pair(l, -qa);
        let (chi_p, g_p) = (cp.1, irregular_deriv(l, cp));
        let (chi_m, g_m) = (cm.1, irregular_deriv(l, cm));
        let bp1 = chi_p * g_k;
        let bp2 = g_p * chi_k;
        let bm1 = chi_m * g_k;
        let bm2 = g_m * chi_k;
        let bp = bp1 - bp2;
        let bm = bm1 - bm2;
        let ep = (i * qa).exp();
        let em = (-i * qa).exp();
        // prod_{m=1}^{L} ((2m-1) / qa)^2
        let mut p = Complex64::new(1.0, 0.0);
        for m in 1..=l {
            let t = (2.0 * f64::from(m) - 1.0) / qa;
            p *= t * t;
        }
        let pref_a = alpha * i * p / (2.0 * qa);
        let pref_b = -beta * ratio / (2.0 * lf);
        let plus = ep * (bp1.norm().max(bp2.norm()));
        let minus = em * (bm1.norm().max(bm2.norm()));
        let value = pref_a * (ep * bp - em * bm) + pref_b * (ep * bp + em * bm);
        let scale = (pref_a.norm() + pref_b.norm()) * plus.norm().max(minus.norm());
        Some(ChannelValue { value, scale })
    }
}

/// `D_l(k)` divided by its conditioning scale.
pub fn channel_det(v: &RadialPotential, l: u32, k: Complex64) -> Result<Complex64> {
    Ok(ChannelDet::new(v, l).eval(k)?.normalized())
}

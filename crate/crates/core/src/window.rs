//! Bounded planar windows: discs, polygons and sector-annuli of the lower
//! half-plane, with a dilation factor.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    Disc {
        center: Complex64,
        radius: f64,
    },
    /// Simple polygon, vertices in order (either orientation).
    Polygon {
        vertices: Vec<Complex64>,
    },
    /// `{z : r1 <= |z| <= r2, theta1 - pi <= arg z <= theta2 - pi}` with
    /// `0 <= theta1 < theta2 <= pi`.
    SectorAnnulus {
        theta1: f64,
        theta2: f64,
        r1: f64,
        r2: f64,
    },
}

/// Membership conventions for points on the boundary of a window `W` with
/// interior `Omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// `Omega` intersected with the open lower half-plane.
    OpenLower,
    /// `Omega` intersected with the closed lower half-plane.
    OpenClosedLower,
    Open,
    Closed,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::OpenLower,
        Variant::OpenClosedLower,
        Variant::Open,
        Variant::Closed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::OpenLower => "open_lower",
            Variant::OpenClosedLower => "open_closed_lower",
            Variant::Open => "open",
            Variant::Closed => "closed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub shape: Shape,
    pub scale: f64,
}

/// `phi(z) = arg(-z)` in `[0, pi]` for `z` in the closed lower half-plane, so
/// that `arg z = phi - pi`.
pub fn lower_angle(z: Complex64) -> f64 {
    if z.im == 0.0 {
        return if z.re < 0.0 { 0.0 } else { PI };
    }
    (-z.im).atan2(-z.re).clamp(0.0, PI)
}

fn seg_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).re * ab.re + (p - a).im * ab.im) / len2;
    (p - (a + ab * t.clamp(0.0, 1.0))).norm()
}

impl Window {
    pub fn new(shape: Shape, scale: f64) -> Result<Self> {
        let w = Self { shape, scale };
        w.validate()?;
        Ok(w)
    }

    pub fn disc(center: Complex64, radius: f64) -> Result<Self> {
        Self::new(Shape::Disc { center, radius }, 1.0)
    }

    /// Sector `Omega(theta1, theta2)` of the unit disc.
    pub fn sector(theta1: f64, theta2: f64) -> Result<Self> {
        Self::new(
            Shape::SectorAnnulus {
                theta1,
                theta2,
                r1: 0.0,
                r2: 1.0,
            },
            1.0,
        )
    }

    pub fn unit_disc() -> Self {
        Self {
            shape: Shape::Disc {
                center: Complex64::new(0.0, 0.0),
                radius: 1.0,
            },
            scale: 1.0,
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            shape: self.shape.clone(),
            scale: self.scale * factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Degenerate(format!("scale {} must be positive", self.scale)));
        }
        match &self.shape {
            Shape::Disc { center, radius } => {
                if !(*radius > 0.0 && radius.is_finite() && center.re.is_finite() && center.im.is_finite()) {
                    return Err(Error::Degenerate(format!("disc radius {radius}")));
                }
            }
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::Degenerate("polygon needs at least 3 vertices".into()));
                }
                if vertices.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err(Error::Degenerate("non-finite polygon vertex".into()));
                }
                if polygon_area(vertices).abs() == 0.0 {
                    return Err(Error::Degenerate("polygon has zero area".into()));
                }
            }
            Shape::SectorAnnulus { theta1, theta2, r1, r2 } => {
                if !(0.0 <= *theta1 && theta1 < theta2 && *theta2 <= PI) {
                    return Err(Error::Degenerate(format!(
                        "sector angles must satisfy 0 <= {theta1} < {theta2} <= pi"
                    )));
                }
                if !(0.0 <= *r1 && r1 < r2 && r2.is_finite()) {
                    return Err(Error::Degenerate(format!("annulus radii {r1}, {r2}")));
                }
            }
        }
        Ok(())
    }

    /// Radius of the smallest origin-centred disc containing the window.
    pub fn circumradius(&self) -> f64 {
        let r = match &self.shape {
            Shape::Disc { center, radius } => center.norm() + radius,
            Shape::Polygon { vertices } => vertices.iter().fold(0.0f64, |m, v| m.max(v.norm())),
            Shape::SectorAnnulus { r2, .. } => *r2,
        };
        r * self.scale
    }

    /// Axis-aligned bounding box `(xmin, xmax, ymin, ymax)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let s = self.scale;
        match &self.shape {
            Shape::Disc { center, radius } => (
                s * (center.re - radius),
                s * (center.re + radius),
                s * (center.im - radius),
                s * (center.im + radius),
            ),
            Shape::Polygon { vertices } => {
                let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    b.0 = b.0.min(s * v.re);
                    b.1 = b.1.max(s * v.re);
                    b.2 = b.2.min(s * v.im);
                    b.3 = b.3.max(s * v.im);
                }
                b
            }
            Shape::SectorAnnulus { theta1, theta2, r1, r2 } => {
                // z = -r e^{i phi}; extremes sit at corners or at phi = pi/2
                let mut phis = vec![*theta1, *theta2];
                if *theta1 < PI / 2.0 && *theta2 > PI / 2.0 {
                    phis.push(PI / 2.0);
                }
                let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
                for &phi in &phis {
                    for &r in &[*r1, *r2] {
                        let z = -Complex64::from_polar(s * r, phi);
                        b.0 = b.0.min(z.re);
                        b.1 = b.1.max(z.re);
                        b.2 = b.2.min(z.im);
                        b.3 = b.3.max(z.im);
                    }
                }
                b
            }
        }
    }

    fn unscale(&self, z: Complex64) -> Complex64 {
        z / self.scale
    }

    /// Closed membership with boundary slack `eps` (in unscaled units);
    /// `eps < 0` gives strict interior membership.
    fn inside(&self, z: Complex64, eps: f64) -> bool {
        let z = self.unscale(z);
        match &self.shape {
            Shape::Disc { center, radius } => (z - center).norm() <= radius + eps,
            Shape::Polygon { vertices } => {
                let d = polygon_boundary_distance(vertices, z);
                if eps >= 0.0 && d <= eps {
                    return true;
                }
                if eps < 0.0 && d <= -eps {
                    return false;
                }
                point_in_polygon(vertices, z)
            }
            Shape::SectorAnnulus { theta1, theta2, r1, r2 } => {
                let r = z.norm();
                if eps < 0.0 && z.im >= 0.0 {
                    return false;
                }
                if eps >= 0.0 && z.im > eps {
                    return false;
                }
                if r < r1 - eps || r > r2 + eps {
                    return false;
                }
                if r == 0.0 {
                    return eps >= 0.0 && *r1 == 0.0;
                }
                let zl = Complex64::new(z.re, z.im.min(0.0));
                let phi = lower_angle(zl);
                let slack = eps / r;
                phi >= theta1 - slack && phi <= theta2 + slack
            }
        }
    }

    /// Membership under the given convention. Boundary points are decided
    /// exactly up to a relative rounding slack of `1e-13`.
    pub fn contains(&self, z: Complex64, variant: Variant) -> bool {
        const SLACK: f64 = 1e-13;
        match variant {
            Variant::Closed => self.inside(z, SLACK),
            Variant::Open => self.inside(z, -SLACK),
            Variant::OpenLower => z.im < 0.0 && self.inside(z, -SLACK),
            Variant::OpenClosedLower => z.im <= 0.0 && self.inside(z, -SLACK),
        }
    }

    /// Distance from an interior point to the window boundary (scaled units).
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        let u = self.unscale(z);
        let d = match &self.shape {
            Shape::Disc { center, radius } => (radius - (u - center).norm()).abs(),
            Shape::Polygon { vertices } => polygon_boundary_distance(vertices, u),
            Shape::SectorAnnulus { theta1, theta2, r1, r2 } => {
                sector_annulus_boundary_distance(*theta1, *theta2, *r1, *r2, u)
            }
        };
        d * self.scale
    }

    /// Intervals of the closed window on the real axis (scaled units).
    pub fn real_segments(&self) -> Vec<(f64, f64)> {
        let s = self.scale;
        let segs = match &self.shape {
            Shape::Disc { center, radius } => {
                if center.im.abs() < *radius {
                    let h = (radius * radius - center.im * center.im).sqrt();
                    vec![(center.re - h, center.re + h)]
                } else {
                    vec![]
                }
            }
            Shape::Polygon { vertices } => polygon_line_segments(vertices),
            Shape::SectorAnnulus { theta1, theta2, r1, r2 } => {
                let mut v = vec![];
                if *theta1 == 0.0 {
                    v.push((-r2, -r1));
                }
                if *theta2 == PI {
                    v.push((*r1, *r2));
                }
                v
            }
        };
        segs.into_iter()
            .map(|(a, b)| (s * a, s * b))
            .filter(|(a, b)| b > a)
            .collect()
    }

    /// True when part of the boundary is a segment of the real axis, so that
    /// the boundary carries positive mass of the limit distribution.
    pub fn has_real_boundary_segment(&self) -> bool {
        match &self.shape {
            Shape::Disc { .. } => false,
            Shape::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).any(|i| vertices[i].im == 0.0 && vertices[(i + 1) % n].im == 0.0)
            }
            Shape::SectorAnnulus { theta1, theta2, .. } => *theta1 == 0.0 || *theta2 == PI,
        }
    }

    /// Radial intervals `(r_a, r_b)` of the ray `{r e^{i phi}}` inside the
    /// window (scaled units).
    pub fn ray_intervals(&self, phi: f64) -> Vec<(f64, f64)> {
        let u = Complex64::from_polar(1.0, phi);
        let s = self.scale;
        let raw: Vec<(f64, f64)> = match &self.shape {
            Shape::Disc { center, radius } => {
                let b = u.re * center.re + u.im * center.im;
                let c = center.norm_sqr() - radius * radius;
                let disc = b * b - c;
                if disc <= 0.0 {
                    vec![]
                } else {
                    let q = disc.sqrt();
                    let (lo, hi) = (b - q, b + q);
                    if hi <= 0.0 {
                        vec![]
                    } else {
                        vec![(lo.max(0.0), hi)]
                    }
                }
            }
            Shape::Polygon { vertices } => polygon_ray_intervals(vertices, u),
            Shape::SectorAnnulus { theta1, theta2, r1, r2 } => {
                let ang = phi + PI;
                if phi <= 0.0 && ang >= *theta1 && ang <= *theta2 {
                    vec![(*r1, *r2)]
                } else {
                    vec![]
                }
            }
        };
        raw.into_iter().map(|(a, b)| (s * a, s * b)).collect()
    }

    /// Ray angles in `[-pi, 0]` where the structure of [`Self::ray_intervals`]
    /// can change.
    pub fn angular_breakpoints(&self) -> Vec<f64> {
        let mut v = vec![-PI, 0.0];
        match &self.shape {
            Shape::Disc { center, radius } => {
                let m = center.norm();
                if m > *radius {
                    let a = center.arg();
                    let half = (radius / m).asin();
                    v.push(a - half);
                    v.push(a + half);
                    v.push(a);
                }
            }
            Shape::Polygon { vertices } => {
                for p in vertices {
                    if p.norm() > 0.0 {
                        v.push(p.arg());
                        if p.im == 0.0 && p.re < 0.0 {
                            v.push(-PI);
                        }
                    }
                }
            }
            Shape::SectorAnnulus { theta1, theta2, .. } => {
                v.push(theta1 - PI);
                v.push(theta2 - PI);
            }
        }
        let mut v: Vec<f64> = v.into_iter().filter(|a| *a >= -PI && *a <= 0.0).collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        v
    }
}

pub fn polygon_area(v: &[Complex64]) -> f64 {
    let n = v.len();
    0.5 * (0..n)
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
}

fn point_in_polygon(v: &[Complex64], p: Complex64) -> bool {
    let n = v.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (v[i], v[j]);
        if (a.im > p.im) != (b.im > p.im) {
            let x = a.re + (p.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if p.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn polygon_boundary_distance(v: &[Complex64], p: Complex64) -> f64 {
    let n = v.len();
    (0..n).fold(f64::INFINITY, |m, i| m.min(seg_distance(p, v[i], v[(i + 1) % n])))
}

fn polygon_line_segments(v: &[Complex64]) -> Vec<(f64, f64)> {
    // crossings of the real axis plus endpoints of edges lying on it
    let n = v.len();
    let mut xs = vec![];
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if a.im == 0.0 {
            xs.push(a.re);
        }
        if (a.im < 0.0 && b.im > 0.0) || (a.im > 0.0 && b.im < 0.0) {
            xs.push(a.re + (0.0 - a.im) * (b.re - a.re) / (b.im - a.im));
        }
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup();
    let mut out: Vec<(f64, f64)> = vec![];
    for w in xs.windows(2) {
        let mid = Complex64::new(0.5 * (w[0] + w[1]), 0.0);
        let on_edge = polygon_boundary_distance(v, mid) <= 1e-13 * (w[1] - w[0]).max(1.0);
        if on_edge || point_in_polygon(v, mid) {
            match out.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => out.push((w[0], w[1])),
            }
        }
    }
    out
}

fn polygon_ray_intervals(v: &[Complex64], u: Complex64) -> Vec<(f64, f64)> {
    let n = v.len();
    let mut ts = vec![0.0];
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        // solve t u = a + s (b - a), t >= 0, s in [0, 1]
        let e = b - a;
        let den = u.re * (-e.im) - u.im * (-e.re);
        if den.abs() < 1e-300 {
            continue;
        }
        let t = (a.re * (-e.im) - a.im * (-e.re)) / den;
        let s = (u.re * a.im - u.im * a.re) / den;
        if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&s) {
            ts.push(t);
        }
    }
    ts.sort_by(|a, b| a.total_cmp(b));
    ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
    let mut out: Vec<(f64, f64)> = vec![];
    for w in ts.windows(2) {
        let mid = u * (0.5 * (w[0] + w[1]));
        if point_in_polygon(v, mid) {
            match out.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => out.push((w[0], w[1])),
            }
        }
    }
    out
}

fn sector_annulus_boundary_distance(t1: f64, t2: f64, r1: f64, r2: f64, z: Complex64) -> f64 {
    let ray = |phi: f64, a: f64, b: f64| {
        let u = -Complex64::from_polar(1.0, phi);
        seg_distance(z, u * a, u * b)
    };
    let arc = |r: f64| {
        if r == 0.0 {
            return z.norm();
        }
        let phi = if z.im <= 0.0 { lower_angle(z) } else { f64::NAN };
        if phi >= t1 && phi <= t2 {
            (z.norm() - r).abs()
        } else {
            let e1 = -Complex64::from_polar(r, t1);
            let e2 = -Complex64::from_polar(r, t2);
            (z - e1).norm().min((z - e2).norm())
        }
    };
    ray(t1, r1, r2).min(ray(t2, r1, r2)).min(arc(r1)).min(arc(r2))
}

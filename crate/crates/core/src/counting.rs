//! Counting functions, window counts and rescaled empirical measures of a
//! resonance set.
//!
//! Counts include every computed pole, the finitely many zeros in the closed
//! upper half-plane as well as the resonances in the lower half-plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mzdist::MZDistribution;
use crate::resonator::{ResonanceEntry, ResonanceSet};
use crate::window::{Variant, Window};

/// Entries below this modulus count as sitting at the origin.
pub const ZERO_MODULUS: f64 = 1e-10;

fn check_radius(rs: &ResonanceSet, r: f64) -> Result<()> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("radius {r} must be nonnegative")));
    }
    if r > rs.radius {
        return Err(Error::OutOfRange { r, limit: rs.radius });
    }
    Ok(())
}

/// `n_V(r)`: number of poles with `|lambda| <= r`, with multiplicity. Poles
/// below [`ZERO_MODULUS`] count as sitting at the origin.
pub fn n_count(rs: &ResonanceSet, r: f64) -> Result<u64> {
    check_radius(rs, r)?;
    Ok(rs
        .all_entries()
        .filter(|e| {
            let m = e.lambda.norm();
            m <= r || m < ZERO_MODULUS
        })
        .map(|e| e.mult)
        .sum())
}

/// `N_V(r) = sum_{0 < |lambda| <= r} mult log(r / |lambda|)`, the integral
/// of `(n(t) - n(0)) / t` over `(0, r)`.
pub fn big_n(rs: &ResonanceSet, r: f64) -> Result<f64> {
    check_radius(rs, r)?;
    Ok(rs
        .all_entries()
        .filter(|e| {
            let m = e.lambda.norm();
            m >= ZERO_MODULUS && m <= r
        })
        .map(|e| e.mult as f64 * (r / e.lambda.norm()).ln())
        .sum())
}

/// `int_{r1}^{r2} n(t) / t dt`, exact on the atom moduli.
pub fn n_over_t_integral(rs: &ResonanceSet, r1: f64, r2: f64) -> Result<f64> {
    check_radius(rs, r2)?;
    if !(r1 > 0.0 && r1 <= r2) {
        return Err(Error::InvalidArgument(format!("need 0 < r1 <= r2, got {r1}, {r2}")));
    }
    Ok(rs
        .all_entries()
        .filter(|e| e.lambda.norm() <= r2)
        .map(|e| e.mult as f64 * (r2 / e.lambda.norm().max(r1)).ln())
        .sum())
}

/// Number of poles in `r W`, with multiplicity, under a boundary convention.
pub fn window_count(rs: &ResonanceSet, w: &Window, r: f64, variant: Variant) -> Result<u64> {
    w.validate()?;
    check_radius(rs, r * w.circumradius())?;
    let rw = w.scaled(r);
    Ok(rs
        .all_entries()
        .filter(|e| rw.contains(e.lambda, variant))
        .map(|e| e.mult)
        .sum())
}

/// The rescaled counting measure `(c_d a^d r^d)^{-1} sum mult delta_{lambda / r}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub atoms: Vec<(Complex64, f64)>,
    pub d: u32,
    pub c_d: f64,
    pub a: f64,
    pub r: f64,
    /// The measure is complete on the disc of this radius.
    pub complete_radius: f64,
}

impl EmpiricalMeasure {
    pub fn normalization(&self) -> f64 {
        self.c_d * (self.a * self.r).powi(self.d as i32)
    }

    /// Mass of a window under a boundary convention.
    pub fn mass(&self, w: &Window, variant: Variant) -> f64 {
        self.atoms
            .iter()
            .filter(|(z, _)| w.contains(*z, variant))
            .map(|(_, m)| m)
            .sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }
}

/// Atoms at `lambda / r` with masses `mult / (c_d a^d r^d)`.
pub fn empirical_measure(rs: &ResonanceSet, r: f64, dist: &MZDistribution) -> Result<EmpiricalMeasure> {
    check_radius(rs, r)?;
    if r == 0.0 {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    if dist.d != rs.potential.d {
        return Err(Error::InvalidArgument(format!(
            "distribution dimension {} differs from potential dimension {}",
            dist.d, rs.potential.d
        )));
    }
    let a = rs.potential.a();
    let norm = dist.c_d * (a * r).powi(dist.d as i32);
    let atoms = rs
        .all_entries()
        .map(|e: &ResonanceEntry| (e.lambda / r, e.mult as f64 / norm))
        .collect();
    Ok(EmpiricalMeasure {
        atoms,
        d: dist.d,
        c_d: dist.c_d,
        a,
        r,
        complete_radius: rs.radius / r,
    })
}

/// One row of a weak-convergence report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub r: f64,
    pub window_id: String,
    pub variant: Variant,
    pub empirical_mass: f64,
    pub mz_mass: f64,
    pub gap: f64,
}

/// Empirical against limit masses for each radius and window.
///
/// Every window must have a boundary of limit mass zero: it may touch the
/// real axis only in isolated points. Rows are ordered by radius, then
/// window. The closed-window row is always present; rows for the other
/// conventions are added only where their count differs.
pub fn weak_convergence_report(
    rs: &ResonanceSet,
    dist: &MZDistribution,
    radii: &[f64],
    windows: &[(String, Window)],
) -> Result<Vec<ReportRow>> {
    for (id, w) in windows {
        w.validate()?;
        if w.has_real_boundary_segment() {
            return Err(Error::Degenerate(format!(
                "window `{id}` has a boundary segment on the real axis, which carries limit mass"
            )));
        }
    }
    let masses = windows
        .iter()
        .map(|(_, w)| dist.window_mass(w))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = vec![];
    for &r in radii {
        let em = empirical_measure(rs, r, dist)?;
        for ((id, w), &mz) in windows.iter().zip(&masses) {
            check_radius(rs, r * w.circumradius())?;
            let closed = em.mass(w, Variant::Closed);
            let row = |variant, m: f64| ReportRow {
                r,
                window_id: id.clone(),
                variant,
                empirical_mass: m,
                mz_mass: mz,
                gap: (m - mz).abs(),
            };
            rows.push(row(Variant::Closed, closed));
            for v in [Variant::Open, Variant::OpenClosedLower, Variant::OpenLower] {
                let m = em.mass(w, v);
                if m != closed {
                    rows.push(row(v, m));
                }
            }
        }
    }
    Ok(rows)
}

/// Log-log diagnostic for the Weyl remainder: fit of
/// `log |n(r) - c_d a^d r^d|` against `log r`.
pub fn weyl_remainder_fit(rs: &ResonanceSet, dist: &MZDistribution, radii: &[f64]) -> Result<crate::metric::RateFit> {
    let a = rs.potential.a();
    let pairs = radii
        .iter()
        .map(|&r| {
            let n = n_count(rs, r)? as f64;
            Ok((r, (n - dist.c_d * (a * r).powi(dist.d as i32)).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    crate::metric::rate_fit(&pairs)
}

//! Resonances of radial step potentials in odd dimensions: per-channel
//! matching determinants, contour-based zero search, and assembly into a
//! multiplicity-weighted resonance set.

mod channel;
mod oracle;
mod search;
pub mod special;

pub use channel::{
    channel_det, effective_order, harmonic_multiplicity, ChannelDet, ChannelValue, RadialPotential, Shell,
    DEFAULT_DEPTH_CAP,
};
pub use oracle::{swave_function, swave_oracle};
pub use search::{channel_zeros, ChannelZero, Contour, SearchBox, SearchOptions, ZeroSearch};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexfn::sigma_radius;
use crate::error::{Error, Result};

/// One resonance (or exceptional zero in the closed upper half-plane).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceEntry {
    pub lambda: Complex64,
    pub l: u32,
    /// Order of the zero of the channel determinant.
    pub channel_order: u32,
    pub harmonic_mult: u64,
    /// `channel_order * harmonic_mult`.
    pub mult: u64,
    pub residual: f64,
}

/// Per-channel bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub l: u32,
    /// Distinct zeros with `|lambda| <= R` in the open lower half-plane.
    pub lower_zeros: usize,
    /// Distinct zeros with `|lambda| <= R` in the closed upper half-plane.
    pub upper_zeros: usize,
    pub evaluations: usize,
    /// Number of tiling retries after a zero landed on a tile edge.
    pub jitter_retries: u32,
}

/// Resonances of a potential in the disc `|lambda| <= radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceSet {
    pub potential: RadialPotential,
    pub radius: f64,
    /// Zeros with `Im lambda < 0`, sorted by modulus.
    pub entries: Vec<ResonanceEntry>,
    /// Zeros with `Im lambda >= 0` (finitely many), sorted by modulus.
    pub exceptional: Vec<ResonanceEntry>,
    pub channels: Vec<ChannelReport>,
    /// Channel bound the scan started from.
    pub l_max: u32,
    /// Largest channel containing a zero.
    pub l_last_nonempty: Option<u32>,
    /// Number of consecutive empty channels required to stop beyond `l_max`.
    pub l_stop: u32,
}

impl ResonanceSet {
    /// All entries, lower half-plane first, as one list.
    pub fn all_entries(&self) -> impl Iterator<Item = &ResonanceEntry> {
        self.entries.iter().chain(self.exceptional.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceOptions {
    pub search: SearchOptions,
    /// Side of the initial tiling boxes.
    pub box_size: f64,
    pub l_stop: u32,
    /// Override of the starting channel bound.
    pub l_max: Option<u32>,
    pub parallel: bool,
}

impl Default for ResonanceOptions {
    fn default() -> Self {
        Self {
            search: SearchOptions::default(),
            box_size: 2.0,
            l_stop: 3,
            l_max: None,
            parallel: true,
        }
    }
}

/// Channel bound from the smallest modulus of outgoing-Hankel zeros: channel
/// `l` (order `nu = L + 1/2`) has no scaled zeros below `r0(pi/2) nu / a`.
pub fn default_l_max(d: u32, a: f64, radius: f64) -> u32 {
    let r0 = sigma_radius(std::f64::consts::FRAC_PI_2, 1e-12).expect("right angle is in range");
    let nu = a * radius / r0;
    let shift = f64::from((d - 3) / 2) + 0.5;
    ((nu - shift).max(0.0).ceil() as u32) + 10
}

struct Tiling {
    boxes: Vec<SearchBox>,
}

fn tiling(radius: f64, upper: f64, size: f64, jitter: f64) -> Tiling {
    // odd column count keeps tile edges off the imaginary axis
    let mut nx = (2.0 * radius / size).ceil() as usize;
    if nx.is_multiple_of(2) {
        nx += 1;
    }
    let w = 2.0 * radius / nx as f64;
    let ny_low = (radius / w).ceil() as usize;
    let ny_up = (upper / w).ceil().max(1.0) as usize;
    let x0 = -radius + jitter;
    let y0 = -(ny_low as f64) * w - jitter;
    let mut boxes = vec![];
    for j in 0..(ny_low + ny_up) {
        for i in 0..nx {
            let b = SearchBox {
                re0: x0 + i as f64 * w,
                re1: x0 + (i + 1) as f64 * w,
                im0: y0 + j as f64 * w,
                im1: y0 + (j + 1) as f64 * w,
            };
            // skip tiles entirely outside the disc
            let cx = 0.0f64.clamp(b.re0, b.re1);
            let cy = 0.0f64.clamp(b.im0, b.im1);
            if cx * cx + cy * cy <= radius * radius {
                boxes.push(b);
            }
        }
    }
    Tiling { boxes }
}

fn channel_scan(
    v: &RadialPotential,
    l: u32,
    radius: f64,
    opts: &ResonanceOptions,
) -> Result<(Vec<ResonanceEntry>, ChannelReport)> {
    let upper = 1.1 * v.sup_norm().sqrt() + 1.0;
    let hm = harmonic_multiplicity(v.d, l);
    let mut last_err = None;
    for attempt in 0..4u32 {
        let jitter = 1e-7 * f64::from(attempt);
        let t = tiling(radius, upper, opts.box_size, jitter);
        let mut contour = Contour::new(ChannelDet::new(v, l), opts.search);
        let mut zeros = vec![];
        let mut failed = None;
        for b in &t.boxes {
            match contour.search(*b) {
                Ok(found) => zeros.extend(found.zeros),
                Err(e @ Error::BoundaryZero { .. }) => {
                    failed = Some(e);
                    break;
                }
                Err(e) => return Err(Error::Channel { l, source: Box::new(e) }),
            }
        }
        if let Some(e) = failed {
            log::debug!("channel {l}: zero on a tile edge, retrying with shifted tiling");
            last_err = Some(e);
            continue;
        }
        let entries: Vec<ResonanceEntry> = zeros
            .into_iter()
            .filter(|z| z.k.norm() <= radius)
            .map(|z| ResonanceEntry {
                lambda: z.k,
                l,
                channel_order: z.order,
                harmonic_mult: hm,
                mult: u64::from(z.order) * hm,
                residual: z.residual,
            })
            .collect();
        let lower = entries.iter().filter(|e| e.lambda.im < 0.0).count();
        let report = ChannelReport {
            l,
            lower_zeros: lower,
            upper_zeros: entries.len() - lower,
            evaluations: contour.evaluations,
            jitter_retries: attempt,
        };
        return Ok((entries, report));
    }
    Err(Error::Channel {
        l,
        source: Box::new(last_err.expect("retries only follow a boundary zero")),
    })
}

fn sort_by_modulus(v: &mut [ResonanceEntry]) {
    v.sort_by(|a, b| {
        a.lambda
            .norm()
            .total_cmp(&b.lambda.norm())
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
            .then(a.l.cmp(&b.l))
    });
}

/// Resonances with `|lambda| <= radius`, scanning channels `l = 0, 1, ...`.
///
/// Channels `0..=l_max` are searched (in parallel when enabled); the scan then
/// continues until `l_stop` consecutive channels beyond `l_max` are empty.
pub fn resonances(v: &RadialPotential, radius: f64, opts: &ResonanceOptions) -> Result<ResonanceSet> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "search radius {radius} must be positive"
        )));
    }
    let l_max = opts.l_max.unwrap_or_else(|| default_l_max(v.d, v.a(), radius));
    let mut results: Vec<(Vec<ResonanceEntry>, ChannelReport)> = if v.is_zero() {
        vec![]
    } else if opts.parallel {
        (0..=l_max)
            .into_par_iter()
            .map(|l| channel_scan(v, l, radius, opts))
            .collect::<Result<Vec<_>>>()?
    } else {
        (0..=l_max)
            .map(|l| channel_scan(v, l, radius, opts))
            .collect::<Result<Vec<_>>>()?
    };
    if !v.is_zero() {
        let mut empty_run = 0;
        let mut l = l_max + 1;
        while empty_run < opts.l_stop {
            let r = channel_scan(v, l, radius, opts)?;
            if r.0.is_empty() {
                empty_run += 1;
            } else {
                empty_run = 0;
            }
            results.push(r);
            l += 1;
        }
    }
    let mut entries = vec![];
    let mut exceptional = vec![];
    let mut channels = vec![];
    let mut l_last = None;
    for (es, rep) in results {
        if !es.is_empty() {
            l_last = Some(rep.l);
        }
        for e in es {
            if e.lambda.im < 0.0 {
                entries.push(e);
            } else {
                exceptional.push(e);
            }
        }
        channels.push(rep);
    }
    sort_by_modulus(&mut entries);
    sort_by_modulus(&mut exceptional);
    Ok(ResonanceSet {
        potential: v.clone(),
        radius,
        entries,
        exceptional,
        channels,
        l_max,
        l_last_nonempty: l_last,
        l_stop: opts.l_stop,
    })
}

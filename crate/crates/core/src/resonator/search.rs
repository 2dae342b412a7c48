//! Argument-principle zero search for channel determinants on rectangles.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::channel::{ChannelDet, ChannelValue};
use crate::error::{Error, Result};

/// Axis-aligned rectangle `[re0, re1] x [im0, im1]` of the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl SearchBox {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Result<Self> {
        if !(re0 < re1 && im0 < im1) || ![re0, re1, im0, im1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "empty or non-finite box [{re0}, {re1}] x [{im0}, {im1}]"
            )));
        }
        Ok(Self { re0, re1, im0, im1 })
    }

    pub fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    pub fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    /// Closed containment enlarged by `slack`.
    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re0 - slack && z.re <= self.re1 + slack && z.im >= self.im0 - slack && z.im <= self.im1 + slack
    }

    /// Half-open containment `[re0, re1) x [im0, im1)`.
    pub fn contains_half_open(&self, z: Complex64) -> bool {
        z.re >= self.re0 && z.re < self.re1 && z.im >= self.im0 && z.im < self.im1
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re0, self.im0),
            Complex64::new(self.re1, self.im0),
            Complex64::new(self.re1, self.im1),
            Complex64::new(self.re0, self.im1),
        ]
    }
}

/// A zero of a channel determinant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelZero {
    pub k: Complex64,
    pub order: u32,
    /// `|D_l(k)|` relative to its conditioning scale.
    pub residual: f64,
}

/// Tuning of the contour search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Newton residual target for `|D| / scale`.
    pub tol: f64,
    /// Initial sample spacing along contour edges.
    pub edge_step: f64,
    /// Largest accepted phase increment between contour samples.
    pub max_phase_step: f64,
    /// Relative size below which a contour sample counts as a zero on the
    /// contour.
    pub boundary_floor: f64,
    /// Boxes are not split below this side length.
    pub min_box: f64,
    pub depth_cap: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            edge_step: 0.25,
            max_phase_step: std::f64::consts::FRAC_PI_4,
            boundary_floor: 1e-12,
            min_box: 1e-7,
            depth_cap: super::channel::DEFAULT_DEPTH_CAP,
        }
    }
}

/// Result of a search: the zeros found and the winding number of the box.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSearch {
    pub zeros: Vec<ChannelZero>,
    pub winding: i64,
}

/// Lattice point, as the bit patterns of its coordinates.
type Key = (u64, u64);

fn key(z: Complex64) -> Key {
    (z.re.to_bits(), z.im.to_bits())
}

/// Memoizing contour engine for one channel.
pub struct Contour<'a> {
    det: ChannelDet<'a>,
    opts: SearchOptions,
    values: HashMap<Key, ChannelValue>,
    edges: HashMap<(Key, Key), f64>,
    pub evaluations: usize,
}

const MAX_BISECT: u32 = 40;

impl<'a> Contour<'a> {
    pub fn new(det: ChannelDet<'a>, opts: SearchOptions) -> Self {
        Self {
            det: det.with_depth_cap(opts.depth_cap),
            opts,
            values: HashMap::new(),
            edges: HashMap::new(),
            evaluations: 0,
        }
    }

    fn eval(&mut self, z: Complex64) -> Result<ChannelValue> {
        if let Some(v) = self.values.get(&key(z)) {
            return Ok(*v);
        }
        let v = self.det.eval(z)?;
        self.evaluations += 1;
        self.values.insert(key(z), v);
        Ok(v)
    }

    fn eval_on_contour(&mut self, z: Complex64) -> Result<ChannelValue> {
        let v = self.eval(z)?;
        if v.relative_size() < self.opts.boundary_floor {
            return Err(Error::BoundaryZero { re: z.re, im: z.im });
        }
        Ok(v)
    }

    /// Phase change of `D` along the segment from `a` to `b`.
    fn edge_phase(&mut self, a: Complex64, b: Complex64) -> Result<f64> {
        if let Some(v) = self.edges.get(&(key(a), key(b))) {
            return Ok(*v);
        }
        if let Some(v) = self.edges.get(&(key(b), key(a))) {
            return Ok(-*v);
        }
        let len = (b - a).norm();
        let n = (len / self.opts.edge_step).ceil().max(1.0) as usize;
        let mut total = 0.0;
        let mut prev_z = a;
        let mut prev = self.eval_on_contour(a)?;
        for i in 1..=n {
            let z = if i == n { b } else { a + (b - a) * (i as f64 / n as f64) };
            let cur = self.eval_on_contour(z)?;
            total += self.segment_phase(prev_z, prev, z, cur, 0)?;
            prev_z = z;
            prev = cur;
        }
        self.edges.insert((key(a), key(b)), total);
        Ok(total)
    }

    fn segment_phase(
        &mut self,
        za: Complex64,
        va: ChannelValue,
        zb: Complex64,
        vb: ChannelValue,
        depth: u32,
    ) -> Result<f64> {
        let ratio = vb.value / va.value;
        let dphi = ratio.arg();
        let mag = ratio.norm().ln().abs();
        if dphi.abs() <= self.opts.max_phase_step && mag <= 1.0 {
            return Ok(dphi);
        }
        if depth >= MAX_BISECT {
            return Err(Error::NonIntegerWinding { re: za.re, im: za.im });
        }
        let zm = (za + zb) * 0.5;
        let vm = self.eval_on_contour(zm)?;
        Ok(self.segment_phase(za, va, zm, vm, depth + 1)? + self.segment_phase(zm, vm, zb, vb, depth + 1)?)
    }

    /// Number of zeros (with order) inside the box.
    pub fn winding(&mut self, b: &SearchBox) -> Result<i64> {
        let c = b.corners();
        let mut total = 0.0;
        for i in 0..4 {
            total += self.edge_phase(c[i], c[(i + 1) % 4])?;
        }
        let w = total / std::f64::consts::TAU;
        let r = w.round();
        if (w - r).abs() > 1e-6 {
            let z = b.center();
            return Err(Error::NonIntegerWinding { re: z.re, im: z.im });
        }
        Ok(r as i64)
    }

    /// Newton iteration on `D` with a central-difference derivative.
    pub fn newton(&mut self, start: Complex64) -> Result<Option<ChannelZero>> {
        let mut z = start;
        for _ in 0..60 {
            let v = self.det.eval(z)?;
            self.evaluations += 3;
            let h = 1e-6 * z.norm().max(1.0);
            let hp = self.det.eval(z + h)?.value;
            let hm = self.det.eval(z - h)?.value;
            let deriv = (hp - hm) / (2.0 * h);
            if deriv.norm() == 0.0 || !deriv.re.is_finite() {
                return Ok(None);
            }
            let step = v.value / deriv;
            if !(step.re.is_finite() && step.im.is_finite()) {
                return Ok(None);
            }
            z -= step;
            if step.norm() <= 1e-14 * z.norm().max(1.0) {
                break;
            }
        }
        let v = self.det.eval(z)?;
        let residual = v.relative_size();
        if residual <= self.opts.tol {
            Ok(Some(ChannelZero {
                k: z,
                order: 1,
                residual,
            }))
        } else {
            Ok(None)
        }
    }

    /// Zeros inside a box whose winding number `w` is already known.
    fn resolve(&mut self, b: SearchBox, w: i64, out: &mut Vec<ChannelZero>) -> Result<()> {
        if w == 0 {
            return Ok(());
        }
        if w < 0 {
            let z = b.center();
            return Err(Error::NonIntegerWinding { re: z.re, im: z.im });
        }
        let slack = 1e-12 * b.center().norm().max(1.0);
        if w == 1 {
            if let Some(z) = self.newton(b.center())? {
                if b.contains(z.k, slack) {
                    out.push(z);
                    return Ok(());
                }
            }
        }
        if b.width().max(b.height()) <= self.opts.min_box {
            let found = self.newton(b.center())?;
            let z = match found {
                Some(z) => z,
                None => {
                    let v = self.det.eval(b.center())?;
                    ChannelZero {
                        k: b.center(),
                        order: 1,
                        residual: v.relative_size(),
                    }
                }
            };
            out.push(ChannelZero { order: w as u32, ..z });
            return Ok(());
        }
        // split off-centre so that symmetry lines (e.g. Re k = 0) are not hit
        let mut last_err = None;
        for frac in [0.4999, 0.4713, 0.5281, 0.4411] {
            match self.split(b, frac) {
                Ok(children) => {
                    let sum: i64 = children.iter().map(|c| c.1).sum();
                    if sum != w {
                        let z = b.center();
                        return Err(Error::NonIntegerWinding { re: z.re, im: z.im });
                    }
                    for (c, cw) in children {
                        self.resolve(c, cw, out)?;
                    }
                    return Ok(());
                }
                Err(e @ Error::BoundaryZero { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.expect("at least one split attempt"))
    }

    fn split(&mut self, b: SearchBox, frac: f64) -> Result<Vec<(SearchBox, i64)>> {
        let mr = b.re0 + frac * b.width();
        let mi = b.im0 + (1.0 - frac) * b.height();
        let kids = if b.width() >= 2.0 * b.height() {
            vec![SearchBox { re1: mr, ..b }, SearchBox { re0: mr, ..b }]
        } else if b.height() >= 2.0 * b.width() {
            vec![SearchBox { im1: mi, ..b }, SearchBox { im0: mi, ..b }]
        } else {
            vec![
                SearchBox {
                    re0: b.re0,
                    re1: mr,
                    im0: b.im0,
                    im1: mi,
                },
                SearchBox {
                    re0: mr,
                    re1: b.re1,
                    im0: b.im0,
                    im1: mi,
                },
                SearchBox {
                    re0: b.re0,
                    re1: mr,
                    im0: mi,
                    im1: b.im1,
                },
                SearchBox {
                    re0: mr,
                    re1: b.re1,
                    im0: mi,
                    im1: b.im1,
                },
            ]
        };
        let mut out = Vec::with_capacity(kids.len());
        for c in kids {
            let w = self.winding(&c)?;
            out.push((c, w));
        }
        Ok(out)
    }

    /// Search one box.
    pub fn search(&mut self, b: SearchBox) -> Result<ZeroSearch> {
        let w = self.winding(&b)?;
        let mut zeros = vec![];
        self.resolve(b, w, &mut zeros)?;
        Ok(ZeroSearch { zeros, winding: w })
    }
}

/// Zeros of `D_l` inside `b`, by the argument principle and Newton refinement.
pub fn channel_zeros(v: &super::RadialPotential, l: u32, b: SearchBox, opts: SearchOptions) -> Result<ZeroSearch> {
    let mut c = Contour::new(ChannelDet::new(v, l), opts);
    c.search(b)
}

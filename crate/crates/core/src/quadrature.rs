//! Adaptive Gauss-Kronrod quadrature in one and two dimensions.
//!
//! The 1-D integrator is a global adaptive bisection scheme over a 7/15-point
//! Gauss-Kronrod pair: the interval with the largest error estimate is split
//! until the summed estimate meets the requested tolerance. The 2-D integrator
//! applies the tensor-product rule on rectangles with the same strategy.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error(
        "quadrature did not converge on [{a}, {b}]: estimate {value:e} with error {error:e} after {evals} evaluations"
    )]
    NoConvergence {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
        evals: usize,
    },
    #[error("non-finite integrand value at {at}")]
    NonFinite { at: f64 },
}

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

// Kronrod abscissae (positive half, descending) and weights for the 15-point rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Fixed 15-point Kronrod rule with the embedded 7-point Gauss estimate.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_segments: 4000,
        }
    }
}

impl QuadOptions {
    pub fn abs(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol: 0.0,
            ..Self::default()
        }
    }
}

/// Global adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Estimate, QuadError> {
    integrate_with_breaks(&mut f, &[a, b], opts)
}

/// Adaptive integration over `[points[0], points[last]]`, with the interior
/// points used as initial breakpoints (known kinks or endpoint singularities).
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    f: &mut F,
    points: &[f64],
    opts: QuadOptions,
) -> Result<Estimate, QuadError> {
    assert!(points.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evals = 0usize;
    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (v, e) = gk15(f, w[0], w[1]);
        evals += 15;
        if !v.is_finite() {
            return Err(QuadError::NonFinite {
                at: 0.5 * (w[0] + w[1]),
            });
        }
        total += v;
        total_err += e;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let a0 = points[0];
    let b0 = *points.last().unwrap();
    loop {
        let tol = opts.abs_tol.max(opts.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(Estimate {
                value: total,
                error: total_err,
                evals,
            });
        }
        if heap.len() >= opts.max_segments {
            return Err(QuadError::NoConvergence {
                a: a0,
                b: b0,
                value: total,
                error: total_err,
                evals,
            });
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted in floating point; accept its contribution
            if heap.is_empty() || worst.error <= f64::EPSILON * total.abs() {
                return Ok(Estimate {
                    value: total,
                    error: total_err,
                    evals,
                });
            }
            return Err(QuadError::NoConvergence {
                a: a0,
                b: b0,
                value: total,
                error: total_err,
                evals,
            });
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        evals += 30;
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(QuadError::NonFinite { at: mid });
        }
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    rect: Rect,
    value: f64,
    error: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15_2d<F: FnMut(f64, f64) -> f64>(f: &mut F, r: Rect) -> (f64, f64) {
    let cx = 0.5 * (r.x0 + r.x1);
    let hx = 0.5 * (r.x1 - r.x0);
    let cy = 0.5 * (r.y0 + r.y1);
    let hy = 0.5 * (r.y1 - r.y0);
    // full 15-point node list with Kronrod and Gauss weights
    let mut nodes = [(0.0f64, 0.0f64, 0.0f64); 15];
    let mut idx = 0;
    for j in 0..7 {
        let wg = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
        nodes[idx] = (-XGK[j], WGK[j], wg);
        nodes[idx + 1] = (XGK[j], WGK[j], wg);
        idx += 2;
    }
    nodes[14] = (0.0, WGK[7], WG[3]);
    let mut kron = 0.0;
    let mut gauss = 0.0;
    for &(u, wku, wgu) in &nodes {
        let x = cx + hx * u;
        for &(v, wkv, wgv) in &nodes {
            let val = f(x, cy + hy * v);
            kron += wku * wkv * val;
            if wgu != 0.0 && wgv != 0.0 {
                gauss += wgu * wgv * val;
            }
        }
    }
    let jac = hx * hy;
    (kron * jac, ((kron - gauss) * jac).abs())
}

/// Global adaptive cubature over a rectangle; the cell with the largest error
/// estimate is split into four.
pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    rect: Rect,
    abs_tol: f64,
    max_cells: usize,
) -> Result<Estimate, QuadError> {
    let (v, e) = gk15_2d(&mut f, rect);
    let mut evals = 225;
    let mut total = v;
    let mut total_err = e;
    let mut heap = BinaryHeap::new();
    heap.push(Cell {
        rect,
        value: v,
        error: e,
    });
    while total_err > abs_tol {
        if heap.len() + 3 > max_cells {
            return Err(QuadError::NoConvergence {
                a: rect.x0,
                b: rect.x1,
                value: total,
                error: total_err,
                evals,
            });
        }
        let worst = heap.pop().unwrap();
        let r = worst.rect;
        let mx = 0.5 * (r.x0 + r.x1);
        let my = 0.5 * (r.y0 + r.y1);
        total -= worst.value;
        total_err -= worst.error;
        for sub in [
            Rect {
                x0: r.x0,
                x1: mx,
                y0: r.y0,
                y1: my,
            },
            Rect {
                x0: mx,
                x1: r.x1,
                y0: r.y0,
                y1: my,
            },
            Rect {
                x0: r.x0,
                x1: mx,
                y0: my,
                y1: r.y1,
            },
            Rect {
                x0: mx,
                x1: r.x1,
                y0: my,
                y1: r.y1,
            },
        ] {
            let (v, e) = gk15_2d(&mut f, sub);
            evals += 225;
            total += v;
            total_err += e;
            heap.push(Cell {
                rect: sub,
                value: v,
                error: e,
            });
        }
        if !total.is_finite() {
            return Err(QuadError::NonFinite { at: mx });
        }
    }
    // re-sum to shed accumulated cancellation in the running total
    let value = heap.iter().map(|c| c.value).sum();
    let error = heap.iter().map(|c| c.error).sum();
    Ok(Estimate { value, error, evals })
}

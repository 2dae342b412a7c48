//! Scalar s-wave oracle for the three-dimensional square well, independent of
//! the channel machinery.

use num_complex::Complex64;

use super::search::SearchBox;

fn sinc(s: Complex64) -> Complex64 {
    if s.norm() < 1e-4 {
        let s2 = s * s;
        Complex64::new(1.0, 0.0) - s2 / 6.0 + s2 * s2 / 120.0
    } else {
        s.sin() / s
    }
}

/// `cos(k'a) - i k a sinc(k'a)` with `k' = sqrt(k^2 - v)`: the matching
/// condition `k' cot(k'a) = ik` multiplied through by `sin(k'a) / k'`, which
/// makes it entire in `k`.
pub fn swave_function(a: f64, v: Complex64, k: Complex64) -> Complex64 {
    let s = (k * k - v).sqrt() * a;
    s.cos() - Complex64::new(0.0, 1.0) * k * a * sinc(s)
}

fn newton(a: f64, v: Complex64, mut k: Complex64) -> Option<Complex64> {
    for _ in 0..50 {
        let f = swave_function(a, v, k);
        let h = 1e-7 * k.norm().max(1.0);
        let df = (swave_function(a, v, k + h) - swave_function(a, v, k - h)) / (2.0 * h);
        let step = f / df;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        k -= step;
        if step.norm() < 1e-15 * k.norm().max(1.0) {
            break;
        }
    }
    let f = swave_function(a, v, k);
    (f.norm() < 1e-11).then_some(k)
}

/// Zeros of the s-wave matching function in `b`: sign tracking of the phase on
/// a 400 x 400 grid, then Newton polish of every cell with nonzero winding.
pub fn swave_oracle(a: f64, v: Complex64, b: SearchBox) -> Vec<Complex64> {
    const N: usize = 400;
    let dx = b.width() / N as f64;
    let dy = b.height() / N as f64;
    let mut grid = vec![Complex64::new(0.0, 0.0); (N + 1) * (N + 1)];
    for j in 0..=N {
        for i in 0..=N {
            let k = Complex64::new(b.re0 + i as f64 * dx, b.im0 + j as f64 * dy);
            grid[j * (N + 1) + i] = swave_function(a, v, k);
        }
    }
    let at = |i: usize, j: usize| grid[j * (N + 1) + i];
    let mut found: Vec<Complex64> = vec![];
    for j in 0..N {
        for i in 0..N {
            let c = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let turn: f64 = (0..4).map(|m| (c[(m + 1) % 4] / c[m]).arg()).sum();
            if (turn / std::f64::consts::TAU).round() == 0.0 {
                continue;
            }
            let start = Complex64::new(b.re0 + (i as f64 + 0.5) * dx, b.im0 + (j as f64 + 0.5) * dy);
            if let Some(z) = newton(a, v, start) {
                if b.contains_half_open(z) && !found.iter().any(|w| (w - z).norm() < 1e-9) {
                    found.push(z);
                }
            }
        }
    }
    found.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
    found
}

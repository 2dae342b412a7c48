use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use mzlaw::io_store::{write_csv, Cell, Table};
use mzlaw::mzdist::{c_const_area, MZDistribution, Sector};
use mzlaw::window::Window;
use num_complex::Complex64;

use crate::{distribution, short, CheckFailed};

struct Check {
    name: &'static str,
    /// Observed deviation.
    value: f64,
    limit: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value <= self.limit
    }
}

/// Limit of `g(t)` as `t -> 0+` from `t = 1e-2, 1e-3, 1e-4`.
fn extrapolate(g: impl Fn(f64) -> f64) -> f64 {
    let v = [g(1e-2), g(1e-3), g(1e-4)];
    let q = (v[1] - v[2]) / (v[0] - v[1]);
    if q.is_finite() && q.abs() < 1.0 {
        v[2] - (v[1] - v[2]) * q / (1.0 - q)
    } else {
        v[2]
    }
}

fn checks(dist: &MZDistribution, tol: f64) -> anyhow::Result<Vec<Check>> {
    let p = &dist.profile;
    let df = f64::from(dist.d);
    let mut out = vec![];

    out.push(Check {
        name: "endpoints h(0), h(pi)",
        value: p.h(0.0).abs().max(p.h(PI).abs()),
        limit: tol,
    });
    let sym = (0..64)
        .map(|i| {
            let t = FRAC_PI_2 * i as f64 / 63.0;
            (p.h(FRAC_PI_2 + t) - p.h(FRAC_PI_2 - t)).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check {
        name: "symmetry about pi/2",
        value: sym,
        limit: (10.0 * tol).max(1e-8),
    });
    out.push(Check {
        name: "h'(pi/2) = 0",
        value: p.dh(FRAC_PI_2).abs(),
        limit: (10.0 * tol).max(1e-8),
    });
    let right = extrapolate(|t| p.dh(t));
    let left = extrapolate(|t| p.dh(PI - t));
    out.push(Check {
        name: "h'(0+) = e_d, h'(pi-) = -e_d",
        value: (right - dist.e_d).abs().max((left + dist.e_d).abs()),
        limit: 1e-4,
    });
    let grid: Vec<f64> = (0..512).map(|i| PI * (i as f64 + 0.5) / 512.0).collect();
    let top = grid.iter().map(|&t| p.angular_factor(t)).fold(0.0, f64::max);
    let low = grid.iter().map(|&t| p.angular_factor(t)).fold(f64::INFINITY, f64::min);
    out.push(Check {
        name: "angular density >= 0",
        value: (-low).max(0.0) / top,
        limit: 1e-6,
    });
    let area = c_const_area(dist.d, 1e-9)?;
    out.push(Check {
        name: "dual c_d formulas",
        value: ((area - dist.c_d) / dist.c_d).abs(),
        limit: 1e-5,
    });
    let line = dist.e_d / (2.0 * PI * df * dist.c_d);
    let full = dist.sector_mass(Sector::new(0.0, PI)?);
    out.push(Check {
        name: "mass of unit disc (sectors)",
        value: (full + 2.0 * line - 1.0).abs(),
        limit: 1e-5,
    });
    out.push(Check {
        name: "mass of unit disc (window)",
        value: (dist.window_mass(&Window::unit_disc())? - 1.0).abs(),
        limit: 1e-5,
    });
    let w = Window::disc(Complex64::new(0.2, -0.3), 0.5)?;
    let m = dist.window_mass(&w)?;
    let mut homog: f64 = 0.0;
    for lambda in [0.5, 2.0] {
        let ml = dist.window_mass(&w.scaled(lambda))?;
        let expect = lambda.powi(dist.d as i32) * m;
        homog = homog.max(((ml - expect) / expect).abs());
    }
    out.push(Check {
        name: "window mass homogeneity",
        value: homog,
        limit: 1e-5,
    });
    let mut kh: f64 = 0.0;
    for z in [
        Complex64::new(0.3, -0.4),
        Complex64::new(-0.7, -0.1),
        Complex64::new(0.05, -0.9),
    ] {
        let k = dist.kappa(z)?;
        for t in [0.5, 2.0] {
            let kt = dist.kappa(z * t)?;
            kh = kh.max((kt / (t.powi(dist.d as i32 - 2) * k) - 1.0).abs());
        }
    }
    out.push(Check {
        name: "density homogeneity",
        value: kh,
        limit: 1e-10,
    });
    let h = 1e-3;
    let mut lap_err: f64 = 0.0;
    for z in [
        Complex64::new(0.5, -0.5),
        Complex64::new(-0.3, -0.2),
        Complex64::new(0.1, -0.8),
    ] {
        let f = |dz: Complex64| dist.potential_h(z + dz);
        let lap = (f(Complex64::new(h, 0.0))
            + f(Complex64::new(-h, 0.0))
            + f(Complex64::new(0.0, h))
            + f(Complex64::new(0.0, -h))
            - 4.0 * f(Complex64::new(0.0, 0.0)))
            / (h * h);
        let target = 2.0 * PI * dist.kappa(z)?;
        lap_err = lap_err.max(((lap - target) / target).abs());
    }
    out.push(Check {
        name: "Laplacian of H = 2 pi kappa",
        value: lap_err,
        limit: 0.01,
    });
    Ok(out)
}

pub fn run(d: u32, tol: f64, out: Option<&Path>) -> anyhow::Result<()> {
    let dist = distribution(d, tol)?;
    let checks = checks(&dist, tol)?;
    println!("d = {d}, tol = {tol:e}, c_d = {}, e_d = {}", dist.c_d, dist.e_d);
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        let status = if c.passed() { "pass" } else { "FAIL" };
        println!(
            "{status}  {:width$}  {:>12}  (limit {})",
            c.name,
            short(c.value),
            short(c.limit)
        );
    }
    if let Some(path) = out {
        let mut t = Table::new(&["check", "value", "limit", "passed"]);
        for c in &checks {
            t.push(vec![
                Cell::Text(c.name.to_string()),
                Cell::Float(c.value),
                Cell::Float(c.limit),
                Cell::Int(i64::from(c.passed())),
            ]);
        }
        write_csv(&t, path)?;
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        return Err(CheckFailed(format!("{failed} of {} checks failed", checks.len())).into());
    }
    Ok(())
}

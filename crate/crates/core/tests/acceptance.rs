//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fs;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mzlaw::complexfn::{rho, UpperPoint};
use mzlaw::counting::{empirical_measure, n_count, window_count};
use mzlaw::io_store::{resonance_table, samples_table, write_csv, ExperimentConfig};
use mzlaw::metric::{discretize_mz, dist_lip, rate_fit, DiscreteMeasure};
use mzlaw::mzdist::{c_const_area, e_const, MZDistribution, Sector};
use mzlaw::resonator::{
    channel_zeros, resonances, swave_oracle, RadialPotential, ResonanceOptions, ResonanceSet, SearchBox, SearchOptions,
};
use mzlaw::window::{lower_angle, Variant, Window};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

struct Ctx {
    d3: MZDistribution,
    d5: MZDistribution,
    sets: Vec<(f64, ResonanceSet)>,
}

impl Ctx {
    fn set(&self, radius: f64) -> &ResonanceSet {
        &self.sets.iter().find(|s| s.0 == radius).expect("set computed").1
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
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

fn constants(_: &Ctx) -> Outcome {
    let e3 = (e_const(3).unwrap() - 4.0 / 3.0).abs();
    let e5 = (e_const(5).unwrap() - 4.0 / 45.0).abs();
    outcome(
        e3 <= 1e-12 && e5 <= 1e-12,
        format!("|e_3 - 4/3| = {e3:.1e}, |e_5 - 4/45| = {e5:.1e}"),
    )
}

fn endpoints(ctx: &Ctx) -> Outcome {
    let p = &ctx.d3.profile;
    let e = ctx.d3.e_d;
    let right = extrapolate(|t| p.dh(t));
    let left = extrapolate(|t| p.dh(PI - t));
    let (er, el) = ((right - e).abs(), (left + e).abs());
    outcome(
        er <= 1e-4 && el <= 1e-4,
        format!("h_3'(0+) = {right:.10}, h_3'(pi-) = {left:.10}, errors {er:.1e}, {el:.1e}"),
    )
}

fn dual_c(ctx: &Ctx) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = vec![];
    for dist in [&ctx.d3, &ctx.d5] {
        let area = c_const_area(dist.d, 1e-9).unwrap();
        let rel = ((area - dist.c_d) / dist.c_d).abs();
        worst = worst.max(rel);
        parts.push(format!("c_{} = {:.12} (rel {rel:.1e})", dist.d, dist.c_d));
    }
    outcome(worst <= 1e-5, parts.join(", "))
}

fn normalization(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for dist in [&ctx.d3, &ctx.d5] {
        let df = f64::from(dist.d);
        let line = dist.e_d / (2.0 * PI * df * dist.c_d);
        let sectors = dist.sector_mass(Sector::new(0.0, PI).unwrap()) + 2.0 * line;
        let area = dist.window_mass(&Window::unit_disc()).unwrap();
        ok &= (sectors - 1.0).abs() <= 1e-5 && (area - 1.0).abs() <= 1e-3;
        parts.push(format!(
            "d = {}: sectors {:.1e}, window {:.1e}",
            dist.d,
            sectors - 1.0,
            area - 1.0
        ));
    }
    outcome(ok, format!("mass - 1: {}", parts.join("; ")))
}

fn symmetry_positivity(ctx: &Ctx) -> Outcome {
    let mut ok = true;
    let mut parts = vec![];
    for dist in [&ctx.d3, &ctx.d5] {
        let p = &dist.profile;
        let sym = (0..64)
            .map(|i| {
                let t = FRAC_PI_2 * i as f64 / 63.0;
                (p.h(FRAC_PI_2 + t) - p.h(FRAC_PI_2 - t)).abs()
            })
            .fold(0.0, f64::max);
        let vals: Vec<f64> = (0..512)
            .map(|i| p.angular_factor(PI * (i as f64 + 0.5) / 512.0))
            .collect();
        let top = vals.iter().copied().fold(0.0, f64::max);
        let low = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let pairs: Vec<(f64, f64)> = (2..=5)
            .map(|k| {
                let t = 10f64.powi(-k);
                (t, dist.kappa(Complex64::from_polar(1.0, -t)).unwrap())
            })
            .collect();
        let exponent = rate_fit(&pairs).unwrap().slope;
        ok &= sym <= 1e-8 && low >= -1e-6 * top && (exponent - 0.5).abs() <= 0.1;
        parts.push(format!(
            "d = {}: symmetry {sym:.1e}, min/max density {:.1e}, exponent {exponent:.4}",
            dist.d,
            low / top
        ));
    }
    outcome(ok, parts.join("; "))
}

fn potentials(ctx: &Ctx) -> Outcome {
    let mut lap: f64 = 0.0;
    let mut edge: f64 = 0.0;
    for dist in [&ctx.d3, &ctx.d5] {
        let h = 1e-3;
        for i in 0..5 {
            for j in 0..4 {
                let z = c(-0.8 + 0.4 * i as f64, -0.2 - 0.25 * j as f64);
                let f = |dz: Complex64| dist.potential_h(z + dz);
                let l = (f(c(h, 0.0)) + f(c(-h, 0.0)) + f(c(0.0, h)) + f(c(0.0, -h)) - 4.0 * f(c(0.0, 0.0))) / (h * h);
                let target = 2.0 * PI * dist.kappa(z).unwrap();
                lap = lap.max(((l - target) / target).abs());
            }
        }
        for x in [0.7, -0.7] {
            let eps = 1e-6;
            let dy = (dist.potential_h(c(x, eps)) - dist.potential_h(c(x, 0.0))) / eps;
            let target = x.abs().powi(dist.d as i32 - 1) * dist.e_d / dist.c_d;
            edge = edge.max((dy - target).abs());
        }
    }
    outcome(
        lap <= 0.01 && edge <= 1e-3,
        format!("Laplacian rel error {lap:.1e} on 20 points per d, axis derivative error {edge:.1e}"),
    )
}

fn engine_oracle(_: &Ctx) -> Outcome {
    let v = RadialPotential::step(3, 1.0, c(-9.0, 0.0)).unwrap();
    let b = SearchBox::new(-8.0, 8.0, -4.0, 0.0).unwrap();
    let oracle = swave_oracle(1.0, c(-9.0, 0.0), b);
    let found = channel_zeros(&v, 0, b, SearchOptions::default()).unwrap();
    let matched = oracle
        .iter()
        .all(|o| found.zeros.iter().filter(|z| (z.k - o).norm() < 1e-8).count() == 1);
    let one_to_one = matched && found.zeros.len() == oracle.len() && !oracle.is_empty();
    let mut windings_ok = i64::from(found.zeros.iter().map(|z| z.order).sum::<u32>()) == found.winding;
    let well = RadialPotential::step(3, 1.0, c(6.0, 0.0)).unwrap();
    let mut boxes = 1;
    for l in [0, 3, 7] {
        for b in [
            SearchBox::new(-12.0, 0.4, -3.0, -0.02).unwrap(),
            SearchBox::new(0.4, 14.0, -7.0, -1.0).unwrap(),
        ] {
            let s = channel_zeros(&well, l, b, SearchOptions::default()).unwrap();
            windings_ok &= s.zeros.iter().map(|z| i64::from(z.order)).sum::<i64>() == s.winding;
            boxes += 1;
        }
    }
    outcome(
        one_to_one && windings_ok,
        format!(
            "{} oracle zeros, {} found, order sums equal windings in {boxes} boxes: {windings_ok}",
            oracle.len(),
            found.zeros.len()
        ),
    )
}

fn weyl_ratio(ctx: &Ctx) -> Outcome {
    let mut ratios = vec![];
    let mut margins = vec![];
    for (radius, set) in &ctx.sets {
        let n = n_count(set, *radius).unwrap() as f64;
        ratios.push(n / (ctx.d3.c_d * radius.powi(3)));
        let last = set.l_last_nonempty.unwrap_or(0);
        margins.push((last, set.l_max));
    }
    let in_band = (0.85..=1.15).contains(ratios.last().unwrap());
    let approaching = ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs());
    let margin_ok = margins.iter().all(|&(last, lmax)| last + 5 <= lmax);
    let shown: Vec<String> = ctx
        .sets
        .iter()
        .zip(&ratios)
        .map(|((r, _), q)| format!("R = {r}: {q:.4}"))
        .collect();
    let m: Vec<String> = margins.iter().map(|(a, b)| format!("{a}/{b}")).collect();
    outcome(
        in_band && approaching && margin_ok,
        format!(
            "ratios {}; last nonempty channel / l_max {}",
            shown.join(", "),
            m.join(", ")
        ),
    )
}

fn sector_law(ctx: &Ctx) -> Outcome {
    let cuts = [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4, PI];
    let mut ok = true;
    let mut improved = 0;
    let mut parts = vec![];
    for k in 0..4 {
        let s = Sector::new(cuts[k], cuts[k + 1]).unwrap();
        let w = Window::sector(cuts[k], cuts[k + 1]).unwrap();
        let target = ctx.d3.corollary_coefficient(s);
        let gap = |radius: f64| {
            let n = window_count(ctx.set(radius), &w, radius, Variant::Closed).unwrap() as f64;
            (n / (ctx.d3.c_d * radius.powi(3)) - target).abs()
        };
        let (g20, g60) = (gap(20.0), gap(60.0));
        ok &= g60 <= 0.15;
        if g60 < g20 {
            improved += 1;
        }
        parts.push(format!("{g20:.3} -> {g60:.3}"));
    }
    outcome(
        ok && improved >= 3,
        format!("gaps R = 20 -> 60: {}; {improved} of 4 improve", parts.join(", ")),
    )
}

fn rate(ctx: &Ctx) -> Outcome {
    let set = ctx.set(60.0);
    let w = Window::disc(c(0.0, -0.5), 0.45).unwrap();
    let grid = discretize_mz(&ctx.d3, &w, 0.02).unwrap();
    let coarse = discretize_mz(&ctx.d3, &w, 0.04).unwrap();
    let mut values = vec![];
    let mut stability: f64 = 0.0;
    let mut gap: f64 = 0.0;
    for r in [15.0, 30.0, 60.0] {
        let em = empirical_measure(set, r, &ctx.d3).unwrap();
        let emp = DiscreteMeasure::from_empirical(&em, &w).unwrap();
        let fine = dist_lip(&emp, &grid, &w).unwrap();
        let rough = dist_lip(&emp, &coarse, &w).unwrap();
        stability = stability.max((fine.value - rough.value).abs() / 0.04);
        gap = gap.max(fine.solver_gap);
        values.push((r, fine.value));
    }
    let decreasing = values.windows(2).all(|p| p[1].1 < p[0].1);
    let slope = rate_fit(&values).unwrap().slope;
    let shown: Vec<String> = values.iter().map(|(r, v)| format!("r = {r}: {v:.6}")).collect();
    outcome(
        decreasing && slope < 0.0,
        format!(
            "{}; slope {slope:.3}; solver gap {gap:.1e}; mesh stability constant {stability:.3}",
            shown.join(", ")
        ),
    )
}

fn property_suites(ctx: &Ctx) -> Outcome {
    // branch cut: 1 - z^2 stays off the closed negative axis and rho is
    // finite on a grid of the upper half-plane
    let mut branch = true;
    for i in 0..200 {
        for j in 0..200 {
            let z = c(-3.0 + 6.0 * (i as f64 + 0.5) / 200.0, 3.0 * (j as f64 + 0.5) / 200.0);
            let s = c(1.0, 0.0) - z * z;
            let r = rho(UpperPoint::new(z).unwrap());
            branch &= (s.im != 0.0 || s.re > 0.0) && r.re.is_finite() && r.im.is_finite();
        }
    }

    let n = 100_000;
    let pts = ctx.d3.sample(n, 20_240_601);
    let (t1, t2) = (0.4, 1.1);
    let hits = pts
        .iter()
        .filter(|z| z.im < 0.0 && (t1..=t2).contains(&lower_angle(**z)))
        .count();
    let p = ctx.d3.sector_mass(Sector::new(t1, t2).unwrap());
    let freq = hits as f64 / n as f64;
    let sampler = (freq - p).abs() <= 3.0 * (p * (1.0 - p) / n as f64).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = Window::disc(c(0.0, -0.5), 0.45).unwrap();
    let random_measure = |rng: &mut ChaCha8Rng| {
        let k = rng.gen_range(1..12);
        let atoms = (0..k)
            .map(|_| {
                let z =
                    c(0.0, -0.5) + Complex64::from_polar(0.45 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
                (z, rng.gen_range(0.0..1.0))
            })
            .collect();
        DiscreteMeasure::new(atoms, w.clone()).unwrap()
    };
    let mut triangle = true;
    for _ in 0..50 {
        let (a, b, m) = (
            random_measure(&mut rng),
            random_measure(&mut rng),
            random_measure(&mut rng),
        );
        let ab = dist_lip(&a, &b, &w).unwrap();
        let ba = dist_lip(&b, &a, &w).unwrap();
        let bm = dist_lip(&b, &m, &w).unwrap();
        let am = dist_lip(&a, &m, &w).unwrap();
        let slack = ab.solver_gap + bm.solver_gap + am.solver_gap + 1e-12;
        triangle &= am.value <= ab.value + bm.value + slack;
        triangle &= (ab.value - ba.value).abs() <= ab.solver_gap + ba.solver_gap + 1e-12;
    }

    let dir = tempfile::tempdir().unwrap();
    let mut bytes = vec![];
    for name in ["a", "b"] {
        let res = dir.path().join(format!("{name}-res.csv"));
        let smp = dir.path().join(format!("{name}-smp.csv"));
        write_csv(&resonance_table(ctx.set(20.0)), &res).unwrap();
        write_csv(&samples_table(&ctx.d3.sample(1000, 5)), &smp).unwrap();
        bytes.push((fs::read(res).unwrap(), fs::read(smp).unwrap()));
    }
    let cfg = ExperimentConfig::default();
    let io =
        bytes[0] == bytes[1] && !bytes[0].0.contains(&b'\r') && ExperimentConfig::parse(&cfg.to_text()).unwrap() == cfg;

    outcome(
        branch && sampler && triangle && io,
        format!(
            "branch grid {branch}, sampler frequency {freq:.4} vs {p:.4} ({sampler}), \
             triangle on 50 triples {triangle}, byte-identical reruns {io}"
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let d3 = MZDistribution::build(3, TOL).expect("d = 3 profile");
    let d5 = MZDistribution::build(5, TOL).expect("d = 5 profile");
    let profile_time = start.elapsed();
    let v = RadialPotential::step(3, 1.0, c(6.0, 0.0)).unwrap();
    let t = Instant::now();
    let sets: Vec<(f64, ResonanceSet)> = [20.0, 40.0, 60.0]
        .iter()
        .map(|&r| {
            (
                r,
                resonances(&v, r, &ResonanceOptions::default()).expect("resonance set"),
            )
        })
        .collect();
    let set_time = t.elapsed();
    println!(
        "setup: profiles {:.2} s, resonance sets R = 20, 40, 60 {:.1} s",
        profile_time.as_secs_f64(),
        set_time.as_secs_f64()
    );
    let ctx = Ctx { d3, d5, sets };

    type Criterion = (&'static str, fn(&Ctx) -> Outcome, Duration);
    let secs = Duration::from_secs;
    let criteria: [Criterion; 11] = [
        ("closed-form constants", constants, secs(1)),
        ("endpoint derivatives", endpoints, secs(30)),
        ("dual c_d formulas", dual_c, secs(120)),
        ("normalization", normalization, secs(60)),
        ("symmetry and positivity", symmetry_positivity, secs(60)),
        ("potential consistency", potentials, secs(60)),
        ("resonance engine oracle", engine_oracle, secs(60)),
        ("Weyl ratio", weyl_ratio, secs(600)),
        ("sector law", sector_law, secs(600)),
        ("distance decay", rate, secs(600)),
        ("property suites", property_suites, secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f(&ctx);
        let mut elapsed = t.elapsed();
        // the shared resonance sets count against the criteria that use them
        if i == 7 {
            elapsed += set_time;
        }
        let in_time = elapsed <= *budget;
        let pass = out.pass && in_time;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name} ({:.2} s{}): {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time {
                String::new()
            } else {
                format!(", over {} s", budget.as_secs())
            },
            out.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

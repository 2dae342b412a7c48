use std::sync::OnceLock;

use mzlaw::counting::empirical_measure;
use mzlaw::metric::{discretize_mz, dist_bracket, dist_lip, rate_fit, DiscreteMeasure, Provenance};
use mzlaw::mzdist::MZDistribution;
use mzlaw::resonator::{resonances, RadialPotential, ResonanceOptions};
use mzlaw::window::Window;
use mzlaw::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dist() -> &'static MZDistribution {
    static D: OnceLock<MZDistribution> = OnceLock::new();
    D.get_or_init(|| MZDistribution::build(3, 1e-10).unwrap())
}

fn omega() -> Window {
    Window::disc(Complex64::new(0.0, -0.5), 0.45).unwrap()
}

fn random_points(rng: &mut ChaCha8Rng, w: &Window, n: usize) -> Vec<Complex64> {
    let (x0, x1, y0, y1) = w.bounding_box();
    let mut out = vec![];
    while out.len() < n {
        let z = Complex64::new(rng.gen_range(x0..x1), rng.gen_range(y0..y1));
        if w.contains(z, mzlaw::window::Variant::Open) {
            out.push(z);
        }
    }
    out
}

fn measure(atoms: Vec<(Complex64, f64)>, w: &Window) -> DiscreteMeasure {
    DiscreteMeasure::new(atoms, w.clone()).unwrap()
}

/// Best value of `phi(p) - phi(q)` over a fine grid of `phi(p)`, with
/// `phi(q)` as small as the constraints allow.
fn two_atom_grid_oracle(p: Complex64, q: Complex64, w: &Window) -> f64 {
    let (bp, bq, pq) = (w.boundary_distance(p), w.boundary_distance(q), (p - q).norm());
    let n = 200_000;
    (0..=n)
        .map(|i| {
            let fp = -bp + 2.0 * bp * i as f64 / n as f64;
            let fq = (-bq).max(fp - pq);
            if fq > bq {
                f64::NEG_INFINITY
            } else {
                fp - fq
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Unit masses: every source goes to a distinct sink or to the boundary,
/// and unmatched sinks are fed from the boundary.
fn assignment_oracle(src: &[Complex64], snk: &[Complex64], w: &Window) -> f64 {
    fn rec(i: usize, src: &[Complex64], snk: &[Complex64], used: &mut Vec<bool>, w: &Window) -> f64 {
        if i == src.len() {
            return snk
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(q, _)| w.boundary_distance(*q))
                .sum();
        }
        let bp = w.boundary_distance(src[i]);
        let mut best = bp + rec(i + 1, src, snk, used, w);
        for j in 0..snk.len() {
            if !used[j] {
                used[j] = true;
                let c = (src[i] - snk[j]).norm().min(bp + w.boundary_distance(snk[j]));
                best = best.min(c + rec(i + 1, src, snk, used, w));
                used[j] = false;
            }
        }
        best
    }
    rec(0, src, snk, &mut vec![false; snk.len()], w)
}

#[test]
fn identical_measures_are_at_distance_zero() {
    let w = omega();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let atoms: Vec<_> = random_points(&mut rng, &w, 30).into_iter().map(|z| (z, 0.1)).collect();
    let m = measure(atoms, &w);
    let r = dist_lip(&m, &m, &w).unwrap();
    assert_eq!(r.value, 0.0);
    assert_eq!(r.gamma, 1.0);
}

#[test]
fn two_atoms_match_the_grid_oracle() {
    let w = omega();
    let cases = [
        (Complex64::new(0.0, -0.5), Complex64::new(0.05, -0.52), 0.7),
        (Complex64::new(-0.3, -0.5), Complex64::new(0.3, -0.5), 1.3),
        (Complex64::new(0.0, -0.1), Complex64::new(0.0, -0.9), 0.2),
    ];
    for (p, q, m) in cases {
        let a = measure(vec![(p, m)], &w);
        let b = measure(vec![(q, m)], &w);
        let r = dist_lip(&a, &b, &w).unwrap();
        let closed = m * (p - q).norm().min(w.boundary_distance(p) + w.boundary_distance(q));
        let grid = m * two_atom_grid_oracle(p, q, &w);
        assert!((grid - closed).abs() < 1e-5 * m);
        assert!((r.value - closed).abs() < 1e-10, "{} vs {closed}", r.value);
        assert!(r.solver_gap <= 1e-6 * r.value.max(1.0));
    }
}

#[test]
fn unit_masses_match_the_assignment_oracle() {
    let w = omega();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [1, 3, 5, 6] {
        for _ in 0..5 {
            let src = random_points(&mut rng, &w, n);
            let snk = random_points(&mut rng, &w, n);
            let a = measure(src.iter().map(|&z| (z, 1.0)).collect(), &w);
            let b = measure(snk.iter().map(|&z| (z, 1.0)).collect(), &w);
            let r = dist_lip(&a, &b, &w).unwrap();
            let oracle = assignment_oracle(&src, &snk, &w);
            assert!((r.value - oracle).abs() < 1e-9, "n = {n}: {} vs {oracle}", r.value);
        }
    }
}

#[test]
fn unbalanced_masses_use_the_boundary() {
    let w = omega();
    let p = Complex64::new(0.1, -0.4);
    let a = measure(vec![(p, 2.0)], &w);
    let empty = measure(vec![], &w);
    let r = dist_lip(&a, &empty, &w).unwrap();
    assert!((r.value - 2.0 * w.boundary_distance(p)).abs() < 1e-12);
}

#[test]
fn contract_violations() {
    let w = omega();
    assert!(matches!(
        DiscreteMeasure::new(vec![(Complex64::new(0.0, -0.5), -1.0)], w.clone()),
        Err(Error::NegativeMass(_))
    ));
    assert!(DiscreteMeasure::new(vec![(Complex64::new(2.0, -0.5), 1.0)], w.clone()).is_err());
    let mut bad = measure(vec![(Complex64::new(0.0, -0.5), 1.0)], &w);
    bad.atoms[0].1 = -0.5;
    let ok = measure(vec![], &w);
    assert!(matches!(dist_lip(&bad, &ok, &w), Err(Error::NegativeMass(_))));
}

#[test]
fn shrinking_the_window_cannot_increase_the_distance() {
    let big = Window::disc(Complex64::new(0.0, -0.5), 0.45).unwrap();
    let small = Window::disc(Complex64::new(0.0, -0.5), 0.3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let a: Vec<_> = random_points(&mut rng, &small, 15)
            .into_iter()
            .map(|z| (z, rng.gen_range(0.1..1.0)))
            .collect();
        let b: Vec<_> = random_points(&mut rng, &small, 12)
            .into_iter()
            .map(|z| (z, rng.gen_range(0.1..1.0)))
            .collect();
        let d_big = dist_lip(&measure(a.clone(), &big), &measure(b.clone(), &big), &big).unwrap();
        let d_small = dist_lip(&measure(a, &small), &measure(b, &small), &small).unwrap();
        assert!(d_small.value <= d_big.value + d_big.solver_gap + d_small.solver_gap + 1e-12);
    }
}

#[test]
fn grid_discretization() {
    let d = dist();
    let w = omega();
    let exact = d.window_mass(&w).unwrap();
    let mut last: Option<(f64, f64)> = None;
    for mesh in [0.08, 0.04, 0.02] {
        let g = discretize_mz(d, &w, mesh).unwrap();
        assert_eq!(g.provenance, Provenance::MzGrid { mesh });
        let mass = g.total_mass();
        let err = (mass - exact).abs();
        assert!(err <= 10.0 * mesh, "mesh {mesh}: error {err}");
        if let Some((prev_mass, prev_err)) = last {
            assert!(
                (mass - prev_mass).abs() < prev_err,
                "mesh {mesh}: change {}",
                (mass - prev_mass).abs()
            );
            assert!(err < prev_err, "mesh {mesh}: error {err} after {prev_err}");
        }
        last = Some((mass, err));
    }
    // windows crossing the axis carry mu0 atoms on the real segment
    let across = Window::disc(Complex64::new(0.3, 0.0), 0.4).unwrap();
    let g = discretize_mz(d, &across, 0.02).unwrap();
    assert!(g.atoms.iter().any(|a| a.0.im == 0.0));
    assert!((g.total_mass() - d.window_mass(&across).unwrap()).abs() <= 0.2);
    let up = Window::disc(Complex64::new(0.0, 1.0), 0.5).unwrap();
    assert!(discretize_mz(d, &up, 0.05).unwrap().atoms.is_empty());
    assert!(discretize_mz(d, &w, 0.0).is_err());
}

#[test]
fn empirical_restriction_respects_completeness() {
    let v = RadialPotential::step(3, 1.0, Complex64::new(6.0, 0.0)).unwrap();
    let rs = resonances(&v, 10.0, &ResonanceOptions::default()).unwrap();
    let em = empirical_measure(&rs, 10.0, dist()).unwrap();
    let m = DiscreteMeasure::from_empirical(&em, &omega()).unwrap();
    assert_eq!(m.provenance, Provenance::Empirical { r: 10.0 });
    assert!(m
        .atoms
        .iter()
        .all(|a| omega().contains(a.0, mzlaw::window::Variant::Closed)));
    let wide = Window::unit_disc().scaled(1.5);
    assert!(matches!(
        DiscreteMeasure::from_empirical(&em, &wide),
        Err(Error::OutOfRange { .. })
    ));
    let g = discretize_mz(dist(), &omega(), 0.04).unwrap();
    let r = dist_lip(&m, &g, &omega()).unwrap();
    assert_eq!(r.mesh, 0.04);
    assert!(r.value > 0.0 && r.solver_gap <= 1e-6 * r.value.max(1.0));
}

#[test]
fn bracket_shapes() {
    let b = dist_bracket(0.3, 0.5, 1.0).unwrap();
    assert_eq!((b.lower, b.upper_shape), (0.3, 0.5));
    let b = dist_bracket(1e-5, 1e-4, 0.5).unwrap();
    assert!((b.upper_shape - 1e-2).abs() < 1e-15);
    assert!(b.up_to_constant);
    assert!(dist_bracket(0.1, 0.1, 0.0).is_err());
    assert!(dist_bracket(0.1, 0.1, 1.5).is_err());
}

#[test]
fn rate_fits() {
    let pairs: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0]
        .iter()
        .map(|&r: &f64| (r, r.powf(-0.5)))
        .collect();
    let f = rate_fit(&pairs).unwrap();
    assert!((f.slope + 0.5).abs() < 1e-12);
    assert!(f.residual < 1e-12);
    let flat = rate_fit(&[(1.0, 3.0), (2.0, 3.0), (5.0, 3.0)]).unwrap();
    assert!(flat.slope.abs() < 1e-15);
    assert!(matches!(rate_fit(&[(1.0, 1.0), (2.0, 1.0)]), Err(Error::Degenerate(_))));
    assert!(matches!(
        rate_fit(&[(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)]),
        Err(Error::Degenerate(_))
    ));
    assert!(rate_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
}

fn arb_measure() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-0.3f64..0.3, -0.8f64..-0.2, 0.0f64..1.0), 1..25)
}

fn to_measure(raw: &[(f64, f64, f64)]) -> DiscreteMeasure {
    measure(
        raw.iter().map(|&(x, y, m)| (Complex64::new(x, y), m)).collect(),
        &omega(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn symmetric_and_triangle(a in arb_measure(), b in arb_measure(), c in arb_measure()) {
        let w = omega();
        let (a, b, c) = (to_measure(&a), to_measure(&b), to_measure(&c));
        let ab = dist_lip(&a, &b, &w).unwrap();
        let ba = dist_lip(&b, &a, &w).unwrap();
        let bc = dist_lip(&b, &c, &w).unwrap();
        let ac = dist_lip(&a, &c, &w).unwrap();
        for r in [&ab, &ba, &bc, &ac] {
            prop_assert!(r.value >= 0.0);
            prop_assert!(r.solver_gap <= 1e-6 * r.value.max(1.0));
        }
        let slack = ab.solver_gap + ba.solver_gap + bc.solver_gap + ac.solver_gap + 1e-12;
        prop_assert!((ab.value - ba.value).abs() <= slack);
        prop_assert!(ac.value <= ab.value + bc.value + slack);
    }
}

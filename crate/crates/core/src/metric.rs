//! Distances between discrete measures on a window, tested against
//! 1-Lipschitz functions vanishing on the window boundary, and power-law fits
//! of their decay.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::counting::EmpiricalMeasure;
use crate::error::{Error, Result};
use crate::mzdist::MZDistribution;
use crate::window::{Variant, Window};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Empirical { r: f64 },
    MzGrid { mesh: f64 },
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub atoms: Vec<(Complex64, f64)>,
    pub window: Window,
    pub provenance: Provenance,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<(Complex64, f64)>, window: Window) -> Result<Self> {
        let m = Self {
            atoms,
            window,
            provenance: Provenance::Other,
        };
        m.check()?;
        Ok(m)
    }

    /// Restriction of an empirical measure to the closed window.
    pub fn from_empirical(em: &EmpiricalMeasure, w: &Window) -> Result<Self> {
        w.validate()?;
        if w.circumradius() > em.complete_radius {
            return Err(Error::OutOfRange {
                r: w.circumradius() * em.r,
                limit: em.complete_radius * em.r,
            });
        }
        Ok(Self {
            atoms: em
                .atoms
                .iter()
                .filter(|(z, _)| w.contains(*z, Variant::Closed))
                .copied()
                .collect(),
            window: w.clone(),
            provenance: Provenance::Empirical { r: em.r },
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    fn check(&self) -> Result<()> {
        self.window.validate()?;
        for &(z, m) in &self.atoms {
            if !(m >= 0.0) {
                return Err(Error::NegativeMass(m));
            }
            if !self.window.contains(z, Variant::Closed) {
                return Err(Error::InvalidArgument(format!("atom {z} lies outside the window")));
            }
        }
        Ok(())
    }
}

fn mesh_of(p: Provenance) -> Option<f64> {
    match p {
        Provenance::MzGrid { mesh } => Some(mesh),
        _ => None,
    }
}

/// Subsamples per cell side, away from and near the real axis, and in cells
/// cut by the window boundary.
const SUB: usize = 4;
const SUB_AXIS: usize = 3 * SUB;
/// Side length at which the quadtree on cut cells stops splitting.
const EDGE_LEAF: f64 = 1e-4;

#[derive(Default)]
struct CellSum {
    mass: f64,
    moment: Complex64,
    best: (f64, Complex64),
}

impl CellSum {
    /// Midpoint rule on an `s` by `s` subgrid, dropping samples outside the window.
    fn sample(&mut self, dist: &MZDistribution, w: &Window, o: (f64, f64), h: (f64, f64), s: usize) -> Result<()> {
        let (sx, sy) = (h.0 / s as f64, h.1 / s as f64);
        for q in 0..s {
            for p in 0..s {
                let z = Complex64::new(o.0 + (p as f64 + 0.5) * sx, o.1 + (q as f64 + 0.5) * sy);
                if z.im >= 0.0 || !w.contains(z, Variant::Closed) {
                    continue;
                }
                let m = dist.kappa(z)? * sx * sy;
                self.mass += m;
                self.moment += z * m;
                if m > self.best.0 {
                    self.best = (m, z);
                }
            }
        }
        Ok(())
    }

    /// Splits cut cells into quadrants down to `depth` levels; quadrants
    /// clear of the boundary get the plain midpoint rule.
    fn cut_cell(&mut self, dist: &MZDistribution, w: &Window, o: (f64, f64), h: (f64, f64), depth: u32) -> Result<()> {
        let mid = Complex64::new(o.0 + 0.5 * h.0, o.1 + 0.5 * h.1);
        let half_diag = 0.5 * h.0.hypot(h.1);
        let inside = w.contains(mid, Variant::Closed);
        let dist_b = w.boundary_distance(mid);
        if dist_b >= half_diag {
            return if inside { self.sample(dist, w, o, h, 2) } else { Ok(()) };
        }
        if depth == 0 {
            return self.sample(dist, w, o, h, 2);
        }
        let q = (0.5 * h.0, 0.5 * h.1);
        for (i, j) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            self.cut_cell(dist, w, (o.0 + i * q.0, o.1 + j * q.1), q, depth - 1)?;
        }
        Ok(())
    }
}

/// Grid discretization of the limit distribution on a window: one atom per
/// square cell (side at most `mesh`) at the centroid of its `kappa`-mass,
/// plus atoms on the real segments of the window carrying the exact `mu0`
/// masses.
pub fn discretize_mz(dist: &MZDistribution, w: &Window, mesh: f64) -> Result<DiscreteMeasure> {
    w.validate()?;
    if !(mesh > 0.0 && mesh.is_finite()) {
        return Err(Error::Degenerate(format!("mesh {mesh} must be positive")));
    }
    let (x0, x1, y0, y1) = w.bounding_box();
    let top = y1.min(0.0);
    let mut atoms = vec![];
    if y0 < top {
        let nx = ((x1 - x0) / mesh).ceil().max(1.0) as usize;
        let ny = ((top - y0) / mesh).ceil().max(1.0) as usize;
        let (hx, hy) = ((x1 - x0) / nx as f64, (top - y0) / ny as f64);
        let edge_depth = (hx.max(hy) / EDGE_LEAF).log2().ceil().max(1.0) as u32;
        for j in 0..ny {
            let cy0 = y0 + j as f64 * hy;
            // kappa behaves like |y|^{1/2} at the axis: sample finer there
            let near_axis = top - (cy0 + hy) < mesh;
            for i in 0..nx {
                let cx0 = x0 + i as f64 * hx;
                let mid = Complex64::new(cx0 + 0.5 * hx, cy0 + 0.5 * hy);
                let cut = !w.contains(mid, Variant::Closed) || w.boundary_distance(mid) < 0.5 * hx.hypot(hy);
                let mut acc = CellSum::default();
                if cut {
                    acc.cut_cell(dist, w, (cx0, cy0), (hx, hy), edge_depth)?;
                } else {
                    let s = if near_axis { SUB_AXIS } else { SUB };
                    acc.sample(dist, w, (cx0, cy0), (hx, hy), s)?;
                }
                let CellSum { mass, moment, best } = acc;
                if mass > 0.0 {
                    let c = moment / mass;
                    let at = if w.contains(c, Variant::Closed) { c } else { best.1 };
                    atoms.push((at, mass));
                }
            }
        }
    }
    let d = dist.d as i32;
    let f0 = |x: f64| x.signum() * x.abs().powi(d);
    let f1 = |x: f64| x.abs().powi(d + 1);
    for (a, b) in w.real_segments() {
        let k = ((b - a) / mesh).ceil().max(1.0) as usize;
        let h = (b - a) / k as f64;
        for i in 0..k {
            let (p, q) = (a + i as f64 * h, if i + 1 == k { b } else { a + (i + 1) as f64 * h });
            let m = dist.mu0_mass(p, q);
            if m > 0.0 {
                // mass centroid of |x|^{d-1} on [p, q]
                let x = (f1(q) - f1(p)) / (f0(q) - f0(p)) * f64::from(d) / f64::from(d + 1);
                atoms.push((Complex64::new(x.clamp(p, q), 0.0), m));
            }
        }
    }
    Ok(DiscreteMeasure {
        atoms,
        window: w.clone(),
        provenance: Provenance::MzGrid { mesh },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub gamma: f64,
    pub omega: Window,
    /// Value attained by an explicit feasible test function.
    pub value: f64,
    /// Mesh of the grid-discretized input, zero when neither input is a grid.
    pub mesh: f64,
    /// Difference between the transport cost and the attained value.
    pub solver_gap: f64,
}

/// Grid of the integer costs.
const COST_GRID: f64 = 1e-12;
/// Total mass after integer scaling.
const MASS_SCALE: f64 = (1u64 << 50) as f64;

/// `sup sum phi (mu1 - mu2)` over `phi` with `|phi(x) - phi(y)| <= |x - y|`
/// and `|phi(x)| <= dist(x, boundary)` on the supports.
///
/// Solved as a transportation problem in which mass may also be moved to or
/// taken from the boundary at the cost of the distance to it; the optimal
/// test function is recovered from the dual potentials.
pub fn dist_lip(mu1: &DiscreteMeasure, mu2: &DiscreteMeasure, w: &Window) -> Result<DistanceReport> {
    w.validate()?;
    for mu in [mu1, mu2] {
        for &(z, m) in &mu.atoms {
            if !(m >= 0.0) {
                return Err(Error::NegativeMass(m));
            }
            if !w.contains(z, Variant::Closed) {
                return Err(Error::InvalidArgument(format!("atom {z} lies outside the window")));
            }
        }
    }
    let mesh = mesh_of(mu1.provenance).or(mesh_of(mu2.provenance)).unwrap_or(0.0);
    // net mass per support point, in first-seen order
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut pts: Vec<(Complex64, f64)> = vec![];
    for (mu, sign) in [(mu1, 1.0), (mu2, -1.0)] {
        for &(z, m) in &mu.atoms {
            let k = (z.re.to_bits(), z.im.to_bits());
            let i = *index.entry(k).or_insert_with(|| {
                pts.push((z, 0.0));
                pts.len() - 1
            });
            pts[i].1 += sign * m;
        }
    }
    let pos: Vec<(Complex64, f64)> = pts.iter().copied().filter(|p| p.1 > 0.0).collect();
    let neg: Vec<(Complex64, f64)> = pts.iter().map(|&(z, m)| (z, -m)).filter(|p| p.1 > 0.0).collect();
    if pos.is_empty() && neg.is_empty() {
        return Ok(DistanceReport {
            gamma: 1.0,
            omega: w.clone(),
            value: 0.0,
            mesh,
            solver_gap: 0.0,
        });
    }
    let bd = |z: Complex64| w.boundary_distance(z);
    let tp = Transport::new(
        pos.iter().map(|p| (p.0, bd(p.0))).collect(),
        neg.iter().map(|p| (p.0, bd(p.0))).collect(),
    );
    let total = pos.iter().map(|p| p.1).sum::<f64>().max(neg.iter().map(|p| p.1).sum());
    let q = MASS_SCALE / total;
    let sup: Vec<i64> = pos.iter().map(|p| (p.1 * q).round() as i64).collect();
    let dem: Vec<i64> = neg.iter().map(|p| (p.1 * q).round() as i64).collect();
    let sol = tp.solve(&sup, &dem)?;
    let primal = sol.cost / q;

    // c-transform of the source potentials: f(x) = min_s (p_s + c(s, x))
    let ns = tp.sources.len();
    let f = |x: (Complex64, f64)| (0..=ns).fold(f64::INFINITY, |m, s| m.min(sol.source_pot[s] + tp.cost_to(s, x)));
    let fb = (0..=ns).fold(f64::INFINITY, |m, s| m.min(sol.source_pot[s] + tp.source_boundary(s)));
    let mut value = 0.0;
    for &(z, m) in &pts {
        if m != 0.0 {
            value += -(f((z, bd(z))) - fb) * m;
        }
    }
    Ok(DistanceReport {
        gamma: 1.0,
        omega: w.clone(),
        value,
        mesh,
        solver_gap: (primal - value).abs(),
    })
}

struct TransportSolution {
    /// Optimal cost in integer mass units and real cost units.
    cost: f64,
    /// Real-valued dual potentials of the sources (boundary source last).
    source_pot: Vec<f64>,
}

/// Transportation problem between supply points and demand points, each
/// side extended by the boundary; costs are
/// `min(|x - y|, b(x) + b(y))`, `b(x)`, and `0` between the two boundary
/// copies.
struct Transport {
    sources: Vec<(Complex64, f64)>,
    sinks: Vec<(Complex64, f64)>,
    grid: f64,
}

const ROOT_DOWN: i8 = -1;
const ROOT_UP: i8 = 1;

impl Transport {
    fn new(sources: Vec<(Complex64, f64)>, sinks: Vec<(Complex64, f64)>) -> Self {
        let diam = sources
            .iter()
            .chain(&sinks)
            .fold(0.0f64, |m, p| m.max(p.0.norm() + p.1));
        Self {
            sources,
            sinks,
            grid: COST_GRID * diam.max(1.0),
        }
    }

    /// Real cost from source `s` (boundary when `s == ns`) to a point with
    /// its boundary distance.
    fn cost_to(&self, s: usize, x: (Complex64, f64)) -> f64 {
        if s == self.sources.len() {
            return x.1;
        }
        let (z, b) = self.sources[s];
        (z - x.0).norm().min(b + x.1)
    }

    fn source_boundary(&self, s: usize) -> f64 {
        if s == self.sources.len() {
            0.0
        } else {
            self.sources[s].1
        }
    }

    fn real_cost(&self, s: usize, t: usize) -> f64 {
        let nt = self.sinks.len();
        if t == nt {
            return self.source_boundary(s);
        }
        self.cost_to(s, self.sinks[t])
    }

    fn int_cost(&self, s: usize, t: usize) -> i64 {
        (self.real_cost(s, t) / self.grid).round() as i64
    }

    /// Exact primal network simplex with strongly feasible trees and block
    /// search pivoting.
    fn solve(&self, sup: &[i64], dem: &[i64]) -> Result<TransportSolution> {
        let ns = self.sources.len() + 1;
        let nt = self.sinks.len() + 1;
        let n = ns + nt;
        let root = n;
        let total_sup: i64 = sup.iter().sum();
        let total_dem: i64 = dem.iter().sum();
        let mut supply = vec![0i64; n];
        supply[..ns - 1].copy_from_slice(sup);
        supply[ns - 1] = total_dem;
        for (j, &d) in dem.iter().enumerate() {
            supply[ns + j] = -d;
        }
        supply[n - 1] = -total_sup;

        let e_real = ns * nt;
        let costs: Vec<i64> = (0..e_real).map(|a| self.int_cost(a / nt, a % nt)).collect();
        let max_cost = costs.iter().copied().max().unwrap_or(0);
        let art = (max_cost + 1).saturating_mul(n as i64);
        let endpoints = |a: usize| -> (usize, usize) {
            if a < e_real {
                (a / nt, ns + a % nt)
            } else {
                let v = a - e_real;
                if supply[v] > 0 {
                    (v, root)
                } else {
                    (root, v)
                }
            }
        };
        let cost = |a: usize| -> i64 {
            if a < e_real {
                costs[a]
            } else if supply[a - e_real] > 0 {
                0
            } else {
                art
            }
        };

        let mut flow: HashMap<usize, i64> = HashMap::with_capacity(2 * n);
        let mut adj: Vec<Vec<usize>> = vec![vec![]; n + 1];
        for v in 0..n {
            let a = e_real + v;
            flow.insert(a, supply[v].abs());
            adj[v].push(a);
            adj[root].push(a);
        }

        let mut parent = vec![usize::MAX; n + 1];
        let mut pred = vec![usize::MAX; n + 1];
        let mut dir = vec![0i8; n + 1];
        let mut depth = vec![0usize; n + 1];
        let mut pi = vec![0i64; n + 1];
        let mut queue = Vec::with_capacity(n + 1);

        let block = ((e_real as f64).sqrt().ceil() as usize).max(10).min(e_real);
        let mut next_arc = 0usize;
        let mut pivots = 0usize;
        parent[root] = usize::MAX;
        depth[root] = 0;
        pi[root] = 0;
        for &a in &adj[root] {
            let (x, y) = endpoints(a);
            let v = if x == root { y } else { x };
            parent[v] = root;
            pred[v] = a;
            depth[v] = 1;
            if x == root {
                dir[v] = ROOT_DOWN;
                pi[v] = cost(a);
            } else {
                dir[v] = ROOT_UP;
                pi[v] = -cost(a);
            }
        }
        loop {
            // block search for an entering arc
            let mut entering = None;
            let mut best = 0i64;
            let mut scanned = 0usize;
            let mut in_block = 0usize;
            while scanned < e_real {
                let a = next_arc;
                next_arc = if next_arc + 1 == e_real { 0 } else { next_arc + 1 };
                scanned += 1;
                in_block += 1;
                let (s, t) = (a / nt, ns + a % nt);
                let rc = costs[a] + pi[s] - pi[t];
                if rc < best {
                    best = rc;
                    entering = Some(a);
                }
                if in_block == block {
                    if entering.is_some() {
                        break;
                    }
                    in_block = 0;
                }
            }
            let Some(ein) = entering else { break };
            pivots += 1;

            let (first, second) = endpoints(ein);
            let (mut u, mut v) = (first, second);
            while u != v {
                if depth[u] >= depth[v] {
                    u = parent[u];
                } else {
                    v = parent[v];
                }
            }
            let join = u;
            let mut delta = i64::MAX;
            let mut u_out = usize::MAX;
            let mut on_first = false;
            let mut u = first;
            while u != join {
                // source side: up arcs lose flow
                if dir[u] == ROOT_UP {
                    let f = flow[&pred[u]];
                    if f < delta {
                        delta = f;
                        u_out = u;
                        on_first = true;
                    }
                }
                u = parent[u];
            }
            let mut u = second;
            while u != join {
                if dir[u] == ROOT_DOWN {
                    let f = flow[&pred[u]];
                    if f <= delta {
                        delta = f;
                        u_out = u;
                        on_first = false;
                    }
                }
                u = parent[u];
            }
            if u_out == usize::MAX {
                return Err(Error::Degenerate("unbounded transport problem".into()));
            }
            let mut u = first;
            while u != join {
                *flow.get_mut(&pred[u]).expect("tree arc") -= i64::from(dir[u]) * delta;
                u = parent[u];
            }
            let mut u = second;
            while u != join {
                *flow.get_mut(&pred[u]).expect("tree arc") += i64::from(dir[u]) * delta;
                u = parent[u];
            }
            let leaving = pred[u_out];
            flow.remove(&leaving);
            flow.insert(ein, delta);
            let (x, y) = endpoints(leaving);
            adj[x].retain(|&a| a != leaving);
            adj[y].retain(|&a| a != leaving);
            // the subtree below the leaving arc hangs from the entering arc now
            let (q, p) = if on_first { (first, second) } else { (second, first) };
            parent[q] = p;
            pred[q] = ein;
            depth[q] = depth[p] + 1;
            if q == first {
                dir[q] = ROOT_UP;
                pi[q] = pi[p] - cost(ein);
            } else {
                dir[q] = ROOT_DOWN;
                pi[q] = pi[p] + cost(ein);
            }
            queue.clear();
            queue.push(q);
            let mut head = 0;
            while head < queue.len() {
                let u = queue[head];
                head += 1;
                for &a in &adj[u] {
                    let (x, y) = endpoints(a);
                    let v = if x == u { y } else { x };
                    if v == parent[u] {
                        continue;
                    }
                    parent[v] = u;
                    pred[v] = a;
                    depth[v] = depth[u] + 1;
                    if x == u {
                        dir[v] = ROOT_DOWN;
                        pi[v] = pi[u] + cost(a);
                    } else {
                        dir[v] = ROOT_UP;
                        pi[v] = pi[u] - cost(a);
                    }
                    queue.push(v);
                }
            }
            adj[first].push(ein);
            adj[second].push(ein);
        }
        log::debug!("transport: {} x {} nodes, {pivots} pivots", ns, nt);

        for v in 0..n {
            if flow.get(&(e_real + v)).copied().unwrap_or(0) > 0 {
                return Err(Error::Degenerate("transport problem is infeasible".into()));
            }
        }
        let mut used: Vec<(usize, i64)> = flow.into_iter().filter(|&(a, f)| a < e_real && f > 0).collect();
        used.sort_unstable();
        let total: f64 = used
            .iter()
            .map(|&(a, f)| self.real_cost(a / nt, a % nt) * f as f64)
            .sum();
        let source_pot = (0..ns).map(|s| pi[s] as f64 * self.grid).collect();
        Ok(TransportSolution {
            cost: total,
            source_pot,
        })
    }
}

/// Lower value and upper shape `(d1p)^gamma` of the Holder distance bracket.
/// The upper shape holds only up to an unspecified constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper_shape: f64,
    pub up_to_constant: bool,
}

pub fn dist_bracket(d1: f64, d1p: f64, gamma: f64) -> Result<Bracket> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidArgument(format!("gamma {gamma} must lie in (0, 1]")));
    }
    if !(d1 >= 0.0 && d1p >= 0.0) {
        return Err(Error::InvalidArgument("distances must be nonnegative".into()));
    }
    Ok(Bracket {
        lower: d1,
        upper_shape: d1p.powf(gamma),
        up_to_constant: gamma < 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
}

/// Least-squares line through `(log r, log value)`.
pub fn rate_fit(pairs: &[(f64, f64)]) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(Error::Degenerate(format!(
            "rate fit needs at least 3 points, got {}",
            pairs.len()
        )));
    }
    if pairs
        .iter()
        .any(|&(r, v)| !(r > 0.0 && v > 0.0 && r.is_finite() && v.is_finite()))
    {
        return Err(Error::Degenerate(
            "rate fit needs positive finite radii and values".into(),
        ));
    }
    let mut radii: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    radii.sort_by(f64::total_cmp);
    if radii.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Degenerate("rate fit needs distinct radii".into()));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}

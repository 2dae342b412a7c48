use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use mzlaw::counting::{empirical_measure, weak_convergence_report, weyl_remainder_fit};
use mzlaw::io_store::{
    distance_table, load_config, report_table, resonance_table, save_config, write_csv, write_json, ExperimentConfig,
};
use mzlaw::metric::{discretize_mz, dist_lip, rate_fit, DiscreteMeasure, DistanceReport, RateFit};
use mzlaw::resonator::{resonances as compute, swave_oracle, RadialPotential, ResonanceSet, SearchBox};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::{distribution, short, CheckFailed, Usage};

/// Oracle zeros farther than this from the search circle are compared.
const ORACLE_MARGIN: f64 = 0.5;
const ORACLE_TILE: f64 = 8.0;

fn load(path: &Path, out: Option<&Path>) -> anyhow::Result<(ExperimentConfig, PathBuf)> {
    let cfg = load_config(path).with_context(|| format!("reading {}", path.display()))?;
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.clone());
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok((cfg, dir))
}

fn resonance_set(cfg: &ExperimentConfig) -> anyhow::Result<ResonanceSet> {
    let v = RadialPotential::new(cfg.d, cfg.shells.clone())?;
    let set = compute(&v, cfg.radius(), &cfg.resonance_options())?;
    log::info!(
        "{} resonances and {} exceptional zeros up to |lambda| = {} (channels 0..={})",
        set.entries.len(),
        set.exceptional.len(),
        set.radius,
        set.channels.len().saturating_sub(1)
    );
    Ok(set)
}

/// l = 0 zeros of a single-shell d = 3 potential from the s-wave matching
/// condition, compared against the channel search both ways.
fn oracle_check(set: &ResonanceSet) -> anyhow::Result<usize> {
    let v = &set.potential;
    if v.d != 3 || v.shells.len() != 1 {
        return Err(Usage("--oracle needs d = 3 and a single shell".into()).into());
    }
    let (a, value) = (v.shells[0].radius, v.shells[0].value);
    let r = set.radius;
    let n = (2.0 * r / ORACLE_TILE).ceil() as usize;
    let m = (r / ORACLE_TILE).ceil() as usize;
    let (w, h) = (2.0 * r / n as f64, r / m as f64);
    let mut zeros: Vec<Complex64> = vec![];
    for i in 0..n {
        for j in 0..m {
            let top = if j == 0 { -1e-9 } else { -(j as f64) * h };
            let b = SearchBox::new(-r + i as f64 * w, -r + (i + 1) as f64 * w, -((j + 1) as f64) * h, top)?;
            for z in swave_oracle(a, value, b) {
                if zeros.iter().all(|y| (y - z).norm() > 1e-8) {
                    zeros.push(z);
                }
            }
        }
    }
    let inner = r - ORACLE_MARGIN;
    let channel: Vec<Complex64> = set.entries.iter().filter(|e| e.l == 0).map(|e| e.lambda).collect();
    let near = |z: Complex64, list: &[Complex64]| list.iter().any(|y| (y - z).norm() < 1e-6);
    let missed: Vec<_> = zeros
        .iter()
        .filter(|z| z.norm() <= inner && !near(**z, &channel))
        .collect();
    let extra: Vec<_> = channel
        .iter()
        .filter(|z| z.norm() <= inner && !near(**z, &zeros))
        .collect();
    if !missed.is_empty() || !extra.is_empty() {
        for z in &missed {
            eprintln!("oracle zero {z} not found by the channel search");
        }
        for z in &extra {
            eprintln!("channel zero {z} not confirmed by the oracle");
        }
        return Err(CheckFailed(format!(
            "l = 0 oracle mismatch: {} missed, {} unconfirmed",
            missed.len(),
            extra.len()
        ))
        .into());
    }
    Ok(zeros.iter().filter(|z| z.norm() <= inner).count())
}

pub fn resonances(config: &Path, oracle: bool, out: Option<&Path>) -> anyhow::Result<()> {
    let (cfg, dir) = load(config, out)?;
    let set = resonance_set(&cfg)?;
    let path = dir.join("resonances.csv");
    write_csv(&resonance_table(&set), &path)?;
    let total: u64 = set.all_entries().map(|e| e.mult).sum();
    println!(
        "{} distinct zeros ({} with multiplicity) up to radius {}; wrote {}",
        set.entries.len() + set.exceptional.len(),
        total,
        set.radius,
        path.display()
    );
    if oracle {
        let n = oracle_check(&set)?;
        println!("l = 0 channel agrees with the s-wave oracle on {n} zeros");
    }
    Ok(())
}

#[derive(Serialize)]
struct Summary {
    radius: f64,
    c_d: f64,
    mesh: f64,
    /// Log-log fit of the distance against `r`, per window.
    rate_fits: BTreeMap<String, Option<RateFit>>,
    weyl_remainder: Option<RateFit>,
}

pub fn converge(config: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let (cfg, dir) = load(config, out)?;
    if cfg.windows.is_empty() {
        return Err(Usage(format!("{}: no [window] sections", config.display())).into());
    }
    let set = resonance_set(&cfg)?;
    let dist = distribution(cfg.d, cfg.profile_tol)?;
    write_csv(&resonance_table(&set), &dir.join("resonances.csv"))?;
    save_config(&cfg, &dir.join("config.txt"))?;

    let (eligible, skipped): (Vec<_>, Vec<_>) = cfg
        .windows
        .iter()
        .cloned()
        .partition(|(_, w)| !w.has_real_boundary_segment());
    for (id, _) in &skipped {
        log::warn!("window `{id}` has a boundary segment on the real axis; left out of the mass report");
    }
    let rows = weak_convergence_report(&set, &dist, &cfg.r_grid, &eligible)?;
    write_csv(&report_table(&rows), &dir.join("report.csv"))?;

    let grids = cfg
        .windows
        .par_iter()
        .map(|(_, w)| discretize_mz(&dist, w, cfg.mesh))
        .collect::<mzlaw::Result<Vec<_>>>()?;
    let jobs: Vec<(f64, usize)> = cfg
        .r_grid
        .iter()
        .flat_map(|&r| (0..cfg.windows.len()).map(move |i| (r, i)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(r, i)| {
            let w = &cfg.windows[i].1;
            let em = empirical_measure(&set, r, &dist)?;
            let emp = DiscreteMeasure::from_empirical(&em, w)?;
            dist_lip(&emp, &grids[i], w)
        })
        .collect::<mzlaw::Result<Vec<DistanceReport>>>()?;
    let dist_rows: Vec<(f64, String, DistanceReport)> = jobs
        .iter()
        .zip(reports)
        .map(|(&(r, i), rep)| (r, cfg.windows[i].0.clone(), rep))
        .collect();
    write_csv(&distance_table(&dist_rows), &dir.join("distances.csv"))?;

    let mut fits = BTreeMap::new();
    for (id, _) in &cfg.windows {
        let pairs: Vec<(f64, f64)> = dist_rows
            .iter()
            .filter(|r| &r.1 == id)
            .map(|r| (r.0, r.2.value))
            .collect();
        let fit = match rate_fit(&pairs) {
            Ok(f) => Some(f),
            Err(e) => {
                log::warn!("window `{id}`: no rate fit ({e})");
                None
            }
        };
        fits.insert(id.clone(), fit);
    }
    let weyl = weyl_remainder_fit(&set, &dist, &cfg.r_grid).ok();
    let summary = Summary {
        radius: set.radius,
        c_d: dist.c_d,
        mesh: cfg.mesh,
        rate_fits: fits,
        weyl_remainder: weyl,
    };
    write_json(&summary, &dir.join("summary.json"))?;

    for (r, id, rep) in &dist_rows {
        println!(
            "r = {r:>8}  {id:>12}  distance {}  (gap {})",
            short(rep.value),
            short(rep.solver_gap)
        );
    }
    for (id, fit) in &summary.rate_fits {
        match fit {
            Some(f) => println!("{id}: slope {} (rms residual {})", short(f.slope), short(f.residual)),
            None => println!("{id}: no fit"),
        }
    }
    println!("wrote report.csv, distances.csv, summary.json to {}", dir.display());
    Ok(())
}

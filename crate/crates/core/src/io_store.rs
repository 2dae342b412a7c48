//! Experiment configs, the angular profile cache, and deterministic CSV and
//! JSON output.
//!
//! Config files are flat `key = value` text with `[section]` headers; `#`
//! starts a comment. Sections are `[potential]`, `[search]`,
//! `[experiment]` and any number of `[window NAME]`:
//!
//! ```text
//! version = 1
//!
//! [potential]
//! d = 3
//! shells = 1:6            # outer_radius:re[:im], innermost first
//!
//! [search]
//! radius = 60             # defaults to the largest entry of r_grid
//! tol = 1e-10
//!
//! [experiment]
//! r_grid = 15, 30, 60
//! mesh = 0.02
//! seed = 1
//! output = out
//!
//! [window lower]
//! shape = disc            # disc | sector | polygon
//! center = 0, -0.5
//! radius = 0.45
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complexfn::SigmaCurve;
use crate::counting::ReportRow;
use crate::error::{Error, Result};
use crate::metric::DistanceReport;
use crate::mzdist::{build_profile, check_dimension, AngularProfile, MZDistribution};
use crate::resonator::{ResonanceEntry, ResonanceOptions, ResonanceSet, Shell};
use crate::window::{Shape, Window};

pub const CONFIG_VERSION: u32 = 1;
pub const CACHE_VERSION: u32 = 1;
/// Environment variable overriding the profile cache directory.
pub const CACHE_DIR_ENV: &str = "MZLAW_CACHE_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub d: u32,
    pub shells: Vec<Shell>,
    /// Resonance search radius; `None` means the largest entry of `r_grid`.
    pub search_radius: Option<f64>,
    pub tol: f64,
    pub box_size: f64,
    pub l_stop: u32,
    pub r_grid: Vec<f64>,
    pub windows: Vec<(String, Window)>,
    pub mesh: f64,
    pub seed: u64,
    pub profile_tol: f64,
    pub output: PathBuf,
}

/// The unit step barrier of height 6 in three dimensions on the radius grid
/// 15, 30, 60, with one disc window below the axis.
impl Default for ExperimentConfig {
    fn default() -> Self {
        let opts = ResonanceOptions::default();
        Self {
            d: 3,
            shells: vec![Shell {
                radius: 1.0,
                value: Complex64::new(6.0, 0.0),
            }],
            search_radius: None,
            tol: opts.search.tol,
            box_size: opts.box_size,
            l_stop: opts.l_stop,
            r_grid: vec![15.0, 30.0, 60.0],
            windows: vec![(
                "lower".to_string(),
                Window::disc(Complex64::new(0.0, -0.5), 0.45).expect("valid disc"),
            )],
            mesh: 0.02,
            seed: 1,
            profile_tol: 1e-10,
            output: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn radius(&self) -> f64 {
        self.search_radius
            .unwrap_or_else(|| self.r_grid.iter().copied().fold(0.0, f64::max))
    }

    pub fn resonance_options(&self) -> ResonanceOptions {
        let mut o = ResonanceOptions::default();
        o.search.tol = self.tol;
        o.box_size = self.box_size;
        o.l_stop = self.l_stop;
        o
    }

    /// Canonical text form; parsing it gives back an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "version = {CONFIG_VERSION}\n\n[potential]\nd = {}", self.d);
        let shells: Vec<String> = self
            .shells
            .iter()
            .map(|sh| {
                if sh.value.im == 0.0 {
                    format!("{}:{}", sh.radius, sh.value.re)
                } else {
                    format!("{}:{}:{}", sh.radius, sh.value.re, sh.value.im)
                }
            })
            .collect();
        let _ = writeln!(s, "shells = {}\n\n[search]", shells.join(", "));
        if let Some(r) = self.search_radius {
            let _ = writeln!(s, "radius = {r}");
        }
        let _ = writeln!(
            s,
            "tol = {}\nbox_size = {}\nl_stop = {}\n\n[experiment]",
            self.tol, self.box_size, self.l_stop
        );
        let grid: Vec<String> = self.r_grid.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(
            s,
            "r_grid = {}\nmesh = {}\nseed = {}\nprofile_tol = {}\noutput = {}",
            grid.join(", "),
            self.mesh,
            self.seed,
            self.profile_tol,
            self.output.display()
        );
        for (name, w) in &self.windows {
            let _ = writeln!(s, "\n[window {name}]");
            match &w.shape {
                Shape::Disc { center, radius } => {
                    let _ = writeln!(
                        s,
                        "shape = disc\ncenter = {}, {}\nradius = {radius}",
                        center.re, center.im
                    );
                }
                Shape::SectorAnnulus { theta1, theta2, r1, r2 } => {
                    let _ = writeln!(
                        s,
                        "shape = sector\ntheta1 = {theta1}\ntheta2 = {theta2}\nr1 = {r1}\nr2 = {r2}"
                    );
                }
                Shape::Polygon { vertices } => {
                    let v: Vec<String> = vertices.iter().map(|z| format!("{} {}", z.re, z.im)).collect();
                    let _ = writeln!(s, "shape = polygon\nvertices = {}", v.join("; "));
                }
            }
            if w.scale != 1.0 {
                let _ = writeln!(s, "scale = {}", w.scale);
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        Parser::default().run(text)
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    ExperimentConfig::parse(&fs::read_to_string(path)?)
}

pub fn save_config(c: &ExperimentConfig, path: &Path) -> Result<()> {
    write_text(path, &c.to_text())
}

fn cerr(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

fn num(line: usize, field: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| cerr(line, field, format!("`{}` is not a number", v.trim())))?;
    if !x.is_finite() {
        return Err(cerr(line, field, "value must be finite"));
    }
    Ok(x)
}

fn positive(line: usize, field: &str, v: &str) -> Result<f64> {
    let x = num(line, field, v)?;
    if x <= 0.0 {
        return Err(cerr(line, field, format!("{x} must be positive")));
    }
    Ok(x)
}

fn list(line: usize, field: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|p| num(line, field, p)).collect()
}

#[derive(Default)]
struct WindowSpec {
    name: String,
    line: usize,
    shape: Option<String>,
    center: Option<Complex64>,
    radius: Option<f64>,
    theta1: Option<f64>,
    theta2: Option<f64>,
    r1: Option<f64>,
    r2: Option<f64>,
    vertices: Option<Vec<Complex64>>,
    scale: Option<f64>,
}

impl WindowSpec {
    fn build(self) -> Result<(String, Window)> {
        let missing = |f: &str| cerr(self.line, f, format!("window `{}` needs `{f}`", self.name));
        let shape = match self.shape.as_deref() {
            Some("disc") => Shape::Disc {
                center: self.center.ok_or_else(|| missing("center"))?,
                radius: self.radius.ok_or_else(|| missing("radius"))?,
            },
            Some("sector") => Shape::SectorAnnulus {
                theta1: self.theta1.ok_or_else(|| missing("theta1"))?,
                theta2: self.theta2.ok_or_else(|| missing("theta2"))?,
                r1: self.r1.unwrap_or(0.0),
                r2: self.r2.unwrap_or(1.0),
            },
            Some("polygon") => Shape::Polygon {
                vertices: self.vertices.clone().ok_or_else(|| missing("vertices"))?,
            },
            Some(other) => return Err(cerr(self.line, "shape", format!("unknown shape `{other}`"))),
            None => return Err(missing("shape")),
        };
        let w = Window::new(shape, self.scale.unwrap_or(1.0)).map_err(|e| cerr(self.line, "shape", e.to_string()))?;
        Ok((self.name, w))
    }
}

#[derive(Default)]
struct Parser {
    cfg: ExperimentConfig,
    section: String,
    windows: Vec<WindowSpec>,
    have_d: bool,
    have_shells: bool,
    have_grid: bool,
}

impl Parser {
    fn run(mut self, text: &str) -> Result<ExperimentConfig> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(h) = body.strip_prefix('[') {
                let h = h
                    .strip_suffix(']')
                    .ok_or_else(|| cerr(line, "section", "unterminated section header"))?
                    .trim();
                self.section = h.to_string();
                if let Some(name) = h.strip_prefix("window") {
                    let name = name.trim();
                    if name.is_empty() {
                        return Err(cerr(line, "section", "window sections need a name"));
                    }
                    if self.windows.iter().any(|w| w.name == name) {
                        return Err(cerr(line, "section", format!("duplicate window `{name}`")));
                    }
                    self.windows.push(WindowSpec {
                        name: name.to_string(),
                        line,
                        ..Default::default()
                    });
                } else if !matches!(h, "potential" | "search" | "experiment") {
                    return Err(cerr(line, "section", format!("unknown section `{h}`")));
                }
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| cerr(line, body, "expected `key = value`"))?;
            self.set(line, k.trim(), v.trim())?;
        }
        if !self.have_d {
            return Err(cerr(0, "d", "missing in [potential]"));
        }
        if !self.have_shells {
            return Err(cerr(0, "shells", "missing in [potential]"));
        }
        if !self.have_grid {
            return Err(cerr(0, "r_grid", "missing in [experiment]"));
        }
        let mut cfg = self.cfg;
        crate::resonator::RadialPotential::new(cfg.d, cfg.shells.clone())
            .map_err(|e| cerr(0, "shells", e.to_string()))?;
        if let Some(r) = cfg.search_radius {
            if cfg.r_grid.iter().any(|&g| g > r) {
                return Err(cerr(
                    0,
                    "r_grid",
                    format!("entries must not exceed the search radius {r}"),
                ));
            }
        }
        cfg.windows = self.windows.into_iter().map(WindowSpec::build).collect::<Result<_>>()?;
        Ok(cfg)
    }

    fn set(&mut self, line: usize, k: &str, v: &str) -> Result<()> {
        let c = &mut self.cfg;
        match (self.section.as_str(), k) {
            ("", "version") => {
                let found: u32 = v.parse().map_err(|_| cerr(line, k, "expected an integer"))?;
                if found != CONFIG_VERSION {
                    return Err(Error::Schema {
                        found,
                        expected: CONFIG_VERSION,
                    });
                }
            }
            ("potential", "d") => {
                c.d = v.parse().map_err(|_| cerr(line, k, "expected an integer"))?;
                check_dimension(c.d).map_err(|e| cerr(line, k, e.to_string()))?;
                self.have_d = true;
            }
            ("potential", "shells") => {
                let mut shells = vec![];
                for part in v.split(',') {
                    let f: Vec<&str> = part.split(':').collect();
                    if !(f.len() == 2 || f.len() == 3) {
                        return Err(cerr(line, k, format!("`{}` is not radius:re[:im]", part.trim())));
                    }
                    let im = if f.len() == 3 { num(line, k, f[2])? } else { 0.0 };
                    shells.push(Shell {
                        radius: positive(line, k, f[0])?,
                        value: Complex64::new(num(line, k, f[1])?, im),
                    });
                }
                c.shells = shells;
                self.have_shells = true;
            }
            ("search", "radius") => c.search_radius = Some(positive(line, k, v)?),
            ("search", "tol") => c.tol = positive(line, k, v)?,
            ("search", "box_size") => c.box_size = positive(line, k, v)?,
            ("search", "l_stop") => {
                c.l_stop = v.parse().map_err(|_| cerr(line, k, "expected an integer"))?;
                if c.l_stop == 0 {
                    return Err(cerr(line, k, "must be at least 1"));
                }
            }
            ("experiment", "r_grid") => {
                c.r_grid = list(line, k, v)?;
                if c.r_grid.iter().any(|&r| r <= 0.0) {
                    return Err(cerr(line, k, "radii must be positive"));
                }
                self.have_grid = true;
            }
            ("experiment", "mesh") => c.mesh = positive(line, k, v)?,
            ("experiment", "seed") => c.seed = v.parse().map_err(|_| cerr(line, k, "expected an integer"))?,
            ("experiment", "profile_tol") => {
                c.profile_tol = positive(line, k, v)?;
                if c.profile_tol > 1e-4 {
                    return Err(cerr(line, k, "must not exceed 1e-4"));
                }
            }
            ("experiment", "output") => c.output = PathBuf::from(v),
            (s, _) if s.starts_with("window") => {
                let w = self.windows.last_mut().expect("window section registered");
                match k {
                    "shape" => w.shape = Some(v.to_string()),
                    "center" => {
                        let p = list(line, k, v)?;
                        if p.len() != 2 {
                            return Err(cerr(line, k, "expected `re, im`"));
                        }
                        w.center = Some(Complex64::new(p[0], p[1]));
                    }
                    "radius" => w.radius = Some(positive(line, k, v)?),
                    "theta1" => w.theta1 = Some(num(line, k, v)?),
                    "theta2" => w.theta2 = Some(num(line, k, v)?),
                    "r1" => w.r1 = Some(num(line, k, v)?),
                    "r2" => w.r2 = Some(positive(line, k, v)?),
                    "scale" => w.scale = Some(positive(line, k, v)?),
                    "vertices" => {
                        let mut vs = vec![];
                        for p in v.split(';') {
                            let xy: Vec<&str> = p.split_whitespace().collect();
                            if xy.len() != 2 {
                                return Err(cerr(line, k, format!("`{}` is not `re im`", p.trim())));
                            }
                            vs.push(Complex64::new(num(line, k, xy[0])?, num(line, k, xy[1])?));
                        }
                        w.vertices = Some(vs);
                    }
                    _ => return Err(cerr(line, k, "unknown window key")),
                }
            }
            (s, _) => {
                let s = if s.is_empty() { "top level" } else { s };
                return Err(cerr(line, k, format!("unknown key in {s}")));
            }
        }
        Ok(())
    }
}

/// 17-significant-digit scientific form used in all tables.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_strings(v: &[f64]) -> Vec<String> {
    v.iter().map(|&x| fmt_float(x)).collect()
}

fn parse_strings(v: &[String]) -> Result<Vec<f64>> {
    v.iter()
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Io(format!("bad number `{s}` in cache file")))
        })
        .collect()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, text)?;
    Ok(())
}

/// On-disk form of an angular profile. Numbers are decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub schema_version: u32,
    pub d: u32,
    pub tol: String,
    pub chebyshev_coeffs: Vec<String>,
    pub dcoeffs: Vec<String>,
    pub ddcoeffs: Vec<String>,
    pub e_d: String,
    pub c_d: String,
    pub sigma_nodes: Vec<[String; 2]>,
}

impl ProfileFile {
    pub fn from_distribution(dist: &MZDistribution) -> Self {
        let p = &dist.profile;
        Self {
            schema_version: CACHE_VERSION,
            d: p.d,
            tol: fmt_float(p.tol),
            chebyshev_coeffs: fmt_strings(&p.coeffs),
            dcoeffs: fmt_strings(&p.dcoeffs),
            ddcoeffs: fmt_strings(&p.ddcoeffs),
            e_d: fmt_float(dist.e_d),
            c_d: fmt_float(dist.c_d),
            sigma_nodes: p
                .sigma
                .nodes
                .iter()
                .map(|&(t, r)| [fmt_float(t), fmt_float(r)])
                .collect(),
        }
    }

    pub fn into_distribution(self) -> Result<MZDistribution> {
        if self.schema_version != CACHE_VERSION {
            return Err(Error::Schema {
                found: self.schema_version,
                expected: CACHE_VERSION,
            });
        }
        check_dimension(self.d)?;
        let tol = parse_strings(std::slice::from_ref(&self.tol))?[0];
        let coeffs = parse_strings(&self.chebyshev_coeffs)?;
        let dcoeffs = parse_strings(&self.dcoeffs)?;
        let ddcoeffs = parse_strings(&self.ddcoeffs)?;
        if coeffs.is_empty() || dcoeffs.len() != coeffs.len() {
            return Err(Error::Io("inconsistent coefficient arrays in cache file".into()));
        }
        let mut nodes = vec![];
        for [t, r] in &self.sigma_nodes {
            let v = parse_strings(&[t.clone(), r.clone()])?;
            nodes.push((v[0], v[1]));
        }
        let profile = AngularProfile::from_parts(self.d, tol, coeffs, dcoeffs, ddcoeffs, SigmaCurve::from_nodes(nodes));
        Ok(MZDistribution::from_profile(profile))
    }
}

pub fn save_profile(dist: &MZDistribution, path: &Path) -> Result<()> {
    let f = ProfileFile::from_distribution(dist);
    let text = serde_json::to_string_pretty(&f).map_err(|e| Error::Io(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

pub fn load_profile(path: &Path) -> Result<MZDistribution> {
    let text = fs::read_to_string(path)?;
    let f: ProfileFile = serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    f.into_distribution()
}

/// Directory of cached profiles keyed by `(d, tol)`.
#[derive(Debug)]
pub struct ProfileCache {
    pub dir: PathBuf,
    builds: AtomicUsize,
}

impl ProfileCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            builds: AtomicUsize::new(0),
        }
    }

    /// Cache in `$MZLAW_CACHE_DIR`, or `mzlaw-cache` under the system
    /// temporary directory.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => Self::new(d),
            _ => Self::new(std::env::temp_dir().join("mzlaw-cache")),
        }
    }

    pub fn path(&self, d: u32, tol: f64) -> PathBuf {
        self.dir.join(format!("profile-d{d}-tol{tol:e}.json"))
    }

    /// Number of profile builds performed through this cache.
    pub fn builds(&self) -> usize {
        self.builds.load(Ordering::SeqCst)
    }

    /// Load the distribution for `(d, tol)`, building and storing it when the
    /// cache entry is absent or unreadable.
    pub fn load_or_build(&self, d: u32, tol: f64) -> Result<MZDistribution> {
        let path = self.path(d, tol);
        if path.exists() {
            match load_profile(&path) {
                Ok(dist) if dist.d == d && dist.profile.tol == tol => return Ok(dist),
                Ok(_) => log::warn!(
                    "{}: cache entry does not match d = {d}, tol = {tol}; rebuilding",
                    path.display()
                ),
                Err(e) => log::warn!("{}: unreadable cache entry ({e}); rebuilding", path.display()),
            }
        }
        self.builds.fetch_add(1, Ordering::SeqCst);
        let dist = MZDistribution::from_profile(build_profile(d, tol)?);
        if let Err(e) = save_profile(&dist, &path) {
            log::warn!("{}: could not write cache entry ({e})", path.display());
        }
        Ok(dist)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Long-format table with a mandatory header row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row);
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(vec![]);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::render)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    write_text(path, &table.to_csv_string()?)
}

pub fn write_json<T: Serialize>(report: &T, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub const RESONANCE_HEADER: [&str; 7] = [
    "re_lambda",
    "im_lambda",
    "l",
    "channel_order",
    "harmonic_mult",
    "total_mult",
    "residual",
];

/// One row per entry, lower half-plane first, then the exceptional zeros.
pub fn resonance_table(set: &ResonanceSet) -> Table {
    let mut t = Table::new(&RESONANCE_HEADER);
    for e in set.all_entries() {
        t.push(vec![
            Cell::Float(e.lambda.re),
            Cell::Float(e.lambda.im),
            Cell::Int(i64::from(e.l)),
            Cell::Int(i64::from(e.channel_order)),
            Cell::Int(e.harmonic_mult as i64),
            Cell::Int(e.mult as i64),
            Cell::Float(e.residual),
        ]);
    }
    t
}

pub fn read_resonance_csv(path: &Path) -> Result<Vec<ResonanceEntry>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let header = r.headers().map_err(|e| Error::Io(e.to_string()))?.clone();
    if header.iter().ne(RESONANCE_HEADER.iter().copied()) {
        return Err(Error::Io(format!(
            "{}: unexpected resonance CSV header",
            path.display()
        )));
    }
    let mut out = vec![];
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        let bad = |f: &str| Error::Io(format!("{}: row {}: bad `{f}`", path.display(), i + 2));
        let fl = |j: usize| rec[j].parse::<f64>().map_err(|_| bad(RESONANCE_HEADER[j]));
        let int = |j: usize| rec[j].parse::<u64>().map_err(|_| bad(RESONANCE_HEADER[j]));
        out.push(ResonanceEntry {
            lambda: Complex64::new(fl(0)?, fl(1)?),
            l: int(2)? as u32,
            channel_order: int(3)? as u32,
            harmonic_mult: int(4)?,
            mult: int(5)?,
            residual: fl(6)?,
        });
    }
    Ok(out)
}

pub fn report_table(rows: &[ReportRow]) -> Table {
    let mut t = Table::new(&["r", "window_id", "variant", "empirical_mass", "mz_mass", "gap"]);
    for r in rows {
        t.push(vec![
            Cell::Float(r.r),
            Cell::Text(r.window_id.clone()),
            Cell::Text(r.variant.name().to_string()),
            Cell::Float(r.empirical_mass),
            Cell::Float(r.mz_mass),
            Cell::Float(r.gap),
        ]);
    }
    t
}

pub fn distance_table(rows: &[(f64, String, DistanceReport)]) -> Table {
    let mut t = Table::new(&["r", "omega_id", "gamma", "value", "solver_gap", "mesh"]);
    for (r, id, d) in rows {
        t.push(vec![
            Cell::Float(*r),
            Cell::Text(id.clone()),
            Cell::Float(d.gamma),
            Cell::Float(d.value),
            Cell::Float(d.solver_gap),
            Cell::Float(d.mesh),
        ]);
    }
    t
}

pub fn samples_table(points: &[Complex64]) -> Table {
    let mut t = Table::new(&["re", "im"]);
    for z in points {
        t.push(vec![Cell::Float(z.re), Cell::Float(z.im)]);
    }
    t
}

//! Configuration-driven front end: run configs, the four commands and their reports.
//!
//! Every report embeds the resolved configuration and is written by a single
//! writer after the parallel work has been collected, so identical inputs give
//! byte-identical files.

use std::f64::consts::FRAC_PI_4;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{l_closed_form, l_recursive, CoefficientOptions, CoefficientTable, DEFAULT_ORDER};
use crate::error::{Error, Result};
use crate::jost::{jost_at_origin, JostOptions};
use crate::pdet::{self, DeterminantScan};
use crate::potential::StarPotential;
use crate::spectrum::{find_eigenvalues, oracle_eigenvalues, Eigenvalue, SpectrumOptions, SpectrumResult};
use crate::traceform::{
    fg_identity, levinson_check, remainder_decay, verify_order, BoundaryIntegrals, DecayOptions, DecayReport,
    FgReport, LevinsonReport, TraceOptions, TraceReport,
};

pub const SCHEMA: &str = "star-trace/1";
/// Largest supported expansion order.
pub const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "SolverConfig::default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub x_inf: Option<f64>,
    #[serde(default = "SolverConfig::default_floor")]
    pub floor: f64,
}

impl SolverConfig {
    fn default_tol() -> f64 {
        1e-10
    }
    fn default_floor() -> f64 {
        1e-3
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: Self::default_tol(), x_inf: None, floor: Self::default_floor() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default = "ScanConfig::default_k_min")]
    pub k_min: f64,
    #[serde(default = "ScanConfig::default_k_max")]
    pub k_max: f64,
    #[serde(default = "ScanConfig::default_npoints")]
    pub npoints: usize,
    /// Also write the scan on the mirrored grid `−k`.
    #[serde(default)]
    pub mirrored: bool,
    /// Write Jost trajectories on every edge at this real `k`.
    #[serde(default)]
    pub trajectory_k: Option<f64>,
}

impl ScanConfig {
    fn default_k_min() -> f64 {
        pdet::DEFAULT_K_MIN
    }
    fn default_k_max() -> f64 {
        pdet::DEFAULT_K_MAX
    }
    fn default_npoints() -> usize {
        pdet::DEFAULT_POINTS
    }
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            k_min: Self::default_k_min(),
            k_max: Self::default_k_max(),
            npoints: Self::default_npoints(),
            mirrored: false,
            trajectory_k: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default)]
    pub kappa_max: Option<f64>,
    #[serde(default = "SpectrumConfig::default_grid_points")]
    pub grid_points: usize,
    /// Step of the finite-difference comparison; no comparison when absent.
    #[serde(default)]
    pub oracle_h: Option<f64>,
    #[serde(default = "SpectrumConfig::default_oracle_x_inf")]
    pub oracle_x_inf: f64,
}

impl SpectrumConfig {
    fn default_grid_points() -> usize {
        400
    }
    fn default_oracle_x_inf() -> f64 {
        40.0
    }
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            kappa_max: None,
            grid_points: Self::default_grid_points(),
            oracle_h: None,
            oracle_x_inf: Self::default_oracle_x_inf(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceConfig {
    #[serde(default = "TraceConfig::default_orders")]
    pub orders: Vec<f64>,
    #[serde(default = "TraceConfig::default_fg_orders")]
    pub fg_orders: Vec<f64>,
    #[serde(default = "TraceConfig::default_tol")]
    pub tol: f64,
    #[serde(default = "TraceConfig::default_cutoff")]
    pub cutoff: f64,
    #[serde(default = "TraceConfig::default_gate")]
    pub gate: f64,
    /// Levinson check; only meaningful on two edges.
    #[serde(default = "TraceConfig::default_levinson")]
    pub levinson: bool,
    #[serde(default = "TraceConfig::default_decay_orders")]
    pub decay_orders: Vec<usize>,
    #[serde(default = "TraceConfig::default_decay_rays")]
    pub decay_rays: Vec<f64>,
}

impl TraceConfig {
    fn default_orders() -> Vec<f64> {
        vec![0.5, 1.0, 1.5, 2.0, 2.5]
    }
    fn default_fg_orders() -> Vec<f64> {
        vec![0.1, 0.25, 0.4]
    }
    fn default_tol() -> f64 {
        1e-11
    }
    fn default_cutoff() -> f64 {
        12.0
    }
    fn default_gate() -> f64 {
        1e-3
    }
    fn default_levinson() -> bool {
        true
    }
    fn default_decay_orders() -> Vec<usize> {
        vec![1, 2, 3]
    }
    fn default_decay_rays() -> Vec<f64> {
        vec![0.0, FRAC_PI_4, 2.0 * FRAC_PI_4]
    }
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            orders: Self::default_orders(),
            fg_orders: Self::default_fg_orders(),
            tol: Self::default_tol(),
            cutoff: Self::default_cutoff(),
            gate: Self::default_gate(),
            levinson: Self::default_levinson(),
            decay_orders: Self::default_decay_orders(),
            decay_rays: Self::default_decay_rays(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub potential: StarPotential,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    /// Expansion order M.
    #[serde(default = "RunConfig::default_order")]
    pub order: usize,
    #[serde(default)]
    pub trace: TraceConfig,
    #[serde(default = "RunConfig::default_output")]
    pub output: PathBuf,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite (got {x})")))
    }
}

impl RunConfig {
    fn default_order() -> usize {
        DEFAULT_ORDER
    }
    fn default_output() -> PathBuf {
        PathBuf::from("out")
    }

    pub fn new(potential: StarPotential) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            potential,
            solver: SolverConfig::default(),
            scan: ScanConfig::default(),
            spectrum: SpectrumConfig::default(),
            order: DEFAULT_ORDER,
            trace: TraceConfig::default(),
            output: Self::default_output(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Config(format!("unsupported schema {:?}, expected {SCHEMA:?}", self.schema)));
        }
        positive("solver.tol", self.solver.tol)?;
        positive("solver.floor", self.solver.floor)?;
        if let Some(x) = self.solver.x_inf {
            positive("solver.x_inf", x)?;
        }
        positive("scan.k_min", self.scan.k_min)?;
        if self.scan.k_min < self.solver.floor {
            return Err(Error::Config(format!(
                "scan.k_min = {} is below the low-energy floor {}",
                self.scan.k_min, self.solver.floor
            )));
        }
        if !(self.scan.k_max > self.scan.k_min) || self.scan.npoints < 2 {
            return Err(Error::Config("scan needs k_max > k_min and at least two points".into()));
        }
        if let Some(k) = self.scan.trajectory_k {
            positive("scan.trajectory_k", k)?;
        }
        if let Some(kappa) = self.spectrum.kappa_max {
            positive("spectrum.kappa_max", kappa)?;
        }
        if let Some(h) = self.spectrum.oracle_h {
            positive("spectrum.oracle_h", h)?;
        }
        positive("spectrum.oracle_x_inf", self.spectrum.oracle_x_inf)?;
        if self.spectrum.grid_points < 8 {
            return Err(Error::Config("spectrum.grid_points must be at least 8".into()));
        }
        if self.order == 0 || self.order > MAX_ORDER {
            return Err(Error::Config(format!("order must lie in 1..={MAX_ORDER} (got {})", self.order)));
        }
        positive("trace.tol", self.trace.tol)?;
        positive("trace.cutoff", self.trace.cutoff)?;
        positive("trace.gate", self.trace.gate)?;
        for &s in &self.trace.orders {
            let twice = 2.0 * s;
            if twice.fract() != 0.0 || twice < 1.0 {
                return Err(Error::Config(format!("trace order {s} is not a positive half-integer")));
            }
            if twice as usize > self.order {
                return Err(Error::Config(format!("trace order {s} needs expansion order {twice}")));
            }
        }
        for &s in &self.trace.fg_orders {
            if !(s > 0.0 && s < 0.5) {
                return Err(Error::Config(format!("F/G order {s} outside (0, 1/2)")));
            }
        }
        for &m in &self.trace.decay_orders {
            if m == 0 || m > self.order {
                return Err(Error::Config(format!("decay order {m} outside 1..={}", self.order)));
            }
        }
        for &arg in &self.trace.decay_rays {
            if !(0.0..=std::f64::consts::PI).contains(&arg) {
                return Err(Error::Config(format!("decay ray {arg} outside [0, π]")));
            }
        }
        Ok(())
    }

    pub fn jost_options(&self) -> JostOptions {
        JostOptions { tol: self.solver.tol, floor: self.solver.floor, x_inf: self.solver.x_inf, ..JostOptions::default() }
    }

    pub fn spectrum_options(&self) -> SpectrumOptions {
        SpectrumOptions {
            kappa_max: self.spectrum.kappa_max,
            grid_points: self.spectrum.grid_points,
            jost: self.jost_options(),
            ..SpectrumOptions::default()
        }
    }

    pub fn coefficient_options(&self) -> CoefficientOptions {
        CoefficientOptions { order: self.order, ..CoefficientOptions::default() }
    }

    pub fn trace_options(&self) -> TraceOptions {
        TraceOptions {
            floor: self.solver.floor,
            cutoff: self.trace.cutoff,
            gate: self.trace.gate,
            jost: JostOptions { tol: self.trace.tol, ..self.jost_options() },
            ..TraceOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Scan,
    Spectrum,
    Coefficients,
    TraceCheck,
}

/// Files written by a command and whether all requested verifications passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub pass: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

fn create(out: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(out)?;
    let path = out.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let (path, mut w) = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(path)
}

pub fn execute(cmd: Command, cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    cfg.validate()?;
    match cmd {
        Command::Scan => cmd_scan(cfg, out),
        Command::Spectrum => cmd_spectrum(cfg, out),
        Command::Coefficients => cmd_coefficients(cfg, out),
        Command::TraceCheck => cmd_trace_check(cfg, out),
    }
}

/// Largest `|D(k) − D(−k)*|` over a scan and its mirror.
pub fn mirror_deviation(scan: &DeterminantScan, mirrored: &DeterminantScan) -> f64 {
    scan.d.iter().zip(&mirrored.d).map(|(a, b)| (a - b.conj()).norm()).fold(0.0, f64::max)
}

/// `scan.csv`, optionally `scan_mirrored.csv` and `jost_edge{j}.csv`.
pub fn cmd_scan(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let opts = cfg.jost_options();
    let sp = &cfg.potential;
    log::info!("scanning D on {} points in [{}, {}]", cfg.scan.npoints, cfg.scan.k_min, cfg.scan.k_max);
    let scan = pdet::scan(sp, cfg.scan.k_min, cfg.scan.k_max, cfg.scan.npoints, &opts)?;
    let mut files = Vec::new();
    let (path, mut w) = create(out, "scan.csv")?;
    scan.write_csv(&mut w)?;
    w.flush()?;
    files.push(path);
    if cfg.scan.mirrored {
        let mirrored = scan.mirrored(sp, &opts)?;
        log::info!("mirror deviation {:.3e}", mirror_deviation(&scan, &mirrored));
        let (path, mut w) = create(out, "scan_mirrored.csv")?;
        mirrored.write_csv(&mut w)?;
        w.flush()?;
        files.push(path);
    }
    if let Some(k) = cfg.scan.trajectory_k {
        let rec = JostOptions { record: true, ..opts };
        for j in 0..sp.n() {
            let data = jost_at_origin(sp, j, Complex64::new(k, 0.0), &rec)?;
            let (path, mut w) = create(out, &format!("jost_edge{j}.csv"))?;
            data.write_trajectory_csv(&mut w)?;
            w.flush()?;
            files.push(path);
        }
    }
    Ok(Outcome { files, pass: true })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleComparison {
    pub h: f64,
    pub x_inf: f64,
    pub eigenvalues: Vec<Eigenvalue>,
    pub count_match: bool,
    pub max_deviation: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Matches the multiplicity-expanded eigenvalue lists of the determinant and the oracle.
pub fn compare_with_oracle(spectrum: &SpectrumResult, oracle: Vec<Eigenvalue>, h: f64, x_inf: f64) -> OracleComparison {
    let expand = |ev: &[Eigenvalue]| -> Vec<f64> {
        ev.iter().flat_map(|e| std::iter::repeat_n(e.lambda, e.multiplicity)).collect()
    };
    let ours = expand(&spectrum.eigenvalues);
    let theirs = expand(&oracle);
    let count_match = ours.len() == theirs.len();
    let max_deviation = count_match.then(|| ours.iter().zip(&theirs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    let tolerance = (10.0 * h * h).max(1e-4);
    let pass = count_match && max_deviation.is_none_or(|d| d <= tolerance);
    OracleComparison { h, x_inf, eigenvalues: oracle, count_match, max_deviation, tolerance, pass }
}

#[derive(Serialize)]
struct SpectrumFile<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    spectrum: &'a SpectrumResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleComparison>,
}

/// `spectrum.json`; verification fails only when an oracle comparison is requested and disagrees.
pub fn cmd_spectrum(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let spectrum = find_eigenvalues(&cfg.potential, &cfg.spectrum_options())?;
    log::info!("{} eigenvalues, resonance multiplicity {}", spectrum.total(), spectrum.resonance_multiplicity);
    let oracle = match cfg.spectrum.oracle_h {
        Some(h) => {
            let x_inf = cfg.spectrum.oracle_x_inf;
            let ev = oracle_eigenvalues(&cfg.potential, h, x_inf)?;
            Some(compare_with_oracle(&spectrum, ev, h, x_inf))
        }
        None => None,
    };
    let pass = oracle.as_ref().is_none_or(|o| o.pass);
    let path = write_json(out, "spectrum.json", &SpectrumFile { config: cfg, spectrum: &spectrum, oracle })?;
    Ok(Outcome { files: vec![path], pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientComparison {
    pub closed_form: Vec<f64>,
    /// `|L_recursive − L_closed|` for `m = 1 … 5`.
    pub delta: Vec<f64>,
    pub relative: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn compare_routes(table: &CoefficientTable, closed: &[f64; 5]) -> CoefficientComparison {
    let tolerance = 1e-7;
    let m = table.order.min(5);
    let delta: Vec<f64> = (0..m).map(|i| (table.l[i] - closed[i]).abs()).collect();
    let relative: Vec<f64> = (0..m)
        .map(|i| {
            let scale = table.l[i].abs().max(closed[i].abs());
            if scale == 0.0 {
                0.0
            } else {
                delta[i] / scale.max(1e-12)
            }
        })
        .collect();
    // absolute floor for coefficients that vanish up to rounding
    let pass = delta.iter().zip(&relative).all(|(d, r)| *r <= tolerance || *d <= 1e-12);
    CoefficientComparison { closed_form: closed.to_vec(), delta, relative, tolerance, pass }
}

#[derive(Serialize)]
struct CoefficientFile<'a> {
    config: &'a RunConfig,
    recursive: &'a CoefficientTable,
    comparison: CoefficientComparison,
}

/// `coefficients.json` with both routes and their differences.
pub fn cmd_coefficients(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let table = l_recursive(&cfg.potential, &cfg.coefficient_options())?;
    let closed = l_closed_form(&cfg.potential)?;
    let comparison = compare_routes(&table, &closed);
    log::info!("L = {:?}", table.l);
    let pass = comparison.pass;
    let path = write_json(out, "coefficients.json", &CoefficientFile { config: cfg, recursive: &table, comparison })?;
    Ok(Outcome { files: vec![path], pass })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceCheckReport {
    pub config: RunConfig,
    pub spectrum: SpectrumResult,
    pub coefficients: Vec<f64>,
    pub trace: Vec<TraceReport>,
    pub fg: Vec<FgReport>,
    pub levinson: Option<LevinsonReport>,
    pub decay: Vec<DecayReport>,
    pub pass: bool,
}

/// Runs the whole verification pipeline without writing anything.
pub fn trace_check(cfg: &RunConfig) -> Result<TraceCheckReport> {
    cfg.validate()?;
    let sp = &cfg.potential;
    let spectrum = find_eigenvalues(sp, &cfg.spectrum_options())?;
    log::info!("spectrum: {:?}", spectrum);
    let table = l_recursive(sp, &cfg.coefficient_options())?;
    let topts = cfg.trace_options();
    let ints = BoundaryIntegrals::new(sp, spectrum.resonance_multiplicity, &table.l, &topts)?;
    let trace = cfg
        .trace
        .orders
        .iter()
        .map(|&s| verify_order(&ints, &spectrum, s, &topts))
        .collect::<Result<Vec<_>>>()?;
    for r in &trace {
        log::info!("s = {}: residual {:.3e} / budget {:.3e}", r.order, r.residual, r.budget);
    }
    let fg = cfg
        .trace
        .fg_orders
        .iter()
        .map(|&s| fg_identity(&ints, &spectrum, s, &topts))
        .collect::<Result<Vec<_>>>()?;
    let levinson = if cfg.trace.levinson && sp.n() == 2 {
        let scan = pdet::scan(sp, cfg.scan.k_min, cfg.scan.k_max, cfg.scan.npoints, &cfg.jost_options())?;
        Some(levinson_check(sp, &scan, &spectrum)?)
    } else {
        None
    };
    let mut decay = Vec::new();
    for &m in &cfg.trace.decay_orders {
        for &arg in &cfg.trace.decay_rays {
            let r = remainder_decay(sp, &table, m, arg, &DecayOptions::default())?;
            log::info!("decay M = {m}, arg = {arg:.4}: slope {:?}", r.slope);
            decay.push(r);
        }
    }
    let pass = trace.iter().all(|r| r.pass)
        && fg.iter().all(|r| r.pass)
        && levinson.as_ref().is_none_or(|r| r.pass)
        && decay.iter().all(|r| r.pass);
    Ok(TraceCheckReport { config: cfg.clone(), spectrum, coefficients: table.l, trace, fg, levinson, decay, pass })
}

/// `trace_check.json`.
pub fn cmd_trace_check(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let report = trace_check(cfg)?;
    let path = write_json(out, "trace_check.json", &report)?;
    Ok(Outcome { files: vec![path], pass: report.pass })
}

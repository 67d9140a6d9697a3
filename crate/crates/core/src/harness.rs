//! Experiment configuration, convergence studies on the manufactured
//! problems, the stability suites, and their CSV reports.
//!
//! Convergence runs couple space and time as `τ = h = 2^{−j}`,
//! `N = 2^j − 1` nodes per axis, and report the final-time `ℓ∞` error
//! `‖U_{n*} − u_e(t*, x_G)‖∞` together with observed orders
//! `p = log₂(e_{j−1}/e_j)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{invalid, Result};
use crate::problem::{manufactured_problem, CoefficientModel};
use crate::report::{opt_sci, sci, CsvTable};
use crate::scalar::max_abs_diff;
use crate::stability::{
    check_sector_inequalities, check_sector_stability, eigenvalues_check, measure_power_bound, resolvent_sweep,
    SectorMode, SectorSpec, StabilityFunction,
};
use crate::steppers::{integrate, Method, SchemeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Converge,
    Stability,
    Resolvent,
    Sector,
    Eigen,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Converge => "converge",
            Experiment::Stability => "stability",
            Experiment::Resolvent => "resolvent",
            Experiment::Sector => "sector",
            Experiment::Eigen => "eigen",
        }
    }
}

impl FromStr for Experiment {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "converge" => Ok(Experiment::Converge),
            "stability" => Ok(Experiment::Stability),
            "resolvent" => Ok(Experiment::Resolvent),
            "sector" => Ok(Experiment::Sector),
            "eigen" => Ok(Experiment::Eigen),
            other => Err(invalid(format!("unknown experiment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientChoice {
    /// `β_j = 1` on every axis.
    Constant,
    /// The three-dimensional variable set.
    Variable3d,
}

impl CoefficientChoice {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientChoice::Constant => "const",
            CoefficientChoice::Variable3d => "var3d",
        }
    }

    fn model(self, dim: usize) -> CoefficientModel<f64> {
        match self {
            CoefficientChoice::Constant => CoefficientModel::Constant(vec![1.0; dim]),
            CoefficientChoice::Variable3d => CoefficientModel::Variable3d,
        }
    }
}

impl FromStr for CoefficientChoice {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "const" | "constant" => Ok(CoefficientChoice::Constant),
            "var3d" | "variable" => Ok(CoefficientChoice::Variable3d),
            other => Err(invalid(format!("unknown coefficient set `{other}`"))),
        }
    }
}

/// Largest refinement level run by default, per dimension.
pub fn default_j_max(dim: usize) -> u32 {
    match dim {
        2 => 6,
        3 => 5,
        _ => 4,
    }
}

/// Largest refinement level allowed with the full-range switch.
pub fn full_j_max(dim: usize) -> u32 {
    match dim {
        2 => 9,
        3 => 7,
        _ => 5,
    }
}

/// Everything one harness invocation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub methods: Vec<Method>,
    pub dim: usize,
    pub kappa: u8,
    pub coefficients: CoefficientChoice,
    pub j_min: u32,
    /// `None` selects [`default_j_max`].
    pub j_max: Option<u32>,
    pub theta: f64,
    pub t_final: f64,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Unlocks refinement levels up to [`full_j_max`].
    pub full_range: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Converge,
            methods: Method::ALL.to_vec(),
            dim: 3,
            kappa: 0,
            coefficients: CoefficientChoice::Constant,
            j_min: 2,
            j_max: None,
            theta: 0.5,
            t_final: 1.0,
            out: None,
            seed: 20_200_101,
            full_range: false,
        }
    }
}

fn parse<V: FromStr>(key: &str, value: &str) -> Result<V> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(format!("cannot parse `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(invalid(format!("cannot parse `{value}` for `{key}` as a boolean"))),
    }
}

impl ExperimentConfig {
    pub fn j_max(&self) -> u32 {
        self.j_max.unwrap_or_else(|| default_j_max(self.dim))
    }

    /// Sets one option by its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "experiment" => self.experiment = value.parse()?,
            "method" | "methods" => {
                let v = value.trim();
                self.methods = if v == "all" {
                    Method::ALL.to_vec()
                } else {
                    v.split(',').map(str::parse).collect::<Result<Vec<_>>>()?
                };
            }
            "dim" | "m" => self.dim = parse(key, value)?,
            "kappa" => self.kappa = parse(key, value)?,
            "coeffs" | "coefficients" => self.coefficients = value.parse()?,
            "jmin" => self.j_min = parse(key, value)?,
            "jmax" => self.j_max = Some(parse(key, value)?),
            "theta" => self.theta = parse(key, value)?,
            "tfinal" => self.t_final = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "seed" => self.seed = parse(key, value)?,
            "full" => self.full_range = parse_bool(key, value)?,
            other => return Err(invalid(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` manifest; `#` starts a comment.
    pub fn apply_manifest(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| invalid(format!("line {}: expected `key = value`", lineno + 1)))?;
            self.set(key, value)
                .map_err(|e| invalid(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_manifest(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_manifest(text)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.dim) {
            return Err(invalid(format!("dimension must be 2, 3 or 4, got {}", self.dim)));
        }
        if self.kappa > 1 {
            return Err(invalid(format!("kappa must be 0 or 1, got {}", self.kappa)));
        }
        if self.coefficients == CoefficientChoice::Variable3d && self.dim != 3 {
            return Err(invalid("var3d coefficients require dim = 3"));
        }
        if self.methods.is_empty() {
            return Err(invalid("at least one method is required"));
        }
        if self.j_min < 2 {
            return Err(invalid(format!("jmin must be at least 2, got {}", self.j_min)));
        }
        let j_max = self.j_max();
        if j_max < self.j_min {
            return Err(invalid(format!("jmax {j_max} is below jmin {}", self.j_min)));
        }
        let hard = full_j_max(self.dim);
        if j_max > hard {
            return Err(invalid(format!(
                "jmax {j_max} exceeds the memory guard of {hard} for dim {}",
                self.dim
            )));
        }
        if j_max > default_j_max(self.dim) && !self.full_range {
            return Err(invalid(format!(
                "jmax {j_max} exceeds the desk-scale default {} for dim {}; pass --full to allow it",
                default_j_max(self.dim),
                self.dim
            )));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(invalid(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(invalid(format!("tfinal must be non-negative, got {}", self.t_final)));
        }
        Ok(())
    }
}

/// `p_j = log₂(e_j / e_{j+1})` for consecutive levels; `None` where an error
/// is not positive.
pub fn estimate_order(errors: &[f64]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| (w[0] > 0.0 && w[1] > 0.0 && w[0].is_finite() && w[1].is_finite()).then(|| (w[0] / w[1]).log2()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub method: Method,
    pub dim: usize,
    pub kappa: u8,
    pub j: u32,
    pub tau: f64,
    pub n: usize,
    pub error_linf: f64,
    /// Order against the previous level; `None` on the coarsest one.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub const COLUMNS: [&'static str; 8] = ["method", "m", "kappa", "j", "tau", "N", "error_linf", "order"];

    pub fn errors(&self, method: Method) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.error_linf)
            .collect()
    }

    /// Observed order between the two finest levels of `method`.
    pub fn final_order(&self, method: Method) -> Option<f64> {
        self.rows
            .iter().rfind(|r| r.method == method)
            .and_then(|r| r.order)
    }

    pub fn methods(&self) -> Vec<Method> {
        let mut out: Vec<Method> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method) {
                out.push(r.method);
            }
        }
        out
    }

    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(Self::COLUMNS);
        for r in &self.rows {
            t.push(vec![
                r.method.name().to_string(),
                r.dim.to_string(),
                r.kappa.to_string(),
                r.j.to_string(),
                sci(r.tau),
                r.n.to_string(),
                sci(r.error_linf),
                opt_sci(r.order),
            ]);
        }
        t
    }
}

impl fmt::Display for ConvergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>2} {:>5} {:>3} {:>10} {:>4} {:>14} {:>7}", "method", "m", "kappa", "j", "tau", "N", "error_linf", "order")?;
        for r in &self.rows {
            let order = r.order.map(|p| format!("{p:.3}")).unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "{:<10} {:>2} {:>5} {:>3} {:>10.3e} {:>4} {:>14.6e} {:>7}",
                r.method.name(),
                r.dim,
                r.kappa,
                r.j,
                r.tau,
                r.n,
                r.error_linf,
                order
            )?;
        }
        Ok(())
    }
}

/// Writes a convergence report with columns
/// `method,m,kappa,j,tau,N,error_linf,order`.
pub fn emit_csv(report: &ConvergenceReport, path: &Path) -> Result<()> {
    report.to_table().write_to(path)
}

/// Final-time error of one method on one refinement level.
pub fn convergence_level(cfg: &ExperimentConfig, method: Method, j: u32) -> Result<ConvergenceRow> {
    let n = (1usize << j) - 1;
    let tau = 0.5f64.powi(j as i32);
    let problem = manufactured_problem(cfg.dim, &vec![n; cfg.dim], cfg.kappa, cfg.coefficients.model(cfg.dim))?;
    let scheme = SchemeConfig::new(method, tau, cfg.t_final).with_theta(cfg.theta);
    let u0 = problem.sample_exact(0.0)?;
    let result = integrate(&problem, &scheme, u0, false)?;
    let exact = problem.sample_exact(result.final_state.time)?;
    Ok(ConvergenceRow {
        method,
        dim: cfg.dim,
        kappa: cfg.kappa,
        j,
        tau,
        n,
        error_linf: max_abs_diff(&result.final_state.values, &exact.values),
        order: None,
    })
}

/// Runs every configured method over levels `j_min..=j_max`.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &method in &cfg.methods {
        let mut level_rows = (cfg.j_min..=cfg.j_max())
            .map(|j| convergence_level(cfg, method, j))
            .collect::<Result<Vec<_>>>()?;
        let errors: Vec<f64> = level_rows.iter().map(|r| r.error_linf).collect();
        for (row, p) in level_rows.iter_mut().skip(1).zip(estimate_order(&errors)) {
            row.order = p;
        }
        rows.extend(level_rows);
    }
    Ok(ConvergenceReport { rows })
}

/// Outcome of one stability suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub table: CsvTable,
    pub passed: bool,
}

pub const SUITE_COLUMNS: [&str; 5] = ["suite", "config", "measured", "bound", "pass"];

/// Grids, step sizes and horizon of the power-bound uniformity sweep.
pub const POWER_SWEEP: [(usize, &[usize]); 2] = [(2, &[3, 7, 15]), (3, &[3, 7])];
pub const POWER_TAUS: [f64; 3] = [0.25, 1.0 / 16.0, 1.0 / 64.0];
pub const POWER_N_MAX: usize = 1024;
/// Allowed relative change of `sup_n ‖D⁻¹Rⁿ‖∞` between the two finest grids.
pub const POWER_UNIFORMITY_TOL: f64 = 0.2;

struct SuiteBuilder {
    table: CsvTable,
    passed: bool,
}

impl SuiteBuilder {
    fn new() -> Self {
        Self {
            table: CsvTable::new(SUITE_COLUMNS),
            passed: true,
        }
    }

    fn check(&mut self, suite: &str, config: String, measured: f64, bound: f64, ok: bool) {
        self.passed &= ok;
        self.table.push(vec![suite.into(), config, sci(measured), sci(bound), ok.to_string()]);
    }

    fn diagnostic(&mut self, suite: &str, config: String, measured: f64) {
        self.table.push(vec![suite.into(), config, sci(measured), String::new(), "diag".into()]);
    }

    fn finish(self) -> SuiteOutcome {
        SuiteOutcome {
            table: self.table,
            passed: self.passed,
        }
    }
}

/// Relative change `|fine − coarse| / coarse`.
pub fn relative_variation(coarse: f64, fine: f64) -> f64 {
    (fine - coarse).abs() / coarse
}

/// Power-bound uniformity of `‖D⁻¹Rⁿ‖∞`, with `‖Rⁿ‖∞` as a diagnostic.
pub fn run_power_suite(theta: f64) -> Result<SuiteOutcome> {
    let mut s = SuiteBuilder::new();
    for (m, sizes) in POWER_SWEEP {
        let mut sups: Vec<Vec<f64>> = Vec::new();
        for &n in sizes {
            let report = measure_power_bound(m, &vec![n; m], &vec![1.0; m], theta, &POWER_TAUS, POWER_N_MAX)?;
            let mut per_tau = Vec::new();
            for row in &report.rows {
                let cfg = format!("m={m};N={n};tau={};nmax={POWER_N_MAX}", sci(row.tau));
                let sup = row.sup_dinv_rn();
                s.check("power-dinv-rn", cfg.clone(), sup, f64::INFINITY, row.all_finite());
                s.diagnostic("power-rn", cfg, row.sup_rn());
                per_tau.push(sup);
            }
            sups.push(per_tau);
        }
        let (coarse, fine) = (&sups[sups.len() - 2], &sups[sups.len() - 1]);
        for (k, tau) in POWER_TAUS.iter().enumerate() {
            let var = relative_variation(coarse[k], fine[k]);
            let cfg = format!(
                "m={m};N={}->{};tau={}",
                sizes[sizes.len() - 2],
                sizes[sizes.len() - 1],
                sci(*tau)
            );
            s.check("power-uniformity", cfg, var, POWER_UNIFORMITY_TOL, var < POWER_UNIFORMITY_TOL);
        }
    }
    Ok(s.finish())
}

pub const RESOLVENT_POINTS: usize = 1000;
pub const RESOLVENT_N_MAX: usize = 127;
pub const RESOLVENT_TAU_RANGE: (f64, f64) = (1e-4, 1.0);

/// Randomized sweep of the four resolvent bounds.
pub fn run_resolvent_suite(seed: u64) -> Result<SuiteOutcome> {
    let mut s = SuiteBuilder::new();
    for row in resolvent_sweep(RESOLVENT_POINTS, RESOLVENT_N_MAX, RESOLVENT_TAU_RANGE, seed)? {
        let cfg = format!("bound={};points={};applicable={}", row.region.name(), row.points, row.applicable);
        let ok = row.violations == 0 && row.applicable == row.points;
        s.check("resolvent-violations", cfg.clone(), row.violations as f64, 0.0, ok);
        s.diagnostic("resolvent-max-ratio", cfg, row.max_ratio);
    }
    Ok(s.finish())
}

pub const SECTOR_SAMPLES: usize = 10_000;
pub const CHAIN_SAMPLES: usize = 100_000;

/// Douglas sector stability for `m = 2, 3, 4`, the HV function at the
/// origin, and the inequality chain for `m = 2..=6`.
pub fn run_sector_suite(theta: f64, seed: u64) -> Result<SuiteOutcome> {
    let mut s = SuiteBuilder::new();
    let douglas = StabilityFunction::douglas(theta);
    for m in 2..=4 {
        let spec = SectorSpec::douglas_sector(m)?;
        let rep = check_sector_stability(&douglas, m, &spec, SECTOR_SAMPLES, seed.wrapping_add(m as u64))?;
        let cfg = format!("douglas;m={m};alpha={};samples={SECTOR_SAMPLES}", sci(spec.alpha));
        s.check("sector-max-modulus", cfg, rep.max_modulus, 1.0 + crate::stability::SECTOR_SLACK, rep.passed());
        let ray = SectorSpec::new(spec.alpha, SectorMode::BoundaryRay, SectorSpec::DEFAULT_RADII)?;
        let rep = check_sector_stability(&douglas, m, &ray, SECTOR_SAMPLES, seed.wrapping_add(100 + m as u64))?;
        let cfg = format!("douglas-ray;m={m};alpha={};samples={SECTOR_SAMPLES}", sci(spec.alpha));
        s.check("sector-max-modulus", cfg, rep.max_modulus, 1.0 + crate::stability::SECTOR_SLACK, rep.passed());
    }
    // wider two-variable sector, recorded but not asserted
    let wide = SectorSpec::probe(FRAC_PI_2, SectorMode::Interior, SectorSpec::DEFAULT_RADII)?;
    let rep = check_sector_stability(&douglas, 2, &wide, SECTOR_SAMPLES, seed.wrapping_add(7))?;
    s.diagnostic("sector-probe", format!("douglas;m=2;alpha={}", sci(FRAC_PI_2)), rep.max_modulus);

    let hv = StabilityFunction::hundsdorfer_verwer(theta).eval(&[num_complex::Complex64::new(0.0, 0.0); 3])?;
    s.check("hv-origin", "m=3;z=0".into(), hv.norm(), 1.0, hv == num_complex::Complex64::new(1.0, 0.0));

    for m in 2..=6 {
        let rep = check_sector_inequalities(m, FRAC_PI_4, CHAIN_SAMPLES, seed.wrapping_add(1000 + m as u64))?;
        let violations: usize = rep.violations.iter().sum();
        let cfg = format!("m={m};alpha={};samples={CHAIN_SAMPLES}", sci(FRAC_PI_4));
        s.check("chain-violations", cfg.clone(), violations as f64, 0.0, rep.passed());
        let gap = rep.min_relative_gap.iter().copied().fold(f64::INFINITY, f64::min);
        s.diagnostic("chain-min-gap", cfg, gap);
    }
    Ok(s.finish())
}

pub const EIGEN_SIZES: [usize; 4] = [1, 3, 15, 127];
pub const EIGEN_TOL: f64 = 1e-10;

/// Closed-form spectrum and enclosure of `τβL`.
pub fn run_eigen_suite() -> Result<SuiteOutcome> {
    let mut s = SuiteBuilder::new();
    for n in EIGEN_SIZES {
        for tau in [1.0, 1.0 / 64.0] {
            let rep = eigenvalues_check(n, 1.0, tau)?;
            let cfg = format!("N={n};beta=1;tau={}", sci(tau));
            s.check("eigen-deviation", cfg.clone(), rep.max_rel_deviation, EIGEN_TOL, rep.max_rel_deviation <= EIGEN_TOL);
            s.diagnostic("eigen-abs-deviation", cfg.clone(), rep.max_abs_deviation);
            s.check("eigen-enclosure", cfg, if rep.enclosure_holds { 1.0 } else { 0.0 }, 1.0, rep.enclosure_holds);
        }
    }
    Ok(s.finish())
}

/// Dispatches a non-convergence experiment.
pub fn run_stability_suite(cfg: &ExperimentConfig) -> Result<SuiteOutcome> {
    match cfg.experiment {
        Experiment::Stability => run_power_suite(cfg.theta),
        Experiment::Resolvent => run_resolvent_suite(cfg.seed),
        Experiment::Sector => run_sector_suite(cfg.theta, cfg.seed),
        Experiment::Eigen => run_eigen_suite(),
        Experiment::Converge => Err(invalid("`converge` is not a stability suite")),
    }
}

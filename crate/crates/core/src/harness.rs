//! Seeded experiment driver.
//!
//! A sweep visits every `(p, beta, trial)` cell of an [`ExperimentConfig`].
//! Each cell draws a ground-truth model, samples `n = ceil(10 beta d ln p)`
//! observations, runs the enabled estimators and scores them. A cell's seed
//! is a fixed function of `(base_seed, p, beta index, trial)`, so the table
//! (apart from wall-clock columns) depends only on the config and cells can
//! run in any order or in parallel.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;

use crate::baselines::chow_liu_forest;
use crate::error::{Error, Result};
use crate::fisher::{support_indices, PD_TOL};
use crate::graphs::{
    assign_couplings, make_grid4, make_grid8, make_star, signed_edges, CouplingMode, IsingModel, StarSparsity,
    Topology,
};
use crate::logreg::{witness_check, SolverOptions};
use crate::rng::{mix_seed, stream};
use crate::sampling::{gibbs_sample_with, sample_exact_enum, sample_exact_star, GibbsOptions, SampleMatrix};
use crate::selection::{edge_disagreements, estimate_graph, success, Combine};

/// Slack used when auditing the reported subgradient against `[-1, 1]`.
pub const KKT_AUDIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphClass {
    Grid4,
    Grid8,
    StarLinear,
    StarLog,
}

impl GraphClass {
    /// Default control-parameter grid for the class.
    pub fn default_beta_grid(self) -> Vec<f64> {
        match self {
            GraphClass::Grid4 => vec![0.2, 0.6, 1.0, 1.4, 1.8, 2.2],
            GraphClass::Grid8 => vec![0.2, 0.6, 1.0, 1.4, 1.8, 2.2, 2.6],
            GraphClass::StarLinear | GraphClass::StarLog => vec![0.1, 0.4, 0.7, 1.0, 1.3, 1.6, 2.0],
        }
    }

    fn is_lattice(self) -> bool {
        matches!(self, GraphClass::Grid4 | GraphClass::Grid8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    Mixed,
    Positive,
}

impl From<Coupling> for CouplingMode {
    fn from(c: Coupling) -> Self {
        match c {
            Coupling::Mixed => CouplingMode::Mixed,
            Coupling::Positive => CouplingMode::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
pub enum Method {
    L1,
    CL,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    /// Gibbs for lattices, exact for stars.
    Auto,
    Exact,
    Gibbs,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    pub burn_in_sweeps: usize,
    pub spacing_sweeps: usize,
    pub randomized_order: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        let g = GibbsOptions::default();
        SamplerConfig {
            kind: SamplerKind::Auto,
            burn_in_sweeps: g.burn_in_sweeps,
            spacing_sweeps: g.spacing_sweeps,
            randomized_order: g.randomized_order,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub kkt_tol: f64,
    pub max_iters: usize,
    pub backtrack_factor: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SolverOptions::default();
        SolverConfig {
            kkt_tol: s.kkt_tol,
            max_iters: s.max_iters,
            backtrack_factor: s.backtrack_factor,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            kkt_tol: self.kkt_tol,
            max_iters: self.max_iters,
            backtrack_factor: self.backtrack_factor,
            ..SolverOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CombineRule {
    #[default]
    And,
    Or,
}

impl From<CombineRule> for Combine {
    fn from(c: CombineRule) -> Self {
        match c {
            CombineRule::And => Combine::And,
            CombineRule::Or => Combine::Or,
        }
    }
}

/// One sweep, as read from a TOML config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graph_class: GraphClass,
    pub p_list: Vec<usize>,
    pub coupling: Coupling,
    pub omega: f64,
    pub beta_grid: Vec<f64>,
    pub trials: usize,
    /// `c` in `lambda = c sqrt(ln p / n)`.
    pub lambda_scale: f64,
    #[serde(default)]
    pub sampler: SamplerConfig,
    pub base_seed: u64,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Rule used for the L1 edge-disagreement columns.
    #[serde(default)]
    pub combine: CombineRule,
    /// Logarithm base for `star_log` degrees.
    #[serde(default = "default_log_base")]
    pub star_log_base: f64,
}

fn default_log_base() -> f64 {
    std::f64::consts::E
}

/// Default `lambda_scale` for the desk-scale runs.
pub const DEFAULT_LAMBDA_SCALE: f64 = 1.75;

impl ExperimentConfig {
    /// Desk-scale defaults for a graph class (mixed ±0.5 couplings on
    /// lattices, positive 0.25 on stars).
    pub fn desk_default(graph_class: GraphClass) -> Self {
        let (coupling, omega) = if graph_class.is_lattice() {
            if graph_class == GraphClass::Grid8 {
                (Coupling::Mixed, 0.25)
            } else {
                (Coupling::Mixed, 0.5)
            }
        } else {
            (Coupling::Positive, 0.25)
        };
        ExperimentConfig {
            graph_class,
            p_list: vec![36, 64, 100],
            coupling,
            omega,
            beta_grid: graph_class.default_beta_grid(),
            trials: 50,
            lambda_scale: DEFAULT_LAMBDA_SCALE,
            sampler: SamplerConfig::default(),
            base_seed: 1,
            methods: if graph_class.is_lattice() {
                vec![Method::L1]
            } else {
                vec![Method::L1, Method::CL]
            },
            solver: SolverConfig::default(),
            combine: CombineRule::And,
            star_log_base: default_log_base(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.lambda_scale > 0.0) {
            return bad("lambda_scale must be positive".into());
        }
        if !(self.omega > 0.0) {
            return bad("omega must be positive".into());
        }
        if self.beta_grid.is_empty() || self.beta_grid.iter().any(|b| !(*b > 0.0)) {
            return bad("beta_grid must be a nonempty list of positive values".into());
        }
        if self.beta_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("beta_grid must be strictly increasing".into());
        }
        if self.p_list.is_empty() {
            return bad("p_list is empty".into());
        }
        if self.methods.is_empty() {
            return bad("methods is empty".into());
        }
        if self.methods.iter().collect::<BTreeSet<_>>().len() != self.methods.len() {
            return bad("methods has duplicates".into());
        }
        if !(self.star_log_base > 1.0) {
            return bad("star_log_base must exceed 1".into());
        }
        if !(self.solver.backtrack_factor > 0.0 && self.solver.backtrack_factor < 1.0)
            || !(self.solver.kkt_tol > 0.0)
            || self.solver.max_iters == 0
        {
            return bad("solver settings out of range".into());
        }
        for &p in &self.p_list {
            self.topology(p)?;
        }
        Ok(())
    }

    pub fn topology(&self, p: usize) -> Result<Topology> {
        let side = (p as f64).sqrt().round() as usize;
        let res = match self.graph_class {
            GraphClass::Grid4 | GraphClass::Grid8 if side * side != p => {
                return Err(Error::Config(format!("lattice classes need a square p, got {p}")))
            }
            GraphClass::Grid4 => make_grid4(side),
            GraphClass::Grid8 => make_grid8(side),
            GraphClass::StarLinear => make_star(p, StarSparsity::Linear),
            GraphClass::StarLog => make_star(p, StarSparsity::Log(self.star_log_base)),
        };
        res.map_err(|e| Error::Config(format!("p={p}: {e}")))
    }

    fn gibbs(&self) -> GibbsOptions {
        GibbsOptions {
            burn_in_sweeps: self.sampler.burn_in_sweeps,
            spacing_sweeps: self.sampler.spacing_sweeps,
            randomized_order: self.sampler.randomized_order,
        }
    }

    fn has(&self, m: Method) -> bool {
        self.methods.contains(&m)
    }
}

/// `ceil(10 beta d ln p)`, at least 1.
pub fn sample_size(beta: f64, d: usize, p: usize) -> usize {
    ((10.0 * beta * d as f64 * (p as f64).ln()).ceil() as usize).max(1)
}

/// `lambda_scale * sqrt(ln p / n)`.
pub fn regularization(lambda_scale: f64, p: usize, n: usize) -> f64 {
    lambda_scale * ((p as f64).ln() / n as f64).sqrt()
}

/// Seed for cell `(p, beta_index, trial)`.
pub fn cell_seed(base_seed: u64, p: usize, beta_index: usize, trial: usize) -> u64 {
    mix_seed(base_seed, &[p as u64, beta_index as u64, trial as u64])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub p: usize,
    pub d: usize,
    pub beta: f64,
    pub beta_index: usize,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub lambda: f64,
    /// Every per-node signed neighborhood recovered (false when L1 is off).
    pub success: bool,
    pub l1_disagree_signed: Option<usize>,
    pub l1_disagree_unsigned: Option<usize>,
    pub cl_disagree_signed: Option<usize>,
    pub cl_disagree_unsigned: Option<usize>,
    /// Largest KKT residual over the node regressions.
    pub max_kkt: f64,
    pub nonconverged: usize,
    /// Largest `‖ẑ_{S^c}‖∞` over converged nodes with `S` the true neighborhood.
    pub max_dual_inf: f64,
    /// All converged nodes have `‖ẑ_{S^c}‖∞ < 1`.
    pub strict_dual_feasible: bool,
    /// Converged nodes whose subgradient leaves `[-1-tol, 1+tol]` or disagrees
    /// with `sign(θ̂)` on the support by more than the tolerance.
    pub kkt_audit_violations: usize,
    pub wall_ms: f64,
    pub error: Option<String>,
}

impl TrialResult {
    fn empty(p: usize, d: usize, beta: f64, beta_index: usize, n: usize, trial: usize, seed: u64, lambda: f64) -> Self {
        TrialResult {
            p,
            d,
            beta,
            beta_index,
            n,
            trial,
            seed,
            lambda,
            success: false,
            l1_disagree_signed: None,
            l1_disagree_unsigned: None,
            cl_disagree_signed: None,
            cl_disagree_unsigned: None,
            max_kkt: 0.0,
            nonconverged: 0,
            max_dual_inf: 0.0,
            strict_dual_feasible: true,
            kkt_audit_violations: 0,
            wall_ms: 0.0,
            error: None,
        }
    }

    /// Same result ignoring wall-clock time.
    pub fn same_outcome(&self, other: &TrialResult) -> bool {
        let mut a = self.clone();
        a.wall_ms = other.wall_ms;
        a == *other
    }
}

fn draw_samples(cfg: &ExperimentConfig, model: &IsingModel, n: usize, seed: u64) -> Result<SampleMatrix> {
    let mut rng = stream(seed, 1);
    let kind = match cfg.sampler.kind {
        SamplerKind::Auto if cfg.graph_class.is_lattice() => SamplerKind::Gibbs,
        SamplerKind::Auto => SamplerKind::Exact,
        k => k,
    };
    match kind {
        SamplerKind::Gibbs => gibbs_sample_with(model, n, &cfg.gibbs(), &mut rng),
        _ if model.topology().star_hub().is_some() => sample_exact_star(model, n, &mut rng),
        _ => sample_exact_enum(model, n, &mut rng),
    }
}

/// Run one cell. Failures are recorded in the result, never returned.
pub fn run_trial(cfg: &ExperimentConfig, p: usize, beta_index: usize, trial: usize) -> Result<TrialResult> {
    let beta = *cfg
        .beta_grid
        .get(beta_index)
        .ok_or_else(|| Error::invalid(format!("beta index {beta_index} out of range")))?;
    let topo = cfg.topology(p)?;
    let start = Instant::now();
    let d = topo.d();
    let n = sample_size(beta, d, p);
    let seed = cell_seed(cfg.base_seed, p, beta_index, trial);
    let lambda = regularization(cfg.lambda_scale, p, n);
    let mut res = TrialResult::empty(p, d, beta, beta_index, n, trial, seed, lambda);

    if let Err(e) = score_trial(cfg, &topo, &mut res) {
        res.error = Some(e.to_string());
        res.success = false;
    }
    res.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(res)
}

/// Locate the beta grid index of `beta` (exact match within 1e-12).
pub fn beta_index(cfg: &ExperimentConfig, beta: f64) -> Result<usize> {
    cfg.beta_grid
        .iter()
        .position(|b| (b - beta).abs() <= 1e-12)
        .ok_or_else(|| Error::invalid(format!("beta {beta} is not on the configured grid")))
}

fn score_trial(cfg: &ExperimentConfig, topo: &Topology, res: &mut TrialResult) -> Result<()> {
    let model = assign_couplings(topo, cfg.coupling.into(), cfg.omega, &mut stream(res.seed, 0))?;
    let truth = signed_edges(&model);
    let data = draw_samples(cfg, &model, res.n, res.seed)?;

    if cfg.has(Method::L1) {
        let est = estimate_graph(&data, res.lambda, cfg.combine.into(), &cfg.solver.options())?;
        res.success = success(&est, &truth)?;
        let combined = est.combined.as_ref().expect("AND/OR always combine");
        res.l1_disagree_signed = Some(edge_disagreements(combined, &truth)?);
        res.l1_disagree_unsigned = Some(edge_disagreements(&combined.unsigned(), &truth.unsigned())?);
        for sol in &est.solutions {
            res.max_kkt = res.max_kkt.max(sol.kkt_residual);
            if !sol.converged {
                res.nonconverged += 1;
                continue;
            }
            let support = support_indices(&model, sol.r);
            let signs: Vec<i8> = support
                .iter()
                .map(|&j| if model.theta_row(sol.r)[j] > 0.0 { 1 } else { -1 })
                .collect();
            let w = witness_check(sol, &data, &support, Some(&signs), PD_TOL)?;
            res.max_dual_inf = res.max_dual_inf.max(w.dual_sup_off_support);
            res.strict_dual_feasible &= w.strictly_dual_feasible;
            if !subgradient_ok(&sol.theta, &sol.zhat, KKT_AUDIT_TOL) {
                res.kkt_audit_violations += 1;
            }
        }
    }
    if cfg.has(Method::CL) {
        let forest = chow_liu_forest(&data, topo.edges().len().min(topo.p() - 1))?;
        res.cl_disagree_signed = Some(edge_disagreements(&forest, &truth)?);
        res.cl_disagree_unsigned = Some(edge_disagreements(&forest.unsigned(), &truth.unsigned())?);
    }
    Ok(())
}

/// `|ẑ_j| ≤ 1 + tol` everywhere and `|ẑ_j − sign θ̂_j| ≤ tol` on the support.
pub fn subgradient_ok(theta: &[f64], zhat: &[f64], tol: f64) -> bool {
    theta.iter().zip(zhat).all(|(&th, &z)| {
        z.abs() <= 1.0 + tol && (th == 0.0 || (z - th.signum()).abs() <= tol)
    })
}

/// Aggregate over the trials of one `(p, beta)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub p: usize,
    pub d: usize,
    pub beta: f64,
    pub n: usize,
    pub trials: usize,
    pub success_rate: f64,
    pub l1_disagree_signed: Option<f64>,
    pub l1_disagree_unsigned: Option<f64>,
    pub cl_disagree_signed: Option<f64>,
    pub cl_disagree_unsigned: Option<f64>,
    pub mean_max_kkt: f64,
    pub mean_max_dual_inf: f64,
    pub nonconverged: usize,
    pub kkt_audit_violations: usize,
    /// Among successful trials, the fraction with strict dual feasibility at
    /// every node; `None` without successes.
    pub strict_fraction_of_successes: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    /// Sorted by `(p, beta, trial)`.
    pub trials: Vec<TrialResult>,
    /// Sorted by `(p, beta)`.
    pub cells: Vec<CellSummary>,
}

impl SweepResult {
    pub fn cell(&self, p: usize, beta: f64) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.p == p && (c.beta - beta).abs() < 1e-12)
    }
}

fn mean_opt(values: impl Iterator<Item = Option<usize>>) -> Option<f64> {
    let v: Vec<usize> = values.collect::<Option<Vec<_>>>()?;
    if v.is_empty() {
        return None;
    }
    Some(v.iter().sum::<usize>() as f64 / v.len() as f64)
}

fn summarize(rows: &[TrialResult]) -> CellSummary {
    let first = &rows[0];
    let k = rows.len() as f64;
    let ok: Vec<&TrialResult> = rows.iter().filter(|r| r.error.is_none()).collect();
    let successes: Vec<&&TrialResult> = ok.iter().filter(|r| r.success).collect();
    CellSummary {
        p: first.p,
        d: first.d,
        beta: first.beta,
        n: first.n,
        trials: rows.len(),
        success_rate: rows.iter().filter(|r| r.success).count() as f64 / k,
        l1_disagree_signed: mean_opt(ok.iter().map(|r| r.l1_disagree_signed)),
        l1_disagree_unsigned: mean_opt(ok.iter().map(|r| r.l1_disagree_unsigned)),
        cl_disagree_signed: mean_opt(ok.iter().map(|r| r.cl_disagree_signed)),
        cl_disagree_unsigned: mean_opt(ok.iter().map(|r| r.cl_disagree_unsigned)),
        mean_max_kkt: ok.iter().map(|r| r.max_kkt).sum::<f64>() / ok.len().max(1) as f64,
        mean_max_dual_inf: ok.iter().map(|r| r.max_dual_inf).sum::<f64>() / ok.len().max(1) as f64,
        nonconverged: rows.iter().map(|r| r.nonconverged).sum(),
        kkt_audit_violations: rows.iter().map(|r| r.kkt_audit_violations).sum(),
        strict_fraction_of_successes: (!successes.is_empty()).then(|| {
            successes.iter().filter(|r| r.strict_dual_feasible).count() as f64 / successes.len() as f64
        }),
        failures: rows.len() - ok.len(),
    }
}

/// Run every cell of the config on a pool of `jobs` threads (0 = all cores).
pub fn run_sweep(cfg: &ExperimentConfig, jobs: usize) -> Result<SweepResult> {
    cfg.validate()?;
    let mut cells = Vec::new();
    let mut ps = cfg.p_list.clone();
    ps.sort_unstable();
    ps.dedup();
    for &p in &ps {
        for bi in 0..cfg.beta_grid.len() {
            for trial in 0..cfg.trials {
                cells.push((p, bi, trial));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut trials: Vec<TrialResult> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(p, bi, t)| run_trial(cfg, p, bi, t))
            .collect::<Result<Vec<_>>>()
    })?;
    trials.sort_by_key(|r| (r.p, r.beta_index, r.trial));
    let cells = trials
        .chunk_by(|a, b| a.p == b.p && a.beta_index == b.beta_index)
        .map(summarize)
        .collect();
    Ok(SweepResult { trials, cells })
}

/// Six significant digits, trailing zeros trimmed.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        s
    } else {
        let s = format!("{x:.5e}");
        let (m, e) = s.split_once('e').expect("exponent form");
        let m = if m.contains('.') {
            m.trim_end_matches('0').trim_end_matches('.')
        } else {
            m
        };
        format!("{m}e{e}")
    }
}

fn opt_usize(v: Option<usize>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_sig6)
}

pub const RESULTS_HEADER: &str = "p,d,beta,n,trial,seed,success,l1_disagree_signed,l1_disagree_unsigned,cl_disagree_signed,cl_disagree_unsigned,max_kkt,max_dual_inf,wall_ms";

pub const AGGREGATE_HEADER: &str = "p,d,beta,n,trials,success_rate,l1_disagree_signed,l1_disagree_unsigned,cl_disagree_signed,cl_disagree_unsigned,max_kkt,max_dual_inf,nonconverged,kkt_violations,strict_dual_fraction,failures";

/// Per-trial table. Columns of disabled methods are left empty.
pub fn results_csv(sweep: &SweepResult) -> String {
    let mut s = String::new();
    writeln!(s, "{RESULTS_HEADER}").unwrap();
    for r in &sweep.trials {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.p,
            r.d,
            fmt_sig6(r.beta),
            r.n,
            r.trial,
            r.seed,
            u8::from(r.success),
            opt_usize(r.l1_disagree_signed),
            opt_usize(r.l1_disagree_unsigned),
            opt_usize(r.cl_disagree_signed),
            opt_usize(r.cl_disagree_unsigned),
            fmt_sig6(r.max_kkt),
            fmt_sig6(r.max_dual_inf),
            fmt_sig6(r.wall_ms),
        )
        .unwrap();
    }
    s
}

pub fn aggregate_csv(sweep: &SweepResult) -> String {
    let mut s = String::new();
    writeln!(s, "{AGGREGATE_HEADER}").unwrap();
    for c in &sweep.cells {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c.p,
            c.d,
            fmt_sig6(c.beta),
            c.n,
            c.trials,
            fmt_sig6(c.success_rate),
            opt_f64(c.l1_disagree_signed),
            opt_f64(c.l1_disagree_unsigned),
            opt_f64(c.cl_disagree_signed),
            opt_f64(c.cl_disagree_unsigned),
            fmt_sig6(c.mean_max_kkt),
            fmt_sig6(c.mean_max_dual_inf),
            c.nonconverged,
            c.kkt_audit_violations,
            opt_f64(c.strict_fraction_of_successes),
            c.failures,
        )
        .unwrap();
    }
    s
}

/// Write `results.csv` and `aggregate.csv` into `dir`, returning both paths.
pub fn write_sweep(sweep: &SweepResult, dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let results = dir.join("results.csv");
    let aggregate = dir.join("aggregate.csv");
    fs::write(&results, results_csv(sweep))?;
    fs::write(&aggregate, aggregate_csv(sweep))?;
    Ok((results, aggregate))
}

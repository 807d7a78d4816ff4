//! ℓ1-regularized logistic regression of one vertex on all others.
//!
//! For center node `r` the smooth part of the objective is
//!
//! ```text
//! ℓ(θ) = (1/n) Σ_i [ log(e^{a_i} + e^{-a_i}) - x_r^{(i)} a_i ],   a_i = Σ_{t≠r} θ_rt x_t^{(i)}
//! ```
//!
//! which is the negative conditional log-likelihood of `x_r` given the rest,
//! so the fitted coefficients estimate the couplings `θ*_rt` directly.
//! Coefficient vectors use covariate order: the vertices other than `r` in
//! increasing order (see [`crate::graphs::covariate_vertex`]).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fisher::{eta_from_margin, min_eigenvalue, weighted_fisher_kernel};
use crate::graphs::covariate_vertex;
use crate::sampling::SampleMatrix;

/// `log(e^a + e^{-a})` without overflow.
#[inline]
pub fn log_two_cosh(a: f64) -> f64 {
    let m = a.abs();
    m + (-2.0 * m).exp().ln_1p()
}

fn check_problem(data: &SampleMatrix, r: usize, theta_len: usize) -> Result<()> {
    let p = data.p();
    if p < 2 || r >= p {
        return Err(Error::invalid(format!("vertex {r} out of range for p={p}")));
    }
    if theta_len + 1 != p {
        return Err(Error::invalid(format!("theta has {theta_len} entries, expected {}", p - 1)));
    }
    Ok(())
}

fn margin(row: &[i8], theta: &[f64], r: usize) -> f64 {
    theta
        .iter()
        .enumerate()
        .map(|(j, &th)| th * f64::from(row[covariate_vertex(r, j)]))
        .sum()
}

/// Smooth loss `(1/n) Σ_i f(θ; x^{(i)}) − Σ_u θ_ru μ̂_ru`.
pub fn nll(theta: &[f64], data: &SampleMatrix, r: usize) -> Result<f64> {
    check_problem(data, r, theta.len())?;
    let n = data.n() as f64;
    let mut loss = 0.0;
    let mut cross = 0.0;
    for row in data.rows() {
        let a = margin(row, theta, r);
        loss += log_two_cosh(a);
        cross += f64::from(row[r]) * a;
    }
    Ok((loss - cross) / n)
}

/// Exact gradient of [`nll`]: `(1/n) Σ_i x_u^{(i)} [tanh(a_i) − x_r^{(i)}]`.
pub fn grad_nll(theta: &[f64], data: &SampleMatrix, r: usize) -> Result<Vec<f64>> {
    check_problem(data, r, theta.len())?;
    let mut g = vec![0.0; theta.len()];
    for row in data.rows() {
        let resid = margin(row, theta, r).tanh() - f64::from(row[r]);
        for (j, gj) in g.iter_mut().enumerate() {
            *gj += f64::from(row[covariate_vertex(r, j)]) * resid;
        }
    }
    let n = data.n() as f64;
    g.iter_mut().for_each(|v| *v /= n);
    Ok(g)
}

/// Hessian of [`nll`]; at `θ*` this is the sample Fisher matrix.
pub fn hessian_nll(theta: &[f64], data: &SampleMatrix, r: usize) -> Result<DMatrix<f64>> {
    check_problem(data, r, theta.len())?;
    Ok(weighted_fisher_kernel(data.rows(), None, theta, r))
}

/// Hessian of the probability-weighted loss `Σ_i w_i ℓ_i / Σ_i w_i`.
pub fn hessian_nll_weighted(theta: &[f64], data: &SampleMatrix, weights: &[f64], r: usize) -> Result<DMatrix<f64>> {
    check_problem(data, r, theta.len())?;
    if weights.len() != data.n() {
        return Err(Error::invalid("one weight per row required"));
    }
    Ok(weighted_fisher_kernel(data.rows(), Some(weights), theta, r))
}

/// Rows and columns `idx` of [`hessian_nll`], computed without forming the
/// full matrix.
pub fn hessian_block(theta: &[f64], data: &SampleMatrix, r: usize, idx: &[usize]) -> Result<DMatrix<f64>> {
    check_problem(data, r, theta.len())?;
    if let Some(j) = idx.iter().find(|&&j| j >= theta.len()) {
        return Err(Error::invalid(format!("index {j} out of range")));
    }
    let k = idx.len();
    let mut h = DMatrix::zeros(k, k);
    let mut sub = vec![0.0; k];
    for row in data.rows() {
        let w = eta_from_margin(f64::from(row[r]) * margin(row, theta, r));
        for (s, &j) in sub.iter_mut().zip(idx) {
            *s = f64::from(row[covariate_vertex(r, j)]);
        }
        for b in 0..k {
            for a in 0..k {
                h[(a, b)] += w * sub[a] * sub[b];
            }
        }
    }
    Ok(h / data.n() as f64)
}

/// `nll(θ) + λ ‖θ‖₁`.
pub fn penalized_objective(theta: &[f64], data: &SampleMatrix, r: usize, lambda: f64) -> Result<f64> {
    Ok(nll(theta, data, r)? + lambda * theta.iter().map(|v| v.abs()).sum::<f64>())
}

/// One node-wise regression: response `x_r`, covariates `x_\r`, penalty `λ`.
#[derive(Debug, Clone, Copy)]
pub struct NodeRegressionProblem<'a> {
    pub data: &'a SampleMatrix,
    pub r: usize,
    pub lambda: f64,
}

impl<'a> NodeRegressionProblem<'a> {
    pub fn new(data: &'a SampleMatrix, r: usize, lambda: f64) -> Result<Self> {
        if r >= data.p() || data.p() < 2 {
            return Err(Error::invalid(format!("vertex {r} out of range for p={}", data.p())));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        Ok(NodeRegressionProblem { data, r, lambda })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Target for the KKT residual. When `λ > 0` the solver iterates until
    /// the residual is below `kkt_tol · min(1, λ)`, so `|ẑ_j| ≤ 1 + kkt_tol`.
    pub kkt_tol: f64,
    pub max_iters: usize,
    /// Step shrink factor for the backtracking line search, in (0, 1).
    pub backtrack_factor: f64,
    /// Box bound on every coefficient; only active for (near-)separable data.
    pub coef_cap: f64,
    /// Coefficients smaller than this are zeroed before support extraction.
    pub zero_guard: f64,
    /// Fit an unpenalized offset (external data only).
    pub intercept: bool,
    /// Keep the objective value of every accepted iterate.
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            kkt_tol: 1e-6,
            max_iters: 5000,
            backtrack_factor: 0.5,
            coef_cap: 30.0,
            zero_guard: 1e-8,
            intercept: false,
            record_trace: false,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.kkt_tol > 0.0) {
            return Err(Error::invalid("kkt_tol must be positive"));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::invalid("backtrack_factor must lie in (0, 1)"));
        }
        if !(self.coef_cap > 0.0) || self.max_iters == 0 {
            return Err(Error::invalid("coef_cap and max_iters must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSolution {
    pub r: usize,
    pub lambda: f64,
    /// `θ̂_\r` in covariate order, with exact zeros off the support.
    pub theta: Vec<f64>,
    pub intercept: Option<f64>,
    /// `−∇ℓ(θ̂)/λ`; all zeros when `λ = 0`.
    pub zhat: Vec<f64>,
    /// `max_j dist(−∇ℓ(θ̂)_j, λ ∂|θ̂_j|)`.
    pub kkt_residual: f64,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Some coefficient sits on the `coef_cap` bound.
    pub capped: bool,
    pub trace: Vec<f64>,
}

impl RegressionSolution {
    /// Covariate indices with nonzero coefficient.
    pub fn support(&self) -> Vec<usize> {
        (0..self.theta.len()).filter(|&j| self.theta[j] != 0.0).collect()
    }
}

/// Covariates and response for a node, laid out for matrix-vector products.
struct NodeDesign {
    x: DMatrix<f64>,
    y: DVector<f64>,
    n: f64,
    /// number of penalized columns; the intercept, if any, is the last column
    penalized: usize,
}

impl NodeDesign {
    fn new(data: &SampleMatrix, r: usize, intercept: bool) -> Self {
        let (n, p) = (data.n(), data.p());
        let k = p - 1 + usize::from(intercept);
        let x = DMatrix::from_fn(n, k, |i, j| {
            if j == p - 1 {
                1.0
            } else {
                f64::from(data.get(i, covariate_vertex(r, j)))
            }
        });
        let y = DVector::from_fn(n, |i, _| f64::from(data.get(i, r)));
        NodeDesign {
            x,
            y,
            n: n as f64,
            penalized: p - 1,
        }
    }

    fn loss(&self, theta: &DVector<f64>) -> f64 {
        let a = &self.x * theta;
        a.iter()
            .zip(self.y.iter())
            .map(|(&a, &y)| log_two_cosh(a) - y * a)
            .sum::<f64>()
            / self.n
    }

    fn loss_grad(&self, theta: &DVector<f64>) -> (f64, DVector<f64>) {
        let mut a = &self.x * theta;
        let mut loss = 0.0;
        for (ai, &y) in a.iter_mut().zip(self.y.iter()) {
            loss += log_two_cosh(*ai) - y * *ai;
            *ai = ai.tanh() - y;
        }
        let g = self.x.tr_mul(&a) / self.n;
        (loss / self.n, g)
    }

    fn l1(&self, theta: &DVector<f64>) -> f64 {
        theta.iter().take(self.penalized).map(|v| v.abs()).sum()
    }

    /// Largest eigenvalue of XᵀX/n by power iteration, an upper bound on
    /// the loss curvature. Started from Xᵀy so that negating a column
    /// negates the iterate and the whole solver path mirrors exactly.
    fn lipschitz_estimate(&self) -> f64 {
        let k = self.x.ncols();
        let mut v = self.x.tr_mul(&self.y);
        let norm = v.norm();
        if norm > 0.0 {
            v /= norm;
        } else {
            v = DVector::from_element(k, 1.0 / (k as f64).sqrt());
        }
        let mut est = 1.0;
        for _ in 0..30 {
            let w = self.x.tr_mul(&(&self.x * &v)) / self.n;
            let norm = w.norm();
            if norm == 0.0 {
                return 1.0;
            }
            est = norm;
            v = w / norm;
        }
        est
    }
}

fn prox(v: &DVector<f64>, thresh: f64, penalized: usize, cap: f64) -> DVector<f64> {
    DVector::from_iterator(
        v.len(),
        v.iter().enumerate().map(|(j, &x)| {
            let shrunk = if j < penalized {
                x.signum() * (x.abs() - thresh).max(0.0)
            } else {
                x
            };
            shrunk.clamp(-cap, cap)
        }),
    )
}

/// Per-coordinate distance of `-g` from `λ ∂|θ_j|` plus the box normal cone.
fn kkt_residual(theta: &DVector<f64>, grad: &DVector<f64>, lambda: f64, penalized: usize, cap: f64) -> f64 {
    theta
        .iter()
        .zip(grad.iter())
        .enumerate()
        .map(|(j, (&th, &g))| {
            let lam = if j < penalized { lambda } else { 0.0 };
            if th >= cap {
                (g + lam).max(0.0)
            } else if th <= -cap {
                (lam - g).max(0.0)
            } else if th != 0.0 {
                (g + lam * th.signum()).abs()
            } else {
                (g.abs() - lam).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// Minimize `ℓ(θ) + λ‖θ‖₁` by monotone accelerated proximal gradient with
/// backtracking and function-value restarts.
///
/// Non-convergence is not an error: the best iterate is returned with
/// `converged = false`.
pub fn fit_l1_logistic(problem: &NodeRegressionProblem<'_>, opts: &SolverOptions) -> Result<RegressionSolution> {
    fit_l1_logistic_from(problem, opts, None)
}

/// As [`fit_l1_logistic`], starting from `init` (covariate order, plus the
/// intercept last when enabled).
pub fn fit_l1_logistic_from(
    problem: &NodeRegressionProblem<'_>,
    opts: &SolverOptions,
    init: Option<&[f64]>,
) -> Result<RegressionSolution> {
    opts.validate()?;
    let NodeRegressionProblem { data, r, lambda } = *problem;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be finite and >= 0, got {lambda}")));
    }
    let design = NodeDesign::new(data, r, opts.intercept);
    let k = design.x.ncols();
    let pen = design.penalized;
    let cap = opts.coef_cap;
    let target = if lambda > 0.0 {
        opts.kkt_tol * lambda.min(1.0)
    } else {
        opts.kkt_tol
    };

    let mut x = match init {
        Some(v) if v.len() == k => DVector::from_iterator(k, v.iter().map(|t| t.clamp(-cap, cap))),
        Some(v) => return Err(Error::invalid(format!("initial point has {} entries, expected {k}", v.len()))),
        None => DVector::zeros(k),
    };
    let (mut fx_smooth, mut gx) = design.loss_grad(&x);
    let mut fx = fx_smooth + lambda * design.l1(&x);
    let mut residual = kkt_residual(&x, &gx, lambda, pen, cap);
    let mut trace = Vec::new();
    if opts.record_trace {
        trace.push(fx);
    }

    let mut step = 1.0 / design.lipschitz_estimate();
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut iterations = 0;

    while residual > target && iterations < opts.max_iters {
        iterations += 1;
        let (fy, gy) = if y == x {
            (fx_smooth, gx.clone())
        } else {
            design.loss_grad(&y)
        };
        // backtracking on the quadratic upper model at y
        let z = loop {
            let z = prox(&(&y - &gy * step), step * lambda, pen, cap);
            let d = &z - &y;
            let model = fy + gy.dot(&d) + d.norm_squared() / (2.0 * step);
            let fz = design.loss(&z);
            if fz <= model + 1e-12 * fz.abs().max(1.0) || step < 1e-12 {
                break z;
            }
            step *= opts.backtrack_factor;
        };
        let (fz_smooth, gz) = design.loss_grad(&z);
        let fz = fz_smooth + lambda * design.l1(&z);

        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let rz = kkt_residual(&z, &gz, lambda, pen, cap);
        // near the optimum the objective stops resolving progress; a step
        // within rounding of fx still counts if it improves the residual
        let rounding = 1e-14 * fx.abs().max(1.0);
        if fz <= fx || (fz <= fx + rounding && rz < residual) {
            let x_prev = std::mem::replace(&mut x, z);
            fx = fz;
            fx_smooth = fz_smooth;
            gx = gz;
            residual = rz;
            y = &x + (&x - &x_prev) * ((t - 1.0) / t_next);
            t = t_next;
        } else {
            // objective went up: restart momentum from the current best
            y = x.clone();
            t = 1.0;
        }
        if opts.record_trace {
            trace.push(fx);
        }
    }

    // clear numerical dust below the guard before reporting the support
    if x.iter().take(pen).any(|v| *v != 0.0 && v.abs() < opts.zero_guard) {
        for v in x.iter_mut().take(pen) {
            if v.abs() < opts.zero_guard {
                *v = 0.0;
            }
        }
        let (f, g) = design.loss_grad(&x);
        fx = f + lambda * design.l1(&x);
        gx = g;
        residual = kkt_residual(&x, &gx, lambda, pen, cap);
    }

    let zhat = if lambda > 0.0 {
        gx.iter().take(pen).map(|g| -g / lambda).collect()
    } else {
        vec![0.0; pen]
    };
    let capped = x.iter().any(|v| v.abs() >= cap);
    Ok(RegressionSolution {
        r,
        lambda,
        theta: x.iter().take(pen).copied().collect(),
        intercept: opts.intercept.then(|| x[pen]),
        zhat,
        kkt_residual: residual,
        objective: fx,
        iterations,
        converged: residual <= target,
        capped,
        trace,
    })
}

/// Post-hoc primal-dual witness diagnostic for one node.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    /// `‖ẑ_{S^c}‖∞` (0 when `S^c` is empty).
    pub dual_sup_off_support: f64,
    /// `‖ẑ_{S^c}‖∞ < 1`.
    pub strictly_dual_feasible: bool,
    /// `Λ_min([∇²ℓ(θ̂)]_SS)` (+∞ when `S` is empty).
    pub support_hessian_min_eig: f64,
    pub support_hessian_pd: bool,
    /// `sign(θ̂_S)` equals the reference signs; `None` when no reference given.
    pub signs_agree: Option<bool>,
}

/// Evaluate strict dual feasibility off `support`, positive definiteness of
/// the Hessian block on `support`, and optional sign agreement. Never alters
/// the estimate.
pub fn witness_check(
    solution: &RegressionSolution,
    data: &SampleMatrix,
    support: &[usize],
    reference_signs: Option<&[i8]>,
    pd_tol: f64,
) -> Result<WitnessReport> {
    let k = solution.theta.len();
    check_problem(data, solution.r, k)?;
    if !solution.converged {
        return Err(Error::invalid("witness check needs a converged solution"));
    }
    if let Some(j) = support.iter().find(|&&j| j >= k) {
        return Err(Error::invalid(format!("support index {j} out of range for {k} covariates")));
    }
    if reference_signs.is_some_and(|s| s.len() != support.len()) {
        return Err(Error::invalid("one reference sign per support index required"));
    }
    let off: f64 = (0..k)
        .filter(|j| !support.contains(j))
        .map(|j| solution.zhat[j].abs())
        .fold(0.0, f64::max);
    let h = hessian_block(&solution.theta, data, solution.r, support)?;
    let min_eig = min_eigenvalue(&h);
    let signs_agree = reference_signs.map(|signs| {
        support
            .iter()
            .zip(signs)
            .all(|(&j, &s)| solution.theta[j].signum() == f64::from(s) && solution.theta[j] != 0.0)
    });
    Ok(WitnessReport {
        dual_sup_off_support: off,
        strictly_dual_feasible: off < 1.0,
        support_hessian_min_eig: min_eig,
        support_hessian_pd: min_eig > pd_tol,
        signs_agree,
    })
}

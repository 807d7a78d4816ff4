//! Fisher information of the node-conditional likelihood, the dependency
//! and incoherence checks built on it, threshold arithmetic for the
//! regularization level, and empirical concentration probes.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{covariate_index, covariate_vertex, IsingModel};
use crate::rng::{mix_seed, seeded};
use crate::sampling::{decode_config, enumerate_distribution, sample_from_table, SampleMatrix};

/// Minimum eigenvalue below which a block counts as singular.
pub const PD_TOL: f64 = 1e-10;

/// Variance weight `4 e^{2b} / (e^{2b} + 1)^2` with `b = x_r Σ_t θ_rt x_t`.
///
/// `theta` is in covariate order for node `r`. The result lies in `(0, 1]`
/// and equals 1 exactly when `b = 0`.
pub fn eta(x: &[i8], theta: &[f64], r: usize) -> f64 {
    let field: f64 = theta
        .iter()
        .enumerate()
        .map(|(j, &th)| th * f64::from(x[covariate_vertex(r, j)]))
        .sum();
    eta_from_margin(f64::from(x[r]) * field)
}

/// `4 e^{2b} / (e^{2b}+1)^2`, written in terms of `e^{-2|b|}` so it never
/// overflows.
#[inline]
pub fn eta_from_margin(b: f64) -> f64 {
    let e = (-2.0 * b.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FisherKind {
    Population,
    Sample,
}

#[derive(Debug, Clone)]
pub struct FisherMatrix {
    pub r: usize,
    pub kind: FisherKind,
    pub q: DMatrix<f64>,
}

impl FisherMatrix {
    pub fn dim(&self) -> usize {
        self.q.nrows()
    }
}

/// `(1/W) Σ_i w_i η(x_i; θ) x_{i,\r} x_{i,\r}^T` with `W = Σ w_i` (or `n`
/// when unweighted). Shared by the sample Fisher matrix and the Hessian of
/// the node loss so the two agree bit for bit.
pub(crate) fn weighted_fisher_kernel<'a>(
    rows: impl Iterator<Item = &'a [i8]>,
    weights: Option<&[f64]>,
    theta: &[f64],
    r: usize,
) -> DMatrix<f64> {
    let k = theta.len();
    let mut q = DMatrix::<f64>::zeros(k, k);
    let mut total = 0.0;
    let mut cov = vec![0.0; k];
    for (i, x) in rows.enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        total += w;
        for (j, c) in cov.iter_mut().enumerate() {
            *c = f64::from(x[covariate_vertex(r, j)]);
        }
        let field: f64 = theta.iter().zip(&cov).map(|(a, b)| a * b).sum();
        let scale = w * eta_from_margin(f64::from(x[r]) * field);
        for b in 0..k {
            let sb = scale * cov[b];
            for a in b..k {
                q[(a, b)] += sb * cov[a];
            }
        }
    }
    for b in 0..k {
        for a in b..k {
            let v = q[(a, b)] / total;
            q[(a, b)] = v;
            q[(b, a)] = v;
        }
    }
    q
}

fn check_dims(p: usize, theta: &[f64], r: usize) -> Result<()> {
    if r >= p {
        return Err(Error::invalid(format!("vertex {r} out of range for p={p}")));
    }
    if theta.len() + 1 != p {
        return Err(Error::invalid(format!(
            "theta has {} entries, expected {}",
            theta.len(),
            p - 1
        )));
    }
    Ok(())
}

/// Sample Fisher matrix `Q^n` at `theta` for center node `r`.
pub fn sample_fisher(data: &SampleMatrix, theta: &[f64], r: usize) -> Result<FisherMatrix> {
    check_dims(data.p(), theta, r)?;
    Ok(FisherMatrix {
        r,
        kind: FisherKind::Sample,
        q: weighted_fisher_kernel(data.rows(), None, theta, r),
    })
}

/// Population Fisher matrix `Q*` for node `r`, by exact summation over all
/// configurations.
pub fn population_fisher(model: &IsingModel, r: usize) -> Result<FisherMatrix> {
    let p = model.p();
    let theta = model.theta_row(r);
    check_dims(p, &theta, r)?;
    let table = enumerate_distribution(model)?;
    let configs: Vec<Vec<i8>> = (0..table.probs().len()).map(|k| decode_config(k, p)).collect();
    let q = weighted_fisher_kernel(configs.iter().map(Vec::as_slice), Some(table.probs()), &theta, r);
    Ok(FisherMatrix {
        r,
        kind: FisherKind::Population,
        q,
    })
}

/// `E[X_\r X_\r^T]`, the covariate second-moment matrix for node `r`, taken
/// from a full `p × p` moment matrix.
pub fn covariate_second_moment(moments: &DMatrix<f64>, r: usize) -> DMatrix<f64> {
    let idx: Vec<usize> = (0..moments.nrows()).filter(|&t| t != r).collect();
    moments.select_rows(&idx).select_columns(&idx)
}

/// Covariate indices of the true neighbors of `r`, sorted.
pub fn support_indices(model: &IsingModel, r: usize) -> Vec<usize> {
    model
        .neighbors(r)
        .iter()
        .map(|&(t, _)| covariate_index(r, t))
        .collect()
}

/// Induced `‖A‖∞` operator norm: the largest absolute row sum.
pub fn norm_inf(a: &DMatrix<f64>) -> f64 {
    a.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return f64::INFINITY;
    }
    SymmetricEigen::new(a.clone()).eigenvalues.min()
}

pub fn max_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return f64::NEG_INFINITY;
    }
    SymmetricEigen::new(a.clone()).eigenvalues.max()
}

/// Spectral norm of a symmetric matrix.
pub fn spectral_norm_sym(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    SymmetricEigen::new(a.clone()).eigenvalues.amax()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    /// `Λ_min(Q_SS)`
    pub c_min_hat: f64,
    /// `Λ_max` of the covariate second-moment matrix.
    pub d_max_hat: f64,
    /// `‖Q_{S^c S} (Q_SS)^{-1}‖∞`; `None` when `Q_SS` is singular.
    pub incoherence: Option<f64>,
    /// `1 - incoherence`.
    pub alpha_hat: Option<f64>,
    pub passes_a1: bool,
    pub passes_a2: bool,
}

impl fmt::Display for AssumptionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.10e}"));
        write!(
            f,
            "c_min_hat={:.10e} d_max_hat={:.10e} incoherence={} alpha_hat={} passes_a1={} passes_a2={}",
            self.c_min_hat,
            self.d_max_hat,
            opt(self.incoherence),
            opt(self.alpha_hat),
            u8::from(self.passes_a1),
            u8::from(self.passes_a2),
        )
    }
}

/// Evaluate the dependency (A1) and incoherence (A2) conditions for one node.
///
/// `support` holds covariate indices of the true neighborhood and must be
/// nonempty. A singular `Q_SS` is reported, not raised.
pub fn check_assumptions(
    q: &FisherMatrix,
    second_moment: &DMatrix<f64>,
    support: &[usize],
    alpha_required: f64,
) -> Result<AssumptionReport> {
    let k = q.dim();
    if !(alpha_required > 0.0 && alpha_required <= 1.0) {
        return Err(Error::invalid(format!("alpha_required must lie in (0,1], got {alpha_required}")));
    }
    if support.is_empty() {
        return Err(Error::invalid("support set is empty"));
    }
    if second_moment.shape() != (k, k) {
        return Err(Error::invalid("second-moment matrix has the wrong shape"));
    }
    let mut s = support.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != support.len() || s.iter().any(|&j| j >= k) {
        return Err(Error::invalid(format!("support {support:?} invalid for dimension {k}")));
    }
    let sc: Vec<usize> = (0..k).filter(|j| s.binary_search(j).is_err()).collect();

    let q_ss = q.q.select_rows(&s).select_columns(&s);
    let c_min_hat = min_eigenvalue(&q_ss);
    let d_max_hat = max_eigenvalue(second_moment);
    let passes_a1 = c_min_hat > PD_TOL;

    let incoherence = if !passes_a1 {
        None
    } else if sc.is_empty() {
        Some(0.0)
    } else {
        let q_scs = q.q.select_rows(&sc).select_columns(&s);
        // Q_{S^c S} Q_SS^{-1} = (Q_SS^{-1} Q_{S S^c})^T
        q_ss.clone()
            .cholesky()
            .map(|ch| norm_inf(&ch.solve(&q_scs.transpose()).transpose()))
    };
    let alpha_hat = incoherence.map(|v| 1.0 - v);
    let passes_a2 = incoherence.is_some_and(|v| v <= 1.0 - alpha_required);
    Ok(AssumptionReport {
        c_min_hat,
        d_max_hat,
        incoherence,
        alpha_hat,
        passes_a1: passes_a1 && incoherence.is_some(),
        passes_a2,
    })
}

/// Regularization and minimum-weight levels from the main recovery result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremThresholds {
    /// `16 (2 - α)/α · sqrt(ln p / n)`
    pub lambda_min: f64,
    /// `10/C_min · sqrt(d) · lambda_min`
    pub weight_threshold: f64,
    /// `d^3 ln p`; the sample size must exceed an unknown constant times this.
    pub sample_size_form: f64,
}

impl fmt::Display for TheoremThresholds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lambda_min={:.10e} weight_threshold={:.10e} sample_size_form={:.10e}",
            self.lambda_min, self.weight_threshold, self.sample_size_form
        )
    }
}

pub fn theorem_thresholds(c_min: f64, alpha: f64, d: usize, p: usize, n: usize) -> Result<TheoremThresholds> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0,1], got {alpha}")));
    }
    if !(c_min > 0.0) {
        return Err(Error::invalid(format!("C_min must be positive, got {c_min}")));
    }
    if p < 2 || n == 0 {
        return Err(Error::invalid("need p >= 2 and n >= 1"));
    }
    let log_p = (p as f64).ln();
    let lambda_min = 16.0 * (2.0 - alpha) / alpha * (log_p / n as f64).sqrt();
    Ok(TheoremThresholds {
        lambda_min,
        weight_threshold: 10.0 / c_min * (d as f64).sqrt() * lambda_min,
        sample_size_form: (d as f64).powi(3) * log_p,
    })
}

/// Median with 10% and 90% quantiles (nearest-rank on the sorted values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub median: f64,
    pub q10: f64,
    pub q90: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
        if v.is_empty() {
            return Summary {
                median: f64::NAN,
                q10: f64::NAN,
                q90: f64::NAN,
            };
        }
        v.sort_by(f64::total_cmp);
        let m = v.len();
        let median = if m % 2 == 1 {
            v[m / 2]
        } else {
            0.5 * (v[m / 2 - 1] + v[m / 2])
        };
        let rank = |q: f64| v[((q * (m - 1) as f64).round() as usize).min(m - 1)];
        Summary {
            median,
            q10: rank(0.1),
            q90: rank(0.9),
        }
    }
}

/// One sample size of a [`concentration_probe`].
#[derive(Debug, Clone)]
pub struct ConcentrationRow {
    pub n: usize,
    /// `‖Q^n_SS − Q*_SS‖₂`
    pub block_deviation: Summary,
    /// `|Λ_min(Q^n_SS) − Λ_min(Q*_SS)|`
    pub min_eig_deviation: Summary,
    /// `‖Q^n_{S^c S} (Q^n_SS)^{-1}‖∞`
    pub sample_incoherence: Summary,
    pub raw_block_deviation: Vec<f64>,
}

/// Empirical concentration of the sample Fisher matrix around the population
/// one at node `r`, for each sample size in `n_grid`. Data are drawn exactly
/// from the enumerated distribution; each `(n, rep)` cell gets its own seed
/// derived from `seed`, so results do not depend on scheduling.
pub fn concentration_probe(
    model: &IsingModel,
    r: usize,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<ConcentrationRow>> {
    if r >= model.p() {
        return Err(Error::invalid(format!("vertex {r} out of range")));
    }
    if reps == 0 || n_grid.contains(&0) {
        return Err(Error::invalid("reps and every n must be positive"));
    }
    let table = enumerate_distribution(model)?;
    let theta = model.theta_row(r);
    let s = support_indices(model, r);
    let k = theta.len();
    let sc: Vec<usize> = (0..k).filter(|j| !s.contains(j)).collect();
    let pop = population_fisher(model, r)?;
    let pop_ss = pop.q.select_rows(&s).select_columns(&s);
    let pop_min = min_eigenvalue(&pop_ss);

    n_grid
        .iter()
        .enumerate()
        .map(|(ni, &n)| {
            let cells: Vec<Result<(f64, f64, f64)>> = (0..reps)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = seeded(mix_seed(seed, &[ni as u64, rep as u64]));
                    let data = sample_from_table(&table, n, &mut rng)?;
                    let qn = sample_fisher(&data, &theta, r)?.q;
                    let qn_ss = qn.select_rows(&s).select_columns(&s);
                    let dev = spectral_norm_sym(&(&qn_ss - &pop_ss));
                    let eig_dev = (min_eigenvalue(&qn_ss) - pop_min).abs();
                    let inco = if s.is_empty() || sc.is_empty() {
                        0.0
                    } else {
                        let q_scs = qn.select_rows(&sc).select_columns(&s);
                        qn_ss
                            .cholesky()
                            .map_or(f64::NAN, |ch| norm_inf(&ch.solve(&q_scs.transpose()).transpose()))
                    };
                    Ok((dev, eig_dev, inco))
                })
                .collect();
            let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;
            let dev: Vec<f64> = cells.iter().map(|c| c.0).collect();
            let eig: Vec<f64> = cells.iter().map(|c| c.1).collect();
            let inco: Vec<f64> = cells.iter().map(|c| c.2).collect();
            Ok(ConcentrationRow {
                n,
                block_deviation: Summary::of(&dev),
                min_eig_deviation: Summary::of(&eig),
                sample_incoherence: Summary::of(&inco),
                raw_block_deviation: dev,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{make_grid4, Topology};

    #[test]
    fn eta_values() {
        assert_eq!(eta(&[1, -1, 1], &[0.0, 0.0], 0), 1.0);
        let e = std::f64::consts::E;
        assert!((eta_from_margin(0.5) - 4.0 * e / ((e + 1.0) * (e + 1.0))).abs() < 1e-15);
        assert!((eta_from_margin(0.5) - 0.7864).abs() < 1e-4);
        for b in [-3.0, -0.7, 0.1, 2.5, 40.0] {
            let s = 1.0 / (1.0 + (-2.0f64 * b).exp());
            assert!((eta_from_margin(b) - 4.0 * s * (1.0 - s)).abs() < 1e-14);
        }
        assert!(eta_from_margin(400.0).is_finite());
    }

    #[test]
    fn eta_uses_response_sign() {
        // b = x_r * field; η is even in b so flipping x_r leaves it unchanged
        let a = eta(&[1, 1, -1], &[0.3, 0.2], 0);
        let b = eta(&[-1, 1, -1], &[0.3, 0.2], 0);
        assert_eq!(a, b);
        assert!((a - eta_from_margin(0.1)).abs() < 1e-15);
    }

    #[test]
    fn population_fisher_uncoupled_is_identity() {
        let m = IsingModel::new(Topology::new(4, []).unwrap(), vec![]).unwrap();
        let q = population_fisher(&m, 2).unwrap().q;
        assert!((q - DMatrix::<f64>::identity(3, 3)).amax() < 1e-15);
    }

    #[test]
    fn identity_assumptions() {
        let q = FisherMatrix {
            r: 0,
            kind: FisherKind::Population,
            q: DMatrix::identity(4, 4),
        };
        let rep = check_assumptions(&q, &DMatrix::identity(4, 4), &[1, 3], 1.0).unwrap();
        assert!((rep.c_min_hat - 1.0).abs() < 1e-14);
        assert_eq!(rep.incoherence, Some(0.0));
        assert_eq!(rep.alpha_hat, Some(1.0));
        assert!(rep.passes_a1 && rep.passes_a2);
    }

    #[test]
    fn block_diagonal_is_incoherent() {
        let mut q = DMatrix::<f64>::identity(4, 4);
        q[(0, 1)] = 0.4;
        q[(1, 0)] = 0.4;
        q[(2, 3)] = -0.3;
        q[(3, 2)] = -0.3;
        let fm = FisherMatrix {
            r: 0,
            kind: FisherKind::Sample,
            q,
        };
        let rep = check_assumptions(&fm, &DMatrix::identity(4, 4), &[0, 1], 0.5).unwrap();
        assert_eq!(rep.incoherence, Some(0.0));
    }

    #[test]
    fn singular_block_is_reported() {
        let q = FisherMatrix {
            r: 0,
            kind: FisherKind::Sample,
            q: DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
        };
        let rep = check_assumptions(&q, &DMatrix::identity(3, 3), &[0, 1], 0.5).unwrap();
        assert!(!rep.passes_a1 && !rep.passes_a2);
        assert_eq!(rep.incoherence, None);
        assert!(rep.to_string().contains("incoherence=undefined"));
    }

    #[test]
    fn assumption_argument_errors() {
        let q = FisherMatrix {
            r: 0,
            kind: FisherKind::Sample,
            q: DMatrix::identity(3, 3),
        };
        let m = DMatrix::identity(3, 3);
        assert!(check_assumptions(&q, &m, &[], 0.5).is_err());
        assert!(check_assumptions(&q, &m, &[3], 0.5).is_err());
        assert!(check_assumptions(&q, &m, &[0], 0.0).is_err());
        assert!(check_assumptions(&q, &m, &[0], 1.5).is_err());
    }

    #[test]
    fn thresholds() {
        let t = theorem_thresholds(1.0, 1.0, 4, 64, 1000).unwrap();
        let direct = 16.0 * ((64f64).ln() / 1000.0).sqrt();
        assert!((t.lambda_min - direct).abs() < 1e-12);
        assert!((t.lambda_min - 1.0319).abs() < 1e-4);
        assert!((t.weight_threshold - 20.0 * direct).abs() < 1e-12);
        assert!((t.sample_size_form - 64.0 * (64f64).ln()).abs() < 1e-12);
        let big = theorem_thresholds(1.0, 1.0, 4, 64, usize::MAX / 2).unwrap();
        assert!(big.lambda_min < 1e-3 && big.weight_threshold < 1e-2);
        assert!(theorem_thresholds(1.0, 0.0, 4, 64, 10).is_err());
        assert!(theorem_thresholds(1.0, 1.1, 4, 64, 10).is_err());
        assert!(theorem_thresholds(0.0, 0.5, 4, 64, 10).is_err());
    }

    #[test]
    fn thresholds_monotone() {
        let a = theorem_thresholds(0.5, 0.5, 4, 64, 1000).unwrap();
        let b = theorem_thresholds(0.5, 0.5, 8, 64, 1000).unwrap();
        let c = theorem_thresholds(0.5, 0.25, 4, 64, 1000).unwrap();
        assert!(b.weight_threshold > a.weight_threshold);
        assert!(c.lambda_min > a.lambda_min && c.weight_threshold > a.weight_threshold);
    }

    #[test]
    fn summary_quantiles() {
        let s = Summary::of(&[5.0, 1.0, 3.0, 2.0, 4.0]);
        assert_eq!(s.median, 3.0);
        assert_eq!(Summary::of(&[1.0, 2.0]).median, 1.5);
    }

    #[test]
    fn probe_outputs_nonnegative_and_uncoupled_incoherence_shrinks() {
        let m = IsingModel::new(Topology::new(5, []).unwrap(), vec![]).unwrap();
        // give node 0 a nominal support via a coupled model instead
        assert!(concentration_probe(&m, 0, &[100], 3, 1).is_ok());

        let topo = make_grid4(2).unwrap();
        let tiny = 1e-9;
        let weak = IsingModel::new(topo, vec![tiny; 4]).unwrap();
        let rows = concentration_probe(&weak, 0, &[200, 20_000], 10, 3).unwrap();
        for row in &rows {
            assert!(row.raw_block_deviation.iter().all(|v| *v >= 0.0));
            assert!(row.min_eig_deviation.q10 >= 0.0 && row.sample_incoherence.q10 >= 0.0);
        }
        assert!(rows[1].sample_incoherence.median < rows[0].sample_incoherence.median);
        assert!(rows[1].sample_incoherence.median < 0.05);
    }
}

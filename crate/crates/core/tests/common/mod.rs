// Independent reference computations used by the integration tests. Nothing
// here calls into the library's numerics.
#![allow(dead_code)]

use isingsel::graphs::IsingModel;
use isingsel::rng::seeded;
use isingsel::sampling::SampleMatrix;
use rand::Rng as _;

pub fn random_pm1(n: usize, p: usize, seed: u64) -> SampleMatrix {
    let mut rng = seeded(seed);
    let v = (0..n * p).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    SampleMatrix::new(n, p, v).unwrap()
}

/// Random model on `p` vertices: each pair is an edge with probability 1/2,
/// weights uniform in ±[0.1, 0.8].
pub fn random_model(p: usize, seed: u64) -> IsingModel {
    let mut rng = seeded(seed);
    let mut edges = Vec::new();
    for s in 0..p {
        for t in s + 1..p {
            if rng.random_bool(0.5) {
                let w: f64 = rng.random_range(0.1..0.8);
                edges.push((s, t, if rng.random_bool(0.5) { w } else { -w }));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1, 0.4));
    }
    IsingModel::from_edges(p, edges).unwrap()
}

/// Covariate vertices of node `r`, in order.
pub fn others(p: usize, r: usize) -> Vec<usize> {
    (0..p).filter(|&t| t != r).collect()
}

/// `(1/n) Σ [log(e^a + e^-a) - x_r a]` written out directly.
pub fn direct_nll(theta: &[f64], data: &SampleMatrix, r: usize) -> f64 {
    let cov = others(data.p(), r);
    let mut total = 0.0;
    for x in data.rows() {
        let a: f64 = cov.iter().zip(theta).map(|(&t, th)| th * f64::from(x[t])).sum();
        // -log P(x_r | rest) with P = e^{x_r a} / (e^a + e^-a)
        let log_num = f64::from(x[r]) * a;
        let m = a.abs();
        let log_den = m + ((a - m).exp() + (-a - m).exp()).ln();
        total += log_den - log_num;
    }
    total / data.n() as f64
}

pub fn direct_objective(theta: &[f64], data: &SampleMatrix, r: usize, lambda: f64) -> f64 {
    direct_nll(theta, data, r) + lambda * theta.iter().map(|v| v.abs()).sum::<f64>()
}

/// Minimize `f` over `[-1, 1]^k`: full grid at step `h0`, then a pattern
/// search over all 3^k - 1 neighbor directions with the step halved whenever
/// no neighbor improves.
pub fn grid_search_minimizer(f: impl Fn(&[f64]) -> f64, k: usize, h0: f64, h_end: f64) -> Vec<f64> {
    let steps = (2.0 / h0).round() as usize;
    let mut best = vec![0.0; k];
    let mut best_val = f(&best);
    let mut idx = vec![0usize; k];
    loop {
        let x: Vec<f64> = idx.iter().map(|&i| -1.0 + i as f64 * h0).collect();
        let v = f(&x);
        if v < best_val {
            best_val = v;
            best = x;
        }
        let mut j = 0;
        while j < k {
            idx[j] += 1;
            if idx[j] <= steps {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == k {
            break;
        }
    }
    let dirs: Vec<Vec<f64>> = (0..3usize.pow(k as u32))
        .map(|m| (0..k).map(|j| (m / 3usize.pow(j as u32) % 3) as f64 - 1.0).collect())
        .filter(|d: &Vec<f64>| d.iter().any(|v| *v != 0.0))
        .collect();
    let mut h = h0;
    while h > h_end {
        let mut improved = false;
        for d in &dirs {
            let x: Vec<f64> = best.iter().zip(d).map(|(b, s)| b + h * s).collect();
            let v = f(&x);
            if v < best_val {
                best_val = v;
                best = x;
                improved = true;
            }
        }
        if !improved {
            h /= 2.0;
        }
    }
    best
}

/// All configurations with their normalized probabilities.
pub fn brute_distribution(model: &IsingModel) -> Vec<(Vec<i8>, f64)> {
    let p = model.p();
    let edges: Vec<(usize, usize, f64)> = model.edges().collect();
    let configs: Vec<Vec<i8>> = (0..1usize << p)
        .map(|k| (0..p).map(|s| if k >> s & 1 == 1 { 1 } else { -1 }).collect())
        .collect();
    let weights: Vec<f64> = configs
        .iter()
        .map(|x| {
            edges
                .iter()
                .map(|&(s, t, w)| w * f64::from(x[s]) * f64::from(x[t]))
                .sum::<f64>()
                .exp()
        })
        .collect();
    let z: f64 = weights.iter().sum();
    configs.into_iter().zip(weights.into_iter().map(|w| w / z)).collect()
}

/// `E[sech^2(a) x x^T]` over the covariates of `r`, summed over all states.
pub fn brute_population_fisher(model: &IsingModel, r: usize) -> Vec<Vec<f64>> {
    let p = model.p();
    let cov = others(p, r);
    let mut q = vec![vec![0.0; p - 1]; p - 1];
    for (x, prob) in brute_distribution(model) {
        let a: f64 = cov.iter().map(|&t| model.coupling(r, t) * f64::from(x[t])).sum();
        let w = prob / a.cosh().powi(2);
        for (i, &u) in cov.iter().enumerate() {
            for (j, &v) in cov.iter().enumerate() {
                q[i][j] += w * f64::from(x[u]) * f64::from(x[v]);
            }
        }
    }
    q
}

pub fn brute_moments(model: &IsingModel) -> Vec<Vec<f64>> {
    let p = model.p();
    let mut m = vec![vec![0.0; p]; p];
    for (x, prob) in brute_distribution(model) {
        for s in 0..p {
            for t in 0..p {
                m[s][t] += prob * f64::from(x[s]) * f64::from(x[t]);
            }
        }
    }
    m
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &bi)| {
        let mut r = row.clone();
        r.push(bi);
        r
    }).collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, piv);
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..=n {
                m[i][j] -= f * m[c][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `max ‖A v‖∞` over sign vectors `v`, which equals the induced ∞-norm.
pub fn brute_norm_inf(a: &[Vec<f64>]) -> f64 {
    let k = a[0].len();
    (0..1usize << k)
        .map(|m| {
            a.iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .map(|(j, v)| if m >> j & 1 == 1 { *v } else { -v })
                        .sum::<f64>()
                        .abs()
                })
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Central finite-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let mut up = x.to_vec();
            let mut dn = x.to_vec();
            up[j] += h;
            dn[j] -= h;
            (f(&up) - f(&dn)) / (2.0 * h)
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

mod common;

use common::*;
use isingsel::fisher::{
    check_assumptions, covariate_second_moment, eta, norm_inf, population_fisher, sample_fisher, support_indices,
    theorem_thresholds,
};
use isingsel::graphs::IsingModel;
use isingsel::logreg::{
    fit_l1_logistic, grad_nll, hessian_nll, hessian_nll_weighted, nll, NodeRegressionProblem, SolverOptions,
};
use isingsel::rng::seeded;
use isingsel::sampling::{conditional_prob, enumerate_distribution, SampleMatrix};
use nalgebra::DMatrix;
use rand::Rng as _;

#[test]
fn nll_matches_direct_likelihood() {
    let mut rng = seeded(3);
    for case in 0..20 {
        let data = random_pm1(60, 4, 100 + case);
        let r = case as usize % 4;
        let theta: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let got = nll(&theta, &data, r).unwrap();
        assert!((got - direct_nll(&theta, &data, r)).abs() < 1e-12);
    }
}

#[test]
fn solver_matches_grid_search() {
    let opts = SolverOptions::default();
    for (case, &lambda) in [0.05, 0.1, 0.3].iter().enumerate() {
        let data = random_pm1(150, 4, 40 + case as u64);
        let r = case % 4;
        let sol = fit_l1_logistic(&NodeRegressionProblem::new(&data, r, lambda).unwrap(), &opts).unwrap();
        let oracle = grid_search_minimizer(|t| direct_objective(t, &data, r, lambda), 3, 0.1, 1e-7);
        assert!(sol.converged);
        assert!(sol.kkt_residual <= 1e-6);
        assert!(max_abs_diff(&sol.theta, &oracle) < 1e-3, "{:?} vs {:?}", sol.theta, oracle);
    }
}

#[test]
fn gradient_and_hessian_match_finite_differences() {
    let mut rng = seeded(8);
    for case in 0..10 {
        let p = 3 + case % 4;
        let data = random_pm1(80, p, 200 + case as u64);
        let r = case % p;
        let theta: Vec<f64> = (0..p - 1).map(|_| rng.random_range(-1.5..1.5)).collect();
        let g = grad_nll(&theta, &data, r).unwrap();
        let fd = fd_gradient(|t| direct_nll(t, &data, r), &theta, 1e-5);
        let scale = g.iter().map(|v| v.abs()).fold(1e-3, f64::max);
        assert!(max_abs_diff(&g, &fd) / scale < 1e-5);

        let h = hessian_nll(&theta, &data, r).unwrap();
        for j in 0..p - 1 {
            let col = fd_gradient(|t| grad_nll(t, &data, r).unwrap()[j], &theta, 1e-5);
            let want: Vec<f64> = (0..p - 1).map(|i| h[(j, i)]).collect();
            assert!(max_abs_diff(&want, &col) < 1e-4 * h.amax().max(1e-3));
        }
    }
}

#[test]
fn conditional_prob_matches_enumeration() {
    for seed in 0..5 {
        let model = random_model(5, seed);
        let dist = brute_distribution(&model);
        for r in 0..5 {
            for (x, px) in &dist {
                let mut flipped = x.clone();
                flipped[r] = -x[r];
                let pf = dist.iter().find(|(y, _)| *y == flipped).unwrap().1;
                let p_plus = if x[r] > 0 { px / (px + pf) } else { pf / (px + pf) };
                let rest: Vec<i8> = others(5, r).iter().map(|&t| x[t]).collect();
                assert!((conditional_prob(&model, r, &rest).unwrap() - p_plus).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn population_fisher_matches_brute_force() {
    for seed in 0..6 {
        let p = 2 + seed as usize % 4;
        let model = random_model(p, 50 + seed);
        for r in 0..p {
            let q = population_fisher(&model, r).unwrap().q;
            let want = brute_population_fisher(&model, r);
            for i in 0..p - 1 {
                for j in 0..p - 1 {
                    assert!((q[(i, j)] - want[i][j]).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn weighted_hessian_over_all_states_is_population_fisher() {
    let model = random_model(4, 11);
    let table = enumerate_distribution(&model).unwrap();
    let rows: Vec<Vec<i8>> = (0..16).map(|k| table.config(k)).collect();
    let data = SampleMatrix::from_rows(&rows).unwrap();
    for r in 0..4 {
        let theta = model.theta_row(r);
        let h = hessian_nll_weighted(&theta, &data, table.probs(), r).unwrap();
        let q = population_fisher(&model, r).unwrap().q;
        assert!((h - q).amax() < 1e-12);
    }
}

#[test]
fn hessian_is_sample_fisher_bit_for_bit() {
    let mut rng = seeded(21);
    for case in 0..10 {
        let data = random_pm1(40, 5, 300 + case);
        let theta: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = case as usize % 5;
        assert_eq!(hessian_nll(&theta, &data, r).unwrap(), sample_fisher(&data, &theta, r).unwrap().q);
    }
}

#[test]
fn eta_matches_sech_squared() {
    let mut rng = seeded(4);
    for _ in 0..50 {
        let x: Vec<i8> = (0..4).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
        let theta: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
        let a: f64 = others(4, 1).iter().zip(&theta).map(|(&t, th)| th * f64::from(x[t])).sum();
        let e = eta(&x, &theta, 1);
        assert!((e - 1.0 / a.cosh().powi(2)).abs() < 1e-14);
        assert!(e > 0.0 && e <= 1.0);
    }
    assert_eq!(eta(&[1, -1, 1], &[0.0, 0.0], 0), 1.0);
}

#[test]
fn norm_inf_matches_sign_vector_search() {
    let mut rng = seeded(9);
    for _ in 0..20 {
        let a: Vec<Vec<f64>> = (0..4).map(|_| (0..4).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let m = DMatrix::from_fn(4, 4, |i, j| a[i][j]);
        assert!((norm_inf(&m) - brute_norm_inf(&a)).abs() < 1e-12);
    }
}

#[test]
fn jacobi_oracle_on_known_matrix() {
    // eigenvalues of [[2,1],[1,2]] are 1 and 3
    let ev = jacobi_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
    assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
}

#[test]
fn assumptions_on_chain_match_hand_solve() {
    // chain 0-1-2-3 at 0.5, interior node 1; covariates (0, 2, 3), S = {0, 1}
    let model = IsingModel::from_edges(4, [(0, 1, 0.5), (1, 2, 0.5), (2, 3, 0.5)]).unwrap();
    let r = 1;
    let s = support_indices(&model, r);
    assert_eq!(s, vec![0, 1]);
    let q = brute_population_fisher(&model, r);
    let q_ss = vec![vec![q[0][0], q[0][1]], vec![q[1][0], q[1][1]]];
    // row of Q_{S^c S} Q_SS^{-1} is the solution of Q_SS y = Q_{S S^c}
    let y = gauss_solve(&q_ss, &[q[0][2], q[1][2]]);
    let incoherence = y[0].abs() + y[1].abs();
    let c_min = jacobi_eigenvalues(&q_ss)[0];
    let mom = brute_moments(&model);
    let cov = others(4, r);
    let sigma: Vec<Vec<f64>> = cov.iter().map(|&u| cov.iter().map(|&v| mom[u][v]).collect()).collect();
    let d_max = *jacobi_eigenvalues(&sigma).last().unwrap();

    let fisher = population_fisher(&model, r).unwrap();
    let moments = enumerate_distribution(&model).unwrap().second_moments();
    let rep = check_assumptions(&fisher, &covariate_second_moment(&moments, r), &s, 0.5).unwrap();
    assert!((rep.c_min_hat - c_min).abs() < 1e-10);
    assert!((rep.d_max_hat - d_max).abs() < 1e-10);
    assert!((rep.incoherence.unwrap() - incoherence).abs() < 1e-10);
    assert!((rep.alpha_hat.unwrap() - (1.0 - incoherence)).abs() < 1e-10);
    assert_eq!(rep.passes_a2, incoherence <= 0.5);
}

#[test]
fn threshold_examples() {
    let t = theorem_thresholds(1.0, 1.0, 4, 64, 1000).unwrap();
    let direct = 16.0 * (64f64.ln() / 1000.0).sqrt();
    assert!((t.lambda_min - direct).abs() < 1e-9);
    assert!((t.lambda_min - 1.0319).abs() < 1e-4);
    assert!((t.weight_threshold - 20.64).abs() < 1e-2);
    assert!((t.sample_size_form - 64.0 * 64f64.ln()).abs() < 1e-9);
    let half = theorem_thresholds(1.0, 0.5, 4, 64, 1000).unwrap();
    assert!((half.lambda_min - 3.0 * direct).abs() < 1e-9);
}

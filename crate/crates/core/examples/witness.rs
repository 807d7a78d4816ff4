//! Fit one node regression and inspect its optimality certificate: the
//! subgradient off the true support and the curvature on it.
//!
//! cargo run --release --example witness -- [n] [lambda_scale] [seed]

use isingsel::fisher::{support_indices, PD_TOL};
use isingsel::graphs::{assign_couplings, covariate_vertex, make_grid4, CouplingMode};
use isingsel::harness::regularization;
use isingsel::logreg::{fit_l1_logistic, witness_check, NodeRegressionProblem, SolverOptions};
use isingsel::rng::seeded;
use isingsel::sampling::sample_exact_enum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(2000), |s| s.parse())?;
    let scale: f64 = args.get(1).map_or(Ok(1.0), |s| s.parse())?;
    let seed: u64 = args.get(2).map_or(Ok(1), |s| s.parse())?;

    let model = assign_couplings(&make_grid4(4)?, CouplingMode::Mixed, 0.5, &mut seeded(seed))?;
    let data = sample_exact_enum(&model, n, &mut seeded(seed + 1))?;
    let r = 5; // interior vertex of the 4x4 grid
    let lambda = regularization(scale, model.p(), n);
    let opts = SolverOptions { record_trace: true, ..SolverOptions::default() };
    let sol = fit_l1_logistic(&NodeRegressionProblem::new(&data, r, lambda)?, &opts)?;
    println!(
        "node {} lambda={lambda:.4} iterations={} kkt={:.2e} objective {:.6} -> {:.6}",
        r + 1,
        sol.iterations,
        sol.kkt_residual,
        sol.trace.first().copied().unwrap_or(f64::NAN),
        sol.objective
    );
    println!("{:>6} {:>9} {:>9} {:>8}", "vertex", "true", "theta", "zhat");
    let theta_true = model.theta_row(r);
    for (j, (&th, &z)) in sol.theta.iter().zip(&sol.zhat).enumerate() {
        println!("{:>6} {:>9.3} {:>9.4} {:>8.3}", covariate_vertex(r, j) + 1, theta_true[j], th, z);
    }

    let s = support_indices(&model, r);
    let signs: Vec<i8> = s.iter().map(|&j| if theta_true[j] > 0.0 { 1 } else { -1 }).collect();
    let w = witness_check(&sol, &data, &s, Some(&signs), PD_TOL)?;
    println!(
        "max |zhat| off true support = {:.4} (strict: {}), min eig of Hessian block = {:.4} (pd: {}), signs agree: {:?}",
        w.dual_sup_off_support, w.strictly_dual_feasible, w.support_hessian_min_eig, w.support_hessian_pd, w.signs_agree
    );
    Ok(())
}

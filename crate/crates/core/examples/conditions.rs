//! Dependency and incoherence diagnostics for every node of a small model,
//! plus the regularization and weight thresholds they imply.
//!
//! cargo run --release --example conditions -- [grid4|grid8|star] [omega] [n]

use isingsel::fisher::{check_assumptions, covariate_second_moment, population_fisher, support_indices, theorem_thresholds};
use isingsel::graphs::{assign_couplings, make_grid4, make_grid8, make_star, CouplingMode, StarSparsity};
use isingsel::rng::seeded;
use isingsel::sampling::enumerate_distribution;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kind = args.first().map_or("grid4", String::as_str);
    let omega: f64 = args.get(1).map_or(Ok(0.5), |s| s.parse())?;
    let n: usize = args.get(2).map_or(Ok(1000), |s| s.parse())?;

    let (topo, mode) = match kind {
        "grid4" => (make_grid4(4)?, CouplingMode::Mixed),
        "grid8" => (make_grid8(4)?, CouplingMode::Mixed),
        "star" => (make_star(12, StarSparsity::Explicit(5))?, CouplingMode::Positive),
        other => return Err(format!("unknown model {other}").into()),
    };
    let model = assign_couplings(&topo, mode, omega, &mut seeded(3))?;
    let moments = enumerate_distribution(&model)?.second_moments();

    let (mut c_min, mut alpha) = (f64::INFINITY, f64::INFINITY);
    println!("{:>4} {:>3} {:>10} {:>10} {:>12}", "node", "deg", "C_min", "D_max", "incoherence");
    for r in 0..model.p() {
        let s = support_indices(&model, r);
        if s.is_empty() {
            continue;
        }
        let q = population_fisher(&model, r)?;
        let rep = check_assumptions(&q, &covariate_second_moment(&moments, r), &s, 1e-9)?;
        let inco = rep.incoherence.unwrap_or(f64::NAN);
        println!("{:>4} {:>3} {:>10.4} {:>10.4} {:>12.4}", r + 1, s.len(), rep.c_min_hat, rep.d_max_hat, inco);
        c_min = c_min.min(rep.c_min_hat);
        alpha = alpha.min(1.0 - inco);
    }
    println!("min C_min = {c_min:.4}, alpha = {alpha:.4}");
    if alpha > 0.0 {
        let t = theorem_thresholds(c_min, alpha, topo.d(), topo.p(), n)?;
        println!("at n = {n}: {t}");
    } else {
        println!("incoherence fails somewhere (alpha <= 0); thresholds undefined");
    }
    Ok(())
}

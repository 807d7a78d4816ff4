//! Star graphs: nodewise l1 regression versus the Chow-Liu tree, scored by
//! edge disagreements with the truth.
//!
//! cargo run --release --example chow_liu_star -- [p] [d] [n] [seed]

use isingsel::baselines::chow_liu_forest;
use isingsel::graphs::{assign_couplings, make_star, signed_edges, CouplingMode, StarSparsity};
use isingsel::harness::{regularization, DEFAULT_LAMBDA_SCALE};
use isingsel::logreg::SolverOptions;
use isingsel::rng::seeded;
use isingsel::sampling::sample_exact_star;
use isingsel::selection::{edge_disagreements, estimate_graph, success, Combine};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let p: usize = args.first().map_or(Ok(64), |s| s.parse())?;
    let d: usize = args.get(1).map_or(Ok(7), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(1), |s| s.parse())?;

    let model = assign_couplings(&make_star(p, StarSparsity::Explicit(d))?, CouplingMode::Positive, 0.25, &mut seeded(seed))?;
    let truth = signed_edges(&model);
    let sizes: Vec<usize> = match args.get(2) {
        Some(s) => vec![s.parse()?],
        None => vec![250, 500, 1000, 2000, 5000, 20_000],
    };
    println!("{:>6} {:>10} {:>8} {:>8}", "n", "l1 exact", "l1 dis", "cl dis");
    for n in sizes {
        let data = sample_exact_star(&model, n, &mut seeded(seed + n as u64))?;
        let lambda = regularization(DEFAULT_LAMBDA_SCALE, p, n);
        let est = estimate_graph(&data, lambda, Combine::And, &SolverOptions::default())?;
        let l1 = edge_disagreements(est.combined.as_ref().expect("AND rule"), &truth)?;
        let cl = edge_disagreements(&chow_liu_forest(&data, d)?, &truth)?;
        println!("{n:>6} {:>10} {l1:>8} {cl:>8}", success(&est, &truth)?);
    }
    Ok(())
}

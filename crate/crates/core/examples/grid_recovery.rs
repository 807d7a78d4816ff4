//! End-to-end recovery on one grid model: sample, fit every node, score.
//!
//! cargo run --release --example grid_recovery -- [side] [beta] [lambda_scale] [seed]

use isingsel::graphs::{assign_couplings, make_grid4, signed_edges, CouplingMode};
use isingsel::harness::{regularization, sample_size, DEFAULT_LAMBDA_SCALE};
use isingsel::logreg::SolverOptions;
use isingsel::rng::seeded;
use isingsel::sampling::gibbs_sample;
use isingsel::selection::{edge_disagreements, estimate_graph, success, Combine, SignedNeighborhood};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let side: usize = args.first().map_or(Ok(8), |s| s.parse())?;
    let beta: f64 = args.get(1).map_or(Ok(2.2), |s| s.parse())?;
    let scale: f64 = args.get(2).map_or(Ok(DEFAULT_LAMBDA_SCALE), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(1), |s| s.parse())?;

    let topo = make_grid4(side)?;
    let model = assign_couplings(&topo, CouplingMode::Mixed, 0.5, &mut seeded(seed))?;
    let truth = signed_edges(&model);
    let (p, d) = (topo.p(), topo.d());
    let n = sample_size(beta, d, p);
    let lambda = regularization(scale, p, n);
    let data = gibbs_sample(&model, n, 200, 5, &mut seeded(seed + 1))?;
    println!("p={p} d={d} beta={beta} n={n} lambda={lambda:.4}");

    let est = estimate_graph(&data, lambda, Combine::And, &SolverOptions::default())?;
    let mut wrong = 0;
    for (nb, sol) in est.per_node.iter().zip(&est.solutions) {
        let want = SignedNeighborhood::from_edges(&truth, nb.r);
        if *nb != want {
            wrong += 1;
            let extra: Vec<_> = nb.members.iter().filter(|(t, s)| want.members.get(t) != Some(s)).collect();
            let missing: Vec<_> = want.members.iter().filter(|(t, s)| nb.members.get(t) != Some(s)).collect();
            println!(
                "node {:>3}: spurious/wrong-sign {:?} missing {:?} (iters {}, kkt {:.1e})",
                nb.r, extra, missing, sol.iterations, sol.kkt_residual
            );
        }
    }
    let combined = est.combined.as_ref().expect("AND rule");
    println!(
        "nodes wrong: {wrong}/{p}; success={}; AND disagreements={}",
        success(&est, &truth)?,
        edge_disagreements(combined, &truth)?
    );
    Ok(())
}

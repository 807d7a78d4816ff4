//! How fast the sample Fisher block concentrates around the population one.
//!
//! cargo run --release --example concentration -- [omega] [reps] [seed]

use isingsel::fisher::concentration_probe;
use isingsel::graphs::{assign_couplings, make_grid4, CouplingMode};
use isingsel::rng::seeded;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let omega: f64 = args.first().map_or(Ok(0.25), |s| s.parse())?;
    let reps: usize = args.get(1).map_or(Ok(20), |s| s.parse())?;
    let seed: u64 = args.get(2).map_or(Ok(9), |s| s.parse())?;

    // 3x3 grid, centre vertex has the full degree 4
    let model = assign_couplings(&make_grid4(3)?, CouplingMode::Positive, omega, &mut seeded(1))?;
    let grid = [1000, 2000, 4000, 8000, 16000, 32000];
    let rows = concentration_probe(&model, 4, &grid, reps, seed)?;
    println!("{:>6} {:>12} {:>12} {:>12} {:>10}", "n", "|dQ_SS|_2", "|dmin_eig|", "incoherence", "sqrt(n)*dev");
    for row in &rows {
        println!(
            "{:>6} {:>12.4e} {:>12.4e} {:>12.4} {:>10.3}",
            row.n,
            row.block_deviation.median,
            row.min_eig_deviation.median,
            row.sample_incoherence.median,
            (row.n as f64).sqrt() * row.block_deviation.median
        );
    }
    Ok(())
}

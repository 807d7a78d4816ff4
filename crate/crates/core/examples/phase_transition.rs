//! Success probability versus the control parameter beta on a grid.
//!
//! cargo run --release --example phase_transition -- [grid4|grid8|star_linear|star_log] [lambda_scale] [trials]

use std::time::Instant;

use isingsel::harness::{run_sweep, ExperimentConfig, GraphClass};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let class = match args.first().map(String::as_str).unwrap_or("grid4") {
        "grid4" => GraphClass::Grid4,
        "grid8" => GraphClass::Grid8,
        "star_linear" => GraphClass::StarLinear,
        "star_log" => GraphClass::StarLog,
        other => return Err(format!("unknown graph class {other}").into()),
    };
    let mut cfg = ExperimentConfig::desk_default(class);
    if let Some(c) = args.get(1) {
        cfg.lambda_scale = c.parse()?;
    }
    if let Some(t) = args.get(2) {
        cfg.trials = t.parse()?;
    }

    let start = Instant::now();
    let sweep = run_sweep(&cfg, 0)?;
    println!("{:?}, lambda_scale={}, {} trials/cell", class, cfg.lambda_scale, cfg.trials);
    print!("{:>6}", "beta");
    for p in &cfg.p_list {
        print!("  p={p:<6}");
    }
    println!();
    for &beta in &cfg.beta_grid {
        print!("{beta:>6.2}");
        for &p in &cfg.p_list {
            let c = sweep.cell(p, beta).expect("cell present");
            print!("  {:<8.3}", c.success_rate);
        }
        println!();
    }
    let nonconv: usize = sweep.cells.iter().map(|c| c.nonconverged).sum();
    println!("non-converged solves: {nonconv}; elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}

//! Pairwise moments from the Gibbs and exact samplers next to the exact
//! values from enumeration.
//!
//! cargo run --release --example samplers -- [n] [seed]

use isingsel::graphs::{assign_couplings, make_grid4, make_star, CouplingMode, IsingModel, StarSparsity};
use isingsel::rng::seeded;
use isingsel::sampling::{enumerate_distribution, gibbs_sample, sample_exact_enum, sample_exact_star, SampleMatrix};

fn max_error(data: &SampleMatrix, model: &IsingModel) -> Result<f64, isingsel::Error> {
    let want = enumerate_distribution(model)?.second_moments();
    Ok((data.second_moments() - want).amax())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(50_000), |s| s.parse())?;
    let seed: u64 = args.get(1).map_or(Ok(1), |s| s.parse())?;

    let grid = assign_couplings(&make_grid4(3)?, CouplingMode::Mixed, 0.5, &mut seeded(seed))?;
    let star = assign_couplings(&make_star(8, StarSparsity::Explicit(7))?, CouplingMode::Positive, 0.5, &mut seeded(seed))?;

    println!("max |empirical - exact| over all pairwise moments, n = {n}");
    let g = gibbs_sample(&grid, n, 200, 5, &mut seeded(seed + 1))?;
    println!("grid 3x3 mixed 0.5   gibbs       {:.4}", max_error(&g, &grid)?);
    let e = sample_exact_enum(&grid, n, &mut seeded(seed + 2))?;
    println!("grid 3x3 mixed 0.5   enumeration {:.4}", max_error(&e, &grid)?);
    let s = sample_exact_star(&star, n, &mut seeded(seed + 3))?;
    println!("star p=8 positive    exact star  {:.4}", max_error(&s, &star)?);
    let g = gibbs_sample(&star, n, 200, 5, &mut seeded(seed + 4))?;
    println!("star p=8 positive    gibbs       {:.4}", max_error(&g, &star)?);
    println!("(sampling noise is about 1/sqrt(n) = {:.4})", 1.0 / (n as f64).sqrt());
    Ok(())
}

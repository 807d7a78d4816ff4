use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use isingsel::fisher::{
    check_assumptions, covariate_second_moment, population_fisher, sample_fisher, support_indices,
    theorem_thresholds, FisherMatrix,
};
use isingsel::graphs::read_model;
use isingsel::harness::{beta_index, results_csv, run_sweep, run_trial, write_sweep, ExperimentConfig, SweepResult};
use isingsel::rng::seeded;
use isingsel::sampling::{enumerate_distribution, gibbs_sample, ENUMERATION_CAP};
use isingsel::Error;

#[derive(Parser)]
#[command(name = "isingsel", version, about = "Ising graph selection experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every (p, beta, trial) cell of a config and write results.csv / aggregate.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Override base_seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a single cell and print its result row.
    Trial {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        trial: usize,
    },
    /// Print dependency/incoherence diagnostics and threshold values for a model file.
    CheckConditions {
        #[arg(long)]
        model: PathBuf,
        /// Sample size used for the threshold calculation.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 1e-9)]
        alpha_required: f64,
        /// Estimate moments from this many Gibbs samples instead of enumerating.
        #[arg(long)]
        mc_samples: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Sweep { config, out, jobs, seed } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.base_seed = s;
            }
            let sweep = run_sweep(&cfg, jobs)?;
            let (res, agg) = write_sweep(&sweep, &out)?;
            for c in &sweep.cells {
                println!(
                    "p={:<4} beta={:<5} n={:<6} success={:.3} nonconverged={} failures={}",
                    c.p, c.beta, c.n, c.success_rate, c.nonconverged, c.failures
                );
            }
            println!("wrote {} and {}", res.display(), agg.display());
        }
        Cmd::Trial { config, p, beta, trial } => {
            let cfg = ExperimentConfig::load(&config)?;
            let bi = beta_index(&cfg, beta)?;
            let r = run_trial(&cfg, p, bi, trial)?;
            let table = results_csv(&SweepResult {
                trials: vec![r.clone()],
                cells: vec![],
            });
            print!("{table}");
            if let Some(e) = &r.error {
                eprintln!("trial error: {e}");
            }
        }
        Cmd::CheckConditions {
            model,
            n,
            alpha_required,
            mc_samples,
            seed,
        } => {
            let model = read_model(BufReader::new(File::open(&model)?)).map_err(|e| e.with_path(&model))?;
            let p = model.p();
            let (fishers, moments): (Vec<FisherMatrix>, _) = match mc_samples {
                None if p <= ENUMERATION_CAP => {
                    let moments = enumerate_distribution(&model)?.second_moments();
                    ((0..p).map(|r| population_fisher(&model, r)).collect::<Result<_, _>>()?, moments)
                }
                None => {
                    return Err(Error::ResourceLimit(format!(
                        "p={p} exceeds the enumeration cap of {ENUMERATION_CAP}; pass --mc-samples N"
                    )))
                }
                Some(m) => {
                    let data = gibbs_sample(&model, m, 200, 5, &mut seeded(seed))?;
                    let fishers = (0..p)
                        .map(|r| sample_fisher(&data, &model.theta_row(r), r))
                        .collect::<Result<_, _>>()?;
                    (fishers, data.second_moments())
                }
            };
            let mut c_min = f64::INFINITY;
            let mut alpha = f64::INFINITY;
            for (r, q) in fishers.iter().enumerate() {
                let support = support_indices(&model, r);
                if support.is_empty() {
                    println!("node={} isolated", r + 1);
                    continue;
                }
                let rep = check_assumptions(q, &covariate_second_moment(&moments, r), &support, alpha_required)?;
                c_min = c_min.min(rep.c_min_hat);
                alpha = alpha.min(rep.alpha_hat.unwrap_or(f64::NEG_INFINITY));
                println!("node={} {rep}", r + 1);
            }
            if c_min.is_finite() && alpha > 0.0 && alpha <= 1.0 && c_min > 0.0 {
                let t = theorem_thresholds(c_min, alpha, model.topology().d(), p, n)?;
                println!("n={n} c_min={c_min:.10e} alpha={alpha:.10e} {t}");
            } else {
                println!("thresholds=undefined c_min={c_min:.10e} alpha={alpha:.10e}");
            }
        }
    }
    Ok(())
}

//! Signed edge recovery for binary Ising Markov random fields.
//!
//! Each vertex `r` is regressed on all other vertices with an
//! ℓ1-penalized logistic loss; the sign-sparsity pattern of the fitted
//! coefficients estimates the signed neighborhood of `r`. Around that core
//! the crate provides ground-truth model generators, exact and Gibbs
//! samplers, Fisher-information diagnostics for the dependency and
//! incoherence conditions, a Chow–Liu forest baseline, and a seeded
//! experiment harness that sweeps the rescaled sample size
//! `beta = n / (10 d ln p)`.
//!
//! Vertices are 0-based everywhere in the API. The text formats written by
//! [`graphs::write_model`] and friends use 1-based indices.
//!
//! ```
//! use isingsel::graphs::{make_grid4, assign_couplings, signed_edges, CouplingMode};
//! use isingsel::sampling::gibbs_sample;
//! use isingsel::selection::{estimate_graph, success, Combine};
//! use isingsel::logreg::SolverOptions;
//! use isingsel::rng::seeded;
//! use isingsel::harness::{regularization, DEFAULT_LAMBDA_SCALE};
//!
//! let topo = make_grid4(3).unwrap();
//! let model = assign_couplings(&topo, CouplingMode::Mixed, 0.25, &mut seeded(1)).unwrap();
//! let data = gibbs_sample(&model, 4000, 200, 5, &mut seeded(2)).unwrap();
//! let lambda = regularization(DEFAULT_LAMBDA_SCALE, 9, 4000);
//! let est = estimate_graph(&data, lambda, Combine::And, &SolverOptions::default()).unwrap();
//! assert!(success(&est, &signed_edges(&model)).unwrap());
//! ```

pub mod baselines;
pub mod error;
pub mod fisher;
pub mod graphs;
pub mod harness;
pub mod logreg;
pub mod rng;
pub mod sampling;
pub mod selection;

pub use error::{Error, Result};

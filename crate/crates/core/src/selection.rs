//! From per-node regressions to signed neighborhoods and a graph estimate.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{covariate_index, covariate_vertex, write_signed_edges, SignedEdgeSet};
use crate::logreg::{fit_l1_logistic, NodeRegressionProblem, RegressionSolution, SolverOptions};
use crate::sampling::SampleMatrix;

/// `N±(r)`: neighbors of `r` tagged with the sign of their coupling.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignedNeighborhood {
    pub r: usize,
    pub members: BTreeMap<usize, i8>,
}

impl SignedNeighborhood {
    /// Neighborhood of `r` read off a signed edge set.
    pub fn from_edges(edges: &SignedEdgeSet, r: usize) -> Self {
        let members = (0..edges.p())
            .filter(|&t| t != r)
            .filter_map(|t| match edges.get(r, t) {
                0 => None,
                s => Some((t, s)),
            })
            .collect();
        SignedNeighborhood { r, members }
    }
}

/// Nonzero coefficients of `theta_hat` (covariate order for node `r`) and
/// their signs.
pub fn signed_neighborhood(theta_hat: &[f64], r: usize) -> SignedNeighborhood {
    let members = theta_hat
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(j, v)| (covariate_vertex(r, j), if *v > 0.0 { 1 } else { -1 }))
        .collect();
    SignedNeighborhood { r, members }
}

/// How per-node neighborhoods are merged into one edge set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Combine {
    /// Edge kept iff both endpoints claim it with the same sign.
    #[default]
    And,
    /// Edge kept iff either endpoint claims it; on conflicting signs the
    /// larger |θ̂| wins, exact ties go to the lower-index endpoint.
    Or,
    /// No merge; only the per-node neighborhoods are reported.
    Nodewise,
}

#[derive(Debug, Clone)]
pub struct GraphEstimate {
    pub p: usize,
    pub per_node: Vec<SignedNeighborhood>,
    /// `None` for [`Combine::Nodewise`].
    pub combined: Option<SignedEdgeSet>,
    pub rule: Combine,
    pub solutions: Vec<RegressionSolution>,
    /// False when any node regression failed to converge.
    pub reliable: bool,
}

/// Merge per-node coefficient vectors (`thetas[r]` in covariate order for `r`).
pub fn combine(thetas: &[Vec<f64>], rule: Combine) -> Option<SignedEdgeSet> {
    let p = thetas.len();
    if rule == Combine::Nodewise {
        return None;
    }
    let mut out = SignedEdgeSet::new(p);
    for s in 0..p {
        for t in s + 1..p {
            let a = thetas[s][covariate_index(s, t)];
            let b = thetas[t][covariate_index(t, s)];
            let sign = match rule {
                Combine::And if a != 0.0 && b != 0.0 && a.signum() == b.signum() => a.signum(),
                Combine::Or if a != 0.0 || b != 0.0 => {
                    if b.abs() > a.abs() {
                        b.signum()
                    } else {
                        a.signum()
                    }
                }
                _ => 0.0,
            };
            out.set(s, t, sign as i8).expect("valid pair");
        }
    }
    Some(out)
}

/// Fit every node regression (in parallel) and merge the neighborhoods.
pub fn estimate_graph(data: &SampleMatrix, lambda: f64, rule: Combine, opts: &SolverOptions) -> Result<GraphEstimate> {
    let p = data.p();
    if p < 2 {
        return Err(Error::invalid("need at least two variables"));
    }
    let solutions: Vec<RegressionSolution> = (0..p)
        .into_par_iter()
        .map(|r| fit_l1_logistic(&NodeRegressionProblem::new(data, r, lambda)?, opts))
        .collect::<Result<_>>()?;
    Ok(assemble(solutions, rule))
}

/// Build a [`GraphEstimate`] from one solution per node, ordered by node.
pub fn assemble(solutions: Vec<RegressionSolution>, rule: Combine) -> GraphEstimate {
    let p = solutions.len();
    let per_node = solutions
        .iter()
        .map(|s| signed_neighborhood(&s.theta, s.r))
        .collect();
    let thetas: Vec<Vec<f64>> = solutions.iter().map(|s| s.theta.clone()).collect();
    GraphEstimate {
        p,
        per_node,
        combined: combine(&thetas, rule),
        rule,
        reliable: solutions.iter().all(|s| s.converged),
        solutions,
    }
}

/// Every per-node signed neighborhood equals the true one.
pub fn success(estimate: &GraphEstimate, truth: &SignedEdgeSet) -> Result<bool> {
    if estimate.p != truth.p() || estimate.per_node.len() != truth.p() {
        return Err(Error::invalid(format!(
            "estimate has p={}, truth has p={}",
            estimate.p,
            truth.p()
        )));
    }
    Ok(estimate
        .per_node
        .iter()
        .all(|nb| *nb == SignedNeighborhood::from_edges(truth, nb.r)))
}

/// Number of vertex pairs whose signed values differ.
pub fn edge_disagreements(estimate: &SignedEdgeSet, truth: &SignedEdgeSet) -> Result<usize> {
    if estimate.p() != truth.p() {
        return Err(Error::invalid(format!("p mismatch: {} vs {}", estimate.p(), truth.p())));
    }
    let mut count = estimate
        .iter()
        .filter(|&((s, t), v)| truth.get(s, t) != v)
        .count();
    count += truth.iter().filter(|&((s, t), _)| estimate.get(s, t) == 0).count();
    Ok(count)
}

/// Combined edges in the signed edge format, followed by one
/// `node <r>: <t>:<sign> ...` line per vertex (1-based).
pub fn write_estimate<W: Write>(est: &GraphEstimate, mut out: W) -> Result<()> {
    match &est.combined {
        Some(c) => write_signed_edges(c, &mut out)?,
        None => writeln!(out, "p {}", est.p)?,
    }
    for nb in &est.per_node {
        write!(out, "node {}:", nb.r + 1)?;
        for (t, s) in &nb.members {
            write!(out, " {}:{}", t + 1, if *s > 0 { "+1" } else { "-1" })?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: usize, items: &[(usize, usize, i8)]) -> SignedEdgeSet {
        let mut s = SignedEdgeSet::new(p);
        for &(a, b, v) in items {
            s.set(a, b, v).unwrap();
        }
        s
    }

    #[test]
    fn neighborhood_from_theta() {
        let nb = signed_neighborhood(&[0.3, 0.0, -0.2], 0);
        assert_eq!(nb.members, BTreeMap::from([(1, 1), (3, -1)]));
        assert!(signed_neighborhood(&[0.0; 3], 2).members.is_empty());
    }

    #[test]
    fn and_vs_or() {
        // node 0 claims (0,1) positive; node 1 claims nothing
        let thetas = vec![vec![0.4, 0.0], vec![0.0, 0.0], vec![0.0, 0.0]];
        let and = combine(&thetas, Combine::And).unwrap();
        let or = combine(&thetas, Combine::Or).unwrap();
        assert!(and.is_empty());
        assert_eq!(or.get(0, 1), 1);
        // agreement: AND equals OR
        let thetas = vec![vec![0.4, 0.0], vec![0.2, 0.0], vec![0.0, 0.0]];
        assert_eq!(combine(&thetas, Combine::And), combine(&thetas, Combine::Or));
        assert_eq!(combine(&thetas, Combine::Nodewise), None);
    }

    #[test]
    fn or_conflicts() {
        let thetas = vec![vec![0.3, 0.0], vec![-0.5, 0.0], vec![0.0, 0.0]];
        assert_eq!(combine(&thetas, Combine::Or).unwrap().get(0, 1), -1);
        assert!(combine(&thetas, Combine::And).unwrap().is_empty());
        let tie = vec![vec![0.3, 0.0], vec![-0.3, 0.0], vec![0.0, 0.0]];
        assert_eq!(combine(&tie, Combine::Or).unwrap().get(0, 1), 1);
    }

    #[test]
    fn success_and_disagreement() {
        let truth = set(3, &[(0, 1, 1), (1, 2, -1)]);
        let est = assemble(
            vec![sol(0, vec![0.5, 0.0]), sol(1, vec![0.5, -0.4]), sol(2, vec![0.0, -0.3])],
            Combine::And,
        );
        assert!(success(&est, &truth).unwrap());
        assert_eq!(edge_disagreements(est.combined.as_ref().unwrap(), &truth).unwrap(), 0);

        let est = assemble(
            vec![sol(0, vec![0.5, 0.0]), sol(1, vec![0.5, 0.0]), sol(2, vec![0.0, -0.3])],
            Combine::And,
        );
        assert!(!success(&est, &truth).unwrap());
        assert!(success(&est, &set(4, &[])).is_err());
    }

    fn sol(r: usize, theta: Vec<f64>) -> RegressionSolution {
        RegressionSolution {
            r,
            lambda: 0.1,
            zhat: vec![0.0; theta.len()],
            theta,
            intercept: None,
            kkt_residual: 0.0,
            objective: 0.0,
            iterations: 0,
            converged: true,
            capped: false,
            trace: vec![],
        }
    }

    #[test]
    fn disagreement_examples() {
        let truth = set(3, &[(0, 1, 1)]);
        assert_eq!(edge_disagreements(&truth, &truth).unwrap(), 0);
        assert_eq!(edge_disagreements(&set(3, &[]), &truth).unwrap(), 1);
        let est = set(3, &[(0, 1, -1), (0, 2, 1)]);
        assert_eq!(edge_disagreements(&est, &truth).unwrap(), 2);
        assert_eq!(edge_disagreements(&truth, &est).unwrap(), 2);
        assert!(edge_disagreements(&set(4, &[]), &truth).is_err());
    }

    #[test]
    fn estimate_text() {
        let est = assemble(vec![sol(0, vec![0.5]), sol(1, vec![0.5])], Combine::And);
        let mut buf = Vec::new();
        write_estimate(&est, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "p 2\n1 2 1\nnode 1: 2:+1\nnode 2: 1:+1\n");
    }
}

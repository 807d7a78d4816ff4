//! Chow–Liu maximum-weight forest over empirical mutual information.

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::SignedEdgeSet;
use crate::sampling::SampleMatrix;

/// Plug-in mutual information (nats) of the 2×2 empirical joint of columns
/// `s` and `t`.
pub fn empirical_mutual_information(data: &SampleMatrix, s: usize, t: usize) -> Result<f64> {
    if s == t {
        return Err(Error::invalid("mutual information needs two distinct variables"));
    }
    if s >= data.p() || t >= data.p() {
        return Err(Error::invalid(format!("vertex out of range for p={}", data.p())));
    }
    // counts[a][b] with index 1 for +1
    let mut counts = [[0usize; 2]; 2];
    for row in data.rows() {
        counts[usize::from(row[s] > 0)][usize::from(row[t] > 0)] += 1;
    }
    Ok(mi_from_counts(&counts, data.n()))
}

fn mi_from_counts(counts: &[[usize; 2]; 2], n: usize) -> f64 {
    let n = n as f64;
    let row = [counts[0][0] + counts[0][1], counts[1][0] + counts[1][1]];
    let col = [counts[0][0] + counts[1][0], counts[0][1] + counts[1][1]];
    let mut mi = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let c = counts[a][b];
            if c == 0 {
                continue;
            }
            let c = c as f64;
            mi += c / n * (c * n / (row[a] as f64 * col[b] as f64)).ln();
        }
    }
    mi.max(0.0)
}

/// Mutual information of every unordered pair.
#[derive(Debug, Clone)]
pub struct MIWeights {
    p: usize,
    // upper triangle, row-major over s < t
    weights: Vec<f64>,
}

impl MIWeights {
    pub fn from_data(data: &SampleMatrix) -> Self {
        let p = data.p();
        let pairs: Vec<(usize, usize)> = (0..p).flat_map(|s| (s + 1..p).map(move |t| (s, t))).collect();
        let weights = pairs
            .par_iter()
            .map(|&(s, t)| empirical_mutual_information(data, s, t).expect("distinct in-range pair"))
            .collect();
        MIWeights { p, weights }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    fn offset(&self, s: usize, t: usize) -> usize {
        let (s, t) = (s.min(t), s.max(t));
        s * self.p - s * (s + 1) / 2 + (t - s - 1)
    }

    pub fn get(&self, s: usize, t: usize) -> f64 {
        if s == t {
            return 0.0;
        }
        self.weights[self.offset(s, t)]
    }

    /// `((s, t), weight)` for all pairs with `s < t`.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        (0..self.p)
            .flat_map(move |s| (s + 1..self.p).map(move |t| (s, t)))
            .zip(self.weights.iter().copied())
    }
}

/// Greedy maximum-weight forest with at most `k` edges (Kruskal order: MI
/// descending, ties broken by lexicographic pair). Each chosen edge is
/// signed by the empirical correlation of its endpoints (zero counts as +).
pub fn chow_liu_forest(data: &SampleMatrix, k: usize) -> Result<SignedEdgeSet> {
    let p = data.p();
    if k + 1 > p {
        return Err(Error::invalid(format!("a forest on {p} vertices has at most {} edges, asked for {k}", p - 1)));
    }
    let weights = MIWeights::from_data(data);
    let mut pairs: Vec<((usize, usize), f64)> = weights.iter().collect();
    pairs.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut sets = UnionFind::<usize>::new(p);
    let mut out = SignedEdgeSet::new(p);
    for ((s, t), _) in pairs {
        if out.len() == k {
            break;
        }
        if sets.union(s, t) {
            let corr: i64 = data.rows().map(|r| i64::from(r[s] * r[t])).sum();
            out.set(s, t, if corr < 0 { -1 } else { 1 })?;
        }
    }
    Ok(out)
}

/// True when the edge set contains no cycle.
pub fn is_forest(edges: &SignedEdgeSet) -> bool {
    let mut sets = UnionFind::<usize>::new(edges.p());
    edges.pairs().all(|(s, t)| sets.union(s, t))
}

//! Ground-truth graph topologies and Ising couplings.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Undirected simple graph on vertices `0..p`.
///
/// Edges are stored as `(s, t)` with `s < t`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    p: usize,
    edges: Vec<(usize, usize)>,
    d: usize,
}

impl Topology {
    /// Build from an arbitrary edge list. Pairs are normalized to `s < t`;
    /// self-loops, duplicates and out-of-range vertices are rejected.
    pub fn new(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if p < 2 {
            return Err(Error::invalid(format!("need at least 2 vertices, got {p}")));
        }
        let mut norm: Vec<(usize, usize)> = Vec::new();
        for (s, t) in edges {
            if s == t {
                return Err(Error::invalid(format!("self-loop at vertex {s}")));
            }
            if s >= p || t >= p {
                return Err(Error::invalid(format!("edge ({s},{t}) out of range for p={p}")));
            }
            norm.push((s.min(t), s.max(t)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate edge {:?}", w[0])));
        }
        let mut deg = vec![0usize; p];
        for &(s, t) in &norm {
            deg[s] += 1;
            deg[t] += 1;
        }
        let d = deg.into_iter().max().unwrap_or(0);
        Ok(Topology { p, edges: norm, d })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Maximum vertex degree.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.p];
        for &(s, t) in &self.edges {
            deg[s] += 1;
            deg[t] += 1;
        }
        deg
    }

    /// Sorted neighbor lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.p];
        for &(s, t) in &self.edges {
            adj[s].push(t);
            adj[t].push(s);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// If every edge touches one common vertex, return that hub.
    ///
    /// An edgeless graph reports hub 0; a single edge reports its lower endpoint.
    pub fn star_hub(&self) -> Option<usize> {
        let Some(&(s0, t0)) = self.edges.first() else {
            return Some(0);
        };
        [s0, t0]
            .into_iter()
            .find(|&h| self.edges.iter().all(|&(s, t)| s == h || t == h))
    }
}

/// Four-nearest-neighbor lattice on a `side × side` grid with free boundary.
/// Vertex `(row, col)` has index `row * side + col`.
pub fn make_grid4(side: usize) -> Result<Topology> {
    if side < 2 {
        return Err(Error::invalid(format!("grid4 needs side >= 2, got {side}")));
    }
    lattice(side, &[(0, 1), (1, 0)])
}

/// Eight-nearest-neighbor lattice (rook plus bishop moves), free boundary.
pub fn make_grid8(side: usize) -> Result<Topology> {
    if side < 3 {
        return Err(Error::invalid(format!("grid8 needs side >= 3, got {side}")));
    }
    lattice(side, &[(0, 1), (1, 0), (1, 1), (1, -1)])
}

fn lattice(side: usize, offsets: &[(isize, isize)]) -> Result<Topology> {
    let idx = |r: usize, c: usize| r * side + c;
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            for &(dr, dc) in offsets {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr >= 0 && nc >= 0 && (nr as usize) < side && (nc as usize) < side {
                    edges.push((idx(r, c), idx(nr as usize, nc as usize)));
                }
            }
        }
    }
    Topology::new(side * side, edges)
}

/// Degree rule for the star graph hub.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StarSparsity {
    /// `d = ceil(0.1 p)`
    Linear,
    /// `d = ceil(log_base(p))`; see [`StarSparsity::natural_log`].
    Log(f64),
    Explicit(usize),
}

impl StarSparsity {
    pub fn natural_log() -> Self {
        StarSparsity::Log(std::f64::consts::E)
    }

    pub fn degree(&self, p: usize) -> usize {
        match *self {
            // 0.1 is not exact in binary; p/10 rounded up is.
            StarSparsity::Linear => p.div_ceil(10),
            StarSparsity::Log(base) => ((p as f64).ln() / base.ln()).ceil() as usize,
            StarSparsity::Explicit(k) => k,
        }
    }
}

/// Star graph: vertex 0 is the hub, joined to leaves `1..=d`.
pub fn make_star(p: usize, sparsity: StarSparsity) -> Result<Topology> {
    let d = sparsity.degree(p);
    if d < 1 || d + 1 > p {
        return Err(Error::invalid(format!("star degree {d} out of range for p={p}")));
    }
    Topology::new(p, (1..=d).map(|t| (0, t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// Each edge independently `+omega` or `-omega` with probability 1/2.
    Mixed,
    /// Every edge `+omega`.
    Positive,
}

/// Pairwise Ising model `P(x) ∝ exp(Σ_(s,t)∈E θ_st x_s x_t)` with no node potentials.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    topology: Topology,
    weights: Vec<f64>,
    // neighbors[r] = (t, θ_rt), sorted by t
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl IsingModel {
    /// `weights[k]` is the coupling of `topology.edges()[k]`; all must be
    /// finite and nonzero.
    pub fn new(topology: Topology, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != topology.edges().len() {
            return Err(Error::invalid(format!(
                "{} weights for {} edges",
                weights.len(),
                topology.edges().len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w == 0.0) {
            return Err(Error::invalid(format!("edge weight must be finite and nonzero, got {w}")));
        }
        let mut neighbors = vec![Vec::new(); topology.p()];
        for (&(s, t), &w) in topology.edges().iter().zip(&weights) {
            neighbors[s].push((t, w));
            neighbors[t].push((s, w));
        }
        for n in &mut neighbors {
            n.sort_unstable_by_key(|&(t, _)| t);
        }
        Ok(IsingModel {
            topology,
            weights,
            neighbors,
        })
    }

    /// Build from `(s, t, θ_st)` triples.
    pub fn from_edges(p: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut triples: Vec<(usize, usize, f64)> = edges
            .into_iter()
            .map(|(s, t, w)| (s.min(t), s.max(t), w))
            .collect();
        triples.sort_by_key(|&(s, t, _)| (s, t));
        let topo = Topology::new(p, triples.iter().map(|&(s, t, _)| (s, t)))?;
        IsingModel::new(topo, triples.into_iter().map(|(_, _, w)| w).collect())
    }

    pub fn p(&self) -> usize {
        self.topology.p()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(s, t, θ_st)` for every edge.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.topology
            .edges()
            .iter()
            .zip(&self.weights)
            .map(|(&(s, t), &w)| (s, t, w))
    }

    pub fn neighbors(&self, r: usize) -> &[(usize, f64)] {
        &self.neighbors[r]
    }

    pub fn coupling(&self, s: usize, t: usize) -> f64 {
        self.neighbors[s]
            .binary_search_by_key(&t, |&(u, _)| u)
            .map(|k| self.neighbors[s][k].1)
            .unwrap_or(0.0)
    }

    /// `min |θ_st|` over edges; `None` for an edgeless model.
    pub fn theta_min(&self) -> Option<f64> {
        self.weights.iter().map(|w| w.abs()).min_by(f64::total_cmp)
    }

    /// `Σ_(s,t)∈E θ_st x_s x_t`.
    pub fn energy(&self, x: &[i8]) -> f64 {
        self.edges()
            .map(|(s, t, w)| w * f64::from(x[s] * x[t]))
            .sum()
    }

    /// `Σ_t θ_rt x_t`, the local field at `r`.
    pub fn local_field(&self, r: usize, x: &[i8]) -> f64 {
        self.neighbors[r]
            .iter()
            .map(|&(t, w)| w * f64::from(x[t]))
            .sum()
    }

    /// The true coefficient vector `θ*_{\r}` in covariate order
    /// (see [`covariate_vertex`]).
    pub fn theta_row(&self, r: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.p() - 1];
        for &(t, w) in &self.neighbors[r] {
            row[covariate_index(r, t)] = w;
        }
        row
    }
}

/// Vertex that covariate `j` of the node-`r` regression refers to.
/// Covariates are the vertices other than `r` in increasing order.
#[inline]
pub fn covariate_vertex(r: usize, j: usize) -> usize {
    if j < r {
        j
    } else {
        j + 1
    }
}

/// Inverse of [`covariate_vertex`]. `t` must differ from `r`.
#[inline]
pub fn covariate_index(r: usize, t: usize) -> usize {
    debug_assert_ne!(r, t);
    if t < r {
        t
    } else {
        t - 1
    }
}

/// Attach couplings of magnitude `omega` to every edge.
pub fn assign_couplings(topology: &Topology, mode: CouplingMode, omega: f64, rng: &mut Rng) -> Result<IsingModel> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid(format!("omega must be positive, got {omega}")));
    }
    let weights = topology
        .edges()
        .iter()
        .map(|_| match mode {
            CouplingMode::Positive => omega,
            CouplingMode::Mixed => {
                if rng.random_bool(0.5) {
                    omega
                } else {
                    -omega
                }
            }
        })
        .collect();
    IsingModel::new(topology.clone(), weights)
}

/// Signed edge vector: each vertex pair maps to -1, 0 or +1. Only nonzero
/// entries are stored, keyed by `(s, t)` with `s < t`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SignedEdgeSet {
    p: usize,
    signs: BTreeMap<(usize, usize), i8>,
}

impl SignedEdgeSet {
    pub fn new(p: usize) -> Self {
        SignedEdgeSet {
            p,
            signs: BTreeMap::new(),
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Set the sign of pair `{s, t}`; a zero sign removes it.
    pub fn set(&mut self, s: usize, t: usize, sign: i8) -> Result<()> {
        if s == t || s >= self.p || t >= self.p {
            return Err(Error::invalid(format!("bad pair ({s},{t}) for p={}", self.p)));
        }
        if !matches!(sign, -1..=1) {
            return Err(Error::invalid(format!("sign must be -1, 0 or 1, got {sign}")));
        }
        let key = (s.min(t), s.max(t));
        if sign == 0 {
            self.signs.remove(&key);
        } else {
            self.signs.insert(key, sign);
        }
        Ok(())
    }

    pub fn get(&self, s: usize, t: usize) -> i8 {
        self.signs.get(&(s.min(t), s.max(t))).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), i8)> + '_ {
        self.signs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.signs.keys().copied()
    }

    /// Sign-blind copy (all stored signs become +1).
    pub fn unsigned(&self) -> SignedEdgeSet {
        SignedEdgeSet {
            p: self.p,
            signs: self.signs.keys().map(|&k| (k, 1)).collect(),
        }
    }
}

/// `E*`: the sign of every edge coupling.
pub fn signed_edges(model: &IsingModel) -> SignedEdgeSet {
    SignedEdgeSet {
        p: model.p(),
        signs: model
            .edges()
            .map(|(s, t, w)| ((s, t), if w > 0.0 { 1 } else { -1 }))
            .collect(),
    }
}

/// Write a model as `p <p> d <d>` followed by `s t weight` lines (1-based).
pub fn write_model<W: Write>(model: &IsingModel, mut out: W) -> Result<()> {
    writeln!(out, "p {} d {}", model.p(), model.topology().d())?;
    for (s, t, w) in model.edges() {
        writeln!(out, "{} {} {:.16e}", s + 1, t + 1, w)?;
    }
    Ok(())
}

pub fn model_to_string(model: &IsingModel) -> String {
    let mut buf = Vec::new();
    write_model(model, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

/// Parse the format produced by [`write_model`]. Blank lines and `#`
/// comments are ignored. The stored `d` must match the edge list.
pub fn read_model<R: BufRead>(input: R) -> Result<IsingModel> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match header {
            None => {
                if tok.len() != 4 || tok[0] != "p" || tok[2] != "d" {
                    return Err(Error::parse(lineno, "expected header `p <p> d <d>`"));
                }
                let p = parse_num(tok[1], lineno)?;
                let d = parse_num(tok[3], lineno)?;
                header = Some((p, d));
            }
            Some(_) => {
                if tok.len() != 3 {
                    return Err(Error::parse(lineno, "expected `s t weight`"));
                }
                let s: usize = parse_num(tok[0], lineno)?;
                let t: usize = parse_num(tok[1], lineno)?;
                let w: f64 = parse_num(tok[2], lineno)?;
                if s == 0 || t == 0 {
                    return Err(Error::parse(lineno, "vertex indices are 1-based"));
                }
                let p = header.map_or(0, |h| h.0);
                if s > p || t > p {
                    return Err(Error::parse(lineno, format!("edge ({s},{t}) out of range for p={p}")));
                }
                if s == t {
                    return Err(Error::parse(lineno, format!("self-loop at vertex {s}")));
                }
                edges.push((s - 1, t - 1, w));
            }
        }
    }
    let (p, d) = header.ok_or_else(|| Error::parse(0, "empty model file"))?;
    let model = IsingModel::from_edges(p, edges).map_err(|e| Error::parse(0, e.to_string()))?;
    if model.topology().d() != d {
        return Err(Error::parse(
            1,
            format!("header says d={d} but edges give max degree {}", model.topology().d()),
        ));
    }
    Ok(model)
}

pub(crate) fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("cannot parse `{tok}`")))
}

/// Write a signed edge set as `p <p>` followed by `s t sign` lines (1-based).
pub fn write_signed_edges<W: Write>(set: &SignedEdgeSet, mut out: W) -> Result<()> {
    writeln!(out, "p {}", set.p())?;
    for ((s, t), v) in set.iter() {
        writeln!(out, "{} {} {}", s + 1, t + 1, v)?;
    }
    Ok(())
}

pub fn read_signed_edges<R: BufRead>(input: R) -> Result<SignedEdgeSet> {
    let mut set: Option<SignedEdgeSet> = None;
    for (k, line) in input.lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        match set.as_mut() {
            None => {
                if tok.len() != 2 || tok[0] != "p" {
                    return Err(Error::parse(lineno, "expected header `p <p>`"));
                }
                set = Some(SignedEdgeSet::new(parse_num(tok[1], lineno)?));
            }
            Some(set) => {
                if tok.len() != 3 {
                    return Err(Error::parse(lineno, "expected `s t sign`"));
                }
                let s: usize = parse_num(tok[0], lineno)?;
                let t: usize = parse_num(tok[1], lineno)?;
                let v: i8 = parse_num(tok[2], lineno)?;
                if s == 0 || t == 0 {
                    return Err(Error::parse(lineno, "vertex indices are 1-based"));
                }
                set.set(s - 1, t - 1, v)
                    .map_err(|e| Error::parse(lineno, e.to_string()))?;
            }
        }
    }
    set.ok_or_else(|| Error::parse(0, "empty edge file"))
}

//! Drawing ±1 samples from an Ising model: exhaustive enumeration, exact
//! star sampling and single-site Gibbs sampling.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graphs::{parse_num, IsingModel};
use crate::rng::Rng;

/// Largest model [`enumerate_distribution`] will handle (2^20 configurations).
pub const ENUMERATION_CAP: usize = 20;

/// `n × p` matrix of ±1 observations, one row per sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleMatrix {
    n: usize,
    p: usize,
    values: Vec<i8>,
}

impl SampleMatrix {
    /// `values` is row-major; every entry must be exactly -1 or +1.
    pub fn new(n: usize, p: usize, values: Vec<i8>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::invalid("sample matrix must be nonempty"));
        }
        if values.len() != n * p {
            return Err(Error::invalid(format!("{} values for a {n}x{p} matrix", values.len())));
        }
        if let Some(v) = values.iter().find(|v| **v != 1 && **v != -1) {
            return Err(Error::invalid(format!("entries must be ±1, found {v}")));
        }
        Ok(SampleMatrix { n, p, values })
    }

    pub fn from_rows<R: AsRef<[i8]>>(rows: &[R]) -> Result<Self> {
        let p = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.iter().any(|r| r.as_ref().len() != p) {
            return Err(Error::invalid("ragged rows"));
        }
        let values = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        SampleMatrix::new(rows.len(), p, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> + '_ {
        self.values.chunks_exact(self.p)
    }

    pub fn get(&self, i: usize, s: usize) -> i8 {
        self.values[i * self.p + s]
    }

    /// Copy with column `s` negated.
    pub fn flip_column(&self, s: usize) -> SampleMatrix {
        let mut out = self.clone();
        for row in out.values.chunks_exact_mut(self.p) {
            row[s] = -row[s];
        }
        out
    }

    /// Empirical second moments `(1/n) Σ_i x_s x_t` as a `p × p` matrix.
    pub fn second_moments(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.p, self.p);
        for row in self.rows() {
            for s in 0..self.p {
                for t in s..self.p {
                    m[(s, t)] += f64::from(row[s] * row[t]);
                }
            }
        }
        for s in 0..self.p {
            for t in s..self.p {
                let v = m[(s, t)] / self.n as f64;
                m[(s, t)] = v;
                m[(t, s)] = v;
            }
        }
        m
    }
}

/// Write as `n <n> p <p>` then one line of space-separated ±1 per row.
pub fn write_samples<W: Write>(data: &SampleMatrix, mut out: W) -> Result<()> {
    writeln!(out, "n {} p {}", data.n(), data.p())?;
    let mut line = String::with_capacity(3 * data.p());
    for row in data.rows() {
        line.clear();
        for (k, v) in row.iter().enumerate() {
            if k > 0 {
                line.push(' ');
            }
            line.push_str(if *v > 0 { "1" } else { "-1" });
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Parse the [`write_samples`] format. `+1` is accepted for `1`.
pub fn read_samples<R: BufRead>(input: R) -> Result<SampleMatrix> {
    let mut header: Option<(usize, usize)> = None;
    let mut values = Vec::new();
    let mut rows = 0usize;
    for (k, line) in input.lines().enumerate() {
        let lineno = k + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let Some((_, p)) = header else {
            if tok.len() != 4 || tok[0] != "n" || tok[2] != "p" {
                return Err(Error::parse(lineno, "expected header `n <n> p <p>`"));
            }
            header = Some((parse_num(tok[1], lineno)?, parse_num(tok[3], lineno)?));
            continue;
        };
        if tok.len() != p {
            return Err(Error::parse(lineno, format!("expected {p} values, found {}", tok.len())));
        }
        for t in tok {
            values.push(match t {
                "1" | "+1" => 1,
                "-1" => -1,
                _ => return Err(Error::parse(lineno, format!("entry `{t}` is not ±1"))),
            });
        }
        rows += 1;
    }
    let (n, p) = header.ok_or_else(|| Error::parse(0, "empty sample file"))?;
    if rows != n {
        return Err(Error::parse(0, format!("header promises {n} rows, found {rows}")));
    }
    SampleMatrix::new(n, p, values)
}

/// Exact distribution of an enumerable model.
///
/// Configuration `k` assigns `x_s = +1` iff bit `s` of `k` is set.
#[derive(Debug, Clone)]
pub struct DistributionTable {
    p: usize,
    probs: Vec<f64>,
    log_z: f64,
}

impl DistributionTable {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn config(&self, k: usize) -> Vec<i8> {
        decode_config(k, self.p)
    }

    pub fn prob(&self, x: &[i8]) -> f64 {
        self.probs[encode_config(x)]
    }

    /// `E[X_s X_t]` for all pairs.
    pub fn second_moments(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.p, self.p);
        for (k, &pr) in self.probs.iter().enumerate() {
            let x = decode_config(k, self.p);
            for s in 0..self.p {
                for t in s..self.p {
                    m[(s, t)] += pr * f64::from(x[s] * x[t]);
                }
            }
        }
        m.fill_lower_triangle_with_upper_triangle();
        m
    }
}

pub fn decode_config(k: usize, p: usize) -> Vec<i8> {
    (0..p).map(|s| if (k >> s) & 1 == 1 { 1 } else { -1 }).collect()
}

pub fn encode_config(x: &[i8]) -> usize {
    x.iter()
        .enumerate()
        .filter(|(_, v)| **v > 0)
        .fold(0, |k, (s, _)| k | (1 << s))
}

pub(crate) fn check_enumerable(p: usize) -> Result<()> {
    if p > ENUMERATION_CAP {
        return Err(Error::ResourceLimit(format!(
            "exhaustive enumeration limited to {ENUMERATION_CAP} variables, model has {p}"
        )));
    }
    Ok(())
}

/// Exact probabilities of all `2^p` configurations.
pub fn enumerate_distribution(model: &IsingModel) -> Result<DistributionTable> {
    let p = model.p();
    check_enumerable(p)?;
    let energies: Vec<f64> = (0..1usize << p)
        .map(|k| model.energy(&decode_config(k, p)))
        .collect();
    let max = energies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = energies.iter().map(|e| (e - max).exp()).sum();
    let log_z = max + sum.ln();
    let probs = energies.iter().map(|e| (e - log_z).exp()).collect();
    Ok(DistributionTable { p, probs, log_z })
}

#[inline]
pub(crate) fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `P(X_r = +1 | x_rest)`. `x_rest` lists the other `p - 1` variables in
/// increasing vertex order (covariate order).
pub fn conditional_prob(model: &IsingModel, r: usize, x_rest: &[i8]) -> Result<f64> {
    let p = model.p();
    if r >= p {
        return Err(Error::invalid(format!("vertex {r} out of range for p={p}")));
    }
    if x_rest.len() != p - 1 {
        return Err(Error::invalid(format!("expected {} values, got {}", p - 1, x_rest.len())));
    }
    let field: f64 = model
        .neighbors(r)
        .iter()
        .map(|&(t, w)| w * f64::from(x_rest[crate::graphs::covariate_index(r, t)]))
        .sum();
    Ok(logistic(2.0 * field))
}

/// Inverse-CDF sampling over the enumerated distribution.
pub fn sample_exact_enum(model: &IsingModel, n: usize, rng: &mut Rng) -> Result<SampleMatrix> {
    let table = enumerate_distribution(model)?;
    sample_from_table(&table, n, rng)
}

pub fn sample_from_table(table: &DistributionTable, n: usize, rng: &mut Rng) -> Result<SampleMatrix> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let mut cdf = Vec::with_capacity(table.probs.len());
    let mut acc = 0.0;
    for &pr in &table.probs {
        acc += pr;
        cdf.push(acc);
    }
    let total = acc;
    let p = table.p;
    let mut values = Vec::with_capacity(n * p);
    for _ in 0..n {
        let u = rng.random::<f64>() * total;
        let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        values.extend(decode_config(k, p));
    }
    SampleMatrix::new(n, p, values)
}

/// Exact i.i.d. sampling for a star: the hub is uniform on ±1 and each leaf
/// is drawn from its conditional given the hub. Vertices off the star are
/// independent uniform.
pub fn sample_exact_star(model: &IsingModel, n: usize, rng: &mut Rng) -> Result<SampleMatrix> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let hub = model
        .topology()
        .star_hub()
        .ok_or_else(|| Error::invalid("topology is not a star"))?;
    let p = model.p();
    let mut values = Vec::with_capacity(n * p);
    let mut row = vec![0i8; p];
    for _ in 0..n {
        let xh: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
        for (t, x) in row.iter_mut().enumerate() {
            if t == hub {
                *x = xh;
                continue;
            }
            let field = model.coupling(hub, t) * f64::from(xh);
            *x = if rng.random::<f64>() < logistic(2.0 * field) { 1 } else { -1 };
        }
        values.extend_from_slice(&row);
    }
    SampleMatrix::new(n, p, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GibbsOptions {
    pub burn_in_sweeps: usize,
    /// Sweeps between retained states. 0 behaves like 1.
    pub spacing_sweeps: usize,
    /// Visit sites in a fresh random order each sweep instead of index order.
    pub randomized_order: bool,
}

impl Default for GibbsOptions {
    fn default() -> Self {
        GibbsOptions {
            burn_in_sweeps: 200,
            spacing_sweeps: 5,
            randomized_order: false,
        }
    }
}

/// Single-site Gibbs sampler with sequential sweeps.
pub fn gibbs_sample(
    model: &IsingModel,
    n: usize,
    burn_in_sweeps: usize,
    spacing_sweeps: usize,
    rng: &mut Rng,
) -> Result<SampleMatrix> {
    let opts = GibbsOptions {
        burn_in_sweeps,
        spacing_sweeps,
        ..GibbsOptions::default()
    };
    gibbs_sample_with(model, n, &opts, rng)
}

pub fn gibbs_sample_with(model: &IsingModel, n: usize, opts: &GibbsOptions, rng: &mut Rng) -> Result<SampleMatrix> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let p = model.p();
    let mut state: Vec<i8> = (0..p).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    let mut order: Vec<usize> = (0..p).collect();

    let mut sweep = |state: &mut Vec<i8>, rng: &mut Rng| {
        if opts.randomized_order {
            order.shuffle(rng);
        }
        for &s in &order {
            let pr = logistic(2.0 * model.local_field(s, state));
            state[s] = if rng.random::<f64>() < pr { 1 } else { -1 };
        }
    };

    for _ in 0..opts.burn_in_sweeps {
        sweep(&mut state, rng);
    }
    let mut values = Vec::with_capacity(n * p);
    for _ in 0..n {
        for _ in 0..opts.spacing_sweeps.max(1) {
            sweep(&mut state, rng);
        }
        values.extend_from_slice(&state);
    }
    SampleMatrix::new(n, p, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{make_star, StarSparsity, Topology};
    use crate::rng::seeded;

    fn pair(w: f64) -> IsingModel {
        IsingModel::from_edges(2, [(0, 1, w)]).unwrap()
    }

    fn free(p: usize) -> IsingModel {
        IsingModel::new(Topology::new(p, []).unwrap(), vec![]).unwrap()
    }

    #[test]
    fn uniform_when_uncoupled() {
        let t = enumerate_distribution(&free(3)).unwrap();
        for &pr in t.probs() {
            assert!((pr - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn two_spin_partition_function() {
        let t = enumerate_distribution(&pair(0.5)).unwrap();
        let z = 2.0 * 0.5f64.exp() + 2.0 * (-0.5f64).exp();
        assert!((t.log_z().exp() - z).abs() < 1e-12);
        assert!((t.log_z().exp() - 4.5105).abs() < 1e-4);
        assert!((t.prob(&[1, 1]) - 0.5f64.exp() / z).abs() < 1e-15);
        assert!((t.prob(&[1, 1]) - 0.3655).abs() < 1e-4);
    }

    #[test]
    fn enumeration_cap() {
        let m = free(21);
        assert!(matches!(enumerate_distribution(&m), Err(Error::ResourceLimit(_))));
        assert!(matches!(sample_exact_enum(&m, 1, &mut seeded(0)), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn conditional_closed_form() {
        let m = pair(0.5);
        let e = std::f64::consts::E;
        assert!((conditional_prob(&m, 0, &[1]).unwrap() - e / (1.0 + e)).abs() < 1e-15);
        assert_eq!(conditional_prob(&free(3), 1, &[1, -1]).unwrap(), 0.5);
        assert!(conditional_prob(&m, 2, &[1]).is_err());
        assert!(conditional_prob(&m, 0, &[1, 1]).is_err());
    }

    #[test]
    fn exact_enum_single_row_and_determinism() {
        let m = pair(0.5);
        let a = sample_exact_enum(&m, 1, &mut seeded(3)).unwrap();
        assert_eq!((a.n(), a.p()), (1, 2));
        let b = sample_exact_enum(&m, 500, &mut seeded(4)).unwrap();
        let c = sample_exact_enum(&m, 500, &mut seeded(4)).unwrap();
        assert_eq!(b, c);
    }

    #[test]
    fn uniform_frequencies() {
        let m = free(3);
        let check = |d: &SampleMatrix| {
            let mut counts = [0usize; 8];
            for row in d.rows() {
                counts[encode_config(row)] += 1;
            }
            for c in counts {
                assert!((c as f64 / d.n() as f64 - 0.125).abs() < 0.01);
            }
        };
        check(&sample_exact_enum(&m, 80_000, &mut seeded(1)).unwrap());
        check(&gibbs_sample(&m, 80_000, 200, 5, &mut seeded(2)).unwrap());
    }

    #[test]
    fn star_rejects_non_star() {
        let m = IsingModel::from_edges(4, [(0, 1, 0.2), (2, 3, 0.2)]).unwrap();
        assert!(matches!(sample_exact_star(&m, 10, &mut seeded(0)), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn star_hub_marginal() {
        let topo = make_star(5, StarSparsity::Explicit(4)).unwrap();
        let m = IsingModel::new(topo, vec![0.5, -0.5, 0.5, 0.25]).unwrap();
        let d = sample_exact_star(&m, 50_000, &mut seeded(8)).unwrap();
        let plus = d.rows().filter(|r| r[0] == 1).count() as f64 / 50_000.0;
        assert!((plus - 0.5).abs() < 0.01);
        let t = enumerate_distribution(&m).unwrap();
        let hub_plus: f64 = (0..32).filter(|k| k & 1 == 1).map(|k| t.probs()[k]).sum();
        assert!((hub_plus - 0.5).abs() < 1e-12);
    }

    #[test]
    fn gibbs_determinism_and_randomized_order() {
        let m = IsingModel::from_edges(4, [(0, 1, 0.25), (1, 2, -0.25), (2, 3, 0.25), (3, 0, 0.25)]).unwrap();
        let a = gibbs_sample(&m, 200, 10, 2, &mut seeded(5)).unwrap();
        let b = gibbs_sample(&m, 200, 10, 2, &mut seeded(5)).unwrap();
        assert_eq!(a, b);
        let opts = GibbsOptions {
            randomized_order: true,
            ..GibbsOptions::default()
        };
        let c = gibbs_sample_with(&m, 200, &opts, &mut seeded(5)).unwrap();
        assert_eq!(c.n(), 200);
    }

    #[test]
    fn sample_text_format() {
        let d = SampleMatrix::from_rows(&[[1i8, -1, 1], [-1, -1, 1]]).unwrap();
        let mut buf = Vec::new();
        write_samples(&d, &mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf), "n 2 p 3\n1 -1 1\n-1 -1 1\n");
        assert_eq!(read_samples(buf.as_slice()).unwrap(), d);
        assert!(read_samples("n 1 p 2\n1 0\n".as_bytes()).is_err());
        assert!(read_samples("n 2 p 2\n1 1\n".as_bytes()).is_err());
        assert!(matches!(
            read_samples("n 1 p 2\n1 1 1\n".as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn matrix_validation() {
        assert!(SampleMatrix::new(1, 2, vec![1, 0]).is_err());
        assert!(SampleMatrix::new(0, 2, vec![]).is_err());
        assert!(SampleMatrix::new(1, 2, vec![1]).is_err());
    }
}

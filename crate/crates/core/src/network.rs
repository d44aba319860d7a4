//! Node graph and the row-stochastic combining matrices.
//!
//! Both combining matrices are stored row-stochastic: node `q` combines
//! neighbor values with row `q`, `out[q] = Σ_l M(q, l) · v[l]`. The same
//! orientation is used for the adaptation weights (`C`) and the
//! combination weights (`A`).

use rand_distr::{Distribution, Exp1};
use serde::{Serialize, Serializer};

use crate::error::{check_dim, Error, Result};
use crate::seed::rng_from_seed;

/// Row-sum tolerance for an accepted stochastic matrix.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Largest row-sum deviation the config loader repairs by renormalizing.
/// Printed matrices such as `[0.666 0.333]` sum to 0.999.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-2;

/// Square matrix with nonnegative entries whose rows sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl StochasticMatrix {
    /// Validates `rows` without modifying them.
    pub fn validate(rows: &[Vec<f64>]) -> Result<Self> {
        let n = check_shape(rows)?;
        for (q, row) in rows.iter().enumerate() {
            check_nonnegative(q, row)?;
            let sum: f64 = row.iter().sum();
            let deviation = (sum - 1.0).abs();
            if deviation > ROW_SUM_TOLERANCE || !sum.is_finite() {
                return Err(Error::RowSumViolation { row: q, sum, deviation });
            }
        }
        Ok(Self { n, entries: rows.concat() })
    }

    /// Like [`validate`](Self::validate), but rows whose sum is off by at
    /// most [`RENORMALIZE_TOLERANCE`] are rescaled to sum to one.
    pub fn from_rows_renormalized(rows: &[Vec<f64>]) -> Result<Self> {
        let n = check_shape(rows)?;
        let mut entries = Vec::with_capacity(n * n);
        for (q, row) in rows.iter().enumerate() {
            check_nonnegative(q, row)?;
            let sum: f64 = row.iter().sum();
            let deviation = (sum - 1.0).abs();
            if deviation > RENORMALIZE_TOLERANCE || !sum.is_finite() {
                return Err(Error::RowSumViolation { row: q, sum, deviation });
            }
            entries.extend(row.iter().map(|v| v / sum));
        }
        Ok(Self { n, entries })
    }

    /// Equal weights `1/n` everywhere.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroNodes);
        }
        Ok(Self { n, entries: vec![1.0 / n as f64; n * n] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroNodes);
        }
        let mut entries = vec![0.0; n * n];
        for q in 0..n {
            entries[q * n + q] = 1.0;
        }
        Ok(Self { n, entries })
    }

    /// Dense matrix whose rows are independent uniform draws from the
    /// probability simplex (normalized unit-rate exponentials).
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroNodes);
        }
        let mut rng = rng_from_seed(seed);
        let mut entries = Vec::with_capacity(n * n);
        for _ in 0..n {
            let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
            let sum: f64 = draws.iter().sum();
            entries.extend(draws.iter().map(|v| v / sum));
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, q: usize, l: usize) -> f64 {
        self.entries[q * self.n + l]
    }

    pub fn row(&self, q: usize) -> &[f64] {
        &self.entries[q * self.n..(q + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.n)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    /// `out[q] = Σ_l M(q, l) · values[l]`.
    pub fn combine(&self, values: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, values.len())?;
        Ok(self.rows().map(|row| weighted_sum(row, values)).collect())
    }

    /// Combines per-node vectors: `out[q] = Σ_l M(q, l) · vectors[l]`.
    pub fn combine_vectors(&self, vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        check_dim(self.n, vectors.len())?;
        let dim = vectors.first().map_or(0, Vec::len);
        for v in vectors {
            check_dim(dim, v.len())?;
        }
        Ok(self
            .rows()
            .map(|row| {
                let mut out = vec![0.0; dim];
                for (w, v) in row.iter().zip(vectors) {
                    for (o, x) in out.iter_mut().zip(v) {
                        *o += w * x;
                    }
                }
                out
            })
            .collect())
    }
}

impl Serialize for StochasticMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

pub(crate) fn weighted_sum(weights: &[f64], values: &[f64]) -> f64 {
    weights.iter().zip(values).fold(0.0, |acc, (w, v)| acc + w * v)
}

fn check_shape(rows: &[Vec<f64>]) -> Result<usize> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::ZeroNodes);
    }
    for (q, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotSquare { row: q, len: row.len(), expected: n });
        }
    }
    Ok(n)
}

fn check_nonnegative(q: usize, row: &[f64]) -> Result<()> {
    match row.iter().position(|v| !(*v >= 0.0)) {
        Some(l) => Err(Error::NegativeEntry { row: q, col: l, value: row[l] }),
        None => Ok(()),
    }
}

/// Checks an arbitrary square matrix for stochasticity.
pub fn validate_stochastic(rows: &[Vec<f64>]) -> Result<StochasticMatrix> {
    StochasticMatrix::validate(rows)
}

/// Nodes, their neighborhoods and the two combining matrices.
///
/// A neighborhood always contains the node itself.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkGraph {
    n: usize,
    adjacency: Vec<bool>,
    a: StochasticMatrix,
    c: StochasticMatrix,
}

impl NetworkGraph {
    /// Builds a graph from an explicit symmetric adjacency. Self-loops are
    /// added if missing; a nonzero weight between non-adjacent nodes is an
    /// error.
    pub fn new(adjacency: &[Vec<bool>], a: StochasticMatrix, c: StochasticMatrix) -> Result<Self> {
        let n = adjacency.len();
        if n == 0 {
            return Err(Error::ZeroNodes);
        }
        check_dim(n, a.dim())?;
        check_dim(n, c.dim())?;
        let mut adj = vec![false; n * n];
        for (q, row) in adjacency.iter().enumerate() {
            check_dim(n, row.len())?;
            for (l, &linked) in row.iter().enumerate() {
                if linked != adjacency[l][q] {
                    return Err(Error::InvalidParameter(format!(
                        "adjacency is not symmetric at ({q}, {l})"
                    )));
                }
                adj[q * n + l] = linked || q == l;
            }
        }
        for m in [&a, &c] {
            for q in 0..n {
                for l in 0..n {
                    if m.get(q, l) != 0.0 && !adj[q * n + l] {
                        return Err(Error::NotAdjacent { row: q, col: l });
                    }
                }
            }
        }
        Ok(Self { n, adjacency: adj, a, c })
    }

    /// Derives the adjacency from the union of the sparsity patterns of `A`
    /// and `C` (symmetrized, with self-loops).
    pub fn from_matrices(a: StochasticMatrix, c: StochasticMatrix) -> Result<Self> {
        let n = a.dim();
        check_dim(n, c.dim())?;
        let adjacency: Vec<Vec<bool>> = (0..n)
            .map(|q| {
                (0..n)
                    .map(|l| {
                        q == l
                            || a.get(q, l) != 0.0
                            || a.get(l, q) != 0.0
                            || c.get(q, l) != 0.0
                            || c.get(l, q) != 0.0
                    })
                    .collect()
            })
            .collect();
        Self::new(&adjacency, a, c)
    }

    /// One node with `A = C = [[1]]`.
    pub fn single_node() -> Self {
        let one = StochasticMatrix::identity(1).expect("n = 1");
        Self { n: 1, adjacency: vec![true], a: one.clone(), c: one }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &StochasticMatrix {
        &self.a
    }

    pub fn c(&self) -> &StochasticMatrix {
        &self.c
    }

    pub fn is_adjacent(&self, q: usize, l: usize) -> bool {
        self.adjacency[q * self.n + l]
    }

    /// Neighborhood of `q`, including `q`.
    pub fn neighbors(&self, q: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&l| self.is_adjacent(q, l))
    }

    pub(crate) fn check_inputs(&self, count: usize) -> Result<()> {
        if count == self.n {
            Ok(())
        } else {
            Err(Error::GraphSizeMismatch { expected: self.n, actual: count })
        }
    }
}

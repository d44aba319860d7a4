//! Kernel LMS and diffusion kernel LMS.
//!
//! Both filters keep the full kernel expansion: every accepted step appends
//! one entry holding a snapshot of the regressors of all nodes and one
//! coefficient per node. A prediction is `μ Σ_i coeff_i · k_i(probe)`, with
//! `k_i` the (possibly C-combined) kernel against entry `i`.
//!
//! For diffusion KLMS an iteration is
//!
//! 1. every node `l` predicts `y(l, n)` from the expansion,
//! 2. forms its raw error `e(l, n) = d_l(n) − y(l, n)`,
//! 3. the errors are mixed by `A`, `e′ = A e`, and `e′(q, n)` becomes node
//!    `q`'s coefficient for the new entry.

use serde::Serialize;

use crate::error::{check_dim, check_finite, Error, Result};
use crate::kernels::{Combination, KernelSpec};
use crate::network::NetworkGraph;

/// Growing kernel expansion shared by KLMS and diffusion KLMS.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDictionary {
    kernel: KernelSpec,
    step_size: f64,
    nodes: usize,
    dim: usize,
    /// Row-major `[entry][node][dim]`.
    centers: Vec<f64>,
    /// Row-major `[entry][node]`.
    coefficients: Vec<f64>,
    budget: Option<usize>,
    accepted: usize,
}

impl KernelDictionary {
    /// Empty expansion for `nodes` nodes with `dim`-dimensional regressors.
    /// `budget` caps the number of entries by evicting the oldest.
    pub fn new(
        kernel: KernelSpec,
        step_size: f64,
        nodes: usize,
        dim: usize,
        budget: Option<usize>,
    ) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::ZeroNodes);
        }
        if !(step_size > 0.0 && step_size.is_finite()) {
            return Err(Error::InvalidParameter(format!("step size must be positive, got {step_size}")));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("regressor dimension must be positive".into()));
        }
        if budget == Some(0) {
            return Err(Error::InvalidParameter("dictionary budget must be positive".into()));
        }
        Ok(Self {
            kernel,
            step_size,
            nodes,
            dim,
            centers: Vec::new(),
            coefficients: Vec::new(),
            budget,
            accepted: 0,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries.
    pub fn len(&self) -> usize {
        self.coefficients.len() / self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Number of entries ever appended, including evicted ones.
    pub fn accepted(&self) -> usize {
        self.accepted
    }

    /// Regressor of `node` stored with entry `entry`.
    pub fn center(&self, entry: usize, node: usize) -> &[f64] {
        let start = (entry * self.nodes + node) * self.dim;
        &self.centers[start..start + self.dim]
    }

    /// All nodes' regressors stored with `entry`.
    pub fn snapshot(&self, entry: usize) -> Vec<&[f64]> {
        (0..self.nodes).map(|l| self.center(entry, l)).collect()
    }

    pub fn coefficient(&self, entry: usize, node: usize) -> f64 {
        self.coefficients[entry * self.nodes + node]
    }

    /// Appends one entry; returns the number of evicted entries (0 or 1).
    fn push<V: AsRef<[f64]>>(&mut self, snapshot: &[V], coefficients: &[f64]) -> usize {
        for x in snapshot {
            self.centers.extend_from_slice(x.as_ref());
        }
        self.coefficients.extend_from_slice(coefficients);
        self.accepted += 1;
        match self.budget {
            Some(cap) if self.len() > cap => {
                self.centers.drain(..self.nodes * self.dim);
                self.coefficients.drain(..self.nodes);
                1
            }
            _ => 0,
        }
    }

    fn check_regressor(&self, x: &[f64]) -> Result<()> {
        check_dim(self.dim, x.len())
    }

    /// Single-node KLMS prediction `μ Σ_i e(i) κ(x_i, x)`; zero when empty.
    pub fn klms_predict(&self, x: &[f64]) -> Result<f64> {
        self.require_single_node()?;
        self.check_regressor(x)?;
        let mut acc = 0.0;
        for (center, coeff) in self.centers.chunks_exact(self.dim).zip(&self.coefficients) {
            acc += coeff * self.kernel.eval_unchecked(center, x);
        }
        Ok(self.step_size * acc)
    }

    /// Single-node KLMS update: predicts, stores `(x, e)`, returns the
    /// a-priori error `e = d − prediction`.
    pub fn klms_update(&mut self, x: &[f64], d: f64) -> Result<f64> {
        check_finite(x)?;
        check_finite(&[d])?;
        let e = d - self.klms_predict(x)?;
        if !e.is_finite() {
            return Err(diverged());
        }
        self.push(&[x], &[e]);
        Ok(e)
    }

    fn require_single_node(&self) -> Result<()> {
        if self.nodes == 1 {
            Ok(())
        } else {
            Err(Error::GraphSizeMismatch { expected: 1, actual: self.nodes })
        }
    }
}

fn diverged() -> Error {
    Error::NumericalBreakdown("kernel expansion diverged to a non-finite value".into())
}

/// Errors produced by one diffusion-KLMS iteration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffusionStep {
    pub predictions: Vec<f64>,
    /// `d_l − y_l` per node.
    pub raw_errors: Vec<f64>,
    /// `A · raw_errors`, the coefficients stored for this step.
    pub combined_errors: Vec<f64>,
}

/// Diffusion KLMS filter state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionKlmsState {
    dictionary: KernelDictionary,
    graph: NetworkGraph,
    combination: Combination,
    last_combined_errors: Vec<f64>,
    /// `[entry][q][dim]` cache of `Σ_l c(q,l) x_l(i)` for `CombinedData`.
    mixed_centers: Vec<f64>,
}

impl DiffusionKlmsState {
    pub fn new(
        graph: NetworkGraph,
        kernel: KernelSpec,
        step_size: f64,
        dim: usize,
        combination: Combination,
        budget: Option<usize>,
    ) -> Result<Self> {
        let nodes = graph.node_count();
        Ok(Self {
            dictionary: KernelDictionary::new(kernel, step_size, nodes, dim, budget)?,
            graph,
            combination,
            last_combined_errors: vec![0.0; nodes],
            mixed_centers: Vec::new(),
        })
    }

    pub fn dictionary(&self) -> &KernelDictionary {
        &self.dictionary
    }

    pub fn graph(&self) -> &NetworkGraph {
        &self.graph
    }

    pub fn combination(&self) -> Combination {
        self.combination
    }

    pub fn last_combined_errors(&self) -> &[f64] {
        &self.last_combined_errors
    }

    fn check_snapshot(&self, xs: &[Vec<f64>]) -> Result<()> {
        self.graph.check_inputs(xs.len())?;
        for x in xs {
            self.dictionary.check_regressor(x)?;
        }
        Ok(())
    }

    fn mix_row(&self, q: usize, xs: &[Vec<f64>], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (c, x) in self.graph.c().row(q).iter().zip(xs) {
            for (o, v) in out.iter_mut().zip(x) {
                *o += c * v;
            }
        }
    }

    /// Output of node `q` for the current regressors `xs` (one per node).
    pub fn dklms_predict(&self, q: usize, xs: &[Vec<f64>]) -> Result<f64> {
        self.check_snapshot(xs)?;
        if q >= self.graph.node_count() {
            return Err(Error::InvalidParameter(format!("node {q} out of range")));
        }
        Ok(self.predict_unchecked(q, xs))
    }

    fn predict_unchecked(&self, q: usize, xs: &[Vec<f64>]) -> f64 {
        let dict = &self.dictionary;
        let (n, dim) = (dict.nodes, dict.dim);
        let kernel = &dict.kernel;
        let mut acc = 0.0;
        match self.combination {
            Combination::CombinedData => {
                let mut probe = vec![0.0; dim];
                self.mix_row(q, xs, &mut probe);
                let stride = n * dim;
                for (i, entry) in self.mixed_centers.chunks_exact(stride).enumerate() {
                    let center = &entry[q * dim..(q + 1) * dim];
                    acc += dict.coefficients[i * n + q] * kernel.eval_unchecked(center, &probe);
                }
            }
            Combination::CombinedKernels => {
                let weights = self.graph.c().row(q);
                let probe = &xs[q];
                let stride = n * dim;
                for (i, entry) in dict.centers.chunks_exact(stride).enumerate() {
                    let mut g = 0.0;
                    for (c, center) in weights.iter().zip(entry.chunks_exact(dim)) {
                        if *c != 0.0 {
                            g += c * kernel.eval_unchecked(center, probe);
                        }
                    }
                    acc += dict.coefficients[i * n + q] * g;
                }
            }
        }
        dict.step_size * acc
    }

    /// Runs the three-step iteration for regressors `xs` and desired values
    /// `ds` (one each per node) and stores the new expansion entry.
    pub fn dklms_step(&mut self, xs: &[Vec<f64>], ds: &[f64]) -> Result<DiffusionStep> {
        self.check_snapshot(xs)?;
        self.graph.check_inputs(ds.len())?;
        for x in xs {
            check_finite(x)?;
        }
        check_finite(ds)?;
        let n = self.graph.node_count();
        let predictions: Vec<f64> = (0..n).map(|q| self.predict_unchecked(q, xs)).collect();
        let raw_errors: Vec<f64> = ds.iter().zip(&predictions).map(|(d, y)| d - y).collect();
        let combined_errors = self.graph.a().combine(&raw_errors)?;
        if combined_errors.iter().chain(&raw_errors).any(|e| !e.is_finite()) {
            return Err(diverged());
        }
        if self.combination == Combination::CombinedData {
            let dim = self.dictionary.dim;
            let mut mixed = vec![0.0; dim];
            for q in 0..n {
                self.mix_row(q, xs, &mut mixed);
                self.mixed_centers.extend_from_slice(&mixed);
            }
        }
        if self.dictionary.push(xs, &combined_errors) > 0 && self.combination == Combination::CombinedData {
            self.mixed_centers.drain(..n * self.dictionary.dim);
        }
        self.last_combined_errors.clone_from(&combined_errors);
        Ok(DiffusionStep { predictions, raw_errors, combined_errors })
    }
}

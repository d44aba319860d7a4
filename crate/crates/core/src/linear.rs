//! Linear baselines: LMS, RLS, their diffusion counterparts, the distributed
//! Wiener reference solution and the spectral-radius bound for C-weighted
//! correlation matrices.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{check_dim, check_finite, check_not_diverged, Error, Result};
use crate::network::{NetworkGraph, StochasticMatrix};

/// Order of the two diffusion steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffusionMode {
    /// Adapt with C-weighted neighbor gradients, then combine with A.
    #[default]
    Atc,
    /// Combine with A, then adapt.
    Cta,
}

impl DiffusionMode {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "atc" => Some(Self::Atc),
            "cta" => Some(Self::Cta),
            _ => None,
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

/// Per-node LMS weights `w_q` and intermediate estimates `p_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFilterState {
    weights: Vec<Vec<f64>>,
    intermediates: Vec<Vec<f64>>,
    step_size: f64,
}

impl LinearFilterState {
    /// Zero-initialized state for `nodes` filters of length `dim`.
    pub fn new(nodes: usize, dim: usize, step_size: f64) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::ZeroNodes);
        }
        if !(step_size > 0.0 && step_size.is_finite()) {
            return Err(Error::InvalidParameter(format!("step size must be positive, got {step_size}")));
        }
        Ok(Self {
            weights: vec![vec![0.0; dim]; nodes],
            intermediates: vec![vec![0.0; dim]; nodes],
            step_size,
        })
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    fn dim(&self) -> usize {
        self.weights[0].len()
    }

    fn node_index(&self, node: usize) -> Result<()> {
        if node < self.weights.len() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("node {node} out of range")))
        }
    }

    /// Plain LMS update of node `node`; returns the a-priori error.
    pub fn lms_step(&mut self, node: usize, x: &[f64], d: f64) -> Result<f64> {
        self.node_index(node)?;
        check_dim(self.dim(), x.len())?;
        check_finite(x)?;
        check_finite(&[d])?;
        let mu = self.step_size;
        let w = &mut self.weights[node];
        let e = d - dot(w, x);
        for (wk, xk) in w.iter_mut().zip(x) {
            *wk += mu * (e * xk);
        }
        self.intermediates[node].clone_from(w);
        check_not_diverged(w)?;
        Ok(e)
    }

    /// One diffusion-LMS iteration over every node. Returns each node's
    /// a-priori error `d_l − w_lᵀx_l` against the weights held at entry.
    pub fn diffusion_lms_step(
        &mut self,
        graph: &NetworkGraph,
        xs: &[Vec<f64>],
        ds: &[f64],
        mode: DiffusionMode,
    ) -> Result<Vec<f64>> {
        let n = graph.node_count();
        graph.check_inputs(xs.len())?;
        graph.check_inputs(ds.len())?;
        graph.check_inputs(self.weights.len())?;
        let dim = self.dim();
        for x in xs {
            check_dim(dim, x.len())?;
            check_finite(x)?;
        }
        check_finite(ds)?;

        let errors: Vec<f64> = (0..n).map(|l| ds[l] - dot(&self.weights[l], &xs[l])).collect();
        match mode {
            DiffusionMode::Atc => {
                adapt(&self.weights, &errors, graph, xs, self.step_size, &mut self.intermediates);
                combine_into(graph.a(), &self.intermediates, &mut self.weights);
            }
            DiffusionMode::Cta => {
                combine_into(graph.a(), &self.weights, &mut self.intermediates);
                let psi_errors: Vec<f64> =
                    (0..n).map(|l| ds[l] - dot(&self.intermediates[l], &xs[l])).collect();
                let psi = self.intermediates.clone();
                adapt(&psi, &psi_errors, graph, xs, self.step_size, &mut self.weights);
            }
        }
        for w in &self.weights {
            check_not_diverged(w)?;
        }
        Ok(errors)
    }
}

/// `out_q = base_q + μ Σ_l c(q,l) e_l x_l`.
fn adapt(
    base: &[Vec<f64>],
    errors: &[f64],
    graph: &NetworkGraph,
    xs: &[Vec<f64>],
    mu: f64,
    out: &mut [Vec<f64>],
) {
    let dim = base[0].len();
    let mut grad = vec![0.0; dim];
    for (q, target) in out.iter_mut().enumerate() {
        grad.iter_mut().for_each(|g| *g = 0.0);
        for (l, (&c, x)) in graph.c().row(q).iter().zip(xs).enumerate() {
            let ce = c * errors[l];
            for (g, xk) in grad.iter_mut().zip(x) {
                *g += ce * xk;
            }
        }
        for ((t, b), g) in target.iter_mut().zip(&base[q]).zip(&grad) {
            *t = b + mu * g;
        }
    }
}

fn combine_into(matrix: &StochasticMatrix, vectors: &[Vec<f64>], out: &mut [Vec<f64>]) {
    for (row, target) in matrix.rows().zip(out.iter_mut()) {
        target.iter_mut().for_each(|t| *t = 0.0);
        for (a, v) in row.iter().zip(vectors) {
            for (t, x) in target.iter_mut().zip(v) {
                *t += a * x;
            }
        }
    }
}

/// Per-node exponentially weighted RLS.
#[derive(Debug, Clone, PartialEq)]
pub struct RlsState {
    weights: Vec<DVector<f64>>,
    inverse_correlations: Vec<DMatrix<f64>>,
    forgetting: f64,
}

impl RlsState {
    /// Zero weights and `P₀ = initial_scale · I` at every node.
    pub fn new(nodes: usize, dim: usize, forgetting: f64, initial_scale: f64) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::ZeroNodes);
        }
        if !(forgetting > 0.0 && forgetting <= 1.0) {
            return Err(Error::InvalidParameter(format!("forgetting factor must lie in (0, 1], got {forgetting}")));
        }
        if !(initial_scale > 0.0 && initial_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("initial scale must be positive, got {initial_scale}")));
        }
        Ok(Self {
            weights: vec![DVector::zeros(dim); nodes],
            inverse_correlations: vec![DMatrix::identity(dim, dim) * initial_scale; nodes],
            forgetting,
        })
    }

    pub fn weights(&self, node: usize) -> &DVector<f64> {
        &self.weights[node]
    }

    pub fn inverse_correlation(&self, node: usize) -> &DMatrix<f64> {
        &self.inverse_correlations[node]
    }

    /// RLS update at `node`; returns the a-priori error.
    pub fn rls_step(&mut self, node: usize, x: &[f64], d: f64) -> Result<f64> {
        if node >= self.weights.len() {
            return Err(Error::InvalidParameter(format!("node {node} out of range")));
        }
        let dim = self.weights[node].len();
        check_dim(dim, x.len())?;
        check_finite(x)?;
        check_finite(&[d])?;
        let x = DVector::from_column_slice(x);
        let p = &self.inverse_correlations[node];
        let px = p * &x;
        let denom = self.forgetting + x.dot(&px);
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(Error::NumericalBreakdown(format!("RLS gain denominator {denom}")));
        }
        let gain = &px / denom;
        let e = d - self.weights[node].dot(&x);
        self.weights[node] += &gain * e;
        let mut updated = (p - &gain * px.transpose()) / self.forgetting;
        // Re-symmetrize to stop round-off from accumulating.
        updated = (&updated + updated.transpose()) * 0.5;
        if updated.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBreakdown("non-finite inverse correlation".into()));
        }
        self.inverse_correlations[node] = updated;
        Ok(e)
    }

    /// Per-node RLS followed by `w_q ← Σ_l a(q,l) w_l`.
    pub fn diffusion_rls_step(
        &mut self,
        graph: &NetworkGraph,
        xs: &[Vec<f64>],
        ds: &[f64],
    ) -> Result<Vec<f64>> {
        graph.check_inputs(xs.len())?;
        graph.check_inputs(ds.len())?;
        graph.check_inputs(self.weights.len())?;
        let errors = (0..xs.len())
            .map(|l| self.rls_step(l, &xs[l], ds[l]))
            .collect::<Result<Vec<_>>>()?;
        let dim = self.weights[0].len();
        let combined: Vec<DVector<f64>> = (0..xs.len())
            .map(|q| {
                let mut w = DVector::zeros(dim);
                for (a, wl) in graph.a().row(q).iter().zip(&self.weights) {
                    w += wl * *a;
                }
                w
            })
            .collect();
        self.weights = combined;
        Ok(errors)
    }
}

fn weighted_matrix_sum(matrices: &[DMatrix<f64>], weights: &[f64]) -> Result<DMatrix<f64>> {
    check_dim(matrices.len(), weights.len())?;
    let first = matrices.first().ok_or(Error::EmptySampler)?;
    let (r, c) = first.shape();
    let mut out = DMatrix::zeros(r, c);
    for (m, w) in matrices.iter().zip(weights) {
        if m.shape() != (r, c) {
            return Err(Error::DimensionMismatch { expected: r, actual: m.nrows() });
        }
        out += m * *w;
    }
    Ok(out)
}

/// Condition-number ceiling for [`distributed_wiener`].
pub const MAX_CONDITION: f64 = 1e12;

/// `(Σ_l c_l R_l)⁻¹ (Σ_l c_l r_l)`.
pub fn distributed_wiener(
    correlations: &[DMatrix<f64>],
    cross: &[DVector<f64>],
    c_row: &[f64],
) -> Result<DVector<f64>> {
    let r = weighted_matrix_sum(correlations, c_row)?;
    check_dim(correlations.len(), cross.len())?;
    if r.nrows() != r.ncols() {
        return Err(Error::NotSquare { row: 0, len: r.ncols(), expected: r.nrows() });
    }
    let mut rhs = DVector::zeros(r.nrows());
    for (v, w) in cross.iter().zip(c_row) {
        check_dim(r.nrows(), v.len())?;
        rhs += v * *w;
    }
    let sv = r.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond < MAX_CONDITION) {
        return Err(Error::SingularMatrix(cond));
    }
    r.lu().solve(&rhs).ok_or(Error::SingularMatrix(cond))
}

/// Outcome of comparing the spectral radius of the C-weighted correlation
/// matrix against the largest individual radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralRadiusCheck {
    pub combined: f64,
    pub max_individual: f64,
    pub bound_holds: bool,
}

pub const POWER_ITERATION_TOLERANCE: f64 = 1e-10;
pub const POWER_ITERATION_MAX_ITERS: usize = 10_000;

/// Largest eigenvalue magnitude of a symmetric matrix by power iteration.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    // Deterministic start with no special alignment to coordinate axes.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.37 * ((i as f64 + 1.0) * 1.618).sin());
    v.normalize_mut();
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATION_MAX_ITERS {
        let w = m * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
        if (norm - estimate).abs() <= POWER_ITERATION_TOLERANCE * norm.max(1.0) {
            return norm;
        }
        estimate = norm;
    }
    estimate
}

/// Computes `ρ(Σ_l c_l R_l)` and `max_l ρ(R_l)` and whether the former is
/// bounded by the latter.
pub fn spectral_radius_check(correlations: &[DMatrix<f64>], c_row: &[f64]) -> Result<SpectralRadiusCheck> {
    for (i, m) in correlations.iter().enumerate() {
        let scale = m.amax().max(1.0);
        if m.nrows() != m.ncols() || (m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::NonSymmetricInput { index: i });
        }
    }
    let combined_matrix = weighted_matrix_sum(correlations, c_row)?;
    let combined = spectral_radius(&combined_matrix);
    let max_individual = correlations.iter().map(spectral_radius).fold(0.0, f64::max);
    let slack = POWER_ITERATION_TOLERANCE * max_individual.max(1.0) * 10.0;
    Ok(SpectralRadiusCheck { combined, max_individual, bound_holds: combined <= max_individual + slack })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn graph(a: StochasticMatrix, c: StochasticMatrix) -> NetworkGraph {
        NetworkGraph::from_matrices(a, c).unwrap()
    }

    #[test]
    fn lms_examples() {
        let mut s = LinearFilterState::new(1, 1, 0.5).unwrap();
        assert_eq!(s.lms_step(0, &[1.0], 1.0).unwrap(), 1.0);
        assert_eq!(s.weights()[0], vec![0.5]);

        // fixed point
        let e = s.lms_step(0, &[2.0], 1.0).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(s.weights()[0], vec![0.5]);

        let mut s = LinearFilterState::new(1, 1, 0.1).unwrap();
        s.weights[0][0] = 0.2;
        let e = s.lms_step(0, &[2.0], 1.0).unwrap();
        // oracle: e = 1 − 0.2·2, w = 0.2 + 0.1·e·2
        assert!((e - 0.6).abs() < 1e-15);
        assert!((s.weights()[0][0] - 0.32).abs() < 1e-15);
    }

    #[test]
    fn lms_rejects_bad_input() {
        let mut s = LinearFilterState::new(1, 2, 0.1).unwrap();
        assert!(matches!(s.lms_step(0, &[1.0], 1.0), Err(Error::DimensionMismatch { .. })));
        assert_eq!(s.lms_step(0, &[1.0, f64::NAN], 1.0), Err(Error::NonFiniteInput));
        assert_eq!(s.lms_step(0, &[1.0, 1.0], f64::INFINITY), Err(Error::NonFiniteInput));
        assert!(LinearFilterState::new(1, 2, 0.0).is_err());
    }

    #[test]
    fn single_node_diffusion_lms_matches_lms() {
        let g = NetworkGraph::single_node();
        let mut rng = crate::seed::rng_from_seed(3);
        for mode in [DiffusionMode::Atc, DiffusionMode::Cta] {
            let mut plain = LinearFilterState::new(1, 3, 0.05).unwrap();
            let mut diff = LinearFilterState::new(1, 3, 0.05).unwrap();
            for _ in 0..100 {
                let x: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
                let d: f64 = rng.sample(StandardNormal);
                let e1 = plain.lms_step(0, &x, d).unwrap();
                let e2 = diff.diffusion_lms_step(&g, &[x], &[d], mode).unwrap();
                assert_eq!(e1, e2[0]);
                assert_eq!(plain.weights(), diff.weights());
            }
        }
    }

    #[test]
    fn identity_matrices_decouple_nodes() {
        let id = StochasticMatrix::identity(3).unwrap();
        let g = graph(id.clone(), id);
        let mut rng = crate::seed::rng_from_seed(11);
        let mut plain = LinearFilterState::new(3, 2, 0.1).unwrap();
        let mut diff = LinearFilterState::new(3, 2, 0.1).unwrap();
        for _ in 0..200 {
            let xs: Vec<Vec<f64>> =
                (0..3).map(|_| (0..2).map(|_| rng.sample(StandardNormal)).collect()).collect();
            let ds: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
            let e = diff.diffusion_lms_step(&g, &xs, &ds, DiffusionMode::Atc).unwrap();
            for q in 0..3 {
                assert_eq!(plain.lms_step(q, &xs[q], ds[q]).unwrap(), e[q]);
            }
            assert_eq!(plain.weights(), diff.weights());
        }
    }

    #[test]
    fn symmetric_network_keeps_nodes_identical() {
        let u = StochasticMatrix::uniform(2).unwrap();
        let g = graph(u.clone(), u);
        let mut rng = crate::seed::rng_from_seed(5);
        let mut s = LinearFilterState::new(2, 2, 0.05).unwrap();
        for _ in 0..300 {
            let x: Vec<f64> = (0..2).map(|_| rng.sample(StandardNormal)).collect();
            let d: f64 = rng.sample(StandardNormal);
            let e = s.diffusion_lms_step(&g, &[x.clone(), x], &[d, d], DiffusionMode::Atc).unwrap();
            assert_eq!(e[0], e[1]);
            assert_eq!(s.weights()[0], s.weights()[1]);
        }
    }

    fn linear_plant_error(mode: DiffusionMode, seed: u64) -> f64 {
        let u = StochasticMatrix::uniform(2).unwrap();
        let g = graph(u.clone(), u);
        let target = [0.5, -0.3];
        let mut rng = crate::seed::rng_from_seed(seed);
        let mut s = LinearFilterState::new(2, 2, 0.02).unwrap();
        for _ in 0..2000 {
            let xs: Vec<Vec<f64>> = (0..2)
                .map(|_| (0..2).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect())
                .collect();
            let ds: Vec<f64> = xs
                .iter()
                .map(|x| dot(&target, x) + 0.1 * rng.sample::<f64, _>(StandardNormal))
                .collect();
            s.diffusion_lms_step(&g, &xs, &ds, mode).unwrap();
        }
        s.weights()
            .iter()
            .map(|w| ((w[0] - target[0]).powi(2) + (w[1] - target[1]).powi(2)).sqrt())
            .fold(0.0, f64::max)
    }

    #[test]
    fn diffusion_lms_identifies_linear_plant() {
        for seed in 0..5 {
            assert!(linear_plant_error(DiffusionMode::Atc, seed) < 0.1);
            assert!(linear_plant_error(DiffusionMode::Cta, seed) < 0.1);
        }
    }

    #[test]
    fn lms_error_norm_reaches_noise_floor() {
        // white unit-variance inputs, ρ(R) = 1, μ = 0.05 is well inside (0, 2)
        let target = [1.0, -0.5, 0.25];
        for seed in 0..20 {
            let mut rng = crate::seed::rng_from_seed(100 + seed);
            let mut s = LinearFilterState::new(1, 3, 0.05).unwrap();
            let mut norms = Vec::new();
            for _ in 0..1500 {
                let x: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
                let d = dot(&target, &x) + 0.1 * rng.sample::<f64, _>(StandardNormal);
                s.lms_step(0, &x, d).unwrap();
                let w = &s.weights()[0];
                norms.push(w.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt());
            }
            let early = norms[..10].iter().sum::<f64>() / 10.0;
            let late = norms[1000..].iter().sum::<f64>() / 500.0;
            assert!(late < 0.1 * early, "seed {seed}: {early} -> {late}");
            assert!(late < 0.1);
        }
    }

    #[test]
    fn rls_examples() {
        let mut s = RlsState::new(1, 1, 1.0, 100.0).unwrap();
        let e = s.rls_step(0, &[1.0], 1.0).unwrap();
        assert_eq!(e, 1.0);
        // oracle: k = P x / (λ + xᵀPx) = 100/101, w = k·e
        assert!((s.weights(0)[0] - 100.0 / 101.0).abs() < 1e-15);
        assert!((s.weights(0)[0] - 0.990_099).abs() < 1e-6);

        let w = s.weights(0)[0];
        let e = s.rls_step(0, &[2.0], 2.0 * w).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(s.weights(0)[0], w);

        assert!(RlsState::new(1, 1, 0.0, 1.0).is_err());
        assert!(RlsState::new(1, 1, 1.5, 1.0).is_err());
        assert!(matches!(s.rls_step(0, &[1.0, 1.0], 1.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rls_breakdown_is_reported() {
        let mut s = RlsState::new(1, 1, 1.0, 1.0).unwrap();
        s.inverse_correlations[0][(0, 0)] = -10.0;
        assert!(matches!(s.rls_step(0, &[1.0], 1.0), Err(Error::NumericalBreakdown(_))));
    }

    #[test]
    fn rls_converges_and_stays_positive_definite() {
        let target = [0.7, -0.2];
        let mut rng = crate::seed::rng_from_seed(21);
        let mut s = RlsState::new(1, 2, 1.0, 100.0).unwrap();
        let mut errs = Vec::new();
        for step in 0..500 {
            let x: Vec<f64> = (0..2).map(|_| rng.sample(StandardNormal)).collect();
            let d = dot(&target, &x) + 0.05 * rng.sample::<f64, _>(StandardNormal);
            s.rls_step(0, &x, d).unwrap();
            let w = s.weights(0);
            errs.push(((w[0] - target[0]).powi(2) + (w[1] - target[1]).powi(2)).sqrt());
            let p = s.inverse_correlation(0);
            assert!((p - p.transpose()).amax() <= 1e-8);
            if step % 100 == 0 {
                assert!(p.clone().symmetric_eigen().eigenvalues.min() > 0.0);
            }
        }
        // decreasing in block means (monotone within noise)
        let blocks: Vec<f64> = errs.chunks(100).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
        for pair in blocks.windows(2) {
            assert!(pair[1] <= pair[0] * 1.05, "{blocks:?}");
        }
        assert!(blocks[4] < 0.02);
    }

    #[test]
    fn diffusion_rls_reductions() {
        let g = NetworkGraph::single_node();
        let mut rng = crate::seed::rng_from_seed(8);
        let mut plain = RlsState::new(1, 2, 0.999, 100.0).unwrap();
        let mut diff = plain.clone();
        for _ in 0..100 {
            let x: Vec<f64> = (0..2).map(|_| rng.sample(StandardNormal)).collect();
            let d: f64 = rng.sample(StandardNormal);
            assert_eq!(plain.rls_step(0, &x, d).unwrap(), diff.diffusion_rls_step(&g, &[x], &[d]).unwrap()[0]);
            assert_eq!(plain, diff);
        }

        let u = StochasticMatrix::uniform(3).unwrap();
        let g = graph(u.clone(), u);
        let mut s = RlsState::new(3, 2, 0.999, 100.0).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..2).map(|_| rng.sample(StandardNormal)).collect();
            let d: f64 = rng.sample(StandardNormal);
            s.diffusion_rls_step(&g, &[x.clone(), x.clone(), x], &[d, d, d]).unwrap();
            assert!((&s.weights[0] - &s.weights[1]).amax() < 1e-12);
            assert!((&s.weights[0] - &s.weights[2]).amax() < 1e-12);
        }
    }

    #[test]
    fn wiener_examples() {
        let id = DMatrix::<f64>::identity(2, 2);
        let r = DVector::from_vec(vec![0.3, -1.2]);
        let w = distributed_wiener(&[id.clone(), id.clone()], &[r.clone(), r.clone()], &[0.4, 0.6]).unwrap();
        assert!((&w - &r).amax() < 1e-12);

        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let w = distributed_wiener(std::slice::from_ref(&m), std::slice::from_ref(&r), &[1.0]).unwrap();
        let oracle = m.try_inverse().unwrap() * &r;
        assert!((&w - &oracle).amax() < 1e-12);

        let r1 = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]));
        let r2 = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]));
        let ones = DVector::from_vec(vec![1.0, 1.0]);
        let w = distributed_wiener(&[r1, r2], &[ones.clone(), ones], &[0.5, 0.5]).unwrap();
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-12 && (w[1] - 2.0 / 3.0).abs() < 1e-12);

        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            distributed_wiener(&[singular], &[DVector::from_vec(vec![1.0, 1.0])], &[1.0]),
            Err(Error::SingularMatrix(_))
        ));
    }

    #[test]
    fn spectral_radius_examples() {
        let id = DMatrix::<f64>::identity(3, 3);
        let check = spectral_radius_check(&[id.clone(), id], &[0.5, 0.5]).unwrap();
        assert!((check.combined - 1.0).abs() < 1e-9);
        assert!((check.max_individual - 1.0).abs() < 1e-9);
        assert!(check.bound_holds);

        let r1 = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
        let r2 = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]));
        let check = spectral_radius_check(&[r1, r2], &[0.5, 0.5]).unwrap();
        assert!((check.combined - 2.5).abs() < 1e-8);
        assert!((check.max_individual - 4.0).abs() < 1e-8);
        assert!(check.bound_holds);

        let skew = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert_eq!(spectral_radius_check(&[skew], &[1.0]), Err(Error::NonSymmetricInput { index: 0 }));
    }

    proptest! {
        #[test]
        fn power_iteration_matches_eigendecomposition(entries in prop::collection::vec(-2.0f64..2.0, 16)) {
            let b = DMatrix::from_row_slice(4, 4, &entries);
            let m = &b * b.transpose();
            let exact = m.clone().symmetric_eigen().eigenvalues.amax();
            let est = spectral_radius(&m);
            prop_assert!((est - exact).abs() <= 1e-6 * exact.max(1.0), "{} vs {}", est, exact);
        }
    }
}

//! Theoretical performance predictors for diffusion KLMS.
//!
//! Everything here is driven by the per-step kernel self-interaction
//! `g = ⟨C₁Φ(x), Φ(x_obs)⟩`, the kernel value that multiplies the
//! coefficient stored in an iteration when the filter is probed at the same
//! snapshot. Its first two moments feed three predictors:
//!
//! * the transient recursion
//!   `m(n) = (1 − 2μ E[g]) m(n−1) + μ² σ_n² E[g²]`,
//! * the steady-state misadjustment `(μ σ_n² / 2) E[|g|]`,
//! * the step-size range `0 < μ < 2 / E[g]`.
//!
//! The recursion's own fixed point, `μ σ_n² E[g²] / (2 E[g])`, coincides with
//! the misadjustment formula only when `g` is deterministic, so both are
//! exposed.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{step_self_kernel, Combination, KernelSpec};
use crate::network::NetworkGraph;

/// Monte Carlo moments of the step self-kernel at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelMoments {
    pub g_mean: f64,
    pub g_abs_mean: f64,
    pub g_sq_mean: f64,
    pub sample_count: usize,
}

impl KernelMoments {
    /// Moments of a constant `g`.
    pub fn deterministic(g: f64) -> Self {
        Self { g_mean: g, g_abs_mean: g.abs(), g_sq_mean: g * g, sample_count: 1 }
    }
}

/// Averages `g`, `|g|` and `g²` over up to `samples` snapshots drawn from
/// `sampler`. Each snapshot holds one regressor per node; the probe is the
/// same snapshot, so `g` is the self-interaction of that step at `node`.
/// Summation runs in draw order.
pub fn estimate_moments<I, V>(
    graph: &NetworkGraph,
    node: usize,
    kernel: &KernelSpec,
    combination: Combination,
    sampler: I,
    samples: usize,
) -> Result<KernelMoments>
where
    I: IntoIterator<Item = Vec<V>>,
    V: AsRef<[f64]>,
{
    if samples < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 samples, got {samples}")));
    }
    if node >= graph.node_count() {
        return Err(Error::InvalidParameter(format!("node {node} out of range")));
    }
    let weights = graph.c().row(node);
    let (mut sum, mut sum_abs, mut sum_sq) = (0.0, 0.0, 0.0);
    let mut count = 0usize;
    for snapshot in sampler.into_iter().take(samples) {
        graph.check_inputs(snapshot.len())?;
        let g = step_self_kernel(kernel, combination, weights, &snapshot, node)?;
        sum += g;
        sum_abs += g.abs();
        sum_sq += g * g;
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptySampler);
    }
    let n = count as f64;
    Ok(KernelMoments { g_mean: sum / n, g_abs_mean: sum_abs / n, g_sq_mean: sum_sq / n, sample_count: count })
}

/// Predicted `E[|ỹ_q(n)|²]` for `n = 0..=n_steps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoreticalCurve {
    pub values: Vec<f64>,
    pub mu: f64,
    pub noise_variance: f64,
    pub initial: f64,
}

impl TheoreticalCurve {
    /// First index at which the curve falls to `e⁻¹` of its initial value.
    pub fn time_constant(&self) -> Option<usize> {
        time_constant(&self.values)
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("step size must be positive, got {mu}")))
    }
}

fn check_variance(v: f64) -> Result<()> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeVariance(v))
    }
}

/// Iterates `m(n) = (1 − 2μ g_mean) m(n−1) + μ² σ_n² g_sq_mean` from
/// `m(0) = initial`.
///
/// Values stay nonnegative while `1 − 2μ g_mean ≥ 0`; beyond that the
/// first-order recursion oscillates and is returned as is.
pub fn transient_curve(
    moments: &KernelMoments,
    mu: f64,
    noise_variance: f64,
    initial: f64,
    n_steps: usize,
) -> Result<TheoreticalCurve> {
    check_mu(mu)?;
    check_variance(noise_variance)?;
    check_variance(initial)?;
    if n_steps == 0 {
        return Err(Error::InvalidParameter("n_steps must be at least 1".into()));
    }
    let factor = 1.0 - 2.0 * mu * moments.g_mean;
    let forcing = mu * mu * noise_variance * moments.g_sq_mean;
    let mut values = Vec::with_capacity(n_steps + 1);
    let mut m = initial;
    values.push(m);
    for _ in 0..n_steps {
        m = factor * m + forcing;
        values.push(m);
    }
    Ok(TheoreticalCurve { values, mu, noise_variance, initial })
}

/// `(μ σ_n² / 2) · E[|g|]`.
pub fn steady_state_mse(moments: &KernelMoments, mu: f64, noise_variance: f64) -> Result<f64> {
    check_mu(mu)?;
    check_variance(noise_variance)?;
    Ok(0.5 * mu * noise_variance * moments.g_abs_mean)
}

/// Fixed point of [`transient_curve`]: `μ σ_n² E[g²] / (2 E[g])`.
pub fn recursion_fixed_point(moments: &KernelMoments, mu: f64, noise_variance: f64) -> Result<f64> {
    check_mu(mu)?;
    check_variance(noise_variance)?;
    if !(moments.g_mean > 0.0) {
        return Err(Error::NonPositiveKernelMean(moments.g_mean));
    }
    Ok(mu * noise_variance * moments.g_sq_mean / (2.0 * moments.g_mean))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepSizeRange {
    pub lower: f64,
    pub upper: f64,
}

impl StepSizeRange {
    pub fn contains(&self, mu: f64) -> bool {
        mu > self.lower && mu < self.upper
    }
}

/// `(0, 2 / E[g])`.
pub fn step_size_range(moments: &KernelMoments) -> Result<StepSizeRange> {
    if !(moments.g_mean > 0.0) {
        return Err(Error::NonPositiveKernelMean(moments.g_mean));
    }
    Ok(StepSizeRange { lower: 0.0, upper: 2.0 / moments.g_mean })
}

/// Left-hand side of the convergence condition,
/// `1 − 2μ E[g] + μ² E[g]²`; the filter converges iff it is below 1.
pub fn convergence_factor(moments: &KernelMoments, mu: f64) -> f64 {
    let mg = mu * moments.g_mean;
    1.0 - 2.0 * mg + mg * mg
}

/// First index `n` with `values[n] ≤ e⁻¹ · values[0]`.
pub fn time_constant(values: &[f64]) -> Option<usize> {
    let first = *values.first()?;
    let threshold = (-1.0f64).exp() * first;
    values.iter().position(|&v| v <= threshold)
}

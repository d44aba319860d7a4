//! Nonlinear denoising experiments: a ±1 source passes through the channel
//! `f(x) = x − 0.9x²`, every node observes the channel output in independent
//! white Gaussian noise, and each filter tries to recover the clean output
//! from a time-embedded window of its own noisy observations.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{
    estimate_moments, recursion_fixed_point, steady_state_mse, transient_curve, KernelMoments, TheoreticalCurve,
};
use crate::error::{Error, Result};
use crate::kernel_filters::{DiffusionKlmsState, KernelDictionary};
use crate::kernels::{Combination, KernelSpec};
use crate::linear::{DiffusionMode, LinearFilterState, RlsState};
use crate::network::{NetworkGraph, StochasticMatrix};
use crate::seed::{derive_seed, rng_from_seed};

/// Default share of a trace averaged by [`mse_floor`].
pub const DEFAULT_TAIL_FRACTION: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Lms,
    DiffusionLms,
    Rls,
    DiffusionRls,
    Klms,
    DiffusionKlms,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Lms,
        Algorithm::DiffusionLms,
        Algorithm::Rls,
        Algorithm::DiffusionRls,
        Algorithm::Klms,
        Algorithm::DiffusionKlms,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Lms => "lms",
            Algorithm::DiffusionLms => "diffusion-lms",
            Algorithm::Rls => "rls",
            Algorithm::DiffusionRls => "diffusion-rls",
            Algorithm::Klms => "klms",
            Algorithm::DiffusionKlms => "diffusion-klms",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.tag() == text)
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Where a combining matrix comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixChoice {
    Explicit(StochasticMatrix),
    Uniform,
    Random { seed: u64 },
}

impl MatrixChoice {
    pub fn build(&self, n: usize) -> Result<StochasticMatrix> {
        match self {
            MatrixChoice::Explicit(m) => Ok(m.clone()),
            MatrixChoice::Uniform => StochasticMatrix::uniform(n),
            MatrixChoice::Random { seed } => StochasticMatrix::random(n, *seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseLevel {
    Variance(f64),
    SnrDb(f64),
}

impl NoiseLevel {
    /// Noise variance for a clean signal of mean power `clean_power`.
    pub fn variance(&self, clean_power: f64) -> f64 {
        match *self {
            NoiseLevel::Variance(v) => v,
            NoiseLevel::SnrDb(db) => clean_power / 10f64.powf(db / 10.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub step_sizes: Vec<f64>,
    pub sizes: Vec<usize>,
    pub snr_db: Vec<f64>,
    pub matrix_draws: usize,
    /// Snapshots per node for the theoretical floor of each size-sweep draw.
    pub moment_samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            step_sizes: vec![0.05, 0.1, 0.15, 0.2, 0.25],
            sizes: vec![1, 2, 4, 8],
            snr_db: vec![10.0, 20.0],
            matrix_draws: 100,
            moment_samples: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub moment_samples: usize,
    /// Length of the predicted curve; `None` matches the trace length.
    pub transient_steps: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { moment_samples: 20_000, transient_steps: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub node_count: usize,
    pub a: MatrixChoice,
    pub c: MatrixChoice,
    pub kernel: KernelSpec,
    pub combination: Combination,
    /// Step size of the kernel filters.
    pub mu: f64,
    /// Step size of the linear filters.
    pub mu_linear: f64,
    pub forgetting: f64,
    /// `P(0) = rls_initial · I`.
    pub rls_initial: f64,
    pub diffusion_mode: DiffusionMode,
    pub dictionary_budget: Option<usize>,
    pub noise: NoiseLevel,
    pub embedding_length: usize,
    pub sample_count: usize,
    pub monte_carlo_runs: usize,
    pub master_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub tail_fraction: f64,
    pub sweep: SweepConfig,
    pub analysis: AnalysisConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            node_count: 2,
            a: MatrixChoice::Uniform,
            c: MatrixChoice::Uniform,
            kernel: KernelSpec::Gaussian { sigma: 0.1, normalized: true },
            combination: Combination::CombinedData,
            mu: 0.2,
            mu_linear: 0.02,
            forgetting: 0.999,
            rls_initial: 100.0,
            diffusion_mode: DiffusionMode::Atc,
            dictionary_budget: None,
            noise: NoiseLevel::Variance(0.16),
            embedding_length: 1,
            sample_count: 2000,
            monte_carlo_runs: 20,
            master_seed: 1,
            algorithms: Algorithm::ALL.to_vec(),
            tail_fraction: DEFAULT_TAIL_FRACTION,
            sweep: SweepConfig::default(),
            analysis: AnalysisConfig::default(),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::ConfigInvalid(msg.into())
}

impl ExperimentConfig {
    /// Checks every invariant, naming the first one that fails.
    pub fn validate(&self) -> Result<()> {
        if self.node_count == 0 {
            return Err(invalid("network.nodes must be at least 1"));
        }
        for (name, m) in [("network.a", &self.a), ("network.c", &self.c)] {
            if let MatrixChoice::Explicit(m) = m {
                if m.dim() != self.node_count {
                    return Err(invalid(format!(
                        "{name} is {0}x{0} but network.nodes is {1}",
                        m.dim(),
                        self.node_count
                    )));
                }
            }
        }
        match self.kernel {
            KernelSpec::Gaussian { sigma, .. } if !(sigma > 0.0 && sigma.is_finite()) => {
                return Err(invalid("kernel.sigma must be > 0"));
            }
            KernelSpec::Polynomial { offset, .. } if !offset.is_finite() => {
                return Err(invalid("kernel.offset must be finite"));
            }
            _ => {}
        }
        for (name, v) in [("filter.mu", self.mu), ("filter.mu_linear", self.mu_linear)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be > 0")));
            }
        }
        if !(self.forgetting > 0.0 && self.forgetting <= 1.0) {
            return Err(invalid("filter.lambda must lie in (0, 1]"));
        }
        if !(self.rls_initial > 0.0 && self.rls_initial.is_finite()) {
            return Err(invalid("filter.rls_initial must be > 0"));
        }
        if self.dictionary_budget == Some(0) {
            return Err(invalid("filter.dictionary_budget must be >= 1"));
        }
        match self.noise {
            NoiseLevel::Variance(v) if !(v >= 0.0 && v.is_finite()) => {
                return Err(invalid("simulation.noise_variance must be >= 0"));
            }
            NoiseLevel::SnrDb(db) if !db.is_finite() => {
                return Err(invalid("simulation.snr_db must be finite"));
            }
            _ => {}
        }
        if self.embedding_length == 0 {
            return Err(invalid("simulation.embedding_length must be >= 1"));
        }
        if self.sample_count < self.embedding_length {
            return Err(invalid("simulation.samples must be >= simulation.embedding_length"));
        }
        if self.monte_carlo_runs == 0 {
            return Err(invalid("simulation.runs must be >= 1"));
        }
        if self.algorithms.is_empty() {
            return Err(invalid("simulation.algorithms must not be empty"));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return Err(invalid("simulation.tail_fraction must lie in (0, 1]"));
        }
        if self.sweep.step_sizes.iter().any(|&mu| !(mu > 0.0 && mu.is_finite())) {
            return Err(invalid("sweep.step_sizes must all be > 0"));
        }
        if self.sweep.sizes.contains(&0) {
            return Err(invalid("sweep.sizes must all be >= 1"));
        }
        if self.sweep.snr_db.iter().any(|v| !v.is_finite()) {
            return Err(invalid("sweep.snr_db must be finite"));
        }
        if self.sweep.matrix_draws == 0 {
            return Err(invalid("sweep.matrix_draws must be >= 1"));
        }
        if self.sweep.moment_samples < 2 || self.analysis.moment_samples < 2 {
            return Err(invalid("moment_samples must be >= 2"));
        }
        if self.analysis.transient_steps == Some(0) {
            return Err(invalid("analysis.transient_steps must be >= 1"));
        }
        self.graph()?;
        Ok(())
    }

    pub fn graph(&self) -> Result<NetworkGraph> {
        let a = self.a.build(self.node_count)?;
        let c = self.c.build(self.node_count)?;
        NetworkGraph::from_matrices(a, c)
    }

    /// Iterations per run, `sample_count − embedding_length + 1`.
    pub fn trace_length(&self) -> usize {
        self.sample_count + 1 - self.embedding_length
    }

    /// Seed of Monte Carlo run `run`.
    pub fn run_seed(&self, run: usize) -> u64 {
        derive_seed(self.master_seed, "run", &[run as u64])
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `n` equiprobable ±1 values.
pub fn generate_source(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

/// Element-wise `x − 0.9x²`.
pub fn apply_channel(s: &[f64]) -> Vec<f64> {
    s.iter().map(|&x| x - 0.9 * x * x).collect()
}

/// Mean power of the channel output for an equiprobable ±1 source.
pub fn clean_power() -> f64 {
    apply_channel(&[1.0, -1.0]).iter().map(|z| z * z).sum::<f64>() / 2.0
}

/// Per-node noisy copies of `z`. Node `l`'s noise is drawn after node
/// `l − 1`'s, so growing the network leaves existing nodes' data unchanged.
pub fn observe(z: &[f64], node_count: usize, noise_variance: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if !(noise_variance >= 0.0) {
        return Err(Error::NegativeVariance(noise_variance));
    }
    let std = noise_variance.sqrt();
    let mut rng = rng_from_seed(seed);
    Ok((0..node_count)
        .map(|_| {
            z.iter()
                .map(|&v| {
                    let w: f64 = rng.sample(StandardNormal);
                    v + std * w
                })
                .collect()
        })
        .collect())
}

/// Sliding windows `(u(n), u(n−1), …, u(n−T+1))` for `n = T−1, …`.
pub fn embed(u: &[f64], t: usize) -> Result<Vec<Vec<f64>>> {
    if t == 0 {
        return Err(Error::InvalidParameter("embedding length must be >= 1".into()));
    }
    if u.len() < t {
        return Err(Error::SequenceTooShort { len: u.len(), required: t });
    }
    Ok(u.windows(t).map(|w| w.iter().rev().copied().collect()).collect())
}

/// Data of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunData {
    /// `[node][n]` regressors.
    pub regressors: Vec<Vec<Vec<f64>>>,
    /// Clean channel output aligned with the regressors.
    pub desired: Vec<f64>,
    pub noise_variance: f64,
}

pub fn generate_run_data(config: &ExperimentConfig, run_seed: u64) -> Result<RunData> {
    let s = generate_source(config.sample_count, derive_seed(run_seed, "source", &[]));
    let z = apply_channel(&s);
    let power = z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64;
    let noise_variance = config.noise.variance(power);
    let u = observe(&z, config.node_count, noise_variance, derive_seed(run_seed, "noise", &[]))?;
    let t = config.embedding_length;
    let regressors = u.iter().map(|ul| embed(ul, t)).collect::<Result<Vec<_>>>()?;
    Ok(RunData { regressors, desired: z[t - 1..].to_vec(), noise_variance })
}

enum Runner {
    Lms(LinearFilterState),
    DiffusionLms(LinearFilterState),
    Rls(RlsState),
    DiffusionRls(RlsState),
    Klms(Vec<KernelDictionary>),
    DiffusionKlms(Box<DiffusionKlmsState>),
}

impl Runner {
    fn new(config: &ExperimentConfig, graph: &NetworkGraph, algorithm: Algorithm) -> Result<Self> {
        let n = graph.node_count();
        let t = config.embedding_length;
        Ok(match algorithm {
            Algorithm::Lms => Runner::Lms(LinearFilterState::new(n, t, config.mu_linear)?),
            Algorithm::DiffusionLms => Runner::DiffusionLms(LinearFilterState::new(n, t, config.mu_linear)?),
            Algorithm::Rls => Runner::Rls(RlsState::new(n, t, config.forgetting, config.rls_initial)?),
            Algorithm::DiffusionRls => {
                Runner::DiffusionRls(RlsState::new(n, t, config.forgetting, config.rls_initial)?)
            }
            Algorithm::Klms => Runner::Klms(
                (0..n)
                    .map(|_| KernelDictionary::new(config.kernel, config.mu, 1, t, config.dictionary_budget))
                    .collect::<Result<_>>()?,
            ),
            Algorithm::DiffusionKlms => Runner::DiffusionKlms(Box::new(DiffusionKlmsState::new(
                graph.clone(),
                config.kernel,
                config.mu,
                t,
                config.combination,
                config.dictionary_budget,
            )?)),
        })
    }

    /// A-priori errors of every node for one iteration.
    fn step(
        &mut self,
        graph: &NetworkGraph,
        mode: DiffusionMode,
        xs: &[Vec<f64>],
        ds: &[f64],
    ) -> Result<Vec<f64>> {
        match self {
            Runner::Lms(s) => (0..xs.len()).map(|l| s.lms_step(l, &xs[l], ds[l])).collect(),
            Runner::DiffusionLms(s) => s.diffusion_lms_step(graph, xs, ds, mode),
            Runner::Rls(s) => (0..xs.len()).map(|l| s.rls_step(l, &xs[l], ds[l])).collect(),
            Runner::DiffusionRls(s) => s.diffusion_rls_step(graph, xs, ds),
            Runner::Klms(dicts) => dicts.iter_mut().zip(xs).zip(ds).map(|((k, x), &d)| k.klms_update(x, d)).collect(),
            Runner::DiffusionKlms(s) => Ok(s.dklms_step(xs, ds)?.raw_errors),
        }
    }
}

/// Network-averaged squared a-priori error per iteration for one algorithm
/// on one run's data. After a numerical breakdown the rest of the trace is
/// `+∞`.
pub fn run_algorithm(
    config: &ExperimentConfig,
    graph: &NetworkGraph,
    data: &RunData,
    algorithm: Algorithm,
) -> Result<Vec<f64>> {
    let n = graph.node_count();
    let len = data.desired.len();
    let mut runner = Runner::new(config, graph, algorithm)?;
    let mut trace = Vec::with_capacity(len);
    let mut xs: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut ds = vec![0.0; n];
    for k in 0..len {
        for (x, node) in xs.iter_mut().zip(&data.regressors) {
            x.clone_from(&node[k]);
        }
        ds.fill(data.desired[k]);
        match runner.step(graph, config.diffusion_mode, &xs, &ds) {
            Ok(errors) => {
                let sq = errors.iter().map(|e| e * e).sum::<f64>() / n as f64;
                trace.push(sq);
            }
            Err(Error::NumericalBreakdown(_)) => {
                trace.resize(len, f64::INFINITY);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(trace)
}

/// Traces of every configured algorithm for one Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTraces {
    pub run_seed: u64,
    pub noise_variance: f64,
    /// In `config.algorithms` order.
    pub traces: Vec<Vec<f64>>,
}

pub fn run_single(config: &ExperimentConfig, graph: &NetworkGraph, run: usize) -> Result<RunTraces> {
    let run_seed = config.run_seed(run);
    let data = generate_run_data(config, run_seed)?;
    let traces = config
        .algorithms
        .iter()
        .map(|&alg| run_algorithm(config, graph, &data, alg))
        .collect::<Result<Vec<_>>>()?;
    Ok(RunTraces { run_seed, noise_variance: data.noise_variance, traces })
}

/// Every Monte Carlo run, in run order. Runs execute concurrently.
pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<Vec<RunTraces>> {
    config.validate()?;
    let graph = config.graph()?;
    (0..config.monte_carlo_runs).into_par_iter().map(|r| run_single(config, &graph, r)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMetadata {
    pub master_seed: u64,
    pub run_seeds: Vec<u64>,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseTrace {
    pub algorithm: Algorithm,
    pub values: Vec<f64>,
    pub metadata: TraceMetadata,
}

/// Averages per-run traces in run order.
pub fn aggregate(config: &ExperimentConfig, runs: &[RunTraces]) -> Vec<MseTrace> {
    let metadata = TraceMetadata {
        master_seed: config.master_seed,
        run_seeds: runs.iter().map(|r| r.run_seed).collect(),
        config_hash: config.config_hash(),
    };
    let count = runs.len() as f64;
    config
        .algorithms
        .iter()
        .enumerate()
        .map(|(i, &algorithm)| {
            let len = runs.first().map_or(0, |r| r.traces[i].len());
            let mut values = vec![0.0; len];
            for run in runs {
                for (acc, v) in values.iter_mut().zip(&run.traces[i]) {
                    *acc += v;
                }
            }
            values.iter_mut().for_each(|v| *v /= count);
            MseTrace { algorithm, values, metadata: metadata.clone() }
        })
        .collect()
}

/// One averaged trace per configured algorithm.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MseTrace>> {
    let runs = run_monte_carlo(config)?;
    Ok(aggregate(config, &runs))
}

/// Mean of the last `⌈tail_fraction · len⌉` values.
pub fn mse_floor(trace: &[f64], tail_fraction: f64) -> Result<f64> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("tail fraction must lie in (0, 1], got {tail_fraction}")));
    }
    let count = ((tail_fraction * trace.len() as f64).ceil() as usize).clamp(1, trace.len());
    let tail = &trace[trace.len() - count..];
    Ok(tail.iter().sum::<f64>() / count as f64)
}

/// One snapshot of the network's data stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub regressors: Vec<Vec<f64>>,
    pub desired: f64,
}

/// Endless stream of snapshots from the experiment's data model, used to
/// estimate kernel moments. With an SNR setting the noise variance follows
/// the population power of the channel output.
#[derive(Debug, Clone)]
pub struct DataStream {
    rng: rand_chacha::ChaCha8Rng,
    std: f64,
    /// `[node]` most-recent-first windows.
    windows: Vec<Vec<f64>>,
    primed: bool,
}

impl DataStream {
    pub fn new(config: &ExperimentConfig, seed: u64) -> Self {
        let t = config.embedding_length;
        Self {
            rng: rng_from_seed(seed),
            std: config.noise.variance(clean_power()).max(0.0).sqrt(),
            windows: vec![vec![0.0; t]; config.node_count],
            primed: false,
        }
    }

    fn advance(&mut self) -> f64 {
        let s = if self.rng.random::<bool>() { 1.0 } else { -1.0 };
        let z = s - 0.9 * s * s;
        for w in &mut self.windows {
            w.rotate_right(1);
            let v: f64 = self.rng.sample(StandardNormal);
            w[0] = z + self.std * v;
        }
        z
    }
}

impl Iterator for DataStream {
    type Item = Snapshot;

    fn next(&mut self) -> Option<Snapshot> {
        if !self.primed {
            let t = self.windows.first().map_or(1, Vec::len);
            for _ in 1..t {
                self.advance();
            }
            self.primed = true;
        }
        let desired = self.advance();
        Some(Snapshot { regressors: self.windows.clone(), desired })
    }
}

/// Kernel moments of every node, estimated from the config's data model.
pub fn node_moments(config: &ExperimentConfig, graph: &NetworkGraph, samples: usize) -> Result<Vec<KernelMoments>> {
    let seed = derive_seed(config.master_seed, "moments", &[]);
    (0..graph.node_count())
        .map(|q| {
            let stream = DataStream::new(config, seed).map(|s| s.regressors);
            estimate_moments(graph, q, &config.kernel, config.combination, stream, samples)
        })
        .collect()
}

/// Field-wise mean of per-node moments.
pub fn mean_moments(moments: &[KernelMoments]) -> KernelMoments {
    let n = moments.len() as f64;
    KernelMoments {
        g_mean: moments.iter().map(|m| m.g_mean).sum::<f64>() / n,
        g_abs_mean: moments.iter().map(|m| m.g_abs_mean).sum::<f64>() / n,
        g_sq_mean: moments.iter().map(|m| m.g_sq_mean).sum::<f64>() / n,
        sample_count: moments.iter().map(|m| m.sample_count).sum(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepSweepRow {
    pub mu: f64,
    /// Steady-state misadjustment `(μσ²/2) E[|g|]`.
    pub predicted_floor_eq21: f64,
    /// Fixed point of the transient recursion.
    pub predicted_floor_fixedpoint: f64,
    pub empirical_floor: f64,
}

/// Diffusion-KLMS floor, empirical and predicted, at each step size.
pub fn sweep_step_size(config: &ExperimentConfig, step_sizes: &[f64]) -> Result<Vec<StepSweepRow>> {
    if step_sizes.is_empty() {
        return Err(invalid("sweep.step_sizes must not be empty"));
    }
    config.validate()?;
    let graph = config.graph()?;
    let moments = node_moments(config, &graph, config.analysis.moment_samples)?;
    let noise = config.noise.variance(clean_power());
    step_sizes
        .iter()
        .map(|&mu| {
            let cfg = ExperimentConfig { mu, algorithms: vec![Algorithm::DiffusionKlms], ..config.clone() };
            let trace = run_experiment(&cfg)?.remove(0);
            let n = moments.len() as f64;
            let mut eq21 = 0.0;
            let mut fixed = 0.0;
            for m in &moments {
                eq21 += steady_state_mse(m, mu, noise)?;
                fixed += recursion_fixed_point(m, mu, noise)?;
            }
            Ok(StepSweepRow {
                mu,
                predicted_floor_eq21: eq21 / n,
                predicted_floor_fixedpoint: fixed / n,
                empirical_floor: mse_floor(&trace.values, config.tail_fraction)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeSweepRow {
    pub size: usize,
    pub snr_db: f64,
    pub mean_floor: f64,
    pub std_floor: f64,
    pub theory_floor: f64,
}

/// Diffusion-KLMS floor versus network size and SNR, averaged over random
/// combining matrices. Draw `d` uses the same source and noise seeds at
/// every size and SNR.
pub fn sweep_network_size(
    base: &ExperimentConfig,
    sizes: &[usize],
    snr_db: &[f64],
    matrix_draws: usize,
) -> Result<Vec<SizeSweepRow>> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(invalid("sweep.sizes must be nonempty with every size >= 1"));
    }
    if snr_db.is_empty() {
        return Err(invalid("sweep.snr_db must not be empty"));
    }
    if matrix_draws == 0 {
        return Err(invalid("sweep.matrix_draws must be >= 1"));
    }
    let master = base.master_seed;
    let mut rows = Vec::new();
    for &size in sizes {
        for &snr in snr_db {
            let draws = (0..matrix_draws)
                .into_par_iter()
                .map(|d| {
                    let idx = [size as u64, d as u64];
                    let cfg = ExperimentConfig {
                        node_count: size,
                        a: MatrixChoice::Explicit(StochasticMatrix::random(size, derive_seed(master, "sweep-a", &idx))?),
                        c: MatrixChoice::Explicit(StochasticMatrix::random(size, derive_seed(master, "sweep-c", &idx))?),
                        noise: NoiseLevel::SnrDb(snr),
                        monte_carlo_runs: 1,
                        master_seed: derive_seed(master, "sweep-data", &[d as u64]),
                        algorithms: vec![Algorithm::DiffusionKlms],
                        ..base.clone()
                    };
                    cfg.validate()?;
                    let graph = cfg.graph()?;
                    let run = run_single(&cfg, &graph, 0)?;
                    let floor = mse_floor(&run.traces[0], cfg.tail_fraction)?;
                    let moments = mean_moments(&node_moments(&cfg, &graph, cfg.sweep.moment_samples)?);
                    let theory = steady_state_mse(&moments, cfg.mu, run.noise_variance)?;
                    Ok((floor, theory))
                })
                .collect::<Result<Vec<(f64, f64)>>>()?;
            let n = draws.len() as f64;
            let mean_floor = draws.iter().map(|d| d.0).sum::<f64>() / n;
            let var = if draws.len() > 1 {
                draws.iter().map(|d| (d.0 - mean_floor).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            rows.push(SizeSweepRow {
                size,
                snr_db: snr,
                mean_floor,
                std_floor: var.sqrt(),
                theory_floor: draws.iter().map(|d| d.1).sum::<f64>() / n,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransientPrediction {
    pub curve: TheoreticalCurve,
    pub moments: KernelMoments,
    pub noise_variance: f64,
}

/// Predicted diffusion-KLMS learning curve for the config's step size,
/// starting from the mean power of the desired signal.
pub fn predict_transient(config: &ExperimentConfig) -> Result<TransientPrediction> {
    config.validate()?;
    let graph = config.graph()?;
    let samples = config.analysis.moment_samples;
    let moments = mean_moments(&node_moments(config, &graph, samples)?);
    let stream = DataStream::new(config, derive_seed(config.master_seed, "initial", &[]));
    let initial = stream.take(samples).map(|s| s.desired * s.desired).sum::<f64>() / samples as f64;
    let noise_variance = config.noise.variance(clean_power());
    let steps = config.analysis.transient_steps.unwrap_or(config.trace_length().saturating_sub(1).max(1));
    let curve = transient_curve(&moments, config.mu, noise_variance, initial, steps)?;
    Ok(TransientPrediction { curve, moments, noise_variance })
}

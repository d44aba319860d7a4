//! TOML experiment configuration and figure presets.
//!
//! A document may name a `preset`; every key it sets then overrides the
//! preset's value. Unknown keys are rejected.
//!
//! ```toml
//! preset = "fig1"
//!
//! [network]
//! nodes = 2
//! a = [[0.666, 0.333], [0.333, 0.666]]   # or "uniform", or "random:<seed>"
//! c = "uniform"
//!
//! [filter]
//! mu = 0.2
//! ```

use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::kernels::{Combination, KernelSpec};
use crate::linear::DiffusionMode;
use crate::network::StochasticMatrix;
use crate::simulation::{Algorithm, ExperimentConfig, MatrixChoice, NoiseLevel};

/// Documented keys, their meaning and default (the `fig1` values).
pub const KEYS: &[(&str, &str)] = &[
    ("preset", "fig1 | fig2 | fig3 | fig4 | fig5 (default: none, fig1 values)"),
    ("network.nodes", "number of nodes (2)"),
    ("network.a", "combination matrix: \"uniform\", \"random:<seed>\" or nested rows (\"uniform\")"),
    ("network.c", "adaptation matrix, same forms as network.a (\"uniform\")"),
    ("network.diffusion_mode", "atc | cta, for diffusion LMS (atc)"),
    ("kernel.family", "gaussian | polynomial (gaussian)"),
    ("kernel.sigma", "gaussian kernel width (0.1)"),
    ("kernel.normalized", "scale gaussian by 1/sqrt(2 pi sigma^2) (true)"),
    ("kernel.degree", "polynomial degree (2)"),
    ("kernel.offset", "polynomial offset (1.0)"),
    ("filter.mu", "kernel filter step size (0.2)"),
    ("filter.mu_linear", "LMS step size (0.02)"),
    ("filter.lambda", "RLS forgetting factor (0.999)"),
    ("filter.rls_initial", "RLS initial inverse correlation scale (100)"),
    ("filter.dictionary_budget", "max kernel expansion size, or \"unbounded\" (unbounded)"),
    ("filter.combination", "combined-data | combined-kernels (combined-data)"),
    ("simulation.noise_variance", "observation noise variance (0.16); excludes snr_db"),
    ("simulation.snr_db", "observation SNR in dB; excludes noise_variance"),
    ("simulation.embedding_length", "regressor length T (1)"),
    ("simulation.samples", "source samples per run (2000)"),
    ("simulation.runs", "Monte Carlo runs (20)"),
    ("simulation.seed", "master seed (1)"),
    ("simulation.algorithms", "list of lms, diffusion-lms, rls, diffusion-rls, klms, diffusion-klms (all)"),
    ("simulation.tail_fraction", "share of the trace averaged into the floor (0.2)"),
    ("sweep.step_sizes", "step sizes for sweep-step-size ([0.05, 0.1, 0.15, 0.2, 0.25])"),
    ("sweep.sizes", "network sizes for sweep-nodes ([1, 2, 4, 8])"),
    ("sweep.snr_db", "SNRs for sweep-nodes ([10, 20])"),
    ("sweep.matrix_draws", "random (A, C) draws per size and SNR (100)"),
    ("sweep.moment_samples", "snapshots per node for each draw's predicted floor (500)"),
    ("analysis.moment_samples", "snapshots per node for kernel moments (20000)"),
    ("analysis.transient_steps", "length of the predicted curve (trace length)"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::Fig4, Preset::Fig5];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == text)
    }

    pub fn config(&self) -> ExperimentConfig {
        let base = ExperimentConfig::default();
        match self {
            Preset::Fig1 => base,
            Preset::Fig2 => {
                let rows = vec![vec![0.666, 0.333], vec![0.333, 0.666]];
                let a = StochasticMatrix::from_rows_renormalized(&rows).expect("printed matrix is near stochastic");
                ExperimentConfig { a: MatrixChoice::Explicit(a), ..base }
            }
            Preset::Fig3 => ExperimentConfig { algorithms: vec![Algorithm::DiffusionKlms], ..base },
            Preset::Fig4 => ExperimentConfig {
                mu: 0.12,
                monte_carlo_runs: 50,
                algorithms: vec![Algorithm::DiffusionKlms],
                ..base
            },
            Preset::Fig5 => ExperimentConfig {
                noise: NoiseLevel::SnrDb(10.0),
                sample_count: 1000,
                algorithms: vec![Algorithm::DiffusionKlms],
                ..base
            },
        }
    }
}

/// Parses a document, starting from its `preset` key or the defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    parse_config_with_preset(text, None)
}

/// Parses a document on top of `preset`, which takes precedence over the
/// document's own `preset` key.
pub fn parse_config_with_preset(text: &str, preset: Option<Preset>) -> Result<ExperimentConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| Error::Parse(e.to_string().trim_end().to_string()))?;
    let doc = Document { text, table: &table };
    doc.check_keys()?;

    let preset = match (preset, doc.get("", "preset")) {
        (Some(p), _) => Some(p),
        (None, Some(v)) => {
            let name = doc.string("", "preset", v)?;
            Some(Preset::parse(name).ok_or_else(|| doc.err("", "preset", &format!("unknown preset `{name}`")))?)
        }
        (None, None) => None,
    };
    let mut cfg = preset.map_or_else(ExperimentConfig::default, |p| p.config());
    doc.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

struct Document<'a> {
    text: &'a str,
    table: &'a Table,
}

impl<'a> Document<'a> {
    fn check_keys(&self) -> Result<()> {
        for (key, value) in self.table {
            match value {
                Value::Table(inner) => {
                    for sub in inner.keys() {
                        let full = format!("{key}.{sub}");
                        if !KEYS.iter().any(|(k, _)| *k == full) {
                            return Err(self.err(key, sub, "unknown key"));
                        }
                    }
                }
                _ if key == "preset" => {}
                _ => return Err(self.err("", key, "unknown key")),
            }
        }
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&'a Value> {
        if section.is_empty() {
            return self.table.get(key);
        }
        self.table.get(section)?.as_table()?.get(key)
    }

    /// Line of `key` inside `[section]`, or of a dotted `section.key`.
    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        let mut current = String::new();
        let dotted = format!("{section}.{key}");
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                current = name.trim().to_string();
                continue;
            }
            let Some((lhs, _)) = line.split_once('=') else { continue };
            let lhs = lhs.trim();
            if (current == section && lhs == key) || (current.is_empty() && lhs == dotted) {
                return Some(i + 1);
            }
        }
        None
    }

    fn err(&self, section: &str, key: &str, msg: &str) -> Error {
        let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        match self.line_of(section, key) {
            Some(line) => Error::Parse(format!("line {line}, key `{full}`: {msg}")),
            None => Error::Parse(format!("key `{full}`: {msg}")),
        }
    }

    fn string(&self, section: &str, key: &str, v: &'a Value) -> Result<&'a str> {
        v.as_str().ok_or_else(|| self.err(section, key, "expected a string"))
    }

    fn float(&self, section: &str, key: &str, v: &Value) -> Result<f64> {
        match v {
            Value::Float(f) => Ok(*f),
            Value::Integer(i) => Ok(*i as f64),
            _ => Err(self.err(section, key, "expected a number")),
        }
    }

    fn uint(&self, section: &str, key: &str, v: &Value) -> Result<u64> {
        match v {
            Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            _ => Err(self.err(section, key, "expected a nonnegative integer")),
        }
    }

    fn boolean(&self, section: &str, key: &str, v: &Value) -> Result<bool> {
        v.as_bool().ok_or_else(|| self.err(section, key, "expected true or false"))
    }

    fn array(&self, section: &str, key: &str, v: &'a Value) -> Result<&'a Vec<Value>> {
        v.as_array().ok_or_else(|| self.err(section, key, "expected an array"))
    }

    fn floats(&self, section: &str, key: &str, v: &Value) -> Result<Vec<f64>> {
        self.array(section, key, v)?.iter().map(|x| self.float(section, key, x)).collect()
    }

    fn matrix(&self, key: &str, v: &Value) -> Result<MatrixChoice> {
        if let Some(s) = v.as_str() {
            if s == "uniform" {
                return Ok(MatrixChoice::Uniform);
            }
            if let Some(seed) = s.strip_prefix("random:") {
                let seed = seed.trim().parse().map_err(|_| self.err("network", key, "bad seed in `random:<seed>`"))?;
                return Ok(MatrixChoice::Random { seed });
            }
            return Err(self.err("network", key, "expected \"uniform\", \"random:<seed>\" or an array of rows"));
        }
        let rows = self
            .array("network", key, v)?
            .iter()
            .map(|row| self.floats("network", key, row))
            .collect::<Result<Vec<_>>>()?;
        let m = StochasticMatrix::from_rows_renormalized(&rows)
            .map_err(|e| Error::ConfigInvalid(format!("network.{key} is not row-stochastic: {e}")))?;
        Ok(MatrixChoice::Explicit(m))
    }

    fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        self.apply_network(cfg)?;
        self.apply_kernel(cfg)?;
        self.apply_filter(cfg)?;
        self.apply_simulation(cfg)?;
        self.apply_sweep(cfg)
    }

    fn apply_network(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        const S: &str = "network";
        if let Some(v) = self.get(S, "nodes") {
            cfg.node_count = self.uint(S, "nodes", v)? as usize;
        }
        if let Some(v) = self.get(S, "a") {
            cfg.a = self.matrix("a", v)?;
        }
        if let Some(v) = self.get(S, "c") {
            cfg.c = self.matrix("c", v)?;
        }
        if let Some(v) = self.get(S, "diffusion_mode") {
            let s = self.string(S, "diffusion_mode", v)?;
            cfg.diffusion_mode =
                DiffusionMode::parse(s).ok_or_else(|| self.err(S, "diffusion_mode", "expected atc or cta"))?;
        }
        Ok(())
    }

    fn apply_kernel(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        const S: &str = "kernel";
        if let Some(v) = self.get(S, "family") {
            cfg.kernel = match (self.string(S, "family", v)?, cfg.kernel) {
                ("gaussian", k @ KernelSpec::Gaussian { .. }) | ("polynomial", k @ KernelSpec::Polynomial { .. }) => k,
                ("gaussian", _) => KernelSpec::Gaussian { sigma: 0.1, normalized: true },
                ("polynomial", _) => KernelSpec::Polynomial { degree: 2, offset: 1.0 },
                _ => return Err(self.err(S, "family", "expected gaussian or polynomial")),
            };
        }
        let wrong_family = |key: &str| Error::ConfigInvalid(format!("kernel.{key} does not apply to this kernel family"));
        match &mut cfg.kernel {
            KernelSpec::Gaussian { sigma, normalized } => {
                if let Some(v) = self.get(S, "sigma") {
                    *sigma = self.float(S, "sigma", v)?;
                }
                if let Some(v) = self.get(S, "normalized") {
                    *normalized = self.boolean(S, "normalized", v)?;
                }
                for key in ["degree", "offset"] {
                    if self.get(S, key).is_some() {
                        return Err(wrong_family(key));
                    }
                }
            }
            KernelSpec::Polynomial { degree, offset } => {
                if let Some(v) = self.get(S, "degree") {
                    *degree = u32::try_from(self.uint(S, "degree", v)?)
                        .map_err(|_| self.err(S, "degree", "degree too large"))?;
                }
                if let Some(v) = self.get(S, "offset") {
                    *offset = self.float(S, "offset", v)?;
                }
                for key in ["sigma", "normalized"] {
                    if self.get(S, key).is_some() {
                        return Err(wrong_family(key));
                    }
                }
            }
        }
        Ok(())
    }

    fn apply_filter(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        const S: &str = "filter";
        if let Some(v) = self.get(S, "mu") {
            cfg.mu = self.float(S, "mu", v)?;
        }
        if let Some(v) = self.get(S, "mu_linear") {
            cfg.mu_linear = self.float(S, "mu_linear", v)?;
        }
        if let Some(v) = self.get(S, "lambda") {
            cfg.forgetting = self.float(S, "lambda", v)?;
        }
        if let Some(v) = self.get(S, "rls_initial") {
            cfg.rls_initial = self.float(S, "rls_initial", v)?;
        }
        if let Some(v) = self.get(S, "dictionary_budget") {
            cfg.dictionary_budget = match v.as_str() {
                Some("unbounded") => None,
                _ => Some(self.uint(S, "dictionary_budget", v)? as usize),
            };
        }
        if let Some(v) = self.get(S, "combination") {
            let s = self.string(S, "combination", v)?;
            cfg.combination = Combination::parse(s)
                .ok_or_else(|| self.err(S, "combination", "expected combined-data or combined-kernels"))?;
        }
        Ok(())
    }

    fn apply_simulation(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        const S: &str = "simulation";
        match (self.get(S, "noise_variance"), self.get(S, "snr_db")) {
            (Some(_), Some(_)) => {
                return Err(Error::ConfigInvalid(
                    "exactly one of simulation.noise_variance and simulation.snr_db may be set".into(),
                ))
            }
            (Some(v), None) => cfg.noise = NoiseLevel::Variance(self.float(S, "noise_variance", v)?),
            (None, Some(v)) => cfg.noise = NoiseLevel::SnrDb(self.float(S, "snr_db", v)?),
            (None, None) => {}
        }
        if let Some(v) = self.get(S, "embedding_length") {
            cfg.embedding_length = self.uint(S, "embedding_length", v)? as usize;
        }
        if let Some(v) = self.get(S, "samples") {
            cfg.sample_count = self.uint(S, "samples", v)? as usize;
        }
        if let Some(v) = self.get(S, "runs") {
            cfg.monte_carlo_runs = self.uint(S, "runs", v)? as usize;
        }
        if let Some(v) = self.get(S, "seed") {
            cfg.master_seed = self.uint(S, "seed", v)?;
        }
        if let Some(v) = self.get(S, "algorithms") {
            cfg.algorithms = self
                .array(S, "algorithms", v)?
                .iter()
                .map(|a| {
                    let s = self.string(S, "algorithms", a)?;
                    Algorithm::parse(s).ok_or_else(|| self.err(S, "algorithms", &format!("unknown algorithm `{s}`")))
                })
                .collect::<Result<_>>()?;
        }
        if let Some(v) = self.get(S, "tail_fraction") {
            cfg.tail_fraction = self.float(S, "tail_fraction", v)?;
        }
        Ok(())
    }

    fn apply_sweep(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if let Some(v) = self.get("sweep", "step_sizes") {
            cfg.sweep.step_sizes = self.floats("sweep", "step_sizes", v)?;
        }
        if let Some(v) = self.get("sweep", "sizes") {
            cfg.sweep.sizes = self
                .array("sweep", "sizes", v)?
                .iter()
                .map(|x| self.uint("sweep", "sizes", x).map(|n| n as usize))
                .collect::<Result<_>>()?;
        }
        if let Some(v) = self.get("sweep", "snr_db") {
            cfg.sweep.snr_db = self.floats("sweep", "snr_db", v)?;
        }
        if let Some(v) = self.get("sweep", "matrix_draws") {
            cfg.sweep.matrix_draws = self.uint("sweep", "matrix_draws", v)? as usize;
        }
        if let Some(v) = self.get("sweep", "moment_samples") {
            cfg.sweep.moment_samples = self.uint("sweep", "moment_samples", v)? as usize;
        }
        if let Some(v) = self.get("analysis", "moment_samples") {
            cfg.analysis.moment_samples = self.uint("analysis", "moment_samples", v)? as usize;
        }
        if let Some(v) = self.get("analysis", "transient_steps") {
            cfg.analysis.transient_steps = Some(self.uint("analysis", "transient_steps", v)? as usize);
        }
        Ok(())
    }
}

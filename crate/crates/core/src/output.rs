//! CSV artifacts, the run manifest and optional gnuplot scripts.
//!
//! Floats are written in shortest round-trip form, so identical inputs give
//! byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analysis::TheoreticalCurve;
use crate::error::Result;
use crate::simulation::{ExperimentConfig, MseTrace, SizeSweepRow, StepSweepRow};

pub const TRACES_FILE: &str = "traces.csv";
pub const STEP_SWEEP_FILE: &str = "step_sweep.csv";
pub const SIZE_SWEEP_FILE: &str = "size_sweep.csv";
pub const TRANSIENT_FILE: &str = "transient.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// A table to write.
#[derive(Debug, Clone, Copy)]
pub enum Artifact<'a> {
    Traces(&'a [MseTrace]),
    StepSweep(&'a [StepSweepRow]),
    SizeSweep(&'a [SizeSweepRow]),
    Transient(&'a TheoreticalCurve),
}

impl Artifact<'_> {
    pub fn file_name(&self) -> &'static str {
        match self {
            Artifact::Traces(_) => TRACES_FILE,
            Artifact::StepSweep(_) => STEP_SWEEP_FILE,
            Artifact::SizeSweep(_) => SIZE_SWEEP_FILE,
            Artifact::Transient(_) => TRANSIENT_FILE,
        }
    }

    fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        match self {
            Artifact::Traces(traces) => {
                w.write_record(["iteration", "algorithm", "mse"])?;
                for t in *traces {
                    for (n, v) in t.values.iter().enumerate() {
                        w.write_record([n.to_string(), t.algorithm.tag().to_string(), v.to_string()])?;
                    }
                }
            }
            Artifact::StepSweep(rows) => {
                w.write_record(["mu", "predicted_floor_eq21", "predicted_floor_fixedpoint", "empirical_floor"])?;
                for r in *rows {
                    w.write_record([
                        r.mu.to_string(),
                        r.predicted_floor_eq21.to_string(),
                        r.predicted_floor_fixedpoint.to_string(),
                        r.empirical_floor.to_string(),
                    ])?;
                }
            }
            Artifact::SizeSweep(rows) => {
                w.write_record(["size", "snr_db", "mean_floor", "std_floor", "theory_floor"])?;
                for r in *rows {
                    w.write_record([
                        r.size.to_string(),
                        r.snr_db.to_string(),
                        r.mean_floor.to_string(),
                        r.std_floor.to_string(),
                        r.theory_floor.to_string(),
                    ])?;
                }
            }
            Artifact::Transient(curve) => {
                w.write_record(["n", "predicted_mse"])?;
                for (n, v) in curve.values.iter().enumerate() {
                    w.write_record([n.to_string(), v.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    fn gnuplot(&self) -> String {
        let file = self.file_name();
        match self {
            Artifact::Traces(traces) => {
                let plots: Vec<String> = traces
                    .iter()
                    .map(|t| {
                        let tag = t.algorithm.tag();
                        format!("'{file}' using 1:(strcol(2) eq '{tag}' ? $3 : NaN) with lines title '{tag}'")
                    })
                    .collect();
                format!(
                    "set xlabel 'iteration'\nset ylabel 'MSE'\nset logscale y\nplot {}\n",
                    plots.join(", \\\n     ")
                )
            }
            Artifact::StepSweep(_) => format!(
                "set xlabel 'step size'\nset ylabel 'MSE floor'\nset logscale y\n\
                 plot '{file}' using 1:2 with linespoints title 'misadjustment', \\\n     \
                 '{file}' using 1:3 with linespoints title 'recursion fixed point', \\\n     \
                 '{file}' using 1:4 with linespoints title 'experiment'\n"
            ),
            Artifact::SizeSweep(_) => format!(
                "set xlabel 'nodes'\nset ylabel 'MSE floor'\nset logscale y\n\
                 plot '{file}' using 1:($2 == 10 ? $3 : NaN):4 with yerrorlines title '10 dB', \\\n     \
                 '{file}' using 1:($2 == 20 ? $3 : NaN):4 with yerrorlines title '20 dB'\n"
            ),
            Artifact::Transient(_) => format!(
                "set xlabel 'iteration'\nset ylabel 'MSE'\nset logscale y\n\
                 plot '{file}' using 1:2 with lines title 'predicted'\n"
            ),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    master_seed: u64,
    run_seeds: Vec<u64>,
    files: Vec<&'a str>,
}

/// Writes each artifact as CSV plus `manifest.json` into `output_dir`,
/// creating it if needed. With `script_name`, also writes a gnuplot script
/// of that name for the first artifact. Returns the written paths.
pub fn emit_csv(
    artifacts: &[Artifact<'_>],
    config: &ExperimentConfig,
    output_dir: &Path,
    script_name: Option<&str>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(output_dir)?;
    let mut paths = Vec::new();
    let mut files = Vec::new();
    for artifact in artifacts {
        let path = output_dir.join(artifact.file_name());
        artifact.write(&path)?;
        paths.push(path);
        files.push(artifact.file_name());
    }
    if let (Some(name), Some(first)) = (script_name, artifacts.first()) {
        let path = output_dir.join(name);
        fs::write(&path, first.gnuplot())?;
        paths.push(path);
        files.push(name);
    }
    let manifest = Manifest {
        tool: "dklms",
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config.config_hash(),
        master_seed: config.master_seed,
        run_seeds: (0..config.monte_carlo_runs).map(|r| config.run_seed(r)).collect(),
        files,
    };
    let path = output_dir.join(MANIFEST_FILE);
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(&path, json)?;
    paths.push(path);
    Ok(paths)
}

//! `dklms`: run diffusion kernel LMS experiments and write CSV results.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dklms::config::{self, Preset};
use dklms::simulation::{self, ExperimentConfig};
use dklms::{emit_csv, mse_floor, step_size_range, Artifact, Error};

#[derive(Debug, Parser)]
#[command(name = "dklms", version, about = "Diffusion kernel LMS experiments", after_long_help = config_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every configured algorithm and write averaged learning curves.
    Simulate(Common),
    /// Compare empirical and predicted diffusion-KLMS floors over step sizes.
    SweepStepSize(Common),
    /// Diffusion-KLMS floor versus network size and SNR over random matrices.
    SweepNodes(Common),
    /// Predicted diffusion-KLMS learning curve and step-size range.
    PredictTransient(Common),
    /// Parse and check a configuration without running anything.
    ValidateConfig(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file; see `dklms --help` for keys.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Start from a figure preset; keys in the config file override it.
    #[arg(long, short, value_enum)]
    preset: Option<PresetArg>,
    /// Directory for CSV files and the manifest.
    #[arg(long, short, env = "DKLMS_OUTPUT_DIR", default_value = "dklms-out")]
    output_dir: PathBuf,
    /// Master seed; overrides `simulation.seed`.
    #[arg(long, short)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PresetArg {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Fig1 => Preset::Fig1,
            PresetArg::Fig2 => Preset::Fig2,
            PresetArg::Fig3 => Preset::Fig3,
            PresetArg::Fig4 => Preset::Fig4,
            PresetArg::Fig5 => Preset::Fig5,
        }
    }
}

fn config_help() -> String {
    let mut s = String::from("Configuration keys (defaults in parentheses):\n");
    for (key, doc) in config::KEYS {
        let _ = writeln!(s, "  {key:<28} {doc}");
    }
    s.push_str("\nExit status: 0 success, 1 configuration error, 2 runtime error.");
    s
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Failure> {
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut cfg = config::parse_config_with_preset(&text, common.preset.map(Preset::from))?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    Ok(cfg)
}

fn script_name(common: &Common) -> Option<String> {
    common.preset.map(|p| format!("{}.gp", Preset::from(p).name()))
}

fn write(artifact: Artifact<'_>, cfg: &ExperimentConfig, common: &Common) -> Result<(), Failure> {
    let paths = emit_csv(&[artifact], cfg, &common.output_dir, script_name(common).as_deref())?;
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::ValidateConfig(common) => {
            let cfg = load(&common)?;
            println!(
                "configuration ok: {} nodes, {} runs of {} samples, hash {}",
                cfg.node_count,
                cfg.monte_carlo_runs,
                cfg.sample_count,
                cfg.config_hash()
            );
        }
        Command::Simulate(common) => {
            let cfg = load(&common)?;
            let traces = simulation::run_experiment(&cfg)?;
            for t in &traces {
                println!("{:<15} floor {:.6e}", t.algorithm.tag(), mse_floor(&t.values, cfg.tail_fraction)?);
            }
            write(Artifact::Traces(&traces), &cfg, &common)?;
        }
        Command::SweepStepSize(common) => {
            let cfg = load(&common)?;
            let rows = simulation::sweep_step_size(&cfg, &cfg.sweep.step_sizes)?;
            for r in &rows {
                println!(
                    "mu {:<6} empirical {:.4e}  misadjustment {:.4e}  fixed point {:.4e}",
                    r.mu, r.empirical_floor, r.predicted_floor_eq21, r.predicted_floor_fixedpoint
                );
            }
            write(Artifact::StepSweep(&rows), &cfg, &common)?;
        }
        Command::SweepNodes(common) => {
            let cfg = load(&common)?;
            let rows =
                simulation::sweep_network_size(&cfg, &cfg.sweep.sizes, &cfg.sweep.snr_db, cfg.sweep.matrix_draws)?;
            for r in &rows {
                println!(
                    "size {:<3} snr {:>5} dB  floor {:.4e} ± {:.2e}  theory {:.4e}",
                    r.size, r.snr_db, r.mean_floor, r.std_floor, r.theory_floor
                );
            }
            write(Artifact::SizeSweep(&rows), &cfg, &common)?;
        }
        Command::PredictTransient(common) => {
            let cfg = load(&common)?;
            let p = simulation::predict_transient(&cfg)?;
            let range = step_size_range(&p.moments)?;
            println!(
                "E[g] {:.6}  E[g^2] {:.6}  step size range (0, {:.6})  steady state {:.4e}",
                p.moments.g_mean,
                p.moments.g_sq_mean,
                range.upper,
                dklms::steady_state_mse(&p.moments, cfg.mu, p.noise_variance)?
            );
            write(Artifact::Transient(&p.curve), &cfg, &common)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

//! Diffusion kernel least-mean-squares filtering over networks of nodes.
//!
//! Each node runs a kernel LMS filter whose expansion is built from the
//! combining-matrix blend of its neighbors' data and errors. Alongside the
//! diffusion filter the crate provides the classic linear baselines (LMS,
//! RLS and their diffusion forms), single-node KLMS, theoretical predictors
//! for the learning curve and steady state, and a Monte Carlo harness for
//! nonlinear channel denoising experiments.

// NaN must fail every range check, so bounds are written as `!(x > lo)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod error;
pub mod kernel_filters;
pub mod kernels;
pub mod linear;
pub mod network;
pub mod output;
pub mod seed;
pub mod simulation;

pub use analysis::{
    estimate_moments, steady_state_mse, step_size_range, transient_curve, KernelMoments, StepSizeRange,
    TheoreticalCurve,
};
pub use config::{parse_config, parse_config_with_preset, Preset};
pub use error::{Error, Result};
pub use kernel_filters::{DiffusionKlmsState, DiffusionStep, KernelDictionary};
pub use kernels::{combined_kernel, kernel_eval, Combination, KernelSpec};
pub use linear::{DiffusionMode, LinearFilterState, RlsState};
pub use network::{NetworkGraph, StochasticMatrix};
pub use output::{emit_csv, Artifact};
pub use seed::derive_seed;
pub use simulation::{
    mse_floor, run_experiment, sweep_network_size, sweep_step_size, Algorithm, ExperimentConfig, MatrixChoice,
    MseTrace, NoiseLevel,
};

//! Acceptance suite. Each criterion prints one PASS/FAIL line with the
//! measured quantities; the process exits nonzero if any criterion fails.
//!
//! Run alone with `cargo test -p dklms-core --test acceptance`.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use dklms::analysis::{step_size_range, time_constant};
use dklms::kernels::{combined_kernel, kernel_eval, Combination, KernelSpec};
use dklms::linear::spectral_radius_check;
use dklms::network::{validate_stochastic, NetworkGraph, StochasticMatrix};
use dklms::seed::rng_from_seed;
use dklms::simulation::{
    mean_moments, mse_floor, node_moments, predict_transient, run_experiment, run_monte_carlo, sweep_network_size,
    sweep_step_size, Algorithm, ExperimentConfig,
};
use dklms::{DiffusionKlmsState, Preset};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn floors(config: &ExperimentConfig) -> Vec<Vec<f64>> {
    // [algorithm][run]
    let runs = run_monte_carlo(config).expect("experiment runs");
    (0..config.algorithms.len())
        .map(|i| runs.iter().map(|r| mse_floor(&r.traces[i], config.tail_fraction).unwrap()).collect())
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

struct Fig1 {
    lms: Vec<f64>,
    dlms: Vec<f64>,
    drls: Vec<f64>,
    klms: Vec<f64>,
    dklms: Vec<f64>,
}

fn fig1_floors() -> Fig1 {
    let cfg = ExperimentConfig {
        algorithms: vec![
            Algorithm::Lms,
            Algorithm::DiffusionLms,
            Algorithm::DiffusionRls,
            Algorithm::Klms,
            Algorithm::DiffusionKlms,
        ],
        ..Preset::Fig1.config()
    };
    let mut f = floors(&cfg).into_iter();
    let mut next = || f.next().unwrap();
    Fig1 { lms: next(), dlms: next(), drls: next(), klms: next(), dklms: next() }
}

fn ordering(f: &Fig1) -> Outcome {
    let ordered = |r: usize| f.dklms[r] < f.klms[r] && f.klms[r] < f.lms[r] && f.dklms[r] < f.dlms[r];
    let runs = f.dklms.len();
    let held = (0..runs).filter(|&r| ordered(r)).count();
    let (d, k, l, dl) = (mean(&f.dklms), mean(&f.klms), mean(&f.lms), mean(&f.dlms));
    let mean_ok = d < k && k < l && d < dl;
    outcome(
        mean_ok && held * 20 >= 19 * runs,
        format!("mean floors dklms {d:.4e} < klms {k:.4e} < lms {l:.4e}, dlms {dl:.4e}; ordering held in {held}/{runs} runs"),
    )
}

fn gains(f: &Fig1) -> Outcome {
    let d = mean(&f.dklms);
    let lms_ratio = mean(&f.lms) / d;
    let dlms_ratio = mean(&f.dlms) / d;
    let klms_ratio = mean(&f.klms) / d;
    outcome(
        lms_ratio >= 10.0 && klms_ratio >= 2.0,
        format!("lms/dklms {lms_ratio:.1}x (>= 10), dlms/dklms {dlms_ratio:.1}x, klms/dklms {klms_ratio:.2}x (>= 2)"),
    )
}

fn linear_failure(f: &Fig1) -> Outcome {
    let d = mean(&f.dklms);
    let ratios = [mean(&f.lms) / d, mean(&f.dlms) / d, mean(&f.drls) / d];
    outcome(
        ratios.iter().all(|&r| r > 10.0),
        format!("floor/dklms: lms {:.1}x, dlms {:.1}x, drls {:.1}x (each > 10)", ratios[0], ratios[1], ratios[2]),
    )
}

fn steady_state_theory() -> Outcome {
    let cfg = Preset::Fig3.config();
    let rows = sweep_step_size(&cfg, &cfg.sweep.step_sizes).expect("sweep runs");
    let mut agree = true;
    let mut parts = Vec::new();
    for r in &rows {
        let ratio = r.empirical_floor / r.predicted_floor_fixedpoint;
        agree &= (1.0 / 3.0..=3.0).contains(&ratio);
        parts.push(format!(
            "mu {}: theory {:.3e} exp {:.3e} ({:.2}x)",
            r.mu, r.predicted_floor_fixedpoint, r.empirical_floor, ratio
        ));
    }
    let increasing = |v: Vec<f64>| v.windows(2).all(|w| w[1] > w[0]);
    let theory_up = increasing(rows.iter().map(|r| r.predicted_floor_fixedpoint).collect());
    let exp_up = increasing(rows.iter().map(|r| r.empirical_floor).collect());
    outcome(
        agree && theory_up && exp_up,
        format!(
            "{}; within 3x: {agree}; theory increasing: {theory_up}; experiment increasing: {exp_up}",
            parts.join(", ")
        ),
    )
}

fn transient_match() -> Outcome {
    let cfg = Preset::Fig4.config();
    let empirical = run_experiment(&cfg).expect("experiment runs").remove(0).values;
    let predicted = predict_transient(&cfg).expect("prediction").curve.values;
    let Some(n_tau) = time_constant(&empirical) else {
        return outcome(false, "empirical trace never reaches e^-1 of its start".into());
    };
    let mut worst = (0usize, 0.0f64);
    for n in 0..=n_tau {
        let rel = (predicted[n] - empirical[n]).abs() / empirical[n];
        if rel > worst.1 {
            worst = (n, rel);
        }
    }
    let n = worst.0;
    outcome(
        worst.1 <= 0.5,
        format!(
            "n_tau {n_tau}; worst relative gap {:.2} at n={n} (theory {:.3e}, exp {:.3e}); limit 0.5",
            worst.1, predicted[n], empirical[n]
        ),
    )
}

fn network_size() -> Outcome {
    let cfg = Preset::Fig5.config();
    let rows = sweep_network_size(&cfg, &cfg.sweep.sizes, &cfg.sweep.snr_db, cfg.sweep.matrix_draws).expect("sweep");
    let mut non_increasing = true;
    let mut snr_ordered = true;
    let mut parts = Vec::new();
    for &snr in &cfg.sweep.snr_db {
        let series: Vec<_> = rows.iter().filter(|r| r.snr_db == snr).collect();
        for w in series.windows(2) {
            let pooled = ((w[0].std_floor.powi(2) + w[1].std_floor.powi(2)) / 2.0).sqrt();
            non_increasing &= w[1].mean_floor <= w[0].mean_floor + pooled;
        }
        parts.push(format!(
            "{snr} dB: {}",
            series.iter().map(|r| format!("n={} {:.3e}", r.size, r.mean_floor)).collect::<Vec<_>>().join(" ")
        ));
    }
    for &size in &cfg.sweep.sizes {
        let at = |snr: f64| rows.iter().find(|r| r.size == size && r.snr_db == snr).unwrap().mean_floor;
        snr_ordered &= at(20.0) < at(10.0);
    }
    outcome(
        non_increasing && snr_ordered,
        format!("{}; non-increasing: {non_increasing}; 20 dB below 10 dB: {snr_ordered}", parts.join("; ")),
    )
}

fn step_size_bound() -> Outcome {
    let base = ExperimentConfig { algorithms: vec![Algorithm::DiffusionKlms], ..Preset::Fig1.config() };
    let graph = base.graph().unwrap();
    let moments = mean_moments(&node_moments(&base, &graph, base.analysis.moment_samples).unwrap());
    let upper = step_size_range(&moments).unwrap().upper;

    let half = ExperimentConfig { mu: 0.5 * upper, ..base.clone() };
    let converged = run_monte_carlo(&half)
        .unwrap()
        .iter()
        .filter(|r| mse_floor(&r.traces[0], half.tail_fraction).unwrap() < r.traces[0][0])
        .count();
    let triple = ExperimentConfig { mu: 3.0 * upper, ..base };
    let diverged = run_monte_carlo(&triple)
        .unwrap()
        .iter()
        .filter(|r| r.traces[0].last().unwrap() > &r.traces[0][0])
        .count();
    let runs = half.monte_carlo_runs;
    outcome(
        converged == runs && diverged >= 18,
        format!(
            "upper bound {upper:.5}; mu={:.4} converged {converged}/{runs}; mu={:.4} diverged {diverged}/{runs} (>= 18)",
            0.5 * upper,
            3.0 * upper
        ),
    )
}

fn oracle_suite() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            failures.push(what.to_string());
        }
    };

    // single-node reductions, trace-exact
    for combination in [Combination::CombinedData, Combination::CombinedKernels] {
        let cfg = ExperimentConfig {
            node_count: 1,
            sample_count: 400,
            monte_carlo_runs: 3,
            combination,
            ..ExperimentConfig::default()
        };
        let t = run_experiment(&cfg).unwrap();
        let tag = |a: Algorithm| t.iter().find(|x| x.algorithm == a).unwrap().values.clone();
        check(tag(Algorithm::Lms) == tag(Algorithm::DiffusionLms), "diffusion-lms reduction");
        check(tag(Algorithm::Rls) == tag(Algorithm::DiffusionRls), "diffusion-rls reduction");
        check(tag(Algorithm::Klms) == tag(Algorithm::DiffusionKlms), "diffusion-klms reduction");
    }

    // prediction against a brute-force double sum
    let mut rng = rng_from_seed(2024);
    let mut worst = 0.0f64;
    for trial in 0..20u64 {
        let n = 1 + (trial as usize % 4);
        let dim = 1 + (trial as usize % 3);
        let a = StochasticMatrix::random(n, 100 + trial).unwrap();
        let c = StochasticMatrix::random(n, 200 + trial).unwrap();
        let graph = NetworkGraph::from_matrices(a, c.clone()).unwrap();
        let kernel = KernelSpec::gaussian(0.5 + 0.1 * trial as f64).unwrap();
        let mut state =
            DiffusionKlmsState::new(graph, kernel, 0.3, dim, Combination::CombinedData, None).unwrap();
        let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<f64>> {
            (0..n).map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect()).collect()
        };
        for _ in 0..15 {
            let xs = draw(&mut rng);
            let ds: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            state.dklms_step(&xs, &ds).unwrap();
        }
        let probe = draw(&mut rng);
        let dict = state.dictionary();
        for q in 0..n {
            let mix = |vs: &[&[f64]]| -> Vec<f64> {
                (0..dim).map(|k| (0..n).map(|l| c.get(q, l) * vs[l][k]).sum()).collect()
            };
            let probe_refs: Vec<&[f64]> = probe.iter().map(Vec::as_slice).collect();
            let mixed_probe = mix(&probe_refs);
            let mut brute = 0.0;
            for i in 0..dict.len() {
                let center = mix(&dict.snapshot(i));
                brute += dict.coefficient(i, q) * kernel_eval(&kernel, &center, &mixed_probe).unwrap();
            }
            brute *= 0.3;
            let fast = state.dklms_predict(q, &probe).unwrap();
            worst = worst.max((fast - brute).abs() / brute.abs().max(1e-300));
        }
    }
    check(worst <= 1e-12, "prediction vs double sum");

    // spectral radius of the C-weighted correlation, 100 random PSD instances
    for i in 0..100u64 {
        let mut rng = rng_from_seed(5000 + i);
        let dim = 2 + (i as usize % 4);
        let nodes = 2 + (i as usize % 3);
        let mats: Vec<DMatrix<f64>> = (0..nodes)
            .map(|_| {
                let b = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                let m = &b * b.transpose();
                (&m + m.transpose()) * 0.5
            })
            .collect();
        let c = StochasticMatrix::random(nodes, 9000 + i).unwrap();
        check(spectral_radius_check(&mats, c.row(0)).unwrap().bound_holds, "spectral radius bound");
    }

    // stochastic matrices and kernels
    for seed in 0..50u64 {
        let n = 1 + (seed as usize % 7);
        let m = StochasticMatrix::random(n, seed).unwrap();
        check(validate_stochastic(&m.to_rows()).is_ok(), "random matrix is stochastic");
        let mut rng = rng_from_seed(seed);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        let out = m.combine(&v).unwrap();
        check(out.iter().all(|&y| y >= lo - 1e-12 && y <= hi + 1e-12), "combination is convex");

        let k = KernelSpec::gaussian(0.1 + 0.05 * seed as f64).unwrap();
        let x: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..3).map(|_| rng.sample(StandardNormal)).collect();
        let kxy = kernel_eval(&k, &x, &y).unwrap();
        check(kxy == kernel_eval(&k, &y, &x).unwrap(), "kernel symmetry");
        check(kxy > 0.0 && kxy <= kernel_eval(&k, &x, &x).unwrap(), "kernel bounded by its peak");
        let centers = [x.clone(), y.clone()];
        let w = [0.3, 0.7];
        let ck = combined_kernel(&k, &w, &centers, &x).unwrap();
        let parts = [kxy, kernel_eval(&k, &x, &x).unwrap()];
        check(ck >= parts[0].min(parts[1]) - 1e-12 && ck <= parts[0].max(parts[1]) + 1e-12, "combined kernel convex");
    }

    // full-run determinism
    let cfg = ExperimentConfig { sample_count: 500, monte_carlo_runs: 4, ..ExperimentConfig::default() };
    check(run_experiment(&cfg).unwrap() == run_experiment(&cfg).unwrap(), "bit determinism");

    let pass = failures.is_empty();
    let detail = if pass {
        format!("reductions, double sum (worst rel {worst:.1e}), 100 spectral instances, matrix/kernel invariants, determinism")
    } else {
        format!("failed: {}", failures.join(", "))
    };
    outcome(pass, detail)
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() {
    let start = Instant::now();
    let fig1 = fig1_floors();
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("fig1 floor ordering", Box::new(|| ordering(&fig1))),
        ("magnitude gains", Box::new(|| gains(&fig1))),
        ("linear filters fail", Box::new(|| linear_failure(&fig1))),
        ("steady-state theory vs experiment", Box::new(steady_state_theory)),
        ("transient within time constant", Box::new(transient_match)),
        ("network-size sweep", Box::new(network_size)),
        ("step-size bound", Box::new(step_size_bound)),
        ("oracle and invariant suite", Box::new(oracle_suite)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} ({:.1}s) {}",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", criteria.len() - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}

use anyhow::{Context, Result};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use threewc::channel::{sample_channel, sample_states};
use threewc::restricted::{estimate_dof, sweep_snr, DofEstimate, RateReport};
use threewc::{IntermittencyConfig, Link, Scheme, StreamAllocation, Tolerance};

use crate::args::{AllocationChoice, SimulateArgs};
use crate::output::{derive_seed, Output};

/// Per-message slope tolerance for the PASS verdict.
const SLOPE_TOL: f64 = 0.05;

#[derive(Serialize)]
struct Row {
    i: String,
    j: String,
    snr_db: f64,
    rate_bits: f64,
    dof_slope: f64,
}

#[derive(Serialize)]
struct Summary {
    config: [usize; 3],
    tau: String,
    allocation: StreamAllocation,
    snr_db: Vec<f64>,
    trials: usize,
    seed: u64,
    fitted_dof: [f64; 6],
    predicted_dof: [f64; 6],
    fitted_sum: f64,
    predicted_sum: f64,
    verdict: &'static str,
}

fn run_trial(
    args: &SimulateArgs,
    alloc: &StreamAllocation,
    ic: IntermittencyConfig,
    trial: u64,
) -> Result<(Vec<RateReport>, DofEstimate)> {
    let cfg = args.scenario.m;
    let ch = sample_channel(cfg, derive_seed(args.seed, trial, 0))?;
    let scheme = Scheme::synthesize(
        alloc.clone(),
        &ch,
        Tolerance::default(),
        derive_seed(args.seed, trial, 1),
    )
    .with_context(|| format!("trial {trial}"))?;
    let states = sample_states(args.n, ic, derive_seed(args.seed, trial, 2))?;
    let reports = sweep_snr(&scheme, &ch, &args.snr.0, ic, &states)?;
    let dof = estimate_dof(&reports)?;
    Ok((reports, dof))
}

pub fn simulate(args: SimulateArgs) -> Result<bool> {
    anyhow::ensure!(args.trials >= 1, "need at least one trial");
    let cfg = args.scenario.m;
    let tau = args.scenario.tau.to_f64().context("tau out of range")?;
    let ic = IntermittencyConfig::new(tau)?;
    let alloc = match args.alloc {
        AllocationChoice::Optimal => StreamAllocation::sum_dof_optimal(cfg),
        AllocationChoice::Zero => StreamAllocation::zero(),
    };
    let trials: Vec<(Vec<RateReport>, DofEstimate)> = (0..args.trials as u64)
        .into_par_iter()
        .map(|t| run_trial(&args, &alloc, ic, t))
        .collect::<Result<_>>()?;

    // Averaging rates and slopes commutes with the least-squares fit.
    let k = trials.len() as f64;
    let mut slopes = [0.0; 6];
    for (_, d) in &trials {
        for (s, v) in slopes.iter_mut().zip(d.slopes) {
            *s += v / k;
        }
    }
    let mut rows = Vec::new();
    for (p, &snr_db) in args.snr.0.iter().enumerate() {
        for link in Link::ALL {
            let rate = trials.iter().map(|(r, _)| r[p].message(link)).sum::<f64>() / k;
            rows.push(Row {
                i: link.from.to_string(),
                j: link.to.to_string(),
                snr_db,
                rate_bits: rate,
                dof_slope: slopes[link.index()],
            });
        }
    }

    let predicted = alloc.predicted_dof(tau);
    let pass = slopes
        .iter()
        .zip(predicted)
        .all(|(s, p)| (s - p).abs() <= SLOPE_TOL)
        && (slopes.iter().sum::<f64>() - predicted.iter().sum::<f64>()).abs() <= SLOPE_TOL;
    let verdict = if pass { "PASS" } else { "FAIL" };

    let out = Output::new(args.scenario.out.clone())?;
    out.csv("simulate.csv", &rows)?;
    let fitted_sum: f64 = slopes.iter().sum();
    let predicted_sum: f64 = predicted.iter().sum();
    out.say(format!(
        "config {cfg}, tau {}, {} trial(s)",
        args.scenario.tau, args.trials
    ));
    for link in Link::ALL {
        out.say(format!(
            "d{link}: fitted {:.4}, predicted {}",
            slopes[link.index()],
            predicted[link.index()]
        ));
    }
    out.say(format!(
        "sum-DoF: fitted {fitted_sum:.4}, predicted {predicted_sum} {verdict}"
    ));
    out.json(
        "simulate.json",
        &Summary {
            config: cfg.into(),
            tau: args.scenario.tau.to_string(),
            allocation: alloc,
            snr_db: args.snr.0.clone(),
            trials: args.trials,
            seed: args.seed,
            fitted_dof: slopes,
            predicted_dof: predicted,
            fitted_sum,
            predicted_sum,
            verdict,
        },
    )?;
    Ok(pass)
}

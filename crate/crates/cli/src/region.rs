use anyhow::Result;
use num_traits::{One, Zero};
use serde::Serialize;
use threewc::polytope::{
    polytope_equal, projected_region, simplex_max, sum_dof_formula, theorem1_region, vertices,
    HalfspaceSystem, Rational,
};

use crate::args::Scenario;
use crate::output::Output;

#[derive(Serialize)]
struct RegionReport {
    config: [usize; 3],
    tau: String,
    stated_rows: usize,
    projected_rows: usize,
    projected_vertices: usize,
    verdict: &'static str,
}

pub fn region(args: Scenario) -> Result<bool> {
    let out = Output::new(args.out)?;
    let (cfg, tau) = (args.m, &args.tau);
    let stated = theorem1_region(cfg, tau)?;
    let projected = projected_region(cfg, tau)?;
    out.file("stated_region.txt", &stated.to_text())?;
    out.file("projected_region.txt", &projected.to_text())?;

    out.print(format!("config {cfg}, tau {tau}"));
    out.print(format!("stated region: {} inequalities", stated.len()));
    out.print(format!(
        "projected region: {} inequalities",
        projected.len()
    ));
    let (verdict, ok) = if tau.is_zero() {
        out.print("note: at tau = 0 the stated inequalities leave d23 and d32 unbounded;");
        out.print("      the projected region is the canonical one");
        ("DEGENERATE", true)
    } else if polytope_equal(&stated, &projected)? {
        ("EQUAL", true)
    } else {
        ("DIFFERENT", false)
    };
    if tau.is_one() && ok {
        out.print(
            "note: at tau = 1 this is also the adaptive DoF region; adaptation gains nothing",
        );
    }
    out.print(format!("verdict: {verdict}"));
    out.json(
        "region_report.json",
        &RegionReport {
            config: cfg.into(),
            tau: tau.to_string(),
            stated_rows: stated.len(),
            projected_rows: projected.len(),
            projected_vertices: vertices(&projected)?.len(),
            verdict,
        },
    )?;
    Ok(ok)
}

#[derive(Serialize)]
struct SumDofReport {
    config: [usize; 3],
    tau: String,
    lp_optimum: String,
    formula: String,
    degenerate: bool,
    verdict: &'static str,
}

/// The region the sum-DoF LP runs over: the stated one, or the projected
/// one at `tau = 0` where the stated one is unbounded.
fn sum_dof_region(cfg: threewc::NodeConfig, tau: &Rational) -> Result<(HalfspaceSystem, bool)> {
    if tau.is_zero() {
        Ok((projected_region(cfg, tau)?, true))
    } else {
        Ok((theorem1_region(cfg, tau)?, false))
    }
}

pub fn lp_sum_dof(cfg: threewc::NodeConfig, tau: &Rational) -> Result<(Rational, bool)> {
    let (sys, degenerate) = sum_dof_region(cfg, tau)?;
    let lp = simplex_max(&sys, &vec![Rational::one(); 6])?;
    Ok((lp.optimum, degenerate))
}

pub fn sumdof(args: Scenario) -> Result<bool> {
    let out = Output::new(args.out)?;
    let (cfg, tau) = (args.m, &args.tau);
    let (lp, degenerate) = lp_sum_dof(cfg, tau)?;
    let formula = sum_dof_formula(cfg, tau);
    let verdict = if lp == formula { "MATCH" } else { "MISMATCH" };
    out.print(format!("{lp} = {formula} {verdict}"));
    if degenerate {
        out.print("degenerate: tau = 0, node 1 never listens; LP over the projected region");
    }
    out.json(
        "sumdof.json",
        &SumDofReport {
            config: cfg.into(),
            tau: tau.to_string(),
            lp_optimum: lp.to_string(),
            formula: formula.to_string(),
            degenerate,
            verdict,
        },
    )?;
    Ok(lp == formula)
}

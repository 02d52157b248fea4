use anyhow::Result;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use threewc::polytope::{sum_dof_formula, Rational};
use threewc::NodeConfig;

use crate::adaptive::gap;
use crate::args::CompareArgs;
use crate::output::Output;
use crate::region::lp_sum_dof;

#[derive(Serialize)]
struct Row {
    m1: usize,
    m2: usize,
    m3: usize,
    tau: String,
    lp_sum_dof: String,
    formula_sum_dof: String,
    sum_dof_verdict: &'static str,
    d31_adaptive: String,
    restricted_cap: String,
    gap_verdict: &'static str,
}

fn row(cfg: NodeConfig, tau: &Rational) -> Result<Row> {
    let (lp, _) = lp_sum_dof(cfg, tau)?;
    let formula = sum_dof_formula(cfg, tau);
    let (d31, cap, gap_verdict) = if tau.is_zero() {
        ("-".into(), "-".into(), "UNDEFINED")
    } else {
        let g = gap(cfg, tau)?;
        let v = if g.violated { "VIOLATES" } else { "WITHIN" };
        (g.d31_adaptive.to_string(), g.restricted_cap.to_string(), v)
    };
    Ok(Row {
        m1: cfg.m1(),
        m2: cfg.m2(),
        m3: cfg.m3(),
        tau: tau.to_string(),
        sum_dof_verdict: if lp == formula { "MATCH" } else { "MISMATCH" },
        lp_sum_dof: lp.to_string(),
        formula_sum_dof: formula.to_string(),
        d31_adaptive: d31,
        restricted_cap: cap,
        gap_verdict,
    })
}

pub fn compare(args: CompareArgs) -> Result<bool> {
    anyhow::ensure!(args.max >= 1, "--max must be at least 1");
    let cases: Vec<(NodeConfig, Rational)> = NodeConfig::all_up_to(args.max)
        .into_iter()
        .flat_map(|c| args.taus.iter().map(move |t| (c, t.clone())))
        .collect();
    let rows: Vec<Row> = cases
        .par_iter()
        .map(|(c, t)| row(*c, t))
        .collect::<Result<_>>()?;

    let out = Output::new(args.out)?;
    out.csv("compare.csv", &rows)?;
    let mismatches = rows
        .iter()
        .filter(|r| r.sum_dof_verdict == "MISMATCH")
        .count();
    let violations = rows.iter().filter(|r| r.gap_verdict == "VIOLATES").count();
    out.say(format!(
        "{} cases: {} MATCH, {mismatches} MISMATCH; adaptation gap VIOLATES in {violations}",
        rows.len(),
        rows.len() - mismatches
    ));
    Ok(mismatches == 0)
}

//! Fourier-Motzkin projection with exact redundancy pruning.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use super::simplex::{feasible_point, simplex_max};
use super::system::{HalfspaceSystem, Inequality};
use crate::error::{Error, Result};

fn infeasible_marker(vars: Vec<String>) -> HalfspaceSystem {
    let n = vars.len();
    HalfspaceSystem::from_rows(
        vars,
        vec![Inequality::new(vec![Rational::zero(); n], -Rational::one())],
    )
    .expect("marker row has the right width")
}

/// Drops trivially true rows and keeps only the tightest of parallel rows.
/// Returns `None` when a constant row is violated.
fn syntactic_prune(rows: Vec<Inequality>) -> Option<Vec<Inequality>> {
    let mut best: HashMap<Vec<Rational>, Rational> = HashMap::new();
    let mut order = Vec::new();
    for row in rows {
        if row.is_constant() {
            if row.rhs.is_negative() {
                return None;
            }
            continue;
        }
        let n = row.normalized();
        match best.get_mut(&n.coeffs) {
            Some(rhs) => {
                if n.rhs < *rhs {
                    *rhs = n.rhs;
                }
            }
            None => {
                order.push(n.coeffs.clone());
                best.insert(n.coeffs, n.rhs);
            }
        }
    }
    Some(
        order
            .into_iter()
            .map(|c| {
                let rhs = best.remove(&c).expect("inserted above");
                Inequality::new(c, rhs)
            })
            .collect(),
    )
}

/// Removes every row implied by the others.
///
/// A row `a x <= b` is redundant when maximizing `a x` over the remaining
/// rows, with the row itself relaxed to `a x <= b + 1` to keep the LP
/// bounded, stays at or below `b`. Rows are tested one at a time against
/// the current survivors. An empty system comes back as the single row
/// `0 <= -1`.
pub fn prune_redundant(sys: &HalfspaceSystem) -> Result<HalfspaceSystem> {
    let Some(rows) = syntactic_prune(sys.rows().to_vec()) else {
        return Ok(infeasible_marker(sys.vars().to_vec()));
    };
    let mut current = sys.with_rows(rows);
    if feasible_point(&current)?.is_none() {
        return Ok(infeasible_marker(sys.vars().to_vec()));
    }
    let mut i = 0;
    while i < current.len() {
        let target = current.rows()[i].clone();
        let mut probe_rows = current.rows().to_vec();
        probe_rows[i].rhs = &target.rhs + Rational::one();
        let probe = current.with_rows(probe_rows);
        let sol = simplex_max(&probe, &target.coeffs)?;
        if sol.optimum <= target.rhs {
            let mut rows = current.rows().to_vec();
            rows.remove(i);
            current = current.with_rows(rows);
        } else {
            i += 1;
        }
    }
    Ok(current)
}

/// Uses an equality `e . x = r` with a nonzero coefficient on `col` to
/// substitute `col` out of every other row.
fn substitute(rows: Vec<Inequality>, eq_pos: usize, eq_neg: usize, col: usize) -> Vec<Inequality> {
    let eq = rows[eq_pos].clone();
    let pivot = eq.coeffs[col].clone();
    rows.into_iter()
        .enumerate()
        .filter(|(i, _)| *i != eq_pos && *i != eq_neg)
        .map(|(_, row)| {
            if row.coeffs[col].is_zero() {
                return row;
            }
            let f = &row.coeffs[col] / &pivot;
            let coeffs = row
                .coeffs
                .iter()
                .zip(&eq.coeffs)
                .map(|(a, e)| a - &f * e)
                .collect();
            Inequality::new(coeffs, &row.rhs - &f * &eq.rhs)
        })
        .collect()
}

/// A pair of rows forming an equality that involves `col`.
fn find_equality(rows: &[Inequality], col: usize) -> Option<(usize, usize)> {
    for (i, r) in rows.iter().enumerate() {
        if r.coeffs[col].is_zero() {
            continue;
        }
        for (j, s) in rows.iter().enumerate().skip(i + 1) {
            if s.rhs == -&r.rhs && s.coeffs.iter().zip(&r.coeffs).all(|(a, b)| *a == -b) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Classic pairing step: every row with a positive coefficient on `col` is
/// combined with every row with a negative one.
fn pair_out(rows: Vec<Inequality>, col: usize) -> Vec<Inequality> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut out = Vec::new();
    for row in rows {
        let c = &row.coeffs[col];
        if c.is_positive() {
            pos.push(row);
        } else if c.is_negative() {
            neg.push(row);
        } else {
            out.push(row);
        }
    }
    for p in &pos {
        for n in &neg {
            let wp = -&n.coeffs[col];
            let wn = p.coeffs[col].clone();
            let coeffs = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(a, b)| &wp * a + &wn * b)
                .collect();
            out.push(Inequality::new(coeffs, &wp * &p.rhs + &wn * &n.rhs));
        }
    }
    out
}

fn pairing_cost(rows: &[Inequality], col: usize) -> usize {
    let p = rows.iter().filter(|r| r.coeffs[col].is_positive()).count();
    let n = rows.iter().filter(|r| r.coeffs[col].is_negative()).count();
    p * n
}

/// Projects the system onto the variables not listed in `vars_to_drop`.
///
/// Equalities are used for substitution when available; otherwise the
/// variable with the fewest pairings is eliminated next. Redundant rows are
/// pruned after every step. An empty projection is reported as `0 <= -1`.
pub fn fourier_motzkin_eliminate(
    sys: &HalfspaceSystem,
    vars_to_drop: &[&str],
) -> Result<HalfspaceSystem> {
    let mut drop_cols = Vec::with_capacity(vars_to_drop.len());
    for name in vars_to_drop {
        let idx = sys.var_index(name).ok_or_else(|| {
            Error::InvalidInput(format!("cannot eliminate unknown variable {name}"))
        })?;
        if !drop_cols.contains(&idx) {
            drop_cols.push(idx);
        }
    }
    let keep: Vec<usize> = (0..sys.dim()).filter(|i| !drop_cols.contains(i)).collect();
    let kept_vars: Vec<String> = keep.iter().map(|&i| sys.vars()[i].clone()).collect();

    let mut current = prune_redundant(sys)?;
    let mut remaining = drop_cols;
    while !remaining.is_empty() {
        if current.rows().iter().all(Inequality::is_constant) {
            break;
        }
        let rows = current.rows();
        let step = remaining
            .iter()
            .enumerate()
            .find_map(|(k, &col)| find_equality(rows, col).map(|eq| (k, col, Some(eq))))
            .unwrap_or_else(|| {
                let (k, &col) = remaining
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &c)| pairing_cost(rows, c))
                    .expect("nonempty");
                (k, col, None)
            });
        let (k, col, eq) = step;
        let next = match eq {
            Some((a, b)) => substitute(rows.to_vec(), a, b, col),
            None => pair_out(rows.to_vec(), col),
        };
        remaining.swap_remove(k);
        current = prune_redundant(&current.with_rows(next))?;
    }

    let rows = current
        .rows()
        .iter()
        .map(|r| {
            Inequality::new(
                keep.iter().map(|&i| r.coeffs[i].clone()).collect(),
                r.rhs.clone(),
            )
        })
        .collect();
    let projected = HalfspaceSystem::from_rows(kept_vars, rows)?;
    prune_redundant(&projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{polytope_equal, rat};

    fn system(vars: &[&str], rows: &[(&[i64], i64)]) -> HalfspaceSystem {
        let mut s = HalfspaceSystem::new(vars.iter().copied());
        for (c, r) in rows {
            s.push(Inequality::new(
                c.iter().map(|&v| rat(v, 1)).collect(),
                rat(*r, 1),
            ))
            .unwrap();
        }
        s
    }

    #[test]
    fn single_pairing() {
        let s = system(&["x", "y"], &[(&[1, 1], 2), (&[0, -1], 0)]);
        let p = fourier_motzkin_eliminate(&s, &["y"]).unwrap();
        assert_eq!(p.to_text(), "# vars: x\n1*x <= 2\n");
    }

    #[test]
    fn equality_chain() {
        let s = system(&["x", "y"], &[(&[1, -1], 0), (&[-1, 1], 0), (&[0, 1], 5)]);
        let p = fourier_motzkin_eliminate(&s, &["y"]).unwrap();
        assert_eq!(p.to_text(), "# vars: x\n1*x <= 5\n");
    }

    #[test]
    fn empty_projection_marker() {
        let s = system(&["x", "y"], &[(&[1, 1], 1), (&[-1, -1], -2)]);
        let p = fourier_motzkin_eliminate(&s, &["y"]).unwrap();
        assert_eq!(p.to_text(), "# vars: x\n0 <= -1\n");
    }

    #[test]
    fn unknown_variable_rejected() {
        let s = system(&["x"], &[(&[1], 1)]);
        assert!(fourier_motzkin_eliminate(&s, &["z"]).is_err());
    }

    #[test]
    fn pruning_removes_implied_rows() {
        // x <= 1, y <= 1, x + y <= 3 (implied), x,y >= 0
        let s = system(
            &["x", "y"],
            &[
                (&[1, 0], 1),
                (&[0, 1], 1),
                (&[1, 1], 3),
                (&[-1, 0], 0),
                (&[0, -1], 0),
            ],
        );
        let p = prune_redundant(&s).unwrap();
        assert_eq!(p.len(), 4);
        assert!(polytope_equal(&p, &s).unwrap());
        // duplicates scaled differently collapse to the tighter one
        let s = system(&["x"], &[(&[2], 4), (&[1], 3)]);
        assert_eq!(
            prune_redundant(&s).unwrap().to_text(),
            "# vars: x\n1*x <= 2\n"
        );
    }

    #[test]
    fn projection_of_cube_corner_cut() {
        // 0 <= x,y,z <= 1, x + y + z <= 2; projecting z gives the unit square
        let s = system(
            &["x", "y", "z"],
            &[
                (&[1, 0, 0], 1),
                (&[0, 1, 0], 1),
                (&[0, 0, 1], 1),
                (&[-1, 0, 0], 0),
                (&[0, -1, 0], 0),
                (&[0, 0, -1], 0),
                (&[1, 1, 1], 2),
            ],
        );
        let p = fourier_motzkin_eliminate(&s, &["z"]).unwrap();
        let square = system(
            &["x", "y"],
            &[(&[1, 0], 1), (&[0, 1], 1), (&[-1, 0], 0), (&[0, -1], 0)],
        );
        assert!(polytope_equal(&p, &square).unwrap());
    }
}

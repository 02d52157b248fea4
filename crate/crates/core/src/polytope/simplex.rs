//! Exact two-phase tableau simplex with Bland's anti-cycling rule.

use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use super::system::HalfspaceSystem;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub optimum: Rational,
    pub argmax: Vec<Rational>,
}

/// How an original variable maps onto nonnegative tableau columns.
#[derive(Debug, Clone, Copy)]
enum Column {
    NonNegative(usize),
    Free { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry is minus the current objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.resize(self.width + 1, Rational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            if !obj[b].is_zero() {
                let f = obj[b].clone();
                for (o, t) in obj.iter_mut().zip(&self.rows[i]) {
                    if !t.is_zero() {
                        *o -= &f * t;
                    }
                }
            }
        }
        self.obj = obj;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        let nonzero: Vec<usize> = (0..=self.width)
            .filter(|&k| !pivot_row[k].is_zero())
            .collect();
        let eliminate = |row: &mut Vec<Rational>| {
            if row[c].is_zero() {
                return;
            }
            let f = row[c].clone();
            for &k in &nonzero {
                row[k] -= &f * &pivot_row[k];
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Maximizes the current objective over columns `< allowed`.
    fn optimize(&mut self, allowed: usize) -> Result<()> {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j].is_positive()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Err(Error::Unbounded),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

/// Variables with an explicit `-c x <= 0` row are sign-constrained; those
/// rows are absorbed into the column bounds.
fn classify(sys: &HalfspaceSystem) -> (Vec<Column>, Vec<bool>, usize) {
    let n = sys.dim();
    let mut nonneg = vec![false; n];
    let mut absorbed = vec![false; sys.len()];
    for (i, row) in sys.rows().iter().enumerate() {
        if !row.rhs.is_zero() {
            continue;
        }
        let mut nz = row.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero());
        if let (Some((j, c)), None) = (nz.next(), nz.next()) {
            if c.is_negative() {
                nonneg[j] = true;
                absorbed[i] = true;
            }
        }
    }
    let mut cols = Vec::with_capacity(n);
    let mut next = 0;
    for &nn in &nonneg {
        if nn {
            cols.push(Column::NonNegative(next));
            next += 1;
        } else {
            cols.push(Column::Free {
                pos: next,
                neg: next + 1,
            });
            next += 2;
        }
    }
    (cols, absorbed, next)
}

fn structural_cost(cols: &[Column], objective: &[Rational], width: usize) -> Vec<Rational> {
    let mut cost = vec![Rational::zero(); width];
    for (col, c) in cols.iter().zip(objective) {
        match *col {
            Column::NonNegative(j) => cost[j] = c.clone(),
            Column::Free { pos, neg } => {
                cost[pos] = c.clone();
                cost[neg] = -c;
            }
        }
    }
    cost
}

/// Runs phase one. Returns the tableau with a feasible basis and no
/// artificial columns remaining in it, or `Infeasible`.
fn phase_one(sys: &HalfspaceSystem) -> Result<(Tableau, Vec<Column>, usize)> {
    let (cols, absorbed, structural) = classify(sys);
    let live: Vec<_> = sys
        .rows()
        .iter()
        .zip(&absorbed)
        .filter(|(_, &a)| !a)
        .map(|(r, _)| r)
        .collect();
    let mut kept = Vec::new();
    for row in live {
        if row.is_constant() {
            if row.rhs.is_negative() {
                return Err(Error::Infeasible);
            }
        } else {
            kept.push(row);
        }
    }
    let m = kept.len();
    let n_art = kept.iter().filter(|r| r.rhs.is_negative()).count();
    let slack0 = structural;
    let art0 = structural + m;
    let width = art0 + n_art;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_art = art0;
    for (i, ineq) in kept.iter().enumerate() {
        let mut row = vec![Rational::zero(); width + 1];
        for (col, c) in cols.iter().zip(&ineq.coeffs) {
            if c.is_zero() {
                continue;
            }
            match *col {
                Column::NonNegative(j) => row[j] = c.clone(),
                Column::Free { pos, neg } => {
                    row[pos] = c.clone();
                    row[neg] = -c;
                }
            }
        }
        row[slack0 + i] = Rational::one();
        row[width] = ineq.rhs.clone();
        if ineq.rhs.is_negative() {
            for v in row.iter_mut() {
                if !v.is_zero() {
                    *v = -&*v;
                }
            }
            row[next_art] = Rational::one();
            basis.push(next_art);
            next_art += 1;
        } else {
            basis.push(slack0 + i);
        }
        rows.push(row);
    }

    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis,
        width,
    };
    if n_art > 0 {
        let mut cost = vec![Rational::zero(); width];
        for c in cost.iter_mut().skip(art0) {
            *c = -Rational::one();
        }
        t.set_objective(&cost);
        t.optimize(width)?;
        if !t.obj[width].is_zero() {
            return Err(Error::Infeasible);
        }
        // Drive zero-level artificials out of the basis.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art0 {
                match (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for row in t.rows.iter_mut() {
            let rhs = row[width].clone();
            row.truncate(art0);
            row.push(rhs);
        }
        t.width = art0;
    }
    Ok((t, cols, structural))
}

fn extract(t: &Tableau, cols: &[Column]) -> Vec<Rational> {
    let mut y = vec![Rational::zero(); t.width];
    for (i, &b) in t.basis.iter().enumerate() {
        y[b] = t.rhs(i).clone();
    }
    cols.iter()
        .map(|col| match *col {
            Column::NonNegative(j) => y[j].clone(),
            Column::Free { pos, neg } => &y[pos] - &y[neg],
        })
        .collect()
}

/// Maximizes `objective . x` over the system exactly.
///
/// Errors with `Infeasible` or `Unbounded`. The returned point satisfies
/// every row of `sys` exactly.
pub fn simplex_max(sys: &HalfspaceSystem, objective: &[Rational]) -> Result<LpSolution> {
    if objective.len() != sys.dim() {
        return Err(Error::InvalidInput(format!(
            "objective has {} entries for {} variables",
            objective.len(),
            sys.dim()
        )));
    }
    let (mut t, cols, _) = phase_one(sys)?;
    let cost = structural_cost(&cols, objective, t.width);
    t.set_objective(&cost);
    let width = t.width;
    t.optimize(width)?;
    let argmax = extract(&t, &cols);
    let optimum = objective
        .iter()
        .zip(&argmax)
        .fold(Rational::zero(), |acc, (c, x)| acc + c * x);
    Ok(LpSolution { optimum, argmax })
}

/// Some point satisfying the system, or `None` when it is empty.
pub fn feasible_point(sys: &HalfspaceSystem) -> Result<Option<Vec<Rational>>> {
    match phase_one(sys) {
        Ok((t, cols, _)) => Ok(Some(extract(&t, &cols))),
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::rat;

    fn sys2(rows: &[(i64, i64, i64)]) -> HalfspaceSystem {
        let mut s = HalfspaceSystem::new(["x", "y"]);
        for &(a, b, r) in rows {
            s.add(&[("x", rat(a, 1)), ("y", rat(b, 1))], rat(r, 1))
                .unwrap();
        }
        s
    }

    #[test]
    fn single_upper_bound() {
        let mut s = HalfspaceSystem::new(["x"]);
        s.add(&[("x", rat(1, 1))], rat(1, 1)).unwrap();
        let sol = simplex_max(&s, &[rat(1, 1)]).unwrap();
        assert_eq!(sol.optimum, rat(1, 1));
        assert_eq!(sol.argmax, vec![rat(1, 1)]);
    }

    #[test]
    fn free_variables_can_go_negative() {
        // max -x - y  s.t. x + y >= -3, x <= 5
        let s = sys2(&[(-1, -1, 3), (1, 0, 5)]);
        let sol = simplex_max(&s, &[rat(-1, 1), rat(-1, 1)]).unwrap();
        assert_eq!(sol.optimum, rat(3, 1));
        assert!(s.satisfied_by(&sol.argmax));
    }

    #[test]
    fn needs_phase_one() {
        // x >= 2 (as -x <= -2), x + y <= 3, y >= 0
        let s = sys2(&[(-1, 0, -2), (1, 1, 3), (0, -1, 0)]);
        let sol = simplex_max(&s, &[rat(0, 1), rat(1, 1)]).unwrap();
        assert_eq!(sol.optimum, rat(1, 1));
        assert_eq!(sol.argmax, vec![rat(2, 1), rat(1, 1)]);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let s = sys2(&[(1, 0, 1), (-1, 0, -2)]);
        assert_eq!(
            simplex_max(&s, &[rat(1, 1), rat(0, 1)]),
            Err(Error::Infeasible)
        );
        assert_eq!(feasible_point(&s).unwrap(), None);
        let s = sys2(&[(1, 0, 1)]);
        assert_eq!(
            simplex_max(&s, &[rat(0, 1), rat(1, 1)]),
            Err(Error::Unbounded)
        );
        let mut s = HalfspaceSystem::new(["x"]);
        s.push(super::super::Inequality::new(vec![rat(0, 1)], rat(-1, 1)))
            .unwrap();
        assert_eq!(feasible_point(&s).unwrap(), None);
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // Klee-Minty-like degenerate corner at the origin.
        let s = sys2(&[(1, 1, 0), (1, -1, 0), (-1, 0, 0), (0, -1, 0), (1, 2, 0)]);
        let sol = simplex_max(&s, &[rat(1, 1), rat(1, 1)]).unwrap();
        assert_eq!(sol.optimum, rat(0, 1));
    }

    #[test]
    fn fractional_optimum() {
        // max x + y s.t. 2x + y <= 3, x + 3y <= 4, x,y >= 0 -> (1,1), 2
        let s = sys2(&[(2, 1, 3), (1, 3, 4), (-1, 0, 0), (0, -1, 0)]);
        let sol = simplex_max(&s, &[rat(1, 1), rat(1, 1)]).unwrap();
        assert_eq!(sol.optimum, rat(2, 1));
        let sol = simplex_max(&s, &[rat(1, 1), rat(0, 1)]).unwrap();
        assert_eq!(sol.optimum, rat(3, 2));
    }
}

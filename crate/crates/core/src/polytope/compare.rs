use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::rational::Rational;
use super::regions::{DofPoint, DOF_VARS};
use super::simplex::{feasible_point, simplex_max};
use super::system::HalfspaceSystem;
use crate::error::{Error, Result};

/// Exact membership of a DoF point. The system must be over the six DoF
/// coordinates, in any order.
pub fn polytope_contains(sys: &HalfspaceSystem, p: &DofPoint) -> Result<bool> {
    let vars: Vec<String> = DOF_VARS.iter().map(|s| s.to_string()).collect();
    Ok(sys.reordered(&vars)?.satisfied_by(p.coords()))
}

/// `a ⊆ b`: every row of `b` stays satisfied when its left-hand side is
/// maximized over `a`. An empty `a` is included in anything.
pub fn polytope_includes(a: &HalfspaceSystem, b: &HalfspaceSystem) -> Result<bool> {
    let b = b.reordered(a.vars())?;
    if feasible_point(a)?.is_none() {
        return Ok(true);
    }
    for row in b.rows() {
        if row.is_constant() {
            if row.rhs.is_negative() {
                return Ok(false);
            }
            continue;
        }
        let sol = simplex_max(a, &row.coeffs)?;
        if sol.optimum > row.rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Mutual inclusion.
pub fn polytope_equal(a: &HalfspaceSystem, b: &HalfspaceSystem) -> Result<bool> {
    Ok(polytope_includes(a, b)? && polytope_includes(b, a)?)
}

fn to_i128(v: &BigInt) -> Result<i128> {
    v.to_i128()
        .ok_or_else(|| Error::InvalidInput("coefficients too large for vertex enumeration".into()))
}

fn overflow() -> Error {
    Error::InvalidInput("integer overflow during vertex enumeration".into())
}

/// Determinant of a square integer matrix by fraction-free Bareiss
/// elimination.
fn bareiss_det(mut m: Vec<Vec<i128>>) -> Result<i128> {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return Ok(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k]).ok_or_else(overflow)?;
                let b = m[i][k].checked_mul(m[k][j]).ok_or_else(overflow)?;
                m[i][j] = a.checked_sub(b).ok_or_else(overflow)? / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx)?;
        let mut i = k;
        while i > 0 && idx[i - 1] == i - 1 + n - k {
            i -= 1;
        }
        if i == 0 {
            return Ok(());
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All vertices of a pointed polyhedron, by enumerating every choice of
/// `dim` rows, solving the square system with Cramer's rule in exact
/// integer arithmetic and keeping feasible solutions.
///
/// Rows are scaled to integers first. Intended for small systems such as
/// the six-dimensional DoF regions.
pub fn vertices(sys: &HalfspaceSystem) -> Result<Vec<Vec<Rational>>> {
    let n = sys.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    // integer rows [a | b]
    let mut rows: Vec<Vec<i128>> = Vec::with_capacity(sys.len());
    for r in sys.rows() {
        let lcm = r
            .coeffs
            .iter()
            .chain(std::iter::once(&r.rhs))
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale = Rational::from_integer(lcm);
        let ints = r
            .coeffs
            .iter()
            .chain(std::iter::once(&r.rhs))
            .map(|c| to_i128(&(c * &scale).to_integer()))
            .collect::<Result<Vec<_>>>()?;
        rows.push(ints);
    }

    let mut found: BTreeSet<Vec<i128>> = BTreeSet::new();
    combinations(rows.len(), n, |pick| {
        let a: Vec<Vec<i128>> = pick.iter().map(|&i| rows[i][..n].to_vec()).collect();
        let mut det = bareiss_det(a.clone())?;
        if det == 0 {
            return Ok(());
        }
        let mut num = Vec::with_capacity(n);
        for col in 0..n {
            let mut ai = a.clone();
            for (r, &i) in ai.iter_mut().zip(pick) {
                r[col] = rows[i][n];
            }
            num.push(bareiss_det(ai)?);
        }
        if det < 0 {
            det = -det;
            num.iter_mut().for_each(|v| *v = -*v);
        }
        // a . (num / det) <= b  <=>  a . num <= b det
        for r in &rows {
            let mut lhs = 0i128;
            for j in 0..n {
                lhs = lhs
                    .checked_add(r[j].checked_mul(num[j]).ok_or_else(overflow)?)
                    .ok_or_else(overflow)?;
            }
            if lhs > r[n].checked_mul(det).ok_or_else(overflow)? {
                return Ok(());
            }
        }
        let g = num.iter().fold(det, |g, &v| g.gcd(&v));
        let mut key: Vec<i128> = num.iter().map(|v| v / g).collect();
        key.push(det / g);
        found.insert(key);
        Ok(())
    })?;

    Ok(found
        .into_iter()
        .map(|key| {
            let den = BigInt::from(key[n]);
            key[..n]
                .iter()
                .map(|&v| Rational::new(BigInt::from(v), den.clone()))
                .collect()
        })
        .collect())
}

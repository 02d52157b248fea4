use std::fmt;

use num_traits::{Signed, Zero};

use super::rational::{parse_rational, Rational};
use crate::error::{Error, Result};

/// One row `coeffs . x <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Inequality {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Inequality {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Inequality { coeffs, rhs }
    }

    pub fn lhs(&self, point: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .zip(point)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, x)| c * x)
            .fold(Rational::zero(), |acc, t| acc + t)
    }

    pub fn holds_at(&self, point: &[Rational]) -> bool {
        self.lhs(point) <= self.rhs
    }

    /// All coefficients vanish, i.e. the row reads `0 <= rhs`.
    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Scaled so the first nonzero coefficient has absolute value one.
    /// Positive scaling leaves the halfspace unchanged.
    pub fn normalized(&self) -> Inequality {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            None => self.clone(),
            Some(lead) => {
                let s = lead.abs();
                Inequality {
                    coeffs: self.coeffs.iter().map(|c| c / &s).collect(),
                    rhs: &self.rhs / &s,
                }
            }
        }
    }

    pub fn scaled(&self, factor: &Rational) -> Inequality {
        Inequality {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            rhs: &self.rhs * factor,
        }
    }
}

/// A list of inequalities over a fixed, ordered set of named variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfspaceSystem {
    vars: Vec<String>,
    rows: Vec<Inequality>,
}

impl HalfspaceSystem {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        HalfspaceSystem {
            vars: vars.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn from_rows(vars: Vec<String>, rows: Vec<Inequality>) -> Result<Self> {
        let mut sys = HalfspaceSystem {
            vars,
            rows: Vec::new(),
        };
        for row in rows {
            sys.push(row)?;
        }
        Ok(sys)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn push(&mut self, row: Inequality) -> Result<()> {
        if row.coeffs.len() != self.vars.len() {
            return Err(Error::InvalidInput(format!(
                "inequality has {} coefficients for {} variables",
                row.coeffs.len(),
                self.vars.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Adds `sum(coeff * var) <= rhs` from named terms.
    pub fn add(&mut self, terms: &[(&str, Rational)], rhs: Rational) -> Result<()> {
        let mut coeffs = vec![Rational::zero(); self.vars.len()];
        for (name, c) in terms {
            let idx = self
                .var_index(name)
                .ok_or_else(|| Error::InvalidInput(format!("unknown variable {name}")))?;
            coeffs[idx] += c;
        }
        self.push(Inequality::new(coeffs, rhs))
    }

    /// Adds `sum(coeff * var) = rhs` as two opposite rows.
    pub fn add_equality(&mut self, terms: &[(&str, Rational)], rhs: Rational) -> Result<()> {
        self.add(terms, rhs.clone())?;
        let negated: Vec<(&str, Rational)> = terms.iter().map(|(n, c)| (*n, -c)).collect();
        self.add(&negated, -rhs)
    }

    /// Adds `-x <= 0` for every variable.
    pub fn add_nonnegativity(&mut self) {
        for i in 0..self.vars.len() {
            let mut coeffs = vec![Rational::zero(); self.vars.len()];
            coeffs[i] = -Rational::from_integer(1.into());
            self.rows.push(Inequality::new(coeffs, Rational::zero()));
        }
    }

    pub fn extend(&mut self, other: &HalfspaceSystem) -> Result<()> {
        let other = other.reordered(&self.vars)?;
        self.rows.extend(other.rows);
        Ok(())
    }

    /// Indices of rows violated at `point`.
    pub fn violations(&self, point: &[Rational]) -> Vec<usize> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.holds_at(point))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn satisfied_by(&self, point: &[Rational]) -> bool {
        point.len() == self.vars.len() && self.rows.iter().all(|r| r.holds_at(point))
    }

    /// Same rows with columns permuted to `vars`, which must be a
    /// permutation of this system's variables.
    pub fn reordered(&self, vars: &[String]) -> Result<HalfspaceSystem> {
        if vars.len() != self.vars.len() {
            return Err(Error::InvalidInput("variable sets differ in size".into()));
        }
        let perm = vars
            .iter()
            .map(|v| {
                self.var_index(v)
                    .ok_or_else(|| Error::InvalidInput(format!("variable {v} not in system")))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                Inequality::new(
                    perm.iter().map(|&p| r.coeffs[p].clone()).collect(),
                    r.rhs.clone(),
                )
            })
            .collect();
        Ok(HalfspaceSystem {
            vars: vars.to_vec(),
            rows,
        })
    }

    pub(crate) fn with_rows(&self, rows: Vec<Inequality>) -> HalfspaceSystem {
        HalfspaceSystem {
            vars: self.vars.clone(),
            rows,
        }
    }

    /// Plain-text form: a `# vars:` header, then one `c*v + ... <= r` row
    /// per line with exact rationals written `p/q`.
    pub fn to_text(&self) -> String {
        let mut out = format!("# vars: {}\n", self.vars.join(" "));
        for row in &self.rows {
            let terms: Vec<String> = row
                .coeffs
                .iter()
                .zip(&self.vars)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, v)| format!("{c}*{v}"))
                .collect();
            let lhs = if terms.is_empty() {
                "0".to_string()
            } else {
                terms.join(" + ")
            };
            out.push_str(&format!("{lhs} <= {}\n", row.rhs));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<HalfspaceSystem> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix("# vars:"))
            .ok_or_else(|| Error::Parse("missing '# vars:' header".into()))?;
        let mut sys = HalfspaceSystem::new(header.split_whitespace());
        for line in lines {
            if line.starts_with('#') {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("<=")
                .ok_or_else(|| Error::Parse(format!("missing '<=' in {line:?}")))?;
            let mut coeffs = vec![Rational::zero(); sys.dim()];
            let lhs = lhs.trim();
            if lhs != "0" {
                for term in lhs.split(" + ") {
                    let (c, v) = term
                        .trim()
                        .split_once('*')
                        .ok_or_else(|| Error::Parse(format!("bad term {term:?}")))?;
                    let idx = sys
                        .var_index(v.trim())
                        .ok_or_else(|| Error::Parse(format!("unknown variable {v:?}")))?;
                    coeffs[idx] += parse_rational(c)?;
                }
            }
            sys.push(Inequality::new(coeffs, parse_rational(rhs)?))?;
        }
        Ok(sys)
    }
}

impl fmt::Display for HalfspaceSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

//! Concrete halfspace systems: the achievable inner region of the
//! restricted scheme, the two outer bounds, and the raw stream-allocation
//! system the inner region is projected from.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::fm::fourier_motzkin_eliminate;
use super::rational::{check_probability, rat, Rational};
use super::system::HalfspaceSystem;
use crate::channel::NodeConfig;
use crate::error::{Error, Result};
use crate::node::{Link, Node};

/// DoF coordinate names in [`Link::ALL`] order.
pub const DOF_VARS: [&str; 6] = ["d12", "d13", "d21", "d23", "d31", "d32"];

/// Stream groups plus alignment dimensions in the raw system.
pub const ALLOCATION_VAR_COUNT: usize = 12 + 3;

pub fn dof_var(link: Link) -> &'static str {
    DOF_VARS[link.index()]
}

/// Name of the continuous stream-count variable `a_ij^[q]`, e.g. `a21_1`.
pub fn stream_var(link: Link, q: u8) -> String {
    format!("a{}_{q}", link.name())
}

/// Name of the alignment dimension observed at `receiver`, e.g. `abar23`
/// for the node-2/node-3 exchange seen by node 1.
pub fn alignment_var(receiver: Node) -> String {
    let (j, k) = aligned_pair(receiver);
    format!("abar{j}{k}")
}

/// The two transmitters whose exchange interferes at `receiver`, smaller
/// label first.
pub(crate) fn aligned_pair(receiver: Node) -> (Node, Node) {
    let mut others = Node::ALL.into_iter().filter(|&n| n != receiver);
    let j = others.next().expect("two others");
    let k = others.next().expect("two others");
    (j, k)
}

fn int(v: usize) -> Rational {
    Rational::from_integer((v as i64).into())
}

fn pos_part(v: i64) -> Rational {
    Rational::from_integer(v.max(0).into())
}

fn validated(tau: &Rational) -> Result<()> {
    check_probability(tau)
}

/// A DoF tuple `(d12, d13, d21, d23, d31, d32)` with nonnegative entries.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct DofPoint([Rational; 6]);

impl DofPoint {
    pub fn new(coords: [Rational; 6]) -> Result<Self> {
        if coords.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInput(
                "DoF coordinates must be nonnegative".into(),
            ));
        }
        Ok(DofPoint(coords))
    }

    pub fn zero() -> Self {
        DofPoint(std::array::from_fn(|_| Rational::zero()))
    }

    /// Only `link` carries DoF.
    pub fn single(link: Link, value: Rational) -> Result<Self> {
        let mut c: [Rational; 6] = std::array::from_fn(|_| Rational::zero());
        c[link.index()] = value;
        DofPoint::new(c)
    }

    pub fn get(&self, link: Link) -> &Rational {
        &self.0[link.index()]
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |a, b| a + b)
    }
}

impl fmt::Display for DofPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl TryFrom<Vec<String>> for DofPoint {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        let coords: Vec<Rational> = v
            .iter()
            .map(|s| super::rational::parse_rational(s))
            .collect::<Result<_>>()?;
        let coords: [Rational; 6] = coords
            .try_into()
            .map_err(|_| Error::Parse("DoF point needs six coordinates".into()))?;
        DofPoint::new(coords)
    }
}

impl From<DofPoint> for Vec<String> {
    fn from(p: DofPoint) -> Self {
        p.0.iter().map(ToString::to_string).collect()
    }
}

fn d(link: (usize, usize)) -> &'static str {
    let l = Link::new(
        Node::from_label(link.0).expect("label"),
        Node::from_label(link.1).expect("label"),
    );
    dof_var(l)
}

/// The achievable region of the restricted scheme as ten inequalities (five
/// families, each instantiated for `(i, j) = (2, 3)` and `(3, 2)`) plus
/// nonnegativity.
pub fn theorem1_region(cfg: NodeConfig, tau: &Rational) -> Result<HalfspaceSystem> {
    validated(tau)?;
    let one = Rational::one();
    let (m1, m2, m3) = (int(cfg.m1()), int(cfg.m2()), int(cfg.m3()));
    let mut sys = HalfspaceSystem::new(DOF_VARS);
    for (i, j) in [(2, 3), (3, 2)] {
        sys.add(
            &[
                (d((1, i)), one.clone()),
                (d((1, j)), one.clone()),
                (d((i, j)), tau.clone()),
            ],
            tau * &m1,
        )?;
        sys.add(
            &[
                (d((i, 1)), one.clone()),
                (d((j, 1)), one.clone()),
                (d((i, j)), tau.clone()),
            ],
            tau * &m1,
        )?;
        sys.add(
            &[
                (d((i, 1)), one.clone()),
                (d((1, j)), one.clone()),
                (d((i, j)), tau.clone()),
            ],
            tau * &m2,
        )?;
        sys.add(&[("d31", one.clone()), ("d32", tau.clone())], tau * &m3)?;
        sys.add(&[("d13", one.clone()), ("d23", tau.clone())], tau * &m3)?;
    }
    sys.add_nonnegativity();
    Ok(sys)
}

/// `2 tau M2 + 2 (1 - tau) M3`.
pub fn sum_dof_formula(cfg: NodeConfig, tau: &Rational) -> Rational {
    let tau_bar = Rational::one() - tau;
    rat(2, 1) * (tau * int(cfg.m2()) + tau_bar * int(cfg.m3()))
}

/// The two sum bounds valid for any encoder, each with right-hand side
/// `tau M2 + (1 - tau) M3`.
pub fn lemma1_bounds(cfg: NodeConfig, tau: &Rational) -> Result<HalfspaceSystem> {
    validated(tau)?;
    let one = Rational::one();
    let rhs = tau * int(cfg.m2()) + (&one - tau) * int(cfg.m3());
    let mut sys = HalfspaceSystem::new(DOF_VARS);
    sys.add(
        &[
            ("d13", one.clone()),
            ("d23", one.clone()),
            ("d21", one.clone()),
        ],
        rhs.clone(),
    )?;
    sys.add(
        &[("d31", one.clone()), ("d32", one.clone()), ("d12", one)],
        rhs,
    )?;
    Ok(sys)
}

/// Outer bound under restricted encoding: `d31 + tau d32 <= tau M3`.
pub fn lemma3_outer(cfg: NodeConfig, tau: &Rational) -> Result<HalfspaceSystem> {
    validated(tau)?;
    let mut sys = HalfspaceSystem::new(DOF_VARS);
    sys.add(
        &[("d31", Rational::one()), ("d32", tau.clone())],
        tau * int(cfg.m3()),
    )?;
    Ok(sys)
}

/// The stream-allocation constraints with stream counts relaxed to reals,
/// linked to the DoF coordinates by `d_ij = w (a_ij^[1] + a_ij^[2])` where
/// `w = tau` on links touching node 1 and `w = 1` otherwise.
///
/// Variables: twelve `a_ij^[q]`, three alignment dimensions, then the six
/// DoF coordinates.
pub fn raw_constraint_system(cfg: NodeConfig, tau: &Rational) -> Result<HalfspaceSystem> {
    validated(tau)?;
    let one = Rational::one();
    let m = |n: Node| cfg.antennas(n) as i64;

    let mut vars: Vec<String> = Vec::with_capacity(ALLOCATION_VAR_COUNT + 6);
    for link in Link::ALL {
        for q in [1, 2] {
            vars.push(stream_var(link, q));
        }
    }
    for n in Node::ALL {
        vars.push(alignment_var(n));
    }
    vars.extend(DOF_VARS.iter().map(|s| s.to_string()));
    let mut sys = HalfspaceSystem::new(vars);
    sys.add_nonnegativity();

    for link in Link::ALL {
        // zero-forcing: a_ij^[1] <= (M_i - M_k)^+
        let k = link.bystander();
        sys.add(
            &[(&stream_var(link, 1), one.clone())],
            pos_part(m(link.from) - m(k)),
        )?;
    }
    for i in Node::ALL {
        // transmit space
        let terms: Vec<(String, Rational)> = Link::ALL
            .iter()
            .filter(|l| l.from == i)
            .flat_map(|&l| [1, 2].map(|q| (stream_var(l, q), one.clone())))
            .collect();
        let terms: Vec<(&str, Rational)> =
            terms.iter().map(|(n, c)| (n.as_str(), c.clone())).collect();
        sys.add(&terms, int(cfg.antennas(i)))?;
    }
    for k in Node::ALL {
        // alignment dimension observed at k
        let (i, j) = aligned_pair(k);
        let abar = alignment_var(k);
        for link in [Link::new(i, j), Link::new(j, i)] {
            sys.add(
                &[(&abar, one.clone()), (&stream_var(link, 2), -&one)],
                Rational::zero(),
            )?;
        }
        sys.add(&[(&abar, one.clone())], pos_part(m(i) + m(j) - m(k)))?;
    }
    for i in Node::ALL {
        // receive space
        let (j, k) = aligned_pair(i);
        let mut names: Vec<(String, Rational)> = Vec::new();
        for l in Link::ALL.iter().filter(|l| l.to == i) {
            for q in [1, 2] {
                names.push((stream_var(*l, q), one.clone()));
            }
        }
        names.push((stream_var(Link::new(j, k), 2), one.clone()));
        names.push((stream_var(Link::new(k, j), 2), one.clone()));
        names.push((alignment_var(i), -&one));
        let terms: Vec<(&str, Rational)> =
            names.iter().map(|(n, c)| (n.as_str(), c.clone())).collect();
        sys.add(&terms, int(cfg.antennas(i)))?;
    }
    for link in Link::ALL {
        let w = if link.is_erasure() {
            tau.clone()
        } else {
            one.clone()
        };
        sys.add_equality(
            &[
                (dof_var(link), one.clone()),
                (&stream_var(link, 1), -&w),
                (&stream_var(link, 2), -&w),
            ],
            Rational::zero(),
        )?;
    }
    Ok(sys)
}

/// The raw system projected onto the six DoF coordinates. Unlike the
/// stated region this stays bounded at `tau = 0`.
pub fn projected_region(cfg: NodeConfig, tau: &Rational) -> Result<HalfspaceSystem> {
    let raw = raw_constraint_system(cfg, tau)?;
    let drop: Vec<&str> = raw.vars()[..ALLOCATION_VAR_COUNT]
        .iter()
        .map(String::as_str)
        .collect();
    fourier_motzkin_eliminate(&raw, &drop)
}

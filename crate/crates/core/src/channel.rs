//! Physical scenario: antenna counts, channel matrices, the Bernoulli
//! availability process of node 1 and SNR bookkeeping.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Tolerance};
use crate::node::{Link, Node};

/// Antenna counts with `m1 >= m2 >= m3 >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 3]", into = "[usize; 3]")]
pub struct NodeConfig {
    m: [usize; 3],
}

impl NodeConfig {
    pub fn new(m1: usize, m2: usize, m3: usize) -> Result<Self> {
        if m3 == 0 || m2 < m3 || m1 < m2 {
            return Err(Error::InvalidInput(format!(
                "antenna counts ({m1},{m2},{m3}) must satisfy M1 >= M2 >= M3 >= 1"
            )));
        }
        Ok(NodeConfig { m: [m1, m2, m3] })
    }

    pub fn antennas(&self, node: Node) -> usize {
        self.m[node.index()]
    }

    pub fn m1(&self) -> usize {
        self.m[0]
    }

    pub fn m2(&self) -> usize {
        self.m[1]
    }

    pub fn m3(&self) -> usize {
        self.m[2]
    }

    /// Every ordered configuration with `max >= m1 >= m2 >= m3 >= 1`.
    pub fn all_up_to(max: usize) -> Vec<NodeConfig> {
        let mut out = Vec::new();
        for m1 in 1..=max {
            for m2 in 1..=m1 {
                for m3 in 1..=m2 {
                    out.push(NodeConfig { m: [m1, m2, m3] });
                }
            }
        }
        out
    }
}

impl fmt::Display for NodeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.m;
        write!(f, "({a},{b},{c})")
    }
}

impl TryFrom<[usize; 3]> for NodeConfig {
    type Error = Error;

    fn try_from(m: [usize; 3]) -> Result<Self> {
        NodeConfig::new(m[0], m[1], m[2])
    }
}

impl From<NodeConfig> for [usize; 3] {
    fn from(cfg: NodeConfig) -> Self {
        cfg.m
    }
}

/// Availability probability `tau` of node 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntermittencyConfig {
    tau: f64,
}

impl IntermittencyConfig {
    pub fn new(tau: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&tau) {
            Ok(IntermittencyConfig { tau })
        } else {
            Err(Error::InvalidInput(format!(
                "tau must lie in [0, 1], got {tau}"
            )))
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn tau_bar(&self) -> f64 {
        1.0 - self.tau
    }
}

/// Transmit power and noise variance, both linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrConfig {
    power: f64,
    noise_var: f64,
}

impl SnrConfig {
    pub fn new(power: f64, noise_var: f64) -> Result<Self> {
        if power > 0.0 && noise_var > 0.0 && power.is_finite() && noise_var.is_finite() {
            Ok(SnrConfig { power, noise_var })
        } else {
            Err(Error::InvalidInput(format!(
                "power ({power}) and noise variance ({noise_var}) must be positive"
            )))
        }
    }

    /// Unit noise variance at the given SNR in dB.
    pub fn from_db(snr_db: f64) -> Result<Self> {
        SnrConfig::new(10f64.powf(snr_db / 10.0), 1.0)
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// `P / sigma^2`.
    pub fn rho(&self) -> f64 {
        self.power / self.noise_var
    }

    pub fn db(&self) -> f64 {
        10.0 * self.rho().log10()
    }
}

/// Realized availability states of node 1 over one transmission.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSequence {
    states: Vec<bool>,
    active: usize,
}

impl StateSequence {
    pub fn new(states: Vec<bool>) -> Self {
        let active = states.iter().filter(|&&s| s).count();
        StateSequence { states, active }
    }

    /// Number of transmissions `n`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Number of slots `m` in which node 1 is available.
    pub fn active(&self) -> usize {
        self.active
    }

    pub fn states(&self) -> &[bool] {
        &self.states
    }

    /// Empirical availability `m / n`.
    pub fn availability(&self) -> f64 {
        if self.states.is_empty() {
            0.0
        } else {
            self.active as f64 / self.states.len() as f64
        }
    }
}

/// Draws an i.i.d. Bernoulli(`tau`) state sequence of length `n`.
pub fn sample_states(n: usize, ic: IntermittencyConfig, seed: u64) -> Result<StateSequence> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "state sequence length must be >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_states_with(n, ic.tau(), &mut rng))
}

pub(crate) fn sample_states_with(n: usize, tau: f64, rng: &mut impl Rng) -> StateSequence {
    StateSequence::new((0..n).map(|_| rng.random_bool(tau)).collect())
}

/// Unit-variance circularly-symmetric complex Gaussian entry.
pub fn complex_gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

const GENERICITY_ATTEMPTS: usize = 16;

/// The six channel matrices. `H_ij` maps node `i`'s transmit antennas to
/// node `j`'s receive antennas and has shape `M_j x M_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    config: NodeConfig,
    matrices: [ComplexMatrix; 6],
}

impl ChannelRealization {
    /// Matrices in [`Link::ALL`] order. Shapes are checked.
    pub fn new(config: NodeConfig, matrices: [ComplexMatrix; 6]) -> Result<Self> {
        for (link, h) in Link::ALL.iter().zip(&matrices) {
            let expected = (config.antennas(link.to), config.antennas(link.from));
            if h.shape() != expected {
                return Err(Error::InvalidInput(format!(
                    "H{link} has shape {:?}, expected {expected:?}",
                    h.shape()
                )));
            }
            h.check_finite()?;
        }
        Ok(ChannelRealization { config, matrices })
    }

    pub fn config(&self) -> NodeConfig {
        self.config
    }

    /// Channel from `link.from` to `link.to`.
    pub fn h(&self, link: Link) -> &ComplexMatrix {
        &self.matrices[link.index()]
    }

    pub fn between(&self, from: Node, to: Node) -> &ComplexMatrix {
        self.h(Link::new(from, to))
    }

    /// Every square submatrix of every channel has full rank.
    pub fn is_generic(&self, tol: Tolerance) -> bool {
        self.matrices.iter().all(|h| all_minors_full_rank(h, tol))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ChannelDocument::from(self)).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ChannelDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.try_into()
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn all_minors_full_rank(h: &ComplexMatrix, tol: Tolerance) -> bool {
    let max_k = h.rows().min(h.cols());
    (1..=max_k).all(|k| {
        let rows = subsets(h.rows(), k);
        let cols = subsets(h.cols(), k);
        rows.iter().all(|r| {
            cols.iter()
                .all(|c| linalg::rank(&h.submatrix(r, c), tol).is_ok_and(|rk| rk == k))
        })
    })
}

/// Samples a generic realization with i.i.d. unit-variance complex Gaussian
/// entries, redrawing if a degenerate realization comes up.
pub fn sample_channel(cfg: NodeConfig, seed: u64) -> Result<ChannelRealization> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = Tolerance::default();
    for _ in 0..GENERICITY_ATTEMPTS {
        let matrices = Link::ALL
            .map(|link| gaussian_matrix(cfg.antennas(link.to), cfg.antennas(link.from), &mut rng));
        let ch = ChannelRealization::new(cfg, matrices)?;
        if ch.is_generic(tol) {
            return Ok(ch);
        }
    }
    Err(Error::DegenerateChannel {
        attempts: GENERICITY_ATTEMPTS,
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct MatrixDocument {
    rows: usize,
    cols: usize,
    /// Row-major `[re, im]` pairs.
    entries: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ChannelDocument {
    antennas: NodeConfig,
    /// Keyed by link name, e.g. `"21"` for `H21`.
    channels: BTreeMap<String, MatrixDocument>,
}

impl From<&ChannelRealization> for ChannelDocument {
    fn from(ch: &ChannelRealization) -> Self {
        let channels = Link::ALL
            .iter()
            .map(|&link| {
                let h = ch.h(link);
                let doc = MatrixDocument {
                    rows: h.rows(),
                    cols: h.cols(),
                    entries: h.row_major().iter().map(|z| [z.re, z.im]).collect(),
                };
                (link.name(), doc)
            })
            .collect();
        ChannelDocument {
            antennas: ch.config,
            channels,
        }
    }
}

impl TryFrom<ChannelDocument> for ChannelRealization {
    type Error = Error;

    fn try_from(mut doc: ChannelDocument) -> Result<Self> {
        let mut mats = Vec::with_capacity(6);
        for link in Link::ALL {
            let m = doc
                .channels
                .remove(&link.name())
                .ok_or_else(|| Error::Parse(format!("missing channel H{link}")))?;
            let entries: Vec<Complex64> = m
                .entries
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect();
            mats.push(ComplexMatrix::from_row_slice(m.rows, m.cols, &entries)?);
        }
        let matrices: [ComplexMatrix; 6] = mats.try_into().expect("six links");
        ChannelRealization::new(doc.antennas, matrices)
    }
}

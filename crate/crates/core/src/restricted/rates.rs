//! Finite-SNR rates of a synthesized scheme and DoF slope estimation.

use serde::{Deserialize, Serialize};

use super::allocation::{Group, StreamAllocation};
use super::Scheme;
use crate::channel::{ChannelRealization, IntermittencyConfig, SnrConfig, StateSequence};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::node::{Link, Node};

/// Per-stream transmit power of each node, linear scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerAllocation {
    powers: [f64; 3],
}

impl PowerAllocation {
    pub fn new(powers: [f64; 3]) -> Result<Self> {
        if powers.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidInput(format!(
                "invalid per-stream powers {powers:?}"
            )));
        }
        Ok(PowerAllocation { powers })
    }

    pub fn get(&self, node: Node) -> f64 {
        self.powers[node.index()]
    }

    /// Powers for a realized state sequence: node 1 only transmits in its
    /// `m` available slots, so it spends `nP/m` split over its streams.
    /// Nodes without streams (or node 1 with `m = 0`) get zero.
    pub fn from_states(alloc: &StreamAllocation, snr: SnrConfig, states: &StateSequence) -> Self {
        let scale = if states.active() == 0 {
            0.0
        } else {
            states.len() as f64 / states.active() as f64
        };
        Self::with_node1_scale(alloc, snr, scale)
    }

    /// Powers with `m` replaced by its expectation `tau n`.
    pub fn expected(alloc: &StreamAllocation, snr: SnrConfig, ic: IntermittencyConfig) -> Self {
        let scale = if ic.tau() > 0.0 { 1.0 / ic.tau() } else { 0.0 };
        Self::with_node1_scale(alloc, snr, scale)
    }

    fn with_node1_scale(alloc: &StreamAllocation, snr: SnrConfig, scale: f64) -> Self {
        let powers = Node::ALL.map(|node| {
            let streams = alloc.node_streams(node);
            if streams == 0 {
                return 0.0;
            }
            let p = snr.power() / streams as f64;
            if node.is_intermittent() {
                p * scale
            } else {
                p
            }
        });
        PowerAllocation { powers }
    }

    /// Energy `node` spends over the state sequence with unit-norm
    /// beamformer columns.
    pub fn energy(&self, alloc: &StreamAllocation, node: Node, states: &StateSequence) -> f64 {
        let slots = if node.is_intermittent() {
            states.active()
        } else {
            states.len()
        };
        slots as f64 * alloc.node_streams(node) as f64 * self.get(node)
    }
}

/// Rate of one stream group, bits per channel use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRate {
    pub group: Group,
    pub streams: usize,
    /// Erasure factor `tau` on links touching node 1.
    pub analytic: f64,
    /// Erasure factor `m / n` from the realized states.
    pub empirical: f64,
}

/// Rates of all groups and messages at one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub snr_db: f64,
    pub tau: f64,
    pub availability: f64,
    pub groups: Vec<GroupRate>,
    /// Per-message analytic rate `R_ij`, in link order 12, 13, 21, 23, 31, 32.
    pub analytic: [f64; 6],
    pub empirical: [f64; 6],
}

impl RateReport {
    pub fn message(&self, link: Link) -> f64 {
        self.analytic[link.index()]
    }

    pub fn sum_rate(&self) -> f64 {
        self.analytic.iter().sum()
    }

    pub fn group(&self, group: Group) -> &GroupRate {
        &self.groups[group.slot()]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `log2 det(I + (p / sigma^2) E E^H)` for the post-coded effective matrix
/// `E = T H V` of `group`, without erasure factor.
pub fn group_log_det(
    scheme: &Scheme,
    ch: &ChannelRealization,
    group: Group,
    power: f64,
    noise_var: f64,
) -> Result<f64> {
    let streams = scheme.allocation.streams(group);
    if streams == 0 || power == 0.0 {
        return Ok(0.0);
    }
    let t = scheme.postcoders.get(group);
    let eff = t * &scheme.beamformers.image_at(ch, group, group.link.to);
    let gram = &eff * &eff.adjoint();
    let m = &ComplexMatrix::identity(gram.rows()) - &gram.scale(-power / noise_var);
    linalg::log2_det_hpd(&m)
}

/// Rates of every group under fixed powers.
///
/// Groups on links touching node 1 are scaled by `tau` (analytic) and by
/// the realized `m / n` (empirical); groups between nodes 2 and 3 are not.
/// Because `pw` is an input rather than derived from `tau`, the analytic
/// rate is exactly `tau` times the rate at `tau = 1`.
pub fn evaluate_rates(
    scheme: &Scheme,
    ch: &ChannelRealization,
    pw: PowerAllocation,
    snr: SnrConfig,
    ic: IntermittencyConfig,
    states: &StateSequence,
) -> Result<RateReport> {
    let mut groups = Vec::with_capacity(12);
    let mut analytic = [0.0; 6];
    let mut empirical = [0.0; 6];
    for group in Group::all() {
        let base = group_log_det(scheme, ch, group, pw.get(group.link.from), snr.noise_var())?;
        let (a, e) = if group.link.is_erasure() {
            (ic.tau() * base, states.availability() * base)
        } else {
            (base, base)
        };
        analytic[group.link.index()] += a;
        empirical[group.link.index()] += e;
        groups.push(GroupRate {
            group,
            streams: scheme.allocation.streams(group),
            analytic: a,
            empirical: e,
        });
    }
    Ok(RateReport {
        snr_db: snr.db(),
        tau: ic.tau(),
        availability: states.availability(),
        groups,
        analytic,
        empirical,
    })
}

/// Evaluates the scheme at each SNR with expected-value powers.
pub fn sweep_snr(
    scheme: &Scheme,
    ch: &ChannelRealization,
    snr_db: &[f64],
    ic: IntermittencyConfig,
    states: &StateSequence,
) -> Result<Vec<RateReport>> {
    snr_db
        .iter()
        .map(|&db| {
            let snr = SnrConfig::from_db(db)?;
            let pw = PowerAllocation::expected(&scheme.allocation, snr, ic);
            evaluate_rates(scheme, ch, pw, snr, ic, states)
        })
        .collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidInput(
            "slope fit needs at least two paired points".into(),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput(
            "slope fit needs distinct abscissae".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

pub const MIN_SNR_DB: f64 = 40.0;
pub const MIN_SNR_SPAN_DB: f64 = 20.0;

/// Fitted DoF per message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DofEstimate {
    pub slopes: [f64; 6],
}

impl DofEstimate {
    pub fn get(&self, link: Link) -> f64 {
        self.slopes[link.index()]
    }

    pub fn sum(&self) -> f64 {
        self.slopes.iter().sum()
    }
}

/// Slope of each analytic message rate against `log2(rho)`.
///
/// Requires at least two reports, all at 40 dB or more, spanning 20 dB.
pub fn estimate_dof(reports: &[RateReport]) -> Result<DofEstimate> {
    let lo = reports
        .iter()
        .map(|r| r.snr_db)
        .fold(f64::INFINITY, f64::min);
    let hi = reports
        .iter()
        .map(|r| r.snr_db)
        .fold(f64::NEG_INFINITY, f64::max);
    if reports.len() < 2 || hi - lo < MIN_SNR_SPAN_DB - 1e-9 {
        return Err(Error::InvalidInput(format!(
            "insufficient SNR spread: need >= 2 points spanning {MIN_SNR_SPAN_DB} dB"
        )));
    }
    if lo < MIN_SNR_DB - 1e-9 {
        return Err(Error::InvalidInput(format!(
            "insufficient SNR: lowest point {lo} dB is below {MIN_SNR_DB} dB"
        )));
    }
    let xs: Vec<f64> = reports
        .iter()
        .map(|r| r.snr_db / 10.0 * 10f64.log2())
        .collect();
    let mut slopes = [0.0; 6];
    for (i, s) in slopes.iter_mut().enumerate() {
        let ys: Vec<f64> = reports.iter().map(|r| r.analytic[i]).collect();
        *s = fit_slope(&xs, &ys)?;
    }
    Ok(DofEstimate { slopes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, sample_states, NodeConfig};
    use crate::linalg::Tolerance;
    use crate::restricted::StreamKind;

    fn cfg(a: usize, b: usize, c: usize) -> NodeConfig {
        NodeConfig::new(a, b, c).unwrap()
    }

    fn ic(tau: f64) -> IntermittencyConfig {
        IntermittencyConfig::new(tau).unwrap()
    }

    fn scheme(alloc: StreamAllocation, ch: &ChannelRealization, seed: u64) -> Scheme {
        Scheme::synthesize(alloc, ch, Tolerance::default(), seed).unwrap()
    }

    #[test]
    fn single_stream_is_scalar_gaussian_channel() {
        let c = cfg(2, 2, 1);
        let ch = sample_channel(c, 3).unwrap();
        let mut alloc = StreamAllocation::zero();
        alloc.set(Link::new(Node::N2, Node::N3), StreamKind::Aligned, 1);
        let s = scheme(alloc, &ch, 3);
        let snr = SnrConfig::from_db(20.0).unwrap();
        let states = sample_states(10, ic(1.0), 0).unwrap();
        let pw = PowerAllocation::expected(&s.allocation, snr, ic(1.0));
        let r = evaluate_rates(&s, &ch, pw, snr, ic(1.0), &states).unwrap();
        let g = Group {
            link: Link::new(Node::N2, Node::N3),
            kind: StreamKind::Aligned,
        };
        let h = s
            .beamformers
            .image_at(&ch, g, Node::N3)
            .get(0, 0)
            .norm_sqr();
        let expect = (1.0 + pw.get(Node::N2) * h / snr.noise_var()).log2();
        assert!((r.group(g).analytic - expect).abs() < 1e-12);
        assert_eq!(r.message(Link::new(Node::N2, Node::N3)), r.sum_rate());
    }

    #[test]
    fn erasure_factor_is_linear() {
        let c = cfg(3, 2, 1);
        let ch = sample_channel(c, 1).unwrap();
        let s = scheme(StreamAllocation::sum_dof_optimal(c), &ch, 1);
        let snr = SnrConfig::from_db(30.0).unwrap();
        let states = sample_states(100, ic(0.5), 1).unwrap();
        let pw = PowerAllocation::expected(&s.allocation, snr, ic(0.5));
        let half = evaluate_rates(&s, &ch, pw, snr, ic(0.5), &states).unwrap();
        let full = evaluate_rates(&s, &ch, pw, snr, ic(1.0), &states).unwrap();
        let l21 = Link::new(Node::N2, Node::N1);
        assert!(half.message(l21) > 0.0);
        assert_eq!(half.message(l21), 0.5 * full.message(l21));
        let l23 = Link::new(Node::N2, Node::N3);
        assert_eq!(half.message(l23), full.message(l23));
    }

    #[test]
    fn power_is_conserved() {
        let c = cfg(4, 3, 2);
        let alloc = StreamAllocation::sum_dof_optimal(c);
        let snr = SnrConfig::from_db(10.0).unwrap();
        let states = sample_states(1000, ic(0.3), 5).unwrap();
        let pw = PowerAllocation::from_states(&alloc, snr, &states);
        let budget = states.len() as f64 * snr.power();
        for node in Node::ALL {
            let e = pw.energy(&alloc, node, &states);
            assert!(e <= budget * (1.0 + 1e-6), "{node}: {e} > {budget}");
            if alloc.node_streams(node) > 0 {
                assert!((e - budget).abs() <= 1e-6 * budget);
            }
        }
    }

    #[test]
    fn zero_streams_get_zero_power() {
        let snr = SnrConfig::from_db(10.0).unwrap();
        let pw = PowerAllocation::expected(&StreamAllocation::zero(), snr, ic(0.5));
        assert_eq!(pw, PowerAllocation::new([0.0; 3]).unwrap());
        let states = StateSequence::new(vec![false; 4]);
        let alloc = StreamAllocation::sum_dof_optimal(cfg(3, 2, 1));
        assert_eq!(
            PowerAllocation::from_states(&alloc, snr, &states).get(Node::N1),
            0.0
        );
    }

    #[test]
    fn exact_line_gives_exact_slope() {
        let xs = [1.0, 2.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 + 1.75 * x).collect();
        assert!((fit_slope(&xs, &ys).unwrap() - 1.75).abs() < 1e-12);
    }

    #[test]
    fn slope_matches_tau_weighted_streams() {
        let c = cfg(3, 2, 1);
        let ch = sample_channel(c, 11).unwrap();
        let s = scheme(StreamAllocation::sum_dof_optimal(c), &ch, 11);
        let states = sample_states(1000, ic(0.5), 11).unwrap();
        let reports = sweep_snr(&s, &ch, &[40.0, 50.0, 60.0], ic(0.5), &states).unwrap();
        let d = estimate_dof(&reports).unwrap();
        let want = s.allocation.predicted_dof(0.5);
        for (got, want) in d.slopes.iter().zip(want) {
            assert!((got - want).abs() < 0.05, "{:?} vs {want:?}", d.slopes);
        }
        assert!((d.sum() - 3.0).abs() < 0.1);
    }

    #[test]
    fn zero_allocation_has_zero_dof() {
        let c = cfg(2, 2, 2);
        let ch = sample_channel(c, 0).unwrap();
        let s = scheme(StreamAllocation::zero(), &ch, 0);
        let states = sample_states(10, ic(0.5), 0).unwrap();
        let reports = sweep_snr(&s, &ch, &[40.0, 60.0], ic(0.5), &states).unwrap();
        assert!(reports.iter().all(|r| r.sum_rate() == 0.0));
        assert_eq!(estimate_dof(&reports).unwrap().slopes, [0.0; 6]);
    }

    #[test]
    fn snr_preconditions() {
        let c = cfg(2, 2, 2);
        let ch = sample_channel(c, 0).unwrap();
        let s = scheme(StreamAllocation::zero(), &ch, 0);
        let states = sample_states(10, ic(0.5), 0).unwrap();
        let one = sweep_snr(&s, &ch, &[50.0], ic(0.5), &states).unwrap();
        assert!(matches!(estimate_dof(&one), Err(Error::InvalidInput(m)) if m.contains("spread")));
        let narrow = sweep_snr(&s, &ch, &[40.0, 50.0], ic(0.5), &states).unwrap();
        assert!(estimate_dof(&narrow).is_err());
        let low = sweep_snr(&s, &ch, &[10.0, 50.0], ic(0.5), &states).unwrap();
        assert!(estimate_dof(&low).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let c = cfg(3, 2, 1);
        let ch = sample_channel(c, 2).unwrap();
        let s = scheme(StreamAllocation::sum_dof_optimal(c), &ch, 2);
        let states = sample_states(10, ic(0.5), 2).unwrap();
        let r = sweep_snr(&s, &ch, &[40.0], ic(0.5), &states)
            .unwrap()
            .remove(0);
        let back: RateReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}

//! Block-Markov relaying of node 3's symbols through node 2.
//!
//! Node 3 streams to node 1, which only hears the slots where it is
//! available. Node 2 hears everything, queues what node 1 missed, and
//! forwards it in the next block, reacting to node 1's state with a
//! one-slot delay. The simulation counts delivered symbols; noise does not
//! affect DoF and is not modeled.

use std::collections::VecDeque;

use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_states_with, NodeConfig};
use crate::error::{Error, Result};
use crate::node::{Link, Node};
use crate::polytope::rational::{as_string, check_probability};
use crate::polytope::{lemma3_outer, polytope_contains, DofPoint, Rational};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub cfg: NodeConfig,
    #[serde(with = "as_string")]
    pub tau: Rational,
    /// Symbols per block.
    pub n: usize,
    /// Number of blocks; the last one carries relay traffic only.
    pub blocks: usize,
    /// `a2 M2`: streams node 2 forwards per slot.
    pub relay_streams: usize,
    /// `a3 M3`: streams node 3 sends per slot.
    pub source_streams: usize,
}

impl AdaptiveConfig {
    pub fn new(
        cfg: NodeConfig,
        tau: Rational,
        n: usize,
        blocks: usize,
        relay_streams: usize,
        source_streams: usize,
    ) -> Result<Self> {
        check_positive_tau(&tau)?;
        if n == 0 || blocks < 2 {
            return Err(Error::InvalidInput(format!(
                "need n >= 1 and at least 2 blocks, got n = {n}, B = {blocks}"
            )));
        }
        if relay_streams > cfg.m2() || source_streams > cfg.m3() {
            return Err(Error::InvalidInput(format!(
                "stream counts ({relay_streams}, {source_streams}) exceed antennas ({}, {})",
                cfg.m2(),
                cfg.m3()
            )));
        }
        if relay_streams + source_streams > cfg.m1() {
            return Err(Error::InvalidInput(format!(
                "node 1 cannot separate {relay_streams} + {source_streams} streams with {} antennas",
                cfg.m1()
            )));
        }
        Ok(AdaptiveConfig {
            cfg,
            tau,
            n,
            blocks,
            relay_streams,
            source_streams,
        })
    }

    /// Config using [`optimal_adaptive_allocation`].
    pub fn optimal(cfg: NodeConfig, tau: Rational, n: usize, blocks: usize) -> Result<Self> {
        let (relay, source) = optimal_adaptive_allocation(cfg, &tau)?;
        AdaptiveConfig::new(cfg, tau, n, blocks, relay, source)
    }
}

fn check_positive_tau(tau: &Rational) -> Result<()> {
    check_probability(tau)?;
    if tau.is_zero() {
        return Err(Error::Domain(
            "adaptive relaying is undefined at tau = 0: node 1 never listens".into(),
        ));
    }
    Ok(())
}

/// `floor((1 - tau) M3 / tau)`: how many streams the relay can keep busy.
fn relay_budget(cfg: NodeConfig, tau: &Rational) -> usize {
    let budget = (Rational::one() - tau) * Rational::from_integer(cfg.m3().into()) / tau;
    budget
        .floor()
        .to_integer()
        .to_usize()
        .expect("budget is a small nonnegative integer")
}

/// `(a2 M2, a3 M3) = (min{M1 - M3, M2, floor((1 - tau) M3 / tau)}, M3)`.
pub fn optimal_adaptive_allocation(cfg: NodeConfig, tau: &Rational) -> Result<(usize, usize)> {
    check_positive_tau(tau)?;
    let relay = (cfg.m1() - cfg.m3())
        .min(cfg.m2())
        .min(relay_budget(cfg, tau));
    Ok((relay, cfg.m3()))
}

/// `min{tau M1, tau (M2 + M3), tau M3 + tau floor((1 - tau) M3 / tau)}`.
pub fn analytic_d31(cfg: NodeConfig, tau: &Rational) -> Result<Rational> {
    check_positive_tau(tau)?;
    let int = |v: usize| Rational::from_integer(v.into());
    let candidates = [
        tau * int(cfg.m1()),
        tau * int(cfg.m2() + cfg.m3()),
        tau * int(cfg.m3() + relay_budget(cfg, tau)),
    ];
    Ok(candidates.into_iter().min().expect("three candidates"))
}

/// Node 2's forwarding logic for one block. It learns node 1's state only
/// after the slot ends, so [`RelayScheduler::transmit`] depends on states
/// revealed for earlier slots alone.
#[derive(Debug, Clone)]
pub struct RelayScheduler {
    queue: VecDeque<u64>,
    batch: Vec<u64>,
    per_slot: usize,
    last_state: Option<bool>,
}

impl RelayScheduler {
    pub fn new(queue: VecDeque<u64>, per_slot: usize) -> Self {
        RelayScheduler {
            queue,
            batch: Vec::new(),
            per_slot,
            last_state: None,
        }
    }

    /// Symbols sent in the current slot: fresh ones from the queue on the
    /// first slot or after a slot node 1 heard, a repeat otherwise.
    pub fn transmit(&mut self) -> &[u64] {
        if self.last_state != Some(false) {
            let take = self.per_slot.min(self.queue.len());
            self.batch = self.queue.drain(..take).collect();
        }
        &self.batch
    }

    /// Reveals node 1's state in the slot just transmitted.
    pub fn reveal(&mut self, state: bool) {
        self.last_state = Some(state);
    }

    pub fn queued(&self) -> usize {
        self.queue.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveResult {
    /// Distinct source symbols node 1 obtained.
    pub delivered_symbols: u64,
    pub direct_symbols: u64,
    pub relayed_symbols: u64,
    /// Symbols left in the relay queue at the end of a block.
    pub dropped_symbols: u64,
    /// `n B`.
    pub total_transmissions: u64,
    pub empirical_d31: f64,
    #[serde(with = "as_string")]
    pub analytic_d31: Rational,
}

impl AdaptiveResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }
}

/// Runs the block-Markov scheme over `B` blocks with fresh i.i.d. states
/// per block.
///
/// Blocks `1..B-1`: node 3 sends `a3 M3` new symbols per slot; node 1
/// keeps those sent while it is available, node 2 queues the rest.
/// Block `b` also forwards block `b - 1`'s queue through a
/// [`RelayScheduler`]; a relayed batch is delivered when node 1 is
/// available in that slot. Block `B` is relay-only.
pub fn simulate_block_markov(ac: &AdaptiveConfig, seed: u64) -> Result<AdaptiveResult> {
    let tau = ac.tau.to_f64().expect("tau is finite");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let source_total = (ac.blocks - 1) * ac.n * ac.source_streams;
    let mut delivered = vec![false; source_total];
    let mut next_symbol = 0u64;
    let mut missed: VecDeque<u64> = VecDeque::new();
    let (mut direct, mut relayed, mut dropped) = (0u64, 0u64, 0u64);

    for block in 0..ac.blocks {
        let states = sample_states_with(ac.n, tau, &mut rng);
        let mut relay = RelayScheduler::new(std::mem::take(&mut missed), ac.relay_streams);
        let source_active = block + 1 < ac.blocks;
        for &s in states.states() {
            if source_active {
                for _ in 0..ac.source_streams {
                    let id = next_symbol;
                    next_symbol += 1;
                    if s {
                        delivered[id as usize] = true;
                        direct += 1;
                    } else {
                        missed.push_back(id);
                    }
                }
            }
            let batch = relay.transmit();
            if s {
                for &id in batch {
                    debug_assert!(!delivered[id as usize], "symbol {id} delivered twice");
                    delivered[id as usize] = true;
                    relayed += 1;
                }
            }
            relay.reveal(s);
        }
        dropped += relay.queued() as u64;
    }

    let distinct = delivered.iter().filter(|&&d| d).count() as u64;
    let total = (ac.n * ac.blocks) as u64;
    Ok(AdaptiveResult {
        delivered_symbols: distinct,
        direct_symbols: direct,
        relayed_symbols: relayed,
        dropped_symbols: dropped,
        total_transmissions: total,
        empirical_d31: distinct as f64 / total as f64,
        analytic_d31: analytic_d31(ac.cfg, &ac.tau)?,
    })
}

/// Adaptive `d31` against the restricted outer bound `d31 <= tau M3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaptationGap {
    #[serde(with = "as_string")]
    pub d31_adaptive: Rational,
    #[serde(with = "as_string")]
    pub restricted_cap: Rational,
    pub violated: bool,
}

/// Checks whether the adaptive point `(0, 0, 0, 0, d31_a, 0)` leaves the
/// restricted outer region. Requires `0 < tau < 1`.
pub fn adaptation_gap(cfg: NodeConfig, tau: &Rational) -> Result<AdaptationGap> {
    if !(tau > &Rational::zero() && tau < &Rational::one()) {
        return Err(Error::Domain(format!(
            "adaptation gap needs 0 < tau < 1, got {tau}"
        )));
    }
    let d31 = analytic_d31(cfg, tau)?;
    let point = DofPoint::single(Link::new(Node::N3, Node::N1), d31.clone())?;
    let violated = !polytope_contains(&lemma3_outer(cfg, tau)?, &point)?;
    Ok(AdaptationGap {
        d31_adaptive: d31,
        restricted_cap: tau * Rational::from_integer(cfg.m3().into()),
        violated,
    })
}

/// One row of a convergence sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    #[serde(rename = "B")]
    pub blocks: usize,
    pub empirical_d31: f64,
    pub analytic_d31: f64,
}

/// Simulates every `(n, B)` combination with the optimal allocation.
pub fn convergence_sweep(
    cfg: NodeConfig,
    tau: &Rational,
    ns: &[usize],
    blocks: &[usize],
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for &b in blocks {
            let ac = AdaptiveConfig::optimal(cfg, tau.clone(), n, b)?;
            let r = simulate_block_markov(&ac, seed)?;
            rows.push(ConvergenceRow {
                n,
                blocks: b,
                empirical_d31: r.empirical_d31,
                analytic_d31: r.analytic_d31.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::rat;
    use proptest::prelude::*;

    fn cfg(a: usize, b: usize, c: usize) -> NodeConfig {
        NodeConfig::new(a, b, c).unwrap()
    }

    #[test]
    fn allocation_examples() {
        assert_eq!(
            optimal_adaptive_allocation(cfg(3, 2, 1), &rat(1, 2)).unwrap(),
            (1, 1)
        );
        assert_eq!(
            optimal_adaptive_allocation(cfg(4, 3, 2), &rat(1, 2)).unwrap(),
            (2, 2)
        );
        assert_eq!(
            optimal_adaptive_allocation(cfg(3, 2, 1), &rat(1, 1)).unwrap(),
            (0, 1)
        );
        assert!(matches!(
            optimal_adaptive_allocation(cfg(3, 2, 1), &rat(0, 1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn analytic_examples() {
        assert_eq!(analytic_d31(cfg(3, 2, 1), &rat(1, 2)).unwrap(), rat(1, 1));
        assert_eq!(analytic_d31(cfg(4, 3, 2), &rat(1, 2)).unwrap(), rat(2, 1));
        for c in NodeConfig::all_up_to(4) {
            assert_eq!(analytic_d31(c, &rat(1, 1)).unwrap(), rat(c.m3() as i64, 1));
        }
    }

    #[test]
    fn gap_examples() {
        let g = adaptation_gap(cfg(3, 2, 1), &rat(1, 2)).unwrap();
        assert_eq!(
            (g.d31_adaptive, g.restricted_cap, g.violated),
            (rat(1, 1), rat(1, 2), true)
        );
        let g = adaptation_gap(cfg(2, 2, 2), &rat(1, 2)).unwrap();
        assert_eq!(
            (g.d31_adaptive, g.restricted_cap, g.violated),
            (rat(1, 1), rat(1, 1), false)
        );
        let g = adaptation_gap(cfg(3, 2, 1), &rat(99, 100)).unwrap();
        assert_eq!(g.d31_adaptive, rat(99, 100));
        assert!(!g.violated);
        assert!(adaptation_gap(cfg(3, 2, 1), &rat(1, 1)).is_err());
        assert!(adaptation_gap(cfg(3, 2, 1), &rat(0, 1)).is_err());
    }

    #[test]
    fn gap_guaranteed_when_relay_has_budget() {
        for c in NodeConfig::all_up_to(4) {
            for tau in [rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3)] {
                let g = adaptation_gap(c, &tau).unwrap();
                let budget = relay_budget(c, &tau);
                assert_eq!(
                    g.violated,
                    c.m1() > c.m3() && budget >= 1,
                    "{c:?} tau={tau}"
                );
            }
        }
    }

    #[test]
    fn config_rejects_bad_inputs() {
        let c = cfg(3, 2, 1);
        assert!(AdaptiveConfig::new(c, rat(1, 2), 10, 1, 1, 1).is_err());
        assert!(AdaptiveConfig::new(c, rat(1, 2), 0, 2, 1, 1).is_err());
        assert!(AdaptiveConfig::new(c, rat(1, 2), 10, 2, 3, 1).is_err());
        assert!(AdaptiveConfig::new(cfg(2, 2, 1), rat(1, 2), 10, 2, 2, 1).is_err());
        assert!(AdaptiveConfig::new(c, rat(0, 1), 10, 2, 1, 1).is_err());
    }

    #[test]
    fn no_erasures_means_direct_delivery_only() {
        let ac = AdaptiveConfig::optimal(cfg(3, 2, 1), rat(1, 1), 100, 4).unwrap();
        let r = simulate_block_markov(&ac, 0).unwrap();
        assert_eq!(r.relayed_symbols, 0);
        assert_eq!(r.delivered_symbols, 300);
        assert_eq!(r.empirical_d31, 3.0 / 4.0);
    }

    #[test]
    fn converges_to_analytic_value() {
        let ac = AdaptiveConfig::optimal(cfg(3, 2, 1), rat(1, 2), 10_000, 50).unwrap();
        let r = simulate_block_markov(&ac, 3).unwrap();
        assert!((r.empirical_d31 - 1.0).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn two_blocks_follow_block_formula() {
        // (B - 1)(m a3M3 + m a2M2) / (n B) with m ~ tau n
        let ac = AdaptiveConfig::optimal(cfg(4, 3, 2), rat(1, 2), 20_000, 2).unwrap();
        let r = simulate_block_markov(&ac, 9).unwrap();
        assert!((r.empirical_d31 - 0.5 * 0.5 * 4.0).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn relay_decisions_ignore_future_states() {
        let queue: VecDeque<u64> = (0..100).collect();
        let states = [true, false, false, true, true, false, true, false];
        let run = |states: &[bool]| {
            let mut r = RelayScheduler::new(queue.clone(), 2);
            let mut out = Vec::new();
            for &s in states {
                out.push(r.transmit().to_vec());
                r.reveal(s);
            }
            out
        };
        let base = run(&states);
        for k in 0..states.len() {
            let mut other = states;
            other[k..].iter_mut().for_each(|s| *s = !*s);
            // slot k is decided before state k is revealed
            assert_eq!(run(&other)[..=k], base[..=k]);
        }
        assert_eq!(base[1], base[2]);
        assert_eq!(base[2], base[3]);
        assert_ne!(base[0], base[1]);
    }

    #[test]
    fn result_json_round_trip() {
        let ac = AdaptiveConfig::optimal(cfg(3, 2, 1), rat(1, 2), 50, 3).unwrap();
        let r = simulate_block_markov(&ac, 1).unwrap();
        let json = r.to_json();
        assert!(json.contains("\"analytic_d31\": \"1\""));
        assert_eq!(serde_json::from_str::<AdaptiveResult>(&json).unwrap(), r);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn each_symbol_delivered_at_most_once(
            m in (1usize..5, 0usize..5, 0usize..5),
            p in 1i64..8,
            n in 1usize..200,
            blocks in 2usize..6,
            seed in any::<u64>(),
        ) {
            let (m3, m2, m1) = (m.0, m.0 + m.1, m.0 + m.1 + m.2);
            let c = cfg(m1, m2, m3);
            let ac = AdaptiveConfig::optimal(c, rat(p, 8), n, blocks).unwrap();
            let r = simulate_block_markov(&ac, seed).unwrap();
            prop_assert_eq!(r.delivered_symbols, r.direct_symbols + r.relayed_symbols);
            prop_assert!(r.delivered_symbols <= ((blocks - 1) * n * ac.source_streams) as u64);
            prop_assert!(r.empirical_d31 <= m1 as f64);
        }

        #[test]
        fn analytic_monotone_in_m1_and_m2(
            m in (1usize..5, 0usize..5, 0usize..5),
            p in 1i64..16,
        ) {
            let tau = rat(p, 16);
            let (m3, m2, m1) = (m.0, m.0 + m.1, m.0 + m.1 + m.2);
            let base = analytic_d31(cfg(m1, m2, m3), &tau).unwrap();
            prop_assert!(analytic_d31(cfg(m1 + 1, m2, m3), &tau).unwrap() >= base.clone());
            prop_assert!(analytic_d31(cfg(m1 + 1, m2 + 1, m3), &tau).unwrap() >= base.clone());
            if m2 < m1 {
                prop_assert!(analytic_d31(cfg(m1, m2 + 1, m3), &tau).unwrap() >= base);
            }
        }
    }
}

//! The restricted (nonadaptive) scheme: zero-forcing and interference
//! alignment with fixed stream counts. Encoders see messages only; node 1's
//! intermittency enters as an erasure factor on its links.

mod allocation;
mod rates;
mod synthesis;

pub use allocation::{Group, StreamAllocation, StreamKind, Violation};
pub use rates::{
    estimate_dof, evaluate_rates, fit_slope, group_log_det, sweep_snr, DofEstimate, GroupRate,
    PowerAllocation, RateReport, MIN_SNR_DB, MIN_SNR_SPAN_DB,
};
pub use synthesis::{
    alignment_dimension, synthesize_beamformers, synthesize_postcoders, BeamformerSet, PostcoderSet,
};

use crate::channel::ChannelRealization;
use crate::error::Result;
use crate::linalg::Tolerance;
use crate::node::Node;

/// An allocation together with its beamformers and post-coders for one
/// channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    pub allocation: StreamAllocation,
    pub beamformers: BeamformerSet,
    pub postcoders: PostcoderSet,
}

impl Scheme {
    pub fn synthesize(
        allocation: StreamAllocation,
        ch: &ChannelRealization,
        tol: Tolerance,
        seed: u64,
    ) -> Result<Scheme> {
        let beamformers = synthesize_beamformers(&allocation, ch, tol, seed)?;
        let postcoders = synthesize_postcoders(&allocation, ch, &beamformers, tol)?;
        Ok(Scheme {
            allocation,
            beamformers,
            postcoders,
        })
    }

    /// Largest `|H_ik V_ij^[1]|` entry over all zero-forcing groups.
    pub fn zero_forcing_residual(&self, ch: &ChannelRealization) -> f64 {
        Group::all()
            .filter(|g| g.kind == StreamKind::ZeroForcing)
            .map(|g| {
                self.beamformers
                    .image_at(ch, g, g.link.bystander())
                    .max_abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest post-coded leakage `|T H V|` from any non-desired column
    /// that reaches a receiver, and largest `|T T^H - I|` entry.
    pub fn postcoder_residuals(&self, ch: &ChannelRealization) -> (f64, f64) {
        let mut leak = 0.0f64;
        let mut orth = 0.0f64;
        for desired in Group::all().filter(|g| self.allocation.streams(*g) > 0) {
            let t = self.postcoders.get(desired);
            let gram = &(t * &t.adjoint()) - &crate::linalg::ComplexMatrix::identity(t.rows());
            orth = orth.max(gram.max_abs());
            let rx = desired.link.to;
            for other in Group::all().filter(|g| *g != desired && g.link.from != rx) {
                if self.allocation.streams(other) > 0 {
                    let img = self.beamformers.image_at(ch, other, rx);
                    leak = leak.max((t * &img).max_abs());
                }
            }
        }
        (leak, orth)
    }

    /// Measured alignment dimension at each receiver.
    pub fn alignment_dimensions(
        &self,
        ch: &ChannelRealization,
        tol: Tolerance,
    ) -> Result<[usize; 3]> {
        let mut out = [0; 3];
        for node in Node::ALL {
            out[node.index()] = alignment_dimension(ch, &self.beamformers, node, tol)?;
        }
        Ok(out)
    }
}

//! Degrees-of-freedom toolkit for the MIMO three-way channel with an
//! intermittently available node.
//!
//! * [`linalg`]: complex dense linear algebra used by synthesis and rates.
//! * [`channel`]: antenna configurations, channel and state sampling.
//! * [`restricted`]: the nonadaptive zero-forcing / alignment scheme and its
//!   finite-SNR rate evaluation.
//! * [`polytope`]: exact rational halfspace systems, Fourier-Motzkin
//!   elimination, simplex and polytope comparison.
//! * [`adaptive`]: block-Markov relaying over the intermittent link.

pub mod adaptive;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod node;
pub mod polytope;
pub mod restricted;

pub use adaptive::{AdaptiveConfig, AdaptiveResult};
pub use channel::{ChannelRealization, IntermittencyConfig, NodeConfig, SnrConfig, StateSequence};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Tolerance};
pub use node::{Link, Node};
pub use polytope::{DofPoint, HalfspaceSystem, Inequality, Rational};
pub use restricted::{
    BeamformerSet, PostcoderSet, PowerAllocation, RateReport, Scheme, StreamAllocation,
};

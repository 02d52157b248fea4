use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::NodeConfig;
use crate::node::{Link, Node};
use crate::polytope::regions::aligned_pair;

/// Stream split: `q = 1` groups are zero-forced at the bystander node,
/// `q = 2` groups are candidates for alignment there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StreamKind {
    ZeroForcing,
    Aligned,
}

impl StreamKind {
    pub const ALL: [StreamKind; 2] = [StreamKind::ZeroForcing, StreamKind::Aligned];

    pub fn q(self) -> u8 {
        match self {
            StreamKind::ZeroForcing => 1,
            StreamKind::Aligned => 2,
        }
    }

    fn slot(self) -> usize {
        self.q() as usize - 1
    }
}

/// A stream group `(link, kind)`, i.e. `a_ij^[q]` streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Group {
    pub link: Link,
    pub kind: StreamKind,
}

impl Group {
    pub fn all() -> impl Iterator<Item = Group> {
        Link::ALL
            .into_iter()
            .flat_map(|link| StreamKind::ALL.map(|kind| Group { link, kind }))
    }

    pub(crate) fn slot(self) -> usize {
        2 * self.link.index() + self.kind.slot()
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}^[{}]", self.link, self.kind.q())
    }
}

/// Integer stream counts for the twelve groups plus the three alignment
/// dimensions, one per receiving node.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamAllocation {
    streams: [[usize; 2]; 6],
    /// Indexed by the node where the alignment is observed: `abar23` at
    /// node 1, `abar13` at node 2, `abar12` at node 3.
    alignment: [usize; 3],
}

/// A failed inequality of the combined allocation constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// `a_ij^[1] <= (M_i - M_k)^+`
    ZeroForcing {
        link: Link,
        streams: usize,
        limit: usize,
    },
    /// Streams sent by a node exceed its antennas.
    Transmit {
        node: Node,
        used: usize,
        limit: usize,
    },
    /// Alignment dimension exceeds one of its three caps.
    Alignment {
        receiver: Node,
        value: usize,
        limit: usize,
    },
    /// Desired plus interference dimensions exceed a node's antennas.
    Receive {
        node: Node,
        used: usize,
        limit: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroForcing {
                link,
                streams,
                limit,
            } => write!(f, "zero-forcing: a{link}^[1] = {streams} exceeds {limit}"),
            Violation::Transmit { node, used, limit } => {
                write!(
                    f,
                    "transmit space: node {node} sends {used} streams on {limit} antennas"
                )
            }
            Violation::Alignment {
                receiver,
                value,
                limit,
            } => write!(
                f,
                "alignment at node {receiver}: dimension {value} exceeds {limit}"
            ),
            Violation::Receive { node, used, limit } => {
                write!(
                    f,
                    "receive space: node {node} needs {used} dimensions of {limit}"
                )
            }
        }
    }
}

impl StreamAllocation {
    pub fn zero() -> Self {
        StreamAllocation::default()
    }

    pub fn streams(&self, group: Group) -> usize {
        self.streams[group.link.index()][group.kind.slot()]
    }

    pub fn get(&self, link: Link, kind: StreamKind) -> usize {
        self.streams(Group { link, kind })
    }

    pub fn set(&mut self, link: Link, kind: StreamKind, count: usize) -> &mut Self {
        self.streams[link.index()][kind.slot()] = count;
        self
    }

    /// Alignment dimension seen at `receiver`.
    pub fn alignment(&self, receiver: Node) -> usize {
        self.alignment[receiver.index()]
    }

    pub fn set_alignment(&mut self, receiver: Node, dim: usize) -> &mut Self {
        self.alignment[receiver.index()] = dim;
        self
    }

    /// `a_ij^[1] + a_ij^[2]`.
    pub fn link_streams(&self, link: Link) -> usize {
        self.streams[link.index()].iter().sum()
    }

    /// All streams transmitted by `node`.
    pub fn node_streams(&self, node: Node) -> usize {
        Link::ALL
            .iter()
            .filter(|l| l.from == node)
            .map(|&l| self.link_streams(l))
            .sum()
    }

    pub fn total_streams(&self) -> usize {
        Node::ALL.iter().map(|&n| self.node_streams(n)).sum()
    }

    /// The allocation achieving the sum-DoF: `a12^[1] = a21^[1] = M2 - M3`,
    /// `a23^[2] = a32^[2] = M3`, with the node-1 alignment maximized.
    pub fn sum_dof_optimal(cfg: NodeConfig) -> Self {
        let (m1, m2, m3) = (cfg.m1(), cfg.m2(), cfg.m3());
        let mut a = StreamAllocation::zero();
        a.set(
            Link::new(Node::N1, Node::N2),
            StreamKind::ZeroForcing,
            m2 - m3,
        )
        .set(
            Link::new(Node::N2, Node::N1),
            StreamKind::ZeroForcing,
            m2 - m3,
        )
        .set(Link::new(Node::N2, Node::N3), StreamKind::Aligned, m3)
        .set(Link::new(Node::N3, Node::N2), StreamKind::Aligned, m3)
        .set_alignment(Node::N1, m3.min((m2 + m3).saturating_sub(m1)));
        a
    }

    /// DoF each message gets: `tau` times its streams on links touching
    /// node 1, its streams otherwise.
    pub fn predicted_dof(&self, tau: f64) -> [f64; 6] {
        Link::ALL.map(|l| {
            let s = self.link_streams(l) as f64;
            if l.is_erasure() {
                tau * s
            } else {
                s
            }
        })
    }

    /// Checks the zero-forcing, transmit, alignment and receive constraints
    /// for every ordering of the nodes.
    pub fn validate(&self, cfg: NodeConfig) -> Vec<Violation> {
        let m = |n: Node| cfg.antennas(n);
        let mut out = Vec::new();
        for link in Link::ALL {
            let k = link.bystander();
            let limit = m(link.from).saturating_sub(m(k));
            let streams = self.get(link, StreamKind::ZeroForcing);
            if streams > limit {
                out.push(Violation::ZeroForcing {
                    link,
                    streams,
                    limit,
                });
            }
        }
        for node in Node::ALL {
            let used = self.node_streams(node);
            if used > m(node) {
                out.push(Violation::Transmit {
                    node,
                    used,
                    limit: m(node),
                });
            }
        }
        for receiver in Node::ALL {
            let (i, j) = aligned_pair(receiver);
            let value = self.alignment(receiver);
            let limit = self
                .get(Link::new(i, j), StreamKind::Aligned)
                .min(self.get(Link::new(j, i), StreamKind::Aligned))
                .min((m(i) + m(j)).saturating_sub(m(receiver)));
            if value > limit {
                out.push(Violation::Alignment {
                    receiver,
                    value,
                    limit,
                });
            }
        }
        for node in Node::ALL {
            let (j, k) = aligned_pair(node);
            let desired: usize = Link::ALL
                .iter()
                .filter(|l| l.to == node)
                .map(|&l| self.link_streams(l))
                .sum();
            let interference = self.get(Link::new(j, k), StreamKind::Aligned)
                + self.get(Link::new(k, j), StreamKind::Aligned);
            let used = (desired + interference).saturating_sub(self.alignment(node));
            if used > m(node) {
                out.push(Violation::Receive {
                    node,
                    used,
                    limit: m(node),
                });
            }
        }
        out
    }

    pub fn is_valid(&self, cfg: NodeConfig) -> bool {
        self.validate(cfg).is_empty()
    }
}

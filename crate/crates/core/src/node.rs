use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the three terminals. Node 1 is the intermittent one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Node {
    N1,
    N2,
    N3,
}

impl Node {
    pub const ALL: [Node; 3] = [Node::N1, Node::N2, Node::N3];

    /// Zero-based index.
    pub fn index(self) -> usize {
        match self {
            Node::N1 => 0,
            Node::N2 => 1,
            Node::N3 => 2,
        }
    }

    /// One-based label as used in link names such as `d31`.
    pub fn label(self) -> usize {
        self.index() + 1
    }

    pub fn from_label(label: usize) -> Option<Node> {
        match label {
            1 => Some(Node::N1),
            2 => Some(Node::N2),
            3 => Some(Node::N3),
            _ => None,
        }
    }

    /// The node distinct from `self` and `other`.
    pub fn third(self, other: Node) -> Node {
        assert_ne!(self, other, "third node of a degenerate pair");
        Node::ALL
            .into_iter()
            .find(|&n| n != self && n != other)
            .expect("three nodes")
    }

    pub fn is_intermittent(self) -> bool {
        self == Node::N1
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Ordered pair `(from, to)` carrying the message `w_{from,to}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub from: Node,
    pub to: Node,
}

impl Link {
    /// DoF coordinate order: 12, 13, 21, 23, 31, 32.
    pub const ALL: [Link; 6] = [
        Link::new(Node::N1, Node::N2),
        Link::new(Node::N1, Node::N3),
        Link::new(Node::N2, Node::N1),
        Link::new(Node::N2, Node::N3),
        Link::new(Node::N3, Node::N1),
        Link::new(Node::N3, Node::N2),
    ];

    pub const fn new(from: Node, to: Node) -> Link {
        Link { from, to }
    }

    /// Position in [`Link::ALL`].
    pub fn index(self) -> usize {
        Link::ALL
            .iter()
            .position(|&l| l == self)
            .expect("link endpoints must differ")
    }

    /// The node that neither sends nor receives on this link.
    pub fn bystander(self) -> Node {
        self.from.third(self.to)
    }

    pub fn reversed(self) -> Link {
        Link::new(self.to, self.from)
    }

    /// Links to or from node 1 behave as erasure channels.
    pub fn is_erasure(self) -> bool {
        self.from.is_intermittent() || self.to.is_intermittent()
    }

    /// Name such as `"21"`.
    pub fn name(self) -> String {
        format!("{}{}", self.from, self.to)
    }

    pub fn parse(s: &str) -> Option<Link> {
        let mut chars = s.chars();
        let from = Node::from_label(chars.next()?.to_digit(10)? as usize)?;
        let to = Node::from_label(chars.next()?.to_digit(10)? as usize)?;
        if chars.next().is_some() || from == to {
            return None;
        }
        Some(Link::new(from, to))
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.from, self.to)
    }
}

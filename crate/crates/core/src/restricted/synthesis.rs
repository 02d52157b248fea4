//! Transmit beamformers and receive post-coders for a stream allocation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::allocation::{Group, StreamAllocation, StreamKind};
use crate::channel::{gaussian_matrix, ChannelRealization};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, Tolerance};
use crate::node::{Link, Node};
use crate::polytope::regions::aligned_pair;

/// One `M_i x a_ij^[q]` precoder per stream group, columns of unit norm.
/// Inactive groups hold an `M_i x 0` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerSet {
    groups: Vec<ComplexMatrix>,
}

impl BeamformerSet {
    pub fn get(&self, group: Group) -> &ComplexMatrix {
        &self.groups[group.slot()]
    }

    pub fn of(&self, link: Link, kind: StreamKind) -> &ComplexMatrix {
        self.get(Group { link, kind })
    }

    /// All precoder columns of `node`, in group order.
    pub fn node_columns(&self, node: Node) -> ComplexMatrix {
        let blocks: Vec<&ComplexMatrix> = Group::all()
            .filter(|g| g.link.from == node)
            .map(|g| self.get(g))
            .collect();
        let rows = blocks.first().map_or(0, |b| b.rows());
        ComplexMatrix::hstack(rows, &blocks).expect("same transmitter")
    }

    /// `H_{from,to} V` for a group.
    pub fn image_at(&self, ch: &ChannelRealization, group: Group, receiver: Node) -> ComplexMatrix {
        ch.between(group.link.from, receiver) * self.get(group)
    }
}

/// One `a_ji^[q] x M_i` post-coder with orthonormal rows per stream group,
/// applied at the group's receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct PostcoderSet {
    groups: Vec<ComplexMatrix>,
}

impl PostcoderSet {
    pub fn get(&self, group: Group) -> &ComplexMatrix {
        &self.groups[group.slot()]
    }

    pub fn of(&self, link: Link, kind: StreamKind) -> &ComplexMatrix {
        self.get(Group { link, kind })
    }
}

/// Dimension of `span(H_ik V_ij^[2]) ∩ span(H_jk V_ji^[2])` at `receiver`
/// `k`, where `i, j` are the other two nodes.
pub fn alignment_dimension(
    ch: &ChannelRealization,
    v: &BeamformerSet,
    receiver: Node,
    tol: Tolerance,
) -> Result<usize> {
    let (i, j) = aligned_pair(receiver);
    let a = v.image_at(
        ch,
        Group {
            link: Link::new(i, j),
            kind: StreamKind::Aligned,
        },
        receiver,
    );
    let b = v.image_at(
        ch,
        Group {
            link: Link::new(j, i),
            kind: StreamKind::Aligned,
        },
        receiver,
    );
    Ok(linalg::subspace_intersection(&a, &b, tol)?.cols())
}

/// Orthonormal basis of `span(H_ik) ∩ span(H_jk)` at each receiver `k`.
fn alignment_bases(ch: &ChannelRealization, tol: Tolerance) -> Result<[ComplexMatrix; 3]> {
    let mut out = Vec::with_capacity(3);
    for k in Node::ALL {
        let (i, j) = aligned_pair(k);
        out.push(linalg::subspace_intersection(
            ch.between(i, k),
            ch.between(j, k),
            tol,
        )?);
    }
    Ok(out.try_into().expect("three receivers"))
}

/// Builds zero-forcing and aligned precoders.
///
/// Zero-forcing groups take random orthonormal combinations of the null
/// space of the channel to the bystander. For each receiver with a
/// requested alignment dimension `abar`, a basis `G` of the intersection of
/// the two incoming channel spans is computed once; the first `abar` columns of the two
/// aligned groups are `H_ik^† G` and `H_jk^† G`, so their images coincide.
/// Remaining aligned columns are random. Randomness is drawn from `seed`.
pub fn synthesize_beamformers(
    alloc: &StreamAllocation,
    ch: &ChannelRealization,
    tol: Tolerance,
    seed: u64,
) -> Result<BeamformerSet> {
    let cfg = ch.config();
    if let Some(v) = alloc.validate(cfg).first() {
        return Err(Error::Synthesis(format!("allocation is infeasible: {v}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = alignment_bases(ch, tol)?;
    let mut groups = Vec::with_capacity(12);
    for group in Group::all() {
        let link = group.link;
        let m_tx = cfg.antennas(link.from);
        let count = alloc.streams(group);
        let bystander = link.bystander();
        let v = match group.kind {
            _ if count == 0 => ComplexMatrix::zeros(m_tx, 0),
            StreamKind::ZeroForcing => {
                let null = linalg::null_space(ch.between(link.from, bystander), tol)?;
                if null.cols() < count {
                    return Err(Error::Synthesis(format!(
                        "{group}: null space of H{}{} has {} dimensions, need {count}",
                        link.from,
                        bystander,
                        null.cols()
                    )));
                }
                // orthonormal mix: a random square mix can be near-singular
                let mix = gaussian_matrix(null.cols(), count, &mut rng);
                linalg::column_space(&(&null * &mix), tol)?
            }
            StreamKind::Aligned => {
                let abar = alloc.alignment(bystander);
                let basis = &bases[bystander.index()];
                if basis.cols() < abar {
                    return Err(Error::Synthesis(format!(
                        "alignment at node {bystander}: channel spans share {} dimensions, need {abar}",
                        basis.cols()
                    )));
                }
                let pinv = linalg::pseudo_inverse(ch.between(link.from, bystander), tol)?;
                let aligned = &pinv * &basis.columns(0, abar);
                let free = gaussian_matrix(m_tx, count - abar, &mut rng);
                ComplexMatrix::hstack(m_tx, &[&aligned, &free])?
            }
        };
        groups.push(v.normalize_columns());
    }
    let set = BeamformerSet { groups };
    for node in Node::ALL {
        let cols = set.node_columns(node);
        if cols.cols() > 0 && linalg::rank(&cols, tol)? < cols.cols() {
            return Err(Error::Synthesis(format!(
                "precoder columns of node {node} are linearly dependent"
            )));
        }
    }
    Ok(set)
}

/// Effective columns reaching `receiver` that are not zero-forced there:
/// every desired group plus the aligned exchange between the other two.
fn receiver_blocks(
    alloc: &StreamAllocation,
    ch: &ChannelRealization,
    v: &BeamformerSet,
    receiver: Node,
) -> Vec<(Group, ComplexMatrix)> {
    let (j, k) = aligned_pair(receiver);
    let mut out = Vec::new();
    for group in Group::all() {
        let incoming = group.link.to == receiver;
        let interfering = group.kind == StreamKind::Aligned
            && (group.link == Link::new(j, k) || group.link == Link::new(k, j));
        if (incoming || interfering) && alloc.streams(group) > 0 {
            out.push((group, v.image_at(ch, group, receiver)));
        }
    }
    out
}

/// Builds post-coders that null every other effective column at the
/// receiver.
///
/// For a desired group with effective columns `D` and interference `X`,
/// let `W` be an orthonormal basis of `span(X)^⊥`. When `W` has more
/// columns than the group has streams, the rows of `T` span the projection
/// of `D` onto `span(W)`, the sub-basis carrying all desired energy.
pub fn synthesize_postcoders(
    alloc: &StreamAllocation,
    ch: &ChannelRealization,
    v: &BeamformerSet,
    tol: Tolerance,
) -> Result<PostcoderSet> {
    let cfg = ch.config();
    let mut groups: Vec<ComplexMatrix> = Group::all()
        .map(|g| ComplexMatrix::zeros(0, cfg.antennas(g.link.to)))
        .collect();
    for receiver in Node::ALL {
        let m_rx = cfg.antennas(receiver);
        let blocks = receiver_blocks(alloc, ch, v, receiver);
        for (group, desired) in blocks.iter().filter(|(g, _)| g.link.to == receiver) {
            let others: Vec<&ComplexMatrix> = blocks
                .iter()
                .filter(|(g, _)| g != group)
                .map(|(_, m)| m)
                .collect();
            let interference = ComplexMatrix::hstack(m_rx, &others)?;
            let free = linalg::orthogonal_complement(&interference, tol)?;
            let seen = &free.adjoint() * desired;
            let basis = linalg::column_space(&seen, tol)?;
            if basis.cols() < desired.cols() {
                return Err(Error::Synthesis(format!(
                    "{group} at node {receiver}: only {} of {} desired dimensions survive interference nulling",
                    basis.cols(),
                    desired.cols()
                )));
            }
            groups[group.slot()] = &basis.adjoint() * &free.adjoint();
        }
    }
    Ok(PostcoderSet { groups })
}

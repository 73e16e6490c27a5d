//! Where should the first player stand?
//!
//! The follower always gets the last word, so the leader's only defense is
//! geometry: carve the tree into pieces so small that no soloist — or any
//! squad of `k` followers — can swallow much. This module builds that
//! defense. [`balanced_partition`] cuts a tree at `tau` points so that every
//! remaining piece weighs at most `W / (tau + 1)`, and [`p1_safe_placement`]
//! turns the cut points into a placement with a provable payoff floor:
//! standing on all the cut points, the leader keeps at least
//! `(m - k + 1) / (m + 1)` of the total weight against any `k` answers.
//!
//! The engine behind both is a classical centroid-style argument. Root the
//! tree anywhere and give every vertex an *extended weight*: its own weight
//! plus everything hanging below it, edges included. Walking downward from
//! the root, there is always a deepest vertex whose extended weight still
//! reaches the target `W / (tau + 1)` while all of its children fall short.
//! Cutting there — or at an interior point of a child edge when the child
//! plus its edge overshoots — peels off pieces of at most the target weight
//! and leaves a remainder light enough for the remaining cuts to handle.
//!
//! A cut vertex belongs to the leader, so its weight counts for nobody:
//! piece weights are always reported with cut vertices zeroed out.

use std::collections::BTreeSet;

use crate::network::{EdgeId, NetworkPoint, PointMap, VertexId, WeightedNetwork};
use crate::scalar::{ExtendedLength, Rational};
use crate::tree::{partition_at_facilities, SubtreePiece};
use crate::{Error, Result};

/// Extended (subtree) weights for a rooted tree: `values[v]` is the weight
/// of `v` itself plus all vertices *and edges* strictly below it. The root's
/// entry therefore equals the whole network weight.
#[derive(Debug, Clone)]
pub struct ExtendedWeightMap {
    pub root: VertexId,
    pub values: Vec<Rational>,
}

impl ExtendedWeightMap {
    pub fn value(&self, v: VertexId) -> &Rational {
        &self.values[v as usize]
    }
}

/// Rooted view of a tree: BFS order plus parent/children adjacency, shared
/// by the extended-weight pass and the descent that picks a cut point.
struct Rooted {
    /// Vertices in BFS order from the root (parents before children).
    order: Vec<VertexId>,
    children: Vec<Vec<(VertexId, EdgeId)>>,
}

fn root_tree(net: &WeightedNetwork, root: VertexId) -> Result<Rooted> {
    if !net.is_tree() {
        return Err(Error::NotATree(
            "extended weights are defined for trees only".into(),
        ));
    }
    let n = net.vertex_count();
    let mut children = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    seen[root as usize] = true;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        // Deterministic child order: neighbors() yields edges by ascending id.
        for &(e, w) in net.neighbors(v) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                children[v as usize].push((w, e));
                order.push(w);
            }
        }
    }
    debug_assert_eq!(order.len(), n, "trees are connected");
    Ok(Rooted { order, children })
}

/// Extended weights of `tree` rooted at `root`. Computed bottom-up:
/// a leaf keeps its own weight, an internal vertex adds each child's
/// extended weight plus the connecting edge's weight.
pub fn extended_weights(tree: &WeightedNetwork, root: VertexId) -> Result<ExtendedWeightMap> {
    if root as usize >= tree.vertex_count() {
        return Err(Error::InvalidPoint(format!("no vertex {root}")));
    }
    let rooted = root_tree(tree, root)?;
    let mut values: Vec<Rational> = (0..tree.vertex_count())
        .map(|v| tree.vertex_weight(v as VertexId).clone())
        .collect();
    for &v in rooted.order.iter().rev() {
        for &(c, e) in &rooted.children[v as usize] {
            let add = &values[c as usize] + &tree.edge(e).weight;
            values[v as usize] += &add;
        }
    }
    debug_assert_eq!(
        values[root as usize],
        tree.total_weight(),
        "the root's subtree is the whole tree"
    );
    Ok(ExtendedWeightMap { root, values })
}

/// One application of the splitting step: either a vertex whose removal
/// sheds only light pieces, or an interior edge point that shaves off a
/// piece of exactly the threshold weight.
enum SplitChoice {
    /// Cut at this vertex; the remainder (if any) hangs off its parent.
    AtVertex {
        v: VertexId,
        parent: Option<VertexId>,
    },
    /// Cut inside this edge; `heavy_side` is the endpoint that stays with
    /// the remainder.
    OnEdge {
        point: NetworkPoint,
        heavy_side: VertexId,
    },
}

/// The descent: walk down from the root, always into a child whose extended
/// weight still reaches `threshold`, and stop at the deepest such vertex.
/// Returns `None` when not even the root reaches the threshold — the whole
/// tree is already light enough.
fn split_with_threshold(
    net: &WeightedNetwork,
    threshold: &Rational,
) -> Result<Option<SplitChoice>> {
    let root: VertexId = 0;
    let rooted = root_tree(net, root)?;
    let weights = extended_weights(net, root)?;
    if weights.value(root) < threshold {
        return Ok(None);
    }
    let mut v = root;
    let mut parent = None;
    'descend: loop {
        for &(c, _) in &rooted.children[v as usize] {
            if weights.value(c) >= threshold {
                parent = Some(v);
                v = c;
                continue 'descend;
            }
        }
        break;
    }
    // Every child now falls short on its own. If a child plus its edge
    // overshoots, cut inside that edge at the exact balance point; otherwise
    // the vertex itself is the cut.
    for &(c, e) in &rooted.children[v as usize] {
        let edge = net.edge(e);
        let with_edge = weights.value(c) + &edge.weight;
        if &with_edge > threshold {
            // Child side must weigh exactly `threshold`: it already carries
            // value(c), so take `threshold - value(c)` out of the edge,
            // spread along its length.
            let needed = threshold - weights.value(c);
            debug_assert!(edge.weight.is_positive(), "an overshoot needs edge weight");
            let fraction = &needed / &edge.weight;
            // Offsets are measured from edge.u; the child side is the
            // interval touching `c`.
            let offset = if c == edge.u {
                &fraction * &edge.length
            } else {
                &(&Rational::one() - &fraction) * &edge.length
            };
            let point = NetworkPoint::on_edge(e, ExtendedLength::from_real(offset));
            debug_assert!(net.canonical_point(&point)?.is_real());
            return Ok(Some(SplitChoice::OnEdge {
                point,
                heavy_side: v,
            }));
        }
    }
    Ok(Some(SplitChoice::AtVertex { v, parent }))
}

/// A point whose removal splits `tree` into one piece of weight at most
/// `tau * W / (tau + 1)` and other pieces of at most `W / (tau + 1)` each.
///
/// On a zero-weight tree every split is balanced; the descent then runs to
/// the smallest-id leaf, which is as good a cut as any.
pub fn find_split_point(tree: &WeightedNetwork, tau: usize) -> Result<NetworkPoint> {
    if tau == 0 {
        return Err(Error::Input("tau must be at least 1".into()));
    }
    let threshold = tree.total_weight() / Rational::from((tau + 1) as i64);
    match split_with_threshold(tree, &threshold)? {
        Some(SplitChoice::AtVertex { v, .. }) => Ok(NetworkPoint::vertex(v)),
        Some(SplitChoice::OnEdge { point, .. }) => Ok(point),
        // Unreachable for tau >= 1: the root's extended weight is the whole
        // tree weight, which always reaches W / (tau + 1).
        None => Ok(NetworkPoint::vertex(0)),
    }
}

/// A tree carved at `points` into pieces no heavier than `threshold`.
///
/// `parts` pairs every piece with its weight *after zeroing cut vertices* —
/// a cut point belongs to the leader, so its weight counts toward no piece.
/// Piece weights plus the zeroed cut-vertex weights add back up to the
/// tree's total weight.
#[derive(Debug)]
pub struct BalancedPartition {
    pub points: Vec<NetworkPoint>,
    pub parts: Vec<(SubtreePiece, Rational)>,
    pub threshold: Rational,
}

/// Weight of one partition piece with its cut (facility) leaves zeroed.
fn piece_weight(piece: &SubtreePiece) -> Rational {
    let mut w = piece.net.total_weight();
    for &leaf in &piece.facility_leaves {
        w -= piece.net.vertex_weight(leaf);
    }
    w
}

/// Deterministic filler positions for leftover cut budget: vertices by id,
/// then dyadic interior points of edges. Only consulted when the remainder
/// is already lighter than the threshold, where any fresh point keeps the
/// partition balanced.
fn padding_point(tree: &WeightedNetwork, used: &BTreeSet<NetworkPoint>) -> Option<NetworkPoint> {
    for v in 0..tree.vertex_count() {
        let p = NetworkPoint::vertex(v as VertexId);
        if !used.contains(&p) {
            return Some(p);
        }
    }
    for denom in 1u32..=16 {
        let d = Rational::from(1i64 << denom);
        for e in 0..tree.edge_count() {
            let len = &tree.edge(e as EdgeId).length;
            if !len.is_positive() {
                continue;
            }
            let mut num = Rational::one();
            while num < d {
                let offset = &(&num / &d) * len;
                let p = NetworkPoint::on_edge(e as EdgeId, ExtendedLength::from_real(offset));
                let p = tree.canonical_point(&p).expect("interior point is valid");
                if !used.contains(&p) {
                    return Some(p);
                }
                num += &Rational::from(2i64);
            }
        }
    }
    None
}

/// Carve `tree` at `tau` points so that no piece outweighs `W / (tau + 1)`.
///
/// The threshold is fixed once from the whole tree's weight. Each round cuts
/// the current remainder at the point [`find_split_point`] would choose for
/// it, peels off the light pieces, and keeps the one heavy piece for the
/// next round. When the remainder itself drops below the threshold early,
/// the leftover budget goes to filler points — extra cuts only subdivide
/// further and can never push a piece back over the threshold.
pub fn balanced_partition(tree: &WeightedNetwork, tau: usize) -> Result<BalancedPartition> {
    if tau == 0 {
        return Err(Error::Input("tau must be at least 1".into()));
    }
    if !tree.is_tree() {
        return Err(Error::NotATree("balanced partitions need a tree".into()));
    }
    let threshold = tree.total_weight() / Rational::from((tau + 1) as i64);

    let mut points: Vec<NetworkPoint> = Vec::with_capacity(tau);
    let mut used: BTreeSet<NetworkPoint> = BTreeSet::new();
    // The live remainder, with a map back into the original tree. Cut
    // vertices inside it carry zero weight so they never sway a later round.
    let mut current: Option<(WeightedNetwork, PointMap)> = {
        let all_v: BTreeSet<VertexId> = (0..tree.vertex_count() as VertexId).collect();
        let all_e: BTreeSet<EdgeId> = (0..tree.edge_count() as EdgeId).collect();
        let (net, map) = tree.subnetwork(&all_v, &all_e)?;
        Some((net, map))
    };

    while points.len() < tau {
        let choice = match &current {
            Some((net, _)) => split_with_threshold(net, &threshold)?,
            None => None,
        };
        let Some(choice) = choice else {
            // Remainder (if any) is already light enough; spend the rest of
            // the budget on filler points.
            let p = padding_point(tree, &used)
                .ok_or_else(|| Error::Input("tree has fewer positions than cut points".into()))?;
            used.insert(p.clone());
            points.push(p);
            continue;
        };
        let (net, map) = current.take().expect("a choice implies a remainder");

        let (local_cut, continue_at) = match choice {
            SplitChoice::AtVertex { v, parent } => (NetworkPoint::vertex(v), parent),
            SplitChoice::OnEdge { point, heavy_side } => (point, Some(heavy_side)),
        };
        let original = tree.canonical_point(&map.map_point(&local_cut))?;
        if used.contains(&original) {
            // The descent landed on an old cut vertex — only possible when
            // the remainder already weighs at most the threshold (the old
            // cut is a zero-weight boundary leaf, so its extended weight is
            // the whole remainder). Treat it as a filled remainder.
            current = Some((net, map));
            let p = padding_point(tree, &used)
                .ok_or_else(|| Error::Input("tree has fewer positions than cut points".into()))?;
            used.insert(p.clone());
            points.push(p);
            continue;
        }
        used.insert(original.clone());
        points.push(original);

        // Split the remainder at the cut and keep only the heavy piece.
        let partition = partition_at_facilities(&net, &[local_cut])?;
        current = match continue_at {
            None => None, // the cut was the remainder's root; nothing above it
            Some(target) => {
                let target = NetworkPoint::vertex(target);
                let mut next = None;
                for piece in partition.subtrees {
                    if piece.map.push_forward(&piece.net, &target).is_some() {
                        let mut net = piece.net;
                        for &leaf in &piece.facility_leaves {
                            net.set_vertex_weight(leaf, Rational::zero());
                        }
                        next = Some((net, map.compose(&piece.map)));
                        break;
                    }
                }
                Some(next.expect("the heavy side survives its own cut"))
            }
        };
    }

    let partition = partition_at_facilities(tree, &points)?;
    let parts: Vec<(SubtreePiece, Rational)> = partition
        .subtrees
        .into_iter()
        .map(|piece| {
            let w = piece_weight(&piece);
            (piece, w)
        })
        .collect();
    debug_assert!(parts.iter().all(|(_, w)| w <= &threshold));
    Ok(BalancedPartition {
        points,
        parts,
        threshold,
    })
}

/// The leader's safe placement: stand on the cut points of a balanced
/// partition with `tau = m`. Whatever `k <= m` answers the follower picks,
/// each of their facilities is fenced inside a single piece, so the leader
/// keeps at least `(m - k + 1) / (m + 1)` of the total weight.
///
/// Returns the placement together with that payoff floor.
pub fn p1_safe_placement(
    tree: &WeightedNetwork,
    m: usize,
    k: usize,
) -> Result<(Vec<NetworkPoint>, Rational)> {
    if m == 0 || k == 0 {
        return Err(Error::Input(
            "both players need at least one facility".into(),
        ));
    }
    if k > m {
        return Err(Error::Input(format!(
            "the floor holds only for k <= m (got k = {k}, m = {m})"
        )));
    }
    let partition = balanced_partition(tree, m)?;
    let numerator = Rational::from((m - k + 1) as i64);
    let denominator = Rational::from((m + 1) as i64);
    let bound = &(&numerator / &denominator) * &tree.total_weight();
    Ok((partition.points, bound))
}

//! Exact best response on trees by divide and conquer.
//!
//! The first player's facilities cut a tree into independent pieces: every
//! route between two pieces passes through a facility, so a second-player
//! placement in one piece can never win demand in another. Each piece is
//! therefore solved on its own and a final budget split stitches the
//! answers together:
//!
//! 1. [`partition_at_facilities`] cuts the tree at the facility positions.
//! 2. A piece bordered by a *single* facility has a closed-form optimum
//!    ([`lone_facility_payoff`]): step infinitesimally past the facility
//!    and everything inside the piece is won at once.
//! 3. A piece bordered by *several* facilities first loses its
//!    facility-free limbs to [`fold_hanging`]: a limb is all-or-nothing for
//!    both players, so its whole demand can be folded into the vertex it
//!    hangs from.
//! 4. [`opt_bounded`] runs a dynamic program over *auxiliary subtrees* of
//!    the folded piece — a subtree plus bookkeeping for demand already won
//!    and placements ruled out by the search order.
//! 5. [`alloc`] splits the budget across independent parts.
//!
//! [`solve_tree`] drives the pipeline and distrusts itself at the end: the
//! reconstructed placement is re-scored by the exact zone engine and must
//! reproduce the table optimum to the digit.

use crate::network::{EdgeId, NetworkPoint, PointMap, VertexId, WeightedNetwork};
use crate::scalar::Rational;
use crate::zones::{
    candidate_set, compute_zones, just_past_vertex, zone_decomposition, ZoneElement,
};
use crate::{Error, Result};
use itertools::Itertools;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

// ---------------------------------------------------------------------------
// Partitioning at the facilities

/// How many first-player facilities border a piece of the partition.
///
/// `Zero` cannot come out of [`partition_at_facilities`] (with a non-empty
/// placement on a connected tree every piece touches a facility), but it is
/// part of the classification domain and callers may construct such pieces
/// by hand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubtreeClass {
    Zero,
    One,
    Many,
}

/// One piece of the tree after cutting at the facilities.
#[derive(Clone, Debug)]
pub struct SubtreePiece {
    /// The piece as a standalone network. Facility positions appear as
    /// leaves: weighted ones where a facility sat on an original vertex,
    /// weight-zero ones where it sat inside an edge.
    pub net: WeightedNetwork,
    /// Maps piece coordinates back to the original tree.
    pub map: PointMap,
    /// Piece-local vertex ids of the bordering facilities.
    pub facility_leaves: Vec<VertexId>,
    pub class: SubtreeClass,
}

#[derive(Clone, Debug)]
pub struct TreePartition {
    pub subtrees: Vec<SubtreePiece>,
}

/// Cuts a tree at the facility positions.
///
/// Each facility becomes a boundary vertex shared by the pieces around it;
/// every other vertex and every scrap of edge length lands in exactly one
/// piece. Facilities must sit at real coordinates — an infinitesimally
/// displaced facility does not cut the continuum cleanly, and the first
/// player never benefits from one.
pub fn partition_at_facilities(
    tree: &WeightedNetwork,
    f: &[NetworkPoint],
) -> Result<TreePartition> {
    if !tree.is_tree() {
        return Err(Error::NotATree("the network has a cycle".into()));
    }
    if f.is_empty() {
        return Err(Error::InvalidPlacement(
            "partitioning needs at least one facility".into(),
        ));
    }
    let mut canon = Vec::with_capacity(f.len());
    for p in f {
        let c = tree.canonical_point(p)?;
        if !c.is_real() {
            return Err(Error::InvalidPlacement(
                "tree solving requires facilities at real coordinates".into(),
            ));
        }
        canon.push(c);
    }

    let (split, split_map) = tree.split_at_points(&canon)?;
    let mut fv: BTreeSet<VertexId> = BTreeSet::new();
    for p in &canon {
        match split_map.push_forward(&split, p) {
            Some(NetworkPoint::Vertex(x)) => {
                fv.insert(x);
            }
            _ => unreachable!("splitting materialises every facility as a vertex"),
        }
    }

    // Flood-fill the non-facility vertices; facility vertices act as walls
    // that join a piece without being expanded.
    let n = split.vertex_count() as VertexId;
    let mut seen = vec![false; n as usize];
    let mut raw: Vec<(BTreeSet<VertexId>, BTreeSet<EdgeId>)> = Vec::new();
    for start in 0..n {
        if seen[start as usize] || fv.contains(&start) {
            continue;
        }
        let mut vs = BTreeSet::from([start]);
        let mut es = BTreeSet::new();
        let mut queue = vec![start];
        seen[start as usize] = true;
        while let Some(u) = queue.pop() {
            for &(eid, w) in split.neighbors(u) {
                es.insert(eid);
                if fv.contains(&w) {
                    vs.insert(w);
                    continue;
                }
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    vs.insert(w);
                    queue.push(w);
                }
            }
        }
        raw.push((vs, es));
    }
    // An edge whose two endpoints both hold facilities touches no
    // non-facility vertex, yet its interior is still contestable. It becomes
    // a piece of its own.
    for (eid, e) in split.edges().iter().enumerate() {
        if fv.contains(&e.u) && fv.contains(&e.v) {
            raw.push((BTreeSet::from([e.u, e.v]), BTreeSet::from([eid as EdgeId])));
        }
    }

    let mut subtrees = Vec::with_capacity(raw.len());
    for (vs, es) in raw {
        let (net, sub_map) = split.subnetwork(&vs, &es)?;
        let map = split_map.compose(&sub_map);
        let facility_leaves: Vec<VertexId> = vs
            .iter()
            .enumerate()
            .filter(|(_, x)| fv.contains(x))
            .map(|(i, _)| i as VertexId)
            .collect();
        let class = match facility_leaves.len() {
            0 => SubtreeClass::Zero,
            1 => SubtreeClass::One,
            _ => SubtreeClass::Many,
        };
        subtrees.push(SubtreePiece {
            net,
            map,
            facility_leaves,
            class,
        });
    }
    Ok(TreePartition { subtrees })
}

/// Payoff the second player extracts from a piece bordered by exactly one
/// facility.
///
/// With any budget at all, an infinitesimal step past the facility into the
/// piece wins every interior point, because each point's nearest-facility
/// route leaves through that very facility. Only the facility vertex itself
/// stays with the first player, so the answer is the piece weight minus the
/// facility's own weight — and extra budget adds nothing.
pub fn lone_facility_payoff(piece: &SubtreePiece, p: u32) -> Rational {
    assert_eq!(
        piece.class,
        SubtreeClass::One,
        "the piece must border exactly one facility"
    );
    if p == 0 {
        return Rational::zero();
    }
    let f = piece.facility_leaves[0];
    piece.net.total_weight() - piece.net.vertex_weight(f)
}

// ---------------------------------------------------------------------------
// Folding facility-free limbs

/// A many-facility piece with its facility-free limbs folded away: every
/// leaf hosts a facility.
#[derive(Clone, Debug)]
pub struct BoundedSubtree {
    pub net: WeightedNetwork,
    /// Maps folded coordinates back to the piece they came from.
    pub map: PointMap,
    /// Local vertex ids of the facility leaves.
    pub facilities: Vec<VertexId>,
    /// How much demand each surviving vertex absorbed from pruned limbs.
    /// Useful for auditing; the weights in `net` already include it.
    pub folded: BTreeMap<VertexId, Rational>,
}

/// Prunes the facility-free limbs of a many-facility piece.
///
/// A limb hanging off the facility-to-facility skeleton is all-or-nothing:
/// every route into it passes its attachment vertex, so whoever is nearest
/// at the attachment is nearest throughout. Folding the limb's entire
/// demand (vertices and edges alike) into the attachment preserves every
/// payoff, and the second player never gains by placing *inside* a limb
/// rather than at its attachment — the attachment placement wins at least
/// as much everywhere.
pub fn fold_hanging(piece: &SubtreePiece) -> BoundedSubtree {
    assert_eq!(
        piece.class,
        SubtreeClass::Many,
        "folding needs at least two facilities"
    );
    let net = &piece.net;
    let fset: BTreeSet<VertexId> = piece.facility_leaves.iter().copied().collect();
    let n = net.vertex_count();
    let mut weight: Vec<Rational> = (0..n as VertexId)
        .map(|x| net.vertex_weight(x).clone())
        .collect();
    let mut degree: Vec<usize> = (0..n as VertexId).map(|x| net.degree(x)).collect();
    let mut alive_v = vec![true; n];
    let mut alive_e = vec![true; net.edge_count()];

    // Peel non-facility leaves inward. Each peeled vertex hands its
    // accumulated demand (own weight plus the connecting edge) to its
    // neighbour, so by the time a limb is gone its whole demand sits on the
    // skeleton vertex it hung from.
    let mut stack: Vec<VertexId> = (0..n as VertexId)
        .filter(|x| degree[*x as usize] == 1 && !fset.contains(x))
        .collect();
    while let Some(x) = stack.pop() {
        let (eid, u) = *net
            .neighbors(x)
            .iter()
            .find(|(e, _)| alive_e[*e as usize])
            .expect("a live leaf keeps its one live edge");
        let moved = weight[x as usize].clone() + &net.edge(eid).weight;
        weight[u as usize] += &moved;
        alive_v[x as usize] = false;
        alive_e[eid as usize] = false;
        degree[u as usize] -= 1;
        if degree[u as usize] == 1 && !fset.contains(&u) {
            stack.push(u);
        }
    }

    let vs: BTreeSet<VertexId> = (0..n as VertexId)
        .filter(|x| alive_v[*x as usize])
        .collect();
    let es: BTreeSet<EdgeId> = (0..net.edge_count() as EdgeId)
        .filter(|e| alive_e[*e as usize])
        .collect();
    let (mut folded_net, map) = net
        .subnetwork(&vs, &es)
        .expect("the skeleton stays connected");

    let mut folded = BTreeMap::new();
    let mut facilities = Vec::new();
    for (local, &orig) in vs.iter().enumerate() {
        let local = local as VertexId;
        let absorbed = &weight[orig as usize] - net.vertex_weight(orig);
        if !absorbed.is_zero() {
            folded_net.set_vertex_weight(local, weight[orig as usize].clone());
            folded.insert(local, absorbed);
        }
        if fset.contains(&orig) {
            facilities.push(local);
        }
    }
    debug_assert_eq!(
        folded_net.total_weight(),
        net.total_weight(),
        "folding conserves demand"
    );
    BoundedSubtree {
        net: folded_net,
        map,
        facilities,
        folded,
    }
}

// ---------------------------------------------------------------------------
// Budget allocation

/// Splits a placement budget across independent parts.
///
/// `profiles[i][q]` is the best payoff part `i` extracts from a budget of
/// `q`; every profile must cover loads `0..=p`. Returns the best total and
/// the lexicographically smallest split achieving it.
pub fn alloc(profiles: &[Vec<Rational>], p: u32) -> (Rational, Vec<u32>) {
    let l = profiles.len();
    assert!(l > 0, "allocation needs at least one part");
    let p = p as usize;
    for g in profiles {
        assert!(g.len() > p, "every profile must cover the full budget");
    }

    // Suffix sweep: after processing part i, `best[q]` is the optimum of
    // distributing q among parts i.. and `choice[i][q]` the share part i
    // takes. Scanning shares in increasing order and replacing only on a
    // strict improvement makes each head share minimal, which yields the
    // lexicographically smallest optimal split overall.
    let mut best = vec![None::<Rational>; p + 1];
    best[0] = Some(Rational::zero());
    let mut choice = vec![vec![0u32; p + 1]; l];
    for i in (0..l).rev() {
        let mut next = vec![None::<Rational>; p + 1];
        for q in 0..=p {
            for a in 0..=q {
                let Some(rest) = &best[q - a] else { continue };
                let val = &profiles[i][a] + rest;
                let better = match &next[q] {
                    None => true,
                    Some(cur) => val > *cur,
                };
                if better {
                    next[q] = Some(val);
                    choice[i][q] = a as u32;
                }
            }
        }
        best = next;
    }

    let total = best[p].clone().expect("a zero share is always available");
    let mut split = Vec::with_capacity(l);
    let mut q = p;
    for row in &choice {
        let a = row[q] as usize;
        split.push(a as u32);
        q -= a;
    }
    debug_assert_eq!(q, 0, "the split must spend the whole budget");
    (total, split)
}

// ---------------------------------------------------------------------------
// The dynamic program over auxiliary subtrees

/// Identity of a dynamic-programming subproblem: which part of the folded
/// piece is still in play, where its root sits, which demand is already
/// won, and which candidates are off limits.
///
/// The subtree extent (vertex and edge sets) is part of the key on purpose:
/// two different cuts can leave subtrees with the same root but different
/// shapes, and collapsing them would mix unrelated subproblems. Served sets
/// only ever hold weight-bearing items, so keys stay canonical.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AuxiliarySubtreeKey {
    pub root: VertexId,
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
    pub served_vertices: BTreeSet<VertexId>,
    pub served_edges: BTreeSet<EdgeId>,
    /// Candidate indices ruled out by the closest-first search discipline.
    /// Indices rather than vertex ids, because the infinitesimally-offset
    /// candidates are not vertices of the structure graph.
    pub forbidden: BTreeSet<u32>,
}

/// Write-once cache of solved subproblems, keyed by subtree identity and
/// remaining budget.
#[derive(Clone, Debug, Default)]
pub struct MemoTable {
    entries: BTreeMap<AuxiliarySubtreeKey, BTreeMap<u32, Rational>>,
}

impl MemoTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(|m| m.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn get(&self, key: &AuxiliarySubtreeKey, p: u32) -> Option<&Rational> {
        self.entries.get(key).and_then(|m| m.get(&p))
    }

    fn insert(&mut self, key: &AuxiliarySubtreeKey, p: u32, value: Rational) {
        let prev = self
            .entries
            .entry(key.clone())
            .or_default()
            .insert(p, value);
        assert!(prev.is_none(), "a solved subproblem is never recomputed");
    }
}

/// Precomputed view of one folded piece: the structure graph in which every
/// candidate position and every zone boundary is a vertex, the service set
/// each candidate would win, and the exact distances the search discipline
/// compares.
#[derive(Clone, Debug)]
pub struct TreeDp {
    graph: WeightedNetwork,
    /// Structure-graph coordinates back to folded-piece coordinates.
    map: PointMap,
    candidates: Vec<Candidate>,
    /// Weight-bearing vertices / edges each candidate serves, measured
    /// against the full facility placement of the piece.
    zones_v: Vec<BTreeSet<VertexId>>,
    zones_e: Vec<BTreeSet<EdgeId>>,
    /// `vdist[c][x]`: exact distance from graph vertex `x` to candidate `c`.
    vdist: Vec<Vec<crate::scalar::ExtendedLength>>,
}

#[derive(Clone, Debug)]
struct Candidate {
    /// Position in structure-graph coordinates.
    point: NetworkPoint,
    /// The graph vertex the candidate sits on — or hugs, for the
    /// infinitesimally-offset ones.
    anchor: VertexId,
}

impl TreeDp {
    pub fn new(bounded: &BoundedSubtree) -> Result<TreeDp> {
        let f_points: Vec<NetworkPoint> = bounded
            .facilities
            .iter()
            .map(|&x| NetworkPoint::vertex(x))
            .collect();
        let pool = candidate_set(&bounded.net, &f_points)?;
        let dec = zone_decomposition(&bounded.net, &f_points, &pool.points)?;

        let mut zones_v = Vec::with_capacity(pool.points.len());
        let mut zones_e = Vec::with_capacity(pool.points.len());
        for zone in &dec.zones {
            let mut vs = BTreeSet::new();
            let mut es = BTreeSet::new();
            for &idx in zone {
                match dec.elements[idx as usize].0 {
                    ZoneElement::Vertex(x) => {
                        vs.insert(x);
                    }
                    ZoneElement::Arc(e) => {
                        es.insert(e);
                    }
                }
            }
            zones_v.push(vs);
            zones_e.push(es);
        }

        let graph = dec.refined;
        let apsp = graph.apsp();
        let nv = graph.vertex_count() as VertexId;
        let mut candidates = Vec::with_capacity(pool.points.len());
        let mut vdist = Vec::with_capacity(pool.points.len());
        for p in &pool.points {
            let gp = dec
                .map
                .push_forward(&graph, &bounded.net.canonical_point(p)?)
                .expect("the structure graph refines the folded piece");
            let anchor = match &gp {
                NetworkPoint::Vertex(x) => *x,
                NetworkPoint::EdgePoint { edge, offset } => {
                    // Only the infinitesimally-offset candidates survive as
                    // edge points, and refinement pinned their real part to
                    // one end of the hosting fragment.
                    let e = graph.edge(*edge);
                    if offset.real.is_zero() {
                        e.u
                    } else {
                        debug_assert_eq!(offset.real, e.length);
                        e.v
                    }
                }
            };
            vdist.push(
                (0..nv)
                    .map(|x| graph.point_distance(&apsp, &NetworkPoint::Vertex(x), &gp))
                    .collect(),
            );
            candidates.push(Candidate { point: gp, anchor });
        }
        Ok(TreeDp {
            graph,
            map: dec.map,
            candidates,
            zones_v,
            zones_e,
            vdist,
        })
    }

    /// The whole folded piece as the opening subproblem. The root is the
    /// smallest vertex id; original vertices keep their ids through
    /// refinement, so this is a vertex of the folded piece itself.
    pub fn full_key(&self) -> AuxiliarySubtreeKey {
        AuxiliarySubtreeKey {
            root: 0,
            vertices: (0..self.graph.vertex_count() as VertexId).collect(),
            edges: (0..self.graph.edge_count() as EdgeId).collect(),
            served_vertices: BTreeSet::new(),
            served_edges: BTreeSet::new(),
            forbidden: BTreeSet::new(),
        }
    }

    fn in_extent(&self, key: &AuxiliarySubtreeKey, ci: u32) -> bool {
        match &self.candidates[ci as usize].point {
            NetworkPoint::Vertex(x) => key.vertices.contains(x),
            NetworkPoint::EdgePoint { edge, .. } => key.edges.contains(edge),
        }
    }

    /// Candidates available inside a subproblem, closest-to-root first
    /// (ties by candidate index).
    fn live_candidates(&self, key: &AuxiliarySubtreeKey) -> Vec<u32> {
        let mut live: Vec<u32> = (0..self.candidates.len() as u32)
            .filter(|ci| !key.forbidden.contains(ci) && self.in_extent(key, *ci))
            .collect();
        live.sort_by(|a, b| {
            self.vdist[*a as usize][key.root as usize]
                .cmp(&self.vdist[*b as usize][key.root as usize])
                .then(a.cmp(b))
        });
        live
    }

    /// Fresh demand a candidate would win inside the subproblem.
    fn gain(&self, key: &AuxiliarySubtreeKey, ci: u32) -> Rational {
        let mut g = Rational::zero();
        for x in &self.zones_v[ci as usize] {
            if key.vertices.contains(x) && !key.served_vertices.contains(x) {
                g += self.graph.vertex_weight(*x);
            }
        }
        for e in &self.zones_e[ci as usize] {
            if key.edges.contains(e) && !key.served_edges.contains(e) {
                g += &self.graph.edge(*e).weight;
            }
        }
        g
    }

    /// Joint payoff of a small pick set, together with the picks that
    /// actually added something (in pick order). Zones overlap, so this is
    /// a union weight, not a sum.
    fn joint_gain(&self, key: &AuxiliarySubtreeKey, picks: &[u32]) -> (Rational, Vec<u32>) {
        let mut scratch = key.clone();
        let mut total = Rational::zero();
        let mut kept = Vec::new();
        for &ci in picks {
            let g = self.gain(&scratch, ci);
            if g.is_zero() {
                continue;
            }
            total += &g;
            kept.push(ci);
            for x in &self.zones_v[ci as usize] {
                scratch.served_vertices.insert(*x);
            }
            for e in &self.zones_e[ci as usize] {
                scratch.served_edges.insert(*e);
            }
        }
        (total, kept)
    }

    /// The root-to-anchor path inside the subproblem's extent: vertices in
    /// root-first order plus the set of path edges.
    fn path_to(
        &self,
        key: &AuxiliarySubtreeKey,
        anchor: VertexId,
    ) -> (Vec<VertexId>, BTreeSet<EdgeId>) {
        let mut parent: BTreeMap<VertexId, (VertexId, EdgeId)> = BTreeMap::new();
        let mut seen = BTreeSet::from([key.root]);
        let mut queue = VecDeque::from([key.root]);
        while let Some(u) = queue.pop_front() {
            for &(eid, w) in self.graph.neighbors(u) {
                if !key.edges.contains(&eid) || !seen.insert(w) {
                    continue;
                }
                parent.insert(w, (u, eid));
                queue.push_back(w);
            }
        }
        let mut vs = vec![anchor];
        let mut es = BTreeSet::new();
        let mut cur = anchor;
        while cur != key.root {
            let (u, eid) = parent[&cur];
            es.insert(eid);
            vs.push(u);
            cur = u;
        }
        vs.reverse();
        (vs, es)
    }

    /// Subproblems left after cutting the path's edges: one per path
    /// vertex, each keeping that vertex plus everything hanging off it. In
    /// a tree no component can touch two path vertices, so the parts are
    /// disjoint.
    fn parts_off_path(
        &self,
        key: &AuxiliarySubtreeKey,
        path_vs: &[VertexId],
        path_es: &BTreeSet<EdgeId>,
    ) -> Vec<(VertexId, BTreeSet<VertexId>, BTreeSet<EdgeId>)> {
        let mut parts = Vec::with_capacity(path_vs.len());
        for &r in path_vs {
            let mut vs = BTreeSet::from([r]);
            let mut es = BTreeSet::new();
            let mut queue = vec![r];
            while let Some(u) = queue.pop() {
                for &(eid, w) in self.graph.neighbors(u) {
                    if !key.edges.contains(&eid) || path_es.contains(&eid) || !es.insert(eid) {
                        continue;
                    }
                    if vs.insert(w) {
                        queue.push(w);
                    }
                }
            }
            parts.push((r, vs, es));
        }
        parts
    }

    /// Keys the subproblem a part becomes after picking candidate `picked`:
    /// the pick's winnings are marked served, and everything strictly
    /// closer to the current root than the pick becomes off limits — a
    /// later placement there would contradict the closest-first order this
    /// branch committed to.
    fn child_key(
        &self,
        key: &AuxiliarySubtreeKey,
        picked: u32,
        part: (VertexId, BTreeSet<VertexId>, BTreeSet<EdgeId>),
    ) -> AuxiliarySubtreeKey {
        let (root, vertices, edges) = part;
        let mut served_vertices = BTreeSet::new();
        for x in key
            .served_vertices
            .iter()
            .chain(&self.zones_v[picked as usize])
        {
            if vertices.contains(x) {
                served_vertices.insert(*x);
            }
        }
        let mut served_edges = BTreeSet::new();
        for e in key
            .served_edges
            .iter()
            .chain(&self.zones_e[picked as usize])
        {
            if edges.contains(e) {
                served_edges.insert(*e);
            }
        }
        let mut child = AuxiliarySubtreeKey {
            root,
            vertices,
            edges,
            served_vertices,
            served_edges,
            forbidden: BTreeSet::new(),
        };
        let d_pick = &self.vdist[picked as usize][key.root as usize];
        for ci in 0..self.candidates.len() as u32 {
            if !self.in_extent(&child, ci) {
                continue;
            }
            if key.forbidden.contains(&ci) || self.vdist[ci as usize][key.root as usize] < *d_pick {
                child.forbidden.insert(ci);
            }
        }
        child
    }
}

/// Subproblems with at most this many live candidates are solved by trying
/// every subset outright.
const DIRECT_LIMIT: usize = 2;

/// Best payoff the second player can extract from one auxiliary subtree
/// with a budget of `p` placements, memoised in `memo`.
///
/// The recursion tries each live candidate as the pick closest to the
/// root. Cutting the root-to-pick path splits the rest into independent
/// parts: any later facility sits at least as far from the root, so
/// whatever its zone reaches beyond its own part was already won by the
/// path pick — nothing is double-counted and nothing is lost. Each part is
/// then solved for every residual budget and [`alloc`] merges the
/// profiles.
pub fn opt_bounded(
    dp: &TreeDp,
    key: &AuxiliarySubtreeKey,
    p: u32,
    memo: &mut MemoTable,
) -> Rational {
    if p == 0 {
        return Rational::zero();
    }
    if let Some(v) = memo.get(key, p) {
        return v.clone();
    }
    let live = dp.live_candidates(key);
    let value = if live.is_empty() {
        Rational::zero()
    } else if live.len() <= DIRECT_LIMIT {
        best_subset(dp, key, &live, p).0
    } else {
        let mut best = Rational::zero();
        for &ci in &live {
            let q = pick_value(dp, key, ci, p, memo);
            if q > best {
                best = q;
            }
        }
        best
    };
    memo.insert(key, p, value.clone());
    value
}

/// Exhaustive base case: the best subset of at most `p` live candidates,
/// with the redundant (zero-marginal) picks already dropped.
fn best_subset(
    dp: &TreeDp,
    key: &AuxiliarySubtreeKey,
    live: &[u32],
    p: u32,
) -> (Rational, Vec<u32>) {
    let mut best = (Rational::zero(), Vec::new());
    for size in 1..=live.len().min(p as usize) {
        for combo in live.iter().copied().combinations(size) {
            let (val, kept) = dp.joint_gain(key, &combo);
            if val > best.0 {
                best = (val, kept);
            }
        }
    }
    best
}

/// Value of committing to `ci` as the closest pick of the subproblem.
fn pick_value(
    dp: &TreeDp,
    key: &AuxiliarySubtreeKey,
    ci: u32,
    p: u32,
    memo: &mut MemoTable,
) -> Rational {
    let gain = dp.gain(key, ci);
    let anchor = dp.candidates[ci as usize].anchor;
    let (path_vs, path_es) = dp.path_to(key, anchor);
    let parts = dp.parts_off_path(key, &path_vs, &path_es);
    let mut profiles = Vec::with_capacity(parts.len());
    for part in parts {
        let child = dp.child_key(key, ci, part);
        let mut g = Vec::with_capacity(p as usize);
        for q in 0..p {
            g.push(opt_bounded(dp, &child, q, memo));
        }
        profiles.push(g);
    }
    let (rest, _) = alloc(&profiles, p - 1);
    gain + rest
}

/// Re-derives an optimal pick set from a filled memo table, walking the
/// same argmax choices `opt_bounded` made. Picks that add no demand are
/// dropped: they cannot change the payoff and would only clutter the
/// placement.
fn replay(dp: &TreeDp, key: &AuxiliarySubtreeKey, p: u32, memo: &mut MemoTable) -> Vec<u32> {
    if p == 0 {
        return Vec::new();
    }
    let live = dp.live_candidates(key);
    if live.is_empty() {
        return Vec::new();
    }
    if live.len() <= DIRECT_LIMIT {
        return best_subset(dp, key, &live, p).1;
    }
    let mut best = Rational::zero();
    let mut winner = None;
    for &ci in &live {
        let q = pick_value(dp, key, ci, p, memo);
        if q > best {
            best = q;
            winner = Some(ci);
        }
    }
    let Some(ci) = winner else {
        return Vec::new();
    };

    let gain = dp.gain(key, ci);
    let (path_vs, path_es) = dp.path_to(key, dp.candidates[ci as usize].anchor);
    let parts = dp.parts_off_path(key, &path_vs, &path_es);
    let mut profiles = Vec::with_capacity(parts.len());
    let mut keys = Vec::with_capacity(parts.len());
    for part in parts {
        let child = dp.child_key(key, ci, part);
        let mut g = Vec::with_capacity(p as usize);
        for q in 0..p {
            g.push(opt_bounded(dp, &child, q, memo));
        }
        profiles.push(g);
        keys.push(child);
    }
    let (rest, split) = alloc(&profiles, p - 1);
    debug_assert_eq!(
        &gain + &rest,
        best,
        "replay must reproduce the memoised optimum"
    );

    let mut picks = Vec::new();
    if !gain.is_zero() {
        picks.push(ci);
    }
    for (child, q) in keys.iter().zip(split) {
        picks.extend(replay(dp, child, q, memo));
    }
    picks
}

// ---------------------------------------------------------------------------
// The full pipeline

/// Exact best response on a tree: an optimal second-player placement and
/// its payoff.
///
/// Facilities must sit at real coordinates. The returned placement may use
/// fewer than `k` points when extra ones cannot add payoff; it is re-scored
/// with the exact zone engine before being returned, so the pair is
/// guaranteed consistent.
pub fn solve_tree(
    tree: &WeightedNetwork,
    f: &[NetworkPoint],
    k: u32,
) -> Result<(Vec<NetworkPoint>, Rational)> {
    let partition = partition_at_facilities(tree, f)?;
    if partition.subtrees.is_empty() || k == 0 {
        return Ok((Vec::new(), Rational::zero()));
    }

    enum Engine {
        Lone {
            place: NetworkPoint,
            payoff: Rational,
        },
        Contested {
            dp: TreeDp,
            memo: MemoTable,
            to_original: PointMap,
        },
    }

    let mut profiles = Vec::with_capacity(partition.subtrees.len());
    let mut engines = Vec::with_capacity(partition.subtrees.len());
    for piece in &partition.subtrees {
        match piece.class {
            SubtreeClass::Zero => unreachable!("every piece borders a facility"),
            SubtreeClass::One => {
                let payoff = lone_facility_payoff(piece, 1);
                let leaf = piece.facility_leaves[0];
                let (eid, _) = *piece
                    .net
                    .neighbors(leaf)
                    .first()
                    .expect("a lone facility borders its piece through an edge");
                let inside = just_past_vertex(&piece.net, leaf, eid);
                let place = tree.canonical_point(&piece.map.map_point(&inside))?;
                let profile: Vec<Rational> = (0..=k)
                    .map(|q| {
                        if q == 0 {
                            Rational::zero()
                        } else {
                            payoff.clone()
                        }
                    })
                    .collect();
                profiles.push(profile);
                engines.push(Engine::Lone { place, payoff });
            }
            SubtreeClass::Many => {
                let bounded = fold_hanging(piece);
                let dp = TreeDp::new(&bounded)?;
                let mut memo = MemoTable::new();
                let full = dp.full_key();
                let profile: Vec<Rational> = (0..=k)
                    .map(|q| opt_bounded(&dp, &full, q, &mut memo))
                    .collect();
                let to_original = piece.map.compose(&bounded.map).compose(&dp.map);
                profiles.push(profile);
                engines.push(Engine::Contested {
                    dp,
                    memo,
                    to_original,
                });
            }
        }
    }

    let (total, split) = alloc(&profiles, k);

    let mut s = Vec::new();
    for (engine, q) in engines.iter_mut().zip(&split) {
        if *q == 0 {
            continue;
        }
        match engine {
            Engine::Lone { place, payoff } => {
                if !payoff.is_zero() {
                    s.push(place.clone());
                }
            }
            Engine::Contested {
                dp,
                memo,
                to_original,
            } => {
                let full = dp.full_key();
                for ci in replay(dp, &full, *q, memo) {
                    let p = to_original.map_point(&dp.candidates[ci as usize].point);
                    s.push(tree.canonical_point(&p)?);
                }
            }
        }
    }

    let check = compute_zones(tree, f, &s)?;
    assert_eq!(
        check.q2, total,
        "the reconstructed placement must reproduce the table optimum"
    );
    Ok((s, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{best_response_exact, OracleOptions};
    use crate::rat;
    use crate::scalar::ExtendedLength;
    use crate::synth;

    fn v(id: u32) -> NetworkPoint {
        NetworkPoint::Vertex(id)
    }

    fn mid(edge: u32, num: i64, den: i64) -> NetworkPoint {
        NetworkPoint::on_edge(edge, ExtendedLength::from_real(rat!(num, den)))
    }

    /// v0 --(length 2, weight 1)-- v1, unit vertex weights.
    fn long_edge() -> WeightedNetwork {
        WeightedNetwork::new(vec![rat!(1), rat!(1)], vec![(0, 1, rat!(2), rat!(1))]).unwrap()
    }

    #[test]
    fn partition_splits_at_an_interior_facility() {
        let net = long_edge();
        let part = partition_at_facilities(&net, &[mid(0, 1, 1)]).unwrap();
        assert_eq!(part.subtrees.len(), 2);
        let mut piece_weights = Vec::new();
        for piece in &part.subtrees {
            assert_eq!(piece.class, SubtreeClass::One);
            let f = piece.facility_leaves[0];
            assert!(
                piece.net.vertex_weight(f).is_zero(),
                "edge-interior facility carries no demand"
            );
            assert_eq!(
                piece.net.degree(f),
                1,
                "the facility borders its piece through one edge"
            );
            piece_weights.push(piece.net.total_weight());
        }
        piece_weights.sort();
        // each side keeps its vertex plus half the edge demand
        assert_eq!(piece_weights, vec![rat!(3, 2), rat!(3, 2)]);
    }

    #[test]
    fn adjacent_facilities_share_an_edge_piece() {
        let net = long_edge();
        let part = partition_at_facilities(&net, &[v(0), v(1)]).unwrap();
        assert_eq!(part.subtrees.len(), 1);
        let piece = &part.subtrees[0];
        assert_eq!(piece.class, SubtreeClass::Many);
        assert_eq!(piece.facility_leaves, vec![0, 1]);
        assert_eq!(piece.net.total_weight(), rat!(3));
    }

    #[test]
    fn lone_piece_concedes_everything_but_the_facility() {
        let net = long_edge();
        let part = partition_at_facilities(&net, &[v(0)]).unwrap();
        assert_eq!(part.subtrees.len(), 1);
        let piece = &part.subtrees[0];
        assert_eq!(lone_facility_payoff(piece, 0), rat!(0));
        assert_eq!(
            lone_facility_payoff(piece, 1),
            rat!(2),
            "vertex plus edge demand"
        );
        assert_eq!(
            lone_facility_payoff(piece, 3),
            rat!(2),
            "extra budget adds nothing"
        );
    }

    #[test]
    fn folding_moves_limb_demand_to_its_attachment() {
        // star: v0 centre; leaves v1, v2 hold facilities, v3 hangs free
        let net = WeightedNetwork::new(
            vec![rat!(1); 4],
            vec![
                (0, 1, rat!(1), rat!(1)),
                (0, 2, rat!(1), rat!(1)),
                (0, 3, rat!(1), rat!(1)),
            ],
        )
        .unwrap();
        let part = partition_at_facilities(&net, &[v(1), v(2)]).unwrap();
        assert_eq!(part.subtrees.len(), 1);
        let piece = &part.subtrees[0];
        assert_eq!(piece.class, SubtreeClass::Many);

        let bounded = fold_hanging(piece);
        assert_eq!(bounded.net.vertex_count(), 3, "the free limb is gone");
        assert_eq!(bounded.net.total_weight(), piece.net.total_weight());
        // the centre absorbed v3 and its edge
        let (&attachment, absorbed) = bounded.folded.iter().next().unwrap();
        assert_eq!(bounded.folded.len(), 1);
        assert_eq!(*absorbed, rat!(2));
        assert_eq!(bounded.net.vertex_weight(attachment), &rat!(3));
    }

    #[test]
    fn budget_split_prefers_the_lexicographically_smallest() {
        let profiles = vec![
            vec![rat!(0), rat!(5), rat!(6)],
            vec![rat!(0), rat!(3), rat!(9)],
        ];
        assert_eq!(alloc(&profiles, 2), (rat!(9), vec![0, 2]));
        assert_eq!(alloc(&profiles, 0), (rat!(0), vec![0, 0]));
        assert_eq!(alloc(&[vec![rat!(0), rat!(7)]], 1), (rat!(7), vec![1]));
    }

    #[test]
    fn single_contested_edge_is_split_in_half() {
        let net =
            WeightedNetwork::new(vec![rat!(1), rat!(1)], vec![(0, 1, rat!(1), rat!(1))]).unwrap();
        let (s, q2) = solve_tree(&net, &[v(0), v(1)], 1).unwrap();
        assert_eq!(q2, rat!(1, 2), "one placement wins half the edge");
        assert_eq!(s, vec![just_past_vertex(&net, 0, 0)]);

        let (s, q2) = solve_tree(&net, &[v(0), v(1)], 2).unwrap();
        assert_eq!(q2, rat!(1), "two placements squeeze out the whole edge");
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn middle_vertex_recaptures_the_path() {
        let net = WeightedNetwork::new(
            vec![rat!(1); 3],
            vec![(0, 1, rat!(1), rat!(1)), (1, 2, rat!(1), rat!(1))],
        )
        .unwrap();
        let (s, q2) = solve_tree(&net, &[v(0), v(2)], 1).unwrap();
        assert_eq!(q2, rat!(2));
        assert_eq!(s.len(), 1);

        // with two placements only the occupied endpoints stay safe
        let (s, q2) = solve_tree(&net, &[v(0), v(2)], 2).unwrap();
        assert_eq!(q2, rat!(3));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn a_fully_occupied_tree_concedes_nothing() {
        let net = WeightedNetwork::new(vec![rat!(5)], vec![]).unwrap();
        let (s, q2) = solve_tree(&net, &[v(0)], 3).unwrap();
        assert!(s.is_empty());
        assert_eq!(q2, rat!(0));
    }

    #[test]
    fn offset_facilities_are_rejected() {
        let net = long_edge();
        let shifted = just_past_vertex(&net, 0, 0);
        assert!(matches!(
            solve_tree(&net, &[shifted], 1),
            Err(Error::InvalidPlacement(_))
        ));
    }

    #[test]
    fn cycles_are_rejected() {
        let net = WeightedNetwork::new(
            vec![rat!(1); 3],
            vec![
                (0, 1, rat!(1), rat!(1)),
                (1, 2, rat!(1), rat!(1)),
                (0, 2, rat!(1), rat!(1)),
            ],
        )
        .unwrap();
        assert!(matches!(
            solve_tree(&net, &[v(0)], 1),
            Err(Error::NotATree(_))
        ));
    }

    #[test]
    fn matches_the_exhaustive_oracle_on_random_trees() {
        for seed in 0..12u64 {
            let n = 3 + (seed % 4) as usize;
            let net = synth::random_tree(seed, n);
            let m = 1 + (seed % 2) as usize;
            let f = synth::random_points(seed.wrapping_add(99), &net, m, false);
            for k in 0..=2u32 {
                let (_, q2) = solve_tree(&net, &f, k).unwrap();
                let oracle = best_response_exact(&net, &f, k, &OracleOptions::default()).unwrap();
                assert_eq!(
                    q2, oracle.best_q2,
                    "seed {seed}, n {n}, m {m}, k {k}: solver and oracle disagree"
                );
            }
        }
    }
}

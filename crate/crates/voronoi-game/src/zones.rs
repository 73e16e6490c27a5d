//! Exact service zones and payoffs for a fixed pair of placements.
//!
//! Given first-player facilities `F` and second-player facilities `S`, every
//! point of the network is served by the nearest facility overall, with ties
//! going to the second player. This module computes the resulting payoff
//! split exactly, decomposes the network into ownership segments, derives
//! the finite candidate set that suffices for optimal second-player play,
//! and locates the boundary points between service regions.
//!
//! # How evaluation works
//!
//! The network is first refined so that every `F` facility sits at (or
//! within an infinitesimal of) a vertex: we split edges at the real parts of
//! `F`'s positions. On each arc of the refined network, the distance to any
//! *fixed* facility is then a minimum of a "rising" line `a + ω` (entering
//! the arc at its low end) and a "falling" line `b + (L - ω)` (entering at
//! the high end) — plus, for a facility hosted *on* the arc, direct branches
//! with the same slopes. The pointwise minimum over a whole placement
//! therefore has one rising and one falling branch per player per arc
//! (second-player facilities may still host mid-arc apexes, which bound the
//! segments we examine). Comparing two such envelopes over a segment needs
//! at most four breakpoints: each envelope's own kink plus the two
//! cross-player crossings of opposite-slope branches. Between consecutive
//! breakpoints ownership is constant, so an exact comparison at the rational
//! midpoint decides each piece.
//!
//! All arithmetic is exact; infinitesimal components ride along in
//! [`ExtendedLength`] and participate in every comparison, which is how
//! "placed immediately past a facility" placements get their correct zones.

use crate::network::{Apsp, EdgeId, NetworkPoint, PointMap, VertexId, WeightedNetwork};
use crate::rat;
use crate::scalar::{ExtendedLength, Rational};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Who serves a piece of the network, and which of that player's facilities
/// it is attributed to. Attribution ties break toward the second player,
/// then toward the smallest facility index.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "player", content = "index", rename_all = "lowercase")]
pub enum Owner {
    P1(usize),
    P2(usize),
}

impl Owner {
    pub fn is_p2(&self) -> bool {
        matches!(self, Owner::P2(_))
    }
}

/// A maximal run of one edge served by a single owner, in original edge
/// coordinates (`lo < hi`, offsets from the edge's smaller endpoint).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneSegment {
    pub edge: EdgeId,
    pub lo: Rational,
    pub hi: Rational,
    pub owner: Owner,
}

/// The full outcome of a position: exact payoffs, per-facility shares, and
/// the ownership decomposition of vertices and edges.
///
/// `q1` and `q2` are accumulated independently (neither is derived as
/// "total minus the other"), so `q1 + q2 == total weight` is a meaningful
/// invariant to test rather than a tautology.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZoneReport {
    pub p1: Vec<NetworkPoint>,
    pub p2: Vec<NetworkPoint>,
    pub q1: Rational,
    pub q2: Rational,
    /// Weight served by each first-player facility, index-aligned with `p1`.
    pub p1_share: Vec<Rational>,
    /// Weight served by each second-player facility, index-aligned with `p2`.
    pub p2_share: Vec<Rational>,
    /// Owner of each original vertex.
    pub vertex_owner: Vec<Owner>,
    /// Ownership runs over the original edges, sorted by `(edge, lo)` with
    /// adjacent same-owner runs merged.
    pub segments: Vec<ZoneSegment>,
}

/// Precomputed distance data for one (prospective) second-player facility:
/// its exact distance to every vertex of the refined network, plus its host
/// arc when it sits on an edge interior. Handles let a search evaluate many
/// subsets without recomputing shortest paths.
#[derive(Clone, Debug)]
pub struct PointHandle {
    pub(crate) point: NetworkPoint,
    vdist: Vec<ExtendedLength>,
    /// `(arc, apex offset)` in refined-network coordinates.
    host: Option<(EdgeId, ExtendedLength)>,
}

impl PointHandle {
    pub fn point(&self) -> &NetworkPoint {
        &self.point
    }
}

struct ArcEnvelope {
    /// Least rising-branch constant over `F` and the facility attaining it.
    a: ExtendedLength,
    a_idx: usize,
    /// Least falling-branch constant over `F` and the facility attaining it.
    b: ExtendedLength,
    b_idx: usize,
}

enum Side {
    P1(usize),
    P2(usize),
}

/// One atom of a network walk: a whole vertex, or an interval of one arc
/// (refined-network coordinates) on which ownership is constant.
enum ScanItem {
    Vertex(VertexId),
    Piece(EdgeId, Rational, Rational),
}

/// Exact payoff evaluator for a fixed first-player placement.
///
/// Construction refines the network around `F` and runs all-pairs shortest
/// paths once; evaluating a second-player placement is then comparatively
/// cheap, and precomputed [`PointHandle`]s make repeated evaluation over a
/// candidate pool cheaper still.
pub struct Evaluator {
    original: WeightedNetwork,
    split: WeightedNetwork,
    map: PointMap,
    apsp: Apsp,
    f_points: Vec<NetworkPoint>,
    arcs_p1: Vec<ArcEnvelope>,
    /// Per refined vertex: nearest `F` distance and the facility attaining it.
    d1_vertex: Vec<(ExtendedLength, usize)>,
    original_vertex_count: usize,
}

impl Evaluator {
    pub fn new(net: &WeightedNetwork, f: &[NetworkPoint]) -> Result<Self> {
        if f.is_empty() {
            return Err(Error::InvalidPlacement(
                "first player must place at least one facility".into(),
            ));
        }
        let mut f_points = Vec::with_capacity(f.len());
        for p in f {
            let p = net.canonical_point(p)?;
            if f_points.contains(&p) {
                return Err(Error::InvalidPlacement(format!(
                    "facility {p} appears twice"
                )));
            }
            f_points.push(p);
        }

        let (split, map) = net.split_at_points(&f_points)?;
        let apsp = split.apsp();

        // Per-facility distance data in the refined network.
        let mut handles = Vec::with_capacity(f_points.len());
        for p in &f_points {
            handles.push(make_handle(&split, &map, &apsp, p));
        }

        let n = split.vertex_count();
        let mut d1_vertex = Vec::with_capacity(n);
        for x in 0..n as VertexId {
            let mut best: Option<(ExtendedLength, usize)> = None;
            for (i, h) in handles.iter().enumerate() {
                let d = &h.vdist[x as usize];
                if best.as_ref().is_none_or(|(b, _)| d < b) {
                    best = Some((d.clone(), i));
                }
            }
            d1_vertex.push(best.expect("placement is non-empty"));
        }

        // Branch constants per arc. Facilities were split onto arc
        // boundaries, so each contributes at most one direct branch per end
        // and the envelope constants are arc-wide.
        let mut arcs_p1 = Vec::with_capacity(split.edge_count());
        for (aid, arc) in split.edges().iter().enumerate() {
            let len = ExtendedLength::from_real(arc.length.clone());
            let mut a: Option<(ExtendedLength, usize)> = None;
            let mut b: Option<(ExtendedLength, usize)> = None;
            for (i, h) in handles.iter().enumerate() {
                let mut ra = h.vdist[arc.u as usize].clone();
                let mut rb = h.vdist[arc.v as usize].clone();
                if let Some((ha, apex)) = &h.host {
                    if *ha == aid as EdgeId {
                        debug_assert!(apex.real.is_zero() || apex.real == arc.length);
                        if apex.real.is_zero() {
                            ra = ra.min(-apex);
                        } else {
                            rb = rb.min(apex - &len);
                        }
                    }
                }
                if a.as_ref().is_none_or(|(cur, _)| ra < *cur) {
                    a = Some((ra, i));
                }
                if b.as_ref().is_none_or(|(cur, _)| rb < *cur) {
                    b = Some((rb, i));
                }
            }
            let (a, a_idx) = a.expect("placement is non-empty");
            let (b, b_idx) = b.expect("placement is non-empty");
            arcs_p1.push(ArcEnvelope { a, a_idx, b, b_idx });
        }

        Ok(Evaluator {
            original: net.clone(),
            split,
            map,
            apsp,
            f_points,
            arcs_p1,
            d1_vertex,
            original_vertex_count: net.vertex_count(),
        })
    }

    pub fn facilities(&self) -> &[NetworkPoint] {
        &self.f_points
    }

    pub fn total_weight(&self) -> Rational {
        self.original.total_weight()
    }

    /// Precomputes distance data for a prospective second-player facility
    /// (given in original-network coordinates).
    pub fn handle(&self, p: &NetworkPoint) -> Result<PointHandle> {
        let p = self.original.canonical_point(p)?;
        Ok(make_handle(&self.split, &self.map, &self.apsp, &p))
    }

    /// Second-player payoff for a placement described by handles. The
    /// workhorse of subset search: no shortest paths are recomputed.
    pub fn q2_with_handles(&self, hs: &[&PointHandle]) -> Rational {
        let mut q2 = Rational::zero();
        self.scan(hs, true, |item, side| {
            if let Side::P2(_) = side {
                match item {
                    ScanItem::Vertex(v) => q2 += self.split.vertex_weight(v),
                    ScanItem::Piece(aid, x, y) => {
                        let arc = self.split.edge(aid);
                        q2 += &(&arc.weight * &(y - x)) / &arc.length;
                    }
                }
            }
        });
        q2
    }

    /// Second-player payoff for a placement given as points.
    pub fn q2(&self, s: &[NetworkPoint]) -> Result<Rational> {
        let handles = self.handles_for(s)?;
        let refs: Vec<&PointHandle> = handles.iter().collect();
        Ok(self.q2_with_handles(&refs))
    }

    /// Full evaluation: payoffs, shares, vertex owners, and the segment
    /// decomposition mapped back to original edge coordinates.
    pub fn report(&self, s: &[NetworkPoint]) -> Result<ZoneReport> {
        let handles = self.handles_for(s)?;
        let refs: Vec<&PointHandle> = handles.iter().collect();

        let mut q1 = Rational::zero();
        let mut q2 = Rational::zero();
        let mut p1_share = vec![Rational::zero(); self.f_points.len()];
        let mut p2_share = vec![Rational::zero(); handles.len()];
        let mut vertex_owner: Vec<Option<Owner>> = vec![None; self.original_vertex_count];
        let mut raw: Vec<(EdgeId, Rational, Rational, Owner)> = Vec::new();

        self.scan(&refs, false, |item, side| match item {
            ScanItem::Piece(aid, x, y) => {
                let arc = self.split.edge(aid);
                let w = &(&arc.weight * &(&y - &x)) / &arc.length;
                let span = self.map.edge_span(aid);
                let (lo, hi) = if span.reversed {
                    (&span.hi - &y, &span.hi - &x)
                } else {
                    (&span.lo + &x, &span.lo + &y)
                };
                let owner = match side {
                    Side::P1(i) => {
                        q1 += &w;
                        p1_share[i] += &w;
                        Owner::P1(i)
                    }
                    Side::P2(j) => {
                        q2 += &w;
                        p2_share[j] += &w;
                        Owner::P2(j)
                    }
                };
                raw.push((span.parent_edge, lo, hi, owner));
            }
            ScanItem::Vertex(v) => {
                let w = self.split.vertex_weight(v);
                let owner = match side {
                    Side::P1(i) => {
                        q1 += w;
                        p1_share[i] += w;
                        Owner::P1(i)
                    }
                    Side::P2(j) => {
                        q2 += w;
                        p2_share[j] += w;
                        Owner::P2(j)
                    }
                };
                if (v as usize) < self.original_vertex_count {
                    vertex_owner[v as usize] = Some(owner);
                }
            }
        });

        raw.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let mut segments: Vec<ZoneSegment> = Vec::with_capacity(raw.len());
        for (edge, lo, hi, owner) in raw {
            if let Some(last) = segments.last_mut() {
                if last.edge == edge && last.owner == owner && last.hi == lo {
                    last.hi = hi;
                    continue;
                }
            }
            segments.push(ZoneSegment {
                edge,
                lo,
                hi,
                owner,
            });
        }

        Ok(ZoneReport {
            p1: self.f_points.clone(),
            p2: handles.into_iter().map(|h| h.point).collect(),
            q1,
            q2,
            p1_share,
            p2_share,
            vertex_owner: vertex_owner
                .into_iter()
                .map(|o| o.expect("all vertices visited"))
                .collect(),
            segments,
        })
    }

    fn handles_for(&self, s: &[NetworkPoint]) -> Result<Vec<PointHandle>> {
        let mut canon = Vec::with_capacity(s.len());
        for p in s {
            let p = self.original.canonical_point(p)?;
            if canon.contains(&p) {
                return Err(Error::InvalidPlacement(format!(
                    "facility {p} appears twice"
                )));
            }
            canon.push(p);
        }
        Ok(canon
            .iter()
            .map(|p| make_handle(&self.split, &self.map, &self.apsp, p))
            .collect())
    }

    /// Walks every vertex and every constant-ownership piece of every arc,
    /// reporting the owner of each. `skip_weightless` elides zero-weight
    /// work for payoff-only evaluation.
    fn scan(
        &self,
        hs: &[&PointHandle],
        skip_weightless: bool,
        mut visit: impl FnMut(ScanItem, Side),
    ) {
        for x in 0..self.split.vertex_count() as VertexId {
            if skip_weightless && self.split.vertex_weight(x).is_zero() {
                continue;
            }
            let (d1, i1) = &self.d1_vertex[x as usize];
            let mut best: Option<(&ExtendedLength, usize)> = None;
            for (j, h) in hs.iter().enumerate() {
                let d = &h.vdist[x as usize];
                if best.is_none_or(|(b, _)| d < b) {
                    best = Some((d, j));
                }
            }
            let side = match best {
                Some((d2, j)) if d2 <= d1 => Side::P2(j),
                _ => Side::P1(*i1),
            };
            visit(ScanItem::Vertex(x), side);
        }

        let two = rat!(2);
        for (aid, arc) in self.split.edges().iter().enumerate() {
            if skip_weightless && arc.weight.is_zero() {
                continue;
            }
            let aid = aid as EdgeId;
            let env1 = &self.arcs_p1[aid as usize];
            let len = &arc.length;
            let len_el = ExtendedLength::from_real(len.clone());

            if hs.is_empty() {
                // Unopposed: the whole arc is the first player's, split at
                // the envelope kink so per-facility attribution stays exact.
                let kink = (&env1.b + &len_el - &env1.a).halve().real;
                let mut pieces = vec![Rational::zero()];
                if kink.is_positive() && kink < *len {
                    pieces.push(kink);
                }
                pieces.push(len.clone());
                for piece in pieces.windows(2) {
                    let (px, py) = (&piece[0], &piece[1]);
                    let mid = ExtendedLength::from_real((px + py) / &two);
                    let side = if &env1.a + &mid <= &env1.b + &len_el - &mid {
                        env1.a_idx
                    } else {
                        env1.b_idx
                    };
                    visit(ScanItem::Piece(aid, px.clone(), py.clone()), Side::P1(side));
                }
                continue;
            }

            // Mid-arc apexes of hosted opponents bound the segments.
            let mut cuts: Vec<Rational> = hs
                .iter()
                .filter_map(|h| h.host.as_ref())
                .filter(|(a, apex)| *a == aid && apex.real.is_positive() && apex.real < *len)
                .map(|(_, apex)| apex.real.clone())
                .collect();
            cuts.sort();
            cuts.dedup();
            let mut bounds = Vec::with_capacity(cuts.len() + 2);
            bounds.push(Rational::zero());
            bounds.extend(cuts);
            bounds.push(len.clone());

            for seg in bounds.windows(2) {
                let (x, y) = (&seg[0], &seg[1]);

                // Opponent branch constants valid throughout [x, y].
                let mut a2: Option<(ExtendedLength, usize)> = None;
                let mut b2: Option<(ExtendedLength, usize)> = None;
                for (j, h) in hs.iter().enumerate() {
                    let mut ra = h.vdist[arc.u as usize].clone();
                    let mut rb = h.vdist[arc.v as usize].clone();
                    if let Some((ha, apex)) = &h.host {
                        if *ha == aid {
                            if apex.real <= *x {
                                ra = ra.min(-apex);
                            }
                            if apex.real >= *y {
                                rb = rb.min(apex - &len_el);
                            }
                        }
                    }
                    if a2.as_ref().is_none_or(|(cur, _)| ra < *cur) {
                        a2 = Some((ra, j));
                    }
                    if b2.as_ref().is_none_or(|(cur, _)| rb < *cur) {
                        b2 = Some((rb, j));
                    }
                }
                let (a2, a2_idx) = a2.expect("hs is non-empty");
                let (b2, b2_idx) = b2.expect("hs is non-empty");

                // Breakpoints: the two envelope kinks and the two
                // cross-player crossings of opposite-slope branches.
                let mut marks: Vec<Rational> = Vec::with_capacity(4);
                for el in [
                    &env1.b + &len_el - &env1.a,
                    &b2 + &len_el - &a2,
                    &b2 + &len_el - &env1.a,
                    &env1.b + &len_el - &a2,
                ] {
                    let r = el.halve().real;
                    if r > *x && r < *y {
                        marks.push(r);
                    }
                }
                marks.sort();
                marks.dedup();
                let mut pieces = Vec::with_capacity(marks.len() + 2);
                pieces.push(x.clone());
                pieces.extend(marks);
                pieces.push(y.clone());

                for piece in pieces.windows(2) {
                    let (px, py) = (&piece[0], &piece[1]);
                    let mid = ExtendedLength::from_real((px + py) / &two);
                    let g1r = &env1.a + &mid;
                    let g1f = &env1.b + &len_el - &mid;
                    let (g1, i1) = if g1r <= g1f {
                        (g1r, env1.a_idx)
                    } else {
                        (g1f, env1.b_idx)
                    };
                    let g2r = &a2 + &mid;
                    let g2f = &b2 + &len_el - &mid;
                    let (g2, i2) = if g2r <= g2f {
                        (g2r, a2_idx)
                    } else {
                        (g2f, b2_idx)
                    };
                    let side = if g2 <= g1 { Side::P2(i2) } else { Side::P1(i1) };
                    visit(ScanItem::Piece(aid, px.clone(), py.clone()), side);
                }
            }
        }
    }
}

fn make_handle(
    split: &WeightedNetwork,
    map: &PointMap,
    apsp: &Apsp,
    p: &NetworkPoint,
) -> PointHandle {
    let refined = map
        .push_forward(split, p)
        .expect("refinement covers the whole network");
    let host = match &refined {
        NetworkPoint::Vertex(_) => None,
        NetworkPoint::EdgePoint { edge, offset } => Some((*edge, offset.clone())),
    };
    let vdist = (0..split.vertex_count() as VertexId)
        .map(|x| split.point_distance(apsp, &NetworkPoint::Vertex(x), &refined))
        .collect();
    PointHandle {
        point: p.clone(),
        vdist,
        host,
    }
}

/// One-shot evaluation of a position.
pub fn compute_zones(
    net: &WeightedNetwork,
    f: &[NetworkPoint],
    s: &[NetworkPoint],
) -> Result<ZoneReport> {
    Evaluator::new(net, f)?.report(s)
}

// ---------------------------------------------------------------------------
// Candidate locations for the second player

/// Why a candidate location is in the pool.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CandidateKind {
    /// A network vertex not occupied by the opponent.
    Vertex { vertex: VertexId },
    /// The farthest point (in some edge direction) that still captures the
    /// given vertex: placed any farther, the vertex stays with the opponent.
    CaptureBoundary { vertex: VertexId },
    /// Immediately past an opponent facility in one incident direction.
    JustPast { facility: usize },
}

/// A finite pool of locations that always contains an optimal second-player
/// response. Deduplicated, in deterministic construction order: vertices by
/// id, then capture boundaries by (vertex, edge, offset), then just-past
/// points by (facility, direction); opponent-occupied locations excluded.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CandidateSet {
    pub points: Vec<NetworkPoint>,
    pub kinds: Vec<CandidateKind>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Builds the candidate pool for best responses against `f`.
pub fn candidate_set(net: &WeightedNetwork, f: &[NetworkPoint]) -> Result<CandidateSet> {
    if f.is_empty() {
        return Err(Error::InvalidPlacement(
            "first player must place at least one facility".into(),
        ));
    }
    let mut fset = BTreeSet::new();
    for p in f {
        let p = net.canonical_point(p)?;
        if !fset.insert(p.clone()) {
            return Err(Error::InvalidPlacement(format!(
                "facility {p} appears twice"
            )));
        }
    }
    let f: Vec<NetworkPoint> = f.iter().map(|p| net.canonical_point(p).unwrap()).collect();
    let apsp = net.apsp();

    let mut points: Vec<NetworkPoint> = Vec::new();
    let mut kinds: Vec<CandidateKind> = Vec::new();
    let mut seen: BTreeSet<NetworkPoint> = BTreeSet::new();
    let mut push = |p: NetworkPoint, kind: CandidateKind| {
        if !fset.contains(&p) && seen.insert(p.clone()) {
            points.push(p);
            kinds.push(kind);
        }
    };

    let n = net.vertex_count() as VertexId;
    for v in 0..n {
        push(NetworkPoint::Vertex(v), CandidateKind::Vertex { vertex: v });
    }

    // Capture boundaries: for each vertex, the locus of points at exactly
    // its nearest-opponent distance, restricted to edges. Each edge admits
    // at most one such point per approach direction.
    let mut boundary_count = 0usize;
    for v in 0..n {
        let vp = NetworkPoint::Vertex(v);
        let d = f
            .iter()
            .map(|ff| net.point_distance(&apsp, &vp, ff))
            .min()
            .expect("placement is non-empty");
        if d.is_zero() {
            continue; // the vertex is occupied; its boundary is itself
        }
        for (eid, e) in net.edges().iter().enumerate() {
            let eid = eid as EdgeId;
            let len = ExtendedLength::from_real(e.length.clone());
            let via_u = &d - &ExtendedLength::from_real(apsp.d(e.u, v).clone());
            let via_v = &len - &(&d - &ExtendedLength::from_real(apsp.d(e.v, v).clone()));
            let mut offsets = [via_u, via_v];
            offsets.sort();
            for off in offsets {
                if off < ExtendedLength::zero() || off > len {
                    continue;
                }
                let p = net
                    .canonical_point(&NetworkPoint::on_edge(eid, off))
                    .expect("offset checked in range");
                boundary_count += 1;
                // The defining equation used one approach route; keep the
                // point only if that route is genuinely shortest.
                if net.point_distance(&apsp, &vp, &p) == d {
                    push(p, CandidateKind::CaptureBoundary { vertex: v });
                }
            }
        }
    }
    assert!(
        boundary_count <= 2 * net.vertex_count() * net.edge_count(),
        "at most two capture boundaries per (vertex, edge) pair"
    );

    // Just-past points: one infinitesimal unit beyond each opponent
    // facility, in every incident direction.
    for (i, ff) in f.iter().enumerate() {
        match ff {
            NetworkPoint::Vertex(v) => {
                for &(eid, _) in net.neighbors(*v) {
                    let e = net.edge(eid);
                    let off = if e.u == *v {
                        ExtendedLength::with_eps_units(Rational::zero(), 1)
                    } else {
                        ExtendedLength::with_eps_units(e.length.clone(), -1)
                    };
                    push(
                        NetworkPoint::on_edge(eid, off),
                        CandidateKind::JustPast { facility: i },
                    );
                }
            }
            NetworkPoint::EdgePoint { edge, offset } => {
                let unit = ExtendedLength::with_eps_units(Rational::zero(), 1);
                for off in [offset - &unit, offset + &unit] {
                    let p = net
                        .canonical_point(&NetworkPoint::on_edge(*edge, off))
                        .expect("one ε within an interior offset stays in range");
                    push(p, CandidateKind::JustPast { facility: i });
                }
            }
        }
    }

    Ok(CandidateSet { points, kinds })
}

/// Returns the point one infinitesimal unit away from vertex `v` along edge
/// `edge`, which must be incident to `v`.
///
/// # Panics
///
/// Panics if `v` is not an endpoint of `edge`.
pub fn just_past_vertex(net: &WeightedNetwork, v: VertexId, edge: EdgeId) -> NetworkPoint {
    let e = net.edge(edge);
    let off = if e.u == v {
        ExtendedLength::with_eps_units(Rational::zero(), 1)
    } else if e.v == v {
        ExtendedLength::with_eps_units(e.length.clone(), -1)
    } else {
        panic!("vertex {v} is not an endpoint of edge {edge}");
    };
    NetworkPoint::on_edge(edge, off)
}

// ---------------------------------------------------------------------------
// Service boundaries and shift analysis

/// Which end of an edge, in canonical orientation: `Lo` is the smaller
/// endpoint id (offset 0), `Hi` the larger.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum EdgeEnd {
    Lo,
    Hi,
}

/// An isolated point where a lone second-player facility's service distance
/// exactly equals the opponent's.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Bisector {
    /// Location in original-network coordinates.
    pub point: NetworkPoint,
    /// The opponent facility competing at this boundary (smallest index on
    /// ties).
    pub facility: usize,
    /// Which end of the facility's host edge the shortest path toward this
    /// boundary departs from; `None` when the facility sits on a vertex.
    pub departure: Option<EdgeEnd>,
}

struct RawBisector {
    arc: EdgeId,
    offset: ExtendedLength,
    facility: usize,
    /// Moving toward the competing facility decreases the arc offset.
    toward_f_decreasing: bool,
    /// Moving toward the second player's facility decreases the arc offset.
    toward_s_decreasing: bool,
}

impl Evaluator {
    /// Boundary points of a lone opponent `s` against this evaluator's `F`,
    /// in refined-arc coordinates. Coincident-distance *stretches* (exactly
    /// overlapping branches) have no isolated boundary and are not reported.
    fn raw_bisectors(&self, h: &PointHandle) -> Vec<RawBisector> {
        let mut out: Vec<RawBisector> = Vec::new();
        for (aid, arc) in self.split.edges().iter().enumerate() {
            let aid = aid as EdgeId;
            let env1 = &self.arcs_p1[aid as usize];
            let len = &arc.length;
            let len_el = ExtendedLength::from_real(len.clone());

            let mut bounds = vec![Rational::zero()];
            if let Some((ha, apex)) = &h.host {
                if *ha == aid && apex.real.is_positive() && apex.real < *len {
                    bounds.push(apex.real.clone());
                }
            }
            bounds.push(len.clone());

            let mut found: Vec<RawBisector> = Vec::new();
            for seg in bounds.windows(2) {
                let (x, y) = (&seg[0], &seg[1]);
                let mut a2 = h.vdist[arc.u as usize].clone();
                let mut b2 = h.vdist[arc.v as usize].clone();
                if let Some((ha, apex)) = &h.host {
                    if *ha == aid {
                        if apex.real <= *x {
                            a2 = a2.min(-apex);
                        }
                        if apex.real >= *y {
                            b2 = b2.min(apex - &len_el);
                        }
                    }
                }

                let lo = ExtendedLength::from_real(x.clone());
                let hi = ExtendedLength::from_real(y.clone());
                let g1 = |w: &ExtendedLength| (&env1.a + w).min(&env1.b + &len_el - w);
                let g2 = |w: &ExtendedLength| (&a2 + w).min(&b2 + &len_el - w);

                // opponent rising branch meets our falling branch, and vice
                // versa; same-slope branches are parallel and never cross at
                // an isolated point.
                let pairs = [
                    ((&b2 + &len_el - &env1.a).halve(), env1.a_idx, true, false),
                    ((&env1.b + &len_el - &a2).halve(), env1.b_idx, false, true),
                ];
                for (w, fac, f_dec, s_dec) in pairs {
                    if w < lo || w > hi {
                        continue;
                    }
                    let on1 = g1(&w);
                    let on2 = g2(&w);
                    if on1 == on2 {
                        found.push(RawBisector {
                            arc: aid,
                            offset: w,
                            facility: fac,
                            toward_f_decreasing: f_dec,
                            toward_s_decreasing: s_dec,
                        });
                    }
                }
            }
            found.sort_by(|p, q| p.offset.cmp(&q.offset));
            found.dedup_by(|p, q| p.offset == q.offset);
            assert!(
                found.len() <= 2,
                "a lone facility's service interval crosses each arc boundary at most twice"
            );
            out.extend(found);
        }
        out
    }

    fn departure_of(
        &self,
        apsp_orig: &Apsp,
        s: &NetworkPoint,
        b: &NetworkPoint,
    ) -> Option<EdgeEnd> {
        let NetworkPoint::EdgePoint { edge, offset } = s else {
            return None;
        };
        if let NetworkPoint::EdgePoint {
            edge: be,
            offset: boff,
        } = b
        {
            if be == edge {
                return Some(if boff < offset {
                    EdgeEnd::Lo
                } else {
                    EdgeEnd::Hi
                });
            }
        }
        let e = self.original.edge(*edge);
        let d_lo = offset
            + &self
                .original
                .point_distance(apsp_orig, &NetworkPoint::Vertex(e.u), b);
        let d_hi = &(ExtendedLength::from_real(e.length.clone()) - offset)
            + &self
                .original
                .point_distance(apsp_orig, &NetworkPoint::Vertex(e.v), b);
        Some(if d_lo <= d_hi {
            EdgeEnd::Lo
        } else {
            EdgeEnd::Hi
        })
    }

    /// Boundary points between a lone opponent `s` and this evaluator's
    /// placement, annotated with the competing facility and the departure
    /// side of the path from `s`. Deterministic order: by refined arc, then
    /// offset.
    pub fn bisectors(&self, s: &NetworkPoint) -> Result<Vec<Bisector>> {
        let h = self.handle(s)?;
        let apsp_orig = self.original.apsp();
        let s_canon = self.original.canonical_point(s)?;
        Ok(self
            .raw_bisectors(&h)
            .into_iter()
            .map(|raw| {
                let split_pt = self
                    .split
                    .canonical_point(&NetworkPoint::on_edge(raw.arc, raw.offset))
                    .expect("bisector offsets lie on their arc");
                let point = self.map.map_point(&split_pt);
                let departure = self.departure_of(&apsp_orig, &s_canon, &point);
                Bisector {
                    point,
                    facility: raw.facility,
                    departure,
                }
            })
            .collect())
    }
}

/// Boundary points of `s` against `f` on `net`; see [`Evaluator::bisectors`].
pub fn bisectors_for(
    net: &WeightedNetwork,
    f: &[NetworkPoint],
    s: &NetworkPoint,
) -> Result<Vec<Bisector>> {
    Evaluator::new(net, f)?.bisectors(s)
}

/// Largest shift radius for a lone facility `s` within which its payoff
/// varies linearly: `s` may move up to the returned distance toward either
/// end of its host edge without any service boundary leaving its arc (each
/// boundary moves at half the facility's speed) and without `s` itself
/// reaching a structural vertex.
///
/// `s` must sit on an edge interior, away (in real terms) from every
/// opponent position on the same edge; otherwise there is no two-sided
/// neighborhood to shift in and `NotShiftable` is returned.
pub fn safe_shift_bound(
    net: &WeightedNetwork,
    f: &[NetworkPoint],
    s: &NetworkPoint,
) -> Result<Rational> {
    let eval = Evaluator::new(net, f)?;
    let s_canon = net.canonical_point(s)?;
    let NetworkPoint::EdgePoint { offset, .. } = &s_canon else {
        return Err(Error::NotShiftable("facility sits on a vertex".into()));
    };
    if !offset.is_real() {
        return Err(Error::NotShiftable(
            "facility sits within an infinitesimal of a structural point".into(),
        ));
    }
    let h = eval.handle(&s_canon)?;
    let Some((host_arc, apex)) = h.host.clone() else {
        return Err(Error::NotShiftable(
            "facility coincides with a vertex of the refined network".into(),
        ));
    };
    let apsp_orig = net.apsp();

    let raws = eval.raw_bisectors(&h);
    let with_departure: Vec<(RawBisector, EdgeEnd)> = raws
        .into_iter()
        .map(|raw| {
            let split_pt = eval
                .split
                .canonical_point(&NetworkPoint::on_edge(raw.arc, raw.offset.clone()))
                .expect("bisector offsets lie on their arc");
            let point = eval.map.map_point(&split_pt);
            let dep = eval
                .departure_of(&apsp_orig, &s_canon, &point)
                .expect("s is an edge point");
            (raw, dep)
        })
        .collect();

    let host_len = eval.split.edge(host_arc).length.clone();
    let two = rat!(2);
    let mut bound: Option<Rational> = None;
    for dir in [EdgeEnd::Lo, EdgeEnd::Hi] {
        let mut eps = match dir {
            EdgeEnd::Lo => apex.real.clone(),
            EdgeEnd::Hi => &host_len - &apex.real,
        };
        for (raw, dep) in &with_departure {
            // Moving toward the bisector pushes it onward toward the
            // competing facility; moving away draws it after the facility.
            let decreasing = if *dep == dir {
                raw.toward_f_decreasing
            } else {
                raw.toward_s_decreasing
            };
            let room = if decreasing {
                raw.offset.real.clone()
            } else {
                &eval.split.edge(raw.arc).length - &raw.offset.real
            };
            eps = eps.min(&two * &room);
        }
        bound = Some(match bound {
            None => eps,
            Some(b) => b.min(eps),
        });
    }
    Ok(bound.expect("two directions considered"))
}

// ---------------------------------------------------------------------------
// Shared zone decomposition for coverage-based approximation

/// What a coverage element is in the refined network.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ZoneElement {
    Vertex(VertexId),
    Arc(EdgeId),
}

/// A refinement of the network in which every candidate's service zone
/// (against the fixed opponent placement) is a union of whole elements, so
/// that the payoff of any candidate subset is exactly the weight of the
/// union of their zones.
pub(crate) struct ZoneDecomposition {
    pub refined: WeightedNetwork,
    pub map: PointMap,
    /// Positive-weight elements: vertices not occupied by the opponent,
    /// then arcs.
    pub elements: Vec<(ZoneElement, Rational)>,
    /// Element indices served by each candidate.
    pub zones: Vec<BTreeSet<u32>>,
}

pub(crate) fn zone_decomposition(
    net: &WeightedNetwork,
    f: &[NetworkPoint],
    candidates: &[NetworkPoint],
) -> Result<ZoneDecomposition> {
    let eval = Evaluator::new(net, f)?;

    // Refine at every structural real position: facilities, candidates, and
    // every boundary a lone candidate can have against F. Afterwards,
    // ownership under any single candidate is constant on each arc.
    let mut split_points: Vec<NetworkPoint> = eval.facilities().to_vec();
    for c in candidates {
        let c = net.canonical_point(c)?;
        let h = eval.handle(&c)?;
        for raw in eval.raw_bisectors(&h) {
            let split_pt = eval
                .split
                .canonical_point(&NetworkPoint::on_edge(raw.arc, raw.offset))
                .expect("bisector offsets lie on their arc");
            split_points.push(eval.map.map_point(&split_pt));
        }
        split_points.push(c);
    }
    let (refined, map) = net.split_at_points(&split_points)?;
    let apsp = refined.apsp();

    let f_ref: Vec<NetworkPoint> = eval
        .facilities()
        .iter()
        .map(|p| {
            map.push_forward(&refined, p)
                .expect("refinement covers the network")
        })
        .collect();

    let nv = refined.vertex_count() as VertexId;
    let d_f: Vec<ExtendedLength> = (0..nv)
        .map(|x| {
            f_ref
                .iter()
                .map(|p| refined.point_distance(&apsp, &NetworkPoint::Vertex(x), p))
                .min()
                .expect("placement is non-empty")
        })
        .collect();

    let mut elements = Vec::new();
    for x in 0..nv {
        if !refined.vertex_weight(x).is_zero() && !d_f[x as usize].is_zero() {
            elements.push((ZoneElement::Vertex(x), refined.vertex_weight(x).clone()));
        }
    }
    let two = rat!(2);
    let mut arc_mid = Vec::with_capacity(refined.edge_count());
    let mut d_f_mid = Vec::with_capacity(refined.edge_count());
    for (aid, arc) in refined.edges().iter().enumerate() {
        let mid =
            NetworkPoint::on_edge(aid as EdgeId, ExtendedLength::from_real(&arc.length / &two));
        let d = f_ref
            .iter()
            .map(|p| refined.point_distance(&apsp, &mid, p))
            .min()
            .expect("placement is non-empty");
        if !arc.weight.is_zero() {
            elements.push((ZoneElement::Arc(aid as EdgeId), arc.weight.clone()));
        }
        arc_mid.push(mid);
        d_f_mid.push(d);
    }

    let mut zones = Vec::with_capacity(candidates.len());
    for c in candidates {
        let c_ref = map
            .push_forward(&refined, &net.canonical_point(c)?)
            .expect("refinement covers the network");
        let mut zone = BTreeSet::new();
        for (idx, (el, _)) in elements.iter().enumerate() {
            let served = match el {
                ZoneElement::Vertex(x) => {
                    refined.point_distance(&apsp, &NetworkPoint::Vertex(*x), &c_ref)
                        <= d_f[*x as usize]
                }
                ZoneElement::Arc(a) => {
                    refined.point_distance(&apsp, &arc_mid[*a as usize], &c_ref)
                        <= d_f_mid[*a as usize]
                }
            };
            if served {
                zone.insert(idx as u32);
            }
        }
        zones.push(zone);
    }

    Ok(ZoneDecomposition {
        refined,
        map,
        elements,
        zones,
    })
}

// ---------------------------------------------------------------------------
// SVG rendering

/// Renders a position report as a self-contained SVG. Every vertex of the
/// network must carry plot coordinates. Exact rationals are shown as
/// six-digit decimals; geometry is rendered in floating point (display
/// only — nothing feeds back into computation).
pub fn render_svg(net: &WeightedNetwork, report: &ZoneReport) -> Result<String> {
    use num::ToPrimitive;
    let pos = |v: VertexId| -> Result<(f64, f64)> {
        net.position(v)
            .ok_or_else(|| Error::Input(format!("vertex {v} has no plot coordinates")))
    };
    let to_f = |r: &Rational| -> f64 {
        r.numer().to_f64().unwrap_or(0.0) / r.denom().to_f64().unwrap_or(1.0)
    };
    let point_xy = |p: &NetworkPoint| -> Result<(f64, f64)> {
        match p {
            NetworkPoint::Vertex(v) => pos(*v),
            NetworkPoint::EdgePoint { edge, offset } => {
                let e = net.edge(*edge);
                let (ux, uy) = pos(e.u)?;
                let (vx, vy) = pos(e.v)?;
                let t = to_f(&offset.real) / to_f(&e.length);
                Ok((ux + t * (vx - ux), uy + t * (vy - uy)))
            }
        }
    };

    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for v in 0..net.vertex_count() as VertexId {
        let (x, y) = pos(v)?;
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);
    let (w, h, pad) = (800.0, 600.0, 60.0);
    let scale = ((w - 2.0 * pad) / span_x).min((h - 2.0 * pad) / span_y);
    let tx = |x: f64| pad + (x - min_x) * scale;
    let ty = |y: f64| h - pad - (y - min_y) * scale;

    let color = |o: &Owner| match o {
        Owner::P1(_) => "#2563eb",
        Owner::P2(_) => "#ea580c",
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{pad}\" y=\"30\" font-family=\"monospace\" font-size=\"14\">q1={} q2={}</text>\n",
        report.q1.to_decimal(6),
        report.q2.to_decimal(6)
    ));

    // ownership runs along edges
    for seg in &report.segments {
        let e = net.edge(seg.edge);
        let (ux, uy) = pos(e.u)?;
        let (vx, vy) = pos(e.v)?;
        let at = |r: &Rational| {
            let t = to_f(r) / to_f(&e.length);
            (tx(ux + t * (vx - ux)), ty(uy + t * (vy - uy)))
        };
        let (x1, y1) = at(&seg.lo);
        let (x2, y2) = at(&seg.hi);
        svg.push_str(&format!(
            "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" stroke=\"{}\" stroke-width=\"4\"/>\n",
            color(&seg.owner)
        ));
    }

    // boundary markers where ownership changes player mid-edge
    for pair in report.segments.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.edge == b.edge && a.hi == b.lo && a.owner.is_p2() != b.owner.is_p2() {
            let e = net.edge(a.edge);
            let (ux, uy) = pos(e.u)?;
            let (vx, vy) = pos(e.v)?;
            let t = to_f(&a.hi) / to_f(&e.length);
            let (x, y) = (tx(ux + t * (vx - ux)), ty(uy + t * (vy - uy)));
            svg.push_str(&format!(
                "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"#111\"/>\n  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"10\">{}</text>\n",
                x + 6.0,
                y - 6.0,
                a.hi.to_decimal(6)
            ));
        }
    }

    // vertices
    for v in 0..net.vertex_count() as VertexId {
        let (x, y) = pos(v)?;
        let (x, y) = (tx(x), ty(y));
        svg.push_str(&format!(
            "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"6\" fill=\"{}\" stroke=\"#111\"/>\n  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">v{v}</text>\n",
            color(&report.vertex_owner[v as usize]),
            x + 8.0,
            y + 4.0
        ));
    }

    // facility markers
    for (i, p) in report.p1.iter().enumerate() {
        let (x, y) = point_xy(p)?;
        let (x, y) = (tx(x), ty(y));
        svg.push_str(&format!(
            "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"#1e3a8a\"/>\n  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" fill=\"#1e3a8a\">F{i}</text>\n",
            x - 5.0,
            y - 5.0,
            x + 8.0,
            y - 8.0
        ));
    }
    for (j, p) in report.p2.iter().enumerate() {
        let (x, y) = point_xy(p)?;
        let (x, y) = (tx(x), ty(y));
        svg.push_str(&format!(
            "  <polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"#7c2d12\"/>\n  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" fill=\"#7c2d12\">S{j}</text>\n",
            x,
            y - 7.0,
            x - 6.0,
            y + 5.0,
            x + 6.0,
            y + 5.0,
            x + 8.0,
            y + 14.0
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn unit_edge() -> WeightedNetwork {
        WeightedNetwork::new(vec![rat!(1), rat!(1)], vec![(0, 1, rat!(1), rat!(1))]).unwrap()
    }

    fn v(id: u32) -> NetworkPoint {
        NetworkPoint::Vertex(id)
    }

    #[test]
    fn just_past_steals_all_but_the_facility() {
        let net = unit_edge();
        let s = just_past_vertex(&net, 0, 0);
        let r = compute_zones(&net, &[v(0)], std::slice::from_ref(&s)).unwrap();
        assert_eq!(r.q2, rat!(2), "vertex 1 plus the whole edge");
        assert_eq!(r.q1, rat!(1), "only the occupied vertex itself");
        assert_eq!(&r.q1 + &r.q2, net.total_weight());
        assert_eq!(r.vertex_owner, vec![Owner::P1(0), Owner::P2(0)]);
    }

    #[test]
    fn opposite_vertex_splits_the_edge() {
        let net = unit_edge();
        let r = compute_zones(&net, &[v(0)], &[v(1)]).unwrap();
        assert_eq!(r.q2, rat!(3, 2));
        assert_eq!(r.q1, rat!(3, 2));
        // decomposition: [0, 1/2] to P1, [1/2, 1] to P2
        assert_eq!(
            r.segments,
            vec![
                ZoneSegment {
                    edge: 0,
                    lo: rat!(0),
                    hi: rat!(1, 2),
                    owner: Owner::P1(0)
                },
                ZoneSegment {
                    edge: 0,
                    lo: rat!(1, 2),
                    hi: rat!(1),
                    owner: Owner::P2(0)
                },
            ]
        );
    }

    #[test]
    fn middle_vertex_between_two_facilities() {
        // path v0 - v1 - v2, unit lengths and weights everywhere
        let net = WeightedNetwork::new(
            vec![rat!(1); 3],
            vec![(0, 1, rat!(1), rat!(1)), (1, 2, rat!(1), rat!(1))],
        )
        .unwrap();
        let r = compute_zones(&net, &[v(0), v(2)], &[v(1)]).unwrap();
        assert_eq!(r.q2, rat!(2), "the middle vertex and half of each edge");
        assert_eq!(r.q1, rat!(3));
        assert_eq!(r.p1_share, vec![rat!(3, 2), rat!(3, 2)]);
        assert_eq!(r.p2_share, vec![rat!(2)]);
    }

    #[test]
    fn empty_opponent_concedes_everything() {
        let net = unit_edge();
        let r = compute_zones(&net, &[v(0)], &[]).unwrap();
        assert_eq!(r.q2, rat!(0));
        assert_eq!(r.q1, net.total_weight());
        assert!(r.segments.iter().all(|s| !s.owner.is_p2()));
    }

    #[test]
    fn coincident_placement_takes_the_tie() {
        let net = unit_edge();
        let r = compute_zones(&net, &[v(0)], &[v(0)]).unwrap();
        assert_eq!(r.q2, net.total_weight(), "ties go to the second player");
        assert_eq!(r.q1, rat!(0));
    }

    #[test]
    fn facility_inside_an_edge_gets_split_zones() {
        // F occupies the midpoint of a length-2 edge; S sits at 3/2.
        let net =
            WeightedNetwork::new(vec![rat!(0), rat!(0)], vec![(0, 1, rat!(2), rat!(2))]).unwrap();
        let fm = NetworkPoint::on_edge(0, ExtendedLength::from_real(rat!(1)));
        let s = NetworkPoint::on_edge(0, ExtendedLength::from_real(rat!(3, 2)));
        let r = compute_zones(&net, std::slice::from_ref(&fm), std::slice::from_ref(&s)).unwrap();
        // boundary at 5/4: S serves (5/4, 2], weight 2 * (3/4) / 2 = 3/4
        assert_eq!(r.q2, rat!(3, 4));
        assert_eq!(&r.q1 + &r.q2, rat!(2));
        assert!(r
            .segments
            .iter()
            .any(|seg| seg.owner.is_p2() && seg.lo == rat!(5, 4) && seg.hi == rat!(2)));
    }

    #[test]
    fn candidate_pool_on_a_unit_edge() {
        let net = unit_edge();
        let c = candidate_set(&net, &[v(0)]).unwrap();
        assert_eq!(
            c.points,
            vec![v(1), just_past_vertex(&net, 0, 0)],
            "the far vertex, then one ε past the facility"
        );
        assert_eq!(
            c.kinds,
            vec![
                CandidateKind::Vertex { vertex: 1 },
                CandidateKind::JustPast { facility: 0 }
            ]
        );
    }

    #[test]
    fn capture_boundary_lands_mid_edge() {
        // path v0 -4- v1 -1- v2
        let net = WeightedNetwork::new(
            vec![rat!(1); 3],
            vec![(0, 1, rat!(4), rat!(1)), (1, 2, rat!(1), rat!(1))],
        )
        .unwrap();

        // Against F = {v0} every capture boundary degenerates to an endpoint
        // (v0 itself or off the edge), so only vertices and the just-past
        // point survive.
        let c = candidate_set(&net, &[v(0)]).unwrap();
        assert_eq!(c.points, vec![v(1), v(2), just_past_vertex(&net, 0, 0)]);

        // Against F = {v2}, v1 is at distance 1 from the opponent, so the
        // farthest point on the long edge that still ties for v1 sits at
        // offset 3 — a genuine interior candidate.
        let c2 = candidate_set(&net, &[v(2)]).unwrap();
        let interior = NetworkPoint::on_edge(0, ExtendedLength::from_real(rat!(3)));
        assert!(
            c2.points.contains(&interior),
            "expected interior capture boundary at offset 3, got {:?}",
            c2.points
        );
        let idx = c2.points.iter().position(|p| p == &interior).unwrap();
        assert_eq!(c2.kinds[idx], CandidateKind::CaptureBoundary { vertex: 1 });
        // placing there indeed takes v1 on the tie, and v0 outright
        let r = compute_zones(&net, &[v(2)], &[interior]).unwrap();
        assert_eq!(r.vertex_owner[1], Owner::P2(0));
        assert_eq!(r.vertex_owner[0], Owner::P2(0));
    }

    #[test]
    fn bisector_on_a_shared_edge() {
        // F at vertex u of a length-2 edge, s at 3/2: one boundary at 3/4.
        let net =
            WeightedNetwork::new(vec![rat!(1), rat!(1)], vec![(0, 1, rat!(2), rat!(2))]).unwrap();
        let s = NetworkPoint::on_edge(0, ExtendedLength::from_real(rat!(3, 2)));
        let bs = bisectors_for(&net, &[v(0)], &s).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(
            bs[0].point,
            NetworkPoint::on_edge(0, ExtendedLength::from_real(rat!(3, 4)))
        );
        assert_eq!(bs[0].facility, 0);
        assert_eq!(bs[0].departure, Some(EdgeEnd::Lo));

        let bound = safe_shift_bound(&net, &[v(0)], &s).unwrap();
        assert_eq!(
            bound,
            rat!(1, 2),
            "limited by the room between s and the far vertex"
        );
    }

    #[test]
    fn vertex_placement_is_not_shiftable() {
        let net = unit_edge();
        let e = safe_shift_bound(&net, &[v(0)], &v(1));
        assert!(matches!(e, Err(Error::NotShiftable(_))));
    }

    #[test]
    fn decomposition_covers_exactly_the_contestable_weight() {
        let net = WeightedNetwork::new(
            vec![rat!(2), rat!(1), rat!(1)],
            vec![(0, 1, rat!(1), rat!(2)), (1, 2, rat!(2), rat!(1))],
        )
        .unwrap();
        let f = [v(1)];
        let cands = candidate_set(&net, &f).unwrap();
        let dec = zone_decomposition(&net, &f, &cands.points).unwrap();
        let total: Rational = dec.elements.iter().map(|(_, w)| w).sum();
        // everything except the occupied vertex's own weight is in play
        assert_eq!(total, &net.total_weight() - net.vertex_weight(1));

        // a candidate subset's exact payoff equals its zone-union weight
        let eval = Evaluator::new(&net, &f).unwrap();
        for (ci, c) in cands.points.iter().enumerate() {
            let union_w: Rational = dec.zones[ci]
                .iter()
                .map(|&i| &dec.elements[i as usize].1)
                .sum();
            let q2 = eval.q2(std::slice::from_ref(c)).unwrap();
            assert_eq!(union_w, q2, "candidate {c} zone weight");
        }
    }

    #[test]
    fn svg_needs_coordinates() {
        let net = unit_edge();
        let r = compute_zones(&net, &[v(0)], &[v(1)]).unwrap();
        assert!(matches!(render_svg(&net, &r), Err(Error::Input(_))));
        let mut with_pos = net.clone();
        with_pos.set_position(0, 0.0, 0.0);
        with_pos.set_position(1, 1.0, 0.0);
        let svg = render_svg(&with_pos, &r).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(
            svg.contains("0.500000"),
            "boundary label as six-digit decimal"
        );
    }

    #[test]
    fn conservation_on_random_networks() {
        // a compact version of the fuzzed conservation suite
        for seed in 0..40u64 {
            let n = 2 + (seed as usize % 5);
            let net = synth::random_connected_graph(seed, n, (seed % 3) as usize);
            let f = synth::random_points(
                seed.wrapping_mul(31).wrapping_add(1),
                &net,
                1 + (seed as usize % 2),
                false,
            );
            let s = synth::random_points(
                seed.wrapping_mul(37).wrapping_add(2),
                &net,
                (seed as usize) % 3,
                true,
            );
            if f.is_empty() {
                continue;
            }
            let s: Vec<NetworkPoint> = s.into_iter().filter(|p| !f.contains(p)).collect();
            let r = compute_zones(&net, &f, &s).unwrap();
            assert_eq!(
                &r.q1 + &r.q2,
                net.total_weight(),
                "conservation failed: seed {seed}, f {f:?}, s {s:?}"
            );
            assert_eq!(r.p1_share.iter().sum::<Rational>(), r.q1);
            assert_eq!(r.p2_share.iter().sum::<Rational>(), r.q2);
        }
    }
}

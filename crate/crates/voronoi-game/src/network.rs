//! Weighted networks and points on them.
//!
//! A network here is a connected multigraph in which *both* vertices and
//! edges carry demand weight, and each edge additionally has a positive
//! length. Demand on an edge is spread uniformly along its interior, so a
//! sub-segment of an edge owns length-proportional weight. Facilities and
//! service boundaries live at [`NetworkPoint`]s: either a vertex or an
//! interior position on an edge, where the position may carry an
//! infinitesimal component (see [`ExtendedLength`]).
//!
//! Edges are stored with `u < v` (inputs with the endpoints swapped are
//! normalized on construction) and offsets along an edge are always measured
//! from the smaller endpoint id. Vertex ids are dense: `0..n`.
//!
//! The wire format is JSON with exact rationals as `"numer/denom"` strings:
//!
//! ```text
//! {
//!   "vertices": [ {"weight": "1/1", "x": 0.0, "y": 1.5}, ... ],
//!   "edges":    [ {"u": 0, "v": 1, "length": "2/1", "weight": "1/1"}, ... ]
//! }
//! ```
//!
//! `x`/`y` are optional plot coordinates and take no part in any
//! computation. Points serialize as `{"vertex": 3}` or
//! `{"edge": 2, "offset": "1/2", "eps": -1}`; the `eps` coefficient on the
//! wire is an integer.

use crate::scalar::{ExtendedLength, Rational};
use crate::{Error, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::fmt;

pub type VertexId = u32;
pub type EdgeId = u32;

/// An edge with endpoints `u < v`, a positive travel length, and a
/// non-negative demand weight spread uniformly along its interior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub length: Rational,
    pub weight: Rational,
}

impl Edge {
    /// The endpoint that is not `x`.
    ///
    /// # Panics
    ///
    /// Panics if `x` is not an endpoint of this edge.
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else if x == self.v {
            self.u
        } else {
            panic!(
                "vertex {x} is not an endpoint of edge ({}, {})",
                self.u, self.v
            )
        }
    }

    /// Offset of endpoint `x` along this edge (0 for `u`, `length` for `v`).
    ///
    /// # Panics
    ///
    /// Panics if `x` is not an endpoint of this edge.
    pub fn offset_of(&self, x: VertexId) -> Rational {
        if x == self.u {
            Rational::zero()
        } else if x == self.v {
            self.length.clone()
        } else {
            panic!(
                "vertex {x} is not an endpoint of edge ({}, {})",
                self.u, self.v
            )
        }
    }
}

/// A location on a network: a vertex, or a position along an edge's interior
/// measured from the smaller endpoint id.
///
/// The canonical form never uses an `EdgePoint` whose offset equals exactly
/// `0` or the edge length with no infinitesimal part — those are the
/// endpoints and are represented as `Vertex`. Offsets *with* an
/// infinitesimal part, such as `(0, +1ε)` ("immediately past `u`"), remain
/// edge points.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum NetworkPoint {
    Vertex(VertexId),
    EdgePoint {
        edge: EdgeId,
        offset: ExtendedLength,
    },
}

impl NetworkPoint {
    pub fn vertex(v: VertexId) -> Self {
        NetworkPoint::Vertex(v)
    }

    pub fn on_edge(edge: EdgeId, offset: ExtendedLength) -> Self {
        NetworkPoint::EdgePoint { edge, offset }
    }

    pub fn as_vertex(&self) -> Option<VertexId> {
        match self {
            NetworkPoint::Vertex(v) => Some(*v),
            NetworkPoint::EdgePoint { .. } => None,
        }
    }

    /// True when the point carries no infinitesimal component.
    pub fn is_real(&self) -> bool {
        match self {
            NetworkPoint::Vertex(_) => true,
            NetworkPoint::EdgePoint { offset, .. } => offset.is_real(),
        }
    }
}

impl fmt::Display for NetworkPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkPoint::Vertex(v) => write!(f, "v{v}"),
            NetworkPoint::EdgePoint { edge, offset } => write!(f, "e{edge}@{offset}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PointWire {
    Vertex {
        vertex: VertexId,
    },
    Edge {
        edge: EdgeId,
        offset: Rational,
        #[serde(default)]
        eps: i64,
    },
}

impl Serialize for NetworkPoint {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match self {
            NetworkPoint::Vertex(v) => PointWire::Vertex { vertex: *v },
            NetworkPoint::EdgePoint { edge, offset } => {
                if !offset.eps.is_integer() {
                    return Err(serde::ser::Error::custom(format!(
                        "point offset {offset} has a fractional infinitesimal part; \
                         only integer ε coefficients are serializable"
                    )));
                }
                let eps = i64::try_from(offset.eps.numer().clone())
                    .map_err(|_| serde::ser::Error::custom("ε coefficient out of range"))?;
                PointWire::Edge {
                    edge: *edge,
                    offset: offset.real.clone(),
                    eps,
                }
            }
        };
        wire.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for NetworkPoint {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        Ok(match PointWire::deserialize(de)? {
            PointWire::Vertex { vertex } => NetworkPoint::Vertex(vertex),
            PointWire::Edge { edge, offset, eps } => NetworkPoint::EdgePoint {
                edge,
                offset: ExtendedLength::with_eps_units(offset, eps),
            },
        })
    }
}

#[derive(Serialize, Deserialize)]
struct VertexWire {
    weight: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct EdgeWire {
    u: VertexId,
    v: VertexId,
    length: Rational,
    weight: Rational,
}

#[derive(Serialize, Deserialize)]
struct NetworkWire {
    vertices: Vec<VertexWire>,
    edges: Vec<EdgeWire>,
}

/// A connected multigraph with weighted vertices and weighted, positively
/// long edges. See the module docs for the invariants and wire format.
#[derive(Clone, Debug)]
pub struct WeightedNetwork {
    vertex_weights: Vec<Rational>,
    positions: Vec<Option<(f64, f64)>>,
    edges: Vec<Edge>,
    /// For each vertex, `(edge id, neighbor)` pairs in edge-id order.
    adjacency: Vec<Vec<(EdgeId, VertexId)>>,
}

impl WeightedNetwork {
    /// Builds a network from vertex weights and `(u, v, length, weight)`
    /// edges, normalizing each edge to `u < v`. Fails unless the graph is
    /// connected, vertex ids are in range, lengths are positive, weights are
    /// non-negative, and no edge is a self-loop.
    pub fn new(
        vertex_weights: Vec<Rational>,
        edge_list: Vec<(VertexId, VertexId, Rational, Rational)>,
    ) -> Result<Self> {
        let n = vertex_weights.len();
        if n == 0 {
            return Err(Error::InvalidNetwork("no vertices".into()));
        }
        for (i, w) in vertex_weights.iter().enumerate() {
            if w.is_negative() {
                return Err(Error::InvalidNetwork(format!(
                    "vertex {i} has negative weight {w}"
                )));
            }
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        for (u, v, length, weight) in edge_list {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidNetwork(format!("self-loop at vertex {u}")));
            }
            if !length.is_positive() {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({u}, {v}) has non-positive length {length}"
                )));
            }
            if weight.is_negative() {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({u}, {v}) has negative weight {weight}"
                )));
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            edges.push(Edge {
                u,
                v,
                length,
                weight,
            });
        }

        let mut adjacency = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            adjacency[e.u as usize].push((i as EdgeId, e.v));
            adjacency[e.v as usize].push((i as EdgeId, e.u));
        }

        let net = WeightedNetwork {
            vertex_weights,
            positions: vec![None; n],
            edges,
            adjacency,
        };
        if !net.is_connected() {
            return Err(Error::InvalidNetwork("graph is not connected".into()));
        }
        Ok(net)
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &self.adjacency[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_weight(&self, v: VertexId) -> &Rational {
        &self.vertex_weights[v as usize]
    }

    /// Overrides a vertex weight. Used by tree folding and partition
    /// routines that transfer demand between vertices; the replacement must
    /// be non-negative.
    pub fn set_vertex_weight(&mut self, v: VertexId, w: Rational) {
        assert!(!w.is_negative(), "vertex weight must be non-negative");
        self.vertex_weights[v as usize] = w;
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(edge id, neighbor)` pairs incident to `v`, in edge-id order.
    pub fn neighbors(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn position(&self, v: VertexId) -> Option<(f64, f64)> {
        self.positions[v as usize]
    }

    pub fn set_position(&mut self, v: VertexId, x: f64, y: f64) {
        self.positions[v as usize] = Some((x, y));
    }

    /// Total demand: all vertex weights plus all edge weights.
    pub fn total_weight(&self) -> Rational {
        self.vertex_weights.iter().sum::<Rational>()
            + self.edges.iter().map(|e| &e.weight).sum::<Rational>()
    }

    /// A connected graph is a tree exactly when it has `n - 1` edges.
    pub fn is_tree(&self) -> bool {
        self.edges.len() == self.vertex_count() - 1
    }

    /// Validates a point and rewrites edge endpoints to their canonical
    /// `Vertex` form. An edge offset must satisfy `(0,0) ≤ offset ≤ (L,0)`
    /// in the lexicographic order — an offset like `(0, -1ε)` would lie
    /// before the edge starts.
    pub fn canonical_point(&self, p: &NetworkPoint) -> Result<NetworkPoint> {
        match p {
            NetworkPoint::Vertex(v) => {
                if (*v as usize) < self.vertex_count() {
                    Ok(p.clone())
                } else {
                    Err(Error::InvalidPoint(format!("vertex {v} out of range")))
                }
            }
            NetworkPoint::EdgePoint { edge, offset } => {
                let Some(e) = self.edges.get(*edge as usize) else {
                    return Err(Error::InvalidPoint(format!("edge {edge} out of range")));
                };
                let end = ExtendedLength::from_real(e.length.clone());
                if *offset < ExtendedLength::zero() || *offset > end {
                    return Err(Error::InvalidPoint(format!(
                        "offset {offset} outside edge {edge} of length {}",
                        e.length
                    )));
                }
                if offset.is_zero() {
                    Ok(NetworkPoint::Vertex(e.u))
                } else if *offset == end {
                    Ok(NetworkPoint::Vertex(e.v))
                } else {
                    Ok(p.clone())
                }
            }
        }
    }

    /// Single-source shortest path lengths over vertices.
    pub fn dijkstra(&self, src: VertexId) -> Vec<Rational> {
        let n = self.vertex_count();
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((Rational::zero(), src)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v as usize].is_some() {
                continue;
            }
            for &(e, w) in &self.adjacency[v as usize] {
                if dist[w as usize].is_none() {
                    heap.push(Reverse((&d + &self.edges[e as usize].length, w)));
                }
            }
            dist[v as usize] = Some(d);
        }
        dist.into_iter()
            .map(|d| d.expect("connected by construction"))
            .collect()
    }

    /// All-pairs shortest path lengths (one Dijkstra per vertex).
    pub fn apsp(&self) -> Apsp {
        Apsp {
            d: (0..self.vertex_count() as VertexId)
                .map(|v| self.dijkstra(v))
                .collect(),
        }
    }

    /// Exact shortest-path distance between two points. Routes through edge
    /// endpoints are always enough, except when both points share an edge —
    /// then the direct along-edge segment competes too.
    pub fn point_distance(
        &self,
        apsp: &Apsp,
        p: &NetworkPoint,
        q: &NetworkPoint,
    ) -> ExtendedLength {
        let anchors = |pt: &NetworkPoint| -> Vec<(VertexId, ExtendedLength)> {
            match pt {
                NetworkPoint::Vertex(v) => vec![(*v, ExtendedLength::zero())],
                NetworkPoint::EdgePoint { edge, offset } => {
                    let e = self.edge(*edge);
                    vec![
                        (e.u, offset.clone()),
                        (e.v, ExtendedLength::from_real(e.length.clone()) - offset),
                    ]
                }
            }
        };
        let mut best: Option<ExtendedLength> = None;
        for (a, ca) in anchors(p) {
            for (b, cb) in anchors(q) {
                let via = &ca + &cb + ExtendedLength::from_real(apsp.d(a, b).clone());
                if best.as_ref().is_none_or(|cur| via < *cur) {
                    best = Some(via);
                }
            }
        }
        if let (
            NetworkPoint::EdgePoint {
                edge: e1,
                offset: o1,
            },
            NetworkPoint::EdgePoint {
                edge: e2,
                offset: o2,
            },
        ) = (p, q)
        {
            if e1 == e2 {
                let direct = (o1 - o2).abs();
                if direct < *best.as_ref().unwrap() {
                    best = Some(direct);
                }
            }
        }
        best.unwrap()
    }

    /// Splits the network at the real parts of the given points, producing a
    /// refined network in which every input point lies at a vertex or within
    /// an infinitesimal of one. Split vertices get weight `0`; each edge
    /// fragment keeps a length-proportional share of the parent's weight, so
    /// total weight and all distances are preserved.
    ///
    /// New vertex ids extend the original range, assigned edge by edge in id
    /// order and offset-ascending within an edge, which keeps the result
    /// deterministic. The returned [`PointMap`] translates derived points
    /// back to the original network.
    pub fn split_at_points(&self, points: &[NetworkPoint]) -> Result<(WeightedNetwork, PointMap)> {
        let mut cuts: Vec<BTreeSet<Rational>> = vec![BTreeSet::new(); self.edge_count()];
        for p in points {
            if let NetworkPoint::EdgePoint { edge, offset } = self.canonical_point(p)? {
                let real = offset.real;
                if real.is_positive() && real < self.edge(edge).length {
                    cuts[edge as usize].insert(real);
                }
            }
        }

        let mut vertex_weights = self.vertex_weights.clone();
        let mut positions = self.positions.clone();
        let mut vertex_origin: Vec<NetworkPoint> = (0..self.vertex_count() as VertexId)
            .map(NetworkPoint::Vertex)
            .collect();
        let mut edge_list = Vec::new();
        let mut edge_origin = Vec::new();

        for (eid, e) in self.edges.iter().enumerate() {
            let eid = eid as EdgeId;
            // Vertex ids stationed along the parent edge, with their offsets.
            let mut stops: Vec<(Rational, VertexId)> = vec![(Rational::zero(), e.u)];
            for r in &cuts[eid as usize] {
                let id = vertex_weights.len() as VertexId;
                vertex_weights.push(Rational::zero());
                positions.push(interpolate(
                    self.positions[e.u as usize],
                    self.positions[e.v as usize],
                    r,
                    &e.length,
                ));
                vertex_origin.push(NetworkPoint::EdgePoint {
                    edge: eid,
                    offset: ExtendedLength::from_real(r.clone()),
                });
                stops.push((r.clone(), id));
            }
            stops.push((e.length.clone(), e.v));

            for pair in stops.windows(2) {
                let (lo, a) = &pair[0];
                let (hi, b) = &pair[1];
                let seg_len = hi - lo;
                let seg_weight = &e.weight * &seg_len / &e.length;
                edge_list.push((*a, *b, seg_len, seg_weight));
                // After canonical u<v normalization the segment's offset-0
                // end is its smaller endpoint id; record whether that flips
                // the parent orientation.
                edge_origin.push(EdgeSpan {
                    parent_edge: eid,
                    lo: lo.clone(),
                    hi: hi.clone(),
                    reversed: a > b,
                });
            }
        }

        let mut net = WeightedNetwork::new(vertex_weights, edge_list)?;
        net.positions = positions;
        Ok((
            net,
            PointMap {
                vertex_origin,
                edge_origin,
            },
        ))
    }

    /// Extracts the sub-network induced by the given vertex and edge id
    /// sets, re-indexing densely in sorted-id order. Every edge's endpoints
    /// must be included and the result must be connected. The returned map
    /// translates sub-network points back to this network.
    pub fn subnetwork(
        &self,
        vertices: &BTreeSet<VertexId>,
        edge_ids: &BTreeSet<EdgeId>,
    ) -> Result<(WeightedNetwork, PointMap)> {
        let index_of = |v: VertexId| -> Option<VertexId> {
            vertices.iter().position(|&x| x == v).map(|i| i as VertexId)
        };
        let mut vertex_weights = Vec::with_capacity(vertices.len());
        let mut positions = Vec::with_capacity(vertices.len());
        let mut vertex_origin = Vec::with_capacity(vertices.len());
        for &v in vertices {
            if v as usize >= self.vertex_count() {
                return Err(Error::InvalidNetwork(format!("vertex {v} out of range")));
            }
            vertex_weights.push(self.vertex_weights[v as usize].clone());
            positions.push(self.positions[v as usize]);
            vertex_origin.push(NetworkPoint::Vertex(v));
        }
        let mut edge_list = Vec::with_capacity(edge_ids.len());
        let mut edge_origin = Vec::with_capacity(edge_ids.len());
        for &eid in edge_ids {
            let Some(e) = self.edges.get(eid as usize) else {
                return Err(Error::InvalidNetwork(format!("edge {eid} out of range")));
            };
            let (Some(u), Some(v)) = (index_of(e.u), index_of(e.v)) else {
                return Err(Error::InvalidNetwork(format!(
                    "edge {eid} has an endpoint outside the vertex set"
                )));
            };
            // Sorted-set re-indexing is monotone, so u < v is preserved and
            // offsets keep their orientation.
            edge_list.push((u, v, e.length.clone(), e.weight.clone()));
            edge_origin.push(EdgeSpan {
                parent_edge: eid,
                lo: Rational::zero(),
                hi: e.length.clone(),
                reversed: false,
            });
        }
        let mut net = WeightedNetwork::new(vertex_weights, edge_list)?;
        net.positions = positions;
        Ok((
            net,
            PointMap {
                vertex_origin,
                edge_origin,
            },
        ))
    }
}

fn interpolate(
    a: Option<(f64, f64)>,
    b: Option<(f64, f64)>,
    at: &Rational,
    len: &Rational,
) -> Option<(f64, f64)> {
    use num::ToPrimitive;
    let (ax, ay) = a?;
    let (bx, by) = b?;
    let t = (at / len).numer().to_f64()? / (at / len).denom().to_f64()?;
    Some((ax + t * (bx - ax), ay + t * (by - ay)))
}

impl Serialize for WeightedNetwork {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = NetworkWire {
            vertices: self
                .vertex_weights
                .iter()
                .zip(&self.positions)
                .map(|(w, pos)| VertexWire {
                    weight: w.clone(),
                    x: pos.map(|p| p.0),
                    y: pos.map(|p| p.1),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeWire {
                    u: e.u,
                    v: e.v,
                    length: e.length.clone(),
                    weight: e.weight.clone(),
                })
                .collect(),
        };
        wire.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for WeightedNetwork {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let wire = NetworkWire::deserialize(de)?;
        let positions: Vec<Option<(f64, f64)>> = wire
            .vertices
            .iter()
            .map(|v| match (v.x, v.y) {
                (Some(x), Some(y)) => Some((x, y)),
                _ => None,
            })
            .collect();
        let mut net = WeightedNetwork::new(
            wire.vertices.into_iter().map(|v| v.weight).collect(),
            wire.edges
                .into_iter()
                .map(|e| (e.u, e.v, e.length, e.weight))
                .collect(),
        )
        .map_err(serde::de::Error::custom)?;
        net.positions = positions;
        Ok(net)
    }
}

/// Precomputed all-pairs shortest path lengths.
pub struct Apsp {
    d: Vec<Vec<Rational>>,
}

impl Apsp {
    pub fn d(&self, u: VertexId, v: VertexId) -> &Rational {
        &self.d[u as usize][v as usize]
    }
}

/// How one derived edge lies along its parent: the sub-interval `[lo, hi]`
/// of the parent edge, and whether the derived offset direction runs against
/// the parent's (which happens when edge normalization to `u < v` flips a
/// fragment).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpan {
    pub parent_edge: EdgeId,
    pub lo: Rational,
    pub hi: Rational,
    pub reversed: bool,
}

/// Translates points of a derived network (a split or a sub-network) back to
/// the network it was derived from, and parent points forward when they are
/// covered by the derived network.
#[derive(Clone, Debug)]
pub struct PointMap {
    /// Parent location of each derived vertex.
    vertex_origin: Vec<NetworkPoint>,
    /// Parent span of each derived edge.
    edge_origin: Vec<EdgeSpan>,
}

impl PointMap {
    pub fn identity(net: &WeightedNetwork) -> Self {
        PointMap {
            vertex_origin: (0..net.vertex_count() as VertexId)
                .map(NetworkPoint::Vertex)
                .collect(),
            edge_origin: net
                .edges()
                .iter()
                .enumerate()
                .map(|(i, e)| EdgeSpan {
                    parent_edge: i as EdgeId,
                    lo: Rational::zero(),
                    hi: e.length.clone(),
                    reversed: false,
                })
                .collect(),
        }
    }

    pub fn vertex_origin(&self, v: VertexId) -> &NetworkPoint {
        &self.vertex_origin[v as usize]
    }

    pub fn edge_span(&self, e: EdgeId) -> &EdgeSpan {
        &self.edge_origin[e as usize]
    }

    /// Maps a canonical derived point to the parent network.
    ///
    /// # Panics
    ///
    /// Panics on out-of-range ids or a non-canonical edge offset (one that
    /// touches an endpoint exactly — such points must arrive as `Vertex`).
    pub fn map_point(&self, p: &NetworkPoint) -> NetworkPoint {
        match p {
            NetworkPoint::Vertex(v) => self.vertex_origin[*v as usize].clone(),
            NetworkPoint::EdgePoint { edge, offset } => {
                let span = &self.edge_origin[*edge as usize];
                let len = ExtendedLength::from_real(&span.hi - &span.lo);
                assert!(
                    *offset > ExtendedLength::zero() && *offset < len,
                    "offset {offset} is not interior to derived edge {edge}"
                );
                let parent_offset = if span.reversed {
                    ExtendedLength::from_real(span.hi.clone()) - offset
                } else {
                    ExtendedLength::from_real(span.lo.clone()) + offset
                };
                NetworkPoint::EdgePoint {
                    edge: span.parent_edge,
                    offset: parent_offset,
                }
            }
        }
    }

    /// Maps a canonical parent point into the derived network, or `None`
    /// when the derived network does not cover it. `derived` must be the
    /// network this map was created with.
    pub fn push_forward(
        &self,
        derived: &WeightedNetwork,
        parent: &NetworkPoint,
    ) -> Option<NetworkPoint> {
        match parent {
            NetworkPoint::Vertex(v) => {
                let idx = self
                    .vertex_origin
                    .iter()
                    .position(|origin| origin == &NetworkPoint::Vertex(*v))?;
                Some(NetworkPoint::Vertex(idx as VertexId))
            }
            NetworkPoint::EdgePoint { edge, offset } => {
                for (i, span) in self.edge_origin.iter().enumerate() {
                    if span.parent_edge != *edge {
                        continue;
                    }
                    let candidate = if span.reversed {
                        ExtendedLength::from_real(span.hi.clone()) - offset
                    } else {
                        offset - &ExtendedLength::from_real(span.lo.clone())
                    };
                    let len = ExtendedLength::from_real(&span.hi - &span.lo);
                    if candidate >= ExtendedLength::zero() && candidate <= len {
                        let p = NetworkPoint::EdgePoint {
                            edge: i as EdgeId,
                            offset: candidate,
                        };
                        return Some(derived.canonical_point(&p).expect("span-interior point"));
                    }
                }
                None
            }
        }
    }

    /// Composes two derivations: `self` maps B→A, `inner` maps C→B, and the
    /// result maps C→A directly.
    pub fn compose(&self, inner: &PointMap) -> PointMap {
        let vertex_origin = inner
            .vertex_origin
            .iter()
            .map(|p| self.map_point(p))
            .collect();
        let edge_origin = inner
            .edge_origin
            .iter()
            .map(|s2| {
                let s1 = &self.edge_origin[s2.parent_edge as usize];
                let (lo, hi) = if s1.reversed {
                    (&s1.hi - &s2.hi, &s1.hi - &s2.lo)
                } else {
                    (&s1.lo + &s2.lo, &s1.lo + &s2.hi)
                };
                EdgeSpan {
                    parent_edge: s1.parent_edge,
                    lo,
                    hi,
                    reversed: s1.reversed != s2.reversed,
                }
            })
            .collect();
        PointMap {
            vertex_origin,
            edge_origin,
        }
    }
}

/// A full game position: the network, the first player's committed
/// facilities, and the second player's budget.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameInstance {
    pub net: WeightedNetwork,
    pub p1: Vec<NetworkPoint>,
    pub k: u32,
}

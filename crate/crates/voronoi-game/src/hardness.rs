//! Why optimal answers are hard on general graphs: the dominating-set
//! construction, its inverse rewriting, and the weight scaling that keeps
//! the problem hard even when all weights are large integers.
//!
//! The construction hangs a pendant vertex off every vertex of a source
//! graph, weights everything uniformly and tinily, and puts a first-player
//! facility on each pendant. Winning a source vertex then requires standing
//! on it or next to it, so an answering placement of payoff at least `|V|`
//! exists exactly when the source graph has a dominating set of the same
//! size — vertex demand counts in whole units while *all* edge demand
//! together is worth less than one unit, so the threshold can only be met
//! through the vertices. [`extract_dominating_set`] makes the backward
//! direction constructive by rewriting any good placement into such a set.

use crate::network::{NetworkPoint, VertexId, WeightedNetwork};
use crate::rat;
use crate::scalar::Rational;
use crate::zones::compute_zones;
use crate::{Error, Result};
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, VecDeque};

/// An unweighted simple graph over vertices `0..n`, edges normalized to
/// `u < v` and sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleGraph {
    pub n: usize,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("a graph needs at least one vertex".into()));
        }
        let mut norm: Vec<(VertexId, VertexId)> = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Input(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Input(format!("self-loop at vertex {u}")));
            }
            norm.push(if u < v { (u, v) } else { (v, u) });
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Input(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(SimpleGraph { n, edges: norm })
    }

    pub fn is_connected(&self) -> bool {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut count = 1;
        let mut queue = VecDeque::from([0 as VertexId]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// Does `set` dominate the graph — is every vertex in it or adjacent to
    /// a member?
    pub fn dominates(&self, set: &BTreeSet<VertexId>) -> bool {
        let mut covered: Vec<bool> = (0..self.n as VertexId).map(|x| set.contains(&x)).collect();
        for &(u, v) in &self.edges {
            if set.contains(&u) {
                covered[v as usize] = true;
            }
            if set.contains(&v) {
                covered[u as usize] = true;
            }
        }
        covered.into_iter().all(|c| c)
    }
}

/// A reduced yes/no instance: does the answering player have a placement of
/// `k` points worth at least `threshold` against `facilities`?
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecisionInstance {
    /// The augmented network: source vertices `0..n` keep their ids, then
    /// pendant vertex `n + i` hangs off source vertex `i`.
    pub net: WeightedNetwork,
    /// One first-player facility on every pendant vertex.
    pub facilities: Vec<NetworkPoint>,
    /// Size of the answering placement the question asks about.
    pub k: u32,
    /// Payoff the answering placement must reach.
    pub threshold: Rational,
    /// The source graph the instance was built from.
    pub source: SimpleGraph,
    /// Common weight of every edge of the reduced network. Also every
    /// edge's length, which stays fixed under [`scale_weights`].
    pub edge_weight: Rational,
}

/// Builds the game instance whose answer decides dominating set.
///
/// Every vertex (source and pendant alike) weighs 1; every edge has length
/// and weight `1/(|V| + |E| + k + 1)` — any value strictly below
/// `1/(|V| + |E| + k)` works, and this canonical choice keeps fixtures
/// reproducible. The threshold is `|V|`.
///
/// The source graph must be connected: the network type models connected
/// continua only. (Dominating sets of a disconnected graph decompose over
/// its components anyway.)
pub fn reduce_dominating_set(g: &SimpleGraph, k: u32) -> Result<DecisionInstance> {
    if k as usize > g.n {
        return Err(Error::Input(format!(
            "budget {k} exceeds the {} source vertices",
            g.n
        )));
    }
    if !g.is_connected() {
        return Err(Error::Input("the source graph must be connected".into()));
    }

    let n = g.n;
    let we = rat!(1) / rat!((n + g.edges.len() + k as usize + 1) as i64);
    let weights = vec![rat!(1); 2 * n];
    let mut edges: Vec<(VertexId, VertexId, Rational, Rational)> = g
        .edges
        .iter()
        .map(|&(u, v)| (u, v, we.clone(), we.clone()))
        .collect();
    for i in 0..n as VertexId {
        edges.push((i, n as VertexId + i, we.clone(), we.clone()));
    }
    let net = WeightedNetwork::new(weights, edges)?;
    let facilities = (n..2 * n)
        .map(|i| NetworkPoint::Vertex(i as VertexId))
        .collect();
    Ok(DecisionInstance {
        net,
        facilities,
        k,
        threshold: rat!(n as i64),
        source: g.clone(),
        edge_weight: we,
    })
}

/// Rewrites a placement meeting the threshold into a dominating set of the
/// source graph.
///
/// Picks already on source vertices stay. Every other pick is pulled to the
/// source endpoint of its host edge — for a point hugging a pendant
/// facility that is the vertex the facility guards, the move the
/// backward-direction argument is built on; each move forfeits at most one
/// edge's weight, and all edges together are worth less than the single
/// unit of slack the threshold leaves. When a pull collides with a vertex
/// already chosen, the smallest unchosen source vertex substitutes, keeping
/// the result at most `k` distinct vertices.
pub fn extract_dominating_set(
    instance: &DecisionInstance,
    s: &[NetworkPoint],
) -> Result<BTreeSet<VertexId>> {
    let report = compute_zones(&instance.net, &instance.facilities, s)?;
    if report.q2 < instance.threshold {
        return Err(Error::NoExtraction(format!(
            "payoff {} is below the threshold {}",
            report.q2, instance.threshold
        )));
    }

    let n = instance.source.n as VertexId;
    let mut out: BTreeSet<VertexId> = BTreeSet::new();
    let mut pulled: Vec<VertexId> = Vec::new();
    for p in s {
        match instance.net.canonical_point(p)? {
            NetworkPoint::Vertex(v) if v < n => {
                out.insert(v);
            }
            // A pick on a pendant vertex guards nothing a facility does not
            // already hold; give it to the source vertex underneath.
            NetworkPoint::Vertex(v) => pulled.push(v - n),
            // Edges are normalized to `u < v`, so `u` is the source endpoint
            // of a pendant edge and the smaller endpoint of a source edge.
            NetworkPoint::EdgePoint { edge, .. } => pulled.push(instance.net.edge(edge).u),
        }
    }
    for t in pulled {
        if out.insert(t) {
            continue;
        }
        if let Some(free) = (0..n).find(|x| !out.contains(x)) {
            out.insert(free);
        }
    }
    debug_assert!(out.len() <= s.len());
    Ok(out)
}

/// Exact dominating-set decision by subset enumeration, for validating the
/// reduction on small graphs.
pub fn brute_force_dominating_set(g: &SimpleGraph, k: u32) -> Result<bool> {
    if g.n > 20 {
        return Err(Error::TooLarge {
            evaluated: 1 << g.n.min(63),
            cap: 1 << 20,
        });
    }
    let mut closed: Vec<u32> = (0..g.n).map(|i| 1 << i).collect();
    for &(u, v) in &g.edges {
        closed[u as usize] |= 1 << v;
        closed[v as usize] |= 1 << u;
    }
    let full: u32 = (1u32 << g.n) - 1;
    for size in 0..=(k as usize).min(g.n) {
        for combo in (0..g.n).combinations(size) {
            if combo.iter().fold(0u32, |m, &i| m | closed[i]) == full {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Scales all demand (vertex weights, edge weights, and the threshold) by a
/// positive factor, leaving lengths untouched.
///
/// Payoffs scale linearly with demand, so the yes/no answer — and even the
/// identity of the optimal placement — is invariant. Scaling by
/// `|V| + |E| + k + 1` turns the instance into one with integer weights of
/// magnitude polynomial in the graph size, which is what rules out
/// pseudo-polynomial escape hatches.
pub fn scale_weights(instance: &DecisionInstance, factor: &Rational) -> DecisionInstance {
    assert!(factor.is_positive(), "scale factor must be positive");
    let n = instance.net.vertex_count();
    let weights = (0..n as VertexId)
        .map(|v| instance.net.vertex_weight(v) * factor)
        .collect();
    let edges = instance
        .net
        .edges()
        .iter()
        .map(|e| (e.u, e.v, e.length.clone(), &e.weight * factor))
        .collect();
    let net = WeightedNetwork::new(weights, edges).expect("scaling preserves validity");
    DecisionInstance {
        net,
        facilities: instance.facilities.clone(),
        k: instance.k,
        threshold: &instance.threshold * factor,
        source: instance.source.clone(),
        edge_weight: &instance.edge_weight * factor,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{best_response_exact, OracleOptions};
    use crate::synth;
    use crate::zones::just_past_vertex;

    fn v(id: u32) -> NetworkPoint {
        NetworkPoint::Vertex(id)
    }

    fn triangle() -> SimpleGraph {
        SimpleGraph::new(3, vec![(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn path4() -> SimpleGraph {
        SimpleGraph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn graph_validation_rejects_junk() {
        assert!(SimpleGraph::new(0, vec![]).is_err());
        assert!(SimpleGraph::new(2, vec![(0, 0)]).is_err());
        assert!(SimpleGraph::new(2, vec![(0, 2)]).is_err());
        assert!(
            SimpleGraph::new(2, vec![(0, 1), (1, 0)]).is_err(),
            "duplicate after normalizing"
        );
    }

    #[test]
    fn triangle_reduction_counts() {
        let inst = reduce_dominating_set(&triangle(), 1).unwrap();
        assert_eq!(inst.net.vertex_count(), 6);
        assert_eq!(inst.net.edge_count(), 6);
        assert_eq!(inst.edge_weight, rat!(1, 8));
        assert_eq!(inst.threshold, rat!(3));
        assert_eq!(inst.facilities, vec![v(3), v(4), v(5)]);
        for x in 0..6 {
            assert_eq!(inst.net.vertex_weight(x), &rat!(1));
            assert!(inst.net.degree(x) >= 1);
        }
        for e in inst.net.edges() {
            assert_eq!(e.weight, rat!(1, 8));
            assert_eq!(e.length, rat!(1, 8));
        }
    }

    #[test]
    fn single_vertex_reduces_to_one_edge() {
        let g = SimpleGraph::new(1, vec![]).unwrap();
        let inst = reduce_dominating_set(&g, 1).unwrap();
        assert_eq!(inst.net.vertex_count(), 2);
        assert_eq!(inst.net.edge_count(), 1);
        assert_eq!(inst.threshold, rat!(1));
        assert_eq!(inst.edge_weight, rat!(1, 3));
    }

    #[test]
    fn oversized_budget_is_rejected() {
        assert!(matches!(
            reduce_dominating_set(&triangle(), 4),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn brute_force_basics() {
        assert!(brute_force_dominating_set(&triangle(), 1).unwrap());
        assert!(!brute_force_dominating_set(&path4(), 1).unwrap());
        assert!(brute_force_dominating_set(&path4(), 2).unwrap());
        // a star is dominated by its center alone
        let star = SimpleGraph::new(6, (1..6).map(|i| (0, i)).collect()).unwrap();
        assert!(brute_force_dominating_set(&star, 1).unwrap());
        // the empty set dominates nothing
        assert!(!brute_force_dominating_set(&triangle(), 0).unwrap());
    }

    #[test]
    fn path4_payoff_stays_below_threshold_without_a_dominator() {
        let inst = reduce_dominating_set(&path4(), 1).unwrap();
        let oracle =
            best_response_exact(&inst.net, &inst.facilities, 1, &OracleOptions::default()).unwrap();
        assert!(
            oracle.best_q2 < inst.threshold,
            "no single placement should reach {} (got {})",
            inst.threshold,
            oracle.best_q2,
        );
    }

    #[test]
    fn a_dominating_vertex_meets_the_threshold() {
        // the middle vertex of the triangle instance serves all of V
        let inst = reduce_dominating_set(&triangle(), 1).unwrap();
        let report = compute_zones(&inst.net, &inst.facilities, &[v(1)]).unwrap();
        assert!(report.q2 >= inst.threshold);
        let ds = extract_dominating_set(&inst, &[v(1)]).unwrap();
        assert_eq!(ds, BTreeSet::from([1]));
        assert!(inst.source.dominates(&ds));
    }

    #[test]
    fn points_hugging_facilities_pull_back_to_their_vertices() {
        // one pick hugging each pendant facility wins every source vertex
        let inst = reduce_dominating_set(&triangle(), 3).unwrap();
        let s: Vec<NetworkPoint> = (3..6)
            .map(|f| {
                let (eid, _) = *inst.net.neighbors(f).first().unwrap();
                just_past_vertex(&inst.net, f, eid)
            })
            .collect();
        let ds = extract_dominating_set(&inst, &s).unwrap();
        assert_eq!(ds, BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn colliding_pulls_fall_back_to_unused_vertices() {
        let inst = reduce_dominating_set(&triangle(), 2).unwrap();
        let (eid, _) = *inst.net.neighbors(3).first().unwrap();
        let s = vec![v(0), just_past_vertex(&inst.net, 3, eid)];
        // the pulled pick lands on vertex 0, which is taken; 1 is the
        // smallest free substitute
        let ds = extract_dominating_set(&inst, &s).unwrap();
        assert_eq!(ds, BTreeSet::from([0, 1]));
    }

    #[test]
    fn low_payoff_placements_extract_nothing() {
        let inst = reduce_dominating_set(&triangle(), 1).unwrap();
        // a pick deep in a pendant edge wins one vertex, far short of 3
        let (eid, _) = *inst.net.neighbors(3).first().unwrap();
        let s = vec![just_past_vertex(&inst.net, 3, eid)];
        assert!(matches!(
            extract_dominating_set(&inst, &s),
            Err(Error::NoExtraction(_))
        ));
    }

    /// The reduction's iff, both directions, on every connected graph with
    /// up to four vertices and every budget — decided independently by
    /// subset enumeration on the source graph and by the game oracle on the
    /// reduced instance.
    #[test]
    fn round_trip_against_brute_force() {
        for (n, edges) in synth::connected_graph_classes(4) {
            let g = SimpleGraph::new(n, edges).unwrap();
            for k in 0..=n as u32 {
                let inst = reduce_dominating_set(&g, k).unwrap();
                let oracle =
                    best_response_exact(&inst.net, &inst.facilities, k, &OracleOptions::default())
                        .unwrap();
                let game_says = oracle.best_q2 >= inst.threshold;
                let sets_say = brute_force_dominating_set(&g, k).unwrap();
                assert_eq!(game_says, sets_say, "n {n}, k {k}: reduction disagrees");

                // edge demand alone can never bridge the threshold gap
                let report = compute_zones(&inst.net, &inst.facilities, &oracle.best_s).unwrap();
                let q_v: Rational = report
                    .vertex_owner
                    .iter()
                    .enumerate()
                    .filter(|(_, o)| o.is_p2())
                    .fold(Rational::zero(), |acc, (x, _)| {
                        acc + inst.net.vertex_weight(x as VertexId)
                    });
                let q_e = &report.q2 - &q_v;
                let edge_total = rat!((n + g.edges.len()) as i64) * &inst.edge_weight;
                assert!(
                    q_e <= edge_total,
                    "served edge demand exceeds the whole edge supply"
                );

                if game_says {
                    let ds = extract_dominating_set(&inst, &oracle.best_s).unwrap();
                    assert!(ds.len() <= k as usize);
                    assert!(
                        g.dominates(&ds),
                        "n {n}, k {k}: extracted set fails to dominate"
                    );
                }
            }
        }
    }

    #[test]
    fn scaling_preserves_the_decision_and_the_argmax() {
        let inst = reduce_dominating_set(&triangle(), 1).unwrap();
        let same = scale_weights(&inst, &rat!(1));
        assert_eq!(same.threshold, inst.threshold);
        assert_eq!(same.net.total_weight(), inst.net.total_weight());

        let scaled = scale_weights(&inst, &rat!(8));
        assert_eq!(scaled.threshold, rat!(24));
        assert_eq!(scaled.edge_weight, rat!(1));
        for e in scaled.net.edges() {
            assert_eq!(e.weight, rat!(1), "integer weights after scaling");
            assert_eq!(e.length, rat!(1, 8), "lengths are not demand and stay put");
        }
        for x in 0..6 {
            assert_eq!(scaled.net.vertex_weight(x), &rat!(8));
        }

        let before =
            best_response_exact(&inst.net, &inst.facilities, 1, &OracleOptions::default()).unwrap();
        let after = best_response_exact(
            &scaled.net,
            &scaled.facilities,
            1,
            &OracleOptions::default(),
        )
        .unwrap();
        assert_eq!(
            after.best_s, before.best_s,
            "scaling must not move the optimum"
        );
        assert_eq!(after.best_q2, &before.best_q2 * &rat!(8));
        assert_eq!(
            before.best_q2 >= inst.threshold,
            after.best_q2 >= scaled.threshold
        );
    }
}

//! Approximate best responses on arbitrary networks via weighted maximum
//! coverage.
//!
//! On general graphs the exact best response is out of reach (see
//! [`crate::hardness`]), but the problem reduces *exactly* to weighted
//! maximum coverage: refine the network until every candidate placement
//! serves each demand fragment all-or-nothing, and a set of placements then
//! wins precisely the union of their fragment sets. [`build_wmcp`] performs
//! that reduction, [`greedy_wmcp`] runs the classic greedy selection on it,
//! and because the reduction loses nothing, greedy's `1 − 1/e` coverage
//! guarantee applies verbatim to game payoffs. [`approx_best_response`]
//! glues the two together and re-scores the chosen placement with the exact
//! zone engine as a self-check.

use crate::network::{EdgeId, NetworkPoint, VertexId, WeightedNetwork};
use crate::scalar::Rational;
use crate::zones::{candidate_set, compute_zones, zone_decomposition, ZoneElement};
use crate::Result;
use serde::Serialize;
use std::collections::BTreeSet;

/// Where a coverage element lives in the original network.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ElementSite {
    /// A demand-bearing vertex. Never one occupied by the opponent, and
    /// never a refinement artefact — those carry no weight.
    Vertex { vertex: VertexId },
    /// The fragment of an original edge between offsets `lo` and `hi`.
    Fragment {
        edge: EdgeId,
        lo: Rational,
        hi: Rational,
    },
}

/// One indivisible piece of demand: any placement either wins all of it or
/// none of it.
#[derive(Clone, Debug, Serialize)]
pub struct CoverageElement {
    pub weight: Rational,
    pub site: ElementSite,
}

/// A placement problem rewritten as set coverage: one set per candidate
/// location, listing the demand elements that candidate would win against
/// the fixed opponent placement.
///
/// Candidate ids are indices into `candidates`, whose deterministic
/// construction order (vertices, then capture boundaries, then just-past
/// points) fixes every tie-break downstream. The element weights sum to the
/// network's total demand minus the weight pinned under the opponent's
/// facilities — everything else is winnable by someone.
#[derive(Clone, Debug, Serialize)]
pub struct SetSystem {
    pub candidates: Vec<NetworkPoint>,
    pub elements: Vec<CoverageElement>,
    /// `sets[c]`: element ids candidate `c` serves.
    pub sets: Vec<BTreeSet<u32>>,
}

impl SetSystem {
    /// Total weight of the union of the chosen candidates' sets.
    pub fn covered_weight(&self, chosen: &[u32]) -> Rational {
        let mut covered: BTreeSet<u32> = BTreeSet::new();
        for &ci in chosen {
            covered.extend(self.sets[ci as usize].iter().copied());
        }
        let mut w = Rational::zero();
        for el in covered {
            w += &self.elements[el as usize].weight;
        }
        w
    }
}

/// Reduces a best-response problem to weighted maximum coverage.
///
/// The network is refined at every facility, candidate, and ownership
/// boundary, so that each surviving fragment is served all-or-nothing by
/// every candidate. Infinitesimally displaced points (candidate positions
/// and ownership boundaries alike) refine at their real part — the
/// displacement only decides ownership of a measure-zero point, which
/// carries no weight, so the finite rational refinement loses nothing.
pub fn build_wmcp(net: &WeightedNetwork, f: &[NetworkPoint]) -> Result<SetSystem> {
    let pool = candidate_set(net, f)?;
    let dec = zone_decomposition(net, f, &pool.points)?;

    let mut elements = Vec::with_capacity(dec.elements.len());
    for (el, w) in &dec.elements {
        let site = match el {
            ZoneElement::Vertex(x) => match dec.map.vertex_origin(*x) {
                NetworkPoint::Vertex(v) => ElementSite::Vertex { vertex: *v },
                NetworkPoint::EdgePoint { .. } => {
                    unreachable!("refinement vertices carry no demand")
                }
            },
            ZoneElement::Arc(a) => {
                let span = dec.map.edge_span(*a);
                ElementSite::Fragment {
                    edge: span.parent_edge,
                    lo: span.lo.clone(),
                    hi: span.hi.clone(),
                }
            }
        };
        elements.push(CoverageElement {
            weight: w.clone(),
            site,
        });
    }

    debug_assert_eq!(
        elements
            .iter()
            .fold(Rational::zero(), |acc, e| acc + &e.weight),
        {
            let mut occupied = Rational::zero();
            let mut seen = BTreeSet::new();
            for p in f {
                if let NetworkPoint::Vertex(v) = net.canonical_point(p)? {
                    if seen.insert(v) {
                        occupied += net.vertex_weight(v);
                    }
                }
            }
            net.total_weight() - occupied
        },
        "the universe must hold exactly the winnable demand"
    );

    Ok(SetSystem {
        candidates: pool.points,
        elements,
        sets: dec.zones,
    })
}

/// Record of a greedy run: what was picked, in order, and for how much.
#[derive(Clone, Debug, Default, Serialize)]
pub struct GreedyTrace {
    /// `(candidate id, marginal gain)` per pick.
    pub picks: Vec<(u32, Rational)>,
    /// Covered weight after each pick.
    pub cumulative: Vec<Rational>,
}

/// Greedy weighted maximum coverage: up to `tau` rounds, each taking the
/// set with the largest uncovered weight, ties to the smallest candidate
/// id. Stops early once no set adds anything — a redundant pick cannot
/// change the covered weight and would only pad the answer.
pub fn greedy_wmcp(system: &SetSystem, tau: u32) -> (Vec<u32>, Rational, GreedyTrace) {
    let mut covered: BTreeSet<u32> = BTreeSet::new();
    let mut chosen: Vec<u32> = Vec::new();
    let mut total = Rational::zero();
    let mut trace = GreedyTrace::default();

    for _ in 0..tau {
        let mut best: Option<(u32, Rational)> = None;
        for (ci, set) in system.sets.iter().enumerate() {
            let mut gain = Rational::zero();
            for el in set {
                if !covered.contains(el) {
                    gain += &system.elements[*el as usize].weight;
                }
            }
            // only a strict improvement replaces, so the smallest id wins ties
            let better = match &best {
                None => true,
                Some((_, g)) => gain > *g,
            };
            if better {
                best = Some((ci as u32, gain));
            }
        }
        let Some((ci, gain)) = best else { break };
        if gain.is_zero() {
            break;
        }
        covered.extend(system.sets[ci as usize].iter().copied());
        total += &gain;
        chosen.push(ci);
        trace.picks.push((ci, gain));
        trace.cumulative.push(total.clone());
    }
    (chosen, total, trace)
}

/// Greedy best response: reduce to coverage, pick greedily, map the chosen
/// sets back to their candidate points.
///
/// The covered weight and the game payoff of the returned placement agree
/// exactly — that is the point of the reduction — and the final assertion
/// enforces it on every call. The payoff is at least `1 − 1/e` of the
/// optimal best response.
pub fn approx_best_response(
    net: &WeightedNetwork,
    f: &[NetworkPoint],
    k: u32,
) -> Result<(Vec<NetworkPoint>, Rational)> {
    let system = build_wmcp(net, f)?;
    let (chosen, covered, _) = greedy_wmcp(&system, k);
    let s: Vec<NetworkPoint> = chosen
        .iter()
        .map(|&ci| system.candidates[ci as usize].clone())
        .collect();
    let report = compute_zones(net, f, &s)?;
    assert_eq!(
        report.q2, covered,
        "the coverage reduction must account payoffs exactly"
    );
    Ok((s, report.q2))
}

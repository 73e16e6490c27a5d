//! Exhaustive ground truth for the second player's best response.
//!
//! Every other solver in this crate is checked against these routines, so
//! they favor obvious correctness over speed: enumerate subsets of the
//! candidate pool (or of a dense grid of edge points), evaluate each with
//! the exact zone machinery, keep the argmax. A configurable evaluation cap
//! keeps accidental combinatorial explosions from hanging a run — exceeding
//! it is a loud error, never a silent truncation.

use crate::network::{EdgeId, NetworkPoint, VertexId, WeightedNetwork};
use crate::rat;
use crate::scalar::{ExtendedLength, Rational};
use crate::zones::{candidate_set, Evaluator, PointHandle};
use crate::{Error, Result};
use itertools::Itertools;
use serde::Serialize;
use std::collections::BTreeSet;

/// Tuning for the exhaustive search.
#[derive(Clone, Debug)]
pub struct OracleOptions {
    /// Maximum number of subset evaluations allowed; the search refuses to
    /// start (with [`Error::TooLarge`]) if the full enumeration would exceed
    /// this.
    pub cap: u64,
    /// Abort the search as soon as the running best payoff reaches this
    /// value. Useful for decision problems ("is there a placement worth at
    /// least δ?") where the exact maximum is irrelevant. The result's
    /// payoff is then a witness, not necessarily the optimum.
    pub stop_at: Option<Rational>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: 10_000_000,
            stop_at: None,
        }
    }
}

/// Outcome of an exhaustive search: the best placement found, its exact
/// payoff, and how many subsets were evaluated to find it.
#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub best_s: Vec<NetworkPoint>,
    pub best_q2: Rational,
    pub evaluated: u64,
}

/// Number of subsets of size at most `k` from `n` items, saturating at
/// `u64::MAX` (anything that large is over every sensible cap anyway).
fn planned_evaluations(n: u64, k: u64) -> u64 {
    let mut total: u128 = 1; // the empty subset
    let mut c: u128 = 1;
    for i in 1..=k.min(n) {
        c = c.saturating_mul((n - i + 1) as u128) / i as u128;
        total = total.saturating_add(c);
        if total > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    total as u64
}

/// Exact best response for the second player with budget `k`, by exhaustive
/// enumeration over the candidate pool of [`candidate_set`].
///
/// All subset sizes up to `k` are searched — placing fewer facilities is
/// never an advantage, but it costs nothing to include the smaller sizes
/// and it lets the empty placement win when nothing is gainable. Payoff
/// ties are broken toward the lexicographically smallest sorted list of
/// candidate indices, which makes results reproducible and prefers smaller
/// placements (a proper prefix precedes its extensions).
pub fn best_response_exact(
    net: &WeightedNetwork,
    f: &[NetworkPoint],
    k: u32,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    let eval = Evaluator::new(net, f)?;
    let cands = candidate_set(net, f)?;
    search(&eval, &cands.points, k, opts)
}

/// Best payoff over placements drawn from a dense real-offset grid: every
/// vertex, plus the points at `j/denominator` of each edge's length for
/// `j = 1..denominator`. Opponent-occupied locations are excluded, exactly
/// as they are from the candidate pool.
///
/// This is a validation probe, not a solver: the interesting assertion is
/// that no grid, however fine, ever beats the candidate-set optimum.
pub fn continuous_probe(
    net: &WeightedNetwork,
    f: &[NetworkPoint],
    k: u32,
    grid_denominator: u32,
    opts: &OracleOptions,
) -> Result<Rational> {
    if grid_denominator == 0 {
        return Err(Error::Input("grid denominator must be at least 1".into()));
    }
    let eval = Evaluator::new(net, f)?;
    let fset: BTreeSet<NetworkPoint> = f
        .iter()
        .map(|p| net.canonical_point(p))
        .collect::<Result<_>>()?;

    let mut grid: Vec<NetworkPoint> = Vec::new();
    for v in 0..net.vertex_count() as VertexId {
        let p = NetworkPoint::Vertex(v);
        if !fset.contains(&p) {
            grid.push(p);
        }
    }
    let den = rat!(grid_denominator as i64);
    for (eid, e) in net.edges().iter().enumerate() {
        for j in 1..grid_denominator {
            let off = &(&e.length * &rat!(j as i64)) / &den;
            let p = NetworkPoint::on_edge(eid as EdgeId, ExtendedLength::from_real(off));
            if !fset.contains(&p) {
                grid.push(p);
            }
        }
    }

    Ok(search(&eval, &grid, k, opts)?.best_q2)
}

fn search(
    eval: &Evaluator,
    pool: &[NetworkPoint],
    k: u32,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    let kk = (k as usize).min(pool.len());
    let planned = planned_evaluations(pool.len() as u64, kk as u64);
    if planned > opts.cap {
        return Err(Error::TooLarge {
            evaluated: planned,
            cap: opts.cap,
        });
    }
    let handles: Vec<PointHandle> = pool.iter().map(|p| eval.handle(p)).collect::<Result<_>>()?;

    // The empty placement earns zero but is a legitimate answer (and the
    // tie-break floor: anything positive beats it, nothing ties below it).
    let mut best_q2 = eval.q2_with_handles(&[]);
    let mut best: Vec<usize> = Vec::new();
    let mut evaluated: u64 = 1;

    let stop_reached = |q: &Rational| opts.stop_at.as_ref().is_some_and(|stop| *q >= *stop);

    'sizes: for size in 1..=kk {
        if stop_reached(&best_q2) {
            break;
        }
        for combo in (0..pool.len()).combinations(size) {
            let refs: Vec<&PointHandle> = combo.iter().map(|&i| &handles[i]).collect();
            let q2 = eval.q2_with_handles(&refs);
            evaluated += 1;
            if q2 > best_q2 || (q2 == best_q2 && combo < best) {
                best_q2 = q2;
                best = combo;
            }
            if stop_reached(&best_q2) {
                break 'sizes;
            }
        }
    }

    Ok(OracleResult {
        best_s: best.into_iter().map(|i| pool[i].clone()).collect(),
        best_q2,
        evaluated,
    })
}

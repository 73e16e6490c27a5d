//! Deterministic instance generators for tests, examples, and benchmarks.
//!
//! Everything here is seeded: the same seed always yields the same network
//! or point set, across platforms, which keeps randomized test suites
//! reproducible. Weights and lengths are drawn from small rational pools so
//! that exact arithmetic stays fast and failures stay readable.

use crate::network::{NetworkPoint, WeightedNetwork};
use crate::scalar::{ExtendedLength, Rational};
use itertools::Itertools;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational(rng: &mut impl Rng, max_num: i64, max_den: i64, allow_zero: bool) -> Rational {
    let lo = if allow_zero { 0 } else { 1 };
    Rational::new(
        rng.random_range(lo..=max_num),
        rng.random_range(1..=max_den),
    )
}

/// A random tree on `n` vertices: vertex `v` attaches to a uniformly chosen
/// earlier vertex. Edge lengths are positive; vertex and edge weights may be
/// zero.
pub fn random_tree(seed: u64, n: usize) -> WeightedNetwork {
    assert!(n >= 1, "a tree needs at least one vertex");
    let mut rng = rng(seed);
    let weights = (0..n)
        .map(|_| small_rational(&mut rng, 3, 2, true))
        .collect();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let parent = rng.random_range(0..v) as u32;
        edges.push((
            parent,
            v as u32,
            small_rational(&mut rng, 4, 2, false),
            small_rational(&mut rng, 3, 1, true),
        ));
    }
    WeightedNetwork::new(weights, edges).expect("generated tree is valid")
}

/// A random connected graph: a random tree plus up to `extra` additional
/// edges between distinct vertices (parallel edges are allowed — they are
/// legitimate network features).
pub fn random_connected_graph(seed: u64, n: usize, extra: usize) -> WeightedNetwork {
    assert!(n >= 1);
    let mut rng = rng(seed);
    let weights = (0..n)
        .map(|_| small_rational(&mut rng, 3, 2, true))
        .collect();
    let mut edges = Vec::new();
    for v in 1..n {
        let parent = rng.random_range(0..v) as u32;
        edges.push((
            parent,
            v as u32,
            small_rational(&mut rng, 4, 2, false),
            small_rational(&mut rng, 3, 1, true),
        ));
    }
    if n >= 2 {
        for _ in 0..extra {
            let u = rng.random_range(0..n as u32);
            let v = rng.random_range(0..n as u32);
            if u != v {
                edges.push((
                    u,
                    v,
                    small_rational(&mut rng, 4, 2, false),
                    small_rational(&mut rng, 3, 1, true),
                ));
            }
        }
    }
    WeightedNetwork::new(weights, edges).expect("generated graph is valid")
}

/// Up to `count` distinct canonical points on `net`: vertices and edge
/// positions at eighths of the edge length, optionally displaced by one
/// infinitesimal unit in either direction.
pub fn random_points(
    seed: u64,
    net: &WeightedNetwork,
    count: usize,
    allow_eps: bool,
) -> Vec<NetworkPoint> {
    let mut rng = rng(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for _ in 0..count * 20 {
        if out.len() == count {
            break;
        }
        let p = if net.edge_count() == 0 || rng.random_range(0..3) == 0 {
            NetworkPoint::Vertex(rng.random_range(0..net.vertex_count() as u32))
        } else {
            let e = rng.random_range(0..net.edge_count() as u32);
            let off = &net.edge(e).length * &Rational::new(rng.random_range(1..=7), 8);
            let eps = if allow_eps {
                rng.random_range(-1..=1)
            } else {
                0
            };
            NetworkPoint::on_edge(e, ExtendedLength::with_eps_units(off, eps))
        };
        let p = net
            .canonical_point(&p)
            .expect("generated point is in range");
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out
}

/// All connected simple graphs with at most `max_n` vertices, one
/// representative per isomorphism class, as `(vertex count, edge list)`
/// pairs. Enumerates labeled graphs and keeps the lexicographically minimal
/// relabeling of each.
pub fn connected_graph_classes(max_n: usize) -> Vec<(usize, Vec<(u32, u32)>)> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(u32, u32)> = (0..n as u32)
            .flat_map(|i| (i + 1..n as u32).map(move |j| (i, j)))
            .collect();
        let pair_index = |a: u32, b: u32| -> usize {
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            pairs.iter().position(|&p| p == (a, b)).unwrap()
        };
        let mut seen = BTreeSet::new();
        for mask in 0u32..(1 << pairs.len()) {
            if !mask_connected(n, mask, &pairs) {
                continue;
            }
            let canon = (0..n as u32)
                .permutations(n)
                .map(|perm| {
                    let mut m = 0u32;
                    for (b, &(i, j)) in pairs.iter().enumerate() {
                        if mask & (1 << b) != 0 {
                            m |= 1 << pair_index(perm[i as usize], perm[j as usize]);
                        }
                    }
                    m
                })
                .min()
                .unwrap();
            if seen.insert(canon) {
                let edges = pairs
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| canon & (1 << b) != 0)
                    .map(|(_, &p)| p)
                    .collect();
                out.push((n, edges));
            }
        }
    }
    out
}

fn mask_connected(n: usize, mask: u32, pairs: &[(u32, u32)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0u32];
    seen[0] = true;
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << b) == 0 {
                continue;
            }
            let w = if i == v {
                j
            } else if j == v {
                i
            } else {
                continue;
            };
            if !seen[w as usize] {
                seen[w as usize] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    reached == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = random_tree(7, 6);
        let b = random_tree(7, 6);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let g1 = random_connected_graph(3, 5, 2);
        let g2 = random_connected_graph(3, 5, 2);
        assert_eq!(
            serde_json::to_string(&g1).unwrap(),
            serde_json::to_string(&g2).unwrap()
        );
        assert_eq!(
            random_points(11, &a, 4, true),
            random_points(11, &a, 4, true)
        );
    }

    #[test]
    fn trees_are_trees() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 8);
            let t = random_tree(seed, n);
            assert!(t.is_tree());
            assert_eq!(t.vertex_count(), n);
        }
    }

    #[test]
    fn points_are_distinct_and_canonical() {
        let net = random_connected_graph(4, 5, 1);
        let pts = random_points(9, &net, 6, true);
        let set: BTreeSet<_> = pts.iter().cloned().collect();
        assert_eq!(set.len(), pts.len());
        for p in &pts {
            assert_eq!(net.canonical_point(p).unwrap(), *p);
        }
    }

    #[test]
    fn graph_classes_match_known_counts() {
        // connected simple graphs up to isomorphism: 1, 1, 2, 6, 21 for n = 1..=5
        let classes = connected_graph_classes(5);
        let count = |n: usize| classes.iter().filter(|(m, _)| *m == n).count();
        assert_eq!(count(1), 1);
        assert_eq!(count(2), 1);
        assert_eq!(count(3), 2);
        assert_eq!(count(4), 6);
        assert_eq!(count(5), 21);
        assert_eq!(classes.len(), 31);
    }
}

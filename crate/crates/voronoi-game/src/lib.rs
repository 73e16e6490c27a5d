//! Exact solvers for one-round competitive facility location on weighted
//! networks.
//!
//! Two players place facilities on a network whose vertices *and* edge
//! interiors carry demand. The first player commits `m` facilities, the
//! second answers with `k`, and every point of the network is served by the
//! nearest facility — ties favor the second player. This crate computes the
//! resulting payoffs exactly (arbitrary-precision rationals, no floating
//! point), and provides:
//!
//! - an exact payoff evaluator and zone decomposition for arbitrary
//!   placements ([`zones`]),
//! - a finite candidate set that provably contains an optimal second-player
//!   response, plus a brute-force optimizer over it ([`oracle`]),
//! - a polynomial-time exact best-response solver for tree networks
//!   ([`tree`]),
//! - a `(1 - 1/e)`-approximation for general networks via weighted maximum
//!   coverage ([`approx`]),
//! - the reduction machinery showing the general problem is NP-hard
//!   ([`hardness`]),
//! - first-player placement rules with a guaranteed payoff share
//!   ([`balance`]).
//!
//! Networks, points, and placements serialize to a stable JSON wire format;
//! see [`network`] for the schema and [`scalar`] for the exact arithmetic
//! that underpins everything.

pub mod approx;
pub mod balance;
#[cfg(doctest)]
pub mod guide;
pub mod hardness;
pub mod network;
pub mod oracle;
pub mod scalar;
pub mod synth;
pub mod tree;
pub mod zones;

/// Runs the README's example as a doctest alongside the book's fences.
#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
pub struct ReadmeDoctests;

use thiserror::Error;

/// Errors surfaced by network construction, solvers, and reductions.
#[derive(Debug, Error)]
pub enum Error {
    /// The network violates a structural invariant (dense vertex ids,
    /// connectivity, positive lengths, non-negative weights, no self-loops).
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    /// A point refers to a nonexistent vertex or edge, or its offset leaves
    /// the host edge.
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    /// A placement is empty where it must not be, repeats a location, or
    /// collides with the opponent in a way the operation forbids.
    #[error("invalid placement: {0}")]
    InvalidPlacement(String),

    /// A tree-only routine was handed a network with a cycle.
    #[error("not a tree: {0}")]
    NotATree(String),

    /// Brute-force enumeration would exceed the configured budget.
    #[error("search space too large: {evaluated} candidate subsets exceed cap {cap}")]
    TooLarge { evaluated: u64, cap: u64 },

    /// A facility sits where no perturbation direction exists (at a vertex),
    /// so no shift bound can be derived.
    #[error("not shiftable: {0}")]
    NotShiftable(String),

    /// A decision-problem extraction was requested from a placement whose
    /// payoff does not meet the threshold.
    #[error("no extraction: {0}")]
    NoExtraction(String),

    /// Malformed input (JSON, edge lists, CLI values).
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

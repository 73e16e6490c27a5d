//! Doctest shims for the book. mdbook renders `../book` but cannot run its
//! code fences; including each chapter as a doc comment here makes
//! `cargo test --doc` compile and execute every fence, so the guide breaks
//! loudly when the API moves instead of rotting in place.

#[doc = include_str!("../../../book/src/index.md")]
pub mod index {}

#[doc = include_str!("../../../book/src/networks.md")]
pub mod networks {}

#[doc = include_str!("../../../book/src/zones.md")]
pub mod zones {}

#[doc = include_str!("../../../book/src/follower.md")]
pub mod follower {}

#[doc = include_str!("../../../book/src/trees.md")]
pub mod trees {}

#[doc = include_str!("../../../book/src/coverage.md")]
pub mod coverage {}

#[doc = include_str!("../../../book/src/defense.md")]
pub mod defense {}

#[doc = include_str!("../../../book/src/hardness.md")]
pub mod hardness {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

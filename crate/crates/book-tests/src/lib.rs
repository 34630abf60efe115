//! Runs the Rust listings of the guide under `book/` as doc-tests, one
//! module per chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/invariants.md")]
pub mod invariants {}
#[doc = include_str!("../../../book/src/heights.md")]
pub mod heights {}
#[doc = include_str!("../../../book/src/counting.md")]
pub mod counting {}
#[doc = include_str!("../../../book/src/densities.md")]
pub mod densities {}
#[doc = include_str!("../../../book/src/archimedean.md")]
pub mod archimedean {}
#[doc = include_str!("../../../book/src/prediction.md")]
pub mod prediction {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

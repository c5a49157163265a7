//! The guide's chapters, compiled so that `cargo test` runs every Rust block
//! in them. One module per chapter keeps failures traceable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/charts.md")]
pub mod charts {}
#[doc = include_str!("../../../book/src/normal-coordinates.md")]
pub mod normal_coordinates {}
#[doc = include_str!("../../../book/src/radial.md")]
pub mod radial {}
#[doc = include_str!("../../../book/src/embeddings.md")]
pub mod embeddings {}
#[doc = include_str!("../../../book/src/conformal.md")]
pub mod conformal {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

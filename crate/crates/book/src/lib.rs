//! The guide in `book/` is written for mdbook, which cannot run listings that
//! depend on an external crate. Each chapter is included here as the docs of
//! an empty module, so `cargo test --doc` compiles and runs every listing
//! against the real library. A failing doctest names the chapter's module.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/statistics.md")]
pub mod statistics {}

#[doc = include_str!("../../../book/src/null-distribution.md")]
pub mod null_distribution {}

#[doc = include_str!("../../../book/src/lehmann.md")]
pub mod lehmann {}

#[doc = include_str!("../../../book/src/randomized-test.md")]
pub mod randomized_test {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

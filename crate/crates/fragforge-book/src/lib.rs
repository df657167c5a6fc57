//! Runs every code example in the guide as a doc-test.
//!
//! mdBook cannot test snippets that use external crates, so each chapter
//! from `book/src/` is included here as module documentation and
//! `cargo test --doc -p fragforge-book` compiles and runs the lot. One
//! module per chapter keeps test failures attributable to a file.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/domain-model.md")]
pub mod domain_model {}

#[doc = include_str!("../../../book/src/characterizations.md")]
pub mod characterizations {}

#[doc = include_str!("../../../book/src/taxonomy.md")]
pub mod taxonomy {}

#[doc = include_str!("../../../book/src/bibliography.md")]
pub mod bibliography {}

#[doc = include_str!("../../../book/src/validation.md")]
pub mod validation {}

#[doc = include_str!("../../../book/src/queries.md")]
pub mod queries {}

#[doc = include_str!("../../../book/src/storage.md")]
pub mod storage {}

#[doc = include_str!("../../../book/src/publishing.md")]
pub mod publishing {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

//! The user guide, compiled verbatim from the book in `book/src/`.
//!
//! Each submodule's documentation *is* one chapter, pulled in with
//! `include_str!`, so every Rust snippet in the book runs as a doc-test and
//! the guide can never drift from the code. Build the rendered book with
//! `mdbook build book/`; read it here for the same content with tested
//! examples.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/bit-vectors-and-matrices.md")]
pub mod bit_vectors_and_matrices {}

#[doc = include_str!("../../../book/src/binary-fields.md")]
pub mod binary_fields {}

#[doc = include_str!("../../../book/src/polynomial-maps.md")]
pub mod polynomial_maps {}

#[doc = include_str!("../../../book/src/exact-probability.md")]
pub mod exact_probability {}

#[doc = include_str!("../../../book/src/structured-sources.md")]
pub mod structured_sources {}

#[doc = include_str!("../../../book/src/hash-families.md")]
pub mod hash_families {}

#[doc = include_str!("../../../book/src/extractor-search.md")]
pub mod extractor_search {}

#[doc = include_str!("../../../book/src/input-reduction.md")]
pub mod input_reduction {}

#[doc = include_str!("../../../book/src/impossibility-toolbox.md")]
pub mod impossibility_toolbox {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}

#[doc = include_str!("../../../book/src/file-formats.md")]
pub mod file_formats {}

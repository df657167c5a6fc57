//! # fragforge
//!
//! A catalog engine for libraries of *method fragments*: reusable pieces of
//! modeling knowledge such as techniques, frameworks, viewpoints, reference
//! models, and the relations between them.
//!
//! A [`Library`] holds four cross-referenced record collections — fragments,
//! characterization dimensions, source documents, and a BibTeX-backed
//! bibliography — and the crate provides everything a curator workflow
//! needs around them:
//!
//! - [`model`]: the record types and pure update operations.
//! - [`taxonomy`]: a shipped twenty-dimension classification scheme.
//! - [`bibliography`]: BibTeX parsing, emission, and citation resolution.
//! - [`constraints`]: a fourteen-rule integrity validator with severity
//!   profiles.
//! - [`store`]: canonical one-record-per-file persistence.
//! - [`query`]: a small conjunctive query language plus coverage and
//!   orthogonality reports (Cramér's V).
//! - [`publish`]: a deterministic static-HTML site generator.
//! - [`sample`]: seeded random data for tests and demos.
//!
//! The companion `book/` directory walks through each of these with
//! runnable examples.
//!
//! ```
//! use fragforge::{FragmentKind, Library, MethodFragment, Id};
//! use fragforge::constraints::{validate, Profile, RuleCode};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let library = Library::seeded().add_fragment(MethodFragment::new(
//!     Id::new("orm")?,
//!     FragmentKind::WayOfModeling,
//!     "Object-Role Modeling",
//! ))?;
//!
//! // A bare fragment is missing its description document, its
//! // characterization, and every mandatory dimension.
//! let findings = validate(&library, Profile::Strict);
//! assert!(findings.iter().any(|f| f.code == RuleCode::E001));
//! assert!(findings.iter().any(|f| f.code == RuleCode::E011));
//! # Ok(())
//! # }
//! ```

pub mod bibliography;
pub mod constraints;
pub mod model;
pub mod publish;
pub mod query;
pub mod sample;
pub mod store;
pub mod taxonomy;

pub use bibliography::{BibError, Publication};
pub use constraints::{
    check_partiality, rule_catalog, validate, Profile, RuleCode, Severity, ValidationFinding,
};
pub use model::{
    BibKey, CharacterizationDimension, CharacterizationMethod, CharacterizationProperty,
    DimensionClass, DimensionValue, DocumentKind, DocumentRecord, FragmentKind, Id, Library,
    MethodFragment, Modality, ModelError, Motivation, RelationLink,
};
pub use publish::{publish_site, PublishError, SitePage};
pub use query::{
    coverage_report, cramers_v, eval_query, orthogonality_report, parse_query, ContingencyTable,
    Query, QueryError,
};
pub use store::{load_library, save_library, StoreError, FORMAT_VERSION};
pub use taxonomy::{seed_taxonomy, SeedSet};

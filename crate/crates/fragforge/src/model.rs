//! Record types of a method-fragment library and the pure update
//! operations over the [`Library`] aggregate.
//!
//! Every update operation takes the library by reference and returns a new
//! value; the input is never mutated. This keeps snapshots cheap to share
//! across threads and makes "what would change" questions trivial to answer.
//!
//! Fields are public on purpose: records loaded from hand-edited files may
//! violate semantic constraints (that is what the `constraints` module
//! reports), so the types themselves only pin down shape, not health.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bibliography::Publication;
use crate::taxonomy;

/// Errors produced by [`Library`] update operations and record validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid identifier {value:?}: {reason}")]
    InvalidId { value: String, reason: &'static str },
    #[error("invalid bibliography key {value:?}")]
    InvalidBibKey { value: String },
    #[error("unknown fragment kind {value:?}")]
    UnknownKind { value: String },
    #[error("unknown modality {value:?} (expected 'intended' or 'suitable')")]
    UnknownModality { value: String },
    #[error("unknown dimension class {value:?} (expected 'why', 'what', or 'how')")]
    UnknownClass { value: String },
    #[error("unknown document kind {value:?}")]
    UnknownDocumentKind { value: String },
    #[error("duplicate {namespace} id '{id}'")]
    DuplicateId { namespace: &'static str, id: Id },
    #[error("fragment '{id}': {detail}")]
    KindFieldMismatch { id: Id, detail: String },
    #[error("dimension '{id}': {detail}")]
    MalformedDimension { id: Id, detail: String },
    #[error("unknown fragment '{id}'")]
    UnknownFragment { id: Id },
    #[error("unknown dimension '{id}'")]
    UnknownDimension { id: Id },
    #[error("dimension '{dimension}' has no value '{value}'")]
    UnknownValue { dimension: Id, value: Id },
    #[error("fragment '{fragment}' already carries {modality} {dimension}={value}")]
    DuplicateProperty {
        fragment: Id,
        dimension: Id,
        value: Id,
        modality: Modality,
    },
    #[error("document '{document}': target '{target}' does not exist")]
    UnknownTarget { document: Id, target: Id },
    #[error("document '{document}': kind requires a target")]
    MissingTarget { document: Id },
    #[error("document '{document}': base documents must not have a target")]
    TargetForbidden { document: Id },
    #[error("document '{document}': precedence chain would become cyclic")]
    PrecedenceCycle { document: Id },
}

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

/// A lowercase slug identifying a record within its own namespace
/// (fragments, dimensions and documents each have a separate one).
///
/// Shape: `[a-z0-9][a-z0-9-]*`, at most 64 characters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Id(String);

impl Id {
    pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
        let value = value.into();
        let invalid = |reason| ModelError::InvalidId {
            value: value.clone(),
            reason,
        };
        let mut chars = value.chars();
        match chars.next() {
            None => return Err(invalid("must not be empty")),
            Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {}
            Some(_) => return Err(invalid("must start with a lowercase letter or digit")),
        }
        if !chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-') {
            return Err(invalid(
                "may only contain lowercase letters, digits, and '-'",
            ));
        }
        if value.chars().count() > 64 {
            return Err(invalid("must be at most 64 characters"));
        }
        Ok(Id(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Id {
    type Error = ModelError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Id::new(value)
    }
}

impl FromStr for Id {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Id::new(s)
    }
}

impl From<Id> for String {
    fn from(id: Id) -> String {
        id.0
    }
}

/// A case-sensitive BibTeX citation key: `[A-Za-z0-9][A-Za-z0-9:_+./-]*`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BibKey(String);

impl BibKey {
    pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
        let value = value.into();
        let ok_tail = |c: char| c.is_ascii_alphanumeric() || ":_+./-".contains(c);
        let mut chars = value.chars();
        let valid = match chars.next() {
            Some(c) if c.is_ascii_alphanumeric() => chars.all(ok_tail),
            _ => false,
        };
        if valid {
            Ok(BibKey(value))
        } else {
            Err(ModelError::InvalidBibKey { value })
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BibKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for BibKey {
    type Error = ModelError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        BibKey::new(value)
    }
}

impl FromStr for BibKey {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BibKey::new(s)
    }
}

impl From<BibKey> for String {
    fn from(key: BibKey) -> String {
        key.0
    }
}

// ---------------------------------------------------------------------------
// Fragment kinds
// ---------------------------------------------------------------------------

/// The closed set of fragment kinds a library can hold.
///
/// The first nine are the methodical ("modeling fragment") kinds; `model`,
/// `view`, and `model-relation` are the concrete artifact kinds. Two kinds
/// have accepted input aliases: `approach` for `way-of-working` and
/// `technique` for `way-of-modeling`. Aliases are normalized on parse and
/// never emitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FragmentKind {
    WayOfThinking,
    ViewingFramework,
    ViewingCell,
    WayOfWorking,
    Viewpoint,
    ModelRelationType,
    WayOfModeling,
    WayOfConceiving,
    WayOfDescribing,
    Model,
    View,
    ModelRelation,
}

impl FragmentKind {
    pub const ALL: [FragmentKind; 12] = [
        FragmentKind::WayOfThinking,
        FragmentKind::ViewingFramework,
        FragmentKind::ViewingCell,
        FragmentKind::WayOfWorking,
        FragmentKind::Viewpoint,
        FragmentKind::ModelRelationType,
        FragmentKind::WayOfModeling,
        FragmentKind::WayOfConceiving,
        FragmentKind::WayOfDescribing,
        FragmentKind::Model,
        FragmentKind::View,
        FragmentKind::ModelRelation,
    ];

    pub fn slug(&self) -> &'static str {
        match self {
            FragmentKind::WayOfThinking => "way-of-thinking",
            FragmentKind::ViewingFramework => "viewing-framework",
            FragmentKind::ViewingCell => "viewing-cell",
            FragmentKind::WayOfWorking => "way-of-working",
            FragmentKind::Viewpoint => "viewpoint",
            FragmentKind::ModelRelationType => "model-relation-type",
            FragmentKind::WayOfModeling => "way-of-modeling",
            FragmentKind::WayOfConceiving => "way-of-conceiving",
            FragmentKind::WayOfDescribing => "way-of-describing",
            FragmentKind::Model => "model",
            FragmentKind::View => "view",
            FragmentKind::ModelRelation => "model-relation",
        }
    }

    /// Human-readable form of the kind, for page headings and listings.
    pub fn label(&self) -> &'static str {
        match self {
            FragmentKind::WayOfThinking => "Way of thinking",
            FragmentKind::ViewingFramework => "Viewing framework",
            FragmentKind::ViewingCell => "Viewing cell",
            FragmentKind::WayOfWorking => "Way of working",
            FragmentKind::Viewpoint => "Viewpoint",
            FragmentKind::ModelRelationType => "Model relation type",
            FragmentKind::WayOfModeling => "Way of modeling",
            FragmentKind::WayOfConceiving => "Way of conceiving",
            FragmentKind::WayOfDescribing => "Way of describing",
            FragmentKind::Model => "Model",
            FragmentKind::View => "View",
            FragmentKind::ModelRelation => "Model relation",
        }
    }

    /// Kinds that contain other fragments through `comprises`.
    pub fn allows_comprises(&self) -> bool {
        matches!(
            self,
            FragmentKind::Viewpoint | FragmentKind::ViewingFramework | FragmentKind::View
        )
    }

    /// Kinds for which the `partial` flag is meaningful.
    pub fn allows_partial(&self) -> bool {
        matches!(self, FragmentKind::Model | FragmentKind::View)
    }
}

impl fmt::Display for FragmentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for FragmentKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        // `approach` and `technique` are accepted as input synonyms.
        match s {
            "approach" => return Ok(FragmentKind::WayOfWorking),
            "technique" => return Ok(FragmentKind::WayOfModeling),
            _ => {}
        }
        FragmentKind::ALL
            .iter()
            .find(|k| k.slug() == s)
            .copied()
            .ok_or_else(|| ModelError::UnknownKind {
                value: s.to_owned(),
            })
    }
}

impl TryFrom<String> for FragmentKind {
    type Error = ModelError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<FragmentKind> for String {
    fn from(kind: FragmentKind) -> String {
        kind.slug().to_owned()
    }
}

// ---------------------------------------------------------------------------
// Characterizations
// ---------------------------------------------------------------------------

/// Whether a fragment is aimed at a value (`intended`) or merely works for
/// it (`suitable`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Modality {
    Intended,
    Suitable,
}

impl Modality {
    pub fn slug(&self) -> &'static str {
        match self {
            Modality::Intended => "intended",
            Modality::Suitable => "suitable",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Modality {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "intended" => Ok(Modality::Intended),
            "suitable" => Ok(Modality::Suitable),
            _ => Err(ModelError::UnknownModality {
                value: s.to_owned(),
            }),
        }
    }
}

impl TryFrom<String> for Modality {
    type Error = ModelError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<Modality> for String {
    fn from(m: Modality) -> String {
        m.slug().to_owned()
    }
}

/// The recorded justification for a characterization property.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Motivation {
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cites: Vec<BibKey>,
}

impl Motivation {
    pub fn new(text: impl Into<String>) -> Self {
        Motivation {
            text: text.into(),
            cites: Vec::new(),
        }
    }

    pub fn citing(text: impl Into<String>, cites: Vec<BibKey>) -> Self {
        Motivation {
            text: text.into(),
            cites,
        }
    }
}

/// One (dimension, value) classification attached to a fragment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterizationProperty {
    pub dimension: Id,
    pub value: Id,
    pub modality: Modality,
    pub motivation: Motivation,
}

/// Which of the three scheme classes a dimension belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DimensionClass {
    Why,
    What,
    How,
}

impl DimensionClass {
    pub const ALL: [DimensionClass; 3] = [
        DimensionClass::Why,
        DimensionClass::What,
        DimensionClass::How,
    ];

    pub fn slug(&self) -> &'static str {
        match self {
            DimensionClass::Why => "why",
            DimensionClass::What => "what",
            DimensionClass::How => "how",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            DimensionClass::Why => "Why the model is produced",
            DimensionClass::What => "What the model focuses on",
            DimensionClass::How => "How the model is produced",
        }
    }
}

impl fmt::Display for DimensionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for DimensionClass {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "why" => Ok(DimensionClass::Why),
            "what" => Ok(DimensionClass::What),
            "how" => Ok(DimensionClass::How),
            _ => Err(ModelError::UnknownClass {
                value: s.to_owned(),
            }),
        }
    }
}

impl TryFrom<String> for DimensionClass {
    type Error = ModelError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<DimensionClass> for String {
    fn from(c: DimensionClass) -> String {
        c.slug().to_owned()
    }
}

/// One admissible value of a characterization dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionValue {
    pub id: Id,
    pub label: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

/// How a curator decides which value of the dimension applies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterizationMethod {
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cites: Vec<BibKey>,
}

/// A named classification axis with an enumerated value set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CharacterizationDimension {
    pub id: Id,
    pub name: String,
    pub class: DimensionClass,
    pub values: Vec<DimensionValue>,
    pub method: CharacterizationMethod,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub mandatory_for: BTreeSet<FragmentKind>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub multi_valued: bool,
}

impl CharacterizationDimension {
    pub fn value(&self, id: &Id) -> Option<&DimensionValue> {
        self.values.iter().find(|v| &v.id == id)
    }

    pub fn has_value(&self, id: &Id) -> bool {
        self.value(id).is_some()
    }

    /// Shape checks enforced when a dimension enters the library through
    /// [`Library::add_dimension`]. Files loaded from disk may still violate
    /// them; the validator reports those.
    pub fn check_invariants(&self) -> Result<(), ModelError> {
        let malformed = |detail: &str| ModelError::MalformedDimension {
            id: self.id.clone(),
            detail: detail.to_owned(),
        };
        if self.values.len() < 2 {
            return Err(malformed("fewer than two values"));
        }
        let mut seen = BTreeSet::new();
        for v in &self.values {
            if !seen.insert(&v.id) {
                return Err(ModelError::MalformedDimension {
                    id: self.id.clone(),
                    detail: format!("duplicate value id '{}'", v.id),
                });
            }
        }
        if self.method.text.trim().is_empty() {
            return Err(malformed("empty characterization method text"));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Method fragments
// ---------------------------------------------------------------------------

/// Endpoints of a `model-relation` fragment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RelationLink {
    pub from: Id,
    pub to: Id,
    pub relation_type: Id,
}

/// A classified fragment record: one of the twelve [`FragmentKind`]s plus
/// its characterization properties and kind-specific structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodFragment {
    pub id: Id,
    pub kind: FragmentKind,
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub properties: Vec<CharacterizationProperty>,
    /// `Some` exactly for kinds `model` and `view`; defaults to `false`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partial: Option<bool>,
    /// Contained fragment ids: techniques of a viewpoint, cells of a
    /// viewing framework, models (plus the viewpoint) of a view.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub comprises: Vec<Id>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<RelationLink>,
}

impl MethodFragment {
    pub fn new(id: Id, kind: FragmentKind, name: impl Into<String>) -> Self {
        MethodFragment {
            id,
            kind,
            name: name.into(),
            properties: Vec::new(),
            partial: None,
            comprises: Vec::new(),
            relation: None,
        }
        .normalized()
    }

    pub fn with_partial(mut self, partial: bool) -> Self {
        self.partial = Some(partial);
        self
    }

    pub fn with_comprises(mut self, ids: Vec<Id>) -> Self {
        self.comprises = ids;
        self
    }

    pub fn with_relation(mut self, relation: RelationLink) -> Self {
        self.relation = Some(relation);
        self
    }

    /// Fills in the implied `partial = false` for models and views.
    pub fn normalized(mut self) -> Self {
        if self.kind.allows_partial() && self.partial.is_none() {
            self.partial = Some(false);
        }
        self
    }

    pub fn is_partial(&self) -> bool {
        self.partial.unwrap_or(false)
    }

    /// Kind/field shape checks. Expects a [`normalized`](Self::normalized)
    /// fragment.
    pub fn check_invariants(&self) -> Result<(), ModelError> {
        let mismatch = |detail: String| ModelError::KindFieldMismatch {
            id: self.id.clone(),
            detail,
        };
        if !self.comprises.is_empty() && !self.kind.allows_comprises() {
            return Err(mismatch(format!(
                "'comprises' is not allowed for kind {}",
                self.kind
            )));
        }
        match (self.kind.allows_partial(), self.partial) {
            (false, Some(_)) => {
                return Err(mismatch(format!(
                    "'partial' is not allowed for kind {}",
                    self.kind
                )))
            }
            (true, None) => {
                return Err(mismatch("missing 'partial' flag".to_owned()));
            }
            _ => {}
        }
        match (self.kind, &self.relation) {
            (FragmentKind::ModelRelation, None) => {
                return Err(mismatch(
                    "kind model-relation requires 'relation' endpoints".to_owned(),
                ))
            }
            (FragmentKind::ModelRelation, Some(_)) => {}
            (_, Some(_)) => {
                return Err(mismatch(format!(
                    "'relation' is not allowed for kind {}",
                    self.kind
                )))
            }
            (_, None) => {}
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Documents
// ---------------------------------------------------------------------------

/// The three document classes a library records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DocumentKind {
    /// Original source literature.
    Base,
    /// A library-authored description of a fragment.
    Description,
    /// A library-authored description of a characterization dimension.
    DimensionDescription,
}

impl DocumentKind {
    pub fn slug(&self) -> &'static str {
        match self {
            DocumentKind::Base => "base",
            DocumentKind::Description => "description",
            DocumentKind::DimensionDescription => "dimension-description",
        }
    }
}

impl fmt::Display for DocumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for DocumentKind {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(DocumentKind::Base),
            "description" => Ok(DocumentKind::Description),
            "dimension-description" => Ok(DocumentKind::DimensionDescription),
            _ => Err(ModelError::UnknownDocumentKind {
                value: s.to_owned(),
            }),
        }
    }
}

impl TryFrom<String> for DocumentKind {
    type Error = ModelError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<DocumentKind> for String {
    fn from(k: DocumentKind) -> String {
        k.slug().to_owned()
    }
}

/// A source-document record. Content bytes live outside the model; only a
/// relative path under the library's `content/` directory is stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DocumentRecord {
    pub id: Id,
    pub kind: DocumentKind,
    /// The described fragment or dimension; required for the two
    /// description kinds, forbidden for base documents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Id>,
    pub bibkey: BibKey,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content_path: Option<String>,
    /// An older document this one supersedes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precedes: Option<Id>,
}

// ---------------------------------------------------------------------------
// The library aggregate
// ---------------------------------------------------------------------------

/// The root aggregate: fragments, dimensions, documents and the
/// bibliography, cross-referenced by identifier.
///
/// `extensions` preserves fields this version of the software does not
/// understand, keyed `"<section>/<id>"` (or `"manifest"`), so round-tripping
/// a library through disk never discards data.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Library {
    pub fragments: BTreeMap<Id, MethodFragment>,
    pub dimensions: BTreeMap<Id, CharacterizationDimension>,
    pub documents: BTreeMap<Id, DocumentRecord>,
    pub bibliography: BTreeMap<BibKey, Publication>,
    pub extensions: BTreeMap<String, serde_json::Value>,
}

impl Library {
    /// An empty library.
    pub fn new() -> Self {
        Library::default()
    }

    /// A library pre-populated with the shipped classification taxonomy
    /// (see the `taxonomy` module); everything else empty.
    pub fn seeded() -> Self {
        let mut lib = Library::new();
        for dim in taxonomy::seed_taxonomy().dimensions {
            lib.dimensions.insert(dim.id.clone(), dim);
        }
        lib
    }

    pub fn fragment(&self, id: &Id) -> Option<&MethodFragment> {
        self.fragments.get(id)
    }

    pub fn dimension(&self, id: &Id) -> Option<&CharacterizationDimension> {
        self.dimensions.get(id)
    }

    pub fn document(&self, id: &Id) -> Option<&DocumentRecord> {
        self.documents.get(id)
    }

    /// Returns a new library containing `fragment`.
    ///
    /// The fragment is normalized first (`partial` default). Fails with
    /// [`ModelError::DuplicateId`] or [`ModelError::KindFieldMismatch`].
    pub fn add_fragment(&self, fragment: MethodFragment) -> Result<Library, ModelError> {
        let fragment = fragment.normalized();
        fragment.check_invariants()?;
        if self.fragments.contains_key(&fragment.id) {
            return Err(ModelError::DuplicateId {
                namespace: "fragment",
                id: fragment.id,
            });
        }
        let mut next = self.clone();
        next.fragments.insert(fragment.id.clone(), fragment);
        Ok(next)
    }

    /// Returns a new library containing `dimension`.
    pub fn add_dimension(
        &self,
        dimension: CharacterizationDimension,
    ) -> Result<Library, ModelError> {
        dimension.check_invariants()?;
        if self.dimensions.contains_key(&dimension.id) {
            return Err(ModelError::DuplicateId {
                namespace: "dimension",
                id: dimension.id,
            });
        }
        let mut next = self.clone();
        next.dimensions.insert(dimension.id.clone(), dimension);
        Ok(next)
    }

    /// Appends a characterization property to an existing fragment.
    ///
    /// The dimension and value must exist and the (dimension, value,
    /// modality) triple must not already be attached. Property order is
    /// append-only and preserved.
    pub fn attach_property(
        &self,
        fragment: &Id,
        property: CharacterizationProperty,
    ) -> Result<Library, ModelError> {
        let record = self
            .fragments
            .get(fragment)
            .ok_or_else(|| ModelError::UnknownFragment {
                id: fragment.clone(),
            })?;
        let dimension = self.dimensions.get(&property.dimension).ok_or_else(|| {
            ModelError::UnknownDimension {
                id: property.dimension.clone(),
            }
        })?;
        if !dimension.has_value(&property.value) {
            return Err(ModelError::UnknownValue {
                dimension: property.dimension,
                value: property.value,
            });
        }
        let duplicate = record.properties.iter().any(|p| {
            p.dimension == property.dimension
                && p.value == property.value
                && p.modality == property.modality
        });
        if duplicate {
            return Err(ModelError::DuplicateProperty {
                fragment: fragment.clone(),
                dimension: property.dimension,
                value: property.value,
                modality: property.modality,
            });
        }
        let mut next = self.clone();
        next.fragments
            .get_mut(fragment)
            .expect("fragment present")
            .properties
            .push(property);
        Ok(next)
    }

    /// Returns a new library containing `document`.
    ///
    /// Description kinds must target an existing fragment or dimension;
    /// base documents must not carry a target. A `precedes` reference must
    /// point at an existing document and must keep all precedence chains
    /// acyclic.
    pub fn add_document(&self, document: DocumentRecord) -> Result<Library, ModelError> {
        if self.documents.contains_key(&document.id) {
            return Err(ModelError::DuplicateId {
                namespace: "document",
                id: document.id,
            });
        }
        match (document.kind, &document.target) {
            (DocumentKind::Base, Some(_)) => {
                return Err(ModelError::TargetForbidden {
                    document: document.id,
                })
            }
            (DocumentKind::Base, None) => {}
            (kind, None) => {
                let _ = kind;
                return Err(ModelError::MissingTarget {
                    document: document.id,
                });
            }
            (DocumentKind::Description, Some(target)) => {
                if !self.fragments.contains_key(target) {
                    return Err(ModelError::UnknownTarget {
                        document: document.id.clone(),
                        target: target.clone(),
                    });
                }
            }
            (DocumentKind::DimensionDescription, Some(target)) => {
                if !self.dimensions.contains_key(target) {
                    return Err(ModelError::UnknownTarget {
                        document: document.id.clone(),
                        target: target.clone(),
                    });
                }
            }
        }
        if let Some(precedes) = &document.precedes {
            if precedes == &document.id {
                return Err(ModelError::PrecedenceCycle {
                    document: document.id,
                });
            }
            if !self.documents.contains_key(precedes) {
                return Err(ModelError::UnknownTarget {
                    document: document.id.clone(),
                    target: precedes.clone(),
                });
            }
            // Walk the existing chain; libraries loaded from disk may
            // contain references the add-path never produced.
            let mut current = Some(precedes.clone());
            let mut steps = 0;
            while let Some(id) = current {
                if id == document.id {
                    return Err(ModelError::PrecedenceCycle {
                        document: document.id,
                    });
                }
                steps += 1;
                if steps > self.documents.len() + 1 {
                    return Err(ModelError::PrecedenceCycle {
                        document: document.id,
                    });
                }
                current = self.documents.get(&id).and_then(|d| d.precedes.clone());
            }
        }
        let mut next = self.clone();
        next.documents.insert(document.id.clone(), document);
        Ok(next)
    }

    /// The stored kind of a fragment; aliases never appear here.
    pub fn fragment_kind_of(&self, id: &Id) -> Result<FragmentKind, ModelError> {
        self.fragments
            .get(id)
            .map(|f| f.kind)
            .ok_or_else(|| ModelError::UnknownFragment { id: id.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(s: &str) -> Id {
        Id::new(s).unwrap()
    }

    fn key(s: &str) -> BibKey {
        BibKey::new(s).unwrap()
    }

    fn two_value_dimension(dim_id: &str) -> CharacterizationDimension {
        CharacterizationDimension {
            id: id(dim_id),
            name: dim_id.to_owned(),
            class: DimensionClass::What,
            values: vec![
                DimensionValue {
                    id: id("a"),
                    label: "A".into(),
                    description: String::new(),
                },
                DimensionValue {
                    id: id("b"),
                    label: "B".into(),
                    description: String::new(),
                },
            ],
            method: CharacterizationMethod {
                text: "pick one".into(),
                cites: vec![],
            },
            mandatory_for: BTreeSet::new(),
            multi_valued: false,
        }
    }

    #[test]
    fn id_rules() {
        assert!(Id::new("zachman").is_ok());
        assert!(Id::new("a-1-b").is_ok());
        assert!(Id::new("9lives").is_ok());
        assert!(Id::new("").is_err());
        assert!(Id::new("-leading").is_err());
        assert!(Id::new("Upper").is_err());
        assert!(Id::new("with space").is_err());
        assert!(Id::new("x".repeat(64)).is_ok());
        assert!(Id::new("x".repeat(65)).is_err());
    }

    #[test]
    fn bibkey_rules() {
        assert!(BibKey::new("2001-Halpin-ORM").is_ok());
        assert!(BibKey::new("a:b/c.d+e_f").is_ok());
        assert!(BibKey::new("").is_err());
        assert!(BibKey::new("-x").is_err());
        assert!(BibKey::new("has space").is_err());
    }

    #[test]
    fn kind_aliases_normalize() {
        assert_eq!(
            "approach".parse::<FragmentKind>().unwrap(),
            FragmentKind::WayOfWorking
        );
        assert_eq!(
            "technique".parse::<FragmentKind>().unwrap(),
            FragmentKind::WayOfModeling
        );
        assert_eq!(FragmentKind::WayOfModeling.slug(), "way-of-modeling");
        assert!("recipe".parse::<FragmentKind>().is_err());
    }

    #[test]
    fn add_fragment_stores_and_rejects_duplicates() {
        let lib = Library::new();
        let zachman = MethodFragment::new(
            id("zachman"),
            FragmentKind::ViewingFramework,
            "Zachman framework",
        );
        let lib = lib.add_fragment(zachman.clone()).unwrap();
        assert!(lib.fragment(&id("zachman")).is_some());
        assert!(matches!(
            lib.add_fragment(zachman),
            Err(ModelError::DuplicateId {
                namespace: "fragment",
                ..
            })
        ));
    }

    #[test]
    fn every_update_operation_is_pure() {
        // Each operation returns a new value; the receiver must compare
        // equal to its pre-call state, on success and on failure alike.
        let lib = Library::seeded()
            .add_fragment(MethodFragment::new(
                id("orm"),
                FragmentKind::WayOfModeling,
                "ORM",
            ))
            .unwrap();
        let before = lib.clone();

        let _ = lib.add_fragment(MethodFragment::new(id("uml"), FragmentKind::WayOfModeling, "UML"));
        let _ = lib.add_fragment(MethodFragment::new(id("orm"), FragmentKind::Model, "dup"));
        let _ = lib.add_dimension(two_value_dimension("extra"));
        let _ = lib.attach_property(
            &id("orm"),
            CharacterizationProperty {
                dimension: id("semantic-force"),
                value: id("mixed"),
                modality: Modality::Suitable,
                motivation: Motivation::new("m"),
            },
        );
        let _ = lib.attach_property(
            &id("orm"),
            CharacterizationProperty {
                dimension: id("nowhere"),
                value: id("nothing"),
                modality: Modality::Suitable,
                motivation: Motivation::new("m"),
            },
        );
        let _ = lib.add_document(DocumentRecord {
            id: id("orm-desc"),
            kind: DocumentKind::Description,
            target: Some(id("orm")),
            bibkey: key("2001-Halpin-ORM"),
            content_path: None,
            precedes: None,
        });
        let _ = lib.fragment_kind_of(&id("orm"));

        assert_eq!(lib, before);
    }

    #[test]
    fn relation_required_exactly_for_model_relations() {
        let lib = Library::new();
        let bare = MethodFragment::new(id("r1"), FragmentKind::ModelRelation, "r1");
        assert!(matches!(
            lib.add_fragment(bare),
            Err(ModelError::KindFieldMismatch { .. })
        ));
        let misplaced =
            MethodFragment::new(id("m1"), FragmentKind::Model, "m1").with_relation(RelationLink {
                from: id("a"),
                to: id("b"),
                relation_type: id("t"),
            });
        assert!(matches!(
            lib.add_fragment(misplaced),
            Err(ModelError::KindFieldMismatch { .. })
        ));
    }

    #[test]
    fn partial_only_for_models_and_views() {
        let lib = Library::new();
        let bad = MethodFragment::new(id("vp"), FragmentKind::Viewpoint, "vp").with_partial(true);
        assert!(matches!(
            lib.add_fragment(bad),
            Err(ModelError::KindFieldMismatch { .. })
        ));
        // Models and views default to partial = false.
        let lib = lib
            .add_fragment(MethodFragment::new(id("m"), FragmentKind::Model, "m"))
            .unwrap();
        assert_eq!(lib.fragment(&id("m")).unwrap().partial, Some(false));
        assert!(!lib.fragment(&id("m")).unwrap().is_partial());
    }

    #[test]
    fn comprises_only_for_container_kinds() {
        let lib = Library::new();
        let bad =
            MethodFragment::new(id("m"), FragmentKind::Model, "m").with_comprises(vec![id("x")]);
        assert!(matches!(
            lib.add_fragment(bad),
            Err(ModelError::KindFieldMismatch { .. })
        ));
        let ok = MethodFragment::new(id("vp"), FragmentKind::Viewpoint, "vp")
            .with_comprises(vec![id("x")]);
        assert!(lib.add_fragment(ok).is_ok());
    }

    #[test]
    fn dimension_invariants() {
        let lib = Library::new();
        let lib = lib
            .add_dimension(two_value_dimension("semantic-force"))
            .unwrap();
        assert!(matches!(
            lib.add_dimension(two_value_dimension("semantic-force")),
            Err(ModelError::DuplicateId {
                namespace: "dimension",
                ..
            })
        ));
        let mut one_value = two_value_dimension("other");
        one_value.values.truncate(1);
        assert!(matches!(
            lib.add_dimension(one_value),
            Err(ModelError::MalformedDimension { .. })
        ));
        let mut empty_method = two_value_dimension("third");
        empty_method.method.text = "  ".into();
        assert!(matches!(
            lib.add_dimension(empty_method),
            Err(ModelError::MalformedDimension { .. })
        ));
    }

    #[test]
    fn attach_property_happy_and_sad_paths() {
        let lib = Library::new()
            .add_dimension(two_value_dimension("dim"))
            .unwrap()
            .add_fragment(MethodFragment::new(
                id("zachman"),
                FragmentKind::ViewingFramework,
                "Zachman framework",
            ))
            .unwrap();
        let prop = CharacterizationProperty {
            dimension: id("dim"),
            value: id("a"),
            modality: Modality::Suitable,
            motivation: Motivation::new("communicates overviews to stakeholders"),
        };
        let lib2 = lib.attach_property(&id("zachman"), prop.clone()).unwrap();
        assert_eq!(lib2.fragment(&id("zachman")).unwrap().properties.len(), 1);

        assert!(matches!(
            lib.attach_property(&id("missing"), prop.clone()),
            Err(ModelError::UnknownFragment { .. })
        ));
        let mut bad_value = prop.clone();
        bad_value.value = id("persuading");
        assert!(matches!(
            lib.attach_property(&id("zachman"), bad_value),
            Err(ModelError::UnknownValue { .. })
        ));
        assert!(matches!(
            lib2.attach_property(&id("zachman"), prop),
            Err(ModelError::DuplicateProperty { .. })
        ));
    }

    #[test]
    fn property_order_is_append_only() {
        let mut lib = Library::new()
            .add_dimension(two_value_dimension("dim"))
            .unwrap()
            .add_fragment(MethodFragment::new(
                id("f"),
                FragmentKind::WayOfModeling,
                "f",
            ))
            .unwrap();
        for (value, modality) in [
            ("b", Modality::Suitable),
            ("a", Modality::Suitable),
            ("a", Modality::Intended),
        ] {
            lib = lib
                .attach_property(
                    &id("f"),
                    CharacterizationProperty {
                        dimension: id("dim"),
                        value: id(value),
                        modality,
                        motivation: Motivation::new("m"),
                    },
                )
                .unwrap();
        }
        let stored: Vec<_> = lib
            .fragment(&id("f"))
            .unwrap()
            .properties
            .iter()
            .map(|p| (p.value.as_str().to_owned(), p.modality))
            .collect();
        assert_eq!(
            stored,
            vec![
                ("b".to_owned(), Modality::Suitable),
                ("a".to_owned(), Modality::Suitable),
                ("a".to_owned(), Modality::Intended),
            ]
        );
    }

    #[test]
    fn document_target_rules() {
        let lib = Library::new()
            .add_fragment(MethodFragment::new(
                id("zachman"),
                FragmentKind::ViewingFramework,
                "Zachman framework",
            ))
            .unwrap();
        let doc = DocumentRecord {
            id: id("zachman-desc"),
            kind: DocumentKind::Description,
            target: Some(id("zachman")),
            bibkey: key("1987-Zachman-ISA"),
            content_path: None,
            precedes: None,
        };
        let lib = lib.add_document(doc).unwrap();
        assert!(lib.document(&id("zachman-desc")).is_some());

        let base_with_target = DocumentRecord {
            id: id("base-1"),
            kind: DocumentKind::Base,
            target: Some(id("zachman")),
            bibkey: key("1987-Zachman-ISA"),
            content_path: None,
            precedes: None,
        };
        assert!(matches!(
            lib.add_document(base_with_target),
            Err(ModelError::TargetForbidden { .. })
        ));

        let dangling = DocumentRecord {
            id: id("dangling"),
            kind: DocumentKind::Description,
            target: Some(id("nope")),
            bibkey: key("1987-Zachman-ISA"),
            content_path: None,
            precedes: None,
        };
        assert!(matches!(
            lib.add_document(dangling),
            Err(ModelError::UnknownTarget { .. })
        ));
    }

    #[test]
    fn precedence_cycles_are_rejected() {
        let lib = Library::new();
        let self_loop = DocumentRecord {
            id: id("d1"),
            kind: DocumentKind::Base,
            target: None,
            bibkey: key("K1"),
            content_path: None,
            precedes: Some(id("d1")),
        };
        assert!(matches!(
            lib.add_document(self_loop),
            Err(ModelError::PrecedenceCycle { .. })
        ));

        // A forward reference loaded from disk can complete a cycle.
        let mut lib = Library::new();
        lib.documents.insert(
            id("old"),
            DocumentRecord {
                id: id("old"),
                kind: DocumentKind::Base,
                target: None,
                bibkey: key("K1"),
                content_path: None,
                precedes: Some(id("new")),
            },
        );
        let closing = DocumentRecord {
            id: id("new"),
            kind: DocumentKind::Base,
            target: None,
            bibkey: key("K1"),
            content_path: None,
            precedes: Some(id("old")),
        };
        assert!(matches!(
            lib.add_document(closing),
            Err(ModelError::PrecedenceCycle { .. })
        ));
    }

    #[test]
    fn fragment_kind_lookup() {
        let lib = Library::new()
            .add_fragment(MethodFragment::new(
                id("zachman"),
                FragmentKind::ViewingFramework,
                "Zachman framework",
            ))
            .unwrap();
        assert_eq!(
            lib.fragment_kind_of(&id("zachman")).unwrap(),
            FragmentKind::ViewingFramework
        );
        assert!(matches!(
            lib.fragment_kind_of(&id("missing")),
            Err(ModelError::UnknownFragment { .. })
        ));
        // A fragment added under an alias kind reports the canonical kind.
        let lib = lib
            .add_fragment(MethodFragment::new(
                id("orm"),
                "technique".parse().unwrap(),
                "ORM",
            ))
            .unwrap();
        assert_eq!(
            lib.fragment_kind_of(&id("orm")).unwrap(),
            FragmentKind::WayOfModeling
        );
    }
}

//! Rule-based integrity validation.
//!
//! Fourteen rules (`E001`..`E013` plus the warning `W101`) are evaluated
//! over a whole library snapshot. Validation never fails and never mutates:
//! it returns a deterministic, sorted list of [`ValidationFinding`]s.
//!
//! A [`Profile`] adjusts severities only. The `bootstrap` profile downgrades
//! the three rules a freshly collected library is expected to violate —
//! missing descriptions, missing characterizations — to warnings, so early
//! curation can proceed while structural and referential rules stay hard
//! errors. Findings are never suppressed: the set of (code, subject) pairs
//! is identical across profiles.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::model::{BibKey, DocumentKind, FragmentKind, Id, Library, Modality};

/// Rule identifiers, in catalog order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[allow(clippy::upper_case_acronyms)]
pub enum RuleCode {
    E001,
    E002,
    E003,
    E004,
    E005,
    E006,
    E007,
    E008,
    E009,
    E010,
    E011,
    E012,
    E013,
    W101,
}

impl RuleCode {
    pub const ALL: [RuleCode; 14] = [
        RuleCode::E001,
        RuleCode::E002,
        RuleCode::E003,
        RuleCode::E004,
        RuleCode::E005,
        RuleCode::E006,
        RuleCode::E007,
        RuleCode::E008,
        RuleCode::E009,
        RuleCode::E010,
        RuleCode::E011,
        RuleCode::E012,
        RuleCode::E013,
        RuleCode::W101,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RuleCode::E001 => "E001",
            RuleCode::E002 => "E002",
            RuleCode::E003 => "E003",
            RuleCode::E004 => "E004",
            RuleCode::E005 => "E005",
            RuleCode::E006 => "E006",
            RuleCode::E007 => "E007",
            RuleCode::E008 => "E008",
            RuleCode::E009 => "E009",
            RuleCode::E010 => "E010",
            RuleCode::E011 => "E011",
            RuleCode::E012 => "E012",
            RuleCode::E013 => "E013",
            RuleCode::W101 => "W101",
        }
    }

    pub fn default_severity(&self) -> Severity {
        match self {
            RuleCode::W101 => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for RuleCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Severity profile applied to a validation run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Profile {
    /// Every rule at its default severity.
    #[default]
    Strict,
    /// E001, E008 and E011 reported as warnings instead of errors.
    Bootstrap,
}

impl Profile {
    pub fn name(&self) -> &'static str {
        match self {
            Profile::Strict => "strict",
            Profile::Bootstrap => "bootstrap",
        }
    }

    pub fn downgrades(&self) -> &'static [RuleCode] {
        match self {
            Profile::Strict => &[],
            Profile::Bootstrap => &[RuleCode::E001, RuleCode::E008, RuleCode::E011],
        }
    }

    pub fn severity_of(&self, code: RuleCode) -> Severity {
        if self.downgrades().contains(&code) {
            Severity::Warning
        } else {
            code.default_severity()
        }
    }
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Profile::Strict),
            "bootstrap" => Ok(Profile::Bootstrap),
            other => Err(format!(
                "unknown profile {other:?} (expected 'strict' or 'bootstrap')"
            )),
        }
    }
}

/// One reported rule violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationFinding {
    pub code: RuleCode,
    pub severity: Severity,
    /// The offending record id, cited key, or `fragment/dimension` pair.
    pub subject: String,
    pub message: String,
}

/// Catalog entry: code, default severity, and a one-line description.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleInfo {
    pub code: RuleCode,
    pub default_severity: Severity,
    pub description: &'static str,
}

/// The full rule catalog in code order.
pub fn rule_catalog() -> Vec<RuleInfo> {
    fn info(code: RuleCode, description: &'static str) -> RuleInfo {
        RuleInfo {
            code,
            default_severity: code.default_severity(),
            description,
        }
    }
    vec![
        info(
            RuleCode::E001,
            "every method fragment has at least one description document",
        ),
        info(
            RuleCode::E002,
            "every dimension has at least one dimension-description document",
        ),
        info(RuleCode::E003, "document precedence chains are acyclic"),
        info(
            RuleCode::E004,
            "every characterization property carries a non-empty motivation",
        ),
        info(
            RuleCode::E005,
            "every cited bibliography key resolves to a publication",
        ),
        info(
            RuleCode::E006,
            "every property value belongs to the value set of its dimension",
        ),
        info(
            RuleCode::E007,
            "every dimension is mandatory for at least one fragment kind",
        ),
        info(
            RuleCode::E008,
            "every fragment carries every dimension mandatory for its kind",
        ),
        info(
            RuleCode::E009,
            "a view containing a partial model is itself partial",
        ),
        info(
            RuleCode::E010,
            "model-relation endpoints exist, are models, and use a registered relation type",
        ),
        info(
            RuleCode::E011,
            "every method fragment carries at least one characterization property",
        ),
        info(
            RuleCode::E012,
            "every viewpoint comprises at least one technique",
        ),
        info(
            RuleCode::E013,
            "every dimension has a non-empty characterization method",
        ),
        info(
            RuleCode::W101,
            "intended values are expected to be a subset of suitable values",
        ),
    ]
}

/// Runs every rule and returns the findings sorted by (code, subject,
/// message), with `profile` severities applied.
pub fn validate(lib: &Library, profile: Profile) -> Vec<ValidationFinding> {
    let mut findings = Vec::new();
    rule_e001(lib, &mut findings);
    rule_e002(lib, &mut findings);
    rule_e003(lib, &mut findings);
    rule_e004(lib, &mut findings);
    rule_e005(lib, &mut findings);
    rule_e006(lib, &mut findings);
    rule_e007(lib, &mut findings);
    rule_e008(lib, &mut findings);
    rule_e009(lib, &mut findings);
    rule_e010(lib, &mut findings);
    rule_e011(lib, &mut findings);
    rule_e012(lib, &mut findings);
    rule_e013(lib, &mut findings);
    rule_w101(lib, &mut findings);
    for finding in &mut findings {
        finding.severity = profile.severity_of(finding.code);
    }
    sort_findings(&mut findings);
    findings
}

/// E009 only: partiality propagation from models to containing views.
/// Always a subset of [`validate`] output.
pub fn check_partiality(lib: &Library) -> Vec<ValidationFinding> {
    let mut findings = Vec::new();
    rule_e009(lib, &mut findings);
    sort_findings(&mut findings);
    findings
}

fn sort_findings(findings: &mut [ValidationFinding]) {
    findings
        .sort_by(|a, b| (a.code, &a.subject, &a.message).cmp(&(b.code, &b.subject, &b.message)));
}

fn finding(code: RuleCode, subject: impl Into<String>, message: String) -> ValidationFinding {
    ValidationFinding {
        code,
        severity: code.default_severity(),
        subject: subject.into(),
        message,
    }
}

fn rule_e001(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for fragment in lib.fragments.values() {
        let described = lib.documents.values().any(|d| {
            d.kind == DocumentKind::Description && d.target.as_ref() == Some(&fragment.id)
        });
        if !described {
            out.push(finding(
                RuleCode::E001,
                fragment.id.as_str(),
                format!(
                    "method fragment '{}' has no description document",
                    fragment.name
                ),
            ));
        }
    }
}

fn rule_e002(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for dimension in lib.dimensions.values() {
        let described = lib.documents.values().any(|d| {
            d.kind == DocumentKind::DimensionDescription && d.target.as_ref() == Some(&dimension.id)
        });
        if !described {
            out.push(finding(
                RuleCode::E002,
                dimension.id.as_str(),
                format!(
                    "dimension '{}' has no dimension-description document",
                    dimension.name
                ),
            ));
        }
    }
}

fn rule_e003(lib: &Library, out: &mut Vec<ValidationFinding>) {
    // A document is reported when following `precedes` from it leads back
    // to itself. Chains that merely dangle terminate and are fine.
    for start in lib.documents.values() {
        let mut current = start.precedes.clone();
        let mut steps = 0usize;
        while let Some(id) = current {
            if id == start.id {
                out.push(finding(
                    RuleCode::E003,
                    start.id.as_str(),
                    format!("document '{}' is part of a precedence cycle", start.id),
                ));
                break;
            }
            steps += 1;
            if steps > lib.documents.len() {
                break;
            }
            current = lib.documents.get(&id).and_then(|d| d.precedes.clone());
        }
    }
}

fn rule_e004(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for fragment in lib.fragments.values() {
        for property in &fragment.properties {
            if property.motivation.text.trim().is_empty() {
                out.push(finding(
                    RuleCode::E004,
                    fragment.id.as_str(),
                    format!(
                        "property {}:{}={} has an empty motivation",
                        property.modality, property.dimension, property.value
                    ),
                ));
            }
        }
    }
}

fn rule_e005(lib: &Library, out: &mut Vec<ValidationFinding>) {
    // Citation sites checked here: motivations and document bibkeys.
    // Characterization-method citations are collected by
    // `bibliography::referenced_keys` but deliberately not flagged, so that
    // a freshly seeded library (whose method texts cite literature the
    // bibliography does not hold yet) starts out usable.
    let mut sites: BTreeMap<BibKey, BTreeSet<String>> = BTreeMap::new();
    for fragment in lib.fragments.values() {
        for property in &fragment.properties {
            for key in &property.motivation.cites {
                sites
                    .entry(key.clone())
                    .or_default()
                    .insert(format!("fragment '{}'", fragment.id));
            }
        }
    }
    for document in lib.documents.values() {
        sites
            .entry(document.bibkey.clone())
            .or_default()
            .insert(format!("document '{}'", document.id));
    }
    for (key, citing) in sites {
        if !lib.bibliography.contains_key(&key) {
            let citing = citing.into_iter().collect::<Vec<_>>().join(", ");
            out.push(finding(
                RuleCode::E005,
                key.as_str(),
                format!("cited key '{key}' is not in the bibliography (cited by {citing})"),
            ));
        }
    }
}

fn rule_e006(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for fragment in lib.fragments.values() {
        for property in &fragment.properties {
            match lib.dimensions.get(&property.dimension) {
                None => out.push(finding(
                    RuleCode::E006,
                    fragment.id.as_str(),
                    format!(
                        "property references unknown dimension '{}'",
                        property.dimension
                    ),
                )),
                Some(dimension) if !dimension.has_value(&property.value) => out.push(finding(
                    RuleCode::E006,
                    fragment.id.as_str(),
                    format!(
                        "value '{}' is not part of dimension '{}'",
                        property.value, property.dimension
                    ),
                )),
                Some(_) => {}
            }
        }
    }
}

fn rule_e007(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for dimension in lib.dimensions.values() {
        if dimension.mandatory_for.is_empty() {
            out.push(finding(
                RuleCode::E007,
                dimension.id.as_str(),
                format!(
                    "dimension '{}' is mandatory for no fragment kind",
                    dimension.id
                ),
            ));
        }
    }
}

fn rule_e008(lib: &Library, out: &mut Vec<ValidationFinding>) {
    // One finding per missing (fragment, dimension) pair keeps coverage
    // reports actionable.
    for fragment in lib.fragments.values() {
        for dimension in lib.dimensions.values() {
            if !dimension.mandatory_for.contains(&fragment.kind) {
                continue;
            }
            let characterized = fragment
                .properties
                .iter()
                .any(|p| p.dimension == dimension.id);
            if !characterized {
                out.push(finding(
                    RuleCode::E008,
                    format!("{}/{}", fragment.id, dimension.id),
                    format!(
                        "fragment '{}' (kind {}) lacks mandatory dimension '{}'",
                        fragment.id, fragment.kind, dimension.id
                    ),
                ));
            }
        }
    }
}

fn rule_e009(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for view in lib.fragments.values() {
        if view.kind != FragmentKind::View || view.is_partial() {
            continue;
        }
        let partial_models: Vec<&str> = view
            .comprises
            .iter()
            .filter_map(|id| lib.fragments.get(id))
            .filter(|f| f.kind == FragmentKind::Model && f.is_partial())
            .map(|f| f.id.as_str())
            .collect();
        if !partial_models.is_empty() {
            out.push(finding(
                RuleCode::E009,
                view.id.as_str(),
                format!(
                    "view '{}' contains partial model(s) {} but is not marked partial",
                    view.id,
                    partial_models.join(", ")
                ),
            ));
        }
    }
}

fn rule_e010(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for fragment in lib.fragments.values() {
        if fragment.kind != FragmentKind::ModelRelation {
            continue;
        }
        let Some(relation) = &fragment.relation else {
            continue; // unreachable for well-formed records
        };
        let mut check_endpoint = |label: &str, id: &Id| {
            match lib.fragments.get(id) {
            None => out.push(finding(
                RuleCode::E010,
                fragment.id.as_str(),
                format!("relation endpoint '{label}' references missing fragment '{id}'"),
            )),
            Some(f) if f.kind != FragmentKind::Model => out.push(finding(
                RuleCode::E010,
                fragment.id.as_str(),
                format!(
                    "relation endpoint '{label}' references '{id}', which is a {} rather than a model",
                    f.kind
                ),
            )),
            Some(_) => {}
        }
        };
        check_endpoint("from", &relation.from);
        check_endpoint("to", &relation.to);
        match lib.fragments.get(&relation.relation_type) {
            None => out.push(finding(
                RuleCode::E010,
                fragment.id.as_str(),
                format!(
                    "relation type '{}' is not a registered fragment",
                    relation.relation_type
                ),
            )),
            Some(f) if f.kind != FragmentKind::ModelRelationType => out.push(finding(
                RuleCode::E010,
                fragment.id.as_str(),
                format!(
                    "relation type '{}' is a {} rather than a model-relation-type",
                    relation.relation_type, f.kind
                ),
            )),
            Some(_) => {}
        }
    }
}

fn rule_e011(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for fragment in lib.fragments.values() {
        if fragment.properties.is_empty() {
            out.push(finding(
                RuleCode::E011,
                fragment.id.as_str(),
                format!(
                    "fragment '{}' has no characterization properties",
                    fragment.id
                ),
            ));
        }
    }
}

fn rule_e012(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for viewpoint in lib.fragments.values() {
        if viewpoint.kind != FragmentKind::Viewpoint {
            continue;
        }
        let techniques = viewpoint
            .comprises
            .iter()
            .filter_map(|id| lib.fragments.get(id))
            .filter(|f| f.kind == FragmentKind::WayOfModeling)
            .count();
        if techniques == 0 {
            out.push(finding(
                RuleCode::E012,
                viewpoint.id.as_str(),
                format!("viewpoint '{}' comprises no technique", viewpoint.id),
            ));
        }
    }
}

fn rule_e013(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for dimension in lib.dimensions.values() {
        if dimension.method.text.trim().is_empty() {
            out.push(finding(
                RuleCode::E013,
                dimension.id.as_str(),
                format!(
                    "dimension '{}' has an empty characterization method",
                    dimension.id
                ),
            ));
        }
    }
}

fn rule_w101(lib: &Library, out: &mut Vec<ValidationFinding>) {
    for fragment in lib.fragments.values() {
        let mut intended: BTreeMap<&Id, BTreeSet<&Id>> = BTreeMap::new();
        let mut suitable: BTreeMap<&Id, BTreeSet<&Id>> = BTreeMap::new();
        for property in &fragment.properties {
            let bucket = match property.modality {
                Modality::Intended => &mut intended,
                Modality::Suitable => &mut suitable,
            };
            bucket
                .entry(&property.dimension)
                .or_default()
                .insert(&property.value);
        }
        for (dimension, intended_values) in intended {
            let suitable_values = suitable.get(dimension);
            let uncovered: Vec<&str> = intended_values
                .iter()
                .filter(|v| suitable_values.is_none_or(|s| !s.contains(*v)))
                .map(|v| v.as_str())
                .collect();
            if !uncovered.is_empty() {
                out.push(finding(
                    RuleCode::W101,
                    format!("{}/{}", fragment.id, dimension),
                    format!(
                        "intended value(s) {} of dimension '{}' are not also marked suitable",
                        uncovered.join(", "),
                        dimension
                    ),
                ));
            }
        }
    }
}

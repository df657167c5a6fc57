//! The shipped classification scheme: twenty characterization dimensions
//! grouped into the three classes *why*, *what*, and *how*.
//!
//! The seed is pure data. After `init` writes it to a library root it can be
//! edited like any other dimension record; nothing in the engine depends on
//! the seed staying intact.

use std::collections::BTreeSet;

use crate::model::{
    BibKey, CharacterizationDimension, CharacterizationMethod, DimensionClass, DimensionValue,
    FragmentKind, Id, ModelError,
};

/// The seeded dimensions, in presentation order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedSet {
    pub dimensions: Vec<CharacterizationDimension>,
}

impl SeedSet {
    /// Ids of the seeded dimensions of one class, in seed order.
    pub fn dimensions_of_class(&self, class: DimensionClass) -> Vec<Id> {
        self.dimensions
            .iter()
            .filter(|d| d.class == class)
            .map(|d| d.id.clone())
            .collect()
    }
}

/// Looks up a value record of a dimension by exact (lowercase) id.
pub fn lookup_value<'a>(
    dimension: &'a CharacterizationDimension,
    value: &Id,
) -> Result<&'a DimensionValue, ModelError> {
    dimension
        .value(value)
        .ok_or_else(|| ModelError::UnknownValue {
            dimension: dimension.id.clone(),
            value: value.clone(),
        })
}

fn id(s: &str) -> Id {
    Id::new(s).expect("seed id is a valid slug")
}

fn keys(keys: &[&str]) -> Vec<BibKey> {
    keys.iter()
        .map(|k| BibKey::new(*k).expect("seed citation key is valid"))
        .collect()
}

fn values(entries: &[(&str, &str, &str)]) -> Vec<DimensionValue> {
    entries
        .iter()
        .map(|(vid, label, description)| DimensionValue {
            id: id(vid),
            label: (*label).to_owned(),
            description: (*description).to_owned(),
        })
        .collect()
}

/// Dimensions every fragment must be characterized on, regardless of kind.
const BASELINE_DIMENSIONS: [&str; 3] =
    ["modeling-purpose", "semantic-force", "type-of-information"];

fn dim(
    dim_id: &str,
    name: &str,
    class: DimensionClass,
    vals: Vec<DimensionValue>,
    method_text: &str,
    method_cites: &[&str],
    multi_valued: bool,
) -> CharacterizationDimension {
    // Techniques are the central fragments of a library: every seeded
    // dimension applies to them. The three baseline dimensions apply to
    // every kind. Curators can override this per dimension file.
    let mandatory_for: BTreeSet<FragmentKind> = if BASELINE_DIMENSIONS.contains(&dim_id) {
        FragmentKind::ALL.into_iter().collect()
    } else {
        [FragmentKind::WayOfModeling].into_iter().collect()
    };
    CharacterizationDimension {
        id: id(dim_id),
        name: name.to_owned(),
        class,
        values: vals,
        method: CharacterizationMethod {
            text: method_text.to_owned(),
            cites: keys(method_cites),
        },
        mandatory_for,
        multi_valued,
    }
}

const ISPL: [&str; 2] = ["1999-Franckson-ISPL-Deliverables", "1999-Proper-ISPL-LSM"];

/// Builds the seed. Deterministic: two calls return structurally equal sets.
pub fn seed_taxonomy() -> SeedSet {
    let dimensions = vec![
        // -- Why the model is produced -----------------------------------------
        dim(
            "modeling-purpose",
            "Modeling purpose",
            DimensionClass::Why,
            values(&[
                (
                    "designing",
                    "Designing",
                    "Supports designers while working from first sketches toward a detailed design.",
                ),
                (
                    "deciding",
                    "Deciding",
                    "Gives decision makers insight into a domain and the impact of design choices.",
                ),
                (
                    "informing",
                    "Informing",
                    "Informs stakeholders about the modeled domain to build understanding and commitment.",
                ),
            ]),
            "Examine what the produced models are used for in practice and pick the purposes \
             that dominate: supporting design work, supporting decisions, or informing stakeholders.",
            &["2005-Lankhorst-ArchiMate"],
            false,
        ),
        dim(
            "design-chain",
            "Design chain",
            DimensionClass::Why,
            values(&[
                (
                    "system-purpose",
                    "System purpose",
                    "Answers why the work system is needed.",
                ),
                (
                    "system-functionality",
                    "System functionality",
                    "Answers what functionality the system offers its environment.",
                ),
                (
                    "system-design",
                    "System design",
                    "Answers how the functionality is to be realized.",
                ),
                (
                    "system-quality",
                    "System quality",
                    "Answers how well the system should perform its functions.",
                ),
                (
                    "system-costs",
                    "System costs",
                    "Answers what building and operating the system may cost.",
                ),
            ]),
            "Locate the question the produced models answer along the chain from why a system \
             should exist down to what it may cost, and select the matching stage.",
            &["2005-Proper-CommunicatingArchitecture"],
            false,
        ),
        dim(
            "intended-audience",
            "Intended audience",
            DimensionClass::Why,
            values(&[
                (
                    "actor-in-future-system",
                    "Actor in future system",
                    "Human actors who will work inside the future system.",
                ),
                ("sponsor", "Sponsor", "Sponsors funding the system or its development."),
                ("designer", "Designer", "Designers shaping the system."),
                (
                    "analyst",
                    "Analyst",
                    "Analysts studying the domain the system will operate in.",
                ),
                ("engineer", "Engineer", "Engineers building the actual system."),
            ]),
            "Identify the audiences the produced models address and select each group the \
             fragment deliberately serves.",
            &["2003-Greefhorst-Frameworks"],
            false,
        ),

        // -- What the model is focussing on ------------------------------------
        dim(
            "semantic-force",
            "Semantic force",
            DimensionClass::What,
            values(&[
                (
                    "prescriptive",
                    "Prescriptive",
                    "Binds later design work: future designs must conform to the model.",
                ),
                (
                    "descriptive",
                    "Descriptive",
                    "Records a domain as it is, without constraining later designs.",
                ),
                (
                    "mixed",
                    "Mixed",
                    "Combines prescriptive and descriptive statements in one model.",
                ),
            ]),
            "Decide whether the produced models constrain future designs, describe an existing \
             domain, or do both.",
            &[],
            false,
        ),
        dim(
            "nature-of-information",
            "Nature of information",
            DimensionClass::What,
            values(&[
                ("policy", "Policy", "Statements of policy that apply to the system."),
                (
                    "principles",
                    "Principles",
                    "Principles the system design is expected to honor.",
                ),
                (
                    "guidelines",
                    "Guidelines",
                    "Concrete guidelines that operationalize the principles.",
                ),
                (
                    "descriptions",
                    "Descriptions",
                    "Accounts of what the current or future system looks like.",
                ),
                (
                    "standards",
                    "Standards",
                    "Standards adopted for the system's design and construction.",
                ),
            ]),
            "Classify the content of the produced models as policy, principles, guidelines, \
             descriptions, or standards.",
            &["2003-Greefhorst-Frameworks"],
            false,
        ),
        dim(
            "type-of-information",
            "Type of information",
            DimensionClass::What,
            values(&[
                ("business", "Business", "Markets, products, business models."),
                (
                    "organization",
                    "Organization",
                    "Work processes, structures, culture, and skills.",
                ),
                (
                    "information",
                    "Information",
                    "Information and knowledge domains the business activities need.",
                ),
                ("application", "Application", "Automated support for the work."),
                (
                    "infrastructure",
                    "Infrastructure",
                    "The technical infrastructure underneath.",
                ),
            ]),
            "Determine which layers of a work system the produced models talk about, from \
             business concerns down to technical infrastructure.",
            &["1993-Tapscott-ParadigmShift", "2005-Lankhorst-ArchiMate"],
            false,
        ),
        dim(
            "systemic-scope",
            "Systemic scope",
            DimensionClass::What,
            values(&[
                ("use-case", "Use case", "A single use case of the work system."),
                (
                    "system-component",
                    "System component",
                    "One distinct component of a work system.",
                ),
                ("system", "System", "A whole work system with its direct environment."),
                (
                    "system-of-systems",
                    "System of systems",
                    "A set of cooperating work systems.",
                ),
            ]),
            "Gauge how much of a work system a produced model covers, from a single use case \
             up to a system of systems.",
            &[],
            false,
        ),
        dim(
            "temporal-scope",
            "Temporal scope",
            DimensionClass::What,
            values(&[
                (
                    "operational",
                    "Operational",
                    "The system as it runs today or in the near term.",
                ),
                (
                    "tactical",
                    "Tactical",
                    "The system as intended after one development project.",
                ),
                (
                    "strategical",
                    "Strategical",
                    "The system as intended after a whole program of projects.",
                ),
            ]),
            "Establish the planning horizon of the modeled system: current operation, the \
             outcome of one project, or the outcome of a program of projects.",
            &[],
            false,
        ),
        dim(
            "implementation-abstraction",
            "Implementation abstraction",
            DimensionClass::What,
            values(&[
                (
                    "computing-independent",
                    "Computing independent",
                    "Ignores whether activities are computerized at all.",
                ),
                (
                    "platform-independent",
                    "Platform independent",
                    "Assumes computerization but no specific platform.",
                ),
                (
                    "platform-specific",
                    "Platform specific",
                    "Tied to a concrete technological platform.",
                ),
            ]),
            "Judge how far the produced models abstract from information technology choices.",
            &[],
            false,
        ),
        dim(
            "systemic-aggregation",
            "Systemic aggregation",
            DimensionClass::What,
            values(&[
                ("detailed", "Detailed level", "All relevant detail is shown."),
                (
                    "coherence",
                    "Coherence level",
                    "Focuses on how different aspects hang together.",
                ),
                (
                    "overview",
                    "Overview level",
                    "Shows only the key issues of the domain.",
                ),
            ]),
            "Judge the level of aggregation the produced models work at: full detail, \
             coherence between aspects, or overview.",
            &["2005-Lankhorst-ArchiMate"],
            false,
        ),
        dim(
            "system-qualities",
            "System qualities",
            DimensionClass::What,
            values(&[
                (
                    "efficiency",
                    "Efficiency",
                    "Resource consumption relative to delivered performance.",
                ),
                (
                    "functionality",
                    "Functionality",
                    "Presence of functions meeting stated needs.",
                ),
                (
                    "reliability",
                    "Reliability",
                    "Ability to maintain performance under stated conditions.",
                ),
                (
                    "maintainability",
                    "Maintainability",
                    "Effort needed to apply changes.",
                ),
                ("portability", "Portability", "Ease of moving to other environments."),
                (
                    "usability",
                    "Usability",
                    "Effort users need to learn and operate the system.",
                ),
            ]),
            "Select the quality attributes the produced models are able to express or analyze.",
            &["1991-ISO-Quality", "1996-ISO-KSP"],
            false,
        ),
        dim(
            "system-realization",
            "System realization",
            DimensionClass::What,
            values(&[
                (
                    "using-system",
                    "Using system",
                    "How the environment will use the work system.",
                ),
                (
                    "supporting-system",
                    "Supporting system",
                    "How the work system provides its services.",
                ),
                (
                    "infrastructure-system",
                    "Infrastructure system",
                    "The facilities the work system itself relies on.",
                ),
            ]),
            "Identify whether the models address the using system, the supporting system, or \
             the infrastructure underneath it.",
            &[],
            false,
        ),
        dim(
            "actor-kinds",
            "Actor kinds",
            DimensionClass::What,
            values(&[
                (
                    "heterogenous",
                    "Heterogenous",
                    "Composite actors mixing people and machines.",
                ),
                ("human", "Human", "Human actors and their roles."),
                (
                    "computerised-intelligence",
                    "Computerised intelligence",
                    "Software agents showing intelligent behavior.",
                ),
                ("computerised", "Computerised", "Conventional software components."),
            ]),
            "Identify the kinds of actors inside the system that the models concentrate on.",
            &[],
            false,
        ),
        dim(
            "formality",
            "Level of formality",
            DimensionClass::What,
            values(&[
                (
                    "low",
                    "Low",
                    "Informal representations: natural language, sketches, animations.",
                ),
                (
                    "medium",
                    "Medium",
                    "Structured notations without a full formal semantics.",
                ),
                (
                    "high",
                    "High",
                    "Languages with a well-defined mathematical semantics.",
                ),
            ]),
            "Rate the degree of mathematical underpinning of the representation language the \
             fragment produces.",
            &ISPL,
            false,
        ),
        dim(
            "quantifiability",
            "Level of quantifiability",
            DimensionClass::What,
            values(&[
                (
                    "low",
                    "Low",
                    "Little of the artefact is expressed in measurable terms.",
                ),
                (
                    "medium",
                    "Medium",
                    "Key aspects carry quantities such as volume, effort, or time.",
                ),
                (
                    "high",
                    "High",
                    "Systematic quantification across the represented knowledge.",
                ),
            ]),
            "Rate how far the represented knowledge is quantified in terms of volume, \
             capacity, workload, effort, time, or similar measures.",
            &ISPL,
            false,
        ),
        dim(
            "executability",
            "Level of executability",
            DimensionClass::What,
            values(&[
                ("low", "Low", "The representation cannot be executed or simulated."),
                ("medium", "Medium", "Parts can be simulated or prototyped."),
                (
                    "high",
                    "High",
                    "Explicit enough for execution, up to fully operational behavior.",
                ),
            ]),
            "Rate whether representations can be executed: not at all, simulated or \
             prototyped, or run as operational behavior.",
            &ISPL,
            false,
        ),
        dim(
            "comprehensibility",
            "Level of comprehensibility",
            DimensionClass::What,
            values(&[
                ("low", "Low", "Hard for the intended audience to follow."),
                ("medium", "Medium", "Understandable with guidance or training."),
                ("high", "High", "Directly accessible to the intended audience."),
            ]),
            "Rate how well the intended audience can follow the representation without \
             outside help.",
            &ISPL,
            false,
        ),
        dim(
            "completeness",
            "Level of completeness",
            DimensionClass::What,
            values(&[
                ("low", "Low", "Covers its knowledge topic only fragmentarily."),
                ("medium", "Medium", "Covers the topic with known gaps."),
                ("high", "High", "Complete, or even overcomplete, for its topic."),
            ]),
            "Rate the coverage of the representation with respect to the knowledge topic it \
             intends to address.",
            &ISPL,
            false,
        ),

        // -- How the models are produced ---------------------------------------
        dim(
            "cognitive-approach",
            "Cognitive approach",
            DimensionClass::How,
            values(&[
                (
                    "analytical",
                    "Analytical",
                    "Abstraction and simplification are used to master complexity.",
                ),
                (
                    "experimental",
                    "Experimental",
                    "Experiments such as prototypes generate information that reduces uncertainty.",
                ),
            ]),
            "Determine how information is processed while models are produced; record both \
             values when analytical and experimental work are combined.",
            &ISPL,
            // The two approaches are routinely combined within one fragment.
            true,
        ),
        dim(
            "social-approach",
            "Social approach",
            DimensionClass::How,
            values(&[
                (
                    "expert-driven",
                    "Expert-driven",
                    "Experts draft descriptions from interviews and observation, then seek approval.",
                ),
                (
                    "participatory",
                    "Participatory",
                    "Descriptions are produced together with the business actors, e.g. in workshops.",
                ),
            ]),
            "Determine how project actors involve the business actors while the models are \
             being produced.",
            &ISPL,
            false,
        ),
    ];

    SeedSet { dimensions }
}

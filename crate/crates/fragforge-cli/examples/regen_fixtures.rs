//! Regenerates the rule-corpus fixtures under `tests/fixtures/rules/`.
//!
//! Each rule code gets a pair of minimal library trees: `broken` triggers
//! exactly that rule (asserted below before anything is written), and
//! `repaired` is the same library with the defect fixed, validating clean
//! under the strict profile.
//!
//! Run from the workspace root after changing the store format or the
//! rules: `cargo run -p fragforge-cli --example regen_fixtures`

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use fragforge::bibliography::Publication;
use fragforge::constraints::{validate, Profile, RuleCode};
use fragforge::model::{
    BibKey, CharacterizationDimension, CharacterizationMethod, CharacterizationProperty,
    DimensionClass, DimensionValue, DocumentKind, DocumentRecord, FragmentKind, Id, Library,
    MethodFragment, Modality, Motivation, RelationLink,
};
use fragforge::store::save_library;

fn id(text: &str) -> Id {
    Id::new(text).unwrap()
}

fn key(text: &str) -> BibKey {
    BibKey::new(text).unwrap()
}

// Records are inserted directly: several fixtures are states the checked
// update operations refuse to produce, which is the whole point.

fn add_dimension(
    lib: &mut Library,
    dim_id: &str,
    values: &[&str],
    mandatory: &[FragmentKind],
    method_text: &str,
) {
    let dimension = CharacterizationDimension {
        id: id(dim_id),
        name: dim_id.to_owned(),
        class: DimensionClass::What,
        values: values
            .iter()
            .map(|v| DimensionValue {
                id: id(v),
                label: v.to_owned().to_owned(),
                description: String::new(),
            })
            .collect(),
        method: CharacterizationMethod {
            text: method_text.to_owned(),
            cites: Vec::new(),
        },
        mandatory_for: mandatory.iter().copied().collect::<BTreeSet<_>>(),
        multi_valued: false,
    };
    lib.dimensions.insert(dimension.id.clone(), dimension);
}

fn add_fragment(lib: &mut Library, frag_id: &str, kind: FragmentKind) -> Id {
    let fragment = MethodFragment::new(id(frag_id), kind, frag_id).normalized();
    let fid = fragment.id.clone();
    lib.fragments.insert(fid.clone(), fragment);
    fid
}

fn add_property(
    lib: &mut Library,
    frag_id: &str,
    dim: &str,
    value: &str,
    modality: Modality,
    text: &str,
    cites: &[&str],
) {
    let property = CharacterizationProperty {
        dimension: id(dim),
        value: id(value),
        modality,
        motivation: Motivation::citing(text, cites.iter().map(|k| key(k)).collect()),
    };
    lib.fragments
        .get_mut(&id(frag_id))
        .expect("fragment exists")
        .properties
        .push(property);
}

fn add_document(
    lib: &mut Library,
    doc_id: &str,
    kind: DocumentKind,
    target: Option<&str>,
    bibkey: &str,
    precedes: Option<&str>,
) {
    let document = DocumentRecord {
        id: id(doc_id),
        kind,
        target: target.map(id),
        bibkey: key(bibkey),
        content_path: None,
        precedes: precedes.map(id),
    };
    lib.documents.insert(document.id.clone(), document);
}

fn add_publication(lib: &mut Library, bibkey: &str) {
    lib.bibliography.insert(
        key(bibkey),
        Publication::new(key(bibkey), "misc").with_field("title", bibkey),
    );
}

/// One dimension with its description document: validates clean on its own.
fn base() -> Library {
    let mut lib = Library::new();
    add_dimension(
        &mut lib,
        "force",
        &["prescriptive", "descriptive"],
        &[FragmentKind::WayOfModeling],
        "pick the binding nature of produced models",
    );
    add_publication(&mut lib, "Src-Force");
    add_document(
        &mut lib,
        "force-desc",
        DocumentKind::DimensionDescription,
        Some("force"),
        "Src-Force",
        None,
    );
    lib
}

/// `base` plus a fully described, characterized technique.
fn with_technique(lib: &mut Library) {
    add_fragment(lib, "orm", FragmentKind::WayOfModeling);
    add_property(
        lib,
        "orm",
        "force",
        "prescriptive",
        Modality::Suitable,
        "schemas constrain implementations",
        &[],
    );
    add_publication(lib, "Src-ORM");
    add_document(
        lib,
        "orm-desc",
        DocumentKind::Description,
        Some("orm"),
        "Src-ORM",
        None,
    );
}

fn described_fragment(lib: &mut Library, frag_id: &str, kind: FragmentKind) {
    add_fragment(lib, frag_id, kind);
    add_property(
        lib,
        frag_id,
        "force",
        "descriptive",
        Modality::Suitable,
        "records the domain",
        &[],
    );
    let doc_id = format!("{frag_id}-desc");
    add_document(
        lib,
        &doc_id,
        DocumentKind::Description,
        Some(frag_id),
        "Src-Force",
        None,
    );
}

struct Fixture {
    code: RuleCode,
    broken: Library,
    repaired: Library,
    expected: Vec<(&'static str, &'static str)>,
}

fn fixtures() -> Vec<Fixture> {
    let mut out = Vec::new();

    // E001: technique without its description document.
    let mut broken = base();
    with_technique(&mut broken);
    broken.documents.remove(&id("orm-desc"));
    let mut repaired = base();
    with_technique(&mut repaired);
    out.push(Fixture {
        code: RuleCode::E001,
        broken,
        repaired,
        expected: vec![("E001", "orm")],
    });

    // E002: dimension without its description document.
    let mut broken = base();
    broken.documents.remove(&id("force-desc"));
    out.push(Fixture {
        code: RuleCode::E002,
        broken,
        repaired: base(),
        expected: vec![("E002", "force")],
    });

    // E003: a document preceding itself.
    let mut broken = base();
    add_document(
        &mut broken,
        "loop-doc",
        DocumentKind::Base,
        None,
        "Src-Force",
        Some("loop-doc"),
    );
    let mut repaired = base();
    add_document(
        &mut repaired,
        "loop-doc",
        DocumentKind::Base,
        None,
        "Src-Force",
        Some("force-desc"),
    );
    out.push(Fixture {
        code: RuleCode::E003,
        broken,
        repaired,
        expected: vec![("E003", "loop-doc")],
    });

    // E004: property with an empty motivation.
    let mut broken = base();
    with_technique(&mut broken);
    broken.fragments.get_mut(&id("orm")).unwrap().properties[0]
        .motivation
        .text = String::new();
    let mut repaired = base();
    with_technique(&mut repaired);
    out.push(Fixture {
        code: RuleCode::E004,
        broken,
        repaired,
        expected: vec![("E004", "orm")],
    });

    // E005: motivation citing a key the bibliography does not hold.
    let mut broken = base();
    with_technique(&mut broken);
    broken.fragments.get_mut(&id("orm")).unwrap().properties[0]
        .motivation
        .cites = vec![key("Missing-Key")];
    let mut repaired = base();
    with_technique(&mut repaired);
    repaired.fragments.get_mut(&id("orm")).unwrap().properties[0]
        .motivation
        .cites = vec![key("Src-ORM")];
    out.push(Fixture {
        code: RuleCode::E005,
        broken,
        repaired,
        expected: vec![("E005", "Missing-Key")],
    });

    // E006: property value outside the dimension's value set.
    let mut broken = base();
    with_technique(&mut broken);
    broken.fragments.get_mut(&id("orm")).unwrap().properties[0].value = id("purple");
    let mut repaired = base();
    with_technique(&mut repaired);
    out.push(Fixture {
        code: RuleCode::E006,
        broken,
        repaired,
        expected: vec![("E006", "orm")],
    });

    // E007: dimension mandatory for no kind at all.
    let mut broken = base();
    add_dimension(
        &mut broken,
        "audience",
        &["designer", "analyst"],
        &[],
        "pick the audience served",
    );
    add_document(
        &mut broken,
        "audience-desc",
        DocumentKind::DimensionDescription,
        Some("audience"),
        "Src-Force",
        None,
    );
    let mut repaired = base();
    add_dimension(
        &mut repaired,
        "audience",
        &["designer", "analyst"],
        &[FragmentKind::WayOfModeling],
        "pick the audience served",
    );
    add_document(
        &mut repaired,
        "audience-desc",
        DocumentKind::DimensionDescription,
        Some("audience"),
        "Src-Force",
        None,
    );
    out.push(Fixture {
        code: RuleCode::E007,
        broken,
        repaired,
        expected: vec![("E007", "audience")],
    });

    // E008: technique missing a mandatory dimension.
    let mut broken = base();
    with_technique(&mut broken);
    add_dimension(
        &mut broken,
        "audience",
        &["designer", "analyst"],
        &[FragmentKind::WayOfModeling],
        "pick the audience served",
    );
    add_document(
        &mut broken,
        "audience-desc",
        DocumentKind::DimensionDescription,
        Some("audience"),
        "Src-Force",
        None,
    );
    let mut repaired = broken.clone();
    add_property(
        &mut repaired,
        "orm",
        "audience",
        "designer",
        Modality::Suitable,
        "aimed at schema designers",
        &[],
    );
    out.push(Fixture {
        code: RuleCode::E008,
        broken,
        repaired,
        expected: vec![("E008", "orm/audience")],
    });

    // E009: partial model inside a view not marked partial.
    let mut broken = base();
    described_fragment(&mut broken, "m1", FragmentKind::Model);
    broken.fragments.get_mut(&id("m1")).unwrap().partial = Some(true);
    described_fragment(&mut broken, "v1", FragmentKind::View);
    broken.fragments.get_mut(&id("v1")).unwrap().comprises = vec![id("m1")];
    let mut repaired = broken.clone();
    repaired.fragments.get_mut(&id("v1")).unwrap().partial = Some(true);
    out.push(Fixture {
        code: RuleCode::E009,
        broken,
        repaired,
        expected: vec![("E009", "v1")],
    });

    // E010: relation pointing at an unregistered relation type.
    let mut broken = base();
    described_fragment(&mut broken, "m1", FragmentKind::Model);
    described_fragment(&mut broken, "m2", FragmentKind::Model);
    described_fragment(&mut broken, "rel1", FragmentKind::ModelRelation);
    broken.fragments.get_mut(&id("rel1")).unwrap().relation = Some(RelationLink {
        from: id("m1"),
        to: id("m2"),
        relation_type: id("rt-refines"),
    });
    let mut repaired = broken.clone();
    described_fragment(&mut repaired, "rt-refines", FragmentKind::ModelRelationType);
    out.push(Fixture {
        code: RuleCode::E010,
        broken,
        repaired,
        expected: vec![("E010", "rel1")],
    });

    // E011: described fragment with zero properties.
    let mut broken = base();
    add_fragment(&mut broken, "think1", FragmentKind::WayOfThinking);
    add_document(
        &mut broken,
        "think1-desc",
        DocumentKind::Description,
        Some("think1"),
        "Src-Force",
        None,
    );
    let mut repaired = broken.clone();
    add_property(
        &mut repaired,
        "think1",
        "force",
        "descriptive",
        Modality::Suitable,
        "frames domains descriptively",
        &[],
    );
    out.push(Fixture {
        code: RuleCode::E011,
        broken,
        repaired,
        expected: vec![("E011", "think1")],
    });

    // E012: viewpoint comprising no technique.
    let mut broken = base();
    described_fragment(&mut broken, "vp1", FragmentKind::Viewpoint);
    let mut repaired = broken.clone();
    with_technique(&mut repaired);
    repaired.fragments.get_mut(&id("vp1")).unwrap().comprises = vec![id("orm")];
    out.push(Fixture {
        code: RuleCode::E012,
        broken,
        repaired,
        expected: vec![("E012", "vp1")],
    });

    // E013: dimension with an empty characterization method.
    let mut broken = base();
    add_dimension(
        &mut broken,
        "scope",
        &["use-case", "system"],
        &[FragmentKind::WayOfModeling],
        "",
    );
    add_document(
        &mut broken,
        "scope-desc",
        DocumentKind::DimensionDescription,
        Some("scope"),
        "Src-Force",
        None,
    );
    let mut repaired = broken.clone();
    repaired
        .dimensions
        .get_mut(&id("scope"))
        .unwrap()
        .method
        .text = "pick the covered scope".to_owned();
    out.push(Fixture {
        code: RuleCode::E013,
        broken,
        repaired,
        expected: vec![("E013", "scope")],
    });

    // W101: value intended for but not marked suitable.
    let mut broken = base();
    with_technique(&mut broken);
    broken.fragments.get_mut(&id("orm")).unwrap().properties[0].modality = Modality::Intended;
    let mut repaired = base();
    with_technique(&mut repaired);
    add_property(
        &mut repaired,
        "orm",
        "force",
        "prescriptive",
        Modality::Intended,
        "schemas constrain implementations",
        &[],
    );
    out.push(Fixture {
        code: RuleCode::W101,
        broken,
        repaired,
        expected: vec![("W101", "orm/force")],
    });

    out
}

fn check(lib: &Library, expected: &[(&str, &str)], label: &str) {
    let found: Vec<(String, String)> = validate(lib, Profile::Strict)
        .into_iter()
        .map(|f| (f.code.as_str().to_owned(), f.subject))
        .collect();
    let expected: Vec<(String, String)> = expected
        .iter()
        .map(|(c, s)| ((*c).to_owned(), (*s).to_owned()))
        .collect();
    assert_eq!(found, expected, "fixture {label} does not isolate its rule");
}

fn main() {
    let fixtures_root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/rules");
    let all = fixtures();
    assert_eq!(all.len(), 14, "one fixture pair per rule code");
    for fixture in all {
        let code = fixture.code.as_str().to_lowercase();
        check(
            &fixture.broken,
            &fixture.expected,
            &format!("{code}/broken"),
        );
        check(&fixture.repaired, &[], &format!("{code}/repaired"));
        let dir: PathBuf = fixtures_root.join(&code);
        save_library(&fixture.broken, &dir.join("broken")).unwrap();
        save_library(&fixture.repaired, &dir.join("repaired")).unwrap();
        println!("wrote {}", dir.display());
    }
}

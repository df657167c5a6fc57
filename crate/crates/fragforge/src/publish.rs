//! Static-HTML publishing: one page per fragment and dimension, an index
//! grouped by kind and class, and a bibliography page with per-key anchors.
//!
//! Output is plain HTML5 with no scripts, styled by a single stylesheet at
//! `_styles/main.css`. Rendering is a pure function of the library, so
//! publishing the same library twice produces byte-identical files. Links
//! are only emitted when their target page (or bibliography anchor) exists.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{DimensionClass, DocumentKind, FragmentKind, Id, Library, Modality};

#[derive(Debug, Error)]
pub enum PublishError {
    #[error("unknown fragment '{0}'")]
    UnknownFragment(Id),
    #[error("unknown dimension '{0}'")]
    UnknownDimension(Id),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// A rendered page: a path relative to the site root plus its HTML.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SitePage {
    pub path: String,
    pub html: String,
}

/// The default stylesheet shipped with every published site.
pub const STYLESHEET: &str = "\
body {
  font-family: Arial, sans-serif;
  max-width: 50rem;
  margin: 1rem auto;
  padding: 0 1rem;
  color: #222;
}
h1 { border-bottom: 2px solid #446; padding-bottom: 0.3rem; }
h2 { color: #446; margin-top: 1.4rem; }
p.kind { color: #666; font-style: italic; }
dl { margin-left: 1rem; }
dt { font-weight: bold; margin-top: 0.5rem; }
dd { margin-left: 1.5rem; }
table { border-collapse: collapse; }
th, td { border: 1px solid #bbb; padding: 0.25rem 0.6rem; text-align: left; }
a { color: #35a; }
";

fn escape_html(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

fn page_shell(title: &str, stylesheet_href: &str, body: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n\
         <title>{}</title>\n<link rel=\"stylesheet\" href=\"{}\" type=\"text/css\">\n\
         </head>\n<body>\n{}</body>\n</html>\n",
        escape_html(title),
        stylesheet_href,
        body
    )
}

/// A bibliography link (`bib.html#key`) if the key resolves, the escaped
/// key text otherwise. `prefix` is the page's path back to the site root.
fn cite_html(lib: &Library, key: &crate::model::BibKey, prefix: &str) -> String {
    if lib.bibliography.contains_key(key) {
        format!(
            "<a href=\"{prefix}bib.html#{}\">{}</a>",
            escape_html(key.as_str()),
            escape_html(key.as_str())
        )
    } else {
        escape_html(key.as_str())
    }
}

/// Renders the page of one fragment at `fragments/<id>.html`.
pub fn render_fragment_page(lib: &Library, id: &Id) -> Result<SitePage, PublishError> {
    let fragment = lib
        .fragments
        .get(id)
        .ok_or_else(|| PublishError::UnknownFragment(id.clone()))?;
    let mut body = String::new();
    let _ = writeln!(body, "<h1>{}</h1>", escape_html(&fragment.name));
    let partial_note = match fragment.partial {
        Some(true) => " (partial)",
        _ => "",
    };
    let _ = writeln!(
        body,
        "<p class=\"kind\">{}{partial_note}</p>",
        fragment.kind.label()
    );

    if !fragment.comprises.is_empty() {
        let _ = writeln!(body, "<h2>Comprises</h2>\n<ul>");
        for contained in &fragment.comprises {
            match lib.fragments.get(contained) {
                Some(other) => {
                    let _ = writeln!(
                        body,
                        "<li><a href=\"{}.html\">{}</a> ({})</li>",
                        escape_html(contained.as_str()),
                        escape_html(&other.name),
                        other.kind.label()
                    );
                }
                None => {
                    let _ = writeln!(body, "<li>{}</li>", escape_html(contained.as_str()));
                }
            }
        }
        let _ = writeln!(body, "</ul>");
    }

    if let Some(relation) = &fragment.relation {
        let link_or_text = |target: &Id| match lib.fragments.get(target) {
            Some(other) => format!(
                "<a href=\"{}.html\">{}</a>",
                escape_html(target.as_str()),
                escape_html(&other.name)
            ),
            None => escape_html(target.as_str()),
        };
        let _ = writeln!(
            body,
            "<h2>Relation</h2>\n<p>From {} to {}, of type {}.</p>",
            link_or_text(&relation.from),
            link_or_text(&relation.to),
            link_or_text(&relation.relation_type)
        );
    }

    let _ = writeln!(body, "<h2>Characterization</h2>");
    if fragment.properties.is_empty() {
        let _ = writeln!(body, "<p class=\"empty\">Not characterized yet.</p>");
    }
    for (modality, heading) in [
        (Modality::Intended, "Intended for"),
        (Modality::Suitable, "Suitable for"),
    ] {
        let group: Vec<_> = fragment
            .properties
            .iter()
            .filter(|p| p.modality == modality)
            .collect();
        if group.is_empty() {
            continue;
        }
        let _ = writeln!(body, "<h3>{heading}</h3>\n<dl>");
        for property in group {
            let dimension_html = match lib.dimensions.get(&property.dimension) {
                Some(dimension) => format!(
                    "<a href=\"../dimensions/{}.html\">{}</a>",
                    escape_html(property.dimension.as_str()),
                    escape_html(&dimension.name)
                ),
                None => escape_html(property.dimension.as_str()),
            };
            let value_html = lib
                .dimensions
                .get(&property.dimension)
                .and_then(|d| d.value(&property.value))
                .map(|v| escape_html(&v.label))
                .unwrap_or_else(|| escape_html(property.value.as_str()));
            let _ = writeln!(body, "<dt>{dimension_html} = {value_html}</dt>");
            let mut motivation = escape_html(&property.motivation.text);
            if !property.motivation.cites.is_empty() {
                let cites: Vec<String> = property
                    .motivation
                    .cites
                    .iter()
                    .map(|key| cite_html(lib, key, "../"))
                    .collect();
                let _ = write!(motivation, " [{}]", cites.join(", "));
            }
            let _ = writeln!(body, "<dd>{motivation}</dd>");
        }
        let _ = writeln!(body, "</dl>");
    }

    let documents: Vec<_> = lib
        .documents
        .values()
        .filter(|d| d.kind == DocumentKind::Description && d.target.as_ref() == Some(id))
        .collect();
    if !documents.is_empty() {
        let _ = writeln!(body, "<h2>Description documents</h2>\n<ul>");
        for document in documents {
            let mut line = format!(
                "<li>{} — {}",
                escape_html(document.id.as_str()),
                cite_html(lib, &document.bibkey, "../")
            );
            if let Some(older) = &document.precedes {
                let _ = write!(line, " (supersedes {})", escape_html(older.as_str()));
            }
            line.push_str("</li>");
            let _ = writeln!(body, "{line}");
        }
        let _ = writeln!(body, "</ul>");
    }

    Ok(SitePage {
        path: format!("fragments/{id}.html"),
        html: page_shell(&fragment.name, "../_styles/main.css", &body),
    })
}

/// Renders the page of one dimension at `dimensions/<id>.html`.
pub fn render_dimension_page(lib: &Library, id: &Id) -> Result<SitePage, PublishError> {
    let dimension = lib
        .dimensions
        .get(id)
        .ok_or_else(|| PublishError::UnknownDimension(id.clone()))?;
    let mut body = String::new();
    let _ = writeln!(body, "<h1>{}</h1>", escape_html(&dimension.name));
    let multi = if dimension.multi_valued {
        ", multi-valued"
    } else {
        ""
    };
    let _ = writeln!(
        body,
        "<p class=\"kind\">{}{multi}</p>",
        dimension.class.label()
    );

    let _ = writeln!(
        body,
        "<h2>Values</h2>\n<table>\n<tr><th>Id</th><th>Label</th><th>Description</th></tr>"
    );
    for value in &dimension.values {
        let _ = writeln!(
            body,
            "<tr><td>{}</td><td>{}</td><td>{}</td></tr>",
            escape_html(value.id.as_str()),
            escape_html(&value.label),
            escape_html(&value.description)
        );
    }
    let _ = writeln!(body, "</table>");

    let _ = writeln!(body, "<h2>Characterization method</h2>");
    let mut method = escape_html(&dimension.method.text);
    if !dimension.method.cites.is_empty() {
        let cites: Vec<String> = dimension
            .method
            .cites
            .iter()
            .map(|key| cite_html(lib, key, "../"))
            .collect();
        let _ = write!(method, " [{}]", cites.join(", "));
    }
    let _ = writeln!(body, "<p>{method}</p>");

    if !dimension.mandatory_for.is_empty() {
        let kinds: Vec<&str> = dimension.mandatory_for.iter().map(|k| k.label()).collect();
        let _ = writeln!(body, "<h2>Mandatory for</h2>\n<p>{}</p>", kinds.join(", "));
    }

    let documents: Vec<_> = lib
        .documents
        .values()
        .filter(|d| d.kind == DocumentKind::DimensionDescription && d.target.as_ref() == Some(id))
        .collect();
    if !documents.is_empty() {
        let _ = writeln!(body, "<h2>Description documents</h2>\n<ul>");
        for document in documents {
            let _ = writeln!(
                body,
                "<li>{} — {}</li>",
                escape_html(document.id.as_str()),
                cite_html(lib, &document.bibkey, "../")
            );
        }
        let _ = writeln!(body, "</ul>");
    }

    Ok(SitePage {
        path: format!("dimensions/{id}.html"),
        html: page_shell(&dimension.name, "../_styles/main.css", &body),
    })
}

/// Renders `index.html`: fragments grouped by kind, dimensions by class.
pub fn render_index(lib: &Library) -> SitePage {
    let mut body = String::new();
    let _ = writeln!(body, "<h1>Method fragment library</h1>");
    let _ = writeln!(
        body,
        "<p>{} fragment(s), {} dimension(s), {} publication(s).</p>",
        lib.fragments.len(),
        lib.dimensions.len(),
        lib.bibliography.len()
    );

    let _ = writeln!(body, "<h2>Method fragments</h2>");
    for kind in FragmentKind::ALL {
        let members: Vec<_> = lib.fragments.values().filter(|f| f.kind == kind).collect();
        if members.is_empty() {
            continue;
        }
        let _ = writeln!(body, "<h3>{}</h3>\n<ul>", kind.label());
        for fragment in members {
            let _ = writeln!(
                body,
                "<li><a href=\"fragments/{}.html\">{}</a></li>",
                escape_html(fragment.id.as_str()),
                escape_html(&fragment.name)
            );
        }
        let _ = writeln!(body, "</ul>");
    }

    let _ = writeln!(body, "<h2>Characterization dimensions</h2>");
    for class in DimensionClass::ALL {
        let members: Vec<_> = lib
            .dimensions
            .values()
            .filter(|d| d.class == class)
            .collect();
        if members.is_empty() {
            continue;
        }
        let _ = writeln!(body, "<h3>{}</h3>\n<ul>", class.label());
        for dimension in members {
            let _ = writeln!(
                body,
                "<li><a href=\"dimensions/{}.html\">{}</a></li>",
                escape_html(dimension.id.as_str()),
                escape_html(&dimension.name)
            );
        }
        let _ = writeln!(body, "</ul>");
    }

    let _ = writeln!(body, "<p><a href=\"bib.html\">Bibliography</a></p>");
    SitePage {
        path: "index.html".to_owned(),
        html: page_shell("Method fragment library", "_styles/main.css", &body),
    }
}

/// Renders `bib.html`: every publication, anchored by key.
pub fn render_bibliography(lib: &Library) -> SitePage {
    let mut body = String::new();
    let _ = writeln!(body, "<h1>Bibliography</h1>");
    for publication in lib.bibliography.values() {
        let key = escape_html(publication.key.as_str());
        let _ = writeln!(body, "<h2 id=\"{key}\">{key}</h2>");
        let _ = writeln!(
            body,
            "<p class=\"kind\">{}</p>",
            escape_html(&publication.entry_type)
        );
        if !publication.fields.is_empty() {
            let _ = writeln!(body, "<dl>");
            for (name, value) in &publication.fields {
                let _ = writeln!(
                    body,
                    "<dt>{}</dt><dd>{}</dd>",
                    escape_html(name),
                    escape_html(value)
                );
            }
            let _ = writeln!(body, "</dl>");
        }
        if !publication.refs.is_empty() {
            let refs: Vec<String> = publication
                .refs
                .iter()
                .map(|key| cite_html(lib, key, ""))
                .collect();
            let _ = writeln!(body, "<p>Refers to: {}</p>", refs.join(", "));
        }
    }
    SitePage {
        path: "bib.html".to_owned(),
        html: page_shell("Bibliography", "_styles/main.css", &body),
    }
}

/// Renders every page of the site.
pub fn render_site(lib: &Library) -> Result<Vec<SitePage>, PublishError> {
    let mut pages = vec![
        SitePage {
            path: "_styles/main.css".to_owned(),
            html: STYLESHEET.to_owned(),
        },
        render_bibliography(lib),
        render_index(lib),
    ];
    for id in lib.fragments.keys() {
        pages.push(render_fragment_page(lib, id)?);
    }
    for id in lib.dimensions.keys() {
        pages.push(render_dimension_page(lib, id)?);
    }
    pages.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(pages)
}

/// Writes the whole site under `out` and returns the emitted relative
/// paths, sorted. Identical libraries produce identical bytes.
pub fn publish_site(lib: &Library, out: &Path) -> Result<Vec<String>, PublishError> {
    let pages = render_site(lib)?;
    for page in &pages {
        let path = out.join(&page.path);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| PublishError::Io {
                path: parent.to_owned(),
                source,
            })?;
        }
        fs::write(&path, page.html.as_bytes())
            .map_err(|source| PublishError::Io { path, source })?;
    }
    Ok(pages.into_iter().map(|p| p.path).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bibliography::{merge_publications, Publication};
    use crate::model::{BibKey, CharacterizationProperty, MethodFragment, Motivation};

    fn id(s: &str) -> Id {
        Id::new(s).unwrap()
    }

    fn bibkey(s: &str) -> BibKey {
        BibKey::new(s).unwrap()
    }

    fn zachman_library() -> Library {
        let lib = Library::seeded()
            .add_fragment(MethodFragment::new(
                id("zachman"),
                FragmentKind::ViewingFramework,
                "Zachman framework",
            ))
            .unwrap();
        let lib = merge_publications(
            &lib,
            vec![Publication::new(bibkey("1987-Zachman-ISA"), "article")
                .with_field("author", "Zachman, J.A.")],
        )
        .unwrap();
        lib.attach_property(
            &id("zachman"),
            CharacterizationProperty {
                dimension: id("modeling-purpose"),
                value: id("informing"),
                modality: Modality::Suitable,
                motivation: Motivation::citing(
                    "communicates overviews to stakeholders",
                    vec![bibkey("1987-Zachman-ISA")],
                ),
            },
        )
        .unwrap()
    }

    #[test]
    fn fragment_page_has_heading_and_stylesheet() {
        let lib = zachman_library();
        let page = render_fragment_page(&lib, &id("zachman")).unwrap();
        assert_eq!(page.path, "fragments/zachman.html");
        assert!(page.html.contains("<h1>Zachman framework</h1>"));
        assert!(page.html.contains("href=\"../_styles/main.css\""));
        assert!(page.html.contains("../bib.html#1987-Zachman-ISA"));
    }

    #[test]
    fn uncharacterized_fragment_renders() {
        let lib = Library::new()
            .add_fragment(MethodFragment::new(id("bare"), FragmentKind::Model, "Bare"))
            .unwrap();
        let page = render_fragment_page(&lib, &id("bare")).unwrap();
        assert!(page.html.contains("<h2>Characterization</h2>"));
        assert!(page.html.contains("Not characterized yet."));
    }

    #[test]
    fn dangling_citation_is_not_linked() {
        let lib = Library::seeded()
            .add_fragment(MethodFragment::new(
                id("f"),
                FragmentKind::WayOfModeling,
                "f",
            ))
            .unwrap()
            .attach_property(
                &id("f"),
                CharacterizationProperty {
                    dimension: id("semantic-force"),
                    value: id("mixed"),
                    modality: Modality::Suitable,
                    motivation: Motivation::citing("m", vec![bibkey("Nowhere")]),
                },
            )
            .unwrap();
        let page = render_fragment_page(&lib, &id("f")).unwrap();
        assert!(!page.html.contains("bib.html#Nowhere"));
        assert!(page.html.contains("[Nowhere]"));
    }

    #[test]
    fn names_are_escaped() {
        let lib = Library::new()
            .add_fragment(MethodFragment::new(
                id("sneaky"),
                FragmentKind::Model,
                "<script>\"&\"</script>",
            ))
            .unwrap();
        let page = render_fragment_page(&lib, &id("sneaky")).unwrap();
        assert!(!page.html.contains("<script>"));
        assert!(page
            .html
            .contains("&lt;script&gt;&quot;&amp;&quot;&lt;/script&gt;"));
    }

    #[test]
    fn empty_library_site() {
        let dir = tempfile::tempdir().unwrap();
        let paths = publish_site(&Library::new(), dir.path()).unwrap();
        assert_eq!(paths, ["_styles/main.css", "bib.html", "index.html"]);
    }

    #[test]
    fn seeded_library_site_has_dimension_pages() {
        let dir = tempfile::tempdir().unwrap();
        let paths = publish_site(&Library::seeded(), dir.path()).unwrap();
        assert_eq!(paths.len(), 23);
        assert!(paths.contains(&"dimensions/modeling-purpose.html".to_owned()));
    }

    #[test]
    fn publishing_twice_is_byte_identical() {
        let lib = zachman_library();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        publish_site(&lib, a.path()).unwrap();
        publish_site(&lib, b.path()).unwrap();
        for page in render_site(&lib).unwrap() {
            let bytes_a = fs::read(a.path().join(&page.path)).unwrap();
            let bytes_b = fs::read(b.path().join(&page.path)).unwrap();
            assert_eq!(bytes_a, bytes_b, "{}", page.path);
        }
    }
}

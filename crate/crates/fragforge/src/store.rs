//! File persistence for a library.
//!
//! A library root is a directory:
//!
//! ```text
//! <root>/
//!   library-manifest          format marker, currently "wsml/1"
//!   fragments/<id>.wsml.json  one record file per fragment
//!   dimensions/<id>.wsml.json
//!   documents/<id>.wsml.json
//!   bibliography.bib          publication details as BibTeX
//!   content/                  opaque attachment bytes (never interpreted)
//! ```
//!
//! Record files are canonical JSON: object keys sorted, two-space indent,
//! `\n` line endings, a trailing newline, UTF-8 without BOM. Saving the same
//! library twice therefore produces byte-identical trees, and
//! `save(load(save(lib)))` is a fixed point.
//!
//! Loading is deliberately permissive about record *content*: anything the
//! validator can report (empty motivations, dangling references, precedence
//! cycles) loads fine. Only structural problems are load errors: a bad
//! manifest version, an id that disagrees with its filename, fields that a
//! record's kind forbids, or JSON that does not decode.
//!
//! Fields this version does not know are kept: they land in
//! [`Library::extensions`] under the key `"<section>/<id>"` (or
//! `"manifest"`) and are merged back verbatim on save.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::bibliography::{emit_bibtex, parse_bibtex};
use crate::model::{CharacterizationDimension, DocumentRecord, Library, MethodFragment};

/// Manifest version this build reads and writes.
pub const FORMAT_VERSION: &str = "wsml/1";

const MANIFEST_FILE: &str = "library-manifest";
const BIBLIOGRAPHY_FILE: &str = "bibliography.bib";
const CONTENT_DIR: &str = "content";
const RECORD_SUFFIX: &str = ".wsml.json";

const FRAGMENT_KEYS: &[&str] = &[
    "comprises",
    "id",
    "kind",
    "name",
    "partial",
    "properties",
    "relation",
];
const DIMENSION_KEYS: &[&str] = &[
    "class",
    "id",
    "mandatory-for",
    "method",
    "multi-valued",
    "name",
    "values",
];
const DOCUMENT_KEYS: &[&str] = &["bibkey", "content-path", "id", "kind", "precedes", "target"];
const MANIFEST_KEYS: &[&str] = &["format"];

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("cannot serialize {subject}: {detail}")]
    Unrepresentable { subject: String, detail: String },
}

fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> StoreError {
    let path = path.into();
    move |source| StoreError::Io { path, source }
}

fn format_err(path: impl Into<PathBuf>, message: impl Into<String>) -> StoreError {
    StoreError::Format {
        path: path.into(),
        message: message.into(),
    }
}

// ---------------------------------------------------------------------------
// Saving
// ---------------------------------------------------------------------------

/// Writes `lib` to `root` in canonical form.
///
/// The tree is staged in a temporary sibling directory and swapped in with
/// renames, so an interrupted save never leaves a half-written root as the
/// live library. Attachment bytes under `content/` are carried over from
/// the existing root.
pub fn save_library(lib: &Library, root: &Path) -> Result<(), StoreError> {
    check_extension_keys(lib)?;
    let parent = parent_of(root);
    fs::create_dir_all(parent).map_err(io_err(parent))?;
    let staging = tempfile::Builder::new()
        .prefix(".wsml-staged-")
        .tempdir_in(parent)
        .map_err(io_err(parent))?;
    write_tree(lib, staging.path(), root)?;
    let staged = staging.keep();

    if root.exists() {
        let graveyard = tempfile::Builder::new()
            .prefix(".wsml-previous-")
            .tempdir_in(parent)
            .map_err(io_err(parent))?
            .keep();
        let previous = graveyard.join("previous");
        if let Err(source) = fs::rename(root, &previous) {
            let _ = fs::remove_dir_all(&staged);
            let _ = fs::remove_dir_all(&graveyard);
            return Err(io_err(root)(source));
        }
        if let Err(source) = fs::rename(&staged, root) {
            // Put the old tree back; the staged tree is discarded.
            let _ = fs::rename(&previous, root);
            let _ = fs::remove_dir_all(&staged);
            let _ = fs::remove_dir_all(&graveyard);
            return Err(io_err(root)(source));
        }
        let _ = fs::remove_dir_all(&graveyard);
    } else if let Err(source) = fs::rename(&staged, root) {
        let _ = fs::remove_dir_all(&staged);
        return Err(io_err(root)(source));
    }
    Ok(())
}

fn parent_of(root: &Path) -> &Path {
    match root.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    }
}

fn check_extension_keys(lib: &Library) -> Result<(), StoreError> {
    for (key, value) in &lib.extensions {
        let unrepresentable = |detail: String| StoreError::Unrepresentable {
            subject: format!("extension entry '{key}'"),
            detail,
        };
        if !value.is_object() {
            return Err(unrepresentable(
                "extension values must be JSON objects".into(),
            ));
        }
        if key == "manifest" {
            continue;
        }
        let target_exists = match key.split_once('/') {
            Some(("fragments", id)) => lib.fragments.keys().any(|k| k.as_str() == id),
            Some(("dimensions", id)) => lib.dimensions.keys().any(|k| k.as_str() == id),
            Some(("documents", id)) => lib.documents.keys().any(|k| k.as_str() == id),
            _ => {
                return Err(unrepresentable(
                    "extension keys are 'manifest' or '<section>/<id>'".into(),
                ))
            }
        };
        if !target_exists {
            return Err(unrepresentable("no record with this id exists".into()));
        }
    }
    Ok(())
}

fn write_tree(lib: &Library, dir: &Path, existing_root: &Path) -> Result<(), StoreError> {
    let manifest = merge_extensions(
        Value::Object({
            let mut m = Map::new();
            m.insert("format".into(), Value::String(FORMAT_VERSION.into()));
            m
        }),
        lib.extensions.get("manifest"),
        "manifest",
    )?;
    write_canonical(&dir.join(MANIFEST_FILE), &manifest)?;

    write_section(
        dir,
        "fragments",
        lib.fragments.iter().map(|(id, r)| (id.as_str(), r)),
        lib,
    )?;
    write_section(
        dir,
        "dimensions",
        lib.dimensions.iter().map(|(id, r)| (id.as_str(), r)),
        lib,
    )?;
    write_section(
        dir,
        "documents",
        lib.documents.iter().map(|(id, r)| (id.as_str(), r)),
        lib,
    )?;

    let entries: Vec<_> = lib.bibliography.values().cloned().collect();
    let bibtex = emit_bibtex(&entries).map_err(|e| StoreError::Unrepresentable {
        subject: "bibliography".into(),
        detail: e.to_string(),
    })?;
    fs::write(dir.join(BIBLIOGRAPHY_FILE), bibtex).map_err(io_err(dir.join(BIBLIOGRAPHY_FILE)))?;

    let content_dir = dir.join(CONTENT_DIR);
    fs::create_dir_all(&content_dir).map_err(io_err(&content_dir))?;
    let existing_content = existing_root.join(CONTENT_DIR);
    if existing_content.is_dir() {
        copy_dir(&existing_content, &content_dir)?;
    }
    Ok(())
}

fn write_section<'a, T: serde::Serialize + 'a>(
    dir: &Path,
    section: &str,
    records: impl Iterator<Item = (&'a str, &'a T)>,
    lib: &Library,
) -> Result<(), StoreError> {
    let section_dir = dir.join(section);
    fs::create_dir_all(&section_dir).map_err(io_err(&section_dir))?;
    for (id, record) in records {
        let value = serde_json::to_value(record).map_err(|e| StoreError::Unrepresentable {
            subject: format!("{section}/{id}"),
            detail: e.to_string(),
        })?;
        let value = merge_extensions(
            value,
            lib.extensions.get(&format!("{section}/{id}")),
            &format!("{section}/{id}"),
        )?;
        write_canonical(&section_dir.join(format!("{id}{RECORD_SUFFIX}")), &value)?;
    }
    Ok(())
}

fn merge_extensions(
    base: Value,
    extension: Option<&Value>,
    subject: &str,
) -> Result<Value, StoreError> {
    let Some(extension) = extension else {
        return Ok(base);
    };
    let Value::Object(mut map) = base else {
        unreachable!("records serialize to objects");
    };
    let Value::Object(extra) = extension else {
        // check_extension_keys already rejected this
        return Err(StoreError::Unrepresentable {
            subject: subject.to_owned(),
            detail: "extension values must be JSON objects".into(),
        });
    };
    for (key, value) in extra {
        if map.contains_key(key) {
            return Err(StoreError::Unrepresentable {
                subject: subject.to_owned(),
                detail: format!("extension field {key:?} collides with a record field"),
            });
        }
        map.insert(key.clone(), value.clone());
    }
    Ok(Value::Object(map))
}

/// Canonical form: sorted keys (the default `serde_json` map is a
/// `BTreeMap`), two-space indent, trailing newline.
fn write_canonical(path: &Path, value: &Value) -> Result<(), StoreError> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON value always serializes");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn copy_dir(src: &Path, dst: &Path) -> Result<(), StoreError> {
    let mut names: Vec<_> = fs::read_dir(src)
        .map_err(io_err(src))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err(src))?
        .into_iter()
        .map(|e| e.file_name())
        .collect();
    names.sort();
    for name in names {
        let from = src.join(&name);
        let to = dst.join(&name);
        if from.is_dir() {
            fs::create_dir_all(&to).map_err(io_err(&to))?;
            copy_dir(&from, &to)?;
        } else {
            fs::copy(&from, &to).map_err(io_err(&to))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

/// Reads a library root written by [`save_library`] (or by hand).
pub fn load_library(root: &Path) -> Result<Library, StoreError> {
    let manifest_path = root.join(MANIFEST_FILE);
    let manifest_text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: Value = serde_json::from_str(&manifest_text)
        .map_err(|e| format_err(&manifest_path, e.to_string()))?;
    let Value::Object(manifest) = manifest else {
        return Err(format_err(&manifest_path, "manifest is not a JSON object"));
    };
    match manifest.get("format").and_then(Value::as_str) {
        Some(FORMAT_VERSION) => {}
        Some(other) => {
            return Err(format_err(
                &manifest_path,
                format!("unsupported format version {other:?} (expected {FORMAT_VERSION:?})"),
            ))
        }
        None => {
            return Err(format_err(
                &manifest_path,
                "manifest lacks a \"format\" field",
            ))
        }
    }

    let mut lib = Library::new();
    if let Some(unknown) = split_unknown(&manifest, MANIFEST_KEYS) {
        lib.extensions
            .insert("manifest".into(), Value::Object(unknown));
    }

    for (stem, path, record, unknown) in
        load_section::<MethodFragment>(root, "fragments", FRAGMENT_KEYS)?
    {
        let record = record.normalized();
        record
            .check_invariants()
            .map_err(|e| format_err(&path, e.to_string()))?;
        check_stem(&path, &stem, record.id.as_str())?;
        if let Some(unknown) = unknown {
            lib.extensions
                .insert(format!("fragments/{stem}"), Value::Object(unknown));
        }
        lib.fragments.insert(record.id.clone(), record);
    }
    for (stem, path, record, unknown) in
        load_section::<CharacterizationDimension>(root, "dimensions", DIMENSION_KEYS)?
    {
        check_stem(&path, &stem, record.id.as_str())?;
        if let Some(unknown) = unknown {
            lib.extensions
                .insert(format!("dimensions/{stem}"), Value::Object(unknown));
        }
        lib.dimensions.insert(record.id.clone(), record);
    }
    for (stem, path, record, unknown) in
        load_section::<DocumentRecord>(root, "documents", DOCUMENT_KEYS)?
    {
        check_stem(&path, &stem, record.id.as_str())?;
        if let Some(unknown) = unknown {
            lib.extensions
                .insert(format!("documents/{stem}"), Value::Object(unknown));
        }
        lib.documents.insert(record.id.clone(), record);
    }

    let bib_path = root.join(BIBLIOGRAPHY_FILE);
    if bib_path.exists() {
        let text = fs::read_to_string(&bib_path).map_err(io_err(&bib_path))?;
        let entries = parse_bibtex(&text).map_err(|e| format_err(&bib_path, e.to_string()))?;
        for entry in entries {
            lib.bibliography.insert(entry.key.clone(), entry);
        }
    }
    Ok(lib)
}

fn check_stem(path: &Path, stem: &str, id: &str) -> Result<(), StoreError> {
    if stem != id {
        return Err(format_err(
            path,
            format!("record declares id '{id}' but the filename says '{stem}'"),
        ));
    }
    Ok(())
}

fn split_unknown(map: &Map<String, Value>, known: &[&str]) -> Option<Map<String, Value>> {
    let unknown: Map<String, Value> = map
        .iter()
        .filter(|(k, _)| !known.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if unknown.is_empty() {
        None
    } else {
        Some(unknown)
    }
}

type LoadedRecord<T> = (String, PathBuf, T, Option<Map<String, Value>>);

fn load_section<T: DeserializeOwned>(
    root: &Path,
    section: &str,
    known: &[&str],
) -> Result<Vec<LoadedRecord<T>>, StoreError> {
    let dir = root.join(section);
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(io_err(&dir))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err(&dir))?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| {
            p.is_file()
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.ends_with(RECORD_SUFFIX))
        })
        .collect();
    paths.sort();

    let mut records = Vec::with_capacity(paths.len());
    for path in paths {
        let stem = path
            .file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n.strip_suffix(RECORD_SUFFIX))
            .expect("filtered on suffix")
            .to_owned();
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| format_err(&path, e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(format_err(&path, "record is not a JSON object"));
        };
        let unknown = split_unknown(&map, known);
        let known_map: Map<String, Value> = map
            .into_iter()
            .filter(|(k, _)| known.contains(&k.as_str()))
            .collect();
        let record: T = serde_json::from_value(Value::Object(known_map))
            .map_err(|e| format_err(&path, e.to_string()))?;
        records.push((stem, path, record, unknown));
    }
    Ok(records)
}

//! Publication details: a parser and emitter for the BibTeX subset the
//! library stores, plus citation-key resolution over a [`Library`].
//!
//! The accepted grammar is deliberately small: `@type{key, name = value,
//! ...}` entries where a value is a balanced `{...}` group, a double-quoted
//! string, or a bare number. Entry types and field names are case-folded to
//! lowercase; keys are case-sensitive. `@comment` blocks and any text
//! between entries are skipped. `@string`, `@preamble`, and `#`
//! concatenation are rejected: this module stores publication details, it is
//! not general bibliography tooling.
//!
//! One custom field is interpreted: `library-refs = {key, key, ...}` records
//! which other publications an entry refers to and is surfaced as
//! [`Publication::refs`] rather than as an ordinary field.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{BibKey, Library};

/// One parsed BibTeX entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Publication {
    pub key: BibKey,
    /// Lowercase entry type: `book`, `article`, `inproceedings`, ...
    pub entry_type: String,
    /// Fields in source order, names lowercased, values raw.
    pub fields: Vec<(String, String)>,
    /// Keys of other publications this one refers to.
    pub refs: Vec<BibKey>,
}

impl Publication {
    pub fn new(key: BibKey, entry_type: impl Into<String>) -> Self {
        Publication {
            key,
            entry_type: entry_type.into(),
            fields: Vec::new(),
            refs: Vec::new(),
        }
    }

    pub fn with_field(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.fields.push((name.into(), value.into()));
        self
    }

    pub fn field(&self, name: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BibError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate key '{key}' at line {line}")]
    DuplicateKey { key: BibKey, line: usize },
    #[error("entry '{key}' is already present in the bibliography")]
    KeyExists { key: BibKey },
    #[error("entry '{key}' cannot be serialized: {detail}")]
    Unserializable { key: BibKey, detail: String },
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

fn is_key_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || ":_+./-".contains(c)
}

fn is_field_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '-' || c == '_'
}

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, message: impl Into<String>) -> BibError {
        BibError::Parse {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn error_at(line: usize, column: usize, message: impl Into<String>) -> BibError {
        BibError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn expect(&mut self, wanted: char, context: &str) -> Result<(), BibError> {
        match self.peek() {
            Some(c) if c == wanted => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected '{wanted}' {context}, found {c:?}"))),
            None => Err(self.error(format!("expected '{wanted}' {context}, found end of input"))),
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while matches!(self.peek(), Some(c) if pred(c)) {
            out.push(self.bump().unwrap());
        }
        out
    }

    fn skip_balanced_braces(&mut self) -> Result<(), BibError> {
        self.expect('{', "to open the block")?;
        let mut depth = 1usize;
        loop {
            match self.bump() {
                None => return Err(self.error("unbalanced braces: block never closed")),
                Some('{') => depth += 1,
                Some('}') => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                Some(_) => {}
            }
        }
    }

    fn parse_value(&mut self) -> Result<String, BibError> {
        match self.peek() {
            Some('{') => {
                self.bump();
                let mut depth = 1usize;
                let mut out = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.error("unbalanced braces in field value")),
                        Some('{') => {
                            depth += 1;
                            out.push('{');
                        }
                        Some('}') => {
                            depth -= 1;
                            if depth == 0 {
                                return Ok(out);
                            }
                            out.push('}');
                        }
                        Some(c) => out.push(c),
                    }
                }
            }
            Some('"') => {
                self.bump();
                let mut depth = 0usize;
                let mut out = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.error("unterminated quoted field value")),
                        Some('{') => {
                            depth += 1;
                            out.push('{');
                        }
                        Some('}') => {
                            if depth == 0 {
                                return Err(self.error("unbalanced braces in quoted value"));
                            }
                            depth -= 1;
                            out.push('}');
                        }
                        Some('"') if depth == 0 => return Ok(out),
                        Some(c) => out.push(c),
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => Ok(self.take_while(|c| c.is_ascii_digit())),
            _ => Err(self
                .error("expected a field value: a {braced} group, a \"quoted\" string, or digits")),
        }
    }

    fn parse_entry(&mut self) -> Result<Option<Publication>, BibError> {
        let entry_line = self.line;
        let entry_column = self.column;
        self.expect('@', "to start an entry")?;
        let raw_type = self.take_while(|c| c.is_ascii_alphabetic());
        if raw_type.is_empty() {
            return Err(self.error("expected an entry type after '@'"));
        }
        let entry_type = raw_type.to_ascii_lowercase();
        match entry_type.as_str() {
            "comment" => {
                self.skip_ws();
                self.skip_balanced_braces()?;
                return Ok(None);
            }
            "string" | "preamble" => {
                return Err(Self::error_at(
                    entry_line,
                    entry_column,
                    format!("@{entry_type} is not supported"),
                ));
            }
            _ => {}
        }
        self.skip_ws();
        self.expect('{', "after the entry type")?;
        self.skip_ws();

        let key_line = self.line;
        let key_column = self.column;
        let raw_key = self.take_while(is_key_char);
        let key = BibKey::new(raw_key)
            .map_err(|_| Self::error_at(key_line, key_column, "missing or invalid entry key"))?;

        // (name, value, value position) in source order
        let mut raw_fields: Vec<(String, String, usize, usize)> = Vec::new();
        let mut seen_names: BTreeSet<String> = BTreeSet::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('}') => {
                    self.bump();
                    break;
                }
                Some(',') => {
                    self.bump();
                    self.skip_ws();
                    if self.peek() == Some('}') {
                        self.bump();
                        break;
                    }
                    let name_line = self.line;
                    let name_column = self.column;
                    let raw_name = self.take_while(is_field_name_char);
                    if raw_name.is_empty()
                        || !raw_name.starts_with(|c: char| c.is_ascii_alphabetic())
                    {
                        return Err(Self::error_at(
                            name_line,
                            name_column,
                            "expected a field name",
                        ));
                    }
                    let name = raw_name.to_ascii_lowercase();
                    if !seen_names.insert(name.clone()) {
                        return Err(Self::error_at(
                            name_line,
                            name_column,
                            format!("duplicate field '{name}' in entry '{key}'"),
                        ));
                    }
                    self.skip_ws();
                    self.expect('=', "after the field name")?;
                    self.skip_ws();
                    let value_line = self.line;
                    let value_column = self.column;
                    let value = self.parse_value()?;
                    raw_fields.push((name, value, value_line, value_column));
                }
                Some(_) => {
                    return Err(self.error("expected ',' or '}' inside the entry"));
                }
                None => {
                    return Err(self.error(format!("unexpected end of input inside entry '{key}'")));
                }
            }
        }

        let mut fields = Vec::new();
        let mut refs = Vec::new();
        for (name, value, value_line, value_column) in raw_fields {
            if name == "library-refs" {
                for part in value.split(',') {
                    let part = part.trim();
                    if part.is_empty() {
                        continue;
                    }
                    let key = BibKey::new(part).map_err(|_| {
                        Self::error_at(
                            value_line,
                            value_column,
                            format!("invalid key {part:?} in library-refs"),
                        )
                    })?;
                    refs.push(key);
                }
            } else {
                fields.push((name, value));
            }
        }

        Ok(Some(Publication {
            key,
            entry_type,
            fields,
            refs,
        }))
    }
}

/// Parses BibTeX text into publications, in source order.
///
/// Total over arbitrary input: always an entry list or a located error,
/// never a panic.
pub fn parse_bibtex(text: &str) -> Result<Vec<Publication>, BibError> {
    let mut parser = Parser::new(text);
    let mut entries: Vec<Publication> = Vec::new();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    loop {
        // Anything before the next '@' is inter-entry junk.
        while matches!(parser.peek(), Some(c) if c != '@') {
            parser.bump();
        }
        if parser.peek().is_none() {
            return Ok(entries);
        }
        let entry_line = parser.line;
        if let Some(publication) = parser.parse_entry()? {
            if seen
                .insert(publication.key.as_str().to_owned(), entry_line)
                .is_some()
            {
                return Err(BibError::DuplicateKey {
                    key: publication.key,
                    line: entry_line,
                });
            }
            entries.push(publication);
        }
    }
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

fn braces_balanced(value: &str) -> bool {
    let mut depth = 0i64;
    for c in value.chars() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Serializes entries back to BibTeX, one field per line, in the given
/// order. Re-parsing the output yields structurally equal entries.
pub fn emit_bibtex(entries: &[Publication]) -> Result<String, BibError> {
    let mut out = String::new();
    for (i, entry) in entries.iter().enumerate() {
        let bad = |detail: String| BibError::Unserializable {
            key: entry.key.clone(),
            detail,
        };
        if entry.entry_type.is_empty() || !entry.entry_type.chars().all(|c| c.is_ascii_lowercase())
        {
            return Err(bad(format!(
                "entry type {:?} is not a lowercase word",
                entry.entry_type
            )));
        }
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("@{}{{{},\n", entry.entry_type, entry.key));
        for (name, value) in &entry.fields {
            if name.is_empty()
                || !name.starts_with(|c: char| c.is_ascii_lowercase())
                || !name
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-' || c == '_')
                || name == "library-refs"
            {
                return Err(bad(format!("field name {name:?} cannot be emitted")));
            }
            if !braces_balanced(value) {
                return Err(bad(format!("field '{name}' has unbalanced braces")));
            }
            out.push_str(&format!("  {name} = {{{value}}},\n"));
        }
        if !entry.refs.is_empty() {
            let joined = entry
                .refs
                .iter()
                .map(BibKey::as_str)
                .collect::<Vec<_>>()
                .join(", ");
            out.push_str(&format!("  library-refs = {{{joined}}},\n"));
        }
        out.push_str("}\n");
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Library-level operations
// ---------------------------------------------------------------------------

/// Exact, case-sensitive key lookup. Absence is a legal result; the
/// validator (rule E005) turns dangling *references* into findings.
pub fn resolve_key<'a>(lib: &'a Library, key: &BibKey) -> Option<&'a Publication> {
    lib.bibliography.get(key)
}

/// Every key cited anywhere in the library: motivation citations,
/// characterization-method citations, and document `bibkey` fields.
/// Deduplicated, in sorted order.
pub fn referenced_keys(lib: &Library) -> BTreeSet<BibKey> {
    let mut keys = BTreeSet::new();
    for fragment in lib.fragments.values() {
        for property in &fragment.properties {
            keys.extend(property.motivation.cites.iter().cloned());
        }
    }
    for dimension in lib.dimensions.values() {
        keys.extend(dimension.method.cites.iter().cloned());
    }
    for document in lib.documents.values() {
        keys.insert(document.bibkey.clone());
    }
    keys
}

/// Returns a new library with `entries` added to the bibliography. Fails if
/// any key is already present.
pub fn merge_publications(lib: &Library, entries: Vec<Publication>) -> Result<Library, BibError> {
    let mut next = lib.clone();
    for entry in entries {
        if next.bibliography.contains_key(&entry.key) {
            return Err(BibError::KeyExists { key: entry.key });
        }
        next.bibliography.insert(entry.key.clone(), entry);
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        CharacterizationProperty, DocumentKind, DocumentRecord, FragmentKind, Id, Library,
        MethodFragment, Modality, Motivation,
    };
    use proptest::prelude::*;

    fn key(s: &str) -> BibKey {
        BibKey::new(s).unwrap()
    }

    #[test]
    fn parses_a_book_entry() {
        let entries =
            parse_bibtex("@book{2001-Halpin-ORM, author = {Halpin, T.}, year = 2001}").unwrap();
        assert_eq!(entries.len(), 1);
        let entry = &entries[0];
        assert_eq!(entry.key, key("2001-Halpin-ORM"));
        assert_eq!(entry.entry_type, "book");
        assert_eq!(entry.field("author"), Some("Halpin, T."));
        assert_eq!(entry.field("year"), Some("2001"));
    }

    #[test]
    fn empty_input_is_empty_output() {
        assert_eq!(parse_bibtex("").unwrap(), vec![]);
        assert_eq!(
            parse_bibtex("  \n plain text, no entries \n").unwrap(),
            vec![]
        );
    }

    #[test]
    fn unbalanced_entry_reports_position() {
        let err = parse_bibtex("@book{k, title = {unbalanced}").unwrap_err();
        match err {
            BibError::Parse { line, column, .. } => {
                assert_eq!(line, 1);
                assert!(column > 1);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let err = parse_bibtex("@book{k,\n  title = {never closed").unwrap_err();
        assert!(matches!(err, BibError::Parse { line: 2, .. }));
    }

    #[test]
    fn types_and_names_fold_keys_do_not() {
        let entries = parse_bibtex("@BOOK{MiXeD-Case, TITLE = {T}}").unwrap();
        assert_eq!(entries[0].entry_type, "book");
        assert_eq!(entries[0].key.as_str(), "MiXeD-Case");
        assert_eq!(entries[0].field("title"), Some("T"));
    }

    #[test]
    fn comments_and_junk_are_skipped() {
        let text =
            "leading junk\n@comment{ @book{not-an-entry} }\n@misc{real, note = {x}}\ntrailing";
        let entries = parse_bibtex(text).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].key.as_str(), "real");
    }

    #[test]
    fn string_and_preamble_are_rejected() {
        assert!(matches!(
            parse_bibtex("@string{x = {y}}"),
            Err(BibError::Parse { .. })
        ));
        assert!(matches!(
            parse_bibtex("@preamble{ {text} }"),
            Err(BibError::Parse { .. })
        ));
    }

    #[test]
    fn quoted_and_nested_values() {
        let entries = parse_bibtex(
            "@article{a1, title = \"quoted {braced} part\", note = {outer {inner} text}}",
        )
        .unwrap();
        assert_eq!(entries[0].field("title"), Some("quoted {braced} part"));
        assert_eq!(entries[0].field("note"), Some("outer {inner} text"));
    }

    #[test]
    fn duplicate_field_is_an_error() {
        let err = parse_bibtex("@book{k, year = 1999, Year = 2001}").unwrap_err();
        match err {
            BibError::Parse { message, .. } => assert!(message.contains("duplicate field")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_keys_across_entries() {
        let err = parse_bibtex("@book{k, year = 1999}\n@misc{k, note = {x}}").unwrap_err();
        assert!(matches!(err, BibError::DuplicateKey { line: 2, .. }));
    }

    #[test]
    fn library_refs_populate_refs() {
        let entries = parse_bibtex("@book{a, library-refs = {b, c}, year = 2001}").unwrap();
        assert_eq!(entries[0].refs, vec![key("b"), key("c")]);
        assert_eq!(entries[0].field("library-refs"), None);
        assert_eq!(entries[0].field("year"), Some("2001"));

        let emitted = emit_bibtex(&entries).unwrap();
        assert!(emitted.contains("  library-refs = {b, c},\n"));
        assert_eq!(parse_bibtex(&emitted).unwrap(), entries);
    }

    #[test]
    fn emitted_form_is_one_field_per_line() {
        let entries =
            parse_bibtex("@book{2001-Halpin-ORM, author = {Halpin, T.}, year = 2001}").unwrap();
        let emitted = emit_bibtex(&entries).unwrap();
        assert_eq!(
            emitted,
            "@book{2001-Halpin-ORM,\n  author = {Halpin, T.},\n  year = {2001},\n}\n"
        );
    }

    #[test]
    fn roundtrip_preserves_entry_and_field_order() {
        let text = "@misc{z, b = {2}, a = {1}}\n@misc{a, x = {3}}";
        let entries = parse_bibtex(text).unwrap();
        assert_eq!(entries[0].key.as_str(), "z");
        assert_eq!(entries[0].fields[0].0, "b");
        let again = parse_bibtex(&emit_bibtex(&entries).unwrap()).unwrap();
        assert_eq!(entries, again);
    }

    #[test]
    fn resolve_is_case_sensitive() {
        let lib = merge_publications(
            &Library::new(),
            vec![Publication::new(key("Key-One"), "book")],
        )
        .unwrap();
        assert!(resolve_key(&lib, &key("Key-One")).is_some());
        assert!(resolve_key(&lib, &key("key-one")).is_none());
    }

    #[test]
    fn referenced_keys_unions_all_citation_sites() {
        assert!(referenced_keys(&Library::new()).is_empty());

        let mut lib = Library::new();
        let mut fragment =
            MethodFragment::new(Id::new("f").unwrap(), FragmentKind::WayOfModeling, "f");
        fragment.properties.push(CharacterizationProperty {
            dimension: Id::new("d").unwrap(),
            value: Id::new("v").unwrap(),
            modality: Modality::Suitable,
            motivation: Motivation::citing("m", vec![key("a"), key("b")]),
        });
        lib.fragments.insert(fragment.id.clone(), fragment);
        lib.documents.insert(
            Id::new("doc").unwrap(),
            DocumentRecord {
                id: Id::new("doc").unwrap(),
                kind: DocumentKind::Base,
                target: None,
                bibkey: key("a"),
                content_path: None,
                precedes: None,
            },
        );
        let keys: Vec<_> = referenced_keys(&lib)
            .into_iter()
            .map(|k| k.as_str().to_owned())
            .collect();
        assert_eq!(keys, ["a", "b"]);
    }

    proptest! {
        #[test]
        fn parser_is_total(input in ".*") {
            let _ = parse_bibtex(&input);
        }

        #[test]
        fn roundtrip_simple_entries(
            keys in proptest::collection::btree_set("[A-Za-z][A-Za-z0-9:._-]{0,8}", 1..4),
            values in proptest::collection::vec("[ -~&&[^{}\"\\\\]]{0,12}", 1..4),
        ) {
            let entries: Vec<Publication> = keys
                .iter()
                .enumerate()
                .map(|(i, k)| {
                    let mut p = Publication::new(BibKey::new(k.clone()).unwrap(), "misc");
                    for (j, v) in values.iter().enumerate() {
                        p = p.with_field(format!("f{i}x{j}"), v.clone());
                    }
                    p
                })
                .collect();
            let emitted = emit_bibtex(&entries).unwrap();
            let reparsed = parse_bibtex(&emitted).unwrap();
            prop_assert_eq!(entries, reparsed);
        }
    }
}

//! Command-line front end for method-fragment libraries.
//!
//! Every subcommand operates on the library root given by `--library` or
//! the `WSML_LIBRARY` environment variable (the flag wins), except `init`,
//! which creates a fresh root. Mutating commands load the library, run one
//! model operation, and save; they do not validate — curators batch their
//! edits and then run `validate`.
//!
//! Exit codes: `0` success (warnings included), `1` validation errors
//! present, `2` usage, parse, or I/O failure. Output is deterministic:
//! identical library trees and arguments produce byte-identical stdout.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use fragforge::bibliography::{merge_publications, parse_bibtex};
use fragforge::constraints::{validate, Profile, Severity};
use fragforge::model::{
    BibKey, CharacterizationDimension, CharacterizationMethod, CharacterizationProperty,
    DimensionClass, DimensionValue, DocumentKind, DocumentRecord, FragmentKind, Id, Library,
    MethodFragment, Modality, Motivation, RelationLink,
};
use fragforge::publish::publish_site;
use fragforge::query::{coverage_report, eval_query, orthogonality_report, parse_query};
use fragforge::store::{load_library, save_library};

#[derive(Parser, Debug)]
#[command(
    name = "fragforge",
    version,
    about = "Curate, validate, query, and publish method-fragment libraries"
)]
pub struct Cli {
    /// Library root directory; defaults to $WSML_LIBRARY.
    #[arg(long, global = true, env = "WSML_LIBRARY", value_name = "PATH")]
    library: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Create a new library root at PATH.
    Init {
        path: PathBuf,
        /// Start empty instead of with the shipped taxonomy.
        #[arg(long)]
        no_seed: bool,
    },
    /// Add a fragment, dimension, or document record.
    #[command(subcommand)]
    Add(AddCommand),
    /// Attach a characterization property to a fragment.
    Characterize {
        /// Fragment id.
        id: String,
        #[arg(long)]
        dim: String,
        #[arg(long)]
        value: String,
        /// 'intended' or 'suitable'.
        #[arg(long)]
        modality: String,
        /// Why this characterization holds.
        #[arg(long)]
        motivation: String,
        /// Supporting citation key; repeatable.
        #[arg(long = "cite", value_name = "KEY")]
        cites: Vec<String>,
    },
    /// Bibliography maintenance.
    #[command(subcommand)]
    Bib(BibCommand),
    /// Run the integrity rules over the library.
    Validate {
        /// 'strict' or 'bootstrap'.
        #[arg(long, default_value = "strict")]
        profile: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Evaluate a query expression against the fragments.
    Query {
        expr: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Curation reports.
    #[command(subcommand)]
    Report(ReportCommand),
    /// Render the library as a static HTML site.
    Publish {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum AddCommand {
    /// Add a method fragment.
    Fragment {
        #[arg(long)]
        id: String,
        /// One of the twelve kinds; 'approach' and 'technique' are accepted.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        name: String,
        /// Partiality flag (models and views only).
        #[arg(long)]
        partial: Option<bool>,
        /// Contained fragment id; repeatable.
        #[arg(long = "comprises", value_name = "ID")]
        comprises: Vec<String>,
        #[arg(long, value_name = "ID")]
        relation_from: Option<String>,
        #[arg(long, value_name = "ID")]
        relation_to: Option<String>,
        #[arg(long, value_name = "ID")]
        relation_type: Option<String>,
    },
    /// Add a characterization dimension.
    Dimension {
        #[arg(long)]
        id: String,
        #[arg(long)]
        name: String,
        /// 'why', 'what', or 'how'.
        #[arg(long)]
        class: String,
        /// A value as ID:LABEL[:DESCRIPTION]; repeatable, at least two.
        #[arg(long = "value", value_name = "SPEC")]
        values: Vec<String>,
        /// How curators determine the value.
        #[arg(long)]
        method_text: String,
        #[arg(long = "method-cite", value_name = "KEY")]
        method_cites: Vec<String>,
        /// Fragment kind the dimension is mandatory for; repeatable.
        #[arg(long = "mandatory-for", value_name = "KIND")]
        mandatory_for: Vec<String>,
        #[arg(long)]
        multi_valued: bool,
    },
    /// Add a source-document record.
    Document {
        #[arg(long)]
        id: String,
        /// 'base', 'description', or 'dimension-description'.
        #[arg(long)]
        kind: String,
        /// Described fragment or dimension (description kinds only).
        #[arg(long, value_name = "ID")]
        target: Option<String>,
        #[arg(long, value_name = "KEY")]
        bibkey: String,
        /// Relative path under content/.
        #[arg(long, value_name = "PATH")]
        content_path: Option<String>,
        /// Older document this one supersedes.
        #[arg(long, value_name = "ID")]
        precedes: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum BibCommand {
    /// Parse a BibTeX file and add its entries to the bibliography.
    Import { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum ReportCommand {
    /// Mandatory dimensions each fragment still lacks.
    Coverage,
    /// Dimension pairs whose value assignments are strongly associated.
    Orthogonality {
        /// Report pairs with Cramér's V at or above this value.
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
    },
    /// Record counts.
    Stats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// Tab-separated lines.
    Text,
    /// One JSON record per line.
    Jsonl,
}

/// Runs the CLI against the given argument vector, writing to the supplied
/// streams, and returns the process exit code.
pub fn run_with_io(
    argv: impl IntoIterator<Item = String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(parse_error) => {
            use clap::error::ErrorKind;
            let rendered = parse_error.render();
            return match parse_error.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    2
                }
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(error) => {
            let _ = writeln!(err, "error: {error:#}");
            2
        }
    }
}

/// [`run_with_io`] bound to the real stdout/stderr.
pub fn run(argv: impl IntoIterator<Item = String>) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    if let Command::Init { path, no_seed } = &cli.command {
        if path.exists() {
            bail!(
                "refusing to initialize {}: path already exists",
                path.display()
            );
        }
        let library = if *no_seed {
            Library::new()
        } else {
            Library::seeded()
        };
        save_library(&library, path)?;
        return Ok(0);
    }

    let root = cli
        .library
        .ok_or_else(|| anyhow!("no library root given: pass --library or set WSML_LIBRARY"))?;

    match cli.command {
        Command::Init { .. } => unreachable!("handled above"),
        Command::Add(command) => {
            let library = load_library(&root)?;
            let library = apply_add(&library, command)?;
            save_library(&library, &root)?;
            Ok(0)
        }
        Command::Characterize {
            id,
            dim,
            value,
            modality,
            motivation,
            cites,
        } => {
            let library = load_library(&root)?;
            let property = CharacterizationProperty {
                dimension: parse_id(&dim)?,
                value: parse_id(&value)?,
                modality: modality.parse::<Modality>().map_err(|e| anyhow!("{e}"))?,
                motivation: Motivation::citing(motivation, parse_keys(&cites)?),
            };
            let library = library.attach_property(&parse_id(&id)?, property)?;
            save_library(&library, &root)?;
            Ok(0)
        }
        Command::Bib(BibCommand::Import { file }) => {
            let text =
                fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let entries =
                parse_bibtex(&text).with_context(|| format!("parsing {}", file.display()))?;
            let library = load_library(&root)?;
            let library = merge_publications(&library, entries)?;
            save_library(&library, &root)?;
            Ok(0)
        }
        Command::Validate { profile, format } => {
            let library = load_library(&root)?;
            let profile = profile.parse::<Profile>().map_err(|e| anyhow!("{e}"))?;
            let findings = validate(&library, profile);
            for finding in &findings {
                match format {
                    OutputFormat::Text => writeln!(
                        out,
                        "{}\t{}\t{}\t{}",
                        finding.code, finding.severity, finding.subject, finding.message
                    )?,
                    OutputFormat::Jsonl => writeln!(
                        out,
                        "{}",
                        serde_json::json!({
                            "code": finding.code.as_str(),
                            "severity": finding.severity.as_str(),
                            "subject": finding.subject,
                            "message": finding.message,
                        })
                    )?,
                }
            }
            let failed = findings.iter().any(|f| f.severity == Severity::Error);
            Ok(if failed { 1 } else { 0 })
        }
        Command::Query { expr, format } => {
            let library = load_library(&root)?;
            let query = parse_query(&expr)?;
            let hits = eval_query(&library, &query)?;
            for id in hits {
                match format {
                    OutputFormat::Text => writeln!(out, "{id}")?,
                    OutputFormat::Jsonl => {
                        writeln!(out, "{}", serde_json::json!({ "id": id.as_str() }))?
                    }
                }
            }
            Ok(0)
        }
        Command::Report(command) => {
            let library = load_library(&root)?;
            report(&library, command, out)?;
            Ok(0)
        }
        Command::Publish { out: site_dir } => {
            let library = load_library(&root)?;
            let paths = publish_site(&library, &site_dir)?;
            for path in paths {
                writeln!(out, "{path}")?;
            }
            Ok(0)
        }
    }
}

fn report(library: &Library, command: ReportCommand, out: &mut dyn Write) -> Result<()> {
    match command {
        ReportCommand::Coverage => {
            for gap in coverage_report(library) {
                let missing: Vec<&str> = gap.missing.iter().map(Id::as_str).collect();
                writeln!(out, "{}\t{}", gap.fragment, missing.join(","))?;
            }
        }
        ReportCommand::Orthogonality { threshold } => {
            if !(0.0..=1.0).contains(&threshold) {
                bail!("threshold must lie in [0, 1], got {threshold}");
            }
            for pair in orthogonality_report(library, threshold) {
                writeln!(out, "{}\t{}\t{:.3}", pair.dim_a, pair.dim_b, pair.v)?;
            }
        }
        ReportCommand::Stats => {
            writeln!(out, "fragments\t{}", library.fragments.len())?;
            writeln!(out, "dimensions\t{}", library.dimensions.len())?;
            writeln!(out, "documents\t{}", library.documents.len())?;
            writeln!(out, "publications\t{}", library.bibliography.len())?;
            let properties: usize = library.fragments.values().map(|f| f.properties.len()).sum();
            writeln!(out, "properties\t{properties}")?;
            for kind in FragmentKind::ALL {
                let count = library
                    .fragments
                    .values()
                    .filter(|f| f.kind == kind)
                    .count();
                if count > 0 {
                    writeln!(out, "kind:{kind}\t{count}")?;
                }
            }
            for class in DimensionClass::ALL {
                let count = library
                    .dimensions
                    .values()
                    .filter(|d| d.class == class)
                    .count();
                if count > 0 {
                    writeln!(out, "class:{class}\t{count}")?;
                }
            }
        }
    }
    Ok(())
}

fn apply_add(library: &Library, command: AddCommand) -> Result<Library> {
    match command {
        AddCommand::Fragment {
            id,
            kind,
            name,
            partial,
            comprises,
            relation_from,
            relation_to,
            relation_type,
        } => {
            let kind = kind.parse::<FragmentKind>().map_err(|e| anyhow!("{e}"))?;
            let mut fragment = MethodFragment::new(parse_id(&id)?, kind, name);
            if let Some(partial) = partial {
                fragment = fragment.with_partial(partial);
            }
            fragment.comprises = parse_ids(&comprises)?;
            fragment.relation = match (relation_from, relation_to, relation_type) {
                (None, None, None) => None,
                (Some(from), Some(to), Some(relation_type)) => Some(RelationLink {
                    from: parse_id(&from)?,
                    to: parse_id(&to)?,
                    relation_type: parse_id(&relation_type)?,
                }),
                _ => bail!(
                    "--relation-from, --relation-to, and --relation-type must be given together"
                ),
            };
            Ok(library.add_fragment(fragment)?)
        }
        AddCommand::Dimension {
            id,
            name,
            class,
            values,
            method_text,
            method_cites,
            mandatory_for,
            multi_valued,
        } => {
            let dimension = CharacterizationDimension {
                id: parse_id(&id)?,
                name,
                class: class
                    .parse::<DimensionClass>()
                    .map_err(|e| anyhow!("{e}"))?,
                values: values
                    .iter()
                    .map(|spec| parse_value_spec(spec))
                    .collect::<Result<Vec<_>>>()?,
                method: CharacterizationMethod {
                    text: method_text,
                    cites: parse_keys(&method_cites)?,
                },
                mandatory_for: mandatory_for
                    .iter()
                    .map(|k| k.parse::<FragmentKind>().map_err(|e| anyhow!("{e}")))
                    .collect::<Result<_>>()?,
                multi_valued,
            };
            Ok(library.add_dimension(dimension)?)
        }
        AddCommand::Document {
            id,
            kind,
            target,
            bibkey,
            content_path,
            precedes,
        } => {
            let document = DocumentRecord {
                id: parse_id(&id)?,
                kind: kind.parse::<DocumentKind>().map_err(|e| anyhow!("{e}"))?,
                target: target.as_deref().map(parse_id).transpose()?,
                bibkey: BibKey::new(bibkey)?,
                content_path,
                precedes: precedes.as_deref().map(parse_id).transpose()?,
            };
            Ok(library.add_document(document)?)
        }
    }
}

/// Parses `ID:LABEL[:DESCRIPTION]` into a dimension value.
fn parse_value_spec(spec: &str) -> Result<DimensionValue> {
    let mut parts = spec.splitn(3, ':');
    let id = parts
        .next()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| anyhow!("value spec {spec:?} lacks an id"))?;
    let label = parts
        .next()
        .ok_or_else(|| anyhow!("value spec {spec:?} lacks a label (use ID:LABEL)"))?;
    let description = parts.next().unwrap_or("");
    Ok(DimensionValue {
        id: parse_id(id)?,
        label: label.to_owned(),
        description: description.to_owned(),
    })
}

fn parse_id(text: &str) -> Result<Id> {
    Ok(Id::new(text)?)
}

fn parse_ids(texts: &[String]) -> Result<Vec<Id>> {
    texts.iter().map(|t| parse_id(t)).collect()
}

fn parse_keys(texts: &[String]) -> Result<Vec<BibKey>> {
    texts.iter().map(|t| Ok(BibKey::new(t)?)).collect()
}

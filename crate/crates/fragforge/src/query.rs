//! Fragment selection and scheme-curation reports.
//!
//! The query language is a conjunction of whitespace-separated clauses:
//!
//! ```text
//! query  := clause (WS clause)* | ε
//! clause := "type=" kind
//!         | ("intended" | "suitable" | "any") ":" dimension "=" value
//!         | "partial=" ("true" | "false")
//! ```
//!
//! An empty query matches every fragment. Kind clauses accept the
//! `approach`/`technique` aliases. There is no disjunction or negation.
//!
//! Two reports support curating the classification scheme itself:
//! [`coverage_report`] lists which mandatory dimensions each fragment still
//! lacks, and [`orthogonality_report`] flags dimension pairs whose observed
//! value assignments are strongly associated (measured by Cramér's V over a
//! contingency table), i.e. candidates for merging or rethinking.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{FragmentKind, Id, Library, MethodFragment, Modality};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown fragment kind {kind:?} at column {column}")]
    UnknownKind { column: usize, kind: String },
    #[error("unknown dimension '{0}'")]
    UnknownDimension(Id),
    #[error("dimension '{dimension}' has no value '{value}'")]
    UnknownValue { dimension: Id, value: Id },
    #[error("contingency table is degenerate: fewer than two non-empty rows or columns")]
    DegenerateTable,
}

/// Modality selector of a dimension clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModalityFilter {
    Intended,
    Suitable,
    Any,
}

impl ModalityFilter {
    fn matches(&self, modality: Modality) -> bool {
        match self {
            ModalityFilter::Intended => modality == Modality::Intended,
            ModalityFilter::Suitable => modality == Modality::Suitable,
            ModalityFilter::Any => true,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ModalityFilter::Intended => "intended",
            ModalityFilter::Suitable => "suitable",
            ModalityFilter::Any => "any",
        }
    }
}

impl fmt::Display for ModalityFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Clause {
    Kind(FragmentKind),
    Dim {
        modality: ModalityFilter,
        dimension: Id,
        value: Id,
    },
    Partial(bool),
}

impl Clause {
    fn matches(&self, fragment: &MethodFragment) -> bool {
        match self {
            Clause::Kind(kind) => fragment.kind == *kind,
            Clause::Partial(flag) => fragment.is_partial() == *flag,
            Clause::Dim {
                modality,
                dimension,
                value,
            } => fragment.properties.iter().any(|p| {
                &p.dimension == dimension && &p.value == value && modality.matches(p.modality)
            }),
        }
    }
}

/// A parsed conjunctive query.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Query {
    pub clauses: Vec<Clause>,
}

/// Parses query text. Columns in errors are 1-based byte offsets.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let mut clauses = Vec::new();
    for (offset, token) in tokens(text) {
        clauses.push(parse_clause(token, offset + 1)?);
    }
    Ok(Query { clauses })
}

fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split_whitespace()
        .map(move |tok| (offset_of(text, tok), tok))
}

fn offset_of(text: &str, token: &str) -> usize {
    // split_whitespace yields subslices of `text`
    token.as_ptr() as usize - text.as_ptr() as usize
}

fn parse_clause(token: &str, column: usize) -> Result<Clause, QueryError> {
    if let Some(kind) = token.strip_prefix("type=") {
        return kind.parse::<FragmentKind>().map(Clause::Kind).map_err(|_| {
            QueryError::UnknownKind {
                column: column + "type=".len(),
                kind: kind.to_owned(),
            }
        });
    }
    if let Some(flag) = token.strip_prefix("partial=") {
        return match flag {
            "true" => Ok(Clause::Partial(true)),
            "false" => Ok(Clause::Partial(false)),
            other => Err(QueryError::Syntax {
                column: column + "partial=".len(),
                message: format!("expected 'true' or 'false', found {other:?}"),
            }),
        };
    }
    let Some((modality_text, rest)) = token.split_once(':') else {
        return Err(QueryError::Syntax {
            column,
            message: format!("expected 'type=', 'partial=', or a modality clause, found {token:?}"),
        });
    };
    let modality = match modality_text {
        "intended" => ModalityFilter::Intended,
        "suitable" => ModalityFilter::Suitable,
        "any" => ModalityFilter::Any,
        other => {
            return Err(QueryError::Syntax {
                column,
                message: format!(
                    "expected modality 'intended', 'suitable', or 'any', found {other:?}"
                ),
            })
        }
    };
    let rest_column = column + modality_text.len() + 1;
    let Some((dimension_text, value_text)) = rest.split_once('=') else {
        return Err(QueryError::Syntax {
            column: rest_column,
            message: "expected 'dimension=value'".to_owned(),
        });
    };
    let dimension = Id::new(dimension_text).map_err(|_| QueryError::Syntax {
        column: rest_column,
        message: format!("{dimension_text:?} is not a valid dimension id"),
    })?;
    let value = Id::new(value_text).map_err(|_| QueryError::Syntax {
        column: rest_column + dimension_text.len() + 1,
        message: format!("{value_text:?} is not a valid value id"),
    })?;
    Ok(Clause::Dim {
        modality,
        dimension,
        value,
    })
}

/// Ids of the fragments satisfying every clause, sorted lexicographically.
///
/// Dimension clauses must reference a dimension and value that exist in the
/// library; fragments of kinds without a `partial` flag count as
/// `partial=false`.
pub fn eval_query(lib: &Library, query: &Query) -> Result<Vec<Id>, QueryError> {
    for clause in &query.clauses {
        if let Clause::Dim {
            dimension, value, ..
        } = clause
        {
            let dim = lib
                .dimensions
                .get(dimension)
                .ok_or_else(|| QueryError::UnknownDimension(dimension.clone()))?;
            if !dim.has_value(value) {
                return Err(QueryError::UnknownValue {
                    dimension: dimension.clone(),
                    value: value.clone(),
                });
            }
        }
    }
    Ok(lib
        .fragments
        .values()
        .filter(|f| query.clauses.iter().all(|c| c.matches(f)))
        .map(|f| f.id.clone())
        .collect())
}

/// One fragment's missing mandatory dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverageGap {
    pub fragment: Id,
    pub missing: Vec<Id>,
}

/// Per fragment, the dimensions mandatory for its kind on which it carries
/// no property in either modality. Fully characterized fragments are
/// omitted; output is sorted by fragment id, missing lists by dimension id.
pub fn coverage_report(lib: &Library) -> Vec<CoverageGap> {
    let mut gaps = Vec::new();
    for fragment in lib.fragments.values() {
        let missing: Vec<Id> = lib
            .dimensions
            .values()
            .filter(|d| d.mandatory_for.contains(&fragment.kind))
            .filter(|d| !fragment.properties.iter().any(|p| p.dimension == d.id))
            .map(|d| d.id.clone())
            .collect();
        if !missing.is_empty() {
            gaps.push(CoverageGap {
                fragment: fragment.id.clone(),
                missing,
            });
        }
    }
    gaps
}

// ---------------------------------------------------------------------------
// Association between dimensions
// ---------------------------------------------------------------------------

/// A cross-tabulation of two dimensions' observed values.
#[derive(Clone, Debug, PartialEq)]
pub struct ContingencyTable {
    rows: Vec<Id>,
    cols: Vec<Id>,
    counts: Vec<Vec<u64>>,
    n: u64,
}

impl ContingencyTable {
    /// Builds a table from a count matrix indexed `[row][col]`.
    ///
    /// Panics if the matrix shape does not match the labels; counts of
    /// zero are fine (all-zero rows and columns are dropped by
    /// [`cramers_v`]).
    pub fn new(rows: Vec<Id>, cols: Vec<Id>, counts: Vec<Vec<u64>>) -> Self {
        assert_eq!(counts.len(), rows.len(), "one count row per row label");
        for row in &counts {
            assert_eq!(row.len(), cols.len(), "one count per column label");
        }
        let n = counts.iter().flatten().sum();
        ContingencyTable {
            rows,
            cols,
            counts,
            n,
        }
    }

    pub fn rows(&self) -> &[Id] {
        &self.rows
    }

    pub fn cols(&self) -> &[Id] {
        &self.cols
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    /// Total number of observations.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn transposed(&self) -> ContingencyTable {
        let counts = (0..self.cols.len())
            .map(|j| (0..self.rows.len()).map(|i| self.counts[i][j]).collect())
            .collect();
        ContingencyTable::new(self.cols.clone(), self.rows.clone(), counts)
    }

    /// Drops rows and columns whose counts are all zero.
    fn trimmed(&self) -> Vec<Vec<u64>> {
        let live_rows: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.counts[i].iter().any(|&c| c > 0))
            .collect();
        let live_cols: Vec<usize> = (0..self.cols.len())
            .filter(|&j| live_rows.iter().any(|&i| self.counts[i][j] > 0))
            .collect();
        live_rows
            .iter()
            .map(|&i| live_cols.iter().map(|&j| self.counts[i][j]).collect())
            .collect()
    }
}

/// Cramér's V: `sqrt((χ² / n) / min(r - 1, c - 1))` with Pearson's χ² over
/// the table, after dropping all-zero rows and columns.
///
/// Ranges from 0 (independent) to 1 (perfectly associated). Errors with
/// [`QueryError::DegenerateTable`] when fewer than two non-zero rows or
/// columns remain.
pub fn cramers_v(table: &ContingencyTable) -> Result<f64, QueryError> {
    let counts = table.trimmed();
    let r = counts.len();
    let c = counts.first().map_or(0, Vec::len);
    if r < 2 || c < 2 {
        return Err(QueryError::DegenerateTable);
    }
    let row_totals: Vec<f64> = counts
        .iter()
        .map(|row| row.iter().sum::<u64>() as f64)
        .collect();
    let col_totals: Vec<f64> = (0..c)
        .map(|j| counts.iter().map(|row| row[j] as f64).sum())
        .collect();
    let n: f64 = row_totals.iter().sum();
    let mut chi_squared = 0.0;
    for (i, row) in counts.iter().enumerate() {
        for (j, &observed) in row.iter().enumerate() {
            let expected = row_totals[i] * col_totals[j] / n;
            let diff = observed as f64 - expected;
            chi_squared += diff * diff / expected;
        }
    }
    let v = (chi_squared / n / (r.min(c) - 1) as f64).sqrt();
    Ok(v.clamp(0.0, 1.0))
}

/// Builds the contingency table of two dimensions over the fragments
/// characterized on both.
///
/// Counting is modality-agnostic: a fragment's values on a dimension are
/// the union over intended and suitable properties. A fragment holding
/// several values on either dimension contributes one count per value pair.
pub fn contingency_table(
    lib: &Library,
    dim_a: &Id,
    dim_b: &Id,
) -> Result<ContingencyTable, QueryError> {
    let a = lib
        .dimensions
        .get(dim_a)
        .ok_or_else(|| QueryError::UnknownDimension(dim_a.clone()))?;
    let b = lib
        .dimensions
        .get(dim_b)
        .ok_or_else(|| QueryError::UnknownDimension(dim_b.clone()))?;
    let rows: Vec<Id> = a.values.iter().map(|v| v.id.clone()).collect();
    let cols: Vec<Id> = b.values.iter().map(|v| v.id.clone()).collect();
    let mut counts = vec![vec![0u64; cols.len()]; rows.len()];
    for fragment in lib.fragments.values() {
        let values_on = |dim: &Id, declared: &[Id]| -> BTreeSet<usize> {
            fragment
                .properties
                .iter()
                .filter(|p| &p.dimension == dim)
                .filter_map(|p| declared.iter().position(|v| v == &p.value))
                .collect()
        };
        let on_a = values_on(dim_a, &rows);
        let on_b = values_on(dim_b, &cols);
        for &i in &on_a {
            for &j in &on_b {
                counts[i][j] += 1;
            }
        }
    }
    Ok(ContingencyTable::new(rows, cols, counts))
}

/// A dimension pair whose observed assignments are associated.
#[derive(Clone, Debug, PartialEq)]
pub struct DimensionAssociation {
    pub dim_a: Id,
    pub dim_b: Id,
    pub v: f64,
}

/// Every unordered dimension pair with Cramér's V at or above `threshold`,
/// sorted by descending V, then by ids. Pairs with degenerate tables are
/// skipped.
pub fn orthogonality_report(lib: &Library, threshold: f64) -> Vec<DimensionAssociation> {
    let ids: Vec<&Id> = lib.dimensions.keys().collect();
    let mut out = Vec::new();
    for (index, dim_a) in ids.iter().enumerate() {
        for dim_b in &ids[index + 1..] {
            let table = contingency_table(lib, dim_a, dim_b).expect("dimensions exist");
            match cramers_v(&table) {
                Ok(v) if v >= threshold => out.push(DimensionAssociation {
                    dim_a: (*dim_a).clone(),
                    dim_b: (*dim_b).clone(),
                    v,
                }),
                Ok(_) | Err(QueryError::DegenerateTable) => {}
                Err(other) => unreachable!("cramers_v only fails on degeneracy: {other}"),
            }
        }
    }
    out.sort_by(|x, y| {
        y.v.partial_cmp(&x.v)
            .expect("V is never NaN")
            .then_with(|| (&x.dim_a, &x.dim_b).cmp(&(&y.dim_a, &y.dim_b)))
    });
    out
}

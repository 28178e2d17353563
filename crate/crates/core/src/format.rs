//! Text formats for subspace and report files.
//!
//! A subspace file is TOML:
//!
//! ```toml
//! format = "bilrank-subspace/1"
//! n = 3
//! kind = "alternating"
//!
//! [field]
//! p = 3
//! k = 1
//! modulus = [1, 1]
//!
//! [[basis]]
//! n = 3
//! rows = [[0, 1, 0], [2, 0, 0], [0, 0, 0]]
//! ```
//!
//! with optional `[claims]` and `[provenance]` tables. Entries are element
//! codes. The basis is written in canonical echelon form.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{Claims, ConstructionRequest};
use crate::formcore::GramForm;
use crate::gf::{Field, FieldSpec, GfError};
use crate::spanspace::{FormSubspace, Kind, SpanError};
use crate::theoremlab::VerificationReport;

pub const SUBSPACE_FORMAT: &str = "bilrank-subspace/1";
pub const REPORT_FORMAT: &str = "bilrank-report/1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("format is {found:?}, expected {expected:?}")]
    Version { found: String, expected: &'static str },
    #[error("field (line {line}): {source}")]
    Field { line: usize, source: GfError },
    #[error("basis[{index}] (line {line}): {reason}")]
    Basis { index: usize, line: usize, reason: String },
    #[error("cannot serialize: {0}")]
    Serialize(String),
}

/// Where a subspace came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub request: Option<ConstructionRequest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub log: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SubspaceFile {
    pub subspace: FormSubspace,
    pub claims: Option<Claims>,
    pub provenance: Option<Provenance>,
}

#[derive(Serialize, Deserialize)]
struct RawForm {
    n: usize,
    rows: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct RawSubspace {
    format: String,
    n: usize,
    kind: Kind,
    field: FieldSpec,
    #[serde(default)]
    basis: Vec<RawForm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    claims: Option<Claims>,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

/// 1-based line of the `index`-th `[[basis]]` header, or of the `basis` key.
fn basis_line(text: &str, index: usize) -> usize {
    let headers: Vec<usize> =
        text.lines().enumerate().filter(|(_, l)| l.trim() == "[[basis]]").map(|(i, _)| i + 1).collect();
    headers.get(index).copied().unwrap_or_else(|| key_line(text, "basis"))
}

fn key_line(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let t = l.trim_start();
            t.starts_with(key) && t[key.len()..].trim_start().starts_with(['=', ']']) || t == format!("[{key}]")
        })
        .map_or(0, |i| i + 1)
}

fn field_for(spec: FieldSpec) -> Result<Arc<Field>, GfError> {
    let canonical = Field::canonical(spec.p, spec.k)?;
    if *canonical.spec() == spec {
        Ok(canonical)
    } else {
        Field::new(spec).map(Arc::new)
    }
}

impl SubspaceFile {
    pub fn new(subspace: FormSubspace) -> SubspaceFile {
        SubspaceFile { subspace, claims: None, provenance: None }
    }

    pub fn parse(text: &str) -> Result<SubspaceFile, FormatError> {
        let raw: RawSubspace = toml::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?;
        if raw.format != SUBSPACE_FORMAT {
            return Err(FormatError::Version { found: raw.format, expected: SUBSPACE_FORMAT });
        }
        let field = field_for(raw.field).map_err(|source| FormatError::Field {
            line: key_line(text, "modulus").max(key_line(text, "field")),
            source,
        })?;
        let n = raw.n;
        let basis_err =
            |index: usize, reason: String| FormatError::Basis { index, line: basis_line(text, index), reason };
        let mut forms = Vec::with_capacity(raw.basis.len());
        for (index, f) in raw.basis.iter().enumerate() {
            if f.n != n {
                return Err(basis_err(index, format!("n = {} but the file has n = {n}", f.n)));
            }
            let rows: Vec<&[u32]> = f.rows.iter().map(Vec::as_slice).collect();
            let g = GramForm::from_codes(&field, &rows).map_err(|e| basis_err(index, e.to_string()))?;
            if g.n() != n {
                return Err(basis_err(index, format!("expected {n} rows of {n} entries")));
            }
            if !raw.kind.admits(&field, &g) {
                return Err(basis_err(index, format!("form is not {}", raw.kind)));
            }
            forms.push(g);
        }
        let subspace = FormSubspace::from_independent(field, n, &forms).and_then(|m| m.with_kind(raw.kind)).map_err(
            |e| match e {
                SpanError::Dependent { index } => basis_err(index, "linearly dependent on the rows before it".into()),
                other => basis_err(0, other.to_string()),
            },
        )?;
        Ok(SubspaceFile { subspace, claims: raw.claims, provenance: raw.provenance })
    }

    pub fn read(path: &Path) -> Result<SubspaceFile, FormatError> {
        let text = read_text(path)?;
        SubspaceFile::parse(&text).map_err(|e| match e {
            FormatError::Parse(msg) => FormatError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, FormatError> {
        let m = &self.subspace;
        let raw = RawSubspace {
            format: SUBSPACE_FORMAT.to_string(),
            n: m.n(),
            kind: m.kind(),
            field: m.field().spec().clone(),
            basis: m
                .basis()
                .iter()
                .map(|f| RawForm { n: f.n(), rows: f.rows().iter().map(|r| r.iter().map(|e| e.0).collect()).collect() })
                .collect(),
            claims: self.claims.clone(),
            provenance: self.provenance.clone(),
        };
        toml::to_string(&raw).map_err(|e| FormatError::Serialize(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<(), FormatError> {
        write_text(path, &self.to_toml()?)
    }
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| FormatError::Io { path: dir.display().to_string(), source })?;
    }
    std::fs::write(path, text).map_err(|source| FormatError::Io { path: path.display().to_string(), source })
}

/// Summary of the subspace a report was computed on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subject {
    pub q: u32,
    pub n: usize,
    pub dim: usize,
    pub kind: Kind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<usize>>,
}

impl Subject {
    pub fn of(m: &FormSubspace, budget: u64) -> Subject {
        Subject {
            q: m.q(),
            n: m.n(),
            dim: m.dim(),
            kind: m.kind(),
            spectrum: m.rank_spectrum(budget).ok().map(|s| s.ranks()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: String,
    pub budget: u64,
    pub explore: bool,
    pub subject: Subject,
    pub reports: Vec<VerificationReport>,
}

impl ReportFile {
    pub fn new(m: &FormSubspace, budget: u64, explore: bool, reports: Vec<VerificationReport>) -> ReportFile {
        ReportFile { format: REPORT_FORMAT.to_string(), budget, explore, subject: Subject::of(m, budget), reports }
    }

    pub fn to_toml(&self) -> Result<String, FormatError> {
        toml::to_string(self).map_err(|e| FormatError::Serialize(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String, FormatError> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| FormatError::Serialize(e.to_string()))
    }

    pub fn parse(text: &str) -> Result<ReportFile, FormatError> {
        let r: ReportFile = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| FormatError::Parse(e.to_string()))?
        };
        if r.format != REPORT_FORMAT {
            return Err(FormatError::Version { found: r.format, expected: REPORT_FORMAT });
        }
        Ok(r)
    }
}

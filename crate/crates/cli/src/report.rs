use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use momentgap_core::hamburger::{Status, Sufficiency, Verdict};
use momentgap_core::{MomentSequence, Scalar, SupportHint};
use serde::Serialize;
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::error::CliError;
use crate::input::Input;

pub const SCHEMA: &str = "momentgap.report/1";

/// A labelled number: a double for plotting and the exact text (`p/q` or
/// hex-float) it came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Number {
    pub label: String,
    pub value: Option<f64>,
    pub exact: String,
}

impl Number {
    pub fn of<S: Scalar>(label: impl Into<String>, v: &S) -> Number {
        let f = v.to_f64();
        Number {
            label: label.into(),
            value: f.is_finite().then_some(f),
            exact: v.to_text(),
        }
    }

    /// A quantity that only exists as a double.
    pub fn double(label: impl Into<String>, f: f64) -> Number {
        Number {
            label: label.into(),
            value: f.is_finite().then_some(f),
            exact: format!("{f:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionRecord {
    pub criterion: String,
    pub sufficiency: Sufficiency,
    pub certified: bool,
    pub indicates: Option<Status>,
    pub degree: usize,
    pub values: Vec<Number>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridRecord {
    pub criterion: String,
    pub label: String,
    pub points: usize,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub criterion: String,
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub input: String,
    pub input_sha256: String,
    pub mode: String,
    pub degree: usize,
    pub dimension: usize,
    pub support: String,
    pub toolkit_version: String,
    pub grids: Vec<GridRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub provenance: Provenance,
    pub verdict: Option<Verdict>,
    pub criteria: Vec<CriterionRecord>,
    pub errors: Vec<ErrorRecord>,
    /// The only field that differs between identical runs.
    pub timestamp: String,
}

pub fn support_label<S: Scalar>(s: &SupportHint<S>) -> String {
    match s {
        SupportHint::FullSpace => "full_space".into(),
        SupportHint::NonnegativeOrthant => "nonnegative_orthant".into(),
        SupportHint::Cone(g) => format!("cone({} generators)", g.len()),
        SupportHint::Curve(name) => format!("curve({name})"),
    }
}

/// RFC 3339 time of the run; `SOURCE_DATE_EPOCH` pins it.
pub fn timestamp() -> String {
    let secs = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse::<i64>().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs() as i64)
                .unwrap_or(0)
        });
    OffsetDateTime::from_unix_timestamp(secs)
        .ok()
        .and_then(|t| t.format(&Rfc3339).ok())
        .unwrap_or_else(|| secs.to_string())
}

impl Report {
    pub fn new(command: &str, input: &Input, mode: String, dimension: usize) -> Report {
        Report {
            schema: SCHEMA.into(),
            command: command.into(),
            provenance: Provenance {
                input: input.label.clone(),
                input_sha256: input.sha256.clone(),
                mode,
                degree: 0,
                dimension,
                support: String::new(),
                toolkit_version: env!("CARGO_PKG_VERSION").into(),
                grids: Vec::new(),
                curve: None,
            },
            verdict: None,
            criteria: Vec::new(),
            errors: Vec::new(),
            timestamp: timestamp(),
        }
    }

    pub fn describe<S: Scalar>(&mut self, seq: &MomentSequence<S>) {
        self.provenance.degree = seq.max_degree();
        self.provenance.dimension = seq.dim();
        self.provenance.support = support_label(seq.support());
    }

    pub fn error(&mut self, criterion: &str, e: &CliError) {
        self.errors.push(ErrorRecord {
            criterion: criterion.into(),
            kind: e.kind().into(),
            message: e.to_string(),
        });
    }

    /// Records come out ordered by criterion name, then insertion.
    pub fn finish(&mut self) {
        self.criteria.sort_by(|a, b| a.criterion.cmp(&b.criterion));
        self.errors.sort_by(|a, b| a.criterion.cmp(&b.criterion));
    }

    pub fn exit_code(&self) -> i32 {
        if self.errors.is_empty() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Write to `out`, or standard output.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

/// CSV cells for a scalar: exact `p/q` for rationals; for floats the
/// shortest round-trip decimal of the nearest double plus the hex-float.
pub fn csv_cells<S: Scalar>(v: &S) -> (String, String) {
    if S::is_exact() {
        (v.to_rational().to_string(), String::new())
    } else {
        (format!("{:?}", v.to_f64()), v.to_text())
    }
}

use std::fs;
use std::path::Path;

use momentgap_core::moments::{generate_moments, peek_mode, MeasureDefinition};
use momentgap_core::{MomentSequence, Rational, Scalar, ScalarMode, SupportHint};
use sha2::{Digest, Sha256};

use crate::args::SupportArg;
use crate::error::CliError;

/// Degree used for measure definitions when none is requested.
pub const DEFAULT_DEGREE: usize = 20;

#[derive(Debug, Clone)]
enum Source {
    /// Raw interchange text, parsed once the scalar family is known.
    Moments(String),
    Measure(MeasureDefinition),
}

/// A parsed input file together with its fingerprint.
#[derive(Debug, Clone)]
pub struct Input {
    source: Source,
    pub label: String,
    pub sha256: String,
}

impl Input {
    pub fn read(path: &Path) -> Result<Input, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
        let label = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{label}: not JSON: {e}")))?;
        let source = if value.get("entries").is_some() {
            Source::Moments(text)
        } else {
            let def = serde_json::from_value(value).map_err(|e| {
                CliError::Usage(format!(
                    "{label}: neither a moment file nor a measure definition: {e}"
                ))
            })?;
            Source::Measure(def)
        };
        Ok(Input {
            source,
            label,
            sha256,
        })
    }

    /// Stand-in for an input that could not be read.
    pub fn placeholder(path: &Path) -> Input {
        Input {
            source: Source::Moments(String::new()),
            label: path.display().to_string(),
            sha256: String::new(),
        }
    }

    /// The mode to compute in: the request, else the file's own mode.
    pub fn mode(&self, requested: Option<&str>) -> Result<ScalarMode, CliError> {
        if let Some(m) = requested {
            return Ok(m.parse()?);
        }
        Ok(match &self.source {
            Source::Moments(text) => peek_mode(text)?,
            Source::Measure(_) => ScalarMode::Rational,
        })
    }

    pub fn dimension(&self) -> Result<usize, CliError> {
        Ok(match &self.source {
            Source::Moments(text) => {
                let v: serde_json::Value = serde_json::from_str(text).expect("checked on read");
                v.get("dimension")
                    .and_then(serde_json::Value::as_u64)
                    .ok_or_else(|| CliError::Usage(format!("{}: missing dimension", self.label)))?
                    as usize
            }
            Source::Measure(def) => def.dimension()?,
        })
    }

    /// Moments in the arithmetic of `S`, truncated or generated to `degree`.
    pub fn sequence<S: Scalar>(
        &self,
        ctx: S::Context,
        degree: Option<usize>,
        support: Option<SupportArg>,
    ) -> Result<MomentSequence<S>, CliError> {
        let seq = match &self.source {
            Source::Moments(text) => {
                let seq = match peek_mode(text)? {
                    ScalarMode::Rational => {
                        MomentSequence::<Rational>::from_json(text)?.convert::<S>(ctx)?
                    }
                    ScalarMode::Float { bits } => {
                        if S::is_exact() {
                            return Err(CliError::Usage(format!(
                                "{}: float:{bits} data cannot be analyzed in rational mode",
                                self.label
                            )));
                        }
                        MomentSequence::<momentgap_core::BigFloat>::from_json(text)?
                            .convert::<S>(ctx)?
                    }
                };
                match degree {
                    Some(n) if n < seq.max_degree() => seq.truncate(n)?,
                    Some(n) if n > seq.max_degree() => {
                        return Err(momentgap_core::Error::DegreeInsufficient {
                            needed: n,
                            available: seq.max_degree(),
                        }
                        .into())
                    }
                    _ => seq,
                }
            }
            Source::Measure(def) => {
                generate_moments(def, def.dimension()?, degree.unwrap_or(DEFAULT_DEGREE), ctx)?
            }
        };
        Ok(match support {
            Some(SupportArg::Full) => seq.with_support(SupportHint::FullSpace),
            Some(SupportArg::Orthant) => seq.with_support(SupportHint::NonnegativeOrthant),
            None => seq,
        })
    }
}

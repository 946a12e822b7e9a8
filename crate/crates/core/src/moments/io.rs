use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::{parse_rational, Scalar, ScalarMode};

use super::{GrowthBound, MomentSequence, SupportHint};

/// An exact rational that serializes as `"p/q"` and parses from strings
/// (`"p/q"`, integers, decimals) or JSON integers.
#[derive(Clone, PartialEq, Eq)]
pub struct Exact(pub BigRational);

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Exact {
    fn serialize<Se: serde::Serializer>(&self, s: Se) -> std::result::Result<Se::Ok, Se::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Exact(BigRational::from_integer(n.into()))),
            Raw::Text(t) => parse_rational(&t)
                .map(Exact)
                .map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SupportFile {
    FullSpace,
    NonnegativeOrthant,
    Cone(Vec<Vec<String>>),
    Curve(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct EntryFile {
    alpha: Vec<u32>,
    value: String,
}

/// On-disk form of a [`MomentSequence`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentFile {
    dimension: usize,
    max_degree: usize,
    mode: ScalarMode,
    #[serde(default = "full_space")]
    support_hint: SupportFile,
    entries: Vec<EntryFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    growth_bound: Option<GrowthBound>,
}

fn full_space() -> SupportFile {
    SupportFile::FullSpace
}

/// Read only the `mode` field of a moment file.
pub fn peek_mode(json: &str) -> Result<ScalarMode> {
    #[derive(Deserialize)]
    struct Head {
        mode: ScalarMode,
    }
    serde_json::from_str::<Head>(json)
        .map(|h| h.mode)
        .map_err(|e| Error::Parse(e.to_string()))
}

impl<S: Scalar> MomentSequence<S> {
    pub fn to_file(&self) -> MomentFile {
        let support_hint = match self.support() {
            SupportHint::FullSpace => SupportFile::FullSpace,
            SupportHint::NonnegativeOrthant => SupportFile::NonnegativeOrthant,
            SupportHint::Cone(g) => SupportFile::Cone(
                g.iter()
                    .map(|row| row.iter().map(Scalar::to_text).collect())
                    .collect(),
            ),
            SupportHint::Curve(name) => SupportFile::Curve(name.clone()),
        };
        MomentFile {
            dimension: self.dim(),
            max_degree: self.max_degree(),
            mode: self.mode(),
            support_hint,
            entries: self
                .entries()
                .map(|(a, v)| EntryFile {
                    alpha: a.exponents().to_vec(),
                    value: v.to_text(),
                })
                .collect(),
            growth_bound: self.growth_bound().cloned(),
        }
    }

    /// Parse a file; its mode must belong to the scalar family `S`.
    pub fn from_file(file: &MomentFile) -> Result<Self> {
        let ctx = S::context_for(file.mode)?;
        let support = match &file.support_hint {
            SupportFile::FullSpace => SupportHint::FullSpace,
            SupportFile::NonnegativeOrthant => SupportHint::NonnegativeOrthant,
            SupportFile::Cone(g) => SupportHint::Cone(
                g.iter()
                    .map(|row| row.iter().map(|t| S::from_text(t, &ctx)).collect())
                    .collect::<Result<_>>()?,
            ),
            SupportFile::Curve(name) => SupportHint::Curve(name.clone()),
        };
        let mut entries = BTreeMap::new();
        for e in &file.entries {
            if e.alpha.len() != file.dimension {
                return Err(Error::DimensionMismatch {
                    left: file.dimension,
                    right: e.alpha.len(),
                });
            }
            let alpha = MultiIndex::new(e.alpha.clone());
            let value = S::from_text(&e.value, &ctx)?;
            if entries.insert(alpha.clone(), value).is_some() {
                return Err(Error::Parse(format!("duplicate entry for {alpha:?}")));
            }
        }
        let seq = MomentSequence::new(file.dimension, file.max_degree, ctx, entries, support)?;
        Ok(seq.with_growth_bound(file.growth_bound.clone()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("moment file serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: MomentFile =
            serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(&file)
    }
}

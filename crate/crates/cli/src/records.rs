//! JSONL record types. Every line carries a `schema` tag; decision vectors in
//! frontier payloads are written as four-decimal strings.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use bifront::frontier::{Frontier, FrontierPoint, PipelineConfig};
use bifront::generate::GenConfig;
use bifront::ProblemInstance;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

pub const DATASET_SCHEMA: &str = "bifront.dataset/1";
pub const PREDICTION_SCHEMA: &str = "bifront.prediction/1";
pub const PROMPT_SCHEMA: &str = "bifront.prompt/1";
pub const ERROR_SCHEMA: &str = "bifront.error/1";
pub const REPORT_SCHEMA: &str = "bifront.report/1";

/// A scalar written as a decimal string with four places; reads strings or plain numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dec(pub f64);

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = if self.0 == 0.0 { 0.0 } else { self.0 };
        s.serialize_str(&format!("{v:.4}"))
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Dec;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a decimal string or a number")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Dec, E> {
                v.trim().parse().map(Dec).map_err(|_| E::custom(format!("not a number: {v:?}")))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Dec, E> {
                Ok(Dec(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Dec, E> {
                Ok(Dec(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Dec, E> {
                Ok(Dec(v as f64))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn to_dec(x: &[f64]) -> Vec<Dec> {
    x.iter().copied().map(Dec).collect()
}

pub fn from_dec(x: &[Dec]) -> Vec<f64> {
    x.iter().map(|d| d.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub x: Vec<Dec>,
    pub f: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: u64,
    pub generator: GenConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineConfig>,
    /// SHA-256 of the generator and pipeline settings.
    pub config_hash: String,
}

impl Provenance {
    pub fn new(generator: GenConfig, pipeline: Option<PipelineConfig>) -> Self {
        let mut p = Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: generator.seed,
            generator,
            pipeline,
            config_hash: String::new(),
        };
        let payload = serde_json::to_vec(&(&p.generator, &p.pipeline)).expect("serializable");
        p.config_hash = hex::encode(Sha256::digest(payload));
        p
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub schema: String,
    pub id: String,
    pub instance: ProblemInstance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<[Vec<Dec>; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<PointRecord>>,
    pub provenance: Provenance,
}

impl DatasetRecord {
    pub fn anchors(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.anchors.as_ref().map(|[a, b]| (from_dec(a), from_dec(b)))
    }

    /// Reference frontier with objectives recomputed from the stored decision vectors.
    pub fn reference(&self) -> Result<Option<Frontier>> {
        let Some(points) = &self.reference else { return Ok(None) };
        let points = points
            .iter()
            .map(|p| {
                let x = from_dec(&p.x);
                let f = self.instance.objectives(&x)?;
                Ok(FrontierPoint { x, f })
            })
            .collect::<Result<_>>()?;
        Ok(Some(Frontier { instance_id: self.id.clone(), points }))
    }
}

pub fn point_records(frontier: &Frontier) -> Vec<PointRecord> {
    frontier.points.iter().map(|p| PointRecord { x: to_dec(&p.x), f: p.f }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub schema: String,
    pub id: String,
    /// Parsed vectors; takes precedence over `text`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solutions: Option<Vec<Vec<Dec>>>,
    /// Raw assistant-format output to be parsed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortfall: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skipped_slots: Option<usize>,
}

impl PredictionRecord {
    pub fn from_vectors(id: &str, vectors: &[Vec<f64>]) -> Self {
        PredictionRecord {
            schema: PREDICTION_SCHEMA.into(),
            id: id.into(),
            solutions: Some(vectors.iter().map(|x| to_dec(x)).collect()),
            text: None,
            shortfall: None,
            skipped_slots: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PromptRecord {
    pub schema: String,
    pub id: String,
    pub n: usize,
    pub k: usize,
    pub system: String,
    pub user: String,
    pub assistant: String,
}

/// Model output to decode: a prompt record's `assistant` field or a bare `text`.
#[derive(Clone, Debug, Deserialize)]
pub struct CompletionRecord {
    pub id: String,
    pub n: usize,
    pub k: usize,
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub assistant: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    /// One-based input line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    pub message: String,
}

impl ErrorRecord {
    pub fn new(id: Option<&str>, line: Option<usize>, message: impl fmt::Display) -> Self {
        ErrorRecord { schema: ERROR_SCHEMA.into(), id: id.map(str::to_string), line, message: message.to_string() }
    }
}

/// One output line: either a payload record or an error record.
pub enum Emit<T> {
    Record(T),
    Error(ErrorRecord),
}

/// Non-empty lines of a JSONL file with their one-based line numbers.
pub fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

/// Parses each line as `T`, turning schema violations into error records.
pub fn parse_lines<T: for<'de> Deserialize<'de>>(path: &Path, schema: Option<&str>) -> Result<Vec<Emit<(usize, T)>>> {
    Ok(read_lines(path)?
        .into_iter()
        .map(|(line, text)| {
            let value: serde_json::Value = match serde_json::from_str(&text) {
                Ok(v) => v,
                Err(e) => return Emit::Error(ErrorRecord::new(None, Some(line), format!("{}: {e}", path.display()))),
            };
            let id = value.get("id").and_then(|v| v.as_str()).map(str::to_string);
            if let Some(want) = schema {
                let got = value.get("schema").and_then(|v| v.as_str());
                if got != Some(want) {
                    let msg = format!("{}: expected schema {want:?}, found {got:?}", path.display());
                    return Emit::Error(ErrorRecord::new(id.as_deref(), Some(line), msg));
                }
            }
            match serde_json::from_value(value) {
                Ok(r) => Emit::Record((line, r)),
                Err(e) => Emit::Error(ErrorRecord::new(id.as_deref(), Some(line), format!("{}: {e}", path.display()))),
            }
        })
        .collect())
}

/// Writes records in order and returns how many error records were written.
pub fn write_lines<T: Serialize>(path: &Path, items: &[Emit<T>]) -> Result<usize> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let mut errors = 0;
    for item in items {
        let line = match item {
            Emit::Record(r) => serde_json::to_string(r)?,
            Emit::Error(e) => {
                errors += 1;
                serde_json::to_string(e)?
            }
        };
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dec_format() {
        assert_eq!(serde_json::to_string(&Dec(-0.0)).unwrap(), "\"0.0000\"");
        assert_eq!(serde_json::to_string(&Dec(-12.5)).unwrap(), "\"-12.5000\"");
        let back: Vec<Dec> = serde_json::from_str("[\"1.2345\", 2, -0.5]").unwrap();
        assert_eq!(back, vec![Dec(1.2345), Dec(2.0), Dec(-0.5)]);
        assert!(serde_json::from_str::<Dec>("\"abc\"").is_err());
    }
}

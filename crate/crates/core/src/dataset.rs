//! Datasets of (input vector, output) pairs and their JSON documents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub format: Format,
    pub inputs: Vec<Vec<Float>>,
    pub outputs: Vec<Float>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetDoc {
    pub format: Format,
    pub pairs: Vec<PairDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub x: Vec<String>,
    pub y: String,
}

impl Dataset {
    pub fn new(format: Format, inputs: Vec<Vec<Float>>, outputs: Vec<Float>) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::ShapeMismatch(format!("{} inputs, {} outputs", inputs.len(), outputs.len())));
        }
        if inputs.is_empty() {
            return Err(Error::ShapeMismatch("empty dataset".into()));
        }
        let d = inputs[0].len();
        if d == 0 || inputs.iter().any(|x| x.len() != d) {
            return Err(Error::ShapeMismatch("inputs must share one positive dimension".into()));
        }
        let all = inputs.iter().flatten().chain(&outputs);
        if let Some(v) = all.clone().find(|v| !v.is_finite() || !format.is_canonical(v)) {
            return Err(Error::Domain(format!("dataset entry {v:?} is not a finite value of {format}")));
        }
        Ok(Dataset { format, inputs, outputs })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].len()
    }

    /// First pair of positions holding equal inputs (±0 count as equal).
    pub fn find_duplicate(&self) -> Option<(usize, usize)> {
        let mut keys: Vec<(Vec<Key>, usize)> = self.inputs.iter().enumerate().map(|(i, x)| (x.iter().map(key).collect(), i)).collect();
        keys.sort();
        keys.windows(2).filter(|w| w[0].0 == w[1].0).map(|w| (w[0].1.min(w[1].1), w[0].1.max(w[1].1))).min()
    }

    pub fn to_doc(&self) -> DatasetDoc {
        let f = &self.format;
        DatasetDoc {
            format: *f,
            pairs: self
                .inputs
                .iter()
                .zip(&self.outputs)
                .map(|(x, y)| PairDoc { x: x.iter().map(|v| f.format_text(v)).collect(), y: f.format_text(y) })
                .collect(),
        }
    }

    pub fn from_doc(doc: &DatasetDoc) -> Result<Self> {
        let f = doc.format;
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for pair in &doc.pairs {
            inputs.push(pair.x.iter().map(|s| f.parse_text(s)).collect::<Result<Vec<_>>>()?);
            outputs.push(f.parse_text(&pair.y)?);
        }
        Dataset::new(f, inputs, outputs)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("dataset documents serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: DatasetDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Dataset::from_doc(&doc)
    }
}

type Key = (bool, u128, i64);

/// Value key with zeros unified.
fn key(v: &Float) -> Key {
    match *v {
        Float::Finite { m: 0, .. } => (false, 0, 0),
        Float::Finite { neg, m, e } => (neg, m, e),
        _ => (true, u128::MAX, i64::MAX),
    }
}

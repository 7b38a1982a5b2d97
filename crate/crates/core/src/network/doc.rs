//! JSON network documents. Weights use the lossless text form.

use serde::{Deserialize, Serialize};

use super::{Activation, Layer, Network, Neuron};
use crate::error::{Error, Result};
use crate::format::Format;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub format: Format,
    pub activation: Activation,
    pub input_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Informational; checked against the actual count when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<usize>,
    pub layers: Vec<Vec<NeuronDoc>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeuronDoc {
    pub indices: Vec<usize>,
    pub weights: Vec<String>,
}

impl Network {
    pub fn to_doc(&self) -> NetworkDoc {
        let f = &self.format;
        NetworkDoc {
            format: *f,
            activation: self.activation,
            input_dim: self.input_dim,
            label: self.label.clone(),
            params: Some(self.count_params()),
            layers: self
                .layers
                .iter()
                .map(|l| {
                    l.neurons
                        .iter()
                        .map(|n| NeuronDoc {
                            indices: n.indices.clone(),
                            weights: n.weights.iter().map(|w| f.format_text(w)).collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &NetworkDoc) -> Result<Network> {
        let f = doc.format;
        let mut layers = Vec::with_capacity(doc.layers.len());
        for (l, layer) in doc.layers.iter().enumerate() {
            let mut neurons = Vec::with_capacity(layer.len());
            for (i, n) in layer.iter().enumerate() {
                let weights = n
                    .weights
                    .iter()
                    .map(|w| f.parse_text(w).map_err(|e| Error::Schema(format!("neuron ({l},{i}) weight {w:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                neurons.push(Neuron::new(n.indices.clone(), weights));
            }
            layers.push(Layer { neurons });
        }
        let net = Network { format: f, input_dim: doc.input_dim, activation: doc.activation, layers, label: doc.label.clone() };
        net.validate().map_err(|e| Error::Schema(e.to_string()))?;
        if let Some(p) = doc.params {
            if p != net.count_params() {
                return Err(Error::Schema(format!("document declares {p} parameters, network has {}", net.count_params())));
            }
        }
        Ok(net)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("network documents serialize")
    }

    pub fn from_json(s: &str) -> Result<Network> {
        let doc: NetworkDoc = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        Network::from_doc(&doc)
    }

    /// Like [`Network::from_json`], additionally requiring a specific format.
    pub fn from_json_in(s: &str, fmt: &Format) -> Result<Network> {
        let net = Network::from_json(s)?;
        if net.format != *fmt {
            return Err(Error::FormatMismatch(format!("document is {}, expected {fmt}", net.format)));
        }
        Ok(net)
    }
}

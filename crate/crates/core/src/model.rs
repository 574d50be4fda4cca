//! The JSON model format: a graph, a roof section, and optional metadata.
//!
//! ```json
//! {
//!   "vertices": ["a", "b"],
//!   "edges": [["a", "a"], ["a", "b"], ["b", "a"], ["b", "b"]],
//!   "roof": { "range": 1, "table": { "a": 1, "b": "3/2" } },
//!   "metadata": { "name": "example", "notes": "..." }
//! }
//! ```
//!
//! Rational values are integers or `"p/q"` strings. Roof table keys are
//! blocks: plain concatenation for single-character vertex labels,
//! comma-separated otherwise.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rational::{format_rational, parse_rational};
use crate::roof::RoofFunction;

/// Raw model file contents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub roof: RoofSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
    /// Recoding provenance, present in files written by the recoder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

/// Roof section: locally constant range and the per-block table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoofSection {
    pub range: usize,
    pub table: BTreeMap<String, RationalLiteral>,
}

/// Optional free-form metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// A rational in JSON: an integer or a `"p/q"` string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalLiteral {
    Int(i64),
    Text(String),
}

impl RationalLiteral {
    fn parse(&self) -> Result<crate::Rational> {
        match self {
            RationalLiteral::Int(n) => Ok(crate::rational::int(*n)),
            RationalLiteral::Text(s) => parse_rational(s),
        }
    }
}

/// A parsed and validated model.
#[derive(Debug, Clone)]
pub struct Model {
    pub graph: Graph,
    pub roof: RoofFunction,
    pub name: Option<String>,
}

/// Split a roof table key into vertex labels: comma-separated when a comma
/// is present, per-character otherwise.
fn split_key(graph: &Graph, key: &str) -> Result<Vec<VertexId>> {
    let tokens: Vec<String> = if key.contains(',') {
        key.split(',').filter(|t| !t.is_empty()).map(String::from).collect()
    } else {
        key.chars().map(|c| c.to_string()).collect()
    };
    tokens
        .iter()
        .map(|t| {
            graph
                .vertex(t)
                .ok_or_else(|| Error::UnknownEndpoint(t.clone()))
        })
        .collect()
}

impl ModelFile {
    /// Parse JSON text.
    pub fn from_json(text: &str) -> Result<ModelFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Serialize with stable field order and indentation.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Validate into a graph and roof function.
    pub fn build(&self) -> Result<Model> {
        let edge_refs: Vec<(&str, &str)> = self
            .edges
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        let graph = Graph::new(&self.vertices.iter().map(|s| s.as_str()).collect::<Vec<_>>(), &edge_refs)?;
        let mut table = BTreeMap::new();
        for (key, value) in &self.roof.table {
            let block = split_key(&graph, key)?;
            if block.len() != self.roof.range {
                return Err(Error::InvalidArgument(format!(
                    "roof key {key:?} has length {}, expected {}",
                    block.len(),
                    self.roof.range
                )));
            }
            table.insert(block, value.parse()?);
        }
        let roof = RoofFunction::new(&graph, self.roof.range, table)?;
        Ok(Model {
            graph,
            roof,
            name: self.metadata.as_ref().and_then(|m| m.name.clone()),
        })
    }

    /// Assemble a model file from parts.
    pub fn from_parts(graph: &Graph, roof: &RoofFunction, name: Option<&str>) -> ModelFile {
        let table = roof
            .table()
            .map(|(block, value)| {
                (
                    crate::graph::join_block(graph.labels(), block),
                    RationalLiteral::Text(format_rational(value)),
                )
            })
            .collect();
        ModelFile {
            vertices: graph.labels().to_vec(),
            edges: graph
                .edges()
                .map(|(u, v)| (graph.label(u).to_string(), graph.label(v).to_string()))
                .collect(),
            roof: RoofSection {
                range: roof.range(),
                table,
            },
            metadata: name.map(|n| Metadata {
                name: Some(n.to_string()),
                notes: None,
            }),
            provenance: None,
        }
    }
}

/// Load and validate a model from JSON text.
pub fn load_model(text: &str) -> Result<Model> {
    ModelFile::from_json(text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    const G2R12: &str = r#"{
        "vertices": ["a", "b"],
        "edges": [["a","a"], ["a","b"], ["b","a"], ["b","b"]],
        "roof": { "range": 1, "table": { "a": 1, "b": 2 } },
        "metadata": { "name": "g2r12" }
    }"#;

    #[test]
    fn parses_a_model() {
        let model = load_model(G2R12).unwrap();
        assert_eq!(model.graph.vertex_count(), 2);
        assert_eq!(model.roof.range(), 1);
        assert_eq!(*model.roof.sup(), int(2));
        assert_eq!(model.name.as_deref(), Some("g2r12"));
    }

    #[test]
    fn rational_literals() {
        let text = r#"{
            "vertices": ["a"],
            "edges": [["a","a"]],
            "roof": { "range": 1, "table": { "a": "7/3" } }
        }"#;
        let model = load_model(text).unwrap();
        assert_eq!(*model.roof.inf(), ratio(7, 3));
    }

    #[test]
    fn comma_keys_for_long_labels() {
        let text = r#"{
            "vertices": ["aa", "ab"],
            "edges": [["aa","aa"], ["aa","ab"], ["ab","aa"]],
            "roof": { "range": 2, "table": {
                "aa,aa": 1, "aa,ab": 1, "ab,aa": 2
            } }
        }"#;
        let model = load_model(text).unwrap();
        assert_eq!(model.roof.range(), 2);
    }

    #[test]
    fn error_paths() {
        assert!(matches!(
            load_model("{ not json"),
            Err(Error::Parse(_))
        ));
        let missing = r#"{
            "vertices": ["a", "b"],
            "edges": [["a","a"], ["a","b"], ["b","a"]],
            "roof": { "range": 1, "table": { "a": 1 } }
        }"#;
        assert!(matches!(load_model(missing), Err(Error::MissingBlock(_))));
        let dangling = r#"{
            "vertices": ["a", "b"],
            "edges": [["a","a"], ["a","b"]],
            "roof": { "range": 1, "table": { "a": 1, "b": 1 } }
        }"#;
        assert!(matches!(
            load_model(dangling),
            Err(Error::DanglingVertex(_, _))
        ));
    }

    #[test]
    fn round_trip_through_parts() {
        let model = load_model(G2R12).unwrap();
        let file = ModelFile::from_parts(&model.graph, &model.roof, Some("copy"));
        let back = file.build().unwrap();
        assert_eq!(back.graph, model.graph);
        assert_eq!(back.roof, model.roof);
        let reparsed = load_model(&file.to_json()).unwrap();
        assert_eq!(reparsed.graph, model.graph);
    }
}

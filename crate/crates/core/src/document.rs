//! JSON graph documents.
//!
//! ```json
//! {
//!   "version": "1",
//!   "interfaces": [
//!     { "id": "T", "methods": [ { "name": "stop", "values": ["DUMMY"] } ] }
//!   ],
//!   "adapters": [
//!     { "id": "TtoT2", "source": "T", "target": "T2",
//!       "default_output": [["bot"]],
//!       "entries": [ { "input": ["DUMMY"], "output": [["bot", "x"]] } ] }
//!   ]
//! }
//! ```
//!
//! `"bot"` may be written or left out anywhere; it is always injected.
//! Rendering omits it from interface declarations and writes it first in
//! every output set.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Adapter, AdapterGraph, DependencyEntry, Interface, ValueSet};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub version: String,
    pub interfaces: Vec<InterfaceDoc>,
    #[serde(default)]
    pub adapters: Vec<AdapterDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterfaceDoc {
    pub id: String,
    pub methods: Vec<MethodDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodDoc {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdapterDoc {
    pub id: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_output: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub entries: Vec<EntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub input: Vec<String>,
    pub output: Vec<Vec<String>>,
}

impl GraphDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if doc.version != FORMAT_VERSION {
            return Err(Error::Syntax {
                line: 1,
                column: 1,
                message: format!(
                    "unsupported document version `{}` (expected `{FORMAT_VERSION}`)",
                    doc.version
                ),
            });
        }
        Ok(doc)
    }

    pub fn to_graph(&self) -> Result<AdapterGraph> {
        let mut interfaces: BTreeMap<&str, Arc<Interface>> = BTreeMap::new();
        for decl in &self.interfaces {
            let iface = Interface::new(
                decl.id.clone(),
                decl.methods.iter().map(|m| (m.name.clone(), m.values.iter())),
            )?;
            if interfaces.insert(&decl.id, Arc::new(iface)).is_some() {
                return Err(Error::DuplicateId {
                    kind: "interface",
                    id: decl.id.clone(),
                });
            }
        }
        let resolve = |id: &str, adapter: &str| {
            interfaces
                .get(id)
                .cloned()
                .ok_or_else(|| Error::UnknownInterface {
                    id: id.to_string(),
                    referenced_by: Some(adapter.to_string()),
                })
        };
        let adapters = self
            .adapters
            .iter()
            .map(|decl| {
                let source = resolve(&decl.source, &decl.id)?;
                let target = resolve(&decl.target, &decl.id)?;
                let entries = decl.entries.iter().map(|e| DependencyEntry {
                    input: e.input.clone(),
                    output: e.output.clone(),
                });
                Adapter::new(
                    decl.id.clone(),
                    source,
                    target,
                    entries,
                    decl.default_output.as_deref(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        AdapterGraph::new(interfaces.into_values(), adapters)
    }

    /// Canonical document for a graph: interfaces and adapters in id order,
    /// entries in canonical input order.
    pub fn from_graph(graph: &AdapterGraph) -> Self {
        let interfaces = graph
            .interfaces()
            .map(|iface| InterfaceDoc {
                id: iface.id().to_string(),
                methods: iface
                    .methods()
                    .iter()
                    .map(|m| MethodDoc {
                        name: m.name().to_string(),
                        values: m
                            .domain()
                            .values()
                            .iter()
                            .skip(1)
                            .map(|v| v.name().to_string())
                            .collect(),
                    })
                    .collect(),
            })
            .collect();
        let adapters = graph
            .adapters()
            .map(|adapter| {
                let target = adapter.target();
                let render_sets = |sets: &[ValueSet]| -> Vec<Vec<String>> {
                    target
                        .methods()
                        .iter()
                        .zip(sets)
                        .map(|(m, s)| m.domain().names(*s).into_iter().map(str::to_string).collect())
                        .collect()
                };
                let default_output = adapter
                    .default_output()
                    .iter()
                    .any(|s| *s != ValueSet::BOTTOM)
                    .then(|| render_sets(adapter.default_output()));
                let entries = adapter
                    .entries()
                    .map(|(input, output)| EntryDoc {
                        input: adapter
                            .source()
                            .methods()
                            .iter()
                            .zip(input)
                            .map(|(m, &i)| m.domain().name(i).to_string())
                            .collect(),
                        output: render_sets(output),
                    })
                    .collect();
                AdapterDoc {
                    id: adapter.id().to_string(),
                    source: adapter.source().id().to_string(),
                    target: target.id().to_string(),
                    default_output,
                    entries,
                }
            })
            .collect();
        GraphDocument {
            version: FORMAT_VERSION.to_string(),
            interfaces,
            adapters,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("documents always serialize");
        text.push('\n');
        text
    }
}

/// Parses and validates a graph document.
pub fn parse_document(text: &str) -> Result<AdapterGraph> {
    GraphDocument::from_json(text)?.to_graph()
}

/// Renders a graph as a canonical JSON document.
pub fn render_document(graph: &AdapterGraph) -> String {
    GraphDocument::from_graph(graph).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
      "version": "1",
      "interfaces": [
        { "id": "A", "methods": [ { "name": "m", "values": ["x", "bot"] } ] },
        { "id": "B", "methods": [ { "name": "n", "values": ["y", "z"] } ] }
      ],
      "adapters": [
        { "id": "ab", "source": "A", "target": "B",
          "default_output": [["z"]],
          "entries": [ { "input": ["x"], "output": [["y"]] } ] }
      ]
    }"#;

    #[test]
    fn parse_and_round_trip() {
        let graph = parse_document(SMALL).unwrap();
        let ab = graph.adapter("ab").unwrap();
        assert_eq!(ab.lookup(&[1]), &[ValueSet::from_bits(0b011)]);
        assert_eq!(ab.lookup(&[0]), &[ValueSet::from_bits(0b101)]);
        let text = render_document(&graph);
        assert_eq!(parse_document(&text).unwrap(), graph);
        assert_eq!(render_document(&parse_document(&text).unwrap()), text);
        assert!(text.contains("\"default_output\""));
    }

    #[test]
    fn errors_name_offenders() {
        let bad = SMALL.replace(r#"[["y"]]"#, r#"[["q"]]"#);
        match parse_document(&bad) {
            Err(Error::UnknownValue { owner, method, value }) => {
                assert_eq!((owner.as_str(), method.as_str(), value.as_str()), ("ab", "n", "q"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = SMALL.replace(r#""target": "B""#, r#""target": "Video9""#);
        assert!(matches!(
            parse_document(&bad),
            Err(Error::UnknownInterface { ref id, referenced_by: Some(ref by) }) if id == "Video9" && by == "ab"
        ));
        let bad = SMALL.replace(r#""version": "1""#, r#""version": "2""#);
        assert!(matches!(parse_document(&bad), Err(Error::Syntax { .. })));
        match parse_document("{\n  \"version\": \"1\",\n  oops }") {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let extra = SMALL.replace(r#""version": "1","#, r#""version": "1", "extra": 1,"#);
        assert!(matches!(parse_document(&extra), Err(Error::Syntax { .. })));
    }
}

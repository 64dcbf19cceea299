//! Versioned, byte-deterministic JSON serialization of level graphs
//! and divisors. Serialization routes through a sorted-key value tree
//! so identical inputs always produce identical bytes; parsing
//! rejects unknown fields and unsupported versions.

use crate::graph::{BoundaryDivisor, Decoration, DivisorKind, Edge, Leg, LevelGraph, Vertex};
use crate::stratum::{IndexClass, Signature, StratumError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("unsupported document version {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("document signature invalid: {0}")]
    Signature(#[from] StratumError),
    #[error("document graph fails validation: {0}")]
    Graph(#[from] crate::graph::ValidationError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureDoc {
    pub genus: u32,
    pub orders: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDoc {
    pub id: usize,
    pub genus: u32,
    pub level: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegDoc {
    pub point: u32,
    pub order: i64,
    pub vertex: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: usize,
    pub v_a: usize,
    pub order_a: i64,
    pub v_b: usize,
    pub order_b: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecorationsDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub irreducible: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub version: u32,
    pub signature: SignatureDoc,
    pub vertices: Vec<VertexDoc>,
    pub legs: Vec<LegDoc>,
    pub edges: Vec<EdgeDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decorations: Option<DecorationsDoc>,
}

impl GraphDocument {
    pub fn from_graph(sig: &Signature, graph: &LevelGraph) -> Self {
        GraphDocument {
            version: FORMAT_VERSION,
            signature: SignatureDoc { genus: sig.genus(), orders: sig.orders().to_vec() },
            vertices: graph
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| VertexDoc { id, genus: v.genus, level: v.level })
                .collect(),
            legs: graph
                .legs
                .iter()
                .map(|l| LegDoc { point: l.point, order: l.order, vertex: l.vertex })
                .collect(),
            edges: graph
                .edges
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeDoc {
                    id,
                    v_a: e.a,
                    order_a: e.order_a,
                    v_b: e.b,
                    order_b: e.order_b,
                })
                .collect(),
            decorations: None,
        }
    }

    pub fn from_divisor(sig: &Signature, d: &BoundaryDivisor) -> Self {
        let mut doc = Self::from_graph(sig, &d.graph);
        let kind = match d.kind {
            DivisorKind::Vertical => "vertical",
            DivisorKind::HorizontalIrreducible => "horizontal_irreducible",
            DivisorKind::HorizontalSeparating => "horizontal_separating",
        };
        let mut dec = DecorationsDoc {
            kind: Some(kind.into()),
            index: None,
            modulus: None,
            irreducible: None,
        };
        match &d.decoration {
            Some(Decoration::Index(c)) => {
                dec.index = Some(c.index());
                dec.modulus = Some(c.modulus());
            }
            Some(Decoration::Irreducible) => {
                dec.irreducible = Some(true);
            }
            None => {}
        }
        doc.decorations = Some(dec);
        doc
    }

    /// Byte-deterministic JSON: keys sorted, decimal integers, no
    /// floats.
    pub fn to_json(&self) -> Result<String, DocError> {
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&value)?)
    }

    pub fn parse(input: &str) -> Result<Self, DocError> {
        let doc: GraphDocument = serde_json::from_str(input)?;
        if doc.version != FORMAT_VERSION {
            return Err(DocError::UnsupportedVersion(doc.version));
        }
        Ok(doc)
    }

    pub fn signature(&self) -> Result<Signature, DocError> {
        Ok(Signature::new(self.signature.genus, self.signature.orders.clone())?)
    }

    /// Reconstructs and validates the graph against the embedded
    /// signature.
    pub fn to_graph(&self) -> Result<(Signature, LevelGraph), DocError> {
        let sig = self.signature()?;
        let graph = LevelGraph {
            vertices: self
                .vertices
                .iter()
                .map(|v| Vertex { genus: v.genus, level: v.level })
                .collect(),
            legs: self
                .legs
                .iter()
                .map(|l| Leg { point: l.point, order: l.order, vertex: l.vertex })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge { a: e.v_a, order_a: e.order_a, b: e.v_b, order_b: e.order_b })
                .collect(),
        };
        graph.validate(&sig)?;
        Ok((sig, graph))
    }

    /// Reconstructs a divisor, carrying decorations when present.
    pub fn to_divisor(&self) -> Result<(Signature, BoundaryDivisor), DocError> {
        let (sig, graph) = self.to_graph()?;
        let kind = match self.decorations.as_ref().and_then(|d| d.kind.as_deref()) {
            Some("horizontal_irreducible") => DivisorKind::HorizontalIrreducible,
            Some("horizontal_separating") => DivisorKind::HorizontalSeparating,
            _ => DivisorKind::Vertical,
        };
        let decoration = match self.decorations.as_ref() {
            Some(d) if d.irreducible == Some(true) => {
                Some(Decoration::Irreducible)
            }
            Some(d) => match (d.index, d.modulus) {
                (Some(i), Some(m)) => Some(Decoration::Index(IndexClass::new(i, m)?)),
                _ => None,
            },
            None => None,
        };
        Ok((sig, BoundaryDivisor { graph, kind, decoration }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::merge_zeroes;

    fn sample() -> (Signature, LevelGraph) {
        let sig = Signature::new(2, vec![1, 1]).unwrap();
        let graph = merge_zeroes(&sig).unwrap().result;
        (sig, graph)
    }

    #[test]
    fn round_trip_is_canonical_identity() {
        let (sig, graph) = sample();
        let doc = GraphDocument::from_graph(&sig, &graph);
        let json = doc.to_json().unwrap();
        let parsed = GraphDocument::parse(&json).unwrap();
        let (sig2, graph2) = parsed.to_graph().unwrap();
        assert_eq!(sig, sig2);
        assert_eq!(graph.canonical_form(), graph2.canonical_form());
    }

    #[test]
    fn serialization_is_byte_deterministic() {
        let (sig, graph) = sample();
        let a = GraphDocument::from_graph(&sig, &graph).to_json().unwrap();
        let b = GraphDocument::from_graph(&sig, &graph).to_json().unwrap();
        assert_eq!(a.as_bytes(), b.as_bytes());
        // keys appear sorted
        let edges_pos = a.find("\"edges\"").unwrap();
        let legs_pos = a.find("\"legs\"").unwrap();
        let version_pos = a.find("\"version\"").unwrap();
        assert!(edges_pos < legs_pos && legs_pos < version_pos);
    }

    #[test]
    fn unknown_fields_and_versions_rejected() {
        let (sig, graph) = sample();
        let json = GraphDocument::from_graph(&sig, &graph).to_json().unwrap();
        let with_extra = json.replacen("{", "{\n  \"surprise\": 1,", 1);
        assert!(GraphDocument::parse(&with_extra).is_err());
        let wrong_version = json.replace("\"version\": 1", "\"version\": 2");
        assert!(matches!(
            GraphDocument::parse(&wrong_version),
            Err(DocError::UnsupportedVersion(2))
        ));
    }

    #[test]
    fn divisor_round_trip_keeps_decorations() {
        let sig = Signature::new(1, vec![2, -1, -1]).unwrap();
        let d = crate::connectivity::dhirr_divisor(&sig).unwrap();
        let doc = GraphDocument::from_divisor(&sig, &d);
        let (_, d2) = GraphDocument::parse(&doc.to_json().unwrap())
            .unwrap()
            .to_divisor()
            .unwrap();
        assert_eq!(d.kind, d2.kind);
        assert_eq!(d.decoration, d2.decoration);
    }

    #[test]
    fn invalid_graph_rejected_on_parse() {
        let (sig, graph) = sample();
        let mut doc = GraphDocument::from_graph(&sig, &graph);
        doc.edges[0].order_a += 1;
        let json = doc.to_json().unwrap();
        assert!(GraphDocument::parse(&json).unwrap().to_graph().is_err());
    }
}

//! JSON document form of a [`Topology`].
//!
//! ```json
//! { "n": 8, "m": 2, "switched": false,
//!   "edges": [ { "kind": "CC", "head": [1], "tail": [2], "current_limit_a": 0.5,
//!                "head_weight": "1", "tail_weight": "-1" } ] }
//! ```
//!
//! Weights are optional on input. When present they are written as exact
//! `numerator/denominator` strings and must agree with the edge kind.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeKind, Hyperedge, Topology};
use crate::scalar::Weight;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyDoc {
    pub n: usize,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub switched: bool,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub kind: EdgeKind,
    pub head: Vec<usize>,
    pub tail: Vec<usize>,
    pub current_limit_a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head_weight: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_weight: Option<String>,
}

impl From<&Topology> for TopologyDoc {
    fn from(t: &Topology) -> Self {
        TopologyDoc {
            n: t.n(),
            m: t.modules(),
            switched: t.is_switched(),
            edges: t
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    kind: e.kind(),
                    head: e.head().to_vec(),
                    tail: e.tail().to_vec(),
                    current_limit_a: e.current_limit(),
                    head_weight: Some(e.head_weight().to_string()),
                    tail_weight: Some(e.tail_weight().to_string()),
                })
                .collect(),
        }
    }
}

impl TryFrom<TopologyDoc> for Topology {
    type Error = Error;

    fn try_from(doc: TopologyDoc) -> Result<Topology> {
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (l, e) in doc.edges.into_iter().enumerate() {
            let edge = Hyperedge::new(e.kind, e.head, e.tail, e.current_limit_a)
                .map_err(|err| Error::InvalidEdge(format!("e_{}: {err}", l + 1)))?;
            check_weight(l, "head_weight", e.head_weight.as_deref(), edge.head_weight())?;
            check_weight(l, "tail_weight", e.tail_weight.as_deref(), edge.tail_weight())?;
            edges.push(edge);
        }
        Topology::new(doc.n, doc.m, doc.switched, edges)
    }
}

fn check_weight(l: usize, field: &str, given: Option<&str>, expected: Weight) -> Result<()> {
    let Some(s) = given else { return Ok(()) };
    let w: Weight =
        s.trim().parse().map_err(|_| Error::InvalidEdge(format!("e_{}: {field} {s:?} is not a rational", l + 1)))?;
    if w != expected {
        return Err(Error::InvalidEdge(format!(
            "e_{}: {field} {s} does not match the {expected} implied by the edge kind",
            l + 1
        )));
    }
    Ok(())
}

//! Equalizers as weighted directed hyperedges and the incidence matrices
//! they assemble into.

mod edge;
pub mod schema;
mod topology;

pub use edge::{incidence_vector, EdgeKind, Hyperedge};
pub use schema::{EdgeDoc, TopologyDoc};
pub use topology::{make_topology, Topology, TopologyKind};

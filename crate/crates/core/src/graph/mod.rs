//! Question-skill relation graph and GCN embedding propagation.
//!
//! The graph is bipartite, so alternating hops reach a question's skills
//! (one layer), then questions sharing those skills (two layers), and so on.
//! Every node averages the linearly transformed embeddings of itself and a
//! fixed-width sample of its neighbors, then applies ReLU.

mod gcn;
mod relation;
mod sampling;

pub use gcn::{gcn_layer, propagate, AggregatedEmbeddings, GcnConfig, GcnLayerVars, MAX_GCN_LAYERS};
pub use relation::{build_graph, read_edge_list, write_edge_list, DegreeStats, RelationGraph};
pub use sampling::{sample_neighbors, sample_row, NeighborTable};

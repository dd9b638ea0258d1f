//! F-avoiding orientations of loopless multigraphs.
//!
//! Given a multigraph G and a forbidden set F(v) ⊆ {0, …, d(v)} per vertex,
//! find an orientation whose out-degree d⁺(v) avoids F(v) at every vertex.

pub mod driver;
pub mod experiment;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod io;
pub mod lasso;
pub mod lists;
pub mod oracle;
pub mod orient;
pub mod reductions;
pub mod walk;

pub use graph::{EdgeId, GraphError, MultiGraph, Orientation, Vertex};
pub use lists::{ForbiddenLists, ListError};
pub use oracle::{oracle_decide, verify, OracleResult, OracleStatus};

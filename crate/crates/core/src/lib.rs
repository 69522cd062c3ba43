//! Time-dependent multimodal routing over arrival-time-function graphs.
//!
//! The crate bundles the full query stack:
//!
//! * [`model`] and [`atf`]: the graph model and the walk + timetable arrival
//!   time function algebra (evaluation, chaining, merging).
//! * [`ttn`]: timetable-node indices that answer the next departure on every
//!   outgoing edge of a node with one binary search, either through a
//!   combined search tree ([`ttn::CstIndex`]) or through fractional cascading
//!   ([`ttn::FcIndex`]).
//! * [`tch`]: time-dependent contraction hierarchies without witness search,
//!   with down-reachable bounding boxes.
//! * [`search`]: Dijkstra, TTN-accelerated Dijkstra and up-then-down forward
//!   search over the hierarchy.
//! * [`csa`]: the connection scan baseline.
//! * [`datagen`], [`bench`] and [`cache`]: ingestion, synthetic graphs,
//!   the benchmark harness and the binary cache container.

pub mod atf;
pub mod bench;
pub mod cache;
pub mod csa;
pub mod datagen;
mod error;
pub mod model;
pub mod search;
pub mod tch;
mod time;
pub mod ttn;

pub use error::{Error, Result};
pub use model::{
    Connection, Edge, EdgeAtf, Journey, Leg, LegMode, NodeId, NodeRecord, Timetable,
    TransportGraph, TripId,
};
pub use search::{Algorithm, Engine, Heuristic, QueryRequest, QueryResult};
pub use time::{Duration, TimePoint};

//! Agent-based simulator of a search-engine advertising market.
//!
//! Two cellular automata share the stage clock: a lattice of search users whose
//! intent evolves under word-of-mouth pressure from their neighbours, and a lattice
//! of advertisers who compete in per-query slot auctions. Every query lands on a
//! random advertiser cell, the same-topic advertisers around that cell are ranked by
//! bid times proximity, and the user scans the resulting slate with a cascade click
//! model.
//!
//! The crate is `no_std` (with `alloc`); file formats, the CLI and parallel
//! replication live in the `expsea` companion crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod auction;
pub mod casa;
pub mod casu;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod rng;
pub mod runner;
pub mod scenario;
pub mod session;
pub mod topic;

pub use error::{ConfigError, Error};
pub use grid::{Cell, Dims, DistanceMetric, Lattice, Neighborhood, Topology};
pub use runner::{run_replication, ReplicationReport, RunReport};
pub use scenario::ScenarioConfig;
pub use topic::{Topic, TopicMap};

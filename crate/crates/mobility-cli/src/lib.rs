//! IO, file formats, orchestration and the `mobility` binary for the
//! social mobility index pipeline. The algorithms live in `mobility-core`;
//! this crate owns everything that touches the filesystem.

pub mod cli;
pub mod config;
pub mod error;
pub mod event_store;
pub mod external;
pub mod pipeline;
pub mod regions_io;
pub mod schema;
pub mod stores;
pub mod synth;

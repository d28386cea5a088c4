//! Core computations for the social mobility index pipeline.
//!
//! Everything in this crate is pure and deterministic: geodesic math on the
//! WGS-84 ellipsoid, per-user weekly travel dispersion, exact-sum regional
//! aggregation, pre/post reduction statistics, offline change-point
//! detection, and correlation panels. IO, file formats and the CLI live in
//! the companion `mobility-cli` crate.
//!
//! The crate is `no_std` (with `alloc`); all floating-point transcendentals
//! go through `libm` so results are identical across platforms and thread
//! counts.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod changepoint;
pub mod correlate;
pub mod geo;
pub mod ingest;
pub mod mobility;
pub mod reduction;
pub mod stats;

pub use geo::{Point, Region, RegionIndex, RegionLevel};
pub use ingest::{GeoEvent, PlaceType, RawEvent, Resolution, SkipReason};

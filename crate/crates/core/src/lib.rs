//! Procedural yarn geometry.
//!
//! Fibers are twisted into plies and plies into yarns by recursive helix
//! mapping ([`hierarchy`]), hair and loop flyaways are cut out of the result
//! ([`flyaway`]), parameter sets are drawn from guided intervals
//! ([`sampler`]), and annotated grayscale renders are written as datasets
//! ([`raster`], [`dataset`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod edit;
pub mod error;
pub mod flyaway;
pub mod format;
pub mod hierarchy;
pub mod inspect;
pub mod params;
pub mod polyline;
pub mod raster;
pub mod rng;
pub mod sampler;

pub use error::{Error, Result};
pub use hierarchy::{LevelSpec, PlacementMode};
pub use params::{BuildConfig, FlyawayParams, RawYarnParams, YarnParams};
pub use polyline::{PolyLineSet, Strip, Vec3};
pub use rng::RngStream;

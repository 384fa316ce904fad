// SPDX-License-Identifier: Apache-2.0

//! Deployment analysis for wireless power beacons under a radiation-safety
//! constraint.
//!
//! A power beacon with `N` antennas either keeps them co-located at the cell
//! center (height `h_C`) or spreads them evenly on a ring of radius `r`
//! (height `h_D`). The ring height is chosen so the peak ground radiation
//! density matches the co-located beacon's. This crate computes those
//! heights, the fading-averaged harvested DC power and transfer efficiency
//! of both deployments, the efficiency-optimal ring radius, and a Monte
//! Carlo simulator that checks all of it independently.
//!
//! Modules:
//!
//! - [`scenario`]: constants, configuration file, validation.
//! - [`geometry`]: antenna layout, radiation density, safe heights.
//! - [`harvest`]: harvested power and efficiency in closed form.
//! - [`polyroots`]: real polynomial roots via Sturm sequences.
//! - [`optimize`]: optimal ring radius.
//! - [`montecarlo`]: stochastic validation.
//! - [`table`]: CSV sweep tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod harvest;
pub mod montecarlo;
pub mod optimize;
pub mod polyroots;
pub mod quadrature;
pub mod scenario;
pub mod search;
pub mod table;

pub use error::{Error, Result};
pub use geometry::{DaeLayout, GroundPoint, Hotspot};
pub use harvest::PowerReport;
pub use montecarlo::{ChannelDraw, PhaseMode, SimResult};
pub use optimize::{Method, RadiusSolution};
pub use polyroots::{Polynomial, RootBracket, SturmChain};
pub use scenario::{Config, Deployment, Rectenna, Scenario};
pub use table::SweepTable;

/// Version recorded in every output table.
pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

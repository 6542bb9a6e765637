//! # metafocus
//!
//! Design and analysis of near-field focusing metasurfaces for multi-focus
//! wireless power transfer.
//!
//! The pipeline has four stages:
//!
//! 1. [`geometry`] describes the scene: frequency, the unit-cell lattice on
//!    z = 0, a point feed at z = −F and weighted focus targets at z > 0.
//! 2. [`synthesis`] computes each cell's compensation phase: the feed path
//!    phase plus the argument of the weighted sum of phasors toward the foci,
//!    optionally quantized.
//! 3. [`propagation`] forms the transmitted aperture field and evaluates it
//!    anywhere on the transmission side with a discrete Rayleigh–Sommerfeld
//!    sum.
//! 4. [`metrics`] finds the foci in sampled planes and measures depth and
//!    width of focus, power ratio and focusing efficiency.
//!
//! [`calibration`] inverts the weight-to-ratio relation for two-focus
//! designs, and [`cli`] wraps everything in the `metafocus` binary.
//!
//! ```no_run
//! use metafocus::prelude::*;
//!
//! let scenario = Scenario::preset("paper-2to1").unwrap();
//! let planes = default_planes(&scenario, &[PlaneKind::Xoz, PlaneKind::Xoy], 2.0);
//! let sim = simulate(&scenario, None, &planes, &AnalysisOptions::default()).unwrap();
//! println!("{}", sim.report.to_json());
//! ```
//!
//! Runnable walkthroughs live in `examples/`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod geometry;
pub mod metrics;
pub mod pipeline;
pub mod propagation;
pub mod synthesis;
pub mod warning;

pub use error::{Error, Result};

#[cfg(test)]
extern crate self as metafocus;


pub mod prelude {
    pub use crate::calibration::{calibrate_weights, ratio_for_delta, CalibrationResult, Calibrator};
    pub use crate::config::RunDocument;
    pub use crate::error::{Error, Result};
    pub use crate::export::{read_phase_map, render_heatmap, write_field_grid, write_phase_map};
    pub use crate::geometry::{
        cell_center, feed_distance, focus_distance, validate_scenario, ApertureGrid, FeedModel, FocusTarget,
        FrequencySpec, Point3, Scenario, PRESET_NAMES,
    };
    pub use crate::metrics::{
        analyze, dof, find_peaks, focusing_efficiency, half_power_region, half_power_regions, peak_ratio_db, wof,
        AnalysisOptions, FocusReport, WofConvention,
    };
    pub use crate::pipeline::{default_planes, simulate, Simulation};
    pub use crate::propagation::{
        aperture_field, incident_power, propagate, propagate_plane, propagate_point, ApertureField, ComplexFieldGrid,
        ObservationSpec, PlaneKind, PlaneSpec,
    };
    pub use crate::synthesis::{phase_feed, phase_foci, phase_total, quantize_phase, synthesize, PhaseMap};
}

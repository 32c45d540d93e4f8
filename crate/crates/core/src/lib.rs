//! Topological change-point detection on streams of point clouds and images.
//!
//! The pipeline has three stages:
//!
//! 1. Each frame is turned into a filtered simplicial complex, either a
//!    Vietoris–Rips complex ([`rips`]) for point clouds or a lower-star
//!    filtration ([`lower_star`]) for scalar grids.
//! 2. [`persistence`] reduces the complex to a persistence diagram in tilted
//!    `(birth, persistence)` coordinates for homology dimensions 0 and 1.
//! 3. [`summarize`] bins each diagram over birth time with persistence as mass,
//!    and [`detect`] runs a four-window weighted ℓ2 scan statistic over the
//!    resulting stream of distributions, raising an alarm at the first frame
//!    whose statistic crosses a threshold.
//!
//! [`synth`] provides seeded scenario generators and [`format`] the text
//! formats used by the command line tool.

pub mod detect;
pub mod error;
pub mod format;
pub mod lower_star;
pub mod persistence;
pub mod rips;
pub mod summarize;
pub mod synth;
pub mod types;

pub use detect::{calibrate_threshold, chi_statistic, Detector, DetectorConfig, StepOutcome};
pub use error::{Error, Result};
pub use lower_star::build_lower_star;
pub use persistence::{compute_persistence, h0_union_find, Dimensions, Pairing, ReductionOptions};
pub use rips::{build_rips, RipsConfig};
pub use summarize::{bin_diagram, train_breakpoints, EmpiricalDistribution, HistogramModel};
pub use types::{
    FilteredComplex, PersistenceDiagram, PersistencePair, PointCloud, ScalarGrid, Simplex,
    Violation,
};

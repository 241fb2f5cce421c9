//! Calibration error and volume bias of probabilistic segmentations.
//!
//! The crate measures per-subject and pooled calibration error (exact and
//! binned), soft-volume bias and Dice, checks the bound
//! `CE >= binned ECE >= |bias|`, fits Platt recalibration, runs cohort-level
//! correlation and Pareto analyses, and generates seeded synthetic data.

pub mod cohort;
pub mod error;
pub mod metrics;
pub mod recalibration;
pub mod rng;
pub mod sum;
pub mod synthetic;
pub mod theory;
pub mod volume;

pub use error::{Error, Result};
pub use metrics::{BinningScheme, ReliabilityCurve};
pub use volume::{DiscreteDataset, Dims, LabelVolume, ProbVolume};

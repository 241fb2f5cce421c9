//! File formats, cohort manifests and subcommand implementations behind the
//! `calvol` binary.

pub mod atomic;
pub mod commands;
pub mod container;
pub mod manifest;
pub mod report;

pub use commands::Settings;
pub use container::{read_volume, ContainerError, VolumeHeader, VolumeKind};
pub use manifest::{CohortManifest, SubjectEntry};
pub use report::ReportRow;

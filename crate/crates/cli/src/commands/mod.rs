//! Implementations of the `calvol` subcommands.
//!
//! Each command computes its result in memory and returns it; nothing is
//! written until every subject has been processed, so a failing run leaves
//! no partial output behind.

mod analyze;
mod calibrate;
mod correlate;
mod counterexample;
mod curve;
mod pareto;
mod simulate;
mod verify;

pub use analyze::{analyze, AnalyzeReport};
pub use calibrate::{calibrate, CalibrateOptions, CalibrationOutput, InputKind, PlattSummary};
pub use correlate::{correlate, CorrelateOptions};
pub use counterexample::{counterexample, CounterexampleOutput, SummaryRow};
pub use curve::curve;
pub use pareto::{pareto, ParetoTable};
pub use simulate::{simulate, SimulationConfig};
pub use verify::{verify_bound, BoundTable};

use std::path::Path;

use anyhow::{bail, Context};
use calvol_core::{BinningScheme, DiscreteDataset, LabelVolume, ProbVolume};
use rayon::prelude::*;

use crate::container;
use crate::manifest::SubjectEntry;

/// Settings shared by the subcommands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub bins: usize,
    pub threshold: f64,
    /// Worker threads; `None` uses one per core.
    pub jobs: Option<usize>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            bins: 20,
            threshold: 0.5,
            jobs: None,
        }
    }
}

impl Settings {
    pub fn scheme(&self) -> anyhow::Result<BinningScheme> {
        Ok(BinningScheme::new(self.bins)?)
    }

    /// Maps `f` over `items` on a pool of `jobs` threads, keeping input order.
    /// The first error in input order wins.
    pub fn par_map<T, U, F>(&self, items: &[T], f: F) -> anyhow::Result<Vec<U>>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> anyhow::Result<U> + Sync + Send,
    {
        if self.jobs == Some(0) {
            bail!("--jobs must be at least 1");
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.unwrap_or(0))
            .build()?;
        pool.install(|| items.par_iter().map(&f).collect::<Vec<_>>())
            .into_iter()
            .collect()
    }
}

/// A subject's prediction (with its mask attached) and reference.
pub(crate) struct LoadedSubject {
    pub prob: ProbVolume,
    pub label: LabelVolume,
}

impl LoadedSubject {
    pub fn dataset(&self) -> anyhow::Result<DiscreteDataset> {
        Ok(DiscreteDataset::from_volumes(&self.prob, &self.label)?)
    }
}

pub(crate) fn load_mask(path: &Path, dims: calvol_core::Dims) -> anyhow::Result<Vec<bool>> {
    let (mask, mask_dims) = container::read_mask(path)?;
    if mask_dims != dims {
        bail!(
            "{}: mask dims {:?} differ from prediction dims {:?}",
            path.display(),
            mask_dims,
            dims
        );
    }
    Ok(mask)
}

pub(crate) fn load_subject(entry: &SubjectEntry) -> anyhow::Result<LoadedSubject> {
    let load = || -> anyhow::Result<LoadedSubject> {
        let mut prob = container::read_prob(&entry.prob_path)?;
        let label = container::read_label(&entry.label_path)?;
        if let Some(mask_path) = &entry.mask_path {
            let mask = load_mask(mask_path, prob.dims())?;
            prob = prob.with_mask(Some(mask))?;
        }
        Ok(LoadedSubject { prob, label })
    };
    load().with_context(|| format!("subject {}", entry.id))
}

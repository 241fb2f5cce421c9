use anyhow::bail;
use calvol_core::metrics::reliability_curve;
use calvol_core::{DiscreteDataset, ReliabilityCurve};

use super::{load_subject, Settings};
use crate::manifest::CohortManifest;

/// Reliability curve of one subject, or of all subjects pooled.
pub fn curve(
    manifest: &CohortManifest,
    subject: Option<&str>,
    settings: &Settings,
) -> anyhow::Result<ReliabilityCurve> {
    let entries: Vec<_> = match subject {
        Some(id) => match manifest.subject(id) {
            Some(e) => vec![e.clone()],
            None => bail!("subject {id} is not in the manifest"),
        },
        None => manifest.subjects.clone(),
    };
    let parts = settings.par_map(&entries, |e| load_subject(e)?.dataset())?;
    Ok(reliability_curve(&DiscreteDataset::concat(&parts), &settings.scheme()?)?)
}

use std::path::Path;

use anyhow::{bail, Context};
use calvol_core::cohort::{self, MetricField, SubjectMetrics};

use crate::manifest::CohortManifest;
use crate::report::{read_csv, to_csv, CorrelationRow, ReportRow};

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelateOptions {
    pub x: MetricField,
    pub y: MetricField,
    /// Key of the `key=value` tag to group subjects by.
    pub group_by: Option<String>,
}

/// Group label of the row covering every subject.
pub const ALL_GROUP: &str = "all";

/// Correlates two report columns over the subject rows of `report`, first
/// for all subjects and then per tag group. Tags come from `manifest`,
/// matched on subject id.
pub fn correlate(
    report: &Path,
    manifest: Option<&CohortManifest>,
    opts: &CorrelateOptions,
) -> anyhow::Result<Vec<u8>> {
    let rows: Vec<ReportRow> = read_csv(report)?;
    let subjects: Vec<SubjectMetrics> = rows
        .into_iter()
        .filter(|r| !r.is_summary())
        .map(|r| {
            let tags = match manifest {
                Some(m) => m
                    .subject(&r.subject_id)
                    .map(|e| e.tags.clone())
                    .with_context(|| format!("subject {} is not in the manifest", r.subject_id))?,
                None => Vec::new(),
            };
            Ok(r.into_metrics(tags))
        })
        .collect::<anyhow::Result<_>>()?;
    if opts.group_by.is_some() && manifest.is_none() {
        bail!("grouping by tag needs the cohort manifest");
    }

    let xs: Vec<f64> = subjects.iter().map(|s| s.field(opts.x)).collect();
    let ys: Vec<f64> = subjects.iter().map(|s| s.field(opts.y)).collect();
    let mut groups = vec![cohort::battery_or_skip(ALL_GROUP.into(), &xs, &ys)];
    if let Some(key) = &opts.group_by {
        let found = cohort::subgroup_correlations(&subjects, key, opts.x, opts.y);
        if found.is_empty() {
            log::warn!("no subject carries a `{key}=` tag");
        }
        groups.extend(found);
    }
    to_csv(&groups.iter().map(CorrelationRow::from).collect::<Vec<_>>())
}

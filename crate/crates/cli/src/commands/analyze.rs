use calvol_core::cohort::SubjectMetrics;
use calvol_core::metrics::{self, reliability_curve};
use calvol_core::sum::NeumaierSum;
use calvol_core::{DiscreteDataset, ReliabilityCurve};

use super::{load_subject, Settings};
use crate::manifest::CohortManifest;
use crate::report::{to_csv, ReportRow, DATASET_ROW, MEAN_ROW};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeReport {
    pub subjects: Vec<SubjectMetrics>,
    pub curves: Vec<ReliabilityCurve>,
    pub mean: ReportRow,
    pub dataset: ReportRow,
}

impl AnalyzeReport {
    /// Subject rows in manifest order, then `#mean` and `#dataset`.
    pub fn rows(&self) -> Vec<ReportRow> {
        let mut rows: Vec<ReportRow> = self.subjects.iter().map(ReportRow::from).collect();
        rows.push(self.mean.clone());
        rows.push(self.dataset.clone());
        rows
    }

    pub fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        to_csv(&self.rows())
    }
}

fn mean(rows: &[SubjectMetrics], f: impl Fn(&SubjectMetrics) -> f64) -> f64 {
    rows.iter().map(f).sum::<NeumaierSum>().value() / rows.len() as f64
}

/// Per-subject averages; the bias columns hold mean absolute values and
/// `n_voxels` the total.
fn mean_row(rows: &[SubjectMetrics]) -> ReportRow {
    ReportRow {
        subject_id: MEAN_ROW.into(),
        n_voxels: rows.iter().map(|r| r.n_voxels).sum(),
        true_volume_ml: mean(rows, |r| r.true_volume_ml),
        soft_volume_ml: mean(rows, |r| r.soft_volume_ml),
        bias_per_voxel: mean(rows, |r| r.bias_per_voxel.abs()),
        bias_ml: mean(rows, |r| r.bias_ml.abs()),
        ece: mean(rows, |r| r.ece),
        exact_ce: mean(rows, |r| r.exact_ce),
        jensen_gap: mean(rows, |r| r.jensen_gap),
        dice: mean(rows, |r| r.dice),
    }
}

fn dataset_row(
    rows: &[SubjectMetrics],
    parts: &[DiscreteDataset],
    settings: &Settings,
) -> anyhow::Result<ReportRow> {
    let scheme = settings.scheme()?;
    let pooled = DiscreteDataset::concat(parts);
    let true_ml: f64 = rows.iter().map(|r| r.true_volume_ml).sum::<NeumaierSum>().value();
    let soft_ml: f64 = rows.iter().map(|r| r.soft_volume_ml).sum::<NeumaierSum>().value();
    let bias = metrics::bias(&pooled)?;
    let exact_ce = metrics::exact_ce(&pooled)?;
    Ok(ReportRow {
        subject_id: DATASET_ROW.into(),
        n_voxels: pooled.len(),
        true_volume_ml: true_ml,
        soft_volume_ml: soft_ml,
        bias_per_voxel: bias,
        bias_ml: soft_ml - true_ml,
        ece: metrics::binned_ece(&pooled, &scheme)?,
        exact_ce,
        jensen_gap: exact_ce - bias.abs(),
        dice: metrics::dataset_dice(&pooled, settings.threshold)?,
    })
}

/// Evaluates every subject of a cohort.
pub fn analyze(manifest: &CohortManifest, settings: &Settings) -> anyhow::Result<AnalyzeReport> {
    let scheme = settings.scheme()?;
    let results = settings.par_map(&manifest.subjects, |entry| {
        let subject = load_subject(entry)?;
        let data = subject.dataset()?;
        let row = SubjectMetrics::compute(
            entry.id.clone(),
            &subject.prob,
            &subject.label,
            &scheme,
            settings.threshold,
            entry.tags.iter().cloned(),
        )?;
        let curve = reliability_curve(&data, &scheme)?;
        log::debug!("analysed {} ({} voxels)", entry.id, data.len());
        Ok((row, curve, data))
    })?;

    let mut subjects = Vec::with_capacity(results.len());
    let mut curves = Vec::with_capacity(results.len());
    let mut parts = Vec::with_capacity(results.len());
    for (row, curve, data) in results {
        subjects.push(row);
        curves.push(curve);
        parts.push(data);
    }
    let dataset = dataset_row(&subjects, &parts, settings)?;
    Ok(AnalyzeReport {
        mean: mean_row(&subjects),
        dataset,
        subjects,
        curves,
    })
}

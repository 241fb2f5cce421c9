//! CSV tables written and read by the commands.

use std::path::Path;

use anyhow::Context;
use calvol_core::cohort::{CorrelationBattery, GroupCorrelation, SubjectMetrics};
use calvol_core::metrics::CurveBin;
use calvol_core::theory::BoundReport;
use calvol_core::ReliabilityCurve;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

/// Row label of the mean over subjects.
pub const MEAN_ROW: &str = "#mean";
/// Row label of the metrics on all voxels pooled.
pub const DATASET_ROW: &str = "#dataset";

/// One row of the analysis report, columns in output order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub subject_id: String,
    pub n_voxels: usize,
    pub true_volume_ml: f64,
    pub soft_volume_ml: f64,
    pub bias_per_voxel: f64,
    pub bias_ml: f64,
    pub ece: f64,
    pub exact_ce: f64,
    pub jensen_gap: f64,
    pub dice: f64,
}

impl ReportRow {
    pub fn is_summary(&self) -> bool {
        self.subject_id.starts_with('#')
    }

    pub fn into_metrics(self, tags: impl IntoIterator<Item = String>) -> SubjectMetrics {
        SubjectMetrics {
            subject_id: self.subject_id,
            n_voxels: self.n_voxels,
            true_volume_ml: self.true_volume_ml,
            soft_volume_ml: self.soft_volume_ml,
            bias_per_voxel: self.bias_per_voxel,
            bias_ml: self.bias_ml,
            ece: self.ece,
            exact_ce: self.exact_ce,
            jensen_gap: self.jensen_gap,
            dice: self.dice,
            tags: tags.into_iter().collect(),
        }
    }
}

impl From<&SubjectMetrics> for ReportRow {
    fn from(m: &SubjectMetrics) -> Self {
        Self {
            subject_id: m.subject_id.clone(),
            n_voxels: m.n_voxels,
            true_volume_ml: m.true_volume_ml,
            soft_volume_ml: m.soft_volume_ml,
            bias_per_voxel: m.bias_per_voxel,
            bias_ml: m.bias_ml,
            ece: m.ece,
            exact_ce: m.exact_ce,
            jensen_gap: m.jensen_gap,
            dice: m.dice,
        }
    }
}

/// One bin of a reliability curve; empty bins leave the ratios blank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub bin_low: f64,
    pub bin_high: f64,
    pub mean_conf: Option<f64>,
    pub freq: Option<f64>,
    pub count: usize,
}

impl From<&CurveBin> for CurveRow {
    fn from(b: &CurveBin) -> Self {
        Self {
            bin_low: b.lower,
            bin_high: b.upper,
            mean_conf: b.mean_confidence(),
            freq: b.empirical_frequency(),
            count: b.count,
        }
    }
}

pub fn curve_rows(curve: &ReliabilityCurve) -> Vec<CurveRow> {
    curve.bins.iter().map(CurveRow::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub subject_id: String,
    pub exact_ce: f64,
    pub binned_ece: f64,
    pub abs_bias: f64,
    pub exact_gap: f64,
    pub binned_gap: f64,
    pub chain_holds: bool,
}

impl BoundRow {
    pub fn new(subject_id: impl Into<String>, r: &BoundReport) -> Self {
        Self {
            subject_id: subject_id.into(),
            exact_ce: r.exact_ce,
            binned_ece: r.binned_ece,
            abs_bias: r.abs_bias,
            exact_gap: r.exact_gap,
            binned_gap: r.binned_gap,
            chain_holds: r.chain_holds,
        }
    }
}

/// Correlation statistics of one group; blank when the group was skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub group: String,
    pub n: usize,
    pub pearson_r: Option<f64>,
    pub pearson_se: Option<f64>,
    pub spearman_rho: Option<f64>,
    pub kendall_tau: Option<f64>,
}

impl From<&GroupCorrelation> for CorrelationRow {
    fn from(g: &GroupCorrelation) -> Self {
        let b: Option<&CorrelationBattery> = g.battery.as_ref();
        Self {
            group: g.group.clone(),
            n: g.n,
            pearson_r: b.map(|b| b.pearson_r),
            pearson_se: b.map(|b| b.pearson_se),
            spearman_rho: b.map(|b| b.spearman_rho),
            kendall_tau: b.map(|b| b.kendall_tau),
        }
    }
}

/// Serialises rows with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("malformed table {}", path.display()))
}

//! Per-subject metric rows and cohort-level statistics.

mod correlation;
mod pareto;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use correlation::{average_ranks, kendall_tau, pearson_r, spearman_rho, Pearson};
pub use pareto::{dominates, pareto_front, Direction, ParetoPoint};

use crate::error::{Error, Result};
use crate::metrics::{self, BinningScheme};
use crate::sum::NeumaierSum;
use crate::theory::BOUND_TOLERANCE;
use crate::volume::{DiscreteDataset, LabelVolume, ProbVolume};

/// Metrics of one subject's volume.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubjectMetrics {
    pub subject_id: String,
    pub n_voxels: usize,
    pub true_volume_ml: f64,
    pub soft_volume_ml: f64,
    pub bias_per_voxel: f64,
    pub bias_ml: f64,
    /// Binned ECE.
    pub ece: f64,
    pub exact_ce: f64,
    /// `exact_ce - |bias_per_voxel|`.
    pub jensen_gap: f64,
    pub dice: f64,
    pub tags: BTreeSet<String>,
}

impl SubjectMetrics {
    /// Evaluates a prediction against its reference on the masked voxels.
    pub fn compute(
        subject_id: impl Into<String>,
        prob: &ProbVolume,
        label: &LabelVolume,
        scheme: &BinningScheme,
        threshold: f64,
        tags: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let data = DiscreteDataset::from_volumes(prob, label)?;
        let bias = metrics::volume_bias(prob, label)?;
        let exact_ce = metrics::exact_ce(&data)?;
        Ok(Self {
            subject_id: subject_id.into(),
            n_voxels: data.len(),
            true_volume_ml: metrics::true_volume(prob, label)?,
            soft_volume_ml: metrics::soft_volume(prob)?,
            bias_per_voxel: bias.per_voxel,
            bias_ml: bias.ml,
            ece: metrics::binned_ece(&data, scheme)?,
            exact_ce,
            jensen_gap: exact_ce - bias.per_voxel.abs(),
            dice: metrics::dice(prob, label, threshold)?,
            tags: tags.into_iter().collect(),
        })
    }

    /// The per-subject bound `ece >= |bias|`.
    pub fn bound_holds(&self) -> bool {
        self.ece + BOUND_TOLERANCE >= self.bias_per_voxel.abs()
    }

    pub fn field(&self, field: MetricField) -> f64 {
        match field {
            MetricField::NVoxels => self.n_voxels as f64,
            MetricField::TrueVolumeMl => self.true_volume_ml,
            MetricField::SoftVolumeMl => self.soft_volume_ml,
            MetricField::BiasPerVoxel => self.bias_per_voxel,
            MetricField::BiasMl => self.bias_ml,
            MetricField::Ece => self.ece,
            MetricField::ExactCe => self.exact_ce,
            MetricField::JensenGap => self.jensen_gap,
            MetricField::Dice => self.dice,
            MetricField::AbsBias => self.bias_per_voxel.abs(),
            MetricField::AbsBiasMl => self.bias_ml.abs(),
        }
    }

    /// Value of the `key=value` tag with the given key.
    pub fn tag_value(&self, key: &str) -> Option<&str> {
        self.tags.iter().find_map(|t| {
            t.split_once('=')
                .filter(|(k, _)| *k == key)
                .map(|(_, v)| v)
        })
    }
}

/// Numeric columns of a metrics row, named as in the report CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MetricField {
    NVoxels,
    TrueVolumeMl,
    SoftVolumeMl,
    BiasPerVoxel,
    BiasMl,
    Ece,
    ExactCe,
    JensenGap,
    Dice,
    AbsBias,
    AbsBiasMl,
}

impl MetricField {
    pub const ALL: [MetricField; 11] = [
        MetricField::NVoxels,
        MetricField::TrueVolumeMl,
        MetricField::SoftVolumeMl,
        MetricField::BiasPerVoxel,
        MetricField::BiasMl,
        MetricField::Ece,
        MetricField::ExactCe,
        MetricField::JensenGap,
        MetricField::Dice,
        MetricField::AbsBias,
        MetricField::AbsBiasMl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricField::NVoxels => "n_voxels",
            MetricField::TrueVolumeMl => "true_volume_ml",
            MetricField::SoftVolumeMl => "soft_volume_ml",
            MetricField::BiasPerVoxel => "bias_per_voxel",
            MetricField::BiasMl => "bias_ml",
            MetricField::Ece => "ece",
            MetricField::ExactCe => "exact_ce",
            MetricField::JensenGap => "jensen_gap",
            MetricField::Dice => "dice",
            MetricField::AbsBias => "abs_bias",
            MetricField::AbsBiasMl => "abs_bias_ml",
        }
    }

    /// Preferred direction when the field is used as a Pareto objective.
    pub fn direction(self) -> Direction {
        match self {
            MetricField::Dice => Direction::Maximize,
            _ => Direction::Minimize,
        }
    }
}

impl fmt::Display for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricField::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown metric column `{s}`")))
    }
}

/// Mean per-volume metrics of one model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub model_id: String,
    pub mean_abs_bias: f64,
    pub mean_ece: f64,
    pub mean_dice: f64,
    pub n_subjects: usize,
}

fn mean_of(rows: &[SubjectMetrics], f: impl Fn(&SubjectMetrics) -> f64) -> f64 {
    rows.iter().map(f).sum::<NeumaierSum>().value() / rows.len() as f64
}

/// Means over subjects; the bias enters in absolute value.
pub fn aggregate_cohort(rows: &[SubjectMetrics], model_id: impl Into<String>) -> Result<ModelSummary> {
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(ModelSummary {
        model_id: model_id.into(),
        mean_abs_bias: mean_of(rows, |r| r.bias_per_voxel.abs()),
        mean_ece: mean_of(rows, |r| r.ece),
        mean_dice: mean_of(rows, |r| r.dice),
        n_subjects: rows.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationBattery {
    pub n: usize,
    pub pearson_r: f64,
    pub pearson_se: f64,
    pub spearman_rho: f64,
    pub kendall_tau: f64,
}

pub fn correlation_battery(x: &[f64], y: &[f64]) -> Result<CorrelationBattery> {
    let p = pearson_r(x, y)?;
    Ok(CorrelationBattery {
        n: x.len(),
        pearson_r: p.r,
        pearson_se: p.se,
        spearman_rho: spearman_rho(x, y)?,
        kendall_tau: kendall_tau(x, y)?,
    })
}

/// Correlations of one subgroup, or the reason it was skipped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupCorrelation {
    pub group: String,
    pub n: usize,
    pub battery: Option<CorrelationBattery>,
    pub diagnostic: Option<String>,
}

/// Minimum group size for the correlation battery.
pub const MIN_GROUP_SIZE: usize = 3;

/// Correlation battery per value of the `key=value` tag `tag_key`, groups in
/// order of first appearance. Rows without the tag are ignored. Groups that
/// are too small or degenerate are reported with a diagnostic instead of
/// failing the whole call.
pub fn subgroup_correlations(
    rows: &[SubjectMetrics],
    tag_key: &str,
    x: MetricField,
    y: MetricField,
) -> Vec<GroupCorrelation> {
    let mut groups: Vec<(String, Vec<&SubjectMetrics>)> = Vec::new();
    for row in rows {
        if let Some(value) = row.tag_value(tag_key) {
            match groups.iter_mut().find(|(g, _)| g == value) {
                Some((_, members)) => members.push(row),
                None => groups.push((value.to_string(), vec![row])),
            }
        }
    }
    groups
        .into_iter()
        .map(|(group, members)| {
            let xs: Vec<f64> = members.iter().map(|r| r.field(x)).collect();
            let ys: Vec<f64> = members.iter().map(|r| r.field(y)).collect();
            battery_or_skip(group, &xs, &ys)
        })
        .collect()
}

/// Runs the battery on one group, converting failures into a diagnostic.
pub fn battery_or_skip(group: String, xs: &[f64], ys: &[f64]) -> GroupCorrelation {
    let n = xs.len();
    let outcome = if n < MIN_GROUP_SIZE {
        Err(format!("group has {n} rows, need at least {MIN_GROUP_SIZE}"))
    } else {
        correlation_battery(xs, ys).map_err(|e| e.to_string())
    };
    match outcome {
        Ok(b) => GroupCorrelation {
            group,
            n,
            battery: Some(b),
            diagnostic: None,
        },
        Err(msg) => {
            log::warn!("skipping group `{group}`: {msg}");
            GroupCorrelation {
                group,
                n,
                battery: None,
                diagnostic: Some(msg),
            }
        }
    }
}

//! In-memory volumes and flat scored datasets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Voxels per axis, C order (the last axis varies fastest).
pub type Dims = [usize; 3];

fn voxel_count(dims: &Dims) -> Result<usize> {
    if dims.contains(&0) {
        return Err(Error::ShapeMismatch(format!(
            "dims {dims:?} must all be positive"
        )));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::ShapeMismatch(format!("dims {dims:?} overflow")))
}

fn check_voxel_volume(voxel_volume_ml: f64) -> Result<()> {
    if voxel_volume_ml.is_finite() && voxel_volume_ml > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "voxel volume must be positive and finite, got {voxel_volume_ml}"
        )))
    }
}

pub(crate) fn check_scores(scores: &[f64]) -> Result<()> {
    match scores
        .iter()
        .position(|s| !(s.is_finite() && (0.0..=1.0).contains(s)))
    {
        Some(index) => Err(Error::ScoreOutOfRange {
            index,
            value: scores[index],
        }),
        None => Ok(()),
    }
}

/// Per-voxel foreground confidences of one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVolume {
    scores: Vec<f64>,
    dims: Dims,
    voxel_volume_ml: f64,
    mask: Option<Vec<bool>>,
}

impl ProbVolume {
    pub fn new(
        scores: Vec<f64>,
        dims: Dims,
        voxel_volume_ml: f64,
        mask: Option<Vec<bool>>,
    ) -> Result<Self> {
        let n = voxel_count(&dims)?;
        if scores.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: scores.len(),
            });
        }
        if let Some(m) = &mask {
            if m.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: m.len(),
                });
            }
        }
        check_voxel_volume(voxel_volume_ml)?;
        check_scores(&scores)?;
        Ok(Self {
            scores,
            dims,
            voxel_volume_ml,
            mask,
        })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn voxel_volume_ml(&self) -> f64 {
        self.voxel_volume_ml
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    /// Replaces (or removes) the evaluation mask.
    pub fn with_mask(mut self, mask: Option<Vec<bool>>) -> Result<Self> {
        if let Some(m) = &mask {
            if m.len() != self.scores.len() {
                return Err(Error::LengthMismatch {
                    expected: self.scores.len(),
                    got: m.len(),
                });
            }
        }
        self.mask = mask;
        Ok(self)
    }

    #[inline]
    pub fn is_evaluated(&self, index: usize) -> bool {
        self.mask.as_ref().is_none_or(|m| m[index])
    }

    /// Number of voxels inside the mask (all voxels when there is none).
    pub fn evaluated_count(&self) -> usize {
        match &self.mask {
            Some(m) => m.iter().filter(|&&v| v).count(),
            None => self.scores.len(),
        }
    }

    pub fn into_scores(self) -> Vec<f64> {
        self.scores
    }
}

/// Binary reference segmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVolume {
    labels: Vec<bool>,
    dims: Dims,
    voxel_volume_ml: f64,
}

impl LabelVolume {
    pub fn new(labels: Vec<bool>, dims: Dims, voxel_volume_ml: f64) -> Result<Self> {
        let n = voxel_count(&dims)?;
        if labels.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: labels.len(),
            });
        }
        check_voxel_volume(voxel_volume_ml)?;
        Ok(Self {
            labels,
            dims,
            voxel_volume_ml,
        })
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn voxel_volume_ml(&self) -> f64 {
        self.voxel_volume_ml
    }
}

/// Flat `(score, label)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDataset {
    scores: Vec<f64>,
    labels: Vec<bool>,
}

impl DiscreteDataset {
    pub fn new(scores: Vec<f64>, labels: Vec<bool>) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: scores.len(),
                got: labels.len(),
            });
        }
        check_scores(&scores)?;
        Ok(Self { scores, labels })
    }

    /// Builds a dataset from `{0, 1}` integer labels.
    pub fn from_u8_labels(scores: Vec<f64>, labels: &[u8]) -> Result<Self> {
        if let Some(i) = labels.iter().position(|&l| l > 1) {
            return Err(Error::InvalidParameter(format!(
                "label {} at index {i} is not 0 or 1",
                labels[i]
            )));
        }
        Self::new(scores, labels.iter().map(|&l| l == 1).collect())
    }

    /// Masked voxels of a prediction/reference pair, in voxel order.
    pub fn from_volumes(prob: &ProbVolume, label: &LabelVolume) -> Result<Self> {
        check_pair(prob, label)?;
        let (scores, labels): (Vec<f64>, Vec<bool>) = prob
            .scores
            .iter()
            .zip(&label.labels)
            .enumerate()
            .filter(|(i, _)| prob.is_evaluated(*i))
            .map(|(_, (&s, &y))| (s, y))
            .unzip();
        if scores.is_empty() {
            return Err(Error::EmptyRegion);
        }
        Ok(Self { scores, labels })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y).count()
    }

    /// Concatenates datasets in order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a DiscreteDataset>) -> Self {
        let mut out = DiscreteDataset {
            scores: Vec::new(),
            labels: Vec::new(),
        };
        for p in parts {
            out.scores.extend_from_slice(&p.scores);
            out.labels.extend_from_slice(&p.labels);
        }
        out
    }

    pub(crate) fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyDataset)
        } else {
            Ok(())
        }
    }
}

pub(crate) fn check_pair(prob: &ProbVolume, label: &LabelVolume) -> Result<()> {
    if prob.dims != label.dims {
        return Err(Error::ShapeMismatch(format!(
            "prediction dims {:?} differ from reference dims {:?}",
            prob.dims, label.dims
        )));
    }
    let (a, b) = (prob.voxel_volume_ml, label.voxel_volume_ml);
    if (a - b).abs() > 1e-9 * a.max(b) {
        return Err(Error::ShapeMismatch(format!(
            "prediction voxel volume {a} ml differs from reference {b} ml"
        )));
    }
    Ok(())
}

//! Calibration and volume metrics for one subject or a pooled dataset.
//!
//! Sign convention: bias is `E[f(x) - y]`, so a positive value means the
//! soft volume overestimates the reference volume.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;
use crate::volume::{check_pair, DiscreteDataset, LabelVolume, ProbVolume};

/// Equal-width confidence bins over `[0, 1]`.
///
/// Bin `i` holds scores with `floor(s * B) == i` (evaluated in `f64`), i.e.
/// `[i/B, (i+1)/B)`; the score `1.0` falls into the last bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BinningScheme {
    num_bins: usize,
}

impl BinningScheme {
    pub const DEFAULT_BINS: usize = 20;

    pub fn new(num_bins: usize) -> Result<Self> {
        if num_bins == 0 {
            return Err(Error::InvalidParameter("num_bins must be >= 1".into()));
        }
        Ok(Self { num_bins })
    }

    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    #[inline]
    pub fn bin_of(&self, score: f64) -> usize {
        ((score * self.num_bins as f64) as usize).min(self.num_bins - 1)
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let b = self.num_bins as f64;
        (bin as f64 / b, (bin + 1) as f64 / b)
    }
}

impl Default for BinningScheme {
    fn default() -> Self {
        Self {
            num_bins: Self::DEFAULT_BINS,
        }
    }
}

/// One bin of a reliability curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub positives: usize,
    /// Compensated sum of the scores that fell into the bin.
    pub confidence_sum: f64,
}

impl CurveBin {
    /// `None` for an empty bin.
    pub fn mean_confidence(&self) -> Option<f64> {
        (self.count > 0).then(|| self.confidence_sum / self.count as f64)
    }

    /// `None` for an empty bin.
    pub fn empirical_frequency(&self) -> Option<f64> {
        (self.count > 0).then(|| self.positives as f64 / self.count as f64)
    }

    /// `count * |frequency - mean confidence|`, computed without division.
    fn weighted_gap(&self) -> f64 {
        (self.positives as f64 - self.confidence_sum).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReliabilityCurve {
    pub bins: Vec<CurveBin>,
    pub num_bins: usize,
    pub total: usize,
}

impl ReliabilityCurve {
    /// Binned ECE; empty bins contribute nothing.
    pub fn ece(&self) -> f64 {
        let acc: NeumaierSum = self.bins.iter().map(CurveBin::weighted_gap).sum();
        acc.value() / self.total as f64
    }

    /// Merges every `factor` adjacent bins. `factor` must divide `num_bins`.
    pub fn coarsen(&self, factor: usize) -> Result<ReliabilityCurve> {
        if factor == 0 || !self.num_bins.is_multiple_of(factor) {
            return Err(Error::InvalidParameter(format!(
                "coarsening factor {factor} does not divide {} bins",
                self.num_bins
            )));
        }
        let bins = self
            .bins
            .chunks(factor)
            .map(|chunk| {
                let mut conf = NeumaierSum::new();
                for b in chunk {
                    conf.add(b.confidence_sum);
                }
                CurveBin {
                    lower: chunk[0].lower,
                    upper: chunk[chunk.len() - 1].upper,
                    count: chunk.iter().map(|b| b.count).sum(),
                    positives: chunk.iter().map(|b| b.positives).sum(),
                    confidence_sum: conf.value(),
                }
            })
            .collect();
        Ok(ReliabilityCurve {
            bins,
            num_bins: self.num_bins / factor,
            total: self.total,
        })
    }
}

/// Scores sharing one exact value, with their label counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreGroup {
    pub score: f64,
    pub count: usize,
    pub positives: usize,
}

impl ScoreGroup {
    pub fn frequency(&self) -> f64 {
        self.positives as f64 / self.count as f64
    }
}

/// Groups points by bit-identical score, in increasing score order.
pub fn score_groups(data: &DiscreteDataset) -> Vec<ScoreGroup> {
    // Scores are in [0, 1], so the bit pattern of `s + 0.0` (which folds -0.0
    // into +0.0) orders like the value itself.
    let mut keyed: Vec<(u64, bool)> = data
        .scores()
        .iter()
        .zip(data.labels())
        .map(|(&s, &y)| ((s + 0.0).to_bits(), y))
        .collect();
    keyed.sort_unstable();

    let mut groups: Vec<ScoreGroup> = Vec::new();
    for (bits, y) in keyed {
        match groups.last_mut() {
            Some(g) if g.score.to_bits() == bits => {
                g.count += 1;
                g.positives += usize::from(y);
            }
            _ => groups.push(ScoreGroup {
                score: f64::from_bits(bits),
                count: 1,
                positives: usize::from(y),
            }),
        }
    }
    groups
}

/// Calibration error with the conditional frequency taken per exact score.
pub fn exact_ce(data: &DiscreteDataset) -> Result<f64> {
    data.ensure_nonempty()?;
    let acc: NeumaierSum = score_groups(data)
        .iter()
        .map(|g| (g.positives as f64 - g.count as f64 * g.score).abs())
        .sum();
    Ok(acc.value() / data.len() as f64)
}

pub fn reliability_curve(data: &DiscreteDataset, scheme: &BinningScheme) -> Result<ReliabilityCurve> {
    data.ensure_nonempty()?;
    let b = scheme.num_bins();
    let mut counts = vec![0usize; b];
    let mut positives = vec![0usize; b];
    let mut sums = vec![NeumaierSum::new(); b];
    for (&s, &y) in data.scores().iter().zip(data.labels()) {
        let i = scheme.bin_of(s);
        counts[i] += 1;
        positives[i] += usize::from(y);
        sums[i].add(s);
    }
    let bins = (0..b)
        .map(|i| {
            let (lower, upper) = scheme.edges(i);
            CurveBin {
                lower,
                upper,
                count: counts[i],
                positives: positives[i],
                confidence_sum: sums[i].value(),
            }
        })
        .collect();
    Ok(ReliabilityCurve {
        bins,
        num_bins: b,
        total: data.len(),
    })
}

pub fn binned_ece(data: &DiscreteDataset, scheme: &BinningScheme) -> Result<f64> {
    Ok(reliability_curve(data, scheme)?.ece())
}

/// Mean of `score - label`.
pub fn bias(data: &DiscreteDataset) -> Result<f64> {
    data.ensure_nonempty()?;
    let soft: NeumaierSum = data.scores().iter().sum();
    Ok((soft.value() - data.positives() as f64) / data.len() as f64)
}

/// `exact_ce - |bias|` and `binned_ece - |bias|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JensenGap {
    pub exact: f64,
    pub binned: f64,
}

pub fn jensen_gap(data: &DiscreteDataset, scheme: &BinningScheme) -> Result<JensenGap> {
    let abs_bias = bias(data)?.abs();
    Ok(JensenGap {
        exact: exact_ce(data)? - abs_bias,
        binned: binned_ece(data, scheme)? - abs_bias,
    })
}

/// Fraction of points whose thresholded score (`s >= threshold`) equals the label.
pub fn accuracy(data: &DiscreteDataset, threshold: f64) -> Result<f64> {
    data.ensure_nonempty()?;
    let hits = data
        .scores()
        .iter()
        .zip(data.labels())
        .filter(|(&s, &y)| (s >= threshold) == y)
        .count();
    Ok(hits as f64 / data.len() as f64)
}

/// Soft volume in ml: voxel volume times the sum of masked scores.
pub fn soft_volume(prob: &ProbVolume) -> Result<f64> {
    let mut acc = NeumaierSum::new();
    let mut n = 0usize;
    for (i, &s) in prob.scores().iter().enumerate() {
        if prob.is_evaluated(i) {
            acc.add(s);
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::EmptyRegion);
    }
    Ok(prob.voxel_volume_ml() * acc.value())
}

/// Reference volume in ml over the evaluated region of `prob`.
pub fn true_volume(prob: &ProbVolume, label: &LabelVolume) -> Result<f64> {
    check_pair(prob, label)?;
    let positives = label
        .labels()
        .iter()
        .enumerate()
        .filter(|(i, &y)| y && prob.is_evaluated(*i))
        .count();
    Ok(prob.voxel_volume_ml() * positives as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeBias {
    pub per_voxel: f64,
    /// `soft_volume - true_volume`.
    pub ml: f64,
}

pub fn volume_bias(prob: &ProbVolume, label: &LabelVolume) -> Result<VolumeBias> {
    check_pair(prob, label)?;
    let mut soft = NeumaierSum::new();
    let mut n = 0usize;
    let mut positives = 0usize;
    for (i, (&s, &y)) in prob.scores().iter().zip(label.labels()).enumerate() {
        if prob.is_evaluated(i) {
            soft.add(s);
            n += 1;
            positives += usize::from(y);
        }
    }
    if n == 0 {
        return Err(Error::EmptyRegion);
    }
    let vml = prob.voxel_volume_ml();
    Ok(VolumeBias {
        per_voxel: (soft.value() - positives as f64) / n as f64,
        ml: vml * soft.value() - vml * positives as f64,
    })
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )))
    }
}

fn dice_from_pairs(pairs: impl Iterator<Item = (f64, bool)>, threshold: f64) -> f64 {
    let (mut predicted, mut reference, mut overlap) = (0usize, 0usize, 0usize);
    for (s, y) in pairs {
        let a = s >= threshold;
        predicted += usize::from(a);
        reference += usize::from(y);
        overlap += usize::from(a && y);
    }
    if predicted + reference == 0 {
        return 1.0;
    }
    2.0 * overlap as f64 / (predicted + reference) as f64
}

/// Dice overlap of the thresholded prediction (`s >= threshold`) with the
/// reference, on masked voxels. Two empty sets score 1.
pub fn dice(prob: &ProbVolume, label: &LabelVolume, threshold: f64) -> Result<f64> {
    check_pair(prob, label)?;
    check_threshold(threshold)?;
    let pairs = prob
        .scores()
        .iter()
        .zip(label.labels())
        .enumerate()
        .filter(|(i, _)| prob.is_evaluated(*i))
        .map(|(_, (&s, &y))| (s, y));
    Ok(dice_from_pairs(pairs, threshold))
}

/// Dice overlap over the points of a dataset, as in [`dice`].
pub fn dataset_dice(data: &DiscreteDataset, threshold: f64) -> Result<f64> {
    check_threshold(threshold)?;
    let pairs = data.scores().iter().copied().zip(data.labels().iter().copied());
    Ok(dice_from_pairs(pairs, threshold))
}

/// Tolerance on per-point class-score sums before renormalisation.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Mean over classes of the one-vs-rest binned ECE.
///
/// `probs[k][i]` is the score of class `k` for point `i`; `labels[i]` is the
/// class index of point `i`.
pub fn marginal_ece(probs: &[Vec<f64>], labels: &[usize], scheme: &BinningScheme) -> Result<f64> {
    let k = probs.len();
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "marginal ECE needs at least 2 classes, got {k}"
        )));
    }
    let n = labels.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    for row in probs {
        if row.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: row.len(),
            });
        }
    }
    if let Some(i) = labels.iter().position(|&c| c >= k) {
        return Err(Error::InvalidParameter(format!(
            "label {} at index {i} is not a class index below {k}",
            labels[i]
        )));
    }

    let mut totals = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = NeumaierSum::new();
        for row in probs {
            let v = row[i];
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(Error::ScoreOutOfRange { index: i, value: v });
            }
            acc.add(v);
        }
        let sum = acc.value();
        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::RowSum { index: i, sum });
        }
        totals.push(sum);
    }

    let mut per_class = NeumaierSum::new();
    for (class, row) in probs.iter().enumerate() {
        let scores = row
            .iter()
            .zip(&totals)
            .map(|(&v, &t)| (v / t).min(1.0))
            .collect();
        let targets = labels.iter().map(|&c| c == class).collect();
        per_class.add(binned_ece(&DiscreteDataset::new(scores, targets)?, scheme)?);
    }
    Ok(per_class.value() / k as f64)
}

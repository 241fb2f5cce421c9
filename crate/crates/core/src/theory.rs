//! Executable checks of the calibration/bias relationship.
//!
//! * [`verify_bound`]: `exact CE >= binned ECE >= |bias|` on any dataset.
//! * [`build_counterexample`]: two calibrated predictors whose average is
//!   unbiased but miscalibrated.
//! * [`ratio_unboundedness_demo`]: no finite `gamma` gives
//!   `CE <= gamma * |bias|`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{self, BinningScheme};
use crate::volume::{check_scores, DiscreteDataset};

/// Absolute slack for the bound chain.
pub const BOUND_TOLERANCE: f64 = 1e-12;

/// Scores of one named predictor over a shared label array.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictorTable {
    pub id: String,
    scores: Vec<f64>,
}

impl PredictorTable {
    pub fn new(id: impl Into<String>, scores: Vec<f64>) -> Result<Self> {
        check_scores(&scores)?;
        Ok(Self {
            id: id.into(),
            scores,
        })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn with_labels(&self, labels: &[bool]) -> Result<DiscreteDataset> {
        DiscreteDataset::new(self.scores.clone(), labels.to_vec())
    }
}

/// Pointwise convex combination `sum_i w_i * f_i`.
pub fn convex_combine(predictors: &[PredictorTable], weights: &[f64]) -> Result<PredictorTable> {
    let first = predictors
        .first()
        .ok_or_else(|| Error::InvalidParameter("no predictors to combine".into()))?;
    if weights.len() != predictors.len() {
        return Err(Error::LengthMismatch {
            expected: predictors.len(),
            got: weights.len(),
        });
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "weights must be finite and nonnegative, got {w}"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > BOUND_TOLERANCE {
        return Err(Error::InvalidParameter(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    let n = first.scores.len();
    if let Some(p) = predictors.iter().find(|p| p.scores.len() != n) {
        return Err(Error::LengthMismatch {
            expected: n,
            got: p.scores.len(),
        });
    }

    let scores = (0..n)
        .map(|i| {
            predictors
                .iter()
                .zip(weights)
                .map(|(p, w)| w * p.scores[i])
                .sum::<f64>()
                .clamp(0.0, 1.0)
        })
        .collect();
    let id = predictors
        .iter()
        .zip(weights)
        .map(|(p, w)| format!("{w}*{}", p.id))
        .collect::<Vec<_>>()
        .join("+");
    Ok(PredictorTable { id, scores })
}

/// The three predictors of the convex-combination counterexample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub labels: Vec<bool>,
    pub f1: PredictorTable,
    pub f2: PredictorTable,
    pub f3: PredictorTable,
}

impl Counterexample {
    pub const POSITIVES: usize = 100;
    pub const NEGATIVES: usize = 200;

    pub fn predictors(&self) -> [&PredictorTable; 3] {
        [&self.f1, &self.f2, &self.f3]
    }

    pub fn dataset(&self, predictor: &PredictorTable) -> DiscreteDataset {
        predictor
            .with_labels(&self.labels)
            .expect("counterexample tables are aligned")
    }
}

/// 100 positives (indices 0..100) followed by 200 negatives.
///
/// Both base predictors score negatives 0..50 with 0 and the remaining
/// negatives with 0.25. `f1` gives positives 0..50 a score of 1 and positives
/// 50..100 a score of 0.25; `f2` swaps the halves. `f3` is their average.
pub fn build_counterexample() -> Counterexample {
    let (pos, neg) = (Counterexample::POSITIVES, Counterexample::NEGATIVES);
    let labels: Vec<bool> = (0..pos + neg).map(|i| i < pos).collect();
    let negative_score = |j: usize| if j < neg / 4 { 0.0 } else { 0.25 };
    let table = |first_half: f64, second_half: f64| -> Vec<f64> {
        (0..pos)
            .map(|i| if i < pos / 2 { first_half } else { second_half })
            .chain((0..neg).map(negative_score))
            .collect()
    };
    let f1 = PredictorTable {
        id: "f1".into(),
        scores: table(1.0, 0.25),
    };
    let f2 = PredictorTable {
        id: "f2".into(),
        scores: table(0.25, 1.0),
    };
    let mut f3 = convex_combine(&[f1.clone(), f2.clone()], &[0.5, 0.5])
        .expect("equal-length tables with valid weights");
    f3.id = "f3".into();
    Counterexample { labels, f1, f2, f3 }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub exact_ce: f64,
    pub binned_ece: f64,
    pub abs_bias: f64,
    pub exact_gap: f64,
    pub binned_gap: f64,
    pub chain_holds: bool,
}

pub fn verify_bound(data: &DiscreteDataset, scheme: &BinningScheme) -> Result<BoundReport> {
    let exact_ce = metrics::exact_ce(data)?;
    let binned_ece = metrics::binned_ece(data, scheme)?;
    let abs_bias = metrics::bias(data)?.abs();
    let chain_holds =
        exact_ce + BOUND_TOLERANCE >= binned_ece && binned_ece + BOUND_TOLERANCE >= abs_bias;
    if !chain_holds {
        log::error!(
            "bound chain violated (implementation defect): exact_ce={exact_ce:e} \
             binned_ece={binned_ece:e} |bias|={abs_bias:e}"
        );
    }
    Ok(BoundReport {
        exact_ce,
        binned_ece,
        abs_bias,
        exact_gap: exact_ce - abs_bias,
        binned_gap: binned_ece - abs_bias,
        chain_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioDemo {
    pub dataset: DiscreteDataset,
    pub ce: f64,
    pub abs_bias: f64,
}

impl RatioDemo {
    /// `ce > gamma * abs_bias`, i.e. the multiplicative bound fails.
    pub fn violates_bound(&self, gamma: f64) -> bool {
        self.ce > gamma * self.abs_bias
    }
}

/// The averaged counterexample predictor, whose CE exceeds `gamma * |bias|`
/// for every finite `gamma` because its bias is exactly zero.
pub fn ratio_unboundedness_demo(gamma: f64) -> Result<RatioDemo> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be finite and positive, got {gamma}"
        )));
    }
    let cx = build_counterexample();
    let dataset = cx.dataset(&cx.f3);
    let ce = metrics::exact_ce(&dataset)?;
    let abs_bias = metrics::bias(&dataset)?.abs();
    Ok(RatioDemo {
        dataset,
        ce,
        abs_bias,
    })
}

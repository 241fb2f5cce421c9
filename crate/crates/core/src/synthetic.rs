//! Seeded generators: scored datasets with a chosen reliability function and
//! spherical phantom cohorts.
//!
//! All randomness comes from [`CounterRng`]. Scored sets use the stream
//! `CounterRng::new(seed)`; phantom subject `i` uses
//! `CounterRng::for_stream(seed, i)`, so subjects can be generated in any
//! order or in parallel with identical results.

use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recalibration::{clamped_logit, sigmoid, LOGIT_EPS};
use crate::rng::CounterRng;
use crate::volume::{DiscreteDataset, Dims, LabelVolume, ProbVolume};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub score: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScoreDistribution {
    Uniform,
    Beta { alpha: f64, beta: f64 },
    PointMasses { points: Vec<PointMass> },
}

/// Map from a score to `E[y | f = s]` (scored sets), or from a true
/// probability to the emitted score (phantoms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReliabilityFn {
    #[default]
    Identity,
    Temperature { t: f64 },
    AffineLogit { a: f64, b: f64 },
    Constant { c: f64 },
}

impl ReliabilityFn {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ReliabilityFn::Identity => true,
            ReliabilityFn::Temperature { t } => t.is_finite() && t > 0.0,
            ReliabilityFn::AffineLogit { a, b } => a.is_finite() && b.is_finite(),
            ReliabilityFn::Constant { c } => (0.0..=1.0).contains(&c),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid reliability function {self:?}")))
        }
    }

    #[inline]
    pub fn apply(&self, p: f64) -> f64 {
        match *self {
            ReliabilityFn::Identity => p,
            ReliabilityFn::Temperature { t } => sigmoid(clamped_logit(p, LOGIT_EPS) / t),
            ReliabilityFn::AffineLogit { a, b } => sigmoid(a * clamped_logit(p, LOGIT_EPS) + b),
            ReliabilityFn::Constant { c } => c,
        }
    }

    /// Strictly increasing in its argument (up to logit clamping).
    pub fn is_monotone(&self) -> bool {
        match *self {
            ReliabilityFn::Identity | ReliabilityFn::Temperature { .. } => true,
            ReliabilityFn::AffineLogit { a, .. } => a > 0.0,
            ReliabilityFn::Constant { .. } => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilitySpec {
    pub score_distribution: ScoreDistribution,
    pub reliability: ReliabilityFn,
    pub n: usize,
    pub seed: u64,
}

enum ScoreSampler {
    Uniform,
    Beta(Beta<f64>),
    Masses { cumulative: Vec<f64>, scores: Vec<f64> },
}

impl ScoreSampler {
    fn new(dist: &ScoreDistribution) -> Result<Self> {
        match dist {
            ScoreDistribution::Uniform => Ok(ScoreSampler::Uniform),
            ScoreDistribution::Beta { alpha, beta } => Beta::new(*alpha, *beta)
                .map(ScoreSampler::Beta)
                .map_err(|e| Error::InvalidParameter(format!("beta({alpha}, {beta}): {e}"))),
            ScoreDistribution::PointMasses { points } => {
                let valid = !points.is_empty()
                    && points.iter().all(|p| {
                        (0.0..=1.0).contains(&p.score) && p.weight.is_finite() && p.weight >= 0.0
                    });
                let total: f64 = points.iter().map(|p| p.weight).sum();
                if !valid || total <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "point masses need scores in [0, 1] and nonnegative weights with a positive sum"
                            .into(),
                    ));
                }
                let mut acc = 0.0;
                let cumulative = points
                    .iter()
                    .map(|p| {
                        acc += p.weight / total;
                        acc
                    })
                    .collect();
                Ok(ScoreSampler::Masses {
                    cumulative,
                    scores: points.iter().map(|p| p.score).collect(),
                })
            }
        }
    }

    fn sample(&self, rng: &mut CounterRng) -> f64 {
        match self {
            ScoreSampler::Uniform => rng.next_f64(),
            ScoreSampler::Beta(b) => b.sample(rng).clamp(0.0, 1.0),
            ScoreSampler::Masses { cumulative, scores } => {
                let u = rng.next_f64();
                let i = cumulative.partition_point(|&c| c <= u).min(scores.len() - 1);
                scores[i]
            }
        }
    }
}

/// Draws `n` scores from the score distribution and labels
/// `y ~ Bernoulli(reliability(s))`.
pub fn sample_scored_set(spec: &ReliabilitySpec) -> Result<DiscreteDataset> {
    spec.reliability.validate()?;
    let sampler = ScoreSampler::new(&spec.score_distribution)?;
    let mut rng = CounterRng::new(spec.seed);
    let mut scores = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let s = sampler.sample(&mut rng);
        let y = rng.bernoulli(spec.reliability.apply(s));
        scores.push(s);
        labels.push(y);
    }
    DiscreteDataset::new(scores, labels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum RadiusLaw {
    Uniform { min: f64, max: f64 },
    LogUniform { min: f64, max: f64 },
    /// Radii assigned to subjects in order, cycling when exhausted.
    Fixed { radii: Vec<f64> },
}

impl RadiusLaw {
    fn bounds(&self) -> (f64, f64) {
        match self {
            RadiusLaw::Uniform { min, max } | RadiusLaw::LogUniform { min, max } => (*min, *max),
            RadiusLaw::Fixed { radii } => radii
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                    (lo.min(r), hi.max(r))
                }),
        }
    }

    fn sample(&self, index: usize, rng: &mut CounterRng) -> f64 {
        match self {
            RadiusLaw::Uniform { min, max } => min + (max - min) * rng.next_f64(),
            RadiusLaw::LogUniform { min, max } => {
                (min.ln() + (max.ln() - min.ln()) * rng.next_f64()).exp()
            }
            RadiusLaw::Fixed { radii } => radii[index % radii.len()],
        }
    }
}

/// How reference labels are derived from the noiseless profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    /// `y = [d <= r]`, the profile thresholded at 0.5.
    #[default]
    Threshold,
    /// `y ~ Bernoulli(profile)`, which makes the undistorted profile calibrated.
    Bernoulli,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub n_subjects: usize,
    pub grid_dims: Dims,
    pub voxel_volume_ml: f64,
    pub radius: RadiusLaw,
    /// Width (voxels) of the sigmoid edge; 0 gives a hard sphere.
    pub boundary_softness: f64,
    #[serde(default)]
    pub distortion: ReliabilityFn,
    /// Logit offset per voxel of radius above the middle of the radius range.
    #[serde(default)]
    pub size_bias_coupling: f64,
    #[serde(default)]
    pub label_mode: LabelMode,
    /// When set, only voxels within `r + margin` of the centre are evaluated.
    #[serde(default)]
    pub mask_margin: Option<f64>,
    pub seed: u64,
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n_subjects == 0 {
            return bad("n_subjects must be >= 1".into());
        }
        if self.grid_dims.contains(&0) {
            return bad(format!("grid dims {:?} must be positive", self.grid_dims));
        }
        if !(self.voxel_volume_ml.is_finite() && self.voxel_volume_ml > 0.0) {
            return bad(format!("voxel volume {} must be positive", self.voxel_volume_ml));
        }
        if !(self.boundary_softness.is_finite() && self.boundary_softness >= 0.0) {
            return bad(format!("boundary softness {} must be >= 0", self.boundary_softness));
        }
        if !self.size_bias_coupling.is_finite() {
            return bad("size_bias_coupling must be finite".into());
        }
        if let Some(m) = self.mask_margin {
            if !(m.is_finite() && m >= 0.0) {
                return bad(format!("mask margin {m} must be >= 0"));
            }
        }
        if let RadiusLaw::Fixed { radii } = &self.radius {
            if radii.is_empty() {
                return bad("fixed radius list is empty".into());
            }
        }
        let (lo, hi) = self.radius.bounds();
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return bad(format!("radius bounds ({lo}, {hi}) must satisfy 0 < min <= max"));
        }
        let room = self
            .grid_dims
            .iter()
            .map(|&d| (d as f64 - 1.0) / 2.0)
            .fold(f64::INFINITY, f64::min);
        if hi > room {
            return Err(Error::RadiusExceedsGrid {
                radius: hi,
                dims: self.grid_dims,
            });
        }
        self.distortion.validate()
    }

    fn radius_mid(&self) -> f64 {
        let (lo, hi) = self.radius.bounds();
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhantomSubject {
    pub id: String,
    pub radius: f64,
    pub prob: ProbVolume,
    pub label: LabelVolume,
    pub tags: Vec<String>,
}

pub fn phantom_subject_id(index: usize) -> String {
    format!("subject_{index:03}")
}

/// Generates subject `index` of the cohort described by `spec`.
///
/// The subject is a sphere of radius `r` centred in the grid. The noiseless
/// profile at distance `d` is `sigmoid((r - d) / softness)`; the score is the
/// distortion applied to it, shifted in logit space by
/// `coupling * (r - r_mid)` when the coupling is nonzero.
pub fn generate_phantom_subject(spec: &PhantomSpec, index: usize) -> Result<PhantomSubject> {
    spec.validate()?;
    let mut rng = CounterRng::for_stream(spec.seed, index as u64);
    let r = spec.radius.sample(index, &mut rng);
    let r_mid = spec.radius_mid();
    let offset = spec.size_bias_coupling * (r - r_mid);
    let [nx, ny, nz] = spec.grid_dims;
    let centre = spec.grid_dims.map(|d| (d as f64 - 1.0) / 2.0);

    let n = nx * ny * nz;
    let mut scores = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut mask = spec.mask_margin.map(|_| Vec::with_capacity(n));
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let d = ((i as f64 - centre[0]).powi(2)
                    + (j as f64 - centre[1]).powi(2)
                    + (k as f64 - centre[2]).powi(2))
                .sqrt();
                let profile = if spec.boundary_softness == 0.0 {
                    if d <= r {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    sigmoid((r - d) / spec.boundary_softness)
                };
                let mut score = spec.distortion.apply(profile);
                if offset != 0.0 {
                    score = sigmoid(clamped_logit(score, LOGIT_EPS) + offset);
                }
                scores.push(score);
                labels.push(match spec.label_mode {
                    LabelMode::Threshold => d <= r,
                    LabelMode::Bernoulli => rng.bernoulli(profile),
                });
                if let (Some(m), Some(margin)) = (mask.as_mut(), spec.mask_margin) {
                    m.push(d <= r + margin);
                }
            }
        }
    }

    let size = if r >= r_mid { "large" } else { "small" };
    Ok(PhantomSubject {
        id: phantom_subject_id(index),
        radius: r,
        prob: ProbVolume::new(scores, spec.grid_dims, spec.voxel_volume_ml, mask)?,
        label: LabelVolume::new(labels, spec.grid_dims, spec.voxel_volume_ml)?,
        tags: vec![format!("size={size}")],
    })
}

pub fn generate_phantom_cohort(spec: &PhantomSpec) -> Result<Vec<PhantomSubject>> {
    spec.validate()?;
    (0..spec.n_subjects)
        .map(|i| generate_phantom_subject(spec, i))
        .collect()
}

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use calvol_core::recalibration::{self, PlattOptions, PlattParams, LOGIT_EPS};
use calvol_core::ProbVolume;
use serde::{Deserialize, Serialize};

use super::{load_mask, Settings};
use crate::atomic::write_atomic;
use crate::container;
use crate::manifest::{CohortManifest, SubjectEntry};

/// What the manifest's `prob_path` containers hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputKind {
    #[default]
    Prob,
    Logit,
}

impl FromStr for InputKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "prob" => Ok(InputKind::Prob),
            "logit" => Ok(InputKind::Logit),
            _ => bail!("input kind must be `prob` or `logit`, got `{s}`"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrateOptions {
    pub input: InputKind,
    pub platt: PlattOptions,
    /// Clamp applied to probabilities before taking logits.
    pub logit_eps: f64,
}

impl Default for CalibrateOptions {
    fn default() -> Self {
        Self {
            input: InputKind::Prob,
            platt: PlattOptions::default(),
            logit_eps: LOGIT_EPS,
        }
    }
}

/// Contents of the parameters file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattSummary {
    pub a: f64,
    pub b: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl From<&PlattParams> for PlattSummary {
    fn from(p: &PlattParams) -> Self {
        Self {
            a: p.a,
            b: p.b,
            converged: p.converged,
            iterations: p.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOutput {
    pub params: PlattParams,
    /// Recalibrated predictions of the apply cohort, in manifest order.
    pub volumes: Vec<(SubjectEntry, ProbVolume)>,
    pub model_id: String,
}

pub const PARAMS_FILE: &str = "platt.json";
pub const MANIFEST_FILE: &str = "manifest.json";

impl CalibrationOutput {
    /// Writes `platt.json`, one `<id>_prob` container per subject and a
    /// `manifest.json` that points at them. Returns the manifest path.
    pub fn write(&self, out_dir: &Path) -> anyhow::Result<PathBuf> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create {}", out_dir.display()))?;
        let mut subjects = Vec::with_capacity(self.volumes.len());
        for (entry, volume) in &self.volumes {
            let file = format!("{}_prob.json", entry.id);
            container::write_prob(&out_dir.join(&file), volume)
                .with_context(|| format!("writing {file}"))?;
            subjects.push(SubjectEntry {
                id: entry.id.clone(),
                prob_path: file.into(),
                label_path: std::path::absolute(&entry.label_path)?,
                mask_path: entry.mask_path.as_deref().map(std::path::absolute).transpose()?,
                tags: entry.tags.clone(),
            });
        }
        let mut params = serde_json::to_vec_pretty(&PlattSummary::from(&self.params))?;
        params.push(b'\n');
        write_atomic(&out_dir.join(PARAMS_FILE), &params)?;
        let manifest = CohortManifest {
            model_id: self.model_id.clone(),
            subjects,
        };
        let path = out_dir.join(MANIFEST_FILE);
        write_atomic(&path, &manifest.to_json())?;
        Ok(path)
    }
}

/// Full-grid logits of a subject's prediction and the grid geometry.
fn read_source_logits(
    entry: &SubjectEntry,
    opts: &CalibrateOptions,
) -> anyhow::Result<(Vec<f64>, calvol_core::Dims, f64)> {
    match opts.input {
        InputKind::Prob => {
            let p = container::read_prob(&entry.prob_path)?;
            let (dims, vml) = (p.dims(), p.voxel_volume_ml());
            let z = recalibration::logits_from_probabilities(p.scores(), opts.logit_eps)?;
            Ok((z, dims, vml))
        }
        InputKind::Logit => {
            let (z, h) = container::read_logits(&entry.prob_path)?;
            Ok((z, h.dims, h.voxel_volume_ml))
        }
    }
}

/// Masked logits and labels of one training subject.
fn training_pairs(entry: &SubjectEntry, opts: &CalibrateOptions) -> anyhow::Result<(Vec<f64>, Vec<bool>)> {
    let load = || -> anyhow::Result<(Vec<f64>, Vec<bool>)> {
        let (z, dims, vml) = read_source_logits(entry, opts)?;
        let label = container::read_label(&entry.label_path)?;
        if label.dims() != dims || (label.voxel_volume_ml() - vml).abs() > 1e-9 * vml {
            bail!("prediction and label grids differ");
        }
        let mask = entry
            .mask_path
            .as_deref()
            .map(|m| load_mask(m, dims))
            .transpose()?;
        let keep = |i: usize| mask.as_ref().is_none_or(|m| m[i]);
        let pairs: (Vec<f64>, Vec<bool>) = z
            .iter()
            .zip(label.labels())
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, (&z, &y))| (z, y))
            .unzip();
        Ok(pairs)
    };
    load().with_context(|| format!("subject {}", entry.id))
}

/// Fits Platt scaling on the pooled training voxels and applies it to every
/// voxel of the apply cohort.
pub fn calibrate(
    train: &CohortManifest,
    apply: &CohortManifest,
    opts: &CalibrateOptions,
    settings: &Settings,
) -> anyhow::Result<CalibrationOutput> {
    let parts = settings.par_map(&train.subjects, |entry| training_pairs(entry, opts))?;
    let mut logits = Vec::new();
    let mut labels = Vec::new();
    for (z, y) in parts {
        logits.extend(z);
        labels.extend(y);
    }
    let params = recalibration::platt_fit(&logits, &labels, &opts.platt)
        .context("fitting Platt scaling on the training cohort")?;
    log::info!(
        "platt fit on {} voxels: a={} b={} converged={} iterations={}",
        logits.len(),
        params.a,
        params.b,
        params.converged,
        params.iterations
    );
    if !params.converged {
        log::warn!(
            "platt fit did not converge (gradient norm {:e})",
            params.final_gradient_norm
        );
    }
    drop(logits);

    let volumes = settings.par_map(&apply.subjects, |entry| {
        let (z, dims, vml) =
            read_source_logits(entry, opts).with_context(|| format!("subject {}", entry.id))?;
        let p = recalibration::platt_apply(&params, &z);
        Ok((entry.clone(), ProbVolume::new(p, dims, vml, None)?))
    })?;
    Ok(CalibrationOutput {
        params,
        volumes,
        model_id: format!("{}+platt", apply.model_id),
    })
}

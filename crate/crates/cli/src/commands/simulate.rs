use std::path::{Path, PathBuf};

use anyhow::Context;
use calvol_core::synthetic::{self, PhantomSpec};
use serde::Deserialize;

use super::Settings;
use crate::atomic::write_atomic;
use crate::container;
use crate::manifest::{CohortManifest, SubjectEntry};

fn default_model_id() -> String {
    "phantom".into()
}

/// The phantom specification plus the model id to record in the manifest.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct SimulationConfig {
    #[serde(default = "default_model_id")]
    pub model_id: String,
    #[serde(flatten)]
    pub spec: PhantomSpec,
}

impl SimulationConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read(path)
            .with_context(|| format!("cannot read simulation spec {}", path.display()))?;
        serde_json::from_slice(&text)
            .with_context(|| format!("malformed simulation spec {}", path.display()))
    }
}

/// Generates the phantom cohort into `out_dir`: `<id>_prob`, `<id>_label`
/// and, with a mask margin, `<id>_mask` containers plus `manifest.json`.
/// Returns the manifest path.
pub fn simulate(config: &SimulationConfig, out_dir: &Path, settings: &Settings) -> anyhow::Result<PathBuf> {
    let spec = &config.spec;
    spec.validate()?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let indices: Vec<usize> = (0..spec.n_subjects).collect();
    let subjects = settings.par_map(&indices, |&i| {
        let s = synthetic::generate_phantom_subject(spec, i)?;
        let prob_file = format!("{}_prob.json", s.id);
        let label_file = format!("{}_label.json", s.id);
        container::write_prob(&out_dir.join(&prob_file), &s.prob)?;
        container::write_label(&out_dir.join(&label_file), &s.label)?;
        let mask_path = match s.prob.mask() {
            Some(mask) => {
                let file = format!("{}_mask.json", s.id);
                container::write_mask(&out_dir.join(&file), mask, s.prob.dims(), s.prob.voxel_volume_ml())?;
                Some(file.into())
            }
            None => None,
        };
        log::debug!("generated {} (radius {:.3})", s.id, s.radius);
        Ok(SubjectEntry {
            id: s.id,
            prob_path: prob_file.into(),
            label_path: label_file.into(),
            mask_path,
            tags: s.tags,
        })
    })?;
    let manifest = CohortManifest {
        model_id: config.model_id.clone(),
        subjects,
    };
    let path = out_dir.join("manifest.json");
    write_atomic(&path, &manifest.to_json())?;
    Ok(path)
}

//! Cohort manifests: a model id and one entry per subject.
//!
//! ```json
//! {
//!   "model_id": "unet_a",
//!   "subjects": [
//!     { "id": "s01", "prob_path": "s01_prob.json", "label_path": "s01_label.json",
//!       "mask_path": "s01_mask.json", "tags": ["size=large"] }
//!   ]
//! }
//! ```
//!
//! Relative paths are resolved against the manifest's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectEntry {
    pub id: String,
    pub prob_path: PathBuf,
    pub label_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_path: Option<PathBuf>,
    #[serde(default)]
    pub tags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortManifest {
    pub model_id: String,
    pub subjects: Vec<SubjectEntry>,
}

impl CohortManifest {
    /// Reads a manifest, checks it, and makes every path absolute.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        let mut manifest: CohortManifest = serde_json::from_slice(&text)
            .with_context(|| format!("malformed manifest {}", path.display()))?;
        manifest
            .validate()
            .with_context(|| format!("invalid manifest {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        manifest.resolve_paths(base);
        Ok(manifest)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.subjects.is_empty() {
            bail!("manifest lists no subjects");
        }
        let mut seen = HashSet::new();
        for s in &self.subjects {
            if s.id.is_empty() || s.id.starts_with('#') {
                bail!("subject id {:?} is empty or starts with '#'", s.id);
            }
            if !seen.insert(s.id.as_str()) {
                bail!("duplicate subject id {:?}", s.id);
            }
        }
        Ok(())
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for s in &mut self.subjects {
            join(&mut s.prob_path);
            join(&mut s.label_path);
            if let Some(m) = s.mask_path.as_mut() {
                join(m);
            }
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("manifest serialises");
        bytes.push(b'\n');
        bytes
    }

    pub fn subject(&self, id: &str) -> Option<&SubjectEntry> {
        self.subjects.iter().find(|s| s.id == id)
    }
}

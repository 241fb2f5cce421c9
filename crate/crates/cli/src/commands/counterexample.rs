use std::path::{Path, PathBuf};

use anyhow::Context;
use calvol_core::metrics;
use calvol_core::theory::{build_counterexample, Counterexample};
use calvol_core::{BinningScheme, LabelVolume, ProbVolume};
use serde::{Deserialize, Serialize};

use super::Settings;
use crate::atomic::write_atomic;
use crate::container;
use crate::manifest::{CohortManifest, SubjectEntry};
use crate::report::to_csv;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub predictor: String,
    pub exact_ce: f64,
    pub binned_ece: f64,
    pub bias: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleOutput {
    pub summary: Vec<SummaryRow>,
    pub manifest_path: PathBuf,
}

pub fn summary_rows(cx: &Counterexample, scheme: &BinningScheme, threshold: f64) -> anyhow::Result<Vec<SummaryRow>> {
    cx.predictors()
        .into_iter()
        .map(|p| {
            let d = cx.dataset(p);
            Ok(SummaryRow {
                predictor: p.id.clone(),
                exact_ce: metrics::exact_ce(&d)?,
                binned_ece: metrics::binned_ece(&d, scheme)?,
                bias: metrics::bias(&d)?,
                accuracy: metrics::accuracy(&d, threshold)?,
            })
        })
        .collect()
}

/// Writes the three predictors as `[300, 1, 1]` volumes sharing one label
/// volume, a manifest with one subject per predictor, and `summary.csv`.
pub fn counterexample(out_dir: &Path, settings: &Settings) -> anyhow::Result<CounterexampleOutput> {
    let cx = build_counterexample();
    let summary = summary_rows(&cx, &settings.scheme()?, settings.threshold)?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;

    let dims = [cx.labels.len(), 1, 1];
    let label = LabelVolume::new(cx.labels.clone(), dims, 1.0)?;
    container::write_label(&out_dir.join("labels.json"), &label)?;
    let mut subjects = Vec::new();
    for p in cx.predictors() {
        let file = format!("{}.json", p.id);
        let prob = ProbVolume::new(p.scores().to_vec(), dims, 1.0, None)?;
        container::write_prob(&out_dir.join(&file), &prob)?;
        subjects.push(SubjectEntry {
            id: p.id.clone(),
            prob_path: file.into(),
            label_path: "labels.json".into(),
            mask_path: None,
            tags: vec![format!("predictor={}", p.id)],
        });
    }
    let manifest = CohortManifest {
        model_id: "counterexample".into(),
        subjects,
    };
    let manifest_path = out_dir.join("manifest.json");
    write_atomic(&manifest_path, &manifest.to_json())?;
    write_atomic(&out_dir.join("summary.csv"), &to_csv(&summary)?)?;
    Ok(CounterexampleOutput {
        summary,
        manifest_path,
    })
}

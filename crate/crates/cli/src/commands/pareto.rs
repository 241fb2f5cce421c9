use std::path::Path;

use anyhow::{bail, Context};
use calvol_core::cohort::{pareto_front, MetricField, ParetoPoint};

use crate::report::{read_csv, ReportRow, MEAN_ROW};

/// Objective values of each model and whether it is on the front.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoTable {
    pub objectives: Vec<MetricField>,
    pub models: Vec<(String, Vec<f64>, bool)>,
}

impl ParetoTable {
    /// Columns: `model_id`, one per objective, `on_front`.
    pub fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["model_id".to_string()];
        header.extend(self.objectives.iter().map(|o| o.to_string()));
        header.push("on_front".into());
        w.write_record(&header)?;
        for (id, values, on_front) in &self.models {
            let mut record = vec![id.clone()];
            record.extend(values.iter().map(|v| format!("{v:?}")));
            record.push(on_front.to_string());
            w.write_record(&record)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }

    pub fn front(&self) -> Vec<&str> {
        self.models
            .iter()
            .filter(|m| m.2)
            .map(|m| m.0.as_str())
            .collect()
    }
}

/// Compares models by the `#mean` rows of their analysis reports. The model
/// id of a report is its file stem.
pub fn pareto(reports: &[&Path], objectives: &[MetricField]) -> anyhow::Result<ParetoTable> {
    if objectives.is_empty() {
        bail!("at least one objective is required");
    }
    let mut points = Vec::with_capacity(reports.len());
    for path in reports {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .with_context(|| format!("no model id in {}", path.display()))?
            .to_string();
        let rows: Vec<ReportRow> = read_csv(path)?;
        let mean = rows
            .into_iter()
            .find(|r| r.subject_id == MEAN_ROW)
            .with_context(|| format!("{} has no {MEAN_ROW} row", path.display()))?
            .into_metrics([]);
        points.push(ParetoPoint {
            id,
            objectives: objectives.iter().map(|&o| mean.field(o)).collect(),
        });
    }
    let directions: Vec<_> = objectives.iter().map(|o| o.direction()).collect();
    let front = pareto_front(&points, &directions)?;
    Ok(ParetoTable {
        objectives: objectives.to_vec(),
        models: points
            .into_iter()
            .map(|p| {
                let on = front.contains(&p.id);
                (p.id, p.objectives, on)
            })
            .collect(),
    })
}

use calvol_core::theory::{self, BoundReport};
use calvol_core::DiscreteDataset;

use super::{load_subject, Settings};
use crate::manifest::CohortManifest;
use crate::report::{to_csv, BoundRow, DATASET_ROW};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundTable {
    /// Subject rows in manifest order, then the pooled `#dataset` row.
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.chain_holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows.iter().filter(|r| !r.chain_holds)
    }

    pub fn to_csv(&self) -> anyhow::Result<Vec<u8>> {
        to_csv(&self.rows)
    }
}

/// Checks `exact_ce >= binned_ece >= |bias|` for every subject and the pool.
pub fn verify_bound(manifest: &CohortManifest, settings: &Settings) -> anyhow::Result<BoundTable> {
    let scheme = settings.scheme()?;
    let results: Vec<(BoundReport, DiscreteDataset)> =
        settings.par_map(&manifest.subjects, |entry| {
            let data = load_subject(entry)?.dataset()?;
            Ok((theory::verify_bound(&data, &scheme)?, data))
        })?;
    let mut rows: Vec<BoundRow> = manifest
        .subjects
        .iter()
        .zip(&results)
        .map(|(entry, (report, _))| BoundRow::new(entry.id.clone(), report))
        .collect();
    let pooled = DiscreteDataset::concat(results.iter().map(|(_, d)| d));
    rows.push(BoundRow::new(DATASET_ROW, &theory::verify_bound(&pooled, &scheme)?));
    Ok(BoundTable { rows })
}

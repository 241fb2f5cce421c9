#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

pub fn calvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_calvol"))
        .args(args)
        .output()
        .expect("calvol runs")
}

/// Runs `calvol` and panics with its stderr unless it succeeds.
pub fn calvol_ok(args: &[&str]) -> Output {
    let out = calvol(args);
    assert!(
        out.status.success(),
        "calvol {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

/// Every file directly inside `dir`, by name.
pub fn dir_contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

/// A small phantom spec; `extra` is spliced in after the last field and may
/// override the boundary softness.
pub fn phantom_spec(extra: &str) -> String {
    let softness = if extra.contains("boundary_softness") {
        ""
    } else {
        "\n  \"boundary_softness\": 1.5,"
    };
    format!(
        r#"{{
  "model_id": "phantom",
  "n_subjects": 8,
  "grid_dims": [20, 20, 20],
  "voxel_volume_ml": 0.001,
  "radius": {{ "law": "uniform", "min": 3.0, "max": 8.0 }},{softness}
  "seed": 11{extra}
}}"#
    )
}

pub fn write_spec(dir: &Path, json: &str) -> std::path::PathBuf {
    let path = dir.join("spec.json");
    std::fs::write(&path, json).unwrap();
    path
}

//! Raw volume containers: a JSON header `X.json` next to a little-endian,
//! C-order payload `X.raw`.
//!
//! ```json
//! { "dims": [4, 4, 2], "dtype": "f32", "voxel_volume_ml": 0.001, "kind": "prob" }
//! ```
//!
//! `prob` and `logit` payloads are `f32`; `label` and `mask` payloads are `u8`
//! holding 0 or 1.

use std::fs;
use std::path::{Path, PathBuf};

use calvol_core::{Dims, LabelVolume, ProbVolume};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atomic::write_atomic;

/// Probabilities this far outside `[0, 1]` are clamped with a warning.
pub const PROB_CLAMP_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ContainerError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: malformed header: {source}")]
    Header {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{path}: payload has {got} bytes, header implies {expected}")]
    LengthMismatch {
        path: PathBuf,
        expected: usize,
        got: usize,
    },
    #[error("{path}: value {value} at voxel {index} is invalid for kind `{kind}`")]
    Range {
        path: PathBuf,
        kind: VolumeKind,
        index: usize,
        value: f64,
    },
    #[error("{path}: dtype `{dtype}` cannot hold kind `{kind}`")]
    DtypeKind {
        path: PathBuf,
        dtype: Dtype,
        kind: VolumeKind,
    },
    #[error("{path}: expected a `{expected}` volume, found `{found}`")]
    WrongKind {
        path: PathBuf,
        expected: VolumeKind,
        found: VolumeKind,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        source: calvol_core::Error,
    },
}

type Result<T> = std::result::Result<T, ContainerError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dtype {
    F32,
    U8,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::U8 => 1,
        }
    }
}

impl std::fmt::Display for Dtype {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Dtype::F32 => "f32",
            Dtype::U8 => "u8",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeKind {
    Prob,
    Label,
    Mask,
    Logit,
}

impl VolumeKind {
    fn dtype(self) -> Dtype {
        match self {
            VolumeKind::Prob | VolumeKind::Logit => Dtype::F32,
            VolumeKind::Label | VolumeKind::Mask => Dtype::U8,
        }
    }
}

impl std::fmt::Display for VolumeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VolumeKind::Prob => "prob",
            VolumeKind::Label => "label",
            VolumeKind::Mask => "mask",
            VolumeKind::Logit => "logit",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeHeader {
    pub dims: Dims,
    pub dtype: Dtype,
    pub voxel_volume_ml: f64,
    pub kind: VolumeKind,
}

impl VolumeHeader {
    pub fn new(dims: Dims, voxel_volume_ml: f64, kind: VolumeKind) -> Self {
        Self {
            dims,
            dtype: kind.dtype(),
            voxel_volume_ml,
            kind,
        }
    }

    pub fn voxel_count(&self) -> usize {
        self.dims.iter().product()
    }
}

/// Decoded payload of a container.
#[derive(Debug, Clone, PartialEq)]
pub enum VolumeData {
    Real(Vec<f64>),
    Binary(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawVolume {
    pub header: VolumeHeader,
    pub data: VolumeData,
}

/// Payload file belonging to a header path.
pub fn payload_path(header_path: &Path) -> PathBuf {
    header_path.with_extension("raw")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ContainerError + '_ {
    move |source| ContainerError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads and validates any container.
pub fn read_volume(path: &Path) -> Result<RawVolume> {
    let text = fs::read(path).map_err(io_err(path))?;
    let header: VolumeHeader =
        serde_json::from_slice(&text).map_err(|source| ContainerError::Header {
            path: path.to_path_buf(),
            source,
        })?;
    if header.dtype != header.kind.dtype() {
        return Err(ContainerError::DtypeKind {
            path: path.to_path_buf(),
            dtype: header.dtype,
            kind: header.kind,
        });
    }
    if header.dims.contains(&0)
        || !(header.voxel_volume_ml.is_finite() && header.voxel_volume_ml > 0.0)
    {
        return Err(ContainerError::Invalid {
            path: path.to_path_buf(),
            source: calvol_core::Error::InvalidParameter(format!(
                "dims {:?} and voxel volume {} must be positive",
                header.dims, header.voxel_volume_ml
            )),
        });
    }
    let raw_path = payload_path(path);
    let bytes = fs::read(&raw_path).map_err(io_err(&raw_path))?;
    let expected = header.voxel_count().saturating_mul(header.dtype.size());
    if bytes.len() != expected {
        return Err(ContainerError::LengthMismatch {
            path: raw_path,
            expected,
            got: bytes.len(),
        });
    }

    let range_err = |index: usize, value: f64| ContainerError::Range {
        path: path.to_path_buf(),
        kind: header.kind,
        index,
        value,
    };
    let data = match header.kind {
        VolumeKind::Prob | VolumeKind::Logit => {
            let mut values = Vec::with_capacity(header.voxel_count());
            let mut clamped = 0usize;
            for (index, chunk) in bytes.chunks_exact(4).enumerate() {
                let v = f64::from(f32::from_le_bytes(chunk.try_into().expect("4-byte chunk")));
                if !v.is_finite() {
                    return Err(range_err(index, v));
                }
                if header.kind == VolumeKind::Prob && !(0.0..=1.0).contains(&v) {
                    if !(-PROB_CLAMP_TOLERANCE..=1.0 + PROB_CLAMP_TOLERANCE).contains(&v) {
                        return Err(range_err(index, v));
                    }
                    clamped += 1;
                    values.push(v.clamp(0.0, 1.0));
                    continue;
                }
                values.push(v);
            }
            if clamped > 0 {
                log::warn!(
                    "{}: clamped {clamped} probabilities slightly outside [0, 1]",
                    path.display()
                );
            }
            VolumeData::Real(values)
        }
        VolumeKind::Label | VolumeKind::Mask => {
            if let Some(index) = bytes.iter().position(|&b| b > 1) {
                return Err(range_err(index, f64::from(bytes[index])));
            }
            VolumeData::Binary(bytes.iter().map(|&b| b == 1).collect())
        }
    };
    Ok(RawVolume { header, data })
}

fn expect_kind(path: &Path, raw: &RawVolume, expected: VolumeKind) -> Result<()> {
    if raw.header.kind == expected {
        Ok(())
    } else {
        Err(ContainerError::WrongKind {
            path: path.to_path_buf(),
            expected,
            found: raw.header.kind,
        })
    }
}

fn invalid(path: &Path) -> impl FnOnce(calvol_core::Error) -> ContainerError + '_ {
    move |source| ContainerError::Invalid {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_prob(path: &Path) -> Result<ProbVolume> {
    let raw = read_volume(path)?;
    expect_kind(path, &raw, VolumeKind::Prob)?;
    let VolumeData::Real(values) = raw.data else {
        unreachable!("prob payloads decode to reals")
    };
    ProbVolume::new(values, raw.header.dims, raw.header.voxel_volume_ml, None).map_err(invalid(path))
}

pub fn read_label(path: &Path) -> Result<LabelVolume> {
    let raw = read_volume(path)?;
    expect_kind(path, &raw, VolumeKind::Label)?;
    let VolumeData::Binary(values) = raw.data else {
        unreachable!("label payloads decode to booleans")
    };
    LabelVolume::new(values, raw.header.dims, raw.header.voxel_volume_ml).map_err(invalid(path))
}

/// Mask voxels and the dims they were stored with.
pub fn read_mask(path: &Path) -> Result<(Vec<bool>, Dims)> {
    let raw = read_volume(path)?;
    expect_kind(path, &raw, VolumeKind::Mask)?;
    let VolumeData::Binary(values) = raw.data else {
        unreachable!("mask payloads decode to booleans")
    };
    Ok((values, raw.header.dims))
}

/// Raw logits with their header.
pub fn read_logits(path: &Path) -> Result<(Vec<f64>, VolumeHeader)> {
    let raw = read_volume(path)?;
    expect_kind(path, &raw, VolumeKind::Logit)?;
    let VolumeData::Real(values) = raw.data else {
        unreachable!("logit payloads decode to reals")
    };
    Ok((values, raw.header))
}

fn write_container(path: &Path, header: &VolumeHeader, payload: &[u8]) -> std::io::Result<()> {
    let mut text = serde_json::to_vec_pretty(header).map_err(std::io::Error::other)?;
    text.push(b'\n');
    write_atomic(&payload_path(path), payload)?;
    write_atomic(path, &text)
}

fn f32_payload(values: &[f64]) -> Vec<u8> {
    values
        .iter()
        .flat_map(|&v| (v as f32).to_le_bytes())
        .collect()
}

fn u8_payload(values: &[bool]) -> Vec<u8> {
    values.iter().map(|&v| u8::from(v)).collect()
}

/// Writes scores as `f32` (the mask, if any, is not written).
pub fn write_prob(path: &Path, volume: &ProbVolume) -> std::io::Result<()> {
    let header = VolumeHeader::new(volume.dims(), volume.voxel_volume_ml(), VolumeKind::Prob);
    write_container(path, &header, &f32_payload(volume.scores()))
}

pub fn write_label(path: &Path, volume: &LabelVolume) -> std::io::Result<()> {
    let header = VolumeHeader::new(volume.dims(), volume.voxel_volume_ml(), VolumeKind::Label);
    write_container(path, &header, &u8_payload(volume.labels()))
}

pub fn write_mask(path: &Path, mask: &[bool], dims: Dims, voxel_volume_ml: f64) -> std::io::Result<()> {
    let header = VolumeHeader::new(dims, voxel_volume_ml, VolumeKind::Mask);
    write_container(path, &header, &u8_payload(mask))
}

pub fn write_logits(path: &Path, logits: &[f64], dims: Dims, voxel_volume_ml: f64) -> std::io::Result<()> {
    let header = VolumeHeader::new(dims, voxel_volume_ml, VolumeKind::Logit);
    write_container(path, &header, &f32_payload(logits))
}

//! On-disk descriptor and PCA model stores.
//!
//! A store is one JSON header line followed by `count × dim` little-endian
//! `f64` values, row-major.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use srs_lbp::{FeatureSpec, PcaModel, Sample};
use thiserror::Error;

pub const DESCRIPTOR_FORMAT: &str = "srs-lbp-descriptors";
pub const MODEL_FORMAT: &str = "srs-lbp-pca-model";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
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
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn invalid(path: &Path, message: impl Into<String>) -> StoreError {
    StoreError::Invalid {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescriptorHeader {
    pub format: String,
    pub version: u32,
    pub feature: FeatureSpec,
    pub count: usize,
    pub dim: usize,
    pub radii: Vec<u32>,
    pub block_sizes: Vec<usize>,
    pub sample_ids: Vec<String>,
    pub writer_ids: Vec<String>,
    pub tags: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub format: String,
    pub version: u32,
    pub feature: Option<FeatureSpec>,
    /// Body rows: the mean followed by one row per component.
    pub count: usize,
    pub dim: usize,
    pub radii: Vec<u32>,
    pub n_components: usize,
    pub explained_variance: Vec<f64>,
    /// Samples the model was fitted on.
    pub sample_ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoredSample {
    pub sample_id: String,
    pub writer_id: String,
    pub tags: Vec<String>,
    pub values: Vec<f64>,
}

impl StoredSample {
    pub fn to_sample(&self) -> Sample {
        Sample {
            sample_id: self.sample_id.clone(),
            writer_id: self.writer_id.clone(),
            features: self.values.clone(),
        }
    }

    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorStore {
    pub feature: FeatureSpec,
    pub samples: Vec<StoredSample>,
}

impl DescriptorStore {
    pub fn dim(&self) -> usize {
        // 0 for an invalid feature spec, which write and read both reject
        self.feature.dim().unwrap_or(0)
    }

    pub fn to_samples(&self, tag: Option<&str>) -> Vec<Sample> {
        self.samples
            .iter()
            .filter(|s| tag.is_none_or(|t| s.has_tag(t)))
            .map(StoredSample::to_sample)
            .collect()
    }

    fn header(&self) -> DescriptorHeader {
        DescriptorHeader {
            format: DESCRIPTOR_FORMAT.into(),
            version: VERSION,
            feature: self.feature.clone(),
            count: self.samples.len(),
            dim: self.dim(),
            radii: self.feature.radii(),
            block_sizes: self.feature.block_sizes().unwrap_or_default(),
            sample_ids: self.samples.iter().map(|s| s.sample_id.clone()).collect(),
            writer_ids: self.samples.iter().map(|s| s.writer_id.clone()).collect(),
            tags: self.samples.iter().map(|s| s.tags.clone()).collect(),
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        let path = path.as_ref();
        let dim = self.feature.dim().map_err(|e| invalid(path, e.to_string()))?;
        if let Some(s) = self.samples.iter().find(|s| s.values.len() != dim) {
            return Err(invalid(
                path,
                format!("sample {} has {} values, expected {dim}", s.sample_id, s.values.len()),
            ));
        }
        write_store(path, &self.header(), self.samples.iter().map(|s| s.values.as_slice()))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let (header, body): (DescriptorHeader, _) = read_store(path, DESCRIPTOR_FORMAT, |h: &DescriptorHeader| {
            (h.format.clone(), h.version, h.count, h.dim)
        })?;
        let spec_dim = header
            .feature
            .dim()
            .map_err(|e| invalid(path, format!("invalid feature spec: {e}")))?;
        if header.dim != spec_dim {
            return Err(invalid(
                path,
                format!("header dim {} does not match feature dim {spec_dim}", header.dim),
            ));
        }
        if header.radii != header.feature.radii()
            || header.feature.block_sizes().ok().as_ref() != Some(&header.block_sizes)
        {
            return Err(invalid(path, "radii or block sizes disagree with the feature spec"));
        }
        let n = header.count;
        if header.sample_ids.len() != n || header.writer_ids.len() != n || header.tags.len() != n {
            return Err(invalid(path, "id lists do not match count"));
        }
        let samples = body
            .chunks_exact(header.dim)
            .zip(header.sample_ids)
            .zip(header.writer_ids)
            .zip(header.tags)
            .map(|(((values, sample_id), writer_id), tags)| StoredSample {
                sample_id,
                writer_id,
                tags,
                values: values.to_vec(),
            })
            .collect();
        Ok(DescriptorStore {
            feature: header.feature,
            samples,
        })
    }
}

/// A fitted PCA model with the ids of its training samples.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelStore {
    pub feature: Option<FeatureSpec>,
    pub model: PcaModel,
    pub sample_ids: Vec<String>,
}

impl ModelStore {
    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        let m = &self.model;
        let header = ModelHeader {
            format: MODEL_FORMAT.into(),
            version: VERSION,
            feature: self.feature.clone(),
            count: m.n_components() + 1,
            dim: m.input_dim(),
            radii: self.feature.as_ref().map(FeatureSpec::radii).unwrap_or_default(),
            n_components: m.n_components(),
            explained_variance: m.explained_variance().to_vec(),
            sample_ids: self.sample_ids.clone(),
        };
        let rows = std::iter::once(m.mean()).chain((0..m.n_components()).map(|i| m.component(i)));
        write_store(path.as_ref(), &header, rows)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let (header, body): (ModelHeader, _) =
            read_store(path, MODEL_FORMAT, |h: &ModelHeader| (h.format.clone(), h.version, h.count, h.dim))?;
        if header.count != header.n_components + 1 {
            return Err(invalid(path, "count must equal n_components + 1"));
        }
        let (mean, components) = body.split_at(header.dim);
        let model = PcaModel::from_parts(mean.to_vec(), components.to_vec(), header.explained_variance)
            .map_err(|e| invalid(path, e.to_string()))?;
        Ok(ModelStore {
            feature: header.feature,
            model,
            sample_ids: header.sample_ids,
        })
    }
}

fn write_store<'a, H: Serialize>(
    path: &Path,
    header: &H,
    rows: impl Iterator<Item = &'a [f64]>,
) -> Result<(), StoreError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let line = serde_json::to_string(header).map_err(|source| StoreError::Header {
        path: path.to_path_buf(),
        source,
    })?;
    w.write_all(line.as_bytes()).map_err(io_err(path))?;
    w.write_all(b"\n").map_err(io_err(path))?;
    for row in rows {
        for v in row {
            w.write_all(&v.to_le_bytes()).map_err(io_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

/// Reads a header and its body. `meta` extracts (format, version, count, dim).
fn read_store<H: DeserializeOwned>(
    path: &Path,
    format: &str,
    meta: impl Fn(&H) -> (String, u32, usize, usize),
) -> Result<(H, Vec<f64>), StoreError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut r = BufReader::new(file);
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line).map_err(io_err(path))?;
    if line.last() != Some(&b'\n') {
        return Err(invalid(path, "missing header line"));
    }
    let header: H = serde_json::from_slice(&line).map_err(|source| StoreError::Header {
        path: path.to_path_buf(),
        source,
    })?;
    let (found, version, count, dim) = meta(&header);
    if found != format {
        return Err(invalid(path, format!("expected format {format}, found {found}")));
    }
    if version != VERSION {
        return Err(invalid(path, format!("unsupported version {version}")));
    }
    let expected = count
        .checked_mul(dim)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| invalid(path, "count × dim overflows"))?;
    let mut bytes = Vec::with_capacity(expected);
    r.read_to_end(&mut bytes).map_err(io_err(path))?;
    if bytes.len() != expected {
        return Err(invalid(
            path,
            format!(
                "body has {} bytes, header implies {count} × {dim} × 8 = {expected}",
                bytes.len()
            ),
        ));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    Ok((header, values))
}

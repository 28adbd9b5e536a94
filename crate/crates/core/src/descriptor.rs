//! Pooling code images into page-level histogram descriptors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::GrayImage;
use crate::lbp::{
    build_mapping, lbp_3x3_transform, srs_lbp_transform, transform_with_mode, CodeImage,
    CodeMapping, Compression, RadialConfig, ThresholdMode,
};

/// Concatenated per-radius histograms of one page.
#[derive(Clone, Debug, PartialEq)]
pub struct PageDescriptor {
    pub sample_id: String,
    pub radii: Vec<u32>,
    pub values: Vec<f64>,
}

impl PageDescriptor {
    pub fn with_sample_id(mut self, id: impl Into<String>) -> Self {
        self.sample_id = id.into();
        self
    }

    /// Histogram block of the `i`-th configured radius.
    pub fn block(&self, i: usize) -> &[f64] {
        let len = self.values.len() / self.radii.len();
        &self.values[i * len..(i + 1) * len]
    }
}

/// Histogram of `codes` over the valid region.
///
/// With `mapping` the raw codes are first folded into its bins. With
/// `discard_zero` raw code 0 is dropped before normalization. The result is
/// L1-normalized, or all zeros when nothing was counted.
pub fn pool_codes(codes: &CodeImage, mapping: Option<&CodeMapping>, discard_zero: bool) -> Vec<f64> {
    let mut raw = vec![0u64; 1 << codes.points()];
    for &c in codes.codes() {
        raw[c as usize] += 1;
    }
    if discard_zero {
        raw[0] = 0;
    }
    let counts = match mapping {
        None => raw,
        Some(m) => {
            let mut folded = vec![0u64; m.bin_count()];
            for (code, n) in raw.into_iter().enumerate() {
                folded[m.table()[code] as usize] += n;
            }
            folded
        }
    };
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0.0; counts.len()];
    }
    let total = total as f64;
    counts.into_iter().map(|n| n as f64 / total).collect()
}

/// The page-descriptor block of one radius: code histogram with the zero
/// pattern discarded, L1-normalized. 256 entries for 8-sample codes.
pub fn pool_histogram(codes: &CodeImage) -> Vec<f64> {
    pool_codes(codes, None, true)
}

/// Block-normalized descriptor of `img`, blocks in configuration order.
pub fn build_descriptor(img: &GrayImage, cfg: &RadialConfig) -> Result<PageDescriptor> {
    let code_images = srs_lbp_transform(img, cfg)?;
    let values = code_images.iter().flat_map(pool_histogram).collect();
    Ok(PageDescriptor {
        sample_id: String::new(),
        radii: cfg.radii().to_vec(),
        values,
    })
}

/// Classical LBP feature sets used for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Baseline {
    #[serde(rename = "lbp3x3")]
    Lbp3x3,
    #[serde(rename = "lbp8-1")]
    Lbp8R1,
    #[serde(rename = "lbp16-2")]
    Lbp16R2,
    #[serde(rename = "concat8-1_16-2")]
    Concat8R1And16R2,
}

impl Baseline {
    pub fn name(self) -> &'static str {
        match self {
            Baseline::Lbp3x3 => "lbp3x3",
            Baseline::Lbp8R1 => "lbp8-1",
            Baseline::Lbp16R2 => "lbp16-2",
            Baseline::Concat8R1And16R2 => "concat8-1_16-2",
        }
    }

    /// `(points, radius)` of each circular operator, empty for the lattice
    /// 3x3 operator.
    fn circles(self) -> &'static [(usize, u32)] {
        match self {
            Baseline::Lbp3x3 => &[],
            Baseline::Lbp8R1 => &[(8, 1)],
            Baseline::Lbp16R2 => &[(16, 2)],
            Baseline::Concat8R1And16R2 => &[(8, 1), (16, 2)],
        }
    }
}

impl std::str::FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Baseline::Lbp3x3,
            Baseline::Lbp8R1,
            Baseline::Lbp16R2,
            Baseline::Concat8R1And16R2,
        ]
        .into_iter()
        .find(|b| b.name() == s)
        .ok_or_else(|| Error::invalid(format!("unknown baseline {s:?}")))
    }
}

/// What to extract from each page.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FeatureSpec {
    /// Multi-radius sparse sampling with the zero pattern discarded.
    Srs {
        config: RadialConfig,
        compression: Compression,
    },
    /// A classical operator; full histograms, each block L1-normalized.
    Baseline {
        baseline: Baseline,
        compression: Compression,
        threshold: ThresholdMode,
    },
}

impl FeatureSpec {
    pub fn srs(config: RadialConfig) -> Self {
        FeatureSpec::Srs {
            config,
            compression: Compression::None,
        }
    }

    /// Classical operator with the sign comparison (`t = 0`).
    pub fn baseline(baseline: Baseline, compression: Compression) -> Self {
        FeatureSpec::Baseline {
            baseline,
            compression,
            threshold: ThresholdMode::Fixed(0.0),
        }
    }

    /// Short identifier, e.g. `srs` or `lbp16-2/u2`.
    pub fn label(&self) -> String {
        match self {
            FeatureSpec::Srs { compression, .. } => match compression {
                Compression::None => "srs".to_string(),
                c => format!("srs/{}", c.name()),
            },
            FeatureSpec::Baseline {
                baseline,
                compression,
                ..
            } => match compression {
                Compression::None => baseline.name().to_string(),
                c => format!("{}/{}", baseline.name(), c.name()),
            },
        }
    }

    /// Radius of each block.
    pub fn radii(&self) -> Vec<u32> {
        match self {
            FeatureSpec::Srs { config, .. } => config.radii().to_vec(),
            FeatureSpec::Baseline { baseline, .. } => match baseline {
                Baseline::Lbp3x3 => vec![1],
                b => b.circles().iter().map(|&(_, r)| r).collect(),
            },
        }
    }

    fn block_points(&self) -> Vec<usize> {
        match self {
            FeatureSpec::Srs { config, .. } => vec![config.points(); config.radii().len()],
            FeatureSpec::Baseline { baseline, .. } => match baseline {
                Baseline::Lbp3x3 => vec![8],
                b => b.circles().iter().map(|&(p, _)| p).collect(),
            },
        }
    }

    fn compression(&self) -> Compression {
        match self {
            FeatureSpec::Srs { compression, .. } | FeatureSpec::Baseline { compression, .. } => {
                *compression
            }
        }
    }

    fn mapping(&self, points: usize) -> Result<Option<CodeMapping>> {
        match self.compression() {
            Compression::None => Ok(None),
            mode => build_mapping(points, mode).map(Some),
        }
    }

    /// Number of entries in each block.
    pub fn block_sizes(&self) -> Result<Vec<usize>> {
        self.block_points()
            .into_iter()
            .map(|p| Ok(self.mapping(p)?.map_or(1 << p, |m| m.bin_count())))
            .collect()
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(self.block_sizes()?.iter().sum())
    }

    /// Smallest image side the spec can be extracted from.
    pub fn min_side(&self) -> usize {
        2 * self.radii().into_iter().max().unwrap_or(1) as usize + 1
    }

    pub fn extract(&self, img: &GrayImage) -> Result<Vec<f64>> {
        match self {
            FeatureSpec::Srs { config, .. } => {
                let mapping = self.mapping(config.points())?;
                let codes = srs_lbp_transform(img, config)?;
                Ok(codes
                    .iter()
                    .flat_map(|c| pool_codes(c, mapping.as_ref(), true))
                    .collect())
            }
            FeatureSpec::Baseline {
                baseline,
                threshold,
                ..
            } => {
                if *baseline == Baseline::Lbp3x3 {
                    if *threshold != ThresholdMode::Fixed(0.0) {
                        return Err(Error::invalid(
                            "the 3x3 operator only supports the sign comparison (fixed:0)",
                        ));
                    }
                    let mapping = self.mapping(8)?;
                    return Ok(pool_codes(&lbp_3x3_transform(img)?, mapping.as_ref(), false));
                }
                let blocks = baseline
                    .circles()
                    .par_iter()
                    .map(|&(p, r)| {
                        let mapping = self.mapping(p)?;
                        let (codes, _) = transform_with_mode(img, p, r, *threshold)?;
                        Ok(pool_codes(&codes, mapping.as_ref(), false))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(blocks.concat())
            }
        }
    }
}

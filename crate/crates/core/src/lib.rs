//! Sparse radial sampling local binary patterns for text-as-texture
//! classification and writer identification.
//!
//! The pipeline turns a page into one code image per radius (eight bilinear
//! samples at every radius, Otsu-derived binarization threshold), pools each
//! into an L1-normalized histogram with the zero pattern removed, projects
//! the concatenation with PCA, and applies a signed square root followed by
//! L2 normalization. Pages are compared by Euclidean distance.
//!
//! ```
//! use srs_lbp::{build_descriptor, GrayImage, RadialConfig};
//!
//! let page = GrayImage::from_fn(64, 64, |x, y| if (x + 2 * y) % 9 < 3 { 30 } else { 250 })?;
//! let descriptor = build_descriptor(&page, &RadialConfig::default())?;
//! assert_eq!(descriptor.values.len(), 256 * 12);
//! # Ok::<(), srs_lbp::Error>(())
//! ```

pub mod descriptor;
pub mod embedding;
mod error;
pub mod evaluation;
pub mod imaging;
pub mod lbp;
pub mod synth;

pub use descriptor::{build_descriptor, pool_histogram, Baseline, FeatureSpec, PageDescriptor};
pub use embedding::{
    embed, fit_pca, fit_pca_with, hellinger_l2, project, EmbeddedVector, PcaModel, PcaSolver,
};
pub use error::{Error, Result};
pub use evaluation::{
    run_l1out, run_metric, run_metric_with_model, CorpusImage, EvalConfig, EvalReport, Protocol,
    Sample, SampleRecord,
};
pub use imaging::{load_image, rotate_image, sample_bilinear, GrayImage};
pub use lbp::{
    build_mapping, compute_difference_histogram, lbp_3x3_transform, lbp_transform, otsu_threshold,
    srs_lbp_transform, CodeImage, CodeMapping, Compression, DifferenceHistogram, RadialConfig,
    ThresholdMode,
};
pub use synth::{generate_synthetic_corpus, SynthParams};

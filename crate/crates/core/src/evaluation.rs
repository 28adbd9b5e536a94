//! Nearest-neighbor retrieval evaluation.
//!
//! Every sample is used as a query against all other samples. Soft top-n
//! scores a query when any of its `n` nearest neighbors shares its writer;
//! hard top-n requires all `n` to share it.
//!
//! Two protocols differ only in where PCA is learned: `l1out` fits it on the
//! evaluation corpus itself, `metric` on a disjoint corpus.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptor::FeatureSpec;
use crate::embedding::{embed, fit_pca, EmbeddedVector, PcaModel, DEFAULT_COMPONENTS};
use crate::error::{Error, Result};
use crate::imaging::{rotate_image, GrayImage};
use crate::lbp::{Compression, RadialConfig};

/// One page with its writer label.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusImage {
    pub sample_id: String,
    pub writer_id: String,
    pub image: GrayImage,
}

/// Pre-embedding features of one labeled page.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub sample_id: String,
    pub writer_id: String,
    pub features: Vec<f64>,
}

impl AsRef<[f64]> for Sample {
    fn as_ref(&self) -> &[f64] {
        &self.features
    }
}

/// Embedded page with its writer label.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRecord {
    pub writer_id: String,
    pub embedded: EmbeddedVector,
}

impl SampleRecord {
    pub fn sample_id(&self) -> &str {
        &self.embedded.sample_id
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub sample_id: String,
    pub distance: f64,
}

/// Gallery samples ordered by ascending distance to a query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub query_id: String,
    pub neighbors: Vec<Neighbor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    L1out,
    Metric,
}

impl std::str::FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1out" => Ok(Protocol::L1out),
            "metric" => Ok(Protocol::Metric),
            other => Err(Error::invalid(format!(
                "unknown protocol {other:?} (expected l1out or metric)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Requested number of principal components.
    pub n_components: usize,
    pub soft: Vec<usize>,
    pub hard: Vec<usize>,
    /// How many neighbors of each query to keep in the report; `None` keeps
    /// the full ranking. Metrics always use the full ranking.
    pub ranking_depth: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            n_components: DEFAULT_COMPONENTS,
            soft: vec![1, 2, 5, 10],
            hard: vec![2, 3, 4],
            ranking_depth: None,
        }
    }
}

/// Hard top-n result. Queries whose writer has fewer than `n` other samples
/// cannot satisfy the criterion and are left out of the average.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardScore {
    /// `None` when every query was excluded.
    pub accuracy: Option<f64>,
    pub evaluated: usize,
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub protocol: Protocol,
    pub config: EvalConfig,
    /// Components actually used by the embedding.
    pub n_components: usize,
    pub n_queries: usize,
    pub soft_top: BTreeMap<usize, f64>,
    pub hard_top: BTreeMap<usize, HardScore>,
    pub rankings: Vec<RankedList>,
}

impl EvalReport {
    pub fn top1(&self) -> f64 {
        self.soft_top.get(&1).copied().unwrap_or(f64::NAN)
    }
}

/// Sample id to writer id.
pub type Labels = HashMap<String, String>;

pub fn labels_of(records: &[SampleRecord]) -> Labels {
    records
        .iter()
        .map(|r| (r.sample_id().to_string(), r.writer_id.clone()))
        .collect()
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Orders `gallery` by Euclidean distance to `query`, skipping the query's
/// own sample id. Ties keep gallery order.
pub fn rank(query: &EmbeddedVector, gallery: &[SampleRecord]) -> Result<RankedList> {
    let dim = query.values.len();
    let mut neighbors = Vec::with_capacity(gallery.len());
    for g in gallery {
        if g.sample_id() == query.sample_id {
            continue;
        }
        if g.embedded.values.len() != dim {
            return Err(Error::invalid(format!(
                "gallery sample {} has dimension {}, query {} has {dim}",
                g.sample_id(),
                g.embedded.values.len(),
                query.sample_id
            )));
        }
        neighbors.push(Neighbor {
            sample_id: g.sample_id().to_string(),
            distance: euclidean(&query.values, &g.embedded.values),
        });
    }
    if neighbors.is_empty() {
        return Err(Error::invalid(format!(
            "no gallery samples to rank for query {}",
            query.sample_id
        )));
    }
    neighbors.sort_by(|a, b| a.distance.total_cmp(&b.distance));
    Ok(RankedList {
        query_id: query.sample_id.clone(),
        neighbors,
    })
}

fn label<'a>(labels: &'a Labels, id: &str) -> Result<&'a str> {
    labels
        .get(id)
        .map(String::as_str)
        .ok_or_else(|| Error::invalid(format!("no writer label for sample {id}")))
}

/// Whether each neighbor shares the query's writer, in rank order.
fn same_writer(r: &RankedList, labels: &Labels) -> Result<Vec<bool>> {
    let writer = label(labels, &r.query_id)?;
    r.neighbors
        .iter()
        .map(|nb| label(labels, &nb.sample_id).map(|w| w == writer))
        .collect()
}

/// Fraction of queries with at least one same-writer sample among their `n`
/// nearest neighbors.
pub fn topn_soft(rankings: &[RankedList], labels: &Labels, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::invalid("top-n requires n >= 1"));
    }
    if rankings.is_empty() {
        return Err(Error::invalid("no rankings to score"));
    }
    let mut hits = 0usize;
    for r in rankings {
        let same = same_writer(r, labels)?;
        if !same.contains(&true) {
            return Err(Error::invalid(format!(
                "query {} has no same-writer sample in its gallery",
                r.query_id
            )));
        }
        if same.iter().take(n).any(|&s| s) {
            hits += 1;
        }
    }
    Ok(hits as f64 / rankings.len() as f64)
}

/// Fraction of queries whose `n` nearest neighbors all share the query's
/// writer, over the queries that have at least `n` same-writer samples.
pub fn topn_hard(rankings: &[RankedList], labels: &Labels, n: usize) -> Result<HardScore> {
    if n < 1 {
        return Err(Error::invalid("top-n requires n >= 1"));
    }
    let (mut hits, mut evaluated, mut excluded) = (0usize, 0usize, 0usize);
    for r in rankings {
        let same = same_writer(r, labels)?;
        if same.iter().filter(|&&s| s).count() < n {
            excluded += 1;
            continue;
        }
        evaluated += 1;
        if same[..n].iter().all(|&s| s) {
            hits += 1;
        }
    }
    Ok(HardScore {
        accuracy: (evaluated > 0).then(|| hits as f64 / evaluated as f64),
        evaluated,
        excluded,
    })
}

/// Ranks every record against all others and scores the result.
pub fn evaluate_records(
    protocol: Protocol,
    records: &[SampleRecord],
    n_components: usize,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let rankings = records
        .par_iter()
        .map(|q| rank(&q.embedded, records))
        .collect::<Result<Vec<_>>>()?;
    score(protocol, rankings, &labels_of(records), n_components, cfg)
}

fn score(
    protocol: Protocol,
    mut rankings: Vec<RankedList>,
    labels: &Labels,
    n_components: usize,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    let soft_top = cfg
        .soft
        .iter()
        .map(|&n| Ok((n, topn_soft(&rankings, labels, n)?)))
        .collect::<Result<_>>()?;
    let hard_top = cfg
        .hard
        .iter()
        .map(|&n| Ok((n, topn_hard(&rankings, labels, n)?)))
        .collect::<Result<_>>()?;
    if let Some(depth) = cfg.ranking_depth {
        for r in &mut rankings {
            r.neighbors.truncate(depth);
        }
    }
    Ok(EvalReport {
        protocol,
        config: cfg.clone(),
        n_components,
        n_queries: rankings.len(),
        soft_top,
        hard_top,
        rankings,
    })
}

/// Checks sample-id uniqueness, a shared dimension, and that there are at
/// least two writers with at least two samples each.
pub fn validate_corpus(samples: &[Sample]) -> Result<()> {
    let mut seen = HashSet::new();
    for s in samples {
        if !seen.insert(s.sample_id.as_str()) {
            return Err(Error::invalid(format!("duplicate sample id {}", s.sample_id)));
        }
    }
    if let Some(first) = samples.first() {
        let d = first.features.len();
        if let Some(bad) = samples.iter().find(|s| s.features.len() != d) {
            return Err(Error::invalid(format!(
                "sample {} has dimension {}, expected {d}",
                bad.sample_id,
                bad.features.len()
            )));
        }
    }
    let mut per_writer: BTreeMap<&str, usize> = BTreeMap::new();
    for s in samples {
        *per_writer.entry(s.writer_id.as_str()).or_default() += 1;
    }
    if per_writer.len() < 2 {
        return Err(Error::invalid(format!(
            "evaluation needs at least 2 writers, corpus has {}",
            per_writer.len()
        )));
    }
    let lonely: Vec<&str> = per_writer
        .iter()
        .filter(|(_, &n)| n < 2)
        .map(|(w, _)| *w)
        .collect();
    if !lonely.is_empty() {
        return Err(Error::invalid(format!(
            "every writer needs at least 2 samples; writers with one: {}",
            lonely.join(", ")
        )));
    }
    Ok(())
}

/// Embeds every sample with `model`.
pub fn embed_all(model: &PcaModel, samples: &[Sample]) -> Result<Vec<SampleRecord>> {
    samples
        .par_iter()
        .map(|s| {
            Ok(SampleRecord {
                writer_id: s.writer_id.clone(),
                embedded: embed(model, &s.sample_id, &s.features)?,
            })
        })
        .collect()
}

/// Leave-one-out evaluation with PCA learned on the evaluation corpus.
pub fn run_l1out(samples: &[Sample], cfg: &EvalConfig) -> Result<EvalReport> {
    validate_corpus(samples)?;
    let model = fit_pca(samples, cfg.n_components)?;
    let records = embed_all(&model, samples)?;
    evaluate_records(Protocol::L1out, &records, model.n_components(), cfg)
}

/// Fails when any eval sample id also appears among `pca_ids`.
pub fn check_disjoint<'a>(
    eval: &[Sample],
    pca_ids: impl IntoIterator<Item = &'a str>,
) -> Result<()> {
    let pca: HashSet<&str> = pca_ids.into_iter().collect();
    let overlap: Vec<&str> = eval
        .iter()
        .map(|s| s.sample_id.as_str())
        .filter(|id| pca.contains(id))
        .collect();
    if !overlap.is_empty() {
        let shown = overlap.len().min(5);
        let more = if overlap.len() > shown { ", ..." } else { "" };
        return Err(Error::invalid(format!(
            "PCA corpus overlaps the evaluation corpus in {} samples: {}{more}",
            overlap.len(),
            overlap[..shown].join(", ")
        )));
    }
    Ok(())
}

/// Leave-one-out ranking with PCA learned on an independent corpus.
pub fn run_metric(eval: &[Sample], pca_corpus: &[Sample], cfg: &EvalConfig) -> Result<EvalReport> {
    check_disjoint(eval, pca_corpus.iter().map(|s| s.sample_id.as_str()))?;
    let model = fit_pca(pca_corpus, cfg.n_components)?;
    run_metric_with_model(eval, &model, cfg)
}

/// Metric protocol with an already fitted model. The caller is responsible
/// for its training corpus being disjoint from `eval` (see
/// [`check_disjoint`]). The model is truncated to `cfg.n_components`.
pub fn run_metric_with_model(
    eval: &[Sample],
    model: &PcaModel,
    cfg: &EvalConfig,
) -> Result<EvalReport> {
    validate_corpus(eval)?;
    let model = model.truncated(cfg.n_components);
    let records = embed_all(&model, eval)?;
    evaluate_records(Protocol::Metric, &records, model.n_components(), cfg)
}

/// Extracts `spec` from every page.
pub fn extract_corpus(images: &[CorpusImage], spec: &FeatureSpec) -> Result<Vec<Sample>> {
    images
        .par_iter()
        .map(|c| {
            Ok(Sample {
                sample_id: c.sample_id.clone(),
                writer_id: c.writer_id.clone(),
                features: spec.extract(&c.image)?,
            })
        })
        .collect()
}

/// Points `(x, top-1 accuracy)`.
pub type Curve = Vec<(f64, f64)>;

/// Per-radius accuracy curves.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiiSweep {
    /// Radius `r` alone.
    pub individual: Curve,
    /// Radii `1..=r` concatenated.
    pub cumulative: Curve,
    /// Radius `r` alone with uniform (u2) compression.
    pub uniform: Curve,
}

fn select_blocks(samples: &[Sample], block: usize, blocks: std::ops::Range<usize>) -> Vec<Sample> {
    samples
        .iter()
        .map(|s| Sample {
            sample_id: s.sample_id.clone(),
            writer_id: s.writer_id.clone(),
            features: s.features[blocks.start * block..blocks.end * block].to_vec(),
        })
        .collect()
}

/// Top-1 accuracy of single radii and of growing radius sets `1..=r` for
/// `r` up to `max_radius`, all under `l1out`.
pub fn sweep_radii(images: &[CorpusImage], max_radius: u32, cfg: &EvalConfig) -> Result<RadiiSweep> {
    let (plain, uniform) = radii_sweep_specs(max_radius)?;
    radii_sweep_from_samples(
        &extract_corpus(images, &plain)?,
        &extract_corpus(images, &uniform)?,
        max_radius,
        cfg,
    )
}

/// Feature specs a radii sweep needs: radii `1..=max_radius` without and
/// with uniform compression.
pub fn radii_sweep_specs(max_radius: u32) -> Result<(FeatureSpec, FeatureSpec)> {
    let config = RadialConfig::srs((1..=max_radius).collect())?;
    Ok((
        FeatureSpec::srs(config.clone()),
        FeatureSpec::Srs {
            config,
            compression: Compression::U2,
        },
    ))
}

/// Radii sweep over samples extracted with [`radii_sweep_specs`].
///
/// Blocks of a descriptor depend only on their own radius, so one extraction
/// at `1..=max_radius` serves every point of the sweep.
pub fn radii_sweep_from_samples(
    plain: &[Sample],
    uniform: &[Sample],
    max_radius: u32,
    cfg: &EvalConfig,
) -> Result<RadiiSweep> {
    let (plain_spec, uniform_spec) = radii_sweep_specs(max_radius)?;
    let plain_block = plain_spec.block_sizes()?[0];
    let uniform_block = uniform_spec.block_sizes()?[0];
    let expect = |samples: &[Sample], dim: usize| -> Result<()> {
        match samples.iter().find(|s| s.features.len() != dim) {
            Some(s) => Err(Error::invalid(format!(
                "sample {} has dimension {}, radii sweep expects {dim}",
                s.sample_id,
                s.features.len()
            ))),
            None => Ok(()),
        }
    };
    expect(plain, plain_spec.dim()?)?;
    expect(uniform, uniform_spec.dim()?)?;

    let mut sweep = RadiiSweep {
        individual: Vec::new(),
        cumulative: Vec::new(),
        uniform: Vec::new(),
    };
    for i in 0..max_radius as usize {
        let x = (i + 1) as f64;
        let single = run_l1out(&select_blocks(plain, plain_block, i..i + 1), cfg)?;
        sweep.individual.push((x, single.top1()));
        let upto = run_l1out(&select_blocks(plain, plain_block, 0..i + 1), cfg)?;
        sweep.cumulative.push((x, upto.top1()));
        let u = run_l1out(&select_blocks(uniform, uniform_block, i..i + 1), cfg)?;
        sweep.uniform.push((x, u.top1()));
    }
    Ok(sweep)
}

/// Top-1 `l1out` accuracy for each number of principal components.
pub fn sweep_components(samples: &[Sample], n_list: &[usize], cfg: &EvalConfig) -> Result<Curve> {
    validate_corpus(samples)?;
    let largest = n_list.iter().copied().max().unwrap_or(0);
    let full = fit_pca(samples, largest)?;
    n_list
        .iter()
        .map(|&n| {
            let model = full.truncated(n);
            let records = embed_all(&model, samples)?;
            let report = evaluate_records(Protocol::L1out, &records, model.n_components(), cfg)?;
            Ok((n as f64, report.top1()))
        })
        .collect()
}

/// Queries unrotated pages against a rotated copy of the corpus.
///
/// PCA is fitted once on the unrotated descriptors and reused for every
/// rotated gallery. A query's own rotated page is not part of its gallery,
/// so angle 0 reproduces plain `l1out`.
pub fn sweep_rotation(
    images: &[CorpusImage],
    spec: &FeatureSpec,
    angles: &[f64],
    cfg: &EvalConfig,
) -> Result<Curve> {
    let base = extract_corpus(images, spec)?;
    rotation_sweep_with(&base, angles, cfg, |angle| {
        let rotated: Vec<CorpusImage> = images
            .par_iter()
            .map(|c| CorpusImage {
                sample_id: c.sample_id.clone(),
                writer_id: c.writer_id.clone(),
                image: rotate_image(&c.image, angle),
            })
            .collect();
        extract_corpus(&rotated, spec)
    })
}

/// Rotation sweep where `gallery(angle)` supplies the features of the
/// corpus rotated by `angle`, e.g. by re-reading pages from disk.
pub fn rotation_sweep_with<F>(
    base: &[Sample],
    angles: &[f64],
    cfg: &EvalConfig,
    gallery: F,
) -> Result<Curve>
where
    F: Fn(f64) -> Result<Vec<Sample>>,
{
    validate_corpus(base)?;
    if let Some(a) = angles.iter().find(|a| !(-180.0..=180.0).contains(*a)) {
        return Err(Error::invalid(format!("rotation angle {a} outside [-180, 180]")));
    }
    let model = fit_pca(base, cfg.n_components)?;
    let queries = embed_all(&model, base)?;
    let labels = labels_of(&queries);
    angles
        .iter()
        .map(|&angle| {
            let rotated = embed_all(&model, &gallery(angle)?)?;
            let rankings = queries
                .par_iter()
                .map(|q| rank(&q.embedded, &rotated))
                .collect::<Result<Vec<_>>>()?;
            Ok((angle, topn_soft(&rankings, &labels, 1)?))
        })
        .collect()
}

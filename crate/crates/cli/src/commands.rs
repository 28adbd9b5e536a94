//! Argument definitions and subcommand implementations.

use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use srs_lbp::evaluation::{
    check_disjoint, radii_sweep_from_samples, radii_sweep_specs, rotation_sweep_with,
    sweep_components,
};
use srs_lbp::synth::generate_synthetic_corpus;
use srs_lbp::{
    fit_pca, load_image, rotate_image, run_l1out, run_metric, run_metric_with_model, Baseline,
    Compression, EvalConfig, FeatureSpec, Protocol, RadialConfig, Sample, SynthParams,
    ThresholdMode,
};
use thiserror::Error;

use crate::manifest::{load_manifest, write_manifest, Manifest, ManifestRow};
use crate::report::{write_curve, PcaSource, ReportFile};
use crate::store::{DescriptorStore, ModelStore, StoredSample};

#[derive(Debug, Error)]
pub enum CliError {
    /// Inconsistent or incomplete arguments.
    #[error("{0}")]
    Usage(String),
    /// Unreadable inputs, failed extraction or evaluation.
    #[error("{0:#}")]
    Data(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "srs-lbp", version, about = "Sparse radial sampling LBP writer identification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract one descriptor per manifest row into a descriptor store.
    Extract(ExtractArgs),
    /// Fit a PCA model on a descriptor store.
    FitPca(FitPcaArgs),
    /// Nearest-neighbor evaluation of a descriptor store.
    Evaluate(EvaluateArgs),
    /// Accuracy curves over radii, components or rotation angles.
    Sweep(SweepArgs),
    /// Write a synthetic multi-writer corpus and its manifest.
    Synth(SynthArgs),
}

/// Radii list given on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadiiList(pub Vec<u32>);

/// `a-b` ranges and single values, comma-separated: `1-12`, `1,2,4`, `1-3,8`.
pub fn parse_radii(s: &str) -> Result<RadiiList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let num = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("{v:?}: {e}"));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range {part:?}"));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    Ok(RadiiList(out))
}

/// `otsu` or `fixed:T`.
pub fn parse_threshold(s: &str) -> Result<ThresholdMode, String> {
    if s == "otsu" {
        return Ok(ThresholdMode::OtsuPerRadius);
    }
    let t = s
        .strip_prefix("fixed:")
        .ok_or_else(|| format!("expected otsu or fixed:T, found {s:?}"))?;
    let t: f64 = t.parse().map_err(|e| format!("{t:?}: {e}"))?;
    if !t.is_finite() {
        return Err(format!("threshold {t} is not finite"));
    }
    Ok(ThresholdMode::Fixed(t))
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(format!("{s:?}: {e}")),
    }
}

fn parse_baseline(s: &str) -> Result<Baseline, String> {
    s.parse().map_err(|e: srs_lbp::Error| e.to_string())
}

fn parse_compression(s: &str) -> Result<Compression, String> {
    s.parse().map_err(|e: srs_lbp::Error| e.to_string())
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse().map_err(|e: srs_lbp::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct FeatureArgs {
    /// Radii as ranges or lists, e.g. 1-12 or 1,2,4 [default: 1-12]
    #[arg(long, value_parser = parse_radii)]
    pub radii: Option<RadiiList>,
    /// Sampling points per radius [default: 8]
    #[arg(long = "p")]
    pub points: Option<usize>,
    /// otsu or fixed:T [default: otsu, or fixed:0 for baselines]
    #[arg(long, value_parser = parse_threshold)]
    pub threshold: Option<ThresholdMode>,
    /// Classical operator instead of the multi-radius descriptor:
    /// lbp3x3, lbp8-1, lbp16-2 or concat8-1_16-2
    #[arg(long, value_parser = parse_baseline)]
    pub baseline: Option<Baseline>,
    /// Code mapping: none, u2, ri or riu2
    #[arg(long, value_parser = parse_compression, default_value = "none")]
    pub compression: Compression,
}

impl FeatureArgs {
    pub fn spec(&self) -> CliResult<FeatureSpec> {
        let spec = match self.baseline {
            Some(baseline) => {
                if self.radii.is_some() || self.points.is_some() {
                    return Err(usage("--radii and --p do not apply to --baseline"));
                }
                let threshold = self.threshold.unwrap_or(ThresholdMode::Fixed(0.0));
                if baseline == Baseline::Lbp3x3 && threshold != ThresholdMode::Fixed(0.0) {
                    return Err(usage("lbp3x3 only supports fixed:0"));
                }
                FeatureSpec::Baseline {
                    baseline,
                    compression: self.compression,
                    threshold,
                }
            }
            None => {
                let config = RadialConfig::new(
                    self.points.unwrap_or(8),
                    self.radii.clone().map_or_else(|| (1..=12).collect(), |r| r.0),
                    self.threshold.unwrap_or(ThresholdMode::OtsuPerRadius),
                )
                .map_err(|e| usage(e.to_string()))?;
                FeatureSpec::Srs {
                    config,
                    compression: self.compression,
                }
            }
        };
        spec.dim().map_err(|e| usage(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub feature: FeatureArgs,
    /// Keep only manifest rows carrying this tag, e.g. language=greek
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitPcaArgs {
    #[arg(long)]
    pub descriptors: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub components: usize,
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub descriptors: PathBuf,
    /// l1out or metric
    #[arg(long, value_parser = parse_protocol)]
    pub protocol: Protocol,
    /// Pre-fitted model (metric protocol)
    #[arg(long)]
    pub pca_model: Option<PathBuf>,
    /// Descriptors of an independent corpus to fit PCA on (metric protocol)
    #[arg(long)]
    pub pca_descriptors: Option<PathBuf>,
    #[arg(long, default_value_t = 200)]
    pub components: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10",
          value_parser = parse_positive)]
    pub soft: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4",
          value_parser = parse_positive)]
    pub hard: Vec<usize>,
    /// Neighbors kept per query in the report [default: largest requested n]
    #[arg(long)]
    pub ranking_depth: Option<usize>,
    /// Evaluate only samples carrying this tag, e.g. language=greek
    #[arg(long)]
    pub filter: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Radii,
    Components,
    Rotation,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub kind: SweepKind,
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub filter: Option<String>,
    /// Largest radius of the radii sweep
    #[arg(long, default_value_t = 12)]
    pub max_radius: u32,
    /// Component counts of the components sweep
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,20,50,100,200",
          value_parser = parse_positive)]
    pub components_list: Vec<usize>,
    /// Rotation angles in degrees, counter-clockwise
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_value = "-20,-15,-10,-5,0,5,10,15,20")]
    pub angles: Vec<f64>,
    /// Principal components for the radii and rotation sweeps
    #[arg(long, default_value_t = 200)]
    pub components: usize,
    #[command(flatten)]
    pub feature: FeatureArgs,
    /// Curve file; the radii sweep writes the cumulative curve here and
    /// the other two next to it (`.individual.csv`, `.uniform.csv`)
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 20)]
    pub writers: usize,
    #[arg(long, default_value_t = 4)]
    pub samples: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Page side in pixels
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    /// Standard deviation of additive pixel noise
    #[arg(long, default_value_t = 8.0)]
    pub noise: f64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Extract(a) => extract(&a),
        Command::FitPca(a) => fit(&a),
        Command::Evaluate(a) => evaluate(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Synth(a) => synth(&a),
    }
}

fn read_manifest(path: &Path, filter: Option<&str>) -> CliResult<Manifest> {
    let manifest = load_manifest(path)?.filtered(filter);
    if manifest.is_empty() {
        return Err(anyhow::anyhow!("{}: no rows selected", path.display()).into());
    }
    Ok(manifest)
}

impl From<crate::manifest::ManifestError> for CliError {
    fn from(e: crate::manifest::ManifestError) -> Self {
        CliError::Data(e.into())
    }
}

impl From<crate::store::StoreError> for CliError {
    fn from(e: crate::store::StoreError) -> Self {
        CliError::Data(e.into())
    }
}

impl From<srs_lbp::Error> for CliError {
    fn from(e: srs_lbp::Error) -> Self {
        CliError::Data(e.into())
    }
}

/// Loads and describes every row in parallel, keeping manifest order.
fn extract_rows(rows: &[ManifestRow], specs: &[&FeatureSpec]) -> CliResult<Vec<Vec<Vec<f64>>>> {
    let out = rows
        .par_iter()
        .map(|row| -> anyhow::Result<Vec<Vec<f64>>> {
            let img = load_image(&row.path)?;
            specs
                .iter()
                .map(|s| s.extract(&img))
                .collect::<srs_lbp::Result<_>>()
                .with_context(|| format!("{} (manifest line {})", row.path.display(), row.line))
        })
        .collect::<anyhow::Result<_>>()?;
    Ok(out)
}

fn samples_of(rows: &[ManifestRow], features: Vec<Vec<f64>>) -> Vec<Sample> {
    rows.iter()
        .zip(features)
        .map(|(r, features)| Sample {
            sample_id: r.sample_id.clone(),
            writer_id: r.writer_id.clone(),
            features,
        })
        .collect()
}

fn extract(a: &ExtractArgs) -> CliResult {
    let spec = a.feature.spec()?;
    let manifest = read_manifest(&a.manifest, a.filter.as_deref())?;
    let features = extract_rows(&manifest.rows, &[&spec])?;
    let store = DescriptorStore {
        samples: manifest
            .rows
            .iter()
            .zip(features)
            .map(|(r, mut f)| StoredSample {
                sample_id: r.sample_id.clone(),
                writer_id: r.writer_id.clone(),
                tags: r.tags.clone(),
                values: f.remove(0),
            })
            .collect(),
        feature: spec,
    };
    store.write(&a.out)?;
    eprintln!(
        "extracted {} descriptors ({}, dim {}) to {}",
        store.samples.len(),
        store.feature.label(),
        store.dim(),
        a.out.display()
    );
    Ok(())
}

fn read_store(path: &Path, filter: Option<&str>) -> CliResult<(DescriptorStore, Vec<Sample>)> {
    let store = DescriptorStore::read(path)?;
    let samples = store.to_samples(filter);
    if samples.is_empty() {
        return Err(anyhow::anyhow!("{}: no samples selected", path.display()).into());
    }
    Ok((store, samples))
}

fn fit(a: &FitPcaArgs) -> CliResult {
    if a.components == 0 {
        return Err(usage("--components must be at least 1"));
    }
    let (store, samples) = read_store(&a.descriptors, a.filter.as_deref())?;
    let model = fit_pca(&samples, a.components)?;
    let out = ModelStore {
        feature: Some(store.feature),
        model,
        sample_ids: samples.iter().map(|s| s.sample_id.clone()).collect(),
    };
    out.write(&a.out)?;
    eprintln!(
        "fitted {} components on {} samples to {}",
        out.model.n_components(),
        samples.len(),
        a.out.display()
    );
    Ok(())
}

fn evaluate(a: &EvaluateArgs) -> CliResult {
    if a.components == 0 {
        return Err(usage("--components must be at least 1"));
    }
    match (a.protocol, &a.pca_model, &a.pca_descriptors) {
        (Protocol::Metric, None, None) => {
            return Err(usage("--protocol metric needs --pca-model or --pca-descriptors"))
        }
        (Protocol::Metric, Some(_), Some(_)) => {
            return Err(usage("give only one of --pca-model and --pca-descriptors"))
        }
        (Protocol::L1out, Some(_), _) | (Protocol::L1out, _, Some(_)) => {
            return Err(usage("--protocol l1out fits PCA on the evaluated samples; drop --pca-*"))
        }
        _ => {}
    }
    let depth = a
        .ranking_depth
        .or_else(|| a.soft.iter().chain(&a.hard).copied().max());
    let cfg = EvalConfig {
        n_components: a.components,
        soft: a.soft.clone(),
        hard: a.hard.clone(),
        ranking_depth: depth,
    };
    let (store, eval) = read_store(&a.descriptors, a.filter.as_deref())?;
    let (report, source) = match (&a.pca_model, &a.pca_descriptors) {
        (Some(path), _) => {
            let model = ModelStore::read(path)?;
            if model.model.input_dim() != store.dim() {
                return Err(anyhow::anyhow!(
                    "model {} expects dimension {}, descriptors have {}",
                    path.display(),
                    model.model.input_dim(),
                    store.dim()
                )
                .into());
            }
            if model.feature.as_ref().is_some_and(|f| *f != store.feature) {
                return Err(anyhow::anyhow!(
                    "model {} was fitted on different features",
                    path.display()
                )
                .into());
            }
            check_disjoint(&eval, model.sample_ids.iter().map(String::as_str))?;
            let source = PcaSource::Model {
                path: path.display().to_string(),
                training_samples: model.sample_ids.len(),
            };
            (run_metric_with_model(&eval, &model.model, &cfg)?, source)
        }
        (None, Some(path)) => {
            let pca = DescriptorStore::read(path)?;
            if pca.feature != store.feature {
                return Err(anyhow::anyhow!(
                    "{} holds {} features, {} holds {}",
                    path.display(),
                    pca.feature.label(),
                    a.descriptors.display(),
                    store.feature.label()
                )
                .into());
            }
            let pca = pca.to_samples(None);
            let source = PcaSource::Descriptors {
                path: path.display().to_string(),
                training_samples: pca.len(),
            };
            (run_metric(&eval, &pca, &cfg)?, source)
        }
        (None, None) => (run_l1out(&eval, &cfg)?, PcaSource::Evaluated),
    };
    let summary: Vec<String> = report
        .soft_top
        .iter()
        .map(|(n, v)| format!("top-{n} {:.2}%", v * 100.0))
        .collect();
    eprintln!(
        "{} queries, {} components: {}",
        report.n_queries,
        report.n_components,
        summary.join(", ")
    );
    ReportFile::new(&a.descriptors, store.feature, a.filter.clone(), source, report)
        .write(&a.out)
        .with_context(|| format!("writing {}", a.out.display()))?;
    Ok(())
}

/// `name.csv` → `name.<suffix>.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| e.to_string_lossy().into_owned());
    let name = match ext {
        Some(ext) => format!("{stem}.{suffix}.{ext}"),
        None => format!("{stem}.{suffix}"),
    };
    path.with_file_name(name)
}

fn write_curve_file(path: &Path, curve: &[(f64, f64)]) -> CliResult {
    write_curve(path, curve).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn sweep(a: &SweepArgs) -> CliResult {
    if a.components == 0 {
        return Err(usage("--components must be at least 1"));
    }
    let cfg = EvalConfig {
        n_components: a.components,
        ..EvalConfig::default()
    };
    let check_feature_flags_unused = || {
        let f = &a.feature;
        if f.radii.is_some()
            || f.points.is_some()
            || f.threshold.is_some()
            || f.baseline.is_some()
            || f.compression != Compression::None
        {
            Err(usage("the radii sweep fixes its own features; use --max-radius"))
        } else {
            Ok(())
        }
    };
    match a.kind {
        SweepKind::Radii => {
            check_feature_flags_unused()?;
            if a.max_radius == 0 {
                return Err(usage("--max-radius must be at least 1"));
            }
            let (plain, uniform) = radii_sweep_specs(a.max_radius).map_err(|e| usage(e.to_string()))?;
            let manifest = read_manifest(&a.manifest, a.filter.as_deref())?;
            let mut features = extract_rows(&manifest.rows, &[&plain, &uniform])?;
            let uniform_features = features.iter_mut().map(|f| f.pop().unwrap_or_default()).collect();
            let plain_features = features.into_iter().map(|mut f| f.remove(0)).collect();
            let sweep = radii_sweep_from_samples(
                &samples_of(&manifest.rows, plain_features),
                &samples_of(&manifest.rows, uniform_features),
                a.max_radius,
                &cfg,
            )?;
            write_curve_file(&a.out, &sweep.cumulative)?;
            write_curve_file(&sibling(&a.out, "individual"), &sweep.individual)?;
            write_curve_file(&sibling(&a.out, "uniform"), &sweep.uniform)?;
        }
        SweepKind::Components => {
            let spec = a.feature.spec()?;
            let manifest = read_manifest(&a.manifest, a.filter.as_deref())?;
            let features = extract_rows(&manifest.rows, &[&spec])?;
            let samples = samples_of(&manifest.rows, features.into_iter().map(|mut f| f.remove(0)).collect());
            let curve = sweep_components(&samples, &a.components_list, &cfg)?;
            write_curve_file(&a.out, &curve)?;
        }
        SweepKind::Rotation => {
            if let Some(angle) = a.angles.iter().find(|x| !(-180.0..=180.0).contains(*x)) {
                return Err(usage(format!("angle {angle} outside [-180, 180]")));
            }
            let spec = a.feature.spec()?;
            let manifest = read_manifest(&a.manifest, a.filter.as_deref())?;
            let features = extract_rows(&manifest.rows, &[&spec])?;
            let base = samples_of(&manifest.rows, features.into_iter().map(|mut f| f.remove(0)).collect());
            let curve = rotation_sweep_with(&base, &a.angles, &cfg, |angle| {
                manifest
                    .rows
                    .par_iter()
                    .map(|row| {
                        let img = load_image(&row.path)?;
                        Ok(Sample {
                            sample_id: row.sample_id.clone(),
                            writer_id: row.writer_id.clone(),
                            features: spec.extract(&rotate_image(&img, angle))?,
                        })
                    })
                    .collect()
            })?;
            write_curve_file(&a.out, &curve)?;
        }
    }
    eprintln!("wrote {}", a.out.display());
    Ok(())
}

fn synth(a: &SynthArgs) -> CliResult {
    if a.writers < 2 || a.samples < 2 {
        return Err(usage("--writers and --samples must both be at least 2"));
    }
    if !(a.noise.is_finite() && a.noise >= 0.0) {
        return Err(usage("--noise must be a non-negative number"));
    }
    let mut params = SynthParams::new(a.writers, a.samples, a.seed);
    params.size = a.size;
    params.noise = a.noise;
    let pages = generate_synthetic_corpus(&params).map_err(|e| usage(e.to_string()))?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let rows: Vec<ManifestRow> = pages
        .par_iter()
        .enumerate()
        .map(|(i, page)| -> anyhow::Result<ManifestRow> {
            let path = a.out.join(format!("{}.png", page.sample_id));
            page.image.save_png(&path)?;
            Ok(ManifestRow {
                sample_id: page.sample_id.clone(),
                writer_id: page.writer_id.clone(),
                path,
                tags: vec!["synthetic".into()],
                line: i as u64 + 2,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    let manifest = a.out.join("manifest.csv");
    write_manifest(&manifest, &rows).with_context(|| format!("writing {}", manifest.display()))?;
    eprintln!("wrote {} pages and {}", rows.len(), manifest.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_lists() {
        assert_eq!(parse_radii("1-12").unwrap().0, (1..=12).collect::<Vec<_>>());
        assert_eq!(parse_radii("4").unwrap().0, vec![4]);
        assert_eq!(parse_radii("1-3, 8").unwrap().0, vec![1, 2, 3, 8]);
        assert!(parse_radii("5-2").is_err());
        assert!(parse_radii("a").is_err());
        assert!(parse_radii("").is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(parse_threshold("otsu").unwrap(), ThresholdMode::OtsuPerRadius);
        assert_eq!(parse_threshold("fixed:17").unwrap(), ThresholdMode::Fixed(17.0));
        assert_eq!(parse_threshold("fixed:-2.5").unwrap(), ThresholdMode::Fixed(-2.5));
        assert!(parse_threshold("fixed:nan").is_err());
        assert!(parse_threshold("17").is_err());
    }

    #[test]
    fn feature_specs_from_flags() {
        let parse = |args: &[&str]| {
            let mut full = vec!["srs-lbp", "extract", "--manifest", "m", "--out", "o"];
            full.extend_from_slice(args);
            match Cli::try_parse_from(full).unwrap().command {
                Command::Extract(e) => e.feature.spec(),
                _ => unreachable!(),
            }
        };
        assert_eq!(parse(&[]).unwrap().dim().unwrap(), 3072);
        assert_eq!(parse(&["--radii", "4"]).unwrap().dim().unwrap(), 256);
        let b = parse(&["--baseline", "lbp16-2", "--compression", "riu2"]).unwrap();
        assert_eq!(b.label(), "lbp16-2/riu2");
        assert_eq!(b.dim().unwrap(), 18);
        assert!(matches!(parse(&["--baseline", "lbp8-1", "--radii", "2"]), Err(CliError::Usage(_))));
        assert!(matches!(
            parse(&["--baseline", "lbp3x3", "--threshold", "fixed:3"]),
            Err(CliError::Usage(_))
        ));
        // uniform mappings exist only for 8 and 16 points
        assert!(matches!(parse(&["--p", "5", "--compression", "u2"]), Err(CliError::Usage(_))));
        assert!(matches!(parse(&["--radii", "3,2"]), Err(CliError::Usage(_))));
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling(Path::new("/a/curve.csv"), "uniform"), PathBuf::from("/a/curve.uniform.csv"));
        assert_eq!(sibling(Path::new("curve"), "individual"), PathBuf::from("curve.individual"));
    }

    #[test]
    fn negative_angles_parse() {
        let cli = Cli::try_parse_from([
            "srs-lbp", "sweep", "--kind", "rotation", "--manifest", "m", "--out", "o", "--angles",
            "-20,0,20",
        ])
        .unwrap();
        match cli.command {
            Command::Sweep(s) => assert_eq!(s.angles, vec![-20.0, 0.0, 20.0]),
            _ => unreachable!(),
        }
    }
}

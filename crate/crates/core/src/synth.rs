//! Deterministic oriented-stroke textures standing in for handwriting pages.
//!
//! Every writer is a family of dark strokes on a light background with its
//! own orientation, stroke period, thickness, curvature and pen-lift rhythm.
//! Samples of one writer differ in phase and additive noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::evaluation::CorpusImage;
use crate::imaging::GrayImage;

const INK: f64 = 40.0;
const PAPER: f64 = 255.0;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthParams {
    pub n_writers: usize,
    pub samples_per_writer: usize,
    pub seed: u64,
    /// Side length of the square pages.
    pub size: usize,
    /// Standard deviation of the additive Gaussian noise, in gray levels.
    pub noise: f64,
}

impl SynthParams {
    pub fn new(n_writers: usize, samples_per_writer: usize, seed: u64) -> Self {
        Self {
            n_writers,
            samples_per_writer,
            seed,
            size: 128,
            noise: 8.0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct WriterStyle {
    angle: f64,
    period: f64,
    half_width: f64,
    curve_amplitude: f64,
    curve_wavelength: f64,
    lift_period: f64,
    lift_duty: f64,
}

impl WriterStyle {
    fn draw(index: usize, n_writers: usize, rng: &mut impl Rng) -> Self {
        let period = rng.random_range(7.0..15.0);
        Self {
            angle: std::f64::consts::PI * index as f64 / n_writers as f64,
            period,
            half_width: period * rng.random_range(0.12..0.24),
            curve_amplitude: rng.random_range(0.0..3.0),
            curve_wavelength: rng.random_range(20.0..60.0),
            lift_period: rng.random_range(15.0..40.0),
            lift_duty: rng.random_range(0.65..0.9),
        }
    }

    fn render(&self, size: usize, noise: f64, rng: &mut impl Rng) -> GrayImage {
        let phase_u = rng.random_range(0.0..self.period);
        let phase_v = rng.random_range(0.0..self.lift_period);
        let phase_c = rng.random_range(0.0..std::f64::consts::TAU);
        let normal = Normal::new(0.0, noise.max(f64::MIN_POSITIVE)).expect("finite sigma");
        let (sin, cos) = self.angle.sin_cos();
        let mut pixels = Vec::with_capacity(size * size);
        for y in 0..size {
            for x in 0..size {
                let (xf, yf) = (x as f64, y as f64);
                let u = xf * cos + yf * sin;
                let v = -xf * sin + yf * cos;
                let bent = u
                    + self.curve_amplitude
                        * (std::f64::consts::TAU * v / self.curve_wavelength + phase_c).sin()
                    + phase_u;
                let dist = (bent - self.period * (bent / self.period).round()).abs();
                let mut coverage = (self.half_width + 0.5 - dist).clamp(0.0, 1.0);
                let lift = (v + phase_v).rem_euclid(self.lift_period);
                if lift > self.lift_duty * self.lift_period {
                    coverage = 0.0;
                }
                let mut value = PAPER - (PAPER - INK) * coverage;
                if noise > 0.0 {
                    value += normal.sample(rng);
                }
                pixels.push(value.round().clamp(0.0, 255.0) as u8);
            }
        }
        GrayImage::new(size, size, pixels).expect("square page")
    }
}

/// Writer id of the `index`-th synthetic writer.
pub fn writer_id(index: usize) -> String {
    format!("w{index:03}")
}

/// Sample id of the `sample`-th page of the `writer`-th writer.
pub fn sample_id(writer: usize, sample: usize) -> String {
    format!("w{writer:03}_s{sample:02}")
}

/// Renders `n_writers * samples_per_writer` pages, writer-major.
pub fn generate_synthetic_corpus(params: &SynthParams) -> Result<Vec<CorpusImage>> {
    if params.n_writers < 2 || params.samples_per_writer < 2 {
        return Err(Error::invalid(format!(
            "synthetic corpus needs >= 2 writers with >= 2 samples each, got {} x {}",
            params.n_writers, params.samples_per_writer
        )));
    }
    if params.size < 8 {
        return Err(Error::invalid("synthetic pages must be at least 8 pixels wide"));
    }
    if !(params.noise >= 0.0 && params.noise.is_finite()) {
        return Err(Error::invalid("noise level must be finite and non-negative"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let styles: Vec<WriterStyle> = (0..params.n_writers)
        .map(|w| WriterStyle::draw(w, params.n_writers, &mut rng))
        .collect();
    let mut out = Vec::with_capacity(params.n_writers * params.samples_per_writer);
    for (w, style) in styles.iter().enumerate() {
        for s in 0..params.samples_per_writer {
            out.push(CorpusImage {
                sample_id: sample_id(w, s),
                writer_id: writer_id(w),
                image: style.render(params.size, params.noise, &mut rng),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn same_seed_same_pages() {
        let p = SynthParams::new(3, 2, 11);
        assert_eq!(
            generate_synthetic_corpus(&p).unwrap(),
            generate_synthetic_corpus(&p).unwrap()
        );
        let other = SynthParams::new(3, 2, 12);
        assert_ne!(
            generate_synthetic_corpus(&p).unwrap(),
            generate_synthetic_corpus(&other).unwrap()
        );
    }

    #[test]
    fn ids_are_unique() {
        let corpus = generate_synthetic_corpus(&SynthParams::new(20, 4, 7)).unwrap();
        assert_eq!(corpus.len(), 80);
        let ids: HashSet<_> = corpus.iter().map(|c| c.sample_id.as_str()).collect();
        assert_eq!(ids.len(), 80);
        let writers: HashSet<_> = corpus.iter().map(|c| c.writer_id.as_str()).collect();
        assert_eq!(writers.len(), 20);
    }

    #[test]
    fn degenerate_requests_rejected() {
        assert!(generate_synthetic_corpus(&SynthParams::new(1, 4, 0)).is_err());
        assert!(generate_synthetic_corpus(&SynthParams::new(4, 1, 0)).is_err());
    }

    #[test]
    fn pages_contain_ink_and_paper() {
        let corpus = generate_synthetic_corpus(&SynthParams::new(2, 2, 3)).unwrap();
        for c in &corpus {
            let dark = c.image.pixels().iter().filter(|&&v| v < 128).count();
            let n = c.image.pixels().len();
            assert!(dark > n / 20 && dark < n / 2, "{dark} of {n}");
        }
    }
}

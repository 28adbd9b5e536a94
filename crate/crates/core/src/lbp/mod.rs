//! Local binary pattern transforms.
//!
//! A code is built from `P` samples on a circle of radius `R` around each
//! pixel: bit `p` is set when `g_p - g_c >= t`. Sample `p` sits at angle
//! `2*pi*p/P` from the positive x axis with y growing downwards, and is read
//! with bilinear interpolation. Pixels closer than `R` to any edge are
//! excluded from both the code output and the threshold statistics.
//!
//! Sample offsets are quantized to multiples of 2^-32 pixel. This makes axial
//! samples land exactly on the lattice and keeps `center + offset` exact in
//! floating point, so every pixel of the image sees identical interpolation
//! weights.

mod mapping;
mod otsu;

pub use mapping::{build_mapping, CodeMapping, Compression};
pub use otsu::{compute_difference_histogram, otsu_threshold, DifferenceHistogram};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{blend, GrayImage};

/// Largest supported number of samples per circle; codes are stored as `u16`.
pub const MAX_POINTS: usize = 16;

const OFFSET_SCALE: f64 = 4_294_967_296.0;

/// How the binarization threshold of each transform is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "value")]
pub enum ThresholdMode {
    /// Otsu threshold over the absolute differences of the image at that
    /// radius.
    OtsuPerRadius,
    /// The same fixed threshold for every radius. `Fixed(0.0)` is the
    /// classical sign comparison.
    Fixed(f64),
}

/// Sampling configuration of a multi-radius transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialConfig {
    points: usize,
    radii: Vec<u32>,
    threshold: ThresholdMode,
}

impl RadialConfig {
    pub fn new(points: usize, radii: Vec<u32>, threshold: ThresholdMode) -> Result<Self> {
        if !(3..=MAX_POINTS).contains(&points) {
            return Err(Error::invalid(format!(
                "samples per radius must be in 3..={MAX_POINTS}, got {points}"
            )));
        }
        if radii.is_empty() {
            return Err(Error::invalid("at least one radius is required"));
        }
        if radii[0] < 1 {
            return Err(Error::invalid("radii must be >= 1"));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "radii must be strictly increasing, got {radii:?}"
            )));
        }
        if let ThresholdMode::Fixed(t) = threshold {
            if !t.is_finite() {
                return Err(Error::invalid("fixed threshold must be finite"));
            }
        }
        Ok(Self {
            points,
            radii,
            threshold,
        })
    }

    /// Eight samples at each of the given radii with per-radius Otsu
    /// thresholds.
    pub fn srs(radii: Vec<u32>) -> Result<Self> {
        Self::new(8, radii, ThresholdMode::OtsuPerRadius)
    }

    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn radii(&self) -> &[u32] {
        &self.radii
    }

    #[inline]
    pub fn threshold(&self) -> ThresholdMode {
        self.threshold
    }

    pub fn max_radius(&self) -> u32 {
        *self.radii.last().expect("radii nonempty")
    }
}

impl Default for RadialConfig {
    /// P = 8 at radii 1 through 12, Otsu thresholds.
    fn default() -> Self {
        Self {
            points: 8,
            radii: (1..=12).collect(),
            threshold: ThresholdMode::OtsuPerRadius,
        }
    }
}

/// Per-pixel codes over the valid region of an image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeImage {
    radius: u32,
    points: usize,
    margin: usize,
    valid_width: usize,
    valid_height: usize,
    codes: Vec<u16>,
}

impl CodeImage {
    /// Wraps precomputed codes. Fails if a code does not fit in `points` bits.
    pub fn new(
        radius: u32,
        points: usize,
        margin: usize,
        valid_width: usize,
        valid_height: usize,
        codes: Vec<u16>,
    ) -> Result<Self> {
        if !(1..=MAX_POINTS).contains(&points) {
            return Err(Error::invalid(format!("unsupported point count {points}")));
        }
        if valid_width == 0 || valid_height == 0 || codes.len() != valid_width * valid_height {
            return Err(Error::invalid(format!(
                "code buffer of {} entries does not match valid region {valid_width}x{valid_height}",
                codes.len()
            )));
        }
        let limit = 1u32 << points;
        if codes.iter().any(|&c| u32::from(c) >= limit) {
            return Err(Error::invalid(format!("code exceeds {points}-bit range")));
        }
        Ok(Self {
            radius,
            points,
            margin,
            valid_width,
            valid_height,
            codes,
        })
    }

    #[inline]
    pub fn radius(&self) -> u32 {
        self.radius
    }

    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    /// Width of the excluded border on every side.
    #[inline]
    pub fn margin(&self) -> usize {
        self.margin
    }

    #[inline]
    pub fn valid_width(&self) -> usize {
        self.valid_width
    }

    #[inline]
    pub fn valid_height(&self) -> usize {
        self.valid_height
    }

    /// Row-major codes of the valid region.
    #[inline]
    pub fn codes(&self) -> &[u16] {
        &self.codes
    }

    /// Code of the pixel at image coordinates `(x, y)`, which must lie in the
    /// valid region.
    pub fn code_at(&self, x: usize, y: usize) -> u16 {
        self.codes[(y - self.margin) * self.valid_width + (x - self.margin)]
    }
}

/// Offset of sample `p` out of `points` on a circle of radius `radius`,
/// quantized to the 2^-32 pixel grid.
pub fn sample_offset(p: usize, points: usize, radius: u32) -> (f64, f64) {
    let angle = 2.0 * std::f64::consts::PI * p as f64 / points as f64;
    let r = f64::from(radius);
    let q = |v: f64| (v * OFFSET_SCALE).round() / OFFSET_SCALE;
    (q(r * angle.cos()), q(r * angle.sin()))
}

/// Precomputed interpolation stencil of one sample point.
#[derive(Clone, Copy, Debug)]
struct Tap {
    dx: isize,
    dy: isize,
    fx: f64,
    fy: f64,
}

fn taps(points: usize, radius: u32) -> Vec<Tap> {
    (0..points)
        .map(|p| {
            let (ox, oy) = sample_offset(p, points, radius);
            let (bx, by) = (ox.floor(), oy.floor());
            Tap {
                dx: bx as isize,
                dy: by as isize,
                fx: ox - bx,
                fy: oy - by,
            }
        })
        .collect()
}

/// Region of pixels whose full circle of radius `margin` stays inside.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ValidRegion {
    pub margin: usize,
    pub width: usize,
    pub height: usize,
}

pub(crate) fn valid_region(img: &GrayImage, margin: usize) -> Result<ValidRegion> {
    if img.width() <= 2 * margin || img.height() <= 2 * margin {
        return Err(Error::invalid(format!(
            "image {}x{} too small for radius {margin} (needs both sides > {})",
            img.width(),
            img.height(),
            2 * margin
        )));
    }
    Ok(ValidRegion {
        margin,
        width: img.width() - 2 * margin,
        height: img.height() - 2 * margin,
    })
}

fn check_points(points: usize) -> Result<()> {
    if !(3..=MAX_POINTS).contains(&points) {
        return Err(Error::invalid(format!(
            "samples per radius must be in 3..={MAX_POINTS}, got {points}"
        )));
    }
    Ok(())
}

/// Fills `out` with the interpolated values of one sample point for every
/// valid pixel of image row `y`.
#[inline]
fn sample_row(img: &GrayImage, region: ValidRegion, tap: Tap, y: usize, out: &mut [f64]) {
    let w = region.width;
    let xa = (region.margin as isize + tap.dx) as usize;
    let xb = xa + usize::from(tap.fx > 0.0);
    let ya = (y as isize + tap.dy) as usize;
    let yb = ya + usize::from(tap.fy > 0.0);
    let top = img.row(ya);
    let bottom = img.row(yb);
    let (ta, tb) = (&top[xa..xa + w], &top[xb..xb + w]);
    let (ba, bb) = (&bottom[xa..xa + w], &bottom[xb..xb + w]);
    for ((((o, &a), &b), &c), &d) in out.iter_mut().zip(ta).zip(tb).zip(ba).zip(bb) {
        *o = blend(
            f64::from(a),
            f64::from(b),
            f64::from(c),
            f64::from(d),
            tap.fx,
            tap.fy,
        );
    }
}

/// Visits every valid row in parallel with a scratch buffer for samples.
/// `f` receives the row index in the valid region, the center pixels and the
/// tap list.
pub(crate) fn accumulate_rows<T, F, G>(
    img: &GrayImage,
    points: usize,
    radius: u32,
    init: G,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    G: Fn() -> T + Sync,
    F: Fn(&mut T, &[u8], &dyn Fn(usize, &mut [f64])) + Sync,
{
    let region = valid_region(img, radius as usize)?;
    let taps = taps(points, radius);
    let m = region.margin;
    Ok((0..region.height)
        .into_par_iter()
        .map(|vy| {
            let y = vy + m;
            let center = &img.row(y)[m..m + region.width];
            let sampler = |p: usize, out: &mut [f64]| sample_row(img, region, taps[p], y, out);
            let mut acc = init();
            f(&mut acc, center, &sampler);
            acc
        })
        .collect())
}

/// Generic thresholded LBP with `points` bilinear samples at `radius`.
///
/// A bit is set when the signed, unrounded difference `g_p - g_c` is at least
/// `threshold`.
pub fn lbp_transform(
    img: &GrayImage,
    points: usize,
    radius: u32,
    threshold: f64,
) -> Result<CodeImage> {
    check_points(points)?;
    if radius < 1 {
        return Err(Error::invalid("radius must be >= 1"));
    }
    let region = valid_region(img, radius as usize)?;
    let rows = accumulate_rows(
        img,
        points,
        radius,
        || vec![0u16; region.width],
        |codes, center, sample| {
            let mut buf = vec![0.0; region.width];
            for p in 0..points {
                sample(p, &mut buf);
                let bit = 1u16 << p;
                for ((code, &g), &c) in codes.iter_mut().zip(&buf).zip(center) {
                    if g - f64::from(c) >= threshold {
                        *code |= bit;
                    }
                }
            }
        },
    )?;
    Ok(CodeImage {
        radius,
        points,
        margin: region.margin,
        valid_width: region.width,
        valid_height: region.height,
        codes: rows.concat(),
    })
}

/// Transform at one radius with the threshold picked by `mode`. Returns the
/// code image and the threshold that was applied.
pub fn transform_with_mode(
    img: &GrayImage,
    points: usize,
    radius: u32,
    mode: ThresholdMode,
) -> Result<(CodeImage, f64)> {
    let t = match mode {
        ThresholdMode::Fixed(t) => t,
        ThresholdMode::OtsuPerRadius => {
            let hist = compute_difference_histogram(img, points, radius)?;
            f64::from(otsu_threshold(&hist)?)
        }
    };
    Ok((lbp_transform(img, points, radius, t)?, t))
}

/// One code image per configured radius, in configuration order.
pub fn srs_lbp_transform(img: &GrayImage, cfg: &RadialConfig) -> Result<Vec<CodeImage>> {
    valid_region(img, cfg.max_radius() as usize)?;
    cfg.radii
        .par_iter()
        .map(|&r| transform_with_mode(img, cfg.points, r, cfg.threshold).map(|(codes, _)| codes))
        .collect()
}

/// The original 3x3 operator: the eight lattice neighbors, no interpolation,
/// sign comparison (`g_p >= g_c`). Bit 0 is east, then on around in the same
/// angular direction as the circular samples.
pub fn lbp_3x3_transform(img: &GrayImage) -> Result<CodeImage> {
    const NEIGHBORS: [(isize, isize); 8] = [
        (1, 0),
        (1, 1),
        (0, 1),
        (-1, 1),
        (-1, 0),
        (-1, -1),
        (0, -1),
        (1, -1),
    ];
    let region = valid_region(img, 1)?;
    let w = img.width();
    let px = img.pixels();
    let mut codes = Vec::with_capacity(region.width * region.height);
    for y in 1..=region.height {
        for x in 1..=region.width {
            let c = px[y * w + x];
            let mut code = 0u16;
            for (p, &(dx, dy)) in NEIGHBORS.iter().enumerate() {
                let n = px[(y as isize + dy) as usize * w + (x as isize + dx) as usize];
                if n >= c {
                    code |= 1 << p;
                }
            }
            codes.push(code);
        }
    }
    Ok(CodeImage {
        radius: 1,
        points: 8,
        margin: 1,
        valid_width: region.width,
        valid_height: region.height,
        codes,
    })
}

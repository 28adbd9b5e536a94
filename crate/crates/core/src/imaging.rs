//! Raster substrate: 8-bit grayscale pages, decoding, bilinear sampling and
//! rotation.
//!
//! Coordinates follow the raster convention used throughout the crate: `x`
//! indexes columns, `y` indexes rows, and pixel `(row r, col c)` sits at
//! `(x = c, y = r)`.

use std::path::Path;

use image::{DynamicImage, ExtendedColorType, ImageDecoder, ImageReader};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Background intensity used to fill pixels a rotation leaves uncovered.
pub const BACKGROUND: u8 = 255;

/// Single-channel 8-bit image stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::invalid(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::invalid(format!(
                "pixel buffer holds {} values, expected {width}x{height} = {}",
                pixels.len(),
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[u8] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// Writes the image as an 8-bit grayscale PNG.
    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        image::save_buffer(
            path,
            &self.pixels,
            self.width as u32,
            self.height as u32,
            ExtendedColorType::L8,
        )
        .map_err(|source| Error::Decode {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Decodes a PNG, TIFF or JPEG page into grayscale.
///
/// Color inputs are reduced with the 0.299/0.587/0.114 luma weights and
/// rounded to the nearest integer. Bilevel inputs come out as {0, 255}.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let decode_err = |source| Error::Decode {
        path: path.to_path_buf(),
        source,
    };

    let reader = ImageReader::open(path)
        .map_err(|e| decode_err(image::ImageError::IoError(e)))?
        .with_guessed_format()
        .map_err(|e| decode_err(image::ImageError::IoError(e)))?;
    let decoder = reader.into_decoder().map_err(decode_err)?;
    let bilevel = matches!(
        decoder.original_color_type(),
        ExtendedColorType::L1
            | ExtendedColorType::La1
            | ExtendedColorType::Rgb1
            | ExtendedColorType::Rgba1
    );
    let (w, h) = decoder.dimensions();
    if w == 0 || h == 0 {
        return Err(Error::invalid(format!(
            "{} has zero-sized dimensions {w}x{h}",
            path.display()
        )));
    }
    let decoded = DynamicImage::from_decoder(decoder).map_err(decode_err)?;
    let mut gray = to_luma(&decoded);
    if bilevel {
        for v in &mut gray.pixels {
            if *v > 0 {
                *v = 255;
            }
        }
    }
    Ok(gray)
}

/// Converts any decoded image to 8-bit luma.
pub fn to_luma(img: &DynamicImage) -> GrayImage {
    let (width, height) = (img.width() as usize, img.height() as usize);
    let pixels = if img.color().has_color() {
        img.to_rgb8()
            .pixels()
            .map(|p| luma(p[0], p[1], p[2]))
            .collect()
    } else {
        img.to_luma8().into_raw()
    };
    GrayImage {
        width,
        height,
        pixels,
    }
}

#[inline]
fn luma(r: u8, g: u8, b: u8) -> u8 {
    let y = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
    y.round().clamp(0.0, 255.0) as u8
}

/// Bilinear blend of the four lattice values around a sample point.
///
/// `a` is the top-left value, `b` top-right, `c` bottom-left, `d`
/// bottom-right. Written as nested lerps so that equal corners reproduce the
/// corner value exactly and a zero fraction never mixes in the neighbor.
#[inline(always)]
pub(crate) fn blend(a: f64, b: f64, c: f64, d: f64, fx: f64, fy: f64) -> f64 {
    let top = a + fx * (b - a);
    let bottom = c + fx * (d - c);
    top + fy * (bottom - top)
}

/// Bilinearly interpolated intensity at real coordinates `(x, y)`.
///
/// # Panics
///
/// Panics if the point lies outside `[0, width-1] x [0, height-1]`. Callers
/// keep samples inside the image through valid-region margins; there is no
/// clamping.
pub fn sample_bilinear(img: &GrayImage, x: f64, y: f64) -> f64 {
    let max_x = (img.width - 1) as f64;
    let max_y = (img.height - 1) as f64;
    assert!(
        (0.0..=max_x).contains(&x) && (0.0..=max_y).contains(&y),
        "sample ({x}, {y}) outside image {}x{}",
        img.width,
        img.height
    );
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (x0, y0) = (x0 as usize, y0 as usize);
    let x1 = (x0 + 1).min(img.width - 1);
    let y1 = (y0 + 1).min(img.height - 1);
    blend(
        f64::from(img.get(x0, y0)),
        f64::from(img.get(x1, y0)),
        f64::from(img.get(x0, y1)),
        f64::from(img.get(x1, y1)),
        fx,
        fy,
    )
}

/// Rotates about the geometric center by `angle` degrees, counter-clockwise
/// as seen on screen (positive angles move the right edge upwards).
///
/// The output has the input's dimensions; pixels whose source falls outside
/// the input are filled with [`BACKGROUND`].
pub fn rotate_image(img: &GrayImage, angle: f64) -> GrayImage {
    assert!(
        (-180.0..=180.0).contains(&angle),
        "rotation angle {angle} outside [-180, 180]"
    );
    if angle == 0.0 {
        return img.clone();
    }
    let (sin, cos) = angle.to_radians().sin_cos();
    let cx = (img.width - 1) as f64 / 2.0;
    let cy = (img.height - 1) as f64 / 2.0;
    let max_x = (img.width - 1) as f64;
    let max_y = (img.height - 1) as f64;

    let mut pixels = vec![BACKGROUND; img.width * img.height];
    pixels
        .par_chunks_mut(img.width)
        .enumerate()
        .for_each(|(row, out)| {
            let v = row as f64 - cy;
            for (col, px) in out.iter_mut().enumerate() {
                let u = col as f64 - cx;
                let sx = snap(cx + u * cos - v * sin);
                let sy = snap(cy + u * sin + v * cos);
                if (0.0..=max_x).contains(&sx) && (0.0..=max_y).contains(&sy) {
                    *px = sample_bilinear(img, sx, sy).round().clamp(0.0, 255.0) as u8;
                }
            }
        });
    GrayImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Rounds coordinates within 1e-9 of a lattice point onto it.
#[inline]
fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r
    } else {
        v
    }
}

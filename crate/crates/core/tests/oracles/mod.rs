//! Independent reference implementations used to check the optimized paths.
//!
//! Everything here is deliberately naive: per-pixel loops, direct formulas,
//! exhaustive enumeration.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::HashSet;

use srs_lbp::{sample_bilinear, GrayImage};

/// Sample position of neighbor `p`, on the 2^-32 pixel grid.
pub fn naive_offset(p: usize, points: usize, radius: u32) -> (f64, f64) {
    let theta = std::f64::consts::TAU * (p as f64) / (points as f64);
    let grid = 2f64.powi(32);
    let (s, c) = theta.sin_cos();
    (
        (f64::from(radius) * c * grid).round() / grid,
        (f64::from(radius) * s * grid).round() / grid,
    )
}

/// Per-pixel LBP through the public bilinear sampler. Returns the codes of the
/// valid region, row-major.
pub fn naive_lbp(img: &GrayImage, points: usize, radius: u32, t: f64) -> Vec<u16> {
    let r = radius as usize;
    let mut out = Vec::new();
    for y in r..img.height() - r {
        for x in r..img.width() - r {
            let gc = f64::from(img.get(x, y));
            let mut code = 0u16;
            for p in 0..points {
                let (ox, oy) = naive_offset(p, points, radius);
                let gp = sample_bilinear(img, x as f64 + ox, y as f64 + oy);
                if gp - gc >= t {
                    code += 1 << p;
                }
            }
            out.push(code);
        }
    }
    out
}

/// Per-pixel difference histogram through the public bilinear sampler.
pub fn naive_difference_histogram(img: &GrayImage, points: usize, radius: u32) -> [u64; 256] {
    let r = radius as usize;
    let mut bins = [0u64; 256];
    for y in r..img.height() - r {
        for x in r..img.width() - r {
            let gc = f64::from(img.get(x, y));
            for p in 0..points {
                let (ox, oy) = naive_offset(p, points, radius);
                let gp = sample_bilinear(img, x as f64 + ox, y as f64 + oy);
                bins[(gc - gp).abs().round() as usize] += 1;
            }
        }
    }
    bins
}

fn weighted_variance(bins: &[u64; 256], range: std::ops::Range<usize>, total: f64) -> f64 {
    let n: u64 = bins[range.clone()].iter().sum();
    let n = n as f64;
    let mean = range.clone().map(|d| d as f64 * bins[d] as f64).sum::<f64>() / n;
    let var = range
        .map(|d| bins[d] as f64 * (d as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    (n / total) * var
}

/// Scans every candidate threshold and evaluates the within-class variance
/// from scratch. Smallest minimizer wins; single-valued histograms give v+1.
pub fn exhaustive_otsu(bins: &[u64; 256]) -> u32 {
    let total: u64 = bins.iter().sum();
    assert!(total > 0);
    let total = total as f64;
    let mut best: Option<(u32, f64)> = None;
    for t in 1..=255usize {
        let low: u64 = bins[..t].iter().sum();
        let high: u64 = bins[t..].iter().sum();
        if low == 0 || high == 0 {
            continue;
        }
        let within = weighted_variance(bins, 0..t, total) + weighted_variance(bins, t..256, total);
        match best {
            Some((_, b)) if within >= b => {}
            _ => best = Some((t as u32, within)),
        }
    }
    best.map(|(t, _)| t)
        .unwrap_or_else(|| bins.iter().position(|&n| n > 0).unwrap() as u32 + 1)
}

/// Whether thresholds `a` and `b` split the observed values identically.
pub fn same_partition(bins: &[u64; 256], a: u32, b: u32) -> bool {
    let (lo, hi) = (a.min(b) as usize, a.max(b) as usize);
    bins[lo..hi.min(256)].iter().all(|&n| n == 0)
}

fn bits(code: u32, points: usize) -> Vec<u8> {
    (0..points).map(|i| ((code >> i) & 1) as u8).collect()
}

fn circular_transitions(code: u32, points: usize) -> usize {
    let b = bits(code, points);
    (0..points).filter(|&i| b[i] != b[(i + 1) % points]).count()
}

/// Number of uniform codes plus one catch-all bin.
pub fn enumerate_u2_bins(points: usize) -> usize {
    (0..1u32 << points)
        .filter(|&c| circular_transitions(c, points) <= 2)
        .count()
        + 1
}

/// Number of distinct circular-rotation classes.
pub fn enumerate_ri_bins(points: usize) -> usize {
    let mut classes = HashSet::new();
    for c in 0..1u32 << points {
        let b = bits(c, points);
        let canonical = (0..points)
            .map(|s| {
                let mut r = b.clone();
                r.rotate_left(s);
                r
            })
            .min()
            .unwrap();
        classes.insert(canonical);
    }
    classes.len()
}

/// Distinct (uniform ones-count) classes plus one catch-all bin.
pub fn enumerate_riu2_bins(points: usize) -> usize {
    let classes: HashSet<u32> = (0..1u32 << points)
        .filter(|&c| circular_transitions(c, points) <= 2)
        .map(|c| c.count_ones())
        .collect();
    classes.len() + 1
}

/// Cyclic Jacobi eigen-decomposition of a small symmetric matrix. Returns
/// eigenvalues descending and unit eigenvectors (as rows) with the largest
/// magnitude entry positive.
pub fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut vec: Vec<f64> = (0..n).map(|i| v[i][k]).collect();
            let pivot = vec
                .iter()
                .copied()
                .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            if pivot < 0.0 {
                vec.iter_mut().for_each(|x| *x = -*x);
            }
            (a[k][k], vec)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    pairs.into_iter().unzip()
}

/// Sample covariance (divisor n-1) of row vectors.
pub fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let d = rows[0].len();
    let mean: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    rows.iter()
                        .map(|r| (r[i] - mean[i]) * (r[j] - mean[j]))
                        .sum::<f64>()
                        / (n - 1) as f64
                })
                .collect()
        })
        .collect()
}

/// Indices of `gallery` sorted by distance to `query` via a full pairwise
/// comparison count (position = number of strictly closer items, plus earlier
/// ties).
pub fn brute_force_order(query: &[f64], gallery: &[Vec<f64>]) -> Vec<usize> {
    let dist = |g: &Vec<f64>| -> f64 {
        g.iter()
            .zip(query)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let d: Vec<f64> = gallery.iter().map(dist).collect();
    let mut slots = vec![usize::MAX; gallery.len()];
    for i in 0..gallery.len() {
        let pos = (0..gallery.len())
            .filter(|&j| d[j] < d[i] || (d[j] == d[i] && j < i))
            .count();
        slots[pos] = i;
    }
    slots
}

/// Deterministic pseudo-random grayscale image.
pub fn random_image(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    GrayImage::from_fn(width, height, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 24) as u8
    })
    .unwrap()
}

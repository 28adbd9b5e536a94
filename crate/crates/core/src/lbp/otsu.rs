use crate::error::{Error, Result};
use crate::imaging::GrayImage;

use super::{accumulate_rows, check_points};

/// Histogram of rounded absolute differences `|g_c - g_p|` over the valid
/// region of one radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceHistogram {
    bins: [u64; 256],
}

impl DifferenceHistogram {
    pub fn from_bins(bins: [u64; 256]) -> Self {
        Self { bins }
    }

    #[inline]
    pub fn bins(&self) -> &[u64; 256] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }
}

/// Accumulates the difference statistics that feed the Otsu threshold.
///
/// Uses exactly the sampling geometry of [`super::lbp_transform`]; every
/// valid pixel contributes `points` entries.
pub fn compute_difference_histogram(
    img: &GrayImage,
    points: usize,
    radius: u32,
) -> Result<DifferenceHistogram> {
    check_points(points)?;
    if radius < 1 {
        return Err(Error::invalid("radius must be >= 1"));
    }
    let rows = accumulate_rows(
        img,
        points,
        radius,
        || [0u64; 256],
        |hist, center, sample| {
            let mut buf = vec![0.0; center.len()];
            for p in 0..points {
                sample(p, &mut buf);
                for (&g, &c) in buf.iter().zip(center) {
                    hist[(f64::from(c) - g).abs().round() as usize] += 1;
                }
            }
        },
    )?;
    let mut bins = [0u64; 256];
    for row in rows {
        for (b, r) in bins.iter_mut().zip(row) {
            *b += r;
        }
    }
    Ok(DifferenceHistogram { bins })
}

/// Otsu threshold of a difference histogram.
///
/// Candidates `t` in `1..=255` split the differences into `d < t` and
/// `d >= t`. The smallest `t` with both classes nonempty that minimizes the
/// probability-weighted sum of class variances wins. A histogram with a
/// single occupied bin `v` has no valid split and yields `v + 1`, which
/// classifies every difference as below threshold.
pub fn otsu_threshold(hist: &DifferenceHistogram) -> Result<u32> {
    let total_n = hist.total();
    if total_n == 0 {
        return Err(Error::invalid("Otsu threshold of an empty histogram"));
    }
    let total_s: u64 = hist
        .bins
        .iter()
        .enumerate()
        .map(|(d, &n)| d as u64 * n)
        .sum();

    // Minimizing the within-class variance is the same as maximizing
    // S_low^2 / n_low + S_high^2 / n_high, with S the sum of values. Sums are
    // exact integers, so every t inducing the same partition scores the same.
    let mut best: Option<(u32, f64)> = None;
    let (mut n_low, mut s_low) = (0u64, 0u64);
    for t in 1..=255u32 {
        let d = (t - 1) as usize;
        n_low += hist.bins[d];
        s_low += d as u64 * hist.bins[d];
        let n_high = total_n - n_low;
        if n_low == 0 || n_high == 0 {
            continue;
        }
        let s_high = total_s - s_low;
        let score = (s_low as f64).powi(2) / n_low as f64 + (s_high as f64).powi(2) / n_high as f64;
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((t, score));
        }
    }
    Ok(match best {
        Some((t, _)) => t,
        None => {
            let v = hist
                .bins
                .iter()
                .position(|&n| n > 0)
                .expect("nonempty histogram");
            v as u32 + 1
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(entries: &[(usize, u64)]) -> DifferenceHistogram {
        let mut bins = [0u64; 256];
        for &(b, n) in entries {
            bins[b] = n;
        }
        DifferenceHistogram::from_bins(bins)
    }

    #[test]
    fn degenerate_histograms_use_sentinel() {
        assert_eq!(otsu_threshold(&hist(&[(0, 42)])).unwrap(), 1);
        assert_eq!(otsu_threshold(&hist(&[(17, 3)])).unwrap(), 18);
        assert_eq!(otsu_threshold(&hist(&[(255, 1)])).unwrap(), 256);
    }

    #[test]
    fn two_spikes_pick_smallest_plateau_threshold() {
        assert_eq!(otsu_threshold(&hist(&[(0, 50), (10, 50)])).unwrap(), 1);
        assert_eq!(otsu_threshold(&hist(&[(3, 5), (9, 50)])).unwrap(), 4);
    }

    #[test]
    fn uniform_histogram_splits_in_the_middle() {
        let h = DifferenceHistogram::from_bins([1; 256]);
        assert_eq!(otsu_threshold(&h).unwrap(), 128);
    }

    #[test]
    fn empty_histogram_is_an_error() {
        assert!(otsu_threshold(&hist(&[])).is_err());
    }

    #[test]
    fn constant_image_puts_everything_in_bin_zero() {
        let img = GrayImage::filled(10, 10, 128).unwrap();
        let h = compute_difference_histogram(&img, 8, 1).unwrap();
        assert_eq!(h.bins()[0], 512);
        assert_eq!(h.total(), 512);
    }

    #[test]
    fn three_by_three_has_one_valid_pixel() {
        let img = GrayImage::from_fn(3, 3, |x, y| (x * 50 + y * 20) as u8).unwrap();
        for p in [3, 8, 16] {
            assert_eq!(compute_difference_histogram(&img, p, 1).unwrap().total(), p as u64);
        }
    }
}

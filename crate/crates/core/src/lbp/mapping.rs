use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vocabulary compression applied to raw LBP codes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Compression {
    /// Identity, `2^P` bins.
    #[default]
    None,
    /// Uniform patterns (at most two circular 0/1 transitions) keep their own
    /// bin; all others share one.
    U2,
    /// One bin per circular-rotation equivalence class.
    Ri,
    /// Rotation-invariant uniform: uniform codes binned by their number of
    /// set bits, everything else in one extra bin.
    Riu2,
}

impl Compression {
    pub fn name(self) -> &'static str {
        match self {
            Compression::None => "none",
            Compression::U2 => "u2",
            Compression::Ri => "ri",
            Compression::Riu2 => "riu2",
        }
    }
}

impl std::str::FromStr for Compression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Compression::None),
            "u2" => Ok(Compression::U2),
            "ri" => Ok(Compression::Ri),
            "riu2" => Ok(Compression::Riu2),
            other => Err(Error::invalid(format!(
                "unknown compression {other:?} (expected none, u2, ri or riu2)"
            ))),
        }
    }
}

/// Lookup table from raw codes to histogram bins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeMapping {
    points: usize,
    table: Vec<u32>,
    bin_count: usize,
}

impl CodeMapping {
    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    #[inline]
    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn bin(&self, code: u16) -> usize {
        self.table[code as usize] as usize
    }
}

fn rotate_right(code: u32, points: usize) -> u32 {
    let mask = (1u32 << points) - 1;
    ((code >> 1) | (code << (points - 1))) & mask
}

/// Number of circular 0/1 transitions in a `points`-bit code.
pub(crate) fn transitions(code: u32, points: usize) -> u32 {
    (code ^ rotate_right(code, points)).count_ones()
}

fn min_rotation(code: u32, points: usize) -> u32 {
    let mut best = code;
    let mut c = code;
    for _ in 1..points {
        c = rotate_right(c, points);
        best = best.min(c);
    }
    best
}

/// Builds the lookup table for `points`-sample codes.
///
/// Bins are numbered in ascending order of the smallest code they contain,
/// except for the catch-all non-uniform bin of `U2` and `Riu2`, which always
/// comes last. Code 0 maps to bin 0 in every mode.
pub fn build_mapping(points: usize, mode: Compression) -> Result<CodeMapping> {
    if points != 8 && points != 16 {
        return Err(Error::invalid(format!(
            "code mappings support 8 or 16 samples, got {points}"
        )));
    }
    let n = 1usize << points;
    let (table, bin_count) = match mode {
        Compression::None => ((0..n as u32).collect(), n),
        Compression::U2 => {
            let uniform = (0..n as u32)
                .filter(|&c| transitions(c, points) <= 2)
                .count() as u32;
            let mut next = 0u32;
            let table = (0..n as u32)
                .map(|c| {
                    if transitions(c, points) <= 2 {
                        next += 1;
                        next - 1
                    } else {
                        uniform
                    }
                })
                .collect();
            (table, uniform as usize + 1)
        }
        Compression::Ri => {
            let mut class_of = vec![u32::MAX; n];
            let mut next = 0u32;
            let mut table = Vec::with_capacity(n);
            for c in 0..n as u32 {
                let rep = min_rotation(c, points) as usize;
                if class_of[rep] == u32::MAX {
                    class_of[rep] = next;
                    next += 1;
                }
                table.push(class_of[rep]);
            }
            (table, next as usize)
        }
        Compression::Riu2 => {
            let table = (0..n as u32)
                .map(|c| {
                    if transitions(c, points) <= 2 {
                        c.count_ones()
                    } else {
                        points as u32 + 1
                    }
                })
                .collect();
            (table, points + 2)
        }
    };
    Ok(CodeMapping {
        points,
        table,
        bin_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_counts_for_eight_points() {
        assert_eq!(build_mapping(8, Compression::None).unwrap().bin_count(), 256);
        assert_eq!(build_mapping(8, Compression::U2).unwrap().bin_count(), 59);
        assert_eq!(build_mapping(8, Compression::Ri).unwrap().bin_count(), 36);
        assert_eq!(build_mapping(8, Compression::Riu2).unwrap().bin_count(), 10);
    }

    #[test]
    fn sixteen_point_uniform_has_243_bins() {
        assert_eq!(build_mapping(16, Compression::U2).unwrap().bin_count(), 243);
        assert_eq!(build_mapping(16, Compression::Riu2).unwrap().bin_count(), 18);
    }

    #[test]
    fn unsupported_point_count() {
        assert!(build_mapping(12, Compression::U2).is_err());
    }

    #[test]
    fn zero_code_lands_in_bin_zero() {
        for mode in [Compression::None, Compression::U2, Compression::Ri, Compression::Riu2] {
            assert_eq!(build_mapping(8, mode).unwrap().bin(0), 0, "{mode:?}");
        }
    }

    #[test]
    fn rotations_share_a_bin() {
        let ri = build_mapping(8, Compression::Ri).unwrap();
        assert_eq!(ri.bin(0b0000_0011), ri.bin(0b1000_0001));
        assert_eq!(ri.bin(0b0000_0011), ri.bin(0b0110_0000));
        assert_ne!(ri.bin(0b0000_0011), ri.bin(0b0000_0101));
    }

    #[test]
    fn every_table_is_surjective() {
        for points in [8, 16] {
            for mode in [Compression::None, Compression::U2, Compression::Ri, Compression::Riu2] {
                let m = build_mapping(points, mode).unwrap();
                let mut seen = vec![false; m.bin_count()];
                for &b in m.table() {
                    seen[b as usize] = true;
                }
                assert!(seen.iter().all(|&s| s), "{points} {mode:?}");
            }
        }
    }

    #[test]
    fn parse_names() {
        for mode in [Compression::None, Compression::U2, Compression::Ri, Compression::Riu2] {
            assert_eq!(mode.name().parse::<Compression>().unwrap(), mode);
        }
        assert!("uniform".parse::<Compression>().is_err());
    }
}

//! Position recovery from cross and rectangular samples.
//!
//! A cross is decoded exactly: its vertical arm locates the row in `T`, and
//! the complement flag of that lookup is the `S` bit under the arm.
//!
//! A `k x n` rectangle `Z = (X ⊗ Y) ^ E` is decoded by majority vote. Every
//! row is compared with the first row: rows agreeing in more than half of
//! their bits get the same `X` bit as the first row, others the opposite
//! bit. That fixes `X` up to complement, and exactly one of the two
//! candidates is a window of the half de Bruijn sequence `T`. Each column is
//! then compared with `X`: more than half agreement gives a `0` in `Y`,
//! otherwise a `1`. If every row of `E` has fewer than `n / 4` ones and
//! every column fewer than `k / 2`, both votes are correct.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pattern::{BitMatrix, CrossSample, RectSample};
use crate::sequences::{low_mask, Locator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Location {
    /// Top row of the sample (top of the vertical arm for a cross).
    pub row: usize,
    /// Left column of the sample (left end of the horizontal arm for a cross).
    pub col: usize,
    /// The vertical readout matched the complement of the stored `T` window.
    pub vertical_complemented: bool,
    /// The horizontal readout matched the complement of the stored `S` window.
    pub horizontal_complemented: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Ok,
    /// A majority vote ended exactly even.
    TieAmbiguous,
    /// Neither labeling of the vertical readout is a window of `T`.
    NoLegalAssignment,
    /// The readout cannot come from this pattern.
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeReport {
    pub status: DecodeStatus,
    pub location: Option<Location>,
    /// Recovered vertical `k`-tuple `X`.
    pub vertical: u64,
    /// Recovered horizontal `n`-tuple `Y`.
    pub horizontal: u64,
    /// `X ⊗ Y`.
    pub corrected: BitMatrix,
    /// Sample XOR corrected.
    pub error_pattern: BitMatrix,
    pub row_error_counts: Vec<usize>,
    pub col_error_counts: Vec<usize>,
    pub reason: Option<String>,
}

impl DecodeReport {
    pub fn k(&self) -> usize {
        self.corrected.height()
    }

    pub fn n(&self) -> usize {
        self.corrected.width()
    }

    pub fn is_ok(&self) -> bool {
        self.status == DecodeStatus::Ok
    }
}

/// Largest number of row errors allowed under "fewer than a quarter of `n`".
pub fn max_row_errors(n: usize) -> usize {
    n.div_ceil(4) - 1
}

/// Largest number of column errors allowed under "fewer than half of `k`".
pub fn max_column_errors(k: usize) -> usize {
    k.div_ceil(2) - 1
}

/// Decodes an error-free cross readout.
///
/// Fails with [`Error::Inconsistent`] if the two copies of the shared pixel
/// disagree or the arms do not fit together in this pattern, and with
/// [`Error::NoSuchWindow`] if an arm is absent from its sequence.
pub fn decode_cross(
    sample: &CrossSample,
    vertical: &Locator,
    horizontal: &Locator,
) -> Result<Location> {
    let g = sample.geometry;
    check_width(vertical, g.k)?;
    check_width(horizontal, g.n)?;
    if !sample.shared_pixel_agrees() {
        return Err(Error::Inconsistent(
            "vertical and horizontal arms disagree on the shared pixel".into(),
        ));
    }
    let t = vertical.sequence();
    let s = horizontal.sequence();

    let v = vertical.locate(sample.vertical)?;
    // the vertical arm is T ^ s_c, so the complement flag is s_c
    let column_bit = v.complemented;
    let row_bit = t.bit(v.position + g.i0);
    let mask = low_mask(g.n);
    let adjusted = if row_bit {
        !sample.horizontal & mask
    } else {
        sample.horizontal
    };
    let h = horizontal.locate(adjusted)?;
    if h.complemented {
        return Err(Error::Inconsistent(
            "horizontal sequence matched only up to complement".into(),
        ));
    }
    if s.bit(h.position + g.j0) != column_bit {
        return Err(Error::Inconsistent(format!(
            "S bit at column {} disagrees with the vertical arm",
            (h.position + g.j0) % s.len()
        )));
    }
    Ok(Location {
        row: v.position,
        col: h.position,
        vertical_complemented: column_bit,
        horizontal_complemented: row_bit,
    })
}

fn check_width(locator: &Locator, width: usize) -> Result<()> {
    if locator.order() != width {
        return Err(Error::WidthMismatch {
            expected: locator.order(),
            found: width,
        });
    }
    Ok(())
}

enum Vote {
    Zero,
    One,
    Tie,
}

/// Zero when `agree` is more than half of `total`, one when it is less.
fn vote(agree: usize, total: usize) -> Vote {
    match (2 * agree).cmp(&total) {
        std::cmp::Ordering::Greater => Vote::Zero,
        std::cmp::Ordering::Less => Vote::One,
        std::cmp::Ordering::Equal => Vote::Tie,
    }
}

/// Majority-vote recovery of `X` and `Y` from a noisy rectangle, without
/// locating them. `vertical` must index the pattern's `T`.
pub fn denoise_rect(sample: &RectSample, vertical: &Locator) -> Result<DecodeReport> {
    let z = &sample.bits;
    let (k, n) = (z.height(), z.width());
    if vertical.order() != k {
        return Err(Error::Dimension {
            expected_rows: vertical.order(),
            expected_cols: n,
            rows: k,
            cols: n,
        });
    }
    let mut row_tie = false;
    let first = z.row(0);
    let relative = (0..k).fold(0u64, |acc, i| {
        let agree = n - (z.row(i) ^ first).count_ones() as usize;
        let bit = match vote(agree, n) {
            Vote::Zero => 0,
            Vote::One => 1,
            Vote::Tie => {
                row_tie = true;
                1
            }
        };
        (acc << 1) | bit
    });

    let mask = low_mask(k);
    let present = |w: u64| matches!(vertical.locate(w), Ok(l) if !l.complemented);
    let (x, legal) = match (present(relative), present(!relative & mask)) {
        (true, false) => (relative, true),
        (false, true) => (!relative & mask, true),
        _ => (relative, false),
    };

    let mut column_tie = false;
    let y = (0..n).fold(0u64, |acc, j| {
        let agree = k - (z.column(j) ^ x).count_ones() as usize;
        let bit = match vote(agree, k) {
            Vote::Zero => 0,
            Vote::One => 1,
            Vote::Tie => {
                column_tie = true;
                1
            }
        };
        (acc << 1) | bit
    });

    let corrected = BitMatrix::outer(x, k, y, n);
    let error_pattern = z.xor(&corrected)?;
    let (status, reason) = if row_tie {
        (
            DecodeStatus::TieAmbiguous,
            Some("a row agrees with the first row in exactly half its bits"),
        )
    } else if !legal {
        (
            DecodeStatus::NoLegalAssignment,
            Some("neither labeling of the vertical readout is a window of T"),
        )
    } else if column_tie {
        (
            DecodeStatus::TieAmbiguous,
            Some("a column agrees with X in exactly half its bits"),
        )
    } else {
        (DecodeStatus::Ok, None)
    };
    Ok(DecodeReport {
        status,
        location: None,
        vertical: x,
        horizontal: y,
        row_error_counts: error_pattern.row_counts(),
        col_error_counts: error_pattern.column_counts(),
        corrected,
        error_pattern,
        reason: reason.map(str::to_owned),
    })
}

/// Denoises a rectangle and locates the result.
pub fn robust_decode(
    sample: &RectSample,
    vertical: &Locator,
    horizontal: &Locator,
) -> Result<DecodeReport> {
    if horizontal.order() != sample.n() {
        return Err(Error::Dimension {
            expected_rows: vertical.order(),
            expected_cols: horizontal.order(),
            rows: sample.k(),
            cols: sample.n(),
        });
    }
    let mut report = denoise_rect(sample, vertical)?;
    if !report.is_ok() {
        return Ok(report);
    }
    let row = vertical.locate(report.vertical)?;
    debug_assert!(!row.complemented);
    match horizontal.locate(report.horizontal) {
        Ok(col) if !col.complemented => {
            report.location = Some(Location {
                row: row.position,
                col: col.position,
                vertical_complemented: false,
                horizontal_complemented: false,
            });
        }
        Ok(_) | Err(Error::NoSuchWindow { .. }) => {
            report.status = DecodeStatus::Inconsistent;
            report.reason = Some("recovered horizontal tuple is not a window of S".into());
        }
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Error-count diagnostic for a `k x n` error pattern.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorConditions {
    pub row_counts: Vec<usize>,
    pub col_counts: Vec<usize>,
    pub max_row_errors: usize,
    pub max_column_errors: usize,
    /// Every row has fewer than `n / 4` errors.
    pub rows_ok: bool,
    /// Every column has fewer than `k / 2` errors.
    pub cols_ok: bool,
    /// Largest number of distinct error positions across any two rows.
    pub worst_pair_union: usize,
    /// `worst_pair_union < n / 2`. Reported only; the decoder's guarantee
    /// rests on `rows_ok && cols_ok`.
    pub pairwise_ok: bool,
}

impl ErrorConditions {
    pub fn satisfied(&self) -> bool {
        self.rows_ok && self.cols_ok
    }
}

pub fn check_error_conditions(errors: &BitMatrix) -> ErrorConditions {
    let (k, n) = (errors.height(), errors.width());
    let row_counts = errors.row_counts();
    let col_counts = errors.column_counts();
    let rows = errors.rows();
    let mut worst_pair_union = 0;
    for a in 0..k {
        for b in a + 1..k {
            worst_pair_union = worst_pair_union.max((rows[a] | rows[b]).count_ones() as usize);
        }
    }
    ErrorConditions {
        rows_ok: row_counts.iter().all(|&c| 4 * c < n),
        cols_ok: col_counts.iter().all(|&c| 2 * c < k),
        pairwise_ok: 2 * worst_pair_union < n,
        max_row_errors: max_row_errors(n),
        max_column_errors: max_column_errors(k),
        worst_pair_union,
        row_counts,
        col_counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{product, CrossGeometry, Grid, PatternArray};
    use crate::sequences::{BitSequence, SequenceKind};

    fn reference() -> (PatternArray, Locator, Locator) {
        let t = BitSequence::parse("1111101011011100", 5, SequenceKind::HalfDeBruijn).unwrap();
        let s = BitSequence::parse("0000111101100101", 4, SequenceKind::DeBruijn).unwrap();
        let g = product(&t, &s).unwrap();
        (g, Locator::table(&t), Locator::table(&s))
    }

    #[test]
    fn reference_cross() {
        let (_, t, s) = reference();
        let sample =
            CrossSample::new(0b10010, 0b1000, CrossGeometry::new(5, 4, 2, 1).unwrap()).unwrap();
        let loc = decode_cross(&sample, &t, &s).unwrap();
        assert_eq!((loc.row, loc.col), (7, 3));
        assert!(loc.vertical_complemented);
        assert!(loc.horizontal_complemented);
    }

    #[test]
    fn one_arm_shared_pixel_flip_is_inconsistent() {
        let (_, t, s) = reference();
        let geometry = CrossGeometry::new(5, 4, 2, 1).unwrap();
        // flip only the vertical arm's copy of the shared pixel
        let sample = CrossSample::new_unchecked(0b10110, 0b1000, geometry).unwrap();
        assert!(matches!(
            decode_cross(&sample, &t, &s),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn cross_width_mismatch() {
        let (_, t, s) = reference();
        let sample =
            CrossSample::new(0b1001, 0b1000, CrossGeometry::new(4, 4, 0, 0).unwrap()).unwrap();
        assert!(matches!(
            decode_cross(&sample, &t, &s),
            Err(Error::WidthMismatch { .. })
        ));
    }

    #[test]
    fn clean_rect_everywhere() {
        let (g, t, s) = reference();
        for r in 0..16 {
            for c in 0..16 {
                let sample = g.window(r, c, 5, 4).unwrap();
                let report = robust_decode(&sample, &t, &s).unwrap();
                assert_eq!(report.status, DecodeStatus::Ok);
                assert_eq!(report.error_pattern.count_ones(), 0);
                assert_eq!(report.corrected, sample.bits);
                let loc = report.location.unwrap();
                assert_eq!((loc.row, loc.col), (r, c));
            }
        }
    }

    #[test]
    fn row_tie_is_reported() {
        let (g, t, _) = reference();
        let mut sample = g.window(2, 5, 5, 4).unwrap();
        // make row 3 agree with row 0 in exactly 2 of 4 bits
        let row0 = sample.bits.row(0);
        for j in 0..4 {
            sample.bits.set(3, j, (row0 >> (3 - j)) & 1 == 1);
        }
        sample.bits.flip(3, 0);
        sample.bits.flip(3, 1);
        let report = denoise_rect(&sample, &t).unwrap();
        assert_eq!(report.status, DecodeStatus::TieAmbiguous);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let (g, t, _) = reference();
        let sample = g.window(0, 0, 4, 4).unwrap();
        assert!(matches!(
            denoise_rect(&sample, &t),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn thresholds() {
        assert_eq!(max_row_errors(8), 1);
        assert_eq!(max_row_errors(9), 2);
        assert_eq!(max_row_errors(16), 3);
        assert_eq!(max_column_errors(7), 3);
        assert_eq!(max_column_errors(8), 3);
    }

    #[test]
    fn error_condition_boundaries() {
        let clean = check_error_conditions(&BitMatrix::zeros(7, 9));
        assert!(clean.satisfied() && clean.pairwise_ok);

        let mut e = BitMatrix::zeros(7, 9);
        for i in 0..4 {
            e.set(i, 0, true);
        }
        let c = check_error_conditions(&e);
        assert!(c.rows_ok);
        assert!(!c.cols_ok);

        let mut e = BitMatrix::zeros(7, 8);
        e.set(0, 0, true);
        e.set(0, 1, true);
        assert!(!check_error_conditions(&e).rows_ok);
    }
}

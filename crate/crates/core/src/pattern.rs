//! The product array `G = T ⊗ S` and samples taken from it.
//!
//! `g[i][j] = t[i] ^ s[j]`, where `T` is a half de Bruijn sequence of order
//! `k` (the vertical axis) and `S` a de Bruijn sequence of order `n` (the
//! horizontal axis). Every row is `S` or its complement and every column is
//! `T` or its complement. Rows grow downward and columns rightward; all
//! indices are 0-based.

use std::collections::HashMap;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequences::{format_word, low_mask, parse_word, BitSequence, SequenceKind, MAX_WINDOW};

/// A small binary matrix whose rows are packed MSB-first into `u64`s.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: Vec<u64>,
    width: usize,
}

impl BitMatrix {
    pub fn new(rows: Vec<u64>, width: usize) -> Result<Self> {
        if width == 0 || width > 64 || rows.is_empty() {
            return Err(Error::Dimension {
                expected_rows: rows.len().max(1),
                expected_cols: width.clamp(1, 64),
                rows: rows.len(),
                cols: width,
            });
        }
        let mask = low_mask(width);
        if rows.iter().any(|r| r & !mask != 0) {
            return Err(Error::Parse(format!("row value wider than {width} bits")));
        }
        Ok(Self { rows, width })
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            rows: vec![0; height],
            width,
        }
    }

    /// Parses one `'0'`/`'1'` string per row. All rows must have equal width.
    pub fn from_strings<S: AsRef<str>>(lines: &[S]) -> Result<Self> {
        let mut rows = Vec::with_capacity(lines.len());
        let mut width = None;
        for line in lines {
            let (word, w) = parse_word(line.as_ref())?;
            if *width.get_or_insert(w) != w {
                return Err(Error::Parse("rows have different widths".into()));
            }
            rows.push(word);
        }
        Self::new(rows, width.unwrap_or(0))
    }

    /// `X ⊗ Y`: row `i` is `Y`, complemented where bit `i` of `X` is set.
    pub fn outer(vertical: u64, height: usize, horizontal: u64, width: usize) -> Self {
        let mask = low_mask(width);
        let rows = (0..height)
            .map(|i| {
                if (vertical >> (height - 1 - i)) & 1 == 1 {
                    !horizontal & mask
                } else {
                    horizontal & mask
                }
            })
            .collect();
        Self { rows, width }
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    /// Column `j` packed MSB-first, top row first.
    pub fn column(&self, j: usize) -> u64 {
        let shift = self.width - 1 - j;
        self.rows
            .iter()
            .fold(0u64, |acc, r| (acc << 1) | ((r >> shift) & 1))
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> (self.width - 1 - j)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let bit = 1u64 << (self.width - 1 - j);
        if value {
            self.rows[i] |= bit;
        } else {
            self.rows[i] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        self.rows[i] ^= 1u64 << (self.width - 1 - j);
    }

    pub fn xor(&self, other: &BitMatrix) -> Result<BitMatrix> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a ^ b)
                .collect(),
            width: self.width,
        })
    }

    pub fn hamming_distance(&self, other: &BitMatrix) -> Result<usize> {
        Ok(self.xor(other)?.count_ones())
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn row_counts(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.count_ones() as usize).collect()
    }

    pub fn column_counts(&self) -> Vec<usize> {
        (0..self.width)
            .map(|j| self.column(j).count_ones() as usize)
            .collect()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|&r| format_word(r, self.width))
            .collect()
    }

    fn same_shape(&self, other: &BitMatrix) -> Result<()> {
        if self.height() != other.height() || self.width != other.width {
            return Err(Error::Dimension {
                expected_rows: self.height(),
                expected_cols: self.width,
                rows: other.height(),
                cols: other.width,
            });
        }
        Ok(())
    }

    /// True when every row equals the first row or its complement, i.e. the
    /// matrix is some `X ⊗ Y`.
    pub fn is_product_form(&self) -> bool {
        let mask = low_mask(self.width);
        let first = self.rows[0];
        self.rows.iter().all(|&r| r == first || r == !first & mask)
    }
}

/// A `k x n` rectangular readout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectSample {
    pub bits: BitMatrix,
    /// Where the sample was taken, when known. Test harnesses only.
    pub origin: Option<(usize, usize)>,
}

impl RectSample {
    pub fn new(bits: BitMatrix) -> Self {
        Self { bits, origin: None }
    }

    pub fn k(&self) -> usize {
        self.bits.height()
    }

    pub fn n(&self) -> usize {
        self.bits.width()
    }
}

/// Shape of a cross sensor: a `k`-pixel vertical arm and an `n`-pixel
/// horizontal arm sharing the pixel at index `i0` of the vertical arm and
/// index `j0` of the horizontal arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossGeometry {
    pub k: usize,
    pub n: usize,
    pub i0: usize,
    pub j0: usize,
}

impl CrossGeometry {
    pub fn new(k: usize, n: usize, i0: usize, j0: usize) -> Result<Self> {
        if k == 0 || n == 0 || k > MAX_WINDOW || n > MAX_WINDOW {
            return Err(Error::CrossGeometry(format!(
                "arm lengths {k} and {n} out of range"
            )));
        }
        if i0 >= k || j0 >= n {
            return Err(Error::CrossGeometry(format!(
                "shared pixel ({i0}, {j0}) outside arms of length {k} and {n}"
            )));
        }
        Ok(Self { k, n, i0, j0 })
    }

    /// Shared pixel at `(k / 2, n / 2)`.
    pub fn centered(k: usize, n: usize) -> Result<Self> {
        Self::new(k, n, k / 2, n / 2)
    }
}

/// A cross readout. `vertical` is read top to bottom, `horizontal` left to
/// right, both packed MSB-first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossSample {
    pub vertical: u64,
    pub horizontal: u64,
    pub geometry: CrossGeometry,
}

impl CrossSample {
    /// Rejects readouts whose two copies of the shared pixel disagree.
    pub fn new(vertical: u64, horizontal: u64, geometry: CrossGeometry) -> Result<Self> {
        let sample = Self::new_unchecked(vertical, horizontal, geometry)?;
        if !sample.shared_pixel_agrees() {
            return Err(Error::Inconsistent(
                "vertical and horizontal arms disagree on the shared pixel".into(),
            ));
        }
        Ok(sample)
    }

    /// Accepts any readout of the right widths, for raw sensor data that may
    /// be corrupted. The decoder performs the shared-pixel check.
    pub fn new_unchecked(vertical: u64, horizontal: u64, geometry: CrossGeometry) -> Result<Self> {
        if vertical & !low_mask(geometry.k) != 0 || horizontal & !low_mask(geometry.n) != 0 {
            return Err(Error::Parse(
                "arm value wider than its declared length".into(),
            ));
        }
        Ok(Self {
            vertical,
            horizontal,
            geometry,
        })
    }

    pub fn vertical_bit(&self, i: usize) -> bool {
        (self.vertical >> (self.geometry.k - 1 - i)) & 1 == 1
    }

    pub fn horizontal_bit(&self, j: usize) -> bool {
        (self.horizontal >> (self.geometry.n - 1 - j)) & 1 == 1
    }

    pub fn shared_pixel_agrees(&self) -> bool {
        self.vertical_bit(self.geometry.i0) == self.horizontal_bit(self.geometry.j0)
    }
}

/// Read access to a binary grid, cyclic (a torus) or bounded.
pub trait Grid {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn is_cyclic(&self) -> bool;
    /// Cell value; callers pass in-range indices, or any index on a cyclic grid.
    fn cell(&self, row: usize, col: usize) -> bool;

    /// Number of distinct top-left positions for a `k x n` footprint.
    fn sample_positions(&self, k: usize, n: usize) -> (usize, usize) {
        if self.is_cyclic() {
            (self.rows(), self.cols())
        } else {
            (
                (self.rows() + 1).saturating_sub(k),
                (self.cols() + 1).saturating_sub(n),
            )
        }
    }

    /// The `k x n` window whose top-left cell is `(row, col)`.
    fn window(&self, row: usize, col: usize, k: usize, n: usize) -> Result<RectSample> {
        check_footprint(self, "window", row, col, k, n)?;
        let rows = (0..k)
            .map(|i| {
                (0..n).fold(0u64, |acc, j| {
                    (acc << 1) | self.cell(row + i, col + j) as u64
                })
            })
            .collect();
        Ok(RectSample {
            bits: BitMatrix::new(rows, n)?,
            origin: Some((row, col)),
        })
    }

    /// The cross whose vertical arm spans rows `row..row+k` of column
    /// `col + j0` and whose horizontal arm spans columns `col..col+n` of row
    /// `row + i0`.
    fn cross(&self, row: usize, col: usize, geometry: CrossGeometry) -> Result<CrossSample> {
        let CrossGeometry { k, n, i0, j0 } = geometry;
        check_footprint(self, "cross", row, col, k, n)?;
        let vertical = (0..k).fold(0u64, |acc, i| {
            (acc << 1) | self.cell(row + i, col + j0) as u64
        });
        let horizontal = (0..n).fold(0u64, |acc, j| {
            (acc << 1) | self.cell(row + i0, col + j) as u64
        });
        CrossSample::new(vertical, horizontal, geometry)
    }
}

fn check_footprint<G: Grid + ?Sized>(
    grid: &G,
    what: &'static str,
    row: usize,
    col: usize,
    k: usize,
    n: usize,
) -> Result<()> {
    if k == 0 || n == 0 || n > 64 {
        return Err(Error::Dimension {
            expected_rows: k.max(1),
            expected_cols: n.clamp(1, 64),
            rows: k,
            cols: n,
        });
    }
    let fits = if grid.is_cyclic() {
        row < grid.rows() && col < grid.cols()
    } else {
        row + k <= grid.rows() && col + n <= grid.cols()
    };
    if !fits {
        return Err(Error::OutOfRange {
            what,
            row,
            col,
            rows: grid.rows(),
            cols: grid.cols(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternMode {
    Cyclic,
    AcyclicExtended,
}

/// The product array, materialized as row-major packed bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternArray {
    rows: usize,
    cols: usize,
    grid: BitVec<u64, Lsb0>,
    vertical: BitSequence,
    horizontal: BitSequence,
    mode: PatternMode,
}

/// Builds `T ⊗ S` from a half de Bruijn `T` and a de Bruijn `S`.
pub fn product(vertical: &BitSequence, horizontal: &BitSequence) -> Result<PatternArray> {
    if vertical.kind() != SequenceKind::HalfDeBruijn {
        return Err(Error::WrongKind {
            expected: SequenceKind::HalfDeBruijn,
            found: vertical.kind(),
        });
    }
    if horizontal.kind() != SequenceKind::DeBruijn {
        return Err(Error::WrongKind {
            expected: SequenceKind::DeBruijn,
            found: horizontal.kind(),
        });
    }
    Ok(product_unchecked(vertical, horizontal))
}

/// `T ⊗ S` for arbitrary sequences, without any kind check.
pub fn product_unchecked(vertical: &BitSequence, horizontal: &BitSequence) -> PatternArray {
    let (rows, cols) = (vertical.len(), horizontal.len());
    let mut grid = BitVec::with_capacity(rows * cols);
    for &t in vertical.bits() {
        grid.extend(horizontal.bits().iter().map(|&s| t ^ s));
    }
    PatternArray {
        rows,
        cols,
        grid,
        vertical: vertical.clone(),
        horizontal: horizontal.clone(),
        mode: PatternMode::Cyclic,
    }
}

impl PatternArray {
    /// Wraps an arbitrary grid (for instance one read from disk) together
    /// with the sequences it claims to be built from. Only dimensions are
    /// checked; use the census methods to validate content.
    pub fn from_grid(
        rows: usize,
        cols: usize,
        cells: BitVec<u64, Lsb0>,
        vertical: BitSequence,
        horizontal: BitSequence,
        mode: PatternMode,
    ) -> Result<Self> {
        let (expected_rows, expected_cols) = match mode {
            PatternMode::Cyclic => (vertical.len(), horizontal.len()),
            PatternMode::AcyclicExtended => (
                vertical.len() + vertical.order() - 1,
                horizontal.len() + horizontal.order() - 1,
            ),
        };
        if rows != expected_rows || cols != expected_cols || cells.len() != rows * cols {
            return Err(Error::Dimension {
                expected_rows,
                expected_cols,
                rows,
                cols: cells.len().checked_div(rows).unwrap_or(0),
            });
        }
        Ok(Self {
            rows,
            cols,
            grid: cells,
            vertical,
            horizontal,
            mode,
        })
    }

    pub fn mode(&self) -> PatternMode {
        self.mode
    }

    pub fn vertical(&self) -> &BitSequence {
        &self.vertical
    }

    pub fn horizontal(&self) -> &BitSequence {
        &self.horizontal
    }

    /// Vertical window length.
    pub fn k(&self) -> usize {
        self.vertical.order()
    }

    /// Horizontal window length.
    pub fn n(&self) -> usize {
        self.horizontal.order()
    }

    pub fn cells(&self) -> &BitSlice<u64, Lsb0> {
        &self.grid
    }

    pub fn row_bits(&self, row: usize) -> &BitSlice<u64, Lsb0> {
        &self.grid[row * self.cols..(row + 1) * self.cols]
    }

    pub fn flip(&mut self, row: usize, col: usize) {
        let idx = row * self.cols + col;
        let v = self.grid[idx];
        self.grid.set(idx, !v);
    }

    /// Appends the first `k - 1` rows and `n - 1` columns so every toroidal
    /// window appears without wrapping.
    pub fn extend_acyclic(&self) -> Result<PatternArray> {
        if self.mode == PatternMode::AcyclicExtended {
            return Err(Error::AlreadyAcyclic);
        }
        let rows = self.rows + self.k() - 1;
        let cols = self.cols + self.n() - 1;
        let mut grid = BitVec::with_capacity(rows * cols);
        for r in 0..rows {
            grid.extend((0..cols).map(|c| self.cell(r, c)));
        }
        Ok(PatternArray {
            rows,
            cols,
            grid,
            vertical: self.vertical.clone(),
            horizontal: self.horizontal.clone(),
            mode: PatternMode::AcyclicExtended,
        })
    }

    /// One `'0'`/`'1'` string per row.
    pub fn render(&self) -> Vec<String> {
        (0..self.rows)
            .map(|r| {
                self.row_bits(r)
                    .iter()
                    .map(|b| if *b { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }

    /// Census of all `k x n` windows.
    ///
    /// Every window of a genuine product array has the form `X ⊗ Y`; such
    /// windows are keyed by their first column and first row. Windows of any
    /// other form cannot come from the construction and are listed as
    /// malformed. The census passes when all `2^(k-1+n)` product windows are
    /// present exactly once.
    pub fn verify_rect_uniqueness(&self, k: usize, n: usize) -> UniquenessReport {
        let (pr, pc) = self.sample_positions(k, n);
        let expected = 1usize << (k - 1 + n);
        let mut report = UniquenessReport::new(pr * pc, expected);
        let mut seen: HashMap<u128, (usize, usize)> = HashMap::with_capacity(pr * pc);
        for r in 0..pr {
            for c in 0..pc {
                let w = self.window(r, c, k, n).expect("position in range").bits;
                if !w.is_product_form() {
                    report.malformed.push((r, c));
                    continue;
                }
                let key = ((w.column(0) as u128) << n) | w.row(0) as u128;
                report.record(&mut seen, key, (r, c));
            }
        }
        report.distinct = seen.len();
        report
    }

    /// Census of all cross readouts for one cross geometry. Passes when all
    /// `2^(k+n-1)` consistent cross values occur exactly once.
    pub fn verify_cross_uniqueness(&self, geometry: CrossGeometry) -> UniquenessReport {
        let CrossGeometry { k, n, .. } = geometry;
        let (pr, pc) = self.sample_positions(k, n);
        let expected = 1usize << (k + n - 1);
        let mut report = UniquenessReport::new(pr * pc, expected);
        let mut seen: HashMap<u128, (usize, usize)> = HashMap::with_capacity(pr * pc);
        for r in 0..pr {
            for c in 0..pc {
                let x = self
                    .cross(r, c, geometry)
                    .expect("grid crosses are consistent");
                let key = ((x.vertical as u128) << n) | x.horizontal as u128;
                report.record(&mut seen, key, (r, c));
            }
        }
        report.distinct = seen.len();
        report
    }
}

impl Grid for PatternArray {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn is_cyclic(&self) -> bool {
        self.mode == PatternMode::Cyclic
    }

    fn cell(&self, row: usize, col: usize) -> bool {
        let (r, c) = match self.mode {
            PatternMode::Cyclic => (row % self.rows, col % self.cols),
            PatternMode::AcyclicExtended => (row, col),
        };
        self.grid[r * self.cols + c]
    }
}

/// The product `T ⊗ S` computed on demand, for patterns too large to store.
#[derive(Debug, Clone, Copy)]
pub struct ProductView<'a> {
    vertical: &'a BitSequence,
    horizontal: &'a BitSequence,
}

impl<'a> ProductView<'a> {
    pub fn new(vertical: &'a BitSequence, horizontal: &'a BitSequence) -> Self {
        Self {
            vertical,
            horizontal,
        }
    }
}

impl Grid for ProductView<'_> {
    fn rows(&self) -> usize {
        self.vertical.len()
    }

    fn cols(&self) -> usize {
        self.horizontal.len()
    }

    fn is_cyclic(&self) -> bool {
        true
    }

    fn cell(&self, row: usize, col: usize) -> bool {
        self.vertical.bit(row) ^ self.horizontal.bit(col)
    }

    fn window(&self, row: usize, col: usize, k: usize, n: usize) -> Result<RectSample> {
        check_footprint(self, "window", row, col, k, n)?;
        let x = self.vertical.window_of_width(row, k);
        let y = self.horizontal.window_of_width(col, n);
        Ok(RectSample {
            bits: BitMatrix::outer(x, k, y, n),
            origin: Some((row, col)),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Duplicate {
    pub first: (usize, usize),
    pub second: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniquenessReport {
    /// Sample positions examined.
    pub positions: usize,
    /// Distinct well-formed values found.
    pub distinct: usize,
    /// Number of possible values, each of which must appear once.
    pub expected: usize,
    pub duplicates: Vec<Duplicate>,
    /// Positions whose window is not of the form `X ⊗ Y`.
    pub malformed: Vec<(usize, usize)>,
}

impl UniquenessReport {
    fn new(positions: usize, expected: usize) -> Self {
        Self {
            positions,
            distinct: 0,
            expected,
            duplicates: Vec::new(),
            malformed: Vec::new(),
        }
    }

    fn record(&mut self, seen: &mut HashMap<u128, (usize, usize)>, key: u128, at: (usize, usize)) {
        if let Some(&first) = seen.get(&key) {
            self.duplicates.push(Duplicate { first, second: at });
        } else {
            seen.insert(key, at);
        }
    }

    /// Values that should occur but were not found.
    pub fn missing(&self) -> usize {
        self.expected.saturating_sub(self.distinct)
    }

    pub fn passed(&self) -> bool {
        self.duplicates.is_empty()
            && self.malformed.is_empty()
            && self.distinct == self.expected
            && self.positions == self.expected
    }
}

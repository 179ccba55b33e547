//! Text file formats.
//!
//! * Sequences: one line of `0`/`1` characters, with a JSON sidecar
//!   `{kind, order, length, provenance}` stored next to it as `<file>.json`.
//! * Patterns: a plain PBM (`P1`) image, one grid row per line, with a JSON
//!   sidecar `{k, n, mode, vertical_sequence, horizontal_sequence}`. The
//!   sidecar is authoritative for the sequences; the image for the cells.
//! * Samples: `{kind: "rect" | "cross", bits, k, n, i0, j0}`. A rect sample
//!   lists its `k` rows in `bits`; a cross lists its vertical then its
//!   horizontal arm.
//! * Decode reports: `{status, row, col, X, Y, corrected, error_counts}`.

use std::fs;
use std::path::{Path, PathBuf};

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decode::{DecodeReport, DecodeStatus, Location};
use crate::error::{Error, Result};
use crate::pattern::{
    BitMatrix, CrossGeometry, CrossSample, Grid, PatternArray, PatternMode, RectSample,
};
use crate::sequences::{
    format_word, parse_bits, parse_word, BitSequence, Provenance, SequenceKind,
};

/// `<path>.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSidecar {
    pub kind: SequenceKind,
    pub order: usize,
    pub length: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl SequenceSidecar {
    pub fn describe(seq: &BitSequence) -> Self {
        Self {
            kind: seq.kind(),
            order: seq.order(),
            length: seq.len(),
            provenance: seq.provenance().cloned(),
        }
    }

    /// Rebuilds the sequence, re-running the census for its declared kind.
    pub fn attach(&self, bits: Vec<bool>) -> Result<BitSequence> {
        if bits.len() != self.length {
            return Err(Error::Parse(format!(
                "sidecar declares length {}, file holds {} bits",
                self.length,
                bits.len()
            )));
        }
        let seq = BitSequence::with_kind(bits, self.order, self.kind)?;
        Ok(match &self.provenance {
            Some(p) => seq.with_provenance(p.clone()),
            None => seq,
        })
    }
}

pub fn write_sequence(path: &Path, seq: &BitSequence) -> Result<()> {
    fs::write(path, format!("{}\n", seq.to_bit_string()))?;
    let sidecar = serde_json::to_string_pretty(&SequenceSidecar::describe(seq))?;
    fs::write(sidecar_path(path), sidecar + "\n")?;
    Ok(())
}

/// Reads a sequence file. Without a sidecar the kind and order are inferred
/// from the bits.
pub fn read_sequence(path: &Path) -> Result<BitSequence> {
    let bits = parse_bits(fs::read_to_string(path)?.trim())?;
    let sidecar = sidecar_path(path);
    if sidecar.exists() {
        let meta: SequenceSidecar = serde_json::from_str(&fs::read_to_string(sidecar)?)?;
        meta.attach(bits)
    } else {
        BitSequence::classify(bits)
    }
}

/// Plain PBM, `1` = black, one grid row per line.
pub fn to_pbm<G: Grid>(grid: &G) -> String {
    let mut out = format!("P1\n{} {}\n", grid.cols(), grid.rows());
    for r in 0..grid.rows() {
        let row: Vec<&str> = (0..grid.cols())
            .map(|c| if grid.cell(r, c) { "1" } else { "0" })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a plain PBM into `(rows, cols, cells)` with cells row-major.
pub fn parse_pbm(text: &str) -> Result<(usize, usize, BitVec<u64, Lsb0>)> {
    let cleaned: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let mut tokens = cleaned.split_whitespace();
    if tokens.next() != Some("P1") {
        return Err(Error::Parse("not a plain PBM (missing P1 magic)".into()));
    }
    let mut dim = |name: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| Error::Parse(format!("missing PBM {name}")))?
            .parse()
            .map_err(|_| Error::Parse(format!("bad PBM {name}")))
    };
    let cols = dim("width")?;
    let rows = dim("height")?;
    let mut cells = BitVec::with_capacity(rows * cols);
    for token in tokens {
        for ch in token.chars() {
            match ch {
                '0' => cells.push(false),
                '1' => cells.push(true),
                other => return Err(Error::Parse(format!("unexpected PBM character {other:?}"))),
            }
        }
    }
    if cells.len() != rows * cols {
        return Err(Error::Parse(format!(
            "PBM declares {cols}x{rows} = {} pixels, found {}",
            rows * cols,
            cells.len()
        )));
    }
    Ok((rows, cols, cells))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternSidecar {
    pub k: usize,
    pub n: usize,
    pub mode: PatternMode,
    pub vertical_sequence: String,
    pub horizontal_sequence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertical_provenance: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizontal_provenance: Option<Provenance>,
}

impl PatternSidecar {
    pub fn describe(pattern: &PatternArray) -> Self {
        Self {
            k: pattern.k(),
            n: pattern.n(),
            mode: pattern.mode(),
            vertical_sequence: pattern.vertical().to_bit_string(),
            horizontal_sequence: pattern.horizontal().to_bit_string(),
            vertical_provenance: pattern.vertical().provenance().cloned(),
            horizontal_provenance: pattern.horizontal().provenance().cloned(),
        }
    }

    /// The vertical (`T`, order `k`) and horizontal (`S`, order `n`)
    /// sequences. Each gets the strongest kind its census supports, so a
    /// damaged sidecar still loads and fails later checks instead.
    pub fn sequences(&self) -> Result<(BitSequence, BitSequence)> {
        let load = |text: &str, order: usize, kind: SequenceKind, prov: &Option<Provenance>| {
            let raw = BitSequence::raw(parse_bits(text)?, order)?;
            let seq = raw.clone().into_kind(kind).unwrap_or(raw);
            Ok::<_, Error>(match prov {
                Some(p) => seq.with_provenance(p.clone()),
                None => seq,
            })
        };
        Ok((
            load(
                &self.vertical_sequence,
                self.k,
                SequenceKind::HalfDeBruijn,
                &self.vertical_provenance,
            )?,
            load(
                &self.horizontal_sequence,
                self.n,
                SequenceKind::DeBruijn,
                &self.horizontal_provenance,
            )?,
        ))
    }
}

pub fn read_pattern_sidecar(path: &Path) -> Result<PatternSidecar> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Writes `path` as PBM and `<path>.json` as its sidecar.
pub fn write_pattern(path: &Path, pattern: &PatternArray) -> Result<()> {
    fs::write(path, to_pbm(pattern))?;
    let sidecar = serde_json::to_string_pretty(&PatternSidecar::describe(pattern))?;
    fs::write(sidecar_path(path), sidecar + "\n")?;
    Ok(())
}

/// Reads a PBM and its sidecar into a pattern whose cells come from the image.
pub fn read_pattern(path: &Path) -> Result<PatternArray> {
    let (rows, cols, cells) = parse_pbm(&fs::read_to_string(path)?)?;
    let sidecar = read_pattern_sidecar(&sidecar_path(path))?;
    let (t, s) = sidecar.sequences()?;
    PatternArray::from_grid(rows, cols, cells, t, s, sidecar.mode)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sample {
    Rect(RectSample),
    Cross(CrossSample),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    Rect,
    Cross,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleFile {
    pub kind: SampleKind,
    pub bits: Vec<String>,
    pub k: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i0: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j0: Option<usize>,
}

impl SampleFile {
    pub fn from_sample(sample: &Sample) -> Self {
        match sample {
            Sample::Rect(r) => Self {
                kind: SampleKind::Rect,
                bits: r.bits.to_strings(),
                k: r.k(),
                n: r.n(),
                i0: None,
                j0: None,
            },
            Sample::Cross(x) => {
                let g = x.geometry;
                Self {
                    kind: SampleKind::Cross,
                    bits: vec![format_word(x.vertical, g.k), format_word(x.horizontal, g.n)],
                    k: g.k,
                    n: g.n,
                    i0: Some(g.i0),
                    j0: Some(g.j0),
                }
            }
        }
    }

    /// Converts to a sample. Cross arms are accepted even if their shared
    /// pixel copies disagree; the decoder reports that.
    pub fn to_sample(&self) -> Result<Sample> {
        match self.kind {
            SampleKind::Rect => {
                let bits = BitMatrix::from_strings(&self.bits)?;
                if bits.height() != self.k || bits.width() != self.n {
                    return Err(Error::Dimension {
                        expected_rows: self.k,
                        expected_cols: self.n,
                        rows: bits.height(),
                        cols: bits.width(),
                    });
                }
                Ok(Sample::Rect(RectSample::new(bits)))
            }
            SampleKind::Cross => {
                let [v, h] = self.bits.as_slice() else {
                    return Err(Error::Parse(
                        "cross sample needs exactly two bit strings: vertical, horizontal".into(),
                    ));
                };
                let (v, vw) = parse_word(v)?;
                let (h, hw) = parse_word(h)?;
                if vw != self.k || hw != self.n {
                    return Err(Error::Dimension {
                        expected_rows: self.k,
                        expected_cols: self.n,
                        rows: vw,
                        cols: hw,
                    });
                }
                let geometry = match (self.i0, self.j0) {
                    (Some(i0), Some(j0)) => CrossGeometry::new(self.k, self.n, i0, j0)?,
                    (None, None) => CrossGeometry::centered(self.k, self.n)?,
                    _ => return Err(Error::Parse("give both i0 and j0, or neither".into())),
                };
                Ok(Sample::Cross(CrossSample::new_unchecked(v, h, geometry)?))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorCounts {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub row: Option<usize>,
    pub col: Option<usize>,
    #[serde(rename = "X")]
    pub x: String,
    #[serde(rename = "Y")]
    pub y: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrected: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_counts: Option<ErrorCounts>,
}

fn status_name(status: DecodeStatus) -> String {
    serde_json::to_value(status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

impl ReportFile {
    pub fn is_ok(&self) -> bool {
        self.status == status_name(DecodeStatus::Ok)
    }

    pub fn from_rect(report: &DecodeReport) -> Self {
        Self {
            status: status_name(report.status),
            reason: report.reason.clone(),
            row: report.location.map(|l| l.row),
            col: report.location.map(|l| l.col),
            x: format_word(report.vertical, report.k()),
            y: format_word(report.horizontal, report.n()),
            corrected: Some(report.corrected.to_strings()),
            error_counts: Some(ErrorCounts {
                rows: report.row_error_counts.clone(),
                cols: report.col_error_counts.clone(),
            }),
        }
    }

    pub fn from_cross(sample: &CrossSample, outcome: &Result<Location>) -> Self {
        let g = sample.geometry;
        let (status, reason, location) = match outcome {
            Ok(loc) => (DecodeStatus::Ok, None, Some(*loc)),
            Err(e) => (DecodeStatus::Inconsistent, Some(e.to_string()), None),
        };
        Self {
            status: status_name(status),
            reason,
            row: location.map(|l| l.row),
            col: location.map(|l| l.col),
            x: format_word(sample.vertical, g.k),
            y: format_word(sample.horizontal, g.n),
            corrected: None,
            error_counts: None,
        }
    }
}

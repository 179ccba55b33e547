//! Cyclic binary sequences with window properties.
//!
//! A [`BitSequence`] is a cyclic list of bits together with a window length
//! (its *order*) and a declared [`SequenceKind`]. The checked constructors only
//! hand out a kind other than [`SequenceKind::Raw`] once an exhaustive window
//! census has confirmed it, so downstream code can rely on the kind.
//!
//! Windows are read left to right and packed most-significant-bit first:
//! `window_at(p)` of `0111` is `0b0111`. Positions are 0-based.

mod census;
mod construct;
mod lfsr;
mod locate;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use census::{
    check_de_bruijn, check_half_de_bruijn, check_m_sequence, complement_pair_census, is_de_bruijn,
    is_half_de_bruijn, is_m_sequence, CensusReport, CensusViolation,
};
pub use construct::{d_map, de_bruijn_from_m, half_de_bruijn_from_m, inverse_d_morphism};
pub use lfsr::{default_taps, lfsr_m_sequence, LfsrSpec, DEFAULT_TAPS};
pub use locate::{default_spacing, Generator, Located, Locator, Strategy};

/// Largest window length a sequence may declare; windows are packed into a `u64`.
pub const MAX_WINDOW: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    MSequence,
    DeBruijn,
    HalfDeBruijn,
    Raw,
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SequenceKind::MSequence => "M-sequence",
            SequenceKind::DeBruijn => "de Bruijn",
            SequenceKind::HalfDeBruijn => "half de Bruijn",
            SequenceKind::Raw => "raw",
        })
    }
}

/// How a sequence was built. Needed to rebuild its successor rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum Provenance {
    /// Plain maximal-length LFSR output.
    Lfsr { lfsr: LfsrSpec },
    /// LFSR output with one zero added to its longest zero run.
    ZeroRunExtension { lfsr: LfsrSpec },
    /// LFSR output with one one added to its longest one run.
    OneRunExtension { lfsr: LfsrSpec },
    /// Running XOR of `source`, starting from `initial_bit`.
    InverseD {
        source: Box<Provenance>,
        initial_bit: bool,
    },
    /// Bitwise complement of a sequence built by `source`.
    Complement { source: Box<Provenance> },
    /// Anything else: loaded from a file, or typed in.
    External { name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSequence {
    bits: Vec<bool>,
    order: usize,
    kind: SequenceKind,
    provenance: Option<Provenance>,
}

impl BitSequence {
    /// A sequence with no claimed window property.
    pub fn raw(bits: Vec<bool>, order: usize) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Parse("empty sequence".into()));
        }
        if order == 0 || order > MAX_WINDOW {
            return Err(Error::UnsupportedOrder {
                order,
                min: 1,
                max: MAX_WINDOW,
            });
        }
        Ok(Self {
            bits,
            order,
            kind: SequenceKind::Raw,
            provenance: None,
        })
    }

    /// Builds a sequence of the given kind, rejecting it unless the census agrees.
    pub fn with_kind(bits: Vec<bool>, order: usize, kind: SequenceKind) -> Result<Self> {
        let seq = Self::raw(bits, order)?;
        seq.into_kind(kind)
    }

    /// Parses a string of `'0'`/`'1'` characters and checks it against `kind`.
    pub fn parse(text: &str, order: usize, kind: SequenceKind) -> Result<Self> {
        Self::with_kind(parse_bits(text)?, order, kind)
    }

    /// Detects the strongest kind the bits satisfy for some order.
    ///
    /// The order is inferred from the length: `2^n - 1` suggests an
    /// M-sequence of order `n`, `2^n` a de Bruijn sequence of order `n` or a
    /// half de Bruijn sequence of order `n + 1`.
    pub fn classify(bits: Vec<bool>) -> Result<Self> {
        let len = bits.len();
        if len >= 3 && (len + 1).is_power_of_two() {
            let order = (len + 1).trailing_zeros() as usize;
            if is_m_sequence(&bits, order) {
                return Self::with_kind(bits, order, SequenceKind::MSequence);
            }
        }
        if len >= 2 && len.is_power_of_two() {
            let n = len.trailing_zeros() as usize;
            if is_de_bruijn(&bits, n) {
                return Self::with_kind(bits, n, SequenceKind::DeBruijn);
            }
            if is_half_de_bruijn(&bits, n + 1) {
                return Self::with_kind(bits, n + 1, SequenceKind::HalfDeBruijn);
            }
        }
        let order = usize::BITS as usize - len.leading_zeros() as usize;
        Self::raw(bits, order.clamp(1, MAX_WINDOW))
    }

    pub(crate) fn from_parts(
        bits: Vec<bool>,
        order: usize,
        kind: SequenceKind,
        provenance: Option<Provenance>,
    ) -> Self {
        debug_assert!(census::check(&bits, order, kind).is_ok());
        Self {
            bits,
            order,
            kind,
            provenance,
        }
    }

    pub fn into_kind(mut self, kind: SequenceKind) -> Result<Self> {
        let report = census::check(&self.bits, self.order, kind);
        if let Some(violation) = report.violation {
            return Err(Error::CensusFailed {
                kind,
                order: self.order,
                detail: violation.to_string(),
            });
        }
        self.kind = kind;
        Ok(self)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Bit at a cyclic position.
    pub fn bit(&self, position: usize) -> bool {
        self.bits[position % self.bits.len()]
    }

    /// The `order`-bit window starting at `position`, read cyclically.
    pub fn window_at(&self, position: usize) -> u64 {
        self.window_of_width(position, self.order)
    }

    pub fn window_of_width(&self, position: usize, width: usize) -> u64 {
        (0..width).fold(0u64, |acc, j| (acc << 1) | self.bit(position + j) as u64)
    }

    /// Every cyclic window, in position order.
    pub fn windows(&self) -> Windows<'_> {
        Windows::new(&self.bits, self.order)
    }

    /// Bitwise complement. The kind is preserved: complementing a half de
    /// Bruijn or de Bruijn sequence keeps its window property. An
    /// M-sequence complement is no longer an M-sequence and becomes raw.
    pub fn complement(&self) -> Self {
        let kind = match self.kind {
            SequenceKind::MSequence => SequenceKind::Raw,
            other => other,
        };
        Self {
            bits: self.bits.iter().map(|b| !b).collect(),
            order: self.order,
            kind,
            provenance: self.provenance.clone().map(|p| match p {
                Provenance::Complement { source } => *source,
                other => Provenance::Complement {
                    source: Box::new(other),
                },
            }),
        }
    }

    pub fn to_bit_string(&self) -> String {
        format_bits(&self.bits)
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Rolling iterator over the cyclic windows of a bit slice.
pub struct Windows<'a> {
    bits: &'a [bool],
    width: usize,
    mask: u64,
    position: usize,
    current: u64,
}

impl<'a> Windows<'a> {
    pub fn new(bits: &'a [bool], width: usize) -> Self {
        let current = (0..width).fold(0u64, |acc, j| (acc << 1) | bits[j % bits.len()] as u64);
        Self {
            bits,
            width,
            mask: low_mask(width),
            position: 0,
            current,
        }
    }
}

impl Iterator for Windows<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.position >= self.bits.len() {
            return None;
        }
        let out = self.current;
        let incoming = self.bits[(self.position + self.width) % self.bits.len()];
        self.current = ((self.current << 1) | incoming as u64) & self.mask;
        self.position += 1;
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.bits.len() - self.position;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Windows<'_> {}

/// Mask with the low `width` bits set.
pub fn low_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

pub fn parse_bits(text: &str) -> Result<Vec<bool>> {
    text.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!(
                "unexpected character {other:?} in bit string"
            ))),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parses a bit string into a packed MSB-first word, returning it with its width.
pub fn parse_word(text: &str) -> Result<(u64, usize)> {
    let bits = parse_bits(text)?;
    if bits.is_empty() || bits.len() > 64 {
        return Err(Error::Parse(format!(
            "bit string must hold 1..=64 bits, got {}",
            bits.len()
        )));
    }
    Ok((pack(&bits), bits.len()))
}

pub fn pack(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

pub fn format_word(word: u64, width: usize) -> String {
    (0..width)
        .map(|j| {
            if (word >> (width - 1 - j)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

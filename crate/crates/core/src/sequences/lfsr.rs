//! Maximal-length LFSR sequences.
//!
//! The register state is the current `order`-bit window of the output,
//! most-significant bit first. A feedback polynomial
//! `x^n + x^(e_1) + ... + 1` gives the recurrence
//! `a[i+n] = a[i] ^ a[i+e_1] ^ ...`, i.e. the polynomial is the
//! characteristic polynomial of the output sequence. Taps list the
//! polynomial's exponents other than the constant term, so `x^4 + x + 1`
//! is `[4, 1]`.

use serde::{Deserialize, Serialize};

use super::{low_mask, BitSequence, Provenance, SequenceKind};
use crate::error::{Error, Result};

/// Largest order we are willing to generate (the sequence is materialized).
pub const MAX_LFSR_ORDER: usize = 32;

/// Primitive polynomials for orders 2 through 24, as tap lists.
pub const DEFAULT_TAPS: [&[usize]; 23] = [
    &[2, 1],
    &[3, 2],
    &[4, 3],
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 6, 4, 1],
    &[13, 4, 3, 1],
    &[14, 5, 3, 1],
    &[15, 14],
    &[16, 15, 13, 4],
    &[17, 14],
    &[18, 11],
    &[19, 6, 2, 1],
    &[20, 17],
    &[21, 19],
    &[22, 21],
    &[23, 18],
    &[24, 23, 22, 17],
];

pub fn default_taps(order: usize) -> Result<&'static [usize]> {
    if !(2..=24).contains(&order) {
        return Err(Error::UnsupportedOrder {
            order,
            min: 2,
            max: 24,
        });
    }
    Ok(DEFAULT_TAPS[order - 2])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawLfsrSpec", into = "RawLfsrSpec")]
pub struct LfsrSpec {
    order: usize,
    taps: Vec<usize>,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
struct RawLfsrSpec {
    order: usize,
    taps: Vec<usize>,
    seed: String,
}

impl TryFrom<RawLfsrSpec> for LfsrSpec {
    type Error = Error;

    fn try_from(raw: RawLfsrSpec) -> Result<Self> {
        let (seed, width) = super::parse_word(&raw.seed)?;
        if width != raw.order {
            return Err(Error::WidthMismatch {
                expected: raw.order,
                found: width,
            });
        }
        LfsrSpec::new(raw.order, raw.taps, seed)
    }
}

impl From<LfsrSpec> for RawLfsrSpec {
    fn from(spec: LfsrSpec) -> Self {
        RawLfsrSpec {
            seed: super::format_word(spec.seed, spec.order),
            order: spec.order,
            taps: spec.taps,
        }
    }
}

impl LfsrSpec {
    /// Validates the shape of the polynomial and the seed. Primitivity is
    /// only known once the register has been run, see [`LfsrSpec::period`].
    pub fn new(order: usize, mut taps: Vec<usize>, seed: u64) -> Result<Self> {
        if !(2..=MAX_LFSR_ORDER).contains(&order) {
            return Err(Error::UnsupportedOrder {
                order,
                min: 2,
                max: MAX_LFSR_ORDER,
            });
        }
        taps.sort_unstable_by(|a, b| b.cmp(a));
        taps.dedup();
        if taps.first() != Some(&order) {
            return Err(Error::InvalidTaps {
                order,
                taps,
                reason: "the largest tap must equal the order",
            });
        }
        if taps.contains(&0) {
            return Err(Error::InvalidTaps {
                order,
                taps,
                reason: "the constant term is implicit; taps must be positive",
            });
        }
        let seed_mask = low_mask(order);
        if seed & !seed_mask != 0 {
            return Err(Error::WidthMismatch {
                expected: order,
                found: 64 - seed.leading_zeros() as usize,
            });
        }
        if seed == 0 {
            return Err(Error::ZeroSeed { order });
        }
        Ok(Self { order, taps, seed })
    }

    /// The built-in primitive polynomial for `order`, seeded with all ones.
    pub fn default_for(order: usize) -> Result<Self> {
        Self::new(order, default_taps(order)?.to_vec(), low_mask(order))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn taps(&self) -> &[usize] {
        &self.taps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Window bits that feed back: `a[i]` plus `a[i+e]` for every tap `e < order`.
    pub(crate) fn feedback_mask(&self) -> u64 {
        let n = self.order;
        self.taps
            .iter()
            .filter(|&&e| e < n)
            .fold(1u64 << (n - 1), |mask, &e| mask | 1u64 << (n - 1 - e))
    }

    /// Runs the register from the seed until the state repeats.
    pub fn period(&self) -> u64 {
        let stepper = Stepper::new(self.order, self.feedback_mask());
        let max = (1u64 << self.order) - 1;
        let mut state = stepper.next(self.seed);
        let mut period = 1;
        while state != self.seed && period < max {
            state = stepper.next(state);
            period += 1;
        }
        period
    }
}

/// One clock of the register, shared with the successor rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Stepper {
    order: usize,
    mask: u64,
    taps_mask: u64,
}

impl Stepper {
    pub(crate) fn new(order: usize, taps_mask: u64) -> Self {
        Self {
            order,
            mask: low_mask(order),
            taps_mask,
        }
    }

    pub(crate) fn from_spec(spec: &LfsrSpec) -> Self {
        Self::new(spec.order, spec.feedback_mask())
    }

    pub(crate) fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub(crate) fn feedback(&self, state: u64) -> u64 {
        ((state & self.taps_mask).count_ones() & 1) as u64
    }

    #[inline]
    pub(crate) fn next(&self, state: u64) -> u64 {
        ((state << 1) | self.feedback(state)) & self.mask
    }
}

/// Generates one period of the M-sequence described by `spec`.
///
/// Fails with [`Error::NotPrimitive`] when the register cycles early.
pub fn lfsr_m_sequence(spec: &LfsrSpec) -> Result<BitSequence> {
    let n = spec.order;
    let expected = (1u64 << n) - 1;
    let period = spec.period();
    if period != expected {
        return Err(Error::NotPrimitive { period, expected });
    }
    let stepper = Stepper::from_spec(spec);
    let mut bits = Vec::with_capacity(expected as usize);
    let mut state = spec.seed;
    for _ in 0..expected {
        bits.push((state >> (n - 1)) & 1 == 1);
        state = stepper.next(state);
    }
    Ok(BitSequence::from_parts(
        bits,
        n,
        SequenceKind::MSequence,
        Some(Provenance::Lfsr { lfsr: spec.clone() }),
    ))
}

//! Exhaustive cyclic window censuses.

use std::collections::HashMap;
use std::fmt;

use super::{format_word, low_mask, SequenceKind, Windows};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CensusViolation {
    Length {
        expected: usize,
        found: usize,
    },
    /// A window that must occur at most once occurs again.
    Duplicate {
        window: u64,
        width: usize,
    },
    /// A window that must occur is absent.
    Missing {
        window: u64,
        width: usize,
    },
    /// A window that must never occur was found.
    Forbidden {
        window: u64,
        width: usize,
    },
    /// Both a window and its complement occur.
    BothOfPair {
        window: u64,
        width: usize,
    },
}

impl fmt::Display for CensusViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CensusViolation::Length { expected, found } => {
                write!(f, "length {found}, expected {expected}")
            }
            CensusViolation::Duplicate { window, width } => {
                write!(
                    f,
                    "window {} occurs more than once",
                    format_word(window, width)
                )
            }
            CensusViolation::Missing { window, width } => {
                write!(f, "window {} is missing", format_word(window, width))
            }
            CensusViolation::Forbidden { window, width } => {
                write!(f, "window {} must not occur", format_word(window, width))
            }
            CensusViolation::BothOfPair { window, width } => write!(
                f,
                "window {} and its complement both occur",
                format_word(window, width)
            ),
        }
    }
}

/// Outcome of a census. `violation` is the first problem found, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub violation: Option<CensusViolation>,
}

impl CensusReport {
    fn ok() -> Self {
        Self { violation: None }
    }

    fn fail(violation: CensusViolation) -> Self {
        Self {
            violation: Some(violation),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Per-window occurrence counts, saturating at 255.
enum Counts {
    Dense(Vec<u8>),
    Sparse(HashMap<u64, u8>),
}

impl Counts {
    fn tally(bits: &[bool], width: usize) -> Self {
        if width <= 26 {
            let mut counts = vec![0u8; 1usize << width];
            for w in Windows::new(bits, width) {
                let c = &mut counts[w as usize];
                *c = c.saturating_add(1);
            }
            Counts::Dense(counts)
        } else {
            let mut counts = HashMap::with_capacity(bits.len());
            for w in Windows::new(bits, width) {
                let c = counts.entry(w).or_insert(0u8);
                *c = c.saturating_add(1);
            }
            Counts::Sparse(counts)
        }
    }

    fn get(&self, window: u64) -> u8 {
        match self {
            Counts::Dense(v) => v[window as usize],
            Counts::Sparse(m) => m.get(&window).copied().unwrap_or(0),
        }
    }

    /// First window (in position order) seen more than once.
    fn first_duplicate(&self, bits: &[bool], width: usize) -> Option<u64> {
        Windows::new(bits, width).find(|&w| self.get(w) > 1)
    }
}

fn expect_len(bits: &[bool], expected: Option<usize>) -> Option<CensusViolation> {
    match expected {
        Some(expected) if bits.len() == expected => None,
        Some(expected) => Some(CensusViolation::Length {
            expected,
            found: bits.len(),
        }),
        None => Some(CensusViolation::Length {
            expected: 0,
            found: bits.len(),
        }),
    }
}

fn pow2(exp: usize) -> Option<usize> {
    1usize.checked_shl(exp as u32)
}

/// Every `order`-tuple exactly once in a cyclic sequence of length `2^order`.
pub fn check_de_bruijn(bits: &[bool], order: usize) -> CensusReport {
    if order == 0 || order > 40 {
        return CensusReport::fail(CensusViolation::Length {
            expected: 0,
            found: bits.len(),
        });
    }
    if let Some(v) = expect_len(bits, pow2(order)) {
        return CensusReport::fail(v);
    }
    let counts = Counts::tally(bits, order);
    if let Some(w) = counts.first_duplicate(bits, order) {
        return CensusReport::fail(CensusViolation::Duplicate {
            window: w,
            width: order,
        });
    }
    // length 2^order with no duplicate means every window is present
    CensusReport::ok()
}

/// Every nonzero `order`-tuple exactly once in a cyclic sequence of length `2^order - 1`.
pub fn check_m_sequence(bits: &[bool], order: usize) -> CensusReport {
    if order == 0 || order > 40 {
        return CensusReport::fail(CensusViolation::Length {
            expected: 0,
            found: bits.len(),
        });
    }
    if let Some(v) = expect_len(bits, pow2(order).map(|n| n - 1)) {
        return CensusReport::fail(v);
    }
    let counts = Counts::tally(bits, order);
    if counts.get(0) > 0 {
        return CensusReport::fail(CensusViolation::Forbidden {
            window: 0,
            width: order,
        });
    }
    if let Some(w) = counts.first_duplicate(bits, order) {
        return CensusReport::fail(CensusViolation::Duplicate {
            window: w,
            width: order,
        });
    }
    CensusReport::ok()
}

/// For every `order`-tuple `X`, exactly one of `X` and its complement occurs,
/// exactly once, in a cyclic sequence of length `2^(order-1)`.
pub fn check_half_de_bruijn(bits: &[bool], order: usize) -> CensusReport {
    if !(2..=41).contains(&order) {
        return CensusReport::fail(CensusViolation::Length {
            expected: 0,
            found: bits.len(),
        });
    }
    if let Some(v) = expect_len(bits, pow2(order - 1)) {
        return CensusReport::fail(v);
    }
    complement_pair_census(bits, order, false)
}

/// Checks that each complement pair `{X, !X}` of `width`-tuples is
/// represented by exactly one occurrence of exactly one member.
///
/// With `exclude_constant_pair`, the all-zero/all-one pair must instead be
/// absent entirely. That is the shape of the census on the `(m+1)`-windows of
/// an order-`m` M-sequence.
pub fn complement_pair_census(
    bits: &[bool],
    width: usize,
    exclude_constant_pair: bool,
) -> CensusReport {
    let mask = low_mask(width);
    let counts = Counts::tally(bits, width);
    for w in Windows::new(bits, width) {
        let c = counts.get(w);
        if c > 1 {
            return CensusReport::fail(CensusViolation::Duplicate { window: w, width });
        }
        let is_constant = w == 0 || w == mask;
        if exclude_constant_pair && is_constant {
            return CensusReport::fail(CensusViolation::Forbidden { window: w, width });
        }
        if counts.get(!w & mask) > 0 {
            return CensusReport::fail(CensusViolation::BothOfPair { window: w, width });
        }
    }
    // Occurrences are distinct, one per pair, so coverage reduces to a count.
    let pairs = pow2(width - 1).unwrap_or(usize::MAX);
    let needed = if exclude_constant_pair {
        pairs - 1
    } else {
        pairs
    };
    if bits.len() != needed {
        // Name the first uncovered pair by its zero-leading member.
        let missing = (0..pairs as u64)
            .filter(|&w| !(exclude_constant_pair && w == 0))
            .find(|&w| counts.get(w) == 0 && counts.get(!w & mask) == 0)
            .unwrap_or(0);
        return CensusReport::fail(CensusViolation::Missing {
            window: missing,
            width,
        });
    }
    CensusReport::ok()
}

pub fn is_de_bruijn(bits: &[bool], order: usize) -> bool {
    check_de_bruijn(bits, order).is_ok()
}

pub fn is_half_de_bruijn(bits: &[bool], order: usize) -> bool {
    check_half_de_bruijn(bits, order).is_ok()
}

pub fn is_m_sequence(bits: &[bool], order: usize) -> bool {
    check_m_sequence(bits, order).is_ok()
}

pub(crate) fn check(bits: &[bool], order: usize, kind: SequenceKind) -> CensusReport {
    match kind {
        SequenceKind::MSequence => check_m_sequence(bits, order),
        SequenceKind::DeBruijn => check_de_bruijn(bits, order),
        SequenceKind::HalfDeBruijn => check_half_de_bruijn(bits, order),
        SequenceKind::Raw => CensusReport::ok(),
    }
}

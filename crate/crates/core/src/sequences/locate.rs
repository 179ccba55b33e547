//! Window position queries.
//!
//! Three strategies trade memory for query time:
//!
//! * [`Strategy::Scan`] keeps nothing and walks the stored sequence.
//! * [`Strategy::Table`] keeps one entry per window.
//! * [`Strategy::Milestone`] keeps only the windows at positions
//!   `0, spacing, 2 * spacing, ...` and walks forward from the query with the
//!   sequence's successor rule until it reaches one of them. The position is
//!   the milestone's position minus the number of steps taken.

use std::collections::HashMap;

use super::lfsr::Stepper;
use super::{low_mask, BitSequence, Provenance, SequenceKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Scan,
    Table,
    Milestone { spacing: usize },
}

/// `2^ceil(order / 2)`.
pub fn default_spacing(order: usize) -> usize {
    1usize << order.div_ceil(2)
}

/// Answer to a window query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Located {
    /// 0-based cyclic start position of the stored window.
    pub position: usize,
    /// The stored window is the complement of the query. Only ever set for
    /// half de Bruijn sequences.
    pub complemented: bool,
    /// Successor iterations spent (milestone strategy only).
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Rule {
    MSequence(Stepper),
    /// M-sequence with its zero run lengthened.
    DeBruijn(Stepper),
    /// M-sequence of order `k - 1` with its one run lengthened, read with
    /// `k`-bit windows.
    HalfDeBruijn(Stepper),
    /// Running XOR of a de Bruijn sequence with the given rule.
    InverseD(Box<Generator>),
    Complement(Box<Generator>),
}

/// One-step-forward rule for the windows of a canonically built sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    order: usize,
    rule: Rule,
}

impl Generator {
    /// Rebuilds the successor rule from how `seq` was constructed.
    pub fn for_sequence(seq: &BitSequence) -> Result<Self> {
        let provenance = seq
            .provenance()
            .ok_or_else(|| Error::NoGenerator("sequence has no construction record".into()))?;
        Self::from_provenance(provenance, seq.order())
    }

    pub fn from_provenance(provenance: &Provenance, order: usize) -> Result<Self> {
        let rule = match provenance {
            Provenance::Lfsr { lfsr } if lfsr.order() == order => {
                Rule::MSequence(Stepper::from_spec(lfsr))
            }
            Provenance::ZeroRunExtension { lfsr } if lfsr.order() == order => {
                Rule::DeBruijn(Stepper::from_spec(lfsr))
            }
            Provenance::OneRunExtension { lfsr } if lfsr.order() + 1 == order => {
                Rule::HalfDeBruijn(Stepper::from_spec(lfsr))
            }
            Provenance::InverseD { source, .. } if order >= 2 => {
                Rule::InverseD(Box::new(Self::from_provenance(source, order - 1)?))
            }
            Provenance::Complement { source } => {
                Rule::Complement(Box::new(Self::from_provenance(source, order)?))
            }
            Provenance::External { name } => return Err(Error::NoGenerator(name.clone())),
            other => {
                return Err(Error::NoGenerator(format!(
                    "construction {other:?} does not produce order-{order} windows"
                )))
            }
        };
        Ok(Self { order, rule })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The window that follows `window` in the cyclic sequence.
    ///
    /// The all-zero window of an M-sequence is reported as absent. Other
    /// windows are assumed to belong to the sequence; [`Locator`] confirms
    /// any answer against the stored bits.
    pub fn successor(&self, window: u64) -> Result<u64> {
        let order = self.order;
        let mask = low_mask(order);
        if window & !mask != 0 {
            return Err(Error::WidthMismatch {
                expected: order,
                found: 64 - window.leading_zeros() as usize,
            });
        }
        let next = match &self.rule {
            Rule::MSequence(step) => {
                if window == 0 {
                    return Err(Error::NoSuchWindow {
                        window,
                        width: order,
                    });
                }
                step.next(window)
            }
            Rule::DeBruijn(step) => {
                if window == 0 {
                    1
                } else if window == 1 << (order - 1) {
                    0
                } else {
                    step.next(window)
                }
            }
            Rule::HalfDeBruijn(step) => {
                let tail_mask = low_mask(step.order());
                let tail = window & tail_mask;
                let bit = if tail == tail_mask {
                    // inside the lengthened run of ones
                    (window != mask) as u64
                } else {
                    step.feedback(tail)
                };
                ((window << 1) | bit) & mask
            }
            Rule::InverseD(companion) => {
                let diff = (window ^ (window >> 1)) & low_mask(order - 1);
                let s_next = companion.successor(diff)? & 1;
                ((window << 1) | ((window & 1) ^ s_next)) & mask
            }
            Rule::Complement(inner) => !inner.successor(!window & mask)? & mask,
        };
        Ok(next)
    }
}

#[derive(Debug, Clone)]
enum Index {
    Scan,
    Table(HashMap<u64, usize>),
    Milestone {
        spacing: usize,
        marks: HashMap<u64, usize>,
        generator: Generator,
    },
}

/// Position oracle bound to one sequence.
#[derive(Debug, Clone)]
pub struct Locator {
    sequence: BitSequence,
    index: Index,
}

impl Locator {
    pub fn new(sequence: &BitSequence, strategy: Strategy) -> Result<Self> {
        let index = match strategy {
            Strategy::Scan => Index::Scan,
            Strategy::Table => {
                let mut table = HashMap::with_capacity(sequence.len());
                for (p, w) in sequence.windows().enumerate() {
                    table.entry(w).or_insert(p);
                }
                Index::Table(table)
            }
            Strategy::Milestone { spacing } => {
                if spacing == 0 {
                    return Err(Error::Parse("milestone spacing must be positive".into()));
                }
                let generator = Generator::for_sequence(sequence)?;
                check_generator(sequence, &generator)?;
                let marks = (0..sequence.len())
                    .step_by(spacing)
                    .map(|p| (sequence.window_at(p), p))
                    .collect();
                Index::Milestone {
                    spacing,
                    marks,
                    generator,
                }
            }
        };
        Ok(Self {
            sequence: sequence.clone(),
            index,
        })
    }

    pub fn scan(sequence: &BitSequence) -> Self {
        Self::new(sequence, Strategy::Scan).expect("scan needs no index")
    }

    pub fn table(sequence: &BitSequence) -> Self {
        Self::new(sequence, Strategy::Table).expect("table construction cannot fail")
    }

    /// Milestone locator with the default spacing.
    pub fn milestone(sequence: &BitSequence) -> Result<Self> {
        Self::new(
            sequence,
            Strategy::Milestone {
                spacing: default_spacing(sequence.order()),
            },
        )
    }

    pub fn sequence(&self) -> &BitSequence {
        &self.sequence
    }

    pub fn order(&self) -> usize {
        self.sequence.order()
    }

    pub fn strategy(&self) -> Strategy {
        match &self.index {
            Index::Scan => Strategy::Scan,
            Index::Table(_) => Strategy::Table,
            Index::Milestone { spacing, .. } => Strategy::Milestone { spacing: *spacing },
        }
    }

    /// Number of stored index entries.
    pub fn stored_entries(&self) -> usize {
        match &self.index {
            Index::Scan => 0,
            Index::Table(t) => t.len(),
            Index::Milestone { marks, .. } => marks.len(),
        }
    }

    /// Locates an `order`-bit window packed MSB first.
    pub fn locate(&self, window: u64) -> Result<Located> {
        let order = self.order();
        let mask = low_mask(order);
        if window & !mask != 0 {
            return Err(Error::WidthMismatch {
                expected: order,
                found: 64 - window.leading_zeros() as usize,
            });
        }
        let kind = self.sequence.kind();
        if kind == SequenceKind::MSequence && window == 0 {
            return Err(Error::NoSuchWindow {
                window,
                width: order,
            });
        }
        if let Some((position, steps)) = self.find(window) {
            return Ok(Located {
                position,
                complemented: false,
                steps,
            });
        }
        if kind == SequenceKind::HalfDeBruijn {
            if let Some((position, steps)) = self.find(!window & mask) {
                return Ok(Located {
                    position,
                    complemented: true,
                    steps,
                });
            }
        }
        Err(Error::NoSuchWindow {
            window,
            width: order,
        })
    }

    pub fn locate_bits(&self, bits: &[bool]) -> Result<Located> {
        if bits.len() != self.order() {
            return Err(Error::WidthMismatch {
                expected: self.order(),
                found: bits.len(),
            });
        }
        self.locate(super::pack(bits))
    }

    fn find(&self, window: u64) -> Option<(usize, usize)> {
        match &self.index {
            Index::Scan => self
                .sequence
                .windows()
                .position(|w| w == window)
                .map(|p| (p, 0)),
            Index::Table(table) => table.get(&window).map(|&p| (p, 0)),
            Index::Milestone {
                spacing,
                marks,
                generator,
            } => {
                let len = self.sequence.len();
                let mut current = window;
                for steps in 0..=*spacing {
                    if let Some(&mark) = marks.get(&current) {
                        let position = (mark + len - steps % len) % len;
                        // an absent window can walk into the sequence, so confirm
                        return (self.sequence.window_at(position) == window)
                            .then_some((position, steps));
                    }
                    current = generator.successor(current).ok()?;
                }
                None
            }
        }
    }
}

fn check_generator(sequence: &BitSequence, generator: &Generator) -> Result<()> {
    let mut windows = sequence.windows().peekable();
    let first = sequence.window_at(0);
    let mut position = 0;
    while let Some(w) = windows.next() {
        let expected = windows.peek().copied().unwrap_or(first);
        if generator.successor(w).ok() != Some(expected) {
            return Err(Error::NoGenerator(format!(
                "successor rule disagrees with the stored bits at position {position}"
            )));
        }
        position += 1;
    }
    Ok(())
}

//! de Bruijn and half de Bruijn sequences derived from M-sequences.

use super::{low_mask, BitSequence, Provenance, SequenceKind};
use crate::error::{Error, Result};

fn require_kind(seq: &BitSequence, expected: SequenceKind) -> Result<()> {
    if seq.kind() != expected {
        return Err(Error::WrongKind {
            expected,
            found: seq.kind(),
        });
    }
    Ok(())
}

/// Inserts `bit` in front of the first position whose window equals `marker`.
fn insert_before(seq: &BitSequence, marker: u64, bit: bool) -> Vec<bool> {
    let at = seq
        .windows()
        .position(|w| w == marker)
        .expect("M-sequence contains every nonzero window");
    let mut bits = Vec::with_capacity(seq.len() + 1);
    bits.extend_from_slice(&seq.bits()[..at]);
    bits.push(bit);
    bits.extend_from_slice(&seq.bits()[at..]);
    bits
}

/// Lengthens the unique run of `n - 1` zeros of an order-`n` M-sequence to
/// `n` zeros, giving a de Bruijn sequence of order `n`.
pub fn de_bruijn_from_m(m: &BitSequence) -> Result<BitSequence> {
    require_kind(m, SequenceKind::MSequence)?;
    // the zero run starts where the window 0..01 does
    let bits = insert_before(m, 1, false);
    let provenance = match m.provenance() {
        Some(Provenance::Lfsr { lfsr }) => Provenance::ZeroRunExtension { lfsr: lfsr.clone() },
        _ => Provenance::External {
            name: "zero-run extension of an M-sequence".into(),
        },
    };
    BitSequence::with_kind(bits, m.order(), SequenceKind::DeBruijn)
        .map(|s| s.with_provenance(provenance))
}

/// Lengthens the unique run of `k - 1` ones of an order-`(k-1)` M-sequence,
/// giving a half de Bruijn sequence of order `k`.
pub fn half_de_bruijn_from_m(m: &BitSequence) -> Result<BitSequence> {
    require_kind(m, SequenceKind::MSequence)?;
    let bits = insert_before(m, low_mask(m.order()), true);
    let provenance = match m.provenance() {
        Some(Provenance::Lfsr { lfsr }) => Provenance::OneRunExtension { lfsr: lfsr.clone() },
        _ => Provenance::External {
            name: "one-run extension of an M-sequence".into(),
        },
    };
    BitSequence::with_kind(bits, m.order() + 1, SequenceKind::HalfDeBruijn)
        .map(|t| t.with_provenance(provenance))
}

/// The D map: `d[i] = t[i] ^ t[i+1]`, cyclically.
pub fn d_map(bits: &[bool]) -> Vec<bool> {
    let len = bits.len();
    (0..len).map(|i| bits[i] ^ bits[(i + 1) % len]).collect()
}

/// Running XOR of a de Bruijn sequence of order `k - 1`: `t[0] = initial_bit`,
/// `t[i+1] = t[i] ^ s[i]`. The result is half de Bruijn of order `k` and
/// `d_map` of it returns `s`.
pub fn inverse_d_morphism(s: &BitSequence, initial_bit: bool) -> Result<BitSequence> {
    require_kind(s, SequenceKind::DeBruijn)?;
    let weight = s.bits().iter().filter(|&&b| b).count();
    if weight % 2 != 0 {
        return Err(Error::OddWeight { weight });
    }
    let mut bits = Vec::with_capacity(s.len());
    let mut current = initial_bit;
    for &b in s.bits() {
        bits.push(current);
        current ^= b;
    }
    debug_assert_eq!(current, initial_bit);
    let source = s.provenance().cloned().unwrap_or(Provenance::External {
        name: "de Bruijn sequence".into(),
    });
    BitSequence::with_kind(bits, s.order() + 1, SequenceKind::HalfDeBruijn).map(|t| {
        t.with_provenance(Provenance::InverseD {
            source: Box::new(source),
            initial_bit,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{
        is_de_bruijn, is_half_de_bruijn, lfsr_m_sequence, parse_bits, LfsrSpec,
    };

    fn m_seq(order: usize) -> BitSequence {
        lfsr_m_sequence(&LfsrSpec::default_for(order).unwrap()).unwrap()
    }

    #[test]
    fn order_two_extensions() {
        let m = m_seq(2);
        assert_eq!(m.to_bit_string(), "110");
        assert_eq!(de_bruijn_from_m(&m).unwrap().to_bit_string(), "1100");
        assert_eq!(half_de_bruijn_from_m(&m).unwrap().to_bit_string(), "1110");
    }

    #[test]
    fn order_four_extensions() {
        let m = lfsr_m_sequence(&LfsrSpec::new(4, vec![4, 1], 0b1111).unwrap()).unwrap();
        let s = de_bruijn_from_m(&m).unwrap();
        assert_eq!(s.len(), 16);
        assert!(is_de_bruijn(s.bits(), 4));
        let t = half_de_bruijn_from_m(&m).unwrap();
        assert_eq!((t.len(), t.order()), (16, 5));
        assert!(is_half_de_bruijn(t.bits(), 5));
    }

    #[test]
    fn extensions_reject_non_m_sequences() {
        let s = BitSequence::parse("0000111101100101", 4, SequenceKind::DeBruijn).unwrap();
        assert!(matches!(de_bruijn_from_m(&s), Err(Error::WrongKind { .. })));
        assert!(matches!(
            half_de_bruijn_from_m(&s),
            Err(Error::WrongKind { .. })
        ));
    }

    #[test]
    fn inverse_d_reproduces_reference_vertical_sequence() {
        let s = BitSequence::parse("0000111101100101", 4, SequenceKind::DeBruijn).unwrap();
        let t = inverse_d_morphism(&s, true).unwrap();
        assert_eq!(t.to_bit_string(), "1111101011011100");
        assert_eq!(t.kind(), SequenceKind::HalfDeBruijn);
    }

    #[test]
    fn inverse_d_identities() {
        let s = BitSequence::parse("0000111101100101", 4, SequenceKind::DeBruijn).unwrap();
        let t0 = inverse_d_morphism(&s, false).unwrap();
        let t1 = inverse_d_morphism(&s, true).unwrap();
        assert_eq!(d_map(t0.bits()), s.bits());
        assert_eq!(d_map(t1.bits()), s.bits());
        assert_eq!(t0.bits(), t1.complement().bits());
    }

    #[test]
    fn inverse_d_rejects_bad_input() {
        let raw = BitSequence::raw(parse_bits("0111").unwrap(), 2).unwrap();
        assert!(matches!(
            inverse_d_morphism(&raw, false),
            Err(Error::WrongKind { .. })
        ));
        // order-1 de Bruijn "01" has odd weight
        let odd = BitSequence::parse("01", 1, SequenceKind::DeBruijn).unwrap();
        assert!(matches!(
            inverse_d_morphism(&odd, false),
            Err(Error::OddWeight { weight: 1 })
        ));
    }
}

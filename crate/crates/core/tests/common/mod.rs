#![allow(dead_code)]

use selfloc::prelude::*;
use selfloc::sequences::LfsrSpec;

pub const REFERENCE_T: &str = "1111101011011100";
pub const REFERENCE_S: &str = "0000111101100101";

/// The 16 x 16 product array printed with the 5 x 4 cross example,
/// transcribed cell by cell.
pub const REFERENCE_GRID: [&str; 16] = [
    "1111000010011010",
    "1111000010011010",
    "1111000010011010",
    "1111000010011010",
    "1111000010011010",
    "0000111101100101",
    "1111000010011010",
    "0000111101100101",
    "1111000010011010",
    "1111000010011010",
    "0000111101100101",
    "1111000010011010",
    "1111000010011010",
    "1111000010011010",
    "0000111101100101",
    "0000111101100101",
];

/// The 7 x 9 noisy sample of the robust decoding example.
pub const NOISY_SAMPLE: [&str; 7] = [
    "100101001",
    "000001110",
    "101000111",
    "001000100",
    "110010001",
    "001010110",
    "100110001",
];

/// Its corrected form.
pub const CORRECTED_SAMPLE: [&str; 7] = [
    "110111001",
    "001000110",
    "001000110",
    "001000110",
    "110111001",
    "001000110",
    "110111001",
];

pub fn reference_sequences() -> (BitSequence, BitSequence) {
    (
        BitSequence::parse(REFERENCE_T, 5, SequenceKind::HalfDeBruijn).unwrap(),
        BitSequence::parse(REFERENCE_S, 4, SequenceKind::DeBruijn).unwrap(),
    )
}

pub fn reference_grid() -> PatternArray {
    let (t, s) = reference_sequences();
    product(&t, &s).unwrap()
}

pub fn m_sequence(order: usize) -> BitSequence {
    lfsr_m_sequence(&LfsrSpec::default_for(order).unwrap()).unwrap()
}

pub fn de_bruijn(order: usize) -> BitSequence {
    de_bruijn_from_m(&m_sequence(order)).unwrap()
}

/// Order `order`, from the M-sequence of order `order - 1`.
pub fn half_de_bruijn(order: usize) -> BitSequence {
    half_de_bruijn_from_m(&m_sequence(order - 1)).unwrap()
}

/// Order `order`, as the running XOR of the de Bruijn sequence of order `order - 1`.
pub fn half_de_bruijn_inverse_d(order: usize) -> BitSequence {
    inverse_d_morphism(&de_bruijn(order - 1), false).unwrap()
}

/// Default half de Bruijn `T` of order `k` and de Bruijn `S` of order `n`.
pub fn default_pattern(k: usize, n: usize) -> PatternArray {
    product(&half_de_bruijn(k), &de_bruijn(n)).unwrap()
}

pub fn matrix(rows: &[&str]) -> BitMatrix {
    BitMatrix::from_strings(rows).unwrap()
}

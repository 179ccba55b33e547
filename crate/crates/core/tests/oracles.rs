//! Checks against independent computations: exact rational convolutions,
//! polynomial arithmetic over GF(2), brute-force window search and values
//! frozen from an outside computation.

mod common;

use common::*;
use num_rational::BigRational;
use num_traits::{One, Zero};
use selfloc::analysis::{all_rows_prob, reproduce_table1, row_condition_prob};
use selfloc::decode::decode_cross;
use selfloc::pattern::{CrossGeometry, CrossSample, Grid};
use selfloc::sequences::{default_taps, low_mask, BitSequence, Locator, Strategy, DEFAULT_TAPS};
use selfloc::{ErrorModelF32, ErrorModelF64, ExactErrorModel};

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Distribution of the number of flipped bits among `n`, built one bit at a
/// time rather than from binomial coefficients.
fn error_distribution(n: usize, p: &BigRational) -> Vec<BigRational> {
    let q = BigRational::one() - p;
    let mut dist = vec![BigRational::one()];
    for _ in 0..n {
        let mut next = vec![BigRational::zero(); dist.len() + 1];
        for (e, mass) in dist.iter().enumerate() {
            next[e] += mass * p;
            next[e + 1] += mass * &q;
        }
        dist = next;
    }
    dist
}

fn to_f64(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}

fn rel_close(a: f64, b: f64, digits: i32) -> bool {
    (a - b).abs() <= 10f64.powi(-digits) * b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn exact_row_probability_matches_convolution() {
    for pc in [50, 75, 90, 93, 95, 99] {
        let p = ratio(pc, 100);
        let model = ExactErrorModel::new(p.clone());
        for n in 1..=16 {
            let dist = error_distribution(n, &p);
            // fewer than n/4 errors
            let oracle: BigRational = dist
                .iter()
                .enumerate()
                .filter(|(e, _)| 4 * e < n)
                .map(|(_, m)| m.clone())
                .sum();
            assert_eq!(model.row_condition_prob(n), oracle, "n={n} p={pc}/100");
            let f = row_condition_prob(n, pc as f64 / 100.0);
            assert!(
                rel_close(f, to_f64(&oracle), 12),
                "n={n} p={pc}: {f} vs {}",
                to_f64(&oracle)
            );
        }
    }
}

#[test]
fn exact_column_tail_matches_convolution() {
    let p = ratio(99, 100);
    let model = ExactErrorModel::new(p.clone());
    for bits in 1..=16 {
        let dist = error_distribution(bits, &p);
        // at least half of the bits flipped
        let oracle: BigRational = dist
            .iter()
            .enumerate()
            .filter(|(e, _)| 2 * e >= bits)
            .map(|(_, m)| m.clone())
            .sum();
        assert_eq!(model.column_fail_prob(bits), oracle, "bits={bits}");
    }
}

#[test]
fn scalar_types_agree() {
    for pc in [90, 95, 99] {
        let p = pc as f64 / 100.0;
        let exact = ExactErrorModel::new(ratio(pc, 100));
        let f64m = ErrorModelF64::new(p);
        let f32m = ErrorModelF32::new(p as f32);
        for n in [8, 16, 32] {
            let e = to_f64(&exact.all_rows_prob(n, n));
            assert!(rel_close(f64m.all_rows_prob(n, n), e, 12));
            assert!(rel_close(f32m.all_rows_prob(n, n) as f64, e, 4));
        }
    }
}

// Computed separately in exact rational arithmetic.
const FROZEN_SQUARE_64: [(f64, f64); 4] = [
    (0.90, 0.971808582143),
    (0.91, 0.991431346797),
    (0.92, 0.997886200503),
    (0.93, 0.999597019653),
];

#[test]
fn frozen_values_for_the_widest_windows() {
    for (p, want) in FROZEN_SQUARE_64 {
        assert!((all_rows_prob(64, 64, p) - want).abs() < 1e-11, "p={p}");
    }
    let table = reproduce_table1();
    let cell = |p: f64, n: usize| {
        table
            .iter()
            .find(|e| (e.p - p).abs() < 1e-9 && e.n == n)
            .unwrap()
            .value
    };
    assert!((cell(0.90, 8) - 0.191).abs() < 5e-4);
    assert!((row_condition_prob(8, 0.90) - 0.81310473).abs() < 1e-8);
    assert!((cell(0.95, 8) - 0.624).abs() < 5e-4);
    assert!((cell(0.93, 32) - 0.959).abs() < 5e-4);
    assert!((cell(0.96, 32) - 0.9991).abs() < 5e-5);
    assert!((cell(0.98, 16) - 0.9962).abs() < 5e-5);
}

/// Multiplies polynomials over GF(2) modulo `f` of degree `deg`.
fn mulmod(mut a: u64, mut b: u64, f: u64, deg: usize) -> u64 {
    let mut acc = 0;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> deg & 1 == 1 {
            a ^= f;
        }
    }
    acc
}

fn powmod(base: u64, mut e: u64, f: u64, deg: usize) -> u64 {
    let (mut acc, mut b) = (1, base);
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, f, deg);
        }
        b = mulmod(b, b, f, deg);
        e >>= 1;
    }
    acc
}

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

#[test]
fn default_taps_are_primitive_polynomials() {
    for taps in DEFAULT_TAPS {
        let deg = taps[0];
        let f = taps.iter().fold(1u64, |acc, &e| acc | 1 << e);
        let period = (1u64 << deg) - 1;
        let x = 0b10;
        assert_eq!(powmod(x, period, f, deg), 1, "degree {deg}");
        for q in prime_factors(period) {
            assert_ne!(powmod(x, period / q, f, deg), 1, "degree {deg}, factor {q}");
        }
        assert_eq!(default_taps(deg).unwrap(), taps);
        assert_eq!(m_sequence(deg).len() as u64, period);
    }
}

/// Every start position of `window` in the cyclic sequence, by direct comparison.
fn brute_positions(seq: &BitSequence, window: u64) -> Vec<usize> {
    let order = seq.order();
    (0..seq.len())
        .filter(|&p| (0..order).all(|i| seq.bit(p + i) == ((window >> (order - 1 - i)) & 1 == 1)))
        .collect()
}

#[test]
fn locators_agree_with_brute_force() {
    for order in 4..=10 {
        for seq in [
            m_sequence(order),
            de_bruijn(order),
            half_de_bruijn(order),
            half_de_bruijn_inverse_d(order),
        ] {
            let locators = [
                Locator::new(&seq, Strategy::Scan).unwrap(),
                Locator::new(&seq, Strategy::Table).unwrap(),
                Locator::milestone(&seq).unwrap(),
                Locator::new(&seq, Strategy::Milestone { spacing: 3 }).unwrap(),
            ];
            for w in 0..=low_mask(order) {
                let direct = brute_positions(&seq, w);
                let flipped = brute_positions(&seq, !w & low_mask(order));
                assert!(direct.len() <= 1, "window repeats in {}", seq.kind());
                let expected = match (direct.first(), flipped.first()) {
                    (Some(&p), _) => Some((p, false)),
                    (None, Some(&p))
                        if seq.kind() == selfloc::sequences::SequenceKind::HalfDeBruijn =>
                    {
                        Some((p, true))
                    }
                    _ => None,
                };
                for l in &locators {
                    let got = l.locate(w).ok().map(|x| (x.position, x.complemented));
                    assert_eq!(
                        got,
                        expected,
                        "{} order {order} window {w:b} via {:?}",
                        seq.kind(),
                        l.strategy()
                    );
                }
            }
        }
    }
}

#[test]
fn reference_locations() {
    let (t, s) = reference_sequences();
    let l = Locator::table(&s).locate(0b0111).unwrap();
    assert_eq!((l.position, l.complemented), (3, false));
    let l = Locator::scan(&t).locate(0b10010).unwrap();
    assert!(
        Locator::milestone(&t).is_err(),
        "parsed sequences carry no successor rule"
    );
    assert_eq!((l.position, l.complemented), (7, true));
    assert_eq!(t.window_at(7), 0b01101);
}

#[test]
fn reference_cells() {
    let g = reference_grid();
    // 1-based (1,1), (6,1), (8,5)
    assert!(g.cell(0, 0));
    assert!(!g.cell(5, 0));
    assert!(g.cell(7, 4));
    let w = g.window(0, 0, 5, 4).unwrap().bits;
    assert_eq!(w.to_strings(), ["1111", "1111", "1111", "1111", "1111"]);
    let x = g
        .cross(7, 3, CrossGeometry::new(5, 4, 2, 1).unwrap())
        .unwrap();
    assert_eq!((x.vertical, x.horizontal), (0b10010, 0b1000));
}

/// Flipping any one pixel of a cross either trips the consistency check or
/// moves the decoded location.
#[test]
fn cross_single_flips_never_decode_in_place() {
    let (t, s) = reference_sequences();
    let (tl, sl) = (Locator::table(&t), Locator::table(&s));
    let grid = reference_grid();
    let mut outcomes = [0usize; 2];
    for geometry in [
        CrossGeometry::new(5, 4, 2, 1).unwrap(),
        CrossGeometry::centered(5, 4).unwrap(),
    ] {
        for r in 0..16 {
            for c in 0..16 {
                let x = grid.cross(r, c, geometry).unwrap();
                let shared_v = 1 << (4 - geometry.i0);
                let shared_h = 1 << (3 - geometry.j0);
                let mut mutants = Vec::new();
                for i in 0..5 {
                    mutants.push((x.vertical ^ (1 << i), x.horizontal));
                }
                for j in 0..4 {
                    mutants.push((x.vertical, x.horizontal ^ (1 << j)));
                }
                mutants.push((x.vertical ^ shared_v, x.horizontal ^ shared_h));
                for (v, h) in mutants {
                    let sample = CrossSample::new_unchecked(v, h, geometry).unwrap();
                    match decode_cross(&sample, &tl, &sl) {
                        Ok(loc) => {
                            assert_ne!((loc.row, loc.col), (r, c));
                            outcomes[0] += 1;
                        }
                        Err(_) => outcomes[1] += 1,
                    }
                }
            }
        }
    }
    // every consistent mutant lands somewhere else, every split one is caught
    assert_eq!(outcomes[0] + outcomes[1], 2 * 256 * 10);
    assert!(outcomes[1] >= 2 * 256 * 2);
}

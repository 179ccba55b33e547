//! Self-locating binary patterns.
//!
//! A pattern is the product grid `g[i][j] = t[i] ^ s[j]` of a half de Bruijn
//! sequence `t` (down the rows) and a de Bruijn sequence `s` (across the
//! columns). Every `k x n` window and every cross-shaped window of the grid
//! identifies its own position, and a noisy rectangular sample can still be
//! decoded by majority vote.
//!
//! ```
//! use selfloc::prelude::*;
//!
//! let t = BitSequence::parse("1111101011011100", 5, SequenceKind::HalfDeBruijn).unwrap();
//! let s = BitSequence::parse("0000111101100101", 4, SequenceKind::DeBruijn).unwrap();
//! let grid = product(&t, &s).unwrap();
//! assert!(grid.verify_rect_uniqueness(5, 4).passed());
//!
//! let sample = grid.window(7, 3, 5, 4).unwrap();
//! let report = robust_decode(&sample, &Locator::table(&t), &Locator::table(&s)).unwrap();
//! assert_eq!(report.location.map(|l| (l.row, l.col)), Some((7, 3)));
//! ```

pub mod analysis;
pub mod decode;
pub mod error;
pub mod formats;
pub mod pattern;
pub mod sequences;

pub use error::{Error, Result};

pub type ErrorModelF64 = analysis::ErrorModel<f64>;
pub type ErrorModelF32 = analysis::ErrorModel<f32>;
/// Exact arithmetic over arbitrary-precision rationals.
pub type ExactErrorModel = analysis::ErrorModel<num_rational::BigRational>;

pub mod prelude {
    pub use crate::analysis::{ErrorModel, NoiseSpec, Simulator};
    pub use crate::decode::{decode_cross, robust_decode, DecodeReport, DecodeStatus, Location};
    pub use crate::pattern::{
        product, BitMatrix, CrossGeometry, CrossSample, Grid, PatternArray, PatternMode,
        ProductView, RectSample,
    };
    pub use crate::sequences::{
        de_bruijn_from_m, half_de_bruijn_from_m, inverse_d_morphism, lfsr_m_sequence, BitSequence,
        LfsrSpec, Locator, SequenceKind, Strategy,
    };
    pub use crate::{Error, Result};
}

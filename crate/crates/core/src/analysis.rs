//! Decoding-success probabilities, in closed form and by simulation.
//!
//! Every bit of a `k x n` sample is read correctly with probability `p`,
//! independently. The decoder is guaranteed to succeed when every row has
//! fewer than `n / 4` errors and every column fewer than `k / 2`, so the
//! closed forms here are lower bounds on its success rate.
//!
//! The closed forms are generic over the scalar type: `f64` for everyday
//! use, `f32` if you must, and [`num_rational::BigRational`] for exact
//! values (see the aliases at the crate root).

use num_traits::{pow, FromPrimitive, Num};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::decode::{check_error_conditions, max_column_errors, max_row_errors, robust_decode};
use crate::error::{Error, Result};
use crate::pattern::{BitMatrix, Grid, ProductView};
use crate::sequences::{
    de_bruijn_from_m, half_de_bruijn_from_m, lfsr_m_sequence, BitSequence, LfsrSpec, Locator,
};

/// Scalars the closed forms can be evaluated in.
pub trait Probability: Clone + PartialOrd + Num + FromPrimitive {}

impl<T> Probability for T where T: Clone + PartialOrd + Num + FromPrimitive {}

fn from_usize<T: Probability>(v: usize) -> T {
    T::from_usize(v).expect("count representable in the scalar type")
}

/// Independent per-bit reading errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorModel<T> {
    correct: T,
}

impl<T: Probability> ErrorModel<T> {
    /// `correct` is the probability that a single bit is read correctly.
    pub fn new(correct: T) -> Self {
        Self { correct }
    }

    pub fn correct(&self) -> &T {
        &self.correct
    }

    pub fn error(&self) -> T {
        T::one() - self.correct.clone()
    }

    /// `C(bits, errors) q^errors p^(bits - errors)` with `q = 1 - p`.
    pub fn exactly(&self, bits: usize, errors: usize) -> T {
        if errors > bits {
            return T::zero();
        }
        let choose = (0..errors).fold(T::one(), |acc, j| {
            acc * from_usize::<T>(bits - j) / from_usize::<T>(j + 1)
        });
        choose * pow(self.error(), errors) * pow(self.correct.clone(), bits - errors)
    }

    /// Probability of at most `max_errors` errors among `bits` bits.
    pub fn at_most(&self, bits: usize, max_errors: usize) -> T {
        (0..=max_errors.min(bits)).fold(T::zero(), |acc, i| acc + self.exactly(bits, i))
    }

    /// Probability of at least `min_errors` errors among `bits` bits.
    pub fn at_least(&self, bits: usize, min_errors: usize) -> T {
        (min_errors..=bits).fold(T::zero(), |acc, i| acc + self.exactly(bits, i))
    }

    /// One `n`-bit row has fewer than `n / 4` errors.
    pub fn row_condition_prob(&self, n: usize) -> T {
        self.at_most(n, max_row_errors(n))
    }

    /// All `k` rows of a `k x n` sample satisfy the row condition.
    pub fn all_rows_prob(&self, k: usize, n: usize) -> T {
        pow(self.row_condition_prob(n), k)
    }

    /// A column of `bits` bits has at least half of them in error.
    pub fn column_fail_prob(&self, bits: usize) -> T {
        self.at_least(bits, bits.div_ceil(2))
    }

    /// At least one of the `n` columns (each `k` bits) fails.
    pub fn any_column_fail_prob(&self, k: usize, n: usize) -> T {
        T::one() - pow(T::one() - self.column_fail_prob(k), n)
    }

    /// `all_rows_prob * (1 - any_column_fail_prob)`, the probability
    /// estimate used for the decoder guarantee. Rows and columns are not
    /// independent, so this is an estimate rather than an exact value.
    pub fn sufficient_condition_prob(&self, k: usize, n: usize) -> T {
        self.all_rows_prob(k, n) * (T::one() - self.any_column_fail_prob(k, n))
    }
}

pub fn row_condition_prob(n: usize, p: f64) -> f64 {
    ErrorModel::new(p).row_condition_prob(n)
}

pub fn all_rows_prob(k: usize, n: usize, p: f64) -> f64 {
    ErrorModel::new(p).all_rows_prob(k, n)
}

pub fn column_fail_prob(bits: usize, p: f64) -> f64 {
    ErrorModel::new(p).column_fail_prob(bits)
}

pub fn any_column_fail_prob(k: usize, n: usize, p: f64) -> f64 {
    ErrorModel::new(p).any_column_fail_prob(k, n)
}

pub const TABLE1_N: [usize; 4] = [8, 16, 32, 64];

/// `0.90, 0.91, ..., 0.99`.
pub fn table1_p() -> impl Iterator<Item = f64> {
    (90..=99).map(|c| c as f64 / 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Table1Entry {
    pub p: f64,
    pub n: usize,
    pub value: f64,
}

/// All-rows probability for every square `n x n` window in the grid
/// `p ∈ {0.90..0.99} x n ∈ {8, 16, 32, 64}`, row-major by `p`.
pub fn reproduce_table1() -> Vec<Table1Entry> {
    table1_p()
        .flat_map(|p| {
            TABLE1_N.iter().map(move |&n| Table1Entry {
                p,
                n,
                value: all_rows_prob(n, n, p),
            })
        })
        .collect()
}

/// Renders the table with one row per `p` and one column per `n`.
pub fn format_table1(entries: &[Table1Entry]) -> String {
    let mut out = String::from("p \\ n ");
    for n in TABLE1_N {
        out.push_str(&format!("{n:>9}"));
    }
    out.push('\n');
    for row in entries.chunks(TABLE1_N.len()) {
        out.push_str(&format!("{:<6.2}", row[0].p));
        for e in row {
            let cell = if (e.value * 1e4).round() >= 1e4 {
                "> 0.9999".to_string()
            } else {
                format!("{:.4}", e.value)
            };
            out.push_str(&format!("{cell:>9}"));
        }
        out.push('\n');
    }
    out
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Width of reported confidence intervals, in standard deviations.
pub const CI_Z: f64 = 3.0;

/// Independent random stream for one trial.
///
/// Seeding from `(seed, trial)` rather than sharing one generator keeps
/// parallel and serial runs identical.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    /// Every bit flips independently with probability `1 - p`.
    Iid,
    /// Uniform per-row error counts in `0..=row_max`, resampled until no
    /// column exceeds `col_max`.
    Bounded { row_max: usize, col_max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub p: f64,
    pub mode: NoiseMode,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn iid(p: f64, seed: u64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Parse(format!("probability {p} outside (0, 1]")));
        }
        Ok(Self {
            p,
            mode: NoiseMode::Iid,
            seed,
        })
    }

    /// Noise inside the decoder's guarantee region for a `k x n` sample.
    pub fn within_bounds(k: usize, n: usize, seed: u64) -> Self {
        Self {
            p: 1.0,
            mode: NoiseMode::Bounded {
                row_max: max_row_errors(n),
                col_max: max_column_errors(k),
            },
            seed,
        }
    }

    /// Error pattern for `trial`, plus the number of draws it took.
    pub fn error_pattern(&self, trial: u64, k: usize, n: usize) -> (BitMatrix, usize) {
        let mut rng = trial_rng(self.seed, trial);
        match self.mode {
            NoiseMode::Iid => (iid_errors(&mut rng, k, n, self.p), 1),
            NoiseMode::Bounded { row_max, col_max } => {
                bounded_errors(&mut rng, k, n, row_max, col_max)
            }
        }
    }
}

pub fn iid_errors<R: Rng>(rng: &mut R, k: usize, n: usize, p: f64) -> BitMatrix {
    let q = 1.0 - p;
    let mut e = BitMatrix::zeros(k, n);
    if q <= 0.0 {
        return e;
    }
    for i in 0..k {
        for j in 0..n {
            if rng.random::<f64>() < q {
                e.set(i, j, true);
            }
        }
    }
    e
}

/// Rejection sampler for error patterns with at most `row_max` ones per row
/// and `col_max` per column. Returns the pattern and the number of draws.
pub fn bounded_errors<R: Rng>(
    rng: &mut R,
    k: usize,
    n: usize,
    row_max: usize,
    col_max: usize,
) -> (BitMatrix, usize) {
    let row_max = row_max.min(n);
    let mut attempts = 0;
    loop {
        attempts += 1;
        let mut e = BitMatrix::zeros(k, n);
        for i in 0..k {
            let count = rng.random_range(0..=row_max);
            for j in index::sample(rng, n, count) {
                e.set(i, j, true);
            }
        }
        if e.column_counts().iter().all(|&c| c <= col_max) {
            return (e, attempts);
        }
    }
}

/// Outcome of one simulated readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    pub decoded: bool,
    pub tie: bool,
    pub no_legal_assignment: bool,
    pub rows_ok: bool,
    pub cols_ok: bool,
    pub draws: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub trials: u64,
    pub successes: u64,
    pub ties: u64,
    pub no_legal_assignment: u64,
    pub rows_ok: u64,
    pub sufficient: u64,
    /// Successful decodes among trials inside the guarantee region.
    pub sufficient_successes: u64,
    pub draws: u64,
}

impl Tally {
    fn of(o: TrialOutcome) -> Self {
        let sufficient = o.rows_ok && o.cols_ok;
        Self {
            trials: 1,
            successes: o.decoded as u64,
            ties: o.tie as u64,
            no_legal_assignment: o.no_legal_assignment as u64,
            rows_ok: o.rows_ok as u64,
            sufficient: sufficient as u64,
            sufficient_successes: (sufficient && o.decoded) as u64,
            draws: o.draws as u64,
        }
    }

    fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            successes: self.successes + o.successes,
            ties: self.ties + o.ties,
            no_legal_assignment: self.no_legal_assignment + o.no_legal_assignment,
            rows_ok: self.rows_ok + o.rows_ok,
            sufficient: self.sufficient + o.sufficient,
            sufficient_successes: self.sufficient_successes + o.sufficient_successes,
            draws: self.draws + o.draws,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloResult {
    pub k: usize,
    pub n: usize,
    pub p: f64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Trials in which every row met the row condition.
    pub rows_ok: u64,
    /// Trials in which both the row and the column condition held.
    pub sufficient: u64,
    /// Closed-form probability that every row meets the row condition.
    pub analytic_rows: f64,
    /// Closed-form estimate of the sufficient-condition probability.
    pub analytic_sufficient: f64,
}

impl MonteCarloResult {
    pub fn row_condition_rate(&self) -> f64 {
        self.rows_ok as f64 / self.trials as f64
    }
}

/// A pattern with its locators, reused across simulated readouts.
#[derive(Debug, Clone)]
pub struct Simulator {
    vertical: BitSequence,
    horizontal: BitSequence,
    vertical_locator: Locator,
    horizontal_locator: Locator,
}

impl Simulator {
    /// Uses the built-in constructions: `T` from the order-`(k-1)` M-sequence
    /// with its one run lengthened, `S` from the order-`n` M-sequence with
    /// its zero run lengthened. Needs `3 <= k <= 25` and `2 <= n <= 24`.
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::UnsupportedOrder {
                order: k,
                min: 3,
                max: 25,
            });
        }
        let t = half_de_bruijn_from_m(&lfsr_m_sequence(&LfsrSpec::default_for(k - 1)?)?)?;
        let s = de_bruijn_from_m(&lfsr_m_sequence(&LfsrSpec::default_for(n)?)?)?;
        Ok(Self::with_sequences(t, s))
    }

    pub fn with_sequences(vertical: BitSequence, horizontal: BitSequence) -> Self {
        Self {
            vertical_locator: Locator::table(&vertical),
            horizontal_locator: Locator::table(&horizontal),
            vertical,
            horizontal,
        }
    }

    pub fn k(&self) -> usize {
        self.vertical.order()
    }

    pub fn n(&self) -> usize {
        self.horizontal.order()
    }

    /// Samples a random window, corrupts it and decodes it.
    pub fn trial(&self, noise: &NoiseSpec, trial: u64) -> TrialOutcome {
        let (k, n) = (self.k(), self.n());
        let (errors, draws) = noise.error_pattern(trial, k, n);
        // positions come from a separate stream so noise and placement are independent
        let mut rng = trial_rng(noise.seed ^ 0x9e37_79b9_7f4a_7c15, trial);
        let row = rng.random_range(0..self.vertical.len());
        let col = rng.random_range(0..self.horizontal.len());
        let view = ProductView::new(&self.vertical, &self.horizontal);
        let mut sample = view.window(row, col, k, n).expect("cyclic window");
        sample.bits = sample.bits.xor(&errors).expect("same shape");

        let conditions = check_error_conditions(&errors);
        let report = robust_decode(&sample, &self.vertical_locator, &self.horizontal_locator)
            .expect("sample matches the pattern's dimensions");
        let decoded = report
            .location
            .is_some_and(|l| (l.row, l.col) == (row, col));
        TrialOutcome {
            decoded,
            tie: report.status == crate::decode::DecodeStatus::TieAmbiguous,
            no_legal_assignment: report.status == crate::decode::DecodeStatus::NoLegalAssignment,
            rows_ok: conditions.rows_ok,
            cols_ok: conditions.cols_ok,
            draws,
        }
    }

    /// Runs `trials` independent trials in parallel.
    pub fn tally(&self, noise: &NoiseSpec, trials: u64) -> Tally {
        (0..trials)
            .into_par_iter()
            .map(|i| Tally::of(self.trial(noise, i)))
            .reduce(Tally::default, Tally::merge)
    }

    pub fn success_rate(&self, p: f64, trials: u64, seed: u64) -> Result<MonteCarloResult> {
        if trials == 0 {
            return Err(Error::Parse("at least one trial is required".into()));
        }
        let noise = NoiseSpec::iid(p, seed)?;
        let t = self.tally(&noise, trials);
        let (ci_low, ci_high) = wilson_interval(t.successes, t.trials, CI_Z);
        let model = ErrorModel::new(p);
        let (k, n) = (self.k(), self.n());
        Ok(MonteCarloResult {
            k,
            n,
            p,
            trials,
            successes: t.successes,
            success_rate: t.successes as f64 / trials as f64,
            ci_low,
            ci_high,
            rows_ok: t.rows_ok,
            sufficient: t.sufficient,
            analytic_rows: model.all_rows_prob(k, n),
            analytic_sufficient: model.sufficient_condition_prob(k, n),
        })
    }
}

/// Fraction of exactly decoded random readouts under i.i.d. noise.
pub fn monte_carlo_success_rate(
    k: usize,
    n: usize,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloResult> {
    Simulator::new(k, n)?.success_rate(p, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn row_condition_n8_p90() {
        // p^8 + 8 q p^7 at p = 0.9
        let expected = 0.9f64.powi(8) + 8.0 * 0.1 * 0.9f64.powi(7);
        assert!((row_condition_prob(8, 0.9) - expected).abs() < 1e-15);
        assert!((row_condition_prob(8, 0.9) - 0.8131).abs() < 5e-5);
    }

    #[test]
    fn certain_reading() {
        assert_eq!(row_condition_prob(16, 1.0), 1.0);
        assert_eq!(all_rows_prob(8, 8, 1.0), 1.0);
        assert_eq!(column_fail_prob(16, 1.0), 0.0);
        assert_eq!(any_column_fail_prob(16, 16, 1.0), 0.0);
    }

    #[test]
    fn exact_scalar_agrees_with_f64() {
        let p = BigRational::new(19.into(), 20.into());
        let exact = ErrorModel::new(p).row_condition_prob(16);
        let approx = row_condition_prob(16, 0.95);
        let exact_f64 = {
            use num_traits::ToPrimitive;
            exact.to_f64().unwrap()
        };
        assert!((exact_f64 - approx).abs() < 1e-14);
    }

    #[test]
    fn f32_instantiation() {
        let v: f32 = ErrorModel::new(0.9f32).all_rows_prob(8, 8);
        assert!((v - 0.191).abs() < 5e-4);
    }

    #[test]
    fn monotone_in_p() {
        let ps: Vec<f64> = (0..=100).map(|i| 0.5 + 0.005 * i as f64).collect();
        for n in [4, 8, 9, 16, 32] {
            for w in ps.windows(2) {
                assert!(row_condition_prob(n, w[0]) <= row_condition_prob(n, w[1]) + 1e-15);
                assert!(all_rows_prob(n, n, w[0]) <= all_rows_prob(n, n, w[1]) + 1e-15);
                assert!(column_fail_prob(n, w[0]) + 1e-15 >= column_fail_prob(n, w[1]));
            }
        }
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(50, 100, 3.0);
        assert!(lo < 0.5 && hi > 0.5);
        assert_eq!(wilson_interval(10, 10, 3.0).1, 1.0);
    }

    #[test]
    fn trial_streams_are_reproducible() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).random()).collect();
        let b: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).random()).collect();
        assert_eq!(a, b);
        assert_ne!(
            trial_rng(7, 3).random::<u64>(),
            trial_rng(7, 4).random::<u64>()
        );
    }

    #[test]
    fn bounded_noise_respects_limits() {
        let noise = NoiseSpec::within_bounds(8, 16, 11);
        for t in 0..500 {
            let (e, draws) = noise.error_pattern(t, 8, 16);
            assert!(draws >= 1);
            assert!(e.row_counts().iter().all(|&c| c <= 3));
            assert!(e.column_counts().iter().all(|&c| c <= 3));
        }
    }

    #[test]
    fn perfect_reading_always_decodes() {
        let r = monte_carlo_success_rate(8, 8, 1.0, 1000, 5).unwrap();
        assert_eq!(r.successes, 1000);
        assert_eq!(r.success_rate, 1.0);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let sim = Simulator::new(6, 6).unwrap();
        let a = sim.success_rate(0.9, 2000, 42).unwrap();
        let b = sim.success_rate(0.9, 2000, 42).unwrap();
        assert_eq!(a, b);
        let serial = (0..2000)
            .map(|i| Tally::of(sim.trial(&NoiseSpec::iid(0.9, 42).unwrap(), i)))
            .fold(Tally::default(), Tally::merge);
        assert_eq!(serial.successes, a.successes);
    }

    #[test]
    fn table_layout() {
        let table = format_table1(&reproduce_table1());
        assert_eq!(table.lines().count(), 11);
        assert!(table.contains("> 0.9999"));
    }
}

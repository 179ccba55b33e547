//! `selfloc` command-line tool.
//!
//! Exit status: 0 on success, 1 when a decode, lookup or verification fails
//! (the JSON on stdout carries a `reason`), 2 on bad usage or unreadable input.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use selfloc::analysis::{format_table1, reproduce_table1, Simulator};
use selfloc::decode::{decode_cross, robust_decode};
use selfloc::formats::{self, ReportFile, Sample, SampleFile};
use selfloc::pattern::{product, CrossGeometry, Grid, PatternArray, UniquenessReport};
use selfloc::sequences::{
    check_de_bruijn, check_half_de_bruijn, check_m_sequence, complement_pair_census,
    de_bruijn_from_m, default_taps, half_de_bruijn_from_m, inverse_d_morphism, lfsr_m_sequence,
    low_mask, parse_bits, parse_word, BitSequence, LfsrSpec, Locator, SequenceKind, Strategy,
};
use selfloc::{Error, Result};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "selfloc",
    version,
    about = "Self-locating binary patterns: generate, decode, verify, simulate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an M-sequence, de Bruijn or half de Bruijn sequence file.
    GenSeq(GenSeqArgs),
    /// Write a product pattern as PBM with a JSON sidecar.
    GenPattern(GenPatternArgs),
    /// Find the position of a window in a sequence.
    Locate(LocateArgs),
    /// Decode a cross-shaped sample.
    DecodeCross(DecodeArgs),
    /// Decode a (possibly noisy) rectangular sample by majority vote.
    DecodeRect(DecodeArgs),
    /// Check the window property of a pattern (PBM) or sequence file.
    Verify(VerifyArgs),
    /// Estimate decoding success rates under i.i.d. bit errors, as CSV.
    Simulate(SimulateArgs),
    /// Print the all-rows probability table for square windows.
    Table1(Table1Args),
}

#[derive(Clone, Copy, ValueEnum)]
enum SeqKind {
    MSequence,
    DeBruijn,
    HalfDeBruijn,
}

#[derive(Clone, Copy, ValueEnum)]
enum HalfConstruction {
    /// Lengthen the one run of an M-sequence of order k-1.
    Mseq,
    /// Running XOR of a de Bruijn sequence of order k-1.
    InverseD,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Scan,
    Table,
    Milestone,
}

#[derive(Args)]
struct GenSeqArgs {
    #[arg(long, value_enum)]
    kind: SeqKind,
    #[arg(long)]
    order: usize,
    /// LFSR feedback taps, largest first: `4,1` is x^4 + x + 1.
    #[arg(long, value_delimiter = ',')]
    taps: Option<Vec<usize>>,
    /// Initial LFSR register as a bit string (default all ones).
    #[arg(long)]
    state: Option<String>,
    /// Construction for half de Bruijn sequences.
    #[arg(long, value_enum, default_value = "mseq")]
    half: HalfConstruction,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenPatternArgs {
    /// Rows of the sensor window; order of the vertical half de Bruijn sequence.
    #[arg(long)]
    k: usize,
    /// Columns of the sensor window; order of the horizontal de Bruijn sequence.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "mseq")]
    half: HalfConstruction,
    /// Append the first k-1 rows and n-1 columns for use on a bounded board.
    #[arg(long)]
    acyclic: bool,
    /// Vertical sequence file to use instead of the built-in construction.
    #[arg(long)]
    vertical: Option<PathBuf>,
    /// Horizontal sequence file to use instead of the built-in construction.
    #[arg(long)]
    horizontal: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LocateArgs {
    #[arg(long)]
    sequence: PathBuf,
    /// Window as a bit string of the sequence's order.
    #[arg(long)]
    window: String,
    #[arg(long, value_enum, default_value = "table")]
    strategy: StrategyArg,
    /// Milestone spacing (default 2^ceil(order/2)).
    #[arg(long)]
    spacing: Option<usize>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Pattern PBM (its sidecar is read from `<file>.json`) or the sidecar itself.
    #[arg(long)]
    pattern: PathBuf,
    /// Sample JSON.
    #[arg(long)]
    sample: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Pattern PBM or sequence file.
    path: PathBuf,
    /// Shared-pixel row of the cross to census (default k/2).
    #[arg(long, requires = "j0")]
    i0: Option<usize>,
    /// Shared-pixel column of the cross to census (default n/2).
    #[arg(long, requires = "i0")]
    j0: Option<usize>,
    /// Expected kind of a sequence file, overriding its sidecar.
    #[arg(long, value_enum, requires = "order")]
    kind: Option<SeqKind>,
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Window rows (default: same as n).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: usize,
    /// Per-bit probability of a correct reading; repeat for several values.
    #[arg(long, num_args = 1.., required = true)]
    p: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, env = "SELFLOC_SEED", default_value_t = 1)]
    seed: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Table1Args {
    /// Emit CSV rows instead of the table layout.
    #[arg(long)]
    csv: bool,
}

#[derive(Serialize)]
struct CsvRow {
    p: f64,
    n: usize,
    analytic: f64,
    empirical: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    trials: Option<u64>,
}

impl From<SeqKind> for SequenceKind {
    fn from(k: SeqKind) -> Self {
        match k {
            SeqKind::MSequence => SequenceKind::MSequence,
            SeqKind::DeBruijn => SequenceKind::DeBruijn,
            SeqKind::HalfDeBruijn => SequenceKind::HalfDeBruijn,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::GenSeq(a) => gen_seq(a),
        Command::GenPattern(a) => gen_pattern(a),
        Command::Locate(a) => locate(a),
        Command::DecodeCross(a) => decode(a, false),
        Command::DecodeRect(a) => decode(a, true),
        Command::Verify(a) => verify(a),
        Command::Simulate(a) => simulate(a),
        Command::Table1(a) => table1(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn lfsr(order: usize, taps: Option<Vec<usize>>, state: Option<&str>) -> Result<LfsrSpec> {
    let taps = match taps {
        Some(t) => t,
        None => default_taps(order)?.to_vec(),
    };
    let seed = match state {
        Some(text) => {
            let (word, width) = parse_word(text)?;
            if width != order {
                return Err(Error::WidthMismatch {
                    expected: order,
                    found: width,
                });
            }
            word
        }
        None => low_mask(order),
    };
    LfsrSpec::new(order, taps, seed)
}

fn half_de_bruijn(order: usize, how: HalfConstruction, spec: &LfsrSpec) -> Result<BitSequence> {
    let m = lfsr_m_sequence(spec)?;
    debug_assert_eq!(spec.order() + 1, order);
    match how {
        HalfConstruction::Mseq => half_de_bruijn_from_m(&m),
        HalfConstruction::InverseD => inverse_d_morphism(&de_bruijn_from_m(&m)?, false),
    }
}

fn gen_seq(a: GenSeqArgs) -> Result<bool> {
    let seq = match a.kind {
        SeqKind::MSequence => lfsr_m_sequence(&lfsr(a.order, a.taps, a.state.as_deref())?)?,
        SeqKind::DeBruijn => de_bruijn_from_m(&lfsr_m_sequence(&lfsr(
            a.order,
            a.taps,
            a.state.as_deref(),
        )?)?)?,
        SeqKind::HalfDeBruijn => {
            if a.order < 3 {
                return Err(Error::UnsupportedOrder {
                    order: a.order,
                    min: 3,
                    max: 25,
                });
            }
            half_de_bruijn(
                a.order,
                a.half,
                &lfsr(a.order - 1, a.taps, a.state.as_deref())?,
            )?
        }
    };
    formats::write_sequence(&a.out, &seq)?;
    print_json(&json!({
        "path": a.out,
        "sidecar": formats::sidecar_path(&a.out),
        "kind": seq.kind(),
        "order": seq.order(),
        "length": seq.len(),
    }))?;
    Ok(true)
}

/// Reads a sequence file and insists on the given kind and order.
fn load_sequence(path: &Path, order: usize, kind: SequenceKind) -> Result<BitSequence> {
    let seq = formats::read_sequence(path)?;
    if seq.kind() == kind && seq.order() == order {
        return Ok(seq);
    }
    let typed = BitSequence::with_kind(seq.bits().to_vec(), order, kind)?;
    Ok(match seq.provenance() {
        Some(p) => typed.with_provenance(p.clone()),
        None => typed,
    })
}

fn gen_pattern(a: GenPatternArgs) -> Result<bool> {
    let t = match &a.vertical {
        Some(path) => load_sequence(path, a.k, SequenceKind::HalfDeBruijn)?,
        None => {
            if a.k < 3 {
                return Err(Error::UnsupportedOrder {
                    order: a.k,
                    min: 3,
                    max: 25,
                });
            }
            half_de_bruijn(a.k, a.half, &LfsrSpec::default_for(a.k - 1)?)?
        }
    };
    let s = match &a.horizontal {
        Some(path) => load_sequence(path, a.n, SequenceKind::DeBruijn)?,
        None => de_bruijn_from_m(&lfsr_m_sequence(&LfsrSpec::default_for(a.n)?)?)?,
    };
    let mut pattern = product(&t, &s)?;
    if a.acyclic {
        pattern = pattern.extend_acyclic()?;
    }
    formats::write_pattern(&a.out, &pattern)?;
    print_json(&json!({
        "path": a.out,
        "sidecar": formats::sidecar_path(&a.out),
        "k": pattern.k(),
        "n": pattern.n(),
        "rows": pattern.rows(),
        "cols": pattern.cols(),
        "mode": pattern.mode(),
    }))?;
    Ok(true)
}

fn locate(a: LocateArgs) -> Result<bool> {
    let seq = formats::read_sequence(&a.sequence)?;
    let strategy = match a.strategy {
        StrategyArg::Scan => Strategy::Scan,
        StrategyArg::Table => Strategy::Table,
        StrategyArg::Milestone => Strategy::Milestone {
            spacing: a
                .spacing
                .unwrap_or_else(|| selfloc::sequences::default_spacing(seq.order())),
        },
    };
    let (window, width) = parse_word(&a.window)?;
    if width != seq.order() {
        return Err(Error::WidthMismatch {
            expected: seq.order(),
            found: width,
        });
    }
    let locator = Locator::new(&seq, strategy)?;
    match locator.locate(window) {
        Ok(found) => {
            print_json(&json!({
                "status": "ok",
                "window": a.window,
                "position": found.position,
                "complemented": found.complemented,
                "steps": found.steps,
            }))?;
            Ok(true)
        }
        Err(e @ Error::NoSuchWindow { .. }) => {
            print_json(&json!({
                "status": "not_found",
                "window": a.window,
                "reason": e.to_string(),
            }))?;
            Ok(false)
        }
        Err(e) => Err(e),
    }
}

fn read_sidecar(path: &Path) -> Result<formats::PatternSidecar> {
    if path.extension().is_some_and(|e| e == "json") {
        formats::read_pattern_sidecar(path)
    } else {
        formats::read_pattern_sidecar(&formats::sidecar_path(path))
    }
}

fn decode(a: DecodeArgs, rect: bool) -> Result<bool> {
    let (t, s) = read_sidecar(&a.pattern)?.sequences()?;
    let file: SampleFile = serde_json::from_str(&fs::read_to_string(&a.sample)?)?;
    let (tl, sl) = (Locator::table(&t), Locator::table(&s));
    let report = match (file.to_sample()?, rect) {
        (Sample::Rect(sample), true) => ReportFile::from_rect(&robust_decode(&sample, &tl, &sl)?),
        (Sample::Cross(sample), false) => {
            let outcome = decode_cross(&sample, &tl, &sl);
            if let Err(e @ (Error::WidthMismatch { .. } | Error::Dimension { .. })) = outcome {
                return Err(e);
            }
            ReportFile::from_cross(&sample, &outcome)
        }
        (_, true) => {
            return Err(Error::Parse(
                "decode-rect needs a sample of kind \"rect\"".into(),
            ))
        }
        (_, false) => {
            return Err(Error::Parse(
                "decode-cross needs a sample of kind \"cross\"".into(),
            ))
        }
    };
    print_json(&report)?;
    Ok(report.is_ok())
}

fn census_json(report: &UniquenessReport) -> serde_json::Value {
    json!({
        "passed": report.passed(),
        "positions": report.positions,
        "distinct": report.distinct,
        "expected": report.expected,
        "missing": report.missing(),
        "duplicates": report.duplicates,
        "malformed": report.malformed,
    })
}

fn census_problems(what: &str, report: &UniquenessReport, out: &mut Vec<String>) {
    if !report.duplicates.is_empty() {
        out.push(format!("{} duplicate {what}", report.duplicates.len()));
    }
    if !report.malformed.is_empty() {
        out.push(format!("{} malformed {what}", report.malformed.len()));
    }
    if report.missing() > 0 {
        out.push(format!("{} {what} values missing", report.missing()));
    }
}

fn verify_pattern(a: &VerifyArgs, pattern: &PatternArray) -> Result<bool> {
    let (k, n) = (pattern.k(), pattern.n());
    let geometry = match (a.i0, a.j0) {
        (Some(i0), Some(j0)) => CrossGeometry::new(k, n, i0, j0)?,
        _ => CrossGeometry::centered(k, n)?,
    };
    let windows = pattern.verify_rect_uniqueness(k, n);
    let crosses = pattern.verify_cross_uniqueness(geometry);
    let passed = windows.passed() && crosses.passed();
    let mut problems = Vec::new();
    census_problems("windows", &windows, &mut problems);
    census_problems("crosses", &crosses, &mut problems);
    let mut value = json!({
        "target": "pattern",
        "passed": passed,
        "k": k,
        "n": n,
        "rows": pattern.rows(),
        "cols": pattern.cols(),
        "mode": pattern.mode(),
        "geometry": geometry,
        "windows": census_json(&windows),
        "crosses": census_json(&crosses),
    });
    if !passed {
        value["reason"] = json!(problems.join(", "));
    }
    print_json(&value)?;
    Ok(passed)
}

fn verify_sequence(a: &VerifyArgs) -> Result<bool> {
    let bits = parse_bits(fs::read_to_string(&a.path)?.trim())?;
    let sidecar = formats::sidecar_path(&a.path);
    let (kind, order) = match (a.kind, a.order) {
        (Some(kind), Some(order)) => (kind.into(), order),
        _ if sidecar.exists() => {
            let meta: formats::SequenceSidecar =
                serde_json::from_str(&fs::read_to_string(&sidecar)?)?;
            (meta.kind, meta.order)
        }
        _ => {
            let c = BitSequence::classify(bits.clone())?;
            (c.kind(), c.order())
        }
    };
    let census = match kind {
        SequenceKind::MSequence => Some(check_m_sequence(&bits, order)),
        SequenceKind::DeBruijn => Some(check_de_bruijn(&bits, order)),
        SequenceKind::HalfDeBruijn => Some(check_half_de_bruijn(&bits, order)),
        SequenceKind::Raw => None,
    };
    let reason = match &census {
        Some(report) => report.violation.as_ref().map(|v| v.to_string()),
        None => Some("not an M-sequence, de Bruijn or half de Bruijn sequence of any order".into()),
    };
    let mut value = json!({
        "target": "sequence",
        "passed": reason.is_none(),
        "kind": kind,
        "order": order,
        "length": bits.len(),
    });
    if kind == SequenceKind::MSequence && order < 63 {
        value["pair_census"] = json!(complement_pair_census(&bits, order + 1, true).is_ok());
    }
    if let Some(r) = &reason {
        value["reason"] = json!(r);
    }
    print_json(&value)?;
    Ok(reason.is_none())
}

fn verify(a: VerifyArgs) -> Result<bool> {
    let head = fs::read(&a.path)?;
    if head.starts_with(b"P1") {
        let pattern = formats::read_pattern(&a.path)?;
        verify_pattern(&a, &pattern)
    } else {
        verify_sequence(&a)
    }
}

fn write_csv(rows: &[CsvRow], out: Option<&Path>) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(fs::File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<bool> {
    let k = a.k.unwrap_or(a.n);
    let sim = Simulator::new(k, a.n)?;
    let rows =
        a.p.iter()
            .map(|&p| {
                let r = sim.success_rate(p, a.trials, a.seed)?;
                Ok(CsvRow {
                    p,
                    n: a.n,
                    analytic: r.analytic_sufficient,
                    empirical: Some(r.success_rate),
                    ci_low: Some(r.ci_low),
                    ci_high: Some(r.ci_high),
                    trials: Some(r.trials),
                })
            })
            .collect::<Result<Vec<_>>>()?;
    write_csv(&rows, a.out.as_deref())?;
    Ok(true)
}

fn table1(a: Table1Args) -> Result<bool> {
    let entries = reproduce_table1();
    if a.csv {
        let rows: Vec<CsvRow> = entries
            .iter()
            .map(|e| CsvRow {
                p: e.p,
                n: e.n,
                analytic: e.value,
                empirical: None,
                ci_low: None,
                ci_high: None,
                trials: None,
            })
            .collect();
        write_csv(&rows, None)?;
    } else {
        print!("{}", format_table1(&entries));
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}

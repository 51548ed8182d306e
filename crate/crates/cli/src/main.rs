//! `metafib` command-line tool.
//!
//! Exit codes: 0 success, 1 internal failure, 2 invalid input, 3 the
//! sequence dies, 4 a verification mismatch.

use std::fs;
use std::io::{self, Read, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use metafib::construct::Bundle;
use metafib::format::{self, SequenceFormat};
use metafib::metafib::Death;
use metafib::verify::{self, CaseTrace, Landing, PatternViolation, VerifyReport};
use metafib::{extract_subsequence, Construction, EvalError, LinearRecurrence, SeededRecurrence, Sequence};
use num_bigint::BigUint;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "metafib", version, about = "Meta-Fibonacci sequences containing linear recurrent subsequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the meta-Fibonacci construction for a linear recurrence.
    Construct(ConstructArgs),
    /// Evaluate a nested recurrence from its initial condition.
    Eval(EvalArgs),
    /// Check a construction bundle numerically.
    Verify(VerifyArgs),
    /// Break down the recurrence of a construction at one index.
    Trace(TraceArgs),
    /// Take every stride-th term of a sequence file.
    Extract(ExtractArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Bfile,
    Csv,
    Json,
}

impl From<FormatArg> for SequenceFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Bfile => SequenceFormat::Bfile,
            FormatArg::Csv => SequenceFormat::Csv,
            FormatArg::Json => SequenceFormat::Json,
        }
    }
}

#[derive(Args)]
struct ConstructArgs {
    /// LinearRecurrence JSON file (`-` for stdin); alternative to the inline flags.
    input: Option<PathBuf>,
    /// Order; taken from the length of --coeffs when omitted.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated b_1..b_k.
    #[arg(long, value_delimiter = ',')]
    coeffs: Option<Vec<u64>>,
    /// Comma-separated a_0..a_{k-1}.
    #[arg(long, value_delimiter = ',')]
    initial: Option<Vec<String>>,
    /// Use this h instead of the minimal one; it must be valid.
    #[arg(long)]
    h: Option<usize>,
    /// Write the bundle here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write the first N terms of the constructed sequence.
    #[arg(long)]
    terms: Option<usize>,
    /// Where to write the terms; defaults to stdout when --output is given.
    #[arg(long)]
    terms_output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "bfile")]
    format: FormatArg,
}

#[derive(Args)]
struct EvalArgs {
    /// Recurrence JSON `{"n0", "coeffs", "initial"}` or a construction bundle.
    input: PathBuf,
    /// Number of terms.
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value = "bfile")]
    format: FormatArg,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Bundle JSON written by `construct`.
    bundle: PathBuf,
    /// Number of terms to compare against the interleaving.
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// Also compare R(2kn) with a_n for this many n.
    #[arg(long)]
    subsequence: Option<usize>,
}

#[derive(Args)]
struct TraceArgs {
    /// Bundle JSON written by `construct`.
    bundle: PathBuf,
    /// Index to trace; must exceed h.
    #[arg(long)]
    at: usize,
    /// Emit the trace as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExtractArgs {
    /// Sequence file in b-file, CSV or JSON form (detected from content).
    input: PathBuf,
    /// Keep every stride-th term.
    #[arg(long)]
    stride: NonZeroUsize,
    /// Position (not index) of the first term to keep.
    #[arg(long, default_value_t = 0)]
    offset: usize,
    #[arg(long, value_enum, default_value = "bfile")]
    format: FormatArg,
    /// Write here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct TraceOutput<'a> {
    #[serde(flatten)]
    trace: &'a CaseTrace,
    pattern: Option<&'a PatternViolation>,
}

#[derive(Serialize)]
struct DeathReport<'a> {
    death: &'a Death,
}

enum Failure {
    Internal(anyhow::Error),
    Invalid(anyhow::Error),
    Death(Death),
    Mismatch,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Death(_) => 3,
            Failure::Mismatch => 4,
        }
    }
}

trait InvalidExt<T> {
    fn invalid(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> InvalidExt<T> for Result<T, E> {
    fn invalid(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Invalid(e.into()))
    }
}

fn internal(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Internal(e.into())
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(internal),
        None => io::stdout().write_all(text.as_bytes()).map_err(internal),
    }
}

fn eval_or_death(seeded: &SeededRecurrence, n: usize) -> Result<Sequence, Failure> {
    match seeded.eval(n) {
        Ok(seq) => Ok(seq),
        Err(EvalError::Death(d)) => Err(Failure::Death(d)),
        Err(e) => Err(Failure::Invalid(e.into())),
    }
}

fn load_bundle(path: &Path) -> Result<Construction, Failure> {
    let text = read_input(path).invalid()?;
    let bundle: Bundle = serde_json::from_str(&text)
        .with_context(|| format!("parsing bundle {}", path.display()))
        .invalid()?;
    Construction::try_from(bundle).invalid()
}

fn recurrence_from_args(args: &ConstructArgs) -> anyhow::Result<LinearRecurrence> {
    if let Some(path) = &args.input {
        if args.coeffs.is_some() || args.initial.is_some() || args.k.is_some() {
            bail!("give either an input file or --k/--coeffs/--initial, not both");
        }
        let text = read_input(path)?;
        return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
    }
    let coeffs = args.coeffs.clone().ok_or_else(|| anyhow!("--coeffs is required without an input file"))?;
    let initial = args.initial.clone().ok_or_else(|| anyhow!("--initial is required without an input file"))?;
    if let Some(k) = args.k {
        if k != coeffs.len() {
            bail!("--k {k} but --coeffs has {} entries", coeffs.len());
        }
    }
    let initial = initial
        .iter()
        .map(|s| {
            let s = s.trim();
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                bail!("invalid initial term {s:?}");
            }
            Ok(s.parse::<BigUint>()?)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(LinearRecurrence::new(coeffs, initial)?)
}

fn construct(args: ConstructArgs) -> Result<(), Failure> {
    let rec = recurrence_from_args(&args).invalid()?;
    if args.terms.is_some() && args.output.is_none() && args.terms_output.is_none() {
        return Err(Failure::Invalid(anyhow!(
            "--terms needs --output or --terms-output so the bundle and the terms do not share stdout"
        )));
    }
    let c = match args.h {
        Some(h) => Construction::build_with_h(&rec, h).invalid()?,
        None => Construction::build(&rec).map_err(internal)?,
    };
    let mut json = serde_json::to_string(&c.to_bundle()).map_err(internal)?;
    json.push('\n');
    write_output(args.output.as_deref(), &json)?;

    if let Some(n) = args.terms {
        let seq = eval_or_death(&c.seeded(), n)?;
        let text = format::write_as(args.format.into(), &seq);
        write_output(args.terms_output.as_deref(), &text)?;
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<(), Failure> {
    let text = read_input(&args.input).invalid()?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", args.input.display()))
        .invalid()?;
    let seeded: SeededRecurrence = if value.get("meta").is_some() {
        let bundle: Bundle = serde_json::from_value(value).context("parsing bundle").invalid()?;
        Construction::try_from(bundle).invalid()?.seeded()
    } else {
        serde_json::from_value(value).context("parsing recurrence").invalid()?
    };
    let seq = eval_or_death(&seeded, args.n)?;
    write_output(args.output.as_deref(), &format::write_as(args.format.into(), &seq))
}

fn report_failure(report: &VerifyReport) -> Option<Failure> {
    if let Some(d) = &report.death {
        Some(Failure::Death(d.clone()))
    } else if !report.pass {
        Some(Failure::Mismatch)
    } else {
        None
    }
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let c = load_bundle(&args.bundle)?;
    let mut reports = vec![verify::check_theorem(&c, args.n).invalid()?];
    if let Some(count) = args.subsequence {
        reports.push(verify::check_subsequence(&c, count).invalid()?);
    }
    let mut out = String::new();
    for r in &reports {
        out.push_str(&serde_json::to_string(r).map_err(internal)?);
        out.push('\n');
    }
    write_output(None, &out)?;
    match reports.iter().find_map(report_failure) {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn render_trace(t: &CaseTrace) -> String {
    let n = t.n;
    let coef = |c: u64| if c == 1 { String::new() } else { format!("{c} ") };
    let join = |parts: Vec<String>| parts.join(" + ");
    let mut lines = vec![
        join(t.terms.iter().map(|x| format!("{}M({n} - M({}))", coef(x.coefficient), x.inner_index)).collect()),
        join(t.terms.iter().map(|x| format!("{}M({n} - {})", coef(x.coefficient), x.inner_value)).collect()),
        join(t.terms.iter().map(|x| format!("{}M({})", coef(x.coefficient), x.argument)).collect()),
        join(
            t.terms
                .iter()
                .map(|x| match x.coefficient {
                    1 => x.value.to_string(),
                    c => format!("{c}*{}", x.value),
                })
                .collect(),
        ),
        t.total.to_string(),
    ];
    let head = format!("M({n}) = ");
    let pad = " ".repeat(head.len() - 2);
    let mut out = String::new();
    for (i, l) in lines.drain(..).enumerate() {
        if i == 0 {
            out.push_str(&head);
        } else {
            out.push_str(&pad);
            out.push_str("= ");
        }
        out.push_str(&l);
        out.push('\n');
    }
    for x in &t.terms {
        let landing = match x.landing {
            Landing::VanishesNegative => "vanishes (negative argument)".to_string(),
            Landing::LandsOddSlot { m, j } => format!("odd slot m = {m}, j = {j}"),
            Landing::LandsEvenSlot { m, j } => format!("even slot m = {m}, j = {j}"),
        };
        out.push_str(&format!("  offset {}: {landing}\n", x.offset));
    }
    out
}

fn trace(args: TraceArgs) -> Result<(), Failure> {
    let c = load_bundle(&args.bundle)?;
    let t = match verify::trace_case(&c, args.at) {
        Ok(t) => t,
        Err(verify::VerifyError::Eval(EvalError::Death(d))) => return Err(Failure::Death(d)),
        Err(e) => return Err(Failure::Invalid(e.into())),
    };
    let pattern = t.check_pattern(&c);
    let out = if args.json {
        let out = TraceOutput {
            trace: &t,
            pattern: pattern.as_ref().err(),
        };
        let mut s = serde_json::to_string(&out).map_err(internal)?;
        s.push('\n');
        s
    } else {
        let mut s = render_trace(&t);
        let parity = match t.slot.parity {
            metafib::construct::Parity::Even => "even",
            metafib::construct::Parity::Odd => "odd",
        };
        s.push_str(&format!("n = {}: {parity} slot m = {}, j = {}; ", t.n, t.slot.m, t.slot.j));
        match &pattern {
            Ok(()) => s.push_str("case pattern holds\n"),
            Err(v) => s.push_str(&format!("case pattern violated: {v}\n")),
        }
        s
    };
    write_output(None, &out)?;
    pattern.map_err(|_| Failure::Mismatch)
}

fn extract(args: ExtractArgs) -> Result<(), Failure> {
    let text = read_input(&args.input).invalid()?;
    let seq = format::parse_sequence(&text)
        .with_context(|| format!("parsing {}", args.input.display()))
        .invalid()?;
    if !seq.is_empty() && args.offset >= seq.len() {
        return Err(Failure::Invalid(anyhow!(
            "offset {} is past the {} terms in the file",
            args.offset,
            seq.len()
        )));
    }
    let out = Sequence {
        start: 0,
        values: extract_subsequence(&seq.values, args.stride, args.offset),
    };
    write_output(args.output.as_deref(), &format::write_as(args.format.into(), &out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => construct(a),
        Command::Eval(a) => eval(a),
        Command::Verify(a) => verify(a),
        Command::Trace(a) => trace(a),
        Command::Extract(a) => extract(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Internal(e) | Failure::Invalid(e) => eprintln!("error: {e:#}"),
                Failure::Death(d) => {
                    let json = serde_json::to_string(&DeathReport { death: d })
                        .unwrap_or_else(|_| format!("{d:?}"));
                    eprintln!("{json}");
                }
                Failure::Mismatch => {}
            }
            ExitCode::from(f.code())
        }
    }
}

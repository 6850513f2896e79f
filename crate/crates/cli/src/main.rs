mod plot;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use genlab_core::averaging::{density_estimate, AveragingMode};
use genlab_core::chowla::{chowla_scan, correlation_report, CorrelationReport, CorrelationSpec};
use genlab_core::grid::default_grid;
use genlab_core::limitsets::{
    estimate_limit_set_with, frequency_trace, frequency_traces, hull_inclusion_report, FrequencyTrace,
    LimitSetEstimate, DEFAULT_SHIFT_TOLERANCE,
};
use genlab_core::measures::MetricBasis;
use genlab_core::symbolic::{sequence_by_name, SymbolicSequence};
use genlab_core::verify::verify_example;
use genlab_core::{ArithmeticKind, ExampleName, Grid, Sieve};
use serde_json::json;

use plot::{line_plot, Series};

/// Empirical and logarithmic frequencies of symbolic sequences, limit-set
/// estimates and Möbius/Liouville correlation sums.
#[derive(Parser)]
#[command(name = "genlab", version)]
struct Cli {
    /// Maximum number of worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the first symbols of a sequence.
    Generate(GenerateArgs),
    /// Tabulate μ, λ or μ² over a range.
    Sieve(SieveArgs),
    /// Frequency traces of every word of a given length along a grid of N.
    Freqs(FreqsArgs),
    /// Asymptotic and logarithmic density estimates of one word.
    Densities(DensitiesArgs),
    /// Estimate the Cesàro and logarithmic limit sets at a fixed depth.
    Limitset(LimitsetArgs),
    /// Correlation sums of μ, λ or μ² along a grid.
    Chowla(ChowlaArgs),
    /// Run the numerical checks for one of the three example sequences.
    VerifyExample(VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
    Raw,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Cesaro,
    Log,
    Both,
}

#[derive(Args)]
struct GenerateArgs {
    /// example1, example2, example3, mobius, liouville, squarefree or const:<digit>.
    #[arg(long)]
    name: String,
    #[arg(long, default_value_t = 100)]
    count: u64,
    /// Index of the first symbol (0-based).
    #[arg(long, default_value_t = 0)]
    start: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SieveArgs {
    #[arg(long)]
    kind: ArithmeticKind,
    #[arg(long, default_value_t = 1)]
    from: u64,
    /// Last n, inclusive.
    #[arg(long)]
    to: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FreqsArgs {
    #[arg(long)]
    seq: String,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// pow2:a:b, pow3:a:b, pow10:a:b, geometric:ratio:min:max or a list; join with '+'.
    #[arg(long)]
    grid: Option<Grid>,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensitiesArgs {
    #[arg(long)]
    seq: String,
    #[arg(long)]
    word: String,
    #[arg(long)]
    grid: Option<Grid>,
    /// Fraction of grid points (the largest) used for lower/upper values.
    #[arg(long, default_value_t = 0.5)]
    tail: f64,
    /// Tolerance for reporting violations of the density chain.
    #[arg(long, default_value_t = 1e-3)]
    chain_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LimitsetArgs {
    #[arg(long)]
    seq: String,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long)]
    grid: Option<Grid>,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value_t = 0.5)]
    tail: f64,
    /// Metric terms J (default: every cylinder up to the depth).
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SHIFT_TOLERANCE)]
    shift_tol: f64,
    /// Write the estimates as JSON to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ChowlaArgs {
    #[arg(long)]
    kind: ArithmeticKind,
    /// Comma-separated positive shifts, e.g. 1,2.
    #[arg(long, value_delimiter = ',')]
    shifts: Vec<u64>,
    /// Comma-separated exponents j_0,...,j_k in {1,2} (default all 1).
    #[arg(long, value_delimiter = ',')]
    exponents: Vec<u8>,
    /// Enumerate every spec with shifts up to this bound instead of a single spec.
    #[arg(long, conflicts_with_all = ["shifts", "exponents"])]
    max_shift: Option<u64>,
    /// Largest number of shifts in an enumerated spec.
    #[arg(long, default_value_t = 1, requires = "max_shift")]
    max_order: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Cesaro)]
    mode: ModeArg,
    #[arg(long, default_value = "pow10:3:6")]
    grid: Grid,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    name: ExampleName,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

/// Failures of the computation itself, as opposed to failed checks.
enum Outcome {
    Pass,
    ChecksFailed,
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn reject(format: Format, allowed: &[Format], command: &str) -> Result<()> {
    if !allowed.contains(&format) {
        let name = format.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        bail!("{command} does not support --format {name}");
    }
    Ok(())
}

fn load_sequence(name: &str) -> Result<std::sync::Arc<dyn SymbolicSequence>> {
    Ok(sequence_by_name(name)?)
}

/// Arithmetic sequences are sieved on demand, so their reach is bounded by
/// the sieve capacity.
fn check_reach(seq: &str, last_index: u64) -> Result<()> {
    if seq.parse::<ArithmeticKind>().is_ok() {
        Sieve::from_env()?.check(last_index + 1)?;
    }
    Ok(())
}

fn grid_or_default(seq: &str, grid: Option<Grid>) -> Result<Grid> {
    if let Some(g) = grid {
        return Ok(g);
    }
    Ok(match seq.parse::<ExampleName>() {
        Ok(ex) => default_grid(ex, 16, 1 << 20)?,
        Err(_) => Grid::geometric(1.1, 16, 1_000_000)?,
    })
}

fn generate(a: GenerateArgs) -> Result<Outcome> {
    reject(a.format, &[Format::Csv, Format::Raw, Format::Json], "generate")?;
    let x = load_sequence(&a.name)?;
    let end = a.start.checked_add(a.count).context("index range overflows")?;
    check_reach(&a.name, end)?;
    if a.count > 100_000_000 {
        bail!("count {} exceeds 100000000", a.count);
    }
    let mut letters = vec![0u8; a.count as usize];
    x.fill(a.start, &mut letters);
    let alphabet = x.alphabet();
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("n,symbol\n");
            for (i, &l) in letters.iter().enumerate() {
                let _ = writeln!(s, "{},{}", a.start + i as u64, alphabet.symbol(l));
            }
            s
        }
        Format::Raw => alphabet.format_word(&letters) + "\n",
        _ => to_json(&json!({
            "sequence": x.name(),
            "alphabet": alphabet,
            "start": a.start,
            "symbols": letters.iter().map(|&l| alphabet.symbol(l)).collect::<Vec<_>>(),
        }))?,
    };
    emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

fn sieve(a: SieveArgs) -> Result<Outcome> {
    reject(a.format, &[Format::Csv, Format::Raw, Format::Json], "sieve")?;
    if a.to < a.from {
        bail!("--to must be at least --from");
    }
    let seg = Sieve::from_env()?.range(a.kind, a.from, a.to + 1)?;
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("n,value\n");
            for (i, v) in seg.values.iter().enumerate() {
                let _ = writeln!(s, "{},{v}", a.from + i as u64);
            }
            s
        }
        Format::Raw => {
            let vals: Vec<String> = seg.values.iter().map(|v| v.to_string()).collect();
            vals.join(",") + "\n"
        }
        _ => to_json(&seg)?,
    };
    emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

fn traces(x: &dyn SymbolicSequence, depth: usize, grid: &Grid, mode: ModeArg) -> Result<Vec<FrequencyTrace>> {
    Ok(match mode {
        ModeArg::Both => {
            let (c, l) = frequency_traces(x, depth, grid)?;
            vec![c, l]
        }
        ModeArg::Cesaro => vec![frequency_trace(x, depth, grid, AveragingMode::Cesaro)?],
        ModeArg::Log => vec![frequency_trace(x, depth, grid, AveragingMode::Logarithmic)?],
    })
}

fn freqs(a: FreqsArgs) -> Result<Outcome> {
    reject(a.format, &[Format::Csv, Format::Json, Format::Svg], "freqs")?;
    let x = load_sequence(&a.seq)?;
    let grid = grid_or_default(&a.seq, a.grid)?;
    check_reach(&a.seq, grid.last() + a.depth as u64)?;
    let traces = traces(x.as_ref(), a.depth, &grid, a.mode)?;
    let alphabet = x.alphabet();
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("N,mode,word,value\n");
            for t in &traces {
                for e in &t.entries {
                    for (w, v) in e.measure.iter_words() {
                        let _ = writeln!(s, "{},{},{},{v}", e.n, t.mode.as_str(), alphabet.format_word(&w));
                    }
                }
            }
            s
        }
        Format::Json => to_json(&json!({
            "sequence": x.name(),
            "depth": a.depth,
            "grid": grid.points(),
            "traces": traces,
        }))?,
        _ => {
            let mut series = Vec::new();
            for t in &traces {
                let words: Vec<Vec<u8>> = t.entries[0].measure.iter_words().map(|(w, _)| w).collect();
                for (i, w) in words.iter().enumerate() {
                    series.push(Series {
                        label: format!("{} {}", t.mode.as_str(), alphabet.format_word(w)),
                        points: t.entries.iter().map(|e| (e.n as f64, e.measure.masses()[i])).collect(),
                        dashed: t.mode == AveragingMode::Logarithmic,
                    });
                }
            }
            line_plot(&format!("{}: word frequencies, depth {}", x.name(), a.depth), "frequency", &series)
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

fn densities(a: DensitiesArgs) -> Result<Outcome> {
    reject(a.format, &[Format::Csv, Format::Json, Format::Svg], "densities")?;
    if !(a.chain_tol > 0.0) {
        bail!("--chain-tol must be positive");
    }
    let x = load_sequence(&a.seq)?;
    let grid = grid_or_default(&a.seq, a.grid)?;
    check_reach(&a.seq, grid.last() + a.word.len() as u64)?;
    let d = density_estimate(x.as_ref(), &a.word, grid.points(), a.tail)?;
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("N,asymptotic,logarithmic\n");
            for ((n, u), v) in d.grid.iter().zip(&d.asymptotic).zip(&d.logarithmic) {
                let _ = writeln!(s, "{n},{u},{v}");
            }
            s
        }
        Format::Json => {
            let mut value = serde_json::to_value(&d)?;
            value["sequence"] = json!(x.name());
            value["chain_violations"] = json!(d.chain_violations(a.chain_tol));
            to_json(&value)?
        }
        _ => {
            let pts = |v: &[f64]| d.grid.iter().zip(v).map(|(&n, &y)| (n as f64, y)).collect();
            let series = [
                Series {
                    label: "asymptotic".into(),
                    points: pts(&d.asymptotic),
                    dashed: false,
                },
                Series {
                    label: "logarithmic".into(),
                    points: pts(&d.logarithmic),
                    dashed: true,
                },
            ];
            line_plot(&format!("{}: density of {}", x.name(), d.word), "density", &series)
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

fn summarize(est: &LimitSetEstimate, s: &mut String, alphabet: &genlab_core::Alphabet) {
    let _ = writeln!(
        s,
        "{} limit set, depth {}: {} representative(s), eps {}, J {}, max tail gap {:.6}",
        est.mode.as_str(),
        est.depth,
        est.representatives.len(),
        est.epsilon,
        est.metric_terms,
        est.max_tail_gap
    );
    for (i, r) in est.representatives.iter().enumerate() {
        let masses: Vec<String> = r
            .measure
            .iter_words()
            .map(|(w, m)| format!("{}={m:.6}", alphabet.format_word(&w)))
            .collect();
        let _ = writeln!(
            s,
            "  #{i} first N={} witnesses={} shift_defect={:.6}{} [{}]",
            r.witnesses[0],
            r.witnesses.len(),
            r.shift_defect,
            if r.flagged { " FLAGGED" } else { "" },
            masses.join(" ")
        );
    }
}

fn limitset(a: LimitsetArgs) -> Result<Outcome> {
    if a.depth == 0 || a.depth > 4 {
        bail!("limit sets are supported for depth 1..=4");
    }
    if !(a.eps > 0.0) || !(a.shift_tol > 0.0) {
        bail!("--eps and --shift-tol must be positive");
    }
    let x = load_sequence(&a.seq)?;
    if x.alphabet().len() > 3 {
        bail!("limit sets are supported for alphabets of at most 3 symbols");
    }
    let grid = grid_or_default(&a.seq, a.grid)?;
    check_reach(&a.seq, grid.last() + a.depth as u64)?;
    let terms = a
        .terms
        .unwrap_or_else(|| MetricBasis::terms_within_depth(x.alphabet(), a.depth));
    let traces = traces(x.as_ref(), a.depth, &grid, a.mode)?;
    let estimates = traces
        .iter()
        .map(|t| estimate_limit_set_with(t, a.tail, a.eps, terms, a.shift_tol))
        .collect::<genlab_core::Result<Vec<_>>>()?;

    let mut text = String::new();
    for est in &estimates {
        summarize(est, &mut text, x.alphabet());
    }
    let mut doc = json!({
        "sequence": x.name(),
        "depth": a.depth,
        "grid": grid.points(),
        "estimates": estimates,
    });
    if let [v, vlog] = estimates.as_slice() {
        let report = hull_inclusion_report(vlog, v, terms)?;
        let _ = writeln!(
            text,
            "hull inclusion: max distance from logarithmic representatives to conv(Cesàro representatives) = {:.6}",
            report.max_distance
        );
        doc["hull_inclusion"] = serde_json::to_value(&report)?;
    }
    print!("{text}");
    if let Some(path) = &a.json {
        emit(Some(path), &to_json(&doc)?)?;
    }
    Ok(Outcome::Pass)
}

fn report_csv(r: &CorrelationReport) -> String {
    let mut s = String::from("shifts,exponents,N,numerator,value,prediction,conjectural\n");
    for ((spec, row), (nums, pred)) in r.specs.iter().zip(&r.values).zip(r.numerators.iter().zip(&r.predictions)) {
        let shifts: Vec<String> = spec.shifts.iter().map(|v| v.to_string()).collect();
        let exps: Vec<String> = spec.exponents.iter().map(|v| v.to_string()).collect();
        for ((n, v), num) in r.grid.iter().zip(row).zip(nums) {
            let (p, c) = match pred {
                Some(p) => (p.value.to_string(), p.conjectural.to_string()),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(s, "{},{},{n},{num},{v},{p},{c}", shifts.join(" "), exps.join(" "));
        }
    }
    s
}

fn chowla(a: ChowlaArgs) -> Result<Outcome> {
    reject(a.format, &[Format::Csv, Format::Json], "chowla")?;
    let mode = match a.mode {
        ModeArg::Cesaro => AveragingMode::Cesaro,
        ModeArg::Log => AveragingMode::Logarithmic,
        ModeArg::Both => bail!("chowla reports use a single averaging mode"),
    };
    let sieve = Sieve::from_env()?;
    let report = match a.max_shift {
        Some(max_shift) => chowla_scan(&sieve, a.kind, max_shift, a.max_order, &a.grid, mode)?,
        None => {
            let exponents = if a.exponents.is_empty() {
                vec![1; a.shifts.len() + 1]
            } else {
                a.exponents
            };
            let spec = CorrelationSpec::new(a.shifts, exponents, mode)?;
            correlation_report(&sieve, a.kind, vec![spec], &a.grid, mode)?
        }
    };
    let text = match a.format {
        Format::Csv => report_csv(&report),
        _ => to_json(&report)?,
    };
    emit(a.out.as_deref(), &text)?;
    Ok(Outcome::Pass)
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let report = verify_example(a.name)?;
    println!("{report}");
    if let Some(path) = &a.json {
        emit(Some(path), &to_json(&report)?)?;
    }
    Ok(if report.passed() {
        Outcome::Pass
    } else {
        Outcome::ChecksFailed
    })
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Sieve(a) => sieve(a),
        Command::Freqs(a) => freqs(a),
        Command::Densities(a) => densities(a),
        Command::Limitset(a) => limitset(a),
        Command::Chowla(a) => chowla(a),
        Command::VerifyExample(a) => verify(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

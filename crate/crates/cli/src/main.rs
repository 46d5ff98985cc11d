// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! `ampopt`: synthesize, predict, optimize and simulate amplitude
//! amplification circuits.
//!
//! Exit codes: 0 success, 2 usage error, 3 bad input data, 4 internal
//! invariant violation.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ampopt_core::noise::{synthetic_circuit, GateCounts};
use ampopt_core::predict::{find_inflection, format_sig12, optimize_circuit_with, predict_curve_with};
use ampopt_core::sim::{success_probability, sweep, trajectory_sample};
use ampopt_core::synth::{build_amplification_circuit, GroverSpec};
use ampopt_core::{qasm, Circuit, Criterion, MarkedSet, NoiseProfile, PredictOptions, PredictionCurve};
use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ampopt", version, about = "Noise-aware iteration count selection for Grover circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an instrumented circuit for a set of marked states.
    Synth(SynthArgs),
    /// Predict success per iteration under a noise profile.
    Predict(PredictArgs),
    /// Drop iterations past the predicted inflection point.
    Optimize(OptimizeArgs),
    /// Simulate the circuit under noise and compare with the prediction.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    n: usize,
    /// Comma-separated states, binary (qubit n-1 first) or 0x-prefixed hex.
    #[arg(long)]
    marked: String,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum CriterionArg {
    Peak,
    #[value(name = "paper-literal", alias = "literal")]
    Literal,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Peak => Criterion::Peak,
            CriterionArg::Literal => Criterion::Literal,
        }
    }
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Noise profile JSON.
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, value_enum, default_value = "peak")]
    criterion: CriterionArg,
    /// Count preamble gate noise toward every iteration.
    #[arg(long)]
    include_preamble_noise: bool,
}

impl ModelArgs {
    fn options(&self) -> PredictOptions {
        PredictOptions {
            criterion: self.criterion.into(),
            include_preamble_noise: self.include_preamble_noise,
        }
    }
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long, required_unless_present = "counts_from_table", conflicts_with = "counts_from_table")]
    circuit: Option<PathBuf>,
    /// Per-iteration `rz,sx,cx` tallies; builds a synthetic circuit instead of
    /// reading one.
    #[arg(long, value_name = "RZ,SX,CX", requires = "n")]
    counts_from_table: Option<String>,
    /// Qubit count for `--counts-from-table`.
    #[arg(long)]
    n: Option<usize>,
    /// Marked-state count for `--counts-from-table`.
    #[arg(long, default_value_t = 1, requires = "counts_from_table")]
    m: u64,
    #[arg(long, requires = "counts_from_table")]
    iterations: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the prediction curve as CSV.
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    marked: String,
    #[command(flatten)]
    model: ModelArgs,
    /// Sample this many Pauli trajectories per iteration count instead of
    /// evolving the exact density matrix.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, requires = "shots")]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Internal(_) => 4,
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn internal<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Internal(e.into())
}

fn parse_marked(n: usize, list: &str) -> Result<MarkedSet> {
    let mut states = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let value = if let Some(hex) = item.strip_prefix("0x").or_else(|| item.strip_prefix("0X")) {
            u64::from_str_radix(hex, 16).map_err(|e| input(anyhow!("bad hex state `{item}`: {e}")))?
        } else {
            if item.len() != n {
                return Err(input(anyhow!("state `{item}` has {} bits, expected {n}", item.len())));
            }
            u64::from_str_radix(item, 2).map_err(|e| input(anyhow!("bad binary state `{item}`: {e}")))?
        };
        states.push(value);
    }
    if states.is_empty() {
        return Err(input(anyhow!("no marked states given")));
    }
    MarkedSet::new(n, states).map_err(input)
}

fn parse_counts(text: &str) -> Result<GateCounts> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [rz, sx, cx] = parts[..] else {
        return Err(Failure::Usage(format!("--counts-from-table wants rz,sx,cx, got `{text}`")));
    };
    let num = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Failure::Usage(format!("--counts-from-table: `{s}` is not a count")))
    };
    Ok(GateCounts::new(num(rz)?, num(sx)?, num(cx)?))
}

fn read_circuit(path: &Path) -> Result<Circuit> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input)?;
    qasm::parse(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(input)
}

fn read_profile(path: &Path) -> Result<NoiseProfile> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(input)?;
    NoiseProfile::from_json(&text)
        .with_context(|| format!("loading profile {}", path.display()))
        .map_err(input)
}

/// Writes to `path`, or stdout when absent.
fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(input),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(c: &Circuit) -> Result<String> {
    qasm::emit(c).map_err(internal)
}

fn report_inflection(curve: &PredictionCurve) {
    eprintln!("inflection={}", curve.inflection);
    if curve.criterion == Criterion::Literal {
        let peak = find_inflection(curve, Criterion::Peak);
        if peak != curve.inflection {
            eprintln!("note: literal criterion chose {}, peak criterion would choose {peak}", curve.inflection);
        }
    }
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let marked = parse_marked(args.n, &args.marked)?;
    let mut spec = GroverSpec::new(marked);
    if let Some(t) = args.iterations {
        spec = spec.with_iterations(t);
    }
    let circuit = build_amplification_circuit(&spec).map_err(input)?;
    let text = emit(&circuit)?;
    write_output(args.out.as_deref(), &text)?;

    let meta = circuit.meta.as_ref().ok_or_else(|| internal(anyhow!("synthesized circuit lacks metadata")))?;
    let per = GateCounts::of(circuit.segment_gates(1).map_err(internal)?);
    let summary = format!(
        "theta={} t_opt={} iterations={} per_iteration rz={} sx={} cx={}",
        format_sig12(meta.theta),
        meta.t_opt,
        circuit.iteration_count(),
        per.rz,
        per.sx,
        per.cx
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let profile = read_profile(&args.model.profile)?;
    let circuit = match (&args.circuit, &args.counts_from_table) {
        (Some(path), _) => read_circuit(path)?,
        (None, Some(table)) => {
            let counts = parse_counts(table)?;
            let n = args.n.ok_or_else(|| Failure::Usage("--counts-from-table needs --n".into()))?;
            synthetic_circuit(n, args.m, counts, args.iterations).map_err(input)?
        }
        (None, None) => return Err(Failure::Usage("give --circuit or --counts-from-table".into())),
    };
    let curve = predict_curve_with(&circuit, &profile, args.model.options()).map_err(input)?;
    write_output(args.out.as_deref(), &curve.to_csv())?;
    report_inflection(&curve);
    Ok(())
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<()> {
    let profile = read_profile(&args.model.profile)?;
    let circuit = read_circuit(&args.circuit)?;
    let opt = optimize_circuit_with(&circuit, &profile, args.model.options()).map_err(input)?;
    if opt.circuit.iteration_count() != opt.curve.inflection {
        return Err(internal(anyhow!(
            "truncated circuit has {} iterations, expected {}",
            opt.circuit.iteration_count(),
            opt.curve.inflection
        )));
    }
    write_output(args.out.as_deref(), &emit(&opt.circuit)?)?;
    if let Some(path) = &args.curve {
        write_output(Some(path), &opt.curve.to_csv())?;
    }
    report_inflection(&opt.curve);
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let profile = read_profile(&args.model.profile)?;
    let circuit = read_circuit(&args.circuit)?;
    let marked = parse_marked(circuit.n, &args.marked)?;
    let curve = predict_curve_with(&circuit, &profile, args.model.options()).map_err(input)?;

    let observed: Vec<f64> = match args.shots {
        None => sweep(&circuit, &profile, &marked)
            .map_err(input)?
            .into_iter()
            .map(|(_, s)| s)
            .collect(),
        Some(shots) => {
            let seed = args.seed.unwrap_or(0);
            let mut out = Vec::with_capacity(circuit.iteration_count() + 1);
            for t in 0..=circuit.iteration_count() {
                let cut = circuit.truncate_after(t).map_err(internal)?;
                let dist = trajectory_sample(&cut, &profile, shots, seed).map_err(input)?;
                out.push(success_probability(&dist, &marked).map_err(input)?);
            }
            out
        }
    };

    let mut csv = String::from("t,amplification,cumulative_noise,estimated_success,observed_success\n");
    for (p, obs) in curve.all_points().zip(&observed) {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            p.t,
            format_sig12(p.amplification),
            format_sig12(p.cumulative_noise),
            format_sig12(p.estimated_success),
            format_sig12(*obs)
        );
    }
    write_output(args.out.as_deref(), &csv)?;

    let peak = (0..observed.len()).fold(0, |best, t| if observed[t] > observed[best] { t } else { best });
    report_inflection(&curve);
    eprintln!("observed_peak={peak}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Input(e) => eprintln!("error: {e:#}"),
                Failure::Internal(e) => eprintln!("internal error: {e:#}"),
            }
            ExitCode::from(f.code())
        }
    }
}

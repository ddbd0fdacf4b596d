use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use opsym_core::classify::Case;
use opsym_core::msym::TOL_MATRIX_ROUTE;
use opsym_core::opmat::composition_matrix;
use opsym_core::sweep::{run_sweep, SweepConfig, SWEEP_CSV_HEADER};
use opsym_core::verify::{run_suite, Status, Suite};
use opsym_core::{classify_with, run_defect_suite, DefectConfig, SelfMap, Which};
use serde_json::json;

const EXIT_VERIFY_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_DISAGREE: u8 = 3;

/// Composition operators on H² and their 2-complex symmetry with J.
#[derive(Parser)]
#[command(name = "opsym", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure the defect of one map and compare with the classifier.
    Check(CheckArgs),
    /// Measure a seeded random family of maps and write CSV.
    Sweep(SweepArgs),
    /// Run the verification suites.
    Verify(VerifyArgs),
    /// Dump the truncated composition matrix as CSV.
    Matrix(MatrixArgs),
}

#[derive(Args)]
struct DefectArgs {
    /// Truncation order N.
    #[arg(long = "n", default_value_t = 128)]
    n_trunc: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Sampling radius for w and z.
    #[arg(long, default_value_t = 0.7)]
    radius: f64,
    /// A defect below this counts as zero.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl DefectArgs {
    fn config(&self, seed: u64) -> Result<DefectConfig> {
        let cfg = DefectConfig { n_trunc: self.n_trunc, n_samples: self.samples, r_sample: self.radius, tol_zero: self.tol, seed };
        cfg.validate().map_err(input)?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct CheckArgs {
    /// `a,b,c,d` or `const:v`.
    #[arg(long, allow_hyphen_values = true)]
    map: String,
    #[arg(long, default_value = "direct")]
    which: Which,
    #[command(flatten)]
    defect: DefectArgs,
    #[arg(long, env = "OPSYM_SEED", default_value_t = 0)]
    seed: u64,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, env = "OPSYM_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Only draw maps of this case.
    #[arg(long)]
    case: Option<Case>,
    #[arg(long, default_value = "direct")]
    which: Which,
    #[command(flatten)]
    defect: DefectArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: Suite,
    #[arg(long, allow_hyphen_values = true)]
    map: Option<String>,
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long, allow_hyphen_values = true)]
    map: String,
    #[arg(long = "n", default_value_t = 8)]
    n_trunc: usize,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Marks an error as bad input (exit 2).
#[derive(Debug)]
struct InputError(String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input(e: impl std::fmt::Display) -> anyhow::Error {
    InputError(e.to_string()).into()
}

fn parse_map(s: &str) -> Result<SelfMap> {
    let phi: SelfMap = s.parse().map_err(|e| input(format!("invalid map `{s}`: {e}")))?;
    if !phi.is_disk_self_map() {
        return Err(input(format!("`{s}` is not a self-map of the disk")));
    }
    Ok(phi)
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    let file = File::create(path).map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn cmd_check(args: &CheckArgs) -> Result<u8> {
    let phi = parse_map(&args.map)?;
    let cfg = args.defect.config(args.seed)?;
    let report = run_defect_suite(&phi, args.which, &cfg).context("defect suite")?;
    let class = classify_with(&phi, args.which, &cfg).context("classification")?;
    let routes_agree = report.max_route_gap <= TOL_MATRIX_ROUTE;
    let agree = report.verdict == class.verdict && routes_agree;

    let mut out = io::stdout().lock();
    if args.json {
        let mut value = serde_json::to_value(&report)?;
        value["classification"] = serde_json::to_value(&class)?;
        value["max_route_gap"] = json!(report.max_route_gap);
        value["agree"] = json!(agree);
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    } else {
        writeln!(out, "map        {}", report.map)?;
        writeln!(out, "which      {}", report.which)?;
        writeln!(out, "measured   {} (max |F| = {:.3e} over {} samples)", report.verdict, report.max_abs_closed_form, report.n_samples)?;
        writeln!(out, "matrix     max |F| = {:.3e}, route gap {:.3e}", report.max_abs_matrix_route, report.max_route_gap)?;
        writeln!(out, "classified {} (case {}, {})", class.verdict, class.case, class.theorem)?;
        writeln!(out, "normal     {}", class.is_normal)?;
        let r = report.lemma4_residual;
        writeln!(out, "lemma4     |2q - 4p + pq| = {:.3e}", r.norm())?;
        writeln!(out, "{}", if agree { "agree" } else { "DISAGREE" })?;
    }
    Ok(if agree { 0 } else { EXIT_DISAGREE })
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8> {
    let mut out = create(&args.out)?;
    let cfg = SweepConfig {
        count: args.count,
        seed: args.seed,
        case: args.case,
        which: args.which,
        defect: args.defect.config(args.seed)?,
    };
    let rows = run_sweep(&cfg).context("sweep")?;
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for row in &rows {
        writeln!(out, "{}", row.csv_line())?;
    }
    out.flush()?;
    eprintln!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let phi = args.map.as_deref().map(parse_map).transpose()?;
    let checks = run_suite(args.suite, phi.as_ref()).context("verification")?;
    let mut out = io::stdout().lock();
    for check in &checks {
        writeln!(out, "{check}")?;
    }
    let count = |s| checks.iter().filter(|c| c.status == s).count();
    let (pass, fail, skip) = (count(Status::Pass), count(Status::Fail), count(Status::Skip));
    writeln!(out, "{pass} passed, {fail} failed, {skip} skipped")?;
    Ok(if fail == 0 { 0 } else { EXIT_VERIFY_FAIL })
}

fn cmd_matrix(args: &MatrixArgs) -> Result<u8> {
    let phi = parse_map(&args.map)?;
    if args.n_trunc == 0 {
        return Err(input("--n must be positive"));
    }
    let m = composition_matrix(&phi, args.n_trunc).map_err(input)?;
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    writeln!(out, "i,j,re,im")?;
    for i in 0..m.n_trunc() {
        for j in 0..m.n_trunc() {
            let z = m.get(i, j);
            writeln!(out, "{i},{j},{},{}", z.re, z.im)?;
        }
    }
    out.flush()?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Matrix(a) => cmd_matrix(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<InputError>() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::from(EXIT_VERIFY_FAIL)
            }
        }
    }
}

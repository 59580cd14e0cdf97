//! Command-line front end. [`run`] parses arguments, writes to the given
//! streams and returns the process exit code: 0 on success, 2 when an
//! input is malformed or a budget refuses the work, 1 on internal failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::asymptotics::{fit_growth, predicted_growth};
use crate::census::{
    count_bruteforce, count_forward, CensusConfig, CensusError, CountQuery, CountResult, DedupMode, Method, Split,
    Variant,
};
use crate::decompose::{decompose_split, full_decomposition, DecomposeError};
use crate::mahler::{height_measure_chain, roots, MahlerError, DEFAULT_TOL};
use crate::poly::{compose, IntPoly};
use crate::report::{parse_count_csv, CountRow, Format, RowWriter};
use crate::text::{parse_grid, parse_poly, parse_split, parse_variant, GridSpec};
use crate::verify::{run_all, VerifyConfig};

/// Overrides the cap on the forward enumerator's dedup set.
pub const BUDGET_ENV: &str = "POLYCENSUS_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "polycensus", version, about = "Count, decompose and measure integer polynomials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count decomposable polynomials of bounded height
    Count(CountArgs),
    /// Decompose a polynomial given as ascending coefficients, e.g. 5,2,3,2,1
    Decompose(DecomposeArgs),
    /// Complex roots, Mahler measure and height/measure inequalities
    Mahler(MahlerArgs),
    /// Fit growth exponents to a count CSV and compare with the predictions
    Fit(FitArgs),
    /// Run the acceptance suite
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Forward,
    Oracle,
    /// Run both and fail unless the counts agree
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DedupArg {
    /// One canonical witness per polynomial, no memory overhead
    Canonical,
    /// Hash set of generated coefficient vectors
    Set,
}

#[derive(Debug, Args)]
struct CountArgs {
    /// Degree d of the counted polynomials
    #[arg(long)]
    degree: usize,
    /// Count monic polynomials (the default)
    #[arg(long, conflicts_with = "non_monic")]
    monic: bool,
    /// Count polynomials with any nonzero leading coefficient
    #[arg(long)]
    non_monic: bool,
    /// Largest height; alone it gives a single-point grid
    #[arg(long)]
    height_max: Option<u64>,
    /// geometric:k (k heights halving down from --height-max) or a list like 10,20,40
    #[arg(long, value_parser = |s: &str| parse_grid(s))]
    grid: Option<GridSpec>,
    /// total, split:m,n or indecomp-pair
    #[arg(long, default_value = "total", value_parser = |s: &str| parse_variant(s))]
    variant: Variant,
    #[arg(long, value_enum, default_value_t = MethodArg::Forward)]
    method: MethodArg,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = OutArg::Csv)]
    out: OutArg,
    /// Largest coefficient box the brute-force oracle may scan
    #[arg(long)]
    budget: Option<u128>,
    #[arg(long, value_enum, default_value_t = DedupArg::Canonical)]
    dedup: DedupArg,
    /// Fill the elapsed_seconds column
    #[arg(long)]
    timings: bool,
    /// Write rows to this file (plus FILE.manifest.json) instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    /// Ascending coefficients, e.g. 5,2,3,2,1
    #[arg(allow_hyphen_values = true)]
    poly: String,
    /// Only look for g∘h with deg g = m and deg h = n
    #[arg(long, value_parser = |s: &str| parse_split(s))]
    split: Option<Split>,
}

#[derive(Debug, Args)]
struct MahlerArgs {
    #[arg(allow_hyphen_values = true)]
    poly: String,
    /// Relative residual tolerance for the roots
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// CSV written by `count`
    #[arg(long)]
    input: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// 10^3 random samples per randomized check instead of 10^4
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 4)]
    jobs: usize,
}

#[derive(Debug, Error)]
enum CliError {
    /// Bad input or a refused budget.
    #[error("{0}")]
    Refused(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Refused(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<CensusError> for CliError {
    fn from(e: CensusError) -> Self {
        match e {
            CensusError::InvalidQuery(_) | CensusError::BudgetExceeded { .. } | CensusError::Decompose(_) => {
                CliError::Refused(e.to_string())
            }
            CensusError::Overflow | CensusError::Pool(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("io: {e}"))
    }
}

fn refused(e: impl ToString) -> CliError {
    CliError::Refused(e.to_string())
}

fn internal(e: impl ToString) -> CliError {
    CliError::Internal(e.to_string())
}

type CliResult = Result<i32, CliError>;

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let command_line: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let result = match cli.command {
        Command::Count(a) => count(&a, &command_line, out),
        Command::Decompose(a) => decompose(&a, out),
        Command::Mahler(a) => mahler(&a, out),
        Command::Fit(a) => fit(&a, out),
        Command::Verify(a) => verify(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[derive(Debug, Serialize)]
struct ManifestConfig {
    degree: usize,
    monic: bool,
    variant: String,
    grid: Vec<u64>,
    method: String,
    format: String,
    dedup: String,
    timings: bool,
}

#[derive(Debug, Serialize)]
struct ManifestRow {
    #[serde(rename = "H")]
    height: u64,
    method: String,
    count: String,
    enumerated: String,
    elapsed_seconds: f64,
}

#[derive(Debug, Serialize)]
struct Budgets {
    oracle_box: String,
    dedup_set: String,
}

/// Provenance written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    command_line: Vec<String>,
    package: &'static str,
    version: &'static str,
    started_unix: f64,
    finished_unix: f64,
    workers: usize,
    budgets: Budgets,
    config: ManifestConfig,
    output: String,
    rows: Vec<ManifestRow>,
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn census_config(a: &CountArgs) -> Result<CensusConfig, CliError> {
    let mut config = CensusConfig::with_workers(a.jobs.max(1));
    if let Some(b) = a.budget {
        config.oracle_budget = b;
    }
    if let Ok(v) = std::env::var(BUDGET_ENV) {
        config.dedup_cap = v
            .trim()
            .parse()
            .map_err(|_| refused(format!("{BUDGET_ENV}={v:?} is not a non-negative integer")))?;
    }
    config.dedup = match a.dedup {
        DedupArg::Canonical => DedupMode::Canonical,
        DedupArg::Set => DedupMode::Set,
    };
    Ok(config)
}

fn count(a: &CountArgs, command_line: &[String], out: &mut dyn Write) -> CliResult {
    let started = unix_now();
    let grid = match (&a.grid, a.height_max) {
        (Some(g), hmax) => g.resolve(hmax).map_err(refused)?,
        (None, Some(h)) => vec![h],
        (None, None) => return Err(refused("give --height-max or --grid")),
    };
    let monic = !a.non_monic;
    let config = census_config(a)?;
    let queries = grid
        .iter()
        .map(|&h| CountQuery::new(a.degree, h, monic, a.variant))
        .collect::<Result<Vec<_>, _>>()?;
    let methods: &[Method] = match a.method {
        MethodArg::Forward => &[Method::Forward],
        MethodArg::Oracle => &[Method::Oracle],
        MethodArg::Both => &[Method::Forward, Method::Oracle],
    };
    let format = match a.out {
        OutArg::Csv => Format::Csv,
        OutArg::Json => Format::Json,
    };
    let sink: Box<dyn Write + '_> = match &a.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(&mut *out),
    };
    let mut writer = RowWriter::new(format, sink);
    let mut manifest_rows = Vec::new();
    for q in &queries {
        let mut results: Vec<CountResult> = Vec::with_capacity(methods.len());
        for method in methods {
            let r = match method {
                Method::Forward => count_forward(q, &config)?,
                Method::Oracle => count_bruteforce(q, &config)?,
            };
            writer.write(&CountRow::from_result(&r, a.timings)).map_err(internal)?;
            manifest_rows.push(ManifestRow {
                height: q.height,
                method: r.method.label().into(),
                count: r.count.to_string(),
                enumerated: r.enumerated.to_string(),
                elapsed_seconds: r.elapsed_seconds,
            });
            results.push(r);
        }
        if let [fwd, oracle] = &results[..] {
            if fwd.count != oracle.count {
                return Err(internal(format!(
                    "forward count {} != oracle count {} at H={}",
                    fwd.count, oracle.count, q.height
                )));
            }
        }
    }
    writer.finish().map_err(internal)?;
    if let Some(path) = &a.output {
        let manifest = RunManifest {
            command_line: command_line.to_vec(),
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            started_unix: started,
            finished_unix: unix_now(),
            workers: config.workers,
            budgets: Budgets {
                oracle_box: config.oracle_budget.to_string(),
                dedup_set: config.dedup_cap.to_string(),
            },
            config: ManifestConfig {
                degree: a.degree,
                monic,
                variant: a.variant.to_string(),
                grid,
                method: format!("{:?}", a.method).to_lowercase(),
                format: format!("{:?}", a.out).to_lowercase(),
                dedup: format!("{:?}", a.dedup).to_lowercase(),
                timings: a.timings,
            },
            output: path.display().to_string(),
            rows: manifest_rows,
        };
        let file = File::create(manifest_path(path))?;
        serde_json::to_writer_pretty(BufWriter::new(file), &manifest).map_err(internal)?;
    }
    Ok(0)
}

fn decompose_error(e: DecomposeError) -> CliError {
    match e {
        DecomposeError::Normalization(_) => internal(e),
        _ => refused(e),
    }
}

fn decompose(a: &DecomposeArgs, out: &mut dyn Write) -> CliResult {
    let f = parse_poly(&a.poly).map_err(refused)?;
    if f.is_zero() {
        return Err(refused("the zero polynomial has no decomposition"));
    }
    if let Some(split) = a.split {
        match decompose_split(&f, split).map_err(decompose_error)? {
            Some(w) => writeln!(out, "{w}")?,
            None => writeln!(out, "no decomposition with split {split}")?,
        }
        return Ok(0);
    }
    let chain = full_decomposition(&f).map_err(decompose_error)?;
    if chain.len() < 2 {
        writeln!(out, "indecomposable")?;
        return Ok(0);
    }
    let (h, outer) = chain.split_last().expect("chain has at least two factors");
    let mut g = outer[0].clone();
    for p in &outer[1..] {
        g = compose(&g, p).map_err(internal)?;
    }
    writeln!(out, "g = {g} ; h = {h}")?;
    if chain.len() > 2 {
        let parts: Vec<String> = chain.iter().map(IntPoly::to_string).collect();
        writeln!(out, "chain = {}", parts.join(" o "))?;
    }
    Ok(0)
}

fn mahler(a: &MahlerArgs, out: &mut dyn Write) -> CliResult {
    let f = parse_poly(&a.poly).map_err(refused)?;
    let map = |e: MahlerError| match e {
        MahlerError::NoConvergence { .. } => internal(e),
        _ => refused(e),
    };
    let r = roots(&f, a.tol).map_err(map)?;
    let height = f.height().map_err(internal)?;
    writeln!(out, "degree {}, H(f) = {height}, M(f) = {:.12}", r.roots.len(), r.measure)?;
    writeln!(out, "roots (relative residual <= {:e}):", r.residual_bound)?;
    for (z, res) in r.roots.iter().zip(&r.residuals) {
        writeln!(out, "  {:+.12} {:+.12}i  residual {res:.2e}", z.re, z.im)?;
    }
    writeln!(out, "inequalities:")?;
    for c in height_measure_chain(&f, "f").map_err(map)? {
        let status = if c.holds { "ok" } else { "VIOLATED" };
        writeln!(out, "  {}: {:.6} <= {:.6}, slack {:+.3e} {status}", c.name, c.lhs, c.rhs, c.slack)?;
    }
    Ok(0)
}

type SeriesKey = (usize, bool, String, Option<usize>, Option<usize>, String);

fn fit(a: &FitArgs, out: &mut dyn Write) -> CliResult {
    let text = std::fs::read_to_string(&a.input).map_err(|e| refused(format!("{}: {e}", a.input.display())))?;
    let rows = parse_count_csv(&text).map_err(refused)?;
    let mut series: Vec<(SeriesKey, Vec<(u64, u128)>)> = Vec::new();
    for r in &rows {
        let key = (r.d, r.monic, r.variant.clone(), r.m, r.n, r.method.clone());
        match series.iter_mut().find(|s| s.0 == key) {
            Some(s) => s.1.push((r.height, r.count)),
            None => series.push((key, vec![(r.height, r.count)])),
        }
    }
    for ((d, monic, variant, m, n, method), mut points) in series {
        points.sort_unstable();
        let split = match (m, n) {
            (Some(m), Some(n)) => format!(" {m},{n}"),
            _ => String::new(),
        };
        let kind = if monic { "monic" } else { "non-monic" };
        writeln!(out, "d={d} {kind} {variant}{split} ({method}), {} points", points.len())?;
        let v = match (variant.as_str(), m, n) {
            ("split", Some(m), Some(n)) => Variant::Split(Split::new(m, n)),
            ("indecomp_pair", _, _) => Variant::IndecompPair,
            _ => Variant::Total,
        };
        match fit_growth(&points) {
            Ok(fit) => {
                let model = if fit.log_model_preferred { "H^e log H" } else { "H^e" };
                writeln!(
                    out,
                    "  fitted    e = {:.4} ({model}, C = {:.4}, rms {:.2e}, {} points)",
                    fit.exponent, fit.constant, fit.rms_residual, fit.points_used
                )?;
                let verdict = if !fit.log_conclusive {
                    "inconclusive"
                } else if fit.log_model_preferred {
                    "yes"
                } else {
                    "no"
                };
                writeln!(
                    out,
                    "            power e = {:.4} (rms {:.2e}); with log e = {:.4} (rms {:.2e}); log factor: {verdict}",
                    fit.power_exponent, fit.power_rms, fit.log_exponent, fit.log_rms
                )?;
            }
            Err(e) => writeln!(out, "  fitted    unavailable: {e}")?,
        }
        match predicted_growth(d, monic, v) {
            Ok(p) => writeln!(out, "  predicted {p} ({:?})", p.kind)?,
            Err(e) => writeln!(out, "  predicted unavailable: {e}")?,
        }
    }
    Ok(0)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    let mut cfg = if a.quick { VerifyConfig::quick() } else { VerifyConfig::default() };
    cfg.workers = a.jobs.max(1);
    let outcomes = run_all(&cfg);
    for o in &outcomes {
        writeln!(out, "{o}")?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    writeln!(out, "{} passed, {failed} failed", outcomes.len() - failed)?;
    Ok(if failed == 0 { 0 } else { 1 })
}

//! Command-line surface: `sieve`, `verify`, `density`, `constants`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cache::{self, CacheStatus};
use crate::characters::Family;
use crate::density::{vanishing_constants, family_average, prime_cutoff, DensityReport, TestFunctionPair};
use crate::error::{Error, Result};
use crate::par::{with_threads, Execution};
use crate::sieve::PrimeTable;
use crate::verify::{run_suite, Suite};
use crate::weight::SmoothWeight;

#[derive(Debug, Parser)]
#[command(name = "gaussdensity", version, about = "Hecke characters over Z[i] and one-level density experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sieve primary primes up to a norm bound into the cache.
    Sieve {
        #[arg(long = "max-norm")]
        max_norm: u64,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Run one invariant suite; exits 1 if any property fails.
    Verify {
        suite: Suite,
        #[arg(long = "max-norm")]
        max_norm: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Family averages of the one-level statistic, written as CSV.
    Density(DensityArgs),
    /// Print the vanishing and non-vanishing constants.
    Constants,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub family: Family,
    /// Comma-separated list of X values.
    #[arg(long = "x", value_delimiter = ',', required = true)]
    pub xs: Vec<u64>,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Prime table bound; must reach max X^θ.
    #[arg(long)]
    pub y: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

/// Validated density configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: Family,
    pub xs: Vec<u64>,
    pub pair: TestFunctionPair,
    pub y: u64,
    pub threads: Option<usize>,
    pub cache_dir: PathBuf,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn from_args(a: &DensityArgs) -> Result<Self> {
        let pair = TestFunctionPair::new(a.theta)?;
        if let Some(&x) = a.xs.iter().find(|&&x| x < 100) {
            return Err(Error::InvalidArgument(format!("X must be at least 100, got {x}")));
        }
        let needed = a.xs.iter().map(|&x| prime_cutoff(x as f64, &pair)).max().unwrap_or(0);
        let y = match a.y {
            Some(y) if y < needed => return Err(Error::PrimeCutoff { needed, have: y }),
            Some(y) => y,
            None => needed,
        };
        Ok(RunConfig {
            family: a.family,
            xs: a.xs.clone(),
            pair,
            y,
            threads: a.threads,
            cache_dir: cache::resolve_dir(a.cache.as_deref()),
            out: a.out.clone(),
        })
    }
}

/// Process exit status.
pub type ExitCode = i32;

pub fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sieve { max_norm, cache } => cmd_sieve(max_norm, cache.as_deref()),
        Command::Verify {
            suite,
            max_norm,
            seed,
            threads,
        } => with_threads(threads, || cmd_verify(suite, max_norm, seed)),
        Command::Density(args) => {
            let cfg = RunConfig::from_args(&args)?;
            cmd_density(&cfg)
        }
        Command::Constants => {
            print!("{}", constants_table());
            Ok(0)
        }
    }
}

fn load_primes(dir: &Path, y: u64) -> Result<PrimeTable> {
    let (table, status) = cache::ensure(dir, y)?;
    if let CacheStatus::Regenerated { reason } = &status {
        eprintln!("warning: regenerated prime cache: {reason}");
    }
    Ok(table)
}

pub fn cmd_sieve(max_norm: u64, dir: Option<&Path>) -> Result<ExitCode> {
    let dir = cache::resolve_dir(dir);
    let (table, status) = cache::ensure(&dir, max_norm)?;
    let path = cache::cache_path(&dir, max_norm);
    match status {
        CacheStatus::Reused => println!("{}: valid, {} primes (unchanged)", path.display(), table.len()),
        CacheStatus::Written => println!("{}: wrote {} primes", path.display(), table.len()),
        CacheStatus::Regenerated { reason } => {
            eprintln!("warning: regenerated prime cache: {reason}");
            println!("{}: rewrote {} primes", path.display(), table.len());
        }
    }
    Ok(0)
}

pub fn cmd_verify(suite: Suite, max_norm: Option<u64>, seed: u64) -> Result<ExitCode> {
    let props = run_suite(suite, max_norm, seed, Execution::Parallel)?;
    let failed = props.iter().filter(|p| !p.passed).count();
    for p in &props {
        println!("{p}");
    }
    println!("{suite}: {} passed, {failed} failed", props.len() - failed);
    Ok(if failed == 0 { 0 } else { 1 })
}

pub fn density_reports(cfg: &RunConfig) -> Result<Vec<DensityReport>> {
    let primes = load_primes(&cfg.cache_dir, cfg.y)?;
    with_threads(cfg.threads, || {
        cfg.xs
            .iter()
            .map(|&x| {
                let weight = SmoothWeight::for_x(x as f64);
                family_average(cfg.family, x, &cfg.pair, &weight, &primes, Execution::Parallel)
            })
            .collect()
    })
}

pub const CSV_HEADER: [&str; 9] = [
    "family",
    "X",
    "theta",
    "Y",
    "num_c",
    "average",
    "prediction",
    "discrepancy",
    "trunc_error_model",
];

pub fn write_csv<W: Write>(w: W, reports: &[DensityReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.into());
    out.write_record(CSV_HEADER).map_err(io)?;
    for r in reports {
        out.write_record([
            r.family.to_string(),
            r.x.to_string(),
            r.theta.to_string(),
            r.y.to_string(),
            r.num_c.to_string(),
            r.average.to_string(),
            r.prediction.to_string(),
            r.discrepancy.to_string(),
            r.trunc_error_model.to_string(),
        ])
        .map_err(io)?;
    }
    out.flush()?;
    Ok(())
}

/// gnuplot data: `log X` and the discrepancy, tab separated.
pub fn plot_data(reports: &[DensityReport]) -> String {
    let mut s = String::from("# log(X)\tdiscrepancy\n");
    for r in reports {
        let _ = writeln!(s, "{}\t{}", (r.x as f64).ln(), r.discrepancy);
    }
    s
}

pub fn plot_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".plot");
    PathBuf::from(p)
}

pub fn cmd_density(cfg: &RunConfig) -> Result<ExitCode> {
    let reports = density_reports(cfg)?;
    if let Some(dir) = cfg.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    write_csv(fs::File::create(&cfg.out)?, &reports)?;
    fs::write(plot_path(&cfg.out), plot_data(&reports))?;
    for r in &reports {
        eprintln!(
            "{} X={} #C={} average={:.6} prediction={} discrepancy={:.6}",
            r.family, r.x, r.num_c, r.average, r.prediction, r.discrepancy
        );
    }
    Ok(0)
}

pub fn constants_table() -> String {
    let c = vanishing_constants();
    format!(
        "quadratic average order of vanishing <= {:.10}\n\
         quadratic non-vanishing proportion  >= {:.10}\n\
         quartic average order of vanishing  <= {:.10}\n\
         quartic non-vanishing proportion    >= {:.10}\n",
        c.quadratic_vanishing, c.quadratic_nonvanishing, c.quartic_vanishing, c.quartic_nonvanishing
    )
}

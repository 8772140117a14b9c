use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hardy_core::output::{
    write_autocov_csv, write_certificate_csv, write_compare_csv, write_density_csv, write_trajectory_csv,
};
use hardy_core::rng::NORMAL_METHOD;
use hardy_core::sim::{compare_report_with, simulate, Centering, Method};
use hardy_core::spectral::{density_grid, DEFAULT_LEVELS};
use hardy_core::{build_chain_with, build_level_with, BigLag, BlockChain, Error, Profile, SimConfig, SpacingRule};
use serde_json::{json, Value};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_IO: u8 = 1;
const MAX_RANGE_ROWS: u64 = 10_000_000;

#[derive(Parser)]
#[command(name = "hardy", version, about = "Hardy-Rogosinski process: spectral construction, autocovariances, simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Level summary (x_n, M_n, digit counts) as JSON.
    Params {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        mini_mode: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Autocovariances at a lag range `a..b` or a comma list of lags and aliases.
    Acov {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value = "0..40")]
        lags: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral density on a midpoint grid of (-pi, pi).
    Density {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated trajectories.
    Simulate {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical against theoretical autocovariances.
    Compare {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, default_value_t = 40)]
        max_lag: usize,
        /// Subtract the sample mean of each path.
        #[arg(long)]
        sample_mean: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Divergence certificates for uniformly sampled angles.
    Divergence {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 1)]
        block: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct ChainArgs {
    /// Comma-separated levels n_1 < n_2 < ...
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LEVELS.to_vec())]
    levels: Vec<u64>,
    /// Comma-separated odd spacings c_k, one per level.
    #[arg(long, value_delimiter = ',')]
    spacings: Option<Vec<String>>,
    #[arg(long)]
    mini_mode: bool,
}

#[derive(Args, Clone)]
struct SimArgs {
    #[arg(long, default_value_t = 2000)]
    length: usize,
    #[arg(long, default_value_t = 200)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    jitter: f64,
    /// Factor with Durbin-Levinson instead of dense Cholesky.
    #[arg(long)]
    levinson: bool,
}

enum CliError {
    Core(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Core(e) => match e {
                Error::ZeroDenominator
                | Error::ParseInt(_)
                | Error::LevelTooSmall(_)
                | Error::IndexOutOfRange { .. }
                | Error::InvalidConfig(_)
                | Error::SizeLimit { .. }
                | Error::InvalidArgument(_) => EXIT_USAGE,
                _ => EXIT_NUMERIC,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn profile(mini: bool) -> Profile {
    if mini {
        Profile::Mini
    } else {
        Profile::Full
    }
}

impl ChainArgs {
    fn build(&self) -> CliResult<BlockChain> {
        let rule = match &self.spacings {
            None => SpacingRule::Standard,
            Some(cs) => SpacingRule::Explicit(cs.iter().map(|c| c.trim().parse::<BigLag>()).collect::<Result<_, _>>()?),
        };
        Ok(build_chain_with(&self.levels, rule, profile(self.mini_mode))?)
    }

    fn params(&self) -> Value {
        json!({
            "levels": self.levels,
            "spacing": match &self.spacings {
                None => json!("standard"),
                Some(cs) => json!(cs),
            },
            "profile": profile(self.mini_mode).to_string(),
        })
    }
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        let mut c = SimConfig::new(self.length, self.count, self.seed);
        c.jitter = self.jitter;
        c.method = if self.levinson { Method::Levinson } else { Method::Cholesky };
        c
    }

    fn params(&self) -> Value {
        json!({
            "length": self.length,
            "count": self.count,
            "seed": self.seed,
            "jitter": self.jitter,
            "method": if self.levinson { "levinson" } else { "cholesky" },
            "normal_method": NORMAL_METHOD,
        })
    }
}

fn chain_warnings(chain: &BlockChain) -> Vec<String> {
    let mut w: Vec<String> = chain
        .printed_admissibility()
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} fails ({}); the square-root form is used", c.name, c.detail))
        .collect();
    for b in chain.blocks() {
        if b.level.big_m() < 0.0 {
            w.push(format!("M_n = {:.6} < 0 at n = {}", b.level.big_m(), b.level.n()));
        }
    }
    w
}

fn manifest(command: &str, params: Value, chain: Option<&BlockChain>, seed: Option<u64>, warnings: Vec<String>, results: Value) -> Value {
    json!({
        "command": command,
        "parameters": params,
        "chain": chain.map(|c| serde_json::to_value(c.manifest()).unwrap()),
        "seed": seed,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "warnings": warnings,
        "results": results,
    })
}

/// Runs `body` against the output file (or stdout) and writes the manifest next to it.
fn emit(out: &Option<PathBuf>, body: impl FnOnce(&mut dyn Write) -> io::Result<()>, manifest: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(manifest).unwrap() + "\n";
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
            std::fs::write(manifest_path(path), text)?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            body(&mut w)?;
            w.flush()?;
            eprint!("{text}");
        }
    }
    Ok(())
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Expands `a..b` (inclusive) or a comma list of decimal lags and aliases.
fn parse_lags(chain: &BlockChain, spec: &str) -> CliResult<Vec<hardy_core::AutocovRecord>> {
    if let Some((a, b)) = spec.split_once("..") {
        let a = chain.resolve_lag(a)?;
        let b = chain.resolve_lag(b.trim_start_matches('='))?;
        if b < a {
            return Err(Error::InvalidArgument(format!("empty lag range {spec}")).into());
        }
        let rows = &b - &a + 1u32;
        if rows > MAX_RANGE_ROWS.into() {
            return Err(Error::InvalidArgument(format!("lag range {spec} has more than {MAX_RANGE_ROWS} rows")).into());
        }
        let mut out = Vec::new();
        let mut h = a;
        while h <= b {
            out.push(chain.gamma(&h));
            h += 1u32;
        }
        return Ok(out);
    }
    spec.split(',')
        .map(|s| Ok(chain.gamma(&chain.resolve_lag(s)?)))
        .collect()
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Params { n, mini_mode, out } => {
            let lv = build_level_with(n, profile(mini_mode))?;
            let mut warnings = Vec::new();
            if lv.big_m() < 0.0 {
                warnings.push(format!("M_n = {:.6} < 0: the lower bound |S_p| >= M_n is vacuous at this level", lv.big_m()));
            }
            let summary = lv.summary();
            let first = summary.m_digits.first().copied();
            let last = summary.m_digits.last().copied();
            let mut v = serde_json::to_value(&summary).unwrap();
            v["m_first_digits"] = json!(first);
            v["m_last_digits"] = json!(last);
            v["notes"] = json!(warnings);
            let text = serde_json::to_string_pretty(&v).unwrap() + "\n";
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => print!("{text}"),
            }
        }
        Command::Acov { chain, lags, out } => {
            let ch = chain.build()?;
            let recs = parse_lags(&ch, &lags)?;
            let m = manifest(
                "acov",
                json!({"chain": chain.params(), "lags": lags}),
                Some(&ch),
                None,
                chain_warnings(&ch),
                json!({"rows": recs.len()}),
            );
            emit(&out, |w| write_autocov_csv(w, &recs), &m)?;
        }
        Command::Density { chain, grid, out } => {
            let ch = chain.build()?;
            let pts = density_grid(grid)?;
            let m = manifest(
                "density",
                json!({"chain": chain.params(), "grid": grid}),
                Some(&ch),
                None,
                chain_warnings(&ch),
                json!({"rows": grid, "floor": ch.floor()}),
            );
            emit(&out, |w| write_density_csv(w, &ch, &pts), &m)?;
        }
        Command::Simulate { chain, sim, out } => {
            let ch = chain.build()?;
            let batch = simulate(&ch, &sim.config())?;
            let mut warnings = chain_warnings(&ch);
            if batch.factorization_note.contains("jitter") {
                warnings.push(format!("factorization used {}", batch.factorization_note));
            }
            let m = manifest(
                "simulate",
                json!({"chain": chain.params(), "simulation": sim.params()}),
                Some(&ch),
                Some(sim.seed),
                warnings,
                json!({"factorization": batch.factorization_note}),
            );
            emit(&out, |w| write_trajectory_csv(w, &batch), &m)?;
        }
        Command::Compare {
            chain,
            sim,
            max_lag,
            sample_mean,
            out,
        } => {
            let ch = chain.build()?;
            let batch = simulate(&ch, &sim.config())?;
            let centering = if sample_mean { Centering::SampleMean } else { Centering::KnownZeroMean };
            let report = compare_report_with(&ch, &batch, max_lag, centering)?;
            let mut warnings = chain_warnings(&ch);
            if batch.factorization_note.contains("jitter") {
                warnings.push(format!("factorization used {}", batch.factorization_note));
            }
            if !report.flags.is_empty() {
                warnings.push(format!("|z| > 4 at lags {:?}", report.flags));
            }
            let m = manifest(
                "compare",
                json!({"chain": chain.params(), "simulation": sim.params(), "max_lag": max_lag, "centering": centering}),
                Some(&ch),
                Some(sim.seed),
                warnings,
                json!({"factorization": batch.factorization_note, "flags": report.flags}),
            );
            emit(&out, |w| write_compare_csv(w, &report), &m)?;
        }
        Command::Divergence {
            chain,
            block,
            samples,
            seed,
            out,
        } => {
            let ch = chain.build()?;
            let scan = ch.divergence_scan(block, samples, seed)?;
            let m = manifest(
                "divergence",
                json!({"chain": chain.params(), "block": block, "samples": samples}),
                Some(&ch),
                Some(seed),
                chain_warnings(&ch),
                json!({
                    "in_e": scan.in_e_count(),
                    "in_e_fraction": scan.in_e_fraction(),
                    "bound_held_fraction": scan.holds_fraction(),
                    "dirichlet_bound_fraction": scan.dirichlet_fraction(),
                }),
            );
            emit(&out, |w| write_certificate_csv(w, &scan), &m)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

mod config;
mod experiments;

use clap::{Args, Parser, Subcommand};
use config::{parse_domain, ConfigError, ExperimentConfig};
use experiments::{failure_report, run, RunError};
use levy_bridge::io::{json_string, OutputSet};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_PASS: u8 = 0;
const EXIT_CHECK: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "levy-bridge", version, about = "Batch experiments for Lévy-noise Schrödinger-problem interpolation")]
struct Cli {
    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    /// `L` for [-L, L] or `a,b`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    domain: Option<Vec<f64>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Unitary evolution with residual checks
    Evolve {
        #[arg(long, default_value = "cauchy")]
        kind: String,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long = "D", default_value_t = 1.0)]
        d: f64,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
        /// cauchy-lorentzian, gaussian or file:<csv>
        #[arg(long, default_value = "cauchy-lorentzian")]
        psi0: String,
    },
    /// Marginal-fitting bridge from a JSON problem file
    Bridge {
        #[arg(long)]
        problem: String,
    },
    /// Truncated compound-Poisson path simulation
    Simulate {
        #[arg(long, default_value = "cauchy")]
        kind: String,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Observation times (default T)
        #[arg(long, value_delimiter = ',')]
        times: Vec<f64>,
        /// Jump-size band `a,b` to count
        #[arg(long, value_delimiter = ',')]
        band: Option<Vec<f64>>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Non-Markov witness search
    MarkovTest {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        t: f64,
        #[arg(long = "p-range", value_delimiter = ',', default_value = "0,10")]
        p_range: Vec<f64>,
        #[arg(long, default_value_t = 1001)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Kernel dumps with positivity, normalization and Chapman-Kolmogorov checks
    Kernels {
        /// heat, cauchy, relativistic or unitary
        #[arg(long, default_value = "cauchy")]
        kind: String,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long = "D", default_value_t = 1.0)]
        d: f64,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        s: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<f64>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Jump-rate profiles and Fokker-Planck residuals
    Jumprate {
        /// ground or quantum
        #[arg(long, default_value = "quantum")]
        mode: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,2")]
        set: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// x range `a,b` of the profile
        #[arg(long = "x-range", value_delimiter = ',', allow_hyphen_values = true, default_value = "-10,10")]
        x_range: Vec<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Full acceptance suite
    Acceptance {
        /// Subset of criteria, e.g. 1,5,9
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
    /// Run an experiment described by a JSON config
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn pair(v: &[f64], what: &str) -> Result<[f64; 2], ConfigError> {
    match v {
        [a, b] => Ok([*a, *b]),
        _ => Err(ConfigError(format!("{what} takes `a,b`"))),
    }
}

fn apply_grid(c: &mut ExperimentConfig, g: GridArgs) -> Result<(), ConfigError> {
    c.grid_n = g.grid_n;
    c.domain = g.domain.as_deref().map(parse_domain).transpose()?;
    Ok(())
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, ConfigError> {
    let mut c = ExperimentConfig { output_dir: cli.out.display().to_string(), ..Default::default() };
    match cli.command {
        Command::Evolve { kind, m, d, t, grid, psi0 } => {
            c.experiment = "evolve".into();
            (c.kind, c.m, c.d, c.times, c.psi0) = (Some(kind), m, d, t, Some(psi0));
            apply_grid(&mut c, grid)?;
        }
        Command::Bridge { problem } => {
            c.experiment = "bridge".into();
            c.problem = Some(problem);
        }
        Command::Simulate { kind, m, eps, horizon, paths, seed, times, band, grid } => {
            c.experiment = "simulate".into();
            (c.kind, c.m, c.eps, c.horizon, c.paths, c.seed, c.times) = (Some(kind), m, Some(eps), Some(horizon), Some(paths), seed, times);
            c.band = band.as_deref().map(|b| pair(b, "band")).transpose()?;
            apply_grid(&mut c, grid)?;
        }
        Command::MarkovTest { s, t, p_range, points, seed } => {
            c.experiment = "markov-test".into();
            (c.s, c.times, c.points, c.seed) = (vec![s], vec![t], Some(points), seed);
            c.p_range = Some(pair(&p_range, "p-range")?);
        }
        Command::Kernels { kind, m, d, s, t, grid } => {
            c.experiment = "kernels".into();
            (c.kind, c.m, c.d, c.s, c.times) = (Some(kind), m, d, s, t);
            apply_grid(&mut c, grid)?;
        }
        Command::Jumprate { mode, set, eps, t, x_range, points } => {
            c.experiment = "jumprate".into();
            (c.mode, c.eps, c.times, c.points) = (Some(mode), Some(eps), vec![t], Some(points));
            c.set = Some(pair(&set, "set")?);
            c.domain = Some(pair(&x_range, "x-range")?);
        }
        Command::Acceptance { only } => {
            c.experiment = "acceptance".into();
            c.criteria = only;
        }
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| ConfigError(format!("{}: {e}", config.display())))?;
            return ExperimentConfig::from_json(&text);
        }
    }
    Ok(c)
}

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(v) = std::env::var("LEVY_BRIDGE_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| ConfigError(format!("LEVY_BRIDGE_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| ConfigError(e.to_string()))
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("run `levy-bridge --help` for usage");
    ExitCode::from(EXIT_USAGE)
}

fn write_report(dir: &std::path::Path, files: &mut OutputSet, report: &experiments::Report) -> Result<(), String> {
    files.add("report.json", json_string(report).map_err(|e| e.to_string())?);
    files.write_all(dir).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        return usage_error(&e.0);
    }
    let config = match build_config(cli) {
        Ok(c) => c,
        Err(e) => return usage_error(&e.0),
    };
    let dir = PathBuf::from(&config.output_dir);
    match run(&config) {
        Ok(mut outcome) => {
            if let Err(e) = write_report(&dir, &mut outcome.files, &outcome.report) {
                eprintln!("error: writing outputs: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            for line in &outcome.stdout {
                println!("{line}");
            }
            match &outcome.report.first_failure {
                None => ExitCode::from(EXIT_PASS),
                Some(f) => {
                    eprintln!("check failed: {f}");
                    ExitCode::from(EXIT_CHECK)
                }
            }
        }
        Err(RunError::Config(msg)) => usage_error(&msg),
        Err(RunError::Failure(msg)) => {
            let mut files = OutputSet::default();
            if let Err(e) = write_report(&dir, &mut files, &failure_report(&config, &msg)) {
                eprintln!("error: writing outputs: {e}");
            }
            eprintln!("experiment failed: {msg}");
            ExitCode::from(EXIT_CHECK)
        }
    }
}

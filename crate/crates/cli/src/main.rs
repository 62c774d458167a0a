use clap::{Args, Parser, Subcommand};
use relkac_cli::commands::{self, Outputs};
use relkac_cli::config::{parse_grid, parse_point};
use relkac_cli::verify::SUITES;
use relkac_cli::{init_threads, CliResult, Overrides, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "relkac", version, about = "Magnetic relativistic Schrodinger semigroups: lattice oracle vs Feynman-Kac-Ito Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML or JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON artifact path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// CSV artifact path.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// h0, h1, h2, h3 or nr.
    #[arg(long, global = true)]
    variant: Option<String>,
    /// zero, constant, tanh, quadratic or magnetic.
    #[arg(long, global = true)]
    field: Option<String>,
    /// zero, harmonic or well.
    #[arg(long, global = true)]
    potential: Option<String>,
    /// Evaluation point, comma separated.
    #[arg(long, global = true, value_parser = parse_point, allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    #[arg(long, global = true, visible_alias = "time")]
    t: Option<f64>,
    #[arg(long, global = true)]
    mass: Option<f64>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    paths: Option<usize>,
    #[arg(long, global = true)]
    slices: Option<usize>,
    /// Jump cutoff.
    #[arg(long, global = true)]
    cutoff: Option<f64>,
    /// Lattice as N,L.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<(usize, f64)>,
}

#[derive(Subcommand)]
enum Command {
    /// Free kernel, Levy density and subordinator density table (CSV).
    Kernel,
    /// Sample path skeletons (CSV).
    Sample,
    /// Monte Carlo estimate of the semigroup (JSON).
    Estimate,
    /// Lattice operator diagnostics (JSON) and semigroup column (CSV).
    Oracle {
        /// Also compute the gauge residual under the stock cubic gauge.
        #[arg(long)]
        residuals: bool,
    },
    /// Estimate and oracle with a PASS/FAIL verdict.
    Compare,
    /// Run verification suites.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: Vec<String>,
        #[arg(long)]
        all: bool,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    let c = cli.common;
    let mut config = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let (x, grid) = (c.x, c.grid);
    config.apply(&Overrides {
        seed: c.seed,
        variant: c.variant,
        field: c.field,
        potential: c.potential,
        x,
        t: c.t,
        mass: c.mass,
        dim: c.dim,
        paths: c.paths,
        slices: c.slices,
        cutoff: c.cutoff,
        grid,
    })?;
    let resolved = config.resolve()?;
    let out = Outputs { json: c.out, csv: c.csv };
    match cli.command {
        Command::Kernel => commands::kernel(&resolved, &out),
        Command::Sample => commands::sample(&resolved, &out),
        Command::Estimate => commands::estimate_cmd(&resolved, &out),
        Command::Oracle { residuals } => commands::oracle(&resolved, &out, residuals),
        Command::Compare => commands::compare(&resolved, &out),
        Command::Verify { suite, all } => {
            let suites: Vec<String> = if all || suite.is_empty() { SUITES.iter().map(|s| s.to_string()).collect() } else { suite };
            commands::verify_cmd(&resolved, &out, &suites)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relkac: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}


use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ncdirac::cli_reports::{
    cmd_derive, cmd_evolve, cmd_limits, cmd_verify, exit_code, CommandOutcome, DeriveTarget, RunConfig,
};
use ncdirac::{Error, Result};

#[derive(Parser)]
#[command(name = "ncdirac", version, about = "Heisenberg equations of a Dirac particle in noncommutative phase space")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for reports (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Deformation convention: `default` or `unit`.
    #[arg(long, global = true)]
    convention: Option<String>,

    /// Star-product truncation order.
    #[arg(long, global = true)]
    order: Option<usize>,

    /// Print the JSON summary instead of text.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Derive and report a Hamiltonian or rate equation.
    Derive {
        #[arg(value_enum)]
        target: Target,
    },
    /// Run all internal consistency checks.
    Verify,
    /// Evolve a wavepacket and check the Ehrenfest relations.
    Evolve,
    /// Check the commutative limits against the classical forms.
    Limits,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Hamiltonian,
    PositionRate,
    MomentumRate,
}

impl From<Target> for DeriveTarget {
    fn from(t: Target) -> Self {
        match t {
            Target::Hamiltonian => DeriveTarget::Hamiltonian,
            Target::PositionRate => DeriveTarget::PositionRate,
            Target::MomentumRate => DeriveTarget::MomentumRate,
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(c) = &cli.convention {
        cfg.convention = c.clone();
    }
    if let Some(n) = cli.order {
        cfg.star_order = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<CommandOutcome> {
    let cfg = load(cli)?;
    match &cli.command {
        Command::Derive { target } => cmd_derive((*target).into(), &cfg),
        Command::Verify => cmd_verify(&cfg),
        Command::Evolve => cmd_evolve(&cfg),
        Command::Limits => cmd_limits(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli);
    match &result {
        Ok(outcome) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&outcome.json).expect("json values serialize"));
            } else {
                print!("{}", outcome.text);
                for f in &outcome.files {
                    println!("wrote {}", f.display());
                }
            }
        }
        Err(e) => report(e),
    }
    ExitCode::from(exit_code(&result) as u8)
}

fn report(e: &Error) {
    eprintln!("error: {e}");
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        eprintln!("  caused by: {s}");
        source = s.source();
    }
}
